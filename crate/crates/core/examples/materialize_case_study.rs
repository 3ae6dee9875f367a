// Materialize the case-study view and print the RDF state of artist a1.

use std::collections::BTreeMap;

use rdfview::fixtures::{self, sigma0, tuple};
use rdfview::{materialize_view, rdf_state_tuple};

fn main() {
    let rules = fixtures::worked_example_rules();
    let state = sigma0();
    let view = materialize_view(&state, &rules);

    let mut per_graph: BTreeMap<String, usize> = BTreeMap::new();
    for q in view.iter() {
        *per_graph.entry(q.graph.to_string()).or_default() += 1;
    }
    println!("{} quads", view.len());
    for (g, n) in per_graph {
        println!("  {g}: {n}");
    }

    let a1 = tuple(&state, "Artist", "a1");
    println!("\nRDF state of a1:");
    print!(
        "{}",
        rdf_state_tuple("Artist", &a1, &state, &rules).to_nquads()
    );
}
