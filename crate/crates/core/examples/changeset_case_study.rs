// Compute the changeset of the track-credit update and check it against
// full rematerialization.

use rdfview::fixtures::{self, example_update, sigma0};
use rdfview::{apply_update, compute_changeset, materialize_view};

fn main() {
    let rules = fixtures::worked_example_rules();
    let s0 = sigma0();
    let u = example_update();

    let cs = compute_changeset(&u, &s0, &rules).expect("update is valid");
    println!(
        "removed ({}):\n{}",
        cs.delta_minus.len(),
        cs.delta_minus.to_nquads()
    );
    println!(
        "added ({}):\n{}",
        cs.delta_plus.len(),
        cs.delta_plus.to_nquads()
    );

    let m0 = materialize_view(&s0, &rules);
    let m1 = materialize_view(&apply_update(&s0, &u).unwrap(), &rules);
    assert_eq!(cs.apply_to(&m0), m1);

    let min = cs.minimized();
    println!(
        "minimized: {} removed, {} added; still consistent: {}",
        min.delta_minus.len(),
        min.delta_plus.len(),
        min.apply_to(&m0) == m1
    );
}
