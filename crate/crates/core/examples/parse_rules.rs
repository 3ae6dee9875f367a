// Parse the 24-rule case-study view and show how each rule was classified.

use rdfview::fixtures::{self, RULES_RTR};
use rdfview::parse_rules;
use rdfview::relational::Direction;

fn main() {
    let rules = parse_rules(RULES_RTR, fixtures::schema()).expect("bundled rules parse");
    for r in rules.rules() {
        let steps: Vec<String> = r
            .path
            .steps
            .iter()
            .map(|s| match s.direction {
                Direction::Forward => s.fk.clone(),
                Direction::Reverse => format!("{}⁻", s.fk),
            })
            .collect();
        println!(
            "{:<6} {} pivot {:<12} {:<28} path [{}]",
            r.name,
            r.kind(),
            r.pivot,
            format!("{}:{}", r.head.prefix, r.head.local),
            steps.join(", ")
        );
    }

    let bad = "@prefix mbz: <http://musicbrainz.org/> .\n\
               @graph Artist mbz:ga .\n\
               psi: mbz:Named(s) <- Artist(r), hasURI(mbz:, r.name, s).\n";
    match parse_rules(bad, fixtures::schema()) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
}
