// Print the statement-level trigger skeleton for every relation the view
// depends on.

use rdfview::changeset::{emit_trigger_sql, ChangesetError};
use rdfview::fixtures;

fn main() {
    let rules = fixtures::worked_example_rules();
    for rel in rules.schema().dependency_order() {
        match emit_trigger_sql(&rules, &rel) {
            Ok(sql) => println!("{sql}"),
            Err(ChangesetError::NotRelevant(r)) => println!("-- no rule reads {r}\n"),
            Err(e) => panic!("{e}"),
        }
    }
}
