// Parse the case-study DDL and print its relations and foreign keys.

use rdfview::ddl::render_schema;
use rdfview::fixtures::SCHEMA_SQL;
use rdfview::parse_ddl;

fn main() {
    let schema = parse_ddl(SCHEMA_SQL).expect("bundled schema parses");
    for rel in schema.relations() {
        let attrs: Vec<String> = rel
            .attributes
            .iter()
            .map(|a| format!("{}:{}", a.name, a.ty.keyword()))
            .collect();
        println!(
            "{}({}) key {:?}",
            rel.name,
            attrs.join(", "),
            rel.primary_key
        );
    }
    for fk in schema.foreign_keys() {
        println!(
            "{}: {}{:?} -> {}{:?}",
            fk.name, fk.source_relation, fk.source_attrs, fk.target_relation, fk.target_attrs
        );
    }
    println!("load order: {}", schema.dependency_order().join(", "));

    // Errors carry positions.
    let err = parse_ddl("CREATE TABLE T (\n  a BLOB\n);").unwrap_err();
    println!("bad DDL: {err}");

    println!("\n{}", render_schema(&schema));
}
