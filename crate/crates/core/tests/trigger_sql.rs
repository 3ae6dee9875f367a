use rdfview::changeset::{emit_trigger_sql, relevant_rules};
use rdfview::fixtures;
use sqlparser::ast::Statement;
use sqlparser::dialect::PostgreSqlDialect;
use sqlparser::parser::Parser;

#[test]
fn trigger_text_parses_as_postgres_for_every_relevant_relation() {
    let rules = fixtures::rules();
    for rel in rules.schema().relation_names() {
        if relevant_rules(&rules, rel).unwrap().is_empty() {
            continue;
        }
        let sql = emit_trigger_sql(&rules, rel).unwrap();
        let stmts = Parser::parse_sql(&PostgreSqlDialect {}, &sql)
            .unwrap_or_else(|e| panic!("{rel}: {e}\n{sql}"));
        assert_eq!(stmts.len(), 2, "{rel}");
        assert!(matches!(stmts[0], Statement::CreateTrigger { .. }), "{rel}");
        assert!(
            matches!(stmts[1], Statement::CreateFunction { .. }),
            "{rel}"
        );
        assert!(sql.contains(&format!("AFTER INSERT OR UPDATE OR DELETE ON {rel}\n")));
        assert!(sql.contains(&format!("REFERENCING OLD TABLE AS deleted_{rel}")));
    }
}

#[test]
fn header_lists_relevant_rules_and_pivots() {
    let rules = fixtures::worked_example_rules();
    let sql = emit_trigger_sql(&rules, "Track").unwrap();
    let mut lines = sql.lines();
    assert_eq!(
        lines.next(),
        Some("-- relevant rules: psi5, psi7, psi8, psi12")
    );
    assert_eq!(
        lines.next(),
        Some("-- pivot relations: Artist, Medium, Track")
    );
}
