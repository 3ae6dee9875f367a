// A view over a schema of your own: authors, books and loans, with a
// reverse foreign-key hop, a selection, a concat literal and a composite
// subject key.

use std::sync::Arc;

use rdfview::{
    apply_update, compute_changeset, materialize_view, parse_ddl, parse_rules, DatabaseState,
    Tuple, Update, Value,
};

const DDL: &str = "
CREATE TABLE Author (
  aid TEXT PRIMARY KEY,
  first VARCHAR NOT NULL,
  last VARCHAR NOT NULL
);
CREATE TABLE Book (
  bid TEXT PRIMARY KEY,
  title VARCHAR NOT NULL,
  year INTEGER,
  aid TEXT NOT NULL,
  CONSTRAINT wrote FOREIGN KEY (aid) REFERENCES Author(aid)
);
CREATE TABLE Loan (
  bid TEXT NOT NULL,
  day INTEGER NOT NULL,
  PRIMARY KEY (bid, day),
  CONSTRAINT lent FOREIGN KEY (bid) REFERENCES Book(bid)
);";

const RULES: &str = r#"
@prefix ex:  <http://example.org/lib/> .
@prefix sch: <http://schema.org/> .
@graph Author ex:authors .
@graph Book   ex:books .
@graph Loan   ex:loans .

a1: sch:Person(s) <- Author(r), hasURI(ex:, r.aid, s).
a2: sch:name(s, v) <- Author(r), hasURI(ex:, r.aid, s), RDFLiteral(concat(r.first, r.last), v).
a3: sch:author(s, b) <- Author(r), hasURI(ex:, r.aid, s), wrote(b0, r), Book(b0), hasURI(ex:, b0.bid, b).
b1: sch:Book(s) <- Book(r), hasURI(ex:, r.bid, s).
b2: sch:Classic(s) <- Book(r), hasURI(ex:, r.bid, s), (r.year < 1950).
b3: sch:datePublished(s, v) <- Book(r), hasURI(ex:, r.bid, s), nonNull(r.year), RDFLiteral(r.year, v).
l1: sch:BorrowAction(s) <- Loan(r), hasURI(ex:, [r.bid, r.day], s).
l2: sch:object(s, o) <- Loan(r), hasURI(ex:, [r.bid, r.day], s), lent(r, b), Book(b), hasURI(ex:, b.bid, o).
"#;

fn t(pairs: &[(&str, Value)]) -> Tuple {
    Tuple::new(pairs.iter().cloned())
}

fn main() {
    let schema = Arc::new(parse_ddl(DDL).expect("schema"));
    let rules = parse_rules(RULES, Arc::clone(&schema)).expect("rules");
    let book = |bid: &str, title: &str, year: i64| {
        t(&[
            ("bid", Value::text(bid)),
            ("title", Value::text(title)),
            ("year", Value::Int(year)),
            ("aid", Value::text("orwell")),
        ])
    };
    let state = DatabaseState::from_relations(
        Arc::clone(&schema),
        [
            (
                "Author",
                vec![t(&[
                    ("aid", Value::text("orwell")),
                    ("first", Value::text("George ")),
                    ("last", Value::text("Orwell")),
                ])],
            ),
            ("Book", vec![book("b1984", "Nineteen Eighty-Four", 1949)]),
            (
                "Loan",
                vec![t(&[("bid", Value::text("b1984")), ("day", Value::Int(3))])],
            ),
        ],
    )
    .expect("valid state");
    print!("{}", materialize_view(&state, &rules).to_nquads());

    let u = Update::new("Book", [], [book("farm", "Animal Farm", 1945)]);
    let cs = compute_changeset(&u, &state, &rules).expect("changeset");
    println!(
        "\nafter inserting a book:\n- removed\n{}+ added\n{}",
        cs.delta_minus.to_nquads(),
        cs.delta_plus.to_nquads()
    );
    assert_eq!(
        cs.apply_to(&materialize_view(&state, &rules)),
        materialize_view(&apply_update(&state, &u).unwrap(), &rules)
    );
}
