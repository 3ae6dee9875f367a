//! The bundled MusicBrainz case study: schema, rules, the example state and
//! the track-credit update, plus the published changesets.

use std::sync::Arc;

use crate::ddl::parse_ddl;
use crate::relational::{DatabaseState, RelationalSchema, Tuple, Update, Value};
use crate::rules::{parse_rules, RuleSet};
use crate::workspace::{parse_update_json, read_relation_csv};

pub const SCHEMA_SQL: &str = include_str!("../fixtures/musicbrainz/schema.sql");
pub const RULES_RTR: &str = include_str!("../fixtures/musicbrainz/rules.rtr");
pub const UPDATE_JSON: &str =
    include_str!("../fixtures/musicbrainz/updates/example-track-credit.json");
pub const DELTA_MINUS_NQ: &str = include_str!("../fixtures/musicbrainz/expected/delta_minus.nq");
pub const DELTA_PLUS_NQ: &str = include_str!("../fixtures/musicbrainz/expected/delta_plus.nq");
pub const ARTIST_A1_NQ: &str = include_str!("../fixtures/musicbrainz/expected/artist_a1_state.nq");

/// Rules the worked example leaves out of the Artist changeset.
pub const WORKED_EXAMPLE_EXCLUDED: [&str; 3] = ["psi21", "psi22", "psi23"];

const DATA: [(&str, &str); 10] = [
    (
        "Artist",
        include_str!("../fixtures/musicbrainz/data/Artist.csv"),
    ),
    (
        "ArtistCredit",
        include_str!("../fixtures/musicbrainz/data/ArtistCredit.csv"),
    ),
    (
        "Credit",
        include_str!("../fixtures/musicbrainz/data/Credit.csv"),
    ),
    (
        "Medium",
        include_str!("../fixtures/musicbrainz/data/Medium.csv"),
    ),
    (
        "Recording",
        include_str!("../fixtures/musicbrainz/data/Recording.csv"),
    ),
    (
        "RecordingTag",
        include_str!("../fixtures/musicbrainz/data/RecordingTag.csv"),
    ),
    (
        "Release",
        include_str!("../fixtures/musicbrainz/data/Release.csv"),
    ),
    (
        "ReleaseGroup",
        include_str!("../fixtures/musicbrainz/data/ReleaseGroup.csv"),
    ),
    ("Tag", include_str!("../fixtures/musicbrainz/data/Tag.csv")),
    (
        "Track",
        include_str!("../fixtures/musicbrainz/data/Track.csv"),
    ),
];

pub fn schema() -> Arc<RelationalSchema> {
    Arc::new(parse_ddl(SCHEMA_SQL).expect("bundled schema parses"))
}

/// All 24 rules.
pub fn rules() -> RuleSet {
    parse_rules(RULES_RTR, schema()).expect("bundled rules parse")
}

/// The rules used by the worked changeset example.
pub fn worked_example_rules() -> RuleSet {
    rules()
        .without(&WORKED_EXAMPLE_EXCLUDED)
        .expect("excluded rules exist")
}

/// The example database state before the update.
pub fn sigma0() -> DatabaseState {
    let schema = schema();
    let mut rels = Vec::new();
    for (name, text) in DATA {
        let scheme = schema.relation(name).expect("fixture relation");
        let tuples = read_relation_csv(scheme, text.as_bytes()).expect("fixture csv");
        rels.push((name, tuples));
    }
    DatabaseState::from_relations(schema, rels).expect("fixture state is valid")
}

/// The track-credit update: `t_old` replaced by `t_new`.
pub fn example_update() -> Update {
    parse_update_json(&schema(), UPDATE_JSON).expect("fixture update parses")
}

pub fn t_old() -> Tuple {
    track("This Girl", "c2")
}

pub fn t_new() -> Tuple {
    track("This Girl (feat. Cookin' On 3 B.)", "c1")
}

fn track(name: &str, cid: &str) -> Tuple {
    Tuple::new([
        ("tid", Value::text("t1")),
        ("mid", Value::text("m1")),
        ("name", Value::text(name)),
        ("cid", Value::text(cid)),
    ])
}

/// The tuple of `relation` whose first key attribute equals `key`.
pub fn tuple(state: &DatabaseState, relation: &str, key: &str) -> Tuple {
    let scheme = state.schema().relation(relation).expect("relation");
    let attr = &scheme.primary_key[0];
    state
        .relation(relation)
        .expect("relation")
        .iter()
        .find(|t| t.get(attr) == &Value::text(key))
        .unwrap_or_else(|| panic!("no {relation} tuple {key}"))
        .clone()
}
