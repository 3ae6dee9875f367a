//! Materialized object-preserving RDB2RDF views with incremental maintenance.
//!
//! A view is defined by transformation rules that turn tuples of *pivot
//! relations* into RDF instances. Every pivot relation writes into its own
//! named graph, so the materialized view is a quad dataset. For a relational
//! update `u = (D, I)` the engine computes a changeset `⟨Δ−, Δ+⟩` from the
//! pre-state and the update alone, such that
//!
//! ```text
//! M(σ1) = (M(σ0) − Δ−) ∪ Δ+
//! ```
//!
//! The crate is organised bottom-up:
//!
//! - [`relational`]: schemas, immutable database states, updates, FK paths.
//! - [`ddl`]: parser for the `CREATE TABLE` dialect schemas are written in.
//! - [`rules`]: parser and validator for the transformation-rule language.
//! - [`rdf`]: quads, datasets and canonical N-Quads I/O.
//! - [`materialize`]: RDF states of pivot tuples and of the whole view.
//! - [`changeset`]: relevant rules/tuples, `Δ−`/`Δ+`, pre-state
//!   reconstruction and trigger SQL.
//! - [`verify`]: rematerialization oracle and random instance generation.
//! - [`workspace`]: on-disk workspaces (CSV data, update files, changeset
//!   folders) used by the `rdfview` binary.
//! - [`fixtures`]: the bundled MusicBrainz case study.

pub mod changeset;
pub mod ddl;
pub mod fixtures;
pub mod materialize;
pub mod rdf;
pub mod relational;
pub mod rules;
pub mod verify;
pub mod workspace;

pub use changeset::{compute_changeset, reconstruct_sigma0, Changeset, ChangesetError};
pub use ddl::parse_ddl;
pub use materialize::{materialize_view, rdf_state_rule, rdf_state_tuple};
pub use rdf::{Iri, Literal, Quad, QuadDataset, Term};
pub use relational::{
    apply_update, DatabaseState, Path, RelationalError, RelationalSchema, Tuple, Update, Value,
};
pub use rules::{parse_rules, RuleKind, RuleSet, TransformationRule};
pub use verify::{verify_changeset, VerificationReport};
