//! In-memory relational model: schemas with keys and named foreign keys,
//! immutable database states, updates and foreign-key paths.

mod path;
mod schema;
mod state;

pub use path::{eval_path, related_pivots, relations_of, Direction, Path, PathStep};
pub use schema::{AttrType, Attribute, ForeignKey, RelationScheme, RelationalSchema, SchemaError};
pub use state::{apply_update, DatabaseState, Tuple, Update, Value};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationalError {
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{relation}` has no attribute `{attr}`")]
    UnknownAttribute { relation: String, attr: String },
    #[error("unknown foreign key `{0}`")]
    UnknownForeignKey(String),
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
}
