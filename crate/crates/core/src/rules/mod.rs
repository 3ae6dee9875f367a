//! The transformation-rule language.
//!
//! A rule file declares namespace prefixes, one named graph per pivot
//! relation, and rules of the form `name: head <- body.`. Every rule must
//! match one of three shapes:
//!
//! ```text
//! C(s)    <- R(r), hasURI(P, r.A, s) [, (r.a op c) ...]
//! P(s, v) <- R(r), hasURI(P, r.A, s), fk1(r, r1), ..., fkn(rn-1, rn),
//!            nonNull(rn.B), RDFLiteral(rn.B, v)
//! P(s, o) <- R(r), hasURI(P, r.A, s), fk1(r, r1), ..., fkn(rn-1, rn),
//!            hasURI(Q, rn.K, o)
//! ```
//!
//! Foreign-key literals may be written in either orientation; the direction
//! of each step is inferred from the relations it connects.

mod compile;
mod lexer;
mod parser;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::rdf::Iri;
use crate::relational::{Path, RelationalSchema, Tuple, Value};

pub use lexer::CmpOp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("line {line}: rule `{rule}` matches no rule pattern: {message}")]
    Pattern {
        line: usize,
        rule: String,
        message: String,
    },
    #[error("line {line}: {message}")]
    Resolution { line: usize, message: String },
    #[error("line {line}: rule `{rule}` is not object-preserving: {message}")]
    ObjectPreservation {
        line: usize,
        rule: String,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleKind {
    /// Class rule: `C(s)`.
    Ctr,
    /// Datatype-property rule: `P(s, v)` with a literal object.
    Dtr,
    /// Object-property rule: `P(s, o)` with an IRI object.
    Otr,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::Ctr => "CTR",
            RuleKind::Dtr => "DTR",
            RuleKind::Otr => "OTR",
        })
    }
}

/// A class or property name such as `mo:MusicArtist`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VocabularyTerm {
    pub prefix: String,
    pub local: String,
    pub iri: Iri,
}

impl fmt::Display for VocabularyTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.prefix, self.local)
    }
}

/// `hasURI(prefix, [attrs], _)`: the namespace followed by the attribute
/// values joined with `/`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UriTemplate {
    pub prefix: String,
    pub namespace: String,
    pub attrs: Vec<String>,
}

impl UriTemplate {
    /// Equal as IRI generators, regardless of which prefix label was used.
    pub fn same_as(&self, other: &UriTemplate) -> bool {
        self.namespace == other.namespace && self.attrs == other.attrs
    }
}

impl fmt::Display for UriTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:[{}]", self.prefix, self.attrs.join(", "))
    }
}

/// `(r.attr op constant)` on the pivot tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Selection {
    pub attr: String,
    pub op: CmpOp,
    pub value: Value,
}

impl Selection {
    /// NULL satisfies no comparison.
    pub fn holds(&self, t: &Tuple) -> bool {
        let v = t.get(&self.attr);
        let ord = match (v, &self.value) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Text(a), Value::Text(b)) => a.cmp(b),
            _ => return false,
        };
        match self.op {
            CmpOp::Eq => ord.is_eq(),
            CmpOp::Ne => ord.is_ne(),
            CmpOp::Lt => ord.is_lt(),
            CmpOp::Le => ord.is_le(),
            CmpOp::Gt => ord.is_gt(),
            CmpOp::Ge => ord.is_ge(),
        }
    }
}

/// Value transforms usable inside `RDFLiteral`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transform {
    /// The single value, typed after its column.
    Identity,
    /// Lexical forms concatenated into one string.
    Concat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RulePayload {
    Class,
    Datatype {
        value_attrs: Vec<String>,
        transform: Transform,
        /// The optional `"label", "Relation"` pair; informational only.
        label: Option<(String, String)>,
    },
    Object {
        object_template: UriTemplate,
    },
}

/// A validated rule in one of the three shapes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformationRule {
    pub name: String,
    pub line: usize,
    pub pivot: String,
    pub subject_template: UriTemplate,
    pub selection: Vec<Selection>,
    pub head: VocabularyTerm,
    pub path: Path,
    /// `Relations(path)`, starting with the pivot.
    pub relations: Vec<String>,
    /// Attributes of the path-end relation that must be non-NULL.
    pub non_null: Vec<String>,
    pub payload: RulePayload,
}

impl TransformationRule {
    pub fn kind(&self) -> RuleKind {
        match self.payload {
            RulePayload::Class => RuleKind::Ctr,
            RulePayload::Datatype { .. } => RuleKind::Dtr,
            RulePayload::Object { .. } => RuleKind::Otr,
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn end_relation(&self) -> &str {
        self.relations.last().expect("relations include the pivot")
    }

    /// Whether `relation` occurs on the rule's path (the pivot included).
    pub fn touches(&self, relation: &str) -> bool {
        self.relations.iter().any(|r| r == relation)
    }
}

/// The rule's path; the empty path at the pivot for class rules.
pub fn path_of(rule: &TransformationRule) -> &Path {
    &rule.path
}

/// A validated set of rules together with prefixes and graph names.
#[derive(Debug, Clone)]
pub struct RuleSet {
    schema: Arc<RelationalSchema>,
    prefixes: BTreeMap<String, String>,
    graphs: BTreeMap<String, Iri>,
    rules: Vec<TransformationRule>,
}

impl RuleSet {
    pub fn schema(&self) -> &Arc<RelationalSchema> {
        &self.schema
    }

    pub fn prefixes(&self) -> &BTreeMap<String, String> {
        &self.prefixes
    }

    /// The named graph of a pivot relation.
    pub fn graph(&self, relation: &str) -> Option<&Iri> {
        self.graphs.get(relation)
    }

    pub fn graphs(&self) -> &BTreeMap<String, Iri> {
        &self.graphs
    }

    pub fn rules(&self) -> &[TransformationRule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&TransformationRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn rules_for_pivot<'a>(
        &'a self,
        relation: &'a str,
    ) -> impl Iterator<Item = &'a TransformationRule> + 'a {
        self.rules.iter().filter(move |r| r.pivot == relation)
    }

    /// Pivot relations in name order.
    pub fn pivots(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.rules.iter().map(|r| r.pivot.as_str()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// A copy without the named rules. The remainder is validated again.
    pub fn without(&self, names: &[impl AsRef<str>]) -> Result<RuleSet, RuleError> {
        for n in names {
            if self.rule(n.as_ref()).is_none() {
                return Err(RuleError::Resolution {
                    line: 0,
                    message: format!("cannot exclude unknown rule `{}`", n.as_ref()),
                });
            }
        }
        let rules = self
            .rules
            .iter()
            .filter(|r| !names.iter().any(|n| n.as_ref() == r.name))
            .cloned()
            .collect();
        let set = RuleSet {
            schema: self.schema.clone(),
            prefixes: self.prefixes.clone(),
            graphs: self.graphs.clone(),
            rules,
        };
        compile::validate_set(&set)?;
        Ok(set)
    }
}

/// Parses and validates a rule file against `schema`.
pub fn parse_rules(text: &str, schema: Arc<RelationalSchema>) -> Result<RuleSet, RuleError> {
    let doc = parser::parse_document(text)?;
    let (prefixes, graphs, rules) = compile::compile(&doc, &schema)?;
    let set = RuleSet {
        schema,
        prefixes,
        graphs,
        rules,
    };
    compile::validate_set(&set)?;
    Ok(set)
}
