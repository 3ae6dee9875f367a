//! RDF states of pivot tuples and of the whole view.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::rdf::{Iri, Literal, Quad, QuadDataset, RDF_TYPE};
use crate::relational::{eval_path, AttrType, DatabaseState, RelationalSchema, Tuple, Value};
use crate::rules::{RulePayload, RuleSet, Transform, TransformationRule, UriTemplate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaterializeError {
    #[error("URI attribute `{0}` is NULL")]
    NullKeyComponent(String),
    #[error("value of `{relation}.{attr}` is NULL")]
    NullValue { relation: String, attr: String },
    #[error("unknown attribute `{relation}.{attr}`")]
    UnknownAttribute { relation: String, attr: String },
}

fn is_unreserved(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_' | b'~')
}

fn encode_segment(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for &b in s.as_bytes() {
        if is_unreserved(b) {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

/// The namespace followed by the template's attribute values joined by `/`.
/// Bytes outside the unreserved set are percent-encoded.
pub fn has_uri(template: &UriTemplate, t: &Tuple) -> Result<Iri, MaterializeError> {
    let mut parts = Vec::with_capacity(template.attrs.len());
    for a in &template.attrs {
        let lex = t
            .get(a)
            .lexical()
            .ok_or_else(|| MaterializeError::NullKeyComponent(a.clone()))?;
        parts.push(encode_segment(&lex));
    }
    Ok(Iri::new(format!(
        "{}{}",
        template.namespace,
        parts.join("/")
    )))
}

/// The literal for a value of `relation.attr`: `xsd:integer` for INTEGER
/// columns, `xsd:string` otherwise.
pub fn rdf_literal(
    value: &Value,
    attr: &str,
    relation: &str,
    schema: &RelationalSchema,
) -> Result<Literal, MaterializeError> {
    let unknown = || MaterializeError::UnknownAttribute {
        relation: relation.into(),
        attr: attr.into(),
    };
    let ty = schema
        .relation(relation)
        .and_then(|r| r.attribute(attr))
        .ok_or_else(unknown)?
        .ty;
    match (value, ty) {
        (Value::Null, _) => Err(MaterializeError::NullValue {
            relation: relation.into(),
            attr: attr.into(),
        }),
        (Value::Int(i), AttrType::Integer) => Ok(Literal::integer(*i)),
        (v, _) => Ok(Literal::string(v.lexical().expect("non-null"))),
    }
}

fn object_literal(
    rule: &TransformationRule,
    end: &Tuple,
    attrs: &[String],
    transform: Transform,
    schema: &RelationalSchema,
) -> Option<Literal> {
    if attrs.iter().any(|a| end.get(a).is_null()) {
        return None;
    }
    match transform {
        Transform::Identity => {
            rdf_literal(end.get(&attrs[0]), &attrs[0], rule.end_relation(), schema).ok()
        }
        Transform::Concat => Some(Literal::string(
            attrs
                .iter()
                .map(|a| end.get(a).lexical().expect("non-null"))
                .collect::<String>(),
        )),
    }
}

/// Quads generated by `rule` for pivot tuple `p` in `state`.
///
/// Panics if `state` was built over a schema the rule's path does not fit.
pub fn rdf_state_rule(
    rule: &TransformationRule,
    p: &Tuple,
    state: &DatabaseState,
    rules: &RuleSet,
) -> QuadDataset {
    let mut out = QuadDataset::new();
    if !rule.selection.iter().all(|s| s.holds(p)) {
        return out;
    }
    let Ok(subject) = has_uri(&rule.subject_template, p) else {
        return out;
    };
    let graph = rules
        .graph(&rule.pivot)
        .expect("every pivot has a graph")
        .clone();
    let predicate = rule.head.iri.clone();
    if let RulePayload::Class = rule.payload {
        out.insert(Quad::new(subject, Iri::new(RDF_TYPE), predicate, graph));
        return out;
    }
    let ends = eval_path(&rule.path, &BTreeSet::from([p.clone()]), state)
        .expect("rule paths are validated against the schema");
    for end in ends
        .iter()
        .filter(|t| rule.non_null.iter().all(|a| !t.get(a).is_null()))
    {
        match &rule.payload {
            RulePayload::Datatype {
                value_attrs,
                transform,
                ..
            } => {
                if let Some(lit) =
                    object_literal(rule, end, value_attrs, *transform, state.schema())
                {
                    out.insert(Quad::new(
                        subject.clone(),
                        predicate.clone(),
                        lit,
                        graph.clone(),
                    ));
                }
            }
            RulePayload::Object { object_template } => {
                if let Ok(o) = has_uri(object_template, end) {
                    out.insert(Quad::new(
                        subject.clone(),
                        predicate.clone(),
                        o,
                        graph.clone(),
                    ));
                }
            }
            RulePayload::Class => unreachable!(),
        }
    }
    out
}

/// `M[p](σ)`: the union over all rules pivoting on `pivot_relation`.
pub fn rdf_state_tuple(
    pivot_relation: &str,
    p: &Tuple,
    state: &DatabaseState,
    rules: &RuleSet,
) -> QuadDataset {
    let mut out = QuadDataset::new();
    for rule in rules.rules_for_pivot(pivot_relation) {
        out.extend(rdf_state_rule(rule, p, state, rules));
    }
    out
}

/// `M(σ)`: the union of the RDF states of all pivot tuples.
pub fn materialize_view(state: &DatabaseState, rules: &RuleSet) -> QuadDataset {
    let work: Vec<(&str, &Tuple)> = rules
        .pivots()
        .into_iter()
        .flat_map(|rel| {
            state
                .relation(rel)
                .expect("pivot relations exist in the state")
                .iter()
                .map(move |t| (rel, t))
        })
        .collect();
    work.par_iter()
        .map(|(rel, t)| rdf_state_tuple(rel, t, state, rules))
        .reduce(QuadDataset::new, |mut a, b| {
            a.extend(b);
            a
        })
}
