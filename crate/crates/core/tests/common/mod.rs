//! Test-only reference implementations.
//!
//! Nothing here calls into the engine's path evaluation, URI minting or
//! literal typing. Rules are read as plain data and evaluated by enumerating
//! every tuple chain along the rule's path.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rdfview::relational::{AttrType, Direction, ForeignKey};
use rdfview::rules::{CmpOp, RulePayload, Transform, UriTemplate};
use rdfview::{
    DatabaseState, Iri, Literal, Quad, QuadDataset, RuleSet, TransformationRule, Tuple, Value,
};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

fn lexical(v: &Value) -> Option<String> {
    match v {
        Value::Null => None,
        Value::Int(i) => Some(i.to_string()),
        Value::Text(s) => Some(s.clone()),
    }
}

fn mint(template: &UriTemplate, t: &Tuple) -> Option<Iri> {
    let mut iri = template.namespace.clone();
    for (i, a) in template.attrs.iter().enumerate() {
        if i > 0 {
            iri.push('/');
        }
        for b in lexical(t.get(a))?.bytes() {
            if b.is_ascii_alphanumeric() || b"-._~".contains(&b) {
                iri.push(b as char);
            } else {
                iri.push_str(&format!("%{b:02X}"));
            }
        }
    }
    Some(Iri::new(iri))
}

fn selected(rule: &TransformationRule, p: &Tuple) -> bool {
    rule.selection.iter().all(|s| {
        let ord = match (p.get(&s.attr), &s.value) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Text(a), Value::Text(b)) => a.cmp(b),
            _ => return false,
        };
        match s.op {
            CmpOp::Eq => ord.is_eq(),
            CmpOp::Ne => ord.is_ne(),
            CmpOp::Lt => ord.is_lt(),
            CmpOp::Le => ord.is_le(),
            CmpOp::Gt => ord.is_gt(),
            CmpOp::Ge => ord.is_ge(),
        }
    })
}

fn joined(fk: &ForeignKey, dir: Direction, a: &Tuple, b: &Tuple) -> bool {
    let (src, dst) = match dir {
        Direction::Forward => (a, b),
        Direction::Reverse => (b, a),
    };
    fk.source_attrs.iter().zip(&fk.target_attrs).all(|(x, y)| {
        let (l, r) = (src.get(x), dst.get(y));
        !l.is_null() && l == r
    })
}

/// End tuples of every full chain starting at `p`, found by trying every
/// tuple of every relation on the path.
pub fn chain_ends(rule: &TransformationRule, p: &Tuple, state: &DatabaseState) -> BTreeSet<Tuple> {
    let schema = state.schema();
    let mut chains: Vec<Vec<Tuple>> = vec![vec![p.clone()]];
    for (i, step) in rule.path.steps.iter().enumerate() {
        let fk = schema.foreign_key(&step.fk).expect("fk");
        let rel = state.relation(&rule.relations[i + 1]).expect("relation");
        let mut next = Vec::new();
        for chain in &chains {
            for cand in rel {
                if joined(fk, step.direction, chain.last().unwrap(), cand) {
                    let mut c = chain.clone();
                    c.push(cand.clone());
                    next.push(c);
                }
            }
        }
        chains = next;
    }
    chains
        .into_iter()
        .map(|c| c.last().unwrap().clone())
        .collect()
}

fn literal(
    rule: &TransformationRule,
    end: &Tuple,
    attrs: &[String],
    tr: Transform,
    state: &DatabaseState,
) -> Option<Literal> {
    let values: Vec<&Value> = attrs.iter().map(|a| end.get(a)).collect();
    if values.iter().any(|v| v.is_null()) {
        return None;
    }
    let string = |s: String| Literal {
        lexical: s,
        datatype: Iri::new(format!("{XSD}string")),
    };
    Some(match tr {
        Transform::Concat => string(values.iter().filter_map(|v| lexical(v)).collect()),
        Transform::Identity => {
            let ty = state
                .schema()
                .relation(rule.relations.last().unwrap())
                .and_then(|r| r.attribute(&attrs[0]))
                .map(|a| a.ty);
            match (values[0], ty) {
                (Value::Int(i), Some(AttrType::Integer)) => Literal {
                    lexical: i.to_string(),
                    datatype: Iri::new(format!("{XSD}integer")),
                },
                (v, _) => string(lexical(v).unwrap()),
            }
        }
    })
}

pub fn oracle_rule(
    rule: &TransformationRule,
    p: &Tuple,
    state: &DatabaseState,
    rules: &RuleSet,
) -> QuadDataset {
    let mut out = QuadDataset::new();
    if !selected(rule, p) {
        return out;
    }
    let Some(s) = mint(&rule.subject_template, p) else {
        return out;
    };
    let g = rules.graphs()[&rule.pivot].clone();
    let pred = rule.head.iri.clone();
    if let RulePayload::Class = rule.payload {
        out.insert(Quad::new(s, Iri::new(RDF_TYPE), pred, g));
        return out;
    }
    for end in chain_ends(rule, p, state) {
        if rule.non_null.iter().any(|a| end.get(a).is_null()) {
            continue;
        }
        let object = match &rule.payload {
            RulePayload::Datatype {
                value_attrs,
                transform,
                ..
            } => literal(rule, &end, value_attrs, *transform, state).map(Into::into),
            RulePayload::Object { object_template } => mint(object_template, &end).map(Into::into),
            RulePayload::Class => unreachable!(),
        };
        if let Some(o) = object {
            out.insert(Quad {
                subject: s.clone(),
                predicate: pred.clone(),
                object: o,
                graph: g.clone(),
            });
        }
    }
    out
}

pub fn oracle_tuple(pivot: &str, p: &Tuple, state: &DatabaseState, rules: &RuleSet) -> QuadDataset {
    let mut out = QuadDataset::new();
    for rule in rules.rules().iter().filter(|r| r.pivot == pivot) {
        out.extend(oracle_rule(rule, p, state, rules));
    }
    out
}

pub fn oracle_view(state: &DatabaseState, rules: &RuleSet) -> QuadDataset {
    let mut out = QuadDataset::new();
    for rule in rules.rules() {
        for p in state.relation(&rule.pivot).expect("pivot") {
            out.extend(oracle_rule(rule, p, state, rules));
        }
    }
    out
}

/// Pivot tuples whose RDF state differs between the two states, including
/// pivots that exist on one side only.
pub fn changed_pivots(
    s0: &DatabaseState,
    s1: &DatabaseState,
    rules: &RuleSet,
) -> BTreeSet<(String, Tuple)> {
    let mut out = BTreeSet::new();
    let pivots: BTreeSet<&str> = rules.rules().iter().map(|r| r.pivot.as_str()).collect();
    for rel in pivots {
        let a = s0.relation(rel).unwrap();
        let b = s1.relation(rel).unwrap();
        for p in a.union(b) {
            let before = if a.contains(p) {
                oracle_tuple(rel, p, s0, rules)
            } else {
                QuadDataset::new()
            };
            let after = if b.contains(p) {
                oracle_tuple(rel, p, s1, rules)
            } else {
                QuadDataset::new()
            };
            if before != after {
                out.insert((rel.to_string(), p.clone()));
            }
        }
    }
    out
}
