//! Syntax tree to validated rules.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::parser::{BodyLit, Const, Document, Proj, RuleAst, ValueExpr};
use super::{
    RuleError, RuleKind, RulePayload, RuleSet, Selection, Transform, TransformationRule,
    UriTemplate, VocabularyTerm,
};
use crate::rdf::Iri;
use crate::relational::{AttrType, Path, PathStep, RelationalSchema, Value};

type Compiled = (
    BTreeMap<String, String>,
    BTreeMap<String, Iri>,
    Vec<TransformationRule>,
);

pub(super) fn compile(doc: &Document, schema: &RelationalSchema) -> Result<Compiled, RuleError> {
    let mut prefixes = BTreeMap::new();
    for (label, iri, line) in &doc.prefixes {
        if let Some(prev) = prefixes.insert(label.clone(), iri.clone()) {
            if &prev != iri {
                return Err(RuleError::Resolution {
                    line: *line,
                    message: format!("prefix `{label}:` redefined"),
                });
            }
        }
    }

    let mut graphs = BTreeMap::new();
    let mut graph_owner: HashMap<Iri, String> = HashMap::new();
    for (rel, (p, local), line) in &doc.graphs {
        let line = *line;
        if schema.relation(rel).is_none() {
            return Err(RuleError::Resolution {
                line,
                message: format!("@graph names unknown relation `{rel}`"),
            });
        }
        let iri = expand(&prefixes, p, local, line)?;
        if let Some(other) = graph_owner.insert(iri.clone(), rel.clone()) {
            return Err(RuleError::Resolution {
                line,
                message: format!("graph {iri} is already used by `{other}`"),
            });
        }
        if graphs.insert(rel.clone(), iri).is_some() {
            return Err(RuleError::Resolution {
                line,
                message: format!("relation `{rel}` has two graphs"),
            });
        }
    }

    let mut rules = Vec::with_capacity(doc.rules.len());
    let mut names = HashSet::new();
    for ast in &doc.rules {
        if !names.insert(ast.name.clone()) {
            return Err(RuleError::Resolution {
                line: ast.line,
                message: format!("duplicate rule name `{}`", ast.name),
            });
        }
        rules.push(compile_rule(ast, schema, &prefixes)?);
    }
    Ok((prefixes, graphs, rules))
}

/// An `RDFLiteral` body literal: value expression and optional label.
type LiteralArgs<'a> = (&'a ValueExpr, &'a Option<(String, String)>);

fn expand(
    prefixes: &BTreeMap<String, String>,
    prefix: &str,
    local: &str,
    line: usize,
) -> Result<Iri, RuleError> {
    prefixes
        .get(prefix)
        .map(|ns| Iri::new(format!("{ns}{local}")))
        .ok_or_else(|| RuleError::Resolution {
            line,
            message: format!("undeclared prefix `{prefix}:`"),
        })
}

struct Ctx<'a> {
    ast: &'a RuleAst,
}

impl Ctx<'_> {
    fn pattern<T>(&self, message: impl Into<String>) -> Result<T, RuleError> {
        Err(RuleError::Pattern {
            line: self.ast.line,
            rule: self.ast.name.clone(),
            message: message.into(),
        })
    }

    fn resolution<T>(&self, message: impl Into<String>) -> Result<T, RuleError> {
        Err(RuleError::Resolution {
            line: self.ast.line,
            message: format!("rule `{}`: {}", self.ast.name, message.into()),
        })
    }

    fn preservation<T>(&self, message: impl Into<String>) -> Result<T, RuleError> {
        Err(RuleError::ObjectPreservation {
            line: self.ast.line,
            rule: self.ast.name.clone(),
            message: message.into(),
        })
    }
}

fn compile_rule(
    ast: &RuleAst,
    schema: &RelationalSchema,
    prefixes: &BTreeMap<String, String>,
) -> Result<TransformationRule, RuleError> {
    let cx = Ctx { ast };

    let mut body: Vec<&BodyLit> = Vec::new();
    for (lit, _) in &ast.body {
        if !body.contains(&lit) {
            body.push(lit);
        }
    }

    let head = VocabularyTerm {
        prefix: ast.head.0.clone(),
        local: ast.head.1.clone(),
        iri: expand(prefixes, &ast.head.0, &ast.head.1, ast.line)?,
    };

    let mut ranges: HashMap<&str, &str> = HashMap::new();
    let mut edges: Vec<(&str, &str, &str)> = Vec::new();
    let mut uris: HashMap<&str, (&str, &[Proj])> = HashMap::new();
    let mut literals: HashMap<&str, LiteralArgs<'_>> = HashMap::new();
    let mut non_null: Vec<&Proj> = Vec::new();
    let mut selections: Vec<(&Proj, super::CmpOp, &Const)> = Vec::new();

    for lit in &body {
        match lit {
            BodyLit::Atom { name, args } => {
                if let Some(rel) = schema.relation(name) {
                    if args.len() != 1 {
                        return cx.pattern(format!("relation atom `{name}` takes one variable"));
                    }
                    if let Some(prev) = ranges.insert(&args[0], &rel.name) {
                        if prev != rel.name {
                            return cx.pattern(format!(
                                "variable `{}` ranges over both `{prev}` and `{name}`",
                                args[0]
                            ));
                        }
                    }
                } else if schema.foreign_key(name).is_some() {
                    if args.len() != 2 {
                        return cx
                            .pattern(format!("foreign-key atom `{name}` takes two variables"));
                    }
                    edges.push((name, &args[0], &args[1]));
                } else {
                    return cx.resolution(format!("unknown relation or foreign key `{name}`"));
                }
            }
            BodyLit::HasUri { prefix, attrs, var } => {
                if uris.insert(var, (prefix, attrs)).is_some() {
                    return cx.pattern(format!("variable `{var}` is bound by two hasURI literals"));
                }
            }
            BodyLit::NonNull(p) => non_null.push(p),
            BodyLit::RdfLiteral { value, label, var } => {
                if literals.insert(var, (value, label)).is_some() {
                    return cx.pattern(format!(
                        "variable `{var}` is bound by two RDFLiteral literals"
                    ));
                }
            }
            BodyLit::Selection { proj, op, value } => selections.push((proj, *op, value)),
        }
    }

    let kind_hint = match ast.head_args.len() {
        1 => RuleKind::Ctr,
        2 => RuleKind::Dtr,
        n => return cx.pattern(format!("head has {n} arguments")),
    };
    let s = ast.head_args[0].as_str();
    let Some(&(s_prefix, s_projs)) = uris.get(s) else {
        return cx.pattern(format!("subject `{s}` is not bound by hasURI"));
    };
    let pivot_var = single_var(&cx, s_projs)?;
    let Some(&pivot) = ranges.get(pivot_var) else {
        return cx.pattern(format!("pivot variable `{pivot_var}` has no relation atom"));
    };

    // walk the foreign-key literals as a chain leaving the pivot variable
    let mut chain_vars = vec![pivot_var];
    let mut relations = vec![pivot.to_string()];
    let mut steps = Vec::new();
    let mut used = vec![false; edges.len()];
    loop {
        let here = *chain_vars.last().expect("non-empty");
        let next: Vec<usize> = (0..edges.len())
            .filter(|&i| !used[i] && (edges[i].1 == here || edges[i].2 == here))
            .collect();
        let i = match next.as_slice() {
            [] => break,
            [i] => *i,
            _ => {
                return cx.pattern(format!(
                    "variable `{here}` branches into several foreign keys"
                ))
            }
        };
        used[i] = true;
        let (fk_name, a, b) = edges[i];
        let other = if a == here { b } else { a };
        let fk = schema.foreign_key(fk_name).expect("checked above");
        let cur = relations.last().expect("non-empty").clone();
        let (step, next_rel) = if fk.source_relation == fk.target_relation {
            return cx.pattern(format!(
                "`{fk_name}` is self-referencing; cyclic paths are not supported"
            ));
        } else if fk.source_relation == cur {
            (PathStep::forward(fk_name), fk.target_relation.clone())
        } else if fk.target_relation == cur {
            (PathStep::reverse(fk_name), fk.source_relation.clone())
        } else {
            return cx.pattern(format!(
                "`{fk_name}` does not connect to `{cur}` (variable `{here}`)"
            ));
        };
        if relations.contains(&next_rel) || chain_vars.contains(&other) {
            return cx.pattern(format!(
                "path revisits `{next_rel}`; cyclic paths are not supported"
            ));
        }
        if let Some(&declared) = ranges.get(other) {
            if declared != next_rel {
                return cx.pattern(format!(
                    "variable `{other}` ranges over `{declared}` but `{fk_name}` leads to `{next_rel}`"
                ));
            }
        }
        steps.push(step);
        relations.push(next_rel);
        chain_vars.push(other);
    }
    if let Some(i) = used.iter().position(|u| !u) {
        return cx.pattern(format!(
            "`{}({}, {})` is not connected to the path from the pivot",
            edges[i].0, edges[i].1, edges[i].2
        ));
    }
    for var in ranges.keys() {
        if !chain_vars.contains(var) {
            return cx.pattern(format!("variable `{var}` is not connected to the pivot"));
        }
    }
    let end_var = *chain_vars.last().expect("non-empty");
    let end_rel = relations.last().expect("non-empty").clone();
    let rel_of = |v: &str| -> Option<&str> {
        chain_vars
            .iter()
            .position(|c| *c == v)
            .map(|i| relations[i].as_str())
    };

    let check_attr = |p: &Proj| -> Result<(), RuleError> {
        let Some(rel) = rel_of(&p.var) else {
            return cx.pattern(format!("variable `{}` is not on the rule's path", p.var));
        };
        if !schema.relation(rel).expect("known").has_attribute(&p.attr) {
            return cx.resolution(format!("relation `{rel}` has no attribute `{}`", p.attr));
        }
        Ok(())
    };

    let template = |prefix: &str, projs: &[Proj]| -> Result<UriTemplate, RuleError> {
        for p in projs {
            check_attr(p)?;
        }
        let namespace = prefixes
            .get(prefix)
            .cloned()
            .ok_or_else(|| RuleError::Resolution {
                line: ast.line,
                message: format!("undeclared prefix `{prefix}:`"),
            })?;
        Ok(UriTemplate {
            prefix: prefix.to_string(),
            namespace,
            attrs: projs.iter().map(|p| p.attr.clone()).collect(),
        })
    };

    let subject_template = template(s_prefix, s_projs)?;
    let pivot_scheme = schema.relation(pivot).expect("known");
    if !pivot_scheme.is_superkey(&subject_template.attrs) {
        return cx.preservation(format!(
            "hasURI attributes [{}] are not a key of `{pivot}`",
            subject_template.attrs.join(", ")
        ));
    }

    let mut selection = Vec::new();
    for (proj, op, c) in selections {
        check_attr(proj)?;
        if proj.var != pivot_var {
            return cx.pattern(format!(
                "selection on `{}` is not on the pivot variable",
                proj.var
            ));
        }
        let ty = pivot_scheme.attribute(&proj.attr).expect("checked").ty;
        let value = match (c, ty) {
            (Const::Int(i), AttrType::Integer) => Value::Int(*i),
            (Const::Str(s), AttrType::Text | AttrType::Varchar | AttrType::Uuid) => {
                Value::parse(ty, s).map_err(|e| RuleError::Resolution {
                    line: ast.line,
                    message: format!("rule `{}`: {e}", ast.name),
                })?
            }
            _ => {
                return cx.resolution(format!(
                    "constant does not match the type {ty} of `{}.{}`",
                    pivot, proj.attr
                ))
            }
        };
        selection.push(Selection {
            attr: proj.attr.clone(),
            op,
            value,
        });
    }

    let mut guards = Vec::new();
    for p in non_null {
        check_attr(p)?;
        if p.var != end_var {
            return cx.pattern(format!(
                "nonNull({}.{}) is not on the path-end variable",
                p.var, p.attr
            ));
        }
        if !guards.contains(&p.attr) {
            guards.push(p.attr.clone());
        }
    }

    let payload = if kind_hint == RuleKind::Ctr {
        if !steps.is_empty() {
            return cx.pattern("a class rule cannot follow foreign keys");
        }
        if !literals.is_empty() {
            return cx.pattern("a class rule cannot bind literals");
        }
        RulePayload::Class
    } else {
        let o = ast.head_args[1].as_str();
        if o == s {
            return cx.pattern("subject and object are the same variable");
        }
        match (literals.get(o), uris.get(o)) {
            (Some(_), Some(_)) => return cx.pattern(format!("`{o}` is bound twice")),
            (None, None) => {
                return cx.pattern(format!("object `{o}` is not bound by RDFLiteral or hasURI"))
            }
            (Some(&(value, label)), None) => {
                let (transform, args): (Transform, Vec<&Proj>) = match value {
                    ValueExpr::Proj(p) => (Transform::Identity, vec![p]),
                    ValueExpr::Call { func, args } => {
                        let t = match func.as_str() {
                            "identity" if args.len() == 1 => Transform::Identity,
                            "identity" => return cx.pattern("identity takes one argument"),
                            "concat" => Transform::Concat,
                            other => return cx.resolution(format!("unknown function `{other}`")),
                        };
                        (t, args.iter().collect())
                    }
                };
                for p in &args {
                    check_attr(p)?;
                    if p.var != end_var {
                        return cx.pattern(format!(
                            "literal value `{}.{}` is not on the path-end variable",
                            p.var, p.attr
                        ));
                    }
                }
                if let Some((_, rel)) = label {
                    if *rel != end_rel {
                        return cx.resolution(format!(
                            "RDFLiteral names relation `{rel}` but its value comes from `{end_rel}`"
                        ));
                    }
                }
                RulePayload::Datatype {
                    value_attrs: args.iter().map(|p| p.attr.clone()).collect(),
                    transform,
                    label: label.clone(),
                }
            }
            (None, Some(&(o_prefix, o_projs))) => {
                if single_var(&cx, o_projs)? != end_var {
                    return cx.pattern(format!(
                        "object `{o}` is not built from the path-end variable"
                    ));
                }
                let object_template = template(o_prefix, o_projs)?;
                if !schema
                    .relation(&end_rel)
                    .expect("known")
                    .is_superkey(&object_template.attrs)
                {
                    return cx.preservation(format!(
                        "object attributes [{}] are not a key of `{end_rel}`",
                        object_template.attrs.join(", ")
                    ));
                }
                RulePayload::Object { object_template }
            }
        }
    };
    let bound: Vec<&str> = ast.head_args.iter().map(String::as_str).collect();
    if let Some(v) = uris
        .keys()
        .chain(literals.keys())
        .find(|v| !bound.contains(v))
    {
        return cx.pattern(format!("`{v}` is bound but does not appear in the head"));
    }

    Ok(TransformationRule {
        name: ast.name.clone(),
        line: ast.line,
        pivot: pivot.to_string(),
        subject_template,
        selection,
        head,
        path: Path::new(pivot, steps),
        relations,
        non_null: guards,
        payload,
    })
}

fn single_var<'a>(cx: &Ctx<'_>, projs: &'a [Proj]) -> Result<&'a str, RuleError> {
    let v = projs[0].var.as_str();
    if projs.iter().any(|p| p.var != v) {
        return cx.pattern("hasURI mixes attributes of different variables");
    }
    Ok(v)
}

/// Checks that hold across rules.
pub(super) fn validate_set(set: &RuleSet) -> Result<(), RuleError> {
    let mut templates: HashMap<&str, &TransformationRule> = HashMap::new();
    for r in set.rules() {
        if set.graph(&r.pivot).is_none() {
            return Err(RuleError::Resolution {
                line: r.line,
                message: format!(
                    "pivot relation `{}` of rule `{}` has no @graph",
                    r.pivot, r.name
                ),
            });
        }
        match templates.get(r.pivot.as_str()) {
            Some(first) if !first.subject_template.same_as(&r.subject_template) => {
                return Err(RuleError::ObjectPreservation {
                    line: r.line,
                    rule: r.name.clone(),
                    message: format!(
                        "subject template {} differs from {} used by `{}` on `{}`",
                        r.subject_template, first.subject_template, first.name, r.pivot
                    ),
                });
            }
            Some(_) => {}
            None => {
                templates.insert(&r.pivot, r);
            }
        }
    }
    let class_template = |rel: &str| {
        set.rules()
            .iter()
            .find(|c| c.kind() == RuleKind::Ctr && c.pivot == rel)
            .map(|c| &c.subject_template)
    };
    for r in set.rules() {
        if r.kind() == RuleKind::Ctr {
            continue;
        }
        if class_template(&r.pivot).is_none() {
            return Err(RuleError::Pattern {
                line: r.line,
                rule: r.name.clone(),
                message: format!("no class rule has pivot `{}`", r.pivot),
            });
        }
        if let RulePayload::Object { object_template } = &r.payload {
            let end = r.end_relation();
            match class_template(end) {
                Some(t) if t.same_as(object_template) => {}
                Some(t) => {
                    return Err(RuleError::Pattern {
                        line: r.line,
                        rule: r.name.clone(),
                        message: format!(
                            "object template {object_template} does not match the class rules of `{end}` ({t})"
                        ),
                    })
                }
                None => {
                    return Err(RuleError::Pattern {
                        line: r.line,
                        rule: r.name.clone(),
                        message: format!("no class rule has pivot `{end}`"),
                    })
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::{parse_rules, path_of, RuleKind};
    use super::*;
    use crate::fixtures::{rules, schema, RULES_RTR};
    use crate::relational::Direction;

    const HEADER: &str = "@prefix mbz: <http://musicbrainz.org/> .\n\
                          @prefix mo: <http://purl.org/ontology/mo/> .\n\
                          @graph Artist mbz:ga .\n@graph Track mbz:gt .\n@graph Medium mbz:gm .\n";

    fn parse(body: &str) -> Result<RuleSet, RuleError> {
        parse_rules(&format!("{HEADER}{body}"), schema())
    }

    #[test]
    fn case_study_kinds_and_pivots() {
        let rs = rules();
        assert_eq!(rs.rules().len(), 24);
        let kind = |n: &str| rs.rule(n).unwrap().kind();
        let pivot = |n: &str| rs.rule(n).unwrap().pivot.clone();
        for i in (1..=6).chain(14..=16) {
            assert_eq!(kind(&format!("psi{i}")), RuleKind::Ctr, "psi{i}");
        }
        for i in (10..=13).chain(17..=20) {
            assert_eq!(kind(&format!("psi{i}")), RuleKind::Dtr, "psi{i}");
        }
        for i in (7..=9).chain(21..=24) {
            assert_eq!(kind(&format!("psi{i}")), RuleKind::Otr, "psi{i}");
        }
        for (rel, ids) in [
            ("Artist", &[1, 2, 3, 7, 10, 21, 22, 23, 24][..]),
            ("Medium", &[4, 8, 11]),
            ("Track", &[5, 12]),
            ("Release", &[6, 9, 13]),
            ("Recording", &[14, 17, 18]),
            ("ReleaseGroup", &[15, 19]),
            ("Tag", &[16, 20]),
        ] {
            for i in ids {
                assert_eq!(pivot(&format!("psi{i}")), rel, "psi{i}");
            }
        }
    }

    #[test]
    fn paths_and_directions() {
        let rs = rules();
        let p24 = path_of(rs.rule("psi24").unwrap());
        let fks: Vec<&str> = p24.steps.iter().map(|s| s.fk.as_str()).collect();
        assert_eq!(fks, ["fk1", "fk2", "fk7", "fk9", "fk10"]);
        assert_eq!(
            rs.rule("psi24").unwrap().relations,
            [
                "Artist",
                "ArtistCredit",
                "Credit",
                "Recording",
                "RecordingTag",
                "Tag"
            ]
        );
        let p9 = path_of(rs.rule("psi9").unwrap());
        assert_eq!(p9.steps, vec![PathStep::reverse("fk5")]);
        assert!(path_of(rs.rule("psi1").unwrap()).is_empty());
        let p7: Vec<Direction> = path_of(rs.rule("psi7").unwrap())
            .steps
            .iter()
            .map(|s| s.direction)
            .collect();
        assert_eq!(
            p7,
            [Direction::Reverse, Direction::Forward, Direction::Reverse]
        );
    }

    #[test]
    fn duplicate_literals_collapse() {
        let r = rules();
        let r8 = r.rule("psi8").unwrap();
        assert_eq!(r8.path.len(), 1);
        assert!(RULES_RTR.matches("hasURI(mbz:, f.tid, g)").count() >= 2);
    }

    #[test]
    fn selection_is_bound() {
        let rs = rules();
        let r2 = rs.rule("psi2").unwrap();
        assert_eq!(r2.selection.len(), 1);
        assert_eq!(r2.selection[0].value, Value::Int(1));
    }

    #[test]
    fn minimal_class_rule() {
        let rs = parse("p: mo:Track(s) <- Track(r), hasURI(mbz:, r.tid, s).").unwrap();
        let r = rs.rule("p").unwrap();
        assert_eq!(r.kind(), RuleKind::Ctr);
        assert_eq!(r.pivot, "Track");
        assert!(r.path.is_empty());
        assert_eq!(r.head.iri.as_str(), "http://purl.org/ontology/mo/Track");
    }

    #[test]
    fn non_key_subject_is_rejected() {
        let err = parse("p: mo:MusicArtist(s) <- Artist(r), hasURI(mbz:, r.name, s).").unwrap_err();
        assert!(
            matches!(err, RuleError::ObjectPreservation { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn unknown_names_are_resolution_errors() {
        for body in [
            "p: mo:C(s) <- Artst(r), hasURI(mbz:, r.gid, s).",
            "p: mo:C(s) <- Artist(r), hasURI(mbz:, r.mid, s).",
            "p: zz:C(s) <- Artist(r), hasURI(mbz:, r.gid, s).",
            "p: mo:C(s) <- Artist(r), hasURI(mbz:, r.gid, s), (r.type = \"x\").",
            "m: mo:C(s) <- Artist(r), hasURI(mbz:, r.gid, s).\n\
             p: mo:n(s, v) <- Artist(r), hasURI(mbz:, r.gid, s), RDFLiteral(r.name, \"name\", \"Track\", v).",
        ] {
            let err = parse(body).unwrap_err();
            assert!(matches!(err, RuleError::Resolution { .. }), "{body}: {err:?}");
        }
    }

    #[test]
    fn shapes_outside_the_patterns() {
        let mo = "m: mo:Record(s) <- Medium(r), hasURI(mbz:, r.mid, s).\n\
                  t: mo:Track(s) <- Track(r), hasURI(mbz:, r.tid, s).\n";
        for body in [
            // selection off the pivot
            "p: mo:track(s, g) <- Medium(r), hasURI(mbz:, r.mid, s), fk4(r, f), hasURI(mbz:, f.tid, g), (f.name = \"x\").",
            // branching body
            "p: mo:track(s, g) <- Medium(r), hasURI(mbz:, r.mid, s), fk4(r, f), fk5(r, x), hasURI(mbz:, f.tid, g).",
            // unconnected atom
            "p: mo:track(s, g) <- Medium(r), hasURI(mbz:, r.mid, s), fk4(r, f), Artist(a), hasURI(mbz:, f.tid, g).",
            // class rule following a key
            "p: mo:C(s) <- Medium(r), hasURI(mbz:, r.mid, s), fk4(r, f).",
            // object from the pivot instead of the path end
            "p: mo:track(s, g) <- Medium(r), hasURI(mbz:, r.mid, s), fk4(r, f), hasURI(mbz:, r.rid, g).",
            // unbound object
            "p: mo:track(s, g) <- Medium(r), hasURI(mbz:, r.mid, s).",
            // fk not touching the current relation
            "p: mo:track(s, g) <- Medium(r), hasURI(mbz:, r.mid, s), fk1(r, f), hasURI(mbz:, f.tid, g).",
        ] {
            let err = parse(&format!("{mo}{body}")).unwrap_err();
            assert!(matches!(err, RuleError::Pattern { .. }), "{body}: {err:?}");
        }
    }

    #[test]
    fn cyclic_paths_are_rejected() {
        let text = "m: mo:Record(s) <- Medium(r), hasURI(mbz:, r.mid, s).\n\
                    p: mo:x(s, g) <- Medium(r), hasURI(mbz:, r.mid, s), fk4(r, t), fk4(t, m2), hasURI(mbz:, m2.mid, g).";
        let err = parse(text).unwrap_err();
        assert!(err.to_string().contains("cyclic"), "{err}");
    }

    #[test]
    fn ruleset_level_checks() {
        let missing_graph = "p: mo:Release(s) <- Release(r), hasURI(mbz:, r.gid, s).";
        assert!(matches!(
            parse(missing_graph).unwrap_err(),
            RuleError::Resolution { .. }
        ));

        let no_class = "p: mo:track(s, g) <- Medium(r), hasURI(mbz:, r.mid, s), fk4(r, f), hasURI(mbz:, f.tid, g).";
        assert!(matches!(
            parse(no_class).unwrap_err(),
            RuleError::Pattern { .. }
        ));

        let mismatch = "m: mo:Record(s) <- Medium(r), hasURI(mbz:, r.mid, s).\n\
                        t: mo:Track(s) <- Track(r), hasURI(mo:, r.tid, s).\n\
                        p: mo:track(s, g) <- Medium(r), hasURI(mbz:, r.mid, s), fk4(r, f), hasURI(mbz:, f.tid, g).";
        assert!(parse(mismatch)
            .unwrap_err()
            .to_string()
            .contains("does not match"));

        let two_templates = "a: mo:A(s) <- Track(r), hasURI(mbz:, r.tid, s).\n\
                             b: mo:B(s) <- Track(r), hasURI(mo:, r.tid, s).";
        assert!(matches!(
            parse(two_templates).unwrap_err(),
            RuleError::ObjectPreservation { .. }
        ));

        let dup = "a: mo:A(s) <- Track(r), hasURI(mbz:, r.tid, s).\n\
                   a: mo:B(s) <- Track(r), hasURI(mbz:, r.tid, s).";
        assert!(parse(dup)
            .unwrap_err()
            .to_string()
            .contains("duplicate rule"));

        let shared_graph = "@graph Release mbz:ga .\n";
        assert!(parse(shared_graph).is_err());
    }

    #[test]
    fn without_revalidates() {
        let rs = rules();
        assert_eq!(
            rs.without(&["psi21", "psi22", "psi23"])
                .unwrap()
                .rules()
                .len(),
            21
        );
        assert!(rs.without(&["psi1"]).is_ok());
        let all_artist_classes = ["psi1", "psi2", "psi3"];
        assert!(matches!(
            rs.without(&all_artist_classes).unwrap_err(),
            RuleError::Pattern { .. }
        ));
        assert!(rs.without(&["nope"]).is_err());
    }

    #[test]
    fn concat_transform_and_multi_key_templates() {
        let text = "@prefix x: <http://x/> .\n@graph ArtistCredit x:g .\n\
                    c: x:Credit(s) <- ArtistCredit(r), hasURI(x:, [r.cid, r.pos], s).\n\
                    d: x:label(s, v) <- ArtistCredit(r), hasURI(x:, [r.cid, r.pos], s), RDFLiteral(concat(r.cid, r.aid), v).";
        let rs = parse_rules(text, schema()).unwrap();
        match &rs.rule("d").unwrap().payload {
            RulePayload::Datatype {
                value_attrs,
                transform,
                ..
            } => {
                assert_eq!(value_attrs, &["cid", "aid"]);
                assert_eq!(*transform, Transform::Concat);
            }
            p => panic!("{p:?}"),
        }
        let bad = text.replace("[r.cid, r.pos]", "r.cid");
        assert!(parse_rules(&bad, Arc::clone(&schema())).is_err());
    }
}
