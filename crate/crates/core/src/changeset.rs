//! Changesets `⟨Δ−, Δ+⟩` for single-relation updates.
//!
//! For an update on `R`, only rules whose path touches `R` can change. Their
//! pivot tuples that reach an updated tuple over a path prefix form the
//! relevant tuples before (in `σ0`) and after (in `σ1`) the update; the RDF
//! states of those tuples are removed and re-added.
//!
//! Prefixes are walked from every tuple of `D ∪ I` on both sides. A tuple
//! inserted by the update can share path tuples with pivot tuples whose old
//! state must also be withdrawn, so walking from `D` alone is not enough.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::materialize::rdf_state_tuple;
use crate::rdf::QuadDataset;
use crate::relational::{
    apply_update, related_pivots, DatabaseState, RelationalError, Tuple, Update,
};
use crate::rules::{RuleSet, TransformationRule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChangesetError {
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{0}` is not relevant to any rule")]
    NotRelevant(String),
    #[error(transparent)]
    Relational(#[from] RelationalError),
}

/// A set of `(relation, pivot tuple)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RelevantTupleSet(BTreeSet<(String, Tuple)>);

impl RelevantTupleSet {
    pub fn insert(&mut self, relation: &str, t: Tuple) -> bool {
        self.0.insert((relation.to_string(), t))
    }

    pub fn contains(&self, relation: &str, t: &Tuple) -> bool {
        self.0.contains(&(relation.to_string(), t.clone()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tuple)> {
        self.0.iter().map(|(r, t)| (r.as_str(), t))
    }
}

/// `⟨Δ−, Δ+⟩` together with the update and the relevant tuples it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Changeset {
    pub delta_minus: QuadDataset,
    pub delta_plus: QuadDataset,
    pub update: Update,
    pub before: RelevantTupleSet,
    pub after: RelevantTupleSet,
}

impl Changeset {
    /// Drops quads that are removed and added again. The result still maps
    /// `M(σ0)` to `M(σ1)`.
    pub fn minimized(&self) -> Changeset {
        let common = self.delta_minus.intersection(&self.delta_plus);
        Changeset {
            delta_minus: self.delta_minus.difference(&common),
            delta_plus: self.delta_plus.difference(&common),
            ..self.clone()
        }
    }

    /// `(view − Δ−) ∪ Δ+`.
    pub fn apply_to(&self, view: &QuadDataset) -> QuadDataset {
        view.difference(&self.delta_minus).union(&self.delta_plus)
    }
}

fn check_relation(rules: &RuleSet, r: &str) -> Result<(), ChangesetError> {
    if rules.schema().relation(r).is_none() {
        return Err(ChangesetError::UnknownRelation(r.to_string()));
    }
    Ok(())
}

/// Rules whose path (pivot included) contains `r`.
pub fn relevant_rules<'a>(
    rules: &'a RuleSet,
    r: &str,
) -> Result<Vec<&'a TransformationRule>, ChangesetError> {
    check_relation(rules, r)?;
    Ok(rules
        .rules()
        .iter()
        .filter(|rule| rule.touches(r))
        .collect())
}

/// Relevant rules of `r` that pivot on `pivot`.
pub fn impacted_rules<'a>(
    rules: &'a RuleSet,
    pivot: &str,
    r: &str,
) -> Result<Vec<&'a TransformationRule>, ChangesetError> {
    check_relation(rules, pivot)?;
    Ok(relevant_rules(rules, r)?
        .into_iter()
        .filter(|rule| rule.pivot == pivot)
        .collect())
}

fn relevant_tuples(
    u: &Update,
    state: &DatabaseState,
    rules: &RuleSet,
    own: &BTreeSet<Tuple>,
) -> Result<RelevantTupleSet, ChangesetError> {
    let r = u.relation();
    let mut out = RelevantTupleSet::default();
    let walked: Vec<&Tuple> = u.deletes().iter().chain(u.inserts()).collect();
    for rule in relevant_rules(rules, r)? {
        if rule.pivot == r {
            for t in own {
                out.insert(r, t.clone());
            }
            continue;
        }
        for (k, _) in rule
            .relations
            .iter()
            .enumerate()
            .filter(|(_, rel)| *rel == r)
        {
            let prefix = rule.path.prefix(k);
            for t in &walked {
                for p in related_pivots(&prefix, t, state)? {
                    out.insert(&rule.pivot, p);
                }
            }
        }
    }
    Ok(out)
}

/// Pivot tuples whose RDF state may change, taken in `σ0`.
///
/// `u` is first restricted to the part that changes `state0`.
pub fn relevant_tuples_before(
    u: &Update,
    state0: &DatabaseState,
    rules: &RuleSet,
) -> Result<RelevantTupleSet, ChangesetError> {
    let u = u.effective(state0)?;
    relevant_tuples(&u, state0, rules, u.deletes())
}

/// Pivot tuples whose RDF state may change, taken in `σ1`.
///
/// `u` must already be the effective update (see [`Update::effective`]);
/// [`compute_changeset`] takes care of that.
pub fn relevant_tuples_after(
    u: &Update,
    state1: &DatabaseState,
    rules: &RuleSet,
) -> Result<RelevantTupleSet, ChangesetError> {
    relevant_tuples(u, state1, rules, u.inserts())
}

fn union_of_states(set: &RelevantTupleSet, state: &DatabaseState, rules: &RuleSet) -> QuadDataset {
    let mut out = QuadDataset::new();
    for (rel, p) in set.iter() {
        out.extend(rdf_state_tuple(rel, p, state, rules));
    }
    out
}

/// Computes `⟨Δ−, Δ+⟩` from the pre-state and the update alone.
pub fn compute_changeset(
    u: &Update,
    state0: &DatabaseState,
    rules: &RuleSet,
) -> Result<Changeset, ChangesetError> {
    check_relation(rules, u.relation())?;
    let state1 = apply_update(state0, u)?;
    let effective = u.effective(state0)?;
    let before = relevant_tuples(&effective, state0, rules, effective.deletes())?;
    let after = relevant_tuples_after(&effective, &state1, rules)?;
    Ok(Changeset {
        delta_minus: union_of_states(&before, state0, rules),
        delta_plus: union_of_states(&after, &state1, rules),
        update: u.clone(),
        before,
        after,
    })
}

/// `σ0(R) = (R(σ1) \ I) ∪ D`, the other relations unchanged.
///
/// This is the pre-state only for effective updates (`D ⊆ R(σ0)`,
/// `I ∩ R(σ0) = ∅`), which is what a trigger's transition tables hold.
pub fn reconstruct_sigma0(
    state1: &DatabaseState,
    u: &Update,
) -> Result<DatabaseState, ChangesetError> {
    let current = state1.relation(u.relation())?;
    let mut rel: BTreeSet<Tuple> = current.difference(u.inserts()).cloned().collect();
    rel.extend(u.deletes().iter().cloned());
    Ok(state1.with_relation(u.relation(), rel)?)
}

/// A statement-level `AFTER` trigger for `r` and its function skeleton.
pub fn emit_trigger_sql(rules: &RuleSet, r: &str) -> Result<String, ChangesetError> {
    let relevant = relevant_rules(rules, r)?;
    if relevant.is_empty() {
        return Err(ChangesetError::NotRelevant(r.to_string()));
    }
    let names: Vec<&str> = relevant.iter().map(|x| x.name.as_str()).collect();
    let mut pivots: Vec<&str> = relevant.iter().map(|x| x.pivot.as_str()).collect();
    pivots.sort_unstable();
    pivots.dedup();

    let mut s = String::new();
    let _ = writeln!(s, "-- relevant rules: {}", names.join(", "));
    let _ = writeln!(s, "-- pivot relations: {}", pivots.join(", "));
    let _ = writeln!(s, "CREATE TRIGGER t_delta_{r}");
    let _ = writeln!(s, "AFTER INSERT OR UPDATE OR DELETE ON {r}");
    let _ = writeln!(s, "REFERENCING OLD TABLE AS deleted_{r}");
    let _ = writeln!(s, "            NEW TABLE AS inserted_{r}");
    let _ = writeln!(s, "FOR EACH STATEMENT");
    let _ = writeln!(s, "EXECUTE FUNCTION trg_compute_delta_{r}_stmt();");
    let _ = writeln!(s);
    let _ = writeln!(s, "CREATE OR REPLACE FUNCTION trg_compute_delta_{r}_stmt()");
    let _ = writeln!(s, "RETURNS trigger");
    let _ = writeln!(s, "LANGUAGE plpgsql");
    let _ = writeln!(s, "AS $$");
    let _ = writeln!(s, "BEGIN");
    let _ = writeln!(s, "  -- Phase 1 (conceptual sigma0): compute Delta-(u)");
    let _ = writeln!(s, "  PERFORM trg_compute_delta_minus_{r}_stmt_internal();");
    let _ = writeln!(s);
    let _ = writeln!(s, "  -- Phase 2 (sigma1): compute Delta+(u)");
    let _ = writeln!(s, "  PERFORM trg_compute_delta_plus_{r}_stmt_internal();");
    let _ = writeln!(s);
    let _ = writeln!(s, "  RETURN NULL;");
    let _ = writeln!(s, "END;");
    let _ = writeln!(s, "$$;");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, example_update, sigma0, t_new, t_old, tuple};
    use crate::materialize::materialize_view;
    use crate::rdf::parse_nquads;

    fn names(v: Vec<&TransformationRule>) -> Vec<String> {
        let mut n: Vec<String> = v.into_iter().map(|r| r.name.clone()).collect();
        n.sort();
        n
    }

    #[test]
    fn relevant_and_impacted_rules() {
        let rs = fixtures::rules();
        assert_eq!(
            names(relevant_rules(&rs, "Track").unwrap()),
            ["psi12", "psi5", "psi7", "psi8"]
        );
        assert_eq!(
            names(impacted_rules(&rs, "Artist", "Track").unwrap()),
            ["psi7"]
        );
        assert_eq!(
            names(impacted_rules(&rs, "Track", "Track").unwrap()),
            ["psi12", "psi5"]
        );
        assert!(impacted_rules(&rs, "Tag", "Track").unwrap().is_empty());
        assert!(relevant_rules(&rs, "Nope").is_err());
    }

    #[test]
    fn credit_relevance_from_paths() {
        let rs = fixtures::rules();
        let got = names(relevant_rules(&rs, "Credit").unwrap());
        assert_eq!(got, ["psi21", "psi22", "psi23", "psi24", "psi7"]);
    }

    #[test]
    fn worked_example_relevant_tuples() {
        let rs = fixtures::worked_example_rules();
        let s0 = sigma0();
        let u = example_update();
        let cs = compute_changeset(&u, &s0, &rs).unwrap();
        let mut want = RelevantTupleSet::default();
        for a in ["a1", "a2", "a3"] {
            want.insert("Artist", tuple(&s0, "Artist", a));
        }
        want.insert("Medium", tuple(&s0, "Medium", "m1"));
        let mut before = want.clone();
        before.insert("Track", t_old());
        let mut after = want;
        after.insert("Track", t_new());
        assert_eq!(cs.before, before);
        assert_eq!(cs.after, after);
        assert_eq!(relevant_tuples_before(&u, &s0, &rs).unwrap(), before);
    }

    #[test]
    fn worked_example_changeset() {
        let rs = fixtures::worked_example_rules();
        let cs = compute_changeset(&example_update(), &sigma0(), &rs).unwrap();
        assert_eq!(cs.delta_minus.to_nquads(), fixtures::DELTA_MINUS_NQ);
        assert_eq!(cs.delta_plus.to_nquads(), fixtures::DELTA_PLUS_NQ);
        assert_eq!(parse_nquads(fixtures::DELTA_PLUS_NQ).unwrap().len(), 22);
    }

    #[test]
    fn empty_update_gives_empty_changeset() {
        let rs = fixtures::rules();
        let cs = compute_changeset(&Update::empty("Track"), &sigma0(), &rs).unwrap();
        assert!(cs.delta_minus.is_empty() && cs.delta_plus.is_empty());
    }

    #[test]
    fn eq1_holds_with_all_rules_and_minimized() {
        let rs = fixtures::rules();
        let s0 = sigma0();
        let u = example_update();
        let s1 = apply_update(&s0, &u).unwrap();
        let cs = compute_changeset(&u, &s0, &rs).unwrap();
        let m0 = materialize_view(&s0, &rs);
        let m1 = materialize_view(&s1, &rs);
        assert_eq!(cs.apply_to(&m0), m1);
        let min = cs.minimized();
        assert_eq!(min.apply_to(&m0), m1);
        assert!(min.delta_minus.intersection(&min.delta_plus).is_empty());
    }

    #[test]
    fn ineffective_parts_are_ignored() {
        let rs = fixtures::rules();
        let s0 = sigma0();
        let t2 = tuple(&s0, "Track", "t2");
        // re-inserting an existing tuple changes nothing
        let u = Update::new("Track", [], [t2]);
        let cs = compute_changeset(&u, &s0, &rs).unwrap();
        assert!(cs.before.is_empty() && cs.after.is_empty());
    }

    #[test]
    fn sigma0_reconstruction() {
        let s0 = sigma0();
        let u = example_update();
        let s1 = apply_update(&s0, &u).unwrap();
        assert_eq!(reconstruct_sigma0(&s1, &u).unwrap(), s0);
        assert_eq!(reconstruct_sigma0(&s0, &Update::empty("Tag")).unwrap(), s0);
    }

    #[test]
    fn trigger_text() {
        let rs = fixtures::rules();
        let sql = emit_trigger_sql(&rs, "Track").unwrap();
        assert!(sql.contains("AFTER INSERT OR UPDATE OR DELETE ON Track"));
        assert!(sql.contains("REFERENCING OLD TABLE AS deleted_Track"));
        assert!(sql.contains("NEW TABLE AS inserted_Track"));
        assert!(sql.contains("trg_compute_delta_minus_Track_stmt_internal"));
        assert_eq!(sql, emit_trigger_sql(&rs, "Track").unwrap());

        let no_tags = rs.without(&["psi16", "psi20", "psi24"]).unwrap();
        assert_eq!(
            emit_trigger_sql(&no_tags, "RecordingTag"),
            Err(ChangesetError::NotRelevant("RecordingTag".into()))
        );
        assert!(matches!(
            emit_trigger_sql(&rs, "Nope"),
            Err(ChangesetError::UnknownRelation(_))
        ));
    }
}
