//! Checking changesets against full rematerialization, and random instances
//! to check them on.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::changeset::{
    compute_changeset, reconstruct_sigma0, relevant_rules, Changeset, ChangesetError,
};
use crate::fixtures;
use crate::materialize::materialize_view;
use crate::rdf::QuadDataset;
use crate::relational::{
    apply_update, AttrType, DatabaseState, RelationScheme, RelationalError, RelationalSchema,
    Tuple, Update, Value,
};
use crate::rules::RuleSet;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerificationStats {
    pub quads_before: usize,
    pub quads_after: usize,
    pub delta_minus: usize,
    pub delta_plus: usize,
    pub relevant_before: usize,
    pub relevant_after: usize,
    pub rules_fired: usize,
}

/// Outcome of comparing `(M(σ0) − Δ−) ∪ Δ+` with `M(σ1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub passed: bool,
    /// In `M(σ1)` but not in the incremental result.
    pub missing: QuadDataset,
    /// In the incremental result but not in `M(σ1)`.
    pub spurious: QuadDataset,
    pub stats: VerificationStats,
}

fn lines(ds: &QuadDataset) -> Vec<String> {
    ds.to_nquads().lines().map(str::to_owned).collect()
}

impl VerificationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "passed": self.passed,
            "missing": lines(&self.missing),
            "spurious": lines(&self.spurious),
            "stats": self.stats,
        })
    }
}

/// Rematerializes `σ1` and compares it quad by quad with the result of
/// applying `cs` to `M(σ0)`.
pub fn verify_changeset(
    state0: &DatabaseState,
    u: &Update,
    rules: &RuleSet,
    cs: &Changeset,
) -> Result<VerificationReport, RelationalError> {
    let state1 = apply_update(state0, u)?;
    let m0 = materialize_view(state0, rules);
    let m1 = materialize_view(&state1, rules);
    let incremental = m0.difference(&cs.delta_minus).union(&cs.delta_plus);
    let missing = m1.difference(&incremental);
    let spurious = incremental.difference(&m1);
    let passed =
        missing.is_empty() && spurious.is_empty() && incremental.to_nquads() == m1.to_nquads();
    let rules_fired = rules
        .rules()
        .iter()
        .filter(|r| r.touches(u.relation()))
        .count();
    Ok(VerificationReport {
        passed,
        missing,
        spurious,
        stats: VerificationStats {
            quads_before: m0.len(),
            quads_after: m1.len(),
            delta_minus: cs.delta_minus.len(),
            delta_plus: cs.delta_plus.len(),
            relevant_before: cs.before.len(),
            relevant_after: cs.after.len(),
            rules_fired,
        },
    })
}

const NAMES: [&str; 6] = [
    "Kungs",
    "Layers",
    "This Girl",
    "say \"hi\"",
    "tab\tand, comma",
    "Beyoncé",
];

/// Random states and updates over an arbitrary schema.
///
/// Value domains are kept small so tuples collide on join values and on
/// literal values, optional attributes are NULL about a quarter of the time,
/// and foreign keys favour the first few target tuples.
pub struct Generator {
    schema: Arc<RelationalSchema>,
    rng: ChaCha8Rng,
    next_id: u64,
}

impl Generator {
    pub fn new(schema: Arc<RelationalSchema>, seed: u64) -> Self {
        Generator {
            schema,
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_id: 0,
        }
    }

    fn uuid(&mut self) -> String {
        let v: u128 = self.rng.gen();
        let h = format!("{v:032x}");
        format!(
            "{}-{}-{}-{}-{}",
            &h[..8],
            &h[8..12],
            &h[12..16],
            &h[16..20],
            &h[20..]
        )
    }

    fn scalar(&mut self, scheme: &RelationScheme, attr: &str) -> Value {
        let a = scheme.attribute(attr).expect("attribute");
        let is_key = scheme.primary_key.len() == 1 && scheme.primary_key[0] == attr;
        if a.nullable && self.rng.gen_bool(0.25) {
            return Value::Null;
        }
        match a.ty {
            AttrType::Uuid => Value::Text(self.uuid()),
            AttrType::Integer if is_key => {
                self.next_id += 1;
                Value::Int(self.next_id as i64)
            }
            AttrType::Integer => Value::Int(self.rng.gen_range(0..=3)),
            AttrType::Text | AttrType::Varchar if is_key => {
                self.next_id += 1;
                Value::text(format!("{}{}", scheme.name.to_lowercase(), self.next_id))
            }
            AttrType::Text | AttrType::Varchar => {
                Value::text(*NAMES.choose(&mut self.rng).expect("non-empty"))
            }
        }
    }

    fn pick<'a>(&mut self, pool: &'a [&'a Tuple]) -> Option<&'a Tuple> {
        if pool.is_empty() {
            return None;
        }
        // skewed towards the front so several tuples share a target
        let bound = if self.rng.gen_bool(0.6) {
            pool.len().min(2)
        } else {
            pool.len()
        };
        Some(pool[self.rng.gen_range(0..bound)])
    }

    /// A fresh tuple for `rel` whose foreign keys point into `state`, or
    /// `None` if a mandatory reference has no target.
    pub fn tuple(&mut self, state: &DatabaseState, rel: &str) -> Option<Tuple> {
        let schema = Arc::clone(&self.schema);
        let scheme = schema.relation(rel)?;
        let mut t = Tuple::default();
        let mut fixed: BTreeSet<&str> = BTreeSet::new();
        for fk in schema.outgoing(rel) {
            let nullable = fk
                .source_attrs
                .iter()
                .all(|a| scheme.attribute(a).is_some_and(|x| x.nullable));
            let targets: Vec<&Tuple> = state.relation(&fk.target_relation).ok()?.iter().collect();
            let chosen = if nullable && self.rng.gen_bool(0.25) {
                None
            } else {
                self.pick(&targets)
            };
            match chosen {
                Some(target) => {
                    for (s, k) in fk.source_attrs.iter().zip(&fk.target_attrs) {
                        t.set(s.clone(), target.get(k).clone());
                    }
                }
                None if nullable => {
                    for s in &fk.source_attrs {
                        t.set(s.clone(), Value::Null);
                    }
                }
                None => return None,
            }
            fixed.extend(fk.source_attrs.iter().map(String::as_str));
        }
        for a in &scheme.attributes {
            if !fixed.contains(a.name.as_str()) {
                let v = self.scalar(scheme, &a.name);
                t.set(a.name.clone(), v);
            }
        }
        Some(t)
    }

    /// A valid state with up to `size` tuples per relation.
    pub fn state(&mut self, size: usize) -> DatabaseState {
        let schema = Arc::clone(&self.schema);
        let mut state = DatabaseState::empty(Arc::clone(&schema));
        for rel in schema.dependency_order() {
            let n = self.rng.gen_range(0..=size);
            let mut tuples = state.relation(&rel).expect("relation").clone();
            for _ in 0..n {
                for _attempt in 0..10 {
                    let Some(t) = self.tuple(&state, &rel) else {
                        break;
                    };
                    let mut candidate = tuples.clone();
                    candidate.insert(t);
                    if let Ok(next) = state.with_relation(&rel, candidate.clone()) {
                        tuples = candidate;
                        state = next;
                        break;
                    }
                }
            }
        }
        state
    }

    fn modified(&mut self, state: &DatabaseState, rel: &str, t: &Tuple) -> Option<Tuple> {
        let schema = Arc::clone(&self.schema);
        let scheme = schema.relation(rel)?;
        let free: Vec<&str> = scheme
            .attributes
            .iter()
            .map(|a| a.name.as_str())
            .filter(|a| !scheme.primary_key.iter().any(|k| k == a))
            .collect();
        let attr = *free.choose(&mut self.rng)?;
        let fresh = self.tuple(state, rel)?;
        let mut out = t.clone();
        // move every foreign key that uses `attr` as a whole
        let mut moved = false;
        for fk in schema.outgoing(rel) {
            if fk.source_attrs.iter().any(|a| a == attr) {
                for a in &fk.source_attrs {
                    out.set(a.clone(), fresh.get(a).clone());
                }
                moved = true;
            }
        }
        if !moved {
            out.set(attr, fresh.get(attr).clone());
        }
        (out != *t).then_some(out)
    }

    /// A random effective update on a random relation that applies cleanly
    /// to `state`; the empty update if none was found.
    pub fn update(&mut self, state: &DatabaseState) -> Update {
        let names: Vec<String> = self.schema.relation_names().map(str::to_owned).collect();
        let rel = names
            .choose(&mut self.rng)
            .expect("schema has relations")
            .clone();
        for _attempt in 0..20 {
            let existing: Vec<Tuple> = state
                .relation(&rel)
                .expect("relation")
                .iter()
                .cloned()
                .collect();
            let pick_existing = |rng: &mut ChaCha8Rng| existing.choose(rng).cloned();
            let (d, i): (Vec<Tuple>, Vec<Tuple>) = match self.rng.gen_range(0..4) {
                0 => {
                    let n = self.rng.gen_range(1..=2);
                    (
                        vec![],
                        (0..n).filter_map(|_| self.tuple(state, &rel)).collect(),
                    )
                }
                1 => {
                    let n = self.rng.gen_range(1..=2);
                    (
                        (0..n)
                            .filter_map(|_| pick_existing(&mut self.rng))
                            .collect(),
                        vec![],
                    )
                }
                2 => match pick_existing(&mut self.rng) {
                    Some(t) => match self.modified(state, &rel, &t) {
                        Some(m) => (vec![t], vec![m]),
                        None => continue,
                    },
                    None => continue,
                },
                _ => (
                    pick_existing(&mut self.rng).into_iter().collect(),
                    self.tuple(state, &rel).into_iter().collect(),
                ),
            };
            let u = Update::new(rel.clone(), d, i);
            // only effective updates: every deleted tuple exists, no inserted one does
            if u.is_empty() || u.effective(state).ok().as_ref() != Some(&u) {
                continue;
            }
            if apply_update(state, &u).is_ok() {
                return u;
            }
        }
        Update::empty(rel)
    }
}

/// A deterministic random case over the bundled case-study schema.
pub fn generate_instance(seed: u64, size: usize) -> (DatabaseState, Update) {
    generate_case(fixtures::schema(), seed, size)
}

/// A deterministic random case over `schema`. `size` 0 yields the empty
/// state and an empty update.
pub fn generate_case(
    schema: Arc<RelationalSchema>,
    seed: u64,
    size: usize,
) -> (DatabaseState, Update) {
    let size = size.min(32);
    if size == 0 {
        let first = schema
            .dependency_order()
            .into_iter()
            .next()
            .unwrap_or_default();
        return (DatabaseState::empty(schema), Update::empty(first));
    }
    let mut g = Generator::new(schema, seed);
    let state = g.state(size);
    let update = g.update(&state);
    (state, update)
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub seed: u64,
    pub relation: String,
    pub deletes: usize,
    pub inserts: usize,
    pub passed: bool,
    pub reconstructs: bool,
    pub missing: Vec<String>,
    pub spurious: Vec<String>,
    pub stats: VerificationStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignReport {
    pub seed: u64,
    pub size: usize,
    pub cases: usize,
    pub passed: usize,
    pub failures: Vec<CaseResult>,
    /// Number of cases per updated relation.
    pub relations: BTreeMap<String, usize>,
}

impl CampaignReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs one generated case through the engine and the oracle.
pub fn run_case(rules: &RuleSet, seed: u64, size: usize) -> Result<CaseResult, ChangesetError> {
    let (s0, u) = generate_case(Arc::clone(rules.schema()), seed, size);
    let cs = compute_changeset(&u, &s0, rules)?;
    let report = verify_changeset(&s0, &u, rules, &cs)?;
    let s1 = apply_update(&s0, &u)?;
    let reconstructs = reconstruct_sigma0(&s1, &u)? == s0;
    Ok(CaseResult {
        seed,
        relation: u.relation().to_string(),
        deletes: u.deletes().len(),
        inserts: u.inserts().len(),
        passed: report.passed && reconstructs,
        reconstructs,
        missing: lines(&report.missing),
        spurious: lines(&report.spurious),
        stats: report.stats,
    })
}

/// `cases` independent random cases, run in parallel. Case seeds are drawn
/// from `seed`, so a campaign is reproducible.
pub fn run_campaign(
    rules: &RuleSet,
    cases: usize,
    seed: u64,
    size: usize,
) -> Result<CampaignReport, ChangesetError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..cases).map(|_| rng.gen()).collect();
    let results: Vec<CaseResult> = seeds
        .par_iter()
        .map(|&s| run_case(rules, s, size))
        .collect::<Result<_, _>>()?;
    let mut relations = BTreeMap::new();
    for r in &results {
        *relations.entry(r.relation.clone()).or_insert(0) += 1;
    }
    let passed = results.iter().filter(|r| r.passed).count();
    Ok(CampaignReport {
        seed,
        size,
        cases,
        passed,
        failures: results.into_iter().filter(|r| !r.passed).collect(),
        relations,
    })
}

/// Whether `rules` react to updates on `relation` at all.
pub fn is_relevant(rules: &RuleSet, relation: &str) -> bool {
    relevant_rules(rules, relation).is_ok_and(|v| !v.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example_update, sigma0};
    use crate::rdf::Quad;

    #[test]
    fn worked_example_passes() {
        let rs = fixtures::worked_example_rules();
        let s0 = sigma0();
        let u = example_update();
        let cs = compute_changeset(&u, &s0, &rs).unwrap();
        let rep = verify_changeset(&s0, &u, &rs, &cs).unwrap();
        assert!(rep.passed, "{:?}", rep.to_json());
        assert_eq!(rep.stats.delta_minus, 22);
        assert_eq!(rep.to_json()["missing"], serde_json::json!([]));
    }

    #[test]
    fn dropped_quad_is_reported_missing() {
        let rs = fixtures::worked_example_rules();
        let s0 = sigma0();
        let u = example_update();
        let mut cs = compute_changeset(&u, &s0, &rs).unwrap();
        let victim: Quad = cs.delta_plus.iter().next().unwrap().clone();
        cs.delta_plus.remove(&victim);
        let rep = verify_changeset(&s0, &u, &rs, &cs).unwrap();
        assert!(!rep.passed);
        assert_eq!(rep.missing.iter().collect::<Vec<_>>(), vec![&victim]);
        assert!(rep.spurious.is_empty());
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_instance(1, 4);
        let b = generate_instance(1, 4);
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        let c = generate_instance(2, 4);
        assert!(a.0 != c.0 || a.1 != c.1);
    }

    #[test]
    fn generated_states_are_valid() {
        for seed in 0..30 {
            let (s, u) = generate_instance(seed, 8);
            s.validate().unwrap();
            assert!(s.relations().all(|(_, ts)| ts.len() <= 8));
            apply_update(&s, &u).unwrap();
        }
    }

    #[test]
    fn size_zero_is_empty() {
        let (s, u) = generate_instance(9, 0);
        assert_eq!(s.tuple_count(), 0);
        assert!(u.is_empty());
    }

    #[test]
    fn generator_mostly_finds_updates() {
        let non_empty = (0..50)
            .filter(|&s| !generate_instance(s, 6).1.is_empty())
            .count();
        assert!(non_empty >= 35, "{non_empty}");
    }

    #[test]
    fn small_campaign_passes() {
        let rs = fixtures::rules();
        let rep = run_campaign(&rs, 40, 3, 5).unwrap();
        assert!(
            rep.all_passed(),
            "{}",
            serde_json::to_string_pretty(&rep).unwrap()
        );
        assert_eq!(rep.passed, 40);
        let empty = run_campaign(&rs, 0, 3, 5).unwrap();
        assert_eq!(empty.cases, 0);
        assert!(empty.all_passed());
    }
}
