use std::collections::BTreeSet;
use std::fmt;

use super::schema::{ForeignKey, RelationalSchema};
use super::state::{DatabaseState, Tuple};
use super::RelationalError;

/// Which way a foreign key is followed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// From the referencing relation to the referenced one.
    Forward,
    /// From the referenced relation back to the referencing one.
    Reverse,
}

impl Direction {
    pub fn flipped(self) -> Self {
        match self {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathStep {
    pub fk: String,
    pub direction: Direction,
}

impl PathStep {
    pub fn forward(fk: impl Into<String>) -> Self {
        Self {
            fk: fk.into(),
            direction: Direction::Forward,
        }
    }

    pub fn reverse(fk: impl Into<String>) -> Self {
        Self {
            fk: fk.into(),
            direction: Direction::Reverse,
        }
    }
}

/// A chain of foreign keys anchored at `start`. The empty path relates every
/// tuple of `start` to itself.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub start: String,
    pub steps: Vec<PathStep>,
}

impl Path {
    pub fn empty(start: impl Into<String>) -> Self {
        Self {
            start: start.into(),
            steps: Vec::new(),
        }
    }

    pub fn new(start: impl Into<String>, steps: Vec<PathStep>) -> Self {
        Self {
            start: start.into(),
            steps,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The first `k` steps.
    pub fn prefix(&self, k: usize) -> Path {
        Path::new(self.start.clone(), self.steps[..k].to_vec())
    }

    /// `R1, …, Rn` including both endpoints.
    pub fn relations(&self, schema: &RelationalSchema) -> Result<Vec<String>, RelationalError> {
        if schema.relation(&self.start).is_none() {
            return Err(RelationalError::UnknownRelation(self.start.clone()));
        }
        let mut out = vec![self.start.clone()];
        for step in &self.steps {
            let current = out.last().expect("non-empty");
            let (_, next) = endpoints(schema, step, current)?;
            out.push(next.to_owned());
        }
        Ok(out)
    }

    /// The relation the path ends at.
    pub fn end(&self, schema: &RelationalSchema) -> Result<String, RelationalError> {
        Ok(self.relations(schema)?.pop().expect("non-empty"))
    }

    /// The same chain walked from its end back to its start.
    pub fn reversed(&self, schema: &RelationalSchema) -> Result<Path, RelationalError> {
        let end = self.end(schema)?;
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| PathStep {
                fk: s.fk.clone(),
                direction: s.direction.flipped(),
            })
            .collect();
        Ok(Path::new(end, steps))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.start)?;
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let arrow = match s.direction {
                Direction::Forward => "→",
                Direction::Reverse => "←",
            };
            write!(f, "{}{}", s.fk, arrow)?;
        }
        f.write_str("]")
    }
}

/// Resolves a step taken from `current` into `(fk, next relation)`.
fn endpoints<'s>(
    schema: &'s RelationalSchema,
    step: &PathStep,
    current: &str,
) -> Result<(&'s ForeignKey, &'s str), RelationalError> {
    let fk = schema
        .foreign_key(&step.fk)
        .ok_or_else(|| RelationalError::UnknownForeignKey(step.fk.clone()))?;
    let (from, to) = match step.direction {
        Direction::Forward => (&fk.source_relation, &fk.target_relation),
        Direction::Reverse => (&fk.target_relation, &fk.source_relation),
    };
    if from != current {
        return Err(RelationalError::InvalidPath(format!(
            "step {} ({:?}) leaves {} but the path is at {}",
            fk.name, step.direction, from, current
        )));
    }
    Ok((fk, to))
}

/// `Relations(φ)` as an ordered list.
pub fn relations_of(
    path: &Path,
    schema: &RelationalSchema,
) -> Result<Vec<String>, RelationalError> {
    path.relations(schema)
}

/// All tuples of the path's last relation connected to some start tuple.
///
/// Start tuples are taken as given: they need not be stored in `state`,
/// which lets callers walk from tuples that were just deleted or are about to
/// be inserted. NULL join values never match.
pub fn eval_path(
    path: &Path,
    start: &BTreeSet<Tuple>,
    state: &DatabaseState,
) -> Result<BTreeSet<Tuple>, RelationalError> {
    let schema = state.schema();
    path.relations(schema)?;
    let mut current_rel = path.start.clone();
    let mut frontier = start.clone();
    for step in &path.steps {
        let (fk, next_rel) = endpoints(schema, step, &current_rel)?;
        let (here, there) = match step.direction {
            Direction::Forward => (&fk.source_attrs, &fk.target_attrs),
            Direction::Reverse => (&fk.target_attrs, &fk.source_attrs),
        };
        let candidates = state.relation(next_rel)?;
        let mut next = BTreeSet::new();
        for t in &frontier {
            let Some(key) = t.project(here) else { continue };
            for cand in candidates {
                if there.iter().zip(&key).all(|(a, v)| cand.get(a) == *v) {
                    next.insert(cand.clone());
                }
            }
        }
        frontier = next;
        current_rel = next_rel.to_owned();
        if frontier.is_empty() {
            break;
        }
    }
    Ok(frontier)
}

/// `P[φ](t; σ)`: tuples of the path's first relation connected to `t` along
/// `prefix`, where `t` belongs to the prefix's last relation.
pub fn related_pivots(
    prefix: &Path,
    t: &Tuple,
    state: &DatabaseState,
) -> Result<BTreeSet<Tuple>, RelationalError> {
    let back = prefix.reversed(state.schema())?;
    eval_path(&back, &BTreeSet::from([t.clone()]), state)
}
