use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use super::schema::{AttrType, RelationScheme, RelationalSchema};
use super::RelationalError;

/// A scalar attribute value. TEXT, VARCHAR and UUID values are all `Text`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Null,
    Int(i64),
    Text(String),
}

impl Value {
    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    /// Parses the textual form of a value of type `ty`. The empty string is
    /// NULL; UUIDs are canonicalised.
    pub fn parse(ty: AttrType, raw: &str) -> Result<Value, String> {
        if raw.is_empty() {
            return Ok(Value::Null);
        }
        match ty {
            AttrType::Integer => raw
                .trim()
                .parse::<i64>()
                .map(Value::Int)
                .map_err(|_| format!("`{raw}` is not an INTEGER")),
            AttrType::Text | AttrType::Varchar => Ok(Value::text(raw)),
            AttrType::Uuid => canonical_uuid(raw)
                .map(Value::Text)
                .ok_or_else(|| format!("`{raw}` is not a UUID")),
        }
    }

    /// Whether a non-NULL value belongs to the domain of `ty`.
    pub fn conforms_to(&self, ty: AttrType) -> bool {
        match (self, ty) {
            (Value::Null, _) => true,
            (Value::Int(_), AttrType::Integer) => true,
            (Value::Text(_), AttrType::Text | AttrType::Varchar) => true,
            (Value::Text(s), AttrType::Uuid) => canonical_uuid(s).as_deref() == Some(s.as_str()),
            _ => false,
        }
    }

    /// Lexical form used in URIs and literals.
    pub fn lexical(&self) -> Option<String> {
        match self {
            Value::Null => None,
            Value::Int(i) => Some(i.to_string()),
            Value::Text(s) => Some(s.clone()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("NULL"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::text(v)
    }
}

/// Canonical lexical form of a UUID column value.
///
/// Hex UUIDs (with or without hyphens, any case) become lowercase
/// 8-4-4-4-12. Symbolic identifiers made of `[A-Za-z0-9_-]` pass through
/// unchanged so hand-written fixtures can use readable placeholders.
pub fn canonical_uuid(raw: &str) -> Option<String> {
    let hex: String = raw.chars().filter(|c| *c != '-').collect();
    let hyphen_layout_ok = {
        let positions: Vec<usize> = raw
            .char_indices()
            .filter(|(_, c)| *c == '-')
            .map(|(i, _)| i)
            .collect();
        positions.is_empty() || positions == [8, 13, 18, 23]
    };
    if hex.len() == 32 && hex.chars().all(|c| c.is_ascii_hexdigit()) && hyphen_layout_ok {
        let h = hex.to_ascii_lowercase();
        return Some(format!(
            "{}-{}-{}-{}-{}",
            &h[0..8],
            &h[8..12],
            &h[12..16],
            &h[16..20],
            &h[20..32]
        ));
    }
    let symbolic = !raw.is_empty()
        && raw
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    symbolic.then(|| raw.to_owned())
}

/// A tuple, identified by full value equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Tuple(BTreeMap<String, Value>);

impl Tuple {
    pub fn new<K, V>(pairs: impl IntoIterator<Item = (K, V)>) -> Self
    where
        K: Into<String>,
        V: Into<Value>,
    {
        Tuple(
            pairs
                .into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
        )
    }

    /// Value of `attr`; attributes the tuple does not carry read as NULL.
    pub fn get(&self, attr: &str) -> &Value {
        static NULL: Value = Value::Null;
        self.0.get(attr).unwrap_or(&NULL)
    }

    pub fn set(&mut self, attr: impl Into<String>, value: Value) {
        self.0.insert(attr.into(), value);
    }

    pub fn attrs(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Values of `attrs` in order, or `None` if any of them is NULL.
    pub fn project(&self, attrs: &[String]) -> Option<Vec<&Value>> {
        let values: Vec<&Value> = attrs.iter().map(|a| self.get(a)).collect();
        values.iter().all(|v| !v.is_null()).then_some(values)
    }

    /// Fills attributes missing from `self` with NULL so the tuple carries
    /// exactly the scheme's attributes (extra attributes are kept and
    /// rejected later by validation).
    pub fn completed(mut self, scheme: &RelationScheme) -> Tuple {
        for attr in &scheme.attributes {
            self.0.entry(attr.name.clone()).or_insert(Value::Null);
        }
        self
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("⟩")
    }
}

/// An update `u = (D, I)` on one relation.
///
/// Tuples present in both `D` and `I` are dropped from both on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Update {
    relation: String,
    deletes: BTreeSet<Tuple>,
    inserts: BTreeSet<Tuple>,
}

impl Update {
    pub fn new(
        relation: impl Into<String>,
        deletes: impl IntoIterator<Item = Tuple>,
        inserts: impl IntoIterator<Item = Tuple>,
    ) -> Self {
        let mut deletes: BTreeSet<Tuple> = deletes.into_iter().collect();
        let mut inserts: BTreeSet<Tuple> = inserts.into_iter().collect();
        let both: Vec<Tuple> = deletes.intersection(&inserts).cloned().collect();
        for t in &both {
            deletes.remove(t);
            inserts.remove(t);
        }
        Self {
            relation: relation.into(),
            deletes,
            inserts,
        }
    }

    pub fn empty(relation: impl Into<String>) -> Self {
        Self::new(relation, [], [])
    }

    pub fn relation(&self) -> &str {
        &self.relation
    }

    pub fn deletes(&self) -> &BTreeSet<Tuple> {
        &self.deletes
    }

    pub fn inserts(&self) -> &BTreeSet<Tuple> {
        &self.inserts
    }

    pub fn is_empty(&self) -> bool {
        self.deletes.is_empty() && self.inserts.is_empty()
    }

    /// `(I, D)`: undoes `self` when `D ⊆ R(σ0)` and `I ∩ R(σ0) = ∅`.
    pub fn inverse(&self) -> Update {
        Update::new(
            self.relation.clone(),
            self.inserts.clone(),
            self.deletes.clone(),
        )
    }

    /// The part of the update that changes `state`: deletions of tuples that
    /// exist and insertions of tuples that do not.
    pub fn effective(&self, state: &DatabaseState) -> Result<Update, RelationalError> {
        let current = state.relation(&self.relation)?;
        Ok(Update::new(
            self.relation.clone(),
            self.deletes.intersection(current).cloned(),
            self.inserts.difference(current).cloned(),
        ))
    }

    /// Completes every tuple with NULLs for attributes it does not mention.
    pub fn completed(&self, schema: &RelationalSchema) -> Result<Update, RelationalError> {
        let scheme = schema
            .relation(&self.relation)
            .ok_or_else(|| RelationalError::UnknownRelation(self.relation.clone()))?;
        Ok(Update::new(
            self.relation.clone(),
            self.deletes.iter().cloned().map(|t| t.completed(scheme)),
            self.inserts.iter().cloned().map(|t| t.completed(scheme)),
        ))
    }
}

/// A database state `σ`: one tuple set per relation of the schema.
///
/// States are immutable values; updates produce new states.
#[derive(Debug, Clone)]
pub struct DatabaseState {
    schema: Arc<RelationalSchema>,
    relations: BTreeMap<String, BTreeSet<Tuple>>,
}

impl PartialEq for DatabaseState {
    fn eq(&self, other: &Self) -> bool {
        self.relations == other.relations
    }
}

impl Eq for DatabaseState {}

impl DatabaseState {
    pub fn empty(schema: Arc<RelationalSchema>) -> Self {
        let relations = schema
            .relation_names()
            .map(|n| (n.to_owned(), BTreeSet::new()))
            .collect();
        Self { schema, relations }
    }

    /// Builds a state and checks every constraint of the schema.
    pub fn from_relations<N, I>(
        schema: Arc<RelationalSchema>,
        relations: impl IntoIterator<Item = (N, I)>,
    ) -> Result<Self, RelationalError>
    where
        N: Into<String>,
        I: IntoIterator<Item = Tuple>,
    {
        let mut state = Self::empty(schema);
        for (name, tuples) in relations {
            let name = name.into();
            let slot = state
                .relations
                .get_mut(&name)
                .ok_or_else(|| RelationalError::UnknownRelation(name.clone()))?;
            slot.extend(tuples);
        }
        state.validate()?;
        Ok(state)
    }

    pub fn schema(&self) -> &Arc<RelationalSchema> {
        &self.schema
    }

    pub fn relation(&self, name: &str) -> Result<&BTreeSet<Tuple>, RelationalError> {
        self.relations
            .get(name)
            .ok_or_else(|| RelationalError::UnknownRelation(name.to_owned()))
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &BTreeSet<Tuple>)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn contains(&self, relation: &str, tuple: &Tuple) -> bool {
        self.relations
            .get(relation)
            .is_some_and(|set| set.contains(tuple))
    }

    pub fn tuple_count(&self) -> usize {
        self.relations.values().map(BTreeSet::len).sum()
    }

    /// Checks domains, nullability, key uniqueness and referential integrity.
    pub fn validate(&self) -> Result<(), RelationalError> {
        for (name, tuples) in &self.relations {
            let scheme = self.scheme(name)?;
            for t in tuples {
                check_tuple(scheme, t)?;
            }
            check_keys(scheme, tuples)?;
        }
        for fk in self.schema.foreign_keys() {
            let sources = &self.relations[&fk.source_relation];
            check_references(self, fk, sources.iter())?;
        }
        Ok(())
    }

    /// `R(σ1) = (R(σ0) − D) ∪ I`, with constraints re-checked on the result.
    pub fn apply(&self, update: &Update) -> Result<DatabaseState, RelationalError> {
        let name = update.relation();
        let scheme = self.scheme(name)?;
        for t in update.inserts().iter().chain(update.deletes()) {
            check_tuple(scheme, t)?;
        }
        if update.is_empty() {
            return Ok(self.clone());
        }
        let old = self.relation(name)?;
        let mut new: BTreeSet<Tuple> = old.difference(update.deletes()).cloned().collect();
        new.extend(update.inserts().iter().cloned());

        let mut next = self.clone();
        next.relations.insert(name.to_owned(), new);
        next.check_relation_changed(name, update.inserts(), !update.deletes().is_empty())?;
        Ok(next)
    }

    /// Returns a copy with `relation` replaced by `tuples`, re-validated.
    pub fn with_relation(
        &self,
        relation: &str,
        tuples: BTreeSet<Tuple>,
    ) -> Result<DatabaseState, RelationalError> {
        let scheme = self.scheme(relation)?;
        for t in &tuples {
            check_tuple(scheme, t)?;
        }
        let inserted: BTreeSet<Tuple> = tuples
            .difference(self.relation(relation)?)
            .cloned()
            .collect();
        let removed_any = self
            .relation(relation)?
            .difference(&tuples)
            .next()
            .is_some();
        let mut next = self.clone();
        next.relations.insert(relation.to_owned(), tuples);
        next.check_relation_changed(relation, &inserted, removed_any)?;
        Ok(next)
    }

    fn scheme(&self, name: &str) -> Result<&RelationScheme, RelationalError> {
        self.schema
            .relation(name)
            .ok_or_else(|| RelationalError::UnknownRelation(name.to_owned()))
    }

    /// Re-checks the constraints a change to `name` can break.
    fn check_relation_changed(
        &self,
        name: &str,
        inserted: &BTreeSet<Tuple>,
        removed_any: bool,
    ) -> Result<(), RelationalError> {
        let scheme = self.scheme(name)?;
        check_keys(scheme, &self.relations[name])?;
        for fk in self.schema.outgoing(name) {
            if fk.target_relation == name {
                check_references(self, fk, self.relations[name].iter())?;
            } else {
                check_references(self, fk, inserted.iter())?;
            }
        }
        if removed_any {
            for fk in self.schema.incoming(name) {
                let sources = &self.relations[&fk.source_relation];
                check_references(self, fk, sources.iter())?;
            }
        }
        Ok(())
    }
}

/// `apply_update(σ, u)`; see [`DatabaseState::apply`].
pub fn apply_update(
    state: &DatabaseState,
    update: &Update,
) -> Result<DatabaseState, RelationalError> {
    state.apply(update)
}

fn check_tuple(scheme: &RelationScheme, t: &Tuple) -> Result<(), RelationalError> {
    for (attr, value) in t.attrs() {
        let decl = scheme
            .attribute(attr)
            .ok_or_else(|| RelationalError::UnknownAttribute {
                relation: scheme.name.clone(),
                attr: attr.to_owned(),
            })?;
        if !value.conforms_to(decl.ty) {
            return Err(RelationalError::ConstraintViolation(format!(
                "{}.{attr}: value `{value}` is not of type {}",
                scheme.name, decl.ty
            )));
        }
    }
    for decl in &scheme.attributes {
        if t.attrs().all(|(a, _)| a != decl.name) {
            return Err(RelationalError::ConstraintViolation(format!(
                "{}: tuple {t} lacks attribute `{}`",
                scheme.name, decl.name
            )));
        }
        if !decl.nullable && t.get(&decl.name).is_null() {
            return Err(RelationalError::ConstraintViolation(format!(
                "{}.{} is NOT NULL but tuple {t} has NULL",
                scheme.name, decl.name
            )));
        }
    }
    Ok(())
}

fn check_keys(scheme: &RelationScheme, tuples: &BTreeSet<Tuple>) -> Result<(), RelationalError> {
    for key in scheme.candidate_keys() {
        let mut seen = HashSet::new();
        for t in tuples {
            let values: Vec<&Value> = key.iter().map(|a| t.get(a)).collect();
            if !seen.insert(values.clone()) {
                let shown: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                return Err(RelationalError::ConstraintViolation(format!(
                    "{}: duplicate key ({}) = ({})",
                    scheme.name,
                    key.join(", "),
                    shown.join(", ")
                )));
            }
        }
    }
    Ok(())
}

fn check_references<'a>(
    state: &DatabaseState,
    fk: &super::schema::ForeignKey,
    sources: impl Iterator<Item = &'a Tuple>,
) -> Result<(), RelationalError> {
    let targets = &state.relations[&fk.target_relation];
    let keys: HashSet<Vec<&Value>> = targets
        .iter()
        .map(|t| fk.target_attrs.iter().map(|a| t.get(a)).collect())
        .collect();
    for s in sources {
        // NULL in any referencing column exempts the tuple (SQL MATCH SIMPLE).
        let Some(values) = s.project(&fk.source_attrs) else {
            continue;
        };
        if !keys.contains(&values) {
            return Err(RelationalError::ConstraintViolation(format!(
                "{}: {} references a missing {} tuple via {}",
                fk.source_relation, s, fk.target_relation, fk.name
            )));
        }
    }
    Ok(())
}
