use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttrType {
    Text,
    Varchar,
    Integer,
    Uuid,
}

impl AttrType {
    pub fn keyword(self) -> &'static str {
        match self {
            AttrType::Text => "TEXT",
            AttrType::Varchar => "VARCHAR",
            AttrType::Integer => "INTEGER",
            AttrType::Uuid => "UUID",
        }
    }

    /// TEXT and VARCHAR hold the same values; everything else only matches itself.
    pub fn compatible_with(self, other: AttrType) -> bool {
        let textual = |t| matches!(t, AttrType::Text | AttrType::Varchar);
        self == other || (textual(self) && textual(other))
    }
}

impl fmt::Display for AttrType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub ty: AttrType,
    pub nullable: bool,
}

impl Attribute {
    pub fn new(name: impl Into<String>, ty: AttrType, nullable: bool) -> Self {
        Self {
            name: name.into(),
            ty,
            nullable,
        }
    }
}

/// A relation scheme `R[A1, …, An]` with its primary key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationScheme {
    pub name: String,
    pub attributes: Vec<Attribute>,
    pub primary_key: Vec<String>,
}

impl RelationScheme {
    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn has_attribute(&self, name: &str) -> bool {
        self.attribute(name).is_some()
    }

    /// Attribute sets whose values identify a tuple: the primary key, plus every
    /// mandatory UUID column on its own (UUIDs are universally unique, which
    /// is what lets `gid`-based URIs identify their tuple).
    pub fn candidate_keys(&self) -> Vec<Vec<String>> {
        let mut keys = vec![self.primary_key.clone()];
        for attr in &self.attributes {
            if attr.ty == AttrType::Uuid && !attr.nullable {
                let key = vec![attr.name.clone()];
                if !keys.contains(&key) {
                    keys.push(key);
                }
            }
        }
        keys
    }

    /// True when `attrs` covers at least one candidate key.
    pub fn is_superkey(&self, attrs: &[String]) -> bool {
        let have: BTreeSet<&str> = attrs.iter().map(String::as_str).collect();
        self.candidate_keys()
            .iter()
            .any(|key| key.iter().all(|a| have.contains(a.as_str())))
    }
}

/// `F(R:L, S:K)`: the attributes `L` of `R` reference the primary key `K` of `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForeignKey {
    pub name: String,
    pub source_relation: String,
    pub source_attrs: Vec<String>,
    pub target_relation: String,
    pub target_attrs: Vec<String>,
}

impl ForeignKey {
    pub fn relates(&self, relation: &str) -> bool {
        self.source_relation == relation || self.target_relation == relation
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("duplicate relation `{0}`")]
    DuplicateRelation(String),
    #[error("duplicate attribute `{attr}` in relation `{relation}`")]
    DuplicateAttribute { relation: String, attr: String },
    #[error("relation `{0}` has no primary key")]
    MissingPrimaryKey(String),
    #[error("primary key of `{relation}` names unknown attribute `{attr}`")]
    UnknownKeyAttribute { relation: String, attr: String },
    #[error("primary key attribute `{attr}` of `{relation}` is nullable")]
    NullableKeyAttribute { relation: String, attr: String },
    #[error("duplicate foreign key `{0}`")]
    DuplicateForeignKey(String),
    #[error("foreign key `{fk}` references unknown relation `{relation}`")]
    UnknownRelation { fk: String, relation: String },
    #[error("foreign key `{fk}` names unknown attribute `{relation}.{attr}`")]
    UnknownAttribute {
        fk: String,
        relation: String,
        attr: String,
    },
    #[error("foreign key `{fk}` has {source_len} source and {target_len} target attributes")]
    ArityMismatch {
        fk: String,
        source_len: usize,
        target_len: usize,
    },
    #[error("foreign key `{fk}` must reference the primary key of `{relation}`")]
    NotPrimaryKey { fk: String, relation: String },
    #[error("foreign key `{fk}` joins `{from}` ({from_ty}) with `{to}` ({to_ty})")]
    TypeMismatch {
        fk: String,
        from: String,
        from_ty: AttrType,
        to: String,
        to_ty: AttrType,
    },
}

/// `S = (R, Ω)`: relation schemes plus named foreign keys.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RelationalSchema {
    relations: BTreeMap<String, RelationScheme>,
    foreign_keys: BTreeMap<String, ForeignKey>,
}

impl RelationalSchema {
    pub fn new(
        relations: impl IntoIterator<Item = RelationScheme>,
        foreign_keys: impl IntoIterator<Item = ForeignKey>,
    ) -> Result<Self, SchemaError> {
        let mut by_name = BTreeMap::new();
        for rel in relations {
            validate_scheme(&rel)?;
            if by_name.contains_key(&rel.name) {
                return Err(SchemaError::DuplicateRelation(rel.name));
            }
            by_name.insert(rel.name.clone(), rel);
        }
        let mut fks = BTreeMap::new();
        for fk in foreign_keys {
            validate_fk(&by_name, &fk)?;
            if fks.contains_key(&fk.name) {
                return Err(SchemaError::DuplicateForeignKey(fk.name));
            }
            fks.insert(fk.name.clone(), fk);
        }
        Ok(Self {
            relations: by_name,
            foreign_keys: fks,
        })
    }

    pub fn relation(&self, name: &str) -> Option<&RelationScheme> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = &RelationScheme> {
        self.relations.values()
    }

    pub fn relation_names(&self) -> impl Iterator<Item = &str> {
        self.relations.keys().map(String::as_str)
    }

    pub fn foreign_key(&self, name: &str) -> Option<&ForeignKey> {
        self.foreign_keys.get(name)
    }

    pub fn foreign_keys(&self) -> impl Iterator<Item = &ForeignKey> {
        self.foreign_keys.values()
    }

    /// Foreign keys declared on `relation`.
    pub fn outgoing(&self, relation: &str) -> impl Iterator<Item = &ForeignKey> + '_ {
        let relation = relation.to_owned();
        self.foreign_keys
            .values()
            .filter(move |fk| fk.source_relation == relation)
    }

    /// Foreign keys that reference `relation`.
    pub fn incoming(&self, relation: &str) -> impl Iterator<Item = &ForeignKey> + '_ {
        let relation = relation.to_owned();
        self.foreign_keys
            .values()
            .filter(move |fk| fk.target_relation == relation)
    }

    /// Relations ordered so that every FK target precedes its sources where
    /// the FK graph allows it. Relations on cycles keep name order at the end.
    pub fn dependency_order(&self) -> Vec<String> {
        let mut placed: Vec<String> = Vec::new();
        let mut remaining: Vec<&str> = self.relation_names().collect();
        loop {
            let before = remaining.len();
            remaining.retain(|rel| {
                let ready = self
                    .outgoing(rel)
                    .all(|fk| fk.target_relation == *rel || placed.contains(&fk.target_relation));
                if ready {
                    placed.push(rel.to_string());
                }
                !ready
            });
            if remaining.is_empty() || remaining.len() == before {
                break;
            }
        }
        placed.extend(remaining.into_iter().map(str::to_owned));
        placed
    }
}

fn validate_scheme(rel: &RelationScheme) -> Result<(), SchemaError> {
    let mut seen = BTreeSet::new();
    for attr in &rel.attributes {
        if !seen.insert(attr.name.as_str()) {
            return Err(SchemaError::DuplicateAttribute {
                relation: rel.name.clone(),
                attr: attr.name.clone(),
            });
        }
    }
    if rel.primary_key.is_empty() {
        return Err(SchemaError::MissingPrimaryKey(rel.name.clone()));
    }
    for key_attr in &rel.primary_key {
        match rel.attribute(key_attr) {
            None => {
                return Err(SchemaError::UnknownKeyAttribute {
                    relation: rel.name.clone(),
                    attr: key_attr.clone(),
                })
            }
            Some(a) if a.nullable => {
                return Err(SchemaError::NullableKeyAttribute {
                    relation: rel.name.clone(),
                    attr: key_attr.clone(),
                })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

fn validate_fk(
    relations: &BTreeMap<String, RelationScheme>,
    fk: &ForeignKey,
) -> Result<(), SchemaError> {
    let lookup = |name: &str| {
        relations
            .get(name)
            .ok_or_else(|| SchemaError::UnknownRelation {
                fk: fk.name.clone(),
                relation: name.to_owned(),
            })
    };
    let source = lookup(&fk.source_relation)?;
    let target = lookup(&fk.target_relation)?;
    if fk.source_attrs.len() != fk.target_attrs.len() || fk.source_attrs.is_empty() {
        return Err(SchemaError::ArityMismatch {
            fk: fk.name.clone(),
            source_len: fk.source_attrs.len(),
            target_len: fk.target_attrs.len(),
        });
    }
    let attr = |rel: &RelationScheme, name: &str| {
        rel.attribute(name)
            .cloned()
            .ok_or_else(|| SchemaError::UnknownAttribute {
                fk: fk.name.clone(),
                relation: rel.name.clone(),
                attr: name.to_owned(),
            })
    };
    for (s, t) in fk.source_attrs.iter().zip(&fk.target_attrs) {
        let sa = attr(source, s)?;
        let ta = attr(target, t)?;
        if !sa.ty.compatible_with(ta.ty) {
            return Err(SchemaError::TypeMismatch {
                fk: fk.name.clone(),
                from: format!("{}.{}", source.name, s),
                from_ty: sa.ty,
                to: format!("{}.{}", target.name, t),
                to_ty: ta.ty,
            });
        }
    }
    if fk.target_attrs != target.primary_key {
        return Err(SchemaError::NotPrimaryKey {
            fk: fk.name.clone(),
            relation: target.name.clone(),
        });
    }
    Ok(())
}
