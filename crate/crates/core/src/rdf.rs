//! RDF terms, quads and quad datasets with canonical N-Quads I/O.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(String);

impl Iri {
    pub fn new(s: impl Into<String>) -> Self {
        Iri(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub lexical: String,
    pub datatype: Iri,
}

impl Literal {
    pub fn string(s: impl Into<String>) -> Self {
        Literal {
            lexical: s.into(),
            datatype: Iri::new(XSD_STRING),
        }
    }

    pub fn integer(i: i64) -> Self {
        Literal {
            lexical: i.to_string(),
            datatype: Iri::new(XSD_INTEGER),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        for c in self.lexical.chars() {
            match c {
                '\\' => f.write_str("\\\\")?,
                '"' => f.write_str("\\\"")?,
                '\n' => f.write_str("\\n")?,
                '\r' => f.write_str("\\r")?,
                '\t' => f.write_str("\\t")?,
                c => write!(f, "{c}")?,
            }
        }
        write!(f, "\"^^{}", self.datatype)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => i.fmt(f),
            Term::Literal(l) => l.fmt(f),
        }
    }
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Iri(i)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quad {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
    pub graph: Iri,
}

impl Quad {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>, graph: Iri) -> Self {
        Quad {
            subject,
            predicate,
            object: object.into(),
            graph,
        }
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} .",
            self.subject, self.predicate, self.object, self.graph
        )
    }
}

/// A set of quads.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuadDataset(BTreeSet<Quad>);

impl QuadDataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, q: Quad) -> bool {
        self.0.insert(q)
    }

    pub fn remove(&mut self, q: &Quad) -> bool {
        self.0.remove(q)
    }

    pub fn contains(&self, q: &Quad) -> bool {
        self.0.contains(q)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Quad> {
        self.0.iter()
    }

    pub fn extend(&mut self, other: QuadDataset) {
        self.0.extend(other.0);
    }

    pub fn union(&self, other: &QuadDataset) -> QuadDataset {
        QuadDataset(self.0.union(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &QuadDataset) -> QuadDataset {
        QuadDataset(self.0.difference(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &QuadDataset) -> QuadDataset {
        QuadDataset(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &QuadDataset) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Canonical N-Quads: one line per quad, lines sorted as byte strings.
    pub fn to_nquads(&self) -> String {
        serialize_nquads(self)
    }
}

impl FromIterator<Quad> for QuadDataset {
    fn from_iter<I: IntoIterator<Item = Quad>>(iter: I) -> Self {
        QuadDataset(iter.into_iter().collect())
    }
}

impl IntoIterator for QuadDataset {
    type Item = Quad;
    type IntoIter = std::collections::btree_set::IntoIter<Quad>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a QuadDataset {
    type Item = &'a Quad;
    type IntoIter = std::collections::btree_set::Iter<'a, Quad>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

pub fn serialize_nquads(ds: &QuadDataset) -> String {
    let mut lines: Vec<String> = ds.iter().map(|q| q.to_string()).collect();
    lines.sort_unstable();
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct NQuadsError {
    pub line: usize,
    pub message: String,
}

/// Parses the N-Quads subset written by [`serialize_nquads`]: IRIs and typed
/// literals, no blank nodes, always a graph label. Blank lines and `#`
/// comment lines are skipped.
pub fn parse_nquads(text: &str) -> Result<QuadDataset, NQuadsError> {
    let mut ds = QuadDataset::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| NQuadsError {
            line: i + 1,
            message,
        };
        let mut cur = Cursor { rest: line };
        let subject = cur.iri().map_err(err)?;
        let predicate = cur.iri().map_err(err)?;
        let object = cur.term().map_err(err)?;
        let graph = cur.iri().map_err(err)?;
        cur.skip_ws();
        if cur.rest != "." {
            return Err(err(format!(
                "expected `.` at end of quad, found `{}`",
                cur.rest
            )));
        }
        ds.insert(Quad {
            subject,
            predicate,
            object,
            graph,
        });
    }
    Ok(ds)
}

struct Cursor<'a> {
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn iri(&mut self) -> Result<Iri, String> {
        self.skip_ws();
        let Some(body) = self.rest.strip_prefix('<') else {
            return Err(format!("expected IRI at `{}`", self.rest));
        };
        let end = body.find('>').ok_or("unterminated IRI")?;
        let iri = &body[..end];
        if iri
            .chars()
            .any(|c| c.is_whitespace() || c == '<' || c == '"')
        {
            return Err(format!("invalid character in IRI `{iri}`"));
        }
        self.rest = &body[end + 1..];
        Ok(Iri::new(iri))
    }

    fn term(&mut self) -> Result<Term, String> {
        self.skip_ws();
        if !self.rest.starts_with('"') {
            return self.iri().map(Term::Iri);
        }
        let mut lexical = String::new();
        let mut chars = self.rest[1..].char_indices();
        let close = loop {
            let Some((i, c)) = chars.next() else {
                return Err("unterminated literal".into());
            };
            match c {
                '"' => break i + 1,
                '\\' => {
                    let (_, e) = chars.next().ok_or("dangling escape")?;
                    match e {
                        '\\' => lexical.push('\\'),
                        '"' => lexical.push('"'),
                        'n' => lexical.push('\n'),
                        'r' => lexical.push('\r'),
                        't' => lexical.push('\t'),
                        'u' | 'U' => {
                            let n = if e == 'u' { 4 } else { 8 };
                            let hex: String =
                                (0..n).filter_map(|_| chars.next().map(|p| p.1)).collect();
                            let cp = u32::from_str_radix(&hex, 16)
                                .ok()
                                .filter(|_| hex.len() == n)
                                .and_then(char::from_u32)
                                .ok_or_else(|| format!("bad \\{e} escape `{hex}`"))?;
                            lexical.push(cp);
                        }
                        other => return Err(format!("unknown escape `\\{other}`")),
                    }
                }
                c => lexical.push(c),
            }
        };
        self.rest = &self.rest[close + 1..];
        let Some(after) = self.rest.strip_prefix("^^") else {
            return Err("literal without datatype".into());
        };
        self.rest = after;
        let datatype = self.iri()?;
        Ok(Term::Literal(Literal { lexical, datatype }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> QuadDataset {
        [
            Quad::new(
                Iri::new("http://musicbrainz.org/t1"),
                Iri::new(RDF_TYPE),
                Iri::new("http://purl.org/ontology/mo/Track"),
                Iri::new("http://musicbrainz.org/gt"),
            ),
            Quad::new(
                Iri::new("http://musicbrainz.org/t1"),
                Iri::new("http://purl.org/dc/elements/1.1/title"),
                Literal::string("say \"hi\"\\\n\tx"),
                Iri::new("http://musicbrainz.org/gt"),
            ),
            Quad::new(
                Iri::new("http://musicbrainz.org/m1"),
                Iri::new("http://purl.org/ontology/mo/track_count"),
                Literal::integer(12),
                Iri::new("http://musicbrainz.org/gm"),
            ),
        ]
        .into_iter()
        .collect()
    }

    #[test]
    fn empty_dataset_serializes_to_nothing() {
        assert_eq!(serialize_nquads(&QuadDataset::new()), "");
    }

    #[test]
    fn single_quad_line() {
        let ds: QuadDataset = sample()
            .into_iter()
            .filter(|q| q.predicate.as_str() == RDF_TYPE)
            .collect();
        assert_eq!(
            ds.to_nquads(),
            "<http://musicbrainz.org/t1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> \
             <http://purl.org/ontology/mo/Track> <http://musicbrainz.org/gt> .\n"
        );
    }

    #[test]
    fn lines_are_byte_sorted() {
        let text = sample().to_nquads();
        let lines: Vec<&str> = text.lines().collect();
        let mut sorted = lines.clone();
        sorted.sort();
        assert_eq!(lines, sorted);
        assert!(text.ends_with('\n'));
        assert!(text.contains(r#""say \"hi\"\\\n\tx"^^<http://www.w3.org/2001/XMLSchema#string>"#));
    }

    #[test]
    fn round_trip() {
        let ds = sample();
        let text = ds.to_nquads();
        let back = parse_nquads(&text).unwrap();
        assert_eq!(back, ds);
        assert_eq!(back.to_nquads(), text);
    }

    #[test]
    fn unicode_escapes() {
        let ds = parse_nquads(
            "<a:s> <a:p> \"caf\\u00E9 \\U0001F600\"^^<http://www.w3.org/2001/XMLSchema#string> <a:g> .",
        )
        .unwrap();
        let q = ds.iter().next().unwrap();
        assert_eq!(q.object, Term::Literal(Literal::string("café 😀")));
    }

    #[test]
    fn parse_errors_report_lines() {
        let err = parse_nquads("\n<a:s> <a:p> <a:o> .\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(parse_nquads("<a:s> <a:p> \"x\" <a:g> .").is_err());
        assert!(parse_nquads("<a:s> <a:p> <a:o> <a:g>").is_err());
    }

    #[test]
    fn set_algebra() {
        let a = sample();
        let first = a.iter().next().unwrap().clone();
        let b: QuadDataset = [first.clone()].into_iter().collect();
        assert_eq!(a.difference(&b).len(), 2);
        assert_eq!(a.intersection(&b), b);
        assert_eq!(a.difference(&b).union(&b), a);
        assert!(b.is_subset(&a));
    }
}
