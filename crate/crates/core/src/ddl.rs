//! Parser for the `CREATE TABLE` dialect used to declare schemas.
//!
//! The dialect is closed: column types `TEXT | VARCHAR | INTEGER | UUID`,
//! `NOT NULL`, inline or table-level `PRIMARY KEY`, and named
//! `CONSTRAINT <fk> FOREIGN KEY (..) REFERENCES T(..)`. Keywords are
//! case-insensitive, identifiers are not, `--` starts a line comment. Tables
//! may reference tables declared later in the file.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::relational::{
    AttrType, Attribute, ForeignKey, RelationScheme, RelationalSchema, SchemaError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DdlError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Semi,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, DdlError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, cl) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '-' {
            bump(&mut chars);
            if chars.peek() == Some(&'-') {
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
                continue;
            }
            return Err(DdlError::Syntax {
                line: l,
                col: cl,
                message: "unexpected `-`".into(),
            });
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&n) = chars.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' {
                        ident.push(n);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                out.push(Spanned {
                    tok: Tok::Ident(ident),
                    line: l,
                    col: cl,
                });
                continue;
            }
            other => {
                return Err(DdlError::Syntax {
                    line: l,
                    col: cl,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        bump(&mut chars);
        out.push(Spanned {
            tok,
            line: l,
            col: cl,
        });
    }
    Ok(out)
}

/// One parsed `CREATE TABLE` statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CreateTable {
    pub name: String,
    pub columns: Vec<Attribute>,
    pub primary_key: Option<Vec<String>>,
    pub foreign_keys: Vec<(ForeignKey, usize)>,
    /// 1-based line of the `CREATE` keyword.
    pub line: usize,
}

/// The statements of a DDL file, before cross-table resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdlDocument {
    pub statements: Vec<CreateTable>,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    eof: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, DdlError> {
        let (line, col) = self.peek().map_or(self.eof, |s| (s.line, s.col));
        Err(DdlError::Syntax {
            line,
            col,
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Spanned { tok: Tok::Ident(s), .. }) if s.eq_ignore_ascii_case(kw))
    }

    fn keyword(&mut self, kw: &str) -> Result<(), DdlError> {
        if self.at_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{kw}`"))
        }
    }

    fn punct(&mut self, want: Tok, shown: &str) -> Result<(), DdlError> {
        if self.peek().map(|s| &s.tok) == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{shown}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, DdlError> {
        match self.peek() {
            Some(Spanned {
                tok: Tok::Ident(s), ..
            }) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<String>, DdlError> {
        self.punct(Tok::LParen, "(")?;
        let mut names = vec![self.ident("column name")?];
        while self.peek().map(|s| &s.tok) == Some(&Tok::Comma) {
            self.pos += 1;
            names.push(self.ident("column name")?);
        }
        self.punct(Tok::RParen, ")")?;
        Ok(names)
    }

    fn statement(&mut self) -> Result<CreateTable, DdlError> {
        let line = self.peek().map_or(self.eof.0, |s| s.line);
        self.keyword("CREATE")?;
        self.keyword("TABLE")?;
        let name = self.ident("table name")?;
        self.punct(Tok::LParen, "(")?;
        let mut table = CreateTable {
            name,
            columns: Vec::new(),
            primary_key: None,
            foreign_keys: Vec::new(),
            line,
        };
        loop {
            self.element(&mut table)?;
            match self.next() {
                Some(Spanned {
                    tok: Tok::Comma, ..
                }) => continue,
                Some(Spanned {
                    tok: Tok::RParen, ..
                }) => break,
                _ => {
                    self.pos -= 1;
                    return self.err("expected `,` or `)`");
                }
            }
        }
        self.punct(Tok::Semi, ";")?;
        Ok(table)
    }

    fn set_primary_key(&self, table: &mut CreateTable, key: Vec<String>) -> Result<(), DdlError> {
        if table.primary_key.is_some() {
            return self.err(format!("table `{}` declares two primary keys", table.name));
        }
        table.primary_key = Some(key);
        Ok(())
    }

    fn element(&mut self, table: &mut CreateTable) -> Result<(), DdlError> {
        if self.at_keyword("PRIMARY") {
            self.pos += 1;
            self.keyword("KEY")?;
            let key = self.ident_list()?;
            return self.set_primary_key(table, key);
        }
        if self.at_keyword("CONSTRAINT") {
            let line = self.peek().map_or(0, |s| s.line);
            self.pos += 1;
            let name = self.ident("constraint name")?;
            self.keyword("FOREIGN")?;
            self.keyword("KEY")?;
            let source_attrs = self.ident_list()?;
            self.keyword("REFERENCES")?;
            let target_relation = self.ident("referenced table")?;
            let target_attrs = self.ident_list()?;
            table.foreign_keys.push((
                ForeignKey {
                    name,
                    source_relation: table.name.clone(),
                    source_attrs,
                    target_relation,
                    target_attrs,
                },
                line,
            ));
            return Ok(());
        }
        let name = self.ident("column name")?;
        let ty_word = self.ident("column type")?;
        let ty = match ty_word.to_ascii_uppercase().as_str() {
            "TEXT" => AttrType::Text,
            "VARCHAR" => AttrType::Varchar,
            "INTEGER" => AttrType::Integer,
            "UUID" => AttrType::Uuid,
            _ => {
                self.pos -= 1;
                return self.err(format!("unsupported column type `{ty_word}`"));
            }
        };
        let mut nullable = true;
        let (mut saw_not_null, mut saw_pk) = (false, false);
        loop {
            if self.at_keyword("NOT") && !saw_not_null {
                self.pos += 1;
                self.keyword("NULL")?;
                saw_not_null = true;
                nullable = false;
            } else if self.at_keyword("PRIMARY") && !saw_pk {
                self.pos += 1;
                self.keyword("KEY")?;
                saw_pk = true;
                nullable = false;
                self.set_primary_key(table, vec![name.clone()])?;
            } else {
                break;
            }
        }
        table.columns.push(Attribute { name, ty, nullable });
        Ok(())
    }
}

/// Splits `text` into `CREATE TABLE` statements without resolving references.
pub fn parse_document(text: &str) -> Result<DdlDocument, DdlError> {
    let toks = lex(text)?;
    let eof = {
        let lines = text.split('\n').count();
        let last = text.rsplit('\n').next().unwrap_or("");
        (lines, last.chars().count() + 1)
    };
    let mut p = Parser { toks, pos: 0, eof };
    let mut statements = Vec::new();
    while p.peek().is_some() {
        statements.push(p.statement()?);
    }
    Ok(DdlDocument { statements })
}

/// Parses a DDL file into a validated [`RelationalSchema`].
pub fn parse_ddl(text: &str) -> Result<RelationalSchema, DdlError> {
    let doc = parse_document(text)?;
    resolve(doc)
}

fn resolve(doc: DdlDocument) -> Result<RelationalSchema, DdlError> {
    let mut table_lines = HashMap::new();
    let mut fk_lines = HashMap::new();
    let mut relations = Vec::new();
    let mut fks = Vec::new();
    for table in doc.statements {
        if table_lines.insert(table.name.clone(), table.line).is_some() {
            return Err(DdlError::Semantic {
                line: table.line,
                message: SchemaError::DuplicateRelation(table.name).to_string(),
            });
        }
        let Some(mut primary_key) = table.primary_key else {
            return Err(DdlError::Semantic {
                line: table.line,
                message: SchemaError::MissingPrimaryKey(table.name).to_string(),
            });
        };
        let mut columns = table.columns;
        // key columns are mandatory even without an explicit NOT NULL
        for col in &mut columns {
            if primary_key.contains(&col.name) {
                col.nullable = false;
            }
        }
        primary_key.shrink_to_fit();
        relations.push(RelationScheme {
            name: table.name,
            attributes: columns,
            primary_key,
        });
        for (fk, line) in table.foreign_keys {
            fk_lines.entry(fk.name.clone()).or_insert(line);
            fks.push(fk);
        }
    }
    RelationalSchema::new(relations, fks).map_err(|e| {
        let line = match &e {
            SchemaError::DuplicateRelation(r)
            | SchemaError::MissingPrimaryKey(r)
            | SchemaError::DuplicateAttribute { relation: r, .. }
            | SchemaError::UnknownKeyAttribute { relation: r, .. }
            | SchemaError::NullableKeyAttribute { relation: r, .. } => table_lines.get(r).copied(),
            SchemaError::DuplicateForeignKey(fk)
            | SchemaError::UnknownRelation { fk, .. }
            | SchemaError::UnknownAttribute { fk, .. }
            | SchemaError::ArityMismatch { fk, .. }
            | SchemaError::NotPrimaryKey { fk, .. }
            | SchemaError::TypeMismatch { fk, .. } => fk_lines.get(fk).copied(),
        };
        DdlError::Semantic {
            line: line.unwrap_or(0),
            message: e.to_string(),
        }
    })
}

/// Canonical DDL text for `schema`; parses back to an equal schema.
pub fn render_schema(schema: &RelationalSchema) -> String {
    let mut out = String::new();
    for (i, name) in schema.dependency_order().iter().enumerate() {
        let rel = schema.relation(name).expect("listed relation");
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "CREATE TABLE {} (", rel.name);
        let mut lines: Vec<String> = rel
            .attributes
            .iter()
            .map(|a| {
                let null = if a.nullable { "" } else { " NOT NULL" };
                format!("  {} {}{}", a.name, a.ty, null)
            })
            .collect();
        lines.push(format!("  PRIMARY KEY ({})", rel.primary_key.join(", ")));
        for fk in schema.outgoing(&rel.name) {
            lines.push(format!(
                "  CONSTRAINT {} FOREIGN KEY ({}) REFERENCES {}({})",
                fk.name,
                fk.source_attrs.join(", "),
                fk.target_relation,
                fk.target_attrs.join(", ")
            ));
        }
        out.push_str(&lines.join(",\n"));
        out.push_str("\n);\n");
    }
    out
}
