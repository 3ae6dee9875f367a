//! Rule files to an untyped syntax tree.

use super::lexer::{tokenize, CmpOp, Tok, Token};
use super::RuleError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Proj {
    pub var: String,
    pub attr: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Const {
    Int(i64),
    Str(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum ValueExpr {
    Proj(Proj),
    Call { func: String, args: Vec<Proj> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum BodyLit {
    /// `Rel(r)` or `fk(r1, r2)`.
    Atom {
        name: String,
        args: Vec<String>,
    },
    HasUri {
        prefix: String,
        attrs: Vec<Proj>,
        var: String,
    },
    NonNull(Proj),
    RdfLiteral {
        value: ValueExpr,
        label: Option<(String, String)>,
        var: String,
    },
    Selection {
        proj: Proj,
        op: CmpOp,
        value: Const,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct RuleAst {
    pub name: String,
    pub line: usize,
    pub head: (String, String),
    pub head_args: Vec<String>,
    pub body: Vec<(BodyLit, usize)>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Document {
    pub prefixes: Vec<(String, String, usize)>,
    pub graphs: Vec<(String, (String, String), usize)>,
    pub rules: Vec<RuleAst>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::PName(p, l) => format!("`{p}:{l}`"),
        Tok::Proj(v, a) => format!("`{v}.{a}`"),
        Tok::Directive(d) => format!("`@{d}`"),
        Tok::IriRef(i) => format!("`<{i}>`"),
        Tok::Str(s) => format!("string {s:?}"),
        Tok::Int(i) => format!("`{i}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Arrow => "`<-`".into(),
        Tok::Op(op) => format!("`{}`", op.symbol()),
    }
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).map_or(self.eof.0, |t| t.line)
    }

    fn err<T>(&self, expected: &str) -> Result<T, RuleError> {
        let (line, col, found) = match self.toks.get(self.pos) {
            Some(t) => (t.line, t.col, describe(&t.tok)),
            None => (self.eof.0, self.eof.1, "end of input".into()),
        };
        Err(RuleError::Syntax {
            line,
            col,
            message: format!("expected {expected}, found {found}"),
        })
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), RuleError> {
        if self.eat(&want) {
            Ok(())
        } else {
            self.err(&describe(&want))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, RuleError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(what),
        }
    }

    fn pname(&mut self, what: &str) -> Result<(String, String), RuleError> {
        match self.peek() {
            Some(Tok::PName(p, l)) => {
                let r = (p.clone(), l.clone());
                self.pos += 1;
                Ok(r)
            }
            _ => self.err(what),
        }
    }

    fn proj(&mut self) -> Result<Proj, RuleError> {
        match self.peek() {
            Some(Tok::Proj(v, a)) => {
                let p = Proj {
                    var: v.clone(),
                    attr: a.clone(),
                };
                self.pos += 1;
                Ok(p)
            }
            _ => self.err("a projection `var.attr`"),
        }
    }

    fn string(&mut self) -> Result<String, RuleError> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("a string"),
        }
    }

    fn document(&mut self) -> Result<Document, RuleError> {
        let mut doc = Document::default();
        while let Some(t) = self.peek() {
            match t {
                Tok::Directive(d) => {
                    let d = d.clone();
                    let line = self.line();
                    self.pos += 1;
                    match d.as_str() {
                        "prefix" => {
                            let (label, local) = self.pname("a prefix label `p:`")?;
                            if !local.is_empty() {
                                self.pos -= 1;
                                return self.err("a prefix label ending in `:`");
                            }
                            let iri = match self.peek() {
                                Some(Tok::IriRef(i)) => i.clone(),
                                _ => return self.err("an IRI `<...>`"),
                            };
                            self.pos += 1;
                            self.expect(Tok::Dot)?;
                            doc.prefixes.push((label, iri, line));
                        }
                        "graph" => {
                            let rel = self.ident("a relation name")?;
                            let iri = self.pname("a prefixed graph name")?;
                            self.expect(Tok::Dot)?;
                            doc.graphs.push((rel, iri, line));
                        }
                        _ => {
                            self.pos -= 1;
                            return self.err("`@prefix` or `@graph`");
                        }
                    }
                }
                Tok::PName(_, l) if l.is_empty() => doc.rules.push(self.rule()?),
                _ => return self.err("a directive or a rule `name:`"),
            }
        }
        Ok(doc)
    }

    fn rule(&mut self) -> Result<RuleAst, RuleError> {
        let line = self.line();
        let (name, _) = self.pname("a rule name")?;
        let head = self.pname("a vocabulary term `prefix:Name`")?;
        self.expect(Tok::LParen)?;
        let mut head_args = vec![self.ident("a variable")?];
        while self.eat(&Tok::Comma) {
            head_args.push(self.ident("a variable")?);
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Arrow)?;
        let mut body = Vec::new();
        loop {
            let l = self.line();
            body.push((self.literal()?, l));
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(Tok::Dot)?;
            break;
        }
        Ok(RuleAst {
            name,
            line,
            head,
            head_args,
            body,
        })
    }

    fn literal(&mut self) -> Result<BodyLit, RuleError> {
        if self.eat(&Tok::LParen) {
            let proj = self.proj()?;
            let op = match self.peek() {
                Some(Tok::Op(op)) => *op,
                _ => return self.err("a comparison operator"),
            };
            self.pos += 1;
            let value = match self.peek() {
                Some(Tok::Int(i)) => Const::Int(*i),
                Some(Tok::Str(s)) => Const::Str(s.clone()),
                _ => return self.err("a constant"),
            };
            self.pos += 1;
            self.expect(Tok::RParen)?;
            return Ok(BodyLit::Selection { proj, op, value });
        }
        let name = self.ident("a body literal")?;
        self.expect(Tok::LParen)?;
        let lit = match name.as_str() {
            "hasURI" => {
                let (prefix, local) = self.pname("a namespace prefix `p:`")?;
                if !local.is_empty() {
                    self.pos -= 1;
                    return self.err("a namespace prefix ending in `:`");
                }
                self.expect(Tok::Comma)?;
                let attrs = if self.eat(&Tok::LBracket) {
                    let mut v = vec![self.proj()?];
                    while self.eat(&Tok::Comma) {
                        v.push(self.proj()?);
                    }
                    self.expect(Tok::RBracket)?;
                    v
                } else {
                    vec![self.proj()?]
                };
                self.expect(Tok::Comma)?;
                let var = self.ident("a variable")?;
                BodyLit::HasUri { prefix, attrs, var }
            }
            "nonNull" => BodyLit::NonNull(self.proj()?),
            "RDFLiteral" => {
                let value = match self.peek() {
                    Some(Tok::Ident(_)) => {
                        let func = self.ident("a function name")?;
                        self.expect(Tok::LParen)?;
                        let mut args = vec![self.proj()?];
                        while self.eat(&Tok::Comma) {
                            args.push(self.proj()?);
                        }
                        self.expect(Tok::RParen)?;
                        ValueExpr::Call { func, args }
                    }
                    _ => ValueExpr::Proj(self.proj()?),
                };
                self.expect(Tok::Comma)?;
                let label = if matches!(self.peek(), Some(Tok::Str(_))) {
                    let attr = self.string()?;
                    self.expect(Tok::Comma)?;
                    let rel = self.string()?;
                    self.expect(Tok::Comma)?;
                    Some((attr, rel))
                } else {
                    None
                };
                let var = self.ident("a variable")?;
                BodyLit::RdfLiteral { value, label, var }
            }
            _ => {
                let mut args = vec![self.ident("a variable")?];
                while self.eat(&Tok::Comma) {
                    args.push(self.ident("a variable")?);
                }
                BodyLit::Atom { name, args }
            }
        };
        self.expect(Tok::RParen)?;
        Ok(lit)
    }
}

pub(crate) fn parse_document(text: &str) -> Result<Document, RuleError> {
    let toks = tokenize(text)?;
    let lines = text.split('\n').count();
    let last = text.rsplit('\n').next().unwrap_or("").chars().count();
    let mut p = Parser {
        toks,
        pos: 0,
        eof: (lines, last + 1),
    };
    p.document()
}
