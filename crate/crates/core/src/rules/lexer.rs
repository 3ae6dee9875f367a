use super::RuleError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// `prefix:local`, where `local` may be empty.
    PName(String, String),
    /// `var.attr` written without spaces.
    Proj(String, String),
    Directive(String),
    IriRef(String),
    Str(String),
    Int(i64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Arrow,
    Op(CmpOp),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn local_char(c: char) -> bool {
    ident_char(c) || c == '-'
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, RuleError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, message: String| RuleError::Syntax { line, col, message };

    while i < chars.len() {
        let c = chars[i];
        let (l, cl) = (line, col);
        let at = |k: usize| chars.get(i + k).copied();
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = match c {
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '[' => {
                i += 1;
                Tok::LBracket
            }
            ']' => {
                i += 1;
                Tok::RBracket
            }
            ',' => {
                i += 1;
                Tok::Comma
            }
            '.' => {
                i += 1;
                Tok::Dot
            }
            '=' => {
                i += 1;
                Tok::Op(CmpOp::Eq)
            }
            '≠' => {
                i += 1;
                Tok::Op(CmpOp::Ne)
            }
            '≤' => {
                i += 1;
                Tok::Op(CmpOp::Le)
            }
            '≥' => {
                i += 1;
                Tok::Op(CmpOp::Ge)
            }
            '←' => {
                i += 1;
                Tok::Arrow
            }
            '!' if at(1) == Some('=') => {
                i += 2;
                Tok::Op(CmpOp::Ne)
            }
            '>' if at(1) == Some('=') => {
                i += 2;
                Tok::Op(CmpOp::Ge)
            }
            '>' => {
                i += 1;
                Tok::Op(CmpOp::Gt)
            }
            '<' if at(1) == Some('-') => {
                i += 2;
                Tok::Arrow
            }
            '<' if at(1) == Some('=') => {
                i += 2;
                Tok::Op(CmpOp::Le)
            }
            '<' => {
                let close = chars[i + 1..]
                    .iter()
                    .take_while(|c| !c.is_whitespace())
                    .position(|&c| c == '>');
                match close {
                    Some(n) if n > 0 => {
                        let iri: String = chars[i + 1..i + 1 + n].iter().collect();
                        i += n + 2;
                        Tok::IriRef(iri)
                    }
                    _ => {
                        i += 1;
                        Tok::Op(CmpOp::Lt)
                    }
                }
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None | Some('\n') => return Err(err(l, cl, "unterminated string".into())),
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            let e = match chars.get(i + 1) {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                other => {
                                    return Err(err(
                                        l,
                                        col + (i - start),
                                        format!(
                                            "unknown escape `\\{}`",
                                            other.copied().unwrap_or(' ')
                                        ),
                                    ))
                                }
                            };
                            s.push(e);
                            i += 2;
                        }
                        Some(&c) => {
                            s.push(c);
                            i += 1;
                        }
                    }
                }
                Tok::Str(s)
            }
            '@' => {
                i += 1;
                while i < chars.len() && ident_char(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start + 1..i].iter().collect();
                if word.is_empty() {
                    return Err(err(l, cl, "expected directive name after `@`".into()));
                }
                Tok::Directive(word)
            }
            c if c == '-' || c.is_ascii_digit() => {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                match s.parse::<i64>() {
                    Ok(n) => Tok::Int(n),
                    Err(_) => return Err(err(l, cl, format!("invalid integer `{s}`"))),
                }
            }
            c if ident_start(c) => {
                while i < chars.len() && ident_char(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if chars.get(i) == Some(&':') {
                    i += 1;
                    let ls = i;
                    while i < chars.len() && local_char(chars[i]) {
                        i += 1;
                    }
                    Tok::PName(word, chars[ls..i].iter().collect())
                } else if chars.get(i) == Some(&'.')
                    && chars.get(i + 1).is_some_and(|&c| ident_start(c))
                {
                    i += 1;
                    let as_ = i;
                    while i < chars.len() && ident_char(chars[i]) {
                        i += 1;
                    }
                    Tok::Proj(word, chars[as_..i].iter().collect())
                } else {
                    Tok::Ident(word)
                }
            }
            other => return Err(err(l, cl, format!("unexpected character `{other}`"))),
        };
        col += i - start;
        out.push(Token {
            tok,
            line: l,
            col: cl,
        });
    }
    Ok(out)
}
