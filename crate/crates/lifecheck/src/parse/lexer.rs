//! Tokenizer for the analyzed source subset.

use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `'a`, `'static` or `'_` (stored without the quote).
    Lifetime(String),
    Int(String),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Comma,
    Colon,
    PathSep,
    Semi,
    Arrow,
    Amp,
    Star,
    Eq,
    Dot,
    DotDot,
    Plus,
    Pipe,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{}`", s),
            Tok::Lifetime(s) => write!(f, "`'{}`", s),
            Tok::Int(s) => write!(f, "`{}`", s),
            Tok::Str(_) => write!(f, "string literal"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::Lt => write!(f, "`<`"),
            Tok::Gt => write!(f, "`>`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::PathSep => write!(f, "`::`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Amp => write!(f, "`&`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::DotDot => write!(f, "`..`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Pipe => write!(f, "`|`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

pub fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = source.chars().collect();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! push {
        ($tok:expr, $len:expr) => {{
            tokens.push(Token {
                tok: $tok,
                line,
                col,
            });
            i += $len;
            col += $len as u32;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '/' if next == Some('/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if next == Some('*') => {
                i += 2;
                col += 2;
                while i < chars.len() {
                    if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                        i += 2;
                        col += 2;
                        break;
                    }
                    if chars[i] == '\n' {
                        line += 1;
                        col = 1;
                    } else {
                        col += 1;
                    }
                    i += 1;
                }
            }
            '\'' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                if j == start {
                    return Err(ParseError {
                        line,
                        col,
                        message: "expected a lifetime name after `'`".into(),
                    });
                }
                let name: String = chars[start..j].iter().collect();
                push!(Tok::Lifetime(name), j - i);
            }
            '"' => {
                let mut j = i + 1;
                let mut s = String::new();
                while j < chars.len() && chars[j] != '"' {
                    if chars[j] == '\\' {
                        j += 1;
                    }
                    if j < chars.len() {
                        s.push(chars[j]);
                    }
                    j += 1;
                }
                if j >= chars.len() {
                    return Err(ParseError {
                        line,
                        col,
                        message: "unterminated string literal".into(),
                    });
                }
                push!(Tok::Str(s), j + 1 - i);
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len()
                    && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '.')
                {
                    // Avoid swallowing a `..` or a method call after an int.
                    if chars[j] == '.'
                        && !chars.get(j + 1).map_or(false, |c| c.is_ascii_digit())
                    {
                        break;
                    }
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                push!(Tok::Int(text), j - i);
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                push!(Tok::Ident(text), j - i);
            }
            '-' if next == Some('>') => push!(Tok::Arrow, 2),
            ':' if next == Some(':') => push!(Tok::PathSep, 2),
            '.' if next == Some('.') => push!(Tok::DotDot, 2),
            '(' => push!(Tok::LParen, 1),
            ')' => push!(Tok::RParen, 1),
            '{' => push!(Tok::LBrace, 1),
            '}' => push!(Tok::RBrace, 1),
            '[' => push!(Tok::LBracket, 1),
            ']' => push!(Tok::RBracket, 1),
            '<' => push!(Tok::Lt, 1),
            '>' => push!(Tok::Gt, 1),
            ',' => push!(Tok::Comma, 1),
            ':' => push!(Tok::Colon, 1),
            ';' => push!(Tok::Semi, 1),
            '&' => push!(Tok::Amp, 1),
            '*' => push!(Tok::Star, 1),
            '=' => push!(Tok::Eq, 1),
            '.' => push!(Tok::Dot, 1),
            '+' => push!(Tok::Plus, 1),
            '|' => push!(Tok::Pipe, 1),
            other => {
                return Err(ParseError {
                    line,
                    col,
                    message: format!("unexpected character `{}`", other),
                });
            }
        }
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_a_signature() {
        let toks = lex("fn bar<'a>(x: &'a mut i32) -> Foo<'a>").unwrap();
        let kinds: Vec<&Tok> = toks.iter().map(|t| &t.tok).collect();
        assert!(matches!(kinds[0], Tok::Ident(s) if s == "fn"));
        assert!(kinds.contains(&&Tok::Lifetime("a".into())));
        assert!(kinds.contains(&&Tok::Arrow));
    }

    #[test]
    fn tracks_lines() {
        let toks = lex("struct Foo {\n    x: i32,\n}\nfn bar() {}").unwrap();
        let fn_tok = toks
            .iter()
            .find(|t| t.tok == Tok::Ident("fn".into()))
            .unwrap();
        assert_eq!(fn_tok.line, 4);
    }

    #[test]
    fn underscore_lifetime() {
        let toks = lex("&'_ self").unwrap();
        assert_eq!(toks[1].tok, Tok::Lifetime("_".into()));
    }

    #[test]
    fn comments_are_skipped() {
        let toks = lex("// line\n/* block\nstill */ fn").unwrap();
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].line, 3);
    }
}
