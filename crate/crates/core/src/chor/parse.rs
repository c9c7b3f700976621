//! Recursive-descent parser for the concrete choreography syntax.
//!
//! ```text
//! chor   := choice ;
//! choice := par ( "+" par )* ;
//! par    := seq ( "||" seq )* ;
//! seq    := star ( ";" star )* ;
//! star   := atom ( "*" )* ;
//! atom   := "0" | ident "->" ident ":" ident | ident ident "?" ident | "(" chor ")" ;
//! ```
//!
//! Binary operators are left-associative. `//` starts a line comment.

use std::fmt;

use thiserror::Error;

use super::{Choreography, MessageType, Participant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected {found}, expected one of: {}", expected.join(", "))]
    UnexpectedToken { found: String, expected: Vec<String> },
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("pending receive `{0}` is internal syntax and not allowed here")]
    PendingNotAllowed(String),
    #[error("participant `{0}` communicates with itself")]
    SelfCommunication(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Zero,
    Ident(String),
    Arrow,
    Colon,
    Query,
    LParen,
    RParen,
    Star,
    Semi,
    Bar,
    Plus,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Zero => f.write_str("`0`"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Query => f.write_str("`?`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Bar => f.write_str("`||`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn advance(n: usize, i: &mut usize, column: &mut usize) {
    *i += n;
    *column += n;
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    let err = |line, column, kind| ParseError { line, column, kind };
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                column = 1;
                continue;
            }
            c if c.is_whitespace() => {
                advance(1, &mut i, &mut column);
                continue;
            }
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    advance(1, &mut i, &mut column);
                }
                continue;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                advance(2, &mut i, &mut column);
                Tok::Arrow
            }
            '|' if chars.get(i + 1) == Some(&'|') => {
                advance(2, &mut i, &mut column);
                Tok::Bar
            }
            '0' if !chars.get(i + 1).is_some_and(|n| n.is_ascii_alphanumeric() || *n == '_') => {
                advance(1, &mut i, &mut column);
                Tok::Zero
            }
            ':' | '?' | '(' | ')' | '*' | ';' | '+' => {
                advance(1, &mut i, &mut column);
                match c {
                    ':' => Tok::Colon,
                    '?' => Tok::Query,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '*' => Tok::Star,
                    ';' => Tok::Semi,
                    _ => Tok::Plus,
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    name.push(chars[i]);
                    advance(1, &mut i, &mut column);
                }
                Tok::Ident(name)
            }
            other => return Err(err(start_line, start_col, ParseErrorKind::UnexpectedChar(other))),
        };
        out.push(Spanned { tok, line: start_line, column: start_col });
    }
    out.push(Spanned { tok: Tok::Eof, line, column });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    allow_pending: bool,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError {
            line: t.line,
            column: t.column,
            kind: ParseErrorKind::UnexpectedToken {
                found: t.tok.to_string(),
                expected: expected.iter().map(|s| s.to_string()).collect(),
            },
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Spanned, ParseError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[&tok.to_string()]))
        }
    }

    fn ident(&mut self) -> Result<(String, Spanned), ParseError> {
        match &self.peek().tok {
            Tok::Ident(name) => {
                let name = name.clone();
                Ok((name, self.bump()))
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn choice(&mut self) -> Result<Choreography, ParseError> {
        let mut left = self.par()?;
        while self.peek().tok == Tok::Plus {
            self.bump();
            left = Choreography::choice(left, self.par()?);
        }
        Ok(left)
    }

    fn par(&mut self) -> Result<Choreography, ParseError> {
        let mut left = self.seq()?;
        while self.peek().tok == Tok::Bar {
            self.bump();
            left = Choreography::par(left, self.seq()?);
        }
        Ok(left)
    }

    fn seq(&mut self) -> Result<Choreography, ParseError> {
        let mut left = self.star()?;
        while self.peek().tok == Tok::Semi {
            self.bump();
            left = Choreography::seq(left, self.star()?);
        }
        Ok(left)
    }

    fn star(&mut self) -> Result<Choreography, ParseError> {
        let mut inner = self.atom()?;
        while self.peek().tok == Tok::Star {
            self.bump();
            inner = Choreography::star(inner);
        }
        Ok(inner)
    }

    fn atom(&mut self) -> Result<Choreography, ParseError> {
        match self.peek().tok {
            Tok::Zero => {
                self.bump();
                Ok(Choreography::Skip)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.choice()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(_) => {
                let (from, start) = self.ident()?;
                match self.peek().tok {
                    Tok::Arrow => {
                        self.bump();
                        let (to, _) = self.ident()?;
                        self.expect(Tok::Colon)?;
                        let (msg, _) = self.ident()?;
                        let (from, to, msg) = checked_names(from, to, msg, &start)?;
                        Ok(Choreography::Interaction { from, to, msg })
                    }
                    Tok::Ident(_) => {
                        let (to, _) = self.ident()?;
                        self.expect(Tok::Query)?;
                        let (msg, _) = self.ident()?;
                        if !self.allow_pending {
                            return Err(ParseError {
                                line: start.line,
                                column: start.column,
                                kind: ParseErrorKind::PendingNotAllowed(format!("{from} {to}?{msg}")),
                            });
                        }
                        let (from, to, msg) = checked_names(from, to, msg, &start)?;
                        Ok(Choreography::PendingReceive { from, to, msg })
                    }
                    _ => Err(self.unexpected(&["`->`", "identifier"])),
                }
            }
            _ => Err(self.unexpected(&["`0`", "identifier", "`(`"])),
        }
    }
}

fn checked_names(
    from: String,
    to: String,
    msg: String,
    at: &Spanned,
) -> Result<(Participant, Participant, MessageType), ParseError> {
    if from == to {
        return Err(ParseError {
            line: at.line,
            column: at.column,
            kind: ParseErrorKind::SelfCommunication(from),
        });
    }
    // The lexer only produces well-formed identifiers.
    Ok((
        Participant::new(from).expect("lexed identifier"),
        Participant::new(to).expect("lexed identifier"),
        MessageType::new(msg).expect("lexed identifier"),
    ))
}

/// Parses a choreography. Pending receives `a b?x` are accepted only when
/// `allow_pending` is set.
pub fn parse(text: &str, allow_pending: bool) -> Result<Choreography, ParseError> {
    let mut parser = Parser { toks: lex(text)?, pos: 0, allow_pending };
    let c = parser.choice()?;
    if parser.peek().tok != Tok::Eof {
        return Err(parser.unexpected(&["`+`", "`||`", "`;`", "`*`", "end of input"]));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chor::Choreography as C;

    #[test]
    fn single_interaction() {
        assert_eq!(parse("a->b:x", false).unwrap(), C::interaction("a", "b", "x"));
        assert_eq!(parse("0", false).unwrap(), C::Skip);
    }

    #[test]
    fn master_workers() {
        let c = parse("(m->w1:t ; w1->m:d) || (m->w2:t ; w2->m:d)", false).unwrap();
        let thread = |w| C::seq(C::interaction("m", w, "t"), C::interaction(w, "m", "d"));
        assert_eq!(c, C::par(thread("w1"), thread("w2")));
    }

    #[test]
    fn precedence_and_associativity() {
        let c = parse("a->b:x ; b->a:x* || c->d:x + 0", false).unwrap();
        let expected = C::choice(
            C::par(
                C::seq(C::interaction("a", "b", "x"), C::star(C::interaction("b", "a", "x"))),
                C::interaction("c", "d", "x"),
            ),
            C::Skip,
        );
        assert_eq!(c, expected);
        let c = parse("0 ; 0 ; 0", false).unwrap();
        assert_eq!(c, C::seq(C::seq(C::Skip, C::Skip), C::Skip));
        assert_eq!(parse("0**", false).unwrap(), C::star(C::star(C::Skip)));
    }

    #[test]
    fn comments_and_whitespace() {
        let c = parse("// header\n a -> b : x // trailing\n", false).unwrap();
        assert_eq!(c, C::interaction("a", "b", "x"));
    }

    #[test]
    fn pending_receive_behind_flag() {
        assert_eq!(parse("a b?x", true).unwrap(), C::pending("a", "b", "x"));
        let err = parse("a b?x", false).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::PendingNotAllowed(_)));
        assert_eq!((err.line, err.column), (1, 1));
    }

    #[test]
    fn self_communication() {
        let err = parse("b->c:x ;\n  a->a:x", false).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::SelfCommunication("a".into()));
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn reports_expected_tokens() {
        let err = parse("a->b:x ;", false).unwrap_err();
        match err.kind {
            ParseErrorKind::UnexpectedToken { found, expected } => {
                assert_eq!(found, "end of input");
                assert!(expected.contains(&"`(`".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("(a->b:x", false).is_err());
        assert!(parse("a->b:x )", false).is_err());
        let err = parse("a->b:x & 0", false).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('&'));
        assert_eq!(err.column, 8);
    }
}
