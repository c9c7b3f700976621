use std::fmt;

use super::Choreography;

// Binding strength, loosest first.
const CHOICE: u8 = 1;
const PAR: u8 = 2;
const SEQ: u8 = 3;
const ATOM: u8 = 4;

fn precedence(c: &Choreography) -> u8 {
    match c {
        Choreography::Choice(..) => CHOICE,
        Choreography::Par(..) => PAR,
        Choreography::Seq(..) => SEQ,
        _ => ATOM,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, c: &Choreography, min: u8) -> fmt::Result {
    if precedence(c) < min {
        write!(f, "({c})")
    } else {
        write!(f, "{c}")
    }
}

fn write_binary(f: &mut fmt::Formatter<'_>, op: &str, prec: u8, l: &Choreography, r: &Choreography) -> fmt::Result {
    write_at(f, l, prec)?;
    write!(f, " {op} ")?;
    write_at(f, r, prec + 1)
}

/// Prints with the fewest parentheses that parse back to the same tree.
/// Loop bodies are always parenthesised: `(b->a:y)*`.
impl fmt::Display for Choreography {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Choreography::Skip => f.write_str("0"),
            Choreography::Interaction { from, to, msg } => write!(f, "{from}->{to}:{msg}"),
            Choreography::PendingReceive { from, to, msg } => write!(f, "{from} {to}?{msg}"),
            Choreography::Seq(l, r) => write_binary(f, ";", SEQ, l, r),
            Choreography::Par(l, r) => write_binary(f, "||", PAR, l, r),
            Choreography::Choice(l, r) => write_binary(f, "+", CHOICE, l, r),
            Choreography::Loop(body) => write!(f, "({body})*"),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::chor::{parse, Choreography as C};

    #[test]
    fn golden_prints() {
        assert_eq!(C::Skip.to_string(), "0");
        let c = C::seq(C::interaction("a", "b", "x"), C::star(C::interaction("b", "a", "y")));
        assert_eq!(c.to_string(), "a->b:x ; (b->a:y)*");
        let c = C::choice(C::interaction("a", "b", "x"), C::interaction("a", "c", "x"));
        assert_eq!(c.to_string(), "a->b:x + a->c:x");
        assert_eq!(C::pending("a", "b", "x").to_string(), "a b?x");
    }

    #[test]
    fn parenthesises_right_nesting() {
        let c = C::seq(C::Skip, C::seq(C::Skip, C::Skip));
        assert_eq!(c.to_string(), "0 ; (0 ; 0)");
        let c = C::seq(C::choice(C::Skip, C::Skip), C::Skip);
        assert_eq!(c.to_string(), "(0 + 0) ; 0");
        let c = C::star(C::star(C::choice(C::interaction("a", "b", "x"), C::interaction("b", "a", "x"))));
        assert_eq!(c.to_string(), "((a->b:x + b->a:x)*)*");
        assert_eq!(parse(&c.to_string(), false).unwrap(), c);
    }
}
