//! Choreography terms, actions and structural queries.

mod parse;
mod print;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use parse::{parse, ParseError, ParseErrorKind};

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            /// Returns `None` unless `name` matches `[A-Za-z][A-Za-z0-9_]*`.
            pub fn new(name: impl Into<String>) -> Option<Self> {
                let name = name.into();
                is_identifier(&name).then_some(Self(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl TryFrom<String> for $name {
            type Error = String;

            fn try_from(value: String) -> Result<Self, Self::Error> {
                Self::new(value.clone()).ok_or_else(|| format!("invalid identifier `{value}`"))
            }
        }

        impl From<$name> for String {
            fn from(value: $name) -> String {
                value.0
            }
        }
    };
}

name_type!(
    /// A named agent taking part in a choreography.
    Participant
);
name_type!(
    /// The type of a message exchanged between two participants.
    MessageType
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    Send,
    #[serde(rename = "recv")]
    Receive,
}

/// A send `ab!x` or a receive `ab?x`.
///
/// Serializes as `{"kind": "send"|"recv", "from": .., "to": .., "msg": ..}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Action {
    pub kind: ActionKind,
    pub from: Participant,
    pub to: Participant,
    pub msg: MessageType,
}

impl Action {
    pub fn send(from: Participant, to: Participant, msg: MessageType) -> Self {
        Action { kind: ActionKind::Send, from, to, msg }
    }

    pub fn receive(from: Participant, to: Participant, msg: MessageType) -> Self {
        Action { kind: ActionKind::Receive, from, to, msg }
    }

    /// The active participant: the sender of a send, the receiver of a receive.
    pub fn subject(&self) -> &Participant {
        match self.kind {
            ActionKind::Send => &self.from,
            ActionKind::Receive => &self.to,
        }
    }

    /// Parses the compact notation produced by `Display`: `ab!x`, `ab?x`, or
    /// `m w1!t` when a participant name is longer than one character.
    pub fn parse_label(text: &str) -> Option<Action> {
        let text = text.trim();
        let (split, kind) = match (text.find('!'), text.find('?')) {
            (Some(i), None) => (i, ActionKind::Send),
            (None, Some(i)) => (i, ActionKind::Receive),
            _ => return None,
        };
        let (pair, msg) = (text[..split].trim(), text[split + 1..].trim());
        let (from, to) = match pair.split_once(char::is_whitespace) {
            Some((a, b)) => (a.trim(), b.trim()),
            None if pair.chars().count() == 2 => pair.split_at(1),
            None => return None,
        };
        let action = Action {
            kind,
            from: Participant::new(from)?,
            to: Participant::new(to)?,
            msg: MessageType::new(msg)?,
        };
        (action.from != action.to).then_some(action)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.from.0.len() == 1 && self.to.0.len() == 1 { "" } else { " " };
        let mark = match self.kind {
            ActionKind::Send => '!',
            ActionKind::Receive => '?',
        };
        write!(f, "{}{}{}{}{}", self.from, sep, self.to, mark, self.msg)
    }
}

/// A choreography term.
///
/// Equality is plain tree equality: `0 ; c` and `c` are different terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Choreography {
    Skip,
    Interaction { from: Participant, to: Participant, msg: MessageType },
    /// A receive whose matching send already happened. Internal syntax.
    PendingReceive { from: Participant, to: Participant, msg: MessageType },
    Seq(Box<Choreography>, Box<Choreography>),
    Choice(Box<Choreography>, Box<Choreography>),
    Par(Box<Choreography>, Box<Choreography>),
    Loop(Box<Choreography>),
}

impl Choreography {
    /// Builds `from->to:msg`. Panics on invalid names or `from == to`; meant
    /// for fixtures and tests.
    pub fn interaction(from: &str, to: &str, msg: &str) -> Self {
        let (from, to, msg) = names(from, to, msg);
        Choreography::Interaction { from, to, msg }
    }

    /// Builds the pending receive `from to?msg`. Panics like [`Self::interaction`].
    pub fn pending(from: &str, to: &str, msg: &str) -> Self {
        let (from, to, msg) = names(from, to, msg);
        Choreography::PendingReceive { from, to, msg }
    }

    pub fn seq(left: Choreography, right: Choreography) -> Self {
        Choreography::Seq(Box::new(left), Box::new(right))
    }

    pub fn choice(left: Choreography, right: Choreography) -> Self {
        Choreography::Choice(Box::new(left), Box::new(right))
    }

    pub fn par(left: Choreography, right: Choreography) -> Self {
        Choreography::Par(Box::new(left), Box::new(right))
    }

    pub fn star(body: Choreography) -> Self {
        Choreography::Loop(Box::new(body))
    }

    /// All participants occurring in any atom.
    pub fn participants(&self) -> BTreeSet<Participant> {
        let mut out = BTreeSet::new();
        self.collect_participants(&mut out);
        out
    }

    fn collect_participants(&self, out: &mut BTreeSet<Participant>) {
        match self {
            Choreography::Skip => {}
            Choreography::Interaction { from, to, .. } | Choreography::PendingReceive { from, to, .. } => {
                out.insert(from.clone());
                out.insert(to.clone());
            }
            Choreography::Seq(l, r) | Choreography::Choice(l, r) | Choreography::Par(l, r) => {
                l.collect_participants(out);
                r.collect_participants(out);
            }
            Choreography::Loop(body) => body.collect_participants(out),
        }
    }

    pub fn contains_loop(&self) -> bool {
        match self {
            Choreography::Loop(_) => true,
            Choreography::Seq(l, r) | Choreography::Choice(l, r) | Choreography::Par(l, r) => {
                l.contains_loop() || r.contains_loop()
            }
            _ => false,
        }
    }

    pub fn interaction_count(&self) -> usize {
        match self {
            Choreography::Interaction { .. } => 1,
            Choreography::Seq(l, r) | Choreography::Choice(l, r) | Choreography::Par(l, r) => {
                l.interaction_count() + r.interaction_count()
            }
            Choreography::Loop(body) => body.interaction_count(),
            _ => 0,
        }
    }

    pub fn pending_count(&self) -> usize {
        match self {
            Choreography::PendingReceive { .. } => 1,
            Choreography::Seq(l, r) | Choreography::Choice(l, r) | Choreography::Par(l, r) => {
                l.pending_count() + r.pending_count()
            }
            Choreography::Loop(body) => body.pending_count(),
            _ => 0,
        }
    }

    /// Every `Loop` subterm, outermost first.
    pub fn loops(&self) -> Vec<&Choreography> {
        let mut out = Vec::new();
        self.collect_loops(&mut out);
        out
    }

    fn collect_loops<'a>(&'a self, out: &mut Vec<&'a Choreography>) {
        match self {
            Choreography::Loop(body) => {
                out.push(self);
                body.collect_loops(out);
            }
            Choreography::Seq(l, r) | Choreography::Choice(l, r) | Choreography::Par(l, r) => {
                l.collect_loops(out);
                r.collect_loops(out);
            }
            _ => {}
        }
    }

    /// Indented one-node-per-line dump of the syntax tree.
    pub fn tree_dump(&self) -> String {
        let mut out = String::new();
        self.dump_into(0, &mut out);
        out
    }

    fn dump_into(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        let (head, kids): (String, Vec<&Choreography>) = match self {
            Choreography::Skip => ("Skip".into(), vec![]),
            Choreography::Interaction { from, to, msg } => (format!("Interaction {from}->{to}:{msg}"), vec![]),
            Choreography::PendingReceive { from, to, msg } => (format!("PendingReceive {from} {to}?{msg}"), vec![]),
            Choreography::Seq(l, r) => ("Seq".into(), vec![l, r]),
            Choreography::Choice(l, r) => ("Choice".into(), vec![l, r]),
            Choreography::Par(l, r) => ("Par".into(), vec![l, r]),
            Choreography::Loop(b) => ("Loop".into(), vec![b]),
        };
        out.push_str(&pad);
        out.push_str(&head);
        out.push('\n');
        for kid in kids {
            kid.dump_into(depth + 1, out);
        }
    }
}

fn names(from: &str, to: &str, msg: &str) -> (Participant, Participant, MessageType) {
    assert_ne!(from, to, "self-communication {from}->{to}");
    (
        Participant::new(from).expect("participant name"),
        Participant::new(to).expect("participant name"),
        MessageType::new(msg).expect("message type name"),
    )
}
