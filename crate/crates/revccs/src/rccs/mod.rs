//! Reversible CCS: threads carrying memory stacks, the forward and backward
//! transition system, origins, state-space exploration and trace causality.

mod explore;
mod lts;
mod normal;
mod trace;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::lex::{Cursor, Tok};
use crate::syntax::{parse_label, parse_proc, parse_sum_level, Ccs, Label, Name, ParseError};

pub use explore::{explore, explore_from, explore_with_cap, Edge, LtsGraph, DEFAULT_STATE_CAP};
pub use lts::{backward_transitions, forward_transitions, is_reachable, origin, Direction, Transition};
pub use normal::{rccs_congruent, State, Thread};
pub use trace::{concurrent_transitions, diamond_complete, direct_cause, touched_memories};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RccsError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("incoherent memory: {0}")]
    Incoherent(String),
    #[error("memory alternative must be a sum of prefixed terms, found `{0}`")]
    BadAlternative(String),
    #[error("state cap of {0} states exceeded")]
    StateCap(usize),
    #[error("transitions are not coinitial (or cofinal)")]
    NotCoinitial,
    #[error("transitions are not concurrent")]
    NotConcurrent,
    #[error("trace index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("invalid trace: {0}")]
    BadTrace(String),
    #[error("invalid move: {0}")]
    BadMove(String),
}

/// `⟨i, λ, Q⟩`: identifier, performed action and the discarded alternative.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MemEvent {
    pub id: u32,
    pub label: Label,
    pub alt: Ccs,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MemItem {
    Fork,
    Event(MemEvent),
}

/// A memory stack, stored oldest item first; the empty stack is `∅`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Memory(pub Vec<MemItem>);

impl Memory {
    pub fn empty() -> Memory {
        Memory(Vec::new())
    }

    pub fn top(&self) -> Option<&MemItem> {
        self.0.last()
    }

    pub fn push_event(&self, id: u32, label: Label, alt: Ccs) -> Memory {
        let mut m = self.clone();
        m.0.push(MemItem::Event(MemEvent { id, label, alt }));
        m
    }

    /// Pushes a fork marker unless one is already on top.
    pub fn push_fork(&self) -> Memory {
        let mut m = self.clone();
        if m.top() != Some(&MemItem::Fork) {
            m.0.push(MemItem::Fork);
        }
        m
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().filter_map(|it| match it {
            MemItem::Event(e) => Some(e.id),
            MemItem::Fork => None,
        })
    }

    pub fn events(&self) -> impl Iterator<Item = &MemEvent> + '_ {
        self.0.iter().filter_map(|it| match it {
            MemItem::Event(e) => Some(e),
            MemItem::Fork => None,
        })
    }

    /// True when `self` is a strict bottom segment of `other`.
    pub fn is_strict_prefix_of(&self, other: &Memory) -> bool {
        self.0.len() < other.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn names(&self, out: &mut BTreeSet<Name>) {
        for e in self.events() {
            if let Some(n) = e.label.name() {
                out.insert(n.clone());
            }
            e.alt.all_names(out);
        }
    }
}

impl fmt::Display for Memory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for it in self.0.iter().rev() {
            match it {
                MemItem::Fork => f.write_str("Y.")?,
                MemItem::Event(e) => match e.alt {
                    Ccs::Sum(_) => write!(f, "<{},{},{}>.", e.id, e.label, e.alt)?,
                    _ => write!(f, "<{},{},({})>.", e.id, e.label, e.alt)?,
                },
            }
        }
        f.write_str("{}")
    }
}

impl Serialize for Memory {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// An RCCS term as written: threads `m ▷ P`, parallel composition and restriction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RccsProcess {
    Thread(Memory, Ccs),
    Par(Box<RccsProcess>, Box<RccsProcess>),
    Restrict(Box<RccsProcess>, Name),
}

impl RccsProcess {
    /// `∅ ▷ p`
    pub fn initial(p: Ccs) -> RccsProcess {
        RccsProcess::Thread(Memory::empty(), p)
    }

    pub fn par(l: RccsProcess, r: RccsProcess) -> RccsProcess {
        RccsProcess::Par(Box::new(l), Box::new(r))
    }

    pub fn restrict(r: RccsProcess, a: impl Into<Name>) -> RccsProcess {
        RccsProcess::Restrict(Box::new(r), a.into())
    }
}

impl fmt::Display for RccsProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RccsProcess::Thread(m, p) => match p {
                Ccs::Par(..) => write!(f, "{m} |> ({p})"),
                _ => write!(f, "{m} |> {p}"),
            },
            RccsProcess::Par(l, r) => {
                write!(f, "{l} | ")?;
                match **r {
                    RccsProcess::Par(..) => write!(f, "({r})"),
                    _ => write!(f, "{r}"),
                }
            }
            RccsProcess::Restrict(r, a) => match **r {
                RccsProcess::Restrict(..) => write!(f, "{r} \\ {a}"),
                _ => write!(f, "({r}) \\ {a}"),
            },
        }
    }
}

/// Reads an RCCS term. Text without any `|>` is read as a CCS term `P` and
/// yields `∅ ▷ P`.
///
/// ```text
/// (<2,a,0>.Y.{} |> b) | (<1,c,0>.Y.{} |> 0)
/// ```
pub fn parse_rccs(text: &str) -> Result<RccsProcess, ParseError> {
    let mut cur = Cursor::new(text)?;
    let has_thread = {
        let mut k = 0;
        loop {
            match cur.peek_at(k) {
                Tok::Triangle => break true,
                Tok::Eof => break false,
                _ => k += 1,
            }
        }
    };
    let r = if has_thread {
        parse_rpar(&mut cur)?
    } else {
        RccsProcess::initial(parse_proc(&mut cur)?)
    };
    cur.finish()?;
    Ok(r)
}

fn parse_rpar(cur: &mut Cursor) -> Result<RccsProcess, ParseError> {
    let mut r = parse_runit(cur)?;
    while *cur.peek() == Tok::Bar {
        cur.bump();
        r = RccsProcess::par(r, parse_runit(cur)?);
    }
    Ok(r)
}

fn parse_runit(cur: &mut Cursor) -> Result<RccsProcess, ParseError> {
    let mut r = if *cur.peek() == Tok::LParen {
        cur.bump();
        let r = parse_rpar(cur)?;
        cur.expect(Tok::RParen)?;
        r
    } else {
        let m = parse_memory(cur)?;
        cur.expect(Tok::Triangle)?;
        RccsProcess::Thread(m, parse_sum_level(cur)?)
    };
    while *cur.peek() == Tok::Backslash {
        cur.bump();
        let (line, col) = cur.here();
        match cur.peek().clone() {
            Tok::Name(n) if n != "tau" => {
                cur.bump();
                r = RccsProcess::restrict(r, Name(n));
            }
            other => {
                let found = match other {
                    Tok::Name(n) => n,
                    t => t.describe(),
                };
                return Err(ParseError::RestrictNonName { line, col, found });
            }
        }
    }
    Ok(r)
}

fn parse_memory(cur: &mut Cursor) -> Result<Memory, ParseError> {
    let mut top_first = Vec::new();
    loop {
        match cur.peek() {
            Tok::Fork => {
                cur.bump();
                cur.expect(Tok::Dot)?;
                top_first.push(MemItem::Fork);
            }
            Tok::Lt => {
                cur.bump();
                let id = match cur.bump() {
                    Tok::Num(n) => n,
                    other => return Err(cur.error(format!("expected an identifier, found {}", other.describe()))),
                };
                cur.expect(Tok::Comma)?;
                let (line, col) = cur.here();
                let label = parse_label(cur)?;
                if label.is_tau() {
                    return Err(ParseError::TauPrefix { line, col });
                }
                cur.expect(Tok::Comma)?;
                let alt = parse_proc(cur)?;
                cur.expect(Tok::Gt)?;
                cur.expect(Tok::Dot)?;
                top_first.push(MemItem::Event(MemEvent { id, label, alt }));
            }
            Tok::LBrace => {
                cur.bump();
                cur.expect(Tok::RBrace)?;
                top_first.reverse();
                return Ok(Memory(top_first));
            }
            other => {
                return Err(cur.error(format!("expected a memory item, `Y.` or `{{}}`, found {}", other.describe())))
            }
        }
    }
}
