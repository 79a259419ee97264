//! CCS terms: names, action labels, guarded sums, parallel composition and
//! restriction, with a reader, a printer, and the two term-level equivalences.

mod alpha;
pub(crate) mod lex;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

pub use alpha::{alpha_eq, alpha_normal, ccs_congruent, congruence_normal, rename_free};
pub(crate) use alpha::binder_prefix;
pub use parse::{parse_ccs, parse_term};
pub(crate) use parse::{parse_label, parse_proc, parse_sum_level};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: tau cannot be used as a prefix")]
    TauPrefix { line: usize, col: usize },
    #[error("{line}:{col}: restriction expects a name, found {found}")]
    RestrictNonName { line: usize, col: usize, found: String },
}

/// A channel name: lowercase-initial alphanumeric.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(pub String);

impl Name {
    pub fn new(s: impl Into<String>) -> Self {
        Name(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_valid(s: &str) -> bool {
        let mut cs = s.chars();
        matches!(cs.next(), Some(c) if c.is_ascii_lowercase())
            && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
            && s != "tau"
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    In(Name),
    Out(Name),
    Tau,
}

impl Label {
    pub fn input(n: &str) -> Self {
        Label::In(Name::from(n))
    }

    pub fn output(n: &str) -> Self {
        Label::Out(Name::from(n))
    }

    pub fn complement(&self) -> Label {
        match self {
            Label::In(n) => Label::Out(n.clone()),
            Label::Out(n) => Label::In(n.clone()),
            Label::Tau => Label::Tau,
        }
    }

    pub fn name(&self) -> Option<&Name> {
        match self {
            Label::In(n) | Label::Out(n) => Some(n),
            Label::Tau => None,
        }
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Label::Tau)
    }

    pub(crate) fn map_name(&self, f: impl Fn(&Name) -> Name) -> Label {
        match self {
            Label::In(n) => Label::In(f(n)),
            Label::Out(n) => Label::Out(f(n)),
            Label::Tau => Label::Tau,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::In(n) => write!(f, "{n}"),
            Label::Out(n) => write!(f, "~{n}"),
            Label::Tau => f.write_str("tau"),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A recursion-free CCS process. Summands are kept sorted, so `a + b` and
/// `b + a` are the same value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ccs {
    Sum(Vec<(Label, Ccs)>),
    Par(Box<Ccs>, Box<Ccs>),
    Restrict(Box<Ccs>, Name),
}

impl Ccs {
    pub fn nil() -> Ccs {
        Ccs::Sum(Vec::new())
    }

    pub fn prefix(l: Label, p: Ccs) -> Ccs {
        Ccs::sum(vec![(l, p)])
    }

    /// Builds a guarded sum; panics on a tau prefix.
    pub fn sum(mut summands: Vec<(Label, Ccs)>) -> Ccs {
        assert!(summands.iter().all(|(l, _)| !l.is_tau()), "tau prefix in a sum");
        summands.sort();
        Ccs::Sum(summands)
    }

    pub fn par(p: Ccs, q: Ccs) -> Ccs {
        Ccs::Par(Box::new(p), Box::new(q))
    }

    pub fn restrict(p: Ccs, a: impl Into<Name>) -> Ccs {
        Ccs::Restrict(Box::new(p), a.into())
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Ccs::Sum(s) if s.is_empty())
    }

    /// Number of prefixes occurring in the term.
    pub fn size(&self) -> usize {
        match self {
            Ccs::Sum(s) => s.iter().map(|(_, p)| 1 + p.size()).sum(),
            Ccs::Par(p, q) => p.size() + q.size(),
            Ccs::Restrict(p, _) => p.size(),
        }
    }

    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Ccs::Sum(s) => {
                for (l, p) in s {
                    if let Some(n) = l.name() {
                        if !bound.contains(n) {
                            out.insert(n.clone());
                        }
                    }
                    p.collect_free(bound, out);
                }
            }
            Ccs::Par(p, q) => {
                p.collect_free(bound, out);
                q.collect_free(bound, out);
            }
            Ccs::Restrict(p, a) => {
                bound.push(a.clone());
                p.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every name occurring in the term, bound or free.
    pub fn all_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Ccs::Sum(s) => {
                for (l, p) in s {
                    if let Some(n) = l.name() {
                        out.insert(n.clone());
                    }
                    p.all_names(out);
                }
            }
            Ccs::Par(p, q) => {
                p.all_names(out);
                q.all_names(out);
            }
            Ccs::Restrict(p, a) => {
                out.insert(a.clone());
                p.all_names(out);
            }
        }
    }

    /// Parallel components of a left- or right-nested `|` chain.
    pub fn par_components(&self) -> Vec<&Ccs> {
        let mut out = Vec::new();
        fn go<'a>(p: &'a Ccs, out: &mut Vec<&'a Ccs>) {
            match p {
                Ccs::Par(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                _ => out.push(p),
            }
        }
        go(self, &mut out);
        out
    }

    /// Left-nested parallel composition of the given components (`0` if empty).
    pub fn par_all(mut parts: Vec<Ccs>) -> Ccs {
        if parts.is_empty() {
            return Ccs::nil();
        }
        let first = parts.remove(0);
        parts.into_iter().fold(first, Ccs::par)
    }

    fn fmt_unit(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ccs::Sum(s) if s.len() <= 1 => write!(f, "{self}"),
            Ccs::Restrict(..) => write!(f, "{self}"),
            _ => write!(f, "({self})"),
        }
    }

    fn fmt_summand(l: &Label, p: &Ccs, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{l}")?;
        if !p.is_nil() {
            f.write_str(".")?;
            p.fmt_unit(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for Ccs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ccs::Sum(s) if s.is_empty() => f.write_str("0"),
            Ccs::Sum(s) => {
                for (k, (l, p)) in s.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" + ")?;
                    }
                    Ccs::fmt_summand(l, p, f)?;
                }
                Ok(())
            }
            Ccs::Par(p, q) => {
                write!(f, "{p} | ")?;
                match **q {
                    Ccs::Par(..) => write!(f, "({q})"),
                    _ => write!(f, "{q}"),
                }
            }
            Ccs::Restrict(p, a) => {
                match **p {
                    Ccs::Sum(ref s) if s.is_empty() => f.write_str("0")?,
                    Ccs::Restrict(..) => write!(f, "{p}")?,
                    _ => write!(f, "({p})")?,
                }
                write!(f, " \\ {a}")
            }
        }
    }
}

impl Serialize for Ccs {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A term where `+` may join arbitrary operands. Only terms whose sums are
/// guarded are CCS processes; the others still have a denotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Nil,
    Prefix(Label, Box<Term>),
    Sum(Box<Term>, Box<Term>),
    Par(Box<Term>, Box<Term>),
    Restrict(Box<Term>, Name),
}

impl Term {
    /// The CCS process, when every sum is guarded.
    pub fn to_ccs(&self) -> Option<Ccs> {
        Some(match self {
            Term::Nil => Ccs::nil(),
            Term::Prefix(l, t) => Ccs::prefix(l.clone(), t.to_ccs()?),
            Term::Sum(l, r) => match (l.to_ccs()?, r.to_ccs()?) {
                (Ccs::Sum(mut a), Ccs::Sum(b)) if !a.is_empty() && !b.is_empty() => {
                    a.extend(b);
                    Ccs::sum(a)
                }
                _ => return None,
            },
            Term::Par(l, r) => Ccs::par(l.to_ccs()?, r.to_ccs()?),
            Term::Restrict(t, a) => Ccs::restrict(t.to_ccs()?, a.clone()),
        })
    }
}

impl From<&Ccs> for Term {
    fn from(p: &Ccs) -> Term {
        match p {
            Ccs::Sum(s) => s
                .iter()
                .map(|(l, q)| Term::Prefix(l.clone(), Box::new(Term::from(q))))
                .reduce(|a, b| Term::Sum(Box::new(a), Box::new(b)))
                .unwrap_or(Term::Nil),
            Ccs::Par(l, r) => Term::Par(Box::new(Term::from(&**l)), Box::new(Term::from(&**r))),
            Ccs::Restrict(q, a) => Term::Restrict(Box::new(Term::from(&**q)), a.clone()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Nil => f.write_str("0"),
            Term::Prefix(l, t) => match **t {
                Term::Nil => write!(f, "{l}"),
                Term::Prefix(..) => write!(f, "{l}.{t}"),
                _ => write!(f, "{l}.({t})"),
            },
            Term::Sum(l, r) => {
                let side = |t: &Term, f: &mut fmt::Formatter<'_>| match t {
                    Term::Par(..) => write!(f, "({t})"),
                    _ => write!(f, "{t}"),
                };
                side(l, f)?;
                f.write_str(" + ")?;
                side(r, f)
            }
            Term::Par(l, r) => match **r {
                Term::Par(..) => write!(f, "{l} | ({r})"),
                _ => write!(f, "{l} | {r}"),
            },
            Term::Restrict(t, a) => match **t {
                Term::Nil => write!(f, "0 \\ {a}"),
                Term::Restrict(..) => write!(f, "{t} \\ {a}"),
                _ => write!(f, "({t}) \\ {a}"),
            },
        }
    }
}

/// Renders a term in the concrete syntax accepted by [`parse_ccs`].
pub fn pretty_ccs(p: &Ccs) -> String {
    p.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Ccs {
        parse_ccs(s).unwrap()
    }

    #[test]
    fn zero_is_empty_sum() {
        assert_eq!(p("0"), Ccs::Sum(vec![]));
        assert_eq!(pretty_ccs(&Ccs::nil()), "0");
    }

    #[test]
    fn parallel_with_coname() {
        let expected = Ccs::par(
            Ccs::prefix(Label::input("a"), Ccs::prefix(Label::input("b"), Ccs::nil())),
            Ccs::prefix(Label::input("c"), Ccs::prefix(Label::output("a"), Ccs::nil())),
        );
        assert_eq!(p("a.b | c.~a"), expected);
    }

    #[test]
    fn restricted_sum() {
        let body = Ccs::sum(vec![
            (Label::input("a"), Ccs::prefix(Label::input("b"), Ccs::nil())),
            (Label::input("c"), Ccs::nil()),
        ]);
        assert_eq!(p("(a.b + c) \\ a"), Ccs::restrict(body, "a"));
    }

    #[test]
    fn printer_examples() {
        let a = Ccs::prefix(Label::input("a"), Ccs::nil());
        let abar = Ccs::prefix(Label::output("a"), Ccs::nil());
        assert_eq!(pretty_ccs(&Ccs::par(a.clone(), abar)), "a | ~a");
        assert_eq!(pretty_ccs(&Ccs::restrict(a, "a")), "(a) \\ a");
    }

    #[test]
    fn round_trips() {
        for s in [
            "0",
            "a",
            "a.b | c.~a",
            "(a.b + c) \\ a",
            "a | (b | c)",
            "(a | b) | c",
            "a.(b | c) + ~d.0",
            "((a | ~a) \\ a) \\ b",
            "a.((b.0) \\ b)",
            "0 \\ a",
        ] {
            let t = parse_ccs(s).unwrap();
            assert_eq!(parse_ccs(&pretty_ccs(&t)).unwrap(), t, "{s}");
        }
    }

    #[test]
    fn errors_carry_positions() {
        match parse_ccs("a.\n  tau.b") {
            Err(ParseError::TauPrefix { line, col }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_ccs("(a) \\ ~a"), Err(ParseError::RestrictNonName { .. })));
        assert!(matches!(parse_ccs("(a) \\ 0"), Err(ParseError::RestrictNonName { .. })));
        assert!(matches!(parse_ccs("a + (b | c)"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_ccs("a |"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_ccs("A"), Err(ParseError::Syntax { line: 1, col: 1, .. })));
    }

    #[test]
    fn sums_are_sorted() {
        assert_eq!(p("b + a"), p("a + b"));
        assert_eq!(pretty_ccs(&p("b + a")), "a + b");
    }

    #[test]
    fn precedence() {
        // `+` binds tighter than `|`, prefix tighter than both.
        assert_eq!(p("a.b + c | d"), Ccs::par(p("a.b + c"), p("d")));
        assert_eq!(p("a | b | c"), Ccs::par(Ccs::par(p("a"), p("b")), p("c")));
        // restriction is postfix on the operand after the dot
        assert_eq!(p("a.b \\ b"), Ccs::prefix(Label::input("a"), Ccs::restrict(p("b"), "b")));
    }

    #[test]
    fn size_counts_prefixes() {
        assert_eq!(p("a.b | c.~a").size(), 4);
        assert_eq!(p("0").size(), 0);
    }

    #[test]
    fn general_terms() {
        let t = parse_term("(a | (b + c)) + (a | b)").unwrap();
        assert!(matches!(t, Term::Sum(..)));
        assert_eq!(t.to_ccs(), None);
        let g = parse_term("(a.b) + (a.b) + c").unwrap();
        assert_eq!(g.to_ccs(), Some(parse_ccs("a.b + a.b + c").unwrap()));
        assert_eq!(parse_ccs("(a.b) + (a.b)").unwrap(), parse_ccs("a.b + a.b").unwrap());
        assert!(parse_ccs("(a | b) + c").is_err());
        assert!(parse_ccs("0 + a").is_err());
        for s in ["0", "a.(b + c) | ~a", "(a | b) \\ a"] {
            let p = parse_ccs(s).unwrap();
            assert_eq!(Term::from(&p).to_ccs(), Some(p.clone()));
            assert_eq!(parse_term(s).unwrap().to_ccs(), Some(p));
        }
        for s in ["(a | (b + c)) + (a | b) + ((a + c) | b)", "a.(b | c) + 0", "((a + b) \\ a) \\ b | c"] {
            let t = parse_term(s).unwrap();
            assert_eq!(parse_term(&t.to_string()).unwrap(), t, "{t}");
        }
    }
}
