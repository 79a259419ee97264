//! Synchronisation algebras: partial label composition with `⋆` as unit and
//! `⊥` as zero. `None` stands for `⋆` on inputs and for `⊥` on outputs.

use std::collections::{BTreeMap, BTreeSet};

use super::{SLabel, StructError};
use crate::syntax::Label;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SyncAlgebra {
    /// `α • ᾱ = τ` for visible `α`, everything else `⊥`.
    Proc,
    /// As `Proc`, plus `α • α = α` and `α • τ = τ`.
    Mem,
    /// Explicit table over action labels; missing entries are `⊥`.
    Table(BTreeMap<(Label, Label), Label>),
}

impl SyncAlgebra {
    /// A user table, checked for commutativity and associativity over the
    /// labels it mentions.
    pub fn table(entries: impl IntoIterator<Item = ((Label, Label), Label)>) -> Result<SyncAlgebra, StructError> {
        let t: BTreeMap<(Label, Label), Label> = entries.into_iter().collect();
        for ((a, b), c) in &t {
            match t.get(&(b.clone(), a.clone())) {
                Some(d) if d == c => {}
                _ => return Err(StructError::BadAlgebra(format!("{a} • {b} is not commutative"))),
            }
        }
        let mut alphabet: BTreeSet<Label> = BTreeSet::new();
        for ((a, b), c) in &t {
            alphabet.extend([a.clone(), b.clone(), c.clone()]);
        }
        let op = |x: Option<&Label>, y: Option<&Label>| -> Option<Label> { t.get(&(x?.clone(), y?.clone())).cloned() };
        for x in &alphabet {
            for y in &alphabet {
                for z in &alphabet {
                    let l = op(op(Some(x), Some(y)).as_ref(), Some(z));
                    let r = op(Some(x), op(Some(y), Some(z)).as_ref());
                    if l != r {
                        return Err(StructError::BadAlgebra(format!("({x} • {y}) • {z} differs from {x} • ({y} • {z})")));
                    }
                }
            }
        }
        Ok(SyncAlgebra::Table(t))
    }

    fn act(&self, a: &Label, b: &Label) -> Option<Label> {
        match self {
            SyncAlgebra::Proc => (!a.is_tau() && *b == a.complement()).then_some(Label::Tau),
            SyncAlgebra::Mem => {
                if a == b {
                    Some(a.clone())
                } else if a.is_tau() || b.is_tau() || *b == a.complement() {
                    Some(Label::Tau)
                } else {
                    None
                }
            }
            SyncAlgebra::Table(t) => t.get(&(a.clone(), b.clone())).cloned(),
        }
    }

    /// `a • b`; `⊥` is returned as `None`, and `None` inputs are `⋆`.
    pub fn combine(&self, a: Option<&SLabel>, b: Option<&SLabel>) -> Option<SLabel> {
        match (a, b) {
            (None, None) => None,
            (Some(SLabel::Bottom), _) | (_, Some(SLabel::Bottom)) => None,
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (Some(SLabel::Act(x)), Some(SLabel::Act(y))) => self.act(x, y).map(SLabel::Act),
            _ => None,
        }
    }
}
