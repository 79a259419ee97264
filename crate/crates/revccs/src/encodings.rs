//! Denotations: CCS terms as configuration structures, RCCS memories as
//! identified structures, and reversible terms as addresses in the
//! denotation of their origin.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::rccs::{Direction, MemItem, Memory, RccsError, RccsProcess, State, Transition};
use crate::structures::{
    iso_search_with, Config, EventId, Ident, IsoOptions, SLabel, StructError, StructIso, Structure, SyncAlgebra,
};
use crate::syntax::{Ccs, Label, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error(transparent)]
    Rccs(#[from] RccsError),
    #[error(transparent)]
    Struct(#[from] StructError),
    #[error("no configuration of the origin's denotation matches the memory")]
    NoAddress,
    #[error("operational correspondence violated: {0}")]
    Correspondence(String),
    #[error("event `{0}` is not maximal")]
    NotMaximal(EventId),
}

/// Denotation of a term whose sums need not be guarded, by the same clauses:
/// `⟦P + Q⟧ = ⟦P⟧ + ⟦Q⟧` for arbitrary operands.
pub fn encode_term(t: &Term) -> Structure {
    match t {
        Term::Nil => Structure::zero(),
        Term::Prefix(l, t) => encode_term(t).prefix(SLabel::Act(l.clone())),
        Term::Sum(l, r) => encode_term(l).choice(&encode_term(r)).expect("plain structures never overlap"),
        Term::Par(l, r) => encode_term(l).parallel_compose_proc(&encode_term(r), &SyncAlgebra::Proc),
        Term::Restrict(t, a) => {
            let a = Label::In(a.clone());
            encode_term(t).restrict_labels(&[SLabel::Act(a.complement()), SLabel::Act(a)].into())
        }
    }
}

/// A reversible term seen as its origin's denotation and a configuration in it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AddressPair {
    pub denotation: Structure,
    pub address: Config,
}

/// The witness of one operational-correspondence check: the event added or
/// removed by the step, and the isomorphism between the smaller memory
/// encoding and the larger one without that event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correspondence {
    pub event: EventId,
    pub iso: StructIso,
}

pub fn encode_ccs(p: &Ccs) -> Structure {
    match p {
        Ccs::Sum(summands) => {
            let mut parts = summands.iter().rev().map(|(l, q)| encode_ccs(q).prefix(SLabel::Act(l.clone())));
            match parts.next() {
                None => Structure::zero(),
                Some(last) => parts.fold(last, |rest, s| s.choice(&rest).expect("plain structures never overlap")),
            }
        }
        Ccs::Par(l, r) => encode_ccs(l).parallel_compose_proc(&encode_ccs(r), &SyncAlgebra::Proc),
        Ccs::Restrict(q, a) => {
            let a = Label::In(a.clone());
            encode_ccs(q).restrict_labels(&[SLabel::Act(a.complement()), SLabel::Act(a)].into())
        }
    }
}

/// `⟦m⟧`: postfixing from the oldest event; fork markers add nothing.
pub fn encode_stack(m: &Memory) -> Result<Structure, StructError> {
    m.0.iter().try_fold(Structure::zero_identified(), |s, item| match item {
        MemItem::Fork => Ok(s),
        MemItem::Event(e) => s.postfix(SLabel::Act(e.label.clone()), Ident::Base(e.id)),
    })
}

fn encode_unchecked(r: &RccsProcess) -> Result<Structure, StructError> {
    match r {
        RccsProcess::Thread(m, _) => encode_stack(m),
        RccsProcess::Par(a, b) => encode_unchecked(a)?.parallel_compose_mem(&encode_unchecked(b)?, &SyncAlgebra::Mem),
        RccsProcess::Restrict(q, _) => encode_unchecked(q),
    }
}

/// `⟦R⟧ₘ` for a reachable term.
pub fn encode_memory(r: &RccsProcess) -> Result<Structure, EncodeError> {
    let s = State::from_process(r)?;
    if !s.is_reachable() {
        return Err(RccsError::Incoherent(format!("`{r}` does not rewind to an origin")).into());
    }
    Ok(encode_unchecked(r)?)
}

/// `⟦R⟧ₘ` of a normal-form state, composing its threads left to right.
pub fn encode_state(s: &State) -> Result<Structure, StructError> {
    let mut threads = s.threads.iter();
    let Some(first) = threads.next() else {
        return Ok(Structure::zero_identified());
    };
    threads.try_fold(encode_stack(&first.mem)?, |acc, t| acc.parallel_compose_mem(&encode_stack(&t.mem)?, &SyncAlgebra::Mem))
}

fn address_of(s: &State) -> Result<AddressPair, EncodeError> {
    let denotation = encode_ccs(&s.origin()?);
    let memory = encode_state(s)?;
    let enriched = denotation.enrich_trivially();
    let size = memory.len();
    let opts = IsoOptions { fix_labels: true, fix_idents: false };
    let mut found = None;
    for x in denotation.configs().filter(|x| x.count_ones(..) == size) {
        if iso_search_with(&enriched.generate_below(x)?, &memory, opts).is_some() {
            found = Some(x.clone());
            break;
        }
    }
    let address = found.ok_or(EncodeError::NoAddress)?;
    Ok(AddressPair { denotation, address })
}

/// `(⟦O_R⟧, x_R)`: the configuration of the origin's denotation whose
/// generated sub-structure is isomorphic to the memory encoding. When the
/// denotation has automorphisms several configurations qualify; the first in
/// configuration order is returned.
pub fn encode_address(r: &RccsProcess) -> Result<AddressPair, EncodeError> {
    let s = State::from_process(r)?;
    if !s.is_reachable() {
        return Err(RccsError::Incoherent(format!("`{r}` does not rewind to an origin")).into());
    }
    address_of(&s)
}

pub fn encode_state_address(s: &State) -> Result<AddressPair, EncodeError> {
    address_of(s)
}

/// Finds the event of `big` carrying identifier `id` and label `label`,
/// checks it is maximal, and matches `big` without it against `small`.
fn correspond(big: &Structure, small: &Structure, id: u32, label: &Label) -> Result<Correspondence, EncodeError> {
    let want = (Some(Ident::Base(id)), SLabel::Act(label.clone()));
    let k = (0..big.len())
        .find(|&k| (big.ident_of(k).cloned(), big.label_of(k).clone()) == want)
        .ok_or_else(|| EncodeError::Correspondence(format!("no event {id}:{label} in the larger encoding")))?;
    let e = big.event(k).id.clone();
    if !big.maximal_events().contains(&k) {
        return Err(EncodeError::Correspondence(format!("event {id}:{label} is not maximal")));
    }
    let rest = big.restrict_events(&BTreeSet::from([e.clone()]));
    let iso = iso_search_with(&rest, small, IsoOptions { fix_labels: true, fix_idents: true })
        .ok_or_else(|| EncodeError::Correspondence(format!("removing {id}:{label} does not give the other encoding")))?;
    Ok(Correspondence { event: e, iso })
}

/// Checks that a step adds (forward) or removes (backward) exactly one
/// maximal event with the step's identifier and label.
pub fn check_op_correspondence(t: &Transition) -> Result<Correspondence, EncodeError> {
    let (big, small) = match t.direction {
        Direction::Forward => (&t.target, &t.source),
        Direction::Backward => (&t.source, &t.target),
    };
    correspond(&encode_state(big)?, &encode_state(small)?, t.id, &t.label)
}

/// The backward step undoing the maximal event `e` of `⟦s⟧ₘ`.
pub fn backward_from_maximal_state(s: &State, e: &EventId) -> Result<Transition, EncodeError> {
    undo_event(s, &encode_state(s)?, e)
}

fn undo_event(s: &State, enc: &Structure, e: &EventId) -> Result<Transition, EncodeError> {
    let k = enc.index_of(e).ok_or_else(|| StructError::UnknownEvent(e.clone()))?;
    if !enc.maximal_events().contains(&k) {
        return Err(EncodeError::NotMaximal(e.clone()));
    }
    let Some(Ident::Base(id)) = enc.ident_of(k).cloned() else {
        return Err(EncodeError::Correspondence(format!("event `{e}` has a composite identifier")));
    };
    let label = enc
        .label_of(k)
        .as_action()
        .cloned()
        .ok_or_else(|| EncodeError::Correspondence(format!("event `{e}` has a composite label")))?;
    let t = s
        .undo(id)
        .filter(|t| t.label == label)
        .ok_or_else(|| EncodeError::Correspondence(format!("no backward step {id}:{label}")))?;
    correspond(enc, &encode_state(&t.target)?, id, &label)?;
    Ok(t)
}

pub fn backward_from_maximal(r: &RccsProcess, e: &EventId) -> Result<Transition, EncodeError> {
    let s = State::from_process(r)?;
    if !s.is_reachable() {
        return Err(RccsError::Incoherent(format!("`{r}` does not rewind to an origin")).into());
    }
    undo_event(&s, &encode_unchecked(r)?, e)
}
