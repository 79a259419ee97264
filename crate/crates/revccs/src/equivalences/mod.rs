//! History-preserving and back-and-forth bisimulations, decided as greatest
//! fixed points over finite candidate sets, with self-checking witnesses.

pub mod corpus;
mod gfp;
mod lop;
mod reversible;
mod structural;
mod witness;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::encodings::{encode_ccs, encode_term};
use crate::rccs::{explore_with_cap, LtsGraph, RccsError, DEFAULT_STATE_CAP};
use crate::structures::{Config, StructError, Structure};
use crate::syntax::{Ccs, Term};

pub use gfp::GfpError;
pub use lop::{lop_bijections, LopBijection};
pub use reversible::check_graphs;
pub use structural::check_structures;
pub use witness::{validate_rccs_witness, validate_structure_witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Relation {
    #[serde(rename = "hpb")]
    Hpb,
    #[serde(rename = "hhpb")]
    Hhpb,
    #[serde(rename = "bf")]
    Bf,
    #[serde(rename = "sbf")]
    Sbf,
    #[serde(rename = "bf-fwd")]
    BfForward,
    #[serde(rename = "hpb-rccs")]
    HpbRccs,
    #[serde(rename = "hhpb-rccs")]
    HhpbRccs,
}

impl Relation {
    pub const ALL: [Relation; 7] =
        [Relation::Hpb, Relation::Hhpb, Relation::Bf, Relation::Sbf, Relation::BfForward, Relation::HpbRccs, Relation::HhpbRccs];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Hpb => "hpb",
            Relation::Hhpb => "hhpb",
            Relation::Bf => "bf",
            Relation::Sbf => "sbf",
            Relation::BfForward => "bf-fwd",
            Relation::HpbRccs => "hpb-rccs",
            Relation::HhpbRccs => "hhpb-rccs",
        }
    }

    /// Whether the relation is stated on configuration structures.
    pub fn on_structures(self) -> bool {
        matches!(self, Relation::Hpb | Relation::Hhpb)
    }

    /// Whether backward moves are matched.
    pub fn hereditary(self) -> bool {
        matches!(self, Relation::Hhpb | Relation::Bf | Relation::Sbf | Relation::HhpbRccs)
    }

    /// Whether the weak variant exists.
    pub fn has_weak_mode(self) -> bool {
        matches!(self, Relation::Hpb | Relation::Hhpb | Relation::HpbRccs | Relation::HhpbRccs)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Relation::ALL
            .into_iter()
            .find(|r| r.name() == s || r.name().replace('-', "_") == s)
            .ok_or_else(|| format!("unknown relation `{s}`"))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    Rccs(#[from] RccsError),
    #[error(transparent)]
    Struct(#[from] StructError),
    #[error("more than {0} candidate triples")]
    TooManyCandidates(usize),
    #[error("{0} is not available in weak mode")]
    NoWeakMode(Relation),
    #[error("{0} is not a CCS process (sums must be guarded)")]
    NotAProcess(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl From<GfpError> for CheckError {
    fn from(e: GfpError) -> Self {
        match e {
            GfpError::TooManyCandidates(n) => CheckError::TooManyCandidates(n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    /// Drop the continuity of the bijection between steps.
    pub weak: bool,
    pub state_cap: usize,
    pub candidate_cap: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { weak: false, state_cap: DEFAULT_STATE_CAP, candidate_cap: 5_000_000 }
    }
}

/// Surviving triples, in the coordinates of the checked objects. Maps are
/// `None` in weak mode and for the simple back-and-forth relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Configurations of the two structures, with event-index bijections.
    Configs(Vec<(Config, Config, Option<Vec<(usize, usize)>>)>),
    /// Indices into the two explored graphs, with identifier bijections.
    States(Vec<(usize, usize, Option<Vec<(u32, u32)>>)>),
}

impl Witness {
    pub fn len(&self) -> usize {
        match self {
            Witness::Configs(v) => v.len(),
            Witness::States(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A rendered member of the witness relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchTriple {
    pub left: String,
    pub right: String,
    pub map: Option<Vec<(String, String)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BisimResult {
    pub relation: Relation,
    pub weak: bool,
    pub holds: bool,
    pub candidates: usize,
    /// The surviving triples when the relation holds.
    pub witness_relation: Vec<MatchTriple>,
    /// The chain of failed obligations from the root when it does not.
    pub certificate: Vec<String>,
    #[serde(skip)]
    pub witness: Option<Witness>,
}

impl BisimResult {
    pub fn verdict(&self) -> &'static str {
        if self.holds {
            "HOLDS"
        } else {
            "FAILS"
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("result serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.verdict());
        if self.holds {
            for t in &self.witness_relation {
                match &t.map {
                    Some(m) => {
                        let pairs: Vec<String> = m.iter().map(|(a, b)| format!("{a}->{b}")).collect();
                        out.push_str(&format!("  {}  ~  {}  [{}]\n", t.left, t.right, pairs.join(", ")));
                    }
                    None => out.push_str(&format!("  {}  ~  {}\n", t.left, t.right)),
                }
            }
        } else {
            for line in &self.certificate {
                out.push_str(&format!("  {line}\n"));
            }
        }
        out
    }
}

/// Checks one relation between two CCS processes: on their denotations for
/// the structure relations, on their reversible transition systems otherwise.
pub fn check(relation: Relation, p1: &Ccs, p2: &Ccs, opts: &CheckOptions) -> Result<BisimResult, CheckError> {
    if opts.weak && !relation.has_weak_mode() {
        return Err(CheckError::NoWeakMode(relation));
    }
    if relation.on_structures() {
        check_structures(&encode_ccs(p1), &encode_ccs(p2), relation == Relation::Hhpb, opts)
    } else {
        let g1 = explore_with_cap(p1, opts.state_cap)?;
        let g2 = explore_with_cap(p2, opts.state_cap)?;
        check_graphs(&g1, &g2, relation, opts)
    }
}

/// Like [`check`], for terms whose sums may be unguarded. Such terms only
/// have a denotation, so only the structure relations accept them.
pub fn check_terms(relation: Relation, t1: &Term, t2: &Term, opts: &CheckOptions) -> Result<BisimResult, CheckError> {
    if relation.on_structures() {
        if opts.weak && !relation.has_weak_mode() {
            return Err(CheckError::NoWeakMode(relation));
        }
        return check_structures(&encode_term(t1), &encode_term(t2), relation == Relation::Hhpb, opts);
    }
    let as_ccs = |t: &Term, k: usize| t.to_ccs().ok_or_else(|| CheckError::NotAProcess(format!("argument {k}")));
    check(relation, &as_ccs(t1, 1)?, &as_ccs(t2, 2)?, opts)
}

pub fn hpb(c1: &Structure, c2: &Structure) -> Result<BisimResult, CheckError> {
    check_structures(c1, c2, false, &CheckOptions::default())
}

pub fn hhpb(c1: &Structure, c2: &Structure) -> Result<BisimResult, CheckError> {
    check_structures(c1, c2, true, &CheckOptions::default())
}

fn on_graphs(relation: Relation, p1: &Ccs, p2: &Ccs) -> Result<BisimResult, CheckError> {
    check(relation, p1, p2, &CheckOptions::default())
}

pub fn bf(p1: &Ccs, p2: &Ccs) -> Result<BisimResult, CheckError> {
    on_graphs(Relation::Bf, p1, p2)
}

pub fn sbf(p1: &Ccs, p2: &Ccs) -> Result<BisimResult, CheckError> {
    on_graphs(Relation::Sbf, p1, p2)
}

pub fn bf_forward_only(p1: &Ccs, p2: &Ccs) -> Result<BisimResult, CheckError> {
    on_graphs(Relation::BfForward, p1, p2)
}

pub fn hpb_rccs(p1: &Ccs, p2: &Ccs) -> Result<BisimResult, CheckError> {
    on_graphs(Relation::HpbRccs, p1, p2)
}

pub fn hhpb_rccs(p1: &Ccs, p2: &Ccs) -> Result<BisimResult, CheckError> {
    on_graphs(Relation::HhpbRccs, p1, p2)
}

/// No configuration of `⟦p⟧` holds two distinct events with one label.
pub fn is_non_repeating(p: &Ccs) -> bool {
    !encode_ccs(p).is_repeating()
}

/// Some configuration of `⟦p⟧` holds two concurrent events with one label.
pub fn has_auto_concurrency(p: &Ccs) -> bool {
    encode_ccs(p).has_auto_concurrency()
}

/// Re-checks a result's witness against the checked objects. `graphs` must
/// be the explorations the result was computed on.
pub fn validate_result(
    result: &BisimResult,
    structures: Option<(&Structure, &Structure)>,
    graphs: Option<(&LtsGraph, &LtsGraph)>,
) -> Result<(), String> {
    let Some(w) = &result.witness else {
        return if result.holds { Err("a holding result must carry its witness".into()) } else { Ok(()) };
    };
    match (structures, graphs) {
        (Some((c1, c2)), _) if result.relation.on_structures() => {
            validate_structure_witness(c1, c2, result.relation.hereditary(), result.weak, w)
        }
        (_, Some((g1, g2))) if !result.relation.on_structures() => {
            validate_rccs_witness(g1, g2, result.relation, result.weak, w)
        }
        _ => Err("the checked objects do not match the relation".into()),
    }
}
