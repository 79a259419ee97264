//! Finite configuration structures, optionally carrying event identifiers.
//!
//! Events are stored sorted by [`EventId`]; a configuration is a bit set over
//! event positions.

mod algebra;
mod iso;
mod ops;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::{self, Write as _};

use fixedbitset::FixedBitSet;
use serde_json::json;
use thiserror::Error;

use crate::syntax::Label;

pub use algebra::SyncAlgebra;
pub use iso::{iso_search, iso_search_with, IsoOptions, StructIso};
pub use ops::{CompositionRow, PRODUCT_ORACLE_LIMIT};

pub type Config = FixedBitSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructError {
    #[error("duplicate event `{0}`")]
    DuplicateEvent(EventId),
    #[error("unknown event `{0}`")]
    UnknownEvent(EventId),
    #[error("event `{0}` has no identifier")]
    MissingIdent(EventId),
    #[error("not a configuration of the structure")]
    NotAConfig,
    #[error("identifier `{0}` collides inside configuration {1}")]
    Collision(Ident, String),
    #[error("identifier `{0}` is already used")]
    IdentInUse(Ident),
    #[error("identifier sets overlap on `{0}`")]
    IdentOverlap(Ident),
    #[error("operation needs an identified structure")]
    NotIdentified,
    #[error("enrichment order must list every event exactly once")]
    BadOrder,
    #[error("synchronisation table: {0}")]
    BadAlgebra(String),
}

/// Structured event names: atoms, pairs of the partial product (`None` is
/// `⋆`) and branch tags of sums.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventId {
    Atom(u32),
    Pair(Option<Box<EventId>>, Option<Box<EventId>>),
    Tagged(u8, Box<EventId>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SLabel {
    Act(Label),
    Pair(Option<Box<SLabel>>, Option<Box<SLabel>>),
    Tagged(u8, Box<SLabel>),
    Bottom,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ident {
    Base(u32),
    Pair(Option<Box<Ident>>, Option<Box<Ident>>),
    Tagged(u8, Box<Ident>),
    Bottom(Box<Ident>),
}

fn write_pair<T: fmt::Display>(f: &mut fmt::Formatter<'_>, l: &Option<Box<T>>, r: &Option<Box<T>>) -> fmt::Result {
    f.write_str("(")?;
    match l {
        Some(x) => write!(f, "{x}")?,
        None => f.write_str("*")?,
    }
    f.write_str(",")?;
    match r {
        Some(x) => write!(f, "{x}")?,
        None => f.write_str("*")?,
    }
    f.write_str(")")
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventId::Atom(n) => write!(f, "{n}"),
            EventId::Pair(l, r) => write_pair(f, l, r),
            EventId::Tagged(k, e) => write!(f, "{k}.{e}"),
        }
    }
}

impl fmt::Display for SLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SLabel::Act(l) => write!(f, "{l}"),
            SLabel::Pair(l, r) => write_pair(f, l, r),
            SLabel::Tagged(k, l) => write!(f, "{k}.{l}"),
            SLabel::Bottom => f.write_str("_|_"),
        }
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ident::Base(n) => write!(f, "{n}"),
            Ident::Pair(l, r) => write_pair(f, l, r),
            Ident::Tagged(k, i) => write!(f, "{k}.{i}"),
            Ident::Bottom(k) => write!(f, "_|_{k}"),
        }
    }
}

impl EventId {
    pub fn pair(l: Option<&EventId>, r: Option<&EventId>) -> EventId {
        EventId::Pair(l.cloned().map(Box::new), r.cloned().map(Box::new))
    }
}

impl SLabel {
    pub fn act(l: Label) -> SLabel {
        SLabel::Act(l)
    }

    pub fn pair(l: Option<&SLabel>, r: Option<&SLabel>) -> SLabel {
        SLabel::Pair(l.cloned().map(Box::new), r.cloned().map(Box::new))
    }

    pub fn as_action(&self) -> Option<&Label> {
        match self {
            SLabel::Act(l) => Some(l),
            _ => None,
        }
    }
}

impl From<Label> for SLabel {
    fn from(l: Label) -> SLabel {
        SLabel::Act(l)
    }
}

impl Ident {
    pub fn pair(l: Option<&Ident>, r: Option<&Ident>) -> Ident {
        Ident::Pair(l.cloned().map(Box::new), r.cloned().map(Box::new))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Event {
    pub id: EventId,
    pub label: SLabel,
    pub ident: Option<Ident>,
}

/// `(E, C, ℓ)` plus, when `identified`, an identifier on every event.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Structure {
    events: Vec<Event>,
    configs: BTreeSet<Config>,
    identified: bool,
}

/// Relative position of two events in a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Lt,
    Gt,
    Concurrent,
    Equal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    Finiteness,
    CoincidenceFreeness,
    FiniteCompleteness,
    Stability,
    CollisionFreeness,
}

/// A failed axiom together with the configurations and events that break it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub configs: Vec<Vec<EventId>>,
    pub events: Vec<EventId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    /// One entry per checked axiom, `None` when it holds.
    pub results: Vec<(Axiom, Option<Violation>)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.results.iter().all(|(_, v)| v.is_none())
    }

    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.results.iter().filter_map(|(_, v)| v.as_ref())
    }
}

pub(crate) fn bits(n: usize, members: impl IntoIterator<Item = usize>) -> Config {
    let mut b = FixedBitSet::with_capacity(n);
    for k in members {
        b.insert(k);
    }
    b
}

impl Structure {
    /// `𝟎` without identifiers.
    pub fn zero() -> Structure {
        Structure { events: Vec::new(), configs: [FixedBitSet::new()].into(), identified: false }
    }

    /// `𝟎` as an identified structure.
    pub fn zero_identified() -> Structure {
        Structure { identified: true, ..Structure::zero() }
    }

    /// Builds a structure from explicit events and configurations. The axioms
    /// are not checked here; see [`Structure::validate`].
    pub fn new(events: Vec<Event>, configs: Vec<Vec<EventId>>, identified: bool) -> Result<Structure, StructError> {
        let mut seen = BTreeSet::new();
        for e in &events {
            if !seen.insert(e.id.clone()) {
                return Err(StructError::DuplicateEvent(e.id.clone()));
            }
            if identified && e.ident.is_none() {
                return Err(StructError::MissingIdent(e.id.clone()));
            }
        }
        let index: BTreeMap<&EventId, usize> = events.iter().enumerate().map(|(k, e)| (&e.id, k)).collect();
        let mut cs = Vec::new();
        for c in configs {
            let mut b = FixedBitSet::with_capacity(events.len());
            for id in c {
                b.insert(*index.get(&id).ok_or(StructError::UnknownEvent(id.clone()))?);
            }
            cs.push(b);
        }
        Ok(Structure::assemble(events, cs, identified))
    }

    /// Sorts events by identifier and re-indexes configurations.
    pub(crate) fn assemble(events: Vec<Event>, configs: impl IntoIterator<Item = Config>, identified: bool) -> Structure {
        let n = events.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| events[a].id.cmp(&events[b].id));
        let mut pos = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let mut slots: Vec<Option<Event>> = events.into_iter().map(Some).collect();
        let events: Vec<Event> = order.iter().map(|&k| slots[k].take().unwrap()).collect();
        let events = if identified {
            events
        } else {
            events.into_iter().map(|e| Event { ident: None, ..e }).collect()
        };
        let configs = configs.into_iter().map(|c| bits(n, c.ones().map(|k| pos[k]))).collect();
        Structure { events, configs, identified }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event(&self, k: usize) -> &Event {
        &self.events[k]
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn configs(&self) -> impl Iterator<Item = &Config> + '_ {
        self.configs.iter()
    }

    pub fn config_count(&self) -> usize {
        self.configs.len()
    }

    pub fn is_identified(&self) -> bool {
        self.identified
    }

    pub fn contains(&self, x: &Config) -> bool {
        self.configs.contains(x)
    }

    pub fn empty_config(&self) -> Config {
        FixedBitSet::with_capacity(self.events.len())
    }

    pub fn index_of(&self, id: &EventId) -> Option<usize> {
        self.events.binary_search_by(|e| e.id.cmp(id)).ok()
    }

    pub fn config_of(&self, ids: &[EventId]) -> Result<Config, StructError> {
        let mut b = self.empty_config();
        for id in ids {
            b.insert(self.index_of(id).ok_or_else(|| StructError::UnknownEvent(id.clone()))?);
        }
        Ok(b)
    }

    pub fn config_ids(&self, x: &Config) -> Vec<EventId> {
        x.ones().map(|k| self.events[k].id.clone()).collect()
    }

    pub fn labels(&self) -> BTreeSet<SLabel> {
        self.events.iter().map(|e| e.label.clone()).collect()
    }

    pub fn idents(&self) -> BTreeSet<Ident> {
        self.events.iter().filter_map(|e| e.ident.clone()).collect()
    }

    pub fn label_of(&self, k: usize) -> &SLabel {
        &self.events[k].label
    }

    pub fn ident_of(&self, k: usize) -> Option<&Ident> {
        self.events[k].ident.as_ref()
    }

    /// Configurations with no strict superset.
    pub fn maximal_configs(&self) -> Vec<Config> {
        let all: Vec<&Config> = self.configs.iter().collect();
        all.iter()
            .filter(|x| !all.iter().any(|y| y.count_ones(..) > x.count_ones(..) && x.is_subset(y)))
            .map(|x| (*x).clone())
            .collect()
    }

    /// For every event of `x`, the events of `x` at or below it: the
    /// intersection of the sub-configurations of `x` that contain it.
    pub fn down_sets(&self, x: &Config) -> Vec<Option<Config>> {
        let mut down: Vec<Option<Config>> = vec![None; self.events.len()];
        for y in self.configs.iter().filter(|y| y.is_subset(x)) {
            for e in y.ones() {
                match &mut down[e] {
                    Some(d) => d.intersect_with(y),
                    slot => *slot = Some(y.clone()),
                }
            }
        }
        down
    }

    /// `d ≤ₓ e`, for events of `x`.
    pub fn leq_in(&self, x: &Config, d: usize, e: usize) -> bool {
        self.configs.iter().filter(|y| y.is_subset(x) && y.contains(e)).all(|y| y.contains(d))
    }

    pub fn causality(&self, x: &Config, d: &EventId, e: &EventId) -> Result<Order, StructError> {
        if !self.contains(x) {
            return Err(StructError::NotAConfig);
        }
        let find = |id: &EventId| {
            self.index_of(id).filter(|k| x.contains(*k)).ok_or_else(|| StructError::UnknownEvent(id.clone()))
        };
        let (d, e) = (find(d)?, find(e)?);
        Ok(if d == e {
            Order::Equal
        } else if self.leq_in(x, d, e) {
            Order::Lt
        } else if self.leq_in(x, e, d) {
            Order::Gt
        } else {
            Order::Concurrent
        })
    }

    /// Events not strictly below another event of a maximal configuration.
    pub fn maximal_events(&self) -> Vec<usize> {
        let mut below_something = vec![false; self.events.len()];
        for x in self.maximal_configs() {
            for (e, d) in self.down_sets(&x).into_iter().enumerate() {
                if let Some(d) = d {
                    for k in d.ones().filter(|&k| k != e) {
                        below_something[k] = true;
                    }
                }
            }
        }
        (0..self.events.len()).filter(|&k| !below_something[k]).collect()
    }

    pub fn maximal_event_ids(&self) -> Vec<EventId> {
        self.maximal_events().into_iter().map(|k| self.events[k].id.clone()).collect()
    }

    /// Checks the axioms (and collision freeness for identified structures),
    /// reporting one counterexample per failed axiom.
    pub fn validate(&self) -> ValidationReport {
        let ids = |x: &Config| self.config_ids(x);
        let mut results = vec![(Axiom::Finiteness, None)];

        let mut coincidence = None;
        'outer: for x in &self.configs {
            let members: Vec<usize> = x.ones().collect();
            let mut sep: BTreeMap<usize, Config> = members.iter().map(|&d| (d, self.empty_config())).collect();
            for z in self.configs.iter().filter(|z| z.is_subset(x)) {
                let mut rest = x.clone();
                rest.difference_with(z);
                for d in z.ones() {
                    sep.get_mut(&d).unwrap().union_with(&rest);
                }
                for d in rest.ones() {
                    sep.get_mut(&d).unwrap().union_with(z);
                }
            }
            for (i, &d) in members.iter().enumerate() {
                for &e in &members[i + 1..] {
                    if !sep[&d].contains(e) {
                        coincidence = Some(Violation {
                            axiom: Axiom::CoincidenceFreeness,
                            configs: vec![ids(x)],
                            events: vec![self.events[d].id.clone(), self.events[e].id.clone()],
                        });
                        break 'outer;
                    }
                }
            }
        }
        results.push((Axiom::CoincidenceFreeness, coincidence));

        let maximal = self.maximal_configs();
        let all: Vec<&Config> = self.configs.iter().collect();
        let mut completeness = None;
        if !self.configs.is_empty() && !self.configs.contains(&self.empty_config()) {
            completeness =
                Some(Violation { axiom: Axiom::FiniteCompleteness, configs: vec![Vec::new()], events: Vec::new() });
        }
        let mut stability = None;
        for (i, x) in all.iter().enumerate() {
            for y in &all[i + 1..] {
                let mut u = (*x).clone();
                u.union_with(y);
                let in_c = self.configs.contains(&u);
                if completeness.is_none() && !in_c && maximal.iter().any(|m| u.is_subset(m)) {
                    completeness = Some(Violation {
                        axiom: Axiom::FiniteCompleteness,
                        configs: vec![ids(x), ids(y)],
                        events: Vec::new(),
                    });
                }
                if stability.is_none() && in_c {
                    let mut m = (*x).clone();
                    m.intersect_with(y);
                    if !self.configs.contains(&m) {
                        stability = Some(Violation {
                            axiom: Axiom::Stability,
                            configs: vec![ids(x), ids(y)],
                            events: Vec::new(),
                        });
                    }
                }
            }
        }
        results.push((Axiom::FiniteCompleteness, completeness));
        results.push((Axiom::Stability, stability));

        if self.identified {
            let mut collision = None;
            'c: for x in &maximal {
                let mut seen: BTreeMap<&Ident, usize> = BTreeMap::new();
                for k in x.ones() {
                    let Some(i) = self.events[k].ident.as_ref() else {
                        collision = Some(Violation {
                            axiom: Axiom::CollisionFreeness,
                            configs: vec![ids(x)],
                            events: vec![self.events[k].id.clone()],
                        });
                        break 'c;
                    };
                    if let Some(&other) = seen.get(i) {
                        collision = Some(Violation {
                            axiom: Axiom::CollisionFreeness,
                            configs: vec![ids(x)],
                            events: vec![self.events[other].id.clone(), self.events[k].id.clone()],
                        });
                        break 'c;
                    }
                    seen.insert(i, k);
                }
            }
            results.push((Axiom::CollisionFreeness, collision));
        }
        ValidationReport { results }
    }

    /// True when some configuration holds two distinct events with one label.
    pub fn is_repeating(&self) -> bool {
        self.maximal_configs().iter().any(|x| {
            let mut seen = HashSet::new();
            x.ones().any(|k| !seen.insert(&self.events[k].label))
        })
    }

    /// True when some configuration holds two concurrent events with one label.
    pub fn has_auto_concurrency(&self) -> bool {
        self.maximal_configs().iter().any(|x| {
            let down = self.down_sets(x);
            let members: Vec<usize> = x.ones().collect();
            members.iter().enumerate().any(|(i, &d)| {
                members[i + 1..].iter().any(|&e| {
                    self.events[d].label == self.events[e].label
                        && !down[e].as_ref().is_some_and(|s| s.contains(d))
                        && !down[d].as_ref().is_some_and(|s| s.contains(e))
                })
            })
        })
    }

    /// Set literal of a configuration using labels, with a subscript when a
    /// label is shared by several events.
    pub fn config_literal(&self, x: &Config) -> String {
        let names = self.display_names();
        let mut parts: Vec<&str> = x.ones().map(|k| names[k].as_str()).collect();
        parts.sort_unstable();
        format!("{{{}}}", parts.join(", "))
    }

    fn display_names(&self) -> Vec<String> {
        let mut count: BTreeMap<&SLabel, usize> = BTreeMap::new();
        for e in &self.events {
            *count.entry(&e.label).or_default() += 1;
        }
        let mut seen: BTreeMap<&SLabel, usize> = BTreeMap::new();
        self.events
            .iter()
            .map(|e| {
                if count[&e.label] == 1 {
                    e.label.to_string()
                } else {
                    let n = seen.entry(&e.label).or_default();
                    *n += 1;
                    format!("{}_{}", e.label, n)
                }
            })
            .collect()
    }

    /// Configurations as sorted lists of event-id strings, sorted.
    pub fn config_strings(&self) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = self
            .configs
            .iter()
            .map(|x| {
                let mut v: Vec<String> = x.ones().map(|k| self.events[k].id.to_string()).collect();
                v.sort();
                v
            })
            .collect();
        out.sort();
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut events: Vec<(String, String, Option<String>)> = self
            .events
            .iter()
            .map(|e| (e.id.to_string(), e.label.to_string(), e.ident.as_ref().map(|i| i.to_string())))
            .collect();
        events.sort();
        let events: Vec<serde_json::Value> =
            events.into_iter().map(|(id, label, ident)| json!({"id": id, "label": label, "ident": ident})).collect();
        json!({"events": events, "configs": self.config_strings()})
    }

    /// The configuration lattice: one node per configuration, one edge per
    /// single-event extension.
    pub fn to_dot(&self) -> String {
        let mut configs: Vec<&Config> = self.configs.iter().collect();
        configs.sort_by_key(|x| (x.count_ones(..), self.config_ids(x)));
        let mut out = String::from("digraph configurations {\n  rankdir=BT;\n  node [shape=plaintext];\n");
        for (k, x) in configs.iter().enumerate() {
            let _ = writeln!(out, "  c{k} [label=\"{}\"];", self.config_literal(x).replace('"', "\\\""));
        }
        for (i, x) in configs.iter().enumerate() {
            for (j, y) in configs.iter().enumerate() {
                if y.count_ones(..) == x.count_ones(..) + 1 && x.is_subset(y) {
                    let mut d = (*y).clone();
                    d.difference_with(x);
                    let e = d.ones().next().unwrap();
                    let _ = writeln!(out, "  c{i} -> c{j} [label=\"{}\"];", self.events[e].label);
                }
            }
        }
        out.push_str("}\n");
        out
    }

    /// Covering pairs `(x, y)` with `y = x ∪ {e}`, as set literals.
    pub fn hasse_edges(&self) -> BTreeSet<(String, String)> {
        let all: Vec<&Config> = self.configs.iter().collect();
        let mut out = BTreeSet::new();
        for x in &all {
            for y in &all {
                if y.count_ones(..) == x.count_ones(..) + 1 && x.is_subset(y) {
                    out.insert((self.config_literal(x), self.config_literal(y)));
                }
            }
        }
        out
    }
}
