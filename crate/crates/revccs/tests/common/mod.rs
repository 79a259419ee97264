//! Oracles and fixtures shared by the integration tests. Nothing here calls
//! the library's isomorphism search or its pre-computed answers.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use proptest::prelude::*;
use revccs::structures::{Config, Event, EventId, SLabel, Structure};
use revccs::syntax::{Ccs, Label};

pub fn lab(s: &str) -> SLabel {
    SLabel::Act(match s.strip_prefix('~') {
        Some(n) => Label::output(n),
        None if s == "tau" => Label::Tau,
        None => Label::input(s),
    })
}

/// The configurations of `s` as sets of event indices.
fn config_sets(s: &Structure) -> BTreeSet<BTreeSet<usize>> {
    s.configs().map(|x| x.ones().collect()).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Label-preserving isomorphism of configuration families, by trying every
/// event bijection. Only for small structures.
pub fn brute_iso(s1: &Structure, s2: &Structure) -> bool {
    assert!(s1.len() <= 8, "brute force on {} events", s1.len());
    if s1.len() != s2.len() || s1.config_count() != s2.config_count() {
        return false;
    }
    let target = config_sets(s2);
    let source = config_sets(s1);
    permutations(s1.len()).into_iter().any(|p| {
        (0..s1.len()).all(|k| s1.label_of(k) == s2.label_of(p[k]))
            && source.iter().all(|x| target.contains(&x.iter().map(|&k| p[k]).collect::<BTreeSet<_>>()))
    })
}

/// Whether `s` is the family of down-closed subsets of its single maximal
/// configuration under that configuration's causal order.
pub fn is_poset_of_top(s: &Structure) -> Result<(), String> {
    let tops = s.maximal_configs();
    if tops.len() != 1 {
        return Err(format!("{} maximal configurations", tops.len()));
    }
    let top = &tops[0];
    let events: Vec<usize> = top.ones().collect();
    if events.len() != s.len() {
        return Err("some event is outside the maximal configuration".into());
    }
    let mut expected = BTreeSet::new();
    for mask in 0u32..(1 << events.len()) {
        let chosen: BTreeSet<usize> = (0..events.len()).filter(|k| mask >> k & 1 == 1).map(|k| events[k]).collect();
        let closed = chosen.iter().all(|&e| events.iter().all(|&d| !s.leq_in(top, d, e) || chosen.contains(&d)));
        if closed {
            expected.insert(chosen);
        }
    }
    if expected == config_sets(s) {
        Ok(())
    } else {
        Err(format!("{} configurations, {} down-sets", s.config_count(), expected.len()))
    }
}

#[derive(Debug, serde::Deserialize)]
pub struct Golden {
    pub process: String,
    pub events: BTreeMap<String, String>,
    pub configs: Vec<Vec<String>>,
    pub edges: Vec<(Vec<String>, Vec<String>)>,
    pub maximal: Vec<Vec<String>>,
}

impl Golden {
    pub fn load(path: &Path) -> Golden {
        let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        serde_json::from_str(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
    }

    pub fn structure(&self) -> Structure {
        let names: Vec<&String> = self.events.keys().collect();
        let id = |n: &String| EventId::Atom(names.iter().position(|m| *m == n).expect("declared event") as u32 + 1);
        let events = self.events.iter().map(|(n, l)| Event { id: id(n), label: lab(l), ident: None }).collect();
        let configs = self.configs.iter().map(|c| c.iter().map(id).collect()).collect();
        Structure::new(events, configs, false).expect("golden structure")
    }

    fn set(c: &[String]) -> BTreeSet<&String> {
        c.iter().collect()
    }

    /// The drawn edges are exactly the single-event extensions between the
    /// listed configurations.
    pub fn edges_are_coverings(&self) -> bool {
        let drawn: BTreeSet<(BTreeSet<&String>, BTreeSet<&String>)> =
            self.edges.iter().map(|(x, y)| (Self::set(x), Self::set(y))).collect();
        let mut covering = BTreeSet::new();
        for x in &self.configs {
            for y in &self.configs {
                let (sx, sy) = (Self::set(x), Self::set(y));
                if sy.len() == sx.len() + 1 && sx.is_subset(&sy) {
                    covering.insert((sx, sy));
                }
            }
        }
        drawn == covering
    }

    pub fn maximal_set(&self) -> BTreeSet<BTreeSet<&String>> {
        self.maximal.iter().map(|c| Self::set(c)).collect()
    }

    /// Maximal configurations of the listed family, by inclusion.
    pub fn computed_maximal(&self) -> BTreeSet<BTreeSet<&String>> {
        let all: Vec<BTreeSet<&String>> = self.configs.iter().map(|c| Self::set(c)).collect();
        all.iter().filter(|x| !all.iter().any(|y| x.len() < y.len() && x.is_subset(y))).cloned().collect()
    }
}

pub fn golden_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Labels of the events of `x` as a sorted list.
pub fn label_multiset(s: &Structure, x: &Config) -> Vec<String> {
    let mut v: Vec<String> = x.ones().map(|k| s.label_of(k).to_string()).collect();
    v.sort();
    v
}

/// Random restriction-free CCS processes over `{a, ~a, b}` with at most
/// `depth` nested prefixes.
pub fn ccs_strategy(depth: u32) -> impl Strategy<Value = Ccs> {
    let label = prop_oneof![Just(Label::input("a")), Just(Label::output("a")), Just(Label::input("b"))];
    let leaf = Just(Ccs::nil());
    leaf.prop_recursive(depth, 8, 2, move |inner| {
        let label = label.clone();
        prop_oneof![
            (label.clone(), inner.clone()).prop_map(|(l, p)| Ccs::prefix(l, p)),
            prop::collection::vec((label, inner.clone()), 2..=2).prop_map(Ccs::sum),
            (inner.clone(), inner).prop_map(|(p, q)| Ccs::par(p, q)),
        ]
    })
}
