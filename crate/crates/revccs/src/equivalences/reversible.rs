//! Back-and-forth bisimulations on explored reversible transition systems,
//! and history-preserving bisimulations via memory encodings.

use std::collections::{BTreeMap, HashMap};

use super::gfp::{Game, Obligation};
use super::{BisimResult, CheckError, CheckOptions, MatchTriple, Relation, Witness};
use crate::encodings::encode_state;
use crate::rccs::{Direction, Edge, LtsGraph};
use crate::structures::{iso_search_with, Ident, IsoOptions, Structure};

struct Side<'a> {
    fwd: Vec<Vec<&'a Edge>>,
    bwd: Vec<Vec<&'a Edge>>,
}

impl<'a> Side<'a> {
    fn new(g: &'a LtsGraph) -> Side<'a> {
        let mut fwd = vec![Vec::new(); g.states.len()];
        let mut bwd = vec![Vec::new(); g.states.len()];
        for e in &g.edges {
            match e.direction {
                Direction::Forward => fwd[e.src].push(e),
                Direction::Backward => bwd[e.src].push(e),
            }
        }
        Side { fwd, bwd }
    }
}

/// A memory encoding whose events are addressed by identifier.
pub(crate) struct Addressed {
    pub structure: Structure,
    pub by_ident: HashMap<u32, usize>,
}

pub(crate) fn addressed(s: Structure) -> Result<Addressed, CheckError> {
    let mut by_ident = HashMap::new();
    for (k, e) in s.events().iter().enumerate() {
        let Some(Ident::Base(i)) = e.ident else {
            return Err(CheckError::Invariant(format!("memory event {} has a compound identifier", e.id)));
        };
        if by_ident.insert(i, k).is_some() {
            return Err(CheckError::Invariant(format!("identifier {i} occurs twice in a memory encoding")));
        }
    }
    Ok(Addressed { structure: s, by_ident })
}

/// Whether the identifier bijection `f` induces a label-preserving
/// isomorphism between the two encodings.
pub(crate) fn induces_iso(a: &Addressed, b: &Addressed, f: &[(u32, u32)]) -> bool {
    let (s1, s2) = (&a.structure, &b.structure);
    if s1.len() != s2.len() || f.len() != s1.len() || s1.config_count() != s2.config_count() {
        return false;
    }
    let mut index = vec![usize::MAX; s1.len()];
    for &(i, j) in f {
        match (a.by_ident.get(&i), b.by_ident.get(&j)) {
            (Some(&k1), Some(&k2)) if s1.label_of(k1) == s2.label_of(k2) => index[k1] = k2,
            _ => return false,
        }
    }
    s1.configs().all(|x| {
        let mut y = s2.empty_config();
        for k in x.ones() {
            y.insert(index[k]);
        }
        s2.contains(&y)
    })
}

fn renamed(f: &[(u32, u32)], r1: &BTreeMap<u32, u32>, r2: &BTreeMap<u32, u32>) -> Vec<(u32, u32)> {
    let mut g: Vec<(u32, u32)> = f.iter().map(|(a, b)| (r1[a], r2[b])).collect();
    g.sort_unstable();
    g
}

fn push(f: &[(u32, u32)], pair: (u32, u32)) -> Vec<(u32, u32)> {
    let mut g = f.to_vec();
    g.push(pair);
    g
}

fn drop_pair(f: &[(u32, u32)], pair: (u32, u32)) -> Vec<(u32, u32)> {
    f.iter().copied().filter(|&p| p != pair).collect()
}

type Key = (usize, usize, Vec<(u32, u32)>);

/// Decides a relation stated on reversible processes over two explored
/// transition systems rooted at their `root`s.
pub fn check_graphs(g1: &LtsGraph, g2: &LtsGraph, relation: Relation, opts: &CheckOptions) -> Result<BisimResult, CheckError> {
    if relation.on_structures() {
        return Err(CheckError::Invariant(format!("{relation} is stated on configuration structures")));
    }
    if opts.weak && !relation.has_weak_mode() {
        return Err(CheckError::NoWeakMode(relation));
    }
    let (a, b) = (Side::new(g1), Side::new(g2));
    let weak = opts.weak;
    // Whether triples carry an identifier bijection.
    let tracked = !weak && relation != Relation::Sbf;
    let with_iso = matches!(relation, Relation::HpbRccs | Relation::HhpbRccs);
    let backward = relation.hereditary();

    let mut enc1: HashMap<usize, Addressed> = HashMap::new();
    let mut enc2: HashMap<usize, Addressed> = HashMap::new();
    let mut iso_cache: HashMap<(usize, usize), bool> = HashMap::new();
    let mut failure: Option<CheckError> = None;

    let game = Game::build((g1.root, g2.root, Vec::new()), opts.candidate_cap, |key: &Key, intern| {
        let (s1, s2, f) = (key.0, key.1, &key.2);
        let mut admissible = true;
        if with_iso && failure.is_none() {
            let load = |cache: &mut HashMap<usize, Addressed>, g: &LtsGraph, s: usize| -> Result<(), CheckError> {
                if !cache.contains_key(&s) {
                    cache.insert(s, addressed(encode_state(&g.states[s])?)?);
                }
                Ok(())
            };
            if let Err(e) = load(&mut enc1, g1, s1).and_then(|_| load(&mut enc2, g2, s2)) {
                failure = Some(e);
            } else if weak {
                admissible = *iso_cache.entry((s1, s2)).or_insert_with(|| {
                    let opts = IsoOptions { fix_labels: true, fix_idents: false };
                    iso_search_with(&enc1[&s1].structure, &enc2[&s2].structure, opts).is_some()
                });
            } else {
                admissible = induces_iso(&enc1[&s1], &enc2[&s2], f);
            }
        }
        let next = |e1: &Edge, e2: &Edge, g: Vec<(u32, u32)>| -> Key {
            (e1.dst, e2.dst, if tracked { renamed(&g, &e1.rename, &e2.rename) } else { Vec::new() })
        };
        let mut obs = Vec::new();
        for e1 in &a.fwd[s1] {
            let alts = b.fwd[s2].iter().filter(|e2| e2.label == e1.label).map(|e2| intern(next(e1, e2, push(f, (e1.id, e2.id))))).collect();
            obs.push(Obligation { clause: "left forward", what: format!("left does {}:{} reaching {}", e1.id, e1.label, g1.states[e1.dst]), alts });
        }
        for e2 in &b.fwd[s2] {
            let alts = a.fwd[s1].iter().filter(|e1| e1.label == e2.label).map(|e1| intern(next(e1, e2, push(f, (e1.id, e2.id))))).collect();
            obs.push(Obligation { clause: "right forward", what: format!("right does {}:{} reaching {}", e2.id, e2.label, g2.states[e2.dst]), alts });
        }
        if backward {
            for e1 in &a.bwd[s1] {
                let partner = if tracked { f.iter().find(|p| p.0 == e1.id).map(|p| p.1) } else { None };
                let alts = b.bwd[s2]
                    .iter()
                    .filter(|e2| e2.label == e1.label && (!tracked || Some(e2.id) == partner))
                    .map(|e2| intern(next(e1, e2, drop_pair(f, (e1.id, e2.id)))))
                    .collect();
                obs.push(Obligation { clause: "left backward", what: format!("left undoes {}:{} reaching {}", e1.id, e1.label, g1.states[e1.dst]), alts });
            }
            for e2 in &b.bwd[s2] {
                let partner = if tracked { f.iter().find(|p| p.1 == e2.id).map(|p| p.0) } else { None };
                let alts = a.bwd[s1]
                    .iter()
                    .filter(|e1| e1.label == e2.label && (!tracked || Some(e1.id) == partner))
                    .map(|e1| intern(next(e1, e2, drop_pair(f, (e1.id, e2.id)))))
                    .collect();
                obs.push(Obligation { clause: "right backward", what: format!("right undoes {}:{} reaching {}", e2.id, e2.label, g2.states[e2.dst]), alts });
            }
        }
        (admissible, obs)
    })?;
    if let Some(e) = failure {
        return Err(e);
    }

    let (alive, cause) = game.solve();
    let holds = alive[0];
    let describe = |k: &Key| format!("({}, {})", g1.states[k.0], g2.states[k.1]);
    let certificate = if holds { Vec::new() } else { game.certificate(&alive, &cause, 0, describe) };
    let survivors: Vec<&Key> = game.keys.iter().zip(&alive).filter(|(_, &v)| v).map(|(k, _)| k).collect();
    let witness = holds.then(|| Witness::States(survivors.iter().map(|k| (k.0, k.1, tracked.then(|| k.2.clone()))).collect()));
    let witness_relation = if holds {
        survivors
            .iter()
            .map(|k| MatchTriple {
                left: g1.states[k.0].to_string(),
                right: g2.states[k.1].to_string(),
                map: tracked.then(|| k.2.iter().map(|(i, j)| (i.to_string(), j.to_string())).collect()),
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(BisimResult { relation, weak, holds, candidates: game.keys.len(), witness_relation, certificate, witness })
}
