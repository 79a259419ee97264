//! (Hereditary) history-preserving bisimulation between configuration
//! structures.

use std::collections::HashMap;

use super::gfp::{Game, Obligation};
use super::lop::{lop_exists, order_of};
use super::{BisimResult, CheckError, CheckOptions, MatchTriple, Relation, Witness};
use crate::structures::{Config, Structure};

/// Configurations with their one-event extensions and causal orders.
pub(crate) struct Space<'a> {
    pub s: &'a Structure,
    pub configs: Vec<Config>,
    pub index: HashMap<Config, usize>,
    /// `(event, target)` pairs with `target = x ∪ {event}`.
    pub ext: Vec<Vec<(usize, usize)>>,
    /// `(event, target)` pairs with `target = x \ {event}`.
    pub red: Vec<Vec<(usize, usize)>>,
    below: Vec<Vec<Option<Config>>>,
}

impl<'a> Space<'a> {
    pub fn new(s: &'a Structure) -> Space<'a> {
        let configs: Vec<Config> = s.configs().cloned().collect();
        let index: HashMap<Config, usize> = configs.iter().cloned().enumerate().map(|(k, x)| (x, k)).collect();
        let mut ext = vec![Vec::new(); configs.len()];
        let mut red = vec![Vec::new(); configs.len()];
        for (c, x) in configs.iter().enumerate() {
            for e in 0..s.len() {
                if x.contains(e) {
                    continue;
                }
                let mut y = x.clone();
                y.insert(e);
                if let Some(&d) = index.get(&y) {
                    ext[c].push((e, d));
                    red[d].push((e, c));
                }
            }
        }
        let below = configs.iter().map(|x| order_of(s, x)).collect();
        Space { s, configs, index, ext, red, below }
    }

    pub fn leq(&self, c: usize, d: usize, e: usize) -> bool {
        self.below[c][e].as_ref().is_some_and(|b| b.contains(d))
    }

    fn describe(&self, c: usize) -> String {
        self.s.config_literal(&self.configs[c])
    }

    fn event_name(&self, e: usize) -> String {
        format!("{}:{}", self.s.event(e).id, self.s.label_of(e))
    }
}

type Key = (usize, usize, Vec<(usize, usize)>);

fn without(f: &[(usize, usize)], pair: (usize, usize)) -> Vec<(usize, usize)> {
    f.iter().copied().filter(|&p| p != pair).collect()
}

fn with(f: &[(usize, usize)], pair: (usize, usize)) -> Vec<(usize, usize)> {
    let mut g = f.to_vec();
    let at = g.partition_point(|p| p.0 < pair.0);
    g.insert(at, pair);
    g
}

/// `f ∪ {e1 ↦ e2}` is order preserving and reflecting between the extended
/// configurations, given that `f` is between the smaller ones.
fn extends(sp1: &Space, y1: usize, e1: usize, sp2: &Space, y2: usize, e2: usize, f: &[(usize, usize)]) -> bool {
    sp1.s.label_of(e1) == sp2.s.label_of(e2) && f.iter().all(|&(d1, d2)| sp1.leq(y1, d1, e1) == sp2.leq(y2, d2, e2))
}

pub fn check_structures(c1: &Structure, c2: &Structure, hereditary: bool, opts: &CheckOptions) -> Result<BisimResult, CheckError> {
    let (sp1, sp2) = (Space::new(c1), Space::new(c2));
    let relation = if hereditary { Relation::Hhpb } else { Relation::Hpb };
    let root = (sp1.index[&c1.empty_config()], sp2.index[&c2.empty_config()], Vec::new());
    let weak = opts.weak;
    let mut lop_cache: HashMap<(usize, usize), bool> = HashMap::new();

    let game = Game::build(root.clone(), opts.candidate_cap, |key: &Key, intern| {
        let (x1, x2, f) = (key.0, key.1, &key.2);
        let admissible = !weak || *lop_cache.entry((x1, x2)).or_insert_with(|| lop_exists(c1, &sp1.configs[x1], c2, &sp2.configs[x2]));
        let mut obs = Vec::new();
        for &(e1, y1) in &sp1.ext[x1] {
            let alts = sp2.ext[x2]
                .iter()
                .filter(|&&(e2, y2)| if weak { c1.label_of(e1) == c2.label_of(e2) } else { extends(&sp1, y1, e1, &sp2, y2, e2, f) })
                .map(|&(e2, y2)| intern((y1, y2, if weak { Vec::new() } else { with(f, (e1, e2)) })))
                .collect();
            obs.push(Obligation { clause: "left forward", what: format!("left adds {} reaching {}", sp1.event_name(e1), sp1.describe(y1)), alts });
        }
        for &(e2, y2) in &sp2.ext[x2] {
            let alts = sp1.ext[x1]
                .iter()
                .filter(|&&(e1, y1)| if weak { c1.label_of(e1) == c2.label_of(e2) } else { extends(&sp1, y1, e1, &sp2, y2, e2, f) })
                .map(|&(e1, y1)| intern((y1, y2, if weak { Vec::new() } else { with(f, (e1, e2)) })))
                .collect();
            obs.push(Obligation { clause: "right forward", what: format!("right adds {} reaching {}", sp2.event_name(e2), sp2.describe(y2)), alts });
        }
        if hereditary {
            for &(e1, y1) in &sp1.red[x1] {
                let alts = if weak {
                    sp2.red[x2]
                        .iter()
                        .filter(|&&(e2, _)| c1.label_of(e1) == c2.label_of(e2))
                        .map(|&(_, y2)| intern((y1, y2, Vec::new())))
                        .collect()
                } else {
                    let e2 = f.iter().find(|p| p.0 == e1).expect("bijection covers the configuration").1;
                    sp2.red[x2].iter().filter(|p| p.0 == e2).map(|&(_, y2)| intern((y1, y2, without(f, (e1, e2))))).collect()
                };
                obs.push(Obligation { clause: "left backward", what: format!("left removes {} reaching {}", sp1.event_name(e1), sp1.describe(y1)), alts });
            }
            for &(e2, y2) in &sp2.red[x2] {
                let alts = if weak {
                    sp1.red[x1]
                        .iter()
                        .filter(|&&(e1, _)| c1.label_of(e1) == c2.label_of(e2))
                        .map(|&(_, y1)| intern((y1, y2, Vec::new())))
                        .collect()
                } else {
                    let e1 = f.iter().find(|p| p.1 == e2).expect("bijection covers the configuration").0;
                    sp1.red[x1].iter().filter(|p| p.0 == e1).map(|&(_, y1)| intern((y1, y2, without(f, (e1, e2))))).collect()
                };
                obs.push(Obligation { clause: "right backward", what: format!("right removes {} reaching {}", sp2.event_name(e2), sp2.describe(y2)), alts });
            }
        }
        (admissible, obs)
    })?;

    let (alive, cause) = game.solve();
    let holds = alive[0];
    let describe = |k: &Key| format!("({}, {})", sp1.describe(k.0), sp2.describe(k.1));
    let certificate = if holds { Vec::new() } else { game.certificate(&alive, &cause, 0, describe) };
    let survivors: Vec<&Key> = game.keys.iter().zip(&alive).filter(|(_, &a)| a).map(|(k, _)| k).collect();
    let witness = holds.then(|| {
        Witness::Configs(
            survivors
                .iter()
                .map(|k| (sp1.configs[k.0].clone(), sp2.configs[k.1].clone(), (!weak).then(|| k.2.clone())))
                .collect(),
        )
    });
    let witness_relation = if holds {
        survivors
            .iter()
            .map(|k| MatchTriple {
                left: sp1.describe(k.0),
                right: sp2.describe(k.1),
                map: (!weak).then(|| k.2.iter().map(|&(a, b)| (sp1.event_name(a), sp2.event_name(b))).collect()),
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(BisimResult { relation, weak, holds, candidates: game.keys.len(), witness_relation, certificate, witness })
}
