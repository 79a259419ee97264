//! Greatest fixed points over finite candidate sets.
//!
//! Every candidate carries obligations; an obligation is a disjunction of
//! successor candidates. A candidate survives when it is admissible and each
//! of its obligations keeps at least one surviving successor.

use std::collections::HashMap;
use std::hash::Hash;

#[derive(Clone, Debug)]
pub(crate) struct Obligation {
    pub clause: &'static str,
    pub what: String,
    pub alts: Vec<usize>,
}

/// Candidates discovered from a root by following obligations.
pub(crate) struct Game<K> {
    pub keys: Vec<K>,
    index: HashMap<K, usize>,
    pub admissible: Vec<bool>,
    pub obligations: Vec<Vec<Obligation>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GfpError {
    TooManyCandidates(usize),
}

impl<K: Clone + Eq + Hash> Game<K> {
    /// Explores from `root`. `expand` returns whether a candidate is
    /// admissible and its obligations, interning successors through the
    /// supplied callback.
    pub fn build(
        root: K,
        cap: usize,
        mut expand: impl FnMut(&K, &mut dyn FnMut(K) -> usize) -> (bool, Vec<Obligation>),
    ) -> Result<Game<K>, GfpError> {
        let mut game = Game { keys: vec![root.clone()], index: HashMap::from([(root, 0)]), admissible: Vec::new(), obligations: Vec::new() };
        let mut next = 0;
        while next < game.keys.len() {
            let key = game.keys[next].clone();
            let (keys, index) = (&mut game.keys, &mut game.index);
            let mut intern = |k: K| -> usize {
                if let Some(&i) = index.get(&k) {
                    return i;
                }
                keys.push(k.clone());
                index.insert(k, keys.len() - 1);
                keys.len() - 1
            };
            let (ok, obs) = expand(&key, &mut intern);
            if game.keys.len() > cap {
                return Err(GfpError::TooManyCandidates(cap));
            }
            game.admissible.push(ok);
            game.obligations.push(obs);
            next += 1;
        }
        Ok(game)
    }

    /// Prunes to the greatest fixed point. Returns survival flags and, for
    /// pruned admissible candidates, the obligation that failed.
    pub fn solve(&self) -> (Vec<bool>, Vec<Option<usize>>) {
        let n = self.keys.len();
        let mut alive = self.admissible.clone();
        let mut cause = vec![None; n];
        let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        let mut count: Vec<Vec<usize>> = Vec::with_capacity(n);
        for (v, obs) in self.obligations.iter().enumerate() {
            let mut c = Vec::with_capacity(obs.len());
            for (o, ob) in obs.iter().enumerate() {
                for &w in &ob.alts {
                    preds[w].push((v, o));
                }
                c.push(ob.alts.iter().filter(|&&w| self.admissible[w]).count());
            }
            count.push(c);
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| !alive[v]).collect();
        for v in 0..n {
            if alive[v] {
                if let Some(o) = count[v].iter().position(|&c| c == 0) {
                    alive[v] = false;
                    cause[v] = Some(o);
                    queue.push(v);
                }
            }
        }
        let mut dead_counted = vec![false; n];
        for v in 0..n {
            // Inadmissible candidates were never counted as live successors.
            dead_counted[v] = !self.admissible[v];
        }
        while let Some(w) = queue.pop() {
            if !dead_counted[w] {
                dead_counted[w] = true;
                for &(v, o) in &preds[w] {
                    count[v][o] -= 1;
                    if alive[v] && count[v][o] == 0 {
                        alive[v] = false;
                        cause[v] = Some(o);
                        queue.push(v);
                    }
                }
            }
        }
        (alive, cause)
    }

    /// Follows failed obligations from `root` and renders them.
    pub fn certificate(&self, alive: &[bool], cause: &[Option<usize>], root: usize, describe: impl Fn(&K) -> String) -> Vec<String> {
        let mut out = Vec::new();
        let mut v = root;
        let mut seen = vec![false; self.keys.len()];
        while !alive[v] && !seen[v] {
            seen[v] = true;
            match cause[v] {
                None => {
                    out.push(format!("{} is not a valid match", describe(&self.keys[v])));
                    break;
                }
                Some(o) => {
                    let ob = &self.obligations[v][o];
                    out.push(format!("{}: {} ({} candidate answers, none survive)", ob.clause, ob.what, ob.alts.len()));
                    match ob.alts.first() {
                        Some(&w) => v = w,
                        None => break,
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain strong bisimulation on two tiny labelled graphs.
    #[test]
    fn bisimulation_game() {
        // a.(b + c) against a.b + a.c
        let g1: Vec<Vec<(char, usize)>> = vec![vec![('a', 1)], vec![('b', 2), ('c', 2)], vec![]];
        let g2: Vec<Vec<(char, usize)>> = vec![vec![('a', 1), ('a', 2)], vec![('b', 3)], vec![('c', 3)], vec![]];
        let game = Game::build((0usize, 0usize), 100, |&(p, q), intern| {
            let mut obs = Vec::new();
            for &(l, p2) in &g1[p] {
                let alts = g2[q].iter().filter(|(m, _)| *m == l).map(|&(_, q2)| intern((p2, q2))).collect();
                obs.push(Obligation { clause: "left", what: l.to_string(), alts });
            }
            for &(l, q2) in &g2[q] {
                let alts = g1[p].iter().filter(|(m, _)| *m == l).map(|&(_, p2)| intern((p2, q2))).collect();
                obs.push(Obligation { clause: "right", what: l.to_string(), alts });
            }
            (true, obs)
        })
        .unwrap();
        let (alive, cause) = game.solve();
        assert!(!alive[0]);
        assert!(!game.certificate(&alive, &cause, 0, |k| format!("{k:?}")).is_empty());
        let same = Game::build(0usize, 10, |&p, intern| {
            let obs = g1[p].iter().map(|&(l, p2)| Obligation { clause: "c", what: l.to_string(), alts: vec![intern(p2)] }).collect();
            (true, obs)
        })
        .unwrap();
        assert!(same.solve().0.iter().all(|&b| b));
    }
}
