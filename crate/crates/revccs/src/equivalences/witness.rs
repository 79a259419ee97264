//! Independent re-checking of witness relations: every triple must satisfy
//! its clauses using only triples of the witness itself. Transitions are
//! recomputed from the states, and orders from `leq_in`, so the check shares
//! no tables with the solvers.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::{Relation, Witness};
use crate::encodings::encode_state;
use crate::rccs::{Direction, LtsGraph, State, Transition};
use crate::structures::{iso_search_with, Config, Ident, IsoOptions, Structure};

fn is_lop(s1: &Structure, x: &Config, s2: &Structure, y: &Config, f: &[(usize, usize)]) -> bool {
    let left: BTreeSet<usize> = f.iter().map(|p| p.0).collect();
    let right: BTreeSet<usize> = f.iter().map(|p| p.1).collect();
    left == x.ones().collect() && right == y.ones().collect() && left.len() == f.len() && right.len() == f.len()
        && f.iter().all(|&(a, b)| s1.label_of(a) == s2.label_of(b))
        && f.iter().all(|&(a1, b1)| f.iter().all(|&(a2, b2)| s1.leq_in(x, a1, a2) == s2.leq_in(y, b1, b2)))
}

/// Exhaustive search for some l&o-p bijection.
fn some_lop(s1: &Structure, x: &Config, s2: &Structure, y: &Config) -> bool {
    fn go(k: usize, l: &[usize], r: &[usize], used: &mut Vec<bool>, cur: &mut Vec<(usize, usize)>, ok: &dyn Fn(&[(usize, usize)]) -> bool) -> bool {
        if k == l.len() {
            return ok(cur);
        }
        for j in 0..r.len() {
            if !used[j] {
                used[j] = true;
                cur.push((l[k], r[j]));
                let found = go(k + 1, l, r, used, cur, ok);
                cur.pop();
                used[j] = false;
                if found {
                    return true;
                }
            }
        }
        false
    }
    let (l, r): (Vec<usize>, Vec<usize>) = (x.ones().collect(), y.ones().collect());
    if l.len() != r.len() {
        return false;
    }
    go(0, &l, &r, &mut vec![false; r.len()], &mut Vec::new(), &|f| {
        let mut g = f.to_vec();
        g.sort_unstable();
        is_lop(s1, x, s2, y, &g)
    })
}

fn plus(x: &Config, e: usize) -> Config {
    let mut y = x.clone();
    y.insert(e);
    y
}

fn minus(x: &Config, e: usize) -> Config {
    let mut y = x.clone();
    y.set(e, false);
    y
}

fn sorted(mut f: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    f.sort_unstable();
    f
}

pub fn validate_structure_witness(c1: &Structure, c2: &Structure, hereditary: bool, weak: bool, w: &Witness) -> Result<(), String> {
    let Witness::Configs(triples) = w else {
        return Err("expected a witness over configurations".into());
    };
    let set: HashSet<(Config, Config, Option<Vec<(usize, usize)>>)> =
        triples.iter().map(|(x, y, f)| (x.clone(), y.clone(), f.as_ref().map(|f| sorted(f.clone())))).collect();
    let root = (c1.empty_config(), c2.empty_config(), (!weak).then(Vec::new));
    if !set.contains(&root) {
        return Err("the root triple is missing".into());
    }
    let key = |x: Config, y: Config, f: Option<Vec<(usize, usize)>>| (x, y, f.map(sorted));
    for (x1, x2, f) in &set {
        let show = || format!("({}, {})", c1.config_literal(x1), c2.config_literal(x2));
        if !c1.contains(x1) || !c2.contains(x2) {
            return Err(format!("{} is not a pair of configurations", show()));
        }
        match f {
            Some(f) if !is_lop(c1, x1, c2, x2, f) => return Err(format!("{} carries a map that is not l&o-p", show())),
            None if weak && !some_lop(c1, x1, c2, x2) => return Err(format!("{} admits no l&o-p bijection", show())),
            None if !weak => return Err("a strong witness needs maps".into()),
            _ => {}
        }
        let image = |e1: usize| f.as_ref().and_then(|f| f.iter().find(|p| p.0 == e1).map(|p| p.1));
        let preimage = |e2: usize| f.as_ref().and_then(|f| f.iter().find(|p| p.1 == e2).map(|p| p.0));
        let ext = |s: &Structure, x: &Config| (0..s.len()).filter(|&e| !x.contains(e) && s.contains(&plus(x, e))).collect::<Vec<_>>();
        let red = |s: &Structure, x: &Config| x.ones().filter(|&e| s.contains(&minus(x, e))).collect::<Vec<_>>();
        let grow = |e1: usize, e2: usize| f.as_ref().map(|f| [f.as_slice(), &[(e1, e2)]].concat());
        let shrink = |e1: usize, e2: usize| f.as_ref().map(|f| f.iter().copied().filter(|&p| p != (e1, e2)).collect());
        for e1 in ext(c1, x1) {
            if !ext(c2, x2).into_iter().any(|e2| set.contains(&key(plus(x1, e1), plus(x2, e2), grow(e1, e2)))) {
                return Err(format!("{}: left forward move on {} unmatched", show(), c1.event(e1).id));
            }
        }
        for e2 in ext(c2, x2) {
            if !ext(c1, x1).into_iter().any(|e1| set.contains(&key(plus(x1, e1), plus(x2, e2), grow(e1, e2)))) {
                return Err(format!("{}: right forward move on {} unmatched", show(), c2.event(e2).id));
            }
        }
        if hereditary {
            for e1 in red(c1, x1) {
                let answers: Vec<usize> = if weak { red(c2, x2) } else { image(e1).into_iter().collect() };
                if !answers.into_iter().any(|e2| set.contains(&key(minus(x1, e1), minus(x2, e2), shrink(e1, e2)))) {
                    return Err(format!("{}: left backward move on {} unmatched", show(), c1.event(e1).id));
                }
            }
            for e2 in red(c2, x2) {
                let answers: Vec<usize> = if weak { red(c1, x1) } else { preimage(e2).into_iter().collect() };
                if !answers.into_iter().any(|e1| set.contains(&key(minus(x1, e1), minus(x2, e2), shrink(e1, e2)))) {
                    return Err(format!("{}: right backward move on {} unmatched", show(), c2.event(e2).id));
                }
            }
        }
    }
    Ok(())
}

/// Identifier-addressed encodings as sets of identifier sets.
fn ident_shape(s: &State) -> Result<(BTreeMap<u32, String>, BTreeSet<BTreeSet<u32>>), String> {
    let enc = encode_state(s).map_err(|e| e.to_string())?;
    let ident = |k: usize| match enc.ident_of(k) {
        Some(Ident::Base(i)) => Ok(*i),
        other => Err(format!("unexpected identifier {other:?}")),
    };
    let mut labels = BTreeMap::new();
    for k in 0..enc.len() {
        labels.insert(ident(k)?, enc.label_of(k).to_string());
    }
    let mut configs = BTreeSet::new();
    for x in enc.configs() {
        configs.insert(x.ones().map(ident).collect::<Result<_, _>>()?);
    }
    Ok((labels, configs))
}

pub fn validate_rccs_witness(g1: &LtsGraph, g2: &LtsGraph, relation: Relation, weak: bool, w: &Witness) -> Result<(), String> {
    let Witness::States(triples) = w else {
        return Err("expected a witness over states".into());
    };
    let tracked = !weak && relation != Relation::Sbf;
    let with_iso = matches!(relation, Relation::HpbRccs | Relation::HhpbRccs);
    let index = |g: &LtsGraph| -> HashMap<State, usize> { g.states.iter().cloned().enumerate().map(|(k, s)| (s, k)).collect() };
    let (i1, i2) = (index(g1), index(g2));
    let set: HashSet<(usize, usize, Option<Vec<(u32, u32)>>)> = triples.iter().cloned().collect();
    if !set.contains(&(g1.root, g2.root, tracked.then(Vec::new))) {
        return Err("the root triple is missing".into());
    }
    // Target index and identifier renaming of a recomputed transition.
    let land = |t: &Transition, idx: &HashMap<State, usize>| -> Result<(usize, BTreeMap<u32, u32>), String> {
        let (canon, rename) = t.target.canonical_ids();
        idx.get(&canon).map(|&k| (k, rename)).ok_or_else(|| format!("target {} is outside the explored graph", t.target))
    };
    let key = |t1: &Transition, t2: &Transition, f: Option<Vec<(u32, u32)>>| -> Result<(usize, usize, Option<Vec<(u32, u32)>>), String> {
        let (d1, r1) = land(t1, &i1)?;
        let (d2, r2) = land(t2, &i2)?;
        let f = f.map(|f| {
            let mut g: Vec<(u32, u32)> = f.iter().map(|(a, b)| (r1[a], r2[b])).collect();
            g.sort_unstable();
            g
        });
        Ok((d1, d2, f))
    };
    for (s1, s2, f) in &set {
        let (p1, p2) = (&g1.states[*s1], &g2.states[*s2]);
        let show = || format!("({p1}, {p2})");
        if tracked != f.is_some() {
            return Err(format!("{}: map presence does not fit the relation", show()));
        }
        if let Some(f) = f {
            let dom: BTreeSet<u32> = f.iter().map(|p| p.0).collect();
            let cod: BTreeSet<u32> = f.iter().map(|p| p.1).collect();
            if dom != p1.ids() || cod != p2.ids() || dom.len() != f.len() || cod.len() != f.len() {
                return Err(format!("{}: map is not a bijection between identifiers", show()));
            }
        }
        if with_iso {
            let (l1, c1) = ident_shape(p1)?;
            let (l2, c2) = ident_shape(p2)?;
            match f {
                Some(f) => {
                    let m: BTreeMap<u32, u32> = f.iter().copied().collect();
                    let labels_ok = l1.iter().all(|(i, l)| m.get(i).and_then(|j| l2.get(j)) == Some(l));
                    let mapped: BTreeSet<BTreeSet<u32>> = c1.iter().map(|x| x.iter().map(|i| m[i]).collect()).collect();
                    if !labels_ok || l1.len() != l2.len() || mapped != c2 {
                        return Err(format!("{}: map does not induce an isomorphism of encodings", show()));
                    }
                }
                None => {
                    let (e1, e2) = (encode_state(p1).map_err(|e| e.to_string())?, encode_state(p2).map_err(|e| e.to_string())?);
                    if iso_search_with(&e1, &e2, IsoOptions { fix_labels: true, fix_idents: false }).is_none() {
                        return Err(format!("{}: encodings are not isomorphic", show()));
                    }
                }
            }
        }
        let grow = |i: u32, j: u32| f.as_ref().map(|f| [f.as_slice(), &[(i, j)]].concat());
        let shrink = |i: u32, j: u32| f.as_ref().map(|f| f.iter().copied().filter(|&p| p != (i, j)).collect::<Vec<_>>());
        let (fw1, fw2) = (p1.forward_transitions(), p2.forward_transitions());
        for t1 in &fw1 {
            let mut ok = false;
            for t2 in fw2.iter().filter(|t2| t2.label == t1.label) {
                ok |= set.contains(&key(t1, t2, grow(t1.id, t2.id))?);
            }
            if !ok {
                return Err(format!("{}: left forward {}:{} unmatched", show(), t1.id, t1.label));
            }
        }
        for t2 in &fw2 {
            let mut ok = false;
            for t1 in fw1.iter().filter(|t1| t1.label == t2.label) {
                ok |= set.contains(&key(t1, t2, grow(t1.id, t2.id))?);
            }
            if !ok {
                return Err(format!("{}: right forward {}:{} unmatched", show(), t2.id, t2.label));
            }
        }
        if relation.hereditary() {
            let (bw1, bw2) = (p1.backward_transitions(), p2.backward_transitions());
            for (mine, theirs, left) in [(&bw1, &bw2, true), (&bw2, &bw1, false)] {
                for t in mine {
                    let mut ok = false;
                    for u in theirs.iter().filter(|u| u.label == t.label && u.direction == Direction::Backward) {
                        let (t1, t2) = if left { (t, u) } else { (u, t) };
                        if tracked && !f.as_ref().is_some_and(|f| f.contains(&(t1.id, t2.id))) {
                            continue;
                        }
                        ok |= set.contains(&key(t1, t2, shrink(t1.id, t2.id))?);
                    }
                    if !ok {
                        let side = if left { "left" } else { "right" };
                        return Err(format!("{}: {side} backward {}:{} unmatched", show(), t.id, t.label));
                    }
                }
            }
        }
    }
    Ok(())
}
