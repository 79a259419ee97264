//! Small exhaustive process corpora and an interleaving-bisimilarity
//! pre-filter for cross-checking the relations on many pairs.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rccs::{Direction, LtsGraph, State};
use crate::structures::Structure;
use crate::syntax::{congruence_normal, parse_term, Ccs, Label, Term};

/// All terms over `labels` with at most `max_prefixes` prefixes and at most
/// `max_par` parallel operators, one per congruence class.
pub fn corpus(labels: &[Label], max_prefixes: usize, max_par: usize) -> Vec<Ccs> {
    let mut memo: HashMap<(usize, usize), Vec<Ccs>> = HashMap::new();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for n in 0..=max_prefixes {
        for k in 0..=max_par {
            for p in exact(labels, n, k, &mut memo) {
                if seen.insert(congruence_normal(&p)) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// The alphabet `{a, ~a, b}`.
pub fn default_labels() -> Vec<Label> {
    vec![Label::input("a"), Label::output("a"), Label::input("b")]
}

/// Terms with exactly `n` prefixes and exactly `k` parallel operators.
fn exact(labels: &[Label], n: usize, k: usize, memo: &mut HashMap<(usize, usize), Vec<Ccs>>) -> Vec<Ccs> {
    if let Some(v) = memo.get(&(n, k)) {
        return v.clone();
    }
    let mut set = BTreeSet::new();
    sums(labels, n, k, &mut Vec::new(), &mut set, memo);
    if k > 0 {
        for n1 in 1..n {
            for k1 in 0..k {
                let k2 = k - 1 - k1;
                let left = exact(labels, n1, k1, memo);
                let right = exact(labels, n - n1, k2, memo);
                for p in &left {
                    for q in &right {
                        let (a, b) = if p <= q { (p, q) } else { (q, p) };
                        set.insert(Ccs::par(a.clone(), b.clone()));
                    }
                }
            }
        }
    }
    let v: Vec<Ccs> = set.into_iter().collect();
    memo.insert((n, k), v.clone());
    v
}

/// Sums whose summands use up exactly `n` prefixes and `k` parallel
/// operators, extending the summands chosen so far.
fn sums(
    labels: &[Label],
    n: usize,
    k: usize,
    acc: &mut Vec<(Label, Ccs)>,
    out: &mut BTreeSet<Ccs>,
    memo: &mut HashMap<(usize, usize), Vec<Ccs>>,
) {
    if n == 0 {
        if k == 0 {
            out.insert(Ccs::sum(acc.clone()));
        }
        return;
    }
    for size in 1..=n {
        for kk in 0..=k {
            for body in exact(labels, size - 1, kk, memo) {
                for l in labels {
                    let summand = (l.clone(), body.clone());
                    // Summands are chosen in non-decreasing order to avoid permutations.
                    if acc.last().is_some_and(|last| *last > summand) {
                        continue;
                    }
                    acc.push(summand);
                    sums(labels, n - size, k - kk, acc, out, memo);
                    acc.pop();
                }
            }
        }
    }
}

/// A reproducible sample of `n` distinct items (all of them when `n` is
/// larger than the slice).
pub fn sample<T: Clone>(items: &[T], n: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    items.choose_multiple(&mut rng, n.min(items.len())).cloned().collect()
}

/// A state reached from `∅ ▷ p` by a seeded random walk of at most `steps`
/// transitions, mixing forward and backward moves.
pub fn random_state(p: &Ccs, steps: usize, seed: u64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = State::initial(p);
    for _ in 0..steps {
        let mut ts = s.forward_transitions();
        // Backward moves are taken less often so walks get somewhere.
        if rng.gen_bool(0.25) || ts.is_empty() {
            ts.extend(s.backward_transitions());
        }
        let Some(t) = ts.choose(&mut rng) else { break };
        s = t.target.clone();
    }
    s
}

/// Named terms with well-known verdicts. Not all of them are CCS processes:
/// the `hpb-not-hhpb` pair sums parallel compositions.
pub fn named_examples() -> Vec<(&'static str, Term)> {
    [
        ("duplicate-branch", "a.(b + b)"),
        ("duplicate-choice", "(a.b) + (a.b)"),
        ("sequential-pair-with-b", "(a.a) | b"),
        ("parallel-pair-with-b", "a | a | b"),
        ("hpb-not-hhpb-left", "(a | (b + c)) + (a | b) + ((a + c) | b)"),
        ("hpb-not-hhpb-right", "(a | (b + c)) + ((a + c) | b)"),
        ("parallel-pair", "a | a"),
        ("sequential-pair", "a.a"),
        ("auto-concurrency", "(a.b) | a"),
        ("restricted-synchronisation", "(a.b | ~a.c) \\ a"),
    ]
    .into_iter()
    .map(|(n, s)| (n, parse_term(s).expect("named example parses")))
    .collect()
}

/// Strong bisimilarity classes over the disjoint union of labelled graphs,
/// by naive partition refinement. Returns one class vector per graph.
pub fn bisimulation_classes<L: Clone + Ord + Hash>(graphs: &[Vec<Vec<(L, usize)>>]) -> Vec<Vec<usize>> {
    let offsets: Vec<usize> = graphs.iter().scan(0, |acc, g| {
        let o = *acc;
        *acc += g.len();
        Some(o)
    }).collect();
    let total: usize = graphs.iter().map(Vec::len).sum();
    let mut succ: Vec<Vec<(L, usize)>> = Vec::with_capacity(total);
    for (g, &o) in graphs.iter().zip(&offsets) {
        for edges in g {
            succ.push(edges.iter().map(|(l, d)| (l.clone(), d + o)).collect());
        }
    }
    let mut class = vec![0usize; total];
    let mut count = 1;
    loop {
        let mut ids: HashMap<(usize, BTreeSet<(L, usize)>), usize> = HashMap::new();
        let next: Vec<usize> = (0..total)
            .map(|v| {
                let sig = (class[v], succ[v].iter().map(|(l, d)| (l.clone(), class[*d])).collect());
                let fresh = ids.len();
                *ids.entry(sig).or_insert(fresh)
            })
            .collect();
        let new_count = ids.len();
        class = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    graphs.iter().zip(&offsets).map(|(g, &o)| class[o..o + g.len()].to_vec()).collect()
}

/// Forward steps of an explored graph, labelled by action.
pub fn forward_steps(g: &LtsGraph) -> Vec<Vec<(Label, usize)>> {
    let mut out = vec![Vec::new(); g.states.len()];
    for e in g.edges.iter().filter(|e| e.direction == Direction::Forward) {
        out[e.src].push((e.label.clone(), e.dst));
    }
    out
}

/// One-event extensions between configurations, labelled by the event's
/// label; the empty configuration is node 0.
pub fn extension_steps(s: &Structure) -> Vec<Vec<(String, usize)>> {
    let mut configs: Vec<_> = s.configs().cloned().collect();
    configs.sort_by_key(|x| x.count_ones(..));
    let index: HashMap<_, usize> = configs.iter().cloned().enumerate().map(|(k, x)| (x, k)).collect();
    configs
        .iter()
        .map(|x| {
            (0..s.len())
                .filter(|&e| !x.contains(e))
                .filter_map(|e| {
                    let mut y = x.clone();
                    y.insert(e);
                    index.get(&y).map(|&d| (s.label_of(e).to_string(), d))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_corpora() {
        let a = [Label::input("a")];
        let c = corpus(&a, 2, 1);
        let shown: BTreeSet<String> = c.iter().map(crate::syntax::pretty_ccs).collect();
        // 0, a, a.a, a + a, a | a
        assert_eq!(c.len(), 5, "{shown:?}");
        let full = corpus(&default_labels(), 2, 1);
        // n=0: 1; n=1: 3; n=2 sequential: 9 + 6; n=2 parallel: 6
        assert_eq!(full.len(), 25);
    }

    #[test]
    fn named_terms() {
        let named = named_examples();
        assert_eq!(named.len(), 10);
        assert_eq!(named.iter().filter(|(_, t)| t.to_ccs().is_none()).count(), 2);
    }

    #[test]
    fn sampling_is_reproducible() {
        let c = corpus(&default_labels(), 3, 1);
        assert_eq!(sample(&c, 10, 7), sample(&c, 10, 7));
        assert_eq!(sample(&c, 10_000, 1).len(), c.len());
        let p = crate::syntax::parse_ccs("a.b | ~a.c").unwrap();
        let s = random_state(&p, 5, 3);
        assert_eq!(s, random_state(&p, 5, 3));
        assert!(s.is_reachable());
    }

    #[test]
    fn refinement_separates() {
        let g1 = vec![vec![('a', 1)], vec![('b', 2), ('c', 2)], vec![]];
        let g2 = vec![vec![('a', 1), ('a', 2)], vec![('b', 3)], vec![('c', 3)], vec![]];
        let g3 = vec![vec![('a', 1), ('a', 1)], vec![('b', 2), ('c', 2)], vec![]];
        let c = bisimulation_classes(&[g1, g2, g3]);
        assert_ne!(c[0][0], c[1][0]);
        assert_eq!(c[0][0], c[2][0]);
    }
}
