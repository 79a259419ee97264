//! Label- and order-preserving bijections between configurations.

use crate::structures::{Config, Structure};

/// Pairs `(event of x, event of y)`, sorted by the left event.
pub type LopBijection = Vec<(usize, usize)>;

/// Causal order inside a configuration, as `below[e]` = events `≤ₓ e`.
pub(crate) fn order_of(s: &Structure, x: &Config) -> Vec<Option<Config>> {
    s.down_sets(x)
}

/// Every bijection between `x ∈ C₁` and `y ∈ C₂` preserving labels and
/// reflecting and preserving the causal order.
pub fn lop_bijections(s1: &Structure, x: &Config, s2: &Structure, y: &Config) -> Vec<LopBijection> {
    let mut out = Vec::new();
    search(s1, x, s2, y, &mut |f| {
        out.push(f.to_vec());
        true
    });
    out
}

pub(crate) fn lop_exists(s1: &Structure, x: &Config, s2: &Structure, y: &Config) -> bool {
    let mut found = false;
    search(s1, x, s2, y, &mut |_| {
        found = true;
        false
    });
    found
}

/// Backtracking enumeration; `visit` returns whether to continue.
fn search(s1: &Structure, x: &Config, s2: &Structure, y: &Config, visit: &mut dyn FnMut(&[(usize, usize)]) -> bool) {
    let left: Vec<usize> = x.ones().collect();
    let right: Vec<usize> = y.ones().collect();
    if left.len() != right.len() {
        return;
    }
    let mut l1: Vec<_> = left.iter().map(|&k| s1.label_of(k)).collect();
    let mut l2: Vec<_> = right.iter().map(|&k| s2.label_of(k)).collect();
    l1.sort();
    l2.sort();
    if l1 != l2 {
        return;
    }
    let (d1, d2) = (order_of(s1, x), order_of(s2, y));
    let leq1 = |a: usize, b: usize| d1[b].as_ref().is_some_and(|d| d.contains(a));
    let leq2 = |a: usize, b: usize| d2[b].as_ref().is_some_and(|d| d.contains(a));
    let mut used = vec![false; right.len()];
    let mut cur: Vec<(usize, usize)> = Vec::with_capacity(left.len());

    fn go(
        k: usize,
        left: &[usize],
        right: &[usize],
        used: &mut [bool],
        cur: &mut Vec<(usize, usize)>,
        fits: &dyn Fn(&[(usize, usize)], usize, usize) -> bool,
        visit: &mut dyn FnMut(&[(usize, usize)]) -> bool,
    ) -> bool {
        if k == left.len() {
            return visit(cur);
        }
        let e1 = left[k];
        for (j, &e2) in right.iter().enumerate() {
            if used[j] || !fits(cur, e1, e2) {
                continue;
            }
            used[j] = true;
            cur.push((e1, e2));
            let more = go(k + 1, left, right, used, cur, fits, visit);
            cur.pop();
            used[j] = false;
            if !more {
                return false;
            }
        }
        true
    }

    let fits = |cur: &[(usize, usize)], e1: usize, e2: usize| {
        s1.label_of(e1) == s2.label_of(e2)
            && cur.iter().all(|&(a1, a2)| leq1(a1, e1) == leq2(a2, e2) && leq1(e1, a1) == leq2(e2, a2))
    };
    go(0, &left, &right, &mut used, &mut cur, &fits, visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::encode_ccs;
    use crate::syntax::parse_ccs;

    fn den(s: &str) -> Structure {
        encode_ccs(&parse_ccs(s).unwrap())
    }

    fn top(s: &Structure) -> Config {
        s.maximal_configs().into_iter().max_by_key(|x| x.count_ones(..)).unwrap()
    }

    /// Brute force over all permutations, checking the two order directions
    /// with `leq_in`.
    fn oracle(s1: &Structure, x: &Config, s2: &Structure, y: &Config) -> usize {
        let left: Vec<usize> = x.ones().collect();
        let right: Vec<usize> = y.ones().collect();
        if left.len() != right.len() {
            return 0;
        }
        let mut perm: Vec<usize> = (0..right.len()).collect();
        let mut count = 0;
        loop {
            let f = |k: usize| right[perm[k]];
            let ok = (0..left.len()).all(|i| s1.label_of(left[i]) == s2.label_of(f(i)))
                && (0..left.len()).all(|i| {
                    (0..left.len()).all(|j| s1.leq_in(x, left[i], left[j]) == s2.leq_in(y, f(i), f(j)))
                });
            count += ok as usize;
            // next permutation
            let Some(i) = (1..perm.len()).rev().find(|&i| perm[i - 1] < perm[i]) else { break };
            let j = (i..perm.len()).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
            perm.swap(i - 1, j);
            perm[i..].reverse();
        }
        count
    }

    #[test]
    fn counts_agree_with_brute_force() {
        let cases = [("0", "0"), ("a", "a"), ("a | a", "a | a"), ("a.a", "a | a"), ("(a.b) | a", "a.b | a"), ("a.b | b.a", "a | b.a"), ("a | a | b", "(a.a) | b")];
        for (p, q) in cases {
            let (s1, s2) = (den(p), den(q));
            for x in s1.configs() {
                for y in s2.configs() {
                    assert_eq!(lop_bijections(&s1, x, &s2, y).len(), oracle(&s1, x, &s2, y), "{p} {q}");
                    assert_eq!(lop_exists(&s1, x, &s2, y), oracle(&s1, x, &s2, y) > 0);
                }
            }
        }
    }

    #[test]
    fn named_cases() {
        let z = den("0");
        assert_eq!(lop_bijections(&z, &z.empty_config(), &z, &z.empty_config()), vec![Vec::<(usize, usize)>::new()]);
        let a = den("a");
        assert_eq!(lop_bijections(&a, &top(&a), &a, &top(&a)).len(), 1);
        let aa = den("a | a");
        assert_eq!(lop_bijections(&aa, &top(&aa), &aa, &top(&aa)).len(), 2);
        let seq = den("a.a");
        assert!(lop_bijections(&aa, &top(&aa), &seq, &top(&seq)).is_empty());
    }
}
