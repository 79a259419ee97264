//! Bound-name renaming and the structural congruence on CCS terms.

use std::collections::BTreeSet;

use super::{Ccs, Name};

/// Smallest extension of `base` (by trailing `_`) such that no name in
/// `avoid` has the form `prefix` followed by digits.
pub(crate) fn binder_prefix<'a>(base: &str, avoid: impl IntoIterator<Item = &'a Name> + Clone) -> String {
    let mut prefix = base.to_string();
    loop {
        let clash = avoid.clone().into_iter().any(|n| {
            n.as_str()
                .strip_prefix(prefix.as_str())
                .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
        });
        if !clash {
            return prefix;
        }
        prefix.push('_');
    }
}

/// Renames the free occurrences of `from` to `to`, renaming binders on the
/// way when they would capture `to`.
pub fn rename_free(p: &Ccs, from: &Name, to: &Name) -> Ccs {
    if from == to {
        return p.clone();
    }
    match p {
        Ccs::Sum(s) => Ccs::sum(
            s.iter()
                .map(|(l, q)| (l.map_name(|n| if n == from { to.clone() } else { n.clone() }), rename_free(q, from, to)))
                .collect(),
        ),
        Ccs::Par(l, r) => Ccs::par(rename_free(l, from, to), rename_free(r, from, to)),
        Ccs::Restrict(body, a) if a == from => Ccs::Restrict(body.clone(), a.clone()),
        Ccs::Restrict(body, a) if a == to => {
            if !body.free_names().contains(from) {
                return p.clone();
            }
            let mut used = BTreeSet::new();
            body.all_names(&mut used);
            used.insert(from.clone());
            used.insert(to.clone());
            let fresh = fresh_name(a.as_str(), &used);
            let body = rename_free(body, a, &fresh);
            Ccs::restrict(rename_free(&body, from, to), fresh)
        }
        Ccs::Restrict(body, a) => Ccs::restrict(rename_free(body, from, to), a.clone()),
    }
}

fn fresh_name(base: &str, used: &BTreeSet<Name>) -> Name {
    (0..)
        .map(|k| Name(format!("{base}{k}")))
        .find(|n| !used.contains(n))
        .expect("unbounded supply")
}

/// Renames every binder to `prefix` followed by its nesting depth.
fn canon_binders(p: &Ccs, prefix: &str, env: &mut Vec<(Name, Name)>) -> Ccs {
    let look = |n: &Name, env: &[(Name, Name)]| {
        env.iter().rev().find(|(o, _)| o == n).map_or_else(|| n.clone(), |(_, m)| m.clone())
    };
    match p {
        Ccs::Sum(s) => Ccs::sum(
            s.iter()
                .map(|(l, q)| (l.map_name(|n| look(n, env)), canon_binders(q, prefix, env)))
                .collect(),
        ),
        Ccs::Par(l, r) => Ccs::par(canon_binders(l, prefix, env), canon_binders(r, prefix, env)),
        Ccs::Restrict(body, a) => {
            let fresh = Name(format!("{prefix}{}", env.len()));
            env.push((a.clone(), fresh.clone()));
            let b = canon_binders(body, prefix, env);
            env.pop();
            Ccs::restrict(b, fresh)
        }
    }
}

/// Canonical representative of the alpha-equivalence class.
pub fn alpha_normal(p: &Ccs) -> Ccs {
    let free = p.free_names();
    canon_binders(p, &binder_prefix("q", &free), &mut Vec::new())
}

pub fn alpha_eq(p: &Ccs, q: &Ccs) -> bool {
    let free: BTreeSet<Name> = p.free_names().into_iter().chain(q.free_names()).collect();
    let prefix = binder_prefix("q", &free);
    canon_binders(p, &prefix, &mut Vec::new()) == canon_binders(q, &prefix, &mut Vec::new())
}

fn ac(p: &Ccs, drop_nil: bool) -> Ccs {
    match p {
        Ccs::Sum(s) => Ccs::sum(s.iter().map(|(l, q)| (l.clone(), ac(q, drop_nil))).collect()),
        Ccs::Par(..) => {
            let mut parts: Vec<Ccs> = p.par_components().into_iter().map(|q| ac(q, drop_nil)).collect();
            if drop_nil {
                parts.retain(|q| !q.is_nil());
            }
            parts.sort();
            Ccs::par_all(parts)
        }
        Ccs::Restrict(body, a) => Ccs::restrict(ac(body, drop_nil), a.clone()),
    }
}

/// Normal form for the congruence generated by alpha-conversion,
/// associativity and commutativity of `|` and `+`, and `P | 0 = P`.
pub fn congruence_normal(p: &Ccs) -> Ccs {
    ac(&alpha_normal(p), true)
}

pub fn ccs_congruent(p: &Ccs, q: &Ccs) -> bool {
    p.free_names() == q.free_names() && congruence_normal(p) == congruence_normal(q)
}
