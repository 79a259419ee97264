//! Normal forms for RCCS terms.
//!
//! A [`State`] is a flat term `(T₁ | … | Tₙ) \ b₁ … bₖ`: every restriction is
//! floated to the top with a fresh name, every thread's code is a guarded sum,
//! forks are fully distributed and consecutive fork markers are collapsed.
//! Threads are kept sorted and bound names are chosen canonically, so equality
//! of states decides the congruence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use super::{MemEvent, MemItem, Memory, RccsError, RccsProcess};
use crate::syntax::{binder_prefix, Ccs, Label, Name};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Thread {
    pub mem: Memory,
    /// Always a (possibly empty) guarded sum without restrictions.
    pub code: Ccs,
}

impl Thread {
    pub fn summands(&self) -> &[(Label, Ccs)] {
        match &self.code {
            Ccs::Sum(s) => s,
            _ => unreachable!("thread code is a sum"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    pub bound: Vec<Name>,
    pub threads: Vec<Thread>,
}

/// Renames names and identifiers in restriction-free code, restoring the
/// sorted sum / parallel order.
fn map_ccs(p: &Ccs, f: &dyn Fn(&Name) -> Name) -> Ccs {
    match p {
        Ccs::Sum(s) => Ccs::sum(s.iter().map(|(l, q)| (l.map_name(f), map_ccs(q, f))).collect()),
        Ccs::Par(..) => {
            let mut parts: Vec<Ccs> = p.par_components().into_iter().map(|q| map_ccs(q, f)).collect();
            parts.sort();
            Ccs::par_all(parts)
        }
        Ccs::Restrict(q, a) => Ccs::restrict(map_ccs(q, f), f(a)),
    }
}

fn map_memory(m: &Memory, f: &dyn Fn(&Name) -> Name, g: &dyn Fn(u32) -> u32) -> Memory {
    Memory(
        m.0.iter()
            .map(|it| match it {
                MemItem::Fork => MemItem::Fork,
                MemItem::Event(e) => MemItem::Event(MemEvent {
                    id: g(e.id),
                    label: e.label.map_name(f),
                    alt: map_ccs(&e.alt, f),
                }),
            })
            .collect(),
    )
}

fn map_thread(t: &Thread, f: &dyn Fn(&Name) -> Name, g: &dyn Fn(u32) -> u32) -> Thread {
    Thread { mem: map_memory(&t.mem, f, g), code: map_ccs(&t.code, f) }
}

pub(super) fn rename_ccs(p: &Ccs, f: &dyn Fn(&Name) -> Name) -> Ccs {
    map_ccs(p, f)
}

pub(super) fn rename_thread(t: &Thread, f: &dyn Fn(&Name) -> Name) -> Thread {
    map_thread(t, f, &|i| i)
}

fn thread_names(t: &Thread, out: &mut BTreeSet<Name>) {
    t.mem.names(out);
    t.code.all_names(out);
}

/// Names and identifiers of a thread in first-occurrence order.
fn occurrences(t: &Thread, names: &mut Vec<Name>, ids: &mut Vec<u32>) {
    fn ccs_occ(p: &Ccs, names: &mut Vec<Name>) {
        match p {
            Ccs::Sum(s) => {
                for (l, q) in s {
                    if let Some(n) = l.name() {
                        if !names.contains(n) {
                            names.push(n.clone());
                        }
                    }
                    ccs_occ(q, names);
                }
            }
            Ccs::Par(l, r) => {
                ccs_occ(l, names);
                ccs_occ(r, names);
            }
            Ccs::Restrict(q, _) => ccs_occ(q, names),
        }
    }
    for e in t.mem.events() {
        if !ids.contains(&e.id) {
            ids.push(e.id);
        }
        if let Some(n) = e.label.name() {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
        ccs_occ(&e.alt, names);
    }
    ccs_occ(&t.code, names);
}

/// Transient binder names; `%` never occurs in user names.
struct Fresh(usize);

impl Fresh {
    fn next(&mut self) -> Name {
        self.0 += 1;
        Name(format!("%{}", self.0))
    }
}

fn lookup(env: &[(Name, Name)], n: &Name) -> Name {
    env.iter().rev().find(|(o, _)| o == n).map_or_else(|| n.clone(), |(_, m)| m.clone())
}

/// Renames free names through `env` and floats every restriction out to `bound`.
fn strip(p: &Ccs, env: &mut Vec<(Name, Name)>, fresh: &mut Fresh, bound: &mut Vec<Name>) -> Ccs {
    match p {
        Ccs::Sum(s) => Ccs::sum(
            s.iter()
                .map(|(l, q)| (l.map_name(|n| lookup(env, n)), strip(q, env, fresh, bound)))
                .collect(),
        ),
        Ccs::Par(..) => {
            let mut parts: Vec<Ccs> = p.par_components().into_iter().map(|q| strip(q, env, fresh, bound)).collect();
            parts = parts.into_iter().flat_map(|q| q.par_components().into_iter().cloned().collect::<Vec<_>>()).collect();
            parts.sort();
            Ccs::par_all(parts)
        }
        Ccs::Restrict(q, a) => {
            let b = fresh.next();
            bound.push(b.clone());
            env.push((a.clone(), b));
            let out = strip(q, env, fresh, bound);
            env.pop();
            out
        }
    }
}

/// Distributes `mem ▷ code` over parallel components.
pub(super) fn expand(mem: Memory, code: Ccs, out: &mut Vec<Thread>) {
    match code {
        Ccs::Par(..) => {
            let forked = mem.push_fork();
            for q in code.par_components() {
                expand(forked.clone(), q.clone(), out);
            }
        }
        Ccs::Sum(_) => out.push(Thread { mem, code }),
        Ccs::Restrict(..) => unreachable!("restrictions are floated before distribution"),
    }
}

fn collapse_forks(m: &Memory) -> Memory {
    let mut out: Vec<MemItem> = Vec::with_capacity(m.0.len());
    for it in &m.0 {
        if *it == MemItem::Fork && out.last() == Some(&MemItem::Fork) {
            continue;
        }
        out.push(it.clone());
    }
    Memory(out)
}

fn flatten(
    r: &RccsProcess,
    env: &mut Vec<(Name, Name)>,
    fresh: &mut Fresh,
    bound: &mut Vec<Name>,
    out: &mut Vec<Thread>,
) -> Result<(), RccsError> {
    match r {
        RccsProcess::Thread(m, p) => {
            let mut items = Vec::with_capacity(m.0.len());
            for it in &collapse_forks(m).0 {
                items.push(match it {
                    MemItem::Fork => MemItem::Fork,
                    MemItem::Event(e) => {
                        let alt = strip(&e.alt, env, fresh, bound);
                        if !matches!(alt, Ccs::Sum(_)) {
                            return Err(RccsError::BadAlternative(e.alt.to_string()));
                        }
                        MemItem::Event(MemEvent { id: e.id, label: e.label.map_name(|n| lookup(env, n)), alt })
                    }
                });
            }
            let code = strip(p, env, fresh, bound);
            expand(Memory(items), code, out);
            Ok(())
        }
        RccsProcess::Par(l, r) => {
            flatten(l, env, fresh, bound, out)?;
            flatten(r, env, fresh, bound, out)
        }
        RccsProcess::Restrict(q, a) => {
            let b = fresh.next();
            bound.push(b.clone());
            env.push((a.clone(), b));
            let res = flatten(q, env, fresh, bound, out);
            env.pop();
            res
        }
    }
}

/// Exact canonical search is used while the number of candidate renamings
/// stays below this bound; beyond it an iterated refinement is used, which
/// may leave a few equivalent states with distinct representatives.
const EXACT_BUDGET: usize = 720;

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn go(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for j in k..cur.len() {
            cur.swap(k, j);
            go(k + 1, cur, out);
            cur.swap(k, j);
        }
    }
    go(0, &mut cur, &mut out);
    out
}

pub(super) struct Canon {
    pub state: State,
    pub names: BTreeMap<Name, Name>,
    pub ids: BTreeMap<u32, u32>,
}

impl State {
    /// Normal form of an arbitrary term (identifiers are kept as written).
    pub fn from_process(r: &RccsProcess) -> Result<State, RccsError> {
        let (mut env, mut fresh, mut bound, mut threads) = (Vec::new(), Fresh(0), Vec::new(), Vec::new());
        flatten(r, &mut env, &mut fresh, &mut bound, &mut threads)?;
        Ok(State::build(bound, threads))
    }

    /// `∅ ▷ p` in normal form.
    pub fn initial(p: &Ccs) -> State {
        State::from_process(&RccsProcess::initial(p.clone())).expect("a CCS term has no memory")
    }

    pub(super) fn build(bound: Vec<Name>, threads: Vec<Thread>) -> State {
        State::canon(bound, threads, false).state
    }

    pub(super) fn canon(bound: Vec<Name>, threads: Vec<Thread>, rename_ids: bool) -> Canon {
        let mut used = BTreeSet::new();
        for t in &threads {
            thread_names(t, &mut used);
        }
        let bound: Vec<Name> = bound.into_iter().filter(|b| used.contains(b)).collect::<BTreeSet<_>>().into_iter().collect();
        let free: Vec<Name> = used.iter().filter(|n| !bound.contains(n)).cloned().collect();
        let prefix = binder_prefix("r", &free);
        let ids: Vec<u32> = if rename_ids {
            threads.iter().flat_map(|t| t.mem.ids()).collect::<BTreeSet<_>>().into_iter().collect()
        } else {
            Vec::new()
        };

        let apply = |name_order: &[Name], id_order: &[u32]| -> Canon {
            let names: BTreeMap<Name, Name> = name_order
                .iter()
                .enumerate()
                .map(|(k, n)| (n.clone(), Name(format!("{prefix}{k}"))))
                .collect();
            let idmap: BTreeMap<u32, u32> =
                id_order.iter().enumerate().map(|(k, i)| (*i, k as u32 + 1)).collect();
            let f = |n: &Name| names.get(n).cloned().unwrap_or_else(|| n.clone());
            let g = |i: u32| if rename_ids { idmap[&i] } else { i };
            let mut ts: Vec<Thread> = threads.iter().map(|t| map_thread(t, &f, &g)).collect();
            ts.sort();
            let bound = (0..name_order.len()).map(|k| Name(format!("{prefix}{k}"))).collect();
            Canon { state: State { bound, threads: ts }, names, ids: idmap }
        };

        let budget = factorial(bound.len()).saturating_mul(factorial(ids.len()));
        if budget <= EXACT_BUDGET {
            let mut best: Option<Canon> = None;
            let id_perms = permutations(ids.len());
            for pb in permutations(bound.len()) {
                let name_order: Vec<Name> = pb.iter().map(|&k| bound[k].clone()).collect();
                for pi in &id_perms {
                    let id_order: Vec<u32> = pi.iter().map(|&k| ids[k]).collect();
                    let c = apply(&name_order, &id_order);
                    if best.as_ref().is_none_or(|b| c.state < b.state) {
                        best = Some(c);
                    }
                }
            }
            return best.expect("at least one permutation");
        }

        // Iterated refinement: order threads by shape, then by the key under
        // the renaming induced by the current order, until stable.
        let placeholder = Name("%".into());
        let shape = |t: &Thread| {
            map_thread(
                t,
                &|n: &Name| if bound.contains(n) { placeholder.clone() } else { n.clone() },
                &|i| if rename_ids { 0 } else { i },
            )
        };
        let mut order: Vec<usize> = (0..threads.len()).collect();
        order.sort_by_cached_key(|&k| shape(&threads[k]));
        let mut last: Option<(Vec<Name>, Vec<u32>)> = None;
        for _ in 0..8 {
            let (mut names, mut occ_ids) = (Vec::new(), Vec::new());
            for &k in &order {
                occurrences(&threads[k], &mut names, &mut occ_ids);
            }
            names.retain(|n| bound.contains(n));
            if !rename_ids {
                occ_ids.clear();
            }
            if last.as_ref() == Some(&(names.clone(), occ_ids.clone())) {
                break;
            }
            let c = apply(&names, &occ_ids);
            let f = |n: &Name| c.names.get(n).cloned().unwrap_or_else(|| n.clone());
            let g = |i: u32| if rename_ids { c.ids[&i] } else { i };
            order.sort_by_cached_key(|&k| map_thread(&threads[k], &f, &g));
            last = Some((names, occ_ids));
        }
        let (names, occ_ids) = last.expect("refinement ran");
        apply(&names, &occ_ids)
    }

    /// Representative up to bijective renaming of identifiers, with the
    /// renaming applied (`old ↦ new`).
    pub fn canonical_ids(&self) -> (State, BTreeMap<u32, u32>) {
        let c = State::canon(self.bound.clone(), self.threads.clone(), true);
        (c.state, c.ids)
    }

    pub fn ids(&self) -> BTreeSet<u32> {
        self.threads.iter().flat_map(|t| t.mem.ids()).collect()
    }

    pub fn fresh_id(&self) -> u32 {
        let ids = self.ids();
        (1..).find(|i| !ids.contains(i)).expect("finitely many identifiers")
    }

    pub fn to_process(&self) -> RccsProcess {
        let mut it = self.threads.iter().map(|t| RccsProcess::Thread(t.mem.clone(), t.code.clone()));
        let first = it.next().unwrap_or_else(|| RccsProcess::initial(Ccs::nil()));
        let body = it.fold(first, RccsProcess::par);
        self.bound.iter().fold(body, |r, b| RccsProcess::restrict(r, b.clone()))
    }

    pub fn is_bound(&self, l: &Label) -> bool {
        l.name().is_some_and(|n| self.bound.contains(n))
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_process())
    }
}

impl Serialize for State {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Structural congruence, decided on normal forms. Identifiers are not renamed.
pub fn rccs_congruent(r: &RccsProcess, s: &RccsProcess) -> bool {
    match (State::from_process(r), State::from_process(s)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rccs::parse_rccs;

    fn st(s: &str) -> State {
        State::from_process(&parse_rccs(s).unwrap()).unwrap()
    }

    fn cong(a: &str, b: &str) -> bool {
        rccs_congruent(&parse_rccs(a).unwrap(), &parse_rccs(b).unwrap())
    }

    #[test]
    fn distribution_of_memory() {
        assert!(cong("<1,c,0>.{} |> (a | b)", "(Y.<1,c,0>.{} |> a) | (Y.<1,c,0>.{} |> b)"));
        assert!(cong("{} |> (a | b | c)", "Y.{} |> a | (Y.{} |> b | Y.{} |> c)"));
    }

    #[test]
    fn scope_of_restriction() {
        assert!(cong("{} |> (a) \\ b", "({} |> a) \\ b"));
        assert!(cong("{} |> (b.a) \\ b", "({} |> c.a) \\ c"));
        assert!(cong("{} |> a", "({} |> a) \\ c"));
        assert!(cong("({} |> (b.~b) \\ b)", "({} |> c.~c) \\ c"));
        assert!(!cong("({} |> b) \\ b", "{} |> b"));
    }

    #[test]
    fn identifiers_are_not_renamed() {
        assert!(!cong("<1,a,0>.{} |> 0", "<2,a,0>.{} |> 0"));
        let (a, _) = st("<1,a,0>.{} |> 0").canonical_ids();
        let (b, map) = st("<2,a,0>.{} |> 0").canonical_ids();
        assert_eq!(a, b);
        assert_eq!(map[&2], 1);
    }

    #[test]
    fn restrictions_under_prefixes_float() {
        assert!(cong("{} |> (a.(b | c)) \\ x", "{} |> a.((b | c) \\ x)"));
        assert_eq!(st("{} |> a.(x.~x) \\ x").bound.len(), 1);
    }

    #[test]
    fn bound_names_avoid_free_ones() {
        let s = st("({} |> r0.x) \\ x");
        assert_eq!(s.bound, vec![Name::from("r_0")]);
    }

    #[test]
    fn state_prints_and_reads_back() {
        for s in ["(<2,a,0>.Y.{} |> b) | (<1,c,0>.Y.{} |> 0)", "({} |> a.x + ~x) \\ x", "{} |> 0"] {
            let a = st(s);
            assert_eq!(st(&a.to_string()), a);
        }
    }

    #[test]
    fn permuted_binders_give_equal_states() {
        assert!(cong("(({} |> x.y) \\ x) \\ y", "(({} |> u.v) \\ v) \\ u"));
        assert!(cong("(Y.{} |> x | Y.{} |> y.~x) \\ x \\ y", "(Y.{} |> v.~u | Y.{} |> u) \\ v \\ u"));
    }
}
