//! The forward and backward rules, on normal forms.

use std::collections::BTreeMap;

use serde::Serialize;

use super::normal::{expand, rename_ccs, rename_thread, State, Thread};
use super::{MemEvent, MemItem, Memory, RccsError, RccsProcess};
use crate::syntax::{Ccs, Label, Name};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// One step `source ⇾ᵢ:α target` or `source ⤳ᵢ:α target`.
///
/// `threads`/`summands` locate the fired summands in the memory-less side of
/// the step: in `source` for a forward step, in `target` for a backward one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub source: State,
    pub direction: Direction,
    pub id: u32,
    pub label: Label,
    pub target: State,
    pub threads: Vec<usize>,
    pub summands: Vec<usize>,
}

impl Transition {
    /// The same step read in the other direction.
    pub fn reversed(&self) -> Transition {
        Transition {
            source: self.target.clone(),
            direction: match self.direction {
                Direction::Forward => Direction::Backward,
                Direction::Backward => Direction::Forward,
            },
            id: self.id,
            label: self.label.clone(),
            target: self.source.clone(),
            threads: self.threads.clone(),
            summands: self.summands.clone(),
        }
    }

    /// The state whose threads `threads` refers to.
    pub fn before(&self) -> &State {
        match self.direction {
            Direction::Forward => &self.source,
            Direction::Backward => &self.target,
        }
    }

    pub fn after(&self) -> &State {
        match self.direction {
            Direction::Forward => &self.target,
            Direction::Backward => &self.source,
        }
    }
}

impl State {
    /// Fires the given summands with identifier `id`: one move is an `act.`
    /// step, two complementary moves in distinct threads a `syn.` step.
    pub fn fire(&self, moves: &[(usize, usize)], id: u32) -> Result<Transition, RccsError> {
        let (label, threads) = self.fired_threads(moves, id)?;
        Ok(Transition {
            source: self.clone(),
            direction: Direction::Forward,
            id,
            label,
            target: State::build(self.bound.clone(), threads),
            threads: moves.iter().map(|m| m.0).collect(),
            summands: moves.iter().map(|m| m.1).collect(),
        })
    }

    /// How bound names of `self` are renamed in the target of a fired move.
    pub(super) fn fire_name_map(&self, moves: &[(usize, usize)], id: u32) -> Result<BTreeMap<Name, Name>, RccsError> {
        let (_, threads) = self.fired_threads(moves, id)?;
        Ok(State::canon(self.bound.clone(), threads, false).names)
    }

    fn fired_threads(&self, moves: &[(usize, usize)], id: u32) -> Result<(Label, Vec<Thread>), RccsError> {
        let bad = |m: &str| Err(RccsError::BadMove(m.to_string()));
        if self.ids().contains(&id) {
            return bad("identifier already in use");
        }
        let mut labels = Vec::new();
        for &(t, k) in moves {
            let Some(th) = self.threads.get(t) else { return bad("no such thread") };
            let Some((l, _)) = th.summands().get(k) else { return bad("no such summand") };
            labels.push(l.clone());
        }
        let label = match labels.as_slice() {
            [l] if self.is_bound(l) => return bad("action on a restricted name"),
            [l] => l.clone(),
            [l1, l2] if moves[0].0 != moves[1].0 && *l2 == l1.complement() => Label::Tau,
            _ => return bad("expected one action or two complementary actions in distinct threads"),
        };
        let mut threads: Vec<Thread> = Vec::with_capacity(self.threads.len() + 2);
        for (k, t) in self.threads.iter().enumerate() {
            if !moves.iter().any(|&(tm, _)| tm == k) {
                threads.push(t.clone());
            }
        }
        for &(t, k) in moves {
            let th = &self.threads[t];
            let summands = th.summands();
            let (l, cont) = summands[k].clone();
            let alt = Ccs::sum(summands.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, s)| s.clone()).collect());
            expand(th.mem.push_event(id, l, alt), cont, &mut threads);
        }
        Ok((label, threads))
    }

    /// All enabled forward moves as `(thread, summand)` lists.
    pub fn forward_moves(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        for (t, th) in self.threads.iter().enumerate() {
            for (k, (l, _)) in th.summands().iter().enumerate() {
                if !self.is_bound(l) {
                    out.push(vec![(t, k)]);
                }
            }
        }
        for (t1, th1) in self.threads.iter().enumerate() {
            for (k1, (l1, _)) in th1.summands().iter().enumerate() {
                if !matches!(l1, Label::In(_)) {
                    continue;
                }
                for (t2, th2) in self.threads.iter().enumerate() {
                    if t2 == t1 {
                        continue;
                    }
                    for (k2, (l2, _)) in th2.summands().iter().enumerate() {
                        if *l2 == l1.complement() {
                            out.push(vec![(t1, k1), (t2, k2)]);
                        }
                    }
                }
            }
        }
        out
    }

    /// Forward transitions, each using the smallest identifier not in use.
    pub fn forward_transitions(&self) -> Vec<Transition> {
        let id = self.fresh_id();
        self.forward_moves().iter().map(|m| self.fire(m, id).expect("enabled move")).collect()
    }

    /// Backward transitions: for each identifier, the threads holding it must
    /// all have it on top (below one fork marker when they were forked), and
    /// form one class (`act.*`) or two complementary classes (`syn.*`).
    pub fn backward_transitions(&self) -> Vec<Transition> {
        let mut out = Vec::new();
        for id in self.ids() {
            if let Some(t) = self.undo(id) {
                out.push(t);
            }
        }
        out
    }

    /// Undoes identifier `id` if it is enabled.
    pub fn undo(&self, id: u32) -> Option<Transition> {
        // class key: (event, memory below it) -> (thread index, forked)
        let mut classes: BTreeMap<(MemEvent, Memory), Vec<(usize, bool)>> = BTreeMap::new();
        for (k, th) in self.threads.iter().enumerate() {
            if !th.mem.ids().any(|i| i == id) {
                continue;
            }
            let items = &th.mem.0;
            let (forked, top) = match items.last()? {
                MemItem::Fork => (true, items.len().checked_sub(2)?),
                MemItem::Event(_) => (false, items.len() - 1),
            };
            let MemItem::Event(e) = &items[top] else { return None };
            if e.id != id {
                return None;
            }
            let below = Memory(items[..top].to_vec());
            if below.ids().any(|i| i == id) {
                return None;
            }
            classes.entry((e.clone(), below)).or_default().push((k, forked));
        }
        let label = match classes.keys().map(|(e, _)| &e.label).collect::<Vec<_>>().as_slice() {
            [l] if !self.is_bound(l) => (*l).clone(),
            [l1, l2] if **l2 == l1.complement() && !l1.is_tau() => Label::Tau,
            _ => return None,
        };
        let mut threads: Vec<Thread> = self
            .threads
            .iter()
            .enumerate()
            .filter(|(k, _)| !classes.values().flatten().any(|(j, _)| j == k))
            .map(|(_, t)| t.clone())
            .collect();
        let mut restored = Vec::new();
        for ((e, below), members) in &classes {
            let n = members.len();
            if (n == 1 && members[0].1) || (n > 1 && !members.iter().all(|m| m.1)) {
                return None;
            }
            let cont = if n == 1 {
                self.threads[members[0].0].code.clone()
            } else {
                let mut parts: Vec<Ccs> = members.iter().map(|m| self.threads[m.0].code.clone()).collect();
                parts.sort();
                Ccs::par_all(parts)
            };
            let Ccs::Sum(alt) = &e.alt else { return None };
            let mut summands = alt.clone();
            summands.push((e.label.clone(), cont.clone()));
            let th = Thread { mem: below.clone(), code: Ccs::sum(summands) };
            threads.push(th.clone());
            restored.push((th, e.label.clone(), cont));
        }
        let c = State::canon(self.bound.clone(), threads, false);
        let f = |n: &Name| c.names.get(n).cloned().unwrap_or_else(|| n.clone());
        let (mut idx, mut summands) = (Vec::new(), Vec::new());
        for (th, l, cont) in &restored {
            let renamed = rename_thread(th, &f);
            let pos = (0..c.state.threads.len())
                .find(|&j| c.state.threads[j] == renamed && !idx.contains(&j))
                .expect("restored thread is present");
            idx.push(pos);
            summands.push(code_position(&renamed.code, &l.map_name(f), &rename_ccs(cont, &f)));
        }
        Some(Transition {
            source: self.clone(),
            direction: Direction::Backward,
            id,
            label,
            target: c.state,
            threads: idx,
            summands,
        })
    }

    /// All transitions, forward first.
    pub fn transitions(&self) -> Vec<Transition> {
        let mut out = self.forward_transitions();
        out.extend(self.backward_transitions());
        out
    }

    /// Rewinds to the origin; fails when the memories are not coherent.
    pub fn origin(&self) -> Result<Ccs, RccsError> {
        let mut s = self.clone();
        loop {
            let done = match s.threads.as_slice() {
                [t] if t.mem.0.is_empty() => Some(t.code.clone()),
                ts if ts.len() > 1 && ts.iter().all(|t| t.mem.0 == [MemItem::Fork]) => {
                    Some(Ccs::par_all(ts.iter().map(|t| t.code.clone()).collect()))
                }
                _ => None,
            };
            if let Some(p) = done {
                return Ok(s.bound.iter().fold(p, |p, b| Ccs::restrict(p, b.clone())));
            }
            let Some(id) = s.ids().into_iter().find(|&i| s.undo(i).is_some()) else {
                return Err(RccsError::Incoherent(format!("cannot rewind `{s}`")));
            };
            s = s.undo(id).expect("checked").target;
        }
    }

    pub fn is_reachable(&self) -> bool {
        self.origin().is_ok()
    }
}

fn code_position(code: &Ccs, l: &Label, cont: &Ccs) -> usize {
    let Ccs::Sum(s) = code else { unreachable!("thread code is a sum") };
    s.iter().position(|(m, q)| m == l && q == cont).expect("summand present")
}

fn reachable_state(r: &RccsProcess) -> Result<State, RccsError> {
    let s = State::from_process(r)?;
    s.origin()?;
    Ok(s)
}

/// Forward transitions of a reachable term.
pub fn forward_transitions(r: &RccsProcess) -> Result<Vec<Transition>, RccsError> {
    Ok(reachable_state(r)?.forward_transitions())
}

/// Backward transitions of a reachable term.
pub fn backward_transitions(r: &RccsProcess) -> Result<Vec<Transition>, RccsError> {
    Ok(reachable_state(r)?.backward_transitions())
}

/// The CCS term `P` with `∅ ▷ P` rewinding to `r`'s normal form.
pub fn origin(r: &RccsProcess) -> Result<Ccs, RccsError> {
    State::from_process(r)?.origin()
}

pub fn is_reachable(r: &RccsProcess) -> bool {
    origin(r).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rccs::parse_rccs;
    use crate::syntax::{ccs_congruent, parse_ccs};

    fn st(s: &str) -> State {
        State::from_process(&parse_rccs(s).unwrap()).unwrap()
    }

    fn summary(ts: &[Transition]) -> Vec<String> {
        let mut v: Vec<String> = ts.iter().map(|t| format!("{}:{}", t.id, t.label)).collect();
        v.sort();
        v
    }

    const THREE_STEPS_DONE: &str = "(<3,b,0>.<2,a,0>.Y.{} |> 0) | (<2,~a,0>.<1,c,0>.Y.{} |> 0)";

    #[test]
    fn initial_forward_steps() {
        let s = st("a.b | c.~a");
        assert_eq!(summary(&s.forward_transitions()), ["1:a", "1:c"]);
        assert!(st("0").forward_transitions().is_empty());
    }

    #[test]
    fn example_trace_replays() {
        let s0 = st("a.b | c.~a");
        let t1 = s0.forward_transitions().into_iter().find(|t| t.label == Label::input("c")).unwrap();
        let t2 = t1.target.forward_transitions().into_iter().find(|t| t.label == Label::Tau).unwrap();
        assert_eq!(t2.id, 2);
        let t3 = t2.target.forward_transitions().into_iter().find(|t| t.label == Label::input("b")).unwrap();
        assert_eq!(t3.id, 3);
        assert_eq!(t3.target, st(THREE_STEPS_DONE));
    }

    #[test]
    fn backward_steps_need_the_top() {
        let s = st(THREE_STEPS_DONE);
        // the a-event of the synchronisation sits under the b-event
        assert_eq!(summary(&s.backward_transitions()), ["3:b"]);
        let r1 = st("(<2,a,0>.Y.{} |> b) | (<1,c,0>.Y.{} |> 0)");
        assert_eq!(summary(&r1.backward_transitions()), ["1:c", "2:a"]);
    }

    #[test]
    fn origins() {
        assert!(ccs_congruent(&st(THREE_STEPS_DONE).origin().unwrap(), &parse_ccs("a.b | c.~a").unwrap()));
        let r1 = st("(<2,a,0>.Y.{} |> b) | (<1,c,0>.Y.{} |> 0)");
        assert!(ccs_congruent(&r1.origin().unwrap(), &parse_ccs("a.b | c").unwrap()));
        assert!(st("(<1,a,0>.{} |> 0) | (<1,b,0>.{} |> 0)").origin().is_err());
        assert!(st("(<1,a,0>.{} |> 0) | (<1,~a,0>.{} |> 0)").origin().is_err());
        assert!(st("<1,a,0>.<1,b,0>.{} |> 0").origin().is_err());
        assert!(st("Y.{} |> a").origin().is_err());
    }

    #[test]
    fn restriction_blocks_visible_actions_only() {
        let s = st("{} |> (x.a | ~x) \\ x");
        let fw = s.forward_transitions();
        assert_eq!(summary(&fw), ["1:tau"]);
        let back = fw[0].target.backward_transitions();
        assert_eq!(summary(&back), ["1:tau"]);
        assert_eq!(back[0].target, s);
    }

    #[test]
    fn nested_forks_rewind() {
        let s = st("a.(b | c.(d | e)) | f");
        let mut cur = s.clone();
        for _ in 0..4 {
            let t = cur.forward_transitions().into_iter().next().unwrap();
            cur = t.target;
        }
        assert!(ccs_congruent(&cur.origin().unwrap(), &parse_ccs("a.(b | c.(d | e)) | f").unwrap()));
    }

    #[test]
    fn loop_property_on_a_small_term() {
        let s = st("a.(b + ~c) | c.a");
        let mut frontier = vec![s];
        for _ in 0..4 {
            let mut next = Vec::new();
            for st in &frontier {
                for t in st.forward_transitions() {
                    let back = t.target.backward_transitions();
                    assert!(back.iter().any(|b| b.id == t.id && b.label == t.label && b.target == *st));
                    let back = back.into_iter().find(|b| b.id == t.id).unwrap();
                    let mut fw_threads: Vec<&Thread> = t.threads.iter().map(|&k| &st.threads[k]).collect();
                    let mut bw_threads: Vec<&Thread> = back.threads.iter().map(|&k| &back.target.threads[k]).collect();
                    fw_threads.sort();
                    bw_threads.sort();
                    assert_eq!(fw_threads, bw_threads);
                    next.push(t.target);
                }
            }
            frontier = next;
        }
    }
}
