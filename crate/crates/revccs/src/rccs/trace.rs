//! Concurrency and causality between transitions.

use super::lts::{Direction, Transition};
use super::{MemItem, Memory, RccsError};

/// Memory stacks extended by a forward step (for a backward step, the
/// stacks it retracts to).
pub fn touched_memories(t: &Transition) -> Vec<Memory> {
    t.threads.iter().map(|&k| t.before().threads[k].mem.clone()).collect()
}

/// Coinitial forward (or cofinal backward) transitions are concurrent when
/// they act on disjoint threads.
pub fn concurrent_transitions(t1: &Transition, t2: &Transition) -> Result<bool, RccsError> {
    let aligned = match (t1.direction, t2.direction) {
        (Direction::Forward, Direction::Forward) => t1.source == t2.source,
        (Direction::Backward, Direction::Backward) => t1.target == t2.target,
        _ => false,
    };
    if !aligned {
        return Err(RccsError::NotCoinitial);
    }
    Ok(t1.threads.iter().all(|k| !t2.threads.contains(k)))
}

/// Performs the move of `other` (fired from `t.source`) after `t`.
fn replay_after(t: &Transition, other: &Transition) -> Result<Transition, RccsError> {
    let s1 = &t.target;
    let fired: Vec<(usize, usize)> = t.threads.iter().copied().zip(t.summands.iter().copied()).collect();
    let map = t.source.fire_name_map(&fired, t.id)?;
    let mut used: Vec<usize> = Vec::new();
    let mut moves = Vec::new();
    for (&k, &j) in other.threads.iter().zip(&other.summands) {
        let th = &t.source.threads[k];
        let renamed = super::normal::rename_thread(th, &|n| map.get(n).cloned().unwrap_or_else(|| n.clone()));
        let pos = (0..s1.threads.len())
            .find(|p| s1.threads[*p] == renamed && !used.contains(p))
            .ok_or_else(|| RccsError::BadMove("untouched thread not found after step".into()))?;
        used.push(pos);
        let (l, cont) = &th.summands()[j];
        let l = l.map_name(|n| map.get(n).cloned().unwrap_or_else(|| n.clone()));
        let cont = super::normal::rename_ccs(cont, &|n| map.get(n).cloned().unwrap_or_else(|| n.clone()));
        let k2 = s1.threads[pos]
            .summands()
            .iter()
            .position(|(m, q)| *m == l && *q == cont)
            .expect("summand survives renaming");
        moves.push((pos, k2));
    }
    let id = if s1.ids().contains(&other.id) { s1.fresh_id() } else { other.id };
    s1.fire(&moves, id)
}

/// Closes the square of two concurrent coinitial forward transitions. When
/// both steps used the same identifier the two closing steps pick fresh ones,
/// and the square closes up to identifier renaming.
pub fn diamond_complete(t1: &Transition, t2: &Transition) -> Result<(Transition, Transition), RccsError> {
    if t1.direction != Direction::Forward || t2.direction != Direction::Forward {
        return Err(RccsError::NotCoinitial);
    }
    if !concurrent_transitions(t1, t2)? {
        return Err(RccsError::NotConcurrent);
    }
    let t1p = replay_after(t1, t2)?;
    let t2p = replay_after(t2, t1)?;
    if t1p.target.canonical_ids().0 != t2p.target.canonical_ids().0 {
        return Err(RccsError::Incoherent("square does not close".into()));
    }
    Ok((t1p, t2p))
}

/// Identifier skeleton of a memory (fork markers and event identifiers).
fn skeleton(m: &Memory) -> Vec<Option<u32>> {
    m.0.iter()
        .map(|it| match it {
            MemItem::Fork => None,
            MemItem::Event(e) => Some(e.id),
        })
        .collect()
}

fn extended(t: &Transition) -> Vec<Vec<Option<u32>>> {
    touched_memories(t)
        .iter()
        .map(|m| {
            let mut s = skeleton(m);
            s.push(Some(t.id));
            s
        })
        .collect()
}

/// Step `i` directly causes step `k` of a forward trace when a stack it
/// produced is a strict prefix of one produced by step `k`.
pub fn direct_cause(trace: &[Transition], i: usize, k: usize) -> Result<bool, RccsError> {
    for idx in [i, k] {
        if idx >= trace.len() {
            return Err(RccsError::IndexOutOfRange(idx));
        }
    }
    if i >= k {
        return Err(RccsError::BadTrace(format!("expected {i} < {k}")));
    }
    for (n, t) in trace.iter().enumerate() {
        if t.direction != Direction::Forward {
            return Err(RccsError::BadTrace(format!("step {n} is backward")));
        }
        if n + 1 < trace.len() && t.target != trace[n + 1].source {
            return Err(RccsError::BadTrace(format!("steps {n} and {} do not compose", n + 1)));
        }
    }
    let (mi, mk) = (extended(&trace[i]), extended(&trace[k]));
    Ok(mi.iter().any(|a| mk.iter().any(|b| a.len() < b.len() && b[..a.len()] == a[..])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rccs::State;
    use crate::syntax::{parse_ccs, Label};

    fn init(s: &str) -> State {
        State::initial(&parse_ccs(s).unwrap())
    }

    fn example_trace() -> Vec<Transition> {
        let s0 = init("a.b | c.~a");
        let t1 = s0.forward_transitions().into_iter().find(|t| t.label == Label::input("c")).unwrap();
        let t2 = t1.target.forward_transitions().into_iter().find(|t| t.label == Label::Tau).unwrap();
        let t3 = t2.target.forward_transitions().into_iter().find(|t| t.label == Label::input("b")).unwrap();
        vec![t1, t2, t3]
    }

    #[test]
    fn touched() {
        let tr = example_trace();
        assert_eq!(touched_memories(&tr[0]).iter().map(|m| m.to_string()).collect::<Vec<_>>(), ["Y.{}"]);
        assert_eq!(touched_memories(&tr[1]).len(), 2);
    }

    #[test]
    fn concurrency() {
        let s = init("a.b | c.~a");
        let ts = s.forward_transitions();
        assert!(concurrent_transitions(&ts[0], &ts[1]).unwrap());
        let s = init("a + b");
        let ts = s.forward_transitions();
        assert!(!concurrent_transitions(&ts[0], &ts[1]).unwrap());
        let s = init("a | a");
        let ts = s.forward_transitions();
        assert_eq!(ts.len(), 2);
        assert!(concurrent_transitions(&ts[0], &ts[1]).unwrap());
    }

    #[test]
    fn squares() {
        for p in ["a.b | c.~a", "a | a"] {
            let ts = init(p).forward_transitions();
            let (a, b) = diamond_complete(&ts[0], &ts[1]).unwrap();
            assert_eq!(a.target.ids().len(), 2);
            assert_eq!(a.target.canonical_ids().0, b.target.canonical_ids().0);
        }
        let ts = init("a + b").forward_transitions();
        assert_eq!(diamond_complete(&ts[0], &ts[1]).unwrap_err(), RccsError::NotConcurrent);
    }

    #[test]
    fn causes() {
        let tr = example_trace();
        assert!(direct_cause(&tr, 0, 1).unwrap());
        assert!(direct_cause(&tr, 1, 2).unwrap());
        assert!(!direct_cause(&tr, 0, 2).unwrap());
        let s = init("a | b");
        let t1 = s.forward_transitions().remove(0);
        let t2 = t1.target.forward_transitions().remove(0);
        assert!(!direct_cause(&[t1.clone(), t2.clone()], 0, 1).unwrap());
        assert_eq!(direct_cause(&[t1, t2], 0, 2).unwrap_err(), RccsError::IndexOutOfRange(2));
    }
}
