//! Regression suite over the published examples: each entry recomputes one
//! stated fact and compares it with the stated value.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::json;

use crate::encodings::{backward_from_maximal, check_op_correspondence, encode_address, encode_ccs, encode_memory, encode_state};
use crate::equivalences::corpus::{corpus, default_labels, random_state, sample};
use crate::equivalences::{has_auto_concurrency, is_non_repeating, Relation};
use crate::rccs::{explore_from, is_reachable, origin, parse_rccs, rccs_congruent, touched_memories, Direction, State};
use crate::structures::{iso_search, iso_search_with, EventId, Ident, IsoOptions, Order, SLabel, Structure, SyncAlgebra};
use crate::syntax::{ccs_congruent, parse_ccs, Label};

const TRACE_END: &str = "(<3,b,0>.<2,a,0>.Y.{} |> 0) | (<2,~a,0>.<1,c,0>.Y.{} |> 0)";
const AFTER_C: &str = "(Y.{} |> a.b) | (<1,c,0>.Y.{} |> ~a)";
const TWO_UNDOABLE: &str = "(<2,a,0>.Y.{} |> b) | (<1,c,0>.Y.{} |> 0)";

#[derive(Clone, Debug, Serialize)]
pub struct SuiteEntry {
    pub name: &'static str,
    pub claim: &'static str,
    pub passed: bool,
    /// Why the entry failed; empty when it passed.
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub entries: Vec<SuiteEntry>,
}

impl SuiteOutcome {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.passed).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            if e.passed {
                out.push_str(&format!("PASS {}: {}\n", e.name, e.claim));
            } else {
                out.push_str(&format!("FAIL {}: {} ({})\n", e.name, e.claim, e.detail));
            }
        }
        out.push_str(&format!("{}/{} passed\n", self.passed(), self.entries.len()));
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({"entries": self.entries, "passed": self.passed(), "total": self.entries.len()})
    }
}

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn lab(s: &str) -> SLabel {
    SLabel::Act(match s.strip_prefix('~') {
        Some(n) => Label::output(n),
        None if s == "tau" => Label::Tau,
        None => Label::input(s),
    })
}

fn ccs_structure(s: &str) -> Result<Structure, String> {
    Ok(encode_ccs(&parse_ccs(s).map_err(|e| e.to_string())?))
}

fn state(s: &str) -> Result<State, String> {
    let r = parse_rccs(s).map_err(|e| e.to_string())?;
    State::from_process(&r).map_err(|e| e.to_string())
}

fn literals(s: &Structure) -> BTreeSet<String> {
    s.configs().map(|x| s.config_literal(x)).collect()
}

fn maximal_literals(s: &Structure) -> BTreeSet<String> {
    s.maximal_configs().iter().map(|x| s.config_literal(x)).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn same_set(got: BTreeSet<String>, want: &[&str]) -> Check {
    ensure(got == set(want), format!("got {got:?}"))
}

/// Memory chain, oldest event first.
fn stack(events: &[(&str, u32)]) -> Result<Structure, String> {
    events.iter().try_fold(Structure::zero_identified(), |s, (l, i)| s.postfix(lab(l), Ident::Base(*i)).map_err(|e| e.to_string()))
}

fn labelled_idents(s: &Structure) -> BTreeSet<String> {
    s.events().iter().map(|e| format!("{}:{}", e.label, e.ident.as_ref().map_or("-".into(), |i| i.to_string()))).collect()
}

fn verdict(relation: Relation, a: &str, b: &str) -> Result<bool, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = super::run(["revccs", "check", "--relation", relation.name(), a, b], &mut out, &mut err);
    if code != 0 {
        return Err(String::from_utf8_lossy(&err).trim().to_string());
    }
    match String::from_utf8_lossy(&out).lines().next() {
        Some("HOLDS") => Ok(true),
        Some("FAILS") => Ok(false),
        other => Err(format!("unexpected output {other:?}")),
    }
}

fn holds(relation: Relation, a: &str, b: &str, want: bool) -> Check {
    let got = verdict(relation, a, b)?;
    ensure(got == want, format!("{relation} verdict is {}", if got { "HOLDS" } else { "FAILS" }))
}

fn entries() -> Vec<(&'static str, &'static str, fn() -> Check)> {
    vec![
        ("parallel-associativity", "(a | b) | c is congruent to a | (b | c)", || {
            let (p, q) = (parse_ccs("(a | b) | c").unwrap(), parse_ccs("a | (b | c)").unwrap());
            ensure(ccs_congruent(&p, &q), "not congruent")
        }),
        ("memory-distribution", "m |> (a | b) is congruent to (Y.m |> a) | (Y.m |> b)", || {
            let (r, s) = (parse_rccs("{} |> (a | b)").unwrap(), parse_rccs("(Y.{} |> a) | (Y.{} |> b)").unwrap());
            ensure(rccs_congruent(&r, &s), "not congruent")
        }),
        ("restriction-scope", "{} |> (a) \\ b is congruent to ({} |> a) \\ b", || {
            let (r, s) = (parse_rccs("{} |> (a) \\ b").unwrap(), parse_rccs("({} |> a) \\ b").unwrap());
            ensure(rccs_congruent(&r, &s), "not congruent")
        }),
        ("synchronisation-after-c", "after 1:c the two threads synchronise with 2:tau", || {
            let s = state(AFTER_C)?;
            ensure(s.forward_transitions().iter().any(|t| t.id == 2 && t.label == Label::Tau), "no 2:tau step")
        }),
        ("two-undoable-steps", "both 1:c and 2:a can be undone", || {
            let s = state(TWO_UNDOABLE)?;
            let got: BTreeSet<String> = s.backward_transitions().iter().map(|t| format!("{}:{}", t.id, t.label)).collect();
            same_set(got, &["1:c", "2:a"])
        }),
        ("trace-origin", "the end of the three-step trace rewinds to a.b | c.~a", || {
            let p = origin(&parse_rccs(TRACE_END).unwrap()).map_err(|e| e.to_string())?;
            ensure(ccs_congruent(&p, &parse_ccs("a.b | c.~a").unwrap()), format!("origin {p}"))
        }),
        ("two-undoable-origin", "the state with two undoable steps rewinds to (a.b) | c", || {
            let p = origin(&parse_rccs(TWO_UNDOABLE).unwrap()).map_err(|e| e.to_string())?;
            ensure(ccs_congruent(&p, &parse_ccs("(a.b) | c").unwrap()), format!("origin {p}"))
        }),
        ("trace-end-reachable", "the end of the three-step trace is reachable", || {
            ensure(is_reachable(&parse_rccs(TRACE_END).unwrap()), "not reachable")
        }),
        ("action-touches-one-stack", "the 1:c step extends one stack, Y.{}", || {
            let s = state("a.b | c.~a")?;
            let t = s.forward_transitions().into_iter().find(|t| t.label == Label::input("c")).ok_or("no c step")?;
            let got: Vec<String> = touched_memories(&t).iter().map(|m| m.to_string()).collect();
            ensure(got == ["Y.{}"], format!("got {got:?}"))
        }),
        ("synchronisation-touches-two-stacks", "the 2:tau step extends one stack per thread", || {
            let t = state(AFTER_C)?.forward_transitions().into_iter().find(|t| t.label == Label::Tau).ok_or("no tau step")?;
            ensure(touched_memories(&t).len() == 2, "not two stacks")
        }),
        ("parallel-pair-axioms", "the structure of a | a satisfies the axioms", || {
            let s = ccs_structure("a | a")?;
            ensure(s.validate().is_valid() && s.config_count() == 4, "invalid or wrong size")
        }),
        ("causality-in-sequence", "a < b in {a, b} of a.b", || {
            let s = ccs_structure("a.b")?;
            let top = s.maximal_configs().pop().ok_or("no configuration")?;
            let id = |l: &str| s.events().iter().find(|e| e.label == lab(l)).map(|e| e.id.clone()).unwrap();
            ensure(s.causality(&top, &id("a"), &id("b")) == Ok(Order::Lt), "not ordered")
        }),
        ("concurrency-in-parallel-pair", "the two a events of a | a are concurrent", || {
            let s = ccs_structure("a | a")?;
            let top = s.maximal_configs().pop().ok_or("no configuration")?;
            let ids: Vec<EventId> = s.events().iter().map(|e| e.id.clone()).collect();
            ensure(s.causality(&top, &ids[0], &ids[1]) == Ok(Order::Concurrent), "not concurrent")
        }),
        ("choice-has-two-maximal-configurations", "a + a has maximal configurations {a1} and {a2}", || {
            ensure(ccs_structure("a + a")?.maximal_configs().len() == 2, "not two")
        }),
        ("parallel-pair-has-one-maximal-configuration", "a | a has the single maximal configuration {a1, a2}", || {
            ensure(ccs_structure("a | a")?.maximal_configs().len() == 1, "not one")
        }),
        ("memory-maximal-events", "the memory of the state with two undoable steps has maximal events a and c", || {
            let s = encode_memory(&parse_rccs(TWO_UNDOABLE).unwrap()).map_err(|e| e.to_string())?;
            same_set(s.maximal_events().iter().map(|&k| s.label_of(k).to_string()).collect(), &["a", "c"])
        }),
        ("prefix", "prefixing a to {}, {b} gives {}, {a}, {a, b}", || {
            let s = Structure::zero().prefix(lab("b")).prefix(lab("a"));
            same_set(literals(&s), &["{}", "{a}", "{a, b}"])
        }),
        ("postfix-once", "0 postfixed with (c, 1) has one c event with identifier 1", || {
            let s = stack(&[("c", 1)])?;
            same_set(literals(&s), &["{}", "{c}"])?;
            same_set(labelled_idents(&s), &["c:1"])
        }),
        ("postfix-twice", "postfixing (c, 1) then (~a, 2) gives a chain", || {
            let s = stack(&[("c", 1), ("~a", 2)])?;
            same_set(literals(&s), &["{}", "{c}", "{c, ~a}"])?;
            same_set(labelled_idents(&s), &["c:1", "~a:2"])
        }),
        ("choice-of-atoms", "the choice of a and a is {}, {a1}, {a2}", || {
            let a = Structure::zero().prefix(lab("a"));
            let s = a.choice(&a).map_err(|e| e.to_string())?;
            ensure(s.config_count() == 3 && s.maximal_configs().len() == 2, format!("got {:?}", literals(&s)))
        }),
        ("product-of-stacks", "the product of the two trace stacks has eight events with paired identifiers", || {
            let p = stack(&[("a", 2), ("b", 3)])?.product(&stack(&[("c", 1), ("~a", 2)])?);
            let got: BTreeSet<String> = p.events().iter().map(|e| e.ident.as_ref().unwrap().to_string()).collect();
            same_set(got, &["(2,*)", "(3,*)", "(*,1)", "(*,2)", "(2,1)", "(2,2)", "(3,1)", "(3,2)"])
        }),
        ("parallel-sequences", "a.b in parallel with c.~a has 11 configurations", || {
            let s = Structure::zero().prefix(lab("b")).prefix(lab("a"));
            let t = Structure::zero().prefix(lab("~a")).prefix(lab("c"));
            let c = s.parallel_compose_proc(&t, &SyncAlgebra::Proc);
            ensure(c.config_count() == 11, format!("{} configurations", c.config_count()))?;
            same_set(maximal_literals(&c), &["{a, b, c, ~a}", "{b, c, tau}"])
        }),
        ("memory-composition", "composing the trace stacks keeps 3:b, 1:c, 2:tau and removes five events", || {
            let rows = stack(&[("a", 2), ("b", 3)])?
                .composition_table(&stack(&[("c", 1), ("~a", 2)])?, &SyncAlgebra::Mem)
                .map_err(|e| e.to_string())?;
            let kept: BTreeSet<String> =
                rows.iter().filter(|r| r.label != SLabel::Bottom).map(|r| format!("{}:{}", r.ident, r.label)).collect();
            same_set(kept, &["3:b", "1:c", "2:tau"])?;
            ensure(rows.iter().filter(|r| r.label == SLabel::Bottom).count() == 5, "not five removed")
        }),
        ("fork-composition", "a stack composed with itself keeps the diagonal events, a.a = a", || {
            let m = stack(&[("a", 1), ("b", 2)])?;
            let f = m.parallel_compose_mem(&m, &SyncAlgebra::Mem).map_err(|e| e.to_string())?;
            same_set(labelled_idents(&f), &["a:1", "b:2"])
        }),
        ("fork-isomorphism", "a stack composed with itself is isomorphic to it via (e, e) -> e", || {
            let m = stack(&[("a", 1), ("b", 2)])?;
            let f = m.parallel_compose_mem(&m, &SyncAlgebra::Mem).map_err(|e| e.to_string())?;
            let iso = iso_search_with(&f, &m, IsoOptions { fix_labels: true, fix_idents: true }).ok_or("no isomorphism")?;
            ensure(
                iso.index.iter().enumerate().all(|(k, &j)| f.event(k).id == EventId::pair(Some(&m.event(j).id), Some(&m.event(j).id))),
                "isomorphism is not the diagonal",
            )
        }),
        ("generated-diamond", "the configuration {c, a} of a.b | c generates {}, {a}, {c}, {a, c}", || {
            let s = ccs_structure("a.b | c")?;
            let x = s.configs().find(|x| s.config_literal(x) == "{a, c}").ok_or("no such configuration")?.clone();
            same_set(literals(&s.generate_below(&x).map_err(|e| e.to_string())?), &["{}", "{a}", "{c}", "{a, c}"])
        }),
        ("choice-not-parallel", "a + a and a | a are not isomorphic", || {
            ensure(iso_search(&ccs_structure("a + a")?, &ccs_structure("a | a")?, false).is_none(), "isomorphic")
        }),
        ("encode-nil", "0 denotes the empty structure", || ensure(ccs_structure("0")? == Structure::zero(), "not empty")),
        ("encode-choice", "a + a denotes {}, {a1}, {a2}", || {
            same_set(literals(&ccs_structure("a + a")?), &["{}", "{a_1}", "{a_2}"])
        }),
        ("encode-parallel-sequences", "(a.b) | (c.~a) denotes the 11-configuration structure", || {
            let s = ccs_structure("(a.b) | (c.~a)")?;
            ensure(s.config_count() == 11, format!("{} configurations", s.config_count()))?;
            same_set(maximal_literals(&s), &["{a, b, c, ~a}", "{b, c, tau}"])
        }),
        ("empty-memory", "the empty memory denotes the empty structure", || {
            let s = encode_memory(&parse_rccs("{} |> a.b").unwrap()).map_err(|e| e.to_string())?;
            ensure(s == Structure::zero_identified(), "not empty")
        }),
        ("trace-end-memory", "the end of the trace has memory c:1 < tau:2 < b:3", || {
            let s = encode_memory(&parse_rccs(TRACE_END).unwrap()).map_err(|e| e.to_string())?;
            same_set(literals(&s), &["{}", "{c}", "{c, tau}", "{b, c, tau}"])?;
            same_set(labelled_idents(&s), &["c:1", "tau:2", "b:3"])
        }),
        ("two-undoable-memory", "the state with two undoable steps has the diamond memory with c:1 and a:2", || {
            let s = encode_memory(&parse_rccs(TWO_UNDOABLE).unwrap()).map_err(|e| e.to_string())?;
            same_set(literals(&s), &["{}", "{a}", "{c}", "{a, c}"])?;
            same_set(labelled_idents(&s), &["c:1", "a:2"])
        }),
        ("two-undoable-address", "the state with two undoable steps addresses {a, c} in (a.b) | c", || {
            let a = encode_address(&parse_rccs(TWO_UNDOABLE).unwrap()).map_err(|e| e.to_string())?;
            ensure(a.denotation == ccs_structure("(a.b) | c")?, "wrong denotation")?;
            let got = a.denotation.config_literal(&a.address);
            ensure(got == "{a, c}", format!("address {got}"))
        }),
        ("undo-correspondence", "undoing 1:c removes the c event from the memory", || {
            let s = state(TWO_UNDOABLE)?;
            let t = s.undo(1).ok_or("1:c cannot be undone")?;
            let w = check_op_correspondence(&t).map_err(|e| e.to_string())?;
            let enc = encode_state(&s).map_err(|e| e.to_string())?;
            ensure(enc.index_of(&w.event).map(|k| enc.label_of(k)) == Some(&lab("c")), "removed event is not c")
        }),
        ("redo-correspondence", "doing b afterwards adds the b event to the memory", || {
            let s = state(TWO_UNDOABLE)?.undo(1).ok_or("1:c cannot be undone")?.target;
            let t = s.forward_transitions().into_iter().find(|t| t.label == Label::input("b")).ok_or("no b step")?;
            let w = check_op_correspondence(&t).map_err(|e| e.to_string())?;
            let enc = encode_state(&t.target).map_err(|e| e.to_string())?;
            ensure(enc.index_of(&w.event).map(|k| enc.label_of(k)) == Some(&lab("b")), "added event is not b")
        }),
        ("undo-maximal-a", "the maximal a event is undone by 2:a", || undo_maximal("a", 2)),
        ("undo-maximal-c", "the maximal c event is undone by 1:c", || undo_maximal("c", 1)),
        ("hhpb-duplicate-branch", "a.(b + b) and (a.b) + (a.b) are HHPB", || {
            holds(Relation::Hhpb, "a.(b + b)", "(a.b) + (a.b)", true)
        }),
        ("hpb-sequential-vs-parallel", "(a.a) | b and a | a | b are not HPB, hence not HHPB", || {
            holds(Relation::Hpb, "(a.a) | b", "a | a | b", false)?;
            holds(Relation::Hhpb, "(a.a) | b", "a | a | b", false)
        }),
        ("hpb-not-hhpb", "(a | (b + c)) + (a | b) + ((a + c) | b) and (a | (b + c)) + ((a + c) | b) are HPB, not HHPB", || {
            let (l, r) = ("(a | (b + c)) + (a | b) + ((a + c) | b)", "(a | (b + c)) + ((a + c) | b)");
            holds(Relation::Hpb, l, r, true)?;
            holds(Relation::Hhpb, l, r, false)
        }),
        ("sbf-not-bf", "a | a and a.a are SB&F but not B&F", || {
            holds(Relation::Sbf, "a | a", "a.a", true)?;
            holds(Relation::Bf, "a | a", "a.a", false)
        }),
        ("sbf-sequential-vs-parallel", "(a.a) | b and a | a | b are SB&F", || holds(Relation::Sbf, "(a.a) | b", "a | a | b", true)),
        ("hhpb-rccs-duplicate-branch", "a.(b + b) and (a.b) + (a.b) are HHPB as reversible processes", || {
            holds(Relation::HhpbRccs, "a.(b + b)", "(a.b) + (a.b)", true)?;
            holds(Relation::Hhpb, "a.(b + b)", "(a.b) + (a.b)", true)
        }),
        ("repeating-sequence", "a.a is repeating", || ensure(!is_non_repeating(&parse_ccs("a.a").unwrap()), "non-repeating")),
        ("auto-concurrency", "(a.b) | a has auto-concurrency", || {
            ensure(has_auto_concurrency(&parse_ccs("(a.b) | a").unwrap()), "no auto-concurrency")
        }),
    ]
}

fn undo_maximal(label: &str, id: u32) -> Check {
    let r = parse_rccs(TWO_UNDOABLE).unwrap();
    let enc = encode_memory(&r).map_err(|e| e.to_string())?;
    let e = enc.events().iter().find(|e| e.label == lab(label)).ok_or("no such event")?;
    let t = backward_from_maximal(&r, &e.id).map_err(|e| e.to_string())?;
    ensure(t.id == id && SLabel::Act(t.label.clone()) == lab(label), format!("undone by {}:{}", t.id, t.label))
}

/// Operational correspondence and loop property on every edge explored
/// around random states of `n` sampled corpus processes.
fn spot_check(n: usize, seed: u64, state_cap: usize) -> Check {
    let procs = sample(&corpus(&default_labels(), 3, 1), n, seed);
    for (k, p) in procs.iter().enumerate() {
        let s = random_state(p, 4, seed.wrapping_add(k as u64));
        let g = explore_from(&s, state_cap).map_err(|e| e.to_string())?;
        for st in &g.states {
            for t in st.transitions() {
                check_op_correspondence(&t).map_err(|e| format!("{t:?}: {e}"))?;
                // Redoing may pick another fresh identifier, so compare up to renaming.
                let here = st.canonical_ids().0;
                let inverse = match t.direction {
                    Direction::Forward => t.target.undo(t.id).is_some_and(|b| b.target == *st),
                    Direction::Backward => t
                        .target
                        .forward_transitions()
                        .iter()
                        .any(|u| u.label == t.label && u.target.canonical_ids().0 == here),
                };
                ensure(inverse, format!("no inverse for {}:{} from {st}", t.id, t.label))?;
            }
        }
    }
    Ok(())
}

/// Runs every entry; `spot_checks > 0` adds one randomized entry.
pub fn paper_suite(spot_checks: usize, seed: u64, state_cap: usize) -> SuiteOutcome {
    let mut out: Vec<SuiteEntry> = entries()
        .into_iter()
        .map(|(name, claim, f)| {
            let r = f();
            SuiteEntry { name, claim, passed: r.is_ok(), detail: r.err().unwrap_or_default() }
        })
        .collect();
    if spot_checks > 0 {
        let r = spot_check(spot_checks, seed, state_cap);
        out.push(SuiteEntry {
            name: "randomized-correspondence",
            claim: "every step of random reachable states matches its memory encodings and can be reversed",
            passed: r.is_ok(),
            detail: r.err().unwrap_or_default(),
        });
    }
    SuiteOutcome { entries: out }
}
