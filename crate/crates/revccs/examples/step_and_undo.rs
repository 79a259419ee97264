//! Running a process forward, undoing a step, and rewinding to the origin.

use revccs::rccs::{touched_memories, State};
use revccs::syntax::{parse_ccs, pretty_ccs, Label};

fn main() {
    let mut s = State::initial(&parse_ccs("a.b | c.~a").unwrap());
    for label in [Label::input("c"), Label::Tau, Label::input("b")] {
        let t = s.forward_transitions().into_iter().find(|t| t.label == label).expect("enabled");
        println!("+{}:{}  touches {} stack(s)  ->  {}", t.id, t.label, touched_memories(&t).len(), t.target);
        s = t.target;
    }
    for t in s.backward_transitions() {
        println!("can undo {}:{}", t.id, t.label);
    }
    let back = s.undo(3).expect("3:b is on top");
    println!("-3:b  ->  {}", back.target);
    println!("origin: {}", pretty_ccs(&s.origin().unwrap()));
}
