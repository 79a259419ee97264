//! Memories as identified structures, addresses in the origin, and the
//! correspondence between steps and events.

use revccs::encodings::{backward_from_maximal, check_op_correspondence, encode_address, encode_memory};
use revccs::rccs::{parse_rccs, State};

fn main() {
    let r = parse_rccs("(<2,a,0>.Y.{} |> b) | (<1,c,0>.Y.{} |> 0)").unwrap();
    let m = encode_memory(&r).unwrap();
    for e in m.events() {
        println!("memory event {} labelled {} with identifier {}", e.id, e.label, e.ident.as_ref().unwrap());
    }
    let a = encode_address(&r).unwrap();
    println!("addresses {} in a structure with {} configurations", a.denotation.config_literal(&a.address), a.denotation.config_count());

    for k in m.maximal_events() {
        let t = backward_from_maximal(&r, &m.event(k).id).unwrap();
        println!("maximal {} is undone by {}:{}", m.label_of(k), t.id, t.label);
    }
    let s = State::from_process(&r).unwrap();
    for t in s.transitions() {
        let w = check_op_correspondence(&t).expect("steps add or remove one event");
        println!("step {}:{} corresponds to event {}", t.id, t.label, w.event);
    }
}
