//! Operations on (identified) configuration structures.

use revccs::structures::{iso_search, Ident, SLabel, Structure, SyncAlgebra};
use revccs::syntax::Label;

fn act(s: &str) -> SLabel {
    SLabel::act(match s.strip_prefix('~') {
        Some(n) => Label::output(n),
        None => Label::input(s),
    })
}

fn stack(events: &[(&str, u32)]) -> Structure {
    events.iter().fold(Structure::zero_identified(), |s, (l, i)| s.postfix(act(l), Ident::Base(*i)).unwrap())
}

fn main() {
    let a = Structure::zero().prefix(act("a"));
    let choice = a.choice(&a).unwrap();
    let par = a.parallel_compose_proc(&a, &SyncAlgebra::Proc);
    println!("a + a: {} configurations; a | a: {}", choice.config_count(), par.config_count());
    println!("isomorphic: {}", iso_search(&choice, &par, false).is_some());

    let left = stack(&[("a", 2), ("b", 3)]);
    let right = stack(&[("c", 1), ("~a", 2)]);
    println!("product: {} events", left.product(&right).len());
    for row in left.composition_table(&right, &SyncAlgebra::Mem).unwrap() {
        println!("  {}  {}  ->  {} : {}", row.event, row.product_ident, row.ident, row.label);
    }
    let composed = left.parallel_compose_mem(&right, &SyncAlgebra::Mem).unwrap();
    println!("composed memory: {} configurations, valid: {}", composed.config_count(), composed.validate().is_valid());
}
