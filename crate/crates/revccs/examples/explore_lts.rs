//! Exploring the reversible transition system of a process.

use revccs::rccs::{explore, Direction};
use revccs::syntax::parse_ccs;

fn main() {
    let p = parse_ccs("a.b | ~a").unwrap();
    let g = explore(&p).expect("finite");
    println!("{} states, {} forward edges", g.states.len(), g.forward_edge_count());
    for e in g.edges.iter().filter(|e| e.direction == Direction::Forward) {
        println!("  {}  --{}:{}-->  {}", g.states[e.src], e.id, e.label, g.states[e.dst]);
    }
    println!("\n{}", g.to_dot());
}
