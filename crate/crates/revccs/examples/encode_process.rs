//! The configuration structure denoted by a process.

use revccs::encodings::encode_ccs;
use revccs::syntax::parse_ccs;

fn main() {
    let s = encode_ccs(&parse_ccs("a.b | c.~a").unwrap());
    println!("{} events, {} configurations", s.len(), s.config_count());
    for x in s.maximal_configs() {
        println!("maximal: {}", s.config_literal(&x));
    }
    assert!(s.validate().is_valid());
    println!("{}", serde_json::to_string_pretty(&s.to_json()).unwrap());
}
