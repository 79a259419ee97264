//! Deciding the bisimulations, with witnesses and failure certificates.

use revccs::equivalences::{check_terms, CheckOptions, Relation};
use revccs::syntax::parse_term;

fn main() {
    let pairs = [
        ("a.(b + b)", "(a.b) + (a.b)"),
        ("(a.a) | b", "a | a | b"),
        ("a | a", "a.a"),
        ("(a | (b + c)) + (a | b) + ((a + c) | b)", "(a | (b + c)) + ((a + c) | b)"),
    ];
    for (l, r) in pairs {
        let (t1, t2) = (parse_term(l).unwrap(), parse_term(r).unwrap());
        println!("{l}  vs  {r}");
        for rel in Relation::ALL {
            match check_terms(rel, &t1, &t2, &CheckOptions::default()) {
                Ok(res) => println!("  {rel:>9}: {} ({} candidates)", res.verdict(), res.candidates),
                Err(e) => println!("  {rel:>9}: {e}"),
            }
        }
    }
    let res = check_terms(Relation::Hpb, &parse_term("(a.a) | b").unwrap(), &parse_term("a | a | b").unwrap(), &CheckOptions::default()).unwrap();
    print!("\nwhy hpb fails:\n{}", res.to_text());
}
