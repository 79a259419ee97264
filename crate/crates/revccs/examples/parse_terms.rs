//! Reading, printing and comparing CCS terms and reversible states.

use revccs::rccs::{parse_rccs, rccs_congruent};
use revccs::syntax::{ccs_congruent, congruence_normal, parse_ccs, parse_term, pretty_ccs};

fn main() {
    let p = parse_ccs("(a.b | c.~a) \\ a").expect("valid CCS");
    println!("process:   {}", pretty_ccs(&p));
    println!("normal:    {}", pretty_ccs(&congruence_normal(&p)));

    let q = parse_ccs("c.~a | a.b").unwrap();
    println!("a.b | c.~a congruent to c.~a | a.b: {}", ccs_congruent(&parse_ccs("a.b | c.~a").unwrap(), &q));

    // Unguarded sums are not CCS processes but still have a denotation.
    assert!(parse_ccs("(a | b) + c").is_err());
    println!("general term: {}", parse_term("(a | b) + c").unwrap());

    let r = parse_rccs("<1,c,0>.{} |> (a | b)").unwrap();
    let s = parse_rccs("(Y.<1,c,0>.{} |> a) | (Y.<1,c,0>.{} |> b)").unwrap();
    println!("memory distributes over |: {}", rccs_congruent(&r, &s));
}
