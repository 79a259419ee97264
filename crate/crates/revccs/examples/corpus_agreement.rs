//! Comparing B&F with HHPB of the encodings on a sample of small processes.

use revccs::encodings::encode_ccs;
use revccs::equivalences::corpus::{corpus, default_labels, sample};
use revccs::equivalences::{bf, hhpb};

fn main() {
    let procs = sample(&corpus(&default_labels(), 3, 1), 25, 11);
    let (mut pairs, mut related) = (0, 0);
    for p in &procs {
        for q in &procs {
            let b = bf(p, q).unwrap().holds;
            let h = hhpb(&encode_ccs(p), &encode_ccs(q)).unwrap().holds;
            assert_eq!(b, h, "{p} vs {q}");
            pairs += 1;
            related += b as usize;
        }
    }
    println!("{pairs} pairs, {related} related, bf and hhpb agree on all of them");
}
