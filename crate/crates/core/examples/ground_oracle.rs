//! Cross-check the prover against brute-force model enumeration on random
//! function-free problems.

use entailbench::oracle::{entailment_universe, oracle_classify, random_instance, GenConfig};
use entailbench::prover::{classify_entailment, Budget};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut agree, mut checked) = (0, 0);
    for _ in 0..100 {
        let inst = random_instance(&mut rng, &GenConfig::default());
        let r = classify_entailment(&inst.premises, &inst.conclusion, &Budget::default()).unwrap();
        if !r.conclusive {
            continue;
        }
        let u = entailment_universe(&inst.premises, &inst.conclusion).unwrap();
        let o = oracle_classify(&inst.premises, &inst.conclusion, &u).unwrap();
        checked += 1;
        agree += usize::from(o == r.label);
    }
    println!("{agree}/{checked} conclusive verdicts match the oracle");
}
