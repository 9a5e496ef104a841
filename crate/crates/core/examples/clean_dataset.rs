//! Break a verified dataset with single defects, then clean it: verify,
//! critique, repair and re-verify each instance.

use entailbench::datapipe::corrupt::corrupt_dataset;
use entailbench::datapipe::synth::synthetic_dataset;
use entailbench::datapipe::{clean_dataset, Category, RuleRepairer, Verifier, DEFAULT_MAX_ITERS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let verifier = Verifier::default();
    let clean = synthetic_dataset(20, 3);
    let (broken, log) = corrupt_dataset(&clean, &verifier, &mut ChaCha8Rng::seed_from_u64(4));
    for c in log.iter().take(5) {
        println!("{} {:?} in {}:\n  {}\n  {}", c.id, c.class, c.field, c.before, c.after);
    }

    let repairer = RuleRepairer::from_instances(&broken);
    let (outcomes, report) = clean_dataset(&broken, &repairer, DEFAULT_MAX_ITERS, &verifier, 4);
    for o in outcomes.iter().take(5) {
        if let Category::VerifiedAfterRepair { iterations, repairs } = &o.category {
            println!("{}: fixed in {iterations} round(s): {}", o.id, repairs.join("; "));
        }
    }
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}
