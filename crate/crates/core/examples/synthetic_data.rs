//! Generate a small verified dataset and print it as JSON lines.

use entailbench::datapipe::synth::synthetic_dataset;
use entailbench::datapipe::{to_jsonl, FieldMap};

fn main() {
    let instances = synthetic_dataset(6, 1);
    print!("{}", to_jsonl(&instances, &FieldMap::default()));
}
