//! Parse a configuration file and show the resolved settings.

use entailbench::config::Config;

fn main() {
    let text = "\
# tighter solver limits for a quick pass
budget.timeout_ms = 5000
budget.max_clauses = 20000
clean.max_iters = 2
field.label = answer
assess.concurrency = 16
";
    let cfg = Config::parse(text).unwrap();
    for (key, value) in cfg.snapshot() {
        println!("{key:24} {value}");
    }
    match Config::parse("budget.timeout_ms = soon") {
        Ok(_) => unreachable!(),
        Err(e) => println!("\nrejected: {e}"),
    }
}
