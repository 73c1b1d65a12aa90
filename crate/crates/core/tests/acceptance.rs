//! Runs every acceptance criterion and prints one PASS/FAIL line for each.

use decaylab::suite::{self, SuiteOptions};
use decaylab::verify::Verdict;

fn main() {
    let verbose = std::env::args().any(|a| a == "--nocapture" || a == "-v");
    let opts = SuiteOptions::default();
    let mut failed = 0;
    for c in suite::criteria() {
        let r = c.run(&opts);
        let tag = match r.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        println!("{tag} {:<17} {} ({:.2} s)", r.id, r.title, r.elapsed.as_secs_f64());
        if verbose || r.verdict != Verdict::Pass {
            for d in &r.details {
                println!("       {d}");
            }
        }
        if r.verdict != Verdict::Pass {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria did not pass");
        std::process::exit(1);
    }
}
