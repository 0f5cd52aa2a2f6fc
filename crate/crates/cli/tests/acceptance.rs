use std::process::ExitCode;

use udw_cli::acceptance::{run, ClosedForms};

fn main() -> ExitCode {
    println!("\nacceptance suite");
    let outcomes = run(&[], &ClosedForms::default(), |o| println!("{o}")).expect("all criteria known");
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria passed\n", outcomes.len(), outcomes.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED {}\n", failed.join(", "));
        ExitCode::FAILURE
    }
}
