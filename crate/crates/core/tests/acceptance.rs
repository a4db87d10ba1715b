use std::process::ExitCode;

use hoalg::acceptance::{run_all, TITLES};

fn main() -> ExitCode {
    let outcomes = run_all();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    if outcomes.len() == TITLES.len() && failed.is_empty() {
        println!("acceptance: {} of {} criteria pass", outcomes.len(), TITLES.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
