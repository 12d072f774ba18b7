//! Drive one experiment from a run file and print its report as JSON.

use relquant::harness::{execute, RunOptions, Subcommand};

fn main() -> relquant::Result<()> {
    let mut opts = RunOptions::new(Subcommand::Stationary);
    opts.config = std::env::args().nth(1).map(Into::into);
    let report = execute(&opts)?;
    println!("{}", report.to_json()?);
    Ok(())
}
