use std::io::{self, Write};

use anyhow::Context;
use clap::Parser;

use locpot::cli::{run, Args, RunConfig};

fn main() -> anyhow::Result<()> {
    let cfg = RunConfig::try_from(Args::parse()).context("invalid configuration")?;
    let report = run(&cfg).with_context(|| format!("run into {} failed", cfg.out.display()))?;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    report.write_summary(&mut out)?;
    out.flush()?;
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    eprintln!(
        "footprint {} words, {} files in {}",
        report.footprint,
        report.files.len(),
        cfg.out.display()
    );
    Ok(())
}
