//! End-to-end runs: trace → CDAG → partition sweep → miss curves on disk.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Parser;

use crate::cdag::build_cdag;
use crate::error::{Error, Result};
use crate::partition::{HeuristicParams, Priority};
use crate::rda::{
    default_sizes, miss_curve, original_stream, reuse_distances, write_csv, MissCurve,
};
use crate::sweep::{run_sweep, Execution, VariantResult};
use crate::trace::{generate_trace, read_trace, write_trace, Dataset, Kernel, KernelSpec, Trace};

pub const SUMMARY_HEADER: &str =
    "variant\tmaxlive\tpriority\tlevels\tcomponents\tpeak_liveset\truntime_ms";

#[derive(Debug, Clone, Parser)]
#[command(
    name = "locpot",
    version,
    about = "Reuse distance profiles of original and convex-partition-reordered schedules"
)]
pub struct Args {
    /// Built-in kernel to trace.
    #[arg(
        long,
        required_unless_present = "trace_in",
        conflicts_with = "trace_in"
    )]
    pub kernel: Option<Kernel>,
    /// Problem size.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Row count for givens and householder (defaults to n).
    #[arg(long)]
    pub m: Option<usize>,
    /// Tile size for the tiled kernels (defaults to min(4, n)).
    #[arg(long)]
    pub tile: Option<usize>,
    /// Time steps for jacobi2d.
    #[arg(long, default_value_t = KernelSpec::DEFAULT_TIME_STEPS)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Input data for oddeven_sort and lu: random, reverse_sorted, pivot_half, pivot_all.
    #[arg(long, default_value = "random")]
    pub dataset: Dataset,
    /// Read a trace file instead of generating one.
    #[arg(long)]
    pub trace_in: Option<PathBuf>,
    /// Also write the input trace to this file.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    /// Liveset bound in words; repeat or comma-separate to sweep. Accepts 1e9.
    #[arg(long, required = true, value_delimiter = ',', value_parser = parse_count)]
    pub maxlive: Vec<u64>,
    /// breadth, depth, equal or a neighbor:successor ratio such as 3/2 or 1.5.
    #[arg(long, default_value = "equal", value_delimiter = ',')]
    pub priority: Vec<Priority>,
    /// Compose partitions over growing capacities up to the footprint.
    #[arg(long)]
    pub multilevel: bool,
    /// Capacity multiplier between levels.
    #[arg(long, default_value_t = 2)]
    pub factor: u64,
    /// Do not count input vertices toward the liveset.
    #[arg(long)]
    pub exclude_inputs: bool,
    /// Cache sizes in words, comma separated (defaults to powers of two up to the footprint).
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    pub sizes: Option<Vec<u64>>,
    /// Bytes per word, overriding the trace.
    #[arg(long)]
    pub word_bytes: Option<u32>,
    /// Output directory.
    #[arg(long, default_value = "locpot-out")]
    pub out: PathBuf,
    /// Add the curve of the kernel's tiled variant.
    #[arg(long)]
    pub compare_tiled: bool,
    /// Evaluate sweep entries one at a time.
    #[arg(long)]
    pub sequential: bool,
}

/// Positive integer, also written as a float literal such as `1e9`.
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !f.is_finite() || f < 0.0 || f.fract() != 0.0 || f > u64::MAX as f64 {
        return Err(format!("`{s}` is not a non-negative integer"));
    }
    Ok(f as u64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    Kernel(KernelSpec),
    TraceFile(PathBuf),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Input,
    pub maxlive: Vec<u64>,
    pub priorities: Vec<Priority>,
    pub multilevel: bool,
    pub factor: u64,
    pub count_inputs: bool,
    pub sizes: Option<Vec<u64>>,
    pub word_bytes: Option<u32>,
    pub out: PathBuf,
    pub compare_tiled: bool,
    pub trace_out: Option<PathBuf>,
    pub execution: Execution,
}

impl RunConfig {
    pub fn for_kernel(
        spec: KernelSpec,
        maxlive: u64,
        priority: Priority,
        out: impl Into<PathBuf>,
    ) -> Self {
        Self {
            input: Input::Kernel(spec),
            maxlive: vec![maxlive],
            priorities: vec![priority],
            multilevel: false,
            factor: 2,
            count_inputs: true,
            sizes: None,
            word_bytes: None,
            out: out.into(),
            compare_tiled: false,
            trace_out: None,
            execution: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.maxlive.is_empty() || self.priorities.is_empty() {
            return Err(Error::InvalidParams("sweep lists must not be empty".into()));
        }
        if let Some(sizes) = &self.sizes {
            if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidSizes);
            }
        }
        if self.word_bytes == Some(0) {
            return Err(Error::InvalidParams("word size must be positive".into()));
        }
        for p in self.variants() {
            p.validate()?;
        }
        if let Input::Kernel(spec) = &self.input {
            spec.validate()?;
        }
        Ok(())
    }

    /// Every (maxlive, priority) combination, duplicates dropped.
    pub fn variants(&self) -> Vec<HeuristicParams> {
        let mut out: Vec<HeuristicParams> = Vec::new();
        for &c in &self.maxlive {
            for &pr in &self.priorities {
                let mut p = HeuristicParams::new(c, pr)
                    .multilevel(self.multilevel)
                    .with_factor(self.factor);
                p.count_inputs = self.count_inputs;
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }
}

impl TryFrom<Args> for RunConfig {
    type Error = Error;

    fn try_from(a: Args) -> Result<Self> {
        let input = match (a.kernel, a.trace_in) {
            (_, Some(path)) => Input::TraceFile(path),
            (Some(kernel), None) => {
                let mut spec = KernelSpec::new(kernel, a.n)
                    .with_steps(a.steps)
                    .with_seed(a.seed)
                    .with_dataset(a.dataset);
                if let Some(t) = a.tile {
                    spec = spec.with_tile(t);
                }
                if let Some(m) = a.m {
                    spec = spec.with_m(m);
                }
                Input::Kernel(spec)
            }
            (None, None) => {
                return Err(Error::InvalidParams(
                    "either --kernel or --trace-in is required".into(),
                ))
            }
        };
        let cfg = RunConfig {
            input,
            maxlive: a.maxlive,
            priorities: a.priority,
            multilevel: a.multilevel,
            factor: a.factor,
            count_inputs: !a.exclude_inputs,
            sizes: a.sizes,
            word_bytes: a.word_bytes,
            out: a.out,
            compare_tiled: a.compare_tiled,
            trace_out: a.trace_out,
            execution: if a.sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// File stem of a variant's CSV, e.g. `reordered_depth_c800_ml`.
pub fn variant_name(p: &HeuristicParams) -> String {
    format!(
        "reordered_{}_c{}{}",
        p.priority.label(),
        p.capacity,
        if p.multilevel { "_ml" } else { "" }
    )
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub footprint: u64,
    pub sizes: Vec<u64>,
    pub original: MissCurve,
    pub variants: Vec<(String, VariantResult)>,
    pub tiled: Option<MissCurve>,
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn write_summary<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{SUMMARY_HEADER}")?;
        for (name, r) in &self.variants {
            writeln!(
                w,
                "{name}\t{}\t{}\t{}\t{}\t{}\t{:.3}",
                r.params.capacity,
                r.params.priority,
                r.levels,
                r.components,
                r.peak_liveset,
                r.runtime.as_secs_f64() * 1e3
            )?;
        }
        Ok(())
    }
}

fn source_meta(input: &Input) -> Vec<(&'static str, String)> {
    match input {
        Input::Kernel(s) => vec![
            ("kernel", s.kernel.to_string()),
            ("n", s.n.to_string()),
            ("m", s.rows().to_string()),
            ("tile", s.tile.to_string()),
            ("steps", s.time_steps.to_string()),
            ("seed", s.seed.to_string()),
            ("dataset", s.dataset.to_string()),
        ],
        Input::TraceFile(p) => vec![("trace", p.display().to_string())],
    }
}

fn curve_of(trace: &Trace, stream: &[u64], sizes: &[u64]) -> Result<MissCurve> {
    miss_curve(
        &reuse_distances(stream),
        sizes,
        trace.total_flops(),
        trace.word_bytes,
    )
}

fn write_curve(path: &Path, curve: &MissCurve, meta: &[(&str, String)]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_csv(curve, meta, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Runs the whole pipeline for every variant and writes `original.csv`, one
/// CSV per variant, `tiled.csv` when requested and available, and
/// `summary.tsv` into `cfg.out`.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let mut trace = match &cfg.input {
        Input::Kernel(spec) => generate_trace(spec)?,
        Input::TraceFile(path) => read_trace(path)?,
    };
    if let Some(wb) = cfg.word_bytes {
        trace.word_bytes = wb;
    }
    if let Some(path) = &cfg.trace_out {
        write_trace(&trace, path)?;
    }

    let cdag = build_cdag(&trace);
    let footprint = cdag.footprint() as u64;
    let sizes = cfg
        .sizes
        .clone()
        .unwrap_or_else(|| default_sizes(footprint));
    fs::create_dir_all(&cfg.out)?;
    let meta = source_meta(&cfg.input);
    let mut files = Vec::new();
    let mut notes = Vec::new();

    let original = curve_of(&trace, &original_stream(&trace), &sizes)?;
    let path = cfg.out.join("original.csv");
    let mut m = meta.clone();
    m.push(("variant", "original".into()));
    write_curve(&path, &original, &m)?;
    files.push(path);

    let params = cfg.variants();
    let results = run_sweep(&trace, &cdag, &params, &sizes, cfg.execution)?;
    let mut variants = Vec::with_capacity(results.len());
    for r in results {
        let name = variant_name(&r.params);
        let mut m = meta.clone();
        m.extend([
            ("variant", name.clone()),
            ("maxlive", r.params.capacity.to_string()),
            ("priority", r.params.priority.to_string()),
            ("multilevel", r.params.multilevel.to_string()),
            ("factor", r.params.factor.to_string()),
            ("count_inputs", r.params.count_inputs.to_string()),
        ]);
        let path = cfg.out.join(format!("{name}.csv"));
        write_curve(&path, &r.curve, &m)?;
        files.push(path);
        if r.forced > 0 {
            notes.push(format!("{name}: {} force-started components", r.forced));
        }
        variants.push((name, r));
    }

    let mut tiled = None;
    if cfg.compare_tiled {
        match &cfg.input {
            Input::Kernel(spec) => match spec.kernel.tiled_variant() {
                Some(tk) => {
                    let tspec = spec.for_kernel(tk);
                    let mut t = generate_trace(&tspec)?;
                    if let Some(wb) = cfg.word_bytes {
                        t.word_bytes = wb;
                    }
                    let curve = curve_of(&t, &original_stream(&t), &sizes)?;
                    let mut m = source_meta(&Input::Kernel(tspec));
                    m.push(("variant", "tiled".into()));
                    let path = cfg.out.join("tiled.csv");
                    write_curve(&path, &curve, &m)?;
                    files.push(path);
                    tiled = Some(curve);
                }
                None => notes.push(format!("{} has no tiled variant", spec.kernel)),
            },
            Input::TraceFile(_) => notes.push("no tiled variant for a trace file input".into()),
        }
    }

    let report = RunReport {
        footprint,
        sizes,
        original,
        variants,
        tiled,
        files,
        notes,
    };
    let path = cfg.out.join("summary.tsv");
    let mut w = BufWriter::new(File::create(&path)?);
    report.write_summary(&mut w)?;
    w.flush()?;
    let mut report = report;
    report.files.push(path);
    Ok(report)
}
