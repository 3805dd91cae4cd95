//! Dynamic execution traces.
//!
//! A trace is the sequence of dynamic assignments performed by a program, in
//! original execution order. Every record reads zero or more words and writes
//! exactly one word. Addresses are abstract word identifiers: arrays are laid
//! out row-major from a base offset, and every textual scalar gets its own
//! word.

mod io;
mod kernels;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use io::{read_trace, read_trace_from, write_trace, write_trace_to, TRACE_MAGIC};

/// Abstract word address.
pub type Addr = u64;

pub const DEFAULT_WORD_BYTES: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    /// Position in the original execution, 0-based.
    pub id: usize,
    pub reads: Vec<Addr>,
    pub write: Addr,
    pub flops: u32,
}

impl TraceRecord {
    /// Number of memory references (reads plus the write).
    pub fn refs(&self) -> usize {
        self.reads.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub word_bytes: u32,
}

impl Default for Trace {
    fn default() -> Self {
        Self::new(DEFAULT_WORD_BYTES)
    }
}

impl Trace {
    pub fn new(word_bytes: u32) -> Self {
        Self {
            records: Vec::new(),
            word_bytes,
        }
    }

    /// Appends a record, assigning the next consecutive id.
    pub fn push(&mut self, reads: Vec<Addr>, write: Addr, flops: u32) {
        let id = self.records.len();
        self.records.push(TraceRecord {
            id,
            reads,
            write,
            flops,
        });
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_flops(&self) -> u64 {
        self.records.iter().map(|r| u64::from(r.flops)).sum()
    }

    pub fn total_refs(&self) -> u64 {
        self.records.iter().map(|r| r.refs() as u64).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Seidel,
    SeidelTiled,
    Jacobi2d,
    Jacobi2dTiled,
    Matmul,
    MatmulTiled,
    FloydWarshall,
    Givens,
    Householder,
    OddEvenSort,
    LuNonBlocked,
}

impl Kernel {
    pub const ALL: [Kernel; 11] = [
        Kernel::Seidel,
        Kernel::SeidelTiled,
        Kernel::Jacobi2d,
        Kernel::Jacobi2dTiled,
        Kernel::Matmul,
        Kernel::MatmulTiled,
        Kernel::FloydWarshall,
        Kernel::Givens,
        Kernel::Householder,
        Kernel::OddEvenSort,
        Kernel::LuNonBlocked,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Seidel => "seidel",
            Kernel::SeidelTiled => "seidel_tiled",
            Kernel::Jacobi2d => "jacobi2d",
            Kernel::Jacobi2dTiled => "jacobi2d_tiled",
            Kernel::Matmul => "matmul",
            Kernel::MatmulTiled => "matmul_tiled",
            Kernel::FloydWarshall => "floyd_warshall",
            Kernel::Givens => "givens",
            Kernel::Householder => "householder",
            Kernel::OddEvenSort => "oddeven_sort",
            Kernel::LuNonBlocked => "lu_nonblocked",
        }
    }

    /// The loop-tiled counterpart performing the same operations, if any.
    pub fn tiled_variant(self) -> Option<Kernel> {
        match self {
            Kernel::Seidel => Some(Kernel::SeidelTiled),
            Kernel::Jacobi2d => Some(Kernel::Jacobi2dTiled),
            Kernel::Matmul => Some(Kernel::MatmulTiled),
            _ => None,
        }
    }

    pub fn is_tiled(self) -> bool {
        matches!(
            self,
            Kernel::SeidelTiled | Kernel::Jacobi2dTiled | Kernel::MatmulTiled
        )
    }

    /// Whether the trace depends on input values (and therefore on the
    /// seed and dataset).
    pub fn is_value_dependent(self) -> bool {
        matches!(self, Kernel::OddEvenSort | Kernel::LuNonBlocked)
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kernel::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownKernel(s.to_string()))
    }
}

/// Input dataset for the value-dependent kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Dataset {
    #[default]
    Random,
    ReverseSorted,
    PivotHalf,
    PivotAll,
}

impl Dataset {
    pub fn name(self) -> &'static str {
        match self {
            Dataset::Random => "random",
            Dataset::ReverseSorted => "reverse_sorted",
            Dataset::PivotHalf => "pivot_half",
            Dataset::PivotAll => "pivot_all",
        }
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dataset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Dataset::Random),
            "reverse_sorted" => Ok(Dataset::ReverseSorted),
            "pivot_half" => Ok(Dataset::PivotHalf),
            "pivot_all" => Ok(Dataset::PivotAll),
            _ => Err(Error::UnknownDataset(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelSpec {
    pub kernel: Kernel,
    pub n: usize,
    /// Row count for the rectangular QR kernels; defaults to `n`.
    pub m: Option<usize>,
    pub tile: usize,
    pub time_steps: usize,
    pub seed: u64,
    pub dataset: Dataset,
}

impl KernelSpec {
    pub const DEFAULT_TILE: usize = 4;
    pub const DEFAULT_TIME_STEPS: usize = 4;

    pub fn new(kernel: Kernel, n: usize) -> Self {
        Self {
            kernel,
            n,
            m: None,
            tile: Self::DEFAULT_TILE.min(n.max(1)),
            time_steps: Self::DEFAULT_TIME_STEPS,
            seed: 0,
            dataset: Dataset::Random,
        }
    }

    pub fn with_tile(mut self, tile: usize) -> Self {
        self.tile = tile;
        self
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.time_steps = steps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_dataset(mut self, dataset: Dataset) -> Self {
        self.dataset = dataset;
        self
    }

    /// Same sizes, different kernel.
    pub fn for_kernel(&self, kernel: Kernel) -> Self {
        Self {
            kernel,
            ..self.clone()
        }
    }

    pub fn rows(&self) -> usize {
        self.m.unwrap_or(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.tile == 0 {
            return bad("tile must be at least 1".into());
        }
        if self.tile > self.n {
            return bad(format!("tile {} exceeds n {}", self.tile, self.n));
        }
        if self.m == Some(0) {
            return bad("m must be at least 1".into());
        }
        match self.kernel {
            Kernel::Householder if self.n > self.rows() => bad(format!(
                "householder needs n <= m (n={}, m={})",
                self.n,
                self.rows()
            )),
            Kernel::OddEvenSort if !self.n.is_multiple_of(2) => bad(format!(
                "oddeven_sort needs an even list length, got {}",
                self.n
            )),
            Kernel::OddEvenSort
                if !matches!(self.dataset, Dataset::Random | Dataset::ReverseSorted) =>
            {
                bad(format!(
                    "dataset {} does not apply to oddeven_sort",
                    self.dataset
                ))
            }
            Kernel::LuNonBlocked if self.dataset == Dataset::ReverseSorted => {
                bad("dataset reverse_sorted does not apply to lu_nonblocked".into())
            }
            _ => Ok(()),
        }
    }
}

/// Generates the dynamic trace of the kernel described by `spec`.
pub fn generate_trace(spec: &KernelSpec) -> Result<Trace> {
    spec.validate()?;
    let n = spec.n;
    let trace = match spec.kernel {
        Kernel::Seidel => kernels::seidel(n, None),
        Kernel::SeidelTiled => kernels::seidel(n, Some(spec.tile)),
        Kernel::Jacobi2d => kernels::jacobi2d(n, spec.time_steps, None),
        Kernel::Jacobi2dTiled => kernels::jacobi2d(n, spec.time_steps, Some(spec.tile)),
        Kernel::Matmul => kernels::matmul(n, None),
        Kernel::MatmulTiled => kernels::matmul(n, Some(spec.tile)),
        Kernel::FloydWarshall => kernels::floyd_warshall(n),
        Kernel::Givens => kernels::givens(spec.rows(), n),
        Kernel::Householder => kernels::householder(spec.rows(), n),
        Kernel::OddEvenSort => kernels::oddeven_sort(n, spec.dataset, spec.seed),
        Kernel::LuNonBlocked => kernels::lu_nonblocked(n, spec.dataset, spec.seed),
    };
    Ok(trace)
}
