//! Reuse distance analysis for a fully associative LRU cache of words.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::trace::{Addr, Trace};

/// Hit rule recorded in CSV metadata: a reference hits in a cache of `C`
/// words iff its reuse distance is finite and at most `C`.
pub const HIT_CONVENTION: &str = "distance<=C";

pub const CSV_HEADER: &str = "cache_size_words,misses,hits,miss_ratio,bytes_per_flop";

/// Binary indexed tree over reference timestamps. A timestamp holds 1 while
/// it is the most recent access of its address.
struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, i: usize, delta: i32) {
        let mut i = i + 1;
        while i < self.tree.len() {
            self.tree[i] = self.tree[i].wrapping_add_signed(delta);
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over `[0, i)`.
    fn prefix(&self, i: usize) -> u64 {
        let mut i = i;
        let mut s = 0u64;
        while i > 0 {
            s += u64::from(self.tree[i]);
            i &= i - 1;
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReuseProfile {
    /// Per-reference distance, `None` on first touch.
    pub distances: Vec<Option<u64>>,
    /// `histogram[d]` counts references with finite distance `d`.
    pub histogram: Vec<u64>,
    pub inf_count: u64,
    pub total_refs: u64,
    pub distinct_addrs: u64,
}

/// Reuse distance of every reference in `seq`.
///
/// The distance of a reference is the number of distinct addresses touched
/// strictly between it and the previous reference to the same address. Each
/// address keeps a marker at its latest timestamp; the distance is the number
/// of markers after the previous timestamp. O(N log N).
pub fn reuse_distances(seq: &[Addr]) -> ReuseProfile {
    let mut last: HashMap<Addr, usize> = HashMap::with_capacity(1024);
    let mut marks = Fenwick::new(seq.len());
    let mut distances = Vec::with_capacity(seq.len());
    let mut histogram: Vec<u64> = Vec::new();
    let mut inf_count = 0u64;
    let mut live = 0u64;

    for (now, &a) in seq.iter().enumerate() {
        match last.insert(a, now) {
            Some(prev) => {
                let d = live - marks.prefix(prev + 1);
                marks.add(prev, -1);
                let di = d as usize;
                if di >= histogram.len() {
                    histogram.resize(di + 1, 0);
                }
                histogram[di] += 1;
                distances.push(Some(d));
            }
            None => {
                live += 1;
                inf_count += 1;
                distances.push(None);
            }
        }
        marks.add(now, 1);
    }

    ReuseProfile {
        distances,
        histogram,
        inf_count,
        total_refs: seq.len() as u64,
        distinct_addrs: last.len() as u64,
    }
}

impl ReuseProfile {
    /// Number of references that hit in a cache of `capacity` words.
    pub fn hits(&self, capacity: u64) -> u64 {
        let upto = (capacity as usize)
            .saturating_add(1)
            .min(self.histogram.len());
        self.histogram[..upto].iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MissPoint {
    pub cache_size: u64,
    pub misses: u64,
    pub hits: u64,
    pub miss_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissCurve {
    pub points: Vec<MissPoint>,
    pub total_refs: u64,
    pub distinct_addrs: u64,
    pub flops: u64,
    pub word_bytes: u32,
}

impl MissCurve {
    pub fn misses_at(&self, cache_size: u64) -> Option<u64> {
        self.points
            .iter()
            .find(|p| p.cache_size == cache_size)
            .map(|p| p.misses)
    }
}

/// Powers of two from 1 below `footprint`, then `footprint` itself.
pub fn default_sizes(footprint: u64) -> Vec<u64> {
    let mut sizes: Vec<u64> = std::iter::successors(Some(1u64), |&c| c.checked_mul(2))
        .take_while(|&c| c < footprint)
        .collect();
    sizes.push(footprint.max(1));
    sizes
}

/// Hit/miss counts at each cache size, read off the cumulative histogram.
pub fn miss_curve(
    profile: &ReuseProfile,
    sizes: &[u64],
    flops: u64,
    word_bytes: u32,
) -> Result<MissCurve> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSizes);
    }
    let mut cumulative = Vec::with_capacity(profile.histogram.len());
    let mut acc = 0u64;
    for &h in &profile.histogram {
        acc += h;
        cumulative.push(acc);
    }
    let hits_at = |c: u64| -> u64 {
        if cumulative.is_empty() {
            0
        } else {
            cumulative[(c as usize).min(cumulative.len() - 1)]
        }
    };
    let points = sizes
        .iter()
        .map(|&c| {
            let hits = hits_at(c);
            let misses = profile.total_refs - hits;
            let miss_ratio = if profile.total_refs == 0 {
                0.0
            } else {
                misses as f64 / profile.total_refs as f64
            };
            MissPoint {
                cache_size: c,
                misses,
                hits,
                miss_ratio,
            }
        })
        .collect();
    Ok(MissCurve {
        points,
        total_refs: profile.total_refs,
        distinct_addrs: profile.distinct_addrs,
        flops,
        word_bytes,
    })
}

/// Main-memory traffic per flop: `misses * word_bytes / flops`.
pub fn bytes_per_flop(curve: &MissCurve) -> Result<Vec<(u64, f64)>> {
    if curve.flops == 0 {
        return Err(Error::ZeroFlops);
    }
    let wb = f64::from(curve.word_bytes);
    let flops = curve.flops as f64;
    Ok(curve
        .points
        .iter()
        .map(|p| (p.cache_size, p.misses as f64 * wb / flops))
        .collect())
}

/// Reference stream of `trace` executed in `order`: each record contributes
/// its reads in order, then its write.
pub fn replay(trace: &Trace, order: &[usize]) -> Result<Vec<Addr>> {
    let n = trace.len();
    if order.len() != n {
        return Err(Error::NotPermutation(format!(
            "{} entries for {} records",
            order.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    let mut out = Vec::with_capacity(trace.total_refs() as usize);
    for &id in order {
        if id >= n || std::mem::replace(&mut seen[id], true) {
            return Err(Error::NotPermutation(format!("bad or repeated id {id}")));
        }
        let r = &trace.records[id];
        out.extend_from_slice(&r.reads);
        out.push(r.write);
    }
    Ok(out)
}

/// Replay in original order.
pub fn original_stream(trace: &Trace) -> Vec<Addr> {
    let mut out = Vec::with_capacity(trace.total_refs() as usize);
    for r in &trace.records {
        out.extend_from_slice(&r.reads);
        out.push(r.write);
    }
    out
}

/// Writes a miss curve as CSV, preceded by `#` metadata lines.
pub fn write_csv<W: Write>(
    curve: &MissCurve,
    extra_meta: &[(&str, String)],
    mut w: W,
) -> Result<()> {
    writeln!(w, "# hit_convention={HIT_CONVENTION}")?;
    writeln!(w, "# word_bytes={}", curve.word_bytes)?;
    writeln!(w, "# total_refs={}", curve.total_refs)?;
    writeln!(w, "# distinct_addrs={}", curve.distinct_addrs)?;
    writeln!(w, "# flops={}", curve.flops)?;
    for (k, v) in extra_meta {
        writeln!(w, "# {k}={v}")?;
    }
    writeln!(w, "{CSV_HEADER}")?;
    let bpf = bytes_per_flop(curve).ok();
    for (i, p) in curve.points.iter().enumerate() {
        let b = match &bpf {
            Some(v) => format!("{:.6}", v[i].1),
            None => "nan".to_string(),
        };
        writeln!(
            w,
            "{},{},{},{:.6},{}",
            p.cache_size, p.misses, p.hits, p.miss_ratio, b
        )?;
    }
    w.flush()?;
    Ok(())
}
