//! Acceptance gate: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_reuse_distances, named_arcs_from_cdag, named_arcs_from_trace, SimLive};
use locpot::cdag::{build_cdag, Cdag};
use locpot::cli::{run, RunConfig};
use locpot::partition::{
    partition, verify_convexity, CdagLevel, HeuristicParams, Hierarchy, Priority,
};
use locpot::rda::{miss_curve, original_stream, replay, reuse_distances, MissCurve};
use locpot::schedule::{component_order, linearize, respects_dependencies};
use locpot::trace::{generate_trace, Kernel, KernelSpec, Trace};

type Outcome = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn curve(t: &Trace, order: Option<&[usize]>, sizes: &[u64]) -> MissCurve {
    let stream = match order {
        Some(o) => replay(t, o).expect("valid order"),
        None => original_stream(t),
    };
    miss_curve(
        &reuse_distances(&stream),
        sizes,
        t.total_flops(),
        t.word_bytes,
    )
    .unwrap()
}

fn misses(c: &MissCurve) -> Vec<u64> {
    c.points.iter().map(|p| p.misses).collect()
}

fn fig2_exactness() -> Outcome {
    // d a c b c c e b a d
    let seq = [3, 0, 2, 1, 2, 2, 4, 1, 0, 3];
    let start = Instant::now();
    let p = reuse_distances(&seq);
    let took = start.elapsed();
    let want = [
        None,
        None,
        None,
        None,
        Some(1),
        Some(0),
        None,
        Some(2),
        Some(3),
        Some(4),
    ];
    if p.distances != want {
        return Err(format!("got {:?}", p.distances));
    }
    if took >= Duration::from_millis(1) {
        return Err(format!("took {took:?}"));
    }
    Ok(format!("exact in {took:?}"))
}

fn seidel_cdag_size() -> Outcome {
    let g = build_cdag(&generate_trace(&KernelSpec::new(Kernel::Seidel, 6)).unwrap());
    match g.num_ops() {
        16 => Ok("16 operation vertices".into()),
        k => Err(format!("{k} operation vertices")),
    }
}

fn rda_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let start = Instant::now();
    let mut mismatches = 0;
    let cases = 1000;
    for _ in 0..cases {
        let len = rng.gen_range(0..=500);
        let alphabet = rng.gen_range(1..=32u64);
        let seq: Vec<u64> = (0..len).map(|_| rng.gen_range(0..alphabet)).collect();
        if reuse_distances(&seq).distances != brute_reuse_distances(&seq) {
            mismatches += 1;
        }
    }
    let took = start.elapsed();
    if mismatches > 0 || took >= Duration::from_secs(10) {
        return Err(format!("{mismatches} mismatches in {took:?}"));
    }
    Ok(format!("{cases} sequences, 0 mismatches, {took:.2?}"))
}

/// Every partition produced by the convexity/liveness sweep.
struct SweepRun {
    label: String,
    cdag: Cdag,
    params: HeuristicParams,
    hierarchy: Hierarchy,
}

fn sweep_runs() -> (Vec<SweepRun>, Duration) {
    let start = Instant::now();
    let mut runs = Vec::new();
    for k in Kernel::ALL {
        for n in [6, 8, 12] {
            let t = generate_trace(&KernelSpec::new(k, n)).unwrap();
            let g = build_cdag(&t);
            for cap in [4u64, 16, 64] {
                for pr in [Priority::BREADTH, Priority::DEPTH, Priority::EQUAL] {
                    for ml in [false, true] {
                        let params = HeuristicParams::new(cap, pr).multilevel(ml);
                        let hierarchy = partition(&g, &params).unwrap();
                        runs.push(SweepRun {
                            label: format!("{k} n={n} C={cap} {pr} ml={ml}"),
                            cdag: g.clone(),
                            params,
                            hierarchy,
                        });
                    }
                }
            }
        }
    }
    (runs, start.elapsed())
}

fn convexity(runs: &[SweepRun], took: Duration) -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut partitions = 0;
    for r in runs {
        let level = CdagLevel::new(&r.cdag);
        let nv = r.cdag.num_vertices();
        for (i, l) in r.hierarchy.levels.iter().enumerate() {
            partitions += 1;
            let mut p = l.partition.clone();
            p.assignment = l.base_assignment(nv);
            let covered = p.assignment.iter().all(|&c| (c as usize) < p.len());
            if !covered
                || !verify_convexity(&level, &p)
                || component_order(&r.cdag, &p.assignment).is_err()
            {
                bad.push(format!("{} level {i}", r.label));
            }
        }
        if !respects_dependencies(&r.cdag, &linearize(&r.cdag, &r.hierarchy).order) {
            bad.push(format!("{} schedule", r.label));
        }
    }
    let took = took + start.elapsed();
    if !bad.is_empty() || took >= Duration::from_secs(60) {
        return Err(format!(
            "{} violations in {took:.2?}, first {:?}",
            bad.len(),
            bad.first()
        ));
    }
    Ok(format!(
        "{partitions} partitions from {} runs, 0 violations, {took:.2?}",
        runs.len()
    ))
}

/// Replays every level's additions with an independent liveset and checks
/// the bound after each one.
fn liveness(runs: &[SweepRun]) -> Outcome {
    let mut over = Vec::new();
    let (mut comps, mut forced) = (0usize, 0usize);
    for r in runs {
        let cap = r.params.capacity;
        for (li, l) in r.hierarchy.levels.iter().enumerate() {
            let lcap = l.capacity as usize;
            let mut sim = SimLive::new(&r.cdag);
            for (k, c) in l.partition.components.iter().enumerate() {
                sim.clear();
                for (pos, &m) in c.members.iter().enumerate() {
                    let bases: Vec<u32> = if li == 0 {
                        vec![m]
                    } else {
                        r.hierarchy.levels[li - 1].base_members(m as usize).to_vec()
                    };
                    let mut size = sim.live.len();
                    for b in bases {
                        size = sim.fire(b);
                    }
                    let exempt = pos == 0 && c.forced_first;
                    if size > lcap && !exempt {
                        over.push(format!("{} level {li} comp {k}: {size} > {lcap}", r.label));
                    }
                }
            }
            if cap >= 16 {
                comps += l.partition.len();
                forced += l.partition.forced_count();
            }
        }
    }
    let rate = forced as f64 / comps.max(1) as f64;
    if !over.is_empty() || rate >= 0.05 {
        return Err(format!(
            "{} bound violations (first {:?}), forced {forced}/{comps} = {:.2}%",
            over.len(),
            over.first(),
            100.0 * rate
        ));
    }
    Ok(format!(
        "bound holds, forced at C>=16: {forced}/{comps} = {:.2}%",
        100.0 * rate
    ))
}

fn identity_recovery() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for k in Kernel::ALL {
        for n in 3..=12 {
            let spec = KernelSpec::new(k, n);
            if spec.validate().is_err() {
                continue;
            }
            let t = generate_trace(&spec).unwrap();
            let g = build_cdag(&t);
            let fp = (g.footprint() as u64).max(1);
            let params = HeuristicParams::new(fp, Priority::EQUAL);
            let order = linearize(&g, &partition(&g, &params).unwrap()).order;
            checked += 1;
            let identity = order.iter().enumerate().all(|(i, &r)| i == r);
            let same_profile = reuse_distances(&replay(&t, &order).unwrap())
                == reuse_distances(&original_stream(&t));
            if !identity || !same_profile {
                failures.push(format!("{k}/{n}"));
            }
        }
    }
    if failures.is_empty() {
        Ok(format!(
            "{checked} kernel sizes reproduce the original order"
        ))
    } else {
        Err(format!(
            "{} of {checked} kernel sizes reorder at C = footprint: {}",
            failures.len(),
            failures.join(" ")
        ))
    }
}

fn tiled_isomorphism() -> Outcome {
    let mut checked = 0;
    for (plain, tiled) in [
        (Kernel::Seidel, Kernel::SeidelTiled),
        (Kernel::Matmul, Kernel::MatmulTiled),
    ] {
        for n in 2..=8 {
            for tile in 1..=n {
                let spec = KernelSpec::new(plain, n).with_tile(tile);
                let a = generate_trace(&spec).unwrap();
                let b = generate_trace(&spec.for_kernel(tiled)).unwrap();
                let (ga, gb) = (build_cdag(&a), build_cdag(&b));
                let arcs_a = named_arcs_from_cdag(&ga, &a);
                let arcs_b = named_arcs_from_cdag(&gb, &b);
                let names = |g: &Cdag, t: &Trace| -> BTreeSet<_> {
                    common::vertex_names(g, t).into_iter().collect()
                };
                if arcs_a != arcs_b
                    || names(&ga, &a) != names(&gb, &b)
                    || ga.num_vertices() != gb.num_vertices()
                    || arcs_a != named_arcs_from_trace(&a)
                {
                    return Err(format!("{plain} n={n} tile={tile} differs"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} tiled/untiled pairs isomorphic"))
}

fn jacobi_trend() -> Outcome {
    let spec = KernelSpec::new(Kernel::Jacobi2d, 32).with_steps(30);
    let t = generate_trace(&spec).unwrap();
    let g = build_cdag(&t);
    let fp = g.footprint() as u64;
    let sizes: Vec<u64> = (64..=fp / 2).collect();
    let params = HeuristicParams::new(800, Priority::DEPTH).multilevel(true);
    let order = linearize(&g, &partition(&g, &params).unwrap()).order;
    let orig = misses(&curve(&t, None, &sizes));
    let re = misses(&curve(&t, Some(&order), &sizes));
    let worse: Vec<u64> = sizes
        .iter()
        .zip(orig.iter().zip(&re))
        .filter(|(_, (o, r))| r > o)
        .map(|(&c, _)| c)
        .collect();

    let quarter = [fp / 4];
    let re_q = misses(&curve(&t, Some(&order), &quarter))[0];
    let (best_tile, tiled_q) = [2usize, 4, 8, 16]
        .into_iter()
        .map(|tile| {
            let tt =
                generate_trace(&spec.for_kernel(Kernel::Jacobi2dTiled).with_tile(tile)).unwrap();
            (tile, misses(&curve(&tt, None, &quarter))[0])
        })
        .min_by_key(|&(_, m)| m)
        .unwrap();
    let ratio = re_q as f64 / tiled_q as f64;
    let detail = format!(
        "fp={fp}, worse at {} of {} sizes, at C={}: reordered {re_q} vs tile-{best_tile} {tiled_q} ({ratio:.2}x)",
        worse.len(),
        sizes.len(),
        fp / 4
    );
    if worse.is_empty() && ratio <= 2.0 {
        Ok(detail)
    } else {
        Err(format!("{detail}, first worse size {:?}", worse.first()))
    }
}

fn matmul_trend() -> Outcome {
    let t = generate_trace(&KernelSpec::new(Kernel::Matmul, 30)).unwrap();
    let g = build_cdag(&t);
    let order = linearize(
        &g,
        &partition(&g, &HeuristicParams::new(25, Priority::EQUAL)).unwrap(),
    )
    .order;
    let o = misses(&curve(&t, None, &[512]))[0];
    let r = misses(&curve(&t, Some(&order), &[512]))[0];
    let reduction = 1.0 - r as f64 / o as f64;
    let detail = format!(
        "C=512: original {o}, reordered {r}, reduction {:.1}%",
        100.0 * reduction
    );
    if r < o && reduction >= 0.20 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Best mean relative miss reduction over the cache sizes, across a sweep of
/// maxlive, priority and multi-level settings.
fn best_reduction(k: Kernel, sizes: &[u64]) -> (f64, String) {
    let t = generate_trace(&KernelSpec::new(k, 30)).unwrap();
    let g = build_cdag(&t);
    let orig = misses(&curve(&t, None, sizes));
    let mut best = (f64::NEG_INFINITY, String::new());
    for cap in [16u64, 32, 64, 128, 256, 512, 1024] {
        for pr in [Priority::BREADTH, Priority::DEPTH, Priority::EQUAL] {
            for ml in [false, true] {
                let params = HeuristicParams::new(cap, pr).multilevel(ml);
                let order = linearize(&g, &partition(&g, &params).unwrap()).order;
                let re = misses(&curve(&t, Some(&order), sizes));
                let red: Vec<f64> = orig
                    .iter()
                    .zip(&re)
                    .map(|(&o, &r)| 1.0 - r as f64 / o as f64)
                    .collect();
                let mean = red.iter().sum::<f64>() / red.len() as f64;
                if mean > best.0 {
                    let per: Vec<String> = red.iter().map(|x| format!("{x:.2}")).collect();
                    best = (
                        mean,
                        format!(
                            "{:.3} (C={cap} {pr} ml={ml}, per size [{}])",
                            mean,
                            per.join(" ")
                        ),
                    );
                }
            }
        }
    }
    best
}

fn householder_vs_floyd_warshall() -> Outcome {
    let sizes = [256u64, 512, 1024, 2048];
    let (hh, hh_desc) = best_reduction(Kernel::Householder, &sizes);
    let (fw, fw_desc) = best_reduction(Kernel::FloydWarshall, &sizes);
    let detail = format!("floyd_warshall {fw_desc}; householder {hh_desc}");
    if fw > 0.0 && fw >= 2.0 * hh.max(0.0) {
        Ok(detail)
    } else {
        Err(format!("ratio {:.2}x < 2x: {detail}", fw / hh))
    }
}

fn min_partition_time(g: &Cdag, params: &HeuristicParams) -> Duration {
    (0..5)
        .map(|_| {
            let start = Instant::now();
            let h = partition(g, params).unwrap();
            let took = start.elapsed();
            assert!(h.num_levels() >= 1);
            took
        })
        .min()
        .unwrap()
}

fn complexity_scaling() -> Outcome {
    let small = build_cdag(&generate_trace(&KernelSpec::new(Kernel::Matmul, 40)).unwrap());
    let large = build_cdag(&generate_trace(&KernelSpec::new(Kernel::Matmul, 50)).unwrap());
    let mut parts = Vec::new();
    let mut ok = true;
    for (ml, bound) in [(false, 3.0), (true, 4.0)] {
        let params = HeuristicParams::new(25, Priority::EQUAL).multilevel(ml);
        let a = min_partition_time(&small, &params);
        let b = min_partition_time(&large, &params);
        let ratio = b.as_secs_f64() / a.as_secs_f64();
        ok &= ratio < bound;
        parts.push(format!(
            "{}: {a:.2?} -> {b:.2?} ({ratio:.2}x, bound {bound}x)",
            if ml { "multi" } else { "single" }
        ));
    }
    let detail = parts.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn csv_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let spec = KernelSpec::new(Kernel::LuNonBlocked, 10).with_seed(11);
            let mut cfg = RunConfig::for_kernel(spec, 8, Priority::EQUAL, dir.path());
            cfg.maxlive = vec![4, 8, 32];
            cfg.priorities = vec![Priority::BREADTH, Priority::DEPTH, Priority::EQUAL];
            cfg.multilevel = true;
            run(&cfg).unwrap();
            csv_bytes(dir.path())
        })
        .collect();
    if runs[0].len() < 2 {
        return Err("no CSVs written".into());
    }
    if runs[0] == runs[1] {
        Ok(format!("{} CSVs byte-identical", runs[0].len()))
    } else {
        Err("CSV contents differ between runs".into())
    }
}

fn main() -> ExitCode {
    let (runs, sweep_time) = sweep_runs();
    let criteria: Vec<(&str, Check)> = vec![
        (
            "reuse distances of the worked example",
            Box::new(fig2_exactness),
        ),
        (
            "seidel n=6 CDAG has 16 operations",
            Box::new(seidel_cdag_size),
        ),
        ("reuse distances match brute force", Box::new(rda_oracle)),
        (
            "every swept partition is convex",
            Box::new(|| convexity(&runs, sweep_time)),
        ),
        (
            "liveset bound and forced-first rate",
            Box::new(|| liveness(&runs)),
        ),
        (
            "identity recovery at C = footprint",
            Box::new(identity_recovery),
        ),
        (
            "tiled and untiled CDAGs are isomorphic",
            Box::new(tiled_isomorphism),
        ),
        (
            "jacobi2d reordering tracks the tiled code",
            Box::new(jacobi_trend),
        ),
        (
            "matmul reordering cuts misses at C=512",
            Box::new(matmul_trend),
        ),
        (
            "floyd_warshall gains twice householder",
            Box::new(householder_vs_floyd_warshall),
        ),
        (
            "partitioning time scales near linearly",
            Box::new(complexity_scaling),
        ),
        ("repeated runs write identical CSVs", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
