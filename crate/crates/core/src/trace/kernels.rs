//! Trace generators for the benchmark loop nests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Addr, Dataset, Trace, DEFAULT_WORD_BYTES};

/// Hands out disjoint word ranges for arrays and single words for scalars.
#[derive(Debug, Default)]
struct Layout {
    next: Addr,
}

#[derive(Debug, Clone, Copy)]
struct Array2 {
    base: Addr,
    cols: usize,
}

impl Array2 {
    #[inline]
    fn at(&self, i: usize, j: usize) -> Addr {
        self.base + (i * self.cols + j) as Addr
    }
}

impl Layout {
    fn array(&mut self, rows: usize, cols: usize) -> Array2 {
        let a = Array2 {
            base: self.next,
            cols,
        };
        self.next += (rows * cols) as Addr;
        a
    }

    fn vector(&mut self, len: usize) -> Array2 {
        self.array(1, len)
    }

    fn scalar(&mut self) -> Addr {
        let a = self.next;
        self.next += 1;
        a
    }
}

fn tiles(lo: usize, hi: usize, tile: usize) -> impl Iterator<Item = (usize, usize)> {
    (lo..hi).step_by(tile).map(move |t| (t, (t + tile).min(hi)))
}

/// `A[i][j] = A[i-1][j] + A[i][j-1]` over the interior, optionally tiled.
pub(super) fn seidel(n: usize, tile: Option<usize>) -> Trace {
    let mut lay = Layout::default();
    let a = lay.array(n, n);
    let mut t = Trace::new(DEFAULT_WORD_BYTES);
    let mut emit = |i: usize, j: usize| {
        t.push(vec![a.at(i - 1, j), a.at(i, j - 1)], a.at(i, j), 1);
    };
    let hi = n.saturating_sub(1);
    match tile {
        None => {
            for i in 1..hi {
                for j in 1..hi {
                    emit(i, j);
                }
            }
        }
        Some(b) => {
            for (ilo, ihi) in tiles(1, hi, b) {
                for (jlo, jhi) in tiles(1, hi, b) {
                    for i in ilo..ihi {
                        for j in jlo..jhi {
                            emit(i, j);
                        }
                    }
                }
            }
        }
    }
    t
}

/// Five-point Jacobi stencil into `B`, followed by a copy of `B` back into
/// `A`, once per time step. The copy records carry no flops.
///
/// The tiled form shifts the compute statement to `(t, 2t + i, 2t + j)` and
/// the copy to `(t, 2t + i + 1, 2t + j + 1)`. Every dependence is then
/// non-negative in all three dimensions, so cubes of side `tile` over that
/// space can run in lexicographic order, each one in lexicographic order too.
pub(super) fn jacobi2d(n: usize, steps: usize, tile: Option<usize>) -> Trace {
    let mut lay = Layout::default();
    let a = lay.array(n, n);
    let b = lay.array(n, n);
    let mut t = Trace::new(DEFAULT_WORD_BYTES);
    if n < 3 {
        return t;
    }
    let hi = n - 1;
    let stencil = |t: &mut Trace, i: usize, j: usize| {
        t.push(
            vec![
                a.at(i, j),
                a.at(i, j - 1),
                a.at(i, j + 1),
                a.at(i + 1, j),
                a.at(i - 1, j),
            ],
            b.at(i, j),
            1,
        );
    };
    let copy = |t: &mut Trace, i: usize, j: usize| t.push(vec![b.at(i, j)], a.at(i, j), 0);
    match tile {
        None => {
            for _ in 0..steps {
                for i in 1..hi {
                    for j in 1..hi {
                        stencil(&mut t, i, j);
                    }
                }
                for i in 1..hi {
                    for j in 1..hi {
                        copy(&mut t, i, j);
                    }
                }
            }
        }
        Some(side) => {
            // shifted coordinates c2, c3 span 1..=cmax
            let cmax = 2 * steps.saturating_sub(1) + hi;
            let interior = |c: usize, step: usize| -> Option<usize> {
                c.checked_sub(2 * step).filter(|&x| (1..hi).contains(&x))
            };
            for (tlo, thi) in tiles(0, steps, side) {
                for (ilo, ihi) in tiles(1, cmax + 1, side) {
                    for (jlo, jhi) in tiles(1, cmax + 1, side) {
                        for step in tlo..thi {
                            for c2 in ilo..ihi {
                                for c3 in jlo..jhi {
                                    if let (Some(i), Some(j)) =
                                        (interior(c2, step), interior(c3, step))
                                    {
                                        stencil(&mut t, i, j);
                                    }
                                    if let (Some(i), Some(j)) =
                                        (interior(c2 - 1, step), interior(c3 - 1, step))
                                    {
                                        copy(&mut t, i, j);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    t
}

/// `C[i][j] += A[i][k] * B[k][j]` in i-j-k order, optionally tiled on all
/// three loops.
pub(super) fn matmul(n: usize, tile: Option<usize>) -> Trace {
    let mut lay = Layout::default();
    let a = lay.array(n, n);
    let b = lay.array(n, n);
    let c = lay.array(n, n);
    let mut t = Trace::new(DEFAULT_WORD_BYTES);
    let mut emit = |i: usize, j: usize, k: usize| {
        t.push(vec![c.at(i, j), a.at(i, k), b.at(k, j)], c.at(i, j), 2);
    };
    match tile {
        None => {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        emit(i, j, k);
                    }
                }
            }
        }
        Some(bs) => {
            for (ilo, ihi) in tiles(0, n, bs) {
                for (jlo, jhi) in tiles(0, n, bs) {
                    for (klo, khi) in tiles(0, n, bs) {
                        for i in ilo..ihi {
                            for j in jlo..jhi {
                                for k in klo..khi {
                                    emit(i, j, k);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    t
}

/// Out-of-place Floyd-Warshall: each outer iteration runs two full sweeps,
/// `A -> temp` for `k` and `temp -> A` for `k + 1`. With odd `n` the last
/// outer iteration has no second sweep.
pub(super) fn floyd_warshall(n: usize) -> Trace {
    let mut lay = Layout::default();
    let a = lay.array(n, n);
    let temp = lay.array(n, n);
    let mut t = Trace::new(DEFAULT_WORD_BYTES);
    let sweep = |t: &mut Trace, src: Array2, dst: Array2, k: usize| {
        for i in 0..n {
            for j in 0..n {
                t.push(
                    vec![src.at(i, j), src.at(i, k), src.at(k, j)],
                    dst.at(i, j),
                    2,
                );
            }
        }
    };
    let mut k = 0;
    while k < n {
        sweep(&mut t, a, temp, k);
        k += 1;
        if k < n {
            sweep(&mut t, temp, a, k);
        }
        k += 1;
    }
    t
}

/// Givens-rotation QR on an `m x n` matrix. The `t1`/`t2` temporaries and
/// the two write-backs each become one record.
pub(super) fn givens(m: usize, n: usize) -> Trace {
    let mut lay = Layout::default();
    let a = lay.array(m, n);
    let c = lay.scalar();
    let s = lay.scalar();
    let t1 = lay.scalar();
    let t2 = lay.scalar();
    let mut t = Trace::new(DEFAULT_WORD_BYTES);
    if m < 2 {
        return t;
    }
    for j in 0..n {
        let mut i = m - 2;
        while i >= j {
            let (top, bot) = (a.at(i, j), a.at(i + 1, j));
            // c = A[i][j] / sqrt(A[i][j]^2 + A[i+1][j]^2)
            t.push(vec![top, bot], c, 5);
            // s = -A[i+1][j] / sqrt(...)
            t.push(vec![bot, top], s, 6);
            for k in j..n {
                let (x, y) = (a.at(i, k), a.at(i + 1, k));
                t.push(vec![c, x, s, y], t1, 3);
                t.push(vec![s, x, c, y], t2, 3);
                t.push(vec![t1], x, 0);
                t.push(vec![t2], y, 0);
            }
            if i == 0 {
                break;
            }
            i -= 1;
        }
    }
    t
}

/// Householder QR on an `m x n` matrix (`n <= m`).
///
/// Accumulators initialised to a constant (`total`, `dot`) produce no record;
/// the first accumulation simply does not read the old value. The
/// data-dependent sign flip of `norm_x` is emitted unconditionally as one
/// record reading `norm_x` and `A[j][j]`, which keeps the trace a function of
/// the sizes only.
pub(super) fn householder(m: usize, n: usize) -> Trace {
    let mut lay = Layout::default();
    let a = lay.array(m, n);
    let v = lay.vector(m);
    let total = lay.scalar();
    let norm_x = lay.scalar();
    let norm_v = lay.scalar();
    let dot = lay.scalar();
    let mut t = Trace::new(DEFAULT_WORD_BYTES);
    for j in 0..n {
        let diag = a.at(j, j);
        for i in j + 1..m {
            let mut reads = vec![a.at(i, j)];
            if i > j + 1 {
                reads.push(total);
            }
            t.push(reads, total, 2);
        }
        let has_total = j + 1 < m;
        let with_total = |mut r: Vec<Addr>| {
            if has_total {
                r.push(total);
            }
            r
        };
        t.push(with_total(vec![diag]), norm_x, 2);
        t.push(vec![norm_x, diag], norm_x, 1);
        t.push(vec![norm_x, diag], v.at(0, j), 1);
        t.push(with_total(vec![v.at(0, j)]), norm_v, 2);
        t.push(vec![v.at(0, j), norm_v], v.at(0, j), 1);
        for i in j + 1..m {
            t.push(vec![a.at(i, j), norm_v], v.at(0, i), 1);
        }
        for jj in j..n {
            for kk in j..m {
                let mut reads = vec![v.at(0, kk), a.at(kk, jj)];
                if kk > j {
                    reads.push(dot);
                }
                t.push(reads, dot, 2);
            }
            for ii in j..m {
                t.push(vec![a.at(ii, jj), v.at(0, ii), dot], a.at(ii, jj), 3);
            }
        }
    }
    t
}

/// Odd-even transposition sort over a linked list of `n` nodes (`n` even).
///
/// Each CompareSwap is one record. It reads the words currently holding the
/// two payloads and writes the left node's payload word; the right payload is
/// read from that word until it is next overwritten. This keeps one producer
/// per swap while preserving every value flow. Link traversal is not traced.
pub(super) fn oddeven_sort(n: usize, dataset: Dataset, seed: u64) -> Trace {
    let mut lay = Layout::default();
    let payload = lay.vector(n);
    let mut values: Vec<u64> = match dataset {
        Dataset::ReverseSorted => (0..n as u64).rev().collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| rng.gen()).collect()
        }
    };
    let mut holder: Vec<Addr> = (0..n).map(|p| payload.at(0, p)).collect();
    let mut t = Trace::new(DEFAULT_WORD_BYTES);
    let mut compare_swap = |t: &mut Trace, p: usize| {
        t.push(vec![holder[p], holder[p + 1]], payload.at(0, p), 1);
        holder[p] = payload.at(0, p);
        holder[p + 1] = payload.at(0, p);
        if values[p] > values[p + 1] {
            values.swap(p, p + 1);
        }
    };
    for _ in 0..n / 2 {
        let mut p = 1;
        while p + 1 < n {
            compare_swap(&mut t, p);
            p += 2;
        }
        let mut p = 0;
        while p < n {
            compare_swap(&mut t, p);
            p += 2;
        }
    }
    debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
    t
}

/// Input matrix for LU with partial pivoting.
///
/// `PivotHalf` and `PivotAll` start from a column diagonally dominant matrix,
/// for which partial pivoting never interchanges rows (elimination preserves
/// the dominance), and rotate the first half or all of its rows by one. The
/// pivot for step `j` is then always the original row `j`, so the rotation
/// fixes how many steps swap.
#[allow(clippy::needless_range_loop)] // column sums index rows by j
fn lu_input(n: usize, dataset: Dataset, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    if dataset == Dataset::Random {
        return a;
    }
    for j in 0..n {
        let off: f64 = (0..n).filter(|&i| i != j).map(|i| a[i][j].abs()).sum();
        a[j][j] = off + 1.0;
    }
    let rotated = match dataset {
        Dataset::PivotHalf => n / 2,
        _ => n,
    };
    if rotated > 1 {
        a[..rotated].rotate_left(1);
    }
    a
}

/// Unblocked right-looking LU with partial pivoting (full-row interchanges,
/// column scaling, then a column-oriented rank-1 update).
pub(super) fn lu_nonblocked(n: usize, dataset: Dataset, seed: u64) -> Trace {
    let mut lay = Layout::default();
    let a = lay.array(n, n);
    let tmp = lay.scalar();
    let mut val = lu_input(n, dataset, seed);
    let mut t = Trace::new(DEFAULT_WORD_BYTES);
    for j in 0..n {
        let mut piv = j;
        for i in j + 1..n {
            if val[i][j].abs() > val[piv][j].abs() {
                piv = i;
            }
        }
        if piv != j {
            for k in 0..n {
                t.push(vec![a.at(j, k)], tmp, 0);
                t.push(vec![a.at(piv, k)], a.at(j, k), 0);
                t.push(vec![tmp], a.at(piv, k), 0);
            }
            val.swap(j, piv);
        }
        if val[j][j] == 0.0 {
            continue;
        }
        for i in j + 1..n {
            t.push(vec![a.at(i, j), a.at(j, j)], a.at(i, j), 1);
            val[i][j] /= val[j][j];
        }
        for k in j + 1..n {
            for i in j + 1..n {
                t.push(vec![a.at(i, k), a.at(i, j), a.at(j, k)], a.at(i, k), 2);
                val[i][k] -= val[i][j] * val[j][k];
            }
        }
    }
    t
}
