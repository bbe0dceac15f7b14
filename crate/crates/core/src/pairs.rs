//! Exact fixed-radius pair counting.
//!
//! Every counter answers "how many index pairs of a given set are at
//! Euclidean distance `≤ ε`", with the comparison done as `|a - b|² ≤ ε²` in
//! full floating precision. The accelerated paths (sorted sweep for `d = 1`,
//! uniform hash grid for `d ≥ 2`) evaluate exactly the same predicate on
//! exactly the same coordinate differences as the double loop, so their
//! counts are bitwise equal to it.
//!
//! Gap-restricted counts (`|j - i| > gap`) are computed as the unrestricted
//! count minus the close pairs inside the band `|j - i| ≤ gap`, which costs
//! `O(n · gap)` on top of the accelerated count.

use std::collections::HashMap;

use crate::error::{invalid, Result};
use crate::geometry::is_close;
use crate::sample::Sample;

/// Below this many observations the double loop wins on constant factors.
pub const NAIVE_CUTOFF: usize = 64;

/// Largest grid extent (in cells per axis) for which the cell index of a
/// point is provably accurate to well under one cell.
const MAX_GRID_CELLS_PER_AXIS: f64 = (1u64 << 24) as f64;

/// Cells are widened by this relative margin so that floating error in the
/// cell index can never separate two close points by more than one cell.
const CELL_MARGIN: f64 = 1e-6;

/// Which counting route to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    /// Accelerated above [`NAIVE_CUTOFF`], naive below.
    #[default]
    Auto,
    /// Plain `O(n²)` double loop.
    Naive,
    /// Sorted sweep or hash grid regardless of size.
    Accelerated,
}

/// Close pairs found and index pairs visited by an enumerating counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapPairCount {
    pub close: u64,
    pub inspected: u64,
}

/// `C(n, 2)`.
pub fn binomial2(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Size of `{(i, j) : i < j, j - i > gap}` over `n` indices, i.e. `C(n - gap, 2)`.
pub fn within_gap_cardinality(n: usize, gap: usize) -> u64 {
    binomial2(n.saturating_sub(gap))
}

/// Size of `{(i, j) : |j - i| > gap}` over `n` indices, i.e. `2 C(n - gap, 2)`.
pub fn between_gap_cardinality(n: usize, gap: usize) -> u64 {
    2 * within_gap_cardinality(n, gap)
}

/// Zero-based index pairs `i < j` with `j - i > gap`, in lexicographic order.
pub fn within_gap_pairs(n: usize, gap: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + gap + 1..n).map(move |j| (i, j)))
}

/// Zero-based ordered index pairs with `|j - i| > gap`, in lexicographic order.
pub fn between_gap_pairs(n: usize, gap: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| {
        let left = 0..i.saturating_sub(gap);
        let right = (i + gap + 1).min(n)..n;
        left.chain(right).map(move |j| (i, j))
    })
}

fn check_radius(epsilon: f64) -> Result<f64> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(invalid(format!("radius must be finite and nonnegative, got {epsilon}")));
    }
    Ok(epsilon * epsilon)
}

fn check_pair(x: &Sample, y: &Sample) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(invalid(format!(
            "samples have different dimensions ({} and {})",
            x.dim(),
            y.dim()
        )));
    }
    if x.len() != y.len() {
        return Err(invalid(format!(
            "samples must have equal sizes, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

fn check_gap(n: usize, gap: usize) -> Result<()> {
    if gap >= n {
        return Err(invalid(format!("gap {gap} leaves no index pairs for n = {n}")));
    }
    Ok(())
}

fn use_naive(route: Route, n: usize) -> bool {
    match route {
        Route::Naive => true,
        Route::Accelerated => false,
        Route::Auto => n < NAIVE_CUTOFF,
    }
}

/// Number of pairs `i < j` with `|X_i - X_j| ≤ ε`.
pub fn count_close_within(x: &Sample, epsilon: f64) -> Result<u64> {
    count_close_within_with(x, epsilon, Route::Auto)
}

pub fn count_close_within_with(x: &Sample, epsilon: f64, route: Route) -> Result<u64> {
    let eps_sq = check_radius(epsilon)?;
    Ok(if use_naive(route, x.len()) {
        naive_within(x, eps_sq)
    } else if x.dim() == 1 {
        sweep_within(x.as_flat(), eps_sq)
    } else {
        match Grid::build(&[x], epsilon) {
            Some(grid) => grid.count_within(x, eps_sq),
            None => naive_within(x, eps_sq),
        }
    })
}

/// Number of ordered pairs `(i, j)`, `1 ≤ i, j ≤ n`, with `|X_i - Y_j| ≤ ε`.
pub fn count_close_between(x: &Sample, y: &Sample, epsilon: f64) -> Result<u64> {
    count_close_between_with(x, y, epsilon, Route::Auto)
}

pub fn count_close_between_with(
    x: &Sample,
    y: &Sample,
    epsilon: f64,
    route: Route,
) -> Result<u64> {
    check_pair(x, y)?;
    let eps_sq = check_radius(epsilon)?;
    Ok(if use_naive(route, x.len()) {
        naive_between(x, y, eps_sq)
    } else if x.dim() == 1 {
        sweep_between(x.as_flat(), y.as_flat(), eps_sq)
    } else {
        match Grid::build(&[x, y], epsilon) {
            Some(grid) => grid.count_between(x, y, eps_sq),
            None => naive_between(x, y, eps_sq),
        }
    })
}

/// Number of pairs `i < j` with `j - i > gap` and `|X_i - X_j| ≤ ε`.
pub fn count_close_within_gap(x: &Sample, epsilon: f64, gap: usize) -> Result<u64> {
    count_close_within_gap_with(x, epsilon, gap, Route::Auto)
}

pub fn count_close_within_gap_with(
    x: &Sample,
    epsilon: f64,
    gap: usize,
    route: Route,
) -> Result<u64> {
    let n = x.len();
    check_gap(n, gap)?;
    let eps_sq = check_radius(epsilon)?;
    if gap == 0 {
        return count_close_within_with(x, epsilon, route);
    }
    // The band is cheaper than the retained set once gap approaches n/2.
    let band_pairs = (n as u64) * gap as u64;
    if use_naive(route, n) || band_pairs >= within_gap_cardinality(n, gap) {
        return Ok(enumerate_within_gap(x, eps_sq, gap).close);
    }
    let total = count_close_within_with(x, epsilon, route)?;
    let mut band = 0u64;
    for i in 0..n {
        let a = x.point(i);
        for j in i + 1..(i + gap + 1).min(n) {
            band += is_close(a, x.point(j), eps_sq) as u64;
        }
    }
    Ok(total - band)
}

/// Number of ordered pairs with `|j - i| > gap` and `|X_i - Y_j| ≤ ε`.
pub fn count_close_between_gap(x: &Sample, y: &Sample, epsilon: f64, gap: usize) -> Result<u64> {
    count_close_between_gap_with(x, y, epsilon, gap, Route::Auto)
}

pub fn count_close_between_gap_with(
    x: &Sample,
    y: &Sample,
    epsilon: f64,
    gap: usize,
    route: Route,
) -> Result<u64> {
    check_pair(x, y)?;
    let n = x.len();
    check_gap(n, gap)?;
    let eps_sq = check_radius(epsilon)?;
    let band_pairs = (n as u64) * (2 * gap as u64 + 1);
    if use_naive(route, n) || band_pairs >= between_gap_cardinality(n, gap) {
        return Ok(enumerate_between_gap(x, y, eps_sq, gap).close);
    }
    let total = count_close_between_with(x, y, epsilon, route)?;
    let mut band = 0u64;
    for i in 0..n {
        let a = x.point(i);
        for j in i.saturating_sub(gap)..(i + gap + 1).min(n) {
            band += is_close(a, y.point(j), eps_sq) as u64;
        }
    }
    Ok(total - band)
}

/// Gap-restricted within-sample count that also reports how many index pairs
/// it visited; always enumerates the index set directly.
pub fn count_close_within_gap_instrumented(
    x: &Sample,
    epsilon: f64,
    gap: usize,
) -> Result<GapPairCount> {
    check_gap(x.len(), gap)?;
    let eps_sq = check_radius(epsilon)?;
    Ok(enumerate_within_gap(x, eps_sq, gap))
}

/// Between-sample counterpart of [`count_close_within_gap_instrumented`].
pub fn count_close_between_gap_instrumented(
    x: &Sample,
    y: &Sample,
    epsilon: f64,
    gap: usize,
) -> Result<GapPairCount> {
    check_pair(x, y)?;
    check_gap(x.len(), gap)?;
    let eps_sq = check_radius(epsilon)?;
    Ok(enumerate_between_gap(x, y, eps_sq, gap))
}

fn enumerate_within_gap(x: &Sample, eps_sq: f64, gap: usize) -> GapPairCount {
    let mut out = GapPairCount { close: 0, inspected: 0 };
    for (i, j) in within_gap_pairs(x.len(), gap) {
        out.inspected += 1;
        out.close += is_close(x.point(i), x.point(j), eps_sq) as u64;
    }
    out
}

fn enumerate_between_gap(x: &Sample, y: &Sample, eps_sq: f64, gap: usize) -> GapPairCount {
    let mut out = GapPairCount { close: 0, inspected: 0 };
    for (i, j) in between_gap_pairs(x.len(), gap) {
        out.inspected += 1;
        out.close += is_close(x.point(i), y.point(j), eps_sq) as u64;
    }
    out
}

fn naive_within(x: &Sample, eps_sq: f64) -> u64 {
    let n = x.len();
    let mut count = 0;
    for i in 0..n {
        let a = x.point(i);
        for j in i + 1..n {
            count += is_close(a, x.point(j), eps_sq) as u64;
        }
    }
    count
}

fn naive_between(x: &Sample, y: &Sample, eps_sq: f64) -> u64 {
    let mut count = 0;
    for a in x.points() {
        for b in y.points() {
            count += is_close(a, b, eps_sq) as u64;
        }
    }
    count
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

// In one dimension the predicate is fl(b - a)² ≤ ε², which is monotone in b
// for fixed a, so close partners of each point form a contiguous run of the
// sorted values.
fn sweep_within(values: &[f64], eps_sq: f64) -> u64 {
    let v = sorted(values);
    let n = v.len();
    let mut count = 0u64;
    let mut hi = 0;
    for i in 0..n {
        hi = hi.max(i + 1);
        while hi < n && {
            let t = v[hi] - v[i];
            t * t <= eps_sq
        } {
            hi += 1;
        }
        count += (hi - i - 1) as u64;
    }
    count
}

fn sweep_between(xs: &[f64], ys: &[f64], eps_sq: f64) -> u64 {
    let y = sorted(ys);
    let close = |a: f64, b: f64| {
        let t = a - b;
        t * t <= eps_sq
    };
    xs.iter()
        .map(|&a| {
            let lo = y.partition_point(|&b| b < a && !close(a, b));
            let hi = y.partition_point(|&b| b <= a || close(a, b));
            (hi - lo) as u64
        })
        .sum()
}

/// Uniform grid with cell side slightly above `ε`; points within `ε` of each
/// other always land in the same or adjacent cells.
struct Grid {
    dim: usize,
    origin: Vec<f64>,
    side: f64,
    offsets: Vec<Vec<i64>>,
}

impl Grid {
    /// `None` when the geometry does not allow a safe grid (zero radius or an
    /// extent too large for accurate cell indices); callers fall back to the
    /// double loop.
    fn build(samples: &[&Sample], epsilon: f64) -> Option<Self> {
        if epsilon <= 0.0 {
            return None;
        }
        let dim = samples[0].dim();
        let side = epsilon * (1.0 + CELL_MARGIN);
        let mut origin = vec![f64::INFINITY; dim];
        let mut upper = vec![f64::NEG_INFINITY; dim];
        for s in samples {
            for p in s.points() {
                for k in 0..dim {
                    origin[k] = origin[k].min(p[k]);
                    upper[k] = upper[k].max(p[k]);
                }
            }
        }
        if (0..dim).any(|k| (upper[k] - origin[k]) / side > MAX_GRID_CELLS_PER_AXIS) {
            return None;
        }
        let mut offsets = vec![Vec::with_capacity(dim)];
        for _ in 0..dim {
            offsets = offsets
                .into_iter()
                .flat_map(|o: Vec<i64>| {
                    (-1..=1).map(move |step| {
                        let mut o = o.clone();
                        o.push(step);
                        o
                    })
                })
                .collect();
        }
        Some(Self { dim, origin, side, offsets })
    }

    fn cell_of(&self, p: &[f64], out: &mut Vec<i64>) {
        out.clear();
        out.extend((0..self.dim).map(|k| ((p[k] - self.origin[k]) / self.side).floor() as i64));
    }

    fn bucket(&self, s: &Sample) -> HashMap<Vec<i64>, Vec<u32>> {
        let mut cells: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
        let mut key = Vec::with_capacity(self.dim);
        for (i, p) in s.points().enumerate() {
            self.cell_of(p, &mut key);
            cells.entry(key.clone()).or_default().push(i as u32);
        }
        cells
    }

    fn count_within(&self, x: &Sample, eps_sq: f64) -> u64 {
        let cells = self.bucket(x);
        let mut home = Vec::with_capacity(self.dim);
        let mut probe = vec![0i64; self.dim];
        let mut count = 0u64;
        for (i, a) in x.points().enumerate() {
            self.cell_of(a, &mut home);
            for off in &self.offsets {
                for k in 0..self.dim {
                    probe[k] = home[k] + off[k];
                }
                if let Some(members) = cells.get(probe.as_slice()) {
                    // Members are stored in index order; count each pair once
                    // from its smaller index.
                    let start = members.partition_point(|&j| j as usize <= i);
                    for &j in &members[start..] {
                        count += is_close(a, x.point(j as usize), eps_sq) as u64;
                    }
                }
            }
        }
        count
    }

    fn count_between(&self, x: &Sample, y: &Sample, eps_sq: f64) -> u64 {
        let cells = self.bucket(y);
        let mut home = Vec::with_capacity(self.dim);
        let mut probe = vec![0i64; self.dim];
        let mut count = 0u64;
        for a in x.points() {
            self.cell_of(a, &mut home);
            for off in &self.offsets {
                for k in 0..self.dim {
                    probe[k] = home[k] + off[k];
                }
                if let Some(members) = cells.get(probe.as_slice()) {
                    for &j in members {
                        count += is_close(a, y.point(j as usize), eps_sq) as u64;
                    }
                }
            }
        }
        count
    }
}
