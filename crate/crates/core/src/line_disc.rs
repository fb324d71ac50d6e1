//! Discrepancy of straight probes: single segments, the exact supremum over
//! all segments, full-line projections and their Lp norms.

use std::f64::consts::{PI, TAU};

use rand::Rng as _;
use rayon::prelude::*;

use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::geometry::{Segment, SegmentTraversal, MERGE_TOL};
use crate::quad;
use crate::report::{DiscrepancyReport, Method};
use crate::rng;

/// Largest board the exact search accepts by default.
pub const DEFAULT_EXACT_CAP: usize = 64;

/// Ramps of a projected cell narrower than this are treated as jumps.
const RAMP_MIN: f64 = 1e-6;

/// Signed integral of the coloring along a segment (white minus black length).
pub fn segment_discrepancy(c: &Coloring, s: &Segment) -> f64 {
    SegmentTraversal::new(*s)
        .map(|run| f64::from(c.get(run.cell.0, run.cell.1)) * run.length)
        .sum()
}

/// Maximum of `|w[i] + … + w[j-1]|` over all `i < j`, with the attaining
/// half-open index range. An empty input yields `(0, 0..0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubsumMax {
    pub value: f64,
    pub start: usize,
    pub end: usize,
}

/// The absolute sub-sum maximum is `max P − min P` over the prefix sums `P`.
pub fn max_abs_subsum(w: &[f64]) -> SubsumMax {
    if w.is_empty() {
        return SubsumMax {
            value: 0.0,
            start: 0,
            end: 0,
        };
    }
    let mut tracker = PrefixExtremes::new(0.0);
    for (i, &x) in w.iter().enumerate() {
        tracker.push(x, (i + 1) as f64);
    }
    let (lo, hi) = tracker.span();
    let (start, end) = (lo as usize, hi as usize);
    if start == end {
        // All prefix sums equal: every sub-sum is zero.
        return SubsumMax {
            value: 0.0,
            start: 0,
            end: 1,
        };
    }
    SubsumMax {
        value: tracker.value(),
        start,
        end,
    }
}

/// Running max/min of prefix sums, each tagged with a position.
#[derive(Clone, Copy)]
struct PrefixExtremes {
    sum: f64,
    max: (f64, f64),
    min: (f64, f64),
}

impl PrefixExtremes {
    fn new(pos: f64) -> Self {
        PrefixExtremes {
            sum: 0.0,
            max: (0.0, pos),
            min: (0.0, pos),
        }
    }

    #[inline]
    fn push(&mut self, w: f64, pos: f64) {
        self.sum += w;
        if self.sum > self.max.0 {
            self.max = (self.sum, pos);
        }
        if self.sum < self.min.0 {
            self.min = (self.sum, pos);
        }
    }

    fn value(&self) -> f64 {
        self.max.0 - self.min.0
    }

    fn span(&self) -> (f64, f64) {
        (self.max.1.min(self.min.1), self.max.1.max(self.min.1))
    }
}

/// Best sub-segment of the board chord of the line through `line`.
/// Returns the absolute discrepancy and the sub-segment attaining it.
fn best_on_line(c: &Coloring, line: &Segment) -> Option<(f64, Segment)> {
    let chord = line.line_chord(0.0, c.size() as f64)?;
    let len = chord.length();
    let mut ext = PrefixExtremes::new(0.0);
    let mut pos = 0.0;
    for run in SegmentTraversal::new(chord) {
        pos += run.length;
        ext.push(f64::from(c.get(run.cell.0, run.cell.1)) * run.length, pos);
    }
    let (lo, hi) = ext.span();
    let witness = Segment {
        a: chord.at(lo / len),
        b: chord.at(hi / len),
    };
    Some((ext.value(), witness))
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Primitive directions `(dx, dy)` with `|dx|, |dy| ≤ span`, one per
/// undirected line direction.
fn primitive_directions(span: i64) -> Vec<(i64, i64)> {
    let mut dirs = vec![(0, 1)];
    for dx in 1..=span {
        for dy in -span..=span {
            if gcd(dx, dy) == 1 {
                dirs.push((dx, dy));
            }
        }
    }
    dirs
}

/// Every distinct line through two lattice corners of `[0, N]²` with the
/// given direction, as `(first corner, second corner)`.
fn corner_lines(size: i64, (dx, dy): (i64, i64), mut f: impl FnMut(Segment)) {
    let inside = |x: i64, y: i64| (0..=size).contains(&x) && (0..=size).contains(&y);
    for x in 0..=size {
        for y in 0..=size {
            if !inside(x - dx, y - dy) && inside(x + dx, y + dy) {
                f(Segment::new(x as f64, y as f64, (x + dx) as f64, (y + dy) as f64));
            }
        }
    }
}

#[derive(Clone, Copy)]
struct Best {
    value: f64,
    witness: Segment,
    order: u64,
}

impl Best {
    fn pick(a: Option<Best>, b: Option<Best>) -> Option<Best> {
        match (a, b) {
            (Some(x), Some(y)) => {
                if y.value > x.value || (y.value == x.value && y.order < x.order) {
                    Some(y)
                } else {
                    Some(x)
                }
            }
            (x, None) => x,
            (None, y) => y,
        }
    }
}

/// Exact supremum of `|∫_I f|` over all segments `I`, with the default cap.
pub fn max_segment_discrepancy(c: &Coloring) -> Result<DiscrepancyReport> {
    max_segment_discrepancy_capped(c, DEFAULT_EXACT_CAP)
}

/// Exact supremum of `|∫_I f|` over all segments.
///
/// Within a class of lines crossing the same cell sequence, every run length
/// is linear in the line parameters, so the best sub-segment sum is convex
/// there and peaks on the class boundary: a line through two lattice
/// corners. Every such line (plus the axis-parallel cell midlines) is
/// scanned and its weighted run sequence reduced with [`max_abs_subsum`].
pub fn max_segment_discrepancy_capped(c: &Coloring, cap: usize) -> Result<DiscrepancyReport> {
    let n = c.size();
    if n > cap {
        return Err(Error::TooLargeForExactSearch { n, cap });
    }
    let size = n as i64;
    let dirs = primitive_directions(size);

    let (best, count) = dirs
        .par_iter()
        .enumerate()
        .map(|(i, &dir)| {
            let mut best: Option<Best> = None;
            let mut count = 0u64;
            corner_lines(size, dir, |line| {
                count += 1;
                if let Some((value, witness)) = best_on_line(c, &line) {
                    let cand = Best {
                        value,
                        witness,
                        order: i as u64,
                    };
                    best = Best::pick(best, Some(cand));
                }
            });
            (best, count)
        })
        .reduce(|| (None, 0), |(a, ca), (b, cb)| (Best::pick(a, b), ca + cb));

    let mut best = best;
    let mut count = count;
    let order = dirs.len() as u64;
    for k in 0..n {
        let mid = k as f64 + 0.5;
        for line in [Segment::new(0.0, mid, 1.0, mid), Segment::new(mid, 0.0, mid, 1.0)] {
            count += 1;
            if let Some((value, witness)) = best_on_line(c, &line) {
                best = Best::pick(best, Some(Best { value, witness, order }));
            }
        }
    }
    let best = best.expect("a non-empty board has chords");
    Ok(DiscrepancyReport {
        value: best.value,
        witness: best.witness.into(),
        method: Method::Exact,
        search_size: count,
    })
}

/// Monte Carlo lower estimate of the segment supremum: half the trials use
/// the line through two random lattice corners, half the line through two
/// uniform random points of the board.
pub fn sampled_segment_sup(c: &Coloring, trials: u64, seed: u64) -> Result<DiscrepancyReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let size = c.size() as f64;
    let corners = c.size() as i64 + 1;
    let mut gen = rng::seeded(seed);
    let mut best: Option<Best> = None;
    for trial in 0..trials {
        let line = if trial % 2 == 0 {
            let mut pick = || (gen.random_range(0..corners) as f64, gen.random_range(0..corners) as f64);
            let (a, b) = (pick(), pick());
            if a == b {
                continue;
            }
            Segment::new(a.0, a.1, b.0, b.1)
        } else {
            let mut pick = || (gen.random_range(0.0..size), gen.random_range(0.0..size));
            let (a, b) = (pick(), pick());
            Segment::new(a.0, a.1, b.0, b.1)
        };
        if line.length() == 0.0 {
            continue;
        }
        if let Some((value, witness)) = best_on_line(c, &line) {
            best = Best::pick(best, Some(Best { value, witness, order: trial }));
        }
    }
    let best = best.unwrap_or(Best {
        value: 0.0,
        witness: Segment::new(0.0, 0.0, 0.0, 0.0),
        order: 0,
    });
    Ok(DiscrepancyReport {
        value: best.value,
        witness: best.witness.into(),
        method: Method::Sampled,
        search_size: trials,
    })
}

/// The projection `Δ_u(x) = ∫ f(x·u + y·u⊥) dy` of a coloring onto a unit
/// direction `u`: a piecewise-linear function of `x`, stored by its
/// breakpoints with left and right limits (they differ only where a cell
/// edge is parallel to `u⊥`).
#[derive(Clone, Debug)]
pub struct Projection {
    pub direction: (f64, f64),
    pub breakpoints: Vec<f64>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl Projection {
    pub fn eval(&self, x: f64) -> f64 {
        let bp = &self.breakpoints;
        if bp.is_empty() || x < bp[0] || x > bp[bp.len() - 1] {
            return 0.0;
        }
        let i = bp.partition_point(|&b| b <= x);
        if i == 0 {
            return self.right[0];
        }
        if i == bp.len() {
            return self.left[i - 1];
        }
        let (x0, x1) = (bp[i - 1], bp[i]);
        let (v0, v1) = (self.right[i - 1], self.left[i]);
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }

    /// `max_x |Δ_u(x)|` and a point attaining it. Exact: a piecewise-linear
    /// function peaks at a breakpoint.
    pub fn max_abs(&self) -> (f64, f64) {
        let mut best = (0.0, 0.0);
        for (i, &x) in self.breakpoints.iter().enumerate() {
            let v = self.left[i].abs().max(self.right[i].abs());
            if v > best.0 {
                best = (v, x);
            }
        }
        best
    }

    /// `∫ |Δ_u(x)|^p dx`: closed form on each linear piece for `p ∈ {1, 2}`,
    /// per-piece Gauss–Legendre (doubling to 1e-6 relative) otherwise.
    pub fn integral_abs_pow(&self, p: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.breakpoints.len().saturating_sub(1) {
            let len = self.breakpoints[i + 1] - self.breakpoints[i];
            let (v0, v1) = (self.right[i], self.left[i + 1]);
            total += piece_abs_pow(v0, v1, len, p);
        }
        total
    }
}

/// `∫_0^len |v0 + (v1 − v0)s/len|^p ds`.
fn piece_abs_pow(v0: f64, v1: f64, len: f64, p: f64) -> f64 {
    if len <= 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        if v0 * v1 >= 0.0 {
            return 0.5 * len * (v0.abs() + v1.abs());
        }
        return 0.5 * len * (v0 * v0 + v1 * v1) / (v0.abs() + v1.abs());
    }
    if p == 2.0 {
        return len * (v0 * v0 + v0 * v1 + v1 * v1) / 3.0;
    }
    let f = |s: f64| (v0 + (v1 - v0) * s / len).abs().powf(p);
    if v0 * v1 < 0.0 {
        let zero = len * v0.abs() / (v0.abs() + v1.abs());
        quad::doubling_gl8(f, 0.0, zero, 1e-6, 20) + quad::doubling_gl8(f, zero, len, 1e-6, 20)
    } else {
        quad::doubling_gl8(f, 0.0, len, 1e-6, 20)
    }
}

fn check_unit(u: (f64, f64)) -> Result<()> {
    let norm = u.0.hypot(u.1);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnit(norm));
    }
    Ok(())
}

/// Exact projection of a coloring onto the unit direction `u`.
///
/// Each cell projects to a trapezoid with breakpoints at its four corner
/// projections and plateau height `1 / max(|u₁|, |u₂|)`; the trapezoids are
/// summed by sweeping their slope changes in order.
pub fn projection(c: &Coloring, u: (f64, f64)) -> Result<Projection> {
    check_unit(u)?;
    Ok(projection_unchecked(c, u))
}

fn projection_unchecked(c: &Coloring, u: (f64, f64)) -> Projection {
    let (a, b) = (u.0.abs(), u.1.abs());
    let (lo, hi) = (a.min(b), a.max(b));
    let height = 1.0 / hi;
    let shift = u.0.min(0.0) + u.1.min(0.0);
    let ramp = lo >= RAMP_MIN;
    let slope = if ramp { height / lo } else { 0.0 };

    // (position, slope change, jump)
    let size = c.size();
    let mut events: Vec<(f64, f64, f64)> = Vec::with_capacity(4 * size * size);
    for n in 0..size {
        for m in 0..size {
            let color = f64::from(c.get(m as i64, n as i64));
            let base = m as f64 * u.0 + n as f64 * u.1 + shift;
            if ramp {
                let s = color * slope;
                events.push((base, s, 0.0));
                events.push((base + lo, -s, 0.0));
                events.push((base + hi, -s, 0.0));
                events.push((base + lo + hi, s, 0.0));
            } else {
                events.push((base, 0.0, color * height));
                events.push((base + hi, 0.0, -color * height));
            }
        }
    }
    events.sort_unstable_by(|x, y| x.0.total_cmp(&y.0));

    let mut breakpoints = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    let (mut value, mut cur_slope, mut last_x) = (0.0f64, 0.0f64, f64::NAN);
    let mut i = 0;
    while i < events.len() {
        let x = events[i].0;
        let lim = if breakpoints.is_empty() { 0.0 } else { value + cur_slope * (x - last_x) };
        let (mut ds, mut dj) = (0.0, 0.0);
        let tol = MERGE_TOL * (1.0 + x.abs());
        while i < events.len() && events[i].0 - x <= tol {
            ds += events[i].1;
            dj += events[i].2;
            i += 1;
        }
        value = lim + dj;
        cur_slope += ds;
        breakpoints.push(x);
        left.push(lim);
        right.push(value);
        last_x = x;
    }
    // The sweep ends with every cell closed; clear rounding residue.
    if let Some(r) = right.last_mut() {
        *r = 0.0;
    }
    Projection {
        direction: u,
        breakpoints,
        left,
        right,
    }
}

fn unit(theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (c, s)
}

/// Line Lp discrepancy `(1/N ∫_{S¹} ∫ |Δ_u(x)|^p dx du)^{1/p}` with the
/// midpoint rule on `angular_nodes` equally spaced directions of the full
/// circle and exact integration in `x`.
pub fn line_lp(c: &Coloring, p: f64, angular_nodes: usize) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    if angular_nodes < 4 {
        return Err(Error::InvalidParameter("angular_nodes must be at least 4".into()));
    }
    let step = TAU / angular_nodes as f64;
    // Δ_{−u}(x) = Δ_u(−x): opposite directions contribute equally.
    let (count, factor) = if angular_nodes.is_multiple_of(2) {
        (angular_nodes / 2, 2.0)
    } else {
        (angular_nodes, 1.0)
    };
    let sum: f64 = (0..count)
        .into_par_iter()
        .map(|j| projection_unchecked(c, unit((j as f64 + 0.5) * step)).integral_abs_pow(p))
        .sum();
    Ok((factor * sum * step / c.size() as f64).powf(1.0 / p))
}

/// Direction family used by [`line_sup_with`].
#[derive(Clone, Copy, Debug)]
pub struct LineSupOptions {
    /// Equally spaced directions over the half circle, starting at angle 0.
    pub direction_grid: usize,
    /// Normals of every primitive lattice direction with both components at
    /// most this large are added.
    pub corner_span: usize,
}

impl LineSupOptions {
    pub fn for_board(size: usize) -> Self {
        LineSupOptions {
            direction_grid: (4 * size).max(360),
            corner_span: size.min(16),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineSup {
    pub value: f64,
    /// Unit direction `u` of the best projection.
    pub direction: (f64, f64),
    /// Offset `x` where `|Δ_u(x)|` peaks.
    pub offset: f64,
    pub directions: usize,
}

/// `sup_{u,x} |Δ_u(x)|` over the default direction family.
pub fn line_sup(c: &Coloring) -> f64 {
    line_sup_with(c, LineSupOptions::for_board(c.size())).value
}

pub fn line_sup_with(c: &Coloring, opts: LineSupOptions) -> LineSup {
    let mut dirs: Vec<(f64, f64)> = (0..opts.direction_grid)
        .map(|j| unit(j as f64 * PI / opts.direction_grid as f64))
        .collect();
    for (dx, dy) in primitive_directions(opts.corner_span as i64) {
        let len = (dx as f64).hypot(dy as f64);
        dirs.push((-(dy as f64) / len, dx as f64 / len));
    }
    let best = dirs
        .par_iter()
        .enumerate()
        .map(|(i, &u)| {
            let (v, x) = projection_unchecked(c, u).max_abs();
            (v, i, x)
        })
        .reduce(
            || (0.0, usize::MAX, 0.0),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    LineSup {
        value: best.0,
        direction: if best.1 == usize::MAX { (1.0, 0.0) } else { dirs[best.1] },
        offset: best.2,
        directions: dirs.len(),
    }
}
