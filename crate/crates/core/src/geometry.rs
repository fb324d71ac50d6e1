//! Decomposition of segments and circles into per-cell pieces.
//!
//! Cells are the half-open unit squares `[m, m+1) × [n, n+1)`. A probe lying
//! exactly on a grid line is assigned to the cell above (or to the right of)
//! that line, which is what the half-open convention gives when a piece's
//! midpoint is floored.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

/// Crossing parameters (segments) or angles (circles) closer than this are
/// treated as one crossing.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn cell(self) -> (i64, i64) {
        (self.x.floor() as i64, self.y.floor() as i64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(ax: f64, ay: f64, bx: f64, by: f64) -> Self {
        Segment {
            a: Point::new(ax, ay),
            b: Point::new(bx, by),
        }
    }

    pub fn length(&self) -> f64 {
        (self.b.x - self.a.x).hypot(self.b.y - self.a.y)
    }

    /// The point at parameter `t`, with `t = 0` at `a` and `t = 1` at `b`.
    pub fn at(&self, t: f64) -> Point {
        Point::new(
            self.a.x + t * (self.b.x - self.a.x),
            self.a.y + t * (self.b.y - self.a.y),
        )
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Segment::new(self.a.x + dx, self.a.y + dy, self.b.x + dx, self.b.y + dy)
    }

    /// Part of the line through this segment inside the axis box
    /// `[lo, hi]²`, oriented like the segment. `None` if the line misses the
    /// box or only touches it at a point.
    pub fn line_chord(&self, lo: f64, hi: f64) -> Option<Segment> {
        let d = (self.b.x - self.a.x, self.b.y - self.a.y);
        let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
        for (p, dp) in [(self.a.x, d.0), (self.a.y, d.1)] {
            if dp == 0.0 {
                if p < lo || p > hi {
                    return None;
                }
            } else {
                let (ta, tb) = ((lo - p) / dp, (hi - p) / dp);
                t0 = t0.max(ta.min(tb));
                t1 = t1.min(ta.max(tb));
            }
        }
        if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
            return None;
        }
        Some(Segment {
            a: self.at(t0),
            b: self.at(t1),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub const fn new(cx: f64, cy: f64, radius: f64) -> Self {
        Circle {
            center: Point::new(cx, cy),
            radius,
        }
    }

    pub fn point_at(&self, angle: f64) -> Point {
        Point::new(
            self.center.x + self.radius * angle.cos(),
            self.center.y + self.radius * angle.sin(),
        )
    }

    pub fn length(&self) -> f64 {
        TAU * self.radius
    }
}

/// Portion of a segment inside one cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellRun {
    pub cell: (i64, i64),
    pub length: f64,
}

/// Portion of a circle inside one cell, as an angle interval measured
/// counter-clockwise from the positive x axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcRun {
    pub cell: (i64, i64),
    pub angle_start: f64,
    pub angle_end: f64,
}

impl ArcRun {
    pub fn span(&self) -> f64 {
        self.angle_end - self.angle_start
    }
}

/// Walks the cells a segment crosses, from `a` to `b`.
///
/// Crossing parameters with the lines `x = k` and `y = k` are computed
/// directly from `k` (never accumulated), so run lengths telescope to the
/// segment length.
pub struct SegmentTraversal {
    seg: Segment,
    dir: (f64, f64),
    len: f64,
    next_k: (f64, f64),
    step: (f64, f64),
    t: f64,
    done: bool,
}

impl SegmentTraversal {
    pub fn new(seg: Segment) -> Self {
        let dir = (seg.b.x - seg.a.x, seg.b.y - seg.a.y);
        let len = seg.length();
        let first = |p: f64, d: f64| {
            if d > 0.0 {
                (p.floor() + 1.0, 1.0)
            } else {
                (p.ceil() - 1.0, -1.0)
            }
        };
        let (kx, sx) = first(seg.a.x, dir.0);
        let (ky, sy) = first(seg.a.y, dir.1);
        SegmentTraversal {
            seg,
            dir,
            len,
            next_k: (kx, ky),
            step: (sx, sy),
            t: 0.0,
            done: len == 0.0,
        }
    }

    #[inline]
    fn crossing(p: f64, d: f64, k: f64) -> f64 {
        if d == 0.0 {
            f64::INFINITY
        } else {
            (k - p) / d
        }
    }
}

impl Iterator for SegmentTraversal {
    type Item = CellRun;

    fn next(&mut self) -> Option<CellRun> {
        while !self.done {
            let tx = Self::crossing(self.seg.a.x, self.dir.0, self.next_k.0);
            let ty = Self::crossing(self.seg.a.y, self.dir.1, self.next_k.1);
            let mut t_next = tx.min(ty);
            if t_next >= 1.0 - MERGE_TOL {
                t_next = 1.0;
                self.done = true;
            } else {
                if tx <= t_next + MERGE_TOL {
                    self.next_k.0 += self.step.0;
                }
                if ty <= t_next + MERGE_TOL {
                    self.next_k.1 += self.step.1;
                }
            }
            if t_next - self.t > MERGE_TOL || (self.done && t_next > self.t) {
                let mid = self.seg.at(0.5 * (self.t + t_next));
                let run = CellRun {
                    cell: mid.cell(),
                    length: (t_next - self.t) * self.len,
                };
                self.t = t_next;
                return Some(run);
            }
        }
        None
    }
}

/// Ordered cell decomposition of a segment; empty for a degenerate segment.
pub fn segment_cells(seg: &Segment) -> Vec<CellRun> {
    let mut runs: Vec<CellRun> = Vec::new();
    for run in SegmentTraversal::new(*seg) {
        match runs.last_mut() {
            Some(last) if last.cell == run.cell => last.length += run.length,
            _ => runs.push(run),
        }
    }
    runs
}

/// Sorted crossing angles in `[0, 2π)` of a circle with the grid lines
/// `x = m` and `y = n` for `lo ≤ m, n ≤ hi`, merged within [`MERGE_TOL`].
pub(crate) fn crossing_angles(circle: &Circle, lo: i64, hi: i64, out: &mut Vec<f64>) {
    out.clear();
    let Circle { center, radius } = *circle;
    let wrap = |a: f64| if a < 0.0 { a + TAU } else if a >= TAU { a - TAU } else { a };
    let mut axis = |c: f64, vertical: bool| {
        let first = ((c - radius).ceil() as i64).max(lo);
        let last = ((c + radius).floor() as i64).min(hi);
        for k in first..=last {
            let v = ((k as f64 - c) / radius).clamp(-1.0, 1.0);
            if vertical {
                let a = v.acos();
                out.push(a);
                out.push(wrap(TAU - a));
            } else {
                let a = v.asin();
                out.push(wrap(a));
                out.push(wrap(PI - a));
            }
        }
    };
    axis(center.x, true);
    axis(center.y, false);
    out.sort_unstable_by(f64::total_cmp);
    out.dedup_by(|b, a| *b - *a <= MERGE_TOL);
    if out.len() > 1 && out[0] + TAU - out[out.len() - 1] <= MERGE_TOL {
        out.pop();
    }
}

fn arcs_from_angles(circle: &Circle, angles: &[f64], mut emit: impl FnMut(ArcRun)) {
    if angles.is_empty() {
        emit(ArcRun {
            cell: circle.point_at(PI).cell(),
            angle_start: 0.0,
            angle_end: TAU,
        });
        return;
    }
    let k = angles.len();
    for i in 0..k {
        let start = angles[i];
        let end = if i + 1 < k { angles[i + 1] } else { angles[0] + TAU };
        emit(ArcRun {
            cell: circle.point_at(0.5 * (start + end)).cell(),
            angle_start: start,
            angle_end: end,
        });
    }
}

/// Cell decomposition of a full circle. Arcs are listed counter-clockwise
/// starting at the smallest crossing angle in `[0, 2π)`; the last arc wraps
/// past `2π`. A circle crossing no grid line is a single arc `[0, 2π]`.
pub fn circle_cells(circle: &Circle) -> Vec<ArcRun> {
    let mut angles = Vec::new();
    crossing_angles(circle, i64::MIN / 4, i64::MAX / 4, &mut angles);
    let mut runs: Vec<ArcRun> = Vec::new();
    arcs_from_angles(circle, &angles, |run| match runs.last_mut() {
        Some(last) if last.cell == run.cell => last.angle_end = run.angle_end,
        _ => runs.push(run),
    });
    runs
}

/// Like [`circle_cells`] but only splits at grid lines with index in
/// `[lo, hi]`; arcs outside that band may span several (equally colored,
/// typically zero) cells. Reuses `scratch` for the crossing angles.
pub(crate) fn for_each_arc_in_band(
    circle: &Circle,
    lo: i64,
    hi: i64,
    scratch: &mut Vec<f64>,
    emit: impl FnMut(ArcRun),
) {
    crossing_angles(circle, lo, hi, scratch);
    arcs_from_angles(circle, scratch, emit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::SQRT_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn horizontal_segment_runs() {
        let runs = segment_cells(&Segment::new(0.5, 0.5, 2.5, 0.5));
        let cells: Vec<_> = runs.iter().map(|r| r.cell).collect();
        assert_eq!(cells, vec![(0, 0), (1, 0), (2, 0)]);
        for (r, want) in runs.iter().zip([0.5, 1.0, 0.5]) {
            assert!(close(r.length, want, 1e-15));
        }
    }

    #[test]
    fn diagonal_through_lattice_point() {
        let runs = segment_cells(&Segment::new(0.0, 0.0, 2.0, 2.0));
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[0].cell, (0, 0));
        assert_eq!(runs[1].cell, (1, 1));
        assert!(close(runs[0].length, SQRT_2, 1e-15));
        assert!(close(runs[1].length, SQRT_2, 1e-15));
    }

    #[test]
    fn reversed_segment_reverses_runs() {
        let s = Segment::new(0.3, 2.7, 3.9, 0.2);
        let fwd = segment_cells(&s);
        let mut back = segment_cells(&Segment { a: s.b, b: s.a });
        back.reverse();
        assert_eq!(fwd.len(), back.len());
        for (f, b) in fwd.iter().zip(&back) {
            assert_eq!(f.cell, b.cell);
            assert!(close(f.length, b.length, 1e-12));
        }
    }

    #[test]
    fn grid_line_segments_take_upper_cell() {
        let runs = segment_cells(&Segment::new(0.0, 1.0, 3.0, 1.0));
        assert!(runs.iter().all(|r| r.cell.1 == 1));
        let runs = segment_cells(&Segment::new(3.0, 1.0, 0.0, 1.0));
        assert!(runs.iter().all(|r| r.cell.1 == 1));
        let runs = segment_cells(&Segment::new(2.0, 3.0, 2.0, -1.0));
        assert!(runs.iter().all(|r| r.cell.0 == 2));
        assert_eq!(runs.len(), 4);
    }

    #[test]
    fn degenerate_segment_is_empty() {
        assert!(segment_cells(&Segment::new(1.5, 1.5, 1.5, 1.5)).is_empty());
    }

    #[test]
    fn segment_inside_one_cell() {
        let runs = segment_cells(&Segment::new(0.1, 0.2, 0.8, 0.9));
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].cell, (0, 0));
    }

    #[test]
    fn line_chord_clips_to_box() {
        let chord = Segment::new(1.0, 1.0, 2.0, 2.0).line_chord(0.0, 4.0).unwrap();
        assert!(close(chord.a.x, 0.0, 1e-15) && close(chord.b.y, 4.0, 1e-15));
        assert!(Segment::new(-1.0, 5.0, 0.0, 6.0).line_chord(0.0, 4.0).is_none());
        let chord = Segment::new(3.0, 0.5, 1.0, 0.5).line_chord(0.0, 4.0).unwrap();
        assert_eq!((chord.a.x, chord.b.x), (4.0, 0.0));
    }

    #[test]
    fn small_circle_single_cell() {
        let runs = circle_cells(&Circle::new(0.5, 0.5, 0.4));
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].cell, (0, 0));
        assert!(close(runs[0].span(), TAU, 1e-15));
    }

    #[test]
    fn circle_around_lattice_point_has_four_quadrants() {
        let runs = circle_cells(&Circle::new(1.0, 1.0, 0.5));
        let cells: Vec<_> = runs.iter().map(|r| r.cell).collect();
        assert_eq!(cells, vec![(1, 1), (0, 1), (0, 0), (1, 0)]);
        for r in &runs {
            assert!(close(r.span(), PI / 2.0, 1e-12));
        }
    }

    #[test]
    fn tangent_circle_merges_duplicate_crossings() {
        // Tangent to x = 1 and y = 1 from inside cell (0, 0).
        let runs = circle_cells(&Circle::new(0.5, 0.5, 0.5));
        assert!(runs.iter().all(|r| r.cell == (0, 0) || r.span() < 1e-6));
        let total: f64 = runs.iter().map(ArcRun::span).sum();
        assert!(close(total, TAU, 1e-12));
    }

    #[test]
    fn off_grid_circle_midpoints_and_sampling() {
        let circle = Circle::new(2.3, 1.7, 1.1);
        let runs = circle_cells(&circle);
        let total: f64 = runs.iter().map(ArcRun::span).sum();
        assert!(close(total, TAU, 1e-10));
        for r in &runs {
            assert_eq!(circle.point_at(0.5 * (r.angle_start + r.angle_end)).cell(), r.cell);
        }
        // Dense angular sampling: every sample falls in the run covering it.
        let samples = 100_000;
        for i in 0..samples {
            let a = (i as f64 + 0.5) * TAU / samples as f64;
            let run = runs
                .iter()
                .find(|r| {
                    let a = if a < r.angle_start { a + TAU } else { a };
                    a >= r.angle_start && a < r.angle_end
                })
                .unwrap();
            let near_edge = [run.angle_start, run.angle_end]
                .iter()
                .any(|e| ((a - e).rem_euclid(TAU)).min((e - a).rem_euclid(TAU)) < 1e-9);
            if !near_edge {
                assert_eq!(circle.point_at(a).cell(), run.cell);
            }
        }
    }

    fn seg_strategy() -> impl Strategy<Value = Segment> {
        (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b, c, d)| Segment::new(a, b, c, d))
    }

    proptest! {
        #[test]
        fn segment_length_conservation(s in seg_strategy()) {
            let runs = segment_cells(&s);
            let total: f64 = runs.iter().map(|r| r.length).sum();
            prop_assert!((total - s.length()).abs() <= 1e-12 * (1.0 + s.length()));
            for r in &runs {
                prop_assert!(r.length <= SQRT_2 + 1e-12);
            }
            for w in runs.windows(2) {
                let (p, q) = (w[0].cell, w[1].cell);
                prop_assert!((p.0 - q.0).abs() <= 1 && (p.1 - q.1).abs() <= 1 && p != q);
            }
        }

        #[test]
        fn segment_runs_contain_their_midpoints(s in seg_strategy()) {
            let runs = segment_cells(&s);
            let len = s.length();
            let mut t = 0.0;
            for r in &runs {
                let dt = r.length / len;
                if dt > 1e-9 {
                    prop_assert_eq!(s.at(t + 0.5 * dt).cell(), r.cell);
                }
                t += dt;
            }
        }

        #[test]
        fn segment_integer_translation(s in seg_strategy(), p in -20i64..20, q in -20i64..20) {
            let a = segment_cells(&s);
            let b = segment_cells(&s.translated(p as f64, q as f64));
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert_eq!((x.cell.0 + p, x.cell.1 + q), y.cell);
                prop_assert!((x.length - y.length).abs() <= 1e-12 * (1.0 + s.length()));
            }
        }

        #[test]
        fn circle_angle_conservation(cx in -10.0..10.0f64, cy in -10.0..10.0f64, r in 0.01..8.0f64) {
            let c = Circle::new(cx, cy, r);
            let runs = circle_cells(&c);
            let total: f64 = runs.iter().map(ArcRun::span).sum();
            prop_assert!((total - TAU).abs() <= 1e-10);
            for run in &runs {
                prop_assert!(run.span() >= 0.0 && run.span() <= TAU);
                if run.span() > 1e-9 {
                    prop_assert_eq!(c.point_at(0.5 * (run.angle_start + run.angle_end)).cell(), run.cell);
                }
            }
        }

        #[test]
        fn circle_integer_translation(cx in -5.0..5.0f64, cy in -5.0..5.0f64, r in 0.05..5.0f64, p in -8i64..8, q in -8i64..8) {
            let a = circle_cells(&Circle::new(cx, cy, r));
            let b = circle_cells(&Circle::new(cx + p as f64, cy + q as f64, r));
            let span = |runs: &[ArcRun], cell: (i64, i64)| -> f64 {
                runs.iter().filter(|x| x.cell == cell).map(ArcRun::span).sum()
            };
            for run in &a {
                let moved = (run.cell.0 + p, run.cell.1 + q);
                prop_assert!((span(&a, run.cell) - span(&b, moved)).abs() <= 1e-9);
            }
        }
    }
}
