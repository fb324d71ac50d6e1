//! Circle discrepancy `D_t(x) = ∫_{C(x,t)} f`, its supremum over centers and
//! radii, and the circle Lp discrepancy.

use rayon::prelude::*;

use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::geometry::{for_each_arc_in_band, Circle};
use crate::report::{DiscrepancyReport, Method, Witness};

/// Lower end of the radius range, as a fraction of the board size.
pub const RADIUS_LO: f64 = 1.0 / 5.0;
/// Upper end of the radius range, as a fraction of the board size.
pub const RADIUS_HI: f64 = 1.0 / 4.0;

/// Signed integral of the coloring along a full circle.
pub fn circle_discrepancy(c: &Coloring, k: &Circle) -> f64 {
    let mut scratch = Vec::new();
    circle_discrepancy_with(c, k, &mut scratch)
}

/// As [`circle_discrepancy`], reusing `scratch` for crossing angles.
pub fn circle_discrepancy_with(c: &Coloring, k: &Circle, scratch: &mut Vec<f64>) -> f64 {
    if !(k.radius > 0.0) {
        return 0.0;
    }
    let n = c.size() as f64;
    let Circle { center, radius } = *k;
    // Disk misses the board.
    let dx = (0.0 - center.x).max(center.x - n).max(0.0);
    let dy = (0.0 - center.y).max(center.y - n).max(0.0);
    if dx * dx + dy * dy >= radius * radius {
        return 0.0;
    }
    // Only grid lines bounding board cells can separate differently colored
    // arcs; everything outside the band is color 0.
    let mut total = 0.0;
    for_each_arc_in_band(k, 0, c.size() as i64, scratch, |arc| {
        let color = c.get(arc.cell.0, arc.cell.1);
        if color != 0 {
            total += f64::from(color) * arc.span();
        }
    });
    total * radius
}

/// Radii sampled in the open range `(N/5, N/4)`: midpoints of `count`
/// equal subintervals.
pub fn sample_radii(size: usize, count: usize) -> Vec<f64> {
    let (lo, hi) = (RADIUS_LO * size as f64, RADIUS_HI * size as f64);
    let h = (hi - lo) / count as f64;
    (0..count).map(|j| lo + (j as f64 + 0.5) * h).collect()
}

/// Center coordinates `−2N + i·step` strictly inside `(−2N, 2N)`.
pub fn sample_centers(size: usize, step: f64) -> Vec<f64> {
    let half = 2.0 * size as f64;
    let count = (2.0 * half / step).ceil() as usize;
    (1..count)
        .map(|i| -half + i as f64 * step)
        .filter(|&x| x < half)
        .collect()
}

/// Largest `|D_t(x)|` over centers on a `center_step` grid covering
/// `(−2N, 2N)²` and `radius_count` radii in `(N/5, N/4)`.
pub fn circle_sup_search(c: &Coloring, center_step: f64, radius_count: usize) -> Result<DiscrepancyReport> {
    if !(center_step > 0.0) {
        return Err(Error::InvalidParameter("center_step must be positive".into()));
    }
    if radius_count == 0 {
        return Err(Error::InvalidParameter("radius_count must be at least 1".into()));
    }
    let n = c.size();
    let centers = sample_centers(n, center_step);
    let radii = sample_radii(n, radius_count);
    let r_max = radii[radii.len() - 1];
    let nf = n as f64;

    // (value, row, column, radius index), ties broken by the lowest indices.
    type Cand = (f64, usize, usize, usize);
    let better = |a: Cand, b: Cand| -> Cand {
        if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2, b.3) < (a.1, a.2, a.3)) {
            b
        } else {
            a
        }
    };
    let best = centers
        .par_iter()
        .enumerate()
        .map(|(iy, &cy)| {
            let mut scratch = Vec::new();
            let mut best: Cand = (-1.0, usize::MAX, usize::MAX, usize::MAX);
            if cy < -r_max || cy > nf + r_max {
                return best;
            }
            for (ix, &cx) in centers.iter().enumerate() {
                if cx < -r_max || cx > nf + r_max {
                    continue;
                }
                for (ir, &t) in radii.iter().enumerate() {
                    let v = circle_discrepancy_with(c, &Circle::new(cx, cy, t), &mut scratch).abs();
                    best = better(best, (v, iy, ix, ir));
                }
            }
            best
        })
        .reduce(|| (-1.0, usize::MAX, usize::MAX, usize::MAX), better);

    let (value, witness) = if best.1 == usize::MAX {
        (0.0, Circle::new(centers.first().copied().unwrap_or(0.0), 0.0, radii[0]))
    } else {
        (best.0, Circle::new(centers[best.2], centers[best.1], radii[best.3]))
    };
    Ok(DiscrepancyReport {
        value,
        witness: Witness::from(witness),
        method: Method::Sampled,
        search_size: (centers.len() * centers.len() * radii.len()) as u64,
    })
}

/// `Σ_x |D_t(x)|^p · step²` over the midpoints of a `step` grid on the box
/// `[lo, hi]²`.
pub fn circle_energy(c: &Coloring, t: f64, p: f64, lo: f64, hi: f64, step: f64) -> f64 {
    let count = ((hi - lo) / step).ceil() as usize;
    let h = (hi - lo) / count as f64;
    let total: f64 = (0..count)
        .into_par_iter()
        .map(|iy| {
            let mut scratch = Vec::new();
            let y = lo + (iy as f64 + 0.5) * h;
            (0..count)
                .map(|ix| {
                    let x = lo + (ix as f64 + 0.5) * h;
                    circle_discrepancy_with(c, &Circle::new(x, y, t), &mut scratch).abs().powf(p)
                })
                .sum::<f64>()
        })
        .sum();
    total * h * h
}

/// A refined Lp estimate and how it was reached.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpEstimate {
    pub value: f64,
    pub center_step: f64,
    pub radius_count: usize,
    /// Relative change between the last two refinements.
    pub rel_change: f64,
    pub converged: bool,
}

/// Refinements attempted by [`circle_lp`] after the initial resolution.
pub const CIRCLE_LP_MAX_DOUBLINGS: u32 = 3;

/// Circle Lp discrepancy `(N⁻³ ∫_{N/5}^{N/4} ∫ |D_t(x)|^p dx dt)^{1/p}`.
pub fn circle_lp(c: &Coloring, p: f64, center_step: f64, radius_count: usize) -> Result<f64> {
    Ok(circle_lp_detailed(c, p, center_step, radius_count, CIRCLE_LP_MAX_DOUBLINGS)?.value)
}

/// Midpoint rule in `t` and `x`, halving `center_step` and doubling
/// `radius_count` until the estimate moves by less than 1e-3 (relative).
/// Centers outside `[−N/4, 5N/4]²` are skipped: their circles miss the board.
pub fn circle_lp_detailed(
    c: &Coloring,
    p: f64,
    center_step: f64,
    radius_count: usize,
    max_doublings: u32,
) -> Result<LpEstimate> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    if !(center_step > 0.0) || radius_count == 0 {
        return Err(Error::InvalidParameter(
            "center_step must be positive and radius_count at least 1".into(),
        ));
    }
    let n = c.size() as f64;
    let (lo, hi) = (-RADIUS_HI * n, n + RADIUS_HI * n);
    let estimate = |step: f64, count: usize| -> f64 {
        let h_t = (RADIUS_HI - RADIUS_LO) * n / count as f64;
        let sum: f64 = sample_radii(c.size(), count)
            .into_iter()
            .map(|t| circle_energy(c, t, p, lo, hi, step))
            .sum();
        (sum * h_t / n.powi(3)).powf(1.0 / p)
    };
    let (mut step, mut count) = (center_step, radius_count);
    let mut prev = estimate(step, count);
    let mut rel_change = f64::INFINITY;
    for _ in 0..max_doublings {
        step *= 0.5;
        count *= 2;
        let next = estimate(step, count);
        rel_change = (next - prev).abs() / next.abs().max(f64::MIN_POSITIVE);
        prev = next;
        if rel_change < 1e-3 {
            break;
        }
    }
    Ok(LpEstimate {
        value: prev,
        center_step: step,
        radius_count: count,
        rel_change,
        converged: rel_change < 1e-3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::circle_cells;
    use crate::rng;
    use proptest::prelude::*;
    use rand::Rng as _;
    use std::f64::consts::{PI, TAU};

    fn angular_oracle(c: &Coloring, k: &Circle, samples: usize) -> f64 {
        let h = TAU / samples as f64;
        (0..samples)
            .map(|i| {
                let (x, y) = k.point_at((i as f64 + 0.5) * h).cell();
                f64::from(c.get(x, y))
            })
            .sum::<f64>()
            * h
            * k.radius
    }

    #[test]
    fn constant_board_inside_circle() {
        let c = Coloring::constant(10, 1).unwrap();
        let k = Circle::new(5.2, 4.9, 2.3);
        assert!((circle_discrepancy(&c, &k) - TAU * 2.3).abs() < 1e-12);
    }

    #[test]
    fn parity_quadrants_cancel() {
        let c = Coloring::parity(4).unwrap();
        assert!(circle_discrepancy(&c, &Circle::new(1.0, 1.0, 0.5)).abs() < 1e-12);
    }

    #[test]
    fn random_board_matches_angular_sampling() {
        let c = Coloring::random(8, 21).unwrap();
        let k = Circle::new(4.2, 3.7, 1.3);
        let v = circle_discrepancy(&c, &k);
        let oracle = angular_oracle(&c, &k, 1_000_000);
        assert!((v - oracle).abs() < 1e-3 * (1.0 + TAU * 1.3));
    }

    #[test]
    fn band_clipping_matches_full_decomposition() {
        let c = Coloring::random(6, 2).unwrap();
        let mut gen = rng::seeded(3);
        for _ in 0..200 {
            let k = Circle::new(gen.random_range(-3.0..9.0), gen.random_range(-3.0..9.0), gen.random_range(0.05..5.0));
            let full: f64 = circle_cells(&k)
                .iter()
                .map(|a| f64::from(c.get(a.cell.0, a.cell.1)) * a.span() * k.radius)
                .sum();
            assert!((full - circle_discrepancy(&c, &k)).abs() < 1e-9);
        }
    }

    #[test]
    fn far_circles_vanish() {
        let c = Coloring::constant(5, 1).unwrap();
        assert_eq!(circle_discrepancy(&c, &Circle::new(-3.0, 2.0, 1.5)), 0.0);
        // Disk of radius t + √2 misses the board.
        assert_eq!(circle_discrepancy(&c, &Circle::new(9.0, 9.0, 2.0)), 0.0);
    }

    #[test]
    fn sample_grids() {
        let radii = sample_radii(20, 4);
        assert_eq!(radii.len(), 4);
        assert!(radii.iter().all(|&r| r > 4.0 && r < 5.0));
        assert!((radii[0] - 4.125).abs() < 1e-12);
        let centers = sample_centers(2, 0.5);
        assert_eq!(centers.first(), Some(&-3.5));
        assert_eq!(centers.last(), Some(&3.5));
        assert_eq!(centers.len(), 15);
    }

    #[test]
    fn sup_search_contains_interior_circle() {
        let c = Coloring::constant(10, 1).unwrap();
        let r = circle_sup_search(&c, 0.5, 4).unwrap();
        assert!(r.value >= 4.0 * PI);
        assert_eq!(r.method, Method::Sampled);
        let w = r.witness.circle().unwrap();
        assert!((circle_discrepancy(&c, &w).abs() - r.value).abs() < 1e-9);
        assert!(w.radius > 2.0 && w.radius < 2.5);
    }

    #[test]
    fn sup_search_is_deterministic() {
        let c = Coloring::random(8, 5).unwrap();
        let a = circle_sup_search(&c, 0.5, 3).unwrap();
        assert_eq!(a, circle_sup_search(&c, 0.5, 3).unwrap());
        assert!(circle_sup_search(&c, 0.0, 3).is_err());
        assert!(circle_sup_search(&c, 0.5, 0).is_err());
    }

    #[test]
    fn constant_board_lp_between_interior_and_padded_closed_forms() {
        let n = 10.0f64;
        let c = Coloring::constant(10, 1).unwrap();
        for p in [1.0, 2.0] {
            let v = circle_lp(&c, p, 0.5, 4).unwrap().powf(p);
            // Interior region [t, N−t]² contributes exactly (2πt)^p; the
            // padded box [−t, N+t]² bounds everything.
            let integral = |pad: f64| {
                crate::quad::doubling_gl8(
                    |t| (TAU * t).powf(p) * (n + pad * 2.0 * t).powi(2),
                    RADIUS_LO * n,
                    RADIUS_HI * n,
                    1e-12,
                    10,
                ) / n.powi(3)
            };
            assert!(v >= integral(-1.0) * (1.0 - 1e-3), "p={p}");
            assert!(v <= integral(1.0));
        }
    }

    #[test]
    fn lp_rejects_bad_exponent() {
        let c = Coloring::parity(4).unwrap();
        assert!(matches!(circle_lp(&c, 0.9, 0.5, 2), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn circle_l1_bounded_by_l2() {
        let c = Coloring::parity(8).unwrap();
        let l1 = circle_lp_detailed(&c, 1.0, 0.5, 4, 1).unwrap().value;
        let l2 = circle_lp_detailed(&c, 2.0, 0.5, 4, 1).unwrap().value;
        // Hölder over the (x, t) region of measure ≤ (1.5N)²·N/20, normalized by N³.
        let ratio = (1.5f64 * 1.5 / 20.0).sqrt();
        assert!(l1 <= ratio * l2 * (1.0 + 1e-9));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn bounded_by_circumference(seed in 0u64..100, cx in -2.0..10.0f64, cy in -2.0..10.0f64, t in 0.01..6.0f64) {
            let c = Coloring::random(8, seed).unwrap();
            prop_assert!(circle_discrepancy(&c, &Circle::new(cx, cy, t)).abs() <= TAU * t + 1e-9);
        }

        #[test]
        fn integer_translation_of_board_and_circle(seed in 0u64..100, cx in 0.0..6.0f64, cy in 0.0..6.0f64, t in 0.1..3.0f64, p in -3i64..3, q in -3i64..3) {
            // Shift the board by (p, q) by embedding both in a larger one.
            let base = Coloring::random(6, seed).unwrap();
            let big = 24usize;
            let shifted = Coloring::from_fn(big, "shifted", |m, n| {
                let (mm, nn) = (m as i64 - 9 - p, n as i64 - 9 - q);
                if base.get(mm, nn) != 0 { base.get(mm, nn) } else { 1 }
            }).unwrap();
            let embedded = Coloring::from_fn(big, "embedded", |m, n| {
                let (mm, nn) = (m as i64 - 9, n as i64 - 9);
                if base.get(mm, nn) != 0 { base.get(mm, nn) } else { 1 }
            }).unwrap();
            let a = circle_discrepancy(&embedded, &Circle::new(cx + 9.0, cy + 9.0, t));
            let b = circle_discrepancy(&shifted, &Circle::new(cx + 9.0 + p as f64, cy + 9.0 + q as f64, t));
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
