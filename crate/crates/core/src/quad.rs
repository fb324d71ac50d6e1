//! Small quadrature helpers shared by the Lp and spectral routines.

/// Eight-point Gauss–Legendre nodes and weights on `[-1, 1]`.
const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Eight-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre8(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
        sum += w * (f(mid - half * x) + f(mid + half * x));
    }
    sum * half
}

/// Composite eight-point Gauss–Legendre on `panels` equal panels.
pub fn composite_gl8(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| gauss_legendre8(f, a + i as f64 * h, a + (i + 1) as f64 * h))
        .sum()
}

/// Composite Gauss–Legendre with the panel count doubled until successive
/// estimates agree to `rel_tol` (or `max_doublings` is reached).
pub fn doubling_gl8(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, rel_tol: f64, max_doublings: u32) -> f64 {
    let mut panels = 1;
    let mut prev = composite_gl8(&mut f, a, b, panels);
    for _ in 0..max_doublings {
        panels *= 2;
        let next = composite_gl8(&mut f, a, b, panels);
        if (next - prev).abs() <= rel_tol * next.abs().max(f64::MIN_POSITIVE) {
            return next;
        }
        prev = next;
    }
    prev
}

/// Adaptive Gauss–Legendre: a panel is accepted when it agrees with the sum
/// of its two halves to `rel_tol` relative to the running total scale.
/// `seeds` initial panels should resolve the integrand's oscillation scale.
pub fn adaptive_gl8(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, rel_tol: f64, seeds: usize) -> f64 {
    let seeds = seeds.max(1);
    let h = (b - a) / seeds as f64;
    let coarse: Vec<(f64, f64, f64)> = (0..seeds)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            (lo, hi, gauss_legendre8(&mut f, lo, hi))
        })
        .collect();
    let scale: f64 = coarse.iter().map(|c| c.2.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    let mut stack = coarse;
    let mut total = 0.0;
    while let Some((lo, hi, whole)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gauss_legendre8(&mut f, lo, mid);
        let right = gauss_legendre8(&mut f, mid, hi);
        let err = (left + right - whole).abs();
        if err <= rel_tol * scale * (hi - lo) / (b - a) || hi - lo < 1e-12 * (b - a) {
            total += left + right;
        } else {
            stack.push((lo, mid, left));
            stack.push((mid, hi, right));
        }
    }
    total
}
