//! Fourier side of the circle bound: `f̂`, the arc-length transform
//! `σ̂_t(ξ) = 2πt·J₀(2πt|ξ|)`, and the numerical checks built on them.
//!
//! Conventions: `f̂(ξ) = ∫ f(x) e^{−2πi x·ξ} dx`, so `∫|f̂|² = ∫|f|² = N²`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arc_disc::circle_energy;
use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::quad::{adaptive_gl8, composite_gl8};

/// Largest board accepted by [`parseval_check`].
pub const PARSEVAL_MAX_SIZE: usize = 16;
/// Center grid step of the spatial side of [`parseval_check`]. `D_t` has
/// square-root kinks where circles touch grid lines, so the midpoint sum
/// converges only like `h^{3/2}`.
pub const PARSEVAL_SPATIAL_STEP: f64 = 0.03125;
/// Certified truncation share of the spectral side of [`parseval_check`].
pub const PARSEVAL_TAIL_SHARE: f64 = 0.005;

const SERIES_LIMIT: f64 = 12.0;

/// Bessel function of the first kind, order zero.
///
/// Power series up to `|x| = 12`, Hankel's asymptotic expansion truncated at
/// its smallest term beyond. Absolute error stays below `1e−10`.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        j0_series(x)
    } else {
        j0_hankel(x)
    }
}

fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

// J₀(x) ≈ √(2/(πx))·(P cos χ − Q sin χ), χ = x − π/4, with
// a_k = a_{k−1}(2k−1)²/(8k), P = Σ(−1)^j a_{2j}/x^{2j}, Q = −Σ(−1)^j a_{2j+1}/x^{2j+1}.
fn j0_hankel(x: f64) -> f64 {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * odd * odd / (8.0 * k as f64 * x);
        if next.abs() >= last {
            break;
        }
        last = next.abs();
        term = next;
        let signed = if (k / 2) % 2 == 0 { term } else { -term };
        if k % 2 == 1 {
            q -= signed;
        } else {
            p += signed;
        }
    }
    let chi = x - 0.25 * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `σ̂_t(ξ) = 2πt·J₀(2πt|ξ|)`, the transform of arc length on the circle of
/// radius `t` centered at the origin.
pub fn sigma_hat(t: f64, xi: (f64, f64)) -> f64 {
    TAU * t * bessel_j0(TAU * t * xi.0.hypot(xi.1))
}

/// Radial profile `σ̂_1(u) = 2π·J₀(2πu)`.
pub fn sigma1_radial(u: f64) -> f64 {
    TAU * bessel_j0(TAU * u)
}

/// Leading large-`r` term `2 r^{−1/2} cos(2πr − π/4)` of [`sigma1_radial`].
pub fn sigma1_asymptotic(r: f64) -> f64 {
    2.0 / r.sqrt() * (TAU * r - 0.25 * PI).cos()
}

/// `∫₀¹ e^{−2πisu} du = e^{−iπs}·sin(πs)/(πs)`.
pub fn cell_window(s: f64) -> Complex64 {
    let sinc = if s == 0.0 { 1.0 } else { (PI * s).sin() / (PI * s) };
    Complex64::from_polar(sinc, -PI * s)
}

/// A frequency and the transform value there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub xi: (f64, f64),
    pub value: Complex64,
}

impl SpectralSample {
    pub fn of(c: &Coloring, xi: (f64, f64)) -> Self {
        SpectralSample { xi, value: fhat(c, xi) }
    }
}

/// Closed form `f̂(ξ) = W(ξ₁)W(ξ₂)·Σ c_mn e^{−2πi(mξ₁+nξ₂)}`.
pub fn fhat(c: &Coloring, xi: (f64, f64)) -> Complex64 {
    let n = c.size();
    let px = phases(xi.0, n);
    let py = phases(xi.1, n);
    let mut total = Complex64::new(0.0, 0.0);
    for (row, zy) in c.cells().chunks(n).zip(&py) {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&v, zx) in row.iter().zip(&px) {
            acc += zx * f64::from(v);
        }
        total += acc * zy;
    }
    total * cell_window(xi.0) * cell_window(xi.1)
}

fn phases(s: f64, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|m| {
            // Reduce m·s mod 1 before scaling so large products keep their phase.
            let frac = (m as f64 * s).rem_euclid(1.0);
            Complex64::from_polar(1.0, -TAU * frac)
        })
        .collect()
}

/// `f̂` on the tensor grid `xs × ys`, row-major with `ys` outermost.
pub fn fhat_grid(c: &Coloring, xs: &[f64], ys: &[f64]) -> Vec<Complex64> {
    let partial = row_transforms(c, xs);
    ys.iter().flat_map(|&y| grid_row(c.size(), &partial, xs, y)).collect()
}

// partial[a][n] = W(xs[a])·Σ_m c_mn e^{−2πi m xs[a]}
fn row_transforms(c: &Coloring, xs: &[f64]) -> Vec<Vec<Complex64>> {
    let n = c.size();
    xs.iter()
        .map(|&x| {
            let px = phases(x, n);
            let w = cell_window(x);
            c.cells()
                .chunks(n)
                .map(|row| w * row.iter().zip(&px).map(|(&v, z)| z * f64::from(v)).sum::<Complex64>())
                .collect()
        })
        .collect()
}

fn grid_row(n: usize, partial: &[Vec<Complex64>], xs: &[f64], y: f64) -> Vec<Complex64> {
    let py = phases(y, n);
    let wy = cell_window(y);
    (0..xs.len())
        .map(|a| wy * partial[a].iter().zip(&py).map(|(p, z)| p * z).sum::<Complex64>())
        .collect()
}

// Σ_{ξ ∈ grid} |f̂(ξ)|²·weight(|ξ|)·h² on the symmetric grid h·k, |k| ≤ half.
fn grid_energy(c: &Coloring, h: f64, half: i64, weight: impl Fn(f64) -> f64 + Sync) -> f64 {
    let xs: Vec<f64> = (-half..=half).map(|k| k as f64 * h).collect();
    let partial = row_transforms(c, &xs);
    let total: f64 = xs
        .par_iter()
        .map(|&y| {
            grid_row(c.size(), &partial, &xs, y)
                .iter()
                .zip(&xs)
                .map(|(v, &x)| v.norm_sqr() * weight(x.hypot(y)))
                .sum::<f64>()
        })
        .sum();
    total * h * h
}

/// Trapezoid sum of `|f̂|²` over `[−R, R]²`.
///
/// The step `1/(N+1)` is below the reciprocal width of the autocorrelation
/// support, so the infinite sum equals `∫|f̂|²` exactly and the box only
/// truncates.
pub fn plancherel_box(c: &Coloring, half_width: f64) -> f64 {
    let h = 1.0 / (c.size() as f64 + 1.0);
    grid_energy(c, h, (half_width / h).ceil() as i64, |_| 1.0)
}

/// `∫_{r_in < |ξ| < r_out} |f̂(ξ)|² dξ` in polar coordinates: Gauss–Legendre
/// panels in the radius, midpoint nodes over half the angle range (by
/// `|f̂(−ξ)| = |f̂(ξ)|`), both doubled until the value moves by less than
/// `1e−3` relative.
pub fn annulus_mass(c: &Coloring, r_in: f64, r_out: f64) -> Result<f64> {
    if !(r_in >= 0.0 && r_out > r_in) {
        return Err(Error::InvalidParameter(format!("annulus {r_in}..{r_out} is empty")));
    }
    let n = c.size() as f64;
    // |f̂|² oscillates on the scale 1/N in every direction.
    let mut panels = ((r_out - r_in) * 2.0 * n).ceil().max(1.0) as usize;
    let mut angles = (2.0 * PI * r_out * n).ceil().max(16.0) as usize;
    let mut prev = polar_mass(c, r_in, r_out, panels, angles);
    for _ in 0..5 {
        panels *= 2;
        angles *= 2;
        let next = polar_mass(c, r_in, r_out, panels, angles);
        if (next - prev).abs() <= 1e-3 * next.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

fn polar_mass(c: &Coloring, r_in: f64, r_out: f64, panels: usize, angles: usize) -> f64 {
    let dphi = PI / angles as f64;
    let total: f64 = (0..angles)
        .into_par_iter()
        .map(|j| {
            let (s, co) = ((j as f64 + 0.5) * dphi).sin_cos();
            composite_gl8(&mut |r| r * fhat(c, (r * co, r * s)).norm_sqr(), r_in, r_out, panels)
        })
        .sum();
    2.0 * total * dphi
}

/// Spectral mass of the annulus `a/N < |ξ| < A`.
pub fn decay_mass(c: &Coloring, a: f64, big_a: f64) -> Result<f64> {
    let lo = a / c.size() as f64;
    if !(a > 0.0 && lo < big_a) {
        return Err(Error::InvalidParameter(format!("need 0 < a/N < A, got a={a}, A={big_a}")));
    }
    annulus_mass(c, lo, big_a)
}

/// `∫ₓ^{c₁x} |σ̂_1(u)|² du`.
pub fn ring_energy(x: f64, c1: f64) -> Result<f64> {
    if !(x > 0.0 && c1 > 1.0 && (c1 * x).is_finite()) {
        return Err(Error::InvalidParameter(format!("need x > 0 and c1 > 1, got x={x}, c1={c1}")));
    }
    // The integrand has period 1/2 once u ≳ 1; seed four panels per period.
    let seeds = (4.0 * (c1 - 1.0) * x).ceil() as usize + 16;
    Ok(adaptive_gl8(|u| sigma1_radial(u).powi(2), x, c1 * x, 1e-6, seeds))
}

/// Both sides of `∫|D_t(x)|² dx = ∫|f̂(ξ)|²|σ̂_t(ξ)|² dξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsevalCheck {
    pub spatial: f64,
    pub spectral: f64,
    pub rel_gap: f64,
    /// Half-width of the frequency box of the spectral side.
    pub radius: f64,
    /// Certified bound on the spectral mass outside that box.
    pub tail_bound: f64,
}

/// Evaluate both sides of the circle Parseval identity.
///
/// Spatial: midpoint grid over centers in `[−t−2, N+t+2]²`. Spectral:
/// trapezoid sum on a frequency grid fine enough to be alias free (the
/// spatial autocorrelation lives in `(−N−2t, N+2t)²`), over a box grown until
/// the tail bound is under 0.5% of the value.
pub fn parseval_check(c: &Coloring, t: f64) -> Result<ParsevalCheck> {
    let n = c.size();
    if n > PARSEVAL_MAX_SIZE {
        return Err(Error::CostGuard { n, cap: PARSEVAL_MAX_SIZE });
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {t}")));
    }
    let nf = n as f64;
    let spatial = circle_energy(c, t, 2.0, -t - 2.0, nf + t + 2.0, PARSEVAL_SPATIAL_STEP);

    let h = 1.0 / (nf + 2.0 * t + 1.0);
    let tv = total_variation_squares(c);
    let mut radius = 8.0;
    loop {
        let spectral = grid_energy(c, h, (radius / h).ceil() as i64, |r| sigma_hat(t, (r, 0.0)).powi(2));
        let tail_bound = spectral_tail(t, radius, tv);
        if tail_bound <= PARSEVAL_TAIL_SHARE * spectral || radius >= 1024.0 {
            let rel_gap = (spatial - spectral).abs() / spatial.max(spectral).max(f64::MIN_POSITIVE);
            return Ok(ParsevalCheck { spatial, spectral, rel_gap, radius, tail_bound });
        }
        radius *= 2.0;
    }
}

// Outside [−R,R]², |ξ| ≥ R and |σ̂_t|² ≤ 4t/R (from |J₀(z)| ≤ √(2/(πz))).
// Each row profile h has |ĥ(s)| ≤ TV(h)/(2π|s|), so the mass of |f̂|² beyond
// |ξ₁| > R is at most Σ TV_row²/(2π²R); same for columns.
fn spectral_tail(t: f64, radius: f64, tv_squares: f64) -> f64 {
    4.0 * t / radius * tv_squares / (2.0 * PI * PI * radius)
}

fn total_variation_squares(c: &Coloring) -> f64 {
    let n = c.size() as i64;
    let line = |get: &dyn Fn(i64) -> i8| -> f64 {
        let tv: i64 = (0..=n).map(|i| (i64::from(get(i)) - i64::from(get(i - 1))).abs()).sum();
        (tv * tv) as f64
    };
    (0..n)
        .map(|k| line(&|i| c.get(i, k)) + line(&|i| c.get(k, i)))
        .sum()
}
