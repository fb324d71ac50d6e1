//! An infinite-plane coloring whose segment discrepancy grows like
//! `|I|^{1/2+ε}`, built level by level.
//!
//! Level `k` is an `N_k × N_k` board `f_k` occupying the cells
//! `[−N_k/2, N_k/2)²`. `f_{k+1}` tiles `M_k × M_k` copies of `f_k`, each
//! multiplied by a random sign, with the central copy kept at `+1` so every
//! level extends the previous one. A draw is accepted only once the new
//! board's maximal segment discrepancy is at most `φ(N_k)/100` with
//! `φ(ℓ) = K ℓ^{1/2+ε}`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::geometry::{Segment, SegmentTraversal};
use crate::line_disc::{max_segment_discrepancy_capped, sampled_segment_sup, DEFAULT_EXACT_CAP};
use crate::report::{Method, Witness};
use crate::rng;

/// Version tag written into hierarchy dumps.
pub const DUMP_VERSION: u32 = 1;

/// Parameters of the construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchySpec {
    pub epsilon: f64,
    /// Per-level overrides of `epsilon`; level `k` uses entry `k − 1` if present.
    #[serde(default)]
    pub epsilon_schedule: Vec<f64>,
    /// The constant `K` of `φ`.
    pub k: f64,
    /// The constant in `M_k = C_M (ln N_k)^{1/(2ε)}`.
    pub c_m: f64,
    /// Number of boards `f_1, …, f_max_level`.
    pub max_level: usize,
    pub seed: u64,
    /// Resamples allowed per level after the first draw.
    pub retry_budget: usize,
    /// Largest admissible `N_max_level`.
    pub size_cap: u64,
    /// Boards up to this size are verified by the exact search.
    pub exact_cap: usize,
    /// Trials of the sampled search used above `exact_cap`.
    pub verify_trials: u64,
}

impl HierarchySpec {
    pub fn new(epsilon: f64, max_level: usize, seed: u64) -> Self {
        HierarchySpec {
            epsilon,
            epsilon_schedule: Vec::new(),
            k: 500.0,
            c_m: 1.0,
            max_level,
            seed,
            retry_budget: 200,
            size_cap: 4096,
            exact_cap: DEFAULT_EXACT_CAP,
            verify_trials: 100_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        for &e in std::iter::once(&self.epsilon).chain(&self.epsilon_schedule) {
            if !(e > 0.0 && e <= 0.5) {
                return bad(format!("epsilon must lie in (0, 1/2], got {e}"));
            }
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return bad(format!("K must be positive, got {}", self.k));
        }
        if !(self.c_m > 0.0 && self.c_m.is_finite()) {
            return bad(format!("C_M must be positive, got {}", self.c_m));
        }
        if self.max_level == 0 {
            return bad("at least one level is required".into());
        }
        if self.verify_trials == 0 {
            return bad("verify_trials must be at least 1".into());
        }
        Ok(())
    }

    /// `ε_k` for level `k ≥ 1`.
    pub fn epsilon_at(&self, level: usize) -> f64 {
        self.epsilon_schedule.get(level - 1).copied().unwrap_or(self.epsilon)
    }

    /// `φ(ℓ) = K ℓ^{1/2+ε_k}`.
    pub fn phi(&self, level: usize, length: f64) -> f64 {
        self.k * length.powf(0.5 + self.epsilon_at(level))
    }

    /// Single-cell bound `φ(N_k)/100` of level `k`.
    pub fn level_bound(&self, level: usize, size: u64) -> f64 {
        self.phi(level, size as f64) / 100.0
    }

    /// Smallest odd integer `≥ max(3, C_M (ln N_k)^{1/(2ε_k)})`.
    pub fn multiplier(&self, level: usize, size: u64) -> u64 {
        let target = self.c_m * (size as f64).ln().powf(1.0 / (2.0 * self.epsilon_at(level)));
        let m = target.ceil().max(3.0) as u64;
        m | 1
    }

    /// `N_1, …, N_max_level`, checked against `size_cap`.
    pub fn sizes(&self) -> Result<Vec<u64>> {
        let mut sizes = vec![2u64];
        while sizes.len() < self.max_level {
            let level = sizes.len();
            let n = sizes[level - 1];
            let next = n
                .checked_mul(self.multiplier(level, n))
                .ok_or(Error::HierarchyTooLarge { n: u64::MAX, cap: self.size_cap })?;
            if next > self.size_cap {
                return Err(Error::HierarchyTooLarge { n: next, cap: self.size_cap });
            }
            sizes.push(next);
        }
        Ok(sizes)
    }

    /// The largest level count whose top board has `N ≤ limit`.
    pub fn levels_within(&self, limit: u64) -> usize {
        let mut levels = 1;
        let mut n = 2u64;
        loop {
            match n.checked_mul(self.multiplier(levels, n)) {
                Some(next) if next <= limit => {
                    n = next;
                    levels += 1;
                }
                _ => return levels,
            }
        }
    }
}

/// A square matrix of ±1 signs, row-major with row index `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct SignMatrix {
    size: usize,
    signs: Vec<i8>,
}

impl SignMatrix {
    fn draw(size: usize, gen: &mut rng::Rng) -> Self {
        let mut signs: Vec<i8> = (0..size * size).map(|_| rng::sign(gen)).collect();
        signs[size * size / 2] = 1;
        SignMatrix { size, signs }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Sign of the super-cell in column `i`, row `j`.
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.signs[j * self.size + i]
    }

    pub fn center(&self) -> i8 {
        self.signs[self.size * self.size / 2]
    }

    /// Negate one entry.
    pub fn flip(&mut self, i: usize, j: usize) {
        self.signs[j * self.size + i] *= -1;
    }
}

impl From<SignMatrix> for Vec<String> {
    fn from(m: SignMatrix) -> Self {
        m.signs
            .chunks(m.size)
            .map(|row| row.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect())
            .collect()
    }
}

impl TryFrom<Vec<String>> for SignMatrix {
    type Error = String;

    fn try_from(rows: Vec<String>) -> std::result::Result<Self, String> {
        let size = rows.len();
        let mut signs = Vec::with_capacity(size * size);
        for row in &rows {
            if row.chars().count() != size {
                return Err(format!("sign matrix row {row:?} has the wrong width"));
            }
            for ch in row.chars() {
                signs.push(match ch {
                    '+' => 1,
                    '-' => -1,
                    other => return Err(format!("bad sign {other:?}")),
                });
            }
        }
        if size.is_multiple_of(2) {
            return Err("sign matrix must have odd size".into());
        }
        Ok(SignMatrix { size, signs })
    }
}

/// Outcome of checking one level against its single-cell bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub size: u64,
    pub max_found: f64,
    pub bound: f64,
    pub passed: bool,
    pub method: Method,
    /// Witness in plane coordinates.
    pub witness: Witness,
    pub search_size: u64,
    /// Resamples used when the level was built.
    pub retries: usize,
}

impl fmt::Display for LevelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "level {} (N={}): max {:.6} vs bound {:.6} [{}] {}",
            self.level,
            self.size,
            self.max_found,
            self.bound,
            self.method.name(),
            if self.passed { "pass" } else { "FAIL" }
        )
    }
}

/// The built construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalColoring {
    pub spec: HierarchySpec,
    pub base: Coloring,
    /// `sign_matrices[k − 1]` turns `f_k` into `f_{k+1}`.
    pub sign_matrices: Vec<SignMatrix>,
    pub verification: Vec<LevelReport>,
}

#[derive(Serialize, Deserialize)]
struct Dump {
    version: u32,
    hierarchy: HierarchicalColoring,
}

/// Build all levels, resampling each until it verifies.
pub fn build_hierarchy(spec: HierarchySpec) -> Result<HierarchicalColoring> {
    spec.validate()?;
    let sizes = spec.sizes()?;
    let base = Coloring::constant(2, 1)?.with_label("hier-level-1");
    let mut gen = rng::seeded(spec.seed);

    let first = check_board(&spec, 1, &base, 0)?;
    if !first.passed {
        return Err(Error::RetryBudgetExhausted {
            level: 1,
            retries: 0,
            best_max: first.max_found,
            bound: first.bound,
        });
    }
    let mut verification = vec![first];
    let mut sign_matrices = Vec::new();
    let mut board = base.clone();

    for level in 2..=spec.max_level {
        let m = (sizes[level - 1] / sizes[level - 2]) as usize;
        let mut best_max = f64::INFINITY;
        let mut accepted = None;
        for retries in 0..=spec.retry_budget {
            let signs = SignMatrix::draw(m, &mut gen);
            let next = expand(&board, &signs, level)?;
            let report = check_board(&spec, level, &next, retries)?;
            if report.passed {
                accepted = Some((signs, next, report));
                break;
            }
            best_max = best_max.min(report.max_found);
        }
        let Some((signs, next, report)) = accepted else {
            return Err(Error::RetryBudgetExhausted {
                level,
                retries: spec.retry_budget,
                best_max,
                bound: spec.level_bound(level, sizes[level - 1]),
            });
        };
        sign_matrices.push(signs);
        verification.push(report);
        board = next;
    }

    Ok(HierarchicalColoring { spec, base, sign_matrices, verification })
}

// f_{k+1} from f_k: board cell (u, v) takes block (u / B, v / B)'s sign times
// f_k at (u mod B, v mod B). Both boards are stored with their lower-left
// corner at index 0, so the centering offsets cancel.
fn expand(prev: &Coloring, signs: &SignMatrix, level: usize) -> Result<Coloring> {
    let b = prev.size();
    Coloring::from_fn(b * signs.size(), format!("hier-level-{level}"), |u, v| {
        signs.get(u / b, v / b) * prev.get((u % b) as i64, (v % b) as i64)
    })
}

fn check_board(spec: &HierarchySpec, level: usize, board: &Coloring, retries: usize) -> Result<LevelReport> {
    let n = board.size();
    let report = if n <= spec.exact_cap {
        max_segment_discrepancy_capped(board, spec.exact_cap)?
    } else {
        let seed = spec.seed ^ (level as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        sampled_segment_sup(board, spec.verify_trials, seed)?
    };
    let half = (n / 2) as f64;
    let witness = report
        .witness
        .segment()
        .map(|s| Witness::from(s.translated(-half, -half)))
        .unwrap_or(report.witness);
    let bound = spec.level_bound(level, n as u64);
    Ok(LevelReport {
        level,
        size: n as u64,
        max_found: report.value,
        bound,
        passed: report.value <= bound,
        method: report.method,
        witness,
        search_size: report.search_size,
        retries,
    })
}

impl HierarchicalColoring {
    pub fn levels(&self) -> usize {
        self.sign_matrices.len() + 1
    }

    /// `N_k` for `1 ≤ k ≤ levels()`.
    pub fn size_at(&self, level: usize) -> u64 {
        self.sign_matrices[..level - 1].iter().fold(2, |n, m| n * m.size() as u64)
    }

    /// Side of the top board.
    pub fn extent(&self) -> u64 {
        self.size_at(self.levels())
    }

    /// The minimal `k` with `N_k ≥ ℓ`, if the built levels reach `ℓ`.
    pub fn k_of_length(&self, length: f64) -> Option<usize> {
        (1..=self.levels()).find(|&k| self.size_at(k) as f64 >= length)
    }

    /// Color of the plane cell `(m, n)`.
    pub fn hier_cell(&self, m: i64, n: i64) -> Result<i8> {
        self.cell_at_level(self.levels(), m, n)
    }

    /// Color of `f_k` at plane cell `(m, n)`, which must lie in
    /// `[−N_k/2, N_k/2)²`.
    pub fn cell_at_level(&self, level: usize, m: i64, n: i64) -> Result<i8> {
        let half = (self.size_at(level) / 2) as i64;
        if !(-half..half).contains(&m) || !(-half..half).contains(&n) {
            return Err(Error::OutOfExtent { m, n, half });
        }
        let (mut m, mut n) = (m, n);
        let mut sign = 1i8;
        for k in (1..level).rev() {
            let b = self.size_at(k) as i64;
            let big_half = b * self.sign_matrices[k - 1].size() as i64 / 2;
            let (u, v) = (m + big_half, n + big_half);
            let (i, j) = (u / b, v / b);
            sign *= self.sign_matrices[k - 1].get(i as usize, j as usize);
            m = u - i * b - b / 2;
            n = v - j * b - b / 2;
        }
        Ok(sign * self.base.get(m + 1, n + 1))
    }

    /// `f_k` as a board; board cell `(i, j)` is plane cell `(i − N_k/2, j − N_k/2)`.
    pub fn materialize(&self, level: usize) -> Result<Coloring> {
        if level == 0 || level > self.levels() {
            return Err(Error::InvalidParameter(format!("level {level} not built")));
        }
        self.sign_matrices[..level - 1]
            .iter()
            .enumerate()
            .try_fold(self.base.clone(), |board, (i, signs)| expand(&board, signs, i + 2))
    }

    /// Re-run the single-cell check of level `k` on the stored signs.
    pub fn verify_level(&self, level: usize) -> Result<LevelReport> {
        let board = self.materialize(level)?;
        let retries = self.verification.get(level - 1).map_or(0, |r| r.retries);
        check_board(&self.spec, level, &board, retries)
    }

    /// `∫_I f` for a segment inside the built extent, in plane coordinates.
    pub fn hier_segment_discrepancy(&self, s: &Segment) -> Result<f64> {
        let half = (self.extent() / 2) as f64;
        for p in [s.a, s.b] {
            if p.x.abs() > half || p.y.abs() > half {
                let (m, n) = p.cell();
                return Err(Error::OutOfExtent { m, n, half: half as i64 });
            }
        }
        let mut total = 0.0;
        for run in SegmentTraversal::new(*s) {
            total += f64::from(self.hier_cell(run.cell.0, run.cell.1)?) * run.length;
        }
        Ok(total)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&Dump { version: DUMP_VERSION, hierarchy: self.clone() })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dump: Dump = serde_json::from_str(text)?;
        if dump.version != DUMP_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported hierarchy dump version {} (expected {DUMP_VERSION})",
                dump.version
            )));
        }
        let h = dump.hierarchy;
        if h.base.size() != 2 || h.sign_matrices.iter().any(|m| m.center() != 1) {
            return Err(Error::InvalidParameter("dump violates the construction invariants".into()));
        }
        Ok(h)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        Ok(std::fs::write(path, self.to_json()?)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line_disc::segment_discrepancy;
    use proptest::prelude::*;

    fn built(levels: usize, seed: u64) -> HierarchicalColoring {
        build_hierarchy(HierarchySpec::new(0.25, levels, seed)).unwrap()
    }

    fn shared() -> &'static HierarchicalColoring {
        static H: std::sync::OnceLock<HierarchicalColoring> = std::sync::OnceLock::new();
        H.get_or_init(|| built(3, 8))
    }

    #[test]
    fn level_arithmetic() {
        let spec = HierarchySpec::new(0.25, 2, 1);
        assert_eq!(spec.multiplier(1, 2), 3);
        assert_eq!(spec.sizes().unwrap(), vec![2, 6]);
        let deep = HierarchySpec::new(0.25, 4, 1);
        assert_eq!(deep.sizes().unwrap(), vec![2, 6, 30, 390]);
        assert_eq!(deep.levels_within(2000), 4);
        let too_deep = HierarchySpec::new(0.25, 5, 1);
        assert!(matches!(too_deep.sizes(), Err(Error::HierarchyTooLarge { .. })));
    }

    #[test]
    fn multipliers_are_odd_and_at_least_three() {
        for eps in [0.1, 0.25, 0.5] {
            let spec = HierarchySpec::new(eps, 3, 0);
            for n in [2u64, 6, 10, 100, 1000] {
                let m = spec.multiplier(1, n);
                assert!(m >= 3 && m % 2 == 1);
                let target = (n as f64).ln().powf(1.0 / (2.0 * eps));
                assert!(m as f64 >= target && (m as f64) < target.max(3.0) + 2.0);
            }
        }
    }

    #[test]
    fn base_level_report() {
        let h = built(1, 0);
        let r = &h.verification[0];
        assert!((r.max_found - 8f64.sqrt()).abs() < 1e-12);
        assert!((r.bound - 5.0 * 2f64.powf(0.75)).abs() < 1e-12);
        assert!(r.passed);
    }

    #[test]
    fn build_is_deterministic() {
        assert_eq!(built(3, 17), built(3, 17));
        assert_ne!(built(3, 17).sign_matrices, built(3, 18).sign_matrices);
    }

    #[test]
    fn centers_are_positive_and_blocks_preserved() {
        let h = built(3, 5);
        for m in &h.sign_matrices {
            assert_eq!(m.center(), 1);
        }
        for k in 1..h.levels() {
            let small = h.materialize(k).unwrap();
            let big = h.materialize(k + 1).unwrap();
            let offset = (big.size() - small.size()) / 2;
            for j in 0..small.size() {
                for i in 0..small.size() {
                    assert_eq!(
                        small.get(i as i64, j as i64),
                        big.get((i + offset) as i64, (j + offset) as i64)
                    );
                }
            }
        }
        for (m, n) in [(-1, -1), (-1, 0), (0, -1), (0, 0)] {
            assert_eq!(h.hier_cell(m, n).unwrap(), 1);
        }
    }

    #[test]
    fn hier_cell_matches_materialization() {
        let h = built(3, 9);
        for level in 2..=3 {
            let board = h.materialize(level).unwrap();
            let half = board.size() as i64 / 2;
            for j in 0..board.size() as i64 {
                for i in 0..board.size() as i64 {
                    assert_eq!(h.cell_at_level(level, i - half, j - half).unwrap(), board.get(i, j));
                }
            }
        }
        assert!(matches!(h.hier_cell(15, 0), Err(Error::OutOfExtent { .. })));
        assert!(h.hier_cell(-15, 14).is_ok());
    }

    #[test]
    fn flipping_a_sign_flips_exactly_its_block() {
        let h = built(2, 3);
        let mut flipped = h.clone();
        flipped.sign_matrices[0].flip(2, 0);
        for n in -3..3 {
            for m in -3..3 {
                let inside = (1..3).contains(&m) && (-3..-1).contains(&n);
                let (a, b) = (h.hier_cell(m, n).unwrap(), flipped.hier_cell(m, n).unwrap());
                assert_eq!(a == -b, inside, "cell ({m}, {n})");
            }
        }
    }

    #[test]
    fn tampering_changes_the_max_by_at_most_a_block_diagonal() {
        let h = built(3, 4);
        let before = h.verify_level(3).unwrap();
        assert_eq!(before, h.verify_level(3).unwrap());
        let mut tampered = h.clone();
        tampered.sign_matrices[1].flip(0, 0);
        let after = tampered.verify_level(3).unwrap();
        // A segment meets one 6×6 block in at most its diagonal.
        assert!((after.max_found - before.max_found).abs() <= 2.0 * 6.0 * 2f64.sqrt() + 1e-9);
    }

    #[test]
    fn central_segment_matches_base_board() {
        let h = built(3, 2);
        let s = Segment::new(-0.9, -0.3, 0.7, 0.95);
        let base = segment_discrepancy(&h.base, &s.translated(1.0, 1.0));
        assert!((h.hier_segment_discrepancy(&s).unwrap() - base).abs() < 1e-12);
        assert!(h.hier_segment_discrepancy(&Segment::new(0.0, 0.0, 20.0, 0.0)).is_err());
    }

    #[test]
    fn k_of_length_is_minimal() {
        let h = built(3, 1);
        assert_eq!(h.k_of_length(1.0), Some(1));
        assert_eq!(h.k_of_length(2.0), Some(1));
        assert_eq!(h.k_of_length(2.5), Some(2));
        assert_eq!(h.k_of_length(30.0), Some(3));
        assert_eq!(h.k_of_length(31.0), None);
    }

    #[test]
    fn epsilon_schedule_drives_multipliers() {
        let mut spec = HierarchySpec::new(0.25, 3, 1);
        spec.epsilon_schedule = vec![0.5, 0.5];
        assert_eq!(spec.sizes().unwrap(), vec![2, 6, 18]);
        let h = build_hierarchy(spec).unwrap();
        assert_eq!(h.extent(), 18);
        spec = HierarchySpec::new(0.25, 2, 1);
        spec.epsilon_schedule = vec![0.0];
        assert!(build_hierarchy(spec).is_err());
    }

    #[test]
    fn impossible_bound_exhausts_the_budget() {
        let mut spec = HierarchySpec::new(0.25, 2, 1);
        spec.k = 150.0;
        spec.epsilon_schedule = vec![0.5, 0.001];
        spec.retry_budget = 3;
        // Level 2 bound ≈ 3.7: any positive neighbor of the central block
        // extends a run to length 4, so at most one of 256 patterns can pass.
        match build_hierarchy(spec) {
            Err(Error::RetryBudgetExhausted { level, retries, .. }) => assert_eq!((level, retries), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dump_round_trip_is_exact() {
        let h = built(3, 6);
        let back = HierarchicalColoring::from_json(&h.to_json().unwrap()).unwrap();
        assert_eq!(back, h);
        let text = h.to_json().unwrap().replacen("\"version\": 1", "\"version\": 9", 1);
        assert!(HierarchicalColoring::from_json(&text).is_err());
    }

    proptest! {
        #[test]
        fn segment_integral_is_additive(
            ax in -14.9f64..14.9, ay in -14.9f64..14.9,
            bx in -14.9f64..14.9, by in -14.9f64..14.9,
            t in 0.01f64..0.99,
        ) {
            let h = shared();
            let s = Segment::new(ax, ay, bx, by);
            let mid = s.at(t);
            let whole = h.hier_segment_discrepancy(&s).unwrap();
            let left = h.hier_segment_discrepancy(&Segment::new(ax, ay, mid.x, mid.y)).unwrap();
            let right = h.hier_segment_discrepancy(&Segment::new(mid.x, mid.y, bx, by)).unwrap();
            prop_assert!((whole - left - right).abs() < 1e-9);
        }
    }
}
