//! Finite two-colored checkerboards.
//!
//! A [`Coloring`] of size `N` assigns ±1 to every unit cell
//! `[m, m+1) × [n, n+1)` with `0 ≤ m, n < N` and is zero everywhere else.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// An `N × N` board of ±1 cells. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    size: usize,
    /// Row-major: cell `(m, n)` lives at `n * size + m`.
    cells: Vec<i8>,
    label: String,
}

/// The named board families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Constant,
    Parity,
    Striped,
    Random,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Constant => "constant",
            Family::Parity => "parity",
            Family::Striped => "striped",
            Family::Random => "random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Family::Constant),
            "parity" => Ok(Family::Parity),
            "striped" => Ok(Family::Striped),
            "random" => Ok(Family::Random),
            other => Err(Error::InvalidParameter(format!(
                "unknown board family `{other}` (expected constant, parity, striped or random)"
            ))),
        }
    }
}

impl Coloring {
    /// Builds a board from row-major cell values, which must all be ±1.
    pub fn from_cells(size: usize, cells: Vec<i8>, label: impl Into<String>) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyBoard);
        }
        if cells.len() != size * size {
            return Err(Error::InvalidParameter(format!(
                "expected {} cells for a board of size {size}, got {}",
                size * size,
                cells.len()
            )));
        }
        if let Some(&bad) = cells.iter().find(|&&c| c != 1 && c != -1) {
            return Err(Error::InvalidSign(bad.into()));
        }
        Ok(Coloring {
            size,
            cells,
            label: label.into(),
        })
    }

    /// Builds a board by evaluating `color(m, n)` for every cell.
    pub fn from_fn(size: usize, label: impl Into<String>, mut color: impl FnMut(usize, usize) -> i8) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyBoard);
        }
        let mut cells = Vec::with_capacity(size * size);
        for n in 0..size {
            for m in 0..size {
                cells.push(color(m, n));
            }
        }
        Self::from_cells(size, cells, label)
    }

    pub fn constant(size: usize, sign: i32) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidSign(sign));
        }
        Self::from_fn(size, "constant", |_, _| sign as i8)
    }

    /// The alternating board: cell `(m, n)` is `(−1)^(m+n)`.
    pub fn parity(size: usize) -> Result<Self> {
        Self::from_fn(size, "parity", |m, n| if (m + n) % 2 == 0 { 1 } else { -1 })
    }

    /// Monochromatic horizontal rows alternating in color: cell `(m, n)` is `(−1)^n`.
    pub fn striped(size: usize) -> Result<Self> {
        Self::from_fn(size, "striped", |_, n| if n % 2 == 0 { 1 } else { -1 })
    }

    /// Independent uniform ±1 cells drawn in row-major order, one
    /// [`rng::sign`] per cell, from the stream seeded by `seed`.
    pub fn random(size: usize, seed: u64) -> Result<Self> {
        let mut gen = rng::seeded(seed);
        Self::from_fn(size, "random", |_, _| rng::sign(&mut gen))
    }

    pub fn generate(family: Family, size: usize, seed: u64) -> Result<Self> {
        match family {
            Family::Constant => Self::constant(size, 1),
            Family::Parity => Self::parity(size),
            Family::Striped => Self::striped(size),
            Family::Random => Self::random(size, seed),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn cells(&self) -> &[i8] {
        &self.cells
    }

    /// Color of cell `(m, n)`; 0 outside the board.
    #[inline]
    pub fn get(&self, m: i64, n: i64) -> i8 {
        let size = self.size as i64;
        if m < 0 || n < 0 || m >= size || n >= size {
            return 0;
        }
        self.cells[(n * size + m) as usize]
    }

    /// Signed total area, `Σ c_mn`.
    pub fn sum(&self) -> i64 {
        self.cells.iter().map(|&c| i64::from(c)).sum()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn negated(&self) -> Self {
        Coloring {
            size: self.size,
            cells: self.cells.iter().map(|c| -c).collect(),
            label: self.label.clone(),
        }
    }

    /// Reflection across the diagonal `x = y`.
    pub fn transposed(&self) -> Self {
        let s = self.size;
        Self::from_fn(s, self.label.clone(), |m, n| self.cells[m * s + n]).expect("valid board")
    }

    /// Reflection across the vertical midline `x = N/2`.
    pub fn mirrored(&self) -> Self {
        let s = self.size;
        Self::from_fn(s, self.label.clone(), |m, n| self.cells[n * s + (s - 1 - m)]).expect("valid board")
    }

    /// Serializes to the text board format: a header `N <size> <label>`
    /// followed by one line per row `n = 0, 1, …`, each with `size`
    /// characters `+`/`-` for `m = 0, 1, …`.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.size * (self.size + 1) + 32);
        out.push_str(&format!("N {} {}\n", self.size, self.label));
        for row in self.cells.chunks(self.size) {
            out.extend(row.iter().map(|&c| if c > 0 { '+' } else { '-' }));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let mut parts = header.splitn(3, ' ');
        if parts.next() != Some("N") {
            return Err(Error::Parse {
                line: 1,
                msg: "header must start with `N`".into(),
            });
        }
        let size: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                line: 1,
                msg: "bad board size".into(),
            })?;
        let label = parts.next().unwrap_or("").to_string();
        let mut cells = Vec::with_capacity(size * size);
        for row in 0..size {
            let line = lines.next().ok_or_else(|| Error::Parse {
                line: row + 2,
                msg: "missing row".into(),
            })?;
            if line.chars().count() != size {
                return Err(Error::Parse {
                    line: row + 2,
                    msg: format!("expected {size} cells"),
                });
            }
            for ch in line.chars() {
                cells.push(match ch {
                    '+' => 1,
                    '-' => -1,
                    other => {
                        return Err(Error::Parse {
                            line: row + 2,
                            msg: format!("unexpected character `{other}`"),
                        })
                    }
                });
            }
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::Parse {
                line: size + 2,
                msg: "trailing content after the last row".into(),
            });
        }
        Self::from_cells(size, cells, label)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_boards() {
        let c = Coloring::constant(2, 1).unwrap();
        assert!(c.cells().iter().all(|&v| v == 1));
        let c = Coloring::constant(1, -1).unwrap();
        assert_eq!(c.get(0, 0), -1);
        assert_eq!(Coloring::constant(4, 1).unwrap().get(3, 3), 1);
        assert!(matches!(Coloring::constant(0, 1), Err(Error::EmptyBoard)));
        assert!(matches!(Coloring::constant(3, 2), Err(Error::InvalidSign(2))));
    }

    #[test]
    fn parity_board() {
        let c = Coloring::parity(2).unwrap();
        assert_eq!((c.get(0, 0), c.get(1, 0), c.get(0, 1), c.get(1, 1)), (1, -1, -1, 1));
        assert_eq!(Coloring::parity(3).unwrap().get(2, 2), 1);
        for n in [2, 4, 10] {
            assert_eq!(Coloring::parity(n).unwrap().sum(), 0);
        }
        for size in 1..7 {
            let c = Coloring::parity(size).unwrap();
            for n in 0..size as i64 {
                for m in 0..size as i64 - 1 {
                    assert_eq!(c.get(m, n) * c.get(m + 1, n), -1);
                }
            }
        }
    }

    #[test]
    fn striped_board() {
        let c = Coloring::striped(2).unwrap();
        assert_eq!((c.get(0, 0), c.get(1, 0)), (1, 1));
        assert_eq!((c.get(0, 1), c.get(1, 1)), (-1, -1));
        let c = Coloring::striped(4).unwrap();
        assert_eq!(c.get(3, 2), 1);
        for n in 0..4 {
            for m in 0..4 {
                assert_eq!(c.get(m, n), c.get(0, n));
            }
        }
    }

    #[test]
    fn random_is_reproducible() {
        let a = Coloring::random(8, 11).unwrap();
        assert_eq!(a, Coloring::random(8, 11).unwrap());
        // Frozen regression: these two seeds give different boards.
        assert_ne!(a.cells(), Coloring::random(8, 12).unwrap().cells());
    }

    #[test]
    fn random_is_balanced() {
        let c = Coloring::random(256, 2024).unwrap();
        let n = c.size() as f64;
        let direct: i64 = (0..256).flat_map(|y| (0..256).map(move |x| (x, y))).map(|(x, y)| i64::from(c.get(x, y))).sum();
        assert_eq!(direct, c.sum());
        assert!((direct as f64 / (n * n)).abs() < 4.0 / n);
    }

    #[test]
    fn outside_cells_are_zero() {
        let c = Coloring::random(5, 3).unwrap();
        assert_eq!(c.get(-1, 0), 0);
        assert_eq!(c.get(5, 0), 0);
        assert_eq!(c.get(0, 5), 0);
        assert_eq!(c.get(2, -7), 0);
    }

    #[test]
    fn text_format() {
        let c = Coloring::striped(2).unwrap();
        assert_eq!(c.to_text(), "N 2 striped\n++\n--\n");
        assert_eq!(Coloring::from_text(&c.to_text()).unwrap(), c);
        let c = Coloring::parity(3).unwrap().with_label("a label with spaces");
        assert_eq!(Coloring::from_text(&c.to_text()).unwrap(), c);
        assert!(Coloring::from_text("N 2 x\n+\n--\n").is_err());
        assert!(Coloring::from_text("N 2 x\n++\n-*\n").is_err());
        assert!(Coloring::from_text("M 2 x\n").is_err());
        assert!(Coloring::from_text("N 1 x\n+\n+\n").is_err());
    }

    #[test]
    fn family_names_parse() {
        for f in [Family::Constant, Family::Parity, Family::Striped, Family::Random] {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("checker".parse::<Family>().is_err());
    }

    proptest! {
        #[test]
        fn cells_are_signs(size in 1usize..24, seed: u64, m in -30i64..30, n in -30i64..30) {
            let c = Coloring::random(size, seed).unwrap();
            let inside = m >= 0 && n >= 0 && (m as usize) < size && (n as usize) < size;
            prop_assert_eq!(c.get(m, n).abs(), i8::from(inside));
        }

        #[test]
        fn text_round_trip(size in 1usize..20, seed: u64) {
            let c = Coloring::random(size, seed).unwrap();
            prop_assert_eq!(Coloring::from_text(&c.to_text()).unwrap(), c);
        }
    }
}
