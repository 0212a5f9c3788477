use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Relative bound on imaginary residue for fields built from Hermitian input.
pub const REALNESS_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Wigner,
    WeylSymbol,
}

impl FieldKind {
    pub fn code(self) -> u8 {
        match self {
            FieldKind::Wigner => 0,
            FieldKind::WeylSymbol => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(FieldKind::Wigner),
            1 => Some(FieldKind::WeylSymbol),
            _ => None,
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldKind::Wigner => "wigner",
            FieldKind::WeylSymbol => "weyl-symbol",
        })
    }
}

/// Values `F(q_j, p_k)` on the phase-space grid, stored q-major:
/// entry `(j, k)` lives at `j * n_p + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceField {
    grid: GridSpec,
    kind: FieldKind,
    values: Vec<Complex64>,
}

impl PhaseSpaceField {
    pub fn from_values(grid: GridSpec, kind: FieldKind, values: Vec<Complex64>) -> Result<Self> {
        let expected = grid.n_q() * grid.n_p();
        if values.len() != expected {
            return Err(Error::InvalidState(format!(
                "field has {} values, grid needs {expected}",
                values.len()
            )));
        }
        Ok(Self { grid, kind, values })
    }

    /// Samples a real function of `(q, p)`. Used to enter the symbols of
    /// polynomial observables directly.
    pub fn from_fn(grid: GridSpec, kind: FieldKind, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.n_q() * grid.n_p());
        for j in 0..grid.n_q() {
            let q = grid.q(j);
            for k in 0..grid.n_p() {
                values.push(Complex64::new(f(q, grid.p(k)), 0.0));
            }
        }
        Self { grid, kind, values }
    }

    pub fn constant(grid: GridSpec, kind: FieldKind, value: f64) -> Self {
        Self::from_fn(grid, kind, |_, _| value)
    }

    pub fn zeros(grid: GridSpec, kind: FieldKind) -> Self {
        Self::constant(grid, kind, 0.0)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.values[j * self.grid.n_p() + k]
    }

    /// Real part at `(j, k)`.
    #[inline]
    pub fn re(&self, j: usize, k: usize) -> f64 {
        self.get(j, k).re
    }

    pub fn row(&self, j: usize) -> &[Complex64] {
        let n_p = self.grid.n_p();
        &self.values[j * n_p..(j + 1) * n_p]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn min_re(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.re)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_re(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether the imaginary residue is within [`REALNESS_TOLERANCE`] of the
    /// largest magnitude.
    pub fn is_real(&self) -> bool {
        self.max_imag() <= REALNESS_TOLERANCE * self.max_abs()
    }

    /// Largest entrywise distance to another field on the same grid.
    pub fn max_abs_diff(&self, other: &PhaseSpaceField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Multiplies every entry by `factor` and relabels the result.
    pub fn scaled(&self, factor: f64, kind: FieldKind) -> Self {
        Self {
            grid: self.grid,
            kind,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// `α·self + β·other`, keeping `self`'s kind.
    pub fn combine(&self, alpha: f64, other: &PhaseSpaceField, beta: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            kind: self.kind,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * alpha + b * beta)
                .collect(),
        })
    }

    pub(crate) fn require_kind(&self, expected: FieldKind) -> Result<()> {
        if self.kind != expected {
            return Err(Error::KindMismatch {
                expected,
                found: self.kind,
            });
        }
        Ok(())
    }
}
