//! Uniform position grid and the momentum grid it induces.
//!
//! Position samples sit on the half-open interval `[q_min, q_max)`. The
//! correlation `ψ*(q + y) ψ(q − y)` is sampled at `y = m·dq` for
//! `m ∈ [−n_q, n_q)`, so a length `2·n_q` transform over `m` resolves the
//! conjugate variable `2p/ħ`. That fixes
//!
//! ```text
//! n_p = 2·n_q,   dp = π·ħ / (n_p·dq),   p_k = (k − n_q)·dp
//! ```
//!
//! and the momentum axis covers `[−π·ħ/(2·dq), π·ħ/(2·dq))`. The product
//! `n_p·dp·dq` equals `π·ħ` exactly, which is what makes the Riemann sum of a
//! Wigner function over the grid equal to the discrete trace of the state.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MIN_POSITION_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n_q: usize,
    q_min: f64,
    q_max: f64,
    dq: f64,
    hbar: f64,
    n_p: usize,
    dp: f64,
}

impl GridSpec {
    /// Builds a grid with `n_q` position samples on `[q_min, q_max)`.
    ///
    /// `n_q` must be even and at least 8.
    pub fn new(n_q: usize, q_min: f64, q_max: f64, hbar: f64) -> Result<Self> {
        if n_q < MIN_POSITION_SAMPLES {
            return Err(Error::InvalidGrid(format!(
                "n_q = {n_q} is below the minimum of {MIN_POSITION_SAMPLES}"
            )));
        }
        if !n_q.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("n_q = {n_q} must be even")));
        }
        if !q_min.is_finite() || !q_max.is_finite() || q_max <= q_min {
            return Err(Error::InvalidGrid(format!(
                "degenerate interval [{q_min}, {q_max})"
            )));
        }
        if !hbar.is_finite() || hbar <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "hbar = {hbar} must be positive"
            )));
        }
        let dq = (q_max - q_min) / n_q as f64;
        let n_p = 2 * n_q;
        let dp = PI * hbar / (n_p as f64 * dq);
        Ok(Self {
            n_q,
            q_min,
            q_max,
            dq,
            hbar,
            n_p,
            dp,
        })
    }

    /// Same grid with a different value of ħ.
    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        Self::new(self.n_q, self.q_min, self.q_max, hbar)
    }

    pub fn n_q(&self) -> usize {
        self.n_q
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn dq(&self) -> f64 {
        self.dq
    }

    pub fn dp(&self) -> f64 {
        self.dp
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Upper edge of the momentum band, `π·ħ/(2·dq)`. The axis itself stops
    /// one step short of it.
    pub fn p_max(&self) -> f64 {
        PI * self.hbar / (2.0 * self.dq)
    }

    /// Area of one phase-space cell, `dq·dp`.
    pub fn cell_area(&self) -> f64 {
        self.dq * self.dp
    }

    #[inline]
    pub fn q(&self, j: usize) -> f64 {
        self.q_min + j as f64 * self.dq
    }

    #[inline]
    pub fn p(&self, k: usize) -> f64 {
        (k as f64 - self.n_q as f64) * self.dp
    }

    pub fn q_axis(&self) -> Vec<f64> {
        (0..self.n_q).map(|j| self.q(j)).collect()
    }

    pub fn p_axis(&self) -> Vec<f64> {
        (0..self.n_p).map(|k| self.p(k)).collect()
    }

    /// Index of the sample mirrored through `q = 0`, if the grid is symmetric
    /// (`q_min = −q_max`) and the mirror lands on the axis.
    pub fn mirror_q_index(&self, j: usize) -> Option<usize> {
        (self.q_min == -self.q_max && j > 0).then(|| self.n_q - j)
    }

    /// Index of `−p_k`; the most negative momentum has no partner.
    pub fn mirror_p_index(&self, k: usize) -> Option<usize> {
        (k > 0).then(|| self.n_p - k)
    }

    /// Parses the `n:q_min:q_max` form used on the command line.
    pub fn parse_triplet(text: &str, hbar: f64) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidGrid(format!(
                "expected n:q_min:q_max, got `{text}`"
            )));
        }
        let n_q = parts[0]
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::InvalidGrid(format!("bad sample count `{}`: {e}", parts[0])))?;
        let bound = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidGrid(format!("bad bound `{s}`: {e}")))
        };
        Self::new(n_q, bound(parts[1])?, bound(parts[2])?, hbar)
    }
}
