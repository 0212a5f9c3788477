//! Benchmark quantum states and operators sampled on a [`GridSpec`].
//!
//! Kernels are stored as `n_q × n_q` row-major matrices of position-space
//! matrix elements `⟨q_j|Â|q_k⟩`. With that normalization the operator trace
//! is `Σ_j K(j, j)·dq` and `Tr(ÂB̂) = Σ_jk A(j, k)·B(k, j)·dq²`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Allowed edge magnitude relative to the peak, over the two outermost
/// samples on each side. Applied to `|ψ|²` for wavefunctions and to `|ρ|` for
/// kernels, so both measure the same probability-density scale.
pub const CONTAINMENT_TOLERANCE: f64 = 1e-6;
pub const NORM_TOLERANCE: f64 = 1e-9;
pub const TRACE_TOLERANCE: f64 = 1e-8;
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;
pub const WEIGHT_TOLERANCE: f64 = 1e-12;
pub const MAX_OSCILLATOR_LEVEL: usize = 64;
/// Smallest accepted `β·ħ·ω` for the thermal kernel.
pub const MIN_THERMAL_RATIO: f64 = 1e-3;

/// Mass and angular frequency of a harmonic oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub mass: f64,
    pub omega: f64,
}

impl Oscillator {
    pub fn new(mass: f64, omega: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) || !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidState(format!(
                "mass ({mass}) and omega ({omega}) must be positive"
            )));
        }
        Ok(Self { mass, omega })
    }

    /// `m·ω = 1`.
    pub fn unit() -> Self {
        Self {
            mass: 1.0,
            omega: 1.0,
        }
    }

    /// Inverse squared oscillator length, `m·ω/ħ`.
    fn stiffness(&self, hbar: f64) -> f64 {
        self.mass * self.omega / hbar
    }

    /// Normalized ground-state Gaussian centred at `centre`.
    fn ground_amplitude(&self, hbar: f64, q: f64, centre: f64) -> f64 {
        let a = self.stiffness(hbar);
        (a / PI).powf(0.25) * (-0.5 * a * (q - centre).powi(2)).exp()
    }
}

fn max_norm(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn check_vector_containment(values: &[Complex64]) -> Result<()> {
    let n = values.len();
    let boundary = [0, 1, n - 2, n - 1]
        .iter()
        .map(|&i| values[i].norm_sqr())
        .fold(0.0, f64::max);
    let limit = CONTAINMENT_TOLERANCE * max_norm(values).powi(2);
    if boundary > limit {
        return Err(Error::Containment { boundary, limit });
    }
    Ok(())
}

fn discrete_norm(grid: &GridSpec, values: &[Complex64]) -> f64 {
    (values.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.dq()).sqrt()
}

/// Complex samples `ψ(q_j)` of a unit-normalized, contained pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWavefunction {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SampledWavefunction {
    /// Wraps samples that must already be contained and unit-normalized.
    pub fn from_samples(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        let psi = Self::from_samples_unchecked(grid, values)?;
        check_vector_containment(&psi.values)?;
        let norm_sqr = psi.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "discrete norm² = {norm_sqr}, expected 1"
            )));
        }
        Ok(psi)
    }

    /// Rescales arbitrary samples to unit norm; containment is still enforced.
    pub fn normalized(grid: GridSpec, mut values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_q() {
            return Err(Error::InvalidState(format!(
                "{} samples for a grid of {}",
                values.len(),
                grid.n_q()
            )));
        }
        let norm = discrete_norm(&grid, &values);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState(format!(
                "cannot normalize a state of norm {norm}"
            )));
        }
        check_vector_containment(&values)?;
        values.iter_mut().for_each(|v| *v /= norm);
        Ok(Self { grid, values })
    }

    /// Skips both containment and normalization checks. Only the length is
    /// validated. Intended for diagnostics on deliberately truncated states.
    pub fn from_samples_unchecked(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_q() {
            return Err(Error::InvalidState(format!(
                "{} samples for a grid of {}",
                values.len(),
                grid.n_q()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `Σ |ψ_j|²·dq`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dq()
    }

    /// `Σ ψ_j*·φ_j·dq`.
    pub fn inner(&self, other: &SampledWavefunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let sum: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(sum * self.grid.dq())
    }

    pub fn is_contained(&self) -> bool {
        check_vector_containment(&self.values).is_ok()
    }

    pub fn check_containment(&self) -> Result<()> {
        check_vector_containment(&self.values)
    }
}

/// Number state `ψ_n` of the harmonic oscillator.
///
/// Uses the recurrence for Hermite functions normalized at every step,
/// `φ_{n+1} = √(2/(n+1))·ξ·φ_n − √(n/(n+1))·φ_{n−1}`, which stays bounded for
/// all levels up to [`MAX_OSCILLATOR_LEVEL`].
pub fn oscillator_eigenstate(
    grid: &GridSpec,
    n: usize,
    osc: &Oscillator,
) -> Result<SampledWavefunction> {
    if n > MAX_OSCILLATOR_LEVEL {
        return Err(Error::InvalidState(format!(
            "level {n} exceeds the supported maximum {MAX_OSCILLATOR_LEVEL}"
        )));
    }
    let a = osc.stiffness(grid.hbar());
    let scale = a.powf(0.25);
    let values = (0..grid.n_q())
        .map(|j| {
            let xi = a.sqrt() * grid.q(j);
            let mut prev = 0.0;
            let mut cur = PI.powf(-0.25) * (-0.5 * xi * xi).exp();
            for k in 0..n {
                let kf = k as f64;
                let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
                prev = cur;
                cur = next;
            }
            Complex64::new(scale * cur, 0.0)
        })
        .collect();
    SampledWavefunction::normalized(*grid, values)
}

fn coherent_samples(grid: &GridSpec, q0: f64, p0: f64, osc: &Oscillator) -> Vec<Complex64> {
    let hbar = grid.hbar();
    (0..grid.n_q())
        .map(|j| {
            let q = grid.q(j);
            Complex64::from_polar(osc.ground_amplitude(hbar, q, q0), p0 * q / hbar)
        })
        .collect()
}

/// Ground state displaced to `(q0, p0)`; the momentum kick is the phase
/// factor `e^{i·p0·q/ħ}`.
pub fn coherent_state(
    grid: &GridSpec,
    q0: f64,
    p0: f64,
    osc: &Oscillator,
) -> Result<SampledWavefunction> {
    SampledWavefunction::normalized(*grid, coherent_samples(grid, q0, p0, osc))
}

/// Equal-weight superposition of coherent states at `(q0, p0)` and
/// `(−q0, −p0)` with relative phase `e^{i·phase}`.
pub fn cat_state(
    grid: &GridSpec,
    q0: f64,
    p0: f64,
    phase: f64,
    osc: &Oscillator,
) -> Result<SampledWavefunction> {
    let plus = coherent_samples(grid, q0, p0, osc);
    let minus = coherent_samples(grid, -q0, -p0, osc);
    check_vector_containment(&plus)?;
    check_vector_containment(&minus)?;
    let rel = Complex64::from_polar(1.0, phase);
    let values: Vec<Complex64> = plus.iter().zip(&minus).map(|(a, b)| a + rel * b).collect();
    let norm = discrete_norm(grid, &values);
    if norm < 1e-6 {
        return Err(Error::InvalidState(format!(
            "cat branches cancel (norm {norm:.3e})"
        )));
    }
    SampledWavefunction::normalized(*grid, values)
}

/// Position-space density matrix `⟨q_j|ρ̂|q_k⟩`: Hermitian with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityKernel {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl DensityKernel {
    /// Validates Hermiticity and unit trace.
    pub fn from_values(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        check_square(&grid, &values)?;
        check_hermitian(grid.n_q(), &values)?;
        let kernel = Self { grid, values };
        let trace = kernel.trace();
        if (trace - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace = {trace}, expected 1")));
        }
        Ok(kernel)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.values[j * self.grid.n_q() + k]
    }

    /// `Σ_j ρ(j, j)·dq` (real part).
    pub fn trace(&self) -> f64 {
        kernel_trace(&self.grid, &self.values).re
    }

    /// Probability density on the position grid, `ρ(q_j, q_j)`.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.grid.n_q()).map(|j| self.get(j, j).re).collect()
    }

    pub fn check_containment(&self) -> Result<()> {
        check_kernel_containment(self.grid.n_q(), &self.values)
    }

    /// Eigenvalues of the density operator in descending order.
    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_spectrum(&self.grid, &self.values)
    }

    /// Positive-semidefiniteness check; too costly to run on every construction.
    pub fn check_positive(&self) -> Result<()> {
        let spectrum = self.spectrum();
        let largest = spectrum.first().copied().unwrap_or(0.0);
        let smallest = spectrum.last().copied().unwrap_or(0.0);
        if smallest < -POSITIVITY_TOLERANCE * largest {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {smallest:.3e} (largest {largest:.3e})"
            )));
        }
        Ok(())
    }

    pub fn to_operator(&self) -> OperatorKernel {
        OperatorKernel {
            grid: self.grid,
            values: self.values.clone(),
            hermitian: true,
        }
    }
}

/// `ρ(q, q′) = ψ(q)·ψ*(q′)`.
pub fn pure_projector(psi: &SampledWavefunction) -> DensityKernel {
    let values = psi
        .values
        .iter()
        .flat_map(|a| psi.values.iter().map(move |b| a * b.conj()))
        .collect();
    DensityKernel {
        grid: psi.grid,
        values,
    }
}

/// Convex combination `Σ w_i·ρ_i`.
pub fn mix(kernels: &[DensityKernel], weights: &[f64]) -> Result<DensityKernel> {
    if kernels.is_empty() || kernels.len() != weights.len() {
        return Err(Error::InvalidState(format!(
            "{} kernels but {} weights",
            kernels.len(),
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
        return Err(Error::InvalidState(format!("weight {w} is not positive")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(Error::InvalidState(format!(
            "weights sum to {total}, expected 1"
        )));
    }
    let grid = kernels[0].grid;
    if kernels.iter().any(|k| k.grid != grid) {
        return Err(Error::GridMismatch);
    }
    let mut values = vec![Complex64::default(); grid.n_q() * grid.n_q()];
    for (kernel, &w) in kernels.iter().zip(weights) {
        for (acc, v) in values.iter_mut().zip(&kernel.values) {
            *acc += v * w;
        }
    }
    DensityKernel::from_values(grid, values)
}

/// Equilibrium oscillator density matrix at inverse temperature `beta`
/// (Mehler kernel), renormalized to unit trace on the grid.
pub fn thermal_oscillator_kernel(
    grid: &GridSpec,
    osc: &Oscillator,
    beta: f64,
) -> Result<DensityKernel> {
    let ratio = beta * grid.hbar() * osc.omega;
    if !(ratio > MIN_THERMAL_RATIO) {
        return Err(Error::InvalidState(format!(
            "beta·hbar·omega = {ratio} must exceed {MIN_THERMAL_RATIO}"
        )));
    }
    let a = osc.stiffness(grid.hbar());
    let coth = 1.0 / ratio.tanh();
    let csch = 1.0 / ratio.sinh();
    let n = grid.n_q();
    let mut values = Vec::with_capacity(n * n);
    for j in 0..n {
        let x = grid.q(j);
        for k in 0..n {
            let y = grid.q(k);
            let exponent = -0.5 * a * ((x * x + y * y) * coth - 2.0 * x * y * csch);
            values.push(Complex64::new(exponent.exp(), 0.0));
        }
    }
    check_kernel_containment(n, &values)?;
    let trace = kernel_trace(grid, &values).re;
    values.iter_mut().for_each(|v| *v /= trace);
    Ok(DensityKernel {
        grid: *grid,
        values,
    })
}

/// General operator kernel `⟨q_j|Â|q_k⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorKernel {
    grid: GridSpec,
    values: Vec<Complex64>,
    hermitian: bool,
}

impl OperatorKernel {
    /// Hermiticity is verified when `hermitian` is set.
    pub fn new(grid: GridSpec, values: Vec<Complex64>, hermitian: bool) -> Result<Self> {
        check_square(&grid, &values)?;
        if hermitian {
            check_hermitian(grid.n_q(), &values)?;
        }
        Ok(Self {
            grid,
            values,
            hermitian,
        })
    }

    pub fn from_fn(
        grid: GridSpec,
        hermitian: bool,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let n = grid.n_q();
        let values = (0..n * n)
            .map(|i| f(grid.q(i / n), grid.q(i % n)))
            .collect();
        Self::new(grid, values, hermitian)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.values[j * self.grid.n_q() + k]
    }

    /// `Σ_j A(j, j)·dq`.
    pub fn trace(&self) -> Complex64 {
        kernel_trace(&self.grid, &self.values)
    }

    /// Matrix-side `Tr(ÂB̂) = Σ_jk A(j, k)·B(k, j)·dq²`.
    pub fn trace_product(&self, other: &OperatorKernel) -> Result<Complex64> {
        trace_of_product(&self.grid, &self.values, &other.grid, &other.values)
    }

    /// Matrix-side `Tr(ρ̂Â)`.
    pub fn expectation_in(&self, rho: &DensityKernel) -> Result<Complex64> {
        trace_of_product(&rho.grid, &rho.values, &self.grid, &self.values)
    }
}

/// Position-space kernel of the projector onto the momentum band
/// `|p| < π·ħ/(2·dq)` resolved by the phase-space grid:
/// `sin(π·(q − q′)/(2·dq)) / (π·(q − q′))`.
///
/// On grid points it is `1/(2·dq)` on the diagonal, zero at even
/// separations and `±1/(π·l·dq)` at odd separations `l`.
fn band_projector(grid: &GridSpec, j: usize, k: usize) -> f64 {
    let l = j as i64 - k as i64;
    if l == 0 {
        1.0 / (2.0 * grid.dq())
    } else if l % 2 == 0 {
        0.0
    } else {
        let sign = if (l.rem_euclid(4)) == 1 { 1.0 } else { -1.0 };
        sign / (PI * l as f64 * grid.dq())
    }
}

/// Multiplication by `f(q)`, band-limited to the momentum range of the
/// phase-space grid: `K(q, q′) = ½·(f(q) + f(q′))·P(q − q′)` with `P` the band
/// projector. Its Weyl symbol on the grid is exactly `f(q_j)`.
///
/// For band-limited states this acts as plain multiplication, so
/// `Tr(ρ̂·f(q̂)) = Σ f(q_j)·ρ(j, j)·dq`. The trace of the kernel itself is
/// `½·Σ f(q_j)`: only half of the grid's `n_q` states fit inside the band.
pub fn multiplication_operator(grid: &GridSpec, f: impl Fn(f64) -> f64) -> OperatorKernel {
    let n = grid.n_q();
    let fq: Vec<f64> = (0..n).map(|j| f(grid.q(j))).collect();
    let values = (0..n * n)
        .map(|i| {
            let (j, k) = (i / n, i % n);
            Complex64::new(0.5 * (fq[j] + fq[k]) * band_projector(grid, j, k), 0.0)
        })
        .collect();
    OperatorKernel {
        grid: *grid,
        values,
        hermitian: true,
    }
}

/// Identity on the band of momenta resolved by the phase-space grid.
pub fn identity_operator(grid: &GridSpec) -> OperatorKernel {
    multiplication_operator(grid, |_| 1.0)
}

/// Position operator `q̂` on the resolved momentum band.
pub fn position_operator(grid: &GridSpec) -> OperatorKernel {
    multiplication_operator(grid, |q| q)
}

fn check_square(grid: &GridSpec, values: &[Complex64]) -> Result<()> {
    let n = grid.n_q();
    if values.len() != n * n {
        return Err(Error::InvalidState(format!(
            "kernel has {} entries, grid needs {}",
            values.len(),
            n * n
        )));
    }
    Ok(())
}

pub(crate) fn hermitian_residual(n: usize, values: &[Complex64]) -> f64 {
    let mut residual: f64 = 0.0;
    for j in 0..n {
        for k in j..n {
            residual = residual.max((values[j * n + k] - values[k * n + j].conj()).norm());
        }
    }
    residual
}

fn check_hermitian(n: usize, values: &[Complex64]) -> Result<()> {
    let residual = hermitian_residual(n, values);
    let limit = HERMITIAN_TOLERANCE * max_norm(values);
    if residual > limit {
        return Err(Error::NotHermitian { residual, limit });
    }
    Ok(())
}

/// Density-matrix containment: the diagonal (position density) at the two
/// outermost samples on each side. For a positive kernel this also bounds the
/// boundary rows, since `|ρ(j, k)|² ≤ ρ(j, j)·ρ(k, k)`.
pub(crate) fn check_kernel_containment(n: usize, values: &[Complex64]) -> Result<()> {
    let diag = |j: usize| values[j * n + j].norm();
    let boundary = [0, 1, n - 2, n - 1]
        .iter()
        .map(|&j| diag(j))
        .fold(0.0, f64::max);
    let limit = CONTAINMENT_TOLERANCE * (0..n).map(diag).fold(0.0, f64::max);
    if boundary > limit {
        return Err(Error::Containment { boundary, limit });
    }
    Ok(())
}

fn kernel_trace(grid: &GridSpec, values: &[Complex64]) -> Complex64 {
    let n = grid.n_q();
    (0..n).map(|j| values[j * n + j]).sum::<Complex64>() * grid.dq()
}

fn trace_of_product(
    grid_a: &GridSpec,
    a: &[Complex64],
    grid_b: &GridSpec,
    b: &[Complex64],
) -> Result<Complex64> {
    if grid_a != grid_b {
        return Err(Error::GridMismatch);
    }
    let n = grid_a.n_q();
    let mut sum = Complex64::default();
    for j in 0..n {
        for k in 0..n {
            sum += a[j * n + k] * b[k * n + j];
        }
    }
    Ok(sum * grid_a.dq() * grid_a.dq())
}

fn hermitian_spectrum(grid: &GridSpec, values: &[Complex64]) -> Vec<f64> {
    let n = grid.n_q();
    let dq = grid.dq();
    // Hermitian part only; any anti-Hermitian residue is below tolerance.
    let matrix = DMatrix::from_fn(n, n, |j, k| {
        (values[j * n + k] + values[k * n + j].conj()) * (0.5 * dq)
    });
    let mut eigenvalues: Vec<f64> = matrix.symmetric_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    eigenvalues
}
