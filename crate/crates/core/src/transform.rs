//! Wigner functions and Weyl symbols through one half-shift kernel transform.
//!
//! For every position sample `q_j` the correlation sequence
//!
//! ```text
//! C_j(m) = K(q_j − m·dq, q_j + m·dq),   m ∈ [−n_q, n_q)
//! ```
//!
//! is read straight off the kernel (zero outside the grid) and summed against
//! `e^{2i·p_k·m·dq/ħ}`. With `p_k = (k − n_q)·dp` and `dp = π·ħ/(n_p·dq)` that
//! phase is `(−1)^m·e^{2πi·k·m/n_p}`, so each row is one unnormalized inverse
//! DFT of length `n_p = 2·n_q`:
//!
//! ```text
//! W(q_j, p_k) = dq/(π·ħ) · Σ_m (−1)^m·C_j(m)·e^{2πi·k·m/n_p}
//! ```
//!
//! The Weyl symbol of an operator is the same transform scaled by `2π·ħ`.
//! Rows are independent and computed in parallel; each row's arithmetic is
//! fixed, so results do not depend on scheduling.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{FieldKind, PhaseSpaceField};
use crate::grid::GridSpec;
use crate::state::{
    check_kernel_containment, hermitian_residual, DensityKernel, OperatorKernel,
    SampledWavefunction, HERMITIAN_TOLERANCE,
};

/// Sign of the exponent in the row transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// `e^{+2ipy/ħ}`, the correct kernel.
    #[default]
    Standard,
    /// Flipped exponent. Exists only to verify that the identity checks
    /// notice a broken transform.
    Reversed,
}

/// Configurable evaluator for the phase-space transforms.
#[derive(Debug, Clone, Default)]
pub struct WignerTransform {
    threads: Option<usize>,
    phase: PhaseConvention,
    skip_containment: bool,
}

impl WignerTransform {
    pub fn new() -> Self {
        Self::default()
    }

    /// Caps the number of worker threads used for rows.
    pub fn threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads.filter(|&n| n > 0);
        self
    }

    pub fn phase(mut self, phase: PhaseConvention) -> Self {
        self.phase = phase;
        self
    }

    /// Disables the containment precondition. The transform still
    /// zero-extends, so mass outside the box is simply lost.
    pub fn skip_containment(mut self, skip: bool) -> Self {
        self.skip_containment = skip;
        self
    }

    /// Wigner function of a pure state.
    pub fn wigner_of_wavefunction(&self, psi: &SampledWavefunction) -> Result<PhaseSpaceField> {
        if !self.skip_containment {
            psi.check_containment()?;
        }
        let grid = *psi.grid();
        let values = psi.values();
        let rows = self.rows(
            &grid,
            |a, b| values[a] * values[b].conj(),
            wigner_prefactor(&grid),
        )?;
        PhaseSpaceField::from_values(grid, FieldKind::Wigner, rows)
    }

    /// Wigner function of a density kernel.
    pub fn wigner_of_kernel(&self, rho: &DensityKernel) -> Result<PhaseSpaceField> {
        let grid = *rho.grid();
        let n = grid.n_q();
        let values = rho.values();
        let residual = hermitian_residual(n, values);
        let limit = HERMITIAN_TOLERANCE * values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if residual > limit {
            return Err(Error::NotHermitian { residual, limit });
        }
        if !self.skip_containment {
            check_kernel_containment(n, values)?;
        }
        let rows = self.rows(&grid, |a, b| values[a * n + b], wigner_prefactor(&grid))?;
        PhaseSpaceField::from_values(grid, FieldKind::Wigner, rows)
    }

    /// Weyl symbol `A(q, p) = ∫dz e^{ipz/ħ}⟨q − z/2|Â|q + z/2⟩`, evaluated as
    /// `2π·ħ` times the Wigner transform of the kernel.
    pub fn weyl_symbol(&self, a: &OperatorKernel) -> Result<PhaseSpaceField> {
        let grid = *a.grid();
        let n = grid.n_q();
        let values = a.values();
        let rows = self.rows(&grid, |x, y| values[x * n + y], wigner_prefactor(&grid))?;
        let scale = 2.0 * PI * grid.hbar();
        let rows = rows.into_iter().map(|v| v * scale).collect();
        PhaseSpaceField::from_values(grid, FieldKind::WeylSymbol, rows)
    }

    fn rows<F>(&self, grid: &GridSpec, sample: F, prefactor: f64) -> Result<Vec<Complex64>>
    where
        F: Fn(usize, usize) -> Complex64 + Sync,
    {
        let n_q = grid.n_q();
        let n_p = grid.n_p();
        let mut planner = FftPlanner::new();
        let fft: Arc<dyn Fft<f64>> = match self.phase {
            PhaseConvention::Standard => planner.plan_fft_inverse(n_p),
            PhaseConvention::Reversed => planner.plan_fft_forward(n_p),
        };
        let mut out = vec![Complex64::default(); n_q * n_p];
        let run = |out: &mut Vec<Complex64>| {
            out.par_chunks_mut(n_p).enumerate().for_each_init(
                || vec![Complex64::default(); fft.get_inplace_scratch_len()],
                |scratch, (j, row)| {
                    fill_correlation_row(n_q, j, &sample, row);
                    fft.process_with_scratch(row, scratch);
                    row.iter_mut().for_each(|v| *v *= prefactor);
                },
            )
        };
        match self.threads {
            Some(threads) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| Error::InvalidState(format!("thread pool: {e}")))?;
                pool.install(|| run(&mut out));
            }
            None => run(&mut out),
        }
        Ok(out)
    }
}

fn wigner_prefactor(grid: &GridSpec) -> f64 {
    grid.dq() / (PI * grid.hbar())
}

/// Writes `(−1)^m·C_j(m)` at index `m mod n_p`; lags that leave the grid are
/// zero.
fn fill_correlation_row<F>(n_q: usize, j: usize, sample: &F, row: &mut [Complex64])
where
    F: Fn(usize, usize) -> Complex64,
{
    let n_p = row.len();
    row.fill(Complex64::default());
    let reach = j.min(n_q - 1 - j);
    for m in 0..=reach {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        row[m] = sample(j - m, j + m) * sign;
        if m > 0 {
            row[n_p - m] = sample(j + m, j - m) * sign;
        }
    }
}

pub fn wigner_of_wavefunction(psi: &SampledWavefunction) -> Result<PhaseSpaceField> {
    WignerTransform::new().wigner_of_wavefunction(psi)
}

pub fn wigner_of_kernel(rho: &DensityKernel) -> Result<PhaseSpaceField> {
    WignerTransform::new().wigner_of_kernel(rho)
}

pub fn weyl_symbol(a: &OperatorKernel) -> Result<PhaseSpaceField> {
    WignerTransform::new().weyl_symbol(a)
}

/// Direct `O(n_q²·n_p)` evaluation of the same discretized sums, without an
/// FFT. Slow; meant for cross-checking the fast path on small grids.
pub mod reference {
    use super::*;

    fn direct_rows<F>(grid: &GridSpec, sample: F, prefactor: f64) -> Vec<Complex64>
    where
        F: Fn(usize, usize) -> Complex64,
    {
        let n_q = grid.n_q();
        let n_p = grid.n_p() as i64;
        let mut out = Vec::with_capacity(n_q * grid.n_p());
        for j in 0..n_q {
            let reach = j.min(n_q - 1 - j) as i64;
            for k in 0..n_p {
                let shift = k - n_q as i64;
                let mut acc = Complex64::default();
                for m in -reach..=reach {
                    let a = (j as i64 - m) as usize;
                    let b = (j as i64 + m) as usize;
                    // 2·p_k·m·dq/ħ = 2π·(k − n_q)·m/n_p, reduced exactly.
                    let turns = (shift * m).rem_euclid(n_p);
                    let angle = 2.0 * PI * turns as f64 / n_p as f64;
                    acc += sample(a, b) * Complex64::from_polar(1.0, angle);
                }
                out.push(acc * prefactor);
            }
        }
        out
    }

    pub fn wigner_of_wavefunction(psi: &SampledWavefunction) -> Result<PhaseSpaceField> {
        let grid = *psi.grid();
        let v = psi.values();
        let rows = direct_rows(&grid, |a, b| v[a] * v[b].conj(), wigner_prefactor(&grid));
        PhaseSpaceField::from_values(grid, FieldKind::Wigner, rows)
    }

    pub fn wigner_of_kernel(rho: &DensityKernel) -> Result<PhaseSpaceField> {
        let grid = *rho.grid();
        let n = grid.n_q();
        let v = rho.values();
        let rows = direct_rows(&grid, |a, b| v[a * n + b], wigner_prefactor(&grid));
        PhaseSpaceField::from_values(grid, FieldKind::Wigner, rows)
    }

    pub fn weyl_symbol(a: &OperatorKernel) -> Result<PhaseSpaceField> {
        let grid = *a.grid();
        let n = grid.n_q();
        let v = a.values();
        let scale = 2.0 * PI * grid.hbar();
        let rows = direct_rows(&grid, |x, y| v[x * n + y], wigner_prefactor(&grid) * scale);
        PhaseSpaceField::from_values(grid, FieldKind::WeylSymbol, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{
        cat_state, coherent_state, identity_operator, mix, oscillator_eigenstate,
        position_operator, pure_projector, thermal_oscillator_kernel, Oscillator,
    };

    const INV_PI: f64 = 1.0 / PI;

    fn desk() -> GridSpec {
        GridSpec::new(256, -8.0, 8.0, 1.0).unwrap()
    }

    fn osc() -> Oscillator {
        Oscillator::unit()
    }

    fn fock(g: &GridSpec, n: usize) -> SampledWavefunction {
        oscillator_eigenstate(g, n, &osc()).unwrap()
    }

    fn riemann(w: &PhaseSpaceField) -> f64 {
        w.values().iter().map(|v| v.re).sum::<f64>() * w.grid().cell_area()
    }

    // Sign and centring first: these three pin the FFT convention.
    #[test]
    fn ground_state_origin_value() {
        let g = desk();
        let w = wigner_of_wavefunction(&fock(&g, 0)).unwrap();
        assert!((w.re(128, 256) - INV_PI).abs() <= 1e-6);
    }

    #[test]
    fn first_excited_origin_value() {
        let g = desk();
        let w = wigner_of_wavefunction(&fock(&g, 1)).unwrap();
        assert!((w.re(128, 256) + INV_PI).abs() <= 1e-6);
    }

    #[test]
    fn normalization_of_pure_states() {
        let g = desk();
        for psi in [
            fock(&g, 0),
            fock(&g, 3),
            coherent_state(&g, 2.0, 3.0, &osc()).unwrap(),
        ] {
            let w = wigner_of_wavefunction(&psi).unwrap();
            assert!((riemann(&w) - 1.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn momentum_kick_moves_the_peak_to_positive_p() {
        let g = desk();
        let w = wigner_of_wavefunction(&coherent_state(&g, 0.0, 3.0, &osc()).unwrap()).unwrap();
        let row = w.row(128);
        let (k, _) = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.re.total_cmp(&b.1.re))
            .unwrap();
        assert!((g.p(k) - 3.0).abs() < g.dp());
    }

    #[test]
    fn kernel_path_matches_wavefunction_path() {
        let g = desk();
        for psi in [
            fock(&g, 0),
            fock(&g, 2),
            cat_state(&g, 3.0, 1.0, 0.5, &osc()).unwrap(),
        ] {
            let a = wigner_of_wavefunction(&psi).unwrap();
            let b = wigner_of_kernel(&pure_projector(&psi)).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn equal_mixture_vanishes_at_origin() {
        let g = desk();
        let rho = mix(
            &[pure_projector(&fock(&g, 0)), pure_projector(&fock(&g, 1))],
            &[0.5, 0.5],
        )
        .unwrap();
        let w = wigner_of_kernel(&rho).unwrap();
        assert!(w.re(128, 256).abs() <= 1e-6);
    }

    #[test]
    fn thermal_wigner_is_nonnegative_gaussian() {
        let g = desk();
        let w = wigner_of_kernel(&thermal_oscillator_kernel(&g, &osc(), 1.0).unwrap()).unwrap();
        assert!(w.min_re() >= -1e-8);
        // Mehler-kernel oracle: W = tanh(½)/π · exp(−tanh(½)·(q² + p²)).
        let t = 0.5f64.tanh();
        for &(j, k) in &[(128, 256), (150, 256), (128, 270), (100, 230)] {
            let (q, p) = (g.q(j), g.p(k));
            let expected = t / PI * (-t * (q * q + p * p)).exp();
            assert!((w.re(j, k) - expected).abs() < 1e-8, "{j},{k}");
        }
    }

    #[test]
    fn symbols_of_multiplication_operators() {
        let g = GridSpec::new(64, -8.0, 8.0, 1.0).unwrap();
        let id = weyl_symbol(&identity_operator(&g)).unwrap();
        let pos = weyl_symbol(&position_operator(&g)).unwrap();
        for j in 0..g.n_q() {
            for k in 0..g.n_p() {
                assert!((id.get(j, k) - 1.0).norm() <= 1e-8);
                assert!((pos.get(j, k) - g.q(j)).norm() <= 1e-8);
            }
        }
    }

    #[test]
    fn symbol_integrates_to_scaled_trace() {
        let g = GridSpec::new(64, -8.0, 8.0, 1.0).unwrap();
        for op in [identity_operator(&g), position_operator(&g)] {
            let s = weyl_symbol(&op).unwrap();
            let total: f64 = s.values().iter().map(|v| v.re).sum::<f64>() * g.cell_area();
            let expected = 2.0 * PI * g.hbar() * op.trace().re;
            assert!((total - expected).abs() <= 1e-6 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn projector_symbol_is_scaled_wigner_function() {
        let g = desk();
        for psi in [
            fock(&g, 0),
            fock(&g, 1),
            coherent_state(&g, 1.0, -2.0, &osc()).unwrap(),
        ] {
            let w = wigner_of_wavefunction(&psi).unwrap();
            let a = weyl_symbol(&pure_projector(&psi).to_operator()).unwrap();
            assert_eq!(a.kind(), FieldKind::WeylSymbol);
            let scaled = w.scaled(2.0 * PI * g.hbar(), FieldKind::WeylSymbol);
            assert!(a.max_abs_diff(&scaled).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn fft_matches_reference_on_small_grid() {
        let g = GridSpec::new(32, -8.0, 8.0, 1.0).unwrap();
        let psi = coherent_state(&g, 1.0, 1.5, &osc()).unwrap();
        let fast = wigner_of_wavefunction(&psi).unwrap();
        let slow = reference::wigner_of_wavefunction(&psi).unwrap();
        assert!(fast.max_abs_diff(&slow).unwrap() <= 1e-10);
        let op = position_operator(&g);
        let fast = weyl_symbol(&op).unwrap();
        let slow = reference::weyl_symbol(&op).unwrap();
        assert!(fast.max_abs_diff(&slow).unwrap() <= 1e-10);
    }

    #[test]
    fn reversed_phase_mirrors_momentum() {
        let g = GridSpec::new(64, -8.0, 8.0, 1.0).unwrap();
        let psi = coherent_state(&g, 0.0, 2.0, &osc()).unwrap();
        let good = wigner_of_wavefunction(&psi).unwrap();
        let bad = WignerTransform::new()
            .phase(PhaseConvention::Reversed)
            .wigner_of_wavefunction(&psi)
            .unwrap();
        let k = 90;
        let mk = g.mirror_p_index(k).unwrap();
        assert!((good.re(32, k) - bad.re(32, mk)).abs() < 1e-12);
        assert!(good.max_abs_diff(&bad).unwrap() > 0.1);
    }

    #[test]
    fn rejects_uncontained_and_non_hermitian_input() {
        let g = GridSpec::new(16, -1.0, 1.0, 1.0).unwrap();
        let wide = vec![Complex64::new(1.0 / 2.0f64.sqrt(), 0.0); 16];
        let psi = SampledWavefunction::from_samples_unchecked(g, wide).unwrap();
        assert!(matches!(
            wigner_of_wavefunction(&psi),
            Err(Error::Containment { .. })
        ));
        assert!(WignerTransform::new()
            .skip_containment(true)
            .wigner_of_wavefunction(&psi)
            .is_ok());
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let g = desk();
        let psi = cat_state(&g, 3.0, 0.0, 0.0, &osc()).unwrap();
        let serial = WignerTransform::new()
            .threads(Some(1))
            .wigner_of_wavefunction(&psi)
            .unwrap();
        let parallel = WignerTransform::new()
            .threads(Some(4))
            .wigner_of_wavefunction(&psi)
            .unwrap();
        let default = wigner_of_wavefunction(&psi).unwrap();
        assert_eq!(serial, parallel);
        assert_eq!(serial, default);
    }

    #[test]
    fn linearity_in_the_kernel() {
        let g = GridSpec::new(64, -8.0, 8.0, 1.0).unwrap();
        let r1 = pure_projector(&fock(&g, 0));
        let r2 = thermal_oscillator_kernel(&g, &osc(), 0.7).unwrap();
        let w1 = wigner_of_kernel(&r1).unwrap();
        let w2 = wigner_of_kernel(&r2).unwrap();
        for alpha in [0.0, 0.25, 0.5, 1.0] {
            let rho = if alpha == 0.0 {
                r2.clone()
            } else if alpha == 1.0 {
                r1.clone()
            } else {
                mix(&[r1.clone(), r2.clone()], &[alpha, 1.0 - alpha]).unwrap()
            };
            let w = wigner_of_kernel(&rho).unwrap();
            let combined = w1.combine(alpha, &w2, 1.0 - alpha).unwrap();
            assert!(w.max_abs_diff(&combined).unwrap() <= 1e-12 * w.max_abs());
        }
    }

    #[test]
    fn parity_covariance_for_even_states() {
        let desk = desk();
        // The unpaired sample at q_min breaks mirror symmetry at the level of
        // the edge amplitude, so the cat gets a wider box.
        let wide = GridSpec::new(320, -10.0, 10.0, 1.0).unwrap();
        for psi in [
            fock(&desk, 2),
            cat_state(&wide, 3.0, 0.0, 0.0, &osc()).unwrap(),
        ] {
            let g = *psi.grid();
            let w = wigner_of_wavefunction(&psi).unwrap();
            for j in 1..g.n_q() {
                let mj = g.mirror_q_index(j).unwrap();
                for k in 1..g.n_p() {
                    let mk = g.mirror_p_index(k).unwrap();
                    let d = (w.re(j, k) - w.re(mj, mk)).abs();
                    assert!(d <= 1e-8, "{j} {k} {d:e}");
                }
            }
        }
    }
}
