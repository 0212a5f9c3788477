//! Phase-space functionals of Wigner functions and Weyl symbols.
//!
//! Everything here is a plain Riemann sum over the grid in row-major order,
//! so results are reproducible bit for bit.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{FieldKind, PhaseSpaceField};

/// A marginal density together with the axis it lives on.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal {
    pub axis: Vec<f64>,
    pub values: Vec<f64>,
    pub spacing: f64,
}

impl Marginal {
    /// `Σ values·spacing`.
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing
    }
}

/// Position density `Σ_k W(q_j, p_k)·dp`.
pub fn q_marginal(w: &PhaseSpaceField) -> Result<Marginal> {
    w.require_kind(FieldKind::Wigner)?;
    let grid = w.grid();
    let values = (0..grid.n_q())
        .map(|j| w.row(j).iter().map(|v| v.re).sum::<f64>() * grid.dp())
        .collect();
    Ok(Marginal {
        axis: grid.q_axis(),
        values,
        spacing: grid.dq(),
    })
}

/// Momentum density `Σ_j W(q_j, p_k)·dq`.
pub fn p_marginal(w: &PhaseSpaceField) -> Result<Marginal> {
    w.require_kind(FieldKind::Wigner)?;
    let grid = w.grid();
    let mut values = vec![0.0; grid.n_p()];
    for j in 0..grid.n_q() {
        for (acc, v) in values.iter_mut().zip(w.row(j)) {
            *acc += v.re;
        }
    }
    values.iter_mut().for_each(|v| *v *= grid.dq());
    Ok(Marginal {
        axis: grid.p_axis(),
        values,
        spacing: grid.dp(),
    })
}

fn same_grid(a: &PhaseSpaceField, b: &PhaseSpaceField) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

fn product_sum(a: &PhaseSpaceField, b: &PhaseSpaceField) -> f64 {
    let sum: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x * y).re)
        .sum();
    sum * a.grid().cell_area()
}

/// `Σ A·B·dq·dp`, which approximates `2π·ħ·Tr(ÂB̂)`.
pub fn trace_product(a: &PhaseSpaceField, b: &PhaseSpaceField) -> Result<f64> {
    same_grid(a, b)?;
    Ok(product_sum(a, b))
}

/// Phase-space average `Σ A·W·dq·dp = Tr(ρ̂Â)`.
pub fn expectation(w: &PhaseSpaceField, a: &PhaseSpaceField) -> Result<f64> {
    w.require_kind(FieldKind::Wigner)?;
    a.require_kind(FieldKind::WeylSymbol)?;
    same_grid(w, a)?;
    Ok(product_sum(w, a))
}

/// `Tr ρ̂² = 2π·ħ·Σ W²·dq·dp`.
pub fn purity(w: &PhaseSpaceField) -> Result<f64> {
    w.require_kind(FieldKind::Wigner)?;
    Ok(2.0 * PI * w.grid().hbar() * product_sum(w, w))
}

/// `Σ W·dq·dp`; 1 for any state contained in the box.
pub fn normalization(w: &PhaseSpaceField) -> Result<f64> {
    w.require_kind(FieldKind::Wigner)?;
    Ok(w.values().iter().map(|v| v.re).sum::<f64>() * w.grid().cell_area())
}

/// Volume of the negative part, `Σ max(−W, 0)·dq·dp`.
///
/// This is the one-sided volume; the frequently quoted `∫(|W| − W)` is twice
/// this value.
pub fn negativity_volume(w: &PhaseSpaceField) -> Result<f64> {
    w.require_kind(FieldKind::Wigner)?;
    Ok(w.values().iter().map(|v| (-v.re).max(0.0)).sum::<f64>() * w.grid().cell_area())
}

/// `|⟨ψ₁|ψ₂⟩|² = 2π·ħ·Σ W₁·W₂·dq·dp` for pure states; `Tr(ρ̂₁ρ̂₂)` in general.
pub fn overlap_probability(w1: &PhaseSpaceField, w2: &PhaseSpaceField) -> Result<f64> {
    w1.require_kind(FieldKind::Wigner)?;
    w2.require_kind(FieldKind::Wigner)?;
    same_grid(w1, w2)?;
    Ok(2.0 * PI * w1.grid().hbar() * product_sum(w1, w2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::state::{
        cat_state, coherent_state, identity_operator, mix, oscillator_eigenstate,
        position_operator, pure_projector, thermal_oscillator_kernel, Oscillator,
        SampledWavefunction,
    };
    use crate::transform::{
        weyl_symbol, wigner_of_kernel, wigner_of_wavefunction, WignerTransform,
    };
    use num_complex::Complex64;

    fn desk() -> GridSpec {
        GridSpec::new(256, -8.0, 8.0, 1.0).unwrap()
    }

    fn osc() -> Oscillator {
        Oscillator::unit()
    }

    fn fock_w(g: &GridSpec, n: usize) -> PhaseSpaceField {
        wigner_of_wavefunction(&oscillator_eigenstate(g, n, &osc()).unwrap()).unwrap()
    }

    fn fock_rho(g: &GridSpec, n: usize) -> crate::state::DensityKernel {
        pure_projector(&oscillator_eigenstate(g, n, &osc()).unwrap())
    }

    #[test]
    fn ground_state_marginals() {
        let g = desk();
        let w = fock_w(&g, 0);
        let qm = q_marginal(&w).unwrap();
        assert!((qm.values[128] - PI.powf(-0.5)).abs() <= 1e-6);
        assert!((qm.total() - 1.0).abs() <= 1e-6);
        let pm = p_marginal(&w).unwrap();
        assert!((pm.total() - 1.0).abs() <= 1e-6);
        assert!((pm.values[256] - PI.powf(-0.5)).abs() <= 1e-6);
        assert!(qm.values.iter().chain(&pm.values).all(|&v| v >= -1e-8));
    }

    #[test]
    fn odd_state_has_no_density_at_origin() {
        let qm = q_marginal(&fock_w(&desk(), 1)).unwrap();
        assert!(qm.values[128].abs() <= 1e-8);
    }

    #[test]
    fn marginal_matches_kernel_diagonal() {
        let g = desk();
        for rho in [
            fock_rho(&g, 4),
            thermal_oscillator_kernel(&g, &osc(), 1.0).unwrap(),
        ] {
            let qm = q_marginal(&wigner_of_kernel(&rho).unwrap()).unwrap();
            for (m, d) in qm.values.iter().zip(rho.diagonal()) {
                assert!((m - d).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn functionals_reject_wrong_kind() {
        let g = GridSpec::new(8, -4.0, 4.0, 1.0).unwrap();
        let s = PhaseSpaceField::constant(g, FieldKind::WeylSymbol, 1.0);
        assert!(matches!(q_marginal(&s), Err(Error::KindMismatch { .. })));
        assert!(p_marginal(&s).is_err());
        assert!(purity(&s).is_err());
        assert!(normalization(&s).is_err());
        assert!(negativity_volume(&s).is_err());
        assert!(overlap_probability(&s, &s).is_err());
        assert!(expectation(&s, &s).is_err());
        let w = PhaseSpaceField::constant(g, FieldKind::Wigner, 1.0);
        assert!(expectation(&w, &w).is_err());
    }

    #[test]
    fn grid_mismatch_detected() {
        let a =
            PhaseSpaceField::zeros(GridSpec::new(8, -4.0, 4.0, 1.0).unwrap(), FieldKind::Wigner);
        let b = PhaseSpaceField::zeros(
            GridSpec::new(8, -4.0, 4.0, 2.0).unwrap(),
            FieldKind::WeylSymbol,
        );
        assert!(matches!(trace_product(&a, &b), Err(Error::GridMismatch)));
        assert!(matches!(expectation(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn trace_product_of_pure_symbols() {
        let g = desk();
        let psi = coherent_state(&g, 1.0, 1.0, &osc()).unwrap();
        let a = weyl_symbol(&pure_projector(&psi).to_operator()).unwrap();
        let two_pi_hbar = 2.0 * PI * g.hbar();
        assert!((trace_product(&a, &a).unwrap() / two_pi_hbar - 1.0).abs() <= 1e-5);
        let one = PhaseSpaceField::constant(g, FieldKind::WeylSymbol, 1.0);
        assert!((trace_product(&one, &a).unwrap() / two_pi_hbar - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn polynomial_expectations_for_ground_state() {
        let g = desk();
        let w = fock_w(&g, 0);
        let one = PhaseSpaceField::constant(g, FieldKind::WeylSymbol, 1.0);
        assert!((expectation(&w, &one).unwrap() - 1.0).abs() <= 1e-6);
        let q = weyl_symbol(&position_operator(&g)).unwrap();
        assert!(expectation(&w, &q).unwrap().abs() <= 1e-8);
        let h = PhaseSpaceField::from_fn(g, FieldKind::WeylSymbol, |q, p| q * q + p * p);
        assert!((expectation(&w, &h).unwrap() - 1.0).abs() <= 1e-4);
    }

    #[test]
    fn symbol_expectations_agree_with_matrix_traces() {
        let g = desk();
        let states = [
            fock_rho(&g, 0),
            fock_rho(&g, 3),
            pure_projector(&coherent_state(&g, 2.0, 3.0, &osc()).unwrap()),
            thermal_oscillator_kernel(&g, &osc(), 1.0).unwrap(),
        ];
        for op in [identity_operator(&g), position_operator(&g)] {
            let symbol = weyl_symbol(&op).unwrap();
            for rho in &states {
                let phase_space = expectation(&wigner_of_kernel(rho).unwrap(), &symbol).unwrap();
                let matrix = op.expectation_in(rho).unwrap().re;
                assert!((phase_space - matrix).abs() <= 1e-6 * matrix.abs().max(1.0));
            }
        }
    }

    #[test]
    fn purity_ladder() {
        let g = desk();
        assert!((purity(&fock_w(&g, 2)).unwrap() - 1.0).abs() <= 1e-5);
        let half = mix(&[fock_rho(&g, 0), fock_rho(&g, 1)], &[0.5, 0.5]).unwrap();
        assert!((purity(&wigner_of_kernel(&half).unwrap()).unwrap() - 0.5).abs() <= 1e-4);
        let biased = mix(&[fock_rho(&g, 0), fock_rho(&g, 1)], &[0.7, 0.3]).unwrap();
        assert!((purity(&wigner_of_kernel(&biased).unwrap()).unwrap() - 0.58).abs() <= 1e-4);
        // Geometric-series oracle: Σ (1 − x)²·x^{2n}.
        let x = (-1.0f64).exp();
        let oracle: f64 = (0..200).map(|n| (1.0 - x).powi(2) * x.powi(2 * n)).sum();
        assert!((oracle - 0.5f64.tanh()).abs() < 1e-14);
        let thermal =
            wigner_of_kernel(&thermal_oscillator_kernel(&g, &osc(), 1.0).unwrap()).unwrap();
        assert!((purity(&thermal).unwrap() - oracle).abs() <= 1e-3);
    }

    #[test]
    fn normalization_cases() {
        let g = desk();
        assert!((normalization(&fock_w(&g, 5)).unwrap() - 1.0).abs() <= 1e-6);
        assert_eq!(
            normalization(&PhaseSpaceField::zeros(g, FieldKind::Wigner)).unwrap(),
            0.0
        );
        // A wide Gaussian normalized on the whole line but cut by a small box.
        let small = GridSpec::new(64, -2.0, 2.0, 1.0).unwrap();
        let samples = (0..64)
            .map(|j| Complex64::new(PI.powf(-0.25) * (-0.5 * small.q(j).powi(2)).exp(), 0.0))
            .collect();
        let cut = SampledWavefunction::from_samples_unchecked(small, samples).unwrap();
        let w = WignerTransform::new()
            .skip_containment(true)
            .wigner_of_wavefunction(&cut)
            .unwrap();
        assert!(normalization(&w).unwrap() < 1.0);
    }

    #[test]
    fn negativity_of_benchmark_states() {
        let g = desk();
        assert!(negativity_volume(&fock_w(&g, 0)).unwrap() <= 1e-8);
        let n1 = negativity_volume(&fock_w(&g, 1)).unwrap();
        assert!((n1 - (2.0 * (-0.5f64).exp() - 1.0)).abs() <= 1e-4);
        let cat = wigner_of_wavefunction(&cat_state(&g, 3.0, 0.0, 0.0, &osc()).unwrap()).unwrap();
        assert!(negativity_volume(&cat).unwrap() > 0.05);
        let coh = wigner_of_wavefunction(&coherent_state(&g, 2.0, -1.0, &osc()).unwrap()).unwrap();
        assert!(negativity_volume(&coh).unwrap() <= 1e-8);
        let thermal =
            wigner_of_kernel(&thermal_oscillator_kernel(&g, &osc(), 1.0).unwrap()).unwrap();
        assert!(negativity_volume(&thermal).unwrap() <= 1e-8);
    }

    #[test]
    fn overlaps() {
        let g = desk();
        let w0 = fock_w(&g, 0);
        let w1 = fock_w(&g, 1);
        assert!((overlap_probability(&w0, &w0).unwrap() - 1.0).abs() <= 1e-5);
        assert!(overlap_probability(&w0, &w1).unwrap().abs() <= 1e-5);
        let shifted =
            wigner_of_wavefunction(&coherent_state(&g, 1.0, 0.0, &osc()).unwrap()).unwrap();
        let o = overlap_probability(&w0, &shifted).unwrap();
        assert!((o - (-0.5f64).exp()).abs() <= 1e-5);
        assert_eq!(o, overlap_probability(&shifted, &w0).unwrap());
    }
}
