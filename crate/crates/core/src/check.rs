//! Self-test of the phase-space identities on a small grid.
//!
//! Each check compares a phase-space computation with an independent route:
//! kernel diagonals, matrix traces, direct (non-FFT) sums or closed forms.
//! Everything is expressed in oscillator units (`m = ω = 1`, lengths in
//! `√ħ`), so the same suite is meaningful for any ħ.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::expectations::{
    expectation, negativity_volume, normalization, overlap_probability, p_marginal, purity,
    q_marginal, trace_product,
};
use crate::field::{FieldKind, PhaseSpaceField};
use crate::grid::GridSpec;
use crate::state::{
    cat_state, coherent_state, identity_operator, mix, oscillator_eigenstate, position_operator,
    pure_projector, thermal_oscillator_kernel, DensityKernel, OperatorKernel, Oscillator,
    SampledWavefunction,
};
use crate::transform::{reference, PhaseConvention, WignerTransform};

pub const DEFAULT_POSITION_SAMPLES: usize = 64;
/// Half-width of the default box in oscillator lengths.
pub const DEFAULT_HALF_WIDTH: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CheckSuite {
    grid: GridSpec,
    transform: WignerTransform,
}

impl CheckSuite {
    /// Default box: 64 samples over `±8·√ħ`.
    pub fn with_hbar(hbar: f64) -> Result<Self> {
        let half = DEFAULT_HALF_WIDTH * hbar.sqrt();
        Ok(Self::new(GridSpec::new(
            DEFAULT_POSITION_SAMPLES,
            -half,
            half,
            hbar,
        )?))
    }

    pub fn new(grid: GridSpec) -> Self {
        Self {
            grid,
            transform: WignerTransform::new(),
        }
    }

    pub fn transform(mut self, transform: WignerTransform) -> Self {
        self.transform = transform;
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn run(&self) -> Result<Vec<CheckOutcome>> {
        let mut report = Report::default();
        let g = self.grid;
        let hbar = g.hbar();
        let len = hbar.sqrt();
        let osc = Oscillator::unit();
        let t = &self.transform;

        let pure: Vec<(&str, SampledWavefunction)> = vec![
            ("ground", oscillator_eigenstate(&g, 0, &osc)?),
            ("fock1", oscillator_eigenstate(&g, 1, &osc)?),
            ("fock3", oscillator_eigenstate(&g, 3, &osc)?),
            ("coherent", coherent_state(&g, 1.5 * len, 1.0 * len, &osc)?),
            ("cat", cat_state(&g, 3.0 * len, 0.0, 0.0, &osc)?),
        ];
        let thermal = thermal_oscillator_kernel(&g, &osc, 1.0 / hbar)?;
        let half_mix = mix(
            &[pure_projector(&pure[0].1), pure_projector(&pure[1].1)],
            &[0.5, 0.5],
        )?;
        let mut states: Vec<(&str, DensityKernel)> = pure
            .iter()
            .map(|(n, psi)| (*n, pure_projector(psi)))
            .collect();
        states.push(("thermal", thermal.clone()));
        states.push(("mix", half_mix.clone()));

        let mut wigner = Vec::new();
        for (name, rho) in &states {
            wigner.push((*name, t.wigner_of_kernel(rho)?));
        }
        let field = |name: &str| &wigner.iter().find(|(n, _)| *n == name).unwrap().1;

        for ((name, rho), (_, w)) in states.iter().zip(&wigner) {
            let norm = normalization(w)?;
            report.within(format!("normalization.{name}"), norm, 1.0, 1e-6);
            report.bound(
                format!("realness.{name}"),
                w.max_imag(),
                1e-10 * w.max_abs(),
            );
            let marginal = q_marginal(w)?;
            let err = marginal
                .values
                .iter()
                .zip(rho.diagonal())
                .map(|(m, d)| (m - d).abs())
                .fold(0.0, f64::max);
            report.bound(format!("q_marginal.{name}"), err, 1e-6);
            let peak = w.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
            report.bound(
                format!("pure_state_bound.{name}"),
                peak,
                (1.0 + 1e-6) / (PI * hbar),
            );
        }

        // Momentum marginal against a direct Fourier transform of ψ.
        let (_, coh) = &pure[3];
        let pm = p_marginal(field("coherent"))?;
        let err = (0..g.n_p())
            .map(|k| (pm.values[k] - momentum_density(coh, g.p(k))).abs())
            .fold(0.0, f64::max);
        report.bound("p_marginal.coherent".into(), err, 1e-4);

        // Fast path against direct sums.
        for (name, psi) in pure
            .iter()
            .filter(|(n, _)| ["ground", "fock1", "coherent", "cat"].contains(n))
        {
            let fast = t.wigner_of_wavefunction(psi)?;
            let slow = reference::wigner_of_wavefunction(psi)?;
            report.bound(
                format!("fft_vs_direct.{name}"),
                fast.max_abs_diff(&slow)?,
                1e-10,
            );
        }
        let operators = [
            ("identity", identity_operator(&g)),
            ("position", position_operator(&g)),
        ];
        for (name, op) in &operators {
            let fast = t.weyl_symbol(op)?;
            let slow = reference::weyl_symbol(op)?;
            report.bound(
                format!("fft_vs_direct.{name}"),
                fast.max_abs_diff(&slow)?,
                1e-10,
            );
        }

        // Weyl symbol of a projector is 2πħ times its Wigner function.
        for (name, psi) in &pure {
            let w = t.wigner_of_wavefunction(psi)?;
            let symbol = t.weyl_symbol(&pure_projector(psi).to_operator())?;
            let scaled = w.scaled(2.0 * PI * hbar, FieldKind::WeylSymbol);
            report.bound(
                format!("correspondence.{name}"),
                symbol.max_abs_diff(&scaled)?,
                1e-10,
            );
        }

        // Trace-product identity on smooth Hermitian kernels.
        let a = smooth_kernel(&g, &KERNEL_A)?;
        let b = smooth_kernel(&g, &KERNEL_B)?;
        let phase_space = trace_product(&t.weyl_symbol(&a)?, &t.weyl_symbol(&b)?)?;
        let matrix = 2.0 * PI * hbar * a.trace_product(&b)?.re;
        report.relative("trace_product.smooth".into(), phase_space, matrix, 1e-6);

        // Expectation identity against matrix traces.
        for (op_name, op) in &operators {
            let symbol = t.weyl_symbol(op)?;
            for ((name, rho), (_, w)) in states.iter().zip(&wigner) {
                let phase_space = expectation(w, &symbol)?;
                let matrix = op.expectation_in(rho)?.re;
                report.relative(
                    format!("expectation.{op_name}.{name}"),
                    phase_space,
                    matrix,
                    1e-6,
                );
            }
        }
        let energy = PhaseSpaceField::from_fn(g, FieldKind::WeylSymbol, |q, p| q * q + p * p);
        report.within(
            "expectation.q2_plus_p2.ground".into(),
            expectation(field("ground"), &energy)?,
            hbar,
            1e-4 * hbar,
        );

        // Purity.
        for (name, _) in &pure {
            report.within(format!("purity.{name}"), purity(field(name))?, 1.0, 1e-5);
        }
        report.within("purity.mix".into(), purity(field("mix"))?, 0.5, 1e-4);
        report.within(
            "purity.thermal".into(),
            purity(field("thermal"))?,
            0.5f64.tanh(),
            1e-3,
        );

        // Negativity.
        for name in ["ground", "coherent", "thermal"] {
            report.bound(
                format!("negativity.{name}"),
                negativity_volume(field(name))?,
                1e-8,
            );
        }
        for name in ["fock1", "cat"] {
            let v = negativity_volume(field(name))?;
            report.push(
                format!("negativity.{name}"),
                v > 1e-2,
                format!("{v:.6e} > 1e-2"),
            );
        }

        // Overlap of coherent states one oscillator length apart.
        let displaced = t.wigner_of_wavefunction(&coherent_state(&g, len, 0.0, &osc)?)?;
        let forward = overlap_probability(field("ground"), &displaced)?;
        let backward = overlap_probability(&displaced, field("ground"))?;
        report.within("overlap.coherent".into(), forward, (-0.5f64).exp(), 1e-5);
        report.bound("overlap.symmetry".into(), (forward - backward).abs(), 1e-12);

        Ok(report.outcomes)
    }
}

/// `|ψ̃(p)|²` with `ψ̃(p) = (2πħ)^{−1/2}·Σ_j ψ_j·e^{−i·p·q_j/ħ}·dq`.
pub fn momentum_density(psi: &SampledWavefunction, p: f64) -> f64 {
    let g = psi.grid();
    let amp: Complex64 = psi
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| v * Complex64::from_polar(1.0, -p * g.q(j) / g.hbar()))
        .sum();
    (amp * g.dq()).norm_sqr() / (2.0 * PI * g.hbar())
}

/// Gaussian wave packet `(centre, width, kick)` in oscillator units.
type Packet = (f64, f64, f64);

/// Terms `c·|f⟩⟨g| + c*·|g⟩⟨f|`.
const KERNEL_A: [(Complex64, Packet, Packet); 2] = [
    (Complex64::new(0.8, 0.3), (0.2, 1.1, 0.2), (-0.4, 0.9, -0.1)),
    (Complex64::new(-0.5, 0.6), (0.0, 1.0, 0.0), (0.3, 1.2, 0.25)),
];
const KERNEL_B: [(Complex64, Packet, Packet); 2] = [
    (
        Complex64::new(1.1, -0.2),
        (-0.3, 1.0, 0.1),
        (0.4, 1.15, 0.0),
    ),
    (
        Complex64::new(0.2, 0.9),
        (0.1, 0.95, -0.2),
        (-0.2, 1.05, 0.15),
    ),
];

fn smooth_kernel(grid: &GridSpec, terms: &[(Complex64, Packet, Packet)]) -> Result<OperatorKernel> {
    let len = grid.hbar().sqrt();
    let packet = |&(centre, width, kick): &Packet, q: f64| {
        let x = (q - centre * len) / (width * len);
        Complex64::from_polar((-0.5 * x * x).exp(), kick * q / len)
    };
    OperatorKernel::from_fn(*grid, true, |x, y| {
        terms
            .iter()
            .map(|(c, f, g)| {
                c * packet(f, x) * packet(g, y).conj()
                    + c.conj() * packet(g, x) * packet(f, y).conj()
            })
            .sum()
    })
}

#[derive(Default)]
struct Report {
    outcomes: Vec<CheckOutcome>,
}

impl Report {
    fn push(&mut self, name: String, passed: bool, detail: String) {
        self.outcomes.push(CheckOutcome {
            name,
            passed,
            detail,
        });
    }

    fn bound(&mut self, name: String, value: f64, limit: f64) {
        self.push(name, value <= limit, format!("{value:.3e} <= {limit:.3e}"));
    }

    fn within(&mut self, name: String, value: f64, target: f64, tol: f64) {
        let err = (value - target).abs();
        self.push(
            name,
            err <= tol,
            format!("{value:.12} vs {target:.12} (|err| {err:.3e} <= {tol:.1e})"),
        );
    }

    /// Relative tolerance, falling back to 1e-8 absolute when the target is 0.
    fn relative(&mut self, name: String, value: f64, target: f64, rel: f64) {
        let tol = if target.abs() < 1e-8 {
            1e-8
        } else {
            rel * target.abs()
        };
        self.within(name, value, target, tol);
    }
}

/// Convenience for the `--break-phase` hook.
pub fn reversed(suite: CheckSuite) -> CheckSuite {
    suite.transform(WignerTransform::new().phase(PhaseConvention::Reversed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let outcomes = CheckSuite::with_hbar(1.0).unwrap().run().unwrap();
        let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert!(outcomes.len() > 50);
    }

    #[test]
    fn identities_hold_for_other_hbar() {
        for hbar in [0.5, 2.0] {
            let outcomes = CheckSuite::with_hbar(hbar).unwrap().run().unwrap();
            let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed).collect();
            assert!(failed.is_empty(), "hbar {hbar}: {failed:#?}");
        }
    }

    #[test]
    fn broken_phase_is_caught() {
        let outcomes = reversed(CheckSuite::with_hbar(1.0).unwrap()).run().unwrap();
        let failed: Vec<&str> = outcomes
            .iter()
            .filter(|o| !o.passed)
            .map(|o| o.name.as_str())
            .collect();
        assert!(failed.contains(&"p_marginal.coherent"), "{failed:?}");
        assert!(failed.iter().any(|n| n.starts_with("fft_vs_direct")));
    }
}
