//! Closed-form Lévy–Khintchine quantities on ℝ and U(1), used as
//! independent oracles for the quantum modules: the characteristic exponent
//! ψ(λ) and the coherence multipliers exp(t·ψ(m)) it induces on charge
//! representations.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default chart radius matching a unit-charge U(1) representation.
pub const DEFAULT_CHART_RADIUS: f64 = 0.9 * std::f64::consts::PI;

/// Scalar Lévy–Khintchine data: drift b, diffusion a ≥ 0, and jump atoms
/// (offset, rate). The chart radius fixes the compensator convention
/// x̄(x) = x·1_{|x| < r}, mirroring the representation chart it will be
/// compared against.
#[derive(Debug, Clone)]
pub struct ScalarKit {
    pub b: f64,
    pub a: f64,
    pub jumps: Vec<(f64, f64)>,
    pub chart_radius: f64,
}

impl ScalarKit {
    pub fn new(b: f64, a: f64, jumps: Vec<(f64, f64)>) -> Result<Self> {
        Self::with_chart_radius(b, a, jumps, DEFAULT_CHART_RADIUS)
    }

    pub fn with_chart_radius(
        b: f64,
        a: f64,
        jumps: Vec<(f64, f64)>,
        chart_radius: f64,
    ) -> Result<Self> {
        if a < 0.0 || !a.is_finite() {
            return Err(Error::InvalidInput(format!(
                "diffusion must be non-negative, got {a}"
            )));
        }
        if chart_radius <= 0.0 || chart_radius.is_nan() {
            return Err(Error::InvalidInput("chart radius must be positive".into()));
        }
        for (x, w) in &jumps {
            if *w <= 0.0 || !w.is_finite() || !x.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "jump (offset {x}, rate {w}) is invalid"
                )));
            }
        }
        Ok(Self {
            b,
            a,
            jumps,
            chart_radius,
        })
    }

    /// Compensator x̄(x): x inside the chart radius, 0 outside.
    pub fn xbar(&self, x: f64) -> f64 {
        if x.abs() < self.chart_radius {
            x
        } else {
            0.0
        }
    }
}

/// Characteristic exponent
/// ψ(λ) = i·b·λ − a·λ² + Σ_k w_k (e^{iλx_k} − 1 − iλ·x̄(x_k)).
pub fn char_exponent(kit: &ScalarKit, lambda: f64) -> Complex64 {
    let mut psi = Complex64::new(-kit.a * lambda * lambda, kit.b * lambda);
    for &(x, w) in &kit.jumps {
        let jump = Complex64::new(0.0, lambda * x).exp()
            - Complex64::new(1.0, lambda * kit.xbar(x));
        psi += jump * w;
    }
    psi
}

/// exp(t·ψ(m)): the multiplier the semigroup applies to a charge-m
/// coherence. Must equal the (j,l) coherence factor of the evolved
/// twirling semigroup on u1_charges whenever m = k_j − k_l.
pub fn u1_coherence_factor(kit: &ScalarKit, m: i64, t: f64) -> Result<Complex64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::InvalidInput(format!("time must be ≥ 0, got {t}")));
    }
    Ok((char_exponent(kit, m as f64) * t).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn drift_diffusion_exponent() {
        // Generator b∂ + a∂² applied to e^{iλx} gives (ibλ − aλ²)e^{iλx}.
        let kit = ScalarKit::new(0.7, 0.3, vec![]).unwrap();
        for lambda in [-2.0, -0.5, 1.0, 3.0] {
            let psi = char_exponent(&kit, lambda);
            assert_abs_diff_eq!(psi.re, -0.3 * lambda * lambda, epsilon = 1e-14);
            assert_abs_diff_eq!(psi.im, 0.7 * lambda, epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_frequency_conserves_probability() {
        let kit = ScalarKit::new(1.3, 0.4, vec![(0.5, 2.0), (3.5, 0.7)]).unwrap();
        let psi = char_exponent(&kit, 0.0);
        assert!(psi.norm() < 1e-15);
    }

    #[test]
    fn pure_jump_outside_chart() {
        // x = π sits outside the default chart (r = 0.9π): no compensator,
        // ψ(1) = e^{iπ} − 1 = −2.
        let kit = ScalarKit::new(0.0, 0.0, vec![(std::f64::consts::PI, 1.0)]).unwrap();
        let psi = char_exponent(&kit, 1.0);
        assert_abs_diff_eq!(psi.re, -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(psi.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn coherence_factor_zero_mode_is_one() {
        let kit = ScalarKit::new(0.9, 0.4, vec![(0.3, 1.0)]).unwrap();
        for t in [0.0, 0.5, 2.0] {
            let f = u1_coherence_factor(&kit, 0, t).unwrap();
            assert_abs_diff_eq!(f.re, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(f.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn gaussian_coherence_factor_closed_form() {
        let (beta, alpha) = (0.8, 0.25);
        let kit = ScalarKit::new(beta, alpha, vec![]).unwrap();
        let f = u1_coherence_factor(&kit, 1, 1.0).unwrap();
        let expect = Complex64::new(-alpha, -0.0).exp() * Complex64::new(0.0, beta).exp();
        assert!((f - expect).norm() < 1e-14);
    }

    #[test]
    fn contraction_for_all_modes() {
        let kit = ScalarKit::new(-0.4, 0.6, vec![(0.2, 1.5), (2.9, 0.3)]).unwrap();
        for m in -6..=6 {
            for t in [0.1, 1.0, 7.0] {
                let f = u1_coherence_factor(&kit, m, t).unwrap();
                assert!(f.norm() <= 1.0 + 1e-12, "|exp(tψ({m}))| = {}", f.norm());
            }
        }
    }

    #[test]
    fn exponent_conjugate_symmetry() {
        let kit = ScalarKit::new(0.3, 0.2, vec![(0.4, 1.1), (-1.2, 0.5)]).unwrap();
        for lambda in [0.3, 1.7, 4.2] {
            let plus = char_exponent(&kit, lambda);
            let minus = char_exponent(&kit, -lambda);
            assert!((minus - plus.conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_invalid_kits() {
        assert!(ScalarKit::new(0.0, -0.1, vec![]).is_err());
        assert!(ScalarKit::new(0.0, 0.0, vec![(1.0, 0.0)]).is_err());
        assert!(ScalarKit::new(0.0, 0.0, vec![(f64::NAN, 1.0)]).is_err());
    }
}
