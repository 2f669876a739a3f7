//! Verification suite: Choi matrices, CPTP/unitality verdicts, conditional
//! complete positivity of generators, qubit Pauli decomposition, covariance
//! subgroup membership, and truncation-convergence studies.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kit::{truncate, HuntEvaluator, RepresentationKit};
use crate::lie::{GroupElement, LieRepresentation};
use crate::linalg::{hermitian_eigen, hermitian_min_eig, CMatrix, RMatrix};
use crate::superop::{apply, full_generator, uvee, Superoperator};

/// Verdicts and margins for a channel or map.
#[derive(Debug, Clone)]
pub struct ChannelReport {
    pub is_trace_preserving: bool,
    pub trace_margin: f64,
    pub is_unital: bool,
    pub unital_margin: f64,
    pub choi_min_eig: f64,
    pub is_cptp: bool,
    /// Qubit Pauli probabilities (p_I, p_x, p_y, p_z) when available.
    pub pauli_probs: Option<[f64; 4]>,
    pub notes: String,
}

/// Choi matrix J(S) = Σ_{ij} |i⟩⟨j| ⊗ S(|i⟩⟨j|).
///
/// Under the column-stacking convention this is the index reshuffle
/// J[(i·N+k),(j·N+l)] = S[(l·N+k),(j·N+i)].
pub fn choi(s: &Superoperator) -> CMatrix {
    let n = s.dim_hilbert();
    let m = s.matrix();
    let mut j = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for jj in 0..n {
            for k in 0..n {
                for l in 0..n {
                    j[(i * n + k, jj * n + l)] = m[(l * n + k, jj * n + i)];
                }
            }
        }
    }
    j
}

/// CPTP verdict at tolerance `tol`: Choi PSD within −tol, trace
/// preservation and unitality margins recorded.
pub fn is_cptp(s: &Superoperator, tol: f64) -> Result<ChannelReport> {
    if tol <= 0.0 || tol.is_nan() {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let trace_margin = s.trace_preservation_defect();
    let unital_margin = s.unitality_defect();
    let j = choi(s);
    let choi_min_eig = hermitian_min_eig(&j);
    let is_trace_preserving = trace_margin <= tol;
    let is_unital = unital_margin <= tol;
    let is_cp = choi_min_eig >= -tol;
    Ok(ChannelReport {
        is_trace_preserving,
        trace_margin,
        is_unital,
        unital_margin,
        choi_min_eig,
        is_cptp: is_trace_preserving && is_cp,
        pauli_probs: None,
        notes: String::new(),
    })
}

/// Scaled default tolerance for the conditional-complete-positivity test;
/// generator assembly accumulates O(n²N⁴) flops of rounding.
pub fn ccp_default_tol(l: &Superoperator) -> f64 {
    1e-9 * l.norm().max(1.0)
}

/// Conditional complete positivity: P·J(L)·P ⪰ −tol with P projecting off
/// the maximally entangled vector. Equivalent to GKLS structure for
/// Hermiticity-preserving, trace-annihilating L.
pub fn is_ccp_generator(l: &Superoperator, tol: f64) -> bool {
    let n = l.dim_hilbert();
    let j = choi(l);
    let omega = Superoperator::vec_identity(n) / Complex64::new((n as f64).sqrt(), 0.0);
    let p = CMatrix::identity(n * n, n * n) - &omega * omega.adjoint();
    let pjp = &p * j * &p;
    hermitian_min_eig(&pjp) >= -tol
}

/// Outcome of the qubit Pauli decomposition.
#[derive(Debug, Clone, PartialEq)]
pub enum PauliOutcome {
    /// Probabilities (p_I, p_x, p_y, p_z), non-negative within 1e-9,
    /// summing to one.
    Pauli([f64; 4]),
    /// The map is not unital/CPTP enough to factor as a Pauli channel in
    /// any rotated frame.
    NotPauli,
}

fn pauli_matrices() -> [CMatrix; 4] {
    let c = Complex64::new;
    [
        CMatrix::identity(2, 2),
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    ]
}

/// Pauli transfer matrix R[α,β] = ½ tr(σ_α S(σ_β)).
pub fn pauli_transfer_matrix(s: &Superoperator) -> Result<RMatrix> {
    if s.dim_hilbert() != 2 {
        return Err(Error::InvalidInput("Pauli transfer matrix needs N = 2".into()));
    }
    let sigmas = pauli_matrices();
    let mut r = RMatrix::zeros(4, 4);
    for (a, sa) in sigmas.iter().enumerate() {
        for (b, sb) in sigmas.iter().enumerate() {
            let img = apply(s, sb)?;
            r[(a, b)] = 0.5 * (sa * img).trace().re;
        }
    }
    Ok(r)
}

fn probs_from_lambdas(l: [f64; 3]) -> [f64; 4] {
    [
        (1.0 + l[0] + l[1] + l[2]) / 4.0,
        (1.0 + l[0] - l[1] - l[2]) / 4.0,
        (1.0 - l[0] + l[1] - l[2]) / 4.0,
        (1.0 - l[0] - l[1] + l[2]) / 4.0,
    ]
}

const PAULI_PROB_TOL: f64 = 1e-9;

/// Decompose a unital qubit channel as a Pauli channel after factoring its
/// own unitary (SO(3)) frame. Channels already diagonal in the Pauli
/// transfer basis are read off directly without any frame rotation.
pub fn pauli_decompose(s: &Superoperator) -> Result<PauliOutcome> {
    if s.dim_hilbert() != 2 {
        return Err(Error::InvalidInput("pauli_decompose needs N = 2".into()));
    }
    let r = pauli_transfer_matrix(s)?;
    // Unital TP structure: first row/column (1, 0, 0, 0).
    let structural = 1e-7;
    if (r[(0, 0)] - 1.0).abs() > structural {
        return Ok(PauliOutcome::NotPauli);
    }
    for k in 1..4 {
        if r[(0, k)].abs() > structural || r[(k, 0)].abs() > structural {
            return Ok(PauliOutcome::NotPauli);
        }
    }
    let r3 = r.view((1, 1), (3, 3)).into_owned();
    let off = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| r3[(i, j)].abs())
        .fold(0.0_f64, f64::max);
    if off <= 1e-9 {
        let p = probs_from_lambdas([r3[(0, 0)], r3[(1, 1)], r3[(2, 2)]]);
        if p.iter().all(|&x| x >= -PAULI_PROB_TOL) {
            return Ok(PauliOutcome::Pauli(p));
        }
        return Ok(PauliOutcome::NotPauli);
    }
    // Signed SVD with special-orthogonal factors: R3 = O₁·D·O₂ᵀ,
    // O₁, O₂ ∈ SO(3); the sign corrections land in D.
    let svd = r3.svd(true, true);
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let du = u.determinant().signum();
    let dv = vt.determinant().signum();
    // Sign corrections keeping both factors special-orthogonal land on the
    // smallest singular value.
    let lambdas = [
        svd.singular_values[0],
        svd.singular_values[1],
        svd.singular_values[2] * du * dv,
    ];
    let p = probs_from_lambdas(lambdas);
    if p.iter().all(|&x| x >= -PAULI_PROB_TOL) {
        Ok(PauliOutcome::Pauli(p))
    } else {
        Ok(PauliOutcome::NotPauli)
    }
}

/// ‖[L, U∨U(g)]‖_F: the covariance defect of a generator under g.
pub fn covariance_defect(
    rep: &LieRepresentation,
    l: &Superoperator,
    g: &GroupElement,
) -> Result<f64> {
    let ug = uvee(rep, g)?;
    Ok(((l * &ug).matrix() - (&ug * l).matrix()).norm())
}

/// Membership test for the covariance subgroup G₀(U,{μ_t}): commutation of
/// the generator with U∨U(g) is equivalent to commutation with every 𝔖_t
/// for norm-continuous semigroups.
pub fn covariance_check(
    rep: &LieRepresentation,
    l: &Superoperator,
    g: &GroupElement,
    tol: f64,
) -> Result<bool> {
    Ok(covariance_defect(rep, l, g)? <= tol)
}

/// Deviation ‖𝔏(kit truncated at m) − 𝔏(kit)‖_F for each m.
pub fn truncation_convergence(
    rep: &LieRepresentation,
    kit_large: &RepresentationKit,
    ms: &[u64],
) -> Result<Vec<(u64, f64)>> {
    let reference = full_generator(rep, kit_large)?;
    let hunt = HuntEvaluator::new(rep);
    let mut out = Vec::with_capacity(ms.len());
    for &m in ms {
        let eta_m = truncate(kit_large.eta(), m, &hunt)?;
        let kit_m = kit_large.with_eta(eta_m);
        let lm = full_generator(rep, &kit_m)?;
        out.push((m, (lm.matrix() - reference.matrix()).norm()));
    }
    Ok(out)
}

/// Eigenvalues of the Choi matrix sorted descending; rank diagnostics for
/// unitary channels.
pub fn choi_spectrum(s: &Superoperator) -> Vec<f64> {
    let j = choi(s);
    let (vals, _) = hermitian_eigen(&j);
    let mut v: Vec<f64> = vals.iter().copied().collect();
    v.reverse();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kit::LevyMeasure;
    use crate::linalg::RVector;
    use crate::superop::{evolve, twirl_exact};
    use approx::assert_abs_diff_eq;

    fn su2() -> LieRepresentation {
        LieRepresentation::su2_spin(0.5).unwrap()
    }

    fn isotropic_kit(c: f64) -> RepresentationKit {
        RepresentationKit::new(
            RVector::zeros(3),
            RMatrix::identity(3, 3) * c,
            LevyMeasure::empty(),
        )
        .unwrap()
    }

    fn dephasing_kit(c: f64) -> RepresentationKit {
        let mut a = RMatrix::zeros(3, 3);
        a[(2, 2)] = c;
        RepresentationKit::new(RVector::zeros(3), a, LevyMeasure::empty()).unwrap()
    }

    #[test]
    fn choi_of_identity_is_max_entangled_projector() {
        let s = Superoperator::identity(3);
        let j = choi(&s);
        assert_abs_diff_eq!(j.trace().re, 3.0, epsilon = 1e-12);
        let spec = choi_spectrum(&s);
        assert_abs_diff_eq!(spec[0], 3.0, epsilon = 1e-12);
        assert!(spec[1].abs() < 1e-12);
    }

    #[test]
    fn choi_of_unitary_channel_is_rank_one() {
        let rep = su2();
        let g = rep
            .group_exp(&RVector::from_vec(vec![0.7, -0.3, 0.4]))
            .unwrap();
        let s = uvee(&rep, &g).unwrap();
        let spec = choi_spectrum(&s);
        assert_abs_diff_eq!(spec[0], 2.0, epsilon = 1e-10);
        assert!(spec[1].abs() < 1e-10);
    }

    #[test]
    fn choi_rank_bounded_by_atom_count() {
        let rep = su2();
        let g1 = rep.group_exp(&RVector::from_vec(vec![0.5, 0.0, 0.0])).unwrap();
        let g2 = rep.group_exp(&RVector::from_vec(vec![0.0, 0.8, 0.0])).unwrap();
        let s = twirl_exact(
            &rep,
            &[(GroupElement::identity(2), 0.4), (g1, 0.3), (g2, 0.3)],
        )
        .unwrap();
        let spec = choi_spectrum(&s);
        assert!(spec[3].abs() < 1e-10, "rank must be ≤ 3: {spec:?}");
        assert!(spec[0] > 0.0);
    }

    #[test]
    fn cptp_verdict_for_evolved_kit() {
        let rep = su2();
        let l = full_generator(&rep, &isotropic_kit(0.5)).unwrap();
        let s = evolve(&l, 1.0).unwrap();
        let report = is_cptp(&s, 1e-9).unwrap();
        assert!(report.is_cptp);
        assert!(report.is_unital);
        assert!(report.trace_margin <= 1e-10);
        assert!(report.unital_margin <= 1e-10);
        assert!(report.choi_min_eig >= -1e-9);
    }

    #[test]
    fn broken_normalization_fails_cptp() {
        let rep = su2();
        let g = rep.group_exp(&RVector::from_vec(vec![0.3, 0.0, 0.1])).unwrap();
        let s = uvee(&rep, &g).unwrap();
        let broken = &s - &Superoperator::identity(2).scale(Complex64::new(0.1, 0.0));
        let report = is_cptp(&broken, 1e-9).unwrap();
        assert!(!report.is_trace_preserving);
        assert!(!report.is_cptp);
    }

    #[test]
    fn identity_report_margins() {
        let report = is_cptp(&Superoperator::identity(2), 1e-9).unwrap();
        assert!(report.is_cptp && report.is_unital && report.is_trace_preserving);
        assert!(report.trace_margin <= 1e-12);
        assert!(report.unital_margin <= 1e-12);
        assert!(report.choi_min_eig >= -1e-12);
    }

    #[test]
    fn ccp_holds_for_generators_and_fails_for_negations() {
        let rep = su2();
        let l = full_generator(&rep, &isotropic_kit(0.7)).unwrap();
        assert!(is_ccp_generator(&l, ccp_default_tol(&l)));
        let neg = l.scale(Complex64::new(-1.0, 0.0));
        assert!(!is_ccp_generator(&neg, ccp_default_tol(&neg)));
    }

    #[test]
    fn ccp_trivial_for_commutator_generators() {
        let rep = su2();
        let h = rep.algebra_element(&RVector::from_vec(vec![0.4, 0.1, -0.6])).unwrap();
        let l = Superoperator::commutator(&h);
        assert!(is_ccp_generator(&l, 1e-9));
        // The projected Choi is ≈ 0 for the Hamiltonian sector.
        let n = l.dim_hilbert();
        let j = choi(&l);
        let omega = Superoperator::vec_identity(n) / Complex64::new((n as f64).sqrt(), 0.0);
        let p = CMatrix::identity(n * n, n * n) - &omega * omega.adjoint();
        assert!((&p * j * &p).norm() < 1e-10);
    }

    #[test]
    fn pauli_identity_channel() {
        let s = Superoperator::identity(2);
        match pauli_decompose(&s).unwrap() {
            PauliOutcome::Pauli(p) => {
                assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-12);
                assert!(p[1].abs() + p[2].abs() + p[3].abs() < 1e-12);
            }
            PauliOutcome::NotPauli => panic!("identity must decompose"),
        }
    }

    #[test]
    fn pauli_isotropic_depolarizer_probabilities() {
        let rep = su2();
        let c = 0.5;
        let t = 0.8;
        let l = full_generator(&rep, &isotropic_kit(c)).unwrap();
        let s = evolve(&l, t).unwrap();
        let expect = (1.0 - (-2.0 * c * t).exp()) / 4.0;
        match pauli_decompose(&s).unwrap() {
            PauliOutcome::Pauli(p) => {
                for pk in &p[1..] {
                    assert_abs_diff_eq!(*pk, expect, epsilon = 1e-10);
                }
                assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
            }
            PauliOutcome::NotPauli => panic!("depolarizer must decompose"),
        }
    }

    #[test]
    fn pauli_axis_dephasing_probabilities() {
        // a = diag(0,0,c): generator (c/2)(σ₃·σ₃ − ·); transverse Paulis
        // decay by e^{−ct}, so p_z = (1 − e^{−ct})/2 by the 4×4 oracle.
        let rep = su2();
        let c = 0.5;
        let t = 1.1;
        let l = full_generator(&rep, &dephasing_kit(c)).unwrap();
        let s = evolve(&l, t).unwrap();
        let decay = (-c * t).exp();
        match pauli_decompose(&s).unwrap() {
            PauliOutcome::Pauli(p) => {
                assert_abs_diff_eq!(p[3], (1.0 - decay) / 2.0, epsilon = 1e-10);
                assert!(p[1].abs() < 1e-9);
                assert!(p[2].abs() < 1e-9);
            }
            PauliOutcome::NotPauli => panic!("dephasing must decompose"),
        }
    }

    #[test]
    fn pauli_rotated_frame_still_decomposes() {
        // Dephasing composed with a rotation: not axis-aligned, but still a
        // Pauli channel up to its own unitary frame.
        let rep = su2();
        let l = full_generator(&rep, &dephasing_kit(0.6)).unwrap();
        let s = evolve(&l, 1.0).unwrap();
        let g = rep.group_exp(&RVector::from_vec(vec![0.5, 0.2, 0.0])).unwrap();
        let rotated = &uvee(&rep, &g).unwrap() * &s;
        match pauli_decompose(&rotated).unwrap() {
            PauliOutcome::Pauli(p) => {
                assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
                assert!(p.iter().all(|&x| x >= -1e-9));
            }
            PauliOutcome::NotPauli => panic!("rotated dephasing must decompose"),
        }
    }

    #[test]
    fn pauli_rejects_wrong_dimension() {
        let s = Superoperator::identity(3);
        assert!(pauli_decompose(&s).is_err());
    }

    #[test]
    fn covariance_abelian_always_true() {
        let rep = LieRepresentation::u1_charges(&[0, 1, 2]).unwrap();
        let kit = RepresentationKit::new(
            RVector::from_vec(vec![0.3]),
            RMatrix::from_row_slice(1, 1, &[0.2]),
            LevyMeasure::empty(),
        )
        .unwrap();
        let l = full_generator(&rep, &kit).unwrap();
        for t in [0.3, 1.0, 2.5] {
            let g = rep.group_exp(&RVector::from_vec(vec![t])).unwrap();
            assert!(covariance_check(&rep, &l, &g, 1e-9).unwrap());
        }
    }

    #[test]
    fn covariance_dephasing_axis_vs_transverse() {
        let rep = su2();
        let l = full_generator(&rep, &dephasing_kit(0.7)).unwrap();
        let axis = rep.group_exp(&RVector::from_vec(vec![0.0, 0.0, 1.2])).unwrap();
        assert!(covariance_check(&rep, &l, &axis, 1e-9).unwrap());
        let transverse = rep
            .group_exp(&RVector::from_vec(vec![std::f64::consts::FRAC_PI_2, 0.0, 0.0]))
            .unwrap();
        let defect = covariance_defect(&rep, &l, &transverse).unwrap();
        assert!(defect >= 1e-3, "transverse defect {defect}");
        assert!(!covariance_check(&rep, &l, &transverse, 1e-9).unwrap());
    }

    #[test]
    fn covariance_center_elements() {
        // −I = exp(2π X̂₃) generates the center of SU(2); conjugation is
        // trivial so any generator commutes.
        let rep = su2();
        let minus_id = rep
            .group_exp(&RVector::from_vec(vec![0.0, 0.0, 2.0 * std::f64::consts::PI]))
            .unwrap();
        let kit = isotropic_kit(0.4);
        let l = full_generator(&rep, &kit).unwrap();
        assert!(covariance_check(&rep, &l, &minus_id, 1e-9).unwrap());
    }

    #[test]
    fn truncation_deviation_single_atom_closed_form() {
        // One atom with Φ = ‖x̄‖² < 1: deviation(m) = e^{−mΦ}·w·‖V‖ with
        // V = U∨U(g) − I − Σ x̄ʲ[X̂_j,·].
        let rep = su2();
        let x = RVector::from_vec(vec![0.5, 0.0, 0.0]);
        let g = rep.group_exp(&x).unwrap();
        let w = 1.0;
        let eta = LevyMeasure::new(vec![(g.clone(), w)]).unwrap();
        let kit = RepresentationKit::new(RVector::zeros(3), RMatrix::zeros(3, 3), eta).unwrap();
        let phi = x.norm_squared();

        let mut v = (&uvee(&rep, &g).unwrap() - &Superoperator::identity(2))
            .scale(Complex64::new(1.0, 0.0));
        for j in 0..3 {
            let comm = Superoperator::commutator(rep.generator(j));
            v = &v - &comm.scale(Complex64::new(x[j], 0.0));
        }
        let vnorm = v.norm();

        let ms = [1u64, 2, 4, 8];
        let devs = truncation_convergence(&rep, &kit, &ms).unwrap();
        for (m, dev) in devs {
            let expect = (-(m as f64) * phi).exp() * w * vnorm;
            assert_abs_diff_eq!(dev, expect, epsilon = 1e-9);
        }
    }

    #[test]
    fn truncation_empty_eta_all_zero() {
        let rep = su2();
        let kit = isotropic_kit(0.3);
        let devs = truncation_convergence(&rep, &kit, &[1, 4, 16]).unwrap();
        assert!(devs.iter().all(|(_, d)| *d < 1e-14));
    }

    #[test]
    fn truncation_strictly_decreasing_on_positive_phi() {
        let rep = su2();
        let atoms: Vec<(GroupElement, f64)> = [0.3, 0.45, 0.6]
            .iter()
            .map(|&th| {
                (
                    rep.group_exp(&RVector::from_vec(vec![0.0, 0.0, th])).unwrap(),
                    0.5,
                )
            })
            .collect();
        let eta = LevyMeasure::new(atoms).unwrap();
        let kit = RepresentationKit::new(RVector::zeros(3), RMatrix::zeros(3, 3), eta).unwrap();
        let devs = truncation_convergence(&rep, &kit, &[1, 2, 4, 8, 16, 32]).unwrap();
        for w in devs.windows(2) {
            assert!(w[1].1 < w[0].1, "deviations must strictly decrease: {devs:?}");
        }
    }
}
