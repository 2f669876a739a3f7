//! Representation kits {bʲ, aʲᵏ, η}: the Lévy–Khintchine data of a
//! continuous convolution semigroup of measures, restricted to finite atomic
//! Lévy measures (first kind). Includes the drift correction cʲ(η) and the
//! Hunt-function truncation sequence.

use crate::error::{Error, Result};
use crate::lie::{GroupElement, LieRepresentation};
use crate::linalg::{CMatrix, RMatrix, RVector};

/// Minimum Frobenius distance of a Lévy atom from the identity.
pub const ATOM_IDENTITY_TOL: f64 = 1e-12;
/// Symmetry tolerance for the diffusion matrix a.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalues of a in [−PSD_CLAMP_TOL, 0) are clamped to zero.
pub const PSD_CLAMP_TOL: f64 = 1e-10;
/// Truncated atoms below this weight are dropped.
pub const TRUNCATION_DROP_TOL: f64 = 1e-15;

/// One weighted point mass of a Lévy measure.
#[derive(Debug, Clone)]
pub struct LevyAtom {
    pub point: GroupElement,
    pub weight: f64,
}

/// A finite atomic Lévy measure η = Σ w_k δ_{g_k} on G∖{e}.
#[derive(Debug, Clone, Default)]
pub struct LevyMeasure {
    atoms: Vec<LevyAtom>,
}

impl LevyMeasure {
    pub fn empty() -> Self {
        Self { atoms: Vec::new() }
    }

    pub fn new(atoms: Vec<(GroupElement, f64)>) -> Result<Self> {
        for (g, w) in &atoms {
            if *w <= 0.0 || !w.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "Lévy atom weight must be positive, got {w}"
                )));
            }
            let n = g.dim();
            let dist = (g.unitary() - CMatrix::identity(n, n)).norm();
            if dist <= ATOM_IDENTITY_TOL {
                return Err(Error::InvalidInput(
                    "Lévy atom coincides with the identity".into(),
                ));
            }
        }
        Ok(Self {
            atoms: atoms
                .into_iter()
                .map(|(point, weight)| LevyAtom { point, weight })
                .collect(),
        })
    }

    pub fn atoms(&self) -> &[LevyAtom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// η(G∖{e}) = Σ w_k.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Concatenation of atom lists (η₁ + η₂).
    pub fn concat(&self, other: &LevyMeasure) -> LevyMeasure {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        LevyMeasure { atoms }
    }
}

/// The Lévy–Khintchine triple of a convolution semigroup: drift b, PSD
/// diffusion matrix a, and a finite atomic Lévy measure η.
#[derive(Debug, Clone)]
pub struct RepresentationKit {
    b: RVector,
    a: RMatrix,
    eta: LevyMeasure,
}

/// Coarse classification of a kit, following the Gaussian-measure
/// characterization (η = 0 and a ≠ 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KitClass {
    Gaussian,
    FirstKindJump,
    PureDrift,
    Mixed,
}

impl RepresentationKit {
    pub fn new(b: RVector, a: RMatrix, eta: LevyMeasure) -> Result<Self> {
        let n = b.len();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::InvalidInput(format!(
                "diffusion matrix is {}×{}, expected {n}×{n}",
                a.nrows(),
                a.ncols()
            )));
        }
        let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        if (&a - a.transpose()).iter().any(|v| v.abs() > SYMMETRY_TOL * scale) {
            return Err(Error::InvalidInput("diffusion matrix is not symmetric".into()));
        }
        let sym = (&a + a.transpose()) * 0.5;
        let se = nalgebra::SymmetricEigen::new(sym);
        let min_eig = se.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_CLAMP_TOL {
            return Err(Error::InvalidInput(format!(
                "diffusion matrix is not PSD: min eigenvalue {min_eig:e}"
            )));
        }
        // Clamp rounding-level negative eigenvalues so round trips stay stable.
        let a = if min_eig < 0.0 {
            let clamped = se.eigenvalues.map(|v| v.max(0.0));
            &se.eigenvectors * RMatrix::from_diagonal(&clamped) * se.eigenvectors.transpose()
        } else {
            a
        };
        Ok(Self { b, a, eta })
    }

    /// Kit with b = 0, a = 0, η = 0 on an n-dimensional algebra.
    pub fn zero(n: usize) -> Self {
        Self {
            b: RVector::zeros(n),
            a: RMatrix::zeros(n, n),
            eta: LevyMeasure::empty(),
        }
    }

    pub fn gaussian(b: RVector, a: RMatrix) -> Result<Self> {
        let n = b.len();
        Self::new(b, a, LevyMeasure::empty()).and_then(|k| {
            if k.a.iter().all(|v| *v == 0.0) {
                return Err(Error::InvalidInput(format!(
                    "Gaussian kit needs a ≠ 0 (n = {n})"
                )));
            }
            Ok(k)
        })
    }

    pub fn b(&self) -> &RVector {
        &self.b
    }

    pub fn a(&self) -> &RMatrix {
        &self.a
    }

    pub fn eta(&self) -> &LevyMeasure {
        &self.eta
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn with_eta(&self, eta: LevyMeasure) -> Self {
        Self {
            b: self.b.clone(),
            a: self.a.clone(),
            eta,
        }
    }
}

/// Classify a kit: Gaussian (η = 0, a ≠ 0), pure drift (η = 0, a = 0),
/// first-kind jump (η ≠ 0, a = 0, b = 0), mixed otherwise.
pub fn classify(kit: &RepresentationKit) -> KitClass {
    let a_zero = kit.a().iter().all(|v| *v == 0.0);
    let b_zero = kit.b().iter().all(|v| *v == 0.0);
    let eta_empty = kit.eta().is_empty();
    match (eta_empty, a_zero, b_zero) {
        (true, false, _) => KitClass::Gaussian,
        (true, true, _) => KitClass::PureDrift,
        (false, true, true) => KitClass::FirstKindJump,
        _ => KitClass::Mixed,
    }
}

/// Drift correction cʲ(η) = −Σ_k w_k·x̄ʲ(g_k), with x̄ = 0 outside the chart.
pub fn drift_correction(rep: &LieRepresentation, eta: &LevyMeasure) -> Result<RVector> {
    let mut c = RVector::zeros(rep.dim_group());
    for atom in eta.atoms() {
        let x = rep.adapted_or_zero(&atom.point)?;
        c -= x * atom.weight;
    }
    Ok(c)
}

/// Hunt function for a representation's chart: Φ(g) = min(Σ_j x̄ʲ(g)², 1)
/// inside the chart, 1 outside.
#[derive(Debug, Clone, Copy)]
pub struct HuntEvaluator<'a> {
    rep: &'a LieRepresentation,
}

impl<'a> HuntEvaluator<'a> {
    pub fn new(rep: &'a LieRepresentation) -> Self {
        Self { rep }
    }

    pub fn phi(&self, g: &GroupElement) -> Result<f64> {
        Ok(match self.rep.adapted_coordinates(g)? {
            Some(x) => x.norm_squared().min(1.0),
            None => 1.0,
        })
    }
}

/// The truncation step of the first-kind approximation sequence:
/// dη_m = (1 − e^{−m·Φ}) dη, dropping atoms whose new weight is negligible.
pub fn truncate(eta: &LevyMeasure, m: u64, hunt: &HuntEvaluator<'_>) -> Result<LevyMeasure> {
    if m == 0 {
        return Err(Error::InvalidInput("truncation index m must be positive".into()));
    }
    let mut atoms = Vec::new();
    for atom in eta.atoms() {
        let phi = hunt.phi(&atom.point)?;
        let w = atom.weight * (1.0 - (-(m as f64) * phi).exp());
        if w >= TRUNCATION_DROP_TOL {
            atoms.push((atom.point.clone(), w));
        }
    }
    LevyMeasure::new(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieRepresentation;
    use approx::assert_abs_diff_eq;

    fn u1_rep() -> LieRepresentation {
        LieRepresentation::u1_charges(&[0, 1]).unwrap()
    }

    fn atom_at(rep: &LieRepresentation, x: f64, w: f64) -> (GroupElement, f64) {
        (rep.group_exp(&RVector::from_vec(vec![x])).unwrap(), w)
    }

    #[test]
    fn classify_follows_definitions() {
        let rep = LieRepresentation::su2_spin(0.5).unwrap();
        let gauss = RepresentationKit::new(
            RVector::zeros(3),
            RMatrix::identity(3, 3),
            LevyMeasure::empty(),
        )
        .unwrap();
        assert_eq!(classify(&gauss), KitClass::Gaussian);

        let drift = RepresentationKit::new(
            RVector::from_vec(vec![1.0, 0.0, 0.0]),
            RMatrix::zeros(3, 3),
            LevyMeasure::empty(),
        )
        .unwrap();
        assert_eq!(classify(&drift), KitClass::PureDrift);

        let eta = LevyMeasure::new(vec![(
            rep.group_exp(&RVector::from_vec(vec![0.4, 0.0, 0.0])).unwrap(),
            2.0,
        )])
        .unwrap();
        let jump =
            RepresentationKit::new(RVector::zeros(3), RMatrix::zeros(3, 3), eta.clone()).unwrap();
        assert_eq!(classify(&jump), KitClass::FirstKindJump);

        let mixed =
            RepresentationKit::new(RVector::from_vec(vec![1.0, 0.0, 0.0]), RMatrix::zeros(3, 3), eta)
                .unwrap();
        assert_eq!(classify(&mixed), KitClass::Mixed);
    }

    #[test]
    fn drift_correction_single_atom() {
        let rep = u1_rep();
        let eta = LevyMeasure::new(vec![atom_at(&rep, 0.5, 2.0)]).unwrap();
        let c = drift_correction(&rep, &eta).unwrap();
        assert_abs_diff_eq!(c[0], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn drift_correction_empty_is_zero() {
        let rep = u1_rep();
        let c = drift_correction(&rep, &LevyMeasure::empty()).unwrap();
        assert_eq!(c[0], 0.0);
    }

    #[test]
    fn drift_correction_symmetric_measure_cancels() {
        let rep = LieRepresentation::su2_spin(0.5).unwrap();
        let x = RVector::from_vec(vec![0.3, -0.2, 0.1]);
        let g = rep.group_exp(&x).unwrap();
        let ginv = rep.group_exp(&(-&x)).unwrap();
        let eta = LevyMeasure::new(vec![(g, 0.7), (ginv, 0.7)]).unwrap();
        let c = drift_correction(&rep, &eta).unwrap();
        assert!(c.norm() < 1e-12);
    }

    #[test]
    fn drift_correction_additive_over_concat() {
        let rep = u1_rep();
        let e1 = LevyMeasure::new(vec![atom_at(&rep, 0.5, 1.0)]).unwrap();
        let e2 = LevyMeasure::new(vec![atom_at(&rep, -0.8, 0.3)]).unwrap();
        let c1 = drift_correction(&rep, &e1).unwrap();
        let c2 = drift_correction(&rep, &e2).unwrap();
        let c12 = drift_correction(&rep, &e1.concat(&e2)).unwrap();
        assert_abs_diff_eq!(c12[0], c1[0] + c2[0], epsilon = 1e-14);
    }

    #[test]
    fn truncate_limits_to_full_weights() {
        let rep = u1_rep();
        let eta = LevyMeasure::new(vec![atom_at(&rep, 0.5, 2.0), atom_at(&rep, 1.5, 0.7)]).unwrap();
        let hunt = HuntEvaluator::new(&rep);
        let big = truncate(&eta, 1_000_000, &hunt).unwrap();
        for (orig, trunc) in eta.atoms().iter().zip(big.atoms()) {
            let rel = (orig.weight - trunc.weight).abs() / orig.weight;
            assert!(rel < 1e-6, "relative weight deficit {rel:e}");
        }
    }

    #[test]
    fn truncate_at_chart_boundary_weight() {
        // An atom outside the chart has Φ = 1, so m = 1 gives w·(1 − e⁻¹).
        let rep = u1_rep();
        let theta = 0.95 * std::f64::consts::PI;
        let eta = LevyMeasure::new(vec![atom_at(&rep, theta, 2.0)]).unwrap();
        let hunt = HuntEvaluator::new(&rep);
        assert_abs_diff_eq!(hunt.phi(&eta.atoms()[0].point).unwrap(), 1.0, epsilon = 1e-15);
        let t1 = truncate(&eta, 1, &hunt).unwrap();
        assert_abs_diff_eq!(
            t1.atoms()[0].weight,
            2.0 * (1.0 - (-1.0f64).exp()),
            epsilon = 1e-12
        );
    }

    #[test]
    fn truncate_empty_measure() {
        let rep = u1_rep();
        let hunt = HuntEvaluator::new(&rep);
        assert!(truncate(&LevyMeasure::empty(), 5, &hunt).unwrap().is_empty());
    }

    #[test]
    fn truncate_rejects_zero_m() {
        let rep = u1_rep();
        let hunt = HuntEvaluator::new(&rep);
        assert!(truncate(&LevyMeasure::empty(), 0, &hunt).is_err());
    }

    #[test]
    fn truncate_monotone_and_mass_bounded() {
        let rep = u1_rep();
        let eta = LevyMeasure::new(vec![
            atom_at(&rep, 0.05, 1.0),
            atom_at(&rep, 0.6, 0.4),
            atom_at(&rep, 2.0, 2.5),
        ])
        .unwrap();
        let hunt = HuntEvaluator::new(&rep);
        let mut prev: Option<LevyMeasure> = None;
        for m in [1u64, 2, 4, 8, 64, 512] {
            let t = truncate(&eta, m, &hunt).unwrap();
            assert!(t.total_mass() <= eta.total_mass() + 1e-12);
            if let Some(p) = &prev {
                for (a, b) in p.atoms().iter().zip(t.atoms()) {
                    assert!(b.weight + 1e-15 >= a.weight);
                }
            }
            prev = Some(t);
        }
    }

    #[test]
    fn kit_construction_validations() {
        // Non-symmetric a.
        let a = RMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(RepresentationKit::new(RVector::zeros(2), a, LevyMeasure::empty()).is_err());
        // Indefinite a.
        let a = RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(RepresentationKit::new(RVector::zeros(2), a, LevyMeasure::empty()).is_err());
        // Rounding-level negative eigenvalue clamps to PSD.
        let a = RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -0.5e-10]);
        let kit = RepresentationKit::new(RVector::zeros(2), a, LevyMeasure::empty()).unwrap();
        let se = nalgebra::SymmetricEigen::new(kit.a().clone());
        assert!(se.eigenvalues.iter().all(|v| *v >= 0.0));
        // Identity atom rejected.
        let id = GroupElement::identity(2);
        assert!(LevyMeasure::new(vec![(id, 1.0)]).is_err());
        // Non-positive weight rejected.
        let rep = u1_rep();
        let g = rep.group_exp(&RVector::from_vec(vec![0.5])).unwrap();
        assert!(LevyMeasure::new(vec![(g, 0.0)]).is_err());
    }

    #[test]
    fn hunt_function_small_atom() {
        let rep = u1_rep();
        let g = rep.group_exp(&RVector::from_vec(vec![0.2])).unwrap();
        let hunt = HuntEvaluator::new(&rep);
        assert_abs_diff_eq!(hunt.phi(&g).unwrap(), 0.04, epsilon = 1e-12);
    }

    #[test]
    fn levy_measure_uses_frobenius_identity_guard() {
        // A unitary extremely close to (but not exactly) the identity passes.
        let rep = u1_rep();
        let g = rep.group_exp(&RVector::from_vec(vec![1e-5])).unwrap();
        assert!(LevyMeasure::new(vec![(g, 1.0)]).is_ok());
    }
}
