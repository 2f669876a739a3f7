//! GKLS canonical forms of twirling-semigroup generators and the converse
//! construction recovering a representation kit from a canonical form.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kit::{drift_correction, LevyMeasure, RepresentationKit, ATOM_IDENTITY_TOL};
use crate::lie::{GroupElement, LieRepresentation};
use crate::linalg::{vec_col, CMatrix, RMatrix, RVector};
use crate::superop::{uvee, Superoperator};

/// Membership tolerance for H and F_k in V_U.
pub const VU_MEMBERSHIP_TOL: f64 = 1e-8;
/// Rates below this (relative) threshold are dropped from the canonical form.
const RATE_DROP_TOL: f64 = 1e-13;

/// Orthonormal basis of V_U, the traceless projection of i·Ran(π_U) inside
/// Hermitian operators, with the expansion coefficients of the projected
/// generators.
#[derive(Debug, Clone)]
pub struct VuProjector {
    /// HS-orthonormal traceless Hermitian basis E_1, …, E_D.
    basis: Vec<CMatrix>,
    /// n×D matrix M with M[j,α] = ⟨E_α, P₀(i·X̂_j)⟩_HS.
    coeffs: RMatrix,
    /// P₀(i·X̂_j) for each generator.
    projected_generators: Vec<CMatrix>,
    dim_hilbert: usize,
}

impl VuProjector {
    pub fn new(rep: &LieRepresentation) -> Self {
        let n = rep.dim_group();
        let nh = rep.dim_hilbert();
        let i = Complex64::new(0.0, 1.0);
        let idn = CMatrix::identity(nh, nh);
        let projected: Vec<CMatrix> = rep
            .generators()
            .iter()
            .map(|x| {
                let t = x * i;
                let tr = t.trace() / nh as f64;
                &t - &idn * tr
            })
            .collect();
        // Gram matrix of the projected generators is real symmetric PSD.
        let mut gram = RMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                gram[(j, k)] = (projected[j].adjoint() * &projected[k]).trace().re;
            }
        }
        let se = nalgebra::SymmetricEigen::new(gram);
        let max_eig = se.eigenvalues.iter().copied().fold(0.0_f64, f64::max);
        let keep_tol = 1e-12 * max_eig.max(1.0);
        let mut basis = Vec::new();
        let mut coeff_cols = Vec::new();
        for (idx, &lambda) in se.eigenvalues.iter().enumerate() {
            if lambda > keep_tol {
                let v = se.eigenvectors.column(idx);
                let mut e = CMatrix::zeros(nh, nh);
                for j in 0..n {
                    e += &projected[j] * Complex64::new(v[j], 0.0);
                }
                e /= Complex64::new(lambda.sqrt(), 0.0);
                basis.push(e);
                // ⟨E_α, T̃_j⟩ = √λ_α · v_jα.
                coeff_cols.push(v.map(|x| x * lambda.sqrt()));
            }
        }
        let d = basis.len();
        let mut coeffs = RMatrix::zeros(n, d);
        for (a, col) in coeff_cols.iter().enumerate() {
            coeffs.set_column(a, col);
        }
        Self {
            basis,
            coeffs,
            projected_generators: projected,
            dim_hilbert: nh,
        }
    }

    /// D = dim V_U.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn projected_generators(&self) -> &[CMatrix] {
        &self.projected_generators
    }

    /// Orthogonal projection of a Hermitian operator onto V_U.
    pub fn project(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_hilbert, self.dim_hilbert);
        for e in &self.basis {
            let coeff = (e.adjoint() * x).trace();
            out += e * coeff;
        }
        out
    }

    /// ‖X − P(X)‖_F.
    pub fn membership_defect(&self, x: &CMatrix) -> f64 {
        (x - self.project(x)).norm()
    }

    /// The N²×N² projection matrix onto V_U acting on vectorized operators.
    pub fn matrix(&self) -> CMatrix {
        let n2 = self.dim_hilbert * self.dim_hilbert;
        let mut p = CMatrix::zeros(n2, n2);
        for e in &self.basis {
            let v = vec_col(e);
            p += &v * v.adjoint();
        }
        p
    }
}

/// One dissipative channel of the canonical form.
#[derive(Debug, Clone)]
pub struct GklsPair {
    pub rate: f64,
    /// HS-normalized traceless Hermitian jump operator.
    pub jump: CMatrix,
}

/// Residual random unitary jump channel γ₀(𝔘 − I) with atomic 𝔘.
#[derive(Debug, Clone)]
pub struct ResidualChannel {
    pub gamma0: f64,
    /// Probability atoms of 𝔘; weights sum to one.
    pub atoms: Vec<(GroupElement, f64)>,
}

impl ResidualChannel {
    /// The random unitary map 𝔘 = Σ p_k U∨U(g_k).
    pub fn map(&self, rep: &LieRepresentation) -> Result<Superoperator> {
        let mut s = Superoperator::zero(rep.dim_hilbert());
        for (g, p) in &self.atoms {
            s = &s + &uvee(rep, g)?.scale(Complex64::new(*p, 0.0));
        }
        Ok(s)
    }
}

/// Canonical GKLS data of a twirling-semigroup generator:
/// 𝔏 = −i[H, ·] + Σ_k γ_k (F_k (·) F_k − ½{F_k², ·}) + γ₀(𝔘 − I).
#[derive(Debug, Clone)]
pub struct GklsForm {
    pub hamiltonian: CMatrix,
    pub pairs: Vec<GklsPair>,
    pub residual: Option<ResidualChannel>,
}

impl GklsForm {
    /// Assemble the superoperator the form describes.
    pub fn rebuild(&self) -> Result<Superoperator> {
        let n = self.hamiltonian.nrows();
        let mi = Complex64::new(0.0, -1.0);
        let mut l = Superoperator::commutator(&self.hamiltonian).scale(mi);
        for pair in &self.pairs {
            let f = &pair.jump;
            let sandwich = Superoperator::sandwich(f, f);
            let f2 = f * f;
            let anti = Superoperator::anticommutator(&f2).scale(Complex64::new(0.5, 0.0));
            l = &l + &(&sandwich - &anti).scale(Complex64::new(pair.rate, 0.0));
        }
        if let Some(res) = &self.residual {
            let mut u = Superoperator::zero(n);
            for (g, p) in &res.atoms {
                u = &u + &Superoperator::conjugation(g.unitary()).scale(Complex64::new(*p, 0.0));
            }
            let id = Superoperator::identity(n);
            l = &l + &(&u - &id).scale(Complex64::new(res.gamma0, 0.0));
        }
        Ok(l)
    }
}

/// Extract the GKLS canonical form of the generator of a kit.
///
/// The Gaussian part is diagonalized over an orthonormal basis of V_U; the
/// first-kind jump part becomes a residual channel (γ₀ = η(G∖{e}),
/// 𝔘 = 𝔘_η) with the drift correction cʲ(η) folded into the Hamiltonian.
pub fn gkls_canonical(rep: &LieRepresentation, kit: &RepresentationKit) -> Result<GklsForm> {
    if kit.dim() != rep.dim_group() {
        return Err(Error::InvalidInput(format!(
            "kit dimension {} does not match representation dimension {}",
            kit.dim(),
            rep.dim_group()
        )));
    }
    let proj = VuProjector::new(rep);
    let nh = rep.dim_hilbert();

    // Hamiltonian sector: Σ_j (bʲ + cʲ(η))·[X̂_j, ·] = −i[H, ·] with
    // H = Σ_j (bʲ + cʲ(η))·P₀(i·X̂_j).
    let c = drift_correction(rep, kit.eta())?;
    let beta = kit.b() + &c;
    let mut h = CMatrix::zeros(nh, nh);
    for (j, t) in proj.projected_generators().iter().enumerate() {
        if beta[j] != 0.0 {
            h += t * Complex64::new(beta[j], 0.0);
        }
    }

    // Dissipative sector: diagonalize the Kossakowski matrix K = Mᵀ a M over
    // the V_U basis; rates are twice its eigenvalues.
    let d = proj.dim();
    let mut pairs = Vec::new();
    if d > 0 {
        let k = proj.coeffs.transpose() * kit.a() * &proj.coeffs;
        let k = (&k + k.transpose()) * 0.5;
        let se = nalgebra::SymmetricEigen::new(k);
        let scale = se.eigenvalues.iter().copied().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        for (idx, &kappa) in se.eigenvalues.iter().enumerate() {
            let rate = 2.0 * kappa;
            if rate > RATE_DROP_TOL * scale {
                let q = se.eigenvectors.column(idx);
                let mut f = CMatrix::zeros(nh, nh);
                for (alpha, e) in proj.basis().iter().enumerate() {
                    f += e * Complex64::new(q[alpha], 0.0);
                }
                pairs.push(GklsPair { rate, jump: f });
            }
        }
        pairs.sort_by(|a, b| b.rate.partial_cmp(&a.rate).unwrap());
    }

    let residual = if kit.eta().is_empty() {
        None
    } else {
        let gamma0 = kit.eta().total_mass();
        let atoms = kit
            .eta()
            .atoms()
            .iter()
            .map(|a| (a.point.clone(), a.weight / gamma0))
            .collect();
        Some(ResidualChannel { gamma0, atoms })
    };

    Ok(GklsForm {
        hamiltonian: h,
        pairs,
        residual,
    })
}

/// Result of the converse construction, with a flag raised when π_U has a
/// kernel so the recovered coefficients are the minimum-norm preimage.
#[derive(Debug, Clone)]
pub struct KitRecovery {
    pub kit: RepresentationKit,
    pub ambiguous_preimage: bool,
}

fn real_stack_hermitian(m: &CMatrix) -> RVector {
    let n2 = m.len();
    let mut v = RVector::zeros(2 * n2);
    for (k, z) in m.iter().enumerate() {
        v[k] = z.re;
        v[k + n2] = z.im;
    }
    v
}

/// Recover a representation kit whose generator reproduces a GKLS form.
///
/// Follows the constructive converse: the residual channel supplies the
/// Lévy measure, the jump operators are pulled back through the projected
/// generators by least squares (d-vectors), a = ½ Σ_l γ_l d_l d_lᵀ, and the
/// drift compensates cʲ(η).
pub fn kit_from_gkls(rep: &LieRepresentation, form: &GklsForm) -> Result<KitRecovery> {
    let proj = VuProjector::new(rep);
    let n = rep.dim_group();

    let h_defect = proj.membership_defect(&form.hamiltonian);
    if h_defect > VU_MEMBERSHIP_TOL * (1.0 + form.hamiltonian.norm()) {
        return Err(Error::NotRepresentable(format!(
            "Hamiltonian lies outside V_U (defect {h_defect:e})"
        )));
    }
    for (k, pair) in form.pairs.iter().enumerate() {
        let defect = proj.membership_defect(&pair.jump);
        if defect > VU_MEMBERSHIP_TOL * (1.0 + pair.jump.norm()) {
            return Err(Error::NotRepresentable(format!(
                "jump operator {k} lies outside V_U (defect {defect:e})"
            )));
        }
        if pair.rate < 0.0 {
            return Err(Error::InvalidInput(format!(
                "negative GKLS rate {}",
                pair.rate
            )));
        }
    }

    // Lévy measure from the residual channel; atoms at the identity
    // contribute nothing to γ₀(𝔘 − I) and are dropped.
    let eta = match &form.residual {
        None => LevyMeasure::empty(),
        Some(res) => {
            if res.gamma0 < 0.0 {
                return Err(Error::InvalidInput("negative residual rate".into()));
            }
            let nh = rep.dim_hilbert();
            let idn = CMatrix::identity(nh, nh);
            let mut atoms = Vec::new();
            for (g, p) in &res.atoms {
                let w = res.gamma0 * p;
                if w <= 0.0 {
                    continue;
                }
                if (g.unitary() - &idn).norm() <= ATOM_IDENTITY_TOL {
                    continue;
                }
                atoms.push((g.clone(), w));
            }
            LevyMeasure::new(atoms)?
        }
    };

    // Least-squares pullback through the projected generators.
    let n2 = rep.dim_hilbert() * rep.dim_hilbert();
    let mut basis = RMatrix::zeros(2 * n2, n);
    for (j, t) in proj.projected_generators().iter().enumerate() {
        basis.set_column(j, &real_stack_hermitian(t));
    }
    let svd = basis.clone().svd(true, true);
    let sv_max = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
    let eps = 1e-12 * sv_max.max(1.0);
    let rank = svd.rank(eps);
    let ambiguous_preimage = rank < n;

    let solve = |target: &CMatrix| -> Result<RVector> {
        svd.solve(&real_stack_hermitian(target), eps)
            .map_err(|e| Error::NumericFailure(format!("least-squares pullback failed: {e}")))
    };

    // Drift: Σ_j βʲ T̃_j = H, then b = β − c(η).
    let beta = solve(&form.hamiltonian)?;
    let c = drift_correction(rep, &eta)?;
    let b = beta - c;

    // Diffusion: Σ_j d_lj T̃_j = −F_l, a = ½ Σ_l γ_l d_l d_lᵀ (the sign of
    // each d_l is immaterial in the quadratic form).
    let mut a = RMatrix::zeros(n, n);
    for pair in &form.pairs {
        let target = -&pair.jump;
        let d = solve(&target)?;
        a += (&d * d.transpose()) * (0.5 * pair.rate);
    }

    let kit = RepresentationKit::new(b, a, eta)?;
    Ok(KitRecovery {
        kit,
        ambiguous_preimage,
    })
}
