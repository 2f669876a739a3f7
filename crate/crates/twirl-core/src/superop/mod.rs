//! Superoperator algebra on B(H): conjugation representations U∨U(g),
//! exact twirls over atomic measures, the twirling-semigroup generator
//! 𝔏 = 𝔊 + 𝔚, and its matrix-exponential evolution.
//!
//! All superoperators act on column-stacked operators with the convention
//! vec(X·A·Y) = (Yᵀ ⊗ X)·vec(A).

mod gkls;

pub use gkls::{gkls_canonical, kit_from_gkls, GklsForm, GklsPair, KitRecovery, ResidualChannel, VuProjector};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kit::{drift_correction, LevyMeasure, RepresentationKit};
use crate::lie::{GroupElement, LieRepresentation};
use crate::linalg::{self, expm, unvec_col, vec_col, CMatrix, CVector};

/// Tolerance on Σ w_i = 1 for probability measures.
pub const PROBABILITY_TOL: f64 = 1e-12;
/// PSD tolerance when validating diffusion matrices fed to the generator.
pub const GENERATOR_PSD_TOL: f64 = 1e-10;

/// An N²×N² complex matrix acting on vectorized operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    mat: CMatrix,
    dim_hilbert: usize,
}

impl Superoperator {
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        let rows = mat.nrows();
        if rows != mat.ncols() {
            return Err(Error::InvalidInput("superoperator matrix must be square".into()));
        }
        let n = (rows as f64).sqrt().round() as usize;
        if n * n != rows {
            return Err(Error::InvalidInput(format!(
                "superoperator side {rows} is not a perfect square"
            )));
        }
        Ok(Self { mat, dim_hilbert: n })
    }

    pub fn identity(dim_hilbert: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim_hilbert * dim_hilbert, dim_hilbert * dim_hilbert),
            dim_hilbert,
        }
    }

    pub fn zero(dim_hilbert: usize) -> Self {
        Self {
            mat: CMatrix::zeros(dim_hilbert * dim_hilbert, dim_hilbert * dim_hilbert),
            dim_hilbert,
        }
    }

    /// The conjugation superoperator A ↦ U·A·U† for a unitary U;
    /// equals conj(U) ⊗ U under the vec convention.
    pub fn conjugation(u: &CMatrix) -> Self {
        let n = u.nrows();
        Self {
            mat: u.conjugate().kronecker(u),
            dim_hilbert: n,
        }
    }

    /// The commutator superoperator A ↦ [M, A].
    pub fn commutator(m: &CMatrix) -> Self {
        let n = m.nrows();
        let id = CMatrix::identity(n, n);
        Self {
            mat: id.kronecker(m) - m.transpose().kronecker(&id),
            dim_hilbert: n,
        }
    }

    /// The anticommutator superoperator A ↦ {M, A}.
    pub fn anticommutator(m: &CMatrix) -> Self {
        let n = m.nrows();
        let id = CMatrix::identity(n, n);
        Self {
            mat: id.kronecker(m) + m.transpose().kronecker(&id),
            dim_hilbert: n,
        }
    }

    /// The sandwich superoperator A ↦ X·A·Y.
    pub fn sandwich(x: &CMatrix, y: &CMatrix) -> Self {
        Self {
            mat: y.transpose().kronecker(x),
            dim_hilbert: x.nrows(),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim_hilbert(&self) -> usize {
        self.dim_hilbert
    }

    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            mat: &self.mat * s,
            dim_hilbert: self.dim_hilbert,
        }
    }

    /// vec(I), the fixed vector of every unital map.
    pub fn vec_identity(dim_hilbert: usize) -> CVector {
        vec_col(&CMatrix::identity(dim_hilbert, dim_hilbert))
    }

    /// Max-entry defect of S(A†) = S(A)† over the matrix-unit basis.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim_hilbert;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let mut e = CMatrix::zeros(n, n);
                e[(i, j)] = Complex64::new(1.0, 0.0);
                let se = self.apply_unchecked(&e);
                let edag = e.adjoint();
                let sed = self.apply_unchecked(&edag);
                worst = worst.max(linalg::max_abs(&(sed - se.adjoint())));
            }
        }
        worst
    }

    /// ‖vec(I)†·S − vec(I)†‖∞: trace-preservation defect.
    pub fn trace_preservation_defect(&self) -> f64 {
        let vi = Self::vec_identity(self.dim_hilbert);
        let row = self.mat.adjoint() * &vi;
        (row - vi).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// ‖S·vec(I) − vec(I)‖∞: unitality defect.
    pub fn unitality_defect(&self) -> f64 {
        let vi = Self::vec_identity(self.dim_hilbert);
        let col = &self.mat * &vi;
        (col - vi).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// ‖vec(I)†·S‖∞: trace-annihilation defect of a generator.
    pub fn trace_annihilation_defect(&self) -> f64 {
        let vi = Self::vec_identity(self.dim_hilbert);
        (self.mat.adjoint() * vi).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn apply_unchecked(&self, a: &CMatrix) -> CMatrix {
        unvec_col(&(&self.mat * vec_col(a)), self.dim_hilbert)
    }
}

impl std::ops::Add<&Superoperator> for &Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.dim_hilbert, rhs.dim_hilbert);
        Superoperator {
            mat: &self.mat + &rhs.mat,
            dim_hilbert: self.dim_hilbert,
        }
    }
}

impl std::ops::Sub<&Superoperator> for &Superoperator {
    type Output = Superoperator;
    fn sub(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.dim_hilbert, rhs.dim_hilbert);
        Superoperator {
            mat: &self.mat - &rhs.mat,
            dim_hilbert: self.dim_hilbert,
        }
    }
}

impl std::ops::Mul<&Superoperator> for &Superoperator {
    type Output = Superoperator;
    fn mul(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.dim_hilbert, rhs.dim_hilbert);
        Superoperator {
            mat: &self.mat * &rhs.mat,
            dim_hilbert: self.dim_hilbert,
        }
    }
}

/// U∨U(g): the unitary conjugation superoperator of a group element.
pub fn uvee(rep: &LieRepresentation, g: &GroupElement) -> Result<Superoperator> {
    if g.dim() != rep.dim_hilbert() {
        return Err(Error::InvalidInput(format!(
            "group element dimension {} does not match representation dimension {}",
            g.dim(),
            rep.dim_hilbert()
        )));
    }
    Ok(Superoperator::conjugation(g.unitary()))
}

/// Exact twirl over a finite atomic probability measure: Σ w_i U∨U(g_i).
pub fn twirl_exact(
    rep: &LieRepresentation,
    mu: &[(GroupElement, f64)],
) -> Result<Superoperator> {
    if mu.is_empty() {
        return Err(Error::InvalidInput("measure needs at least one atom".into()));
    }
    let mut total = 0.0;
    for (_, w) in mu {
        if *w < 0.0 || !w.is_finite() {
            return Err(Error::InvalidInput(format!("negative or non-finite weight {w}")));
        }
        total += w;
    }
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::InvalidInput(format!(
            "weights sum to {total}, expected 1"
        )));
    }
    let mut s = Superoperator::zero(rep.dim_hilbert());
    for (g, w) in mu {
        let u = uvee(rep, g)?;
        s = &s + &u.scale(Complex64::new(*w, 0.0));
    }
    Ok(s)
}

/// The Gaussian part of the generator:
/// 𝔊 = Σ_j bʲ[X̂_j, ·] + Σ_{jk} aʲᵏ({X̂_j X̂_k, ·} − 2 X̂_j (·) X̂_k).
pub fn gaussian_generator(
    rep: &LieRepresentation,
    b: &linalg::RVector,
    a: &linalg::RMatrix,
) -> Result<Superoperator> {
    let n = rep.dim_group();
    if b.len() != n || a.nrows() != n || a.ncols() != n {
        return Err(Error::InvalidInput(
            "drift/diffusion dimensions do not match the representation".into(),
        ));
    }
    let sym = (a + a.transpose()) * 0.5;
    let min_eig = nalgebra::SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -GENERATOR_PSD_TOL {
        return Err(Error::InvalidInput(format!(
            "diffusion matrix is not PSD: min eigenvalue {min_eig:e}"
        )));
    }
    let nh = rep.dim_hilbert();
    let drift = rep.algebra_element(b)?;
    let mut out = Superoperator::commutator(&drift);
    // Anticommutator piece through P = Σ a_jk X̂_j X̂_k.
    let mut p = CMatrix::zeros(nh, nh);
    for j in 0..n {
        for k in 0..n {
            if a[(j, k)] != 0.0 {
                p += rep.generator(j) * rep.generator(k) * Complex64::new(a[(j, k)], 0.0);
            }
        }
    }
    out = &out + &Superoperator::anticommutator(&p);
    for j in 0..n {
        for k in 0..n {
            if a[(j, k)] != 0.0 {
                let sw = Superoperator::sandwich(rep.generator(j), rep.generator(k));
                out = &out - &sw.scale(Complex64::new(2.0 * a[(j, k)], 0.0));
            }
        }
    }
    Ok(out)
}

/// The jump part of the generator for a finite atomic Lévy measure:
/// 𝔚 = Σ_k w_k (U∨U(g_k) − I) + Σ_j cʲ(η) [X̂_j, ·],
/// which equals ∫ (U∨U(g) − I − Σ_j x̄ʲ(g)[X̂_j, ·]) dη(g).
pub fn jump_generator(rep: &LieRepresentation, eta: &LevyMeasure) -> Result<Superoperator> {
    let mut out = Superoperator::zero(rep.dim_hilbert());
    if eta.is_empty() {
        return Ok(out);
    }
    let id = Superoperator::identity(rep.dim_hilbert());
    for atom in eta.atoms() {
        let u = uvee(rep, &atom.point)?;
        out = &out + &(&u - &id).scale(Complex64::new(atom.weight, 0.0));
    }
    let c = drift_correction(rep, eta)?;
    let comp = rep.algebra_element(&c)?;
    out = &out + &Superoperator::commutator(&comp);
    Ok(out)
}

/// The full twirling-semigroup generator 𝔏 = 𝔊 + 𝔚 of a kit.
pub fn full_generator(rep: &LieRepresentation, kit: &RepresentationKit) -> Result<Superoperator> {
    if kit.dim() != rep.dim_group() {
        return Err(Error::InvalidInput(format!(
            "kit dimension {} does not match representation dimension {}",
            kit.dim(),
            rep.dim_group()
        )));
    }
    let g = gaussian_generator(rep, kit.b(), kit.a())?;
    let w = jump_generator(rep, kit.eta())?;
    Ok(&g + &w)
}

/// exp(t·L) by scaling-and-squaring.
pub fn evolve(l: &Superoperator, t: f64) -> Result<Superoperator> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::InvalidInput(format!("evolution time must be ≥ 0, got {t}")));
    }
    let mat = expm(&(&l.mat * Complex64::new(t, 0.0)))?;
    Ok(Superoperator {
        mat,
        dim_hilbert: l.dim_hilbert,
    })
}

/// unvec(S·vec(A)).
pub fn apply(s: &Superoperator, a: &CMatrix) -> Result<CMatrix> {
    let n = s.dim_hilbert;
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::InvalidInput(format!(
            "operator is {}×{}, superoperator expects {n}×{n}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(s.apply_unchecked(a))
}
