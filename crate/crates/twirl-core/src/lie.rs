//! Finite-dimensional unitary Lie-group representations as tuples of
//! skew-Hermitian generators, together with the exponential chart and the
//! adapted coordinates x̄ (principal log inside the cutoff radius, zero
//! outside).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix, RVector};

/// Entrywise skew-Hermiticity tolerance, relative to the max entry.
pub const SKEW_TOL: f64 = 1e-12;
/// Unitarity tolerance for group elements (max-entry norm of U†U − I).
pub const UNITARY_TOL: f64 = 1e-10;
/// Residual tolerance for membership of a log in the generator span.
pub const CHART_RESIDUAL_TOL: f64 = 1e-8;

pub fn is_skew_hermitian(m: &CMatrix, tol: f64) -> bool {
    let scale = linalg::max_abs(m).max(1.0);
    let s = m + m.adjoint();
    linalg::max_abs(&s) <= tol * scale
}

/// Which concrete family a representation was built from.
#[derive(Debug, Clone, PartialEq)]
pub enum ReprFamily {
    /// Spin-j representation of SU(2); stores 2j.
    Su2Spin { two_j: u32 },
    /// Defining representation of SU(N) in the generalized Gell-Mann basis.
    SuNDefining { n: usize },
    /// One-dimensional charge representation of U(1).
    U1Charges { charges: Vec<i64> },
    /// Torus representation: one diagonal generator per integer charge row.
    TorusCharges { rows: Vec<Vec<i64>> },
    /// User-supplied generator list.
    Custom,
}

/// A group element realized through its image U(g), with canonical
/// coordinates recorded when the element was produced inside the chart.
#[derive(Debug, Clone)]
pub struct GroupElement {
    unitary: CMatrix,
    coords: Option<RVector>,
}

impl GroupElement {
    pub fn from_unitary(unitary: CMatrix) -> Result<Self> {
        if unitary.nrows() != unitary.ncols() {
            return Err(Error::InvalidInput("group element must be square".into()));
        }
        let defect = linalg::unitarity_defect(&unitary);
        if defect > UNITARY_TOL {
            return Err(Error::InvalidInput(format!(
                "matrix is not unitary: defect {defect:e}"
            )));
        }
        Ok(Self { unitary, coords: None })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            unitary: CMatrix::identity(dim, dim),
            coords: None,
        }
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    /// Coordinates recorded at construction time (only by [`LieRepresentation::group_exp`]
    /// inside the cutoff radius).
    pub fn coords(&self) -> Option<&RVector> {
        self.coords.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    /// Group product g·h.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            unitary: &self.unitary * &other.unitary,
            coords: None,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            unitary: self.unitary.adjoint(),
            coords: None,
        }
    }
}

/// A unitary representation presented through n skew-Hermitian generators
/// X̂_j = π_U(ξ_j) on an N-dimensional Hilbert space.
#[derive(Debug, Clone)]
pub struct LieRepresentation {
    dim_group: usize,
    dim_hilbert: usize,
    generators: Vec<CMatrix>,
    cutoff_radius: f64,
    family: ReprFamily,
    /// Real 2N²×n matrix whose columns are the stacked (re, im) parts of the
    /// generators; drives least-squares coordinate recovery.
    coord_basis: RMatrix,
    /// Minimum-norm pseudo-inverse of `coord_basis`.
    coord_pinv: RMatrix,
    /// Rank of the generator span (dim of the image of π_U).
    span_rank: usize,
}

fn real_stack(m: &CMatrix) -> RVector {
    let n2 = m.len();
    let mut v = RVector::zeros(2 * n2);
    for (k, z) in m.iter().enumerate() {
        v[k] = z.re;
        v[k + n2] = z.im;
    }
    v
}

impl LieRepresentation {
    fn assemble(generators: Vec<CMatrix>, family: ReprFamily, cutoff: Option<f64>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidSpec("need at least one generator".into()));
        }
        let dim_hilbert = generators[0].nrows();
        for (j, g) in generators.iter().enumerate() {
            if g.nrows() != dim_hilbert || g.ncols() != dim_hilbert {
                return Err(Error::InvalidSpec(format!(
                    "generator {j} has inconsistent dimensions"
                )));
            }
            if !is_skew_hermitian(g, SKEW_TOL) {
                return Err(Error::InvalidSpec(format!(
                    "generator {j} is not skew-Hermitian"
                )));
            }
        }
        let dim_group = generators.len();

        let cutoff_radius = match cutoff {
            Some(r) => {
                if r <= 0.0 || !r.is_finite() {
                    return Err(Error::InvalidSpec("cutoff radius must be positive".into()));
                }
                r
            }
            None => {
                let max_op = generators
                    .iter()
                    .map(|g| {
                        let gram = g.adjoint() * g;
                        linalg::hermitian_eigenvalues_desc(&gram)[0].max(0.0).sqrt()
                    })
                    .fold(0.0_f64, f64::max);
                if max_op > 0.0 {
                    0.9 * std::f64::consts::PI / max_op
                } else {
                    // Trivial representation: any radius works.
                    std::f64::consts::PI
                }
            }
        };

        let n2 = dim_hilbert * dim_hilbert;
        let mut coord_basis = RMatrix::zeros(2 * n2, dim_group);
        for (j, g) in generators.iter().enumerate() {
            coord_basis.set_column(j, &real_stack(g));
        }
        let svd = coord_basis.clone().svd(true, true);
        let rank_eps = 1e-12 * svd.singular_values[0].max(1.0);
        let span_rank = svd.rank(rank_eps);
        let coord_pinv = svd
            .pseudo_inverse(rank_eps)
            .map_err(|e| Error::NumericFailure(format!("generator SVD failed: {e}")))?;

        Ok(Self {
            dim_group,
            dim_hilbert,
            generators,
            cutoff_radius,
            family,
            coord_basis,
            coord_pinv,
            span_rank,
        })
    }

    /// Spin-j representation of su(2): X̂_k = −i·J_k on N = 2j+1 dimensions.
    ///
    /// For j = 1/2 this is X̂_k = −(i/2)σ_k.
    pub fn su2_spin(j: f64) -> Result<Self> {
        let two_j = 2.0 * j;
        if j < 0.0 || !two_j.is_finite() || (two_j - two_j.round()).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!(
                "spin must be a non-negative half-integer, got {j}"
            )));
        }
        let two_j = two_j.round() as u32;
        let n = two_j as usize + 1;
        let jf = two_j as f64 / 2.0;
        let m_of = |k: usize| jf - k as f64;

        let mut jz = CMatrix::zeros(n, n);
        let mut jp = CMatrix::zeros(n, n);
        for k in 0..n {
            jz[(k, k)] = Complex64::new(m_of(k), 0.0);
            if k > 0 {
                // J₊ raises m: |j, m⟩ → |j, m+1⟩ lives one index up.
                let m = m_of(k);
                let amp = (jf * (jf + 1.0) - m * (m + 1.0)).sqrt();
                jp[(k - 1, k)] = Complex64::new(amp, 0.0);
            }
        }
        let jm = jp.adjoint();
        let jx = (&jp + &jm) * Complex64::new(0.5, 0.0);
        let jy = (&jp - &jm) * Complex64::new(0.0, -0.5);
        let mi = Complex64::new(0.0, -1.0);
        let gens = vec![jx * mi, jy * mi, jz * mi];
        Self::assemble(gens, ReprFamily::Su2Spin { two_j }, None)
    }

    /// Defining representation of SU(N): X̂_a = −(i/2)λ_a over the
    /// generalized Gell-Mann basis (n = N²−1 generators).
    pub fn sun_defining(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpec(format!(
                "suN_defining needs N ≥ 2, got {n}"
            )));
        }
        let mut lambdas: Vec<CMatrix> = Vec::with_capacity(n * n - 1);
        for i in 0..n {
            for j in (i + 1)..n {
                let mut s = CMatrix::zeros(n, n);
                s[(i, j)] = Complex64::new(1.0, 0.0);
                s[(j, i)] = Complex64::new(1.0, 0.0);
                lambdas.push(s);
                let mut a = CMatrix::zeros(n, n);
                a[(i, j)] = Complex64::new(0.0, -1.0);
                a[(j, i)] = Complex64::new(0.0, 1.0);
                lambdas.push(a);
            }
        }
        for l in 1..n {
            let norm = (2.0 / (l as f64 * (l as f64 + 1.0))).sqrt();
            let mut d = CMatrix::zeros(n, n);
            for k in 0..l {
                d[(k, k)] = Complex64::new(norm, 0.0);
            }
            d[(l, l)] = Complex64::new(-norm * l as f64, 0.0);
            lambdas.push(d);
        }
        let mi2 = Complex64::new(0.0, -0.5);
        let gens = lambdas.into_iter().map(|l| l * mi2).collect();
        Self::assemble(gens, ReprFamily::SuNDefining { n }, None)
    }

    /// Charge representation of U(1): single generator i·diag(k₁,…,k_N).
    pub fn u1_charges(charges: &[i64]) -> Result<Self> {
        if charges.is_empty() {
            return Err(Error::InvalidSpec("u1_charges needs at least one charge".into()));
        }
        let n = charges.len();
        let mut g = CMatrix::zeros(n, n);
        for (k, &c) in charges.iter().enumerate() {
            g[(k, k)] = Complex64::new(0.0, c as f64);
        }
        Self::assemble(
            vec![g],
            ReprFamily::U1Charges {
                charges: charges.to_vec(),
            },
            None,
        )
    }

    /// Torus representation: generator j is i·diag(rows[j]).
    ///
    /// Rows must yield HS-orthogonal generators after traceless projection.
    pub fn torus_charges(rows: &[Vec<i64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidSpec("torus_charges needs at least one row".into()));
        }
        let n = rows[0].len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSpec(
                "torus charge rows must be non-empty and equal length".into(),
            ));
        }
        // Orthogonality of the projected generators reduces to
        // Σ k_a k_b − (Σ k_a)(Σ k_b)/N = 0 for distinct rows.
        for a in 0..rows.len() {
            for b in (a + 1)..rows.len() {
                let dot: i64 = rows[a].iter().zip(&rows[b]).map(|(x, y)| x * y).sum();
                let sa: i64 = rows[a].iter().sum();
                let sb: i64 = rows[b].iter().sum();
                let proj = dot as f64 - (sa as f64) * (sb as f64) / n as f64;
                if proj.abs() > 1e-9 {
                    return Err(Error::InvalidSpec(format!(
                        "torus charge rows {a} and {b} are not HS-orthogonal after traceless projection"
                    )));
                }
            }
        }
        let gens = rows
            .iter()
            .map(|row| {
                let mut g = CMatrix::zeros(n, n);
                for (k, &c) in row.iter().enumerate() {
                    g[(k, k)] = Complex64::new(0.0, c as f64);
                }
                g
            })
            .collect();
        Self::assemble(
            gens,
            ReprFamily::TorusCharges { rows: rows.to_vec() },
            None,
        )
    }

    /// Representation from an explicit generator list. No orthogonality is
    /// required; coordinates fall back to minimum-norm least squares.
    pub fn custom(generators: Vec<CMatrix>, cutoff_radius: Option<f64>) -> Result<Self> {
        Self::assemble(generators, ReprFamily::Custom, cutoff_radius)
    }

    /// Replace the cutoff radius (chart size) with an explicit value.
    pub fn with_cutoff_radius(mut self, r: f64) -> Result<Self> {
        if r <= 0.0 || !r.is_finite() {
            return Err(Error::InvalidSpec("cutoff radius must be positive".into()));
        }
        self.cutoff_radius = r;
        Ok(self)
    }

    pub fn dim_group(&self) -> usize {
        self.dim_group
    }

    pub fn dim_hilbert(&self) -> usize {
        self.dim_hilbert
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn generator(&self, j: usize) -> &CMatrix {
        &self.generators[j]
    }

    pub fn cutoff_radius(&self) -> f64 {
        self.cutoff_radius
    }

    pub fn family(&self) -> &ReprFamily {
        &self.family
    }

    /// Rank of the generator span; smaller than n when π_U has a kernel.
    pub fn span_rank(&self) -> usize {
        self.span_rank
    }

    /// Σ_j x_j X̂_j.
    pub fn algebra_element(&self, x: &RVector) -> Result<CMatrix> {
        if x.len() != self.dim_group {
            return Err(Error::InvalidInput(format!(
                "coordinate vector has length {}, expected {}",
                x.len(),
                self.dim_group
            )));
        }
        let mut m = CMatrix::zeros(self.dim_hilbert, self.dim_hilbert);
        for (j, g) in self.generators.iter().enumerate() {
            if x[j] != 0.0 {
                m += g * Complex64::new(x[j], 0.0);
            }
        }
        Ok(m)
    }

    /// exp(Σ_j x_j X̂_j), with coordinates recorded iff ‖x‖ < cutoff radius.
    pub fn group_exp(&self, x: &RVector) -> Result<GroupElement> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinates".into()));
        }
        let m = self.algebra_element(x)?;
        let unitary = linalg::expm(&m)?;
        let coords = if x.norm() < self.cutoff_radius {
            Some(x.clone())
        } else {
            None
        };
        Ok(GroupElement { unitary, coords })
    }

    /// Adapted coordinates x̄(g): the coefficients of the principal log in
    /// the generator span if g lies inside the chart, `None` otherwise.
    /// Callers must treat `None` as x̄ = 0.
    pub fn adapted_coordinates(&self, g: &GroupElement) -> Result<Option<RVector>> {
        if g.dim() != self.dim_hilbert {
            return Err(Error::InvalidInput(format!(
                "group element dimension {} does not match representation dimension {}",
                g.dim(),
                self.dim_hilbert
            )));
        }
        let defect = linalg::unitarity_defect(g.unitary());
        if defect > UNITARY_TOL {
            return Err(Error::InvalidInput(format!(
                "group element is not unitary: defect {defect:e}"
            )));
        }
        let l = linalg::log_unitary(g.unitary())?;
        let target = real_stack(&l);
        let x = &self.coord_pinv * &target;
        let residual = (&self.coord_basis * &x - &target).norm();
        let l_norm = l.norm();
        if residual > CHART_RESIDUAL_TOL * (1.0 + l_norm) || x.norm() >= self.cutoff_radius {
            return Ok(None);
        }
        Ok(Some(x))
    }

    /// x̄(g) with the compactly-supported convention: zero outside the chart.
    pub fn adapted_or_zero(&self, g: &GroupElement) -> Result<RVector> {
        Ok(self
            .adapted_coordinates(g)?
            .unwrap_or_else(|| RVector::zeros(self.dim_group)))
    }
}
