//! Dense complex linear algebra used across the crate: matrix exponential,
//! principal logarithm of unitaries, Hermitian eigenvalue helpers and the
//! column-stacking vec/unvec maps.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Column-stacking vectorization: vec(A) stacks the columns of A.
///
/// With this convention vec(X·A·Y) = (Yᵀ ⊗ X)·vec(A).
pub fn vec_col(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

/// Inverse of [`vec_col`] for square matrices.
pub fn unvec_col(v: &CVector, n: usize) -> CMatrix {
    assert_eq!(v.len(), n * n, "unvec length mismatch");
    CMatrix::from_column_slice(n, n, v.as_slice())
}

/// Conjugate transpose.
pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

/// Max-magnitude entry.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// ‖A‖₁ (max absolute column sum), the norm driving the expm scaling choice.
fn one_norm(a: &CMatrix) -> f64 {
    let mut best = 0.0_f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

fn is_diagonal(a: &CMatrix) -> bool {
    let n = a.nrows();
    for j in 0..n {
        for i in 0..n {
            if i != j && a[(i, j)] != Complex64::new(0.0, 0.0) {
                return false;
            }
        }
    }
    true
}

/// sinh(z)/z with a series fallback near zero.
fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        ONE + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

/// Closed-form exponential of a 2×2 complex matrix.
///
/// Writes M = c·I + A₀ with A₀ traceless; A₀² = δ²·I, so
/// exp(M) = e^c (cosh δ · I + sinh(δ)/δ · A₀).
pub fn expm_2x2(m: &CMatrix) -> CMatrix {
    debug_assert_eq!(m.nrows(), 2);
    let c = (m[(0, 0)] + m[(1, 1)]) * 0.5;
    let a = m[(0, 0)] - c;
    let b = m[(0, 1)];
    let d = m[(1, 0)];
    let delta = (a * a + b * d).sqrt();
    let ch = delta.cosh();
    let sh = sinhc(delta);
    let ec = c.exp();
    CMatrix::from_row_slice(
        2,
        2,
        &[
            ec * (ch + sh * a),
            ec * (sh * b),
            ec * (sh * d),
            ec * (ch - sh * a),
        ],
    )
}

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.53939833006323e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068;
const THETA_13: f64 = 5.371920351148152;

fn pade_low(a: &CMatrix, coeffs: &[f64]) -> Result<CMatrix> {
    let n = a.nrows();
    let id = CMatrix::identity(n, n);
    let a2 = a * a;
    // Even powers a^0, a^2, a^4, ...
    let mut powers = vec![id.clone()];
    for _ in 0..(coeffs.len() / 2 - 1) {
        powers.push(powers.last().unwrap() * &a2);
    }
    let mut u = CMatrix::zeros(n, n);
    let mut v = CMatrix::zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        u += p * Complex64::new(coeffs[2 * k + 1], 0.0);
        v += p * Complex64::new(coeffs[2 * k], 0.0);
    }
    let u = a * u;
    solve_pade(u, v)
}

fn pade_13(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let id = CMatrix::identity(n, n);
    let b: Vec<Complex64> = PADE_13.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let u_inner = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = a * (&a6 * u_inner + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let v_inner = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * v_inner + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    solve_pade(u, v)
}

fn solve_pade(u: CMatrix, v: CMatrix) -> Result<CMatrix> {
    let p = &v + &u;
    let q = &v - &u;
    q.lu()
        .solve(&p)
        .ok_or_else(|| Error::NumericFailure("singular Padé denominator in expm".into()))
}

/// Matrix exponential by scaling-and-squaring with Padé approximants
/// (backward-error driven order selection).
///
/// Diagonal and 2×2 inputs take exact closed-form paths.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericFailure("non-finite entries in expm".into()));
    }
    if n == 0 {
        return Ok(a.clone());
    }
    if is_diagonal(a) {
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = a[(i, i)].exp();
        }
        return Ok(out);
    }
    if n == 2 {
        return Ok(expm_2x2(a));
    }
    let nrm = one_norm(a);
    if nrm <= THETA_3 {
        return pade_low(a, &PADE_3);
    }
    if nrm <= THETA_5 {
        return pade_low(a, &PADE_5);
    }
    if nrm <= THETA_7 {
        return pade_low(a, &PADE_7);
    }
    if nrm <= THETA_9 {
        return pade_low(a, &PADE_9);
    }
    let s = if nrm <= THETA_13 {
        0
    } else {
        (nrm / THETA_13).log2().ceil() as u32
    };
    if s > 64 {
        return Err(Error::NumericFailure(format!(
            "matrix norm {nrm:e} exceeds the expm scaling range"
        )));
    }
    let scaled = a * Complex64::new((0.5f64).powi(s as i32), 0.0);
    let mut r = pade_13(&scaled)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// Eigendecomposition of a Hermitian matrix: (eigenvalues ascending, unitary
/// eigenvector matrix). The input is Hermitized first so callers can pass
/// matrices with rounding-level asymmetry.
pub fn hermitian_eigen(m: &CMatrix) -> (RVector, CMatrix) {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let se = nalgebra::SymmetricEigen::new(h);
    // Sort ascending for stable downstream clustering.
    let n = se.eigenvalues.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals = RVector::from_iterator(n, idx.iter().map(|&i| se.eigenvalues[i]));
    let mut vecs = CMatrix::zeros(n, n);
    for (k, &i) in idx.iter().enumerate() {
        vecs.set_column(k, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn hermitian_min_eig(m: &CMatrix) -> f64 {
    let (vals, _) = hermitian_eigen(m);
    vals[0]
}

/// Eigenvalues of a Hermitian matrix sorted descending.
pub fn hermitian_eigenvalues_desc(m: &CMatrix) -> Vec<f64> {
    let (vals, _) = hermitian_eigen(m);
    let mut v: Vec<f64> = vals.iter().copied().collect();
    v.reverse();
    v
}

/// Unitarity defect ‖U†U − I‖∞ (max-entry).
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let d = u.adjoint() * u - CMatrix::identity(n, n);
    max_abs(&d)
}

fn diagonalize_unitary_at_tol(u: &CMatrix, cluster_tol: f64) -> CMatrix {
    // U = H1 + i·H2 with commuting Hermitian parts; diagonalize H1, then
    // resolve each near-degenerate H1 cluster by the projected H2. Conjugate
    // eigenphase pairs ±θ share cos θ, so the second stage is essential.
    let h1 = (u + u.adjoint()) * Complex64::new(0.5, 0.0);
    let h2 = (u - u.adjoint()) * Complex64::new(0.0, -0.5);
    let (vals, mut vecs) = hermitian_eigen(&h1);
    let n = u.nrows();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (vals[end] - vals[start]).abs() <= cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            let sub = vecs.columns(start, end - start).into_owned();
            let block = sub.adjoint() * &h2 * &sub;
            let (_, w) = hermitian_eigen(&block);
            let rotated = sub * w;
            for (k, col) in (start..end).zip(rotated.column_iter()) {
                vecs.set_column(k, &col);
            }
        }
        start = end;
    }
    vecs
}

/// Principal logarithm of a unitary matrix, returned as a skew-Hermitian
/// matrix with eigenvalues i·θ, θ ∈ (−π, π].
pub fn log_unitary(u: &CMatrix) -> Result<CMatrix> {
    let n = u.nrows();
    assert_eq!(n, u.ncols(), "log_unitary needs a square matrix");
    let scale = (n as f64).max(1.0);
    for cluster_tol in [1e-12, 1e-9, 1e-6, 1e-3] {
        let v = diagonalize_unitary_at_tol(u, cluster_tol);
        let d = v.adjoint() * u * &v;
        let mut off = 0.0_f64;
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    off = off.max(d[(i, j)].norm());
                }
            }
        }
        if off <= 1e-8 * scale {
            let mut ld = CMatrix::zeros(n, n);
            for i in 0..n {
                let z = d[(i, i)];
                ld[(i, i)] = Complex64::new(0.0, z.arg());
            }
            let l = &v * ld * v.adjoint();
            // Kill rounding-level Hermitian residue.
            return Ok((&l - l.adjoint()) * Complex64::new(0.5, 0.0));
        }
    }
    Err(Error::NumericFailure(
        "failed to diagonalize unitary for principal log".into(),
    ))
}

/// Principal square root by the Denman–Beavers iteration. Converges for
/// matrices with no eigenvalues on the closed negative real axis.
fn sqrtm_db(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = CMatrix::identity(n, n);
    for _ in 0..80 {
        let y_inv = y
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NumericFailure("singular iterate in sqrtm".into()))?;
        let z_inv = z
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NumericFailure("singular iterate in sqrtm".into()))?;
        let y_next = (&y + z_inv) * Complex64::new(0.5, 0.0);
        let z_next = (&z + y_inv) * Complex64::new(0.5, 0.0);
        let delta = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if delta < 1e-14 * y.norm().max(1.0) {
            break;
        }
    }
    let resid = (&y * &y - a).norm();
    if resid > 1e-8 * a.norm().max(1.0) {
        return Err(Error::NumericFailure(format!(
            "sqrtm did not converge (residual {resid:e})"
        )));
    }
    Ok(y)
}

/// Principal matrix logarithm by inverse scaling-and-squaring: repeated
/// square roots to approach the identity, then the Gregory series
/// log X = 2·atanh((X−I)(X+I)⁻¹). Fails when the spectrum touches the
/// closed negative real axis or zero.
pub fn logm_principal(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "logm needs a square matrix");
    let id = CMatrix::identity(n, n);
    let mut x = a.clone();
    let mut sqrt_count = 0u32;
    while (&x - &id).norm() > 0.3 {
        if sqrt_count >= 40 {
            return Err(Error::NumericFailure(
                "logm: matrix did not approach identity under square roots".into(),
            ));
        }
        x = sqrtm_db(&x)?;
        sqrt_count += 1;
    }
    let num = &x - &id;
    let den = (&x + &id)
        .try_inverse()
        .ok_or_else(|| Error::NumericFailure("logm: singular X + I".into()))?;
    let z = num * den;
    let z2 = &z * &z;
    let mut term = z.clone();
    let mut sum = CMatrix::zeros(n, n);
    for k in (1..=21).step_by(2) {
        sum += &term * Complex64::new(1.0 / k as f64, 0.0);
        term = &term * &z2;
    }
    let l = sum * Complex64::new(2.0_f64.powi(sqrt_count as i32 + 1), 0.0);
    // Backward check; the heuristic caller must be able to trust a success.
    let back = expm(&l)?;
    let resid = (back - a).norm();
    if resid > 1e-8 * a.norm().max(1.0) {
        return Err(Error::NumericFailure(format!(
            "logm backward residual {resid:e}"
        )));
    }
    Ok(l)
}

/// Square root of a real symmetric PSD matrix. Eigenvalues in
/// [−clamp_tol, 0) are clamped to zero; anything below fails.
pub fn psd_sqrt(a: &RMatrix, clamp_tol: f64) -> Result<RMatrix> {
    let sym = (a + a.transpose()) * 0.5;
    let se = nalgebra::SymmetricEigen::new(sym);
    let mut vals = se.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < -clamp_tol {
            return Err(Error::InvalidInput(format!(
                "matrix is not PSD: eigenvalue {v:e} below -{clamp_tol:e}"
            )));
        }
        *v = v.max(0.0).sqrt();
    }
    Ok(&se.eigenvectors * RMatrix::from_diagonal(&vals) * se.eigenvectors.transpose())
}
