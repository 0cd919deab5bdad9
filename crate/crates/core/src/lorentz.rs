//! Hyperboloid-model linear algebra.
//!
//! Hyperbolic n-space is the upper sheet `⟨x,x⟩ = -1, x₁ > 0` of Minkowski
//! space `R^{n+1}` with the form `⟨x,y⟩ = -x₁y₁ + x₂y₂ + … + x_{n+1}y_{n+1}`,
//! so that `cosh d(x,y) = -⟨x,y⟩`. Coordinate 1 (index 0 here) is timelike.
//! Isometries are the Lorentz matrices `A` with `AᵀJA = J`,
//! `J = diag(-1, 1, …, 1)`, that preserve the upper sheet.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Tolerance for structural invariants (`AᵀJA = J`, `QᵀQ = I`, on-sheet). The
/// Lorentz and on-sheet checks scale it by the squared magnitude of the input.
pub const STRUCTURE_TOL: f64 = 1e-9;

/// `|δ|` above which `cosh δ` leaves the double range.
pub const MAX_BOOST: f64 = 700.0;

const NORM_REL_TOL: f64 = 1e-12;
const NORM_MAX_ITERS: usize = 10_000;
const MAX_SQUARINGS: usize = 64;

/// A coordinate vector in `R^{n+1}` with the Minkowski form.
#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiVector(DVector<f64>);

impl MinkowskiVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::usage(format!(
                "Minkowski vector needs n + 1 >= 3 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::usage("Minkowski vector has a non-finite coordinate"));
        }
        Ok(MinkowskiVector(DVector::from_vec(coords)))
    }

    /// The standard basis vector `e_{index+1}` of `R^{n+1}`.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut v = DVector::zeros(n + 1);
        v[index] = 1.0;
        MinkowskiVector(v)
    }

    /// Hyperbolic dimension `n` (one less than the coordinate count).
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.0
    }
}

/// `⟨x,y⟩ = -x₁y₁ + Σ_{i≥2} x_i y_i`.
pub fn minkowski_inner(x: &MinkowskiVector, y: &MinkowskiVector) -> Result<f64> {
    if x.0.len() != y.0.len() {
        return Err(Error::usage(format!(
            "dimension mismatch: {} vs {} coordinates",
            x.0.len(),
            y.0.len()
        )));
    }
    Ok(mink(&x.0, &y.0))
}

#[inline]
pub(crate) fn mink(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    -x[0] * y[0] + x.rows(1, x.len() - 1).dot(&y.rows(1, y.len() - 1))
}

/// A point on the upper sheet of the hyperboloid.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicPoint(MinkowskiVector);

impl HyperbolicPoint {
    /// Checks `⟨v,v⟩ = -1` (tolerance scaled by `max(1, |v|²)`, the size of the
    /// rounding error of the form itself) and `v₁ ≥ 1`.
    pub fn new(v: MinkowskiVector) -> Result<Self> {
        let q = mink(&v.0, &v.0);
        let scale = v.0.norm_squared().max(1.0);
        if (q + 1.0).abs() > STRUCTURE_TOL * scale {
            return Err(Error::invariant(format!(
                "point is off the hyperboloid: <x,x> = {q}"
            )));
        }
        if v.0[0] < 1.0 - STRUCTURE_TOL {
            return Err(Error::invariant(format!(
                "point is not on the upper sheet: x1 = {}",
                v.0[0]
            )));
        }
        Ok(HyperbolicPoint(v))
    }

    /// The basepoint `e₁ = (1, 0, …, 0)`.
    pub fn basepoint(n: usize) -> Self {
        HyperbolicPoint(MinkowskiVector::basis(n, 0))
    }

    pub(crate) fn new_unchecked(v: DVector<f64>) -> Self {
        HyperbolicPoint(MinkowskiVector(v))
    }

    pub fn vector(&self) -> &MinkowskiVector {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn coords(&self) -> &[f64] {
        self.0.coords()
    }
}

/// Hyperbolic distance `arccosh(-⟨x,y⟩)`.
///
/// The argument is clamped up to 1 only when it is within `1e-6` of it;
/// anything lower means one of the inputs is not really on the sheet.
pub fn distance(x: &HyperbolicPoint, y: &HyperbolicPoint) -> Result<f64> {
    let c = -minkowski_inner(&x.0, &y.0)?;
    if c < 1.0 - 1e-6 {
        return Err(Error::invariant(format!(
            "-<x,y> = {c} < 1; inputs are not hyperboloid points"
        )));
    }
    Ok(c.max(1.0).acosh())
}

/// An element of `O⁺(1,n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzMatrix {
    m: Matrix,
}

impl LorentzMatrix {
    /// Validates `AᵀJA = J` and `a₁₁ ≥ 1`.
    ///
    /// The Lorentz defect is measured relative to `max(1, max|a_ij|²)`: the
    /// rounding error of `AᵀJA` grows with the square of the entries, and far
    /// translations have entries near `cosh d`.
    pub fn from_matrix(m: Matrix) -> Result<Self> {
        if !m.is_square() || m.nrows() < 3 {
            return Err(Error::usage(format!(
                "Lorentz matrix must be square of size n + 1 >= 3, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::usage("matrix has a non-finite entry"));
        }
        let a = LorentzMatrix { m };
        let defect = a.lorentz_defect() / a.max_abs_entry().powi(2).max(1.0);
        if defect > STRUCTURE_TOL {
            return Err(Error::invariant(format!(
                "A^T J A differs from J by {defect:e}"
            )));
        }
        if a.m[(0, 0)] < 1.0 - STRUCTURE_TOL {
            return Err(Error::invariant(format!(
                "a11 = {} < 1; matrix swaps the sheets",
                a.m[(0, 0)]
            )));
        }
        Ok(a)
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix) -> Self {
        LorentzMatrix { m }
    }

    pub fn identity(n: usize) -> Self {
        LorentzMatrix {
            m: Matrix::identity(n + 1, n + 1),
        }
    }

    /// Translation by `delta` along the geodesic through `e₁` in the `e₂` direction.
    pub fn boost(n: usize, delta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::usage(format!("dimension n = {n} must be >= 2")));
        }
        if !delta.is_finite() {
            return Err(Error::usage("boost distance must be finite"));
        }
        if delta.abs() > MAX_BOOST {
            return Err(Error::Overflow(format!(
                "boost distance {delta} exceeds {MAX_BOOST}"
            )));
        }
        let (s, c) = (delta.sinh(), delta.cosh());
        let mut m = Matrix::identity(n + 1, n + 1);
        m[(0, 0)] = c;
        m[(0, 1)] = s;
        m[(1, 0)] = s;
        m[(1, 1)] = c;
        Ok(LorentzMatrix { m })
    }

    /// The block matrix `diag(1, Q)`, an element of the stabilizer `E(n)` of `e₁`.
    pub fn embed_rotation(q: &Matrix) -> Result<Self> {
        if !q.is_square() || q.nrows() < 2 {
            return Err(Error::usage(format!(
                "rotation must be square of size n >= 2, got {}x{}",
                q.nrows(),
                q.ncols()
            )));
        }
        let n = q.nrows();
        let defect = (q.transpose() * q - Matrix::identity(n, n)).amax();
        if !(defect <= STRUCTURE_TOL) {
            return Err(Error::usage(format!(
                "matrix is not orthogonal: |Q^T Q - I| = {defect:e}"
            )));
        }
        let mut m = Matrix::identity(n + 1, n + 1);
        m.view_mut((1, 1), (n, n)).copy_from(q);
        Ok(LorentzMatrix { m })
    }

    /// `A⁻¹ = J Aᵀ J`.
    pub fn inverse(&self) -> Self {
        let mut inv = self.m.transpose();
        let size = inv.nrows();
        for i in 1..size {
            inv[(0, i)] = -inv[(0, i)];
            inv[(i, 0)] = -inv[(i, 0)];
        }
        LorentzMatrix { m: inv }
    }

    pub fn compose(&self, other: &LorentzMatrix) -> LorentzMatrix {
        LorentzMatrix {
            m: &self.m * &other.m,
        }
    }

    /// `self · other · self⁻¹`.
    pub fn conjugate(&self, other: &LorentzMatrix) -> LorentzMatrix {
        LorentzMatrix {
            m: &self.m * &other.m * self.inverse().m,
        }
    }

    pub fn apply(&self, v: &MinkowskiVector) -> Result<MinkowskiVector> {
        if v.0.len() != self.m.nrows() {
            return Err(Error::usage(format!(
                "dimension mismatch: matrix of size {} applied to vector of length {}",
                self.m.nrows(),
                v.0.len()
            )));
        }
        Ok(MinkowskiVector(&self.m * &v.0))
    }

    pub fn apply_point(&self, x: &HyperbolicPoint) -> Result<HyperbolicPoint> {
        let v = self.apply(&x.0)?;
        Ok(HyperbolicPoint(v))
    }

    /// Image of the basepoint, i.e. the first column.
    pub fn image_of_basepoint(&self) -> HyperbolicPoint {
        HyperbolicPoint::new_unchecked(self.m.column(0).into_owned())
    }

    /// Hyperbolic distance `d(e₁, A e₁) = arccosh(a₁₁)`.
    pub fn translation_length_at_basepoint(&self) -> f64 {
        let spatial = self.m.view((1, 0), (self.m.nrows() - 1, 1)).norm();
        spatial.asinh()
    }

    /// Hyperbolic dimension `n`.
    pub fn dim(&self) -> usize {
        self.m.nrows() - 1
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.m.amax()
    }

    /// `max_ij |(AᵀJA - J)_ij|`.
    pub fn lorentz_defect(&self) -> f64 {
        let size = self.m.nrows();
        let mut ja = self.m.clone();
        ja.row_mut(0).neg_mut();
        let mut g = self.m.transpose() * ja;
        g[(0, 0)] += 1.0;
        for i in 1..size {
            g[(i, i)] -= 1.0;
        }
        g.amax()
    }

    pub fn determinant(&self) -> f64 {
        self.m.clone().determinant()
    }

    /// `A - I_{n+1}` as a plain matrix.
    pub fn minus_identity(&self) -> Matrix {
        let size = self.m.nrows();
        &self.m - Matrix::identity(size, size)
    }

    /// Snaps a drifted product back onto `O⁺(1,n)` by Gram–Schmidt on the
    /// columns with respect to the Minkowski form.
    pub fn reorthonormalize(&self) -> Result<LorentzMatrix> {
        let size = self.m.nrows();
        let mut cols: Vec<DVector<f64>> = Vec::with_capacity(size);
        for j in 0..size {
            let mut c = self.m.column(j).into_owned();
            for (i, prev) in cols.iter().enumerate() {
                // ⟨prev,prev⟩ is -1 for the first column and +1 afterwards.
                let sign = if i == 0 { -1.0 } else { 1.0 };
                let coef = sign * mink(&c, prev);
                c.axpy(-coef, prev, 1.0);
            }
            let q = mink(&c, &c);
            let expect_timelike = j == 0;
            if (expect_timelike && q >= 0.0) || (!expect_timelike && q <= 0.0) {
                return Err(Error::invariant(
                    "columns are too far from Lorentz-orthonormal to re-orthonormalize",
                ));
            }
            c /= q.abs().sqrt();
            if expect_timelike && c[0] < 0.0 {
                c.neg_mut();
            }
            cols.push(c);
        }
        Ok(LorentzMatrix {
            m: Matrix::from_columns(&cols),
        })
    }
}

/// Largest singular value, `sqrt(r_σ(AᵀA))`.
///
/// The dominant eigenvalue of the positive-semidefinite `AᵀA` is found by
/// power iteration. Before iterating, `AᵀA` is repeatedly squared; the
/// normalized powers converge to (a multiple of) the projector onto the top
/// eigenspace, whose columns give a start vector that cannot be orthogonal to
/// that eigenspace. Iteration stops when the Rayleigh quotient changes by less
/// than `1e-12` relative.
pub fn operator_norm(a: &Matrix) -> Result<f64> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::usage("operator_norm: matrix has a non-finite entry"));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let gram = a.transpose() * a;
    let scale = gram.amax();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let m = gram / scale;
    Ok((dominant_eigenvalue_psd(&m)? * scale).sqrt())
}

fn dominant_eigenvalue_psd(m: &Matrix) -> Result<f64> {
    let size = m.nrows();

    let mut filter = m.clone();
    for _ in 0..MAX_SQUARINGS {
        let mut next = &filter * &filter;
        next = (&next + next.transpose()) * 0.5;
        let peak = next.amax();
        if peak == 0.0 {
            break;
        }
        next /= peak;
        let moved = (&next - &filter).amax();
        filter = next;
        if moved <= 1e-15 {
            break;
        }
    }

    let ones = DVector::from_element(size, 1.0 / (size as f64).sqrt());
    let mut v = &filter * &ones;
    if v.norm() < 1e-6 {
        let best = (0..size)
            .max_by(|&i, &j| filter.column(i).norm().total_cmp(&filter.column(j).norm()))
            .unwrap_or(0);
        v = filter.column(best).into_owned();
    }
    let len = v.norm();
    if len == 0.0 {
        v = ones;
    } else {
        v /= len;
    }

    let mut w = m * &v;
    let mut lambda = v.dot(&w);
    for _ in 0..NORM_MAX_ITERS {
        let len = w.norm();
        if len == 0.0 {
            return Ok(0.0);
        }
        v = &w / len;
        w = m * &v;
        let next = v.dot(&w);
        if (next - lambda).abs() <= NORM_REL_TOL * next.abs() {
            return Ok(next);
        }
        lambda = next;
    }
    Err(Error::Numerical {
        message: format!("power iteration did not converge in {NORM_MAX_ITERS} iterations"),
        last_iterate: lambda,
    })
}

/// Haar-distributed element of `O(n)`: QR of a standard Gaussian matrix with
/// the signs of `R`'s diagonal moved into `Q`.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `embed_rotation(Q₁) · boost(s) · embed_rotation(Q₂)` with Haar `Q₁, Q₂`
/// and `s` uniform in `[0, max_translation]`. Deterministic in `seed`.
pub fn random_isometry(n: usize, max_translation: f64, seed: u64) -> Result<LorentzMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_isometry_with(n, max_translation, &mut rng)
}

pub(crate) fn random_isometry_with<R: Rng + ?Sized>(
    n: usize,
    max_translation: f64,
    rng: &mut R,
) -> Result<LorentzMatrix> {
    if n < 2 {
        return Err(Error::usage(format!("dimension n = {n} must be >= 2")));
    }
    if !(max_translation >= 0.0) || !max_translation.is_finite() {
        return Err(Error::usage(format!(
            "max_translation = {max_translation} must be finite and >= 0"
        )));
    }
    let q1 = haar_orthogonal(n, rng);
    let q2 = haar_orthogonal(n, rng);
    let s = max_translation * rng.random::<f64>();
    let b = LorentzMatrix::boost(n, s)?;
    let left = LorentzMatrix::embed_rotation(&q1)?;
    let right = LorentzMatrix::embed_rotation(&q2)?;
    Ok(left.compose(&b).compose(&right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn e1(n: usize) -> HyperbolicPoint {
        HyperbolicPoint::basepoint(n)
    }

    #[test]
    fn inner_product_signature() {
        let e = MinkowskiVector::basis(3, 0);
        assert_eq!(minkowski_inner(&e, &e).unwrap(), -1.0);
        let d: f64 = 0.8;
        let x = MinkowskiVector::new(vec![d.cosh(), d.sinh(), 0.0, 0.0]).unwrap();
        assert_relative_eq!(minkowski_inner(&e, &x).unwrap(), -d.cosh());
    }

    #[test]
    fn inner_product_dimension_mismatch() {
        let a = MinkowskiVector::basis(2, 0);
        let b = MinkowskiVector::basis(3, 0);
        assert!(matches!(minkowski_inner(&a, &b), Err(Error::Usage(_))));
    }

    #[test]
    fn vector_needs_three_coordinates() {
        assert!(MinkowskiVector::new(vec![1.0, 0.0]).is_err());
        assert!(MinkowskiVector::new(vec![1.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn point_validation() {
        assert!(HyperbolicPoint::new(MinkowskiVector::new(vec![1.0, 1.0, 0.0]).unwrap()).is_err());
        let lower = MinkowskiVector::new(vec![-1.0, 0.0, 0.0]).unwrap();
        assert!(HyperbolicPoint::new(lower).is_err());
    }

    #[test]
    fn distances_along_a_geodesic() {
        let n = 3;
        assert_eq!(distance(&e1(n), &e1(n)).unwrap(), 0.0);
        let t = 1.7;
        let p = LorentzMatrix::boost(n, t).unwrap().apply_point(&e1(n)).unwrap();
        assert_relative_eq!(distance(&e1(n), &p).unwrap(), t, max_relative = 1e-12);
        let a = LorentzMatrix::boost(n, 1.0).unwrap().apply_point(&e1(n)).unwrap();
        let b = LorentzMatrix::boost(n, -1.0).unwrap().apply_point(&e1(n)).unwrap();
        assert_relative_eq!(distance(&a, &b).unwrap(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn distance_rejects_off_sheet_inputs() {
        let x = HyperbolicPoint::new_unchecked(DVector::from_vec(vec![0.5, 0.0, 0.0]));
        assert!(matches!(distance(&x, &e1(2)), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn boost_basics() {
        let n = 4;
        assert_eq!(LorentzMatrix::boost(n, 0.0).unwrap(), LorentzMatrix::identity(n));
        let d: f64 = 0.9;
        let img = LorentzMatrix::boost(n, d).unwrap().image_of_basepoint();
        assert_eq!(img.coords(), &[d.cosh(), d.sinh(), 0.0, 0.0, 0.0]);
        let ab = LorentzMatrix::boost(n, 0.3)
            .unwrap()
            .compose(&LorentzMatrix::boost(n, 1.1).unwrap());
        let c = LorentzMatrix::boost(n, 1.4).unwrap();
        assert!((ab.as_matrix() - c.as_matrix()).amax() < 1e-12);
        assert!(matches!(LorentzMatrix::boost(n, 701.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn boost_norm_is_exponential() {
        for &d in &[0.1, 0.5, 1.0, 2.0, 5.0] {
            let b = LorentzMatrix::boost(3, d).unwrap();
            assert_relative_eq!(operator_norm(b.as_matrix()).unwrap(), f64::exp(d), max_relative = 1e-12);
            assert_relative_eq!(
                operator_norm(b.inverse().as_matrix()).unwrap(),
                operator_norm(b.as_matrix()).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn inverse_of_boost_and_identity() {
        let b = LorentzMatrix::boost(2, 0.7).unwrap();
        let bm = LorentzMatrix::boost(2, -0.7).unwrap();
        assert!((b.inverse().as_matrix() - bm.as_matrix()).amax() < 1e-15);
        assert_eq!(LorentzMatrix::identity(3).inverse(), LorentzMatrix::identity(3));
    }

    #[test]
    fn embedded_rotations_fix_basepoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = haar_orthogonal(4, &mut rng);
        let a = LorentzMatrix::embed_rotation(&q).unwrap();
        assert_eq!(a.apply_point(&e1(4)).unwrap().coords(), e1(4).coords());
        assert!((a.inverse().as_matrix() - a.as_matrix().transpose()).amax() == 0.0);
        assert_relative_eq!(operator_norm(a.as_matrix()).unwrap(), 1.0, max_relative = 1e-12);
        assert_eq!(
            LorentzMatrix::embed_rotation(&Matrix::identity(3, 3)).unwrap(),
            LorentzMatrix::identity(3)
        );
        let mut bad = Matrix::identity(3, 3);
        bad[(0, 1)] = 0.1;
        assert!(matches!(LorentzMatrix::embed_rotation(&bad), Err(Error::Usage(_))));
    }

    #[test]
    fn operator_norm_of_identity_and_zero() {
        assert_eq!(operator_norm(&Matrix::identity(5, 5)).unwrap(), 1.0);
        assert_eq!(operator_norm(&Matrix::zeros(4, 4)).unwrap(), 0.0);
    }

    #[test]
    fn operator_norm_handles_start_vector_orthogonal_to_top() {
        // all-ones is orthogonal to the dominant direction (1, -1, 0)
        let mut a = Matrix::zeros(3, 3);
        a[(0, 0)] = 3.0;
        a[(0, 1)] = -3.0;
        a[(2, 2)] = 1.0;
        let expected = 3.0 * 2f64.sqrt();
        assert_relative_eq!(operator_norm(&a).unwrap(), expected, max_relative = 1e-13);
    }

    #[test]
    fn random_isometry_contract() {
        let a = random_isometry(3, 2.0, 11).unwrap();
        assert_eq!(a, random_isometry(3, 2.0, 11).unwrap());
        assert_ne!(a, random_isometry(3, 2.0, 12).unwrap());
        assert!(a.lorentz_defect() <= STRUCTURE_TOL);
        assert!(a.translation_length_at_basepoint() <= 2.0 + 1e-12);
        assert!(random_isometry(1, 1.0, 0).is_err());
        assert!(random_isometry(3, -1.0, 0).is_err());
        assert_relative_eq!(a.determinant().abs(), 1.0, max_relative = 1e-6);
    }

    #[test]
    fn from_matrix_checks_invariants() {
        let b = LorentzMatrix::boost(2, 1.0).unwrap();
        assert!(LorentzMatrix::from_matrix(b.as_matrix().clone()).is_ok());
        let mut flipped = b.as_matrix().clone();
        flipped.neg_mut();
        assert!(LorentzMatrix::from_matrix(flipped).is_err());
        let mut skew = b.into_matrix();
        skew[(2, 1)] = 0.5;
        assert!(LorentzMatrix::from_matrix(skew).is_err());
        assert!(LorentzMatrix::from_matrix(Matrix::identity(2, 2)).is_err());
    }

    #[test]
    fn reorthonormalize_repairs_drift() {
        let a = random_isometry(4, 1.5, 5).unwrap();
        let mut drifted = a.as_matrix().clone();
        drifted[(1, 2)] += 1e-7;
        drifted[(0, 3)] -= 2e-7;
        let fixed = LorentzMatrix::from_matrix_unchecked(drifted)
            .reorthonormalize()
            .unwrap();
        assert!(fixed.lorentz_defect() < 1e-12);
        assert!((fixed.as_matrix() - a.as_matrix()).amax() < 1e-5);
    }
}
