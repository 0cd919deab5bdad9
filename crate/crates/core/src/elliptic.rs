//! Finite-order isometries and the lower bounds on `‖A - I‖` they satisfy.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lorentz::{self, haar_orthogonal, LorentzMatrix, Matrix};

/// Max-entry distance from the identity below which a power counts as `I`.
pub const ORDER_TOL: f64 = 1e-8;

/// Singular values of `A - I` below this count as zero when finding `Fix(A)`.
pub const FIXED_SPACE_TOL: f64 = 1e-8;

/// Fixed-set distances below this are treated as "A fixes e₁".
pub const FIXES_BASEPOINT_TOL: f64 = 1e-9;

const REORTHONORMALIZE_EVERY: u32 = 16;
const MAX_SAMPLE_RETRIES: usize = 64;

/// Canonical block data of an element of `E(n)`: rotation blocks by
/// `angles`, then `flips` eigenvalues `-1`, then `fixed` eigenvalues `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticSpec {
    n: usize,
    angles: Vec<f64>,
    flips: usize,
    fixed: usize,
}

impl EllipticSpec {
    pub fn new(n: usize, angles: Vec<f64>, flips: usize, fixed: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::usage(format!("dimension n = {n} must be >= 2")));
        }
        if 2 * angles.len() + flips + fixed != n {
            return Err(Error::usage(format!(
                "2 * {} angles + {flips} flips + {fixed} fixed != n = {n}",
                angles.len()
            )));
        }
        if let Some(bad) = angles.iter().find(|&&t| !(t > 0.0 && t < PI)) {
            return Err(Error::usage(format!("rotation angle {bad} is not inside (0, pi)")));
        }
        Ok(EllipticSpec {
            n,
            angles,
            flips,
            fixed,
        })
    }

    /// A single rotation block by `theta`, the rest fixed.
    pub fn single_rotation(n: usize, theta: f64) -> Result<Self> {
        EllipticSpec::new(n, vec![theta], 0, n.saturating_sub(2))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn flips(&self) -> usize {
        self.flips
    }

    pub fn fixed(&self) -> usize {
        self.fixed
    }
}

/// `diag(1, A_1, …, A_l, -I_s, I_t)` with `A_i` the rotation by `θ_i`.
pub fn block_form(spec: &EllipticSpec) -> LorentzMatrix {
    let size = spec.n + 1;
    let mut m = Matrix::identity(size, size);
    let mut at = 1;
    for &theta in &spec.angles {
        let (s, c) = theta.sin_cos();
        m[(at, at)] = c;
        m[(at, at + 1)] = -s;
        m[(at + 1, at)] = s;
        m[(at + 1, at + 1)] = c;
        at += 2;
    }
    for _ in 0..spec.flips {
        m[(at, at)] = -1.0;
        at += 1;
    }
    LorentzMatrix::from_matrix_unchecked(m)
}

/// A finite-order isometry with its exact order and the distance from `e₁`
/// to its fixed set in hyperbolic space.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticElement {
    pub matrix: LorentzMatrix,
    pub order: u32,
    pub delta: f64,
    /// The `E(n)` representative this element is conjugate to.
    pub canonical: EllipticSpec,
}

/// Smallest `m ≤ k_max` with `A^m = I` (max-entry tolerance [`ORDER_TOL`]).
pub fn order_of(a: &LorentzMatrix, k_max: u32) -> Option<u32> {
    let size = a.as_matrix().nrows();
    let id = Matrix::identity(size, size);
    let mut power = a.clone();
    for m in 1..=k_max {
        let p = power.as_matrix();
        if p.iter().any(|x| !x.is_finite()) {
            return None;
        }
        if (p - &id).amax() < ORDER_TOL {
            return Some(m);
        }
        power = power.compose(a);
        if m % REORTHONORMALIZE_EVERY == 0 {
            if let Ok(fixed) = power.reorthonormalize() {
                power = fixed;
            }
        }
    }
    None
}

/// Distance from `e₁` to `Fix(A) ∩ ℍⁿ`.
///
/// `Fix(A)` is the kernel `V` of `A - I`, read off an SVD. The Minkowski
/// projection of `e₁` onto `V` is the nearest point direction; normalizing it
/// onto the sheet gives the foot point `p`, and `sinh d(e₁,p)` is the
/// Euclidean length of its spatial part.
pub fn fixed_set_distance(a: &LorentzMatrix) -> Result<f64> {
    let foot = fixed_set_foot(a)?;
    Ok(foot.rows(1, foot.len() - 1).norm().asinh())
}

/// Closest point of `Fix(A) ∩ ℍⁿ` to `e₁`, as a hyperboloid vector.
pub fn fixed_set_foot(a: &LorentzMatrix) -> Result<DVector<f64>> {
    let kernel = fixed_space_basis(a);
    if kernel.ncols() == 0 {
        return Err(Error::invariant(
            "A - I has no null space; A fixes no point (not elliptic)",
        ));
    }
    let mut jk = kernel.clone();
    jk.row_mut(0).neg_mut();
    let gram = kernel.transpose() * &jk;
    let rhs = -kernel.row(0).transpose();
    let coef = gram
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::invariant("fixed space is degenerate for the Minkowski form"))?;
    let mut p = &kernel * &coef;
    let q = lorentz::mink(&p, &p);
    if !(q < 0.0) {
        return Err(Error::invariant(format!(
            "fixed space misses the hyperboloid (<p,p> = {q}); A is not elliptic"
        )));
    }
    p /= (-q).sqrt();
    if p[0] < 0.0 {
        p.neg_mut();
    }
    Ok(p)
}

/// Orthonormal basis (as columns) of the numerical null space of `A - I`.
pub fn fixed_space_basis(a: &LorentzMatrix) -> Matrix {
    let d = a.minus_identity();
    let size = d.nrows();
    let svd = d.svd(false, true);
    let v_t = svd.v_t.expect("SVD computed with V^T");
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < FIXED_SPACE_TOL)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        Matrix::zeros(size, 0)
    } else {
        Matrix::from_columns(&cols)
    }
}

/// Builds an elliptic element of exact order `k` whose fixed set passes at
/// distance `delta` from `e₁`.
///
/// A canonical `A'` is drawn with angles `2π m_i / k` (resampled until its
/// order is exactly `k`), then conjugated by `Â · boost(delta)` with `Â`
/// a Haar-random element of `E(n)`. When `A'` fixes only `e₁` the fixed point
/// of the result is `Â · boost(delta) · e₁`, so `delta` is exact; otherwise
/// the fixed set is larger and the distance is measured.
pub fn sample_elliptic(n: usize, k: u32, delta: f64, seed: u64) -> Result<EllipticElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_elliptic_with(n, k, delta, &mut rng)
}

pub(crate) fn sample_elliptic_with<R: Rng + ?Sized>(
    n: usize,
    k: u32,
    delta: f64,
    rng: &mut R,
) -> Result<EllipticElement> {
    if k < 2 {
        return Err(Error::usage(format!(
            "torsion order must satisfy k ≥ 2, got k = {k} (a nontrivial elliptic has order > 1)"
        )));
    }
    if n < 2 {
        return Err(Error::usage(format!("dimension n = {n} must be >= 2")));
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::usage(format!("delta = {delta} must be finite and >= 0")));
    }

    let mut canonical = None;
    for _ in 0..MAX_SAMPLE_RETRIES {
        let spec = random_canonical_spec(n, k, rng)?;
        if order_of(&block_form(&spec), k) == Some(k) {
            canonical = Some(spec);
            break;
        }
    }
    let spec = canonical.ok_or_else(|| {
        Error::Numerical {
            message: format!(
                "no canonical form of exact order {k} found in {MAX_SAMPLE_RETRIES} draws (n = {n})"
            ),
            last_iterate: f64::NAN,
        }
    })?;

    let rotation = LorentzMatrix::embed_rotation(&haar_orthogonal(n, rng))?;
    let mover = rotation.compose(&LorentzMatrix::boost(n, delta)?);
    let matrix = mover.conjugate(&block_form(&spec));
    let delta = if spec.fixed == 0 {
        delta
    } else {
        fixed_set_distance(&matrix)?
    };
    Ok(EllipticElement {
        matrix,
        order: k,
        delta,
        canonical: spec,
    })
}

fn random_canonical_spec<R: Rng + ?Sized>(n: usize, k: u32, rng: &mut R) -> Result<EllipticSpec> {
    if k == 2 {
        // No angle 2πm/2 lies strictly inside (0, π): order 2 means flips only.
        let flips = rng.random_range(1..=n);
        return EllipticSpec::new(n, Vec::new(), flips, n - flips);
    }
    let blocks = rng.random_range(1..=n / 2);
    let max_m = (k - 1) / 2;
    let angles = (0..blocks)
        .map(|_| 2.0 * PI * f64::from(rng.random_range(1..=max_m)) / f64::from(k))
        .collect();
    let rest = n - 2 * blocks;
    let flips = if k.is_multiple_of(2) { rng.random_range(0..=rest) } else { 0 };
    EllipticSpec::new(n, angles, flips, rest - flips)
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::usage(format!(
            "torsion order bound must satisfy k ≥ 2, got k = {k}"
        )));
    }
    Ok(())
}

/// `c_k = 2 sin²(π/k) e⁻²`, the uniform lower bound on `‖A - I‖` for
/// elliptic `A` of order at most `k`.
pub fn c_k(k: u32) -> Result<f64> {
    check_k(k)?;
    let s = (PI / f64::from(k)).sin();
    Ok(2.0 * s * s * (-2.0f64).exp())
}

/// Lower bound on `‖A - I‖` for elliptic `A` of order at most `k` whose fixed
/// set is at distance `delta` from `e₁`:
/// `2 sin(π/k)` when `delta = 0`, otherwise
/// `max(2 sinh²δ sin²(π/k), 2 sin(π/k) e^{-2δ})`.
pub fn norm_lower_bound(k: u32, delta: f64) -> Result<f64> {
    check_k(k)?;
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::usage(format!("delta = {delta} must be finite and >= 0")));
    }
    let s = (PI / f64::from(k)).sin();
    if delta == 0.0 {
        return Ok(2.0 * s);
    }
    let far = 2.0 * delta.sinh().powi(2) * s * s;
    let near = 2.0 * s * (-2.0 * delta).exp();
    Ok(far.max(near))
}

/// [`norm_lower_bound`] for a measured distance, treating distances below
/// [`FIXES_BASEPOINT_TOL`] as zero.
pub fn norm_lower_bound_measured(k: u32, measured_delta: f64) -> Result<f64> {
    let delta = if measured_delta < FIXES_BASEPOINT_TOL {
        0.0
    } else {
        measured_delta
    };
    norm_lower_bound(k, delta)
}

/// Distance at which the two branches of [`norm_lower_bound`] cross.
///
/// `sinh²δ · e^{2δ} = 1/sin(π/k)` with `sinh δ · e^δ = (e^{2δ} - 1)/2`
/// gives `e^{2δ} = 1 + 2/√sin(π/k)`.
pub fn branch_crossover(k: u32) -> Result<f64> {
    check_k(k)?;
    let s = (PI / f64::from(k)).sin();
    Ok(0.5 * (2.0 / s.sqrt()).ln_1p())
}

/// Positive root of `2τ(1+τ)² = 1`, by bisection on `[0.25, 0.35]`.
pub fn jorgensen_tau() -> f64 {
    let f = |t: f64| 2.0 * t * (1.0 + t) * (1.0 + t) - 1.0;
    let (mut lo, mut hi) = (0.25, 0.35);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::operator_norm;
    use approx::assert_relative_eq;

    #[test]
    fn quarter_turn_block() {
        let spec = EllipticSpec::new(2, vec![PI / 2.0], 0, 0).unwrap();
        let m = block_form(&spec).into_matrix();
        let expected = Matrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]);
        assert!((m - expected).amax() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        assert!(EllipticSpec::new(3, vec![1.0], 0, 0).is_err());
        assert!(EllipticSpec::new(2, vec![PI], 0, 0).is_err());
        assert!(EllipticSpec::new(2, vec![0.0], 0, 0).is_err());
        assert!(EllipticSpec::new(1, vec![], 1, 0).is_err());
        assert!(EllipticSpec::new(3, vec![], 2, 1).is_ok());
    }

    #[test]
    fn orders() {
        assert_eq!(order_of(&LorentzMatrix::identity(3), 5), Some(1));
        let r5 = block_form(&EllipticSpec::new(2, vec![2.0 * PI / 5.0], 0, 0).unwrap());
        assert_eq!(order_of(&r5, 10), Some(5));
        assert_eq!(order_of(&r5, 4), None);
        let inv = block_form(&EllipticSpec::new(3, vec![], 2, 1).unwrap());
        assert_eq!(order_of(&inv, 5), Some(2));
        assert_eq!(order_of(&LorentzMatrix::boost(3, 1.0).unwrap(), 100), None);
    }

    #[test]
    fn order_detection_survives_reorthonormalization() {
        let r = block_form(&EllipticSpec::new(4, vec![2.0 * PI / 37.0, 4.0 * PI / 37.0], 0, 0).unwrap());
        assert_eq!(order_of(&r, 40), Some(37));
    }

    #[test]
    fn c_k_values() {
        assert_relative_eq!(c_k(2).unwrap(), 0.270670566473, max_relative = 1e-11);
        assert_relative_eq!(c_k(3).unwrap(), 0.203002924855, max_relative = 1e-11);
        assert!(c_k(1).is_err());
        assert!(c_k(0).is_err());
        for k in 2..100 {
            assert!(c_k(k + 1).unwrap() < c_k(k).unwrap());
        }
    }

    #[test]
    fn norm_bound_values() {
        assert_eq!(norm_lower_bound(2, 0.0).unwrap(), 2.0);
        assert_relative_eq!(norm_lower_bound(2, 1.0).unwrap(), 2.0 * 1f64.sinh().powi(2), max_relative = 1e-15);
        assert!(norm_lower_bound(3, -0.1).is_err());
        assert_eq!(norm_lower_bound_measured(5, 1e-12).unwrap(), norm_lower_bound(5, 0.0).unwrap());
    }

    #[test]
    fn tau_is_the_cubic_root() {
        let t = jorgensen_tau();
        assert!((2.0 * t * (1.0 + t).powi(2) - 1.0).abs() <= 1e-13);
        assert!(t > 0.2971);
        for k in 2..50 {
            assert!(t > c_k(k).unwrap());
        }
    }

    #[test]
    fn fixed_distance_in_e_n_is_zero() {
        let spec = EllipticSpec::new(4, vec![1.0, 2.0], 0, 0).unwrap();
        assert!(fixed_set_distance(&block_form(&spec)).unwrap() < 1e-15);
        let spec = EllipticSpec::new(4, vec![1.0], 1, 1).unwrap();
        assert!(fixed_set_distance(&block_form(&spec)).unwrap() < 1e-15);
    }

    #[test]
    fn fixed_distance_rejects_loxodromics() {
        assert!(fixed_set_distance(&LorentzMatrix::boost(3, 1.0).unwrap()).is_err());
    }

    #[test]
    fn sampler_places_fixed_point() {
        let e = sample_elliptic(2, 3, 1.0, 9).unwrap();
        assert_eq!(e.order, 3);
        assert_relative_eq!(e.delta, 1.0);
        assert_relative_eq!(fixed_set_distance(&e.matrix).unwrap(), 1.0, max_relative = 1e-10);
        assert_eq!(order_of(&e.matrix, 3), Some(3));
    }

    #[test]
    fn sampler_at_zero_delta_stays_in_e_n() {
        let e = sample_elliptic(4, 6, 0.0, 1).unwrap();
        let m = e.matrix.as_matrix();
        assert!((m[(0, 0)] - 1.0).abs() < 1e-14);
        for i in 1..5 {
            assert!(m[(0, i)].abs() < 1e-14 && m[(i, 0)].abs() < 1e-14);
        }
    }

    #[test]
    fn sampler_rejects_bad_arguments() {
        assert!(matches!(sample_elliptic(3, 1, 0.5, 0), Err(Error::Usage(_))));
        assert!(sample_elliptic(1, 3, 0.5, 0).is_err());
        assert!(sample_elliptic(3, 3, -1.0, 0).is_err());
    }

    #[test]
    fn block_norm_equality_case() {
        for k in [2u32, 3, 4, 5, 7, 12] {
            let spec = if k == 2 {
                EllipticSpec::new(3, vec![], 1, 2).unwrap()
            } else {
                EllipticSpec::single_rotation(3, 2.0 * PI / f64::from(k)).unwrap()
            };
            let a = block_form(&spec);
            let norm = operator_norm(&a.minus_identity()).unwrap();
            assert!((norm - 2.0 * (PI / f64::from(k)).sin()).abs() <= 1e-12, "k = {k}");
        }
    }
}
