//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the numerical routines under test: high-precision
//! arithmetic, closed forms, brute-force search and naive f64 formulas only.

#![allow(dead_code)]

use std::f64::consts::PI;

use astro_float::{BigFloat, Consts, RoundingMode};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

const PREC: usize = 512;
const RM: RoundingMode = RoundingMode::ToEven;

fn big(x: f64) -> BigFloat {
    BigFloat::from_f64(x, PREC)
}

fn to_f64(x: &BigFloat) -> f64 {
    x.to_string()
        .parse()
        .unwrap_or_else(|e| panic!("cannot read back {x}: {e}"))
}

fn binomial(m: u64, j: u64) -> BigFloat {
    let mut acc = BigFloat::from_u64(1, PREC);
    for i in 0..j {
        acc = acc
            .mul(&BigFloat::from_u64(m - i, PREC), PREC, RM)
            .div(&BigFloat::from_u64(i + 1, PREC), PREC, RM);
    }
    acc
}

/// `∫₀ʳ sinh^{n-1}(u) du` from the binomial expansion
/// `sinh^m u = 2^{-m} Σ_j (-1)^j C(m,j) e^{(m-2j)u}`, in 512-bit arithmetic
/// so the alternating sum does not cancel away at small `r`.
pub fn radial_integral_exp_sum(n: usize, r: f64) -> f64 {
    let mut cc = Consts::new().expect("constants cache");
    let m = (n - 1) as u64;
    let r_big = big(r);
    let mut sum = BigFloat::from_u64(0, PREC);
    for j in 0..=m {
        let c = m as i64 - 2 * j as i64;
        let term = if c == 0 {
            r_big.clone()
        } else {
            let cb = BigFloat::from_i64(c, PREC);
            let e = cb.mul(&r_big, PREC, RM).exp(PREC, RM, &mut cc);
            e.sub(&BigFloat::from_u64(1, PREC), PREC, RM).div(&cb, PREC, RM)
        };
        let term = term.mul(&binomial(m, j), PREC, RM);
        sum = if j % 2 == 0 {
            sum.add(&term, PREC, RM)
        } else {
            sum.sub(&term, PREC, RM)
        };
    }
    let scale = BigFloat::from_u64(2, PREC).powi(m as usize, PREC, RM);
    to_f64(&sum.div(&scale, PREC, RM))
}

/// `|S^{n-1}| = 2 π^{n/2} / Γ(n/2)` by the recursion `|S^{n+1}| = 2π |S^{n-1}| / n`.
pub fn sphere_area_recursive(n: usize) -> f64 {
    let (mut area, mut dim) = if n.is_multiple_of(2) { (2.0 * PI, 2) } else { (2.0, 1) };
    while dim < n {
        area *= 2.0 * PI / dim as f64;
        dim += 2;
    }
    area
}

/// `ln κ(r) = ln((1 + cosh r)/sinh r · √cosh 6r)` in 512-bit arithmetic.
pub fn log_kappa_hp(r: f64) -> f64 {
    let mut cc = Consts::new().expect("constants cache");
    let rb = big(r);
    let one = BigFloat::from_u64(1, PREC);
    let num = one.add(&rb.cosh(PREC, RM, &mut cc), PREC, RM);
    let den = rb.sinh(PREC, RM, &mut cc);
    let six = BigFloat::from_u64(6, PREC).mul(&rb, PREC, RM);
    let root = six.cosh(PREC, RM, &mut cc).sqrt(PREC, RM);
    to_f64(
        &num.div(&den, PREC, RM)
            .mul(&root, PREC, RM)
            .ln(PREC, RM, &mut cc),
    )
}

/// `ln H` from the closed display
/// `(n+1)² ln(1 + e²(n+1)²(1 + cosh r)² cosh 6r / (sinh²r sin²(π/k)))`,
/// in 512-bit arithmetic.
pub fn log_packing_display_hp(n: usize, k: u32, r: f64) -> f64 {
    let mut cc = Consts::new().expect("constants cache");
    let rb = big(r);
    let one = BigFloat::from_u64(1, PREC);
    let dim = BigFloat::from_u64((n + 1) as u64, PREC);
    let e = one.exp(PREC, RM, &mut cc);
    let pi = cc.pi(PREC, RM);
    let s = pi
        .div(&BigFloat::from_u64(u64::from(k), PREC), PREC, RM)
        .sin(PREC, RM, &mut cc);
    let one_plus_cosh = one.add(&rb.cosh(PREC, RM, &mut cc), PREC, RM);
    let six = BigFloat::from_u64(6, PREC).mul(&rb, PREC, RM);
    let numerator = e
        .mul(&dim, PREC, RM)
        .mul(&one_plus_cosh, PREC, RM)
        .powi(2, PREC, RM)
        .mul(&six.cosh(PREC, RM, &mut cc), PREC, RM);
    let denominator = rb
        .sinh(PREC, RM, &mut cc)
        .mul(&s, PREC, RM)
        .powi(2, PREC, RM);
    let inner = one.add(&numerator.div(&denominator, PREC, RM), PREC, RM);
    to_f64(
        &dim.powi(2, PREC, RM)
            .mul(&inner.ln(PREC, RM, &mut cc), PREC, RM),
    )
}

/// Ball volume from elementary antiderivatives, for `n ∈ {2, 3, 4}`.
pub fn ball_volume_closed(n: usize, r: f64) -> f64 {
    match n {
        2 => 4.0 * PI * (0.5 * r).sinh().powi(2),
        3 => PI * ((2.0 * r).sinh() - 2.0 * r),
        4 => {
            let c = r.cosh();
            2.0 * PI * PI * (c.powi(3) / 3.0 - c + 2.0 / 3.0)
        }
        _ => panic!("no closed form wired up for n = {n}"),
    }
}

/// `ln 𝒜`-objective at `r` from the closed ball volumes and the display
/// formula, in plain f64. Only meant for moderate `r` and `n ≤ 4`.
pub fn naive_log_objective(n: usize, k: u32, r: f64) -> f64 {
    let dim = (n + 1) as f64;
    let s = (PI / f64::from(k)).sin();
    let x = 1.0f64.exp() * dim * (1.0 + r.cosh()) * (6.0 * r).cosh().sqrt() / (r.sinh() * s);
    ball_volume_closed(n, r).ln() - dim * dim * (x * x).ln_1p()
}

/// Maximum of `f` over `points` geometrically spaced radii in `[lo, hi]`.
pub fn dense_grid_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let ratio = (hi / lo).ln();
    (0..points)
        .map(|i| {
            let r = lo * (ratio * i as f64 / (points - 1) as f64).exp();
            (r, f(r))
        })
        .fold((f64::NAN, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

/// Root of `g` on `[a, b]` by plain bisection, assuming a sign change.
pub fn bisect(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (g(m) > 0.0) == (ga > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

pub fn random_unit<R: Rng>(dim: usize, rng: &mut R) -> DVector<f64> {
    let v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let len = v.norm();
    v / len
}

/// `max |Av|` over `samples` random unit vectors, then polished by a
/// shrinking random local search started from the best sample. Only ever
/// evaluates `|Av|`, so it never exceeds the true norm.
pub fn sampled_norm<R: Rng>(a: &DMatrix<f64>, samples: usize, rng: &mut R) -> f64 {
    let dim = a.ncols();
    let mut best_v = random_unit(dim, rng);
    let mut best = (a * &best_v).norm();
    for _ in 1..samples {
        let v = random_unit(dim, rng);
        let val = (a * &v).norm();
        if val > best {
            best = val;
            best_v = v;
        }
    }
    let mut step = 0.1;
    while step > 1e-7 {
        let mut improved = false;
        for _ in 0..50 {
            let candidate = &best_v + random_unit(dim, rng) * step;
            let candidate = &candidate / candidate.norm();
            let val = (a * &candidate).norm();
            if val > best {
                best = val;
                best_v = candidate;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Minimize `objective` over `(ρ, w)` with `ρ ∈ [0, rho_max]` and `w` a unit
/// vector in `R^t`, by random restarts and shrinking random perturbations.
pub fn random_search_min<R: Rng>(
    objective: impl Fn(f64, &DVector<f64>) -> f64,
    t: usize,
    rho_max: f64,
    rng: &mut R,
) -> f64 {
    let mut best_rho = 0.0;
    let mut best_w = random_unit(t, rng);
    let mut best = objective(best_rho, &best_w);
    for _ in 0..400 {
        let rho = rng.random_range(0.0..=rho_max);
        let w = random_unit(t, rng);
        let v = objective(rho, &w);
        if v < best {
            (best, best_rho, best_w) = (v, rho, w);
        }
    }
    let mut step = 0.25 * rho_max.max(1.0);
    while step > 1e-9 {
        let mut improved = false;
        for _ in 0..40 {
            let rho = (best_rho + step * rng.random_range(-1.0..=1.0)).max(0.0);
            let w = &best_w + random_unit(t, rng) * step;
            let w = &w / w.norm();
            let v = objective(rho, &w);
            if v < best {
                (best, best_rho, best_w) = (v, rho, w);
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Runtime of the slowest of `reps` runs of `f`, in seconds.
pub fn time_it<T>(reps: usize, mut f: impl FnMut() -> T) -> f64 {
    (0..reps)
        .map(|_| {
            let start = std::time::Instant::now();
            std::hint::black_box(f());
            start.elapsed().as_secs_f64()
        })
        .fold(0.0, f64::max)
}
