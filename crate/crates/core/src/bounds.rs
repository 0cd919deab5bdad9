//! The orbifold volume lower bound `𝒜(n,k)` and the group-order bounds
//! derived from it.
//!
//! `𝒜(n,k) = sup_{r>0} Vol(B(e₁,r)) / H(n,k,r)` where `H` caps the number of
//! group elements that fail to move `B(e₁,r)` off itself:
//!
//! ```text
//! H(n,k,r) = (2 κ(r)² (n+1)² / c_k + 1)^{(n+1)²}
//! κ(r)     = ((1 + cosh r) / sinh r) · sqrt(cosh 6r)
//! ```
//!
//! The `(n+1)²` exponent pushes `𝒜` below the smallest double for almost
//! every `(n,k)`, so everything here is carried as natural logarithms.
//! Since `c_k = 2 sin²(π/k) e⁻²`, the inner term also equals
//! `(e(n+1)(1+cosh r)/sinh r)² cosh 6r / sin²(π/k)`; the test suite checks
//! the two expressions against each other.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::logspace::{log_cosh, log_one_plus_cosh, log_sinh, softplus};
use crate::quadrature::integrate;

/// Relative accuracy of the ball-volume radial integral.
pub const QUADRATURE_REL_TOL: f64 = 1e-12;

/// Radius search window for the supremum over `r`.
///
/// Below `1e-4` the ball volume (`~ r^n`) is negligible against the packing
/// count (`~ r^{-2(n+1)²}`). Above it, `ln H` grows like `8r(n+1)²`
/// (`κ² ~ e^{2r}·e^{6r}/…`) while `ln Vol` grows like `(n-1)r`, so the
/// objective is decreasing well before `r = 60`.
pub const RADIUS_WINDOW: (f64, f64) = (1e-4, 60.0);
pub const GRID_POINTS: usize = 512;
pub const RADIUS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundQuery {
    pub n: usize,
    pub k: u32,
}

impl BoundQuery {
    pub fn new(n: usize, k: u32) -> Result<Self> {
        check_n(n)?;
        if k < 2 {
            return Err(Error::usage(format!(
                "torsion order bound must satisfy k ≥ 2, got k = {k}"
            )));
        }
        Ok(BoundQuery { n, k })
    }
}

/// `𝒜(n,k)` with the radius that attains it and its two factors, all as
/// natural logs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub n: usize,
    pub k: u32,
    pub r_star: f64,
    pub log_a: f64,
    pub log_ball_volume: f64,
    pub log_packing_count: f64,
    pub optimizer_evals: usize,
}

impl BoundResult {
    pub fn log10_a(&self) -> f64 {
        self.log_a / std::f64::consts::LN_10
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::usage(format!("dimension n = {n} must be >= 2")));
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::usage(format!("radius r = {r} must be finite and > 0")));
    }
    Ok(())
}

/// `ln κ(r)`, overflow-free for every finite `r > 0`.
pub fn log_kappa(r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(log_one_plus_cosh(r) - log_sinh(r) + 0.5 * log_cosh(6.0 * r))
}

/// `ln c_k`, computed from `ln sin` rather than from `c_k` itself.
fn log_c_k(k: u32) -> f64 {
    LN_2 + 2.0 * (PI / f64::from(k)).sin().ln() - 2.0
}

/// `ln H(n,k,r) = (n+1)² · ln(2κ(r)²(n+1)²/c_k + 1)`.
pub fn log_packing_count(n: usize, k: u32, r: f64) -> Result<f64> {
    BoundQuery::new(n, k)?;
    let dim = (n + 1) as f64;
    let inner = LN_2 + 2.0 * log_kappa(r)? + 2.0 * dim.ln() - log_c_k(k);
    Ok(dim * dim * softplus(inner))
}

/// `ln Γ(n/2 + 1)`, exact product for integer and half-integer arguments.
fn log_gamma_half_plus_one(n: usize) -> f64 {
    let mut acc = 0.0;
    let mut x = n as f64 / 2.0;
    while x >= 1.0 {
        acc += x.ln();
        x -= 1.0;
    }
    if n % 2 == 1 {
        // x == 1/2 now; Γ(1/2) = √π
        acc += x.ln() + 0.5 * PI.ln();
    }
    acc
}

/// `ln(n π^{n/2} / Γ(n/2 + 1))`.
pub fn log_sphere_area(n: usize) -> Result<f64> {
    check_n(n)?;
    Ok((n as f64).ln() + 0.5 * n as f64 * PI.ln() - log_gamma_half_plus_one(n))
}

/// Surface measure of the unit `(n-1)`-sphere.
pub fn sphere_area(n: usize) -> Result<f64> {
    Ok(log_sphere_area(n)?.exp())
}

/// `ln ∫₀ʳ sinh^{n-1}(u) du`.
///
/// The integrand is rescaled by `sinh^{n-1}(r)` so the quadrature only sees
/// values in `[0, 1]`.
pub fn log_radial_integral(n: usize, r: f64) -> Result<f64> {
    check_n(n)?;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::usage(format!("radius r = {r} must be finite and >= 0")));
    }
    if r == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let power = (n - 1) as f64;
    let top = log_sinh(r);
    let scaled = integrate(
        |u| {
            if u <= 0.0 {
                0.0
            } else {
                (power * (log_sinh(u) - top)).exp()
            }
        },
        0.0,
        r,
        QUADRATURE_REL_TOL,
    );
    Ok(power * top + scaled.ln())
}

/// `ln Vol(B(e₁, r))` in hyperbolic `n`-space.
pub fn log_ball_volume(n: usize, r: f64) -> Result<f64> {
    Ok(log_sphere_area(n)? + log_radial_integral(n, r)?)
}

/// `Vol(B(e₁, r)) = sphere_area(n) · ∫₀ʳ sinh^{n-1}(u) du`.
pub fn ball_volume(n: usize, r: f64) -> Result<f64> {
    Ok(log_ball_volume(n, r)?.exp())
}

/// `ln(Vol(B(e₁,r)) / H(n,k,r))`, the quantity maximized over `r`.
pub fn log_objective(n: usize, k: u32, r: f64) -> Result<f64> {
    Ok(log_ball_volume(n, r)? - log_packing_count(n, k, r)?)
}

/// Geometric radius grid over [`RADIUS_WINDOW`].
pub fn radius_grid(points: usize) -> Vec<f64> {
    let (lo, hi) = RADIUS_WINDOW;
    let ratio = (hi / lo).ln();
    (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                lo * (ratio * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

/// `𝒜(n,k)`: coarse maximum over a geometric grid, then golden-section
/// refinement on the neighbouring grid interval. The global grid maximum is
/// taken first, so the objective need not be unimodal.
pub fn compute_bound(q: BoundQuery) -> Result<BoundResult> {
    let BoundQuery { n, k } = BoundQuery::new(q.n, q.k)?;
    let objective = |r: f64| log_objective(n, k, r);

    let grid = radius_grid(GRID_POINTS);
    let values = grid
        .par_iter()
        .map(|&r| objective(r))
        .collect::<Result<Vec<f64>>>()?;
    let mut evals = values.len();

    let best = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > values[best] { i } else { best });
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];

    let mut failure = None;
    let (r_refined, f_refined, used) = golden_section_max(
        |r| match objective(r) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        lo,
        hi,
        RADIUS_TOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    evals += used;

    let r_star = if f_refined >= values[best] {
        r_refined
    } else {
        grid[best]
    };
    let log_ball_volume = log_ball_volume(n, r_star)?;
    let log_packing_count = log_packing_count(n, k, r_star)?;
    Ok(BoundResult {
        n,
        k,
        r_star,
        log_a: log_ball_volume - log_packing_count,
        log_ball_volume,
        log_packing_count,
        optimizer_evals: evals + 2,
    })
}

/// Golden-section search for a maximum on `[a, b]`; returns
/// `(argmax, max, evaluations)`.
pub(crate) fn golden_section_max<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> (f64, f64, usize) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evals = 2;
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        evals += 1;
    }
    if fc > fd {
        (c, fc, evals)
    } else {
        (d, fd, evals)
    }
}

/// Upper bound on the order of a finite group, or a saturation marker when
/// the bound does not fit below `2⁶³`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupOrderBound {
    Count(u64),
    ExceedsTwoPow63,
}

/// `⌊Vol(M) / 𝒜(n,k)⌋`: the order bound for an orientation-preserving
/// isometry group of a hyperbolic `n`-manifold with torsion of order `≤ k`.
pub fn hurwitz_bound(volume: f64, n: usize, k: u32) -> Result<GroupOrderBound> {
    let bound = compute_bound(BoundQuery::new(n, k)?)?;
    group_order_bound(volume, bound.log_a, 1)
}

/// `⌊2 Vol(M) / 𝒜(n,k)⌋`: the bound for torsion-limited subgroups of
/// `Out(π₁(M))` of a finite-volume manifold.
pub fn hurwitz_out_bound(volume: f64, n: usize, k: u32) -> Result<GroupOrderBound> {
    let bound = compute_bound(BoundQuery::new(n, k)?)?;
    group_order_bound(volume, bound.log_a, 2)
}

/// `⌊factor · volume / e^{log_a}⌋`, evaluated in log space.
pub fn group_order_bound(volume: f64, log_a: f64, factor: u32) -> Result<GroupOrderBound> {
    if !(volume > 0.0) || !volume.is_finite() {
        return Err(Error::usage(format!("volume = {volume} must be finite and > 0")));
    }
    group_order_bound_ln(volume.ln(), log_a, factor)
}

/// [`group_order_bound`] for a volume given by its natural log, so volumes
/// far below the smallest double are still usable.
///
/// Ratios within `1e-9` relative of an integer are snapped to it so that
/// `volume = exp(log_a)` yields exactly `factor` despite the `ln`/`exp`
/// round trip.
pub fn group_order_bound_ln(log_volume: f64, log_a: f64, factor: u32) -> Result<GroupOrderBound> {
    if !log_volume.is_finite() || !log_a.is_finite() {
        return Err(Error::usage("volume and bound logs must be finite"));
    }
    if factor == 0 {
        return Err(Error::usage("factor must be >= 1"));
    }
    let log_ratio = log_volume - log_a + f64::from(factor).ln();
    if log_ratio >= 63.0 * LN_2 {
        return Ok(GroupOrderBound::ExceedsTwoPow63);
    }
    let ratio = log_ratio.exp();
    let nearest = ratio.round();
    let value = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        ratio.floor()
    };
    if value >= 9.223_372_036_854_776e18 {
        return Ok(GroupOrderBound::ExceedsTwoPow63);
    }
    Ok(GroupOrderBound::Count(value as u64))
}
