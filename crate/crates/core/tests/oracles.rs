mod common;

use std::f64::consts::PI;

use common::*;
use nalgebra::{DMatrix, DVector};
use orbivol::bounds::{log_kappa, log_radial_integral, sphere_area};
use orbivol::elliptic::{block_form, branch_crossover, fixed_set_distance, EllipticSpec};
use orbivol::lorentz::{haar_orthogonal, operator_norm, LorentzMatrix};
use orbivol::verify::{check_entry_bound, check_separated_count};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn log_kappa_against_high_precision() {
    for r in [1e-6, 1e-3, 0.1, 0.5, 1.0, 3.0, 30.0, 100.0, 500.0] {
        let exact = log_kappa_hp(r);
        let got = log_kappa(r).unwrap();
        assert!((got - exact).abs() <= 2e-15 * exact.abs().max(1.0), "r = {r}: {got} vs {exact}");
    }
}

#[test]
fn radial_integral_against_exponential_sums() {
    for n in 2..=20 {
        for r in [0.05, 0.1, 0.3, 1.0, 2.5, 5.0, 7.5, 10.0] {
            let exact = radial_integral_exp_sum(n, r);
            let got = log_radial_integral(n, r).unwrap().exp();
            assert!(((got - exact) / exact).abs() <= 1e-10, "n = {n}, r = {r}: {got} vs {exact}");
        }
    }
}

#[test]
fn sphere_areas_against_recursion() {
    for n in 2..=40 {
        let exact = sphere_area_recursive(n);
        assert!(((sphere_area(n).unwrap() - exact) / exact).abs() <= 1e-13, "n = {n}");
    }
}

#[test]
fn crossover_against_bisection() {
    for k in 2..=40u32 {
        let s = (PI / f64::from(k)).sin();
        let gap = |d: f64| 2.0 * d.sinh().powi(2) * s * s - 2.0 * s * (-2.0 * d).exp();
        let root = bisect(gap, 0.0, 10.0);
        assert!((branch_crossover(k).unwrap() - root).abs() <= 1e-12, "k = {k}");
    }
}

/// `A = C A' C⁻¹` with `C = Q̂ · boost(δ)` and `A'` canonical with `t` fixed
/// coordinates, returned together with `C`.
fn conjugated_instance(n: usize, rng: &mut ChaCha8Rng) -> (LorentzMatrix, LorentzMatrix, usize) {
    let t = rng.random_range(0..n);
    let rest = n - t;
    let blocks = rng.random_range(0..=rest / 2);
    let flips = rest - 2 * blocks;
    let angles = (0..blocks).map(|_| rng.random_range(0.2..3.0)).collect();
    let spec = EllipticSpec::new(n, angles, flips, t).unwrap();
    let delta = rng.random_range(0.0..3.0);
    let q = LorentzMatrix::embed_rotation(&haar_orthogonal(n, rng)).unwrap();
    let c = q.compose(&LorentzMatrix::boost(n, delta).unwrap());
    (c.conjugate(&block_form(&spec)), c, t)
}

#[test]
fn fixed_set_distance_against_random_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..1000 {
        let n = rng.random_range(2..=5);
        let (a, c, t) = conjugated_instance(n, &mut rng);
        let size = n + 1;
        // Fix(A) ∩ ℍⁿ = C · {cosh ρ e₁ + sinh ρ w : w a unit vector in the last t coordinates}
        let first_coordinate = |rho: f64, w: &DVector<f64>| {
            let mut y = DVector::zeros(size);
            y[0] = rho.cosh();
            for (i, wi) in w.iter().enumerate() {
                y[size - t + i] = rho.sinh() * wi;
            }
            (c.as_matrix() * y)[0]
        };
        let brute = if t == 0 {
            c.entry(0, 0).acosh()
        } else {
            random_search_min(first_coordinate, t, 6.0, &mut rng).max(1.0).acosh()
        };
        let got = fixed_set_distance(&a).unwrap();
        assert!((got - brute).abs() <= 1e-6, "trial {trial}: n = {n}, t = {t}: {got} vs {brute}");
    }
}

#[test]
fn operator_norm_against_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..1000 {
        let dim = rng.random_range(2..=7);
        let a = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-3.0..3.0));
        let norm = operator_norm(&a).unwrap();
        let sampled = sampled_norm(&a, 100_000, &mut rng);
        assert!(sampled <= norm * (1.0 + 1e-12), "trial {trial}");
        assert!(sampled >= 0.99 * norm, "trial {trial}: {sampled} vs {norm}");
        let svd = a.singular_values().max();
        assert!((norm - svd).abs() <= 1e-9 * svd, "trial {trial}");
    }
}

#[test]
fn entry_check_survives_huge_radii() {
    let r = check_entry_bound(3, 30.0, 200, 1).unwrap();
    assert_eq!((r.violations, r.failures), (0, 0));
    assert!(r.min_slack.unwrap().is_finite());
}

#[test]
fn greedy_packings_never_exceed_the_count() {
    for (p, q, s) in [(1, 1.0, 2.0), (2, 1.0, 1.0), (2, 1.0, 0.3), (3, 2.0, 1.5)] {
        let r = check_separated_count(p, q, s, 1000, 99).unwrap();
        assert_eq!(r.violations, 0, "p = {p}, q = {q}, s = {s}");
        assert!(r.min_slack.unwrap() >= 1.0);
    }
}
