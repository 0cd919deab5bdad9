//! Seeded randomized checks of the inequalities behind the volume bound.
//!
//! Every check draws independent trials, computes a slack (the ratio of the
//! two sides, oriented so that `slack >= 1` means the inequality holds) and
//! counts trials whose slack falls below [`SLACK_THRESHOLD`]. Trial `i` of a
//! case draws from its own RNG seeded with [`trial_seed`], so a report does
//! not depend on how trials are scheduled across threads.

use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::log_kappa;
use crate::elliptic::{c_k, fixed_set_distance, norm_lower_bound_measured, sample_elliptic_with};
use crate::error::{Error, Result};
use crate::lorentz::{operator_norm, random_isometry_with, LorentzMatrix, Matrix};

/// A trial violates its inequality when `slack < 1 - 1e-9`.
pub const SLACK_THRESHOLD: f64 = 1.0 - 1e-9;

/// Log-uniform range of fixed-set distances drawn by the elliptic check.
pub const ELLIPTIC_DELTA_RANGE: (f64, f64) = (1e-3, 5.0);

/// Largest packing bound `(2q/s + 1)^p` the separated-set check will attempt.
pub const SEPARATED_BUDGET: f64 = 1e6;

pub const LEMMA_ELLIPTIC: &str = "elliptic-norm";
pub const LEMMA_ENTRY: &str = "entry-bound";
pub const LEMMA_NORM_FROM_ENTRIES: &str = "norm-from-entries";
pub const LEMMA_PRODUCT: &str = "product-perturbation";
pub const LEMMA_SEPARATED: &str = "separated-count";

#[derive(Debug, Clone, Serialize)]
pub struct TrialReport {
    pub lemma_id: String,
    /// Parameters of this case, e.g. `n=3 k=5`.
    pub case: String,
    pub trials: u64,
    pub violations: u64,
    /// Trials that could not be evaluated (counted among the violations too).
    pub failures: u64,
    /// Smallest slack observed; `None` with no trials or only unbounded slacks.
    pub min_slack: Option<f64>,
    pub worst_seed: Option<u64>,
    /// Wall-clock seconds. Not serialized, so reports stay reproducible.
    #[serde(skip)]
    pub elapsed: f64,
}

/// Equality ignores `elapsed`.
impl PartialEq for TrialReport {
    fn eq(&self, other: &Self) -> bool {
        self.lemma_id == other.lemma_id
            && self.case == other.case
            && self.trials == other.trials
            && self.violations == other.violations
            && self.failures == other.failures
            && self.min_slack == other.min_slack
            && self.worst_seed == other.worst_seed
    }
}

impl TrialReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `index` of `lemma_id`/`case` under `master_seed`.
pub fn trial_seed(master_seed: u64, lemma_id: &str, case: &str, index: u64) -> u64 {
    let tag = fnv1a(lemma_id.as_bytes()) ^ fnv1a(case.as_bytes()).rotate_left(17);
    splitmix64(splitmix64(master_seed ^ tag).wrapping_add(index))
}

fn run_trials<F>(lemma_id: &str, case: String, trials: u64, master_seed: u64, trial: F) -> TrialReport
where
    F: Fn(&mut ChaCha8Rng, u64) -> Result<f64> + Sync,
{
    let start = Instant::now();
    let outcomes: Vec<(u64, Option<f64>)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(master_seed, lemma_id, &case, i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (seed, trial(&mut rng, i).ok())
        })
        .collect();

    let mut violations = 0;
    let mut failures = 0;
    let mut min_slack: Option<f64> = None;
    let mut worst_seed = None;
    for (seed, slack) in outcomes {
        match slack {
            None => {
                failures += 1;
                violations += 1;
            }
            Some(s) if s.is_nan() => {
                failures += 1;
                violations += 1;
            }
            Some(s) => {
                if s < SLACK_THRESHOLD {
                    violations += 1;
                }
                if s.is_finite() && min_slack.is_none_or(|m| s < m) {
                    min_slack = Some(s);
                    worst_seed = Some(seed);
                }
            }
        }
    }
    TrialReport {
        lemma_id: lemma_id.to_string(),
        case,
        trials,
        violations,
        failures,
        min_slack,
        worst_seed,
        elapsed: start.elapsed().as_secs_f64(),
    }
}

/// Slack of the elliptic norm bounds for one element: the smaller of
/// `‖A - I‖ / c_k` and `‖A - I‖ / norm_lower_bound(k, δ)` with `δ` the
/// measured distance from `e₁` to `Fix(A)`.
pub fn elliptic_slack(a: &LorentzMatrix, k: u32) -> Result<f64> {
    let norm = operator_norm(&a.minus_identity())?;
    let delta = fixed_set_distance(a)?;
    let uniform = norm / c_k(k)?;
    let by_distance = norm / norm_lower_bound_measured(k, delta)?;
    Ok(uniform.min(by_distance))
}

/// `‖A - I‖ ≥ c_k` and `‖A - I‖ ≥ max(2 sinh²δ sin²(π/k), 2 sin(π/k) e^{-2δ})`
/// on random elliptic elements of exact order `k` with `δ` log-uniform in
/// [`ELLIPTIC_DELTA_RANGE`].
pub fn check_elliptic_bounds(n: usize, k: u32, trials: u64, seed: u64) -> Result<TrialReport> {
    if n < 2 || k < 2 {
        return Err(Error::usage(format!(
            "elliptic check needs n >= 2 and k >= 2, got n = {n}, k = {k}"
        )));
    }
    let (lo, hi) = (ELLIPTIC_DELTA_RANGE.0.ln(), ELLIPTIC_DELTA_RANGE.1.ln());
    Ok(run_trials(LEMMA_ELLIPTIC, format!("n={n} k={k}"), trials, seed, |rng, _| {
        let delta = rng.random_range(lo..=hi).exp();
        let e = sample_elliptic_with(n, k, delta, rng)?;
        elliptic_slack(&e.matrix, k)
    }))
}

/// `max |a_ij| ≤ κ(r)` whenever `A B̄(e₁,r)` meets `B̄(e₁,r)`, i.e. whenever
/// `d(e₁, A e₁) ≤ 2r`. Compared in log space.
pub fn check_entry_bound(n: usize, r: f64, trials: u64, seed: u64) -> Result<TrialReport> {
    if n < 2 {
        return Err(Error::usage(format!("dimension n = {n} must be >= 2")));
    }
    let log_bound = log_kappa(r)?;
    Ok(run_trials(LEMMA_ENTRY, format!("n={n} r={r}"), trials, seed, |rng, _| {
        let a = random_isometry_with(n, 2.0 * r, rng)?;
        Ok(entry_bound_slack(&a, log_bound))
    }))
}

/// `κ(r) / max |a_ij|`, from logs.
pub fn entry_bound_slack(a: &LorentzMatrix, log_kappa_r: f64) -> f64 {
    (log_kappa_r - a.max_abs_entry().ln()).exp()
}

/// `‖A‖ ≤ d(n+1)` for `(n+1)×(n+1)` matrices with entries in `[-d, d]`.
pub fn check_norm_from_entries(n: usize, d: f64, trials: u64, seed: u64) -> Result<TrialReport> {
    if n < 1 {
        return Err(Error::usage("matrix size n + 1 must be >= 2"));
    }
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::usage(format!("entry bound d = {d} must be finite and >= 0")));
    }
    let size = n + 1;
    Ok(run_trials(LEMMA_NORM_FROM_ENTRIES, format!("n={n} d={d}"), trials, seed, |rng, _| {
        let a = Matrix::from_fn(size, size, |_, _| d * rng.random_range(-1.0..=1.0));
        norm_from_entries_slack(&a, d)
    }))
}

/// `d(n+1) / ‖A‖`; unbounded for the zero matrix.
pub fn norm_from_entries_slack(a: &Matrix, d: f64) -> Result<f64> {
    let norm = operator_norm(a)?;
    Ok(if norm == 0.0 {
        f64::INFINITY
    } else {
        d * a.nrows() as f64 / norm
    })
}

/// `‖A B⁻¹ - I‖ ≤ L` for Lorentz `B` with `|b_ij| ≤ K` and any `A` with
/// `|a_ij - b_ij| < L / ((n+1)² K)`.
///
/// Trials cycle through three perturbation shapes: i.i.d. uniform entries,
/// a sign pattern aligned with the dominant singular direction of `B⁻¹`,
/// and a single extreme entry on that direction.
pub fn check_product_perturbation(
    n: usize,
    k_bound: f64,
    l_bound: f64,
    trials: u64,
    seed: u64,
) -> Result<TrialReport> {
    if n < 2 {
        return Err(Error::usage(format!("dimension n = {n} must be >= 2")));
    }
    if !(k_bound >= 1.0) || !k_bound.is_finite() {
        return Err(Error::usage(format!(
            "entry bound K = {k_bound} must be finite and >= 1 (every Lorentz matrix has a11 >= 1)"
        )));
    }
    if !(l_bound > 0.0) || !l_bound.is_finite() {
        return Err(Error::usage(format!("target L = {l_bound} must be finite and > 0")));
    }
    let size = (n + 1) as f64;
    let step = l_bound / (size * size * k_bound);
    let max_translation = k_bound.acosh();
    let case = format!("n={n} K={k_bound} L={l_bound}");
    Ok(run_trials(LEMMA_PRODUCT, case, trials, seed, |rng, i| {
        let b = bounded_isometry(n, k_bound, max_translation, rng)?;
        let strict = step * (1.0 - 1e-12);
        let e = match i % 3 {
            0 => Matrix::from_fn(n + 1, n + 1, |_, _| strict * rng.random_range(-1.0..1.0)),
            1 => aligned_perturbation(&b, strict, false),
            _ => aligned_perturbation(&b, strict, true),
        };
        let a = b.as_matrix() + e;
        product_perturbation_slack(&a, &b, l_bound)
    }))
}

/// `L / ‖A B⁻¹ - I‖`.
pub fn product_perturbation_slack(a: &Matrix, b: &LorentzMatrix, l_bound: f64) -> Result<f64> {
    let size = a.nrows();
    let lhs = operator_norm(&(a * b.inverse().as_matrix() - Matrix::identity(size, size)))?;
    Ok(if lhs == 0.0 { f64::INFINITY } else { l_bound / lhs })
}

fn bounded_isometry<R: Rng + ?Sized>(
    n: usize,
    k_bound: f64,
    max_translation: f64,
    rng: &mut R,
) -> Result<LorentzMatrix> {
    for _ in 0..1000 {
        let b = random_isometry_with(n, max_translation, rng)?;
        if b.max_abs_entry() <= k_bound {
            return Ok(b);
        }
    }
    Err(Error::Numerical {
        message: format!("no isometry with entries <= {k_bound} in 1000 draws"),
        last_iterate: f64::NAN,
    })
}

/// Perturbation with entries of size `step` that pushes along `y = B⁻¹ x`,
/// `x` the top right singular vector of `B⁻¹`.
fn aligned_perturbation(b: &LorentzMatrix, step: f64, single_entry: bool) -> Matrix {
    let inv = b.inverse().into_matrix();
    let size = inv.nrows();
    let svd = inv.clone().svd(false, true);
    let v_t = svd.v_t.expect("SVD computed with V^T");
    let top = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let x: DVector<f64> = v_t.row(top).transpose();
    // E B⁻¹ x = E y, so E should correlate with y.
    let y = &inv * &x;
    if single_entry {
        let j = y.iamax();
        let mut e = Matrix::zeros(size, size);
        e[(0, j)] = step * y[j].signum();
        e
    } else {
        Matrix::from_fn(size, size, |_, j| step * if y[j] < 0.0 { -1.0 } else { 1.0 })
    }
}

/// `|M| ≤ (2q/s + 1)^p` for `M ⊂ [-q, q]^p` whose points pairwise differ by
/// more than `s` in some coordinate. Each trial greedily grows a maximal such
/// set from a random candidate stream that mixes uniform points with points
/// snapped to a lattice of spacing just over `s`.
pub fn check_separated_count(p: usize, q: f64, s: f64, trials: u64, seed: u64) -> Result<TrialReport> {
    let bound = separated_bound(p, q, s)?;
    let candidates = ((64.0 * bound).ceil() as usize).clamp(64, 4096);
    let lattice_step = s * (1.0 + 1e-9);
    let lattice_len = (2.0 * q / lattice_step).floor() as usize + 1;
    Ok(run_trials(LEMMA_SEPARATED, format!("p={p} q={q} s={s}"), trials, seed, |rng, _| {
        let mut chosen: Vec<Vec<f64>> = Vec::new();
        for _ in 0..candidates {
            let point: Vec<f64> = (0..p)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        let j = rng.random_range(0..lattice_len);
                        (-q + lattice_step * j as f64).min(q)
                    } else {
                        rng.random_range(-q..=q)
                    }
                })
                .collect();
            let separated = chosen.iter().all(|c| sup_distance(c, &point) > s);
            if separated {
                chosen.push(point);
            }
        }
        Ok(bound / chosen.len() as f64)
    }))
}

/// `(2q/s + 1)^p`, after checking the arguments and the size budget.
pub fn separated_bound(p: usize, q: f64, s: f64) -> Result<f64> {
    if p == 0 || p > 4 {
        return Err(Error::usage(format!("dimension p = {p} must be in 1..=4")));
    }
    if !(q > 0.0) || !(s > 0.0) || !q.is_finite() || !s.is_finite() {
        return Err(Error::usage(format!("need q > 0 and s > 0, got q = {q}, s = {s}")));
    }
    let bound = (2.0 * q / s + 1.0).powi(p as i32);
    if bound > SEPARATED_BUDGET {
        return Err(Error::usage(format!(
            "packing bound {bound:e} exceeds the budget of {SEPARATED_BUDGET:e}"
        )));
    }
    Ok(bound)
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Parameters of a full verification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub trials: u64,
    pub master_seed: u64,
    /// `(n, k)` pairs for the elliptic check.
    pub elliptic: Vec<(usize, u32)>,
    /// `(n, r)` pairs for the entry bound.
    pub entry: Vec<(usize, f64)>,
    /// `(n, d)` pairs for the norm-from-entries bound.
    pub norm_from_entries: Vec<(usize, f64)>,
    /// `(n, K, L)` triples for the product perturbation bound.
    pub product: Vec<(usize, f64, f64)>,
    /// `(p, q, s)` triples for the separated-set count.
    pub separated: Vec<(usize, f64, f64)>,
}

impl SuiteConfig {
    pub fn with_trials(trials: u64, master_seed: u64) -> Self {
        let mut elliptic = Vec::new();
        for n in 2..=6 {
            for k in [2, 3, 5, 7] {
                elliptic.push((n, k));
            }
        }
        let mut entry = Vec::new();
        for n in [2, 3, 5] {
            for r in [0.25, 1.0, 3.0] {
                entry.push((n, r));
            }
        }
        SuiteConfig {
            trials,
            master_seed,
            elliptic,
            entry,
            norm_from_entries: vec![(2, 1.0), (3, 0.5), (3, 2.5), (6, 1.0)],
            product: vec![(3, 10.0, 0.1), (2, 3.0, 0.5), (5, 50.0, 0.01)],
            separated: vec![(1, 1.0, 2.0), (2, 1.0, 1.0), (3, 1.0, 1.0), (4, 1.0, 1.0), (2, 1.5, 0.4)],
        }
    }
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig::with_trials(10_000, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub passed: bool,
    pub reports: Vec<TrialReport>,
}

/// Runs every check in `config`, in a fixed order.
pub fn run_all(config: &SuiteConfig) -> Result<SuiteOutcome> {
    let (t, seed) = (config.trials, config.master_seed);
    let mut reports = Vec::new();
    for &(n, k) in &config.elliptic {
        reports.push(check_elliptic_bounds(n, k, t, seed)?);
    }
    for &(n, r) in &config.entry {
        reports.push(check_entry_bound(n, r, t, seed)?);
    }
    for &(n, d) in &config.norm_from_entries {
        reports.push(check_norm_from_entries(n, d, t, seed)?);
    }
    for &(n, k, l) in &config.product {
        reports.push(check_product_perturbation(n, k, l, t, seed)?);
    }
    for &(p, q, s) in &config.separated {
        reports.push(check_separated_count(p, q, s, t, seed)?);
    }
    Ok(SuiteOutcome {
        passed: reports.iter().all(TrialReport::passed),
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{block_form, EllipticSpec};
    use std::f64::consts::PI;

    #[test]
    fn seeds_are_distinct_and_stable() {
        let a = trial_seed(0, LEMMA_ENTRY, "n=2 r=1", 0);
        assert_eq!(a, trial_seed(0, LEMMA_ENTRY, "n=2 r=1", 0));
        assert_ne!(a, trial_seed(0, LEMMA_ENTRY, "n=2 r=1", 1));
        assert_ne!(a, trial_seed(1, LEMMA_ENTRY, "n=2 r=1", 0));
        assert_ne!(a, trial_seed(0, LEMMA_ELLIPTIC, "n=2 r=1", 0));
    }

    #[test]
    fn equality_configuration_has_unit_slack() {
        for k in [3u32, 4, 5, 7, 12] {
            let a = block_form(&EllipticSpec::single_rotation(4, 2.0 * PI / f64::from(k)).unwrap());
            let slack = elliptic_slack(&a, k).unwrap();
            assert!((slack - 1.0).abs() <= 1e-12, "k = {k}: {slack}");
        }
    }

    #[test]
    fn empty_runs() {
        let r = check_entry_bound(3, 1.0, 0, 5).unwrap();
        assert_eq!((r.trials, r.violations, r.min_slack), (0, 0, None));
    }

    #[test]
    fn boosted_boundary_instance_for_entries() {
        for r in [0.1, 1.0, 30.0] {
            let b = LorentzMatrix::boost(3, 2.0 * r).unwrap();
            assert!(entry_bound_slack(&b, log_kappa(r).unwrap()) > 1.0);
        }
    }

    #[test]
    fn constant_matrix_attains_norm_bound() {
        let d = 1.7;
        let a = Matrix::from_element(5, 5, d);
        let slack = norm_from_entries_slack(&a, d).unwrap();
        assert!((slack - 1.0).abs() < 1e-12);
        assert_eq!(norm_from_entries_slack(&Matrix::zeros(4, 4), 0.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn zero_perturbation() {
        let b = LorentzMatrix::boost(3, 1.0).unwrap();
        let s = product_perturbation_slack(b.as_matrix(), &b, 0.1).unwrap();
        assert!(s > 1e6);
    }

    #[test]
    fn separated_budget() {
        assert_eq!(separated_bound(2, 1.0, 1.0).unwrap(), 9.0);
        assert_eq!(separated_bound(1, 1.0, 2.0).unwrap(), 2.0);
        assert!(separated_bound(5, 1.0, 1.0).is_err());
        assert!(separated_bound(4, 1.0, 0.01).is_err());
        assert!(separated_bound(2, 0.0, 1.0).is_err());
    }

    #[test]
    fn argument_errors() {
        assert!(check_elliptic_bounds(2, 1, 10, 0).is_err());
        assert!(check_entry_bound(3, 0.0, 10, 0).is_err());
        assert!(check_product_perturbation(3, 0.5, 0.1, 10, 0).is_err());
        assert!(check_norm_from_entries(3, -1.0, 10, 0).is_err());
    }
}
