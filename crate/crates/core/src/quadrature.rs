//! Adaptive Gauss–Legendre quadrature.

use std::sync::OnceLock;

const POINTS: usize = 16;
const MAX_DEPTH: u32 = 48;
const INITIAL_PANELS: usize = 8;

struct Rule {
    nodes: [f64; POINTS],
    weights: [f64; POINTS],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(POINTS))
}

/// Nodes and weights on `[-1, 1]` from Newton iteration on `P_n`.
fn legendre_rule(n: usize) -> Rule {
    let mut nodes = [0.0; POINTS];
    let mut weights = [0.0; POINTS];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let sum: f64 = r
        .nodes
        .iter()
        .zip(&r.weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum();
    half * sum
}

/// `∫_a^b f` to relative tolerance `rel_tol` by recursive bisection.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let h = (b - a) / INITIAL_PANELS as f64;
    let panels: Vec<(f64, f64, f64)> = (0..INITIAL_PANELS)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == INITIAL_PANELS { b } else { lo + h };
            (lo, hi, panel(&f, lo, hi))
        })
        .collect();
    let estimate: f64 = panels.iter().map(|p| p.2).sum();
    let abs_tol = (rel_tol * estimate.abs()).max(f64::MIN_POSITIVE);
    let local = abs_tol / INITIAL_PANELS as f64;
    panels
        .into_iter()
        .map(|(lo, hi, whole)| refine(&f, lo, hi, whole, local, 0))
        .sum()
}

fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = panel(f, a, m);
    let right = panel(f, m, b);
    let both = left + right;
    if (both - whole).abs() <= tol || depth >= MAX_DEPTH {
        return both;
    }
    refine(f, a, m, left, 0.5 * tol, depth + 1) + refine(f, m, b, right, 0.5 * tol, depth + 1)
}
