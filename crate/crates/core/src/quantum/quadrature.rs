//! Gauss rules: generalized Gauss-Laguerre from the Jacobi-matrix eigenvalues,
//! Gauss-Legendre by Newton iteration on `P_n`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use super::special::{ln_abs_laguerre, ln_gamma};
use super::tridiag::SymTridiagonal;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Square roots of the weights, kept separately because the weights of
    /// the outermost Laguerre nodes underflow long before their roots do.
    pub sqrt_weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// Rule for `int_0^inf u^a e^(-u) g(u) du`, exact for polynomials of degree `< 2n`.
///
/// Nodes are the eigenvalues of the Jacobi matrix of the generalized Laguerre
/// recurrence. Weights come from
/// `w_i = Gamma(n + a + 1) u_i / (n! (n + 1)^2 L_{n+1}^(a)(u_i)^2)`, evaluated
/// in log space; eigenvector components are not accurate enough at the
/// outer nodes, where they are tiny. The weights are then rescaled to the
/// exact zeroth moment `Gamma(a + 1)`, which absorbs the rounding of the
/// large log-Gamma constant.
pub fn gauss_laguerre(n: usize, a: f64) -> GaussRule {
    assert!(n >= 1 && a > -1.0);
    let diag: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + a + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|i| (i as f64 * (i as f64 + a)).sqrt()).collect();
    let nodes = SymTridiagonal::new(diag, off).lowest_eigenvalues(n);
    let nf = n as f64;
    let ln_const = ln_gamma(nf + a + 1.0) - ln_gamma(nf + 1.0) - 2.0 * (nf + 1.0).ln();
    let mut ln_weights: Vec<f64> = nodes
        .iter()
        .map(|&u| ln_const + u.ln() - 2.0 * ln_abs_laguerre(n + 1, a, u).0)
        .collect();
    let total: f64 = ln_weights.iter().map(|l| l.exp()).sum();
    let correction = ln_gamma(a + 1.0) - total.ln();
    ln_weights.iter_mut().for_each(|l| *l += correction);
    let weights = ln_weights.iter().map(|l| l.exp()).collect();
    let sqrt_weights = ln_weights.iter().map(|l| (0.5 * l).exp()).collect();
    GaussRule {
        nodes,
        weights,
        sqrt_weights,
    }
}

type RuleCache = Mutex<HashMap<(usize, u64), Arc<GaussRule>>>;

/// Cached [`gauss_laguerre`].
pub fn gauss_laguerre_cached(n: usize, a: f64) -> Arc<GaussRule> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, a.to_bits());
    if let Some(rule) = cache.lock().expect("quadrature cache poisoned").get(&key) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(gauss_laguerre(n, a));
    cache
        .lock()
        .expect("quadrature cache poisoned")
        .entry(key)
        .or_insert(rule)
        .clone()
}

/// Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> GaussRule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    let sqrt_weights = weights.iter().map(|w: &f64| w.sqrt()).collect();
    GaussRule {
        nodes,
        weights,
        sqrt_weights,
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]` on `panels` equal panels.
pub fn composite_legendre<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
) -> f64 {
    let rule = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|j| {
            let left = a + j as f64 * h;
            let mid = left + 0.5 * h;
            0.5 * h * rule.integrate(|t| f(mid + 0.5 * h * t))
        })
        .sum()
}
