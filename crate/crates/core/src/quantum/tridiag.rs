//! Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for
//! eigenvalues and inverse iteration for eigenvectors.

use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty matrix");
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length mismatch");
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count of the LDL^T pivots).
    pub fn count_below(&self, x: f64) -> usize {
        // a vanishing pivot is treated as a tiny negative one, consistently
        // in the count and in the next pivot
        let tiny = f64::MIN_POSITIVE.sqrt();
        let clamp = |q: f64| if q.abs() < tiny { -tiny } else { q };
        let mut q = clamp(self.diag[0] - x);
        let mut count = usize::from(q < 0.0);
        for i in 1..self.dim() {
            q = clamp(self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q);
            count += usize::from(q < 0.0);
        }
        count
    }

    /// The `index`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, index: usize) -> f64 {
        assert!(index < self.dim(), "eigenvalue index out of range");
        let (mut lo, mut hi) = self.gershgorin();
        let span = (hi - lo).max(f64::MIN_POSITIVE);
        lo -= 1e-12 * span;
        hi += 1e-12 * span;
        // invariant: count_below(lo) <= index < count_below(hi)
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `count` smallest eigenvalues in increasing order.
    pub fn lowest_eigenvalues(&self, count: usize) -> Vec<f64> {
        let count = count.min(self.dim());
        (0..count)
            .into_par_iter()
            .map(|k| self.eigenvalue(k))
            .collect()
    }

    /// Unit eigenvector for an (approximate) eigenvalue, by inverse iteration
    /// with a partially pivoted tridiagonal solve.
    pub fn eigenvector(&self, eigenvalue: f64) -> Vec<f64> {
        let n = self.dim();
        let (lo, hi) = self.gershgorin();
        let shift = eigenvalue + 1e-14 * (hi - lo).max(1.0) * 0.5;
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64)
            .collect();
        normalize(&mut x);
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x);
            normalize(&mut x);
        }
        // fix the sign: first significant component positive
        let pivot = x.iter().copied().find(|v| v.abs() > 1e-8).unwrap_or(1.0);
        if pivot < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        x
    }

    /// `(T - shift I) y = b` by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let eps = f64::EPSILON * self.gershgorin().1.abs().max(1.0);
        // row i holds entries at columns i, i+1, i+2 after elimination
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - shift).collect();
        let mut u1: Vec<f64> = self.off.clone();
        u1.push(0.0);
        let mut u2 = vec![0.0; n];
        let mut l: Vec<f64> = self.off.clone();
        let mut rhs = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            let below = l[i];
            if below.abs() > d[i].abs() {
                // swap rows i and i+1
                let (di, u1i, u2i) = (d[i], u1[i], u2[i]);
                d[i] = below;
                u1[i] = d[i + 1];
                u2[i] = u1[i + 1];
                let factor = di / below;
                d[i + 1] = u1i - factor * u1[i];
                u1[i + 1] = u2i - factor * u2[i];
                rhs.swap(i, i + 1);
                rhs[i + 1] -= factor * rhs[i];
            } else {
                let pivot = if d[i].abs() < eps { eps } else { d[i] };
                d[i] = pivot;
                let factor = below / pivot;
                d[i + 1] -= factor * u1[i];
                u1[i + 1] -= factor * u2[i];
                rhs[i + 1] -= factor * rhs[i];
            }
            l[i] = 0.0;
        }
        if d[n - 1].abs() < eps {
            d[n - 1] = eps;
        }
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            if i + 1 < n {
                acc -= u1[i] * y[i + 1];
            }
            if i + 2 < n {
                acc -= u2[i] * y[i + 2];
            }
            y[i] = acc / d[i];
        }
        y
    }
}

fn normalize(x: &mut [f64]) {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return;
    }
    x.iter_mut().for_each(|v| *v /= scale);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
}
