//! Associated Laguerre polynomials and the Gamma function.

use std::f64::consts::PI;

/// `L_n^(alpha)(x)` by the forward three-term recurrence
/// `(k+1) L_{k+1} = (2k + 1 + alpha - x) L_k - (k + alpha) L_{k-1}`.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    laguerre_scaled(n, alpha, x, 1.0)
}

/// `scale * L_n^(alpha)(x)`; the recurrence is linear, so seeding it with
/// `scale` keeps tiny quadrature weights from underflowing against large
/// polynomial values.
pub fn laguerre_scaled(n: usize, alpha: f64, x: f64, scale: f64) -> f64 {
    let mut prev = scale;
    if n == 0 {
        return prev;
    }
    let mut cur = scale * (1.0 + alpha - x);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// All of `scale * L_0 .. scale * L_{n_max}` at one point.
pub fn laguerre_table(n_max: usize, alpha: f64, x: f64, scale: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(scale);
    if n_max == 0 {
        return out;
    }
    out.push(scale * (1.0 + alpha - x));
    for k in 1..n_max {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// `(ln |L_n^(alpha)(x)|, sign)`, rescaling the recurrence so that large
/// degrees and arguments do not overflow.
pub fn ln_abs_laguerre(n: usize, alpha: f64, x: f64) -> (f64, f64) {
    let mut prev = 1.0f64;
    let mut log_scale = 0.0;
    if n == 0 {
        return (0.0, 1.0);
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        let big = cur.abs().max(prev.abs());
        if big > 1e100 {
            prev /= big;
            cur /= big;
            log_scale += big.ln();
        }
    }
    (cur.abs().ln() + log_scale, cur.signum())
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS_COEFFS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
    }
}

pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        ln_gamma(x).exp()
    }
}
