//! Reference values computed independently of the library's own Bessel routines.
#![allow(dead_code)]

use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `I_n(x) = (1/π) ∫₀^π e^{x cos t} cos(n t) dt`, midpoint rule on a periodic integrand.
pub fn i_n(n: u32, x: f64) -> f64 {
    let m = 400;
    let h = PI / m as f64;
    let mut s = 0.0;
    for k in 0..m {
        let t = (k as f64 + 0.5) * h;
        s += (x * t.cos()).exp() * (n as f64 * t).cos();
    }
    s * h / PI
}

/// `K₀(x) = −(ln(x/2) + γ) I₀(x) + Σ_k H_k (x²/4)^k / (k!)²` (moderate `x`).
pub fn k0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut i0 = 1.0;
    let mut tail = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += harmonic * term;
        if term < 1e-18 * i0 {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail
}

/// Secant iteration from `x0`, `x1`.
pub fn secant(mut x0: f64, mut x1: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut f0 = f(x0);
    for _ in 0..100 {
        let f1 = f(x1);
        if f1 == 0.0 || (x1 - x0).abs() <= 1e-15 * x1.abs() {
            return x1;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
    }
    x1
}

/// Robin disk eigenvalue: `−k²/R²` with `k I₁(k) = αR I₀(k)`.
pub fn disk_eigenvalue(alpha: f64, radius: f64) -> f64 {
    let a = alpha * radius;
    let k = secant(a, a + 0.5, |k| k * i_n(1, k) - a * i_n(0, k));
    -(k / radius).powi(2)
}

/// δ circle eigenvalue: `−k²/R²` with `I₀(k) K₀(k) = 1/(αR)`.
pub fn circle_delta_eigenvalue(alpha: f64, radius: f64) -> f64 {
    let a = alpha * radius;
    let k = secant(0.5 * a, 0.5 * a + 0.1, |k| i_n(0, k) * k0(k) - 1.0 / a);
    -(k / radius).powi(2)
}

/// Robin square `[0, L]²`: twice the interval value `−k²`, `k tanh(kL/2) = α`.
pub fn square_eigenvalue(alpha: f64, side: f64) -> f64 {
    let k = secant(alpha, alpha + 0.1, |k| k * (0.5 * k * side).tanh() - alpha);
    -2.0 * k * k
}
