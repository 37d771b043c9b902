//! Closed-form and one-dimensional reference eigenvalues: Robin disk, δ circle and
//! Robin rectangle.

use crate::error::{Error, Result};

/// Modified Bessel function `I_n(x)` for `n ∈ {0, 1}` by its power series.
pub fn bessel_i(n: u32, x: f64) -> f64 {
    let h = 0.25 * x * x;
    let mut term = (0.5 * x).powi(n as i32);
    for k in 1..=n {
        term /= k as f64;
    }
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= h / (k * (k + n as f64));
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
        k += 1.0;
    }
    sum
}

/// Modified Bessel function `K_n(x)`, `x > 0`, from `∫₀^∞ e^{−x cosh t} cosh(n t) dt`
/// by the (spectrally accurate) trapezoid rule.
pub fn bessel_k(n: u32, x: f64) -> f64 {
    assert!(x > 0.0, "K_n needs x > 0");
    let h = 0.02;
    let mut sum = 0.5 * (-x).exp();
    let mut t: f64 = h;
    loop {
        let v = (-x * t.cosh()).exp() * (n as f64 * t).cosh();
        sum += v;
        if v < 1e-18 * sum {
            break;
        }
        t += h;
    }
    h * sum
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check(alpha: f64, size: f64) -> Result<()> {
    if !(alpha > 0.0 && size > 0.0) {
        return Err(Error::Domain(format!("need alpha > 0 and size > 0, got {alpha}, {size}")));
    }
    Ok(())
}

/// Principal Robin eigenvalue of the disk of radius `radius`: `−k²` with
/// `k I₁(kR) = α I₀(kR)`.
pub fn disk_robin_eigenvalue(alpha: f64, radius: f64) -> Result<f64> {
    check(alpha, radius)?;
    let a = alpha * radius;
    let k = bisect(0.0, a + 1.0, |k| k * bessel_i(1, k) - a * bessel_i(0, k));
    Ok(-(k / radius).powi(2))
}

/// Ground state of the δ-interaction of strength `alpha` on a circle of radius
/// `radius` in the plane: `−k²` with `I₀(kR) K₀(kR) = 1/(αR)`.
pub fn circle_delta_eigenvalue(alpha: f64, radius: f64) -> Result<f64> {
    check(alpha, radius)?;
    let a = alpha * radius;
    let g = |x: f64| bessel_i(0, x) * bessel_k(0, x) - 1.0 / a;
    let mut hi = a.max(1.0);
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while g(lo) < 0.0 {
        lo *= 0.5;
    }
    let x = bisect(lo, hi, g);
    Ok(-(x / radius).powi(2))
}

/// Principal Robin eigenvalue of an interval of length `len`: `−k²` with
/// `k tanh(k len/2) = α`.
pub fn interval_robin_eigenvalue(alpha: f64, len: f64) -> Result<f64> {
    check(alpha, len)?;
    let k = bisect(0.0, alpha + 2.0 / len + 1.0, |k| k * (0.5 * k * len).tanh() - alpha);
    Ok(-k * k)
}

/// Principal Robin eigenvalue of the rectangle `w × h` (separable).
pub fn rectangle_robin_eigenvalue(alpha: f64, w: f64, h: f64) -> Result<f64> {
    Ok(interval_robin_eigenvalue(alpha, w)? + interval_robin_eigenvalue(alpha, h)?)
}
