//! Numerical integration primitives: adaptive Gauss-Kronrod on finite and
//! semi-infinite intervals, fixed-order Gauss-Legendre rules, and a periodic
//! trapezoid rule.
//!
//! Improper integrals over (a, ∞) are folded onto (0, 1) with
//! `x = a + scale * t / (1 - t)` before adaptive refinement; the scale is
//! chosen by the caller to match the integrand's characteristic length so the
//! first bisections land near the mass of the integrand.

use crate::error::{Error, Result};

// 15-point Kronrod extension of the 7-point Gauss rule (positive abscissae).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss-Kronrod 15 evaluation on [a, b]. Returns (kronrod, |kronrod - gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(center - dx) + f(center + dx);
        kronrod += fsum * WGK[j];
        if j % 2 == 1 {
            gauss += fsum * WG[j / 2];
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

struct AdaptiveState {
    evals: usize,
    max_evals: usize,
}

fn adaptive_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    whole: f64,
    err_whole: f64,
    depth: u32,
    state: &mut AdaptiveState,
) -> (f64, f64) {
    if err_whole <= tol || depth == 0 || state.evals >= state.max_evals {
        return (whole, err_whole);
    }
    let mid = 0.5 * (a + b);
    let (left, err_l) = gk15(f, a, mid);
    let (right, err_r) = gk15(f, mid, b);
    state.evals += 30;
    let (vl, el) = adaptive_rec(f, a, mid, 0.5 * tol, left, err_l, depth - 1, state);
    let (vr, er) = adaptive_rec(f, mid, b, 0.5 * tol, right, err_r, depth - 1, state);
    (vl + vr, el + er)
}

/// Adaptive Gauss-Kronrod integration of `f` over the finite interval [a, b].
///
/// Refines until the error estimate drops below
/// `max(eps_abs, eps_rel * |integral|)`. Returns the integral estimate, or an
/// error when the tolerance cannot be met within the evaluation budget.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, eps_abs: f64, eps_rel: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (whole, err) = gk15(&f, a, b);
    let tol = eps_abs.max(eps_rel * whole.abs());
    let mut state = AdaptiveState {
        evals: 15,
        max_evals: 100_000,
    };
    let (value, err) = adaptive_rec(&f, a, b, tol, whole, err, 40, &mut state);
    let tol = eps_abs.max(eps_rel * value.abs());
    if !value.is_finite() {
        return Err(Error::numeric(
            format!("quad::adaptive on [{a}, {b}]"),
            "non-finite integrand".to_string(),
        ));
    }
    if err > tol * 50.0 {
        return Err(Error::numeric(
            format!("quad::adaptive on [{a}, {b}]"),
            format!("error estimate {err:.3e} above tolerance {tol:.3e} after {} evals", state.evals),
        ));
    }
    Ok(value)
}

/// Adaptive integration of `f` over [a, ∞) using the substitution
/// `x = a + scale * t / (1 - t)`.
pub fn adaptive_upper<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    eps_abs: f64,
    eps_rel: f64,
) -> Result<f64> {
    let scale = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
    adaptive(
        |t| {
            let om = 1.0 - t;
            let x = a + scale * t / om;
            f(x) * scale / (om * om)
        },
        0.0,
        1.0,
        eps_abs,
        eps_rel,
    )
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-based initial guess for the i-th root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by upward recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Fixed Gauss-Legendre grid on [a, b]: (abscissae, weights).
pub fn gl_grid(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (nodes, weights) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    (
        nodes.iter().map(|t| c + h * t).collect(),
        weights.iter().map(|w| w * h).collect(),
    )
}

/// Trapezoid rule for a 2π-periodic integrand sampled at `n` points.
pub fn periodic_trapezoid<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    let h = 2.0 * std::f64::consts::PI / n as f64;
    (0..n).map(|i| f(i as f64 * h)).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_and_exponential() {
        let v = adaptive(|x| x * x, 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert_relative_eq!(v, 1.0 / 3.0, max_relative = 1e-12);

        let v = adaptive_upper(|x| (-x).exp(), 0.0, 1.0, 1e-12, 1e-10).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-9);

        // Heavy-tailed but integrable, like the interference kernels.
        let v = adaptive_upper(|x| 1.0 / (1.0 + x.powf(1.7)), 0.0, 1.0, 1e-10, 1e-9).unwrap();
        let brute = adaptive(|x| 1.0 / (1.0 + x.powf(1.7)), 0.0, 1e6, 1e-10, 1e-10).unwrap();
        assert_relative_eq!(v, brute, max_relative = 1e-4);
    }

    #[test]
    fn gauss_legendre_exactness() {
        // GL-n integrates polynomials up to degree 2n-1 exactly.
        let (x, w) = gl_grid(16, -1.0, 2.0);
        let val: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(7)).sum();
        let exact = (2.0f64.powi(8) - 1.0) / 8.0;
        assert_relative_eq!(val, exact, max_relative = 1e-12);
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, 3.0, max_relative = 1e-13);
    }

    #[test]
    fn periodic_rule() {
        let v = periodic_trapezoid(|t| t.cos().powi(2), 128);
        assert_relative_eq!(v, std::f64::consts::PI, max_relative = 1e-12);
    }
}
