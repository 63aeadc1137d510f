//! Independent oracles for the integration suites: an adaptive
//! Dormand-Prince integrator for the homogeneous complex equation, adaptive
//! Simpson quadrature, and closed-form reference profiles. Nothing here
//! touches the crate's solver path.

#![allow(dead_code)]

use num_complex::Complex64;

/// Adaptive 5(4) Dormand-Prince integration of `y' = f(t, y)` from `t0` to
/// `t1` for a complex scalar state.
pub fn dopri5(
    f: impl Fn(f64, Complex64) -> Complex64,
    y0: Complex64,
    t0: f64,
    t1: f64,
    rtol: f64,
    atol: f64,
) -> Complex64 {
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B6: f64 = 11.0 / 84.0;
    const B5: f64 = -2187.0 / 6784.0;
    const E1: f64 = 71.0 / 57600.0;
    const E3: f64 = -71.0 / 16695.0;
    const E4: f64 = 71.0 / 1920.0;
    const E5: f64 = -17253.0 / 339200.0;
    const E6: f64 = 22.0 / 525.0;
    const E7: f64 = -1.0 / 40.0;

    let mut t = t0;
    let mut y = y0;
    let mut h = ((t1 - t0) / 100.0).max(1e-12);
    let mut k1 = f(t, y);
    let mut attempts = 0u64;
    while t < t1 {
        attempts += 1;
        assert!(attempts < 20_000_000, "oracle integration stalled");
        if t + h > t1 {
            h = t1 - t;
        }
        let k2 = f(t + A21 * h, y + h * A21 * k1);
        let k3 = f(t + 0.3 * h, y + h * (A31 * k1 + A32 * k2));
        let k4 = f(t + 0.8 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = f(
            t + 8.0 / 9.0 * h,
            y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4),
        );
        let k6 = f(
            t + h,
            y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
        );
        let ynew = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = f(t + h, ynew);
        let err_vec = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let sc = atol + rtol * y.norm().max(ynew.norm());
        let err = err_vec.norm() / sc;
        if err <= 1.0 || h <= 1e-14 {
            t += h;
            y = ynew;
            k1 = k7;
        }
        let fac = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h * fac).max(1e-14);
    }
    y
}

/// Integrates the homogeneous equation `v' = e^{i theta}|v|^alpha v + gamma v`.
pub fn integrate_homogeneous(
    v0: Complex64,
    theta: f64,
    alpha: f64,
    gamma: f64,
    t1: f64,
    rtol: f64,
) -> Complex64 {
    let eitheta = Complex64::from_polar(1.0, theta);
    dopri5(
        |_, v| eitheta * v * v.norm().powf(alpha) + gamma * v,
        v0,
        0.0,
        t1,
        rtol,
        rtol * 1e-2,
    )
}

/// Adaptive Simpson quadrature of a real integrand.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        // a minimum depth keeps narrow features from slipping between the
        // first few probe points
        if depth > 50 || (depth >= 10 && delta.abs() <= 15.0 * tol) {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth + 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth + 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 0)
}

/// Heat kernel on the line at time `s`.
pub fn heat_kernel(s: f64, x: f64) -> f64 {
    (4.0 * std::f64::consts::PI * s).powf(-0.5) * (-x * x / (4.0 * s)).exp()
}
