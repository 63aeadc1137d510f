//! Closed-form solution and blowup classification of the spatially
//! homogeneous equation `v' = e^{i theta} |v|^alpha v + gamma v`.
//!
//! With `B = |v0|^alpha cos(theta)` and `g(t) = (e^{alpha gamma t} - 1) /
//! gamma` (replaced by `alpha t` when `gamma = 0`), the solution is
//!
//! `v(t) = e^{gamma t} [1 - g(t) B]^{-(1/alpha)(1 + i tan(theta))} v0`,
//!
//! valid while the bracket stays positive. The first positive root of the
//! bracket is the blowup time; if the bracket never vanishes the solution is
//! global. Unlike the PDE solver, this module accepts `theta = +-pi/2`:
//! `cos(theta)` then vanishes, the bracket term drops out, and every orbit is
//! global.

use num_complex::Complex64;
use thiserror::Error;

use crate::domain::Params;

#[derive(Debug, Error, PartialEq)]
pub enum OdeError {
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("requested time {t} is at or past the blowup time {t_star}")]
    AtOrPastBlowup { t: f64, t_star: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeKind {
    BlowsUp { t_star: f64 },
    Global,
}

/// Classification of one initial value, with a flag marking the threshold
/// case `|v0|^alpha cos(theta) = -gamma` (gamma < 0 only), which sits on the
/// global side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeVerdict {
    pub kind: OdeKind,
    pub boundary: bool,
}

/// `(e^{alpha gamma t} - 1) / gamma`, with the gamma -> 0 limit `alpha t`.
fn growth_factor(p: &Params, t: f64) -> f64 {
    if p.gamma == 0.0 {
        p.alpha * t
    } else {
        (p.alpha * p.gamma * t).exp_m1() / p.gamma
    }
}

/// First positive root of the bracket, or infinity when there is none.
pub fn ode_blowup_time(v0: Complex64, p: &Params) -> f64 {
    let b = v0.norm().powf(p.alpha) * p.cos_theta();
    if b <= 0.0 {
        return f64::INFINITY;
    }
    if p.gamma == 0.0 {
        return 1.0 / (p.alpha * b);
    }
    // bracket root: e^{alpha gamma t} = 1 + gamma / B
    let x = 1.0 + p.gamma / b;
    if x <= 0.0 {
        return f64::INFINITY;
    }
    let t = x.ln() / (p.alpha * p.gamma);
    if t > 0.0 {
        t
    } else {
        f64::INFINITY
    }
}

/// Evaluates the closed-form solution at time `t >= 0`, `t` strictly before
/// the blowup time. The bracket is real and positive on the domain of
/// validity, so the complex power is the principal one,
/// `exp(exponent * ln bracket)` with the real logarithm.
pub fn ode_exact(v0: Complex64, p: &Params, t: f64) -> Result<Complex64, OdeError> {
    if t < 0.0 {
        return Err(OdeError::NegativeTime(t));
    }
    if v0 == Complex64::new(0.0, 0.0) {
        return Ok(v0);
    }
    let b = v0.norm().powf(p.alpha) * p.cos_theta();
    let x = growth_factor(p, t) * b;
    if !(1.0 - x > 0.0) {
        return Err(OdeError::AtOrPastBlowup {
            t,
            t_star: ode_blowup_time(v0, p),
        });
    }
    // ln(1 - x) via ln_1p keeps full precision when x is tiny, which is what
    // makes the theta -> +-pi/2 degeneration (B -> 0, tan -> huge) behave.
    let lg = (-x).ln_1p();
    let exponent = Complex64::new(p.gamma * t - lg / p.alpha, -(p.theta.tan() / p.alpha) * lg);
    Ok(exponent.exp() * v0)
}

/// Blowup/global trichotomy. For gamma < 0 the threshold `|v0|^alpha
/// cos(theta) = -gamma` (detected to 1e-12 relative) is assigned to the
/// global side and flagged.
pub fn ode_classify(v0: Complex64, p: &Params) -> OdeVerdict {
    let t_star = ode_blowup_time(v0, p);
    let kind = if t_star.is_finite() {
        OdeKind::BlowsUp { t_star }
    } else {
        OdeKind::Global
    };
    let boundary = if p.gamma < 0.0 {
        let b = v0.norm().powf(p.alpha) * p.cos_theta();
        (b + p.gamma).abs() <= 1e-12 * (-p.gamma)
    } else {
        false
    };
    OdeVerdict { kind, boundary }
}
