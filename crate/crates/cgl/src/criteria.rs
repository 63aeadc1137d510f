//! Closed-form evaluation of the blowup and global-existence conditions: the
//! structural inequality on `(alpha, theta)`, the energy-sign criteria for
//! both signs of gamma, the comparison condition from the Masmoudi-Zaag
//! literature, the small-data global threshold, and the amplitude threshold
//! `kappa*`.
//!
//! The blowup checkers are one-directional: they answer "blowup guaranteed"
//! or "no conclusion", never "global".
//!
//! For gamma < 0 the criteria are genuinely angle-dependent: no single
//! sign functional of the data can force blowup across the whole range
//! `|theta| < pi/2`, because for subcritical powers any fixed datum becomes
//! globally solvable once the angle is close enough to the dispersive
//! limit. Checks are therefore reported per angle regime.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use thiserror::Error;

use crate::domain::{Field, Params};
use crate::functionals::{self, FunctionalsError, GnEstimate};

#[derive(Debug, Error, PartialEq)]
pub enum CriteriaError {
    #[error("condition requires gamma < 0, got {0}")]
    NeedsNegativeGamma(f64),
    #[error("condition requires |theta| < pi/4, got {0}")]
    NeedsQuarterAngle(f64),
    #[error("power {alpha} is not in (0, 4/{dim})")]
    SupercriticalPower { alpha: f64, dim: usize },
    #[error("constant must be positive, got {0}")]
    BadConstant(f64),
    #[error("trial profile is identically zero")]
    ZeroProfile,
    #[error("ranges and resolution must be nonempty")]
    EmptyRange,
    #[error(transparent)]
    Functionals(#[from] FunctionalsError),
}

/// How `lhs` must relate to `rhs` for the condition to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    LessThan,
    GreaterThan,
    AtLeast,
}

impl Relation {
    fn eval(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Relation::LessThan => lhs < rhs,
            Relation::GreaterThan => lhs > rhs,
            Relation::AtLeast => lhs >= rhs,
        }
    }
}

/// One evaluated condition with both sides, the signed margin `lhs - rhs`,
/// and prose notes.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub name: String,
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub relation: Relation,
    pub notes: String,
}

impl CriterionReport {
    fn new(name: &str, lhs: f64, rhs: f64, relation: Relation, notes: String) -> Self {
        CriterionReport {
            name: name.to_string(),
            holds: relation.eval(lhs, rhs),
            lhs,
            rhs,
            margin: lhs - rhs,
            relation,
            notes,
        }
    }

    fn not_applicable(name: &str, relation: Relation, notes: String) -> Self {
        CriterionReport {
            name: name.to_string(),
            holds: false,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            relation,
            notes,
        }
    }
}

fn structural_lhs_rhs(p: &Params) -> (f64, f64) {
    let lhs = (p.alpha + 2.0) * (2.0 * p.theta).cos() + 2.0 * (1.0 - p.theta.cos());
    (lhs, 2.0 * p.theta.cos())
}

fn structural_holds(p: &Params) -> bool {
    let (lhs, rhs) = structural_lhs_rhs(p);
    lhs >= rhs
}

/// The structural condition on `(alpha, theta)`:
/// `(alpha+2) cos(2 theta) + 2(1 - cos theta) >= 2 cos theta`, equivalently
/// `(alpha+2) cos^2 theta >= alpha/2 + 2 cos theta`. Both forms are
/// evaluated; away from the equality boundary they agree exactly.
pub fn check_structural(p: &Params) -> CriterionReport {
    let (lhs, rhs) = structural_lhs_rhs(p);
    let alt_lhs = (p.alpha + 2.0) * p.theta.cos().powi(2);
    let alt_rhs = p.alpha / 2.0 + 2.0 * p.theta.cos();
    let agree = (lhs >= rhs) == (alt_lhs >= alt_rhs);
    let notes = if agree {
        format!("equivalent quadratic form: {alt_lhs} >= {alt_rhs}, same verdict")
    } else {
        format!(
            "equivalent quadratic form {alt_lhs} >= {alt_rhs} disagrees within rounding \
             of the equality boundary"
        )
    };
    CriterionReport::new("structural", lhs, rhs, Relation::AtLeast, notes)
}

/// The comparison condition `(alpha+2) cos^2 theta > (alpha+3)/2` from the
/// Masmoudi-Zaag blowup criterion, specialized to equal phases.
pub fn check_mz(p: &Params) -> CriterionReport {
    let lhs = (p.alpha + 2.0) * p.theta.cos().powi(2);
    let rhs = (p.alpha + 3.0) / 2.0;
    CriterionReport::new(
        "masmoudi-zaag",
        lhs,
        rhs,
        Relation::GreaterThan,
        "strict inequality; holding implies |theta| < pi/4".to_string(),
    )
}

/// The mass weight in the damped blowup criterion:
/// `xi = (-gamma/cos theta) max{1/alpha, ((alpha+2)cos 2theta + 2(1-cos theta))/2}`.
pub fn xi(p: &Params) -> Result<f64, CriteriaError> {
    if p.gamma >= 0.0 {
        return Err(CriteriaError::NeedsNegativeGamma(p.gamma));
    }
    if p.theta.abs() >= FRAC_PI_4 {
        return Err(CriteriaError::NeedsQuarterAngle(p.theta));
    }
    let branch = ((p.alpha + 2.0) * (2.0 * p.theta).cos() + 2.0 * (1.0 - p.theta.cos())) / 2.0;
    Ok(-p.gamma / p.theta.cos() * (1.0 / p.alpha).max(branch))
}

/// `rho = -gamma` scaled by the structural quantity:
/// `eta = rho ((alpha+2)cos 2theta + 2(1-cos theta)) / (2 cos theta)`. When
/// the structural condition holds this is at least `rho`.
pub fn eta(p: &Params) -> Result<f64, CriteriaError> {
    if p.gamma >= 0.0 {
        return Err(CriteriaError::NeedsNegativeGamma(p.gamma));
    }
    let rho = -p.gamma;
    Ok(
        rho * ((p.alpha + 2.0) * (2.0 * p.theta).cos() + 2.0 * (1.0 - p.theta.cos()))
            / (2.0 * p.theta.cos()),
    )
}

/// Negative-energy blowup criterion for gamma > 0: holds iff
/// `|theta| < pi/2` and `E(u0) < 0`; then the maximal time obeys
/// `Tmax <= ||u0||_L2^2 / (alpha (alpha+2) cos theta (-E(u0)))`, returned as
/// the second component.
pub fn check_blowup_positive_gamma(
    u0: &Field,
    p: &Params,
) -> Result<(CriterionReport, Option<f64>), CriteriaError> {
    const NAME: &str = "negative-energy blowup (gamma > 0)";
    if p.gamma <= 0.0 {
        return Ok((
            CriterionReport::not_applicable(
                NAME,
                Relation::LessThan,
                format!("not applicable: requires gamma > 0, got {}", p.gamma),
            ),
            None,
        ));
    }
    if p.theta.abs() >= FRAC_PI_2 {
        return Ok((
            CriterionReport::not_applicable(
                NAME,
                Relation::LessThan,
                "hypothesis |theta| < pi/2 violated; no conclusion".to_string(),
            ),
            None,
        ));
    }
    let e0 = functionals::energy(u0, p.alpha)?;
    let report = CriterionReport::new(
        NAME,
        e0,
        0.0,
        Relation::LessThan,
        if e0 < 0.0 {
            "blowup guaranteed".to_string()
        } else {
            "condition not met; no conclusion (the criterion is one-directional)".to_string()
        },
    );
    let bound = if report.holds {
        Some(functionals::mass(u0)? / (p.alpha * (p.alpha + 2.0) * p.theta.cos() * (-e0)))
    } else {
        None
    };
    Ok((report, bound))
}

/// Shifted-energy blowup criterion for gamma < 0: holds iff `|theta| < pi/4`,
/// the structural condition holds, and `E(u0) + xi ||u0||_L2^2 < 0`.
pub fn check_blowup_negative_gamma(
    u0: &Field,
    p: &Params,
) -> Result<CriterionReport, CriteriaError> {
    const NAME: &str = "shifted-energy blowup (gamma < 0)";
    if p.gamma >= 0.0 {
        return Ok(CriterionReport::not_applicable(
            NAME,
            Relation::LessThan,
            format!("not applicable: requires gamma < 0, got {}", p.gamma),
        ));
    }
    if p.theta.abs() >= FRAC_PI_4 {
        return Ok(CriterionReport::not_applicable(
            NAME,
            Relation::LessThan,
            "hypothesis |theta| < pi/4 violated; no conclusion".to_string(),
        ));
    }
    if !structural_holds(p) {
        return Ok(CriterionReport::not_applicable(
            NAME,
            Relation::LessThan,
            "structural condition fails; no conclusion".to_string(),
        ));
    }
    let xi_val = xi(p)?;
    let lhs = functionals::energy(u0, p.alpha)? + xi_val * functionals::mass(u0)?;
    let notes = if lhs < 0.0 {
        format!("blowup guaranteed (xi = {xi_val})")
    } else if lhs == 0.0 {
        format!("boundary; condition not strictly met (xi = {xi_val})")
    } else {
        format!("condition not met; no conclusion (xi = {xi_val})")
    };
    Ok(CriterionReport::new(
        NAME,
        lhs,
        0.0,
        Relation::LessThan,
        notes,
    ))
}

/// One sample point of the condition-comparison map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionCell {
    pub alpha: f64,
    pub theta: f64,
    pub structural: bool,
    pub mz: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionClass {
    Both,
    OnlyStructural,
    OnlyMz,
    Neither,
}

impl RegionCell {
    pub fn evaluate(alpha: f64, theta: f64) -> Result<Self, CriteriaError> {
        let p = Params::new(theta, alpha, 0.0, 1).map_err(|_| CriteriaError::EmptyRange)?;
        Ok(RegionCell {
            alpha,
            theta,
            structural: check_structural(&p).holds,
            mz: check_mz(&p).holds,
        })
    }

    pub fn class(&self) -> RegionClass {
        match (self.structural, self.mz) {
            (true, true) => RegionClass::Both,
            (true, false) => RegionClass::OnlyStructural,
            (false, true) => RegionClass::OnlyMz,
            (false, false) => RegionClass::Neither,
        }
    }
}

/// Cell-center sample coordinates for a sweep over
/// `alpha_range x theta_range` at the given per-axis resolution.
pub fn region_sample_points(
    alpha_range: (f64, f64),
    theta_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<Vec<(f64, f64)>, CriteriaError> {
    let (a0, a1) = alpha_range;
    let (t0, t1) = theta_range;
    let (ra, rt) = resolution;
    if !(a1 > a0) || !(t1 > t0) || ra == 0 || rt == 0 || a0 < 0.0 {
        return Err(CriteriaError::EmptyRange);
    }
    let da = (a1 - a0) / ra as f64;
    let dt = (t1 - t0) / rt as f64;
    let mut pts = Vec::with_capacity(ra * rt);
    for i in 0..ra {
        let alpha = a0 + (i as f64 + 0.5) * da;
        for j in 0..rt {
            let theta = t0 + (j as f64 + 0.5) * dt;
            pts.push((alpha, theta));
        }
    }
    Ok(pts)
}

/// Classifies every cell of the grid by which of the two conditions holds.
/// The four classes partition the grid; both "only" classes are nonempty on
/// `alpha in (0, 10], theta in (-pi/4, pi/4)` at moderate resolution.
pub fn compare_conditions(
    alpha_range: (f64, f64),
    theta_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<Vec<RegionCell>, CriteriaError> {
    region_sample_points(alpha_range, theta_range, resolution)?
        .into_iter()
        .map(|(a, t)| RegionCell::evaluate(a, t))
        .collect()
}

/// Small-data global-existence threshold on `||u0||_L2` for gamma < 0 and
/// subcritical power, computed from an interpolation constant `c`:
/// `[4|gamma| / ((4-N alpha) ((N alpha/4) c)^{N alpha/(4-N alpha)} c cos theta)]^{(4-N alpha)/(4 alpha)}`.
pub fn global_threshold_with_constant(p: &Params, c: f64) -> Result<f64, CriteriaError> {
    if p.gamma >= 0.0 {
        return Err(CriteriaError::NeedsNegativeGamma(p.gamma));
    }
    let nd = p.dim as f64;
    if !(p.alpha > 0.0) || p.alpha >= 4.0 / nd {
        return Err(CriteriaError::SupercriticalPower {
            alpha: p.alpha,
            dim: p.dim,
        });
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(CriteriaError::BadConstant(c));
    }
    let na = nd * p.alpha;
    let num = 4.0 * p.gamma.abs();
    let den = (4.0 - na) * ((na / 4.0) * c).powf(na / (4.0 - na)) * c * p.theta.cos();
    Ok((num / den).powf((4.0 - na) / (4.0 * p.alpha)))
}

/// Threshold computed from a numerically estimated constant; flagged
/// indicative because the estimate is a lower bound of the true constant.
#[derive(Debug, Clone, Copy)]
pub struct L2Threshold {
    pub value: f64,
    pub indicative: bool,
}

pub fn global_threshold(p: &Params, gn: &GnEstimate) -> Result<L2Threshold, CriteriaError> {
    Ok(L2Threshold {
        value: global_threshold_with_constant(p, gn.constant)?,
        indicative: gn.is_lower_bound,
    })
}

/// Coefficients of the mass differential inequality
/// `f' + a f <= b f^{1+nu}` behind the small-data global bound.
#[derive(Debug, Clone, Copy)]
pub struct DecayBound {
    pub a: f64,
    pub b: f64,
    pub nu: f64,
}

pub fn decay_bound(p: &Params, c: f64) -> Result<DecayBound, CriteriaError> {
    if p.gamma >= 0.0 {
        return Err(CriteriaError::NeedsNegativeGamma(p.gamma));
    }
    let nd = p.dim as f64;
    if !(p.alpha > 0.0) || p.alpha >= 4.0 / nd {
        return Err(CriteriaError::SupercriticalPower {
            alpha: p.alpha,
            dim: p.dim,
        });
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(CriteriaError::BadConstant(c));
    }
    let na = nd * p.alpha;
    Ok(DecayBound {
        a: -2.0 * p.gamma,
        b: p.theta.cos() * c * ((na / 4.0) * c).powf(na / (4.0 - na)) * (4.0 - na) / 2.0,
        nu: 2.0 * p.alpha / (4.0 - na),
    })
}

impl DecayBound {
    /// Whether the closed-form bound applies to initial mass `mass0`.
    pub fn applies(&self, mass0: f64) -> bool {
        mass0.powf(self.nu) <= self.a / self.b
    }

    /// `e^{-a t} (f(0)^{-nu} - b/a)^{-1/nu}`, or `None` when the premise
    /// `f(0)^nu <= a/b` fails.
    pub fn mass_bound(&self, mass0: f64, t: f64) -> Option<f64> {
        let base = mass0.powf(-self.nu) - self.b / self.a;
        if base <= 0.0 {
            return None;
        }
        Some((-self.a * t).exp() * base.powf(-1.0 / self.nu))
    }
}

/// The unique amplitude `kappa* > 0` at which `E(kappa psi) + xi ||kappa
/// psi||_L2^2` changes sign:
/// `kappa* = [(alpha+2)(||grad psi||^2/2 + xi ||psi||^2) / ||psi||_{alpha+2}^{alpha+2}]^{1/alpha}`.
/// The damped blowup condition holds strictly for all `|kappa| > kappa*`.
pub fn kappa_threshold(psi: &Field, p: &Params) -> Result<f64, CriteriaError> {
    kappa_threshold_with_xi(psi, p.alpha, xi(p)?)
}

/// As [`kappa_threshold`] with an explicit mass weight; `xi = 0` gives the
/// plain negative-energy threshold.
pub fn kappa_threshold_with_xi(psi: &Field, alpha: f64, xi: f64) -> Result<f64, CriteriaError> {
    let m = functionals::mass(psi)?;
    let lp = functionals::power_integral(psi, alpha + 2.0)?;
    if m == 0.0 || lp == 0.0 {
        return Err(CriteriaError::ZeroProfile);
    }
    let g = functionals::grad_norm_sq(psi)?;
    Ok(((alpha + 2.0) * (0.5 * g + xi * m) / lp).powf(1.0 / alpha))
}
