//! Along computed trajectories, checks the differential identities of the
//! equation and the convexity quantities behind the blowup criteria,
//! reporting residuals and sign/monotonicity violations.
//!
//! Time derivatives are approximated by centered differences at record
//! midpoints, with right-hand sides averaged across the two bracketing
//! records (second order in the recording cadence). Monitors never abort a
//! run; they report. Beyond-sup-norm-1e3 records sit too close to a
//! singularity for the quadratures to resolve, so violations there are
//! listed separately as expected degradation and do not fail the report.

use thiserror::Error;

use crate::criteria;
use crate::domain::{DiagnosticsRecord, TimeSeries};

/// Default tolerance for the differential-identity residuals.
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-4;
/// Default tolerance for the convexity monitors.
pub const DEFAULT_CONVEXITY_TOL: f64 = 1e-3;
/// Sup-norm level above which identity degradation is expected.
pub const RESOLVED_SUP: f64 = 1e3;

const EPS: f64 = 1e-30;

#[derive(Debug, Error, PartialEq)]
pub enum MonitorError {
    #[error("need at least {need} records, got {got}")]
    TooFewRecords { need: usize, got: usize },
    #[error("records carry non-finite diagnostics")]
    MissingDiagnostics,
    #[error("wrong regime: {0}")]
    WrongRegime(String),
    #[error("criterion hypotheses not met: {0}")]
    HypothesesNotMet(String),
}

#[derive(Debug, Clone)]
pub struct MonitorReport {
    pub name: String,
    /// Largest relative residual over the resolved part of the run.
    pub max_rel_residual: f64,
    /// Beyond-tolerance points in the resolved region; nonempty fails the
    /// report.
    pub violations: Vec<(f64, String)>,
    /// Beyond-tolerance points where sup_norm exceeds [`RESOLVED_SUP`]:
    /// near-singularity, expected degradation.
    pub near_singularity: Vec<(f64, String)>,
    pub passed: bool,
    pub tolerance: f64,
}

struct ReportBuilder {
    name: String,
    tolerance: f64,
    max_rel_residual: f64,
    violations: Vec<(f64, String)>,
    near_singularity: Vec<(f64, String)>,
}

impl ReportBuilder {
    fn new(name: &str, tolerance: f64) -> Self {
        ReportBuilder {
            name: name.to_string(),
            tolerance,
            max_rel_residual: 0.0,
            violations: Vec::new(),
            near_singularity: Vec::new(),
        }
    }

    /// Files a residual measured at time `t`; `resolved` tells whether the
    /// state was below the degradation level.
    fn residual(&mut self, t: f64, value: f64, resolved: bool, what: &str) {
        if resolved {
            self.max_rel_residual = self.max_rel_residual.max(value);
            if value > self.tolerance {
                self.violations
                    .push((t, format!("{what}: residual {value:.3e}")));
            }
        } else if value > self.tolerance || !value.is_finite() {
            self.near_singularity.push((
                t,
                format!("{what}: residual {value:.3e} (near-singularity, expected degradation)"),
            ));
        }
    }

    /// Files a hard condition (sign, monotonicity) at time `t`.
    fn condition(&mut self, t: f64, ok: bool, resolved: bool, what: String) {
        if ok {
            return;
        }
        if resolved {
            self.violations.push((t, what));
        } else {
            self.near_singularity.push((
                t,
                format!("{what} (near-singularity, expected degradation)"),
            ));
        }
    }

    fn finish(self) -> MonitorReport {
        let passed = self.max_rel_residual <= self.tolerance && self.violations.is_empty();
        MonitorReport {
            name: self.name,
            max_rel_residual: self.max_rel_residual,
            violations: self.violations,
            near_singularity: self.near_singularity,
            passed,
            tolerance: self.tolerance,
        }
    }
}

fn require_records(s: &TimeSeries, need: usize) -> Result<&[DiagnosticsRecord], MonitorError> {
    let recs = s.records();
    if recs.len() < need {
        return Err(MonitorError::TooFewRecords {
            need,
            got: recs.len(),
        });
    }
    // The quadratures of states far past the resolution level may overflow;
    // those records fall in the expected-degradation band anyway, so only
    // resolved records must carry finite diagnostics.
    if recs.iter().filter(|r| r.sup_norm <= RESOLVED_SUP).any(|r| {
        !(r.mass.is_finite()
            && r.energy.is_finite()
            && r.variational.is_finite()
            && r.grad_sq.is_finite()
            && r.ut_sq.is_finite()
            && r.inner_uut.re.is_finite()
            && r.inner_uut.im.is_finite())
    }) {
        return Err(MonitorError::MissingDiagnostics);
    }
    Ok(recs)
}

/// Effective `(gamma, I)` for the identities: a linear-only run solves the
/// bare semigroup equation, whose identities are those of the full equation
/// with the nonlinear integral and the driving term dropped.
fn effective(s: &TimeSeries, r: &DiagnosticsRecord) -> (f64, f64) {
    if s.linear_only {
        (0.0, r.grad_sq)
    } else {
        (s.params.gamma, r.variational)
    }
}

/// Checks `d/dt int |u|^2 = 2 gamma int |u|^2 - 2 cos(theta) I(u)` at record
/// midpoints. The residual is normalized by `|2 gamma m| + |2 cos(theta) I|`.
pub fn residual_mass_identity(s: &TimeSeries, tol: f64) -> Result<MonitorReport, MonitorError> {
    let recs = require_records(s, 3)?;
    let cos = s.params.theta.cos();
    let mut b = ReportBuilder::new("mass-identity", tol);
    for w in recs.windows(2) {
        let (g0, i0) = effective(s, &w[0]);
        let (g1, i1) = effective(s, &w[1]);
        let dm = (w[1].mass - w[0].mass) / (w[1].t - w[0].t);
        let r0 = 2.0 * g0 * w[0].mass - 2.0 * cos * i0;
        let r1 = 2.0 * g1 * w[1].mass - 2.0 * cos * i1;
        let rhs = 0.5 * (r0 + r1);
        let scale = (g0 * w[0].mass).abs().max((g1 * w[1].mass).abs()) * 2.0
            + (cos * i0).abs().max((cos * i1).abs()) * 2.0
            + EPS;
        let t_mid = 0.5 * (w[0].t + w[1].t);
        let resolved = w[0].sup_norm.max(w[1].sup_norm) <= RESOLVED_SUP;
        b.residual(t_mid, (dm - rhs).abs() / scale, resolved, "d/dt mass");
    }
    Ok(b.finish())
}

/// Checks the two energy identities
/// `dE/dt = -cos(theta) int|u_t|^2 + gamma^2 cos(theta) int|u|^2 - gamma cos(2 theta) I`
/// and
/// `d/dt[E - (gamma/2) cos(theta) int|u|^2] = -cos(theta) int|u_t|^2 + gamma sin^2(theta) I`
/// at midpoints, plus the pointwise relation `Im int conj(u) u_t = -sin(theta) I`.
/// At `gamma = 0` the energy must additionally be non-increasing.
pub fn residual_energy_identity(s: &TimeSeries, tol: f64) -> Result<MonitorReport, MonitorError> {
    if s.linear_only {
        return Err(MonitorError::WrongRegime(
            "energy identities are checked for the full equation, not linear-only runs".to_string(),
        ));
    }
    let recs = require_records(s, 3)?;
    let p = s.params;
    let cos = p.theta.cos();
    let cos2 = (2.0 * p.theta).cos();
    let sin = p.theta.sin();
    let sin_sq = sin * sin;
    let g = p.gamma;
    let mut b = ReportBuilder::new("energy-identity", tol);

    for r in recs {
        let resolved = r.sup_norm <= RESOLVED_SUP;
        let lhs = r.inner_uut.im;
        let rhs = -sin * r.variational;
        let res =
            (lhs - rhs).abs() / (lhs.abs() + rhs.abs() + r.ut_sq.sqrt() * r.mass.sqrt() + EPS);
        b.residual(r.t, res, resolved, "Im<u, u_t> + sin(theta) I");
    }

    for w in recs.windows(2) {
        let dt = w[1].t - w[0].t;
        let t_mid = 0.5 * (w[0].t + w[1].t);
        let resolved = w[0].sup_norm.max(w[1].sup_norm) <= RESOLVED_SUP;

        let avg = |f: &dyn Fn(&DiagnosticsRecord) -> f64| 0.5 * (f(&w[0]) + f(&w[1]));

        // plain energy form
        let de = (w[1].energy - w[0].energy) / dt;
        let rhs1 = avg(&|r| -cos * r.ut_sq + g * g * cos * r.mass - g * cos2 * r.variational);
        let scale1 = avg(&|r| {
            (cos * r.ut_sq).abs() + (g * g * cos * r.mass).abs() + (g * cos2 * r.variational).abs()
        }) + EPS;
        b.residual(t_mid, (de - rhs1).abs() / scale1, resolved, "dE/dt");

        // shifted form
        let shifted = |r: &DiagnosticsRecord| r.energy - 0.5 * g * cos * r.mass;
        let ds = (shifted(&w[1]) - shifted(&w[0])) / dt;
        let rhs2 = avg(&|r| -cos * r.ut_sq + g * sin_sq * r.variational);
        let scale2 = avg(&|r| (cos * r.ut_sq).abs() + (g * sin_sq * r.variational).abs()) + EPS;
        b.residual(
            t_mid,
            (ds - rhs2).abs() / scale2,
            resolved,
            "d/dt[E - (gamma/2)cos(theta) mass]",
        );

        if g == 0.0 {
            // dE/dt = -cos(theta) int |u_t|^2 <= 0
            let ok = w[1].energy <= w[0].energy + tol * (1.0 + w[0].energy.abs());
            b.condition(
                t_mid,
                ok,
                resolved,
                format!(
                    "energy must not increase at gamma = 0: {} -> {}",
                    w[0].energy, w[1].energy
                ),
            );
        }
    }
    Ok(b.finish())
}

/// Convexity monitor for driven (gamma > 0) negative-energy runs. With
/// `f~ = e^{-2 gamma t} mass`, `e~ = e^{-2 gamma t} E`, checks that `e~ < 0`
/// throughout, that `-e~ f~^{-(alpha+2)/2}` never decreases, the midpoint
/// lower bound `f~' >= 2(alpha+2) cos(theta) (-E(u0)) mass(0)^{-(alpha+2)/2}
/// f~^{(alpha+2)/2}`, and that `f~` dominates the closed-form minorant
/// obtained by integrating that inequality.
pub fn monitor_pos(s: &TimeSeries, tol: f64) -> Result<MonitorReport, MonitorError> {
    let p = s.params;
    if p.gamma <= 0.0 {
        return Err(MonitorError::WrongRegime(format!(
            "driven-convexity monitor needs gamma > 0, got {}",
            p.gamma
        )));
    }
    let recs = require_records(s, 3)?;
    let e0 = recs[0].energy;
    if e0 >= 0.0 {
        return Err(MonitorError::HypothesesNotMet(format!(
            "E(u0) = {e0} is not negative"
        )));
    }
    let m0 = recs[0].mass;
    let cos = p.theta.cos();
    let half_pow = (p.alpha + 2.0) / 2.0;
    let rate = 2.0 * (p.alpha + 2.0) * cos * (-e0) * m0.powf(-half_pow);

    let f_tilde = |r: &DiagnosticsRecord| (-2.0 * p.gamma * r.t).exp() * r.mass;
    let e_tilde = |r: &DiagnosticsRecord| (-2.0 * p.gamma * r.t).exp() * r.energy;

    let mut b = ReportBuilder::new("driven-convexity", tol);

    for r in recs {
        let resolved = r.sup_norm <= RESOLVED_SUP;
        b.condition(
            r.t,
            e_tilde(r) < 0.0,
            resolved,
            format!("rescaled energy must stay negative, got {}", e_tilde(r)),
        );
    }

    let q = |r: &DiagnosticsRecord| -e_tilde(r) * f_tilde(r).powf(-half_pow);
    for w in recs.windows(2) {
        let resolved = w[0].sup_norm.max(w[1].sup_norm) <= RESOLVED_SUP;
        let (q0, q1) = (q(&w[0]), q(&w[1]));
        let slack = (q1 - q0) / q0.abs().max(EPS);
        b.residual(
            0.5 * (w[0].t + w[1].t),
            (-slack).max(0.0),
            resolved,
            "-e~ f~^{-(alpha+2)/2} must not decrease",
        );

        let df = (f_tilde(&w[1]) - f_tilde(&w[0])) / (w[1].t - w[0].t);
        let rhs = rate * (0.5 * (f_tilde(&w[0]) + f_tilde(&w[1]))).powf(half_pow);
        let shortfall = (rhs - df) / rhs.abs().max(EPS);
        b.residual(
            0.5 * (w[0].t + w[1].t),
            shortfall.max(0.0),
            resolved,
            "f~ growth lower bound",
        );
    }

    // separable minorant g' = rate g^{(alpha+2)/2}, g(0) = f~(0):
    // g(t) = [f0^{-alpha/2} - (alpha/2) rate t]^{-2/alpha}
    let f0 = f_tilde(&recs[0]);
    for r in recs.iter().skip(1) {
        let resolved = r.sup_norm <= RESOLVED_SUP;
        let base = f0.powf(-p.alpha / 2.0) - 0.5 * p.alpha * rate * r.t;
        if base <= 0.0 {
            // the minorant has already blown up; nothing finite to dominate
            continue;
        }
        let minorant = base.powf(-2.0 / p.alpha);
        let shortfall = (minorant - f_tilde(r)) / minorant;
        b.residual(
            r.t,
            shortfall.max(0.0),
            resolved,
            "f~ below separable minorant",
        );
    }

    Ok(b.finish())
}

/// Shifted-energy monitor for damped (gamma < 0) runs satisfying the blowup
/// criterion. With `rho = -gamma`, `eta` the structural multiple of `rho`,
/// and `E~ = E + eta mass`, checks `e <= E~ < 0`, the exponential bound
/// `E~(t) <= e^{t rho (alpha+2) cos 2theta} E~(0)`, positivity of `zeta`, the
/// integrated inequality
/// `-f^{-(alpha+2)/2} E - rho/(alpha cos theta) f^{-alpha/2} >= zeta`, and the
/// midpoint bound `f' >= 2(alpha+2) cos(theta) zeta f^{(alpha+2)/2}`.
pub fn monitor_neg(s: &TimeSeries, tol: f64) -> Result<MonitorReport, MonitorError> {
    let p = s.params;
    if p.gamma >= 0.0 {
        return Err(MonitorError::WrongRegime(format!(
            "shifted-energy monitor needs gamma < 0, got {}",
            p.gamma
        )));
    }
    let recs = require_records(s, 3)?;
    if p.theta.abs() >= std::f64::consts::FRAC_PI_4 {
        return Err(MonitorError::HypothesesNotMet(format!(
            "|theta| = {} is not below pi/4",
            p.theta.abs()
        )));
    }
    let structural = criteria::check_structural(&p);
    if !structural.holds {
        return Err(MonitorError::HypothesesNotMet(
            "structural condition fails".to_string(),
        ));
    }
    let xi = criteria::xi(&p).expect("regime checked above");
    let e0 = recs[0].energy;
    let m0 = recs[0].mass;
    if !(e0 + xi * m0 < 0.0) {
        return Err(MonitorError::HypothesesNotMet(format!(
            "E(u0) + xi mass(u0) = {} is not negative",
            e0 + xi * m0
        )));
    }

    let rho = -p.gamma;
    let eta = criteria::eta(&p).expect("regime checked above");
    let cos = p.theta.cos();
    let cos2 = (2.0 * p.theta).cos();
    let half_pow = (p.alpha + 2.0) / 2.0;
    let shifted = |r: &DiagnosticsRecord| r.energy + eta * r.mass;

    let mut b = ReportBuilder::new("shifted-energy", tol);

    // zeta > 0 under the hypotheses; it is a property of the data alone
    let zeta = -m0.powf(-half_pow) * e0 - rho / (p.alpha * cos) * m0.powf(-p.alpha / 2.0);
    b.condition(
        recs[0].t,
        zeta > 0.0,
        true,
        format!("zeta must be positive, got {zeta}"),
    );

    let growth = rho * (p.alpha + 2.0) * cos2;
    for r in recs {
        let resolved = r.sup_norm <= RESOLVED_SUP;
        let est = shifted(r);
        b.condition(
            r.t,
            r.energy <= est && est < 0.0,
            resolved,
            format!("need E <= E~ < 0, got E = {}, E~ = {est}", r.energy),
        );
        // exponential bound: both sides negative
        let bound = (growth * r.t).exp() * shifted(&recs[0]);
        let excess = (est - bound) / bound.abs().max(EPS);
        b.residual(
            r.t,
            excess.max(0.0),
            resolved,
            "shifted energy above exponential bound",
        );

        // integrated inequality
        let lhs = -r.mass.powf(-half_pow) * r.energy
            - rho / (p.alpha * cos) * r.mass.powf(-p.alpha / 2.0);
        let shortfall = (zeta - lhs) / zeta.abs().max(EPS);
        b.residual(
            r.t,
            shortfall.max(0.0),
            resolved,
            "integrated convexity inequality",
        );
    }

    for w in recs.windows(2) {
        let resolved = w[0].sup_norm.max(w[1].sup_norm) <= RESOLVED_SUP;
        let df = (w[1].mass - w[0].mass) / (w[1].t - w[0].t);
        let rhs =
            2.0 * (p.alpha + 2.0) * cos * zeta * (0.5 * (w[0].mass + w[1].mass)).powf(half_pow);
        let shortfall = (rhs - df) / rhs.abs().max(EPS);
        b.residual(
            0.5 * (w[0].t + w[1].t),
            shortfall.max(0.0),
            resolved,
            "mass growth lower bound",
        );
    }

    Ok(b.finish())
}
