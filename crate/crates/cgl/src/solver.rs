//! Pseudo-spectral time stepping of `u_t = e^{i theta}(Lap u + |u|^alpha u) +
//! gamma u` on the periodic box, with adaptive steps and blowup detection.
//!
//! The linear part is the diagonal Fourier multiplier `-e^{i theta}|k|^2`, so
//! an exponential integrator reproduces the integral (Duhamel) form of the
//! equation exactly on the linear flow. One step is fourth-order exponential
//! time differencing Runge-Kutta with the remainder
//! `N(u) = e^{i theta} P(|u|^alpha u) + gamma u` treated as the nonlinearity
//! (`P` = de-aliasing projection). Local error is estimated by step doubling:
//! one `dt` step against two `dt/2` steps, measured in L2.

use num_complex::Complex64;
use thiserror::Error;

use crate::domain::{
    validate_params, DiagnosticsRecord, Field, Grid, Params, Requirement, TimeSeries,
};
use crate::functionals;
use crate::spectral::SpectralOps;

/// Sup-norm level below which a run is declared decayed.
pub const DECAY_SUP_THRESHOLD: f64 = 1e-8;

const GROW_MAX: f64 = 5.0;
const SHRINK_MIN: f64 = 0.1;
const ERR_EXPONENT: f64 = 0.2; // 1/(order+1)

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("step size must be positive, got {0}")]
    BadStep(f64),
    #[error("|theta| must be < pi/2 for the parabolic flow, got {0}")]
    NotParabolic(f64),
    #[error("field contains non-finite samples")]
    NonFinite,
    #[error("field lives on a {got}-dim grid, parameters say dim = {want}")]
    DimMismatch { got: usize, want: usize },
}

#[derive(Debug, Error, PartialEq)]
pub enum ControlsError {
    #[error("need 0 < dt_min <= dt_init, got dt_min = {dt_min}, dt_init = {dt_init}")]
    BadStepBounds { dt_min: f64, dt_init: f64 },
    #[error("tol must be positive, got {0}")]
    BadTol(f64),
    #[error("sup_blowup_threshold must exceed 1, got {0}")]
    BadBlowupThreshold(f64),
    #[error("t_max must be positive, got {0}")]
    BadHorizon(f64),
    #[error("record_every must be at least 1")]
    BadCadence,
    #[error("safety factor must lie in (0, 1), got {0}")]
    BadSafety(f64),
}

/// Adaptive-stepping knobs.
#[derive(Debug, Clone)]
pub struct StepControls {
    pub dt_init: f64,
    /// Floor step; blowup is declared only once steps are pinned here.
    pub dt_min: f64,
    /// Ceiling step (defaults to unbounded); useful to pin the recording
    /// cadence on decaying runs.
    pub dt_max: f64,
    /// Step-size safety factor in (0, 1).
    pub safety: f64,
    /// Local error tolerance; a step is accepted when the step-doubling
    /// estimate is at most `tol * (1 + ||u||_L2)`.
    pub tol: f64,
    /// Sup-norm level declaring blowup (together with the floored step).
    pub sup_blowup_threshold: f64,
    /// Horizon.
    pub t_max: f64,
    /// Diagnostics cadence in accepted steps.
    pub record_every: usize,
    /// Test hook: propagate with the linear semigroup alone (the nonlinear
    /// and driving terms are switched off).
    pub linear_only: bool,
}

impl Default for StepControls {
    fn default() -> Self {
        StepControls {
            dt_init: 1e-3,
            dt_min: 1e-10,
            dt_max: f64::INFINITY,
            safety: 0.9,
            tol: 1e-10,
            sup_blowup_threshold: 1e6,
            t_max: 10.0,
            record_every: 1,
            linear_only: false,
        }
    }
}

impl StepControls {
    pub fn validate(&self) -> Result<(), ControlsError> {
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_init) {
            return Err(ControlsError::BadStepBounds {
                dt_min: self.dt_min,
                dt_init: self.dt_init,
            });
        }
        if !(self.tol > 0.0) {
            return Err(ControlsError::BadTol(self.tol));
        }
        if !(self.sup_blowup_threshold > 1.0) {
            return Err(ControlsError::BadBlowupThreshold(self.sup_blowup_threshold));
        }
        if !(self.t_max > 0.0) {
            return Err(ControlsError::BadHorizon(self.t_max));
        }
        if self.record_every == 0 {
            return Err(ControlsError::BadCadence);
        }
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return Err(ControlsError::BadSafety(self.safety));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutcomeKind {
    /// Sup norm crossed the threshold while steps sat on the floor. `t_star`
    /// is the last accepted time plus the homogeneous-equation residual time
    /// `1/(alpha cos(theta) sup^alpha)`.
    BlowupDetected {
        t_star: f64,
        sup_norm_final: f64,
    },
    ReachedHorizon,
    /// Sup norm fell below `below`.
    Decayed {
        below: f64,
    },
}

#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub kind: OutcomeKind,
    pub series: TimeSeries,
    pub final_field: Field,
}

/// Applies the linear solution operator: every Fourier mode is multiplied by
/// `exp(-e^{i theta} |k|^2 t)`. Exact solution of `w_t = e^{i theta} Lap w`.
pub fn semigroup_apply(u: &Field, t: f64, theta: f64) -> Result<Field, SolverError> {
    if t < 0.0 {
        return Err(SolverError::NegativeTime(t));
    }
    if theta.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(SolverError::NotParabolic(theta));
    }
    let mut ops = SpectralOps::new(u.grid());
    let mut spec = ops.forward(u.values());
    let eitheta = Complex64::from_polar(1.0, theta);
    for (c, &k2) in spec.iter_mut().zip(ops.k_sq()) {
        *c *= (-eitheta * k2 * t).exp();
    }
    let values = ops.inverse(&spec);
    Field::from_values(u.grid().clone(), values).map_err(|_| SolverError::NonFinite)
}

/// Right-hand side `e^{i theta}(Lap u + P(|u|^alpha u)) + gamma u`, the `u_t`
/// used by the diagnostics.
pub fn rhs(u: &Field, p: &Params) -> Result<Field, SolverError> {
    if !u.is_finite() {
        return Err(SolverError::NonFinite);
    }
    if u.grid().dim() != p.dim {
        return Err(SolverError::DimMismatch {
            got: u.grid().dim(),
            want: p.dim,
        });
    }
    let mut ops = SpectralOps::new(u.grid());
    let spec = ops.forward(u.values());
    let mut nl = Vec::new();
    ops.dealiased_pow_spec(&spec, p.alpha, &mut nl);
    let eitheta = Complex64::from_polar(1.0, p.theta);
    let out_spec: Vec<Complex64> = spec
        .iter()
        .zip(ops.k_sq())
        .zip(&nl)
        .map(|((c, &k2), w)| eitheta * (-k2 * c + w) + p.gamma * c)
        .collect();
    let values = ops.inverse(&out_spec);
    Ok(Field::from_values(u.grid().clone(), values).expect("same grid"))
}

fn rhs_linear(u: &Field, theta: f64) -> Field {
    let mut ops = SpectralOps::new(u.grid());
    let spec = ops.forward(u.values());
    let eitheta = Complex64::from_polar(1.0, theta);
    let out: Vec<Complex64> = spec
        .iter()
        .zip(ops.k_sq())
        .map(|(c, &k2)| -eitheta * k2 * c)
        .collect();
    let values = ops.inverse(&out);
    Field::from_values(u.grid().clone(), values).expect("same grid")
}

/// Evaluates all diagnostics of one state, with `u_t` taken from [`rhs`].
pub fn diagnose(t: f64, u: &Field, p: &Params) -> Result<DiagnosticsRecord, SolverError> {
    diagnose_with_mode(t, u, p, false)
}

pub(crate) fn diagnose_with_mode(
    t: f64,
    u: &Field,
    p: &Params,
    linear_only: bool,
) -> Result<DiagnosticsRecord, SolverError> {
    let ut = if linear_only {
        rhs_linear(u, p.theta)
    } else {
        rhs(u, p)?
    };
    let err = |_| SolverError::NonFinite;
    let mass = functionals::mass(u).map_err(err)?;
    let grad_sq = functionals::grad_norm_sq(u).map_err(err)?;
    let lp = functionals::power_integral(u, p.alpha + 2.0).map_err(err)?;
    let energy = 0.5 * grad_sq - lp / (p.alpha + 2.0);
    let variational = grad_sq - lp;
    let ut_sq = functionals::mass(&ut).map_err(err)?;
    let dv = u.grid().cell_volume();
    let inner_uut = dv
        * u.values()
            .iter()
            .zip(ut.values())
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>();
    Ok(DiagnosticsRecord {
        t,
        mass,
        energy,
        variational,
        grad_sq,
        sup_norm: u.sup_norm(),
        ut_sq,
        inner_uut,
    })
}

/// Mode-wise exponential-integrator coefficients for one step size.
struct Coeffs {
    dt: f64,
    e1: Vec<Complex64>,
    e2: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

/// `phi_1(z), phi_2(z), phi_3(z)` with `phi_j(z) = (e^z - sum_{k<j} z^k/k!) /
/// z^j`, series near the origin to dodge cancellation.
fn phi123(z: Complex64) -> (Complex64, Complex64, Complex64) {
    if z.norm() < 1.0 {
        let mut p1 = Complex64::new(0.0, 0.0);
        let mut p2 = Complex64::new(0.0, 0.0);
        let mut p3 = Complex64::new(0.0, 0.0);
        let mut fact = 1.0f64; // k!
        let mut zk = Complex64::new(1.0, 0.0); // z^k
        for k in 0..25u32 {
            p1 += zk / (fact * (k as f64 + 1.0));
            p2 += zk / (fact * (k as f64 + 1.0) * (k as f64 + 2.0));
            p3 += zk / (fact * (k as f64 + 1.0) * (k as f64 + 2.0) * (k as f64 + 3.0));
            zk *= z;
            fact *= k as f64 + 1.0;
        }
        (p1, p2, p3)
    } else {
        let ez = z.exp();
        let one = Complex64::new(1.0, 0.0);
        let p1 = (ez - one) / z;
        let p2 = (ez - one - z) / (z * z);
        let p3 = (ez - one - z - z * z * 0.5) / (z * z * z);
        (p1, p2, p3)
    }
}

impl Coeffs {
    fn build(k_sq: &[f64], theta: f64, dt: f64) -> Self {
        let m = k_sq.len();
        let mut c = Coeffs {
            dt,
            e1: Vec::with_capacity(m),
            e2: Vec::with_capacity(m),
            q: Vec::with_capacity(m),
            f1: Vec::with_capacity(m),
            f2: Vec::with_capacity(m),
            f3: Vec::with_capacity(m),
        };
        let eitheta = Complex64::from_polar(1.0, theta);
        for &k2 in k_sq {
            let z = -eitheta * k2 * dt;
            c.e1.push(z.exp());
            c.e2.push((z * 0.5).exp());
            let (h1, _, _) = phi123(z * 0.5);
            c.q.push(h1 * (dt * 0.5));
            let (p1, p2, p3) = phi123(z);
            c.f1.push((p1 - 3.0 * p2 + 4.0 * p3) * dt);
            c.f2.push((p2 - 2.0 * p3) * dt);
            c.f3.push((4.0 * p3 - p2) * dt);
        }
        c
    }
}

/// Reusable stepper: owns the transform workspace, coefficient tables, and
/// stage buffers for one simulation.
pub struct Etdrk4Stepper {
    ops: SpectralOps,
    grid: Grid,
    params: Params,
    linear_only: bool,
    coeffs: Vec<Coeffs>,
    nl_buf: Vec<Complex64>,
    n1: Vec<Complex64>,
    n2: Vec<Complex64>,
    n3: Vec<Complex64>,
    n4: Vec<Complex64>,
    stage_a: Vec<Complex64>,
    stage_b: Vec<Complex64>,
    stage_c: Vec<Complex64>,
}

impl Etdrk4Stepper {
    pub fn new(grid: &Grid, p: &Params) -> Self {
        let ops = SpectralOps::new(grid);
        let m = ops.len();
        let zero = vec![Complex64::new(0.0, 0.0); m];
        Etdrk4Stepper {
            ops,
            grid: grid.clone(),
            params: *p,
            linear_only: false,
            coeffs: Vec::new(),
            nl_buf: Vec::with_capacity(m),
            n1: zero.clone(),
            n2: zero.clone(),
            n3: zero.clone(),
            n4: zero.clone(),
            stage_a: zero.clone(),
            stage_b: zero.clone(),
            stage_c: zero,
        }
    }

    pub fn set_linear_only(&mut self, flag: bool) {
        self.linear_only = flag;
    }

    pub(crate) fn forward(&mut self, u: &Field) -> Vec<Complex64> {
        self.ops.forward(u.values())
    }

    pub(crate) fn field_from(&mut self, spectrum: &[Complex64]) -> Field {
        let values = self.ops.inverse(spectrum);
        Field::from_values(self.grid.clone(), values).expect("same grid")
    }

    pub(crate) fn l2_norm_spec(&self, spectrum: &[Complex64]) -> f64 {
        self.ops.l2_norm_spec(spectrum)
    }

    fn coeff_index(&mut self, dt: f64) -> usize {
        if let Some(i) = self.coeffs.iter().position(|c| c.dt == dt) {
            return i;
        }
        if self.coeffs.len() >= 4 {
            self.coeffs.remove(0);
        }
        self.coeffs
            .push(Coeffs::build(self.ops.k_sq(), self.params.theta, dt));
        self.coeffs.len() - 1
    }

    fn nonlinearity(&mut self, spec: &[Complex64], out_slot: usize) {
        let eitheta = Complex64::from_polar(1.0, self.params.theta);
        let gamma = self.params.gamma;
        if !self.linear_only {
            self.ops
                .dealiased_pow_spec(spec, self.params.alpha, &mut self.nl_buf);
        }
        let out = match out_slot {
            1 => &mut self.n1,
            2 => &mut self.n2,
            3 => &mut self.n3,
            _ => &mut self.n4,
        };
        if self.linear_only {
            out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        } else {
            for ((o, w), c) in out.iter_mut().zip(&self.nl_buf).zip(spec) {
                *o = eitheta * w + gamma * c;
            }
        }
    }

    /// One raw fourth-order exponential step, no error estimate.
    pub(crate) fn etdrk4_step(&mut self, spec: &[Complex64], dt: f64, out: &mut Vec<Complex64>) {
        let ci = self.coeff_index(dt);
        let m = spec.len();
        self.nonlinearity(spec, 1);
        {
            let c = &self.coeffs[ci];
            for k in 0..m {
                self.stage_a[k] = c.e2[k] * spec[k] + c.q[k] * self.n1[k];
            }
        }
        let a = std::mem::take(&mut self.stage_a);
        self.nonlinearity(&a, 2);
        self.stage_a = a;
        {
            let c = &self.coeffs[ci];
            for k in 0..m {
                self.stage_b[k] = c.e2[k] * spec[k] + c.q[k] * self.n2[k];
            }
        }
        let b = std::mem::take(&mut self.stage_b);
        self.nonlinearity(&b, 3);
        self.stage_b = b;
        {
            let c = &self.coeffs[ci];
            for k in 0..m {
                self.stage_c[k] =
                    c.e2[k] * self.stage_a[k] + c.q[k] * (2.0 * self.n3[k] - self.n1[k]);
            }
        }
        let cst = std::mem::take(&mut self.stage_c);
        self.nonlinearity(&cst, 4);
        self.stage_c = cst;
        let c = &self.coeffs[ci];
        out.clear();
        out.reserve(m);
        for k in 0..m {
            out.push(
                c.e1[k] * spec[k]
                    + c.f1[k] * self.n1[k]
                    + c.f2[k] * 2.0 * (self.n2[k] + self.n3[k])
                    + c.f3[k] * self.n4[k],
            );
        }
    }

    /// Step-doubled advance: returns the two-half-step (fine) result and the
    /// L2 distance between it and the single full step. An infinite estimate
    /// signals an imminent blowup (overflowed nonlinearity) rather than an
    /// error.
    pub(crate) fn double_step_spec(
        &mut self,
        spec: &[Complex64],
        dt: f64,
    ) -> (Vec<Complex64>, f64) {
        let mut coarse = Vec::new();
        self.etdrk4_step(spec, dt, &mut coarse);
        let mut half = Vec::new();
        self.etdrk4_step(spec, 0.5 * dt, &mut half);
        let mut fine = Vec::new();
        self.etdrk4_step(&half, 0.5 * dt, &mut fine);
        let err = self.ops.l2_norm_diff_spec(&coarse, &fine);
        if err.is_finite() {
            (fine, err)
        } else {
            (fine, f64::INFINITY)
        }
    }

    /// Step-doubled advance in physical space; the returned field is the
    /// fine (two half-steps) solution.
    pub fn step(&mut self, u: &Field, dt: f64) -> Result<(Field, f64), SolverError> {
        if !(dt > 0.0) {
            return Err(SolverError::BadStep(dt));
        }
        if !u.is_finite() {
            return Err(SolverError::NonFinite);
        }
        let spec = self.forward(u);
        let (fine, err) = self.double_step_spec(&spec, dt);
        Ok((self.field_from(&fine), err))
    }

    /// Fixed-step advance by `steps` raw steps of size `dt` (no doubling),
    /// for convergence studies.
    pub fn advance_fixed(
        &mut self,
        u: &Field,
        dt: f64,
        steps: usize,
    ) -> Result<Field, SolverError> {
        if !(dt > 0.0) {
            return Err(SolverError::BadStep(dt));
        }
        let mut spec = self.forward(u);
        let mut next = Vec::new();
        for _ in 0..steps {
            self.etdrk4_step(&spec, dt, &mut next);
            std::mem::swap(&mut spec, &mut next);
        }
        Ok(self.field_from(&spec))
    }
}

/// One step-doubled ETDRK4 step. Convenience wrapper over
/// [`Etdrk4Stepper::step`]; the error estimate is `infinity` when the
/// nonlinearity overflowed, which the adaptive driver reads as
/// blowup-imminent.
pub fn step(u: &Field, dt: f64, p: &Params) -> Result<(Field, f64), SolverError> {
    Etdrk4Stepper::new(u.grid(), p).step(u, dt)
}

/// Advances `u0` under the adaptive driver until blowup is detected, the sup
/// norm decays below [`DECAY_SUP_THRESHOLD`], or the horizon is reached. All
/// terminations are encoded in the outcome; parameter and control
/// preconditions panic.
pub fn simulate(u0: &Field, p: &Params, c: &StepControls) -> SimOutcome {
    c.validate().expect("invalid step controls");
    assert_eq!(
        u0.grid().dim(),
        p.dim,
        "field dimension does not match parameters"
    );
    assert!(u0.is_finite(), "initial data must be finite");
    assert!(
        !validate_params(p)
            .iter()
            .any(|v| v.requirement == Requirement::Solver),
        "simulate requires |theta| < pi/2"
    );

    let mut stepper = Etdrk4Stepper::new(u0.grid(), p);
    stepper.set_linear_only(c.linear_only);
    let mut series = TimeSeries::new(*p);
    series.linear_only = c.linear_only;

    let record = |series: &mut TimeSeries, t: f64, u: &Field| {
        let rec = diagnose_with_mode(t, u, p, c.linear_only).expect("accepted states are finite");
        series.push(rec).expect("record times increase");
    };

    let mut field = u0.clone();
    let mut t = 0.0;
    record(&mut series, 0.0, &field);
    let mut last_record_t = 0.0;
    let mut sup = field.sup_norm();

    let finish = |series: &mut TimeSeries, t: f64, last_record_t: f64, field: &Field| {
        if t > last_record_t {
            record(series, t, field);
        }
    };

    if sup < DECAY_SUP_THRESHOLD {
        return SimOutcome {
            kind: OutcomeKind::Decayed {
                below: DECAY_SUP_THRESHOLD,
            },
            series,
            final_field: field,
        };
    }

    let cos_theta = p.cos_theta();
    let mut spec = stepper.forward(&field);
    let mut dt = c.dt_init.min(c.dt_max).min(c.t_max);
    let mut since_record = 0usize;

    let mut attempts: u64 = 0;
    loop {
        attempts += 1;
        assert!(
            attempts < 50_000_000,
            "step budget exceeded; controls too tight for this run"
        );

        // caps: ceiling, the homogeneous-equation time scale near blowup,
        // the floor, and finally the horizon landing
        let mut dt_eff = dt.min(c.dt_max);
        if !c.linear_only && sup > 0.0 {
            let local = c.safety / (cos_theta * sup.powf(p.alpha));
            if local.is_finite() {
                dt_eff = dt_eff.min(local);
            }
        }
        dt_eff = dt_eff.max(c.dt_min);
        let at_floor = dt_eff <= c.dt_min * (1.0 + 1e-9);
        if dt_eff >= c.t_max - t {
            dt_eff = c.t_max - t;
        }

        let (cand, err) = stepper.double_step_spec(&spec, dt_eff);
        let tol_eff = c.tol * (1.0 + stepper.l2_norm_spec(&spec));
        let cand_ok = err.is_finite();

        if (cand_ok && err <= tol_eff) || (cand_ok && at_floor) {
            spec = cand;
            t += dt_eff;
            field = stepper.field_from(&spec);
            sup = field.sup_norm();
            since_record += 1;
            if since_record >= c.record_every {
                record(&mut series, t, &field);
                last_record_t = t;
                since_record = 0;
            }

            if sup < DECAY_SUP_THRESHOLD {
                finish(&mut series, t, last_record_t, &field);
                return SimOutcome {
                    kind: OutcomeKind::Decayed {
                        below: DECAY_SUP_THRESHOLD,
                    },
                    series,
                    final_field: field,
                };
            }
            if sup >= c.sup_blowup_threshold && at_floor {
                let t_star = t + 1.0 / (p.alpha * cos_theta * sup.powf(p.alpha));
                finish(&mut series, t, last_record_t, &field);
                return SimOutcome {
                    kind: OutcomeKind::BlowupDetected {
                        t_star,
                        sup_norm_final: sup,
                    },
                    series,
                    final_field: field,
                };
            }
            if t >= c.t_max * (1.0 - 1e-12) {
                finish(&mut series, t, last_record_t, &field);
                return SimOutcome {
                    kind: OutcomeKind::ReachedHorizon,
                    series,
                    final_field: field,
                };
            }

            let fac = if err > 0.0 {
                (c.safety * (tol_eff / err).powf(ERR_EXPONENT)).clamp(SHRINK_MIN, GROW_MAX)
            } else {
                GROW_MAX
            };
            dt = (dt_eff * fac).max(c.dt_min);
        } else if at_floor {
            // cannot shrink further and the candidate overflowed: the state
            // is past rescue, declare blowup from the last finite state
            let t_star = t + 1.0 / (p.alpha * cos_theta * sup.powf(p.alpha));
            finish(&mut series, t, last_record_t, &field);
            return SimOutcome {
                kind: OutcomeKind::BlowupDetected {
                    t_star,
                    sup_norm_final: sup,
                },
                series,
                final_field: field,
            };
        } else {
            let fac = if cand_ok && err > 0.0 {
                (c.safety * (tol_eff / err).powf(ERR_EXPONENT)).clamp(SHRINK_MIN, 0.5)
            } else {
                SHRINK_MIN
            };
            dt = (dt_eff * fac).max(c.dt_min);
        }
    }
}
