//! Shared domain types: equation parameters, the periodic grid, complex
//! fields on the grid, and per-run diagnostics series.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use thiserror::Error;

use crate::spectral::SpectralOps;

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("alpha must be positive and finite, got {0}")]
    BadAlpha(f64),
    #[error("|theta| must be at most pi/2, got {0}")]
    BadTheta(f64),
    #[error("gamma must be finite, got {0}")]
    BadGamma(f64),
    #[error("dim must be 1, 2 or 3, got {0}")]
    BadDim(usize),
}

/// The knobs of the equation `u_t = e^{i theta}(Lap u + |u|^alpha u) + gamma u`.
///
/// Construction permits the boundary values `theta = +-pi/2` so that the
/// spatially homogeneous (ODE) formulas remain expressible at the dispersive
/// limit; the PDE solver itself insists on `|theta| < pi/2` and rejects the
/// boundary through [`validate_params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Phase of the rotated Laplacian/nonlinearity, radians.
    pub theta: f64,
    /// Nonlinearity power, > 0.
    pub alpha: f64,
    /// Linear driving (gamma > 0) or damping (gamma < 0) coefficient.
    pub gamma: f64,
    /// Spatial dimension, 1..=3.
    pub dim: usize,
}

impl Params {
    pub fn new(theta: f64, alpha: f64, gamma: f64, dim: usize) -> Result<Self, ParamsError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(ParamsError::BadAlpha(alpha));
        }
        if !(theta.abs() <= FRAC_PI_2) {
            return Err(ParamsError::BadTheta(theta));
        }
        if !gamma.is_finite() {
            return Err(ParamsError::BadGamma(gamma));
        }
        if !(1..=3).contains(&dim) {
            return Err(ParamsError::BadDim(dim));
        }
        Ok(Params {
            theta,
            alpha,
            gamma,
            dim,
        })
    }

    /// cos(theta), snapped to exactly zero on the `|theta| = pi/2` boundary
    /// so that formulas degenerate the way the closed-form solution does.
    pub fn cos_theta(&self) -> f64 {
        if self.theta.abs() >= FRAC_PI_2 {
            0.0
        } else {
            self.theta.cos()
        }
    }
}

/// Which consumer imposes a given parameter constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Requirement {
    /// The pseudo-spectral solver: parabolicity, `|theta| < pi/2` strictly.
    Solver,
    /// The negative-energy blowup criterion for gamma > 0 (same angular range
    /// as the solver).
    DrivenBlowup,
    /// The shifted-energy blowup criterion for gamma < 0: `|theta| < pi/4`.
    DampedBlowup,
}

impl std::fmt::Display for Requirement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Requirement::Solver => write!(f, "solver"),
            Requirement::DrivenBlowup => write!(f, "blowup criterion (gamma > 0)"),
            Requirement::DampedBlowup => write!(f, "blowup criterion (gamma < 0)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub requirement: Requirement,
    pub message: String,
}

/// Reports every structural constraint the parameters violate, tagged by the
/// consumer that imposes it. An empty list means all applicable hypotheses
/// hold. The structural inequality on `(alpha, theta)` and the energy-sign
/// conditions depend on the initial data and are checked by `criteria`, not
/// here.
pub fn validate_params(p: &Params) -> Vec<Violation> {
    let mut out = Vec::new();
    if p.theta.abs() >= FRAC_PI_2 {
        out.push(Violation {
            requirement: Requirement::Solver,
            message: format!(
                "|theta| = {} >= pi/2; the solver needs cos(theta) > 0",
                p.theta.abs()
            ),
        });
        if p.gamma > 0.0 {
            out.push(Violation {
                requirement: Requirement::DrivenBlowup,
                message: "the gamma > 0 criterion requires |theta| < pi/2".to_string(),
            });
        }
    }
    if p.gamma < 0.0 && p.theta.abs() >= FRAC_PI_4 {
        out.push(Violation {
            requirement: Requirement::DampedBlowup,
            message: format!(
                "the gamma < 0 criterion requires |theta| < pi/4, got |theta| = {}",
                p.theta.abs()
            ),
        });
    }
    out
}

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("half_width must be positive and finite, got {0}")]
    BadHalfWidth(f64),
    #[error("points_per_dim must be even and at least 8, got {0}")]
    BadPoints(usize),
    #[error("dim must be 1, 2 or 3, got {0}")]
    BadDim(usize),
}

/// Uniform periodic discretization of the box `[-L, L)^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    half_width: f64,
    points_per_dim: usize,
    dim: usize,
}

impl Grid {
    pub fn new(half_width: f64, points_per_dim: usize, dim: usize) -> Result<Self, GridError> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(GridError::BadHalfWidth(half_width));
        }
        if points_per_dim < 8 || !points_per_dim.is_multiple_of(2) {
            return Err(GridError::BadPoints(points_per_dim));
        }
        if !(1..=3).contains(&dim) {
            return Err(GridError::BadDim(dim));
        }
        Ok(Grid {
            half_width,
            points_per_dim,
            dim,
        })
    }

    /// Box size / resolution that keeps Gaussian-type data below roundoff at
    /// the boundary while runs stay fast.
    pub fn default_for_dim(dim: usize) -> Result<Self, GridError> {
        match dim {
            1 => Grid::new(16.0, 256, 1),
            2 => Grid::new(12.0, 128, 2),
            3 => Grid::new(8.0, 32, 3),
            other => Err(GridError::BadDim(other)),
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Grid spacing `dx = 2L/n`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_dim as f64
    }

    /// Total number of points, `n^dim`.
    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of one grid cell, `dx^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Physical coordinate of index `j` along one axis: `-L + j dx`.
    pub fn coordinate(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    /// Signed wavenumber of FFT bin `j` along one axis: `(pi/L) * j_signed`
    /// with `j_signed` in `-n/2 ..= n/2 - 1`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let n = self.points_per_dim;
        let signed = if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        };
        PI / self.half_width * signed as f64
    }

    /// Decomposes a flat index into per-axis indices (row major, last axis
    /// fastest).
    pub fn unravel(&self, flat: usize, idx: &mut [usize]) {
        let n = self.points_per_dim;
        let mut rem = flat;
        for a in (0..self.dim).rev() {
            idx[a] = rem % n;
            rem /= n;
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("value buffer has length {got}, grid wants {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("field contains non-finite samples")]
    NonFinite,
    #[error("center must have one entry per dimension ({want}), got {got}")]
    BadCenter { got: usize, want: usize },
    #[error("operation requires dim = {want}, grid has dim = {got}")]
    WrongDim { got: usize, want: usize },
    #[error("cannot refine onto the target grid: {0}")]
    BadRefinement(String),
}

/// Complex-valued state sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Field {
    pub fn from_values(grid: Grid, values: Vec<Complex64>) -> Result<Self, FieldError> {
        if values.len() != grid.len() {
            return Err(FieldError::LengthMismatch {
                got: values.len(),
                want: grid.len(),
            });
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        let len = grid.len();
        Field {
            grid,
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn constant(grid: Grid, value: Complex64) -> Self {
        let len = grid.len();
        Field {
            grid,
            values: vec![value; len],
        }
    }

    /// Samples `f` at every grid point. The slice handed to `f` holds the
    /// physical coordinates of the point, one entry per dimension.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let dim = grid.dim();
        let mut idx = [0usize; 3];
        let mut coords = [0.0f64; 3];
        let mut values = Vec::with_capacity(grid.len());
        for flat in 0..grid.len() {
            grid.unravel(flat, &mut idx[..dim]);
            for a in 0..dim {
                coords[a] = grid.coordinate(idx[a]);
            }
            values.push(f(&coords[..dim]));
        }
        Field { grid, values }
    }

    /// `amplitude * exp(-|x - center|^2 / (2 width^2))`.
    pub fn gaussian(
        grid: Grid,
        amplitude: Complex64,
        width: f64,
        center: &[f64],
    ) -> Result<Self, FieldError> {
        if center.len() != grid.dim() {
            return Err(FieldError::BadCenter {
                got: center.len(),
                want: grid.dim(),
            });
        }
        let two_w2 = 2.0 * width * width;
        Ok(Field::from_fn(grid, |x| {
            let r2: f64 = x
                .iter()
                .zip(center)
                .map(|(xi, ci)| (xi - ci) * (xi - ci))
                .sum();
            amplitude * (-r2 / two_w2).exp()
        }))
    }

    /// Ring profile for two-dimensional runs:
    /// `amplitude * exp(-(r - radius)^2 / (2 width^2))`.
    pub fn ring(
        grid: Grid,
        amplitude: Complex64,
        radius: f64,
        width: f64,
    ) -> Result<Self, FieldError> {
        if grid.dim() != 2 {
            return Err(FieldError::WrongDim {
                got: grid.dim(),
                want: 2,
            });
        }
        let two_w2 = 2.0 * width * width;
        Ok(Field::from_fn(grid, |x| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            amplitude * (-(r - radius) * (r - radius) / two_w2).exp()
        }))
    }

    /// Seeded band-limited noise: independent coefficients on all modes with
    /// per-axis index magnitude at most `max_mode`, rescaled so the sup norm
    /// equals `amplitude`. Deterministic in `seed` across runs and platforms.
    pub fn random_band_limited(grid: Grid, seed: u64, max_mode: usize, amplitude: f64) -> Self {
        let n = grid.points_per_dim();
        let dim = grid.dim();
        let mut state = seed.wrapping_add(0x9e3779b97f4a7c15);
        let mut spectrum = vec![Complex64::new(0.0, 0.0); grid.len()];
        let mut idx = [0usize; 3];
        for (flat, c) in spectrum.iter_mut().enumerate() {
            grid.unravel(flat, &mut idx[..dim]);
            let in_band = idx[..dim].iter().all(|&j| {
                let signed = if j < n / 2 {
                    j as i64
                } else {
                    j as i64 - n as i64
                };
                signed.unsigned_abs() as usize <= max_mode
            });
            if in_band {
                let re = 2.0 * splitmix64_unit(&mut state) - 1.0;
                let im = 2.0 * splitmix64_unit(&mut state) - 1.0;
                *c = Complex64::new(re, im);
            }
        }
        let mut ops = SpectralOps::new(&grid);
        let values = ops.inverse(&spectrum);
        let mut field = Field { grid, values };
        let sup = field.sup_norm();
        if sup > 0.0 {
            let s = amplitude / sup;
            for v in &mut field.values {
                *v *= s;
            }
        }
        field
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `max_j |u_j|`, the discrete sup norm.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `sqrt(dx^dim * sum |u_j|^2)`, the grid L2 norm.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (self.grid.cell_volume() * s).sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Unnormalized forward DFT coefficients in FFT bin order. Mode `j` per
    /// axis carries wavenumber [`Grid::wavenumber`]; the inverse is
    /// [`Field::from_spectrum`].
    pub fn to_spectrum(&self) -> Vec<Complex64> {
        let mut ops = SpectralOps::new(&self.grid);
        ops.forward(&self.values)
    }

    pub fn from_spectrum(grid: Grid, spectrum: &[Complex64]) -> Result<Self, FieldError> {
        if spectrum.len() != grid.len() {
            return Err(FieldError::LengthMismatch {
                got: spectrum.len(),
                want: grid.len(),
            });
        }
        let mut ops = SpectralOps::new(&grid);
        let values = ops.inverse(spectrum);
        Ok(Field { grid, values })
    }

    /// Trigonometric interpolation onto a grid with the same box and
    /// dimension but more points per axis.
    pub fn refine_to(&self, finer: Grid) -> Result<Field, FieldError> {
        if finer.dim() != self.grid.dim() || finer.half_width() != self.grid.half_width() {
            return Err(FieldError::BadRefinement(
                "target grid must share the box and dimension".to_string(),
            ));
        }
        let n = self.grid.points_per_dim();
        let m = finer.points_per_dim();
        if m < n {
            return Err(FieldError::BadRefinement(format!(
                "target has {m} points per axis, source has {n}"
            )));
        }
        let coarse = self.to_spectrum();
        let dim = self.grid.dim();
        let scale = (m as f64 / n as f64).powi(dim as i32);
        let mut fine = vec![Complex64::new(0.0, 0.0); finer.len()];
        let mut idx = [0usize; 3];
        for (flat, c) in coarse.iter().enumerate() {
            self.grid.unravel(flat, &mut idx[..dim]);
            let mut fine_flat = 0usize;
            for &j in idx[..dim].iter() {
                let jf = if j < n / 2 { j } else { j + (m - n) };
                fine_flat = fine_flat * m + jf;
            }
            fine[fine_flat] = c * scale;
        }
        Field::from_spectrum(finer, &fine)
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn splitmix64_unit(state: &mut u64) -> f64 {
    (splitmix64(state) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One sampled time point of the run diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `f(t) = int |u|^2`.
    pub mass: f64,
    /// `E(u(t))`.
    pub energy: f64,
    /// `I(u(t)) = int |grad u|^2 - int |u|^{alpha+2}`.
    pub variational: f64,
    /// `int |grad u|^2`.
    pub grad_sq: f64,
    /// `sup |u|`.
    pub sup_norm: f64,
    /// `int |u_t|^2` with `u_t` evaluated from the equation right-hand side.
    pub ut_sq: f64,
    /// `int conj(u) u_t`.
    pub inner_uut: Complex64,
}

#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("record times must be strictly increasing: {prev} then {next}")]
    NonIncreasingTime { prev: f64, next: f64 },
}

/// Ordered diagnostics of one simulation.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub params: Params,
    /// Set when the run propagated with the semigroup alone (test hook);
    /// identity monitors then drop the nonlinear and driving terms.
    pub linear_only: bool,
    records: Vec<DiagnosticsRecord>,
}

impl TimeSeries {
    pub fn new(params: Params) -> Self {
        TimeSeries {
            params,
            linear_only: false,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: DiagnosticsRecord) -> Result<(), SeriesError> {
        if let Some(last) = self.records.last() {
            if record.t <= last.t {
                return Err(SeriesError::NonIncreasingTime {
                    prev: last.t,
                    next: record.t,
                });
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[DiagnosticsRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn params_rejects_nonsense() {
        assert!(Params::new(0.3, 2.0, 1.0, 1).is_ok());
        assert!(Params::new(0.3, 0.0, 1.0, 1).is_err());
        assert!(Params::new(0.3, -1.0, 1.0, 1).is_err());
        assert!(Params::new(2.0, 1.0, 1.0, 1).is_err());
        assert!(Params::new(0.3, 1.0, f64::NAN, 1).is_err());
        assert!(Params::new(0.3, 1.0, 1.0, 4).is_err());
        // dispersive boundary is representable, the solver refuses it later
        assert!(Params::new(FRAC_PI_2, 1.0, 0.0, 1).is_ok());
    }

    #[test]
    fn validate_flags_by_requirement() {
        // all strict inequalities clearly satisfied
        let p = Params::new(0.3, 2.0, 1.0, 1).unwrap();
        assert!(validate_params(&p).is_empty());

        // gamma < 0 run with |theta| > pi/4
        let p = Params::new(PI / 3.0, 2.0, -1.0, 1).unwrap();
        let v = validate_params(&p);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].requirement, Requirement::DampedBlowup);

        // fine for the solver, structural condition is criteria's business
        let p = Params::new(0.2, 0.5, -0.1, 1).unwrap();
        assert!(validate_params(&p).is_empty());

        let p = Params::new(FRAC_PI_2, 1.0, 0.5, 1).unwrap();
        let v = validate_params(&p);
        assert!(v.iter().any(|x| x.requirement == Requirement::Solver));
        assert!(v.iter().any(|x| x.requirement == Requirement::DrivenBlowup));
    }

    #[test]
    fn grid_invariants() {
        let g = Grid::new(16.0, 256, 1).unwrap();
        assert_eq!(g.spacing(), 2.0 * 16.0 / 256.0);
        assert_eq!(g.len(), 256);
        assert!(Grid::new(16.0, 255, 1).is_err());
        assert!(Grid::new(16.0, 4, 1).is_err());
        assert!(Grid::new(0.0, 256, 1).is_err());

        // wavenumber layout: j in {-n/2, ..., n/2-1} scaled by pi/L
        assert_eq!(g.wavenumber(0), 0.0);
        assert_eq!(g.wavenumber(1), PI / 16.0);
        assert_eq!(g.wavenumber(128), -128.0 * PI / 16.0);
        assert_eq!(g.wavenumber(255), -PI / 16.0);
    }

    #[test]
    fn field_length_checked() {
        let g = Grid::new(8.0, 16, 2).unwrap();
        assert_eq!(g.len(), 256);
        assert!(Field::from_values(g.clone(), vec![Complex64::new(1.0, 0.0); 255]).is_err());
        let f = Field::constant(g, Complex64::new(2.0, 0.0));
        assert_eq!(f.sup_norm(), 2.0);
    }

    #[test]
    fn fft_round_trip() {
        let g = Grid::new(16.0, 64, 1).unwrap();
        let f = Field::random_band_limited(g.clone(), 7, 10, 1.0);
        let back = Field::from_spectrum(g, &f.to_spectrum()).unwrap();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn l2_norm_stable_under_refinement() {
        // Gaussian with L >= 8 standard deviations: spectral-level agreement
        let g1 = Grid::new(16.0, 256, 1).unwrap();
        let g2 = Grid::new(16.0, 512, 1).unwrap();
        let f1 = Field::gaussian(g1, Complex64::new(1.0, 0.0), 1.0, &[0.0]).unwrap();
        let f2 = Field::gaussian(g2, Complex64::new(1.0, 0.0), 1.0, &[0.0]).unwrap();
        let (n1, n2) = (f1.l2_norm(), f2.l2_norm());
        assert!((n1 - n2).abs() / n1 < 1e-10, "{n1} vs {n2}");
    }

    #[test]
    fn refine_interpolates() {
        let g = Grid::new(16.0, 64, 1).unwrap();
        let fine_grid = Grid::new(16.0, 128, 1).unwrap();
        let f = Field::gaussian(g, Complex64::new(1.0, 0.5), 2.0, &[1.0]).unwrap();
        let refined = f.refine_to(fine_grid.clone()).unwrap();
        let direct = Field::gaussian(fine_grid, Complex64::new(1.0, 0.5), 2.0, &[1.0]).unwrap();
        for (a, b) in refined.values().iter().zip(direct.values()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn ring_profile_peaks_on_the_ring() {
        let g = Grid::new(12.0, 64, 2).unwrap();
        let f = Field::ring(g.clone(), Complex64::new(2.0, 0.0), 3.0, 0.5).unwrap();
        assert!((f.sup_norm() - 2.0).abs() < 1e-6);
        // value at radius 3 along the x axis is the amplitude
        let dx = g.spacing();
        let j = ((3.0 + 12.0) / dx).round() as usize;
        let idx = (64 / 2) + j * 64; // y = 0 row, x = 3 column
        assert!((f.values()[idx].norm() - 2.0).abs() < 0.05);
        assert!(Field::ring(
            Grid::new(12.0, 64, 1).unwrap(),
            Complex64::new(1.0, 0.0),
            3.0,
            0.5
        )
        .is_err());
    }

    #[test]
    fn series_time_strictly_increasing() {
        let p = Params::new(0.0, 2.0, 0.0, 1).unwrap();
        let mut s = TimeSeries::new(p);
        let rec = |t: f64| DiagnosticsRecord {
            t,
            mass: 0.0,
            energy: 0.0,
            variational: 0.0,
            grad_sq: 0.0,
            sup_norm: 0.0,
            ut_sq: 0.0,
            inner_uut: Complex64::new(0.0, 0.0),
        };
        s.push(rec(0.0)).unwrap();
        s.push(rec(0.5)).unwrap();
        assert!(s.push(rec(0.5)).is_err());
        assert!(s.push(rec(0.2)).is_err());
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn random_band_limited_is_deterministic() {
        let g = Grid::new(16.0, 64, 1).unwrap();
        let a = Field::random_band_limited(g.clone(), 42, 8, 1.0);
        let b = Field::random_band_limited(g, 42, 8, 1.0);
        assert_eq!(a.values(), b.values());
        assert!((a.sup_norm() - 1.0).abs() < 1e-12);
    }
}
