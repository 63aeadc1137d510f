//! Flat `key = value` run configuration: `#` starts a comment, nested keys
//! are dotted (`grid.n`, `controls.tol`). Zero-dependency format so any
//! toolchain can read and write it.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use cgl::domain::{Field, Grid, Params};
use cgl::solver::StepControls;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Initial-condition descriptor: a builtin family or a sampled-field file.
#[derive(Debug, Clone)]
pub enum InitialCondition {
    Gaussian {
        amplitude: Complex64,
        width: f64,
        center: Vec<f64>,
    },
    Ring {
        amplitude: Complex64,
        radius: f64,
        width: f64,
    },
    RandomBandLimited {
        seed: u64,
        max_mode: usize,
        amplitude: f64,
    },
    Constant {
        value: Complex64,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: Params,
    pub grid: Grid,
    pub controls: StepControls,
    pub initial: InitialCondition,
    pub outputs: PathBuf,
    pub monitors: Vec<String>,
}

fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected `key = value`", lineno + 1)))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

struct Reader {
    map: BTreeMap<String, String>,
    used: std::collections::BTreeSet<String>,
}

impl Reader {
    fn take(&mut self, key: &str) -> Option<String> {
        self.used.insert(key.to_string());
        self.map.get(key).cloned()
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.take(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| ConfigError(format!("{key}: not a number: {v}")))
            })
            .transpose()
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn required_f64(&mut self, key: &str) -> Result<f64, ConfigError> {
        self.f64(key)?
            .ok_or_else(|| ConfigError(format!("missing required key `{key}`")))
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| ConfigError(format!("{key}: not an integer: {v}"))),
        }
    }

    fn u64_or(&mut self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| ConfigError(format!("{key}: not an integer: {v}"))),
        }
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => match v.as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(ConfigError(format!("{key}: not a boolean: {other}"))),
            },
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut r = Reader {
        map: parse_kv(text)?,
        used: Default::default(),
    };

    let theta = r.required_f64("theta")?;
    let alpha = r.required_f64("alpha")?;
    let gamma = r.required_f64("gamma")?;
    let dim = r.usize_or("dim", 1)?;
    let params = Params::new(theta, alpha, gamma, dim).map_err(|e| ConfigError(e.to_string()))?;

    let default_grid = Grid::default_for_dim(dim).map_err(|e| ConfigError(e.to_string()))?;
    let half_width = r.f64_or("grid.half_width", default_grid.half_width())?;
    let n = r.usize_or("grid.n", default_grid.points_per_dim())?;
    let grid = Grid::new(half_width, n, dim).map_err(|e| ConfigError(e.to_string()))?;

    let defaults = StepControls::default();
    let controls = StepControls {
        dt_init: r.f64_or("controls.dt_init", defaults.dt_init)?,
        dt_min: r.f64_or("controls.dt_min", defaults.dt_min)?,
        dt_max: r.f64_or("controls.dt_max", defaults.dt_max)?,
        safety: r.f64_or("controls.safety", defaults.safety)?,
        tol: r.f64_or("controls.tol", defaults.tol)?,
        sup_blowup_threshold: r.f64_or(
            "controls.sup_blowup_threshold",
            defaults.sup_blowup_threshold,
        )?,
        t_max: r.f64_or("controls.t_max", defaults.t_max)?,
        record_every: r.usize_or("controls.record_every", defaults.record_every)?,
        linear_only: r.bool_or("controls.linear_only", false)?,
    };
    controls
        .validate()
        .map_err(|e| ConfigError(e.to_string()))?;

    let kind = r
        .take("initial.kind")
        .ok_or_else(|| ConfigError("missing required key `initial.kind`".to_string()))?;
    let initial = match kind.as_str() {
        "gaussian" => {
            let amplitude = Complex64::new(
                r.f64_or("initial.amplitude_re", 1.0)?,
                r.f64_or("initial.amplitude_im", 0.0)?,
            );
            let width = r.f64_or("initial.width", 1.0)?;
            let center = match r.take("initial.center") {
                None => vec![0.0; dim],
                Some(v) => v
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| ConfigError(format!("initial.center: bad list: {v}")))?,
            };
            InitialCondition::Gaussian {
                amplitude,
                width,
                center,
            }
        }
        "ring" => InitialCondition::Ring {
            amplitude: Complex64::new(
                r.f64_or("initial.amplitude_re", 1.0)?,
                r.f64_or("initial.amplitude_im", 0.0)?,
            ),
            radius: r.f64_or("initial.radius", 3.0)?,
            width: r.f64_or("initial.width", 1.0)?,
        },
        "random" => InitialCondition::RandomBandLimited {
            seed: r.u64_or("initial.seed", 0)?,
            max_mode: r.usize_or("initial.max_mode", 8)?,
            amplitude: r.f64_or("initial.amplitude", 1.0)?,
        },
        "constant" => InitialCondition::Constant {
            value: Complex64::new(
                r.f64_or("initial.value_re", 1.0)?,
                r.f64_or("initial.value_im", 0.0)?,
            ),
        },
        "file" => InitialCondition::File {
            path: PathBuf::from(
                r.take("initial.path")
                    .ok_or_else(|| ConfigError("initial.kind = file needs initial.path".into()))?,
            ),
        },
        other => return Err(ConfigError(format!("unknown initial.kind `{other}`"))),
    };

    let outputs = PathBuf::from(r.take("outputs").unwrap_or_else(|| "out".to_string()));
    let monitors = r
        .take("monitors")
        .map(|v| {
            v.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        })
        .unwrap_or_default();

    let unused: Vec<&String> = r.map.keys().filter(|k| !r.used.contains(*k)).collect();
    if !unused.is_empty() {
        return Err(ConfigError(format!("unknown keys: {unused:?}")));
    }

    Ok(RunConfig {
        params,
        grid,
        controls,
        initial,
        outputs,
        monitors,
    })
}

#[derive(Debug)]
pub struct ResolveError(pub String);

impl fmt::Display for ResolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "initial condition: {}", self.0)
    }
}

impl std::error::Error for ResolveError {}

/// Builds the initial field; failures here are data problems (exit 3), not
/// config syntax problems (exit 2).
pub fn resolve_initial(ic: &InitialCondition, grid: &Grid) -> Result<Field, ResolveError> {
    let field = match ic {
        InitialCondition::Gaussian {
            amplitude,
            width,
            center,
        } => Field::gaussian(grid.clone(), *amplitude, *width, center)
            .map_err(|e| ResolveError(e.to_string()))?,
        InitialCondition::Ring {
            amplitude,
            radius,
            width,
        } => Field::ring(grid.clone(), *amplitude, *radius, *width)
            .map_err(|e| ResolveError(e.to_string()))?,
        InitialCondition::RandomBandLimited {
            seed,
            max_mode,
            amplitude,
        } => Field::random_band_limited(grid.clone(), *seed, *max_mode, *amplitude),
        InitialCondition::Constant { value } => Field::constant(grid.clone(), *value),
        InitialCondition::File { path } => read_field(path, grid)?,
    };
    if !field.is_finite() {
        return Err(ResolveError(
            "resolved field contains non-finite samples".to_string(),
        ));
    }
    Ok(field)
}

/// Sampled-field file: one `re,im` line per grid point in flat order (last
/// axis fastest).
fn read_field(path: &Path, grid: &Grid) -> Result<Field, ResolveError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ResolveError(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::with_capacity(grid.len());
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (re, im) = line
            .split_once(',')
            .ok_or_else(|| ResolveError(format!("line {}: expected `re,im`", lineno + 1)))?;
        let re = re
            .trim()
            .parse::<f64>()
            .map_err(|e| ResolveError(format!("line {}: {e}", lineno + 1)))?;
        let im = im
            .trim()
            .parse::<f64>()
            .map_err(|e| ResolveError(format!("line {}: {e}", lineno + 1)))?;
        values.push(Complex64::new(re, im));
    }
    Field::from_values(grid.clone(), values).map_err(|e| ResolveError(e.to_string()))
}

/// `re` or `re,im`.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    match text.split_once(',') {
        None => text
            .trim()
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| format!("not a number: {text}")),
        Some((re, im)) => {
            let re = re
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("bad real part: {re}"))?;
            let im = im
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("bad imaginary part: {im}"))?;
            Ok(Complex64::new(re, im))
        }
    }
}
