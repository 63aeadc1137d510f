//! The four subcommands and their file outputs. Every float is printed with
//! the shortest round-trip decimal (`{}`), so identical configs produce
//! byte-identical artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use cgl::criteria::{
    self, check_blowup_negative_gamma, check_blowup_positive_gamma, check_mz, check_structural,
    global_threshold_with_constant, kappa_threshold, region_sample_points, xi, CriterionReport,
    RegionCell, RegionClass,
};
use cgl::domain::{Field, Params, TimeSeries};
use cgl::functionals::{self, gn_constant_estimate};
use cgl::monitors::{
    monitor_neg, monitor_pos, residual_energy_identity, residual_mass_identity, MonitorReport,
    DEFAULT_CONVEXITY_TOL, DEFAULT_IDENTITY_TOL,
};
use cgl::ode::{ode_blowup_time, ode_classify, ode_exact, OdeKind};
use cgl::solver::{simulate, OutcomeKind};

use crate::config::RunConfig;

pub fn cmd_ode(v0: Complex64, params: &Params, times: &[f64]) -> Result<(), String> {
    let verdict = ode_classify(v0, params);
    match verdict.kind {
        OdeKind::BlowsUp { t_star } => println!("BlowsUp t*={t_star}"),
        OdeKind::Global => {
            if v0 == Complex64::new(0.0, 0.0) {
                println!("Global (zero)");
            } else if verdict.boundary {
                println!("Global (boundary: |v0|^alpha cos(theta) = -gamma)");
            } else {
                println!("Global");
            }
        }
    }
    if !times.is_empty() {
        println!("t,re,im,abs");
        for &t in times {
            match ode_exact(v0, params, t) {
                Ok(v) => println!("{t},{},{},{}", v.re, v.im, v.norm()),
                Err(e) => println!("{t},,,# {e}"),
            }
        }
    }
    Ok(())
}

fn render_report(r: &CriterionReport) -> String {
    let mark = if r.holds { "holds" } else { "fails" };
    if r.lhs.is_nan() {
        format!("[{mark}] {}: {}", r.name, r.notes)
    } else {
        let rel = match r.relation {
            criteria::Relation::LessThan => "<",
            criteria::Relation::GreaterThan => ">",
            criteria::Relation::AtLeast => ">=",
        };
        format!(
            "[{mark}] {}: lhs = {} {rel} rhs = {} (margin {}) -- {}",
            r.name, r.lhs, r.rhs, r.margin, r.notes
        )
    }
}

/// Evaluates every condition applicable to the configured data and prints
/// one report per line. The interpolation constant behind the small-data
/// threshold is an optimized lower estimate, so that threshold is
/// indicative; a caller-supplied constant is reported alongside when given.
pub fn cmd_check(cfg: &RunConfig, u0: &Field, user_constant: Option<f64>) -> Result<(), String> {
    let p = &cfg.params;
    println!(
        "parameters: theta = {}, alpha = {}, gamma = {}, dim = {}",
        p.theta, p.alpha, p.gamma, p.dim
    );
    let mass0 = functionals::mass(u0).map_err(|e| e.to_string())?;
    let e0 = functionals::energy(u0, p.alpha).map_err(|e| e.to_string())?;
    println!("data: ||u0||_L2 = {}, E(u0) = {}", mass0.sqrt(), e0);

    println!("{}", render_report(&check_structural(p)));
    println!("{}", render_report(&check_mz(p)));

    if p.gamma > 0.0 {
        let (report, bound) = check_blowup_positive_gamma(u0, p).map_err(|e| e.to_string())?;
        println!("{}", render_report(&report));
        if let Some(b) = bound {
            println!("  maximal-time bound: t_max <= {b}");
        }
    }
    if p.gamma < 0.0 {
        match xi(p) {
            Ok(x) => {
                println!("  xi = {x}");
                if let Ok(k) = kappa_threshold(u0, p) {
                    println!(
                        "  kappa* = {k} for the configured profile (condition holds for every amplitude scale beyond kappa*)"
                    );
                }
            }
            Err(e) => println!("  xi not defined: {e}"),
        }
        let report = check_blowup_negative_gamma(u0, p).map_err(|e| e.to_string())?;
        println!("{}", render_report(&report));

        if p.alpha < 4.0 / p.dim as f64 {
            let gn = gn_constant_estimate(p.alpha, p.dim, u0.grid()).map_err(|e| e.to_string())?;
            let thr = global_threshold_with_constant(p, gn.constant).map_err(|e| e.to_string())?;
            let l2 = mass0.sqrt();
            let verdict = if l2 <= thr { "below" } else { "above" };
            println!(
                "small-data global threshold (indicative; interpolation constant {} from {}):",
                gn.constant, gn.trial_descriptor
            );
            println!(
                "  ||u0||_L2 <= {thr} guarantees a global solution; data is {verdict} it ({l2})"
            );
            if let Some(c) = user_constant {
                let thr_user = global_threshold_with_constant(p, c).map_err(|e| e.to_string())?;
                println!("  with the supplied constant {c}: threshold {thr_user}");
            }
        }
    }
    Ok(())
}

fn series_csv(series: &TimeSeries) -> String {
    let mut out =
        String::from("t,mass,energy,variational,grad_sq,sup_norm,ut_sq,re_inner,im_inner\n");
    for r in series.records() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.t,
            r.mass,
            r.energy,
            r.variational,
            r.grad_sq,
            r.sup_norm,
            r.ut_sq,
            r.inner_uut.re,
            r.inner_uut.im
        )
        .expect("string write");
    }
    out
}

fn monitor_text(rep: &MonitorReport) -> String {
    let mut out = String::new();
    writeln!(out, "name = {}", rep.name).unwrap();
    writeln!(out, "passed = {}", rep.passed).unwrap();
    writeln!(out, "tolerance = {}", rep.tolerance).unwrap();
    writeln!(out, "max_rel_residual = {}", rep.max_rel_residual).unwrap();
    writeln!(out, "violations = {}", rep.violations.len()).unwrap();
    for (t, what) in &rep.violations {
        writeln!(out, "  t = {t}: {what}").unwrap();
    }
    writeln!(out, "near_singularity = {}", rep.near_singularity.len()).unwrap();
    for (t, what) in &rep.near_singularity {
        writeln!(out, "  t = {t}: {what}").unwrap();
    }
    out
}

pub fn cmd_simulate(cfg: &RunConfig, u0: &Field) -> Result<(), String> {
    let out_dir = &cfg.outputs;
    fs::create_dir_all(out_dir).map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;

    let outcome = simulate(u0, &cfg.params, &cfg.controls);

    write_file(&out_dir.join("series.csv"), &series_csv(&outcome.series))?;

    let mut txt = String::new();
    match outcome.kind {
        OutcomeKind::BlowupDetected {
            t_star,
            sup_norm_final,
        } => {
            writeln!(txt, "kind = BlowupDetected").unwrap();
            writeln!(txt, "t_star = {t_star}").unwrap();
            writeln!(txt, "sup_norm_final = {sup_norm_final}").unwrap();
        }
        OutcomeKind::ReachedHorizon => {
            writeln!(txt, "kind = ReachedHorizon").unwrap();
        }
        OutcomeKind::Decayed { below } => {
            writeln!(txt, "kind = Decayed").unwrap();
            writeln!(txt, "below = {below}").unwrap();
        }
    }
    let last_t = outcome.series.records().last().map(|r| r.t).unwrap_or(0.0);
    writeln!(txt, "t_end = {last_t}").unwrap();
    writeln!(txt, "records = {}", outcome.series.len()).unwrap();

    // bound comparisons for whichever criterion applies
    if cfg.params.gamma > 0.0 {
        if let Ok((report, Some(bound))) = check_blowup_positive_gamma(u0, &cfg.params) {
            if report.holds {
                writeln!(txt, "t_bound = {bound}").unwrap();
                if let OutcomeKind::BlowupDetected { t_star, .. } = outcome.kind {
                    writeln!(txt, "blowup_within_bound = {}", t_star <= bound).unwrap();
                }
            }
        }
    }
    if cfg.params.gamma < 0.0 {
        if let Ok(report) = check_blowup_negative_gamma(u0, &cfg.params) {
            writeln!(txt, "damped_blowup_criterion_holds = {}", report.holds).unwrap();
        }
    }
    // constant data: compare against the homogeneous-equation time
    if let Some(first) = u0.values().first() {
        if u0.values().iter().all(|v| v == first) {
            let t_ode = ode_blowup_time(*first, &cfg.params);
            writeln!(txt, "homogeneous_t_star = {t_ode}").unwrap();
        }
    }
    write_file(&out_dir.join("outcome.txt"), &txt)?;

    for name in &cfg.monitors {
        let result = match name.as_str() {
            "mass" => residual_mass_identity(&outcome.series, DEFAULT_IDENTITY_TOL),
            "energy" => residual_energy_identity(&outcome.series, DEFAULT_IDENTITY_TOL),
            "pos" => monitor_pos(&outcome.series, DEFAULT_CONVEXITY_TOL),
            "neg" => monitor_neg(&outcome.series, DEFAULT_CONVEXITY_TOL),
            other => {
                return Err(format!(
                    "unknown monitor `{other}` (expected mass, energy, pos, neg)"
                ))
            }
        };
        let text = match result {
            Ok(rep) => monitor_text(&rep),
            Err(e) => format!("name = {name}\nrefused = {e}\n"),
        };
        write_file(&out_dir.join(format!("monitor_{name}.txt")), &text)?;
    }

    println!("{}", txt.trim_end());
    Ok(())
}

pub struct SweepArgs {
    pub alpha_range: (f64, f64),
    pub theta_range: (f64, f64),
    pub resolution: (usize, usize),
}

fn class_label(class: RegionClass) -> &'static str {
    match class {
        RegionClass::Both => "both",
        RegionClass::OnlyStructural => "only-1.15",
        RegionClass::OnlyMz => "only-1.14",
        RegionClass::Neither => "neither",
    }
}

/// Classifies the grid and writes `regions.csv` plus a gnuplot script for
/// the four-class region map. `CGL_THREADS` caps the evaluation parallelism;
/// the output order is fixed regardless.
pub fn cmd_sweep(args: &SweepArgs, out_dir: &Path) -> Result<(), String> {
    let points = region_sample_points(args.alpha_range, args.theta_range, args.resolution)
        .map_err(|e| e.to_string())?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("CGL_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => builder = builder.num_threads(n),
            _ => return Err(format!("CGL_THREADS must be a positive integer, got `{v}`")),
        }
    }
    let pool = builder.build().map_err(|e| e.to_string())?;
    let cells: Vec<RegionCell> = pool.install(|| {
        points
            .par_iter()
            .map(|&(alpha, theta)| RegionCell::evaluate(alpha, theta).expect("valid sample point"))
            .collect()
    });

    let mut csv = String::from("alpha,theta,s_1_8,s_1_14,label\n");
    for c in &cells {
        writeln!(
            csv,
            "{},{},{},{},{}",
            c.alpha,
            c.theta,
            c.structural as u8,
            c.mz as u8,
            class_label(c.class())
        )
        .expect("string write");
    }
    fs::create_dir_all(out_dir).map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;
    write_file(&out_dir.join("regions.csv"), &csv)?;

    let plot = "\
# region map of the two blowup-condition variants
# usage: gnuplot -p regions_plot.gp  (run next to regions.csv)
set datafile separator comma
set key off
set xlabel 'alpha'
set ylabel 'theta'
set cbrange [-0.5:3.5]
set palette maxcolors 4
set palette defined (0 '#bdbdbd', 1 '#1f77b4', 2 '#ff7f0e', 3 '#2ca02c')
# class encoding: 0 neither, 1 structural only, 2 comparison-condition only, 3 both
plot 'regions.csv' skip 1 using 1:2:($3 + 2*$4) with points pt 5 ps 0.6 palette
";
    write_file(&out_dir.join("regions_plot.gp"), plot)?;

    let count = |class: RegionClass| cells.iter().filter(|c| c.class() == class).count();
    println!(
        "wrote {} cells: both={} only-structural={} only-comparison={} neither={}",
        cells.len(),
        count(RegionClass::Both),
        count(RegionClass::OnlyStructural),
        count(RegionClass::OnlyMz),
        count(RegionClass::Neither)
    );
    Ok(())
}

fn write_file(path: &Path, content: &str) -> Result<(), String> {
    fs::write(path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))
}
