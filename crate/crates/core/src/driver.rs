//! Batch driver: build a scheme from a [`RunConfig`], run it, and write CSV
//! artifacts and a run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use crate::config::{Grid, InitMethod, RawConfig, RunConfig, RunMode, TimeMethod};
use crate::dg::{Discretization, SolutionField};
use crate::diagnostics::{RiemannSolution, 
    l1_density_error, l2_error, linearized_spectrum, residual_convergence_study, ConvergenceRow, ConvergenceTable,
    EntropyHistory, HistoryRecord, ResidualStudy, SpectrumReport,
};
use crate::error::{Error, Result};
use crate::euler::{self, State};
use crate::mesh::{make_mesh, BoundaryMode};
use crate::problems::Problem;
use crate::scheme::Semidiscretization;
use crate::time::{integrate_adaptive, integrate_fixed, AdaptiveOptions, TimeController};

/// Largest entropy-inequality violation seen over all right-hand side evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageMonitor {
    /// `max cell_entropy_rate / entropy_scale` over stages.
    pub max_ratio: f64,
    pub n_stages: usize,
}

impl Default for StageMonitor {
    fn default() -> Self {
        Self {
            max_ratio: f64::NEG_INFINITY,
            n_stages: 0,
        }
    }
}

/// Outcome of a time integration. Failures are recorded, not returned.
#[derive(Debug)]
pub struct Evolution {
    pub failure: Option<Error>,
    pub t_reached: f64,
    pub n_accepted: usize,
    pub n_rejected: usize,
    pub n_rhs: usize,
    pub history: EntropyHistory,
    pub stages: StageMonitor,
    /// Last accepted state.
    pub state: SolutionField,
    pub snapshots: Vec<(f64, SolutionField)>,
}

impl Evolution {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Time-integration settings independent of the problem.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveSettings {
    pub method: TimeMethod,
    pub dt_max: f64,
    pub max_steps: usize,
    /// Record history every this many accepted steps (0 = first and last only).
    pub history_every: usize,
    /// Intermediate snapshot target times.
    pub snapshot_times: Vec<f64>,
}

impl EvolveSettings {
    pub fn from_config(cfg: &RunConfig) -> Self {
        let snapshot_times = (1..=cfg.snapshots)
            .map(|i| cfg.t_final * i as f64 / (cfg.snapshots + 1) as f64)
            .collect();
        Self {
            method: cfg.time,
            dt_max: cfg.dt_max,
            max_steps: cfg.max_steps,
            history_every: cfg.history_every,
            snapshot_times,
        }
    }
}

/// Stable time step `cfl h / max |u| + c` over all volume quadrature states.
pub fn cfl_timestep(disc: &Discretization, u: &SolutionField, cfl: f64) -> Result<f64> {
    if !(cfl > 0.0) {
        return Err(Error::invalid(format!("cfl must be positive, got {cfl}")));
    }
    let mut speed = 0.0f64;
    for k in 0..disc.n_elements() {
        for (q, s) in disc.quad_states(u, k).iter().enumerate() {
            speed = speed.max(euler::max_wavespeed(s, s).map_err(|e| e.at(k, q))?);
        }
    }
    Ok(cfl * disc.mesh.h() / speed)
}

pub fn build_semidiscretization(cfg: &RunConfig, elements: usize) -> Result<Semidiscretization> {
    let (a, b) = cfg.problem.domain();
    let mesh = make_mesh(a, b, elements, cfg.boundary)?;
    let ghost = match cfg.boundary {
        BoundaryMode::Periodic => None,
        BoundaryMode::DirichletGhost => Some([cfg.problem.initial(a), cfg.problem.initial(b)]),
    };
    Semidiscretization::new(Discretization::new(cfg.operators()?, mesh), cfg.scheme, ghost)
}

pub fn initial_field(cfg: &RunConfig, disc: &Discretization) -> Result<SolutionField> {
    let problem = cfg.problem;
    let u = match cfg.init {
        InitMethod::Projection => disc.project(|x| problem.initial(x))?,
        InitMethod::Interpolation => disc.interpolate(|x| problem.initial(x)),
    };
    disc.check_admissible(&u)?;
    Ok(u)
}

/// Integrate `u0` from `t0` to `t_final`, logging the entropy history and the
/// stage-wise entropy inequality.
pub fn evolve(
    semi: &Semidiscretization,
    u0: SolutionField,
    t0: f64,
    t_final: f64,
    settings: &EvolveSettings,
    exact: Option<&dyn Fn(f64, f64) -> Result<State>>,
) -> Evolution {
    let disc = &semi.disc;
    let ghost = disc.mesh.boundary == BoundaryMode::DirichletGhost;
    let mut stages = StageMonitor::default();
    let mut history = EntropyHistory::default();
    let mut snapshots = Vec::new();
    let mut state = u0.clone();
    let mut t_reached = t0;
    let mut step = 0usize;
    let mut rejected = 0usize;

    let record = |u: &SolutionField, t: f64, with_error: bool| -> Result<(HistoryRecord, f64)> {
        let r = semi.evaluate(u)?;
        let err = match exact {
            Some(f) if with_error => l2_error(disc, u, |x| f(x, t))?,
            _ => f64::NAN,
        };
        let rec = HistoryRecord {
            t,
            total_entropy: disc.total_entropy(u)?,
            entropy_rate: r.entropy_rate,
            l2_error: err,
            max_eps: r.viscosity.max_eps(),
        };
        Ok((rec, r.boundary_entropy_flux))
    };

    let result = (|| -> Result<(usize, usize, usize)> {
        let (first, mut flux_prev) = record(&u0, t0, true)?;
        history.push(first, 0.0);
        let mut outflow = 0.0;
        let mut t_prev = t0;
        let mut next_snapshot = 0usize;
        let mut field = u0.clone();
        let mut rhs = |_t: f64, x: &[f64], out: &mut [f64]| -> Result<()> {
            field.data.copy_from_slice(x);
            let r = semi.evaluate(&field)?;
            stages.max_ratio = stages.max_ratio.max(r.cell_entropy_rate / r.entropy_scale);
            stages.n_stages += 1;
            out.copy_from_slice(&r.rhs.data);
            Ok(())
        };
        let mut observer = |t: f64, x: &[f64]| -> Result<()> {
            step += 1;
            state.data.copy_from_slice(x);
            t_reached = t;
            let last = t >= t_final;
            let log = last || (settings.history_every > 0 && step % settings.history_every == 0);
            if ghost || log {
                let (rec, flux) = record(&state, t, log)?;
                // trapezoidal rule for the entropy leaving through the boundary
                outflow += 0.5 * (t - t_prev) * (flux_prev + flux);
                flux_prev = flux;
                t_prev = t;
                if log {
                    history.push(rec, outflow);
                }
            }
            while next_snapshot < settings.snapshot_times.len() && t >= settings.snapshot_times[next_snapshot] {
                snapshots.push((t, state.clone()));
                next_snapshot += 1;
            }
            Ok(())
        };
        let mut u = u0.data.clone();
        let stats = match settings.method {
            TimeMethod::Adaptive { abs_tol, rel_tol } => {
                let mut ctrl = TimeController::new(AdaptiveOptions {
                    abs_tol,
                    rel_tol,
                    dt_max: settings.dt_max,
                    max_steps: settings.max_steps,
                    ..Default::default()
                })?;
                let r = integrate_adaptive(&mut rhs, &mut u, t0, t_final, &mut ctrl, &mut observer);
                rejected = ctrl.n_rejected;
                r?
            }
            TimeMethod::FixedCfl { cfl } => {
                let mut probe = u0.clone();
                let dt_max = settings.dt_max;
                let max_steps = settings.max_steps;
                let mut count = 0usize;
                let dt_of = |x: &[f64]| -> Result<f64> {
                    count += 1;
                    if count > max_steps {
                        return Err(Error::IntegrationFailure {
                            t: f64::NAN,
                            reason: format!("step limit {max_steps} reached"),
                        });
                    }
                    probe.data.copy_from_slice(x);
                    Ok(cfl_timestep(disc, &probe, cfl)?.min(dt_max))
                };
                integrate_fixed(&mut rhs, &mut u, t0, t_final, dt_of, &mut observer)?
            }
        };
        Ok((stats.n_accepted, stats.n_rejected, stats.n_rhs))
    })();

    let (failure, (n_accepted, n_rejected, n_rhs)) = match result {
        Ok(counts) => (None, counts),
        Err(e) => (Some(e), (step, rejected, stages.n_stages)),
    };
    Evolution {
        failure,
        t_reached,
        n_accepted,
        n_rejected,
        n_rhs,
        history,
        stages,
        state,
        snapshots,
    }
}

/// Everything a run produced, for callers that do not need files.
#[derive(Debug)]
pub enum RunOutput {
    Evolve {
        semi: Box<Semidiscretization>,
        evolution: Evolution,
        l2_error: Option<f64>,
        l1_density_error: Option<f64>,
    },
    ResidualStudy(ResidualStudy),
    Spectrum {
        background: Evolution,
        report: Option<SpectrumReport>,
    },
}

impl RunOutput {
    /// The failure that ended the run, if any.
    pub fn failure(&self) -> Option<&Error> {
        match self {
            RunOutput::Evolve { evolution, .. } => evolution.failure.as_ref(),
            RunOutput::ResidualStudy(_) => None,
            RunOutput::Spectrum { background, .. } => background.failure.as_ref(),
        }
    }
}

type ExactFn = Box<dyn Fn(f64, f64) -> Result<State>>;

/// Exact solution of `problem`, with the Riemann star state solved once.
fn exact_fn(problem: Problem) -> Option<ExactFn> {
    if let Some(d) = problem.riemann_data() {
        let sol = match RiemannSolution::new(d.left, d.right) {
            Ok(s) => s,
            Err(e) => {
                log::warn!("no exact reference for {}: {e}", problem.name());
                return None;
            }
        };
        return Some(Box::new(move |x, t| {
            if t <= 0.0 {
                Ok(problem.initial(x))
            } else {
                Ok(sol.sample((x - d.x0) / t).to_conserved())
            }
        }));
    }
    let _ = problem.exact(0.0, 0.0)?;
    Some(Box::new(move |x, t| problem.exact(x, t).expect("exact solution exists")))
}

/// Run a configuration in memory. Setup errors are returned; failures during
/// time integration are recorded in the output.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    match cfg.mode {
        RunMode::Evolve => {
            let semi = build_semidiscretization(cfg, cfg.elements)?;
            let u0 = initial_field(cfg, &semi.disc)?;
            let exact = exact_fn(cfg.problem);
            let exact_ref = exact.as_deref();
            let evolution = evolve(&semi, u0, 0.0, cfg.t_final, &EvolveSettings::from_config(cfg), exact_ref);
            let (mut l2, mut l1) = (None, None);
            if evolution.completed() {
                if let Some(f) = &exact {
                    l2 = Some(l2_error(&semi.disc, &evolution.state, |x| f(x, cfg.t_final))?);
                    if cfg.problem.riemann_data().is_some() {
                        l1 = Some(l1_density_error(&semi.disc, &evolution.state, |x| f(x, cfg.t_final), 16)?);
                    }
                }
            }
            Ok(RunOutput::Evolve {
                semi: Box::new(semi),
                evolution,
                l2_error: l2,
                l1_density_error: l1,
            })
        }
        RunMode::ResidualStudy => {
            let problem = cfg.problem;
            let study = residual_convergence_study(
                cfg.degree,
                &cfg.study_elements,
                cfg.study_quadrature,
                problem.domain(),
                |x| problem.initial(x),
                Some(cfg.scheme),
            )?;
            Ok(RunOutput::ResidualStudy(study))
        }
        RunMode::Spectrum => {
            let semi = build_semidiscretization(cfg, cfg.elements)?;
            let u0 = initial_field(cfg, &semi.disc)?;
            let background = if cfg.background_time > 0.0 {
                evolve(&semi, u0, 0.0, cfg.background_time, &EvolveSettings::from_config(cfg), None)
            } else {
                evolve_noop(u0)
            };
            let report = if background.completed() {
                Some(linearized_spectrum(&semi, &background.state)?)
            } else {
                None
            };
            Ok(RunOutput::Spectrum { background, report })
        }
    }
}

fn evolve_noop(u: SolutionField) -> Evolution {
    Evolution {
        failure: None,
        t_reached: 0.0,
        n_accepted: 0,
        n_rejected: 0,
        n_rhs: 0,
        history: EntropyHistory::default(),
        stages: StageMonitor::default(),
        state: u,
        snapshots: Vec::new(),
    }
}

/// Format a float for CSV output.
pub fn fmt_f(x: f64) -> String {
    // adding zero turns -0 into +0
    format!("{:.15e}", x + 0.0)
}

fn snapshot_csv(semi: &Semidiscretization, u: &SolutionField) -> Result<String> {
    let disc = &semi.disc;
    // viscosity of the final state; unavailable if the state is inadmissible
    let eps = semi.evaluate(u).ok().map(|r| r.viscosity);
    let mut s = String::from("x,rho,rhou,E,p,eps\n");
    for k in 0..disc.n_elements() {
        for (q, st) in disc.quad_states(u, k).iter().enumerate() {
            let p = euler::pressure(st).unwrap_or(f64::NAN);
            let e = eps.as_ref().map_or(f64::NAN, |v| v.eps_at(k, q));
            let row = [disc.quad_x(k, q), st[0], st[1], st[2], p, e].map(fmt_f);
            let _ = writeln!(s, "{}", row.join(","));
        }
    }
    Ok(s)
}

fn history_csv(h: &EntropyHistory) -> String {
    let mut s = String::from("t,total_entropy,entropy_rate,l2_error,max_eps\n");
    for r in &h.records {
        let row = [r.t, r.total_entropy, r.entropy_rate, r.l2_error, r.max_eps].map(fmt_f);
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

fn reference_csv(cfg: &RunConfig, t: f64) -> Result<Option<String>> {
    let Some(f) = exact_fn(cfg.problem) else {
        return Ok(None);
    };
    if cfg.reference_points == 0 {
        return Ok(None);
    }
    let (a, b) = cfg.problem.domain();
    let n = cfg.reference_points;
    let mut s = String::from("x,rho,rhou,E,p\n");
    for i in 0..n {
        let x = a + (b - a) * (i as f64 + 0.5) / n as f64;
        let st = f(x, t)?;
        let row = [x, st[0], st[1], st[2], euler::pressure(&st)?].map(fmt_f);
        let _ = writeln!(s, "{}", row.join(","));
    }
    Ok(Some(s))
}

fn table_csv(table: &ConvergenceTable) -> String {
    let mut s = String::from("h,K,error,rate\n");
    for (row, rate) in table.rows.iter().zip(table.rates()) {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_f(row.h),
            row.n_elements,
            fmt_f(row.error),
            rate.map_or(String::new(), fmt_f)
        );
    }
    s
}

fn residual_csv(study: &ResidualStudy) -> String {
    let mut s = String::from("h,K,max_delta,delta_rate,max_eps,eps_rate\n");
    let (dr, er) = (study.delta.rates(), study.eps.rates());
    for (i, (d, e)) in study.delta.rows.iter().zip(&study.eps.rows).enumerate() {
        let rate = |r: Option<f64>| r.map_or(String::new(), fmt_f);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt_f(d.h),
            d.n_elements,
            fmt_f(d.error),
            rate(dr[i]),
            fmt_f(e.error),
            rate(er[i])
        );
    }
    s
}

fn residual_file(study: &ResidualStudy) -> String {
    format!("residual_N{}_{}.csv", study.delta.degree, study.quadrature.to_string().replace('+', "p"))
}

/// Result summary of [`run`].
#[derive(Debug)]
pub struct RunSummary {
    pub output: RunOutput,
    pub wall_time: f64,
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn status_lines(m: &mut String, failure: Option<&Error>) {
    let _ = writeln!(m, "result.status = {}", status_name(failure));
    if let Some(e) = failure {
        let _ = writeln!(m, "result.error = {}", e.to_string().replace('\n', " "));
    }
}

pub fn status_name(failure: Option<&Error>) -> &'static str {
    match failure {
        None => "completed",
        Some(e) if e.is_admissibility() => "admissibility_failure",
        Some(_) => "integration_failure",
    }
}

fn evolution_lines(m: &mut String, e: &Evolution) {
    let _ = writeln!(m, "result.t_reached = {}", e.t_reached);
    let _ = writeln!(m, "result.steps_accepted = {}", e.n_accepted);
    let _ = writeln!(m, "result.steps_rejected = {}", e.n_rejected);
    let _ = writeln!(m, "result.rhs_evaluations = {}", e.n_rhs);
    let _ = writeln!(m, "result.max_stage_entropy_ratio = {}", e.stages.max_ratio);
    let _ = writeln!(m, "result.entropy_nonincreasing = {}", e.history.is_nonincreasing(0.0));
}

/// Run a configuration and write its artifacts to `out`.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<RunSummary> {
    fs::create_dir_all(out)?;
    let start = Instant::now();
    let output = execute(cfg)?;
    let wall_time = start.elapsed().as_secs_f64();
    let mut manifest = cfg.to_text();
    status_lines(&mut manifest, output.failure());
    match &output {
        RunOutput::Evolve {
            semi,
            evolution,
            l2_error,
            l1_density_error,
        } => {
            evolution_lines(&mut manifest, evolution);
            let mins = min_density_pressure(&semi.disc, &evolution.state);
            let _ = writeln!(manifest, "result.min_density = {}", mins.0);
            let _ = writeln!(manifest, "result.min_pressure = {}", mins.1);
            if let Some(e) = l2_error {
                let _ = writeln!(manifest, "result.l2_error = {e}");
            }
            if let Some(e) = l1_density_error {
                let _ = writeln!(manifest, "result.l1_density_error = {e}");
            }
            write(out, "snapshot.csv", &snapshot_csv(semi, &evolution.state)?)?;
            for (i, (_, u)) in evolution.snapshots.iter().enumerate() {
                write(out, &format!("snapshot_{:03}.csv", i + 1), &snapshot_csv(semi, u)?)?;
            }
            write(out, "history.csv", &history_csv(&evolution.history))?;
            if evolution.completed() {
                if let Some(r) = reference_csv(cfg, cfg.t_final)? {
                    write(out, "reference.csv", &r)?;
                }
            }
        }
        RunOutput::ResidualStudy(study) => {
            let _ = writeln!(manifest, "result.delta_slope = {}", study.delta.slope());
            let _ = writeln!(manifest, "result.eps_slope = {}", study.eps.slope());
            write(out, &residual_file(study), &residual_csv(study))?;
        }
        RunOutput::Spectrum { background, report } => {
            evolution_lines(&mut manifest, background);
            if let Some(r) = report {
                let _ = writeln!(manifest, "result.max_real = {}", r.max_real);
                let _ = writeln!(manifest, "result.n_unknowns = {}", r.n_unknowns);
                let mut s = String::from("re,im\n");
                for z in &r.eigenvalues {
                    let _ = writeln!(s, "{},{}", fmt_f(z.re), fmt_f(z.im));
                }
                write(out, "spectrum.csv", &s)?;
            }
        }
    }
    let _ = writeln!(manifest, "result.wall_time_s = {wall_time:.3}");
    write(out, "manifest.txt", &manifest)?;
    Ok(RunSummary { output, wall_time })
}

/// Smallest density and pressure over the volume quadrature points.
pub fn min_density_pressure(disc: &Discretization, u: &SolutionField) -> (f64, f64) {
    let mut rho = f64::INFINITY;
    let mut p = f64::INFINITY;
    for k in 0..disc.n_elements() {
        for s in disc.quad_states(u, k) {
            rho = rho.min(s[0]);
            p = p.min((euler::GAMMA - 1.0) * euler::internal_energy(&s));
        }
    }
    (rho, p)
}

/// One row of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub degree: usize,
    pub elements: usize,
    pub h: f64,
    /// L2 error (evolve), max real part (spectrum) or max residual (residual study).
    pub value: f64,
    pub status: String,
    pub t_reached: f64,
}

/// Run every grid point of `grid` on top of the base config text and write
/// `sweep.csv` plus one table per degree.
pub fn sweep(base: &str, grid: &Grid, out: &Path) -> Result<Vec<SweepRow>> {
    let base_raw = RawConfig::parse(base)?;
    let mut configs = Vec::new();
    for point in grid.points() {
        let mut raw = base_raw.clone();
        for (k, v) in &point {
            raw.set(k, v)?;
        }
        let cfg = RunConfig::from_map(&raw)?;
        if cfg.mode == RunMode::Evolve && cfg.problem.exact(0.0, 0.0).is_none() {
            return Err(Error::Config {
                line: 0,
                message: format!("sweep over {} needs a problem with an exact solution", cfg.problem.name()),
            });
        }
        configs.push(cfg);
    }
    fs::create_dir_all(out)?;
    let mut rows = Vec::new();
    for cfg in &configs {
        let (a, b) = cfg.problem.domain();
        let h = (b - a) / cfg.elements as f64;
        let row = |value: f64, status: &str, t: f64| SweepRow {
            degree: cfg.degree,
            elements: cfg.elements,
            h,
            value,
            status: status.to_string(),
            t_reached: t,
        };
        match execute(cfg) {
            Err(e) => {
                log::warn!("sweep point N={} K={} failed: {e}", cfg.degree, cfg.elements);
                rows.push(row(f64::NAN, "setup_failure", 0.0));
            }
            Ok(RunOutput::Evolve {
                evolution, l2_error, ..
            }) => rows.push(row(
                l2_error.unwrap_or(f64::NAN),
                status_name(evolution.failure.as_ref()),
                evolution.t_reached,
            )),
            Ok(RunOutput::Spectrum { background, report }) => rows.push(row(
                report.map_or(f64::NAN, |r| r.max_real),
                status_name(background.failure.as_ref()),
                background.t_reached,
            )),
            Ok(RunOutput::ResidualStudy(study)) => {
                write(out, &residual_file(&study), &residual_csv(&study))?;
                for r in &study.delta.rows {
                    rows.push(SweepRow {
                        degree: cfg.degree,
                        elements: r.n_elements,
                        h: r.h,
                        value: r.error,
                        status: "completed".into(),
                        t_reached: 0.0,
                    });
                }
            }
        }
    }

    let mut s = String::from("degree,K,h,value,status,t_reached\n");
    for r in &rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.degree,
            r.elements,
            fmt_f(r.h),
            fmt_f(r.value),
            r.status,
            fmt_f(r.t_reached)
        );
    }
    write(out, "sweep.csv", &s)?;

    if configs.iter().all(|c| c.mode == RunMode::Evolve) {
        let mut degrees: Vec<usize> = rows.iter().map(|r| r.degree).collect();
        degrees.sort_unstable();
        degrees.dedup();
        for d in degrees {
            let table = ConvergenceTable::new(
                d,
                rows.iter()
                    .filter(|r| r.degree == d && r.status == "completed")
                    .map(|r| ConvergenceRow {
                        h: r.h,
                        n_elements: r.elements,
                        error: r.value,
                    })
                    .collect(),
            );
            write(out, &format!("convergence_N{d}.csv"), &table_csv(&table))?;
        }
    }
    Ok(rows)
}
