//! Run configuration in a flat `section.key = value` text format.
//!
//! Blank lines and `#` comments are ignored. Keys under `result.` are written
//! into run manifests and skipped when parsing, so a manifest can be fed back
//! as a config.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::basis::{build_operators, gauss_legendre, ElementOperators, Variant};
use crate::diagnostics::ResidualQuadrature;
use crate::error::{Error, Result};
use crate::euler::Primitive;
use crate::flux::FluxKind;
use crate::flux_diff::VolumeFlux;
use crate::mesh::BoundaryMode;
use crate::problems::{Problem, RiemannData};
use crate::scheme::{Form, SchemeOptions, TraceMode};
use crate::time::AdaptiveOptions;
use crate::viscosity::{ViscosityMode, ViscousMatrix, DEFAULT_DELTA_TOL};

/// Every key the parser accepts, in manifest order.
pub const KEYS: &[&str] = &[
    "run.mode",
    "problem.kind",
    "problem.amplitude",
    "problem.left",
    "problem.right",
    "problem.x0",
    "problem.domain",
    "disc.variant",
    "disc.degree",
    "disc.elements",
    "disc.quad_points",
    "scheme.form",
    "scheme.flux",
    "scheme.volume_flux",
    "scheme.viscosity",
    "scheme.trace_mode",
    "scheme.bc",
    "scheme.delta_tol",
    "scheme.viscous_matrix",
    "time.method",
    "time.final",
    "time.abs_tol",
    "time.rel_tol",
    "time.cfl",
    "time.dt_max",
    "time.max_steps",
    "init.method",
    "output.history_every",
    "output.snapshots",
    "output.reference_points",
    "study.elements",
    "study.quadrature",
    "spectrum.background_time",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Evolve,
    ResidualStudy,
    Spectrum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeMethod {
    Adaptive { abs_tol: f64, rel_tol: f64 },
    FixedCfl { cfl: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMethod {
    Projection,
    Interpolation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: RunMode,
    pub problem: Problem,
    pub variant: Variant,
    pub degree: usize,
    pub elements: usize,
    /// Gauss points of the modal variant.
    pub quad_points: usize,
    pub scheme: SchemeOptions,
    pub boundary: BoundaryMode,
    pub time: TimeMethod,
    pub t_final: f64,
    pub dt_max: f64,
    pub max_steps: usize,
    pub init: InitMethod,
    /// Log history every this many accepted steps (0 = first and last only).
    pub history_every: usize,
    /// Number of uniformly spaced intermediate snapshots.
    pub snapshots: usize,
    /// Points in the exact reference CSV (0 disables it).
    pub reference_points: usize,
    pub study_elements: Vec<usize>,
    pub study_quadrature: ResidualQuadrature,
    pub background_time: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::from_map(&RawConfig::default()).expect("defaults are valid")
    }
}

/// Raw `key -> (line, value)` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected 'key = value', got '{content}'"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.starts_with("result.") {
                continue;
            }
            if !KEYS.contains(&key) {
                return Err(Error::Config {
                    line,
                    message: format!("unknown key '{key}'"),
                });
            }
            if entries.insert(key.to_string(), (line, value.to_string())).is_some() {
                return Err(Error::Config {
                    line,
                    message: format!("duplicate key '{key}'"),
                });
            }
        }
        Ok(Self { entries })
    }

    /// Replace or add a value (line 0 marks an override).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::Config {
                line: 0,
                message: format!("unknown key '{key}'"),
            });
        }
        self.entries.insert(key.to_string(), (0, value.to_string()));
        Ok(())
    }

    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.get(key).map(|(l, v)| (*l, v.as_str()))
    }
}

fn field<T: FromStr>(raw: &RawConfig, key: &str, default: T) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    match raw.get(key) {
        None => Ok(default),
        Some((line, v)) => v.parse().map_err(|e| Error::Config {
            line,
            message: format!("{key}: {e}"),
        }),
    }
}

fn list<T: FromStr>(raw: &RawConfig, key: &str) -> Result<Option<Vec<T>>>
where
    T::Err: std::fmt::Display,
{
    let Some((line, v)) = raw.get(key) else {
        return Ok(None);
    };
    v.split(',')
        .map(|s| {
            s.trim().parse().map_err(|e| Error::Config {
                line,
                message: format!("{key}: {e}"),
            })
        })
        .collect::<Result<Vec<T>>>()
        .map(Some)
}

fn config_err(raw: &RawConfig, key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line: raw.get(key).map_or(0, |(l, _)| l),
        message: format!("{key}: {}", message.into()),
    }
}

fn primitive(raw: &RawConfig, key: &str, default: Primitive) -> Result<Primitive> {
    match list::<f64>(raw, key)? {
        None => Ok(default),
        Some(v) if v.len() == 3 => Ok(Primitive::new(v[0], v[1], v[2])),
        Some(_) => Err(config_err(raw, key, "expected rho, u, p")),
    }
}

impl FromStr for RunMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "evolve" => Ok(RunMode::Evolve),
            "residual_study" => Ok(RunMode::ResidualStudy),
            "spectrum" => Ok(RunMode::Spectrum),
            _ => Err(Error::invalid(format!("unknown mode '{s}' (evolve, residual_study, spectrum)"))),
        }
    }
}

impl RunMode {
    pub fn name(self) -> &'static str {
        match self {
            RunMode::Evolve => "evolve",
            RunMode::ResidualStudy => "residual_study",
            RunMode::Spectrum => "spectrum",
        }
    }
}

fn parse_variant(s: &str) -> Result<Variant> {
    match s {
        "nodal" => Ok(Variant::NodalLobatto),
        "modal" => Ok(Variant::ModalGauss),
        _ => Err(Error::invalid(format!("unknown variant '{s}' (nodal, modal)"))),
    }
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::NodalLobatto => "nodal",
        Variant::ModalGauss => "modal",
    }
}

fn choice<T>(raw: &RawConfig, key: &str, default: &str, f: impl Fn(&str) -> Result<T>) -> Result<T> {
    let (line, v) = raw.get(key).unwrap_or((0, default));
    f(v).map_err(|e| Error::Config {
        line,
        message: format!("{key}: {}", strip_invalid(e)),
    })
}

fn strip_invalid(e: Error) -> String {
    match e {
        Error::InvalidArgument(m) | Error::Unsupported(m) => m,
        other => other.to_string(),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_map(&RawConfig::parse(text)?)
    }

    pub fn from_map(raw: &RawConfig) -> Result<Self> {
        let mode = choice(raw, "run.mode", "evolve", RunMode::from_str)?;
        let kind = raw.get("problem.kind").map_or("density_wave", |(_, v)| v);
        let problem = match kind {
            "density_wave" => Problem::DensityWave {
                amplitude: field(raw, "problem.amplitude", 0.5)?,
            },
            "modified_sod" => Problem::ModifiedSod,
            "modified_sod_near_vacuum" => Problem::ModifiedSodNearVacuum,
            "shu_osher" => Problem::ShuOsher,
            "smooth_field" => Problem::SmoothField,
            "custom" => {
                let base = Problem::ModifiedSod.riemann_data().unwrap();
                let domain = list::<f64>(raw, "problem.domain")?.unwrap_or(vec![base.a, base.b]);
                if domain.len() != 2 {
                    return Err(config_err(raw, "problem.domain", "expected a, b"));
                }
                Problem::Riemann(RiemannData {
                    left: primitive(raw, "problem.left", base.left)?,
                    right: primitive(raw, "problem.right", base.right)?,
                    x0: field(raw, "problem.x0", base.x0)?,
                    a: domain[0],
                    b: domain[1],
                    t_final: field(raw, "time.final", base.t_final)?,
                })
            }
            other => return Err(config_err(raw, "problem.kind", format!("unknown problem '{other}'"))),
        };
        for key in ["problem.left", "problem.right", "problem.x0", "problem.domain"] {
            if raw.get(key).is_some() && !matches!(problem, Problem::Riemann(_)) {
                return Err(config_err(raw, key, "only used by problem.kind = custom"));
            }
        }
        if raw.get("problem.amplitude").is_some() && !matches!(problem, Problem::DensityWave { .. }) {
            return Err(config_err(raw, "problem.amplitude", "only used by problem.kind = density_wave"));
        }
        let problem_key = if matches!(problem, Problem::DensityWave { .. }) { "problem.amplitude" } else { "problem.kind" };
        problem.validate().map_err(|e| config_err(raw, problem_key, strip_invalid(e)))?;

        let variant = choice(raw, "disc.variant", "nodal", parse_variant)?;
        let degree: usize = field(raw, "disc.degree", 3)?;
        if !(1..=16).contains(&degree) {
            return Err(config_err(raw, "disc.degree", "must be in 1..=16"));
        }
        let elements: usize = field(raw, "disc.elements", 16)?;
        if elements == 0 {
            return Err(config_err(raw, "disc.elements", "must be at least 1"));
        }
        let quad_points: usize = match variant {
            Variant::ModalGauss => field(raw, "disc.quad_points", degree + 2)?,
            Variant::NodalLobatto => {
                if raw.get("disc.quad_points").is_some() {
                    return Err(config_err(raw, "disc.quad_points", "the nodal variant collocates on N+1 Lobatto nodes"));
                }
                degree + 1
            }
        };
        if quad_points < degree + 1 {
            return Err(config_err(raw, "disc.quad_points", format!("need at least {} points", degree + 1)));
        }

        let form = match raw.get("scheme.form").map_or("weak", |(_, v)| v) {
            "weak" => Form::WeakDg,
            "flux_differencing" => Form::FluxDifferencing(choice(raw, "scheme.volume_flux", "ec_ranocha", VolumeFlux::from_str)?),
            other => return Err(config_err(raw, "scheme.form", format!("unknown form '{other}' (weak, flux_differencing)"))),
        };
        if form == Form::WeakDg && raw.get("scheme.volume_flux").is_some() {
            return Err(config_err(raw, "scheme.volume_flux", "only used by scheme.form = flux_differencing"));
        }
        let default_visc = if form == Form::WeakDg { "elementwise" } else { "none" };
        let scheme = SchemeOptions {
            form,
            interface_flux: choice(raw, "scheme.flux", "llf_davis", FluxKind::from_str)?,
            viscosity: choice(raw, "scheme.viscosity", default_visc, ViscosityMode::from_str)?,
            trace_mode: choice(raw, "scheme.trace_mode", "entropy_projection", TraceMode::from_str)?,
            delta_tol: field(raw, "scheme.delta_tol", DEFAULT_DELTA_TOL)?,
            viscous_matrix: choice(raw, "scheme.viscous_matrix", "average", ViscousMatrix::from_str)?,
        };
        if matches!(form, Form::FluxDifferencing(_)) {
            if scheme.viscosity != ViscosityMode::None {
                return Err(config_err(raw, "scheme.viscosity", "flux differencing runs without viscosity"));
            }
            if variant != Variant::NodalLobatto {
                return Err(config_err(raw, "disc.variant", "flux differencing needs the nodal variant"));
            }
        }
        if !(scheme.delta_tol >= 0.0) {
            return Err(config_err(raw, "scheme.delta_tol", "must be nonnegative"));
        }
        let boundary = match raw.get("scheme.bc").map(|(_, v)| v) {
            None => problem.boundary(),
            Some("periodic") => BoundaryMode::Periodic,
            Some("ghost") => BoundaryMode::DirichletGhost,
            Some(other) => return Err(config_err(raw, "scheme.bc", format!("unknown boundary '{other}' (periodic, ghost)"))),
        };

        let defaults = AdaptiveOptions::default();
        let time = match raw.get("time.method").map_or("adaptive", |(_, v)| v) {
            "adaptive" => {
                if raw.get("time.cfl").is_some() {
                    return Err(config_err(raw, "time.cfl", "only used by time.method = fixed_cfl"));
                }
                TimeMethod::Adaptive {
                    abs_tol: field(raw, "time.abs_tol", defaults.abs_tol)?,
                    rel_tol: field(raw, "time.rel_tol", defaults.rel_tol)?,
                }
            }
            "fixed_cfl" => {
                for key in ["time.abs_tol", "time.rel_tol"] {
                    if raw.get(key).is_some() {
                        return Err(config_err(raw, key, "only used by time.method = adaptive"));
                    }
                }
                TimeMethod::FixedCfl {
                    cfl: field(raw, "time.cfl", 0.1)?,
                }
            }
            other => return Err(config_err(raw, "time.method", format!("unknown method '{other}' (adaptive, fixed_cfl)"))),
        };
        match time {
            TimeMethod::Adaptive { abs_tol, rel_tol } if !(abs_tol > 0.0 && rel_tol >= 0.0) => {
                return Err(config_err(raw, "time.abs_tol", "tolerances must be positive"));
            }
            TimeMethod::FixedCfl { cfl } if !(cfl > 0.0 && cfl.is_finite()) => {
                return Err(config_err(raw, "time.cfl", "must be positive"));
            }
            _ => {}
        }
        let t_final: f64 = field(raw, "time.final", problem.default_t_final())?;
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(config_err(raw, "time.final", "must be positive"));
        }
        let dt_max: f64 = field(raw, "time.dt_max", f64::INFINITY)?;
        if !(dt_max > 0.0) {
            return Err(config_err(raw, "time.dt_max", "must be positive"));
        }
        let init = match raw.get("init.method").map_or("projection", |(_, v)| v) {
            "projection" => InitMethod::Projection,
            "interpolation" => InitMethod::Interpolation,
            other => return Err(config_err(raw, "init.method", format!("unknown method '{other}' (projection, interpolation)"))),
        };
        let study_elements = list::<usize>(raw, "study.elements")?.unwrap_or(vec![4, 8, 16, 32, 64]);
        if study_elements.is_empty() || study_elements.contains(&0) {
            return Err(config_err(raw, "study.elements", "element counts must be positive"));
        }
        let background_time: f64 = field(raw, "spectrum.background_time", 2.0)?;
        if !(background_time >= 0.0) {
            return Err(config_err(raw, "spectrum.background_time", "must be nonnegative"));
        }
        Ok(RunConfig {
            mode,
            problem,
            variant,
            degree,
            elements,
            quad_points,
            scheme,
            boundary,
            time,
            t_final,
            dt_max,
            max_steps: field(raw, "time.max_steps", defaults.max_steps)?,
            init,
            history_every: field(raw, "output.history_every", 1)?,
            snapshots: field(raw, "output.snapshots", 0)?,
            reference_points: field(raw, "output.reference_points", 1000)?,
            study_elements,
            study_quadrature: choice(raw, "study.quadrature", "gauss+1", ResidualQuadrature::from_str)?,
            background_time,
        })
    }

    pub fn operators(&self) -> Result<ElementOperators> {
        match self.variant {
            Variant::NodalLobatto => ElementOperators::nodal(self.degree),
            Variant::ModalGauss => build_operators(self.degree, self.variant, gauss_legendre(self.quad_points)?),
        }
    }

    /// Canonical text with every key resolved; parses back to an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("run.mode", self.mode.name().into());
        put("problem.kind", self.problem.name().into());
        match self.problem {
            Problem::DensityWave { amplitude } => put("problem.amplitude", amplitude.to_string()),
            Problem::Riemann(d) => {
                put("problem.left", format!("{}, {}, {}", d.left.rho, d.left.u, d.left.p));
                put("problem.right", format!("{}, {}, {}", d.right.rho, d.right.u, d.right.p));
                put("problem.x0", d.x0.to_string());
                put("problem.domain", format!("{}, {}", d.a, d.b));
            }
            _ => {}
        }
        put("disc.variant", variant_name(self.variant).into());
        put("disc.degree", self.degree.to_string());
        put("disc.elements", self.elements.to_string());
        if self.variant == Variant::ModalGauss {
            put("disc.quad_points", self.quad_points.to_string());
        }
        match self.scheme.form {
            Form::WeakDg => put("scheme.form", "weak".into()),
            Form::FluxDifferencing(vf) => {
                put("scheme.form", "flux_differencing".into());
                put("scheme.volume_flux", vf.to_string());
            }
        }
        put("scheme.flux", self.scheme.interface_flux.to_string());
        put("scheme.viscosity", self.scheme.viscosity.to_string());
        put("scheme.trace_mode", self.scheme.trace_mode.name().into());
        put(
            "scheme.bc",
            match self.boundary {
                BoundaryMode::Periodic => "periodic",
                BoundaryMode::DirichletGhost => "ghost",
            }
            .into(),
        );
        put("scheme.delta_tol", self.scheme.delta_tol.to_string());
        put("scheme.viscous_matrix", self.scheme.viscous_matrix.name().into());
        match self.time {
            TimeMethod::Adaptive { abs_tol, rel_tol } => {
                put("time.method", "adaptive".into());
                put("time.abs_tol", abs_tol.to_string());
                put("time.rel_tol", rel_tol.to_string());
            }
            TimeMethod::FixedCfl { cfl } => {
                put("time.method", "fixed_cfl".into());
                put("time.cfl", cfl.to_string());
            }
        }
        put("time.final", self.t_final.to_string());
        put("time.dt_max", self.dt_max.to_string());
        put("time.max_steps", self.max_steps.to_string());
        put(
            "init.method",
            match self.init {
                InitMethod::Projection => "projection",
                InitMethod::Interpolation => "interpolation",
            }
            .into(),
        );
        put("output.history_every", self.history_every.to_string());
        put("output.snapshots", self.snapshots.to_string());
        put("output.reference_points", self.reference_points.to_string());
        put(
            "study.elements",
            self.study_elements.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", "),
        );
        put("study.quadrature", self.study_quadrature.to_string());
        put("spectrum.background_time", self.background_time.to_string());
        s
    }
}

/// Parameter grid for sweeps: each key maps to a list of values, expanded as a
/// Cartesian product in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub axes: Vec<(String, Vec<String>)>,
}

impl Grid {
    pub fn parse(text: &str) -> Result<Self> {
        let raw = RawConfig::parse(text)?;
        let mut axes: Vec<(usize, String, Vec<String>)> = raw
            .entries
            .iter()
            .map(|(k, (line, v))| {
                let values: Vec<String> = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                (*line, k.clone(), values)
            })
            .collect();
        axes.sort_by_key(|a| a.0);
        if axes.is_empty() {
            return Err(Error::Config {
                line: 0,
                message: "sweep grid is empty".into(),
            });
        }
        for (line, key, values) in &axes {
            if values.is_empty() {
                return Err(Error::Config {
                    line: *line,
                    message: format!("{key}: no values"),
                });
            }
        }
        Ok(Self {
            axes: axes.into_iter().map(|(_, k, v)| (k, v)).collect(),
        })
    }

    /// All grid points as key/value override lists.
    pub fn points(&self) -> Vec<Vec<(String, String)>> {
        let mut out: Vec<Vec<(String, String)>> = vec![Vec::new()];
        for (key, values) in &self.axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push((key.clone(), v.clone()));
                        q
                    })
                })
                .collect();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.problem, Problem::DensityWave { amplitude: 0.5 });
        assert_eq!(c.scheme, SchemeOptions::artificial_viscosity(FluxKind::LlfDavis));
        assert_eq!(c.boundary, BoundaryMode::Periodic);
        assert_eq!(c.t_final, 1.0);
    }

    #[test]
    fn full_config_round_trips() {
        let text = "
            # shock tube
            problem.kind = custom
            problem.left = 1, 0.75, 1
            problem.right = 0.125, 0, 0.1   # right state
            problem.x0 = 0.3
            disc.variant = modal
            disc.degree = 3
            disc.elements = 40
            scheme.flux = hllc
            scheme.viscosity = subcell
            time.method = fixed_cfl
            time.cfl = 0.05
            time.final = 0.2
        ";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.boundary, BoundaryMode::DirichletGhost);
        assert_eq!(c.quad_points, 5);
        assert_eq!(c.time, TimeMethod::FixedCfl { cfl: 0.05 });
        let again = RunConfig::parse(&c.to_text()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.to_text(), again.to_text());
    }

    #[test]
    fn every_problem_round_trips() {
        for kind in ["density_wave", "modified_sod", "modified_sod_near_vacuum", "shu_osher", "smooth_field", "custom"] {
            let c = RunConfig::parse(&format!("problem.kind = {kind}\nscheme.form = flux_differencing\n")).unwrap();
            assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c, "{kind}");
        }
    }

    #[test]
    fn result_keys_are_ignored() {
        let c = RunConfig::parse("disc.degree = 2\nresult.status = ok\nresult.t_reached = 1\n").unwrap();
        assert_eq!(c.degree, 2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("disc.degree = 3\nbogus.key = 1\n", 2),
            ("disc.degree = x\n", 1),
            ("\n\ndisc.degree = 17\n", 3),
            ("scheme.flux = roe\n", 1),
            ("disc.elements = 0\n", 1),
            ("disc.degree = 2\ndisc.degree = 3\n", 2),
            ("no equals sign\n", 1),
            ("problem.kind = modified_sod\nproblem.amplitude = 0.5\n", 2),
            ("problem.amplitude = 1.5\n", 1),
            ("scheme.form = flux_differencing\nscheme.viscosity = elementwise\n", 2),
            ("scheme.form = flux_differencing\ndisc.variant = modal\n", 2),
            ("time.method = fixed_cfl\ntime.cfl = 0\n", 2),
            ("time.method = fixed_cfl\ntime.abs_tol = 1e-8\n", 2),
            ("disc.quad_points = 5\n", 1),
        ];
        for (text, line) in cases {
            match RunConfig::parse(text) {
                Err(Error::Config { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn flux_differencing_defaults_to_no_viscosity() {
        let c = RunConfig::parse("scheme.form = flux_differencing\n").unwrap();
        assert_eq!(c.scheme.viscosity, ViscosityMode::None);
        assert_eq!(c.scheme.form, Form::FluxDifferencing(VolumeFlux::EcRanocha));
    }

    #[test]
    fn grid_expansion() {
        let g = Grid::parse("disc.degree = 1, 2\ndisc.elements = 4, 8, 16\n").unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![("disc.degree".into(), "1".into()), ("disc.elements".into(), "4".into())]);
        assert_eq!(pts[5][1].1, "16");
        assert!(Grid::parse("# nothing\n").is_err());
        assert!(Grid::parse("disc.degree = ,\n").is_err());
    }
}
