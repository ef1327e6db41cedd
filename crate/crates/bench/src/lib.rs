//! Benchmark fixtures: semidiscretizations of the density wave at A = 0.98
//! with their initial fields.

use esdg_core::driver::{build_semidiscretization, initial_field};
use esdg_core::{RunConfig, Semidiscretization, SolutionField};

/// Scheme under benchmark, as config lines.
pub const SCHEMES: &[(&str, &str)] = &[
    ("weak_dg", "scheme.viscosity = none\nscheme.trace_mode = direct\n"),
    ("av_elementwise", ""),
    ("av_subcell", "scheme.viscosity = subcell\n"),
    ("flux_differencing", "scheme.form = flux_differencing\n"),
];

pub struct Fixture {
    pub semi: Semidiscretization,
    pub u: SolutionField,
}

pub fn fixture(scheme: &str, variant: &str, degree: usize, elements: usize) -> Fixture {
    let cfg = RunConfig::parse(&format!(
        "{scheme}problem.amplitude = 0.98\ndisc.variant = {variant}\ndisc.degree = {degree}\ndisc.elements = {elements}\n"
    ))
    .expect("fixture config");
    let semi = build_semidiscretization(&cfg, elements).expect("fixture scheme");
    let u = initial_field(&cfg, &semi.disc).expect("fixture field");
    Fixture { semi, u }
}
