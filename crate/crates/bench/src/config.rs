//! Experiment configuration and its stable fingerprint.

use std::fmt;
use std::str::FromStr;

use dpreg::benchprob::{ExactSolution, Kernel};
use sha2::{Digest, Sha256};

use crate::error::{BenchError, Result};

/// The four regularizers compared by the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    DpDiscrete,
    DpContinuous,
    Landweber,
    Cg,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::DpDiscrete,
        Method::DpContinuous,
        Method::Landweber,
        Method::Cg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::DpDiscrete => "dp_discrete",
            Method::DpContinuous => "dp_continuous",
            Method::Landweber => "landweber",
            Method::Cg => "cg",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "dp_discrete" | "dp" | "discrete" => Ok(Method::DpDiscrete),
            "dp_continuous" | "continuous" => Ok(Method::DpContinuous),
            "landweber" | "lw" => Ok(Method::Landweber),
            "cg" => Ok(Method::Cg),
            other => Err(BenchError::Config(format!("unknown method `{other}`"))),
        }
    }
}

/// Parses a comma-separated method list, preserving order.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}

pub fn kernel_name(kernel: Kernel) -> &'static str {
    match kernel {
        Kernel::BumpC6 => "k1",
        Kernel::Gaussian => "k2",
    }
}

pub fn parse_kernel(s: &str) -> Result<Kernel> {
    match s {
        "k1" => Ok(Kernel::BumpC6),
        "k2" => Ok(Kernel::Gaussian),
        other => Err(BenchError::Config(format!(
            "unknown kernel `{other}` (expected k1 or k2)"
        ))),
    }
}

pub fn solution_name(solution: ExactSolution) -> &'static str {
    match solution {
        ExactSolution::U1 => "u1",
        ExactSolution::U2 => "u2",
    }
}

pub fn parse_solution(s: &str) -> Result<ExactSolution> {
    match s {
        "u1" => Ok(ExactSolution::U1),
        "u2" => Ok(ExactSolution::U2),
        other => Err(BenchError::Config(format!(
            "unknown solution `{other}` (expected u1 or u2)"
        ))),
    }
}

/// Time step of the continuous method. One iteration is one Euler step, so
/// iteration `k` corresponds to final time `k * dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    Fixed(f64),
    /// `dt = c / sigma_max^2`; stable for `c <= 1`.
    StabilityFraction(f64),
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy::Fixed(1.0)
    }
}

impl DtPolicy {
    pub fn step(self, sigma_max: f64) -> f64 {
        match self {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::StabilityFraction(c) => c / (sigma_max * sigma_max),
        }
    }
}

/// Whether the operator is divided by its norm before solving.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scaling {
    #[default]
    UnitNorm,
    Raw,
}

impl Scaling {
    pub fn name(self) -> &'static str {
        match self {
            Scaling::UnitNorm => "unit",
            Scaling::Raw => "raw",
        }
    }
}

pub const DESK_GRID: usize = 64;
pub const FULL_GRID: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kernel: Kernel,
    pub solution: ExactSolution,
    pub m: usize,
    pub noise_fraction: f64,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub max_iters: usize,
    pub dt_policy: DtPolicy,
    pub scaling: Scaling,
    /// Landweber step; `None` means `1 / sigma_max^2`.
    pub relaxation: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kernel: Kernel::BumpC6,
            solution: ExactSolution::U1,
            m: DESK_GRID,
            noise_fraction: 0.0,
            seed: 1,
            methods: Method::ALL.to_vec(),
            max_iters: 100,
            dt_policy: DtPolicy::default(),
            scaling: Scaling::default(),
            relaxation: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(BenchError::Config(msg.to_owned()));
        if self.m < 2 {
            return fail("m must be at least 2");
        }
        if !(0.0..1.0).contains(&self.noise_fraction) {
            return fail("noise fraction must lie in [0, 1)");
        }
        if self.methods.is_empty() {
            return fail("at least one method is required");
        }
        if self.max_iters == 0 {
            return fail("max_iters must be positive");
        }
        let dt_ok = match self.dt_policy {
            DtPolicy::Fixed(v) | DtPolicy::StabilityFraction(v) => v > 0.0 && v.is_finite(),
        };
        if !dt_ok {
            return fail("time step must be positive and finite");
        }
        if let Some(w) = self.relaxation {
            if !(w > 0.0 && w.is_finite()) {
                return fail("relaxation must be positive");
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of a canonical rendering of every field.
    pub fn fingerprint(&self) -> String {
        let methods: Vec<&str> = self.methods.iter().map(|m| m.name()).collect();
        let dt = match self.dt_policy {
            DtPolicy::Fixed(v) => format!("fixed:{v:e}"),
            DtPolicy::StabilityFraction(v) => format!("fraction:{v:e}"),
        };
        let canonical = format!(
            "kernel={};solution={};m={};noise={:e};seed={};methods={};max_iters={};dt={};scaling={};relaxation={:?}",
            kernel_name(self.kernel),
            solution_name(self.solution),
            self.m,
            self.noise_fraction,
            self.seed,
            methods.join(","),
            self.max_iters,
            dt,
            self.scaling.name(),
            self.relaxation,
        );
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
