//! Run configuration: JSON file with nested blocks, overridable by flags.
//!
//! Parse first, validate second: the library constructors re-check every
//! model/strategy invariant after parsing, and validation messages name the
//! violated constraint. The fully resolved record is echoed on every run so
//! outputs are self-describing.

use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};
use std::path::Path;

use ratchet_levy::{Axis, LevyModel, Quantity, SimConfig, Strategy, Target};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelBlock {
    pub kind: String,
    pub mu: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub eta: f64,
}

impl Default for ModelBlock {
    fn default() -> Self {
        ModelBlock {
            kind: "brownian_drift".into(),
            mu: 1.0,
            sigma: 2.0,
            lambda: 0.0,
            eta: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrategyBlock {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
    pub gamma: f64,
}

impl Default for StrategyBlock {
    fn default() -> Self {
        StrategyBlock {
            a: 3.0,
            b: 5.0,
            c1: 0.0,
            c2: 0.1,
            gamma: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimBlock {
    pub dt: f64,
    pub t_max: f64,
    pub n_paths: u64,
    pub seed: u64,
    pub antithetic: bool,
    pub target: String,
}

impl Default for SimBlock {
    fn default() -> Self {
        SimBlock {
            dt: 1e-3,
            t_max: 2000.0,
            n_paths: 100_000,
            seed: 1,
            antithetic: false,
            target: "dividend_npv".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepBlock {
    pub quantity: String,
    pub axis: String,
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
}

impl Default for SweepBlock {
    fn default() -> Self {
        SweepBlock {
            quantity: "dividend_npv".into(),
            axis: "y".into(),
            lo: 0.0,
            hi: 10.0,
            n_points: 101,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeBlock {
    pub axis: String,
    pub tolerance: f64,
}

impl Default for OptimizeBlock {
    fn default() -> Self {
        OptimizeBlock {
            axis: "a".into(),
            tolerance: 0.005,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelBlock,
    pub strategy: StrategyBlock,
    pub delta: f64,
    pub y: f64,
    pub sim: SimBlock,
    pub sweep: SweepBlock,
    pub optimize: OptimizeBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelBlock::default(),
            strategy: StrategyBlock::default(),
            delta: 0.05,
            y: 8.0,
            sim: SimBlock::default(),
            sweep: SweepBlock::default(),
            optimize: OptimizeBlock::default(),
        }
    }
}

impl RunConfig {
    pub fn base() -> Self {
        RunConfig::default()
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        // serde_json reports line/column on parse errors
        let cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn model(&self) -> anyhow::Result<LevyModel> {
        match self.model.kind.as_str() {
            "brownian_drift" => Ok(LevyModel::brownian(self.model.mu, self.model.sigma)?),
            "compound_poisson_exp" => Ok(LevyModel::compound_poisson(
                self.model.mu,
                self.model.sigma,
                self.model.lambda,
                self.model.eta,
            )?),
            other => Err(anyhow!(
                "model.kind must be brownian_drift or compound_poisson_exp, got {other:?}"
            )),
        }
    }

    pub fn strategy(&self) -> anyhow::Result<Strategy> {
        let s = &self.strategy;
        Ok(Strategy::new(s.a, s.b, s.c1, s.c2, s.gamma)?)
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            dt: self.sim.dt,
            t_max: self.sim.t_max,
            n_paths: self.sim.n_paths,
            seed: self.sim.seed,
            antithetic: self.sim.antithetic,
        }
    }

    pub fn sim_target(&self) -> anyhow::Result<Target> {
        match self.sim.target.as_str() {
            "dividend_npv" => Ok(Target::DividendNpv),
            "ruin_laplace" => Ok(Target::RuinLaplace),
            other => Err(anyhow!(
                "sim.target must be dividend_npv or ruin_laplace, got {other:?}"
            )),
        }
    }

    pub fn sweep_quantity(&self) -> anyhow::Result<Quantity> {
        parse_quantity(&self.sweep.quantity)
    }

    pub fn sweep_axis(&self) -> anyhow::Result<Axis> {
        match self.sweep.axis.as_str() {
            "y" => Ok(Axis::Y),
            "a" => Ok(Axis::A),
            "b" => Ok(Axis::B),
            "c1" => Ok(Axis::C1),
            "c2" => Ok(Axis::C2),
            "sigma" => Ok(Axis::Sigma),
            "gamma" => Ok(Axis::Gamma),
            "c1c2" => Ok(Axis::C1C2Grid),
            other => Err(anyhow!(
                "sweep.axis must be one of y a b c1 c2 sigma gamma c1c2, got {other:?}"
            )),
        }
    }

    /// One-line echo of the fully resolved configuration.
    pub fn echo(&self) -> String {
        format!("# config {}", serde_json::to_string(self).unwrap())
    }
}

pub fn parse_quantity(s: &str) -> anyhow::Result<Quantity> {
    match s {
        "dividend_npv" => Ok(Quantity::DividendNpv),
        "ruin_laplace" => Ok(Quantity::RuinLaplace),
        other => Err(anyhow!(
            "quantity must be dividend_npv or ruin_laplace, got {other:?}"
        )),
    }
}
