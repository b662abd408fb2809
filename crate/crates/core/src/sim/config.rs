use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeVariant, Vertex};
use crate::sim::geometry::BallGeometry;
use crate::sim::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OriginRule {
    /// Origin forced open; the `k` sites beyond it carry the factors of `p`.
    #[default]
    ConditionedOpen,
    /// Origin drawn like every other site.
    Sampled,
}

impl FromStr for OriginRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conditioned-open" | "conditioned" => Ok(OriginRule::ConditionedOpen),
            "sampled" => Ok(OriginRule::Sampled),
            _ => Err(Error::Parse(format!("unknown origin rule {s:?}"))),
        }
    }
}

impl fmt::Display for OriginRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OriginRule::ConditionedOpen => "conditioned-open",
            OriginRule::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Event {
    /// Origin joined to the distance-`k` boundary.
    OneArm,
    /// Origin joined to both arcs of the convenient opposite pair.
    TwoArm,
}

impl FromStr for Event {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-arm" => Ok(Event::OneArm),
            "two-arm" => Ok(Event::TwoArm),
            _ => Err(Error::Parse(format!("unknown event {s:?}"))),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Event::OneArm => "one-arm",
            Event::TwoArm => "two-arm",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub variant: LatticeVariant,
    pub k: u64,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub origin_rule: OriginRule,
}

impl SimConfig {
    pub fn new(variant: LatticeVariant, k: u64, p: f64, trials: u64, seed: u64) -> Self {
        SimConfig {
            variant,
            k,
            p,
            trials,
            seed,
            origin_rule: OriginRule::default(),
        }
    }

    pub fn with_origin_rule(mut self, rule: OriginRule) -> Self {
        self.origin_rule = rule;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidProbability(self.p, "[0, 1]"));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// Open/closed flag for every vertex of a ball.
#[derive(Debug, Clone)]
pub struct OpenConfiguration {
    geometry: Arc<BallGeometry>,
    open: Vec<bool>,
}

impl PartialEq for OpenConfiguration {
    fn eq(&self, other: &Self) -> bool {
        self.k() == other.k() && self.variant() == other.variant() && self.open == other.open
    }
}

impl OpenConfiguration {
    /// All sites closed.
    pub fn closed(geometry: Arc<BallGeometry>) -> Self {
        let open = vec![false; geometry.len()];
        OpenConfiguration { geometry, open }
    }

    pub fn from_open_set(
        geometry: Arc<BallGeometry>,
        open_sites: impl IntoIterator<Item = Vertex>,
    ) -> Result<Self> {
        let mut cfg = Self::closed(geometry);
        for v in open_sites {
            cfg.set_open(v, true)?;
        }
        Ok(cfg)
    }

    pub fn from_flags(geometry: Arc<BallGeometry>, open: Vec<bool>) -> Result<Self> {
        if open.len() != geometry.len() {
            return Err(Error::InvalidConfig(format!(
                "{} flags for a ball of {} sites",
                open.len(),
                geometry.len()
            )));
        }
        Ok(OpenConfiguration { geometry, open })
    }

    /// Threshold shared uniforms at `p`; nested in `p` by construction.
    pub fn from_uniforms(
        geometry: Arc<BallGeometry>,
        uniforms: &[f64],
        p: f64,
        origin_rule: OriginRule,
    ) -> Self {
        let mut open: Vec<bool> = uniforms.iter().map(|&u| u < p).collect();
        if origin_rule == OriginRule::ConditionedOpen {
            open[geometry.origin_index()] = true;
        }
        OpenConfiguration { geometry, open }
    }

    pub fn geometry(&self) -> &Arc<BallGeometry> {
        &self.geometry
    }

    pub fn k(&self) -> u64 {
        self.geometry.k()
    }

    pub fn variant(&self) -> LatticeVariant {
        self.geometry.variant()
    }

    pub fn flags(&self) -> &[bool] {
        &self.open
    }

    pub fn is_open_index(&self, index: usize) -> bool {
        self.open[index]
    }

    pub fn is_open(&self, v: Vertex) -> Result<bool> {
        let i = self.geometry.index_of(v).ok_or(Error::OutOfBall(v))?;
        Ok(self.open[i])
    }

    pub fn set_open(&mut self, v: Vertex, open: bool) -> Result<()> {
        let i = self.geometry.index_of(v).ok_or(Error::OutOfBall(v))?;
        self.open[i] = open;
        Ok(())
    }

    pub fn origin_open(&self) -> bool {
        self.open[self.geometry.origin_index()]
    }

    pub fn open_count(&self) -> usize {
        self.open.iter().filter(|&&b| b).count()
    }

    /// Point reflection `v -> -v`.
    pub fn negated(&self) -> Self {
        let g = &self.geometry;
        let open = g
            .vertices()
            .iter()
            .map(|&v| self.open[g.index_of(-v).expect("balls are symmetric")])
            .collect();
        OpenConfiguration {
            geometry: Arc::clone(g),
            open,
        }
    }
}

/// Configuration for trial `trial_index`, keyed by `(seed, trial, vertex)`.
pub fn sample_configuration(
    config: &SimConfig,
    geometry: &Arc<BallGeometry>,
    trial_index: u64,
) -> Result<OpenConfiguration> {
    config.validate()?;
    if geometry.k() != config.k || geometry.variant() != config.variant {
        return Err(Error::InvalidConfig(
            "geometry does not match the configuration".into(),
        ));
    }
    if trial_index >= config.trials {
        return Err(Error::InvalidConfig(format!(
            "trial index {trial_index} out of range for {} trials",
            config.trials
        )));
    }
    let mut uniforms = Vec::new();
    rng::trial_uniforms(config.seed, trial_index, geometry.len(), &mut uniforms);
    Ok(OpenConfiguration::from_uniforms(
        Arc::clone(geometry),
        &uniforms,
        config.p,
        config.origin_rule,
    ))
}
