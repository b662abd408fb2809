use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeVariant;
use crate::sim::config::{Event, OpenConfiguration, OriginRule, SimConfig};
use crate::sim::events::{event_with, Scratch};
use crate::sim::geometry::BallGeometry;
use crate::sim::rng;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Largest generation for [`mc_open_path_count`].
pub const MC_PATH_MAX_K: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingEstimate {
    pub config: SimConfig,
    pub event: Event,
    pub hits: u64,
    pub phat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl CrossingEstimate {
    fn from_hits(config: SimConfig, event: Event, hits: u64) -> Self {
        let phat = hits as f64 / config.trials as f64;
        let (lo, hi) = wilson_interval(hits, config.trials);
        CrossingEstimate {
            config,
            event,
            hits,
            phat,
            ci_low: lo.min(phat),
            ci_high: hi.max(phat),
        }
    }
}

/// 95% Wilson score interval for `hits` successes in `trials`.
pub fn wilson_interval(hits: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let phat = hits as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if hits == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if hits == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Run `f` on a pool capped at `threads` workers, or on the global pool.
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn check_event_radius(k: u64, event: Event) -> Result<()> {
    if event == Event::TwoArm && k == 0 {
        return Err(Error::InvalidConfig(
            "the two-arm event needs k >= 1".into(),
        ));
    }
    Ok(())
}

pub fn estimate(config: &SimConfig, event: Event) -> Result<CrossingEstimate> {
    estimate_with_threads(config, event, None)
}

/// [`estimate`] with at most `threads` workers; the result does not depend
/// on the worker count.
pub fn estimate_with_threads(
    config: &SimConfig,
    event: Event,
    threads: Option<usize>,
) -> Result<CrossingEstimate> {
    config.validate()?;
    check_event_radius(config.k, event)?;
    let geometry = Arc::new(BallGeometry::new(config.k, config.variant)?);
    let hits = with_threads(threads, || count_hits(config, &geometry, event))?;
    Ok(CrossingEstimate::from_hits(*config, event, hits))
}

fn count_hits(config: &SimConfig, geometry: &Arc<BallGeometry>, event: Event) -> u64 {
    (0..config.trials)
        .into_par_iter()
        .map_init(
            || (Scratch::new(), Vec::new()),
            |(scratch, uniforms), t| {
                rng::trial_uniforms(config.seed, t, geometry.len(), uniforms);
                let cfg = OpenConfiguration::from_uniforms(
                    Arc::clone(geometry),
                    uniforms,
                    config.p,
                    config.origin_rule,
                );
                event_with(&cfg, event, scratch)
            },
        )
        .filter(|&hit| hit)
        .count() as u64
}

/// Shared inputs of a coupled sweep over a probability grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variant: LatticeVariant,
    pub k_list: Vec<u64>,
    pub p_grid: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub event: Event,
    pub origin_rule: OriginRule,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k_list.is_empty() {
            return Err(Error::EmptyInput("k list"));
        }
        if self.p_grid.is_empty() {
            return Err(Error::EmptyInput("p grid"));
        }
        if self
            .p_grid
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]).is_none_or(|o| o.is_gt()))
        {
            return Err(Error::UnsortedGrid);
        }
        for &k in &self.k_list {
            check_event_radius(k, self.event)?;
            for &p in &self.p_grid {
                SimConfig::new(self.variant, k, p, self.trials, self.seed).validate()?;
            }
        }
        Ok(())
    }

    fn config(&self, k: u64, p: f64) -> SimConfig {
        SimConfig::new(self.variant, k, p, self.trials, self.seed)
            .with_origin_rule(self.origin_rule)
    }
}

/// Event indicator of one trial at every grid point, from one set of uniforms.
fn trial_indicators(
    geometry: &Arc<BallGeometry>,
    spec: &SweepSpec,
    trial: u64,
    scratch: &mut Scratch,
    uniforms: &mut Vec<f64>,
) -> Vec<bool> {
    rng::trial_uniforms(spec.seed, trial, geometry.len(), uniforms);
    spec.p_grid
        .iter()
        .map(|&p| {
            let cfg = OpenConfiguration::from_uniforms(
                Arc::clone(geometry),
                uniforms,
                p,
                spec.origin_rule,
            );
            event_with(&cfg, spec.event, scratch)
        })
        .collect()
}

/// Per-trial indicators for one radius; row `t` is trial `t`.
pub fn sweep_indicators(spec: &SweepSpec, k: u64) -> Result<Vec<Vec<bool>>> {
    spec.validate()?;
    let geometry = Arc::new(BallGeometry::new(k, spec.variant)?);
    Ok((0..spec.trials)
        .into_par_iter()
        .map_init(
            || (Scratch::new(), Vec::new()),
            |(scratch, u), t| trial_indicators(&geometry, spec, t, scratch, u),
        )
        .collect())
}

/// Estimates over `k_list x p_grid` (radius-major), with the uniforms of each
/// trial shared across the grid.
pub fn sweep(spec: &SweepSpec, threads: Option<usize>) -> Result<Vec<CrossingEstimate>> {
    spec.validate()?;
    let mut out = Vec::with_capacity(spec.k_list.len() * spec.p_grid.len());
    for &k in &spec.k_list {
        let geometry = Arc::new(BallGeometry::new(k, spec.variant)?);
        let width = spec.p_grid.len();
        let hits = with_threads(threads, || {
            (0..spec.trials)
                .into_par_iter()
                .map_init(
                    || (Scratch::new(), Vec::new()),
                    |(scratch, u), t| trial_indicators(&geometry, spec, t, scratch, u),
                )
                .fold(
                    || vec![0u64; width],
                    |mut acc, row| {
                        acc.iter_mut()
                            .zip(row)
                            .for_each(|(a, hit)| *a += u64::from(hit));
                        acc
                    },
                )
                .reduce(
                    || vec![0u64; width],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        a
                    },
                )
        })?;
        for (&p, h) in spec.p_grid.iter().zip(hits) {
            out.push(CrossingEstimate::from_hits(
                spec.config(k, p),
                spec.event,
                h,
            ));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectParams {
    pub variant: LatticeVariant,
    pub k: u64,
    pub trials: u64,
    pub seed: u64,
    pub target: f64,
    pub tol: f64,
    pub event: Event,
    pub origin_rule: OriginRule,
    pub lo: f64,
    pub hi: f64,
}

impl BisectParams {
    pub fn new(variant: LatticeVariant, k: u64, trials: u64, seed: u64) -> Self {
        BisectParams {
            variant,
            k,
            trials,
            seed,
            target: 0.5,
            tol: 0.005,
            event: Event::TwoArm,
            origin_rule: OriginRule::default(),
            lo: 0.0,
            hi: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectOutcome {
    /// Midpoint of the final bracket; a finite-size proxy for the threshold.
    pub p: f64,
    pub lo: f64,
    pub hi: f64,
    /// Every estimate evaluated, endpoints first.
    pub trace: Vec<CrossingEstimate>,
}

/// Bisect `p` until the estimate brackets `target` within `tol`.
///
/// All evaluations share one seed, so the per-trial indicators are coupled
/// and the estimates are nondecreasing in `p`.
pub fn pc_bisect(params: &BisectParams, threads: Option<usize>) -> Result<BisectOutcome> {
    if params.tol.is_nan() || params.tol <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "tolerance must be positive, got {}",
            params.tol
        )));
    }
    if !(0.0..=1.0).contains(&params.target) {
        return Err(Error::InvalidProbability(params.target, "[0, 1]"));
    }
    if params.lo.partial_cmp(&params.hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::InvalidConfig(format!(
            "empty interval [{}, {}]",
            params.lo, params.hi
        )));
    }
    check_event_radius(params.k, params.event)?;
    let base = SimConfig::new(
        params.variant,
        params.k,
        params.lo,
        params.trials,
        params.seed,
    )
    .with_origin_rule(params.origin_rule);
    base.validate()?;
    base.with_p(params.hi).validate()?;
    let geometry = Arc::new(BallGeometry::new(params.k, params.variant)?);

    let mut trace = Vec::new();
    let mut eval = |p: f64| -> Result<f64> {
        let config = base.with_p(p);
        let hits = with_threads(threads, || count_hits(&config, &geometry, params.event))?;
        let est = CrossingEstimate::from_hits(config, params.event, hits);
        trace.push(est);
        Ok(est.phat)
    };

    let (mut lo, mut hi) = (params.lo, params.hi);
    let phat_lo = eval(lo)?;
    let phat_hi = eval(hi)?;
    if !(phat_lo <= params.target && params.target <= phat_hi) {
        return Err(Error::NotBracketing {
            lo,
            hi,
            target: params.target,
            phat_lo,
            phat_hi,
        });
    }
    while hi - lo > params.tol {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? < params.target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(BisectOutcome {
        p: 0.5 * (lo + hi),
        lo,
        hi,
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathCountEstimate {
    pub k: u64,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    pub std_err: f64,
}

/// Number of fully open up-step paths of length `k` from the (open) origin
/// on the triangular lattice.
fn open_up_paths(cfg: &OpenConfiguration, k: u64) -> u64 {
    let g = cfg.geometry();
    let steps = LatticeVariant::TriUp
        .up_steps()
        .expect("tri-up has up-steps");
    let mut layer = vec![0u64; g.len()];
    layer[g.origin_index()] = 1;
    for _ in 0..k {
        let mut next = vec![0u64; g.len()];
        for (i, &n) in layer.iter().enumerate().filter(|(_, &n)| n > 0) {
            let v = g.vertex(i);
            for &s in steps {
                let j = g
                    .index_of(v + s)
                    .expect("up-steps of length k stay in the ball");
                if cfg.is_open_index(j) {
                    next[j] += n;
                }
            }
        }
        layer = next;
    }
    layer.iter().sum()
}

/// Monte Carlo mean of the open up-step path count; unbiased for
/// `3^k * p^k`.
pub fn mc_open_path_count(k: u64, p: f64, trials: u64, seed: u64) -> Result<PathCountEstimate> {
    if !(1..=MC_PATH_MAX_K).contains(&k) {
        return Err(Error::InvalidConfig(format!(
            "path-count estimator needs 1 <= k <= {MC_PATH_MAX_K}, got {k}"
        )));
    }
    let config = SimConfig::new(LatticeVariant::TriUp, k, p, trials, seed);
    config.validate()?;
    let geometry = Arc::new(BallGeometry::new(k, LatticeVariant::TriUp)?);
    let values: Vec<u64> = (0..trials)
        .into_par_iter()
        .map_init(Vec::new, |u, t| {
            rng::trial_uniforms(seed, t, geometry.len(), u);
            let cfg = OpenConfiguration::from_uniforms(
                Arc::clone(&geometry),
                u,
                p,
                OriginRule::ConditionedOpen,
            );
            open_up_paths(&cfg, k)
        })
        .collect();
    let n = trials as f64;
    let mean = values.iter().map(|&x| x as f64).sum::<f64>() / n;
    let var = if trials > 1 {
        values
            .iter()
            .map(|&x| (x as f64 - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    Ok(PathCountEstimate {
        k,
        p,
        trials,
        seed,
        mean,
        std_err: (var / n).sqrt(),
    })
}
