//! Embedded invariant suite.
//!
//! Each family is a fast, self-contained check. The closed-form path counter
//! is injectable so that fault-injection tests can confirm the suite notices
//! a corrupted counter.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::bound::{bound_at, log_binomial, LIMIT};
use crate::count::{self, ln_big, pascal_next, verify_row_with};
use crate::error::Result;
use crate::lattice::{LatticeVariant, Vertex};
use crate::sim::{
    self, connectivity_oracle, mc_open_path_count, sample_configuration, sweep_indicators,
    union_find_connected, BallGeometry, Event, OriginRule, SimConfig, SweepSpec,
};

#[derive(Debug, Clone, Serialize)]
pub struct InvariantResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub results: Vec<InvariantResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantResult> {
        self.results.iter().filter(|r| !r.passed)
    }
}

type Counter<'a> = &'a dyn Fn(u64, u64) -> Result<BigUint>;
type Check = fn(Counter<'_>) -> Result<String, String>;

pub fn run_suite() -> SuiteReport {
    run_suite_with(&count::path_count)
}

pub fn run_suite_with(counter: Counter<'_>) -> SuiteReport {
    let checks: [(&'static str, Check); 8] = [
        ("oracle-equivalence", oracle_equivalence),
        ("binomial-theorem-totals", binomial_totals),
        ("pascal-recurrence", pascal_recurrence),
        ("log-binomial-accuracy", |_| log_accuracy()),
        ("bound-convergence", |_| bound_convergence()),
        ("union-find-vs-search", |_| union_find_vs_search()),
        ("coupling-monotonicity", |_| coupling_monotonicity()),
        ("path-estimator-exactness", |_| estimator_exactness()),
    ];
    let results = checks
        .iter()
        .map(|(name, check)| match check(counter) {
            Ok(detail) => InvariantResult {
                name,
                passed: true,
                detail,
            },
            Err(detail) => InvariantResult {
                name,
                passed: false,
                detail,
            },
        })
        .collect();
    SuiteReport { results }
}

fn oracle_equivalence(counter: Counter<'_>) -> Result<String, String> {
    for k in 1..=10 {
        match verify_row_with(k, counter) {
            Ok(true) => {}
            Ok(false) => return Err(format!("brute force disagrees with closed form at k = {k}")),
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok("k = 1..=10 match".into())
}

fn binomial_totals(counter: Counter<'_>) -> Result<String, String> {
    let three = BigUint::from(3u32);
    let mut power = BigUint::one();
    for k in 1..=200u64 {
        power *= &three;
        let total: BigUint = (0..=k)
            .map(|i| counter(k, i))
            .sum::<Result<BigUint>>()
            .map_err(|e| e.to_string())?;
        if total != power {
            return Err(format!("row total at k = {k} is not 3^k"));
        }
    }
    Ok("sum_i counts = 3^k for k <= 200".into())
}

fn pascal_recurrence(counter: Counter<'_>) -> Result<String, String> {
    let mut row = vec![BigUint::one()];
    for k in 1..=100u64 {
        row = pascal_next(&row).map_err(|e| e.to_string())?;
        for i in 0..=k {
            let got = counter(k, i).map_err(|e| e.to_string())?;
            if got != &row[i as usize] << (k - i) {
                return Err(format!("count({k},{i}) differs from Pascal row"));
            }
        }
    }
    Ok("counts = c_i * 2^(k-i) for k <= 100".into())
}

fn log_accuracy() -> Result<String, String> {
    let mut worst = 0.0f64;
    for k in [50u64, 100, 200] {
        for i in 0..=k {
            let exact = ln_big(&count::binomial(k, i).map_err(|e| e.to_string())?);
            let got = log_binomial(k, i).map_err(|e| e.to_string())?;
            let err = if exact == 0.0 {
                got.abs()
            } else {
                ((got - exact) / exact).abs()
            };
            worst = worst.max(err);
        }
    }
    if worst <= 1e-12 {
        Ok(format!("max relative error {worst:.3e}"))
    } else {
        Err(format!("max relative error {worst:.3e} exceeds 1e-12"))
    }
}

fn bound_convergence() -> Result<String, String> {
    let ks = [3u64, 5, 11, 101, 1001, 10_001, 100_001];
    let mut prev = f64::INFINITY;
    for k in ks {
        let b = bound_at(k).map_err(|e| e.to_string())?.b_k;
        if !(b < prev && b > LIMIT) {
            return Err(format!(
                "b_{k} = {b} breaks the decreasing approach to 2^(-3/2)"
            ));
        }
        prev = b;
    }
    if (prev - LIMIT).abs() > 1e-3 {
        return Err(format!("b_100001 = {prev} not within 1e-3 of the limit"));
    }
    Ok(format!("b_100001 = {prev:.9}"))
}

fn union_find_vs_search() -> Result<String, String> {
    let mut pairs = 0usize;
    for variant in LatticeVariant::ALL {
        let geometry =
            std::sync::Arc::new(BallGeometry::new(8, variant).map_err(|e| e.to_string())?);
        let config = SimConfig::new(variant, 8, 0.55, 50, 0xC0FFEE);
        for t in 0..config.trials {
            let cfg = sample_configuration(&config, &geometry, t).map_err(|e| e.to_string())?;
            for &b in geometry.boundary() {
                let target = geometry.vertex(b as usize);
                let uf = union_find_connected(&cfg, Vertex::ORIGIN, target)
                    .map_err(|e| e.to_string())?;
                let bfs =
                    connectivity_oracle(&cfg, Vertex::ORIGIN, target).map_err(|e| e.to_string())?;
                if uf != bfs {
                    return Err(format!("{variant} trial {t}: verdicts differ at {target}"));
                }
                pairs += 1;
            }
            if sim::two_arm(&cfg) && !sim::one_arm(&cfg) {
                return Err(format!("{variant} trial {t}: two-arm without one-arm"));
            }
        }
    }
    Ok(format!("{pairs} pairs agree"))
}

fn coupling_monotonicity() -> Result<String, String> {
    let spec = SweepSpec {
        variant: LatticeVariant::TriUp,
        k_list: vec![12],
        p_grid: (0..=16).map(|j| j as f64 / 16.0).collect(),
        trials: 50,
        seed: 17,
        event: Event::TwoArm,
        origin_rule: OriginRule::ConditionedOpen,
    };
    let rows = sweep_indicators(&spec, 12).map_err(|e| e.to_string())?;
    for (t, row) in rows.iter().enumerate() {
        if row.windows(2).any(|w| w[0] && !w[1]) {
            return Err(format!("trial {t}: indicator drops along the p grid"));
        }
    }
    Ok(format!("{} trials nondecreasing", rows.len()))
}

fn estimator_exactness() -> Result<String, String> {
    for k in 1..=sim::MC_PATH_MAX_K {
        let e = mc_open_path_count(k, 1.0, 3, 1).map_err(|e| e.to_string())?;
        if e.mean != 3f64.powi(k as i32) {
            return Err(format!("mean {} at p = 1, k = {k} is not 3^k", e.mean));
        }
    }
    Ok("p = 1 gives exactly 3^k".into())
}
