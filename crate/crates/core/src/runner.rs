//! Replications, demand sweeps, and queue validation.
//!
//! Replications and sweep points are independent and run on the rayon pool;
//! results come back in input order, so outputs do not depend on scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::engine::{charging_requests, mean_service_minutes, run, simulate_mmc, RunOutput};
use crate::error::Result;
use crate::metrics::{demand_supply_ratio, relative_lost_pct};
use crate::oracle::{mmc_metrics, MmcParams};
use crate::pricing::{PricingScheme, SchemeKind};
use crate::rng::replication_seed;

/// Seeds of `count` replications under `seed`. The first is `seed` itself.
pub fn replication_seeds(seed: u64, count: u32) -> Vec<u64> {
    (0..count)
        .map(|k| {
            if k == 0 {
                seed
            } else {
                replication_seed(seed, k)
            }
        })
        .collect()
}

pub fn run_seeds(config: &ScenarioConfig, seeds: &[u64]) -> Result<Vec<RunOutput>> {
    seeds.par_iter().map(|&s| run(config, s)).collect()
}

/// Runs `config.replications` replications from `config.seed`.
pub fn run_replications(config: &ScenarioConfig) -> Result<Vec<RunOutput>> {
    run_seeds(config, &replication_seeds(config.seed, config.replications))
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepPoints {
    Multipliers(Vec<f64>),
    /// Target demand:supply ratios; multipliers are solved from the
    /// replication-mean ratio at multiplier 1.
    Ratios(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub multiplier: f64,
    pub target_ratio: Option<f64>,
    pub replications: u32,
    pub demand_supply_ratio: f64,
    pub total_requests: f64,
    pub lost: f64,
    pub lost_pct: f64,
    pub lost_pct_sd: f64,
    /// Lost under the baseline (no-adjustment) scheme.
    pub lost_no_adjustment: f64,
    pub relative_lost_pct: f64,
    pub avg_wait: f64,
    pub total_revenue: f64,
    pub social_welfare: f64,
}

/// Demand:supply ratio of `config`, averaged over the given seeds.
pub fn mean_ratio(config: &ScenarioConfig, seeds: &[u64]) -> Result<f64> {
    let ratios: Vec<f64> = seeds
        .par_iter()
        .map(|&s| {
            let reqs = charging_requests(config, s)?;
            Ok(demand_supply_ratio(
                reqs.len(),
                mean_service_minutes(&reqs, config),
                config.total_chargers(),
                config.window_min(),
            ))
        })
        .collect::<Result<_>>()?;
    Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
}

fn mean(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let xs: Vec<f64> = xs.collect();
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() < 2 {
        0.0
    } else {
        (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    (m, sd)
}

/// Runs the scenario at every sweep point with `config.replications` seeds.
///
/// `relative_lost_pct` compares the configured scheme against no adjustment
/// on the same seeds, hence the same demand.
pub fn sweep(config: &ScenarioConfig, points: &SweepPoints) -> Result<Vec<SweepRow>> {
    let seeds = replication_seeds(config.seed, config.replications);
    let targets: Vec<(f64, Option<f64>)> = match points {
        SweepPoints::Multipliers(ms) => ms.iter().map(|&m| (m, None)).collect(),
        SweepPoints::Ratios(rs) => {
            let mut unit = config.clone();
            unit.demand.penetration_multiplier = 1.0;
            let base = mean_ratio(&unit, &seeds)?;
            rs.iter().map(|&r| (r / base, Some(r))).collect()
        }
    };
    let adjusting = config.pricing.kind != SchemeKind::None;

    let variants: &[bool] = if adjusting { &[false, true] } else { &[false] };
    let mut jobs: Vec<(usize, bool, u64)> = Vec::new();
    for p in 0..targets.len() {
        for &b in variants {
            jobs.extend(seeds.iter().map(|&s| (p, b, s)));
        }
    }
    let results: Vec<(usize, bool, crate::metrics::RunSummary)> = jobs
        .par_iter()
        .map(|&(p, baseline, seed)| {
            let mut c = config.clone();
            c.demand.penetration_multiplier = targets[p].0;
            if baseline {
                c.pricing = PricingScheme::none();
            }
            run(&c, seed).map(|o| (p, baseline, o.summary))
        })
        .collect::<Result<_>>()?;

    Ok(targets
        .iter()
        .enumerate()
        .map(|(p, &(multiplier, target_ratio))| {
            let runs: Vec<_> = results
                .iter()
                .filter(|r| r.0 == p && !r.1)
                .map(|r| &r.2)
                .collect();
            let base: Vec<_> = if adjusting {
                results
                    .iter()
                    .filter(|r| r.0 == p && r.1)
                    .map(|r| &r.2)
                    .collect()
            } else {
                runs.clone()
            };
            let (total, _) = mean(runs.iter().map(|r| r.total_requests as f64));
            let (lost, _) = mean(runs.iter().map(|r| r.lost as f64));
            let (lost_no, _) = mean(base.iter().map(|r| r.lost as f64));
            let (lost_pct, lost_pct_sd) = mean(runs.iter().map(|r| r.lost_pct()));
            let rel = runs
                .iter()
                .zip(&base)
                .filter(|(r, _)| r.total_requests > 0)
                .map(|(r, b)| relative_lost_pct(r.lost, b.lost, r.total_requests));
            SweepRow {
                multiplier,
                target_ratio,
                replications: runs.len() as u32,
                demand_supply_ratio: mean(runs.iter().map(|r| r.demand_supply_ratio)).0,
                total_requests: total,
                lost,
                lost_pct,
                lost_pct_sd,
                lost_no_adjustment: lost_no,
                relative_lost_pct: {
                    let v: Vec<f64> = rel.collect();
                    if v.is_empty() {
                        0.0
                    } else {
                        v.iter().sum::<f64>() / v.len() as f64
                    }
                },
                avg_wait: mean(runs.iter().map(|r| r.avg_wait)).0,
                total_revenue: mean(runs.iter().map(|r| r.total_revenue)).0,
                social_welfare: mean(runs.iter().map(|r| r.social_welfare)).0,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRow {
    pub metric: String,
    pub simulated: f64,
    pub analytic: f64,
    pub relative_error: f64,
}

/// Single-station M/M/c simulation against the Erlang C formulas.
pub fn validate(params: &MmcParams, arrivals: u64, seed: u64) -> Result<Vec<ValidationRow>> {
    let exact = mmc_metrics(params)?;
    let sim = simulate_mmc(params, arrivals, seed);
    let row = |metric: &str, simulated: f64, analytic: f64| ValidationRow {
        metric: metric.to_string(),
        simulated,
        analytic,
        relative_error: (simulated - analytic).abs() / analytic,
    };
    Ok(vec![
        row("p_wait", sim.p_wait, exact.p_wait),
        row("lq", sim.lq, exact.lq),
        row("wq", sim.wq, exact.wq),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::GridDemo;

    #[test]
    fn first_replication_uses_master_seed() {
        let s = replication_seeds(9, 3);
        assert_eq!(s[0], 9);
        assert_eq!(s.len(), 3);
        assert_ne!(s[1], s[2]);
    }

    #[test]
    fn sweep_ratio_increases_with_multiplier() {
        let mut cfg = GridDemo::default().build();
        cfg.replications = 2;
        let rows = sweep(&cfg, &SweepPoints::Multipliers(vec![0.25, 0.5, 1.0])).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows
            .windows(2)
            .all(|w| w[0].demand_supply_ratio < w[1].demand_supply_ratio));
        assert!(rows.iter().all(|r| r.relative_lost_pct == 0.0));
    }

    #[test]
    fn ratio_targets_are_hit_on_average() {
        let mut cfg = GridDemo::default().build();
        cfg.replications = 4;
        let rows = sweep(&cfg, &SweepPoints::Ratios(vec![0.2, 0.6])).unwrap();
        for r in &rows {
            let t = r.target_ratio.unwrap();
            assert!((r.demand_supply_ratio - t).abs() < 0.15 * t, "{r:?}");
        }
    }

    #[test]
    fn adjusting_sweep_reports_baseline_losses() {
        let mut cfg = GridDemo::congested().build();
        cfg.pricing = PricingScheme::step(SchemeKind::Quadratic);
        cfg.replications = 2;
        let rows = sweep(&cfg, &SweepPoints::Multipliers(vec![1.0])).unwrap();
        let r = &rows[0];
        let expect = (r.lost - r.lost_no_adjustment) / r.total_requests * 100.0;
        assert!((r.relative_lost_pct - expect).abs() < 1.0, "{r:?}");
    }

    #[test]
    fn validation_rows() {
        let rows = validate(&MmcParams::new(0.5, 1.0, 1), 100_000, 2).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.relative_error < 0.1), "{rows:?}");
        assert!(validate(&MmcParams::new(3.0, 1.0, 2), 10, 1).is_err());
    }
}
