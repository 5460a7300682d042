//! Charging-request generation.
//!
//! Trips arrive as a piecewise-constant Poisson process per origin-destination
//! pair. Each trip gets uniform trip ends inside its zones and independent
//! truncated-normal draws for initial state of charge and recharge threshold.

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal as NormalCdf};

use crate::domain::{manhattan_distance, MobilityParams, Point, Rect, Zone};
use crate::error::{Error, Result};

/// Trip rate between two zones over one time-of-day period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdPeriodRate {
    /// Minutes since midnight, inclusive.
    pub period_start: f64,
    /// Minutes since midnight, exclusive.
    pub period_end: f64,
    pub origin: String,
    pub dest: String,
    /// Trips per hour.
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemandParams {
    /// Scales every OD rate (market-penetration scenarios).
    pub penetration_multiplier: f64,
    pub soc_mean: f64,
    pub soc_sd: f64,
    pub threshold_mean: f64,
    pub threshold_sd: f64,
    /// Minutes since midnight.
    pub sim_start: f64,
    pub sim_end: f64,
}

impl Default for DemandParams {
    fn default() -> Self {
        DemandParams {
            penetration_multiplier: 1.0,
            soc_mean: 0.6,
            soc_sd: 0.2,
            threshold_mean: 0.5,
            threshold_sd: 0.1,
            sim_start: 360.0,
            sim_end: 1140.0,
        }
    }
}

/// One driver's trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvRequest {
    pub id: u32,
    /// Minutes since midnight.
    pub spawn_time: f64,
    pub origin: Point,
    pub dest: Point,
    pub soc: f64,
    pub threshold: f64,
    pub reroutes_left: u32,
}

/// Draws from N(mean, sd) conditioned on `[lo, hi]`.
///
/// Uses plain rejection while the interval holds a reasonable share of the
/// normal mass and inverse-CDF sampling otherwise.
pub fn sample_truncated_normal<R: Rng + ?Sized>(
    mean: f64,
    sd: f64,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> Result<f64> {
    // negated so NaN fails too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(lo < hi) || !(sd >= 0.0) || !mean.is_finite() {
        return Err(Error::InvalidBounds { lo, hi });
    }
    if sd == 0.0 {
        return Ok(mean.clamp(lo, hi));
    }
    let cdf = NormalCdf::new(mean, sd).expect("sd > 0");
    let (p_lo, p_hi) = (cdf.cdf(lo), cdf.cdf(hi));
    if p_hi - p_lo > 0.25 {
        let normal = Normal::new(mean, sd).expect("sd > 0");
        loop {
            let x = normal.sample(rng);
            if (lo..=hi).contains(&x) {
                return Ok(x);
            }
        }
    }
    let u: f64 = rng.random_range(p_lo..=p_hi);
    Ok(cdf.inverse_cdf(u).clamp(lo, hi))
}

fn uniform_in<R: Rng + ?Sized>(rect: &Rect, rng: &mut R) -> Point {
    let x = rect.xmin + rng.random::<f64>() * (rect.xmax - rect.xmin);
    let y = rect.ymin + rng.random::<f64>() * (rect.ymax - rect.ymin);
    Point::new(x, y)
}

/// Generates every trip of the simulation window, sorted by spawn time.
///
/// OD rows are processed in order; within a row arrivals are generated by
/// exponential gaps. Ties in spawn time keep generation order. Ids are
/// assigned after sorting.
pub fn generate_requests<R: Rng + ?Sized>(
    zones: &[Zone],
    od_rates: &[OdPeriodRate],
    params: &DemandParams,
    reroute_max: u32,
    rng: &mut R,
) -> Result<Vec<EvRequest>> {
    let zone = |id: &str, field: String| {
        zones
            .iter()
            .find(|z| z.id == id)
            .map(|z| z.rect)
            .ok_or_else(|| Error::config(field, format!("references unknown zone `{id}`")))
    };

    let mut out = Vec::new();
    for (k, od) in od_rates.iter().enumerate() {
        let origin = zone(&od.origin, format!("od_rates[{k}].origin"))?;
        let dest = zone(&od.dest, format!("od_rates[{k}].dest"))?;
        let per_minute = od.rate * params.penetration_multiplier / 60.0;
        let start = od.period_start.max(params.sim_start);
        let end = od.period_end.min(params.sim_end);
        if per_minute <= 0.0 || start >= end {
            continue;
        }
        let gaps = Exp::new(per_minute).expect("positive rate");
        let mut t = start;
        loop {
            t += gaps.sample(rng);
            if t >= end {
                break;
            }
            let o = uniform_in(&origin, rng);
            let d = uniform_in(&dest, rng);
            let soc = sample_truncated_normal(params.soc_mean, params.soc_sd, 0.0, 1.0, rng)?;
            let threshold =
                sample_truncated_normal(params.threshold_mean, params.threshold_sd, 0.0, 1.0, rng)?;
            out.push(EvRequest {
                id: 0,
                spawn_time: t,
                origin: o,
                dest: d,
                soc,
                threshold,
                reroutes_left: reroute_max,
            });
        }
    }
    out.sort_by(|a, b| a.spawn_time.total_cmp(&b.spawn_time));
    for (i, r) in out.iter_mut().enumerate() {
        r.id = i as u32;
    }
    Ok(out)
}

/// True when the trip would end below the driver's recharge threshold.
pub fn needs_fast_charge(req: &EvRequest, params: &MobilityParams) -> bool {
    let trip = manhattan_distance(req.origin, req.dest);
    req.soc - params.soc_used(trip) < req.threshold
}
