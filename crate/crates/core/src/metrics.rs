//! Run-level evaluation: waits, revenue, monetized utility, welfare, and the
//! lost-customer breakdown.
//!
//! Monetization divides utilities by `|beta_price|`, turning utils into
//! dollars. Payments enter both revenue and customer utility with opposite
//! signs, so social welfare only depends on detours, waits, and losses.

use serde::{Deserialize, Serialize};

use crate::choice::ChoiceParams;
use crate::domain::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Served,
    Lost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LostReason {
    EmptyChoiceSet,
    BalkedAtSpawn,
    BalkedAtArrival,
}

impl LostReason {
    pub fn name(self) -> &'static str {
        match self {
            LostReason::EmptyChoiceSet => "empty_choice_set",
            LostReason::BalkedAtSpawn => "balked_at_spawn",
            LostReason::BalkedAtArrival => "balked_at_arrival",
        }
    }
}

/// Final state of one customer that entered the charging system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CustomerOutcome {
    pub customer: u32,
    pub spawn_time: f64,
    pub origin: Point,
    pub dest: Point,
    pub status: Status,
    pub lost_reason: Option<LostReason>,
    pub choice_set_size: usize,
    /// Station index where the customer charged.
    pub station: Option<usize>,
    /// Sum of the incremental detours actually driven, miles.
    pub detour_total: f64,
    /// Minutes from arrival at the charging station to service start.
    pub wait: f64,
    /// Wait plus charging minutes.
    pub total_time: f64,
    /// Dollars.
    pub payment: f64,
    pub reroutes: u32,
}

impl CustomerOutcome {
    pub fn is_served(&self) -> bool {
        self.status == Status::Served
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsParams {
    /// Bin width of station arrival-rate series, minutes.
    pub arrival_bin_min: f64,
    /// Value a lost customer at the rounded -$18.5 instead of the exact ratio.
    pub round_lost_value: bool,
    /// Windows `[start, end)` averaged by `peak_avg_queue`, minutes since midnight.
    pub peak_windows: Vec<[f64; 2]>,
}

impl Default for MetricsParams {
    fn default() -> Self {
        MetricsParams {
            arrival_bin_min: 10.0,
            round_lost_value: false,
            peak_windows: vec![[360.0, 600.0], [900.0, 1140.0]],
        }
    }
}

/// Offered charger-minutes over available charger-minutes.
pub fn demand_supply_ratio(
    n_requests: usize,
    mean_service_min: f64,
    total_chargers: u32,
    window_min: f64,
) -> f64 {
    n_requests as f64 * mean_service_min / (total_chargers as f64 * window_min)
}

/// Extra customers lost under an adjustment scheme, as a percentage of all customers.
pub fn relative_lost_pct(lost_adj: u64, lost_no_adj: u64, total: u64) -> f64 {
    (lost_adj as f64 - lost_no_adj as f64) / total as f64 * 100.0
}

fn served_mean(outcomes: &[CustomerOutcome], f: impl Fn(&CustomerOutcome) -> f64) -> f64 {
    let (sum, n) = outcomes
        .iter()
        .filter(|o| o.is_served())
        .fold((0.0, 0usize), |(s, n), o| (s + f(o), n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Mean wait of served customers; 0 when nobody was served.
pub fn avg_wait(outcomes: &[CustomerOutcome]) -> f64 {
    served_mean(outcomes, |o| o.wait)
}

/// Mean wait plus charging time of served customers; 0 when nobody was served.
pub fn avg_total_time(outcomes: &[CustomerOutcome]) -> f64 {
    served_mean(outcomes, |o| o.total_time)
}

/// Dollar value of losing a customer (negative).
pub fn lost_customer_value(params: &ChoiceParams, rounded: bool) -> f64 {
    if rounded {
        -18.5
    } else {
        params.no_charge_utility / params.beta_price.abs()
    }
}

pub fn monetized_utility(outcome: &CustomerOutcome, params: &ChoiceParams, rounded: bool) -> f64 {
    match outcome.status {
        Status::Served => -(outcome.payment + non_price_cost(outcome, params)),
        Status::Lost => lost_customer_value(params, rounded),
    }
}

/// Detour and wait disutility of a served customer, in dollars (positive).
fn non_price_cost(outcome: &CustomerOutcome, params: &ChoiceParams) -> f64 {
    params.beta_detour / params.beta_price * outcome.detour_total
        + params.beta_wait / params.beta_price * outcome.wait
}

/// Revenue plus total monetized customer utility.
pub fn social_welfare(total_revenue: f64, monetized_total: f64) -> f64 {
    total_revenue + monetized_total
}

/// Welfare written without payments: they cancel against revenue.
pub fn payment_free_welfare(
    outcomes: &[CustomerOutcome],
    params: &ChoiceParams,
    rounded: bool,
) -> f64 {
    let lost_value = lost_customer_value(params, rounded);
    outcomes
        .iter()
        .map(|o| match o.status {
            Status::Served => -non_price_cost(o, params),
            Status::Lost => lost_value,
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LostBucket {
    /// `"1"`, `"2"` or `">=3"`.
    pub choices: String,
    pub total: u64,
    pub lost: u64,
    pub percent: f64,
}

/// Losses by the size of the choice set at trip start.
///
/// Customers without any feasible station land in the `"1"` bucket; their
/// count is also returned on its own.
pub fn lost_breakdown(outcomes: &[CustomerOutcome]) -> (Vec<LostBucket>, u64) {
    let mut totals = [0u64; 3];
    let mut lost = [0u64; 3];
    let mut empty = 0;
    for o in outcomes {
        let b = o.choice_set_size.clamp(1, 3) - 1;
        totals[b] += 1;
        if !o.is_served() {
            lost[b] += 1;
        }
        if o.choice_set_size == 0 {
            empty += 1;
        }
    }
    let buckets = ["1", "2", ">=3"]
        .iter()
        .enumerate()
        .map(|(b, name)| LostBucket {
            choices: name.to_string(),
            total: totals[b],
            lost: lost[b],
            percent: if totals[b] == 0 {
                0.0
            } else {
                lost[b] as f64 / totals[b] as f64 * 100.0
            },
        })
        .collect();
    (buckets, empty)
}

/// Minute-resolution history of one station over the simulation window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationTimeSeries {
    pub station: String,
    /// Minute of the first sample.
    pub start_minute: f64,
    pub queue_len: Vec<u32>,
    /// Dollars per hour.
    pub price: Vec<f64>,
    pub cum_arrivals: Vec<u64>,
    pub bin_minutes: f64,
    /// Admissions per bin, starting at `start_minute`; the last bin may
    /// extend past the window to hold late arrivals.
    pub arrival_counts: Vec<u64>,
}

/// Counts of `times` in consecutive bins of `bin` minutes from `start`.
/// Times before `start` fall in the first bin.
pub fn arrival_rate_series(times: &[f64], start: f64, bin: f64, min_bins: usize) -> Vec<u64> {
    let idx = |t: f64| (((t - start) / bin).floor().max(0.0)) as usize;
    let n = times
        .iter()
        .map(|&t| idx(t) + 1)
        .max()
        .unwrap_or(0)
        .max(min_bins);
    let mut counts = vec![0u64; n];
    for &t in times {
        counts[idx(t)] += 1;
    }
    counts
}

/// Queue length averaged over stations and over the minutes in `windows`.
pub fn peak_avg_queue(series: &[StationTimeSeries], windows: &[[f64; 2]]) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for s in series {
        for (k, q) in s.queue_len.iter().enumerate() {
            let minute = s.start_minute + k as f64;
            if windows.iter().any(|w| minute >= w[0] && minute < w[1]) {
                sum += *q as f64;
                n += 1;
            }
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub total_requests: u64,
    pub served: u64,
    pub lost: u64,
    pub lost_empty_choice_set: u64,
    pub lost_balked_at_spawn: u64,
    pub lost_balked_at_arrival: u64,
    pub lost_by_choice_set_size: Vec<LostBucket>,
    pub reroutes: u64,
    /// Set when nobody was served and the averages below default to 0.
    pub no_served: bool,
    pub avg_wait: f64,
    pub avg_total_time: f64,
    pub total_revenue: f64,
    pub monetized_disutility_served_avg: f64,
    pub monetized_disutility_all_avg: f64,
    pub monetized_total_disutility: f64,
    pub social_welfare: f64,
    pub social_welfare_payment_free: f64,
    pub mean_service_min: f64,
    pub demand_supply_ratio: f64,
    pub peak_avg_queue: f64,
}

/// Inputs of [`summarize`] that come from the run rather than the outcomes.
#[derive(Debug, Clone, Copy)]
pub struct RunTotals {
    pub seed: u64,
    pub total_revenue: f64,
    pub mean_service_min: f64,
    pub total_chargers: u32,
    pub window_min: f64,
}

pub fn summarize(
    outcomes: &[CustomerOutcome],
    series: &[StationTimeSeries],
    totals: RunTotals,
    choice: &ChoiceParams,
    params: &MetricsParams,
) -> RunSummary {
    let rounded = params.round_lost_value;
    let served = outcomes.iter().filter(|o| o.is_served()).count() as u64;
    let total = outcomes.len() as u64;
    let lost_by =
        |r: LostReason| outcomes.iter().filter(|o| o.lost_reason == Some(r)).count() as u64;

    let utils: Vec<f64> = outcomes
        .iter()
        .map(|o| monetized_utility(o, choice, rounded))
        .collect();
    let monetized_total: f64 = utils.iter().sum();
    let served_util: f64 = outcomes
        .iter()
        .zip(&utils)
        .filter(|(o, _)| o.is_served())
        .map(|(_, u)| u)
        .sum();
    let (buckets, _) = lost_breakdown(outcomes);

    RunSummary {
        seed: totals.seed,
        total_requests: total,
        served,
        lost: total - served,
        lost_empty_choice_set: lost_by(LostReason::EmptyChoiceSet),
        lost_balked_at_spawn: lost_by(LostReason::BalkedAtSpawn),
        lost_balked_at_arrival: lost_by(LostReason::BalkedAtArrival),
        lost_by_choice_set_size: buckets,
        reroutes: outcomes.iter().map(|o| o.reroutes as u64).sum(),
        no_served: served == 0,
        avg_wait: avg_wait(outcomes),
        avg_total_time: avg_total_time(outcomes),
        total_revenue: totals.total_revenue,
        monetized_disutility_served_avg: if served == 0 {
            0.0
        } else {
            served_util / served as f64
        },
        monetized_disutility_all_avg: if total == 0 {
            0.0
        } else {
            monetized_total / total as f64
        },
        monetized_total_disutility: monetized_total,
        social_welfare: social_welfare(totals.total_revenue, monetized_total),
        social_welfare_payment_free: payment_free_welfare(outcomes, choice, rounded),
        mean_service_min: totals.mean_service_min,
        demand_supply_ratio: demand_supply_ratio(
            outcomes.len(),
            totals.mean_service_min,
            totals.total_chargers,
            totals.window_min,
        ),
        peak_avg_queue: peak_avg_queue(series, &params.peak_windows),
    }
}

impl RunSummary {
    pub fn lost_pct(&self) -> f64 {
        if self.total_requests == 0 {
            0.0
        } else {
            self.lost as f64 / self.total_requests as f64 * 100.0
        }
    }

    /// Scalar metrics, in a fixed order, for aggregation across replications.
    pub fn scalars(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("total_requests", self.total_requests as f64),
            ("served", self.served as f64),
            ("lost", self.lost as f64),
            ("lost_pct", self.lost_pct()),
            ("lost_empty_choice_set", self.lost_empty_choice_set as f64),
            ("lost_balked_at_spawn", self.lost_balked_at_spawn as f64),
            ("lost_balked_at_arrival", self.lost_balked_at_arrival as f64),
            ("reroutes", self.reroutes as f64),
            ("avg_wait", self.avg_wait),
            ("avg_total_time", self.avg_total_time),
            ("total_revenue", self.total_revenue),
            (
                "monetized_disutility_served_avg",
                self.monetized_disutility_served_avg,
            ),
            (
                "monetized_disutility_all_avg",
                self.monetized_disutility_all_avg,
            ),
            (
                "monetized_total_disutility",
                self.monetized_total_disutility,
            ),
            ("social_welfare", self.social_welfare),
            ("mean_service_min", self.mean_service_min),
            ("demand_supply_ratio", self.demand_supply_ratio),
            ("peak_avg_queue", self.peak_avg_queue),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricStat {
    pub metric: String,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single replication.
    pub sd: f64,
}

pub fn aggregate(runs: &[RunSummary]) -> Vec<MetricStat> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    let n = runs.len() as f64;
    first
        .scalars()
        .iter()
        .enumerate()
        .map(|(k, (name, _))| {
            let xs: Vec<f64> = runs.iter().map(|r| r.scalars()[k].1).collect();
            let mean = xs.iter().sum::<f64>() / n;
            let sd = if runs.len() < 2 {
                0.0
            } else {
                (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            };
            MetricStat {
                metric: name.to_string(),
                mean,
                sd,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn served(wait: f64, service: f64, detour: f64, payment: f64, set: usize) -> CustomerOutcome {
        CustomerOutcome {
            customer: 0,
            spawn_time: 0.0,
            origin: Point::new(0.0, 0.0),
            dest: Point::new(0.0, 0.0),
            status: Status::Served,
            lost_reason: None,
            choice_set_size: set,
            station: Some(0),
            detour_total: detour,
            wait,
            total_time: wait + service,
            payment,
            reroutes: 0,
        }
    }

    fn lost(set: usize) -> CustomerOutcome {
        CustomerOutcome {
            status: Status::Lost,
            lost_reason: Some(if set == 0 {
                LostReason::EmptyChoiceSet
            } else {
                LostReason::BalkedAtSpawn
            }),
            station: None,
            total_time: 0.0,
            ..served(0.0, 0.0, 0.0, 0.0, set)
        }
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(demand_supply_ratio(0, 30.0, 10, 600.0), 0.0);
        assert!((demand_supply_ratio(100, 30.0, 10, 600.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn relative_lost_examples() {
        assert_eq!(relative_lost_pct(100, 100, 1000), 0.0);
        assert!((relative_lost_pct(120, 100, 1000) - 2.0).abs() < 1e-12);
        assert!(relative_lost_pct(90, 100, 1000) < 0.0);
    }

    #[test]
    fn averages() {
        let zero = vec![served(0.0, 30.0, 0.0, 0.0, 1); 3];
        assert_eq!(avg_wait(&zero), 0.0);
        let outs = vec![
            served(0.0, 30.0, 0.0, 0.0, 1),
            served(10.0, 30.0, 0.0, 0.0, 1),
            served(20.0, 30.0, 0.0, 0.0, 1),
            lost(1),
        ];
        assert!((avg_wait(&outs) - 10.0).abs() < 1e-12);
        assert!((avg_total_time(&outs) - 40.0).abs() < 1e-12);
        assert_eq!(avg_wait(&[lost(2)]), 0.0);
    }

    #[test]
    fn monetization() {
        let p = ChoiceParams::default();
        assert!((monetized_utility(&lost(1), &p, true) + 18.5).abs() < 1e-12);
        assert!((monetized_utility(&lost(1), &p, false) + 50.0 / 2.7).abs() < 1e-12);
        assert_eq!(
            monetized_utility(&served(0.0, 10.0, 0.0, 0.0, 1), &p, false),
            0.0
        );
        let u = monetized_utility(&served(5.0, 10.0, 3.0, 2.0, 1), &p, false);
        assert!((u + 7.407_407_407_407_407).abs() < 1e-9, "{u}");
    }

    #[test]
    fn welfare_literal_and_identity() {
        assert_eq!(social_welfare(6140.0, -43269.0), -37129.0);
        assert_eq!(social_welfare(0.0, 0.0), 0.0);
        let p = ChoiceParams::default();
        let outs = vec![
            served(5.0, 10.0, 3.0, 2.0, 1),
            served(1.0, 20.0, 0.5, 4.5, 2),
            lost(0),
        ];
        let revenue = 6.5;
        let total: f64 = outs.iter().map(|o| monetized_utility(o, &p, false)).sum();
        let two_ways =
            (social_welfare(revenue, total) - payment_free_welfare(&outs, &p, false)).abs();
        assert!(two_ways < 1e-9);
    }

    #[test]
    fn breakdown_buckets() {
        let none_lost = vec![served(0.0, 1.0, 0.0, 0.0, 1), served(0.0, 1.0, 0.0, 0.0, 4)];
        let (b, empty) = lost_breakdown(&none_lost);
        assert!(b.iter().all(|x| x.percent == 0.0));
        assert_eq!(empty, 0);

        let all_lost = vec![lost(0), lost(1), lost(2), lost(3), lost(7)];
        let (b, empty) = lost_breakdown(&all_lost);
        assert!(b.iter().all(|x| x.percent == 100.0));
        assert_eq!(b[0].total, 2);
        assert_eq!(b[2].total, 2);
        assert_eq!(empty, 1);
    }

    #[test]
    fn arrival_bins_sum_to_arrivals() {
        let times = [360.0, 361.0, 369.99, 370.0, 395.0, 1200.0];
        let bins = arrival_rate_series(&times, 360.0, 10.0, 78);
        assert_eq!(bins.iter().sum::<u64>(), times.len() as u64);
        assert_eq!(&bins[..4], &[3, 1, 0, 1]);
        assert_eq!(bins.len(), 85);
    }

    #[test]
    fn peak_queue_only_counts_peak_minutes() {
        let s = StationTimeSeries {
            station: "s".into(),
            start_minute: 598.0,
            queue_len: vec![2, 2, 10, 10],
            price: vec![5.0; 4],
            cum_arrivals: vec![0; 4],
            bin_minutes: 10.0,
            arrival_counts: vec![],
        };
        assert_eq!(
            peak_avg_queue(&[s], &MetricsParams::default().peak_windows),
            2.0
        );
    }

    #[test]
    fn aggregate_mean_and_sd() {
        let mk = |w| RunSummary {
            seed: 0,
            total_requests: 0,
            served: 0,
            lost: 0,
            lost_empty_choice_set: 0,
            lost_balked_at_spawn: 0,
            lost_balked_at_arrival: 0,
            lost_by_choice_set_size: vec![],
            reroutes: 0,
            no_served: true,
            avg_wait: w,
            avg_total_time: 0.0,
            total_revenue: 0.0,
            monetized_disutility_served_avg: 0.0,
            monetized_disutility_all_avg: 0.0,
            monetized_total_disutility: 0.0,
            social_welfare: 0.0,
            social_welfare_payment_free: 0.0,
            mean_service_min: 0.0,
            demand_supply_ratio: 0.0,
            peak_avg_queue: 0.0,
        };
        let agg = aggregate(&[mk(1.0), mk(3.0)]);
        let w = agg.iter().find(|m| m.metric == "avg_wait").unwrap();
        assert_eq!(w.mean, 2.0);
        assert!((w.sd - 2f64.sqrt()).abs() < 1e-12);
    }
}
