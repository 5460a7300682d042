//! Station choice: feasible choice sets and the multinomial logit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{detour_distance, manhattan_distance, MobilityParams, Point, StationSpec};
use crate::station::StationState;

/// How the price attribute of a station enters the utility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceTermMode {
    /// Expected payment in dollars: hourly price times expected charging time.
    #[default]
    Payment,
    /// The posted hourly rate itself.
    HourlyRate,
}

/// Taste coefficients of the logit model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChoiceParams {
    /// Utils per dollar.
    pub beta_price: f64,
    /// Utils per mile of detour.
    pub beta_detour: f64,
    /// Utils per minute of expected wait.
    pub beta_wait: f64,
    /// Utility of leaving the fast-charging system.
    pub no_charge_utility: f64,
    pub price_term_mode: PriceTermMode,
}

impl Default for ChoiceParams {
    fn default() -> Self {
        ChoiceParams {
            beta_price: -2.7,
            beta_detour: -3.2,
            beta_wait: -1.0,
            no_charge_utility: -50.0,
            price_term_mode: PriceTermMode::Payment,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// Index into the scenario's station list.
    Station(usize),
    NoCharge,
}

/// One option in a choice situation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alternative {
    pub target: Target,
    /// Dollars, see [`PriceTermMode`].
    pub price_term: f64,
    /// Miles.
    pub detour: f64,
    /// Minutes.
    pub wait: f64,
}

impl Alternative {
    pub fn station(index: usize, price_term: f64, detour: f64, wait: f64) -> Self {
        Alternative {
            target: Target::Station(index),
            price_term,
            detour,
            wait,
        }
    }

    pub fn no_charge() -> Self {
        Alternative {
            target: Target::NoCharge,
            price_term: 0.0,
            detour: 0.0,
            wait: 0.0,
        }
    }
}

/// Stations reachable on the current charge and within the detour limit.
///
/// Returns indices into `stations`, in their listed order.
pub fn build_choice_set(
    position: Point,
    dest: Point,
    soc: f64,
    stations: &[StationSpec],
    params: &MobilityParams,
) -> Vec<usize> {
    let reach = params.reach(soc);
    stations
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            manhattan_distance(position, s.location) <= reach
                && detour_distance(position, dest, s.location) <= params.detour_max
        })
        .map(|(i, _)| i)
        .collect()
}

pub fn utility(alt: &Alternative, params: &ChoiceParams) -> f64 {
    match alt.target {
        Target::NoCharge => params.no_charge_utility,
        Target::Station(_) => {
            params.beta_price * alt.price_term
                + params.beta_detour * alt.detour
                + params.beta_wait * alt.wait
        }
    }
}

/// Logit probabilities, computed with the max utility subtracted so that
/// `exp` never overflows.
pub fn mnl_probabilities(alts: &[Alternative], params: &ChoiceParams) -> Vec<f64> {
    softmax(alts.iter().map(|a| utility(a, params)).collect())
}

pub(crate) fn softmax(mut values: Vec<f64>) -> Vec<f64> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in values.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in values.iter_mut() {
        *v /= sum;
    }
    values
}

/// Draws one alternative by inverse-CDF sampling over [`mnl_probabilities`].
///
/// Returns an index into `alts`. Consumes exactly one uniform draw, even
/// when there is a single alternative.
pub fn sample_choice<R: Rng + ?Sized>(
    alts: &[Alternative],
    params: &ChoiceParams,
    rng: &mut R,
) -> usize {
    assert!(!alts.is_empty(), "choice situation without alternatives");
    let probs = mnl_probabilities(alts, params);
    let u: f64 = rng.random();
    let mut cum = 0.0;
    for (k, p) in probs.iter().enumerate() {
        cum += p;
        if u < cum {
            return k;
        }
    }
    // cum can land a hair below 1.0
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(alts.len() - 1)
}

/// Announced wait at a station: zero with a free charger, otherwise the
/// queue drained at `chargers` services of mean length `mean_service`.
pub fn expected_wait(station: &StationState, mean_service: f64) -> f64 {
    if station.has_free_charger() {
        0.0
    } else {
        station.queue_len() as f64 * mean_service / station.spec.chargers as f64
    }
}
