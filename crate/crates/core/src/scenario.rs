//! Synthetic "grid demo" scenarios.
//!
//! A `grid x grid` block of square zones, stations scattered uniformly over
//! the region, and gravity-style OD rates `w(o, d) = exp(-d(o, d) / decay)`
//! normalized to a total hourly trip rate. The day is split into AM
//! (06:00-10:00), midday (10:00-15:00) and PM (15:00-19:00) periods.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{OutputConfig, ScenarioConfig};
use crate::demand::{DemandParams, OdPeriodRate};
use crate::domain::{manhattan_distance, Point, Rect, StationSpec, Zone};
use crate::metrics::MetricsParams;
use crate::pricing::{PricingScheme, SchemeKind};
use crate::rng::{stream, Stream};

/// Period boundaries (minutes since midnight) and their demand factors.
pub const PERIODS: [(f64, f64, f64); 3] = [
    (360.0, 600.0, 1.0),
    (600.0, 900.0, 0.6),
    (900.0, 1140.0, 1.0),
];

/// Flat shoulders with 8x rush peaks at 07:00-09:00 and 16:00-18:00.
pub const PEAKED: [[f64; 3]; 5] = [
    [360.0, 420.0, 1.0],
    [420.0, 540.0, 8.0],
    [540.0, 960.0, 1.0],
    [960.0, 1080.0, 8.0],
    [1080.0, 1140.0, 1.0],
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridDemo {
    pub grid: u32,
    pub cell_miles: f64,
    pub stations: u32,
    pub chargers_min: u32,
    pub chargers_max: u32,
    /// Trips per hour over all OD pairs in a factor-1 period.
    pub trips_per_hour: f64,
    pub decay_miles: f64,
    /// `[start, end, factor]` demand periods, minutes since midnight.
    pub periods: Vec<[f64; 3]>,
    /// Attraction weight of the central zone relative to the others.
    pub hotspot: f64,
    /// Seeds station placement and charger counts.
    pub layout_seed: u64,
    pub pricing: PricingScheme,
}

impl Default for GridDemo {
    fn default() -> Self {
        GridDemo {
            grid: 4,
            cell_miles: 5.0,
            stations: 6,
            chargers_min: 1,
            chargers_max: 3,
            trips_per_hour: 300.0,
            decay_miles: 10.0,
            periods: PERIODS.iter().map(|&(a, b, f)| [a, b, f]).collect(),
            hotspot: 1.0,
            layout_seed: 1,
            pricing: PricingScheme::none(),
        }
    }
}

impl GridDemo {
    /// The congested demo used for pricing comparisons: six stations of four
    /// chargers, two-hour rush peaks, a busy central zone, and demand:supply
    /// near 0.4 over the whole day.
    pub fn congested() -> Self {
        GridDemo {
            grid: 4,
            cell_miles: 5.0,
            stations: 6,
            chargers_min: 4,
            chargers_max: 4,
            trips_per_hour: 44.0,
            decay_miles: 10.0,
            periods: PEAKED.to_vec(),
            hotspot: 2.0,
            layout_seed: 1,
            pricing: PricingScheme::none(),
        }
    }

    /// A compact 3x3 city with ten stations of three chargers and the same
    /// rush peaks; few trips lack a reachable station, so losses track load.
    pub fn dense() -> Self {
        GridDemo {
            grid: 3,
            stations: 10,
            chargers_min: 3,
            chargers_max: 3,
            trips_per_hour: 57.0,
            ..GridDemo::congested()
        }
    }

    /// A random small scenario for invariant testing.
    pub fn random(seed: u64) -> Self {
        let mut rng = stream(seed, Stream::Demand);
        let chargers_min = rng.random_range(1..=3);
        GridDemo {
            grid: rng.random_range(1..=5),
            cell_miles: rng.random_range(2.0..8.0),
            stations: rng.random_range(1..=8),
            chargers_min,
            chargers_max: chargers_min + rng.random_range(0..=2),
            trips_per_hour: rng.random_range(20.0..400.0),
            decay_miles: rng.random_range(3.0..20.0),
            layout_seed: seed,
            pricing: PricingScheme::step(SchemeKind::ALL[rng.random_range(0..4)]),
            ..GridDemo::default()
        }
    }

    pub fn build(&self) -> ScenarioConfig {
        let mut rng = stream(self.layout_seed, Stream::Validation);
        let side = self.grid as f64 * self.cell_miles;
        let zones: Vec<Zone> = (0..self.grid)
            .flat_map(|r| (0..self.grid).map(move |c| (r, c)))
            .map(|(r, c)| Zone {
                id: format!("z{r}_{c}"),
                rect: Rect {
                    xmin: c as f64 * self.cell_miles,
                    ymin: r as f64 * self.cell_miles,
                    xmax: (c + 1) as f64 * self.cell_miles,
                    ymax: (r + 1) as f64 * self.cell_miles,
                },
            })
            .collect();
        let stations = (0..self.stations)
            .map(|k| StationSpec {
                id: format!("s{k}"),
                location: Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side)),
                chargers: rng
                    .random_range(self.chargers_min..=self.chargers_max.max(self.chargers_min)),
                base_price: 5.0,
            })
            .collect();

        let hub = (self.grid / 2 * self.grid + self.grid / 2) as usize;
        let attraction = |z: usize| if z == hub { self.hotspot } else { 1.0 };
        let weights: Vec<(usize, usize, f64)> = (0..zones.len())
            .flat_map(|o| (0..zones.len()).map(move |d| (o, d)))
            .map(|(o, d)| {
                let dist = manhattan_distance(zones[o].rect.center(), zones[d].rect.center());
                (
                    o,
                    d,
                    attraction(o) * attraction(d) * (-dist / self.decay_miles).exp(),
                )
            })
            .collect();
        let total: f64 = weights.iter().map(|w| w.2).sum();
        let od_rates = self
            .periods
            .iter()
            .flat_map(|&[start, end, factor]| {
                weights
                    .iter()
                    .map(move |&(o, d, w)| (start, end, factor, o, d, w))
            })
            .map(|(start, end, factor, o, d, w)| OdPeriodRate {
                period_start: start,
                period_end: end,
                origin: zones[o].id.clone(),
                dest: zones[d].id.clone(),
                rate: self.trips_per_hour * factor * w / total,
            })
            .collect();

        ScenarioConfig {
            name: format!("grid-demo-{}x{}", self.grid, self.grid),
            zones,
            stations,
            od_rates,
            mobility: Default::default(),
            demand: DemandParams::default(),
            choice: Default::default(),
            pricing: self.pricing,
            service: Default::default(),
            reroute_max: 1,
            seed: 1,
            replications: 1,
            metrics: MetricsParams::default(),
            output: OutputConfig::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_valid_configs() {
        GridDemo::default().build().validate().unwrap();
        GridDemo::congested().build().validate().unwrap();
        GridDemo::dense().build().validate().unwrap();
        for s in 0..50 {
            GridDemo::random(s).build().validate().unwrap();
        }
    }

    #[test]
    fn rates_sum_to_requested_total() {
        let demo = GridDemo::default();
        let cfg = demo.build();
        let am: f64 = cfg
            .od_rates
            .iter()
            .filter(|r| r.period_start == 360.0)
            .map(|r| r.rate)
            .sum();
        assert!((am - demo.trips_per_hour).abs() < 1e-9);
        let hot = GridDemo {
            hotspot: 3.0,
            ..demo.clone()
        }
        .build();
        let am: f64 = hot
            .od_rates
            .iter()
            .filter(|r| r.period_start == 360.0)
            .map(|r| r.rate)
            .sum();
        assert!((am - demo.trips_per_hour).abs() < 1e-9);
        assert_eq!(cfg.zones.len(), 16);
        assert_eq!(cfg.od_rates.len(), 3 * 256);
    }

    #[test]
    fn layout_is_seeded() {
        assert_eq!(GridDemo::default().build(), GridDemo::default().build());
        let other = GridDemo {
            layout_seed: 2,
            ..GridDemo::default()
        }
        .build();
        assert_ne!(other.stations, GridDemo::default().build().stations);
    }
}
