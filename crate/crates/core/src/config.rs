//! Scenario files.
//!
//! A scenario is a single JSON document. Only `zones`, `stations` and
//! `od_rates` are required; every other section falls back to the default
//! case-study parameters. Unknown fields are rejected.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::choice::ChoiceParams;
use crate::demand::{DemandParams, OdPeriodRate};
use crate::domain::{MobilityParams, StationSpec, Zone};
use crate::error::{Error, Result};
use crate::metrics::MetricsParams;
use crate::pricing::PricingScheme;
use crate::station::ServiceParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub zones: Vec<Zone>,
    pub stations: Vec<StationSpec>,
    pub od_rates: Vec<OdPeriodRate>,
    #[serde(default)]
    pub mobility: MobilityParams,
    #[serde(default)]
    pub demand: DemandParams,
    #[serde(default)]
    pub choice: ChoiceParams,
    #[serde(default)]
    pub pricing: PricingScheme,
    #[serde(default)]
    pub service: ServiceParams,
    /// Station-to-station relocations allowed per customer.
    #[serde(default = "default_reroute_max")]
    pub reroute_max: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_replications")]
    pub replications: u32,
    #[serde(default)]
    pub metrics: MetricsParams,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for run artifacts; the CLI flag takes precedence.
    pub dir: Option<PathBuf>,
}

fn default_reroute_max() -> u32 {
    1
}

fn default_seed() -> u64 {
    1
}

fn default_replications() -> u32 {
    1
}

/// Reads, parses, and validates a scenario file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let config = parse_config(&text).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })?;
    Ok(config)
}

/// Parses and validates a scenario from JSON text.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: ScenarioConfig =
        serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
            path: PathBuf::from("<scenario>"),
            message: format!("`{}`: {}", e.path(), e.inner()),
        })?;
    config.validate()?;
    Ok(config)
}

fn check(ok: bool, field: impl FnOnce() -> String, message: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(field(), message))
    }
}

impl ScenarioConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn total_chargers(&self) -> u32 {
        self.stations.iter().map(|s| s.chargers).sum()
    }

    pub fn window_min(&self) -> f64 {
        self.demand.sim_end - self.demand.sim_start
    }

    /// Checks every id reference and numeric domain.
    pub fn validate(&self) -> Result<()> {
        check(
            !self.zones.is_empty(),
            || "zones".into(),
            "must not be empty",
        )?;
        let mut zone_ids = HashSet::new();
        for (k, z) in self.zones.iter().enumerate() {
            check(
                zone_ids.insert(z.id.as_str()),
                || format!("zones[{k}].id"),
                "is a duplicate",
            )?;
            let r = &z.rect;
            let finite = [r.xmin, r.xmax, r.ymin, r.ymax]
                .iter()
                .all(|v| v.is_finite());
            check(
                finite && r.xmin < r.xmax,
                || format!("zones[{k}].rect"),
                "needs finite xmin < xmax",
            )?;
            check(
                r.ymin < r.ymax,
                || format!("zones[{k}].rect"),
                "needs ymin < ymax",
            )?;
        }

        check(
            !self.stations.is_empty(),
            || "stations".into(),
            "must not be empty",
        )?;
        let mut station_ids = HashSet::new();
        for (k, s) in self.stations.iter().enumerate() {
            check(
                station_ids.insert(s.id.as_str()),
                || format!("stations[{k}].id"),
                "is a duplicate",
            )?;
            check(
                s.chargers >= 1,
                || format!("stations[{k}].chargers"),
                "must be >= 1",
            )?;
            check(
                s.base_price > 0.0 && s.base_price.is_finite(),
                || format!("stations[{k}].base_price"),
                "must be > 0",
            )?;
            check(
                s.location.is_finite(),
                || format!("stations[{k}].location"),
                "must be finite",
            )?;
        }

        for (k, od) in self.od_rates.iter().enumerate() {
            check(
                od.period_start < od.period_end,
                || format!("od_rates[{k}].period_start"),
                "must be before period_end",
            )?;
            check(
                od.rate >= 0.0 && od.rate.is_finite(),
                || format!("od_rates[{k}].rate"),
                "must be >= 0",
            )?;
            check(
                zone_ids.contains(od.origin.as_str()),
                || format!("od_rates[{k}].origin"),
                "references an unknown zone",
            )?;
            check(
                zone_ids.contains(od.dest.as_str()),
                || format!("od_rates[{k}].dest"),
                "references an unknown zone",
            )?;
        }

        let m = &self.mobility;
        for (name, v) in [
            ("speed", m.speed),
            ("range_full", m.range_full),
            ("charge_rate", m.charge_rate),
            ("detour_max", m.detour_max),
        ] {
            check(
                v > 0.0 && v.is_finite(),
                || format!("mobility.{name}"),
                "must be > 0",
            )?;
        }

        let d = &self.demand;
        check(
            d.penetration_multiplier >= 0.0 && d.penetration_multiplier.is_finite(),
            || "demand.penetration_multiplier".into(),
            "must be >= 0",
        )?;
        for (name, v) in [("soc_sd", d.soc_sd), ("threshold_sd", d.threshold_sd)] {
            check(
                v >= 0.0 && v.is_finite(),
                || format!("demand.{name}"),
                "must be >= 0",
            )?;
        }
        for (name, v) in [
            ("soc_mean", d.soc_mean),
            ("threshold_mean", d.threshold_mean),
        ] {
            check(v.is_finite(), || format!("demand.{name}"), "must be finite")?;
        }
        check(
            d.sim_start < d.sim_end && d.sim_start.is_finite() && d.sim_end.is_finite(),
            || "demand.sim_start".into(),
            "must be before demand.sim_end",
        )?;

        let c = &self.choice;
        for (name, v) in [
            ("beta_price", c.beta_price),
            ("beta_detour", c.beta_detour),
            ("beta_wait", c.beta_wait),
        ] {
            check(
                v < 0.0 && v.is_finite(),
                || format!("choice.{name}"),
                "must be < 0",
            )?;
        }
        check(
            c.no_charge_utility.is_finite(),
            || "choice.no_charge_utility".into(),
            "must be finite",
        )?;

        check(
            self.pricing.alpha >= 0.0 && self.pricing.alpha.is_finite(),
            || "pricing.alpha".into(),
            "must be >= 0",
        )?;
        check(
            self.pricing.step_m >= 1,
            || "pricing.step_m".into(),
            "must be >= 1",
        )?;
        check(
            self.service.extra_charge_mean >= 0.0 && self.service.extra_charge_mean.is_finite(),
            || "service.extra_charge_mean".into(),
            "must be >= 0",
        )?;
        check(
            self.replications >= 1,
            || "replications".into(),
            "must be >= 1",
        )?;

        check(
            self.metrics.arrival_bin_min > 0.0,
            || "metrics.arrival_bin_min".into(),
            "must be > 0",
        )?;
        for (k, w) in self.metrics.peak_windows.iter().enumerate() {
            check(
                w[0] < w[1],
                || format!("metrics.peak_windows[{k}]"),
                "needs start < end",
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::{SchemeKind, UpdateMode};

    const MINIMAL: &str = r#"{
        "zones": [{"id": "z", "rect": {"xmin": 0, "ymin": 0, "xmax": 10, "ymax": 10}}],
        "stations": [{"id": "s", "location": {"x": 5, "y": 5}, "chargers": 2}],
        "od_rates": [{"period_start": 360, "period_end": 600, "origin": "z", "dest": "z", "rate": 12}]
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.choice, ChoiceParams::default());
        assert_eq!(c.choice.beta_price, -2.7);
        assert_eq!(c.stations[0].base_price, 5.0);
        assert_eq!(c.mobility.speed, 50.0);
        assert_eq!(c.mobility.detour_max, 10.0);
        assert_eq!(c.mobility.range_full, 200.0);
        assert_eq!(c.mobility.charge_rate, 3.2);
        assert_eq!((c.demand.soc_mean, c.demand.soc_sd), (0.6, 0.2));
        assert_eq!((c.demand.threshold_mean, c.demand.threshold_sd), (0.5, 0.1));
        assert_eq!((c.demand.sim_start, c.demand.sim_end), (360.0, 1140.0));
        assert_eq!(c.service.extra_charge_mean, 10.0);
        assert_eq!(c.pricing.step_m, 3);
        assert_eq!(c.pricing.mode, UpdateMode::Step);
        assert_eq!(c.reroute_max, 1);
        assert_eq!(c.replications, 1);
    }

    #[test]
    fn negative_chargers_names_the_field() {
        let text = MINIMAL.replace("\"chargers\": 2", "\"chargers\": -1");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("stations[0].chargers"), "{err}");
        let text = MINIMAL.replace("\"chargers\": 2", "\"chargers\": 0");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("stations[0].chargers"), "{err}");
    }

    #[test]
    fn rejects_unknown_fields_and_dangling_ids() {
        let text = MINIMAL.replace("\"zones\"", "\"colour\": 1, \"zones\"");
        assert!(parse_config(&text)
            .unwrap_err()
            .to_string()
            .contains("colour"));
        let text = MINIMAL.replace("\"dest\": \"z\"", "\"dest\": \"q\"");
        assert!(parse_config(&text)
            .unwrap_err()
            .to_string()
            .contains("od_rates[0].dest"));
    }

    #[test]
    fn pricing_alpha_defaults_by_kind() {
        let text = MINIMAL.replace(
            "\"od_rates\"",
            "\"pricing\": {\"kind\": \"quadratic\"}, \"od_rates\"",
        );
        let c = parse_config(&text).unwrap();
        assert_eq!(c.pricing.kind, SchemeKind::Quadratic);
        assert_eq!(c.pricing.alpha, 0.625);
    }

    #[test]
    fn high_demand_scenario_is_a_multiplier() {
        let mut c = parse_config(MINIMAL).unwrap();
        c.demand.penetration_multiplier = 2.0;
        let round = parse_config(&c.to_json()).unwrap();
        assert_eq!(round, c);
    }

    #[test]
    fn bad_domains_are_rejected() {
        let mut c = parse_config(MINIMAL).unwrap();
        c.choice.beta_wait = 0.5;
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("choice.beta_wait"));
        let mut c = parse_config(MINIMAL).unwrap();
        c.demand.sim_end = 100.0;
        assert!(c.validate().is_err());
        let mut c = parse_config(MINIMAL).unwrap();
        c.replications = 0;
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("replications"));
    }
}
