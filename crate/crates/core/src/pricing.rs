//! Queue-responsive price adjustment.
//!
//! A station's hourly price is a pure function of its current queue length:
//!
//! | kind        | continuous           | step (factor `m`)                |
//! |-------------|----------------------|----------------------------------|
//! | linear      | `base + a*q`         | `base + a*floor(q/m)`            |
//! | quadratic   | `base + a*q^2`       | `base + a*floor(q^2/m)`          |
//! | exponential | `base + e^(a*q) - 1` | `base + e^(a*floor(q/m)) - 1`    |
//!
//! Every form returns `base` at `q = 0` and is nondecreasing in `q`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    #[default]
    None,
    Linear,
    Quadratic,
    Exponential,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::None,
        SchemeKind::Linear,
        SchemeKind::Quadratic,
        SchemeKind::Exponential,
    ];

    /// Adjustment factor used when a scenario does not set one.
    pub fn default_alpha(self) -> f64 {
        match self {
            SchemeKind::None => 0.0,
            SchemeKind::Linear => 1.0,
            SchemeKind::Quadratic => 0.625,
            SchemeKind::Exponential => 1.4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::None => "none",
            SchemeKind::Linear => "linear",
            SchemeKind::Quadratic => "quadratic",
            SchemeKind::Exponential => "exponential",
        }
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown pricing scheme `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateMode {
    Continuous,
    #[default]
    Step,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "SchemeSpec")]
pub struct PricingScheme {
    pub kind: SchemeKind,
    /// Dollars per step for linear and quadratic; per-step exponent for exponential.
    pub alpha: f64,
    /// Step factor `m`, at least 1.
    pub step_m: u32,
    pub mode: UpdateMode,
}

impl PricingScheme {
    pub fn none() -> Self {
        Self::step(SchemeKind::None)
    }

    /// Step scheme with `m = 3` and the default adjustment factor.
    pub fn step(kind: SchemeKind) -> Self {
        PricingScheme {
            kind,
            alpha: kind.default_alpha(),
            step_m: 3,
            mode: UpdateMode::Step,
        }
    }
}

/// Config form of [`PricingScheme`]: every field optional, `alpha`
/// defaulting per kind.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeSpec {
    #[serde(default)]
    kind: SchemeKind,
    alpha: Option<f64>,
    #[serde(default = "default_step")]
    step_m: u32,
    #[serde(default)]
    mode: UpdateMode,
}

fn default_step() -> u32 {
    3
}

impl From<SchemeSpec> for PricingScheme {
    fn from(s: SchemeSpec) -> Self {
        PricingScheme {
            kind: s.kind,
            alpha: s.alpha.unwrap_or(s.kind.default_alpha()),
            step_m: s.step_m,
            mode: s.mode,
        }
    }
}

impl Default for PricingScheme {
    fn default() -> Self {
        Self::none()
    }
}

/// Hourly price of a station whose queue holds `q` waiting customers.
pub fn price_for_queue(scheme: &PricingScheme, base: f64, q: u32) -> f64 {
    let q = q as u64;
    let m = scheme.step_m.max(1) as u64;
    let (lin, sq) = match scheme.mode {
        UpdateMode::Continuous => (q, q * q),
        UpdateMode::Step => (q / m, q * q / m),
    };
    let a = scheme.alpha;
    match scheme.kind {
        SchemeKind::None => base,
        SchemeKind::Linear => base + a * lin as f64,
        SchemeKind::Quadratic => base + a * sq as f64,
        SchemeKind::Exponential => base + (a * lin as f64).exp_m1(),
    }
}

/// Base and current hourly price of one station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceState {
    pub base: f64,
    pub current: f64,
}

impl PriceState {
    pub fn new(base: f64) -> Self {
        PriceState {
            base,
            current: base,
        }
    }

    /// Reprices after the queue changed to `queue_len`. Affects later
    /// choices only; customers already holding a locked price keep it.
    pub fn on_queue_change(&mut self, scheme: &PricingScheme, queue_len: usize) -> PriceState {
        self.current = price_for_queue(scheme, self.base, queue_len as u32);
        *self
    }
}
