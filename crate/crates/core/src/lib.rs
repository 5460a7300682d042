//! Discrete-event simulation of a regional network of EV fast-charging
//! stations.
//!
//! Drivers generated by an origin-destination Poisson process pick a station
//! (or give up on fast charging) with a multinomial logit over price, detour,
//! and expected wait. Each station is a multi-charger FCFS queue whose price
//! can follow its queue length. A run reports waits, losses, revenue,
//! monetized customer utility, and social welfare.
//!
//! ```
//! use chargesim::scenario::GridDemo;
//!
//! let config = GridDemo::default().build();
//! let out = chargesim::engine::run(&config, 7).unwrap();
//! let s = &out.summary;
//! assert_eq!(s.served + s.lost, s.total_requests);
//! ```

pub mod choice;
pub mod config;
pub mod demand;
pub mod domain;
pub mod engine;
pub mod error;
pub mod events;
pub mod metrics;
pub mod oracle;
pub mod output;
pub mod pricing;
pub mod rng;
pub mod runner;
pub mod scenario;
pub mod station;

pub use config::{load_config, parse_config, ScenarioConfig};
pub use engine::{run, RunOutput};
pub use error::{Error, Result};
pub use metrics::RunSummary;

// The guide in book/ is compiled as doctests so its snippets track the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/demand.md")]
    mod demand {}
    #[doc = include_str!("../../../book/src/choice.md")]
    mod choice {}
    #[doc = include_str!("../../../book/src/pricing.md")]
    mod pricing {}
    #[doc = include_str!("../../../book/src/stations.md")]
    mod stations {}
    #[doc = include_str!("../../../book/src/engine.md")]
    mod engine {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
