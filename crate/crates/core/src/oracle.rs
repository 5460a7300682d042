//! Closed-form M/M/c results used to check the station queue.
//!
//! Nothing in the simulator's dynamics calls into this module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MmcParams {
    /// Arrivals per minute.
    pub lambda: f64,
    /// Services per minute per server.
    pub mu: f64,
    pub servers: u32,
}

impl MmcParams {
    pub fn new(lambda: f64, mu: f64, servers: u32) -> Self {
        MmcParams {
            lambda,
            mu,
            servers,
        }
    }

    /// Offered load `lambda / mu`.
    pub fn offered_load(&self) -> f64 {
        self.lambda / self.mu
    }

    /// Per-server utilization.
    pub fn rho(&self) -> f64 {
        self.offered_load() / self.servers as f64
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN as well
    fn check(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !(self.mu > 0.0) || self.servers == 0 {
            return Err(Error::config(
                "mmc",
                format!("needs lambda > 0, mu > 0, servers >= 1 (got {self:?})"),
            ));
        }
        let rho = self.rho();
        if rho >= 1.0 {
            return Err(Error::Unstable { rho });
        }
        Ok(())
    }
}

/// Steady-state queue figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MmcMetrics {
    pub p_wait: f64,
    /// Mean number waiting (not in service).
    pub lq: f64,
    /// Mean wait in queue, minutes.
    pub wq: f64,
}

/// Probability that an arrival has to wait (Erlang C).
///
/// Computed through the Erlang B recursion, which stays finite for large
/// server counts where `a^c / c!` would overflow.
pub fn erlang_c(params: &MmcParams) -> Result<f64> {
    params.check()?;
    let a = params.offered_load();
    let mut b = 1.0;
    for k in 1..=params.servers {
        b = a * b / (k as f64 + a * b);
    }
    let rho = params.rho();
    Ok(b / (1.0 - rho * (1.0 - b)))
}

pub fn mmc_metrics(params: &MmcParams) -> Result<MmcMetrics> {
    let p_wait = erlang_c(params)?;
    let rho = params.rho();
    let lq = p_wait * rho / (1.0 - rho);
    Ok(MmcMetrics {
        p_wait,
        lq,
        wq: lq / params.lambda,
    })
}
