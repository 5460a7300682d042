//! Multi-charger station with a single FCFS queue.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::domain::{manhattan_distance, MobilityParams, Point, StationSpec};
use crate::pricing::{PriceState, PricingScheme};

pub type CustomerId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceParams {
    /// Mean of the exponential top-up beyond the charge needed to reach the destination, minutes.
    pub extra_charge_mean: f64,
}

impl Default for ServiceParams {
    fn default() -> Self {
        ServiceParams {
            extra_charge_mean: 10.0,
        }
    }
}

/// Minutes of charging needed to reach `dest` from a station at `station`.
pub fn required_charge_minutes(
    soc_at_station: f64,
    station: Point,
    dest: Point,
    params: &MobilityParams,
) -> f64 {
    let short = manhattan_distance(station, dest) - params.reach(soc_at_station);
    short.max(0.0) / params.charge_rate
}

/// Charging duration: the required part plus an exponential top-up, capped
/// where the battery would be full.
pub fn sample_service_time<R: Rng + ?Sized>(
    soc_at_station: f64,
    station: Point,
    dest: Point,
    params: &MobilityParams,
    service: &ServiceParams,
    rng: &mut R,
) -> f64 {
    let required = required_charge_minutes(soc_at_station, station, dest, params);
    let extra = if service.extra_charge_mean > 0.0 {
        Exp::new(1.0 / service.extra_charge_mean)
            .expect("positive mean")
            .sample(rng)
    } else {
        0.0
    };
    let to_full = (1.0 - soc_at_station).max(0.0) * params.range_full / params.charge_rate;
    (required + extra).min(to_full).max(required)
}

/// A completed charging session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ServiceRecord {
    pub customer: CustomerId,
    pub station: usize,
    pub arrival_time: f64,
    pub service_start: f64,
    pub service_end: f64,
    /// Dollars per hour.
    pub locked_price: f64,
    /// Dollars.
    pub payment: f64,
    /// Order of admission at this station.
    pub arrival_index: u64,
    /// Order of service start at this station.
    pub start_index: u64,
}

impl ServiceRecord {
    pub fn wait(&self) -> f64 {
        self.service_start - self.arrival_time
    }

    pub fn service_minutes(&self) -> f64 {
        self.service_end - self.service_start
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Waiting {
    customer: CustomerId,
    arrival_time: f64,
    locked_price: f64,
    service_minutes: f64,
    arrival_index: u64,
}

#[derive(Debug, Clone, PartialEq)]
struct Charging {
    customer: CustomerId,
    arrival_time: f64,
    service_start: f64,
    service_end: f64,
    locked_price: f64,
    arrival_index: u64,
    start_index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Admission {
    ServeImmediately { service_end: f64 },
    Queued { position: usize },
}

/// Result of a service completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub record: ServiceRecord,
    /// Queue head moved onto the freed charger, with its service end time.
    pub started: Option<(CustomerId, f64)>,
}

#[derive(Debug, Clone)]
pub struct StationState {
    pub index: usize,
    pub spec: StationSpec,
    pub price: PriceState,
    queue: VecDeque<Waiting>,
    in_service: Vec<Charging>,
    pub arrivals: u64,
    pub served: u64,
    /// Dollars collected from completed sessions.
    pub revenue: f64,
    starts: u64,
}

impl StationState {
    pub fn new(spec: StationSpec) -> Self {
        Self::with_index(0, spec)
    }

    pub fn with_index(index: usize, spec: StationSpec) -> Self {
        StationState {
            index,
            price: PriceState::new(spec.base_price),
            spec,
            queue: VecDeque::new(),
            in_service: Vec::new(),
            arrivals: 0,
            served: 0,
            revenue: 0.0,
            starts: 0,
        }
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    pub fn busy(&self) -> usize {
        self.in_service.len()
    }

    pub fn has_free_charger(&self) -> bool {
        self.in_service.len() < self.spec.chargers as usize
    }

    /// Never a free charger while someone waits.
    pub fn is_work_conserving(&self) -> bool {
        self.queue.is_empty() || !self.has_free_charger()
    }

    /// Admits a customer committed to this station.
    ///
    /// The customer locks in the current price. Joining the queue reprices
    /// the station afterwards.
    pub fn arrive(
        &mut self,
        customer: CustomerId,
        now: f64,
        service_minutes: f64,
        scheme: &PricingScheme,
    ) -> Admission {
        let arrival_index = self.arrivals;
        self.arrivals += 1;
        let locked_price = self.price.current;
        if self.has_free_charger() {
            let service_end = now + service_minutes;
            self.start(customer, now, now, service_end, locked_price, arrival_index);
            Admission::ServeImmediately { service_end }
        } else {
            self.queue.push_back(Waiting {
                customer,
                arrival_time: now,
                locked_price,
                service_minutes,
                arrival_index,
            });
            self.price.on_queue_change(scheme, self.queue.len());
            Admission::Queued {
                position: self.queue.len(),
            }
        }
    }

    fn start(
        &mut self,
        customer: CustomerId,
        arrival_time: f64,
        now: f64,
        service_end: f64,
        locked_price: f64,
        arrival_index: u64,
    ) {
        self.in_service.push(Charging {
            customer,
            arrival_time,
            service_start: now,
            service_end,
            locked_price,
            arrival_index,
            start_index: self.starts,
        });
        self.starts += 1;
    }

    /// Finishes `customer`'s session and hands the charger to the queue head.
    ///
    /// Panics if `customer` is not charging here.
    pub fn complete_service(
        &mut self,
        customer: CustomerId,
        now: f64,
        scheme: &PricingScheme,
    ) -> Completion {
        let slot = self
            .in_service
            .iter()
            .position(|c| c.customer == customer)
            .unwrap_or_else(|| {
                panic!(
                    "customer {customer} is not charging at station {}",
                    self.index
                )
            });
        let done = self.in_service.swap_remove(slot);
        let payment = done.locked_price * (done.service_end - done.service_start) / 60.0;
        self.revenue += payment;
        self.served += 1;
        let record = ServiceRecord {
            customer: done.customer,
            station: self.index,
            arrival_time: done.arrival_time,
            service_start: done.service_start,
            service_end: done.service_end,
            locked_price: done.locked_price,
            payment,
            arrival_index: done.arrival_index,
            start_index: done.start_index,
        };

        let started = self.queue.pop_front().map(|next| {
            let end = now + next.service_minutes;
            self.start(
                next.customer,
                next.arrival_time,
                now,
                end,
                next.locked_price,
                next.arrival_index,
            );
            self.price.on_queue_change(scheme, self.queue.len());
            (next.customer, end)
        });
        Completion { record, started }
    }
}
