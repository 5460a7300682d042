//! The discrete-event loop tying demand, choice, stations, and pricing together.
//!
//! A customer makes a logit choice when the trip starts, drives to the chosen
//! station, and if every charger is busy may reconsider once (or
//! `reroute_max` times) before committing. A committed customer locks in the
//! station's current price and never leaves the queue. All events run to
//! completion, so customers still queued at the end of the demand window are
//! served during a drain phase.

use std::hash::{DefaultHasher, Hash, Hasher};

use crate::choice::{
    build_choice_set, expected_wait, sample_choice, Alternative, PriceTermMode, Target,
};
use crate::config::ScenarioConfig;
use crate::demand::{generate_requests, needs_fast_charge, EvRequest};
use crate::domain::{detour_distance, manhattan_distance, travel_time, Point};
use crate::error::Result;
use crate::events::EventQueue;
use crate::metrics::{
    arrival_rate_series, summarize, CustomerOutcome, LostReason, RunSummary, RunTotals,
    StationTimeSeries, Status,
};
use crate::oracle::MmcParams;
use crate::pricing::PricingScheme;
use crate::rng::{stream, SimRng, Stream};
use crate::station::{
    required_charge_minutes, sample_service_time, Admission, ServiceRecord, StationState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Spawn { customer: u32 },
    StationArrival { customer: u32, station: usize },
    ServiceEnd { customer: u32, station: usize },
}

/// Invariant checks collected while the loop runs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Audit {
    pub events: u64,
    pub violations: Vec<String>,
}

impl Audit {
    fn flag(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok && self.violations.len() < 100 {
            self.violations.push(msg());
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: RunSummary,
    /// Requests that entered the charging system, in spawn order.
    pub requests: Vec<EvRequest>,
    /// One per entry of `requests`, same order.
    pub outcomes: Vec<CustomerOutcome>,
    /// Completed sessions in completion order.
    pub records: Vec<ServiceRecord>,
    pub series: Vec<StationTimeSeries>,
    pub station_revenue: Vec<f64>,
    pub audit: Audit,
    /// Hash of the ordered event log.
    pub trace_hash: u64,
}

#[derive(Debug, Clone)]
struct Customer {
    request: EvRequest,
    position: Point,
    soc: f64,
    reroutes_left: u32,
    reroutes: u32,
    detour_total: f64,
    choice_set_size: usize,
    outcome: Option<(Status, Option<LostReason>)>,
    station: Option<usize>,
}

struct Recorder {
    next_minute: f64,
    end_minute: f64,
    queue_len: Vec<Vec<u32>>,
    price: Vec<Vec<f64>>,
    cum_arrivals: Vec<Vec<u64>>,
}

impl Recorder {
    fn new(start: f64, end: f64, stations: usize) -> Self {
        Recorder {
            next_minute: start,
            end_minute: end,
            queue_len: vec![Vec::new(); stations],
            price: vec![Vec::new(); stations],
            cum_arrivals: vec![Vec::new(); stations],
        }
    }

    /// Samples every whole minute strictly before `until`.
    fn advance(&mut self, until: f64, stations: &[StationState]) {
        while self.next_minute < self.end_minute && self.next_minute < until {
            for (i, s) in stations.iter().enumerate() {
                self.queue_len[i].push(s.queue_len() as u32);
                self.price[i].push(s.price.current);
                self.cum_arrivals[i].push(s.arrivals);
            }
            self.next_minute += 1.0;
        }
    }
}

struct Sim<'a> {
    config: &'a ScenarioConfig,
    scheme: PricingScheme,
    stations: Vec<StationState>,
    customers: Vec<Customer>,
    events: EventQueue<EventKind>,
    rng: SimRng,
    mean_service: f64,
    records: Vec<ServiceRecord>,
    waits: Vec<(f64, f64, f64)>,
    admissions: Vec<Vec<f64>>,
    audit: Audit,
    hasher: DefaultHasher,
    now: f64,
}

/// Scenario-wide mean service time announced to drivers: mean required
/// charge at trip start plus the mean top-up.
pub fn mean_service_minutes(requests: &[EvRequest], config: &ScenarioConfig) -> f64 {
    let extra = config.service.extra_charge_mean;
    if requests.is_empty() {
        return extra;
    }
    let required: f64 = requests
        .iter()
        .map(|r| required_charge_minutes(r.soc, r.origin, r.dest, &config.mobility))
        .sum();
    required / requests.len() as f64 + extra
}

/// Requests of one replication that need a fast charge.
pub fn charging_requests(config: &ScenarioConfig, seed: u64) -> Result<Vec<EvRequest>> {
    let mut rng = stream(seed, Stream::Demand);
    let all = generate_requests(
        &config.zones,
        &config.od_rates,
        &config.demand,
        config.reroute_max,
        &mut rng,
    )?;
    Ok(all
        .into_iter()
        .filter(|r| needs_fast_charge(r, &config.mobility))
        .collect())
}

/// Runs one replication.
pub fn run(config: &ScenarioConfig, seed: u64) -> Result<RunOutput> {
    config.validate()?;
    let requests = charging_requests(config, seed)?;
    Ok(run_requests(config, seed, requests))
}

/// Runs one replication on a prepared request stream.
///
/// `requests` must be sorted by spawn time.
pub fn run_requests(config: &ScenarioConfig, seed: u64, requests: Vec<EvRequest>) -> RunOutput {
    let mean_service = mean_service_minutes(&requests, config);
    let stations: Vec<StationState> = config
        .stations
        .iter()
        .enumerate()
        .map(|(i, s)| StationState::with_index(i, s.clone()))
        .collect();
    let n_stations = stations.len();
    let mut sim = Sim {
        config,
        scheme: config.pricing,
        stations,
        customers: requests
            .iter()
            .map(|r| Customer {
                request: r.clone(),
                position: r.origin,
                soc: r.soc,
                reroutes_left: r.reroutes_left,
                reroutes: 0,
                detour_total: 0.0,
                choice_set_size: 0,
                outcome: None,
                station: None,
            })
            .collect(),
        events: EventQueue::new(),
        rng: stream(seed, Stream::Behavior),
        mean_service,
        records: Vec::new(),
        waits: vec![(0.0, 0.0, 0.0); requests.len()],
        admissions: vec![Vec::new(); n_stations],
        audit: Audit::default(),
        hasher: DefaultHasher::new(),
        now: f64::NEG_INFINITY,
    };
    for (k, r) in requests.iter().enumerate() {
        sim.events
            .push(r.spawn_time, EventKind::Spawn { customer: k as u32 });
    }

    let mut recorder = Recorder::new(config.demand.sim_start, config.demand.sim_end, n_stations);
    while let Some(ev) = sim.events.pop() {
        recorder.advance(ev.time, &sim.stations);
        let last = sim.now;
        sim.audit.flag(ev.time >= last, || {
            format!("event at {} processed after {}", ev.time, last)
        });
        sim.now = ev.time;
        sim.audit.events += 1;
        ev.time.to_bits().hash(&mut sim.hasher);
        ev.event.hash(&mut sim.hasher);
        let touched = match ev.event {
            EventKind::Spawn { customer } => sim.handle_spawn(customer as usize),
            EventKind::StationArrival { customer, station } => {
                sim.handle_station_arrival(customer as usize, station)
            }
            EventKind::ServiceEnd { customer, station } => {
                sim.handle_service_end(customer as usize, station)
            }
        };
        if let Some(i) = touched {
            sim.check_station(i);
        }
    }
    recorder.advance(f64::INFINITY, &sim.stations);
    sim.finish(requests, recorder, seed)
}

impl Sim<'_> {
    fn station_alternative(&self, i: usize, position: Point, dest: Point, soc: f64) -> Alternative {
        let st = &self.stations[i];
        let loc = st.spec.location;
        let mobility = &self.config.mobility;
        let price_term = match self.config.choice.price_term_mode {
            PriceTermMode::HourlyRate => st.price.current,
            PriceTermMode::Payment => {
                let soc_there = soc - mobility.soc_used(manhattan_distance(position, loc));
                let minutes = required_charge_minutes(soc_there, loc, dest, mobility)
                    + self.config.service.extra_charge_mean;
                st.price.current * minutes / 60.0
            }
        };
        Alternative::station(
            i,
            price_term,
            detour_distance(position, dest, loc),
            expected_wait(st, self.mean_service),
        )
    }

    fn lose(&mut self, c: usize, reason: LostReason) {
        self.customers[c].outcome = Some((Status::Lost, Some(reason)));
    }

    /// Sends a customer from its current position towards station `i`.
    fn depart(&mut self, c: usize, i: usize) {
        let loc = self.stations[i].spec.location;
        let mobility = self.config.mobility;
        let cust = &mut self.customers[c];
        let leg = manhattan_distance(cust.position, loc);
        cust.detour_total += detour_distance(cust.position, cust.request.dest, loc);
        cust.soc -= mobility.soc_used(leg);
        cust.position = loc;
        let soc = cust.soc;
        self.audit
            .flag(soc >= -1e-9, || format!("customer {c} reached SOC {soc}"));
        let at = self.now + travel_time(leg, &mobility);
        self.events.push(
            at,
            EventKind::StationArrival {
                customer: c as u32,
                station: i,
            },
        );
    }

    fn handle_spawn(&mut self, c: usize) -> Option<usize> {
        let cust = &self.customers[c];
        let (origin, dest, soc) = (cust.position, cust.request.dest, cust.soc);
        let set = build_choice_set(
            origin,
            dest,
            soc,
            &self.config.stations,
            &self.config.mobility,
        );
        self.customers[c].choice_set_size = set.len();
        if set.is_empty() {
            self.lose(c, LostReason::EmptyChoiceSet);
            return None;
        }
        let mut alts: Vec<Alternative> = set
            .iter()
            .map(|&i| self.station_alternative(i, origin, dest, soc))
            .collect();
        alts.push(Alternative::no_charge());
        let k = sample_choice(&alts, &self.config.choice, &mut self.rng);
        match alts[k].target {
            Target::NoCharge => self.lose(c, LostReason::BalkedAtSpawn),
            Target::Station(i) => self.depart(c, i),
        }
        None
    }

    fn handle_station_arrival(&mut self, c: usize, i: usize) -> Option<usize> {
        if self.stations[i].has_free_charger() || self.customers[c].reroutes_left == 0 {
            self.admit(c, i);
            return Some(i);
        }
        let cust = &self.customers[c];
        let (here, dest, soc) = (cust.position, cust.request.dest, cust.soc);
        let mut alts = vec![self.station_alternative(i, here, dest, soc)];
        for j in build_choice_set(
            here,
            dest,
            soc,
            &self.config.stations,
            &self.config.mobility,
        ) {
            if j != i {
                alts.push(self.station_alternative(j, here, dest, soc));
            }
        }
        alts.push(Alternative::no_charge());
        let k = sample_choice(&alts, &self.config.choice, &mut self.rng);
        match alts[k].target {
            Target::NoCharge => self.lose(c, LostReason::BalkedAtArrival),
            Target::Station(j) if j == i => {
                self.admit(c, i);
                return Some(i);
            }
            Target::Station(j) => {
                let cust = &mut self.customers[c];
                cust.reroutes_left -= 1;
                cust.reroutes += 1;
                let (n, max) = (cust.reroutes, self.config.reroute_max);
                self.audit.flag(n <= max, || {
                    format!("customer {c} rerouted {n} > {max} times")
                });
                self.depart(c, j);
            }
        }
        None
    }

    fn admit(&mut self, c: usize, i: usize) {
        let cust = &self.customers[c];
        let service = sample_service_time(
            cust.soc,
            self.stations[i].spec.location,
            cust.request.dest,
            &self.config.mobility,
            &self.config.service,
            &mut self.rng,
        );
        self.customers[c].station = Some(i);
        self.admissions[i].push(self.now);
        let now = self.now;
        if let Admission::ServeImmediately { service_end } =
            self.stations[i].arrive(c as u32, now, service, &self.scheme)
        {
            self.events.push(
                service_end,
                EventKind::ServiceEnd {
                    customer: c as u32,
                    station: i,
                },
            );
        }
    }

    fn handle_service_end(&mut self, c: usize, i: usize) -> Option<usize> {
        let done = self.stations[i].complete_service(c as u32, self.now, &self.scheme);
        let rec = &done.record;
        self.waits[c] = (rec.wait(), rec.service_minutes(), rec.payment);
        self.customers[c].outcome = Some((Status::Served, None));
        self.records.push(done.record);
        if let Some((next, end)) = done.started {
            self.events.push(
                end,
                EventKind::ServiceEnd {
                    customer: next,
                    station: i,
                },
            );
        }
        Some(i)
    }

    fn check_station(&mut self, i: usize) {
        let st = &self.stations[i];
        let (q, price, base) = (st.queue_len(), st.price.current, st.price.base);
        let conserving = st.is_work_conserving();
        let busy = st.busy();
        let chargers = st.spec.chargers;
        self.audit.flag(conserving, || {
            format!("station {i}: queue {q} with {busy}/{chargers} chargers busy")
        });
        self.audit.flag(price >= base, || {
            format!("station {i}: price {price} below base {base}")
        });
        self.audit.flag(q > 0 || price == base, || {
            format!("station {i}: empty queue but price {price} != base {base}")
        });
    }

    fn finish(mut self, requests: Vec<EvRequest>, rec: Recorder, seed: u64) -> RunOutput {
        let config = self.config;
        let mut outcomes = Vec::with_capacity(self.customers.len());
        for (c, cust) in self.customers.iter().enumerate() {
            let (status, lost_reason) = match cust.outcome {
                Some(o) => o,
                None => {
                    self.audit
                        .flag(false, || format!("customer {c} never terminated"));
                    (Status::Lost, None)
                }
            };
            let (wait, service, payment) = self.waits[c];
            let served = status == Status::Served;
            outcomes.push(CustomerOutcome {
                customer: cust.request.id,
                spawn_time: cust.request.spawn_time,
                origin: cust.request.origin,
                dest: cust.request.dest,
                status,
                lost_reason,
                choice_set_size: cust.choice_set_size,
                station: if served { cust.station } else { None },
                detour_total: cust.detour_total,
                wait,
                total_time: wait + service,
                payment,
                reroutes: cust.reroutes,
            });
        }

        let bin = config.metrics.arrival_bin_min;
        let start = config.demand.sim_start;
        let min_bins = (config.window_min() / bin).ceil() as usize;
        let series: Vec<StationTimeSeries> = self
            .stations
            .iter()
            .enumerate()
            .map(|(i, s)| StationTimeSeries {
                station: s.spec.id.clone(),
                start_minute: start,
                queue_len: rec.queue_len[i].clone(),
                price: rec.price[i].clone(),
                cum_arrivals: rec.cum_arrivals[i].clone(),
                bin_minutes: bin,
                arrival_counts: arrival_rate_series(&self.admissions[i], start, bin, min_bins),
            })
            .collect();
        let station_revenue: Vec<f64> = self.stations.iter().map(|s| s.revenue).collect();
        let totals = RunTotals {
            seed,
            total_revenue: station_revenue.iter().sum(),
            mean_service_min: self.mean_service,
            total_chargers: config.total_chargers(),
            window_min: config.window_min(),
        };
        let summary = summarize(&outcomes, &series, totals, &config.choice, &config.metrics);
        RunOutput {
            summary,
            requests,
            outcomes,
            records: self.records,
            series,
            station_revenue,
            audit: self.audit,
            trace_hash: self.hasher.finish(),
        }
    }
}

/// Result of a single-station M/M/c run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmcSimulation {
    pub arrivals: u64,
    /// Time-averaged number waiting over `[0, last arrival]`.
    pub lq: f64,
    /// Mean wait in queue over all arrivals, minutes.
    pub wq: f64,
    /// Share of arrivals that had to wait.
    pub p_wait: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MmcEvent {
    Arrival,
    Departure(u32),
}

/// Runs one station with Poisson arrivals, exponential service, no choice,
/// and constant price, through the same station and event-list code as the
/// full simulator.
pub fn simulate_mmc(params: &MmcParams, arrivals: u64, seed: u64) -> MmcSimulation {
    use rand_distr::{Distribution, Exp};

    let mut rng = stream(seed, Stream::Validation);
    let gap = Exp::new(params.lambda).expect("lambda > 0");
    let service = Exp::new(params.mu).expect("mu > 0");
    let scheme = PricingScheme::none();
    let mut station = StationState::new(crate::domain::StationSpec {
        id: "validation".into(),
        location: Point::new(0.0, 0.0),
        chargers: params.servers,
        base_price: 1.0,
    });
    let mut events = EventQueue::new();
    events.push(gap.sample(&mut rng), MmcEvent::Arrival);

    let mut spawned: u64 = 0;
    let mut now = 0.0;
    let mut last_arrival = 0.0;
    let mut area = 0.0;
    let mut wait_sum = 0.0;
    let mut waited: u64 = 0;
    while let Some(ev) = events.pop() {
        if spawned < arrivals || ev.time <= last_arrival {
            area += station.queue_len() as f64 * (ev.time - now);
        }
        now = ev.time;
        match ev.event {
            MmcEvent::Arrival => {
                let id = spawned as u32;
                spawned += 1;
                last_arrival = now;
                match station.arrive(id, now, service.sample(&mut rng), &scheme) {
                    Admission::ServeImmediately { service_end } => {
                        events.push(service_end, MmcEvent::Departure(id));
                    }
                    Admission::Queued { .. } => waited += 1,
                }
                if spawned < arrivals {
                    events.push(now + gap.sample(&mut rng), MmcEvent::Arrival);
                }
            }
            MmcEvent::Departure(id) => {
                let done = station.complete_service(id, now, &scheme);
                wait_sum += done.record.wait();
                if let Some((next, end)) = done.started {
                    events.push(end, MmcEvent::Departure(next));
                }
            }
        }
    }
    MmcSimulation {
        arrivals: spawned,
        lq: area / last_arrival,
        wq: wait_sum / spawned as f64,
        p_wait: waited as f64 / spawned as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::OdPeriodRate;
    use crate::domain::{Rect, StationSpec, Zone};
    use crate::metrics::MetricsParams;
    use crate::oracle::mmc_metrics;

    fn one_station_config() -> ScenarioConfig {
        ScenarioConfig {
            name: String::new(),
            zones: vec![Zone {
                id: "z".into(),
                rect: Rect {
                    xmin: 0.0,
                    ymin: 0.0,
                    xmax: 10.0,
                    ymax: 10.0,
                },
            }],
            stations: vec![StationSpec {
                id: "s".into(),
                location: Point::new(5.0, 0.0),
                chargers: 1,
                base_price: 5.0,
            }],
            od_rates: vec![OdPeriodRate {
                period_start: 360.0,
                period_end: 1140.0,
                origin: "z".into(),
                dest: "z".into(),
                rate: 0.0,
            }],
            mobility: Default::default(),
            demand: Default::default(),
            choice: Default::default(),
            pricing: Default::default(),
            service: Default::default(),
            reroute_max: 1,
            seed: 1,
            replications: 1,
            metrics: MetricsParams::default(),
            output: Default::default(),
        }
    }

    fn request(id: u32, t: f64, origin: Point, dest: Point, soc: f64) -> EvRequest {
        EvRequest {
            id,
            spawn_time: t,
            origin,
            dest,
            soc,
            threshold: 0.9,
            reroutes_left: 1,
        }
    }

    #[test]
    fn zero_demand_run() {
        let out = run(&one_station_config(), 3).unwrap();
        let s = &out.summary;
        assert_eq!(s.total_requests, 0);
        assert_eq!(s.total_revenue, 0.0);
        assert_eq!(s.social_welfare, 0.0);
        assert!(out.series[0].queue_len.iter().all(|&q| q == 0));
        assert_eq!(out.series[0].queue_len.len(), 780);
    }

    #[test]
    fn single_request_hand_trace() {
        let cfg = one_station_config();
        let (o, d) = (Point::new(0.0, 0.0), Point::new(10.0, 0.0));
        let out = run_requests(&cfg, 8, vec![request(0, 400.0, o, d, 0.5)]);
        let c = &out.outcomes[0];
        // utility of the station is about -3.4 against -50, so it is
        // chosen with probability 1 - 1e-20
        assert_eq!(c.status, Status::Served);
        assert_eq!(c.wait, 0.0);
        assert_eq!(c.detour_total, 0.0);
        let rec = &out.records[0];
        assert!((rec.arrival_time - (400.0 + 6.0)).abs() < 1e-12);
        assert!((c.payment - 5.0 * rec.service_minutes() / 60.0).abs() < 1e-12);
        assert_eq!(out.summary.total_revenue, c.payment);
        assert!(out.audit.is_clean(), "{:?}", out.audit.violations);
    }

    #[test]
    fn no_reachable_station_is_lost_immediately() {
        let cfg = one_station_config();
        // station 5 mi away, 0.02 * 200 = 4 mi of range
        let out = run_requests(
            &cfg,
            1,
            vec![request(
                0,
                400.0,
                Point::new(0.0, 0.0),
                Point::new(10.0, 0.0),
                0.02,
            )],
        );
        assert_eq!(
            out.outcomes[0].lost_reason,
            Some(LostReason::EmptyChoiceSet)
        );
        assert_eq!(out.outcomes[0].choice_set_size, 0);
    }

    #[test]
    fn drive_deducts_charge_and_takes_time() {
        let mut cfg = one_station_config();
        cfg.stations[0].location = Point::new(5.0, 3.0);
        let (o, d) = (Point::new(0.0, 0.0), Point::new(10.0, 0.0));
        let out = run_requests(&cfg, 2, vec![request(0, 400.0, o, d, 0.5)]);
        assert!((out.records[0].arrival_time - 409.6).abs() < 1e-9);
        assert!((out.outcomes[0].detour_total - 6.0).abs() < 1e-12);
    }

    #[test]
    fn second_customer_waits_for_the_first() {
        let mut cfg = one_station_config();
        cfg.reroute_max = 0;
        let (o, d) = (Point::new(5.0, 0.0), Point::new(10.0, 0.0));
        let reqs = vec![request(0, 400.0, o, d, 0.5), request(1, 400.0, o, d, 0.5)];
        let reqs: Vec<_> = reqs
            .into_iter()
            .map(|mut r| {
                r.reroutes_left = 0;
                r
            })
            .collect();
        let out = run_requests(&cfg, 4, reqs);
        let first = out.records.iter().find(|r| r.customer == 0).unwrap();
        let second = out.records.iter().find(|r| r.customer == 1).unwrap();
        assert_eq!(first.wait(), 0.0);
        assert!((second.wait() - first.service_minutes()).abs() < 1e-9);
        assert!(first.arrival_index < second.arrival_index);
    }

    #[test]
    fn full_station_with_alternative_can_reroute() {
        // two stations on the path; the first is blocked by a long session
        let mut cfg = one_station_config();
        cfg.stations = vec![
            StationSpec {
                id: "s1".into(),
                location: Point::new(2.0, 0.0),
                chargers: 1,
                base_price: 5.0,
            },
            StationSpec {
                id: "s3".into(),
                location: Point::new(6.0, 0.0),
                chargers: 1,
                base_price: 5.0,
            },
        ];
        cfg.service.extra_charge_mean = 300.0;
        // keep the long sessions affordable
        cfg.choice.beta_price = -0.01;
        let (o, d) = (Point::new(0.0, 0.0), Point::new(10.0, 0.0));
        let mut rerouted = 0;
        for seed in 0..40 {
            let reqs = vec![request(0, 400.0, o, d, 0.5), request(1, 400.0, o, d, 0.5)];
            let out = run_requests(&cfg, seed, reqs);
            assert!(out.audit.is_clean());
            assert_eq!(out.summary.served + out.summary.lost, 2);
            rerouted += out.summary.reroutes;
            assert!(out.outcomes.iter().all(|o| o.reroutes <= 1));
        }
        assert!(rerouted > 0);
    }

    #[test]
    fn same_seed_same_trace() {
        let mut cfg = one_station_config();
        cfg.od_rates[0].rate = 30.0;
        let a = run(&cfg, 11).unwrap();
        let b = run(&cfg, 11).unwrap();
        assert_eq!(a.trace_hash, b.trace_hash);
        assert_eq!(a.summary, b.summary);
        assert!(a.summary.total_requests > 0);
        let c = run(&cfg, 12).unwrap();
        assert_ne!(a.trace_hash, c.trace_hash);
    }

    #[test]
    fn mmc_matches_oracle_loosely() {
        let p = MmcParams::new(1.5, 1.0, 2);
        let sim = simulate_mmc(&p, 200_000, 1);
        let exact = mmc_metrics(&p).unwrap();
        assert!((sim.lq / exact.lq - 1.0).abs() < 0.1, "{sim:?}");
        assert!((sim.wq / exact.wq - 1.0).abs() < 0.1, "{sim:?}");
        assert!((sim.p_wait - exact.p_wait).abs() < 0.05);
    }
}
