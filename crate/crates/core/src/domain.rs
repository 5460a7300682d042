//! Planar geometry and the static entities of a charging network.
//!
//! Distances are Manhattan (L1) distances in miles on a flat plane. Time is
//! measured in minutes throughout the crate.

use serde::{Deserialize, Serialize};

/// A location on the plane, in miles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Axis-aligned rectangle in miles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))
    }
}

/// A traffic analysis zone. Trip ends are drawn uniformly inside `rect`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Zone {
    pub id: String,
    pub rect: Rect,
}

/// Static description of a fast-charging station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationSpec {
    pub id: String,
    pub location: Point,
    /// Number of identical chargers.
    pub chargers: u32,
    /// Base price in dollars per hour of charging.
    #[serde(default = "default_base_price")]
    pub base_price: f64,
}

fn default_base_price() -> f64 {
    5.0
}

/// Vehicle movement and charging parameters shared by the whole fleet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MobilityParams {
    /// Miles per hour.
    pub speed: f64,
    /// Driving range in miles at full charge.
    pub range_full: f64,
    /// Miles of range gained per minute of charging.
    pub charge_rate: f64,
    /// Largest detour, in miles, a driver accepts to reach a station.
    pub detour_max: f64,
}

impl Default for MobilityParams {
    fn default() -> Self {
        MobilityParams {
            speed: 50.0,
            range_full: 200.0,
            charge_rate: 3.2,
            detour_max: 10.0,
        }
    }
}

impl MobilityParams {
    /// Miles reachable with the given state of charge.
    pub fn reach(&self, soc: f64) -> f64 {
        soc * self.range_full
    }

    /// State of charge consumed by driving `miles`.
    pub fn soc_used(&self, miles: f64) -> f64 {
        miles / self.range_full
    }
}

pub fn manhattan_distance(a: Point, b: Point) -> f64 {
    (a.x - b.x).abs() + (a.y - b.y).abs()
}

/// Extra miles driven when a trip from `current` to `dest` goes through
/// `station` instead of straight to `dest`.
///
/// Never negative: the L1 metric satisfies the triangle inequality. Rounding
/// can produce tiny negative values, which are clamped to zero.
pub fn detour_distance(current: Point, dest: Point, station: Point) -> f64 {
    let via = manhattan_distance(current, station) + manhattan_distance(station, dest);
    (via - manhattan_distance(current, dest)).max(0.0)
}

/// Minutes needed to drive `dist` miles.
pub fn travel_time(dist: f64, params: &MobilityParams) -> f64 {
    dist / params.speed * 60.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn manhattan_examples() {
        assert_eq!(
            manhattan_distance(Point::new(0.0, 0.0), Point::new(0.0, 0.0)),
            0.0
        );
        assert_eq!(
            manhattan_distance(Point::new(0.0, 0.0), Point::new(10.0, 0.0)),
            10.0
        );
        assert_eq!(
            manhattan_distance(Point::new(0.0, 0.0), Point::new(5.0, 3.0)),
            8.0
        );
    }

    #[test]
    fn detour_examples() {
        let o = Point::new(0.0, 0.0);
        let d = Point::new(10.0, 0.0);
        assert_eq!(detour_distance(o, d, Point::new(5.0, 0.0)), 0.0);
        assert_eq!(detour_distance(o, d, Point::new(5.0, 3.0)), 6.0);
        assert_eq!(detour_distance(o, d, o), 0.0);
    }

    #[test]
    fn travel_time_examples() {
        let p = MobilityParams::default();
        assert_eq!(travel_time(0.0, &p), 0.0);
        assert!((travel_time(50.0, &p) - 60.0).abs() < 1e-12);
        assert!((travel_time(8.0, &p) - 9.6).abs() < 1e-12);
    }

    fn point() -> impl Strategy<Value = Point> {
        (-500.0..500.0f64, -500.0..500.0f64).prop_map(|(x, y)| Point::new(x, y))
    }

    proptest! {
        #[test]
        fn detour_is_nonnegative(a in point(), b in point(), s in point()) {
            prop_assert!(detour_distance(a, b, s) >= 0.0);
        }

        #[test]
        fn manhattan_is_a_metric(a in point(), b in point(), c in point()) {
            let ab = manhattan_distance(a, b);
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(ab, manhattan_distance(b, a));
            prop_assert!(manhattan_distance(a, c) <= ab + manhattan_distance(b, c) + 1e-9);
        }
    }
}
