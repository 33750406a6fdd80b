//! Core instance model: stations, vehicles, customers, demands, and the
//! derived discrete timeline.
//!
//! Units: time is integral minutes since midnight, energy is exact rational
//! watt-minutes (Wm; 1 kWh = 60,000 Wm). All model arithmetic is exact.

use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub type StationId = usize;
pub type VehicleId = usize;
pub type CustomerId = usize;

/// A discrete time instant in minutes.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct TimeInstant(pub i64);

impl TimeInstant {
    pub fn minutes(self) -> i64 {
        self.0
    }
}

impl fmt::Display for TimeInstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Exact rational energy in watt-minutes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Energy(Rational64);

pub const WM_PER_KWH: i64 = 60_000;

impl Energy {
    pub const fn zero() -> Self {
        Energy(Rational64::new_raw(0, 1))
    }

    pub fn new(numer: i64, denom: i64) -> Self {
        Energy(Rational64::new(numer, denom))
    }

    pub fn from_wm(wm: i64) -> Self {
        Energy(Rational64::from_integer(wm))
    }

    pub fn from_kwh(kwh: i64) -> Self {
        Energy(Rational64::from_integer(kwh * WM_PER_KWH))
    }

    pub fn as_ratio(self) -> Rational64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub fn is_negative(self) -> bool {
        self.0.is_negative()
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Energy accumulated by charging for `minutes` at this per-minute rate.
    pub fn over_minutes(self, minutes: i64) -> Self {
        Energy(self.0 * Rational64::from_integer(minutes))
    }
}

impl From<Rational64> for Energy {
    fn from(r: Rational64) -> Self {
        Energy(r)
    }
}

impl std::ops::Add for Energy {
    type Output = Energy;
    fn add(self, rhs: Energy) -> Energy {
        Energy(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Energy {
    type Output = Energy;
    fn sub(self, rhs: Energy) -> Energy {
        Energy(self.0 - rhs.0)
    }
}

impl std::ops::AddAssign for Energy {
    fn add_assign(&mut self, rhs: Energy) {
        self.0 += rhs.0;
    }
}

impl std::ops::SubAssign for Energy {
    fn sub_assign(&mut self, rhs: Energy) {
        self.0 -= rhs.0;
    }
}

impl fmt::Display for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom() == &1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl std::str::FromStr for Energy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_int = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|e| format!("bad energy literal {t:?}: {e}"))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let d = parse_int(d)?;
                if d == 0 {
                    return Err("zero denominator".into());
                }
                Ok(Energy(Rational64::new(parse_int(n)?, d)))
            }
            None => Ok(Energy(Rational64::from_integer(parse_int(s)?))),
        }
    }
}

impl Serialize for Energy {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Energy {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Energy;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a \"p/q\" string in watt-minutes")
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Energy, E> {
                Ok(Energy::from_wm(v))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Energy, E> {
                Ok(Energy::from_wm(v as i64))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Energy, E> {
                v.parse().map_err(E::custom)
            }
        }
        deserializer.deserialize_any(V)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Station {
    pub id: StationId,
    /// Number of parking spaces.
    pub capacity: u32,
    /// Number of parking spaces equipped with a charging facility.
    pub charging_spots: u32,
    pub initial_vehicles: Vec<VehicleId>,
}

impl Station {
    pub fn plain_spots(&self) -> u32 {
        self.capacity - self.charging_spots
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vehicle {
    pub id: VehicleId,
    pub initial_station: StationId,
    pub initial_energy: Energy,
    /// True when the vehicle starts in a charger-equipped spot.
    pub initially_plugged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demand {
    pub pickup: StationId,
    pub depart: TimeInstant,
    pub dropoff: StationId,
    pub arrive: TimeInstant,
    pub energy: Energy,
}

impl Demand {
    pub fn rental_minutes(&self) -> i64 {
        self.arrive.0 - self.depart.0
    }

    pub fn overlaps(&self, other: &Demand) -> bool {
        self.depart < other.arrive && other.depart < self.arrive
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Customer {
    pub id: CustomerId,
    pub demands: Vec<Demand>,
}

/// An EVSP instance. The timeline is derived on construction: index 0 is the
/// synthetic start `t_0` (one minute before the earliest demand endpoint) and
/// indices `1..=m` enumerate the sorted distinct demand endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub stations: Vec<Station>,
    pub vehicles: Vec<Vehicle>,
    pub customers: Vec<Customer>,
    pub battery_capacity: Energy,
    /// Energy supplied by one charging facility per minute.
    pub charge_rate: Energy,
    times: Vec<TimeInstant>,
}

/// Sorted distinct demand endpoints preceded by the synthetic start instant.
pub fn derive_timeline<'a>(demands: impl Iterator<Item = &'a Demand>) -> Vec<TimeInstant> {
    let mut endpoints: Vec<TimeInstant> = demands.flat_map(|d| [d.depart, d.arrive]).collect();
    endpoints.sort_unstable();
    endpoints.dedup();
    let t0 = TimeInstant(endpoints.first().map_or(0, |t| t.0 - 1));
    let mut times = Vec::with_capacity(endpoints.len() + 1);
    times.push(t0);
    times.extend(endpoints);
    times
}

impl Instance {
    pub fn new(
        stations: Vec<Station>,
        vehicles: Vec<Vehicle>,
        customers: Vec<Customer>,
        battery_capacity: Energy,
        charge_rate: Energy,
    ) -> Self {
        let times = derive_timeline(customers.iter().flat_map(|c| c.demands.iter()));
        Instance {
            stations,
            vehicles,
            customers,
            battery_capacity,
            charge_rate,
            times,
        }
    }

    pub fn times(&self) -> &[TimeInstant] {
        &self.times
    }

    /// Largest time index `m`; the index set is `0..=m`.
    pub fn horizon(&self) -> usize {
        self.times.len() - 1
    }

    pub fn time_index(&self, t: TimeInstant) -> Option<usize> {
        self.times.binary_search(&t).ok()
    }

    /// All demands in customer order, with their flat ordinal.
    pub fn demands(&self) -> impl Iterator<Item = DemandRef<'_>> {
        self.customers
            .iter()
            .flat_map(|c| c.demands.iter().enumerate().map(move |(k, d)| (c.id, k, d)))
            .enumerate()
            .map(|(flat, (customer, index, demand))| DemandRef {
                customer,
                index,
                flat,
                demand,
            })
    }

    pub fn demand_count(&self) -> usize {
        self.customers.iter().map(|c| c.demands.len()).sum()
    }

    /// Flat ordinal of demand `index` of `customer` (instance order).
    pub fn flat_demand_id(&self, customer: CustomerId, index: usize) -> usize {
        self.customers[..customer]
            .iter()
            .map(|c| c.demands.len())
            .sum::<usize>()
            + index
    }

    pub fn vehicles_at(&self, s: StationId) -> impl Iterator<Item = &Vehicle> {
        self.vehicles.iter().filter(move |v| v.initial_station == s)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DemandRef<'a> {
    pub customer: CustomerId,
    /// Position within the customer's demand list.
    pub index: usize,
    /// Flat ordinal across the whole instance.
    pub flat: usize,
    pub demand: &'a Demand,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub severity: Severity,
    pub entity: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}: {}", self.entity, self.rule)
    }
}

fn err(entity: impl Into<String>, rule: impl Into<String>) -> Violation {
    Violation {
        severity: Severity::Error,
        entity: entity.into(),
        rule: rule.into(),
    }
}

fn warn(entity: impl Into<String>, rule: impl Into<String>) -> Violation {
    Violation {
        severity: Severity::Warning,
        entity: entity.into(),
        rule: rule.into(),
    }
}

/// Check every structural invariant of the instance. Errors mark genuinely
/// broken data; the only warning is a demand requiring more energy than the
/// battery holds (legal, just unservable).
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let n_stations = inst.stations.len();

    if inst.battery_capacity < Energy::zero() {
        out.push(err("instance", "battery capacity L must be non-negative"));
    }
    if inst.charge_rate <= Energy::zero() {
        out.push(err("instance", "charge rate mu must be positive"));
    }

    for (pos, s) in inst.stations.iter().enumerate() {
        let entity = format!("station {}", s.id);
        if s.id != pos {
            out.push(err(&entity, "station ids must be dense and in order"));
        }
        if s.capacity == 0 {
            out.push(err(&entity, "capacity C_s must be positive"));
        }
        if s.charging_spots > s.capacity {
            out.push(err(&entity, "R_s <= C_s"));
        }
        if s.initial_vehicles.len() as u32 > s.capacity {
            out.push(err(&entity, "initial vehicle count must not exceed C_s"));
        }
        let plugged = s
            .initial_vehicles
            .iter()
            .filter(|&&v| inst.vehicles.get(v).is_some_and(|v| v.initially_plugged))
            .count() as u32;
        if plugged > s.charging_spots {
            out.push(err(&entity, "initially plugged vehicles must not exceed R_s"));
        }
        for &v in &s.initial_vehicles {
            if inst.vehicles.get(v).map(|v| v.initial_station) != Some(s.id) {
                out.push(err(
                    &entity,
                    format!("initial vehicle {v} does not reference this station"),
                ));
            }
        }
    }

    for (pos, v) in inst.vehicles.iter().enumerate() {
        let entity = format!("vehicle {}", v.id);
        if v.id != pos {
            out.push(err(&entity, "vehicle ids must be dense and in order"));
        }
        if v.initial_station >= n_stations {
            out.push(err(&entity, "initial station must exist"));
        } else if !inst.stations[v.initial_station]
            .initial_vehicles
            .contains(&v.id)
        {
            out.push(err(&entity, "vehicle missing from its station's initial list"));
        }
        if v.initial_energy < Energy::zero() || v.initial_energy > inst.battery_capacity {
            out.push(err(&entity, "initial energy must lie in [0, L]"));
        }
    }

    for (pos, c) in inst.customers.iter().enumerate() {
        let entity = format!("customer {}", c.id);
        if c.id != pos {
            out.push(err(&entity, "customer ids must be dense and in order"));
        }
        if c.demands.is_empty() {
            out.push(err(&entity, "demand list must be non-empty"));
        }
        for (k, d) in c.demands.iter().enumerate() {
            let entity = format!("customer {} demand {k}", c.id);
            if d.pickup >= n_stations || d.dropoff >= n_stations {
                out.push(err(&entity, "demand references a missing station"));
            }
            if d.depart >= d.arrive {
                out.push(err(&entity, "depart < arrive"));
            }
            if d.energy <= Energy::zero() {
                out.push(err(&entity, "required energy must be positive"));
            }
            if d.energy > inst.battery_capacity {
                out.push(warn(&entity, "required energy exceeds battery capacity"));
            }
            for (k2, d2) in c.demands.iter().enumerate().skip(k + 1) {
                if d.overlaps(d2) {
                    out.push(err(
                        format!("customer {}", c.id),
                        format!("demands {k} and {k2} overlap in time"),
                    ));
                }
            }
        }
    }
    out
}

pub fn has_errors(violations: &[Violation]) -> bool {
    violations.iter().any(|v| v.severity == Severity::Error)
}

/// Re-plug vehicles so that the number of *empty* charging spots is maximal:
/// at each station vehicles fill plain spots first (in vehicle id order), and
/// only the overflow is plugged in.
pub fn initial_distribution(inst: &Instance) -> Instance {
    let mut out = inst.clone();
    for s in &out.stations {
        let mut ids = s.initial_vehicles.clone();
        ids.sort_unstable();
        let plain = s.plain_spots() as usize;
        for (pos, &v) in ids.iter().enumerate() {
            out.vehicles[v].initially_plugged = pos >= plain;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RentalStats {
    pub total_minutes: i64,
    pub demand_count: usize,
    /// Exact mean rental time per demand.
    pub ratio: Rational64,
}

pub fn customer_rental_stats(c: &Customer) -> RentalStats {
    let total: i64 = c.demands.iter().map(Demand::rental_minutes).sum();
    let count = c.demands.len().max(1);
    RentalStats {
        total_minutes: total,
        demand_count: c.demands.len(),
        ratio: Rational64::new(total, count as i64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn energy_round_trips_through_strings() {
        for e in [
            Energy::from_wm(0),
            Energy::from_wm(600),
            Energy::new(52_000, 3),
            Energy::new(-5, 2),
        ] {
            assert_eq!(e.to_string().parse::<Energy>().unwrap(), e);
        }
        assert_eq!("3/6".parse::<Energy>().unwrap(), Energy::new(1, 2));
        assert!("1/0".parse::<Energy>().is_err());
    }

    #[test]
    fn timeline_has_synthetic_start() {
        let inst = fixtures::appendix_instance();
        assert_eq!(inst.horizon(), 12);
        assert_eq!(inst.times()[0], TimeInstant(494));
        assert_eq!(inst.times()[1], TimeInstant(495));
        assert_eq!(*inst.times().last().unwrap(), TimeInstant(1241));
        let sorted = inst.times().windows(2).all(|w| w[0] < w[1]);
        assert!(sorted);
    }

    #[test]
    fn appendix_instance_is_valid() {
        let inst = fixtures::appendix_instance();
        assert_eq!(validate_instance(&inst), vec![]);
    }

    #[test]
    fn equal_endpoints_are_rejected() {
        let mut inst = fixtures::appendix_instance();
        inst.customers[0].demands[0].arrive = inst.customers[0].demands[0].depart;
        let vs = validate_instance(&inst);
        assert!(vs.iter().any(|v| v.rule.contains("depart < arrive")));
    }

    #[test]
    fn charger_overflow_is_rejected() {
        let mut inst = fixtures::appendix_instance();
        inst.stations[0].charging_spots = inst.stations[0].capacity + 1;
        let vs = validate_instance(&inst);
        assert!(vs.iter().any(|v| v.rule.contains("R_s <= C_s")));
    }

    #[test]
    fn oversized_demand_is_a_warning() {
        let mut inst = fixtures::appendix_instance();
        inst.customers[0].demands[0].energy = Energy::from_wm(601);
        let vs = validate_instance(&inst);
        assert!(!has_errors(&vs));
        assert!(vs.iter().any(|v| v.severity == Severity::Warning));
    }

    fn station_with_vehicles(capacity: u32, chargers: u32, n: usize) -> Instance {
        let stations = vec![Station {
            id: 0,
            capacity,
            charging_spots: chargers,
            initial_vehicles: (0..n).collect(),
        }];
        let vehicles = (0..n)
            .map(|id| Vehicle {
                id,
                initial_station: 0,
                initial_energy: Energy::from_wm(100),
                initially_plugged: true,
            })
            .collect();
        Instance::new(
            stations,
            vehicles,
            vec![],
            Energy::from_wm(100),
            Energy::from_wm(1),
        )
    }

    #[test]
    fn initial_distribution_fills_plain_spots_first() {
        let counts = |inst: &Instance| {
            inst.vehicles
                .iter()
                .filter(|v| v.initially_plugged)
                .count()
        };
        assert_eq!(counts(&initial_distribution(&station_with_vehicles(4, 2, 2))), 0);
        assert_eq!(counts(&initial_distribution(&station_with_vehicles(4, 2, 3))), 1);
        // All-charger station: everyone plugs in.
        assert_eq!(counts(&initial_distribution(&station_with_vehicles(3, 3, 2))), 2);
        // Idempotent.
        let once = initial_distribution(&station_with_vehicles(4, 2, 3));
        assert_eq!(initial_distribution(&once), once);
    }

    #[test]
    fn rental_stats_match_appendix() {
        let inst = fixtures::appendix_instance();
        let stats: Vec<_> = inst.customers.iter().map(customer_rental_stats).collect();
        assert_eq!(stats[0].total_minutes, 227);
        assert_eq!(stats[0].demand_count, 2);
        assert_eq!(stats[0].ratio, Rational64::new(227, 2));
        assert_eq!(stats[1].total_minutes, 207);
        assert_eq!(stats[2].total_minutes, 217);
        let single = Customer {
            id: 0,
            demands: vec![Demand {
                pickup: 0,
                depart: TimeInstant(0),
                dropoff: 1,
                arrive: TimeInstant(60),
                energy: Energy::from_wm(1),
            }],
        };
        assert_eq!(customer_rental_stats(&single).ratio, Rational64::from_integer(60));
    }
}
