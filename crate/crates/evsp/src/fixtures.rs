//! Small hand-built instances used across tests and examples.

use crate::model::*;

/// Two stations with one plain and one charging spot each, one fully charged
/// 600 Wm vehicle per station (10 Wm/min charge rate, i.e. a one-hour full
/// charge), and three two-demand customers.
pub fn appendix_instance() -> Instance {
    let stations = vec![
        Station {
            id: 0,
            capacity: 2,
            charging_spots: 1,
            initial_vehicles: vec![0],
        },
        Station {
            id: 1,
            capacity: 2,
            charging_spots: 1,
            initial_vehicles: vec![1],
        },
    ];
    let vehicles = vec![
        Vehicle {
            id: 0,
            initial_station: 0,
            initial_energy: Energy::from_wm(600),
            initially_plugged: false,
        },
        Vehicle {
            id: 1,
            initial_station: 1,
            initial_energy: Energy::from_wm(600),
            initially_plugged: false,
        },
    ];
    let d = |pickup, depart, dropoff, arrive, wm| Demand {
        pickup,
        depart: TimeInstant(depart),
        dropoff,
        arrive: TimeInstant(arrive),
        energy: Energy::from_wm(wm),
    };
    let customers = vec![
        Customer {
            id: 0,
            demands: vec![d(1, 745, 0, 861, 465), d(0, 900, 1, 1011, 530)],
        },
        Customer {
            id: 1,
            demands: vec![d(0, 495, 1, 591, 475), d(1, 760, 0, 871, 455)],
        },
        Customer {
            id: 2,
            demands: vec![d(0, 895, 1, 991, 455), d(1, 1120, 0, 1241, 485)],
        },
    ];
    Instance::new(
        stations,
        vehicles,
        customers,
        Energy::from_wm(600),
        Energy::from_wm(10),
    )
}
