//! Per-vehicle achievable-demand analysis by forward label propagation, plus
//! customer pruning and heterogeneous (per-vehicle) network construction.
//!
//! Labels are optimistic: a single remaining-energy value per node assumes
//! the vehicle can always recharge while parked at a station that has any
//! charging facility, ignoring contention for chargers. A demand pruned here
//! is infeasible even under that relaxation.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{CustomerId, Energy, Instance, StationId, Vehicle};
use crate::network::{Arc, ArcKind, Network, NodeRef};
use crate::par;

/// (customer id, index within the customer's demand list).
pub type DemandKey = (CustomerId, usize);

#[derive(Clone, Debug)]
pub struct LabelResult {
    /// Best remaining energy per reachable node; unreachable nodes absent.
    pub labels: BTreeMap<NodeRef, Energy>,
    /// Demand arc ids whose tail label covers the required energy.
    pub achievable_arcs: Vec<usize>,
}

/// Forward pass over nodes in increasing time order (stations in id order at
/// equal times; order is irrelevant since demand arcs strictly advance time).
/// `has_charger[s]` gates the recharge credit on connecting arcs.
pub fn propagate_labels(
    net: &Network,
    has_charger: &[bool],
    start: StationId,
    start_energy: Energy,
    capacity: Energy,
) -> LabelResult {
    let mut labels: BTreeMap<NodeRef, Energy> = BTreeMap::new();
    for index in 0..=net.horizon() {
        for station in 0..net.stations() {
            let node = NodeRef { station, index };
            if node.index == 0 {
                if station == start && net.retained_indices(station).contains(&0) {
                    labels.insert(node, start_energy);
                }
                continue;
            }
            let mut best: Option<Energy> = None;
            let mut consider = |cand: Energy| {
                if best.is_none_or(|b| cand > b) {
                    best = Some(cand);
                }
            };
            if let Some(conn) = net.connecting_in(node) {
                let arc = net.arc(conn);
                if let Some(&lab) = labels.get(&arc.from) {
                    if has_charger[station] {
                        consider((lab + arc.energy).min(capacity));
                    } else {
                        consider(lab);
                    }
                }
            }
            for &id in net.demand_in(node) {
                let arc = net.arc(id);
                if let Some(&lab) = labels.get(&arc.from) {
                    let rem = lab - arc.energy;
                    if !rem.is_negative() {
                        consider(rem);
                    }
                }
            }
            if let Some(b) = best {
                labels.insert(node, b);
            }
        }
    }
    let achievable_arcs = net
        .demand_arcs()
        .filter(|(_, arc)| {
            labels
                .get(&arc.from)
                .is_some_and(|&lab| !(lab - arc.energy).is_negative())
        })
        .map(|(id, _)| id)
        .collect();
    LabelResult {
        labels,
        achievable_arcs,
    }
}

fn charger_flags(inst: &Instance) -> Vec<bool> {
    inst.stations.iter().map(|s| s.charging_spots > 0).collect()
}

/// Demands achievable by `v` on the homogeneous network.
pub fn achievable_demands(inst: &Instance, net: &Network, v: &Vehicle) -> BTreeSet<DemandKey> {
    let res = propagate_labels(
        net,
        &charger_flags(inst),
        v.initial_station,
        v.initial_energy,
        inst.battery_capacity,
    );
    res.achievable_arcs
        .iter()
        .map(|&id| match net.arc(id).kind {
            ArcKind::Demand { customer, demand } => (customer, demand),
            ArcKind::Connecting => unreachable!(),
        })
        .collect()
}

/// Achievability sets for every vehicle; vehicles are analyzed in parallel.
pub fn achievability_all(inst: &Instance, net: &Network) -> Vec<BTreeSet<DemandKey>> {
    par::map_indices(inst.vehicles.len(), |v| {
        achievable_demands(inst, net, &inst.vehicles[v])
    })
}

/// Sequential twin of [`achievability_all`] for benchmarking.
pub fn achievability_all_seq(inst: &Instance, net: &Network) -> Vec<BTreeSet<DemandKey>> {
    par::map_indices_seq(inst.vehicles.len(), |v| {
        achievable_demands(inst, net, &inst.vehicles[v])
    })
}

/// Drop every customer with a demand achievable by no vehicle; all its
/// demands leave all sets. A single pass suffices: removal never invalidates
/// other labels under the optimistic relaxation.
pub fn prune_customers(
    inst: &Instance,
    sets: &mut [BTreeSet<DemandKey>],
) -> Vec<CustomerId> {
    let mut union: BTreeSet<DemandKey> = BTreeSet::new();
    for set in sets.iter() {
        union.extend(set.iter().copied());
    }
    let removed: Vec<CustomerId> = inst
        .customers
        .iter()
        .filter(|c| {
            (0..c.demands.len()).any(|k| !union.contains(&(c.id, k)))
        })
        .map(|c| c.id)
        .collect();
    for set in sets.iter_mut() {
        set.retain(|&(c, _)| !removed.contains(&c));
    }
    removed
}

/// Nodes exactly at `I^v_s ∪ {m}` per station, demand arcs only for `v`'s
/// achievable demands, connecting arcs between consecutive retained indices.
pub fn build_heterogeneous(
    inst: &Instance,
    set: &BTreeSet<DemandKey>,
    _v: &Vehicle,
) -> Network {
    let m = inst.horizon();
    let mut retained: Vec<BTreeSet<usize>> = vec![BTreeSet::from([0, m]); inst.stations.len()];
    let mut demand_arcs = Vec::new();
    for d in inst.demands() {
        if !set.contains(&(d.customer, d.index)) {
            continue;
        }
        let i = inst.time_index(d.demand.depart).unwrap();
        let j = inst.time_index(d.demand.arrive).unwrap();
        retained[d.demand.pickup].insert(i);
        retained[d.demand.dropoff].insert(j);
        demand_arcs.push(Arc {
            kind: ArcKind::Demand {
                customer: d.customer,
                demand: d.index,
            },
            from: NodeRef {
                station: d.demand.pickup,
                index: i,
            },
            to: NodeRef {
                station: d.demand.dropoff,
                index: j,
            },
            energy: d.demand.energy,
        });
    }
    Network::assemble(
        inst.times().to_vec(),
        inst.charge_rate,
        retained.into_iter().map(|s| s.into_iter().collect()).collect(),
        demand_arcs,
    )
}

/// `Ī_s`: per station, the union over vehicles of retained indices with an
/// incoming demand arc in that vehicle's network.
pub fn arriving_indices(nets: &[Network]) -> Vec<BTreeSet<usize>> {
    let stations = nets.first().map_or(0, Network::stations);
    let mut out = vec![BTreeSet::new(); stations];
    for net in nets {
        for (_, arc) in net.demand_arcs() {
            out[arc.to.station].insert(arc.to.index);
        }
    }
    out
}
