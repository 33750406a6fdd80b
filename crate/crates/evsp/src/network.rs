//! Space-time networks: nodes are (station, time-index) pairs, demand arcs
//! move a vehicle between stations through time, connecting arcs keep it
//! parked (and possibly recharging) at one station.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::model::{CustomerId, Energy, Instance, StationId, TimeInstant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeRef {
    pub station: StationId,
    pub index: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcKind {
    /// `demand` indexes the owning customer's demand list for plain networks,
    /// or the flat demand-copy list for split instances.
    Demand { customer: CustomerId, demand: usize },
    Connecting,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub kind: ArcKind,
    pub from: NodeRef,
    pub to: NodeRef,
    /// Consumed for demand arcs, recharged for connecting arcs.
    pub energy: Energy,
}

impl Arc {
    pub fn is_demand(&self) -> bool {
        matches!(self.kind, ArcKind::Demand { .. })
    }
}

#[derive(Clone, Debug)]
pub struct Network {
    times: Vec<TimeInstant>,
    charge_rate: Energy,
    /// Retained time indices per station, sorted ascending.
    retained: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
    demand_in: BTreeMap<NodeRef, Vec<usize>>,
    demand_out: BTreeMap<NodeRef, Vec<usize>>,
    conn_in: BTreeMap<NodeRef, usize>,
    conn_out: BTreeMap<NodeRef, usize>,
}

impl Network {
    /// Build from retained node indices and demand arcs; connecting arcs are
    /// added between consecutive retained indices at each station, with
    /// energy `mu * dt`.
    pub fn assemble(
        times: Vec<TimeInstant>,
        charge_rate: Energy,
        retained: Vec<Vec<usize>>,
        demand_arcs: Vec<Arc>,
    ) -> Network {
        let mut arcs = demand_arcs;
        for (station, idxs) in retained.iter().enumerate() {
            for w in idxs.windows(2) {
                let (prev, next) = (w[0], w[1]);
                let dt = times[next].0 - times[prev].0;
                arcs.push(Arc {
                    kind: ArcKind::Connecting,
                    from: NodeRef {
                        station,
                        index: prev,
                    },
                    to: NodeRef {
                        station,
                        index: next,
                    },
                    energy: charge_rate.over_minutes(dt),
                });
            }
        }
        let mut net = Network {
            times,
            charge_rate,
            retained,
            arcs,
            demand_in: BTreeMap::new(),
            demand_out: BTreeMap::new(),
            conn_in: BTreeMap::new(),
            conn_out: BTreeMap::new(),
        };
        for (id, arc) in net.arcs.iter().enumerate() {
            match arc.kind {
                ArcKind::Demand { .. } => {
                    net.demand_out.entry(arc.from).or_default().push(id);
                    net.demand_in.entry(arc.to).or_default().push(id);
                }
                ArcKind::Connecting => {
                    net.conn_out.insert(arc.from, id);
                    net.conn_in.insert(arc.to, id);
                }
            }
        }
        net
    }

    pub fn times(&self) -> &[TimeInstant] {
        &self.times
    }

    pub fn horizon(&self) -> usize {
        self.times.len() - 1
    }

    pub fn charge_rate(&self) -> Energy {
        self.charge_rate
    }

    pub fn stations(&self) -> usize {
        self.retained.len()
    }

    pub fn retained_indices(&self, station: StationId) -> &[usize] {
        &self.retained[station]
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: usize) -> &Arc {
        &self.arcs[id]
    }

    pub fn demand_arcs(&self) -> impl Iterator<Item = (usize, &Arc)> {
        self.arcs.iter().enumerate().filter(|(_, a)| a.is_demand())
    }

    pub fn demand_in(&self, node: NodeRef) -> &[usize] {
        self.demand_in.get(&node).map_or(&[], Vec::as_slice)
    }

    pub fn demand_out(&self, node: NodeRef) -> &[usize] {
        self.demand_out.get(&node).map_or(&[], Vec::as_slice)
    }

    pub fn connecting_in(&self, node: NodeRef) -> Option<usize> {
        self.conn_in.get(&node).copied()
    }

    pub fn connecting_out(&self, node: NodeRef) -> Option<usize> {
        self.conn_out.get(&node).copied()
    }

    /// DOT rendering for eyeballing small networks.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph spacetime {\n  rankdir=LR;\n");
        for (s, idxs) in self.retained.iter().enumerate() {
            for &i in idxs {
                let _ = writeln!(out, "  \"s{s}_i{i}\" [label=\"{s}@{}\"];", self.times[i]);
            }
        }
        for arc in &self.arcs {
            let style = match arc.kind {
                ArcKind::Demand { customer, demand } => {
                    format!("label=\"c{customer}d{demand} E={}\"", arc.energy)
                }
                ArcKind::Connecting => format!("style=dashed, label=\"{}\"", arc.energy),
            };
            let _ = writeln!(
                out,
                "  \"s{}_i{}\" -> \"s{}_i{}\" [{}];",
                arc.from.station, arc.from.index, arc.to.station, arc.to.index, style
            );
        }
        out.push_str("}\n");
        out
    }
}

/// One node per (station, index), one demand arc per demand, one connecting
/// arc per station per consecutive index pair.
pub fn build_homogeneous(inst: &Instance) -> Network {
    let times = inst.times().to_vec();
    let all: Vec<usize> = (0..times.len()).collect();
    let retained = vec![all; inst.stations.len()];
    let demand_arcs = inst
        .demands()
        .map(|d| Arc {
            kind: ArcKind::Demand {
                customer: d.customer,
                demand: d.index,
            },
            from: NodeRef {
                station: d.demand.pickup,
                index: inst.time_index(d.demand.depart).expect("depart on timeline"),
            },
            to: NodeRef {
                station: d.demand.dropoff,
                index: inst.time_index(d.demand.arrive).expect("arrive on timeline"),
            },
            energy: d.demand.energy,
        })
        .collect();
    Network::assemble(times, inst.charge_rate, retained, demand_arcs)
}

/// Arc smoothing + node deleting to fixpoint: drop every node whose only
/// incident arcs are its two connecting arcs, merging those into one arc with
/// the summed energy. Indices 0 and m stay at every station (initial-state
/// constraints and surplus cuts attach there).
pub fn smooth_and_prune(net: &Network) -> Network {
    let m = net.horizon();
    let retained = (0..net.stations())
        .map(|station| {
            net.retained_indices(station)
                .iter()
                .copied()
                .filter(|&index| {
                    let node = NodeRef { station, index };
                    index == 0
                        || index == m
                        || !net.demand_in(node).is_empty()
                        || !net.demand_out(node).is_empty()
                })
                .collect()
        })
        .collect();
    let demand_arcs = net
        .demand_arcs()
        .map(|(_, a)| *a)
        .collect();
    Network::assemble(
        net.times().to_vec(),
        net.charge_rate(),
        retained,
        demand_arcs,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::*;

    #[test]
    fn homogeneous_counts_match_appendix() {
        let inst = fixtures::appendix_instance();
        let net = build_homogeneous(&inst);
        assert_eq!(net.stations(), 2);
        assert_eq!(net.retained_indices(0).len(), 13);
        assert_eq!(net.retained_indices(1).len(), 13);
        assert_eq!(net.demand_arcs().count(), 6);
        let connecting = net.arcs().iter().filter(|a| !a.is_demand()).count();
        assert_eq!(connecting, 2 * 12);
    }

    #[test]
    fn connecting_energy_is_rate_times_gap() {
        let inst = fixtures::appendix_instance();
        let net = build_homogeneous(&inst);
        // 871 -> 895 is a 24-minute gap at 10 Wm/min.
        let i = inst.time_index(TimeInstant(871)).unwrap();
        let j = inst.time_index(TimeInstant(895)).unwrap();
        assert_eq!(j, i + 1);
        let arc = net.arc(net.connecting_in(NodeRef { station: 0, index: j }).unwrap());
        assert_eq!(arc.energy, Energy::from_wm(240));
        // A 30-minute gap would carry 300 Wm.
        assert_eq!(inst.charge_rate.over_minutes(30), Energy::from_wm(300));
    }

    #[test]
    fn zero_demand_instance_is_a_path() {
        let inst = Instance::new(
            vec![Station {
                id: 0,
                capacity: 1,
                charging_spots: 0,
                initial_vehicles: vec![],
            }],
            vec![],
            vec![],
            Energy::from_wm(1),
            Energy::from_wm(1),
        );
        let net = build_homogeneous(&inst);
        assert_eq!(net.retained_indices(0), &[0]);
        assert_eq!(net.arcs().len(), 0);
    }

    #[test]
    fn smoothing_keeps_demand_touched_nodes() {
        let inst = fixtures::appendix_instance();
        let net = smooth_and_prune(&build_homogeneous(&inst));
        let station0: Vec<i64> = net
            .retained_indices(0)
            .iter()
            .map(|&i| net.times()[i].0)
            .collect();
        assert_eq!(station0, vec![494, 495, 861, 871, 895, 900, 1241]);
        assert_eq!(net.demand_arcs().count(), 6);
        // Total recharge along a station's path is preserved.
        let total = |n: &Network, s: StationId| -> Energy {
            n.arcs()
                .iter()
                .filter(|a| !a.is_demand() && a.from.station == s)
                .fold(Energy::zero(), |acc, a| acc + a.energy)
        };
        let full = build_homogeneous(&inst);
        assert_eq!(total(&net, 0), total(&full, 0));
        assert_eq!(total(&net, 1), total(&full, 1));
        // Fixpoint: smoothing twice changes nothing.
        let again = smooth_and_prune(&net);
        assert_eq!(again.retained_indices(0), net.retained_indices(0));
        assert_eq!(again.arcs().len(), net.arcs().len());
    }
}
