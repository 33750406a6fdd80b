//! Modeling and exact/heuristic solving toolkit for the electric vehicle
//! sharing problem (EVSP): space-time networks, four MILP formulations, an
//! external-solver bridge, feasibility checking, oracles, and seeded
//! instance generators.

pub mod fixtures;
pub mod model;
pub mod network;
pub mod reachability;
pub mod par;
