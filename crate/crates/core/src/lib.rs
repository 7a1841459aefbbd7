//! Simulator and analysis toolkit for dynamic fragment allocation in
//! non-replicated distributed databases.
//!
//! Four migration policies (optimal access counters, threshold, NNA, FNA)
//! run against reproducible workloads on a weighted site graph. The threshold
//! policy's steady state is checked against an exact Markov-chain solution in
//! [`oracle`].
//!
//! Routing and the oracle are generic over [`Scalar`], so they run on `f32`,
//! `f64` or exact [`BigRational`](num_rational::BigRational). The aliases
//! below name the common instantiations.

pub mod allocation;
pub mod experiment;
pub mod fixtures;
pub mod linalg;
pub mod num;
pub mod oracle;
pub mod policies;
pub mod sim;
pub mod topology;
pub mod workload;

use num_rational::BigRational;

pub use allocation::{
    apply_migration, AccessEvent, AllocationError, AllocationPolicy, CounterMatrix, Decision,
    Fragment, FragmentId, MigrationDecision, Placement, TriggerReason,
};
pub use num::Scalar;
pub use oracle::{brute_force_stationary, owner_access_probability, threshold_stationary};
pub use policies::{Policy, PolicyConfig};
pub use sim::{estimate_os, run, DecisionLogMode, FragmentSpec, SimError, SimMetrics};
pub use topology::{Link, SiteId, TopologyError};
pub use workload::{symmetric_spec, Oscillation, WorkloadSpec, WorkloadStream};

pub type Topology = topology::Topology<f64>;
pub type ExactTopology = topology::Topology<BigRational>;

pub type SimConfig = sim::SimConfig<f64>;

pub type ChainParams = oracle::ChainParams<f64>;
pub type ExactChainParams = oracle::ChainParams<BigRational>;
pub type StationaryResult = oracle::StationaryResult<f64>;
pub type ExactStationaryResult = oracle::StationaryResult<BigRational>;
