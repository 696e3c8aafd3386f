pub mod cluster;
pub mod error;
pub mod factors;
pub mod graph;
pub mod matpower;
pub mod network;
pub mod report;
pub mod spectral;
pub mod switching;

pub use error::{Error, ErrorKind, Result};
pub use network::{Bus, Capacity, Injections, Line, LineSet, PowerNetwork, RebalanceMode};
