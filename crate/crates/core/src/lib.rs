//! Oscillatory associative memory on honeycomb networks of identical
//! Kuramoto oscillators.

pub mod basin;
pub mod cdw;
pub mod codec;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod localbasin;
pub mod winding;

pub use error::{Error, Result};
pub use graph::{build_honeycomb, parse_edge_list, CycleBasis, Graph, Honeycomb, HoneycombSpec};
pub use num_bigint::BigUint;
pub use winding::{d_cc, winding_number, winding_vector, WindingVector};
