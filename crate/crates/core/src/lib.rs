//! Collision-free shuttling schedules for mobile ancillae on tiled
//! unit-cell chips, plus the circuit and fault tooling needed to check them.
#![no_std]

extern crate alloc;

pub mod arch;
pub mod circuit;
pub mod code;
pub mod compiler;
pub mod emit;
pub mod error;
pub mod gf2;
pub mod metrics;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod pauli;
pub mod qsipp;
pub mod sipp;
pub mod tableau;
pub mod tsp;
pub mod validate;

pub use arch::{build_grid, Cell, ChipLayout, ComponentId, ComponentKind, NoiseConfig, Time, TimingConfig, FOREVER};
pub use circuit::StabCircuit;
pub use code::{Basis, CssCode, DataLayout};
pub use compiler::Schedule;
pub use sipp::{ReservationTable, TimeInterval};
