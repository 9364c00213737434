//! A small SPICE-style simulator for BJT current mirrors and memristor
//! circuits.
//!
//! Netlists are parsed and elaborated by [`netlist`], device equations live
//! in [`devices`], the MNA/Newton machinery in [`solver`], and the analyses
//! (operating point, DC sweep, transient, Fourier, power) in [`analyses`].
//!
//! ```
//! use mirrorsim::{analyses, netlist, solver::Tolerances};
//!
//! let circuit = netlist::parse_circuit("divider\nV1 1 0 DC 10\nR1 1 2 1k\nR2 2 0 1k\n").unwrap();
//! let op = analyses::run_op(&circuit, &Tolerances::default()).unwrap();
//! assert!((op.node_voltage(&circuit, "2").unwrap() - 5.0).abs() < 1e-9);
//! ```

pub mod analyses;
pub mod devices;
pub mod exec;
pub mod netlist;
pub mod solver;

pub use exec::Execution;
