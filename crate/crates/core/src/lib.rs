//! Statevector simulation of spectral combing: a target spin chain coupled
//! to a small swept "comb" register, cooled toward its ground state by
//! repeated sweep-and-reset cycles, alongside a quantum adiabatic baseline.

pub mod analysis;
pub mod circuits;
pub mod cli;
pub mod combing;
pub mod config;
pub mod error;
pub mod models;
pub mod pauli;
pub mod qaa;
pub mod statevector;

pub use error::{Error, Result};
