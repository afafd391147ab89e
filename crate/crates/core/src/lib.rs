//! Structure analysis for pencils `λE − (J−R)Q` of dissipative Hamiltonian descriptor systems.

pub mod canonical;
pub mod cli;
pub mod io;
pub mod kronecker;
pub mod linalg;
pub mod pencil;
pub mod stability;
pub mod stabilization;
