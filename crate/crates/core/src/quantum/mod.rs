//! The NC Heisenberg algebra in flat gauge: grid states, differential
//! operators, basis-change kernels and the oscillator eigensystem.
//!
//! Only the simply connected flat gauge is modelled: all measure functions
//! are 1 and every free gauge field vanishes, so the momentum-basis position
//! operators are `x̂ = iħ∂_{p_x} − (θ/2)p_y`, `ŷ = iħ∂_{p_y} + (θ/2)p_x`.

pub mod eigen;
pub mod grid;
pub mod kernels;
pub mod operators;
pub mod spectrum;

pub use eigen::{eigenfunction, momentum_width, oscillator_grid};
pub use grid::{Axis, Basis, Grid2, GridFunction};
pub use kernels::{basis_kernel, transform, transform_at, transform_conjugate, GaugeChoice};
pub use operators::{apply_angular_momentum, apply_hamiltonian, eigen_residual, free_particle_eigencheck, Stencil};
pub use spectrum::{check_level, effective_frequency, energy, hermite, levels, SpectrumEntry};
