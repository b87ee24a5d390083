//! Quantum-walk kernels on lattice orbit spaces `Z^N / Gamma`.
//!
//! Kernels on the quotient are assembled as image sums over the group,
//! weighted by a one-dimensional unitary representation, and compared with
//! exact diagonalization of the corresponding finite Hamiltonians.

pub mod cli;
pub mod error;
pub mod group;
pub mod kernel;
pub mod linalg;
pub mod oracle;
pub mod orbit;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use group::{
    act, canonicalize, compose, enumerate_shell, fixed_point_free_check, rep_value, BoundaryConvention, GroupElement,
    LatticePoint, OrbitSpace, Representation, SpaceKind, Statistics,
};
pub use kernel::{
    coined_line_kernel, line_heat_kernel, line_kernel, line_resolvent, product_kernel, CoinSpec, CoveringKernel,
    KernelParams,
};
pub use linalg::CMatrix;
pub use orbit::{
    evolve_state, local_dos, orbit_coined_kernel, orbit_density_matrix, orbit_kernel, orbit_resolvent, orbit_sum,
    partition_function, probability, OrbitKernelReport, TruncationPolicy,
};
pub use special::{bessel_i, bessel_j, quarter_phase, ComplexAmplitude, QuarterPhase};
