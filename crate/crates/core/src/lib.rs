//! Steady-state heat transport through two coupled quantum dots.
//!
//! Two spin-½ dots with exchange, XY anisotropy and a Dzyaloshinskii–Moriya
//! (DM) term are each attached to their own bosonic reservoir. Populations of
//! the four eigenstates obey a Pauli rate equation; from its stationary point
//! the crate derives bath heat currents, thermal rectification between the
//! two temperature orientations, and the entanglement/discord of the steady
//! reduced density matrix.
//!
//! Units: ħ = k_B = 1. The product basis is ordered `|00⟩, |01⟩, |10⟩, |11⟩`
//! with the left dot as the first factor and `|0⟩` the upper spin level.
//! Eigenstates are addressed by label index `0..4` for `|ε₁⟩..|ε₄⟩`; labels
//! are fixed by construction (`+ξ, −ξ, +η, −η`), not by energy order.
//!
//! ```
//! use dimdot_core::{rectification, Bias, SystemParams};
//!
//! let params = SystemParams::new(1.0, 0.3, 0.5, 4.0, 2.0).unwrap();
//! let bias = Bias::new(1.0, 0.4, 1.0, 0.25);
//! let report = rectification(&params, &bias).unwrap();
//! assert!(report.rectification > 0.0);
//! ```

pub mod correlations;
pub mod dynamics;
mod error;
pub mod model;
mod ode;
pub mod transport;

pub use correlations::{
    classical_correlation, concurrence_population_form, concurrence_wootters,
    concurrence_xstate, correlation_report, discord, mutual_information,
    von_neumann_entropy, ClassicalCorrelation, CorrelationReport, MeasurementSearch,
};
pub use dynamics::{
    bose_occupation, build_rates, density_matrix, evolve, steady_state_closedform,
    steady_state_nullspace, BathSpec, ClosedFormSteadyState, EvolveOptions, RateMatrix,
    SteadyState, Trajectory, OMEGA_MIN,
};
pub use error::{Error, Result};
pub use model::{
    build_hamiltonian, eigensystem_analytic, eigensystem_numeric, transition_table,
    EigenSystem, Hamiltonian, Provenance, Side, SystemParams, TransitionTable,
};
pub use transport::{
    bath_current, field_sweep, find_critical_d, find_ground_switch, lowest_level,
    per_state_currents, rectification, rectification_with, two_bath_current, Bias,
    FieldTrace, Grouping, Orientation, StateCurrents, TransportReport,
};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// 4×4 complex matrix in the product basis.
pub type Matrix4c = nalgebra::Matrix4<C64>;
/// Complex 4-vector in the product basis.
pub type Vector4c = nalgebra::Vector4<C64>;
/// Populations of `|ε₁⟩..|ε₄⟩`.
pub type Populations = [f64; 4];
