//! Gaussian wavepacket dynamics (GWD) in natural units.
//!
//! A single complex Gaussian
//!
//! ```text
//! psi(q) = exp[ (i/hbar) ( x^T A x / 2 + p^T x + gamma ) ],   x = q - q_c,
//! ```
//!
//! is propagated by evolving its parameters instead of a full wavefunction.
//! Three variants of the parameter equations of motion are provided, all of
//! which replace the true potential by a state-dependent quadratic
//! `V0 + V1^T x + x^T V2 x / 2`:
//!
//! * `Lha` — local harmonic (Heller's thawed Gaussian approximation),
//! * `Lca` — local cubic variational (adds a nonclassical force from the
//!   third derivative of the potential contracted with the position
//!   covariance),
//! * `Var` — fully variational (needs exact Gaussian expectation values of
//!   the potential and its derivatives).
//!
//! Internally states are kept in the Hagedorn form `(q, p, Q, P, S)` with
//! `A = P Q^-1`, which makes both the kinetic and the potential half of the
//! dynamics exactly solvable matrix-linear flows. Splitting those exact flows
//! into symmetric second-order steps and composing the steps with
//! triple-jump, Suzuki, Kahan-Li or Sofroniou-Spaletta coefficient sequences
//! gives integrators of order 2 to 10 that conserve the norm exactly, are
//! exactly time-reversible, preserve the noncanonical symplectic form of the
//! wavepacket manifold, and conserve the effective energy to the order of the
//! scheme. A classical RK4 stepper on the same equations is included as the
//! non-geometric baseline, and a split-operator Fourier grid solver provides
//! the exact quantum reference in one and two dimensions.

pub mod diagnostics;
pub mod effective;
pub mod grid;
pub mod integrators;
pub mod linalg;
pub mod potentials;
pub mod presets;
pub mod spectra;
pub mod states;
pub mod tensor;

mod error;

pub use error::{Error, Result};
pub use effective::{effective_coefficients, effective_potential_mean, EffectiveCoefficients, MethodKind};
pub use integrators::{
    composed_step, kinetic_flow, make_scheme, potential_flow, propagate, rk4_step,
    second_order_step, CompositionScheme, SchemeName, Splitting, StepPlan, Stepper, Trajectory,
};
pub use potentials::{harmonic_ground_state, CoupledMorse, HarmonicPotential, PotentialModel};
pub use states::{
    from_heller, overlap, state_distance, to_heller, CovarianceData, GaussianState, HellerParams,
    Mass,
};
