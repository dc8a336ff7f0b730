//! Simulation and analysis of adaptive (measurement + classical feed-forward)
//! preparation of the rotated-surface-code logical |+̄⟩ state on thin strips.
//!
//! The crate has three jobs:
//!
//! * **Simulate** the constant-depth adaptive protocol — depth-4 ancilla
//!   syndrome extraction, mid-circuit measurement, and conditional X
//!   corrections — on a bit-packed stabilizer tableau engine, with optional
//!   Pauli noise ([`prep`], [`tableau`], [`circuit`]).
//! * **Estimate** the prepared fidelity from X/Z-basis shot records via the
//!   two-basis lower bound ⟨P_x⟩ + ⟨P_z⟩ − 1 with bootstrap uncertainties
//!   ([`fidelity`]).
//! * **Certify** that no depth-4 unitary circuit on the same connectivity
//!   can pass 50% fidelity: causal-cone disjointness, connected correlations
//!   and the POVM/Bhattacharyya ceiling ([`bound`]).
//!
//! A dense statevector [`oracle`] (≤ 20 qubits) provides independent
//! brute-force cross-checks for all of the above.
//!
//! Determinism: every randomized path draws from ChaCha8 streams keyed by
//! `(master_seed, stream_index)` ([`rng`]), so identical seeds and flags give
//! identical outputs, including under the parallel shot farm.

pub mod bits;
pub mod bound;
pub mod circuit;
pub mod equiv;
pub mod fidelity;
pub mod gf2;
pub mod layout;
pub mod oracle;
pub mod pauli;
pub mod prep;
pub mod rng;
pub mod tableau;

pub use layout::CodeLayout;
pub use pauli::{PauliKind, PauliString};
pub use prep::{Basis, NoiseModel, ShotRecord};
pub use tableau::{BasisState, CliffordGate, MeasurementOutcome, StabilizerTableau};
