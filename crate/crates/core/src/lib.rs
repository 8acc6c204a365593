//! GK coherent states (GKCS), their dual family (DGKCS) and the
//! nonlinear and superposition states built from them, realized on a
//! truncated Fock space `|0⟩..|N⟩`.
//!
//! Everything starts from a [`SpectrumModel`]: a non-degenerate eigenvalue
//! sequence `e_n` with `e_0 = 0`. From it follow the factorial moments
//! `ρ(n) = [e_n]!`, the dual spectrum `ε_n = n²/e_n` and the dual moments
//! `μ(n) = [ε_n]! = (n!)²/ρ(n)`. The [`states`] module builds normalized
//! Fock vectors, [`operators`] builds the deformed ladder, evolution,
//! displacement and interpolation operators, and [`verify`] checks the
//! GK criteria and the closed forms in [`closed_forms`].

pub mod closed_forms;
pub mod error;
pub mod numerics;
pub mod operators;
pub mod spectra;
pub mod states;
pub mod verify;

pub use error::{GkError, Result};
pub use numerics::matrix::CMatrix;
pub use numerics::NumericsConfig;
pub use operators::TruncatedOperator;
pub use spectra::{Branch, MomentTable, SpectrumModel};
pub use states::{Family, FockVector, StateLabel, TruncationConfig};
pub use verify::{CriteriaReport, CriterionEntry, SuiteConfig};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
