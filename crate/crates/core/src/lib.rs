// NaN-rejecting guards are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic_models;
pub mod bath_correlations;
pub mod dcg_engine;
pub mod error;
pub mod exact_oracles;
pub mod lindblad_check;
pub mod quadrature;
pub mod quantum_core;

pub use error::{DcgError, Result};
pub use bath_correlations::{BathModel, BosonicBath, FermionLeads, Lead, SpinCouplingSet, TwoSpinBath};
pub use dcg_engine::{dcg_propagate, Coupling, GrainedGenerator, QuadratureConfig, SystemSpec};
pub use quantum_core::{ComplexMatrix, DensityMatrix, Superoperator, C64};
