//! Moving curves: flow fields, evolution, the extended frame matrix and
//! compatibility residuals.

pub mod evolve;
pub mod extended;
pub mod field;
pub mod motion;
pub mod residuals;

pub use evolve::{arc_length_drift, evolve, EvolutionState, History};
pub use extended::{extended_frenet_matrix, frame_evolve, ExtendedCoeffs, FrameSeries};
pub use field::{ComponentSpec, FlowComponent, FlowField};
pub use motion::RotatingTransport;
pub use residuals::{
    refinement_orders, residual_report, CompatibilityFields, ResidualEntry, ResidualReport,
};
