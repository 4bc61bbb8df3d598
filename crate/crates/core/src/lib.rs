//! Floquet simulation of integer and fractional many-body resonances in
//! periodically driven lattice models.

pub mod basis;
pub mod cli;
pub mod error;
pub mod floquet;
pub mod linalg;
pub mod models;
pub mod observables;
pub mod propagate;

pub use basis::{
    enumerate_sector, parity_project, BasisId, Configuration, LocalSpace, ParityBasis,
    SectorBasis, WorkingBasis,
};
pub use error::{FloqError, Result};
pub use floquet::{MagnusResult, TrimerOracle};
pub use models::{DriveSpec, DrivenModel, ModelKind};
pub use observables::ObservableSeries;
pub use propagate::{PeriodPropagator, StateVector};
