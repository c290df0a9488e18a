//! Horn inequalities for sums of Hermitian matrices and compact selfadjoint
//! operators: index-set combinatorics, Littlewood–Richardson coefficients,
//! recursive Horn sets, inequality scans, interpolation, partially specified
//! spectra, numerical witnesses and hives.

pub mod combinatorics;
pub mod error;
pub mod hive;
pub mod horn_sets;
pub mod interpolate;
pub mod lr_oracle;
pub mod partial;
pub mod scenarios;
pub mod schur;
pub mod spectra;
pub mod witness;

pub use combinatorics::{HornTuple, IndexSet, Partition};
pub use error::{Error, Result};
pub use horn_sets::{HornCatalog, HornSetKind, Limits};
pub use schur::{lr_coeff, multi_lr_coeff, LrQuery};
pub use spectra::{InequalityRecord, ScanConfig, Spectrum, TwoSidedSpectrum};
