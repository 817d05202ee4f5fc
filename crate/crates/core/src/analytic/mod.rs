//! Analytic ASEP: modulation SEPs, reciprocal-SNR MGFs, the `Z` kernel and
//! the single-integral average.

mod asep;
mod mgf;
mod modulation;
mod z;

pub use asep::{ap1_mgfs, asep_ap1, asep_ap2_bound, asep_from_mgfs, asep_singlehop_dpsk, MAX_QUAD_ORDER};
pub use mgf::{mgf_last_hop, mgf_max_recip, mgf_pair_bound, MgfHandle, MgfKind};
pub use modulation::{sep_binary, sep_craig, AngleFn, CraigTerm, ModulationSpec};
pub use z::{z_function, z_function_ilt};

/// Factor selecting the ASEP lower bound of AP-2.
pub const AP2_LOWER: f64 = 1.0;
/// Factor selecting the ASEP upper bound of AP-2.
pub const AP2_UPPER: f64 = 0.5;
