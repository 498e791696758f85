//! Signal analysis: amplitude spectra, Allan deviation, matched-filter
//! amplitude extraction, campaign sensitivity, and exclusion curves.

mod allan;
mod sensitivity;
mod spectrum;

pub use allan::{allan_deviation, AllanCurve};
pub use sensitivity::{
    campaign_sensitivity, exclusion_curve, lockin_amplitude, quadrature_amplitude, ExclusionCurve,
};
pub use spectrum::{amplitude_spectrum, Peak, PeakConfig, SpectrumResult, Window};
