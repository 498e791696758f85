//! Simulation toolkit for an orbiting dual-species comagnetometer probing a
//! spin- and velocity-dependent pseudomagnetic coupling to polarized
//! geoelectrons.
//!
//! The pipeline: evaluate the geomagnetic field from spherical-harmonic
//! coefficients, build a polarized electron source grid from a radial Earth
//! profile, propagate a circular orbit from orbital elements, integrate the
//! exotic-field kernel over the grid along the orbit, push the result through
//! the sensor forward model, and analyze the output series (spectra, Allan
//! deviation, matched-filter amplitudes, exclusion limits).
//!
//! All numerics are generic over the floating-point scalar via [`Scalar`]
//! (`f32` or `f64`); the `*64` aliases below fix `f64` for typical use.

pub mod analysis;
pub mod comag;
pub mod constants;
pub mod earth_source;
pub mod error;
pub mod geomag;
pub mod kahan;
pub mod orbit;
pub mod scalar;
pub mod ssvi;
pub mod vec3;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use vec3::Vec3;

/// Default scalar type for end-user code.
pub type Real = f64;

pub type Vec64 = vec3::Vec3<Real>;
pub type Constants64 = constants::PhysicalConstants<Real>;
pub type GaussCoefficients64 = geomag::GaussCoefficientSet<Real>;
pub type GeoPosition64 = geomag::GeoPosition<Real>;
pub type SphericalField64 = geomag::SphericalField<Real>;
pub type RadialProfile64 = earth_source::RadialProfile<Real>;
pub type SpinSourceGrid64 = earth_source::SpinSourceGrid<Real>;
pub type TwoLineElement64 = orbit::TwoLineElement<Real>;
pub type OrbitStateSeries64 = orbit::OrbitStateSeries<Real>;
pub type InteractionKernel64 = ssvi::InteractionKernel<Real>;
pub type KernelRegistry64 = ssvi::KernelRegistry<Real>;
pub type FieldSeries64 = ssvi::FieldSeries<Real>;
pub type SensorConfig64 = comag::SensorConfig<Real>;
pub type PrecessionRecord64 = comag::PrecessionRecord<Real>;
pub type NoiseBudget64 = comag::NoiseBudget<Real>;
pub type AllanCurve64 = analysis::AllanCurve<Real>;
pub type SpectrumResult64 = analysis::SpectrumResult<Real>;
pub type ExclusionCurve64 = analysis::ExclusionCurve<Real>;
