//! Physical reference constants (SI).
//!
//! CODATA 2018 values for the microscopic constants, IERS conventions for the
//! Earth rotation quantities. Frozen at compile time; every module converts
//! through [`PhysicalConstants`] so a generic-scalar build sees one source of
//! truth.

use crate::scalar::Scalar;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Nuclear magneton, J/T.
pub const MU_N: f64 = 5.050_783_7e-27;
/// Bohr magneton, J/T.
pub const MU_B: f64 = 9.274_010_0e-24;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Geocentric gravitational constant GM, m^3/s^2.
pub const GM_EARTH: f64 = 3.986_004_418e14;
/// Earth sidereal rotation rate, rad/s.
pub const OMEGA_EARTH: f64 = 7.292_115_9e-5;
/// Sidereal day, s.
pub const SIDEREAL_DAY: f64 = 86_164.1;
/// Earth mean radius, m (also the geomagnetic reference radius).
pub const EARTH_RADIUS: f64 = 6_371_200.0;
/// Core-mantle boundary radius, m: validity floor for the source-free
/// harmonic field model and inner edge of the spin-source domain.
pub const CORE_MANTLE_BOUNDARY: f64 = 3.48e6;

/// Typed view of the constants for generic-scalar code.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalConstants<T> {
    pub hbar: T,
    pub mu_n: T,
    pub mu_b: T,
    pub k_b: T,
    pub gm_earth: T,
    pub omega_earth: T,
    pub sidereal_day: T,
    pub earth_radius: T,
    pub core_mantle_boundary: T,
}

impl<T: Scalar> PhysicalConstants<T> {
    pub fn get() -> Self {
        Self {
            hbar: T::from_f64c(HBAR),
            mu_n: T::from_f64c(MU_N),
            mu_b: T::from_f64c(MU_B),
            k_b: T::from_f64c(K_B),
            gm_earth: T::from_f64c(GM_EARTH),
            omega_earth: T::from_f64c(OMEGA_EARTH),
            sidereal_day: T::from_f64c(SIDEREAL_DAY),
            earth_radius: T::from_f64c(EARTH_RADIUS),
            core_mantle_boundary: T::from_f64c(CORE_MANTLE_BOUNDARY),
        }
    }
}
