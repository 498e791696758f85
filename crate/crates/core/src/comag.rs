//! Dual noble-gas comagnetometer: forward precession model, pseudofield
//! extraction, and the equivalent-field noise budget.
//!
//! Both species precess as
//! `Ω_i = 2π γ_i (B0 + B_gmf) − Ω_rot + (μ_N/ħF_i) B_pseu`
//! with γ in Hz/T. The weighted difference `|Ω₁| − |R Ω₂|` with
//! `R = γ₁/γ₂ < 0` cancels the common magnetic terms while the opposite
//! gyromagnetic signs keep the pseudofield term alive.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::ssvi::FieldSeries;
use crate::vec3::Vec3;

/// One precessing species: signed gyromagnetic ratio (Hz/T, frequency
/// convention) and nuclear spin quantum number.
#[derive(Debug, Clone, Copy)]
pub struct SpeciesParams<T> {
    pub gamma_hz_per_t: T,
    pub spin_quantum: T,
}

/// Xe-129: γ = −11.86 MHz/T, F = 1/2.
pub fn xe129<T: Scalar>() -> SpeciesParams<T> {
    SpeciesParams {
        gamma_hz_per_t: T::from_f64c(-11.86e6),
        spin_quantum: T::from_f64c(0.5),
    }
}

/// Xe-131: γ = 3.52 MHz/T, F = 3/2.
pub fn xe131<T: Scalar>() -> SpeciesParams<T> {
    SpeciesParams {
        gamma_hz_per_t: T::from_f64c(3.52e6),
        spin_quantum: T::from_f64c(1.5),
    }
}

/// Sensor configuration: bias, axis, shielding, calibration and noise terms.
#[derive(Debug, Clone, Copy)]
pub struct SensorConfig<T> {
    /// Applied bias field, tesla.
    pub bias_field: T,
    /// Sensitive axis (unit), ECI.
    pub sensitive_axis: Vec3<T>,
    /// Passive shield attenuation (>= 1) applied to the ambient field.
    pub shield_factor: T,
    /// Relative calibration error on the gyromagnetic ratio R.
    pub calibration_error: T,
    /// Gyroscope noise, rad/s at the reference integration time.
    pub gyro_noise: T,
    /// Laser power coupling, tesla per ppm of power instability.
    pub laser_coefficient: T,
    /// Achieved laser power stability, ppm.
    pub laser_stability_ppm: T,
    /// Single-shot magnetic sensitivity, tesla at the reference time.
    pub shot_sensitivity: T,
    pub rng_seed: u64,
}

/// Raw comagnetometer observables per sample.
#[derive(Debug, Clone, Copy)]
pub struct PrecessionSample<T> {
    pub t: T,
    /// rad/s.
    pub omega_1: T,
    pub omega_2: T,
    pub omega_rot_true: T,
    pub omega_rot_measured: T,
    /// Shielded ambient projection actually applied, tesla.
    pub b_gmf_applied: T,
}

/// Sign conventions of the record: documented so the magnitude handling in
/// the extraction is unambiguous.
#[derive(Debug, Clone, Copy)]
pub struct SignConvention {
    /// Sign of Ω₁ for positive net field (γ₁ < 0 ⇒ negative).
    pub omega_1_sign: i8,
    /// Sign of Ω₂ for positive net field.
    pub omega_2_sign: i8,
}

#[derive(Debug, Clone)]
pub struct PrecessionRecord<T> {
    pub samples: Vec<PrecessionSample<T>>,
    pub convention: SignConvention,
}

/// Itemized equivalent-field noise budget at the reference integration time.
#[derive(Debug, Clone, Copy)]
pub struct NoiseBudget<T> {
    pub laser: T,
    pub gyro_residual: T,
    pub shield_leakage: T,
    pub shot: T,
    pub total: T,
}

fn ratio<T: Scalar>(species: (SpeciesParams<T>, SpeciesParams<T>)) -> T {
    species.0.gamma_hz_per_t / species.1.gamma_hz_per_t
}

fn check_species<T: Scalar>(species: (SpeciesParams<T>, SpeciesParams<T>), r: T) -> Result<()> {
    let (s1, s2) = species;
    if s1.gamma_hz_per_t == T::zero() || s2.gamma_hz_per_t == T::zero() {
        return Err(Error::Argument("gyromagnetic ratios must be nonzero".into()));
    }
    if r * s1.spin_quantum - s2.spin_quantum == T::zero() {
        return Err(Error::Domain(
            "degenerate species pair: R F1 - F2 = 0 makes the extraction singular".into(),
        ));
    }
    Ok(())
}

/// Forward-simulate the dual-species precession record.
///
/// `ambient_gmf` is the raw geomagnetic vector along the orbit (ECI, tesla);
/// `rotation` the true platform rotation rate per sample (rad/s). All series
/// must share the field series' time base.
pub fn forward_model<T: Scalar>(
    field_series: &FieldSeries<T>,
    ambient_gmf: &[Vec3<T>],
    rotation: &[T],
    cfg: &SensorConfig<T>,
    species: (SpeciesParams<T>, SpeciesParams<T>),
) -> Result<PrecessionRecord<T>>
where
    StandardNormal: Distribution<T>,
{
    if ambient_gmf.len() != field_series.samples.len() || rotation.len() != field_series.samples.len()
    {
        return Err(Error::Alignment(format!(
            "series lengths differ: field {}, ambient {}, rotation {}",
            field_series.samples.len(),
            ambient_gmf.len(),
            rotation.len()
        )));
    }
    if cfg.shield_factor < T::one() {
        return Err(Error::Argument("shield factor must be >= 1".into()));
    }
    let r = ratio(species);
    check_species(species, r)?;

    let c = PhysicalConstants::<T>::get();
    let two_pi = T::from_f64c(core::f64::consts::TAU);
    let axis = cfg
        .sensitive_axis
        .normalized()
        .ok_or_else(|| Error::Argument("sensitive axis must be nonzero".into()))?;

    let mut samples = Vec::with_capacity(field_series.samples.len());
    for (i, fs) in field_series.samples.iter().enumerate() {
        let b_gmf = ambient_gmf[i].dot(axis) / cfg.shield_factor;
        let b_pseu = fs.b_eci.dot(axis);
        let b_tot = cfg.bias_field + b_gmf;
        let omega_rot = rotation[i];
        let omega_1 = two_pi * species.0.gamma_hz_per_t * b_tot - omega_rot
            + c.mu_n / (c.hbar * species.0.spin_quantum) * b_pseu;
        let omega_2 = two_pi * species.1.gamma_hz_per_t * b_tot - omega_rot
            + c.mu_n / (c.hbar * species.1.spin_quantum) * b_pseu;
        // Per-sample RNG stream: thread-count independent, seed reproducible.
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let noise: T = StandardNormal.sample(&mut rng);
        samples.push(PrecessionSample {
            t: fs.t,
            omega_1,
            omega_2,
            omega_rot_true: omega_rot,
            omega_rot_measured: omega_rot + cfg.gyro_noise * noise,
            b_gmf_applied: b_gmf,
        });
    }
    Ok(PrecessionRecord {
        samples,
        convention: SignConvention {
            omega_1_sign: if species.0.gamma_hz_per_t < T::zero() { -1 } else { 1 },
            omega_2_sign: if species.1.gamma_hz_per_t < T::zero() { -1 } else { 1 },
        },
    })
}

/// Invert the record to the pseudofield estimate per sample:
/// `B = ħF₁F₂[(|Ω₁| − |R'Ω₂|) − (1 − R')Ω_rot] / (μ_N(R'F₁ − F₂))` with
/// `R' = (γ₁/γ₂)(1 + ε_R)` carrying the calibration imperfection.
pub fn extract_pseudofield<T: Scalar>(
    record: &PrecessionRecord<T>,
    species: (SpeciesParams<T>, SpeciesParams<T>),
    cfg: &SensorConfig<T>,
) -> Result<Vec<T>> {
    let r_true = ratio(species);
    let r = r_true * (T::one() + cfg.calibration_error);
    check_species(species, r)?;
    let c = PhysicalConstants::<T>::get();
    let (f1, f2) = (species.0.spin_quantum, species.1.spin_quantum);
    let scale = c.hbar * f1 * f2 / (c.mu_n * (r * f1 - f2));
    Ok(record
        .samples
        .iter()
        .map(|s| {
            let diff = s.omega_1.abs() - (r * s.omega_2).abs();
            scale * (diff - (T::one() - r) * s.omega_rot_measured)
        })
        .collect())
}

/// Equivalent field error of an uncorrected platform rotation `Ω_rot`:
/// `ħF₁F₂(1 − R)Ω_rot / (μ_N(RF₁ − F₂))`.
pub fn rotation_equivalent_field<T: Scalar>(
    omega_rot: T,
    species: (SpeciesParams<T>, SpeciesParams<T>),
) -> Result<T> {
    let r = ratio(species);
    check_species(species, r)?;
    let c = PhysicalConstants::<T>::get();
    let (f1, f2) = (species.0.spin_quantum, species.1.spin_quantum);
    Ok(c.hbar * f1 * f2 * (T::one() - r) * omega_rot / (c.mu_n * (r * f1 - f2)))
}

/// Itemized noise budget. `peak_ambient` is the raw (unshielded) ambient
/// field amplitude seen on orbit, tesla.
pub fn noise_budget<T: Scalar>(
    cfg: &SensorConfig<T>,
    species: (SpeciesParams<T>, SpeciesParams<T>),
    peak_ambient: T,
) -> Result<NoiseBudget<T>> {
    let laser = cfg.laser_coefficient * cfg.laser_stability_ppm;
    let gyro_residual = rotation_equivalent_field(cfg.gyro_noise, species)?.abs();
    // Passive shield, then common-mode rejection limited by ε_R.
    let shield_leakage = peak_ambient / cfg.shield_factor * cfg.calibration_error;
    let shot = cfg.shot_sensitivity;
    let total = (laser * laser + gyro_residual * gyro_residual
        + shield_leakage * shield_leakage
        + shot * shot)
        .sqrt();
    Ok(NoiseBudget {
        laser,
        gyro_residual,
        shield_leakage,
        shot,
        total,
    })
}
