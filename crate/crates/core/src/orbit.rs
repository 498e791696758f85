//! TLE ingestion and circular two-body orbit propagation.
//!
//! The propagator is deliberately simple: a circular orbit at the radius
//! implied by the mean motion, with the plane fixed in inertial space by
//! inclination and RAAN, and the Earth rotating underneath at the sidereal
//! rate. Drag, J2 precession, and SGP4 are out of scope; the parser still
//! reads every TLE field so a higher-fidelity propagator can slot in later.

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Parsed two-line element set. Angles in radians, mean motion in rev/day.
#[derive(Debug, Clone)]
pub struct TwoLineElement<T> {
    pub name: Option<String>,
    pub norad_id: u32,
    pub epoch_year: u32,
    /// Day of year including fraction.
    pub epoch_day: f64,
    pub inclination: T,
    pub raan: T,
    pub eccentricity: T,
    pub arg_perigee: T,
    pub mean_anomaly: T,
    pub mean_motion: T,
}

/// One propagated state: position/velocity in both frames.
///
/// `vel_ecef` holds the inertial velocity expressed on rotating-frame axes
/// (the kinematically meaningful quantity for the field integral).
#[derive(Debug, Clone, Copy)]
pub struct OrbitSample<T> {
    pub t: T,
    pub pos_eci: Vec3<T>,
    pub vel_eci: Vec3<T>,
    pub pos_ecef: Vec3<T>,
    pub vel_ecef: Vec3<T>,
}

/// Time series of propagated states plus the fixed orbit geometry.
#[derive(Debug, Clone)]
pub struct OrbitStateSeries<T> {
    pub samples: Vec<OrbitSample<T>>,
    pub dt: T,
    /// Circular orbit radius, m.
    pub radius: T,
    /// Orbital angular rate, rad/s.
    pub angular_rate: T,
    /// Orbit-plane normal, ECI (constant for the two-body model).
    pub normal_eci: Vec3<T>,
}

fn tle_checksum(line: &str) -> u32 {
    line.chars()
        .take(68)
        .map(|c| match c {
            '0'..='9' => c as u32 - '0' as u32,
            '-' => 1,
            _ => 0,
        })
        .sum::<u32>()
        % 10
}

fn field<'a>(line: &'a str, lineno: usize, range: core::ops::Range<usize>) -> Result<&'a str> {
    line.get(range.clone()).ok_or_else(|| Error::Format(format!(
        "TLE line {lineno} shorter than column {}",
        range.end
    )))
}

fn parse_field<V: core::str::FromStr>(
    line: &str,
    lineno: usize,
    range: core::ops::Range<usize>,
    what: &str,
) -> Result<V> {
    let raw = field(line, lineno, range.clone())?.trim();
    raw.parse().map_err(|_| {
        Error::Format(format!(
            "TLE line {lineno} columns {}..{} ({what}): unparseable '{raw}'",
            range.start + 1,
            range.end
        ))
    })
}

/// Parse a TLE: two 69-character lines, optionally preceded by a name line.
pub fn parse_tle<T: Scalar>(text: &str) -> Result<TwoLineElement<T>> {
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.trim().is_empty())
        .collect();
    let (name, l1, l2) = match lines.as_slice() {
        [l1, l2] if l1.starts_with("1 ") => (None, *l1, *l2),
        [name, l1, l2] => (Some(name.trim().to_string()), *l1, *l2),
        _ => {
            return Err(Error::Format(format!(
                "expected 2 TLE lines (plus optional name), found {}",
                lines.len()
            )))
        }
    };
    for (idx, line) in [(1usize, l1), (2, l2)] {
        if line.len() < 69 {
            return Err(Error::Format(format!(
                "TLE line {idx} has {} characters, expected 69",
                line.len()
            )));
        }
        let stored: u32 = parse_field(line, idx, 68..69, "checksum")?;
        let computed = tle_checksum(line);
        if stored != computed {
            return Err(Error::Checksum {
                line: idx,
                computed,
                stored,
            });
        }
    }

    let norad_id: u32 = parse_field(l1, 1, 2..7, "catalog number")?;
    let epoch_yy: u32 = parse_field(l1, 1, 18..20, "epoch year")?;
    let epoch_year = if epoch_yy < 57 {
        2000 + epoch_yy
    } else {
        1900 + epoch_yy
    };
    let epoch_day: f64 = parse_field(l1, 1, 20..32, "epoch day")?;

    let deg = |v: f64| T::from_f64c(v.to_radians());
    let inclination_deg: f64 = parse_field(l2, 2, 8..16, "inclination")?;
    let raan_deg: f64 = parse_field(l2, 2, 17..25, "right ascension")?;
    // Implied leading decimal point.
    let ecc_digits = field(l2, 2, 26..33)?.trim();
    let eccentricity: f64 = format!("0.{ecc_digits}").parse().map_err(|_| {
        Error::Format(format!(
            "TLE line 2 columns 27..33 (eccentricity): unparseable '{ecc_digits}'"
        ))
    })?;
    let arg_perigee_deg: f64 = parse_field(l2, 2, 34..42, "argument of perigee")?;
    let mean_anomaly_deg: f64 = parse_field(l2, 2, 43..51, "mean anomaly")?;
    let mean_motion: f64 = parse_field(l2, 2, 52..63, "mean motion")?;

    if !(0.0..=180.0).contains(&inclination_deg) {
        return Err(Error::Validation(format!(
            "inclination {inclination_deg} deg outside [0, 180]"
        )));
    }
    if mean_motion <= 0.0 {
        return Err(Error::Validation("mean motion must be positive".into()));
    }
    if !(0.0..1.0).contains(&eccentricity) {
        return Err(Error::Validation(format!(
            "eccentricity {eccentricity} outside [0, 1)"
        )));
    }

    Ok(TwoLineElement {
        name,
        norad_id,
        epoch_year,
        epoch_day,
        inclination: deg(inclination_deg),
        raan: deg(raan_deg),
        eccentricity: T::from_f64c(eccentricity),
        arg_perigee: deg(arg_perigee_deg),
        mean_anomaly: deg(mean_anomaly_deg),
        mean_motion: T::from_f64c(mean_motion),
    })
}

impl<T: Scalar> TwoLineElement<T> {
    /// Orbital angular rate from the mean motion, rad/s.
    pub fn angular_rate(&self) -> T {
        let two_pi = T::from_f64c(core::f64::consts::TAU);
        let day = T::from_f64c(86_400.0);
        two_pi * self.mean_motion / day
    }

    /// Circular orbit radius implied by the mean motion, m.
    pub fn orbit_radius(&self) -> T {
        let c = PhysicalConstants::<T>::get();
        let w = self.angular_rate();
        (c.gm_earth / (w * w)).cbrt()
    }

    /// Orbital period, s.
    pub fn period(&self) -> T {
        T::from_f64c(core::f64::consts::TAU) / self.angular_rate()
    }
}

/// Propagate a circular two-body orbit for `duration` seconds at step `dt`.
///
/// Eccentricity is treated as zero. ECEF states are the ECI states rotated
/// by the sidereal angle `ω_earth · t`; velocities are analytic derivatives.
pub fn propagate_circular<T: Scalar>(
    tle: &TwoLineElement<T>,
    duration: T,
    dt: T,
) -> Result<OrbitStateSeries<T>> {
    if dt <= T::zero() {
        return Err(Error::Argument("dt must be positive".into()));
    }
    if duration < dt {
        return Err(Error::Argument("duration must cover at least one step".into()));
    }
    let c = PhysicalConstants::<T>::get();
    let radius = tle.orbit_radius();
    let w_orb = tle.angular_rate();
    let speed = radius * w_orb;

    // Orbit plane basis in ECI: rotate the equatorial basis by RAAN about z,
    // then incline about the node line.
    let (s_raan, c_raan) = tle.raan.sin_cos();
    let (s_inc, c_inc) = tle.inclination.sin_cos();
    // Node direction (ascending node) and in-plane perpendicular.
    let p_hat = Vec3::new(c_raan, s_raan, T::zero());
    let q_hat = Vec3::new(-s_raan * c_inc, c_raan * c_inc, s_inc);
    let normal = p_hat.cross(q_hat);

    let phase0 = tle.arg_perigee + tle.mean_anomaly;
    let n_steps = (duration / dt).floor().to_usize().unwrap_or(0);
    let mut samples = Vec::with_capacity(n_steps + 1);
    for k in 0..=n_steps {
        let t = dt * T::from_f64c(k as f64);
        let u = phase0 + w_orb * t;
        let (su, cu) = u.sin_cos();
        let pos_eci = p_hat.scale(radius * cu) + q_hat.scale(radius * su);
        let vel_eci = p_hat.scale(-speed * su) + q_hat.scale(speed * cu);
        let theta = c.omega_earth * t;
        let pos_ecef = pos_eci.rotated_z(-theta);
        let vel_ecef = vel_eci.rotated_z(-theta);
        samples.push(OrbitSample {
            t,
            pos_eci,
            vel_eci,
            pos_ecef,
            vel_ecef,
        });
    }
    Ok(OrbitStateSeries {
        samples,
        dt,
        radius,
        angular_rate: w_orb,
        normal_eci: normal,
    })
}

/// Velocity of the sensor relative to a co-rotating source cell, in ECI.
///
/// The cell at Earth-fixed position `cell_ecef` moves with the Earth at
/// `ω_earth ẑ × r_cell`; a cell on the rotation axis contributes nothing.
pub fn relative_velocity<T: Scalar>(sample: &OrbitSample<T>, cell_ecef: Vec3<T>) -> Vec3<T> {
    let c = PhysicalConstants::<T>::get();
    let theta = c.omega_earth * sample.t;
    let cell_eci = cell_ecef.rotated_z(theta);
    let cell_vel = Vec3::new(T::zero(), T::zero(), c.omega_earth).cross(cell_eci);
    sample.vel_eci - cell_vel
}
