//! Exotic spin-spin-velocity interaction kernels and the pseudomagnetic
//! field integral over the spin-source grid along an orbit.
//!
//! The shipped kernel is the velocity-dependent form
//! `−f ħ/(4π μ_N) (σ̂₁ × v) (1/r) e^{−r/λ}` integrated against `ρ dV`.
//! Further interaction kinds are hosted by a registry; identifiers for the
//! supplemental potentials are reserved but carry no functional form.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::kahan::KahanVec3;
use crate::orbit::{OrbitSample, OrbitStateSeries};
use crate::scalar::Scalar;
use crate::earth_source::SpinSourceGrid;
use crate::vec3::Vec3;

/// Kernel identifiers reserved for interaction forms whose closed
/// expressions are not shipped; registering a form for one of these names
/// makes it usable through the same evaluation path.
pub const RESERVED_KERNELS: &[&str] = &["v6+7", "v8", "v14", "v15", "v16", "v2", "v4+5", "v12+13"];

/// Interaction kind selector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelKind {
    /// Spin-spin-velocity kernel (the shipped form).
    SpinVelocity,
    /// Axion-halo coupling, linear in sensor speed.
    Halo,
    /// Registry extension identified by name.
    Named(String),
}

/// Kernel configuration: kind, dimensionless coupling, Yukawa range.
#[derive(Debug, Clone)]
pub struct InteractionKernel<T> {
    pub kind: KernelKind,
    /// Dimensionless coupling (f_s for the spin-velocity kernel).
    pub coupling: T,
    /// Range λ in meters; infinity turns the Yukawa factor off.
    pub range: T,
    /// Halo normalization, tesla per (m/s) at unit coupling.
    pub halo_normalization: T,
}

impl<T: Scalar> InteractionKernel<T> {
    pub fn spin_velocity(coupling: T, range: T) -> Result<Self> {
        if !(range > T::zero()) {
            return Err(Error::Argument("kernel range must be positive".into()));
        }
        if !coupling.is_finite() {
            return Err(Error::Argument("kernel coupling must be finite".into()));
        }
        Ok(Self {
            kind: KernelKind::SpinVelocity,
            coupling,
            range,
            halo_normalization: T::one(),
        })
    }
}

/// Per-evaluation kernel input: all quantities in one consistent frame.
#[derive(Debug, Clone, Copy)]
pub struct KernelInput<T> {
    /// Source polarization direction (unit).
    pub source_spin: Vec3<T>,
    /// Relative velocity source→sensor, m/s.
    pub velocity: Vec3<T>,
    /// Separation vector source→sensor, m.
    pub separation: Vec3<T>,
    /// |separation|, m.
    pub distance: T,
}

/// Yukawa factor `e^{−r/λ}`, short-circuited at the representable range and
/// exactly 1 for infinite λ.
fn yukawa<T: Scalar>(distance: T, range: T) -> T {
    if range.is_infinite() {
        return T::one();
    }
    let x = distance / range;
    if x > T::from_f64c(700.0) {
        T::zero()
    } else {
        (-x).exp()
    }
}

/// Per-spin field contribution of the spin-velocity kernel, tesla·m^3
/// (to be multiplied by `ρ dV`).
pub fn kernel_vs<T: Scalar>(
    input: &KernelInput<T>,
    kernel: &InteractionKernel<T>,
) -> Result<Vec3<T>> {
    if input.distance <= T::zero() {
        return Err(Error::Singularity { time_s: f64::NAN });
    }
    let c = PhysicalConstants::<T>::get();
    let four_pi = T::from_f64c(4.0 * core::f64::consts::PI);
    let prefactor =
        -kernel.coupling * c.hbar / (four_pi * c.mu_n) * yukawa(input.distance, kernel.range)
            / input.distance;
    Ok(input.source_spin.cross(input.velocity).scale(prefactor))
}

/// Axion-halo pseudofield magnitude: linear in sensor speed and coupling.
pub fn kernel_halo<T: Scalar>(speed: T, g_coupling: T, normalization: T) -> T {
    g_coupling * speed * normalization
}

/// Vector kernel form: maps a [`KernelInput`] to a per-spin contribution.
pub type KernelForm<T> = Arc<dyn Fn(&KernelInput<T>, &InteractionKernel<T>) -> Result<Vec3<T>> + Send + Sync>;

/// Registry of interaction kinds by identifier.
pub struct KernelRegistry<T> {
    forms: BTreeMap<String, Option<KernelForm<T>>>,
}

impl<T: Scalar> Default for KernelRegistry<T> {
    fn default() -> Self {
        let mut forms: BTreeMap<String, Option<KernelForm<T>>> = BTreeMap::new();
        forms.insert(
            "vs".to_string(),
            Some(Arc::new(|input: &KernelInput<T>, kernel: &InteractionKernel<T>| {
                kernel_vs(input, kernel)
            }) as KernelForm<T>),
        );
        for name in RESERVED_KERNELS {
            forms.insert((*name).to_string(), None);
        }
        Self { forms }
    }
}

impl<T: Scalar> KernelRegistry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register (or replace) a kernel form under `name`.
    pub fn register(&mut self, name: &str, form: KernelForm<T>) {
        self.forms.insert(name.to_string(), Some(form));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.forms.keys().map(String::as_str)
    }

    /// Resolve a registered form; reserved identifiers without a shipped
    /// form produce [`Error::UnregisteredKernel`].
    pub fn resolve(&self, name: &str) -> Result<KernelForm<T>> {
        match self.forms.get(name) {
            Some(Some(form)) => Ok(form.clone()),
            Some(None) => Err(Error::UnregisteredKernel(name.to_string())),
            None => Err(Error::UnregisteredKernel(name.to_string())),
        }
    }
}

/// One pseudomagnetic field sample.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample<T> {
    pub t: T,
    /// Field vector, ECI, tesla.
    pub b_eci: Vec3<T>,
    /// Projection on the declared sensor axis, tesla.
    pub projection: T,
}

/// Pseudomagnetic field time series along an orbit.
#[derive(Debug, Clone)]
pub struct FieldSeries<T> {
    pub samples: Vec<FieldSample<T>>,
    pub dt: T,
    /// Axis the projection column refers to (unit, ECI).
    pub projection_axis: Vec3<T>,
}

/// Integrate the pseudomagnetic field over the source grid at every orbit
/// sample. Summation is compensated in fixed cell order; parallelism is
/// across time samples only, so results are identical at any thread count.
pub fn integrate_field<T: Scalar>(
    grid: &SpinSourceGrid<T>,
    orbit: &OrbitStateSeries<T>,
    kernel: &InteractionKernel<T>,
) -> Result<FieldSeries<T>> {
    if kernel.kind != KernelKind::SpinVelocity {
        return Err(Error::Argument(
            "integrate_field requires a spin-velocity kernel; use the registry for extensions"
                .into(),
        ));
    }
    let c = PhysicalConstants::<T>::get();
    let max_radius = grid.max_cell_radius();
    for s in &orbit.samples {
        if s.pos_eci.norm() <= max_radius {
            return Err(Error::Singularity {
                time_s: s.t.to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    let four_pi = T::from_f64c(4.0 * core::f64::consts::PI);
    let base = -kernel.coupling * c.hbar / (four_pi * c.mu_n);
    let axis = orbit.normal_eci;
    let omega = Vec3::new(T::zero(), T::zero(), c.omega_earth);

    let samples: Vec<FieldSample<T>> = orbit
        .samples
        .par_iter()
        .map(|s| field_at_sample(grid, s, kernel, base, omega, axis))
        .collect();

    Ok(FieldSeries {
        samples,
        dt: orbit.dt,
        projection_axis: axis,
    })
}

fn field_at_sample<T: Scalar>(
    grid: &SpinSourceGrid<T>,
    s: &OrbitSample<T>,
    kernel: &InteractionKernel<T>,
    base: T,
    omega: Vec3<T>,
    axis: Vec3<T>,
) -> FieldSample<T> {
    let c = PhysicalConstants::<T>::get();
    // Work on Earth-fixed axes: the grid is static there and only the sensor
    // state changes per sample. The kernel is rotation-equivariant, so the
    // accumulated vector rotates back to ECI at the end.
    let theta = c.omega_earth * s.t;
    let sensor_pos = s.pos_ecef;
    // Inertial sensor velocity expressed on Earth-fixed axes.
    let sensor_vel = s.vel_ecef;
    let infinite_range = kernel.range.is_infinite();
    let inv_range = if infinite_range {
        T::zero()
    } else {
        T::one() / kernel.range
    };
    let cutoff = T::from_f64c(700.0);

    let mut acc = KahanVec3::new();
    for cell in &grid.cells {
        let sep = sensor_pos - cell.center;
        let r2 = sep.dot(sep);
        let r = r2.sqrt();
        let v_rel = sensor_vel - omega.cross(cell.center);
        let mut w = base * cell.density * cell.volume / r;
        if !infinite_range {
            let x = r * inv_range;
            w = if x > cutoff { T::zero() } else { w * (-x).exp() };
        }
        acc.add(cell.polarization.cross(v_rel).scale(w));
    }
    let b_ecef = acc.value();
    let b_eci = b_ecef.rotated_z(theta);
    FieldSample {
        t: s.t,
        b_eci,
        projection: b_eci.dot(axis),
    }
}

/// Scalar series: projection of each field sample on the constant ECI
/// orbit-plane normal.
pub fn project_normal<T: Scalar>(
    series: &FieldSeries<T>,
    orbit: &OrbitStateSeries<T>,
) -> Result<Vec<T>> {
    let normal = orbit
        .normal_eci
        .normalized()
        .ok_or_else(|| Error::Argument("degenerate orbit: undefined plane normal".into()))?;
    Ok(series
        .samples
        .iter()
        .map(|s| s.b_eci.dot(normal))
        .collect())
}

/// Share of total RMS power carried by the normal component.
pub fn normal_power_fraction<T: Scalar>(
    series: &FieldSeries<T>,
    orbit: &OrbitStateSeries<T>,
) -> Result<T> {
    let normal = orbit
        .normal_eci
        .normalized()
        .ok_or_else(|| Error::Argument("degenerate orbit: undefined plane normal".into()))?;
    let mut along = crate::kahan::KahanSum::new();
    let mut total = crate::kahan::KahanSum::new();
    for s in &series.samples {
        let p = s.b_eci.dot(normal);
        along.add(p * p);
        total.add(s.b_eci.dot(s.b_eci));
    }
    let t = total.value();
    if t <= T::zero() {
        return Err(Error::Argument("field series has zero power".into()));
    }
    Ok(along.value() / t)
}
