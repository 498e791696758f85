//! Polarized geoelectron spin-source model of the Earth.
//!
//! Radial material profiles (temperature and unpaired-electron density)
//! combine with the geomagnetic field into a per-cell polarized spin density
//! `ρ = ρ_e · 2 μ_B B / (k_B T)` and a polarization direction tied to the
//! local field. The discretized grid is the integration domain of the
//! pseudomagnetic field integral.

use std::io::BufRead;

use crate::constants::{PhysicalConstants, CORE_MANTLE_BOUNDARY};
use crate::error::{Error, Result};
use crate::geomag::{GaussCoefficientSet, GeoPosition};
use crate::kahan::KahanSum;
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// One radial layer: contiguous shell with constant temperature and
/// unpaired-electron ("equivalent Fe2+ e-") density.
#[derive(Debug, Clone, Copy)]
pub struct RadialLayer<T> {
    pub inner_radius: T,
    pub outer_radius: T,
    /// Kelvin.
    pub temperature: T,
    /// Electrons per cubic meter.
    pub electron_density: T,
}

/// Ordered, contiguous stack of radial layers.
#[derive(Debug, Clone)]
pub struct RadialProfile<T> {
    layers: Vec<RadialLayer<T>>,
}

impl<T: Scalar> RadialProfile<T> {
    pub fn new(layers: Vec<RadialLayer<T>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Validation("profile needs at least one layer".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.inner_radius >= l.outer_radius {
                return Err(Error::Validation(format!(
                    "layer {i}: inner radius must be below outer radius"
                )));
            }
            if l.temperature <= T::zero() || l.electron_density < T::zero() {
                return Err(Error::Validation(format!(
                    "layer {i}: temperature must be positive, density non-negative"
                )));
            }
            if i > 0 && (layers[i - 1].outer_radius - l.inner_radius).abs() > T::from_f64c(1e-3) {
                return Err(Error::Validation(format!(
                    "layer {i} does not start where layer {} ends",
                    i - 1
                )));
            }
        }
        Ok(Self { layers })
    }

    /// Parse the CSV layout `r_inner_m,r_outer_m,T_K,rho_e_per_m3`.
    pub fn from_csv_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut layers = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if idx == 0 && trimmed.starts_with("r_inner_m") {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected 4 columns, found {}", fields.len()),
                });
            }
            let mut vals = [0.0_f64; 4];
            for (v, f) in vals.iter_mut().zip(&fields) {
                *v = f.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("unparseable number '{f}'"),
                })?;
            }
            layers.push(RadialLayer {
                inner_radius: T::from_f64c(vals[0]),
                outer_radius: T::from_f64c(vals[1]),
                temperature: T::from_f64c(vals[2]),
                electron_density: T::from_f64c(vals[3]),
            });
        }
        Self::new(layers)
    }

    pub fn layers(&self) -> &[RadialLayer<T>] {
        &self.layers
    }

    pub fn inner_radius(&self) -> T {
        self.layers[0].inner_radius
    }

    pub fn outer_radius(&self) -> T {
        self.layers[self.layers.len() - 1].outer_radius
    }

    /// Temperature and electron density at radius `r`, if covered.
    pub fn sample(&self, r: T) -> Option<(T, T)> {
        self.layers
            .iter()
            .find(|l| r >= l.inner_radius && r <= l.outer_radius)
            .map(|l| (l.temperature, l.electron_density))
    }
}

/// Thermal polarization density: `ρ_e · 2 μ_B B / (k_B T)`, spins/m^3.
pub fn polarized_density<T: Scalar>(rho_e: T, b_mag: T, temperature: T) -> Result<T> {
    if temperature <= T::zero() {
        return Err(Error::Domain("temperature must be positive".into()));
    }
    if rho_e < T::zero() || b_mag < T::zero() {
        return Err(Error::Domain(
            "density and field magnitude must be non-negative".into(),
        ));
    }
    let c = PhysicalConstants::<T>::get();
    Ok(rho_e * T::from_f64c(2.0) * c.mu_b * b_mag / (c.k_b * temperature))
}

/// Sign convention for the polarization direction relative to the local
/// geomagnetic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarizationSign {
    /// Electron spins anti-parallel to B (negative electron gyromagnetic
    /// ratio; the magnetic moment aligns, the spin opposes). Default.
    AntiParallel,
    Parallel,
}

/// One volume cell of the discretized source.
#[derive(Debug, Clone, Copy)]
pub struct SpinCell<T> {
    /// Earth-fixed Cartesian center, m.
    pub center: Vec3<T>,
    /// m^3.
    pub volume: T,
    /// Polarized spin density, spins/m^3.
    pub density: T,
    /// Unit polarization direction, Earth-fixed.
    pub polarization: Vec3<T>,
}

/// Grid resolution: radial, colatitude, longitude cell counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridResolution {
    pub n_r: usize,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl GridResolution {
    pub fn new(n_r: usize, n_theta: usize, n_phi: usize) -> Self {
        Self { n_r, n_theta, n_phi }
    }

    pub fn cell_count(&self) -> usize {
        self.n_r * self.n_theta * self.n_phi
    }
}

/// Discretized spin source. Immutable after construction; cell order is
/// fixed (r-major, then colatitude, then longitude) so downstream compensated
/// sums are deterministic.
#[derive(Debug, Clone)]
pub struct SpinSourceGrid<T> {
    pub cells: Vec<SpinCell<T>>,
    pub resolution: GridResolution,
    pub inner_radius: T,
    pub outer_radius: T,
    pub sign: PolarizationSign,
}

/// Build the source grid over `domain = (r_min, r_max)`.
///
/// Cells tile the shell with equal volume: radial edges uniform in r^3,
/// colatitude edges uniform in cos θ, longitude edges uniform in φ. Each
/// cell carries the polarization density evaluated at its center and a unit
/// polarization direction along (or against) the local geomagnetic field.
pub fn build_grid<T: Scalar>(
    profile: &RadialProfile<T>,
    coeffs: &GaussCoefficientSet<T>,
    resolution: GridResolution,
    domain: (T, T),
    sign: PolarizationSign,
) -> Result<SpinSourceGrid<T>> {
    let (r_min, r_max) = domain;
    let cmb = T::from_f64c(CORE_MANTLE_BOUNDARY);
    if r_min < cmb {
        return Err(Error::Domain(format!(
            "domain inner radius {r_min} m below core-mantle boundary {cmb} m"
        )));
    }
    if r_min >= r_max {
        return Err(Error::Argument("domain must have positive extent".into()));
    }
    if resolution.n_r < 4 || resolution.n_theta < 8 || resolution.n_phi < 16 {
        return Err(Error::Argument(format!(
            "resolution {resolution:?} below minimum (4, 8, 16)"
        )));
    }

    let two = T::from_f64c(2.0);
    let pi = T::PI();
    let r3_min = r_min * r_min * r_min;
    let r3_max = r_max * r_max * r_max;
    let n_r = resolution.n_r;
    let n_t = resolution.n_theta;
    let n_p = resolution.n_phi;
    let cell_volume = T::from_f64c(4.0 / 3.0) * pi * (r3_max - r3_min)
        / T::from_f64c(resolution.cell_count() as f64);

    let frac = |k: usize, n: usize| T::from_f64c(k as f64 / n as f64);
    let mut cells = Vec::with_capacity(resolution.cell_count());
    for ir in 0..n_r {
        let r3_lo = r3_min + (r3_max - r3_min) * frac(ir, n_r);
        let r3_hi = r3_min + (r3_max - r3_min) * frac(ir + 1, n_r);
        let r_c = ((r3_lo + r3_hi) / two).cbrt();
        let (temperature, rho_e) = profile.sample(r_c).ok_or_else(|| {
            Error::Domain(format!("radial profile does not cover radius {r_c} m"))
        })?;
        for it in 0..n_t {
            // cos θ from 1 down to -1.
            let ct_hi = T::one() - two * frac(it, n_t);
            let ct_lo = T::one() - two * frac(it + 1, n_t);
            let ct_c = (ct_hi + ct_lo) / two;
            let theta_c = ct_c.acos();
            for ip in 0..n_p {
                let phi_c = -pi + two * pi * (frac(ip, n_p) + frac(1, 2 * n_p));
                let pos = GeoPosition::new(r_c, theta_c, phi_c);
                let b = coeffs.evaluate_field(&pos, coeffs.max_degree)?;
                let b_cart = b.to_cartesian(&pos);
                let density = polarized_density(rho_e, b.magnitude(), temperature)?;
                let direction = match b_cart.normalized() {
                    Some(unit) => match sign {
                        PolarizationSign::AntiParallel => -unit,
                        PolarizationSign::Parallel => unit,
                    },
                    // Zero field: no preferred direction, density is zero too.
                    None => Vec3::new(T::zero(), T::zero(), T::one()),
                };
                cells.push(SpinCell {
                    center: Vec3::new(
                        r_c * theta_c.sin() * phi_c.cos(),
                        r_c * theta_c.sin() * phi_c.sin(),
                        r_c * ct_c,
                    ),
                    volume: cell_volume,
                    density,
                    polarization: direction,
                });
            }
        }
    }
    Ok(SpinSourceGrid {
        cells,
        resolution,
        inner_radius: r_min,
        outer_radius: r_max,
        sign,
    })
}

/// Total polarized spin count `Σ ρ·V`, compensated in fixed cell order.
pub fn total_polarized_spins<T: Scalar>(grid: &SpinSourceGrid<T>) -> T {
    let mut acc = KahanSum::new();
    for c in &grid.cells {
        acc.add(c.density * c.volume);
    }
    acc.value()
}

impl<T: Scalar> SpinSourceGrid<T> {
    /// Analytic volume of the shell domain, m^3.
    pub fn analytic_volume(&self) -> T {
        let r3 = |r: T| r * r * r;
        T::from_f64c(4.0 / 3.0) * T::PI() * (r3(self.outer_radius) - r3(self.inner_radius))
    }

    /// Largest cell-center radius, m. Sensor trajectories must stay outside.
    pub fn max_cell_radius(&self) -> T {
        self.cells
            .iter()
            .map(|c| c.center.norm())
            .fold(T::zero(), T::max)
    }
}
