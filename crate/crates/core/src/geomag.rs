//! Geomagnetic field from a spherical-harmonic coefficient file.
//!
//! Evaluates the internal-source potential
//! `V = a Σ (a/r)^{n+1} Σ (g cos mφ + h sin mφ) P̃ₙᵐ(cos θ)` and returns
//! `B = −∇V` in spherical Earth-fixed components. Valid from the core-mantle
//! boundary outward; the mantle is treated as source-free.

use std::io::BufRead;

use crate::constants::{CORE_MANTLE_BOUNDARY, EARTH_RADIUS};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Hard ceiling on the expansion degree for standard WMM-style files.
pub const MAX_WMM_DEGREE: usize = 12;

/// Schmidt semi-normalized Gauss coefficients of the geomagnetic potential.
///
/// Storage is in tesla (input files are nanotesla). Secular-variation columns
/// are retained verbatim but never used in field evaluation: over a 12-day
/// window the drift is negligible.
#[derive(Debug, Clone)]
pub struct GaussCoefficientSet<T> {
    pub epoch: T,
    pub max_degree: usize,
    pub reference_radius: T,
    g: Vec<Vec<T>>,
    h: Vec<Vec<T>>,
    g_dot: Vec<Vec<T>>,
    h_dot: Vec<Vec<T>>,
}

/// Earth-fixed spherical position.
#[derive(Debug, Clone, Copy)]
pub struct GeoPosition<T> {
    /// Meters from Earth center.
    pub radius: T,
    /// Radians, [0, pi].
    pub colatitude: T,
    /// Radians, east positive.
    pub longitude: T,
}

impl<T: Scalar> GeoPosition<T> {
    pub fn new(radius: T, colatitude: T, longitude: T) -> Self {
        Self {
            radius,
            colatitude,
            longitude,
        }
    }

    /// Spherical position of an Earth-fixed Cartesian point.
    pub fn from_cartesian(p: Vec3<T>) -> Self {
        let radius = p.norm();
        let colatitude = (p.z / radius).acos();
        let longitude = p.y.atan2(p.x);
        Self {
            radius,
            colatitude,
            longitude,
        }
    }
}

/// Field vector in local spherical components, tesla.
#[derive(Debug, Clone, Copy)]
pub struct SphericalField<T> {
    pub radial: T,
    pub colatitudinal: T,
    pub longitudinal: T,
}

impl<T: Scalar> SphericalField<T> {
    pub fn magnitude(&self) -> T {
        (self.radial * self.radial
            + self.colatitudinal * self.colatitudinal
            + self.longitudinal * self.longitudinal)
            .sqrt()
    }

    /// Express the field in Earth-fixed Cartesian axes at `pos`.
    pub fn to_cartesian(&self, pos: &GeoPosition<T>) -> Vec3<T> {
        let (st, ct) = pos.colatitude.sin_cos();
        let (sp, cp) = pos.longitude.sin_cos();
        let r_hat = Vec3::new(st * cp, st * sp, ct);
        let t_hat = Vec3::new(ct * cp, ct * sp, -st);
        let p_hat = Vec3::new(-sp, cp, T::zero());
        r_hat.scale(self.radial) + t_hat.scale(self.colatitudinal) + p_hat.scale(self.longitudinal)
    }
}

const NT_PER_T: f64 = 1e9;

impl<T: Scalar> GaussCoefficientSet<T> {
    /// Parse a WMM `.COF` stream: header line `epoch model date`, rows
    /// `n m g h g_dot h_dot` (nanotesla), terminated by a fill line of 9s.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty coefficient stream".into()))?
            .1?;
        let mut header_fields = header.split_whitespace();
        let epoch: f64 = header_fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format("missing or non-numeric epoch in header".into()))?;
        if header_fields.next().is_none() {
            return Err(Error::Format("header missing model name".into()));
        }

        let mut rows: Vec<(usize, usize, f64, f64, f64, f64)> = Vec::new();
        for (idx, line) in lines {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if trimmed.starts_with("9999") {
                break;
            }
            let lineno = idx + 1;
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() < 4 {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected at least 4 fields, found {}", fields.len()),
                });
            }
            let parse_num = |s: &str, what: &str| -> Result<f64> {
                s.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("unparseable {what} field '{s}'"),
                })
            };
            let n = parse_num(fields[0], "degree")? as i64;
            let m = parse_num(fields[1], "order")? as i64;
            if n < 1 || n as usize > MAX_WMM_DEGREE {
                return Err(Error::Validation(format!(
                    "degree {n} out of range 1..={MAX_WMM_DEGREE} at line {lineno}"
                )));
            }
            if m < 0 || m > n {
                return Err(Error::Validation(format!(
                    "order {m} out of range 0..={n} at line {lineno}"
                )));
            }
            let g = parse_num(fields[2], "g")?;
            let h = parse_num(fields[3], "h")?;
            let g_dot = fields.get(4).map(|s| parse_num(s, "g_dot")).transpose()?;
            let h_dot = fields.get(5).map(|s| parse_num(s, "h_dot")).transpose()?;
            rows.push((
                n as usize,
                m as usize,
                g,
                h,
                g_dot.unwrap_or(0.0),
                h_dot.unwrap_or(0.0),
            ));
        }
        if rows.is_empty() {
            return Err(Error::Format("coefficient stream contains no rows".into()));
        }

        let max_degree = rows.iter().map(|r| r.0).max().unwrap();
        let table = |pick: fn(&(usize, usize, f64, f64, f64, f64)) -> f64| {
            let mut t = vec![Vec::new(); max_degree + 1];
            for (n, row) in t.iter_mut().enumerate() {
                row.resize(n + 1, T::zero());
            }
            for r in &rows {
                t[r.0][r.1] = T::from_f64c(pick(r) / NT_PER_T);
            }
            t
        };
        Ok(Self {
            epoch: T::from_f64c(epoch),
            max_degree,
            reference_radius: T::from_f64c(EARTH_RADIUS),
            g: table(|r| r.2),
            h: table(|r| r.3),
            g_dot: table(|r| r.4),
            h_dot: table(|r| r.5),
        })
    }

    /// Build a set directly from tesla-valued coefficients (tests, synthetic
    /// models). `g[n][m]` indexing, row `n` of length `n + 1`.
    pub fn from_tables(epoch: T, g: Vec<Vec<T>>, h: Vec<Vec<T>>) -> Result<Self> {
        if g.len() != h.len() || g.is_empty() {
            return Err(Error::Validation(
                "g and h tables must have equal, nonzero length".into(),
            ));
        }
        for (n, (gr, hr)) in g.iter().zip(&h).enumerate() {
            if gr.len() != n + 1 || hr.len() != n + 1 {
                return Err(Error::Validation(format!(
                    "row {n} must have length {}",
                    n + 1
                )));
            }
        }
        let max_degree = g.len() - 1;
        let zeros: Vec<Vec<T>> = g.iter().map(|r| vec![T::zero(); r.len()]).collect();
        Ok(Self {
            epoch,
            max_degree,
            reference_radius: T::from_f64c(EARTH_RADIUS),
            g_dot: zeros.clone(),
            h_dot: zeros,
            g,
            h,
        })
    }

    /// Coefficient accessors, tesla. Out-of-range indices return zero.
    pub fn g(&self, n: usize, m: usize) -> T {
        self.g
            .get(n)
            .and_then(|r| r.get(m))
            .copied()
            .unwrap_or_else(T::zero)
    }

    pub fn h(&self, n: usize, m: usize) -> T {
        self.h
            .get(n)
            .and_then(|r| r.get(m))
            .copied()
            .unwrap_or_else(T::zero)
    }

    /// Secular variation, tesla/year (parsed but unused by evaluation).
    pub fn g_dot(&self, n: usize, m: usize) -> T {
        self.g_dot
            .get(n)
            .and_then(|r| r.get(m))
            .copied()
            .unwrap_or_else(T::zero)
    }

    pub fn h_dot(&self, n: usize, m: usize) -> T {
        self.h_dot
            .get(n)
            .and_then(|r| r.get(m))
            .copied()
            .unwrap_or_else(T::zero)
    }

    /// Evaluate `B = −∇V` at `pos`, truncating the expansion at
    /// `truncate_degree`. Components in tesla.
    pub fn evaluate_field(
        &self,
        pos: &GeoPosition<T>,
        truncate_degree: usize,
    ) -> Result<SphericalField<T>> {
        let cmb = T::from_f64c(CORE_MANTLE_BOUNDARY);
        if pos.radius < cmb {
            return Err(Error::Domain(format!(
                "radius {} m below core-mantle boundary {} m",
                pos.radius, cmb
            )));
        }
        if truncate_degree < 1 || truncate_degree > self.max_degree {
            return Err(Error::Argument(format!(
                "truncate_degree {truncate_degree} outside 1..={}",
                self.max_degree
            )));
        }

        let nmax = truncate_degree;
        let cos_theta = pos.colatitude.cos();
        let sin_theta = pos.colatitude.sin();
        let (p, dp) = schmidt_legendre(nmax, cos_theta, sin_theta);

        // sin(m phi), cos(m phi) by recurrence.
        let (sp1, cp1) = pos.longitude.sin_cos();
        let mut sin_m = vec![T::zero(); nmax + 1];
        let mut cos_m = vec![T::zero(); nmax + 1];
        sin_m[0] = T::zero();
        cos_m[0] = T::one();
        for m in 1..=nmax {
            sin_m[m] = sin_m[m - 1] * cp1 + cos_m[m - 1] * sp1;
            cos_m[m] = cos_m[m - 1] * cp1 - sin_m[m - 1] * sp1;
        }

        let ratio = self.reference_radius / pos.radius;
        let mut radial = T::zero();
        let mut colat = T::zero();
        let mut lon = T::zero();
        // (a/r)^(n+2), starting at n = 1.
        let mut rad_pow = ratio * ratio * ratio;
        for n in 1..=nmax {
            let mut br_n = T::zero();
            let mut bt_n = T::zero();
            let mut bp_n = T::zero();
            for m in 0..=n {
                let gc = self.g[n][m] * cos_m[m] + self.h[n][m] * sin_m[m];
                br_n = br_n + gc * p[n][m];
                bt_n = bt_n + gc * dp[n][m];
                if m > 0 {
                    let gs = self.g[n][m] * sin_m[m] - self.h[n][m] * cos_m[m];
                    bp_n = bp_n + T::from_f64c(m as f64) * gs * p[n][m];
                }
            }
            let np1 = T::from_f64c((n + 1) as f64);
            radial = radial + np1 * rad_pow * br_n;
            colat = colat - rad_pow * bt_n;
            lon = lon + rad_pow * bp_n;
            rad_pow = rad_pow * ratio;
        }
        let tiny = T::from_f64c(1e-12);
        let lon = if sin_theta.abs() < tiny {
            // On the rotation axis the azimuthal component is degenerate;
            // the m >= 1 terms vanish there with the P factor.
            T::zero()
        } else {
            lon / sin_theta
        };
        Ok(SphericalField {
            radial,
            colatitudinal: colat,
            longitudinal: lon,
        })
    }

    /// Field in Earth-fixed Cartesian axes at an Earth-fixed Cartesian point.
    pub fn evaluate_field_cartesian(
        &self,
        point_ecef: Vec3<T>,
        truncate_degree: usize,
    ) -> Result<Vec3<T>> {
        let pos = GeoPosition::from_cartesian(point_ecef);
        Ok(self.evaluate_field(&pos, truncate_degree)?.to_cartesian(&pos))
    }
}

/// Schmidt semi-normalized associated Legendre functions and their
/// colatitude derivatives up to degree `nmax`, by stable forward column
/// recurrence. Returns `(P, dP/dθ)` with `P[n][m]` indexing.
pub fn schmidt_legendre<T: Scalar>(
    nmax: usize,
    cos_theta: T,
    sin_theta: T,
) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
    let x = cos_theta;
    let s = sin_theta;
    let mut p = vec![Vec::new(); nmax + 1];
    let mut dp = vec![Vec::new(); nmax + 1];
    for n in 0..=nmax {
        p[n].resize(n + 1, T::zero());
        dp[n].resize(n + 1, T::zero());
    }
    p[0][0] = T::one();
    for n in 1..=nmax {
        for m in 0..=n {
            if n == m {
                if n == 1 {
                    p[1][1] = s;
                    dp[1][1] = x;
                } else {
                    let k = T::from_f64c((2 * n - 1) as f64 / (2 * n) as f64).sqrt();
                    p[n][m] = k * s * p[n - 1][m - 1];
                    dp[n][m] = k * (s * dp[n - 1][m - 1] + x * p[n - 1][m - 1]);
                }
            } else if n == m + 1 {
                let k = T::from_f64c((2 * n - 1) as f64).sqrt();
                p[n][m] = k * x * p[n - 1][m];
                dp[n][m] = k * (x * dp[n - 1][m] - s * p[n - 1][m]);
            } else {
                let denom = T::from_f64c((n * n - m * m) as f64).sqrt();
                let k1 = T::from_f64c((2 * n - 1) as f64) / denom;
                let k2 = T::from_f64c(((n - 1) * (n - 1) - m * m) as f64).sqrt() / denom;
                p[n][m] = k1 * x * p[n - 1][m] - k2 * p[n - 2][m];
                dp[n][m] = k1 * (x * dp[n - 1][m] - s * p[n - 1][m]) - k2 * dp[n - 2][m];
            }
        }
    }
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn dipole(g10_nt: f64) -> GaussCoefficientSet<f64> {
        GaussCoefficientSet::from_tables(
            2020.0,
            vec![vec![0.0], vec![g10_nt * 1e-9, 0.0]],
            vec![vec![0.0], vec![0.0, 0.0]],
        )
        .unwrap()
    }

    #[test]
    fn parses_minimal_synthetic_file() {
        let text = "  2020.0  TEST  01/01/2020\n  1  0  -30000.0  0.0  0.0  0.0\n999999999999999999999999999999999999999999999999\n";
        let set = GaussCoefficientSet::<f64>::from_reader(Cursor::new(text)).unwrap();
        assert_eq!(set.max_degree, 1);
        assert!((set.g(1, 0) - (-30000.0e-9)).abs() < 1e-18);
        assert_eq!(set.h(1, 0), 0.0);
    }

    #[test]
    fn rejects_degree_beyond_twelve() {
        let text = "  2020.0  TEST  x\n 13  0  1.0  0.0\n9999\n";
        let err = GaussCoefficientSet::<f64>::from_reader(Cursor::new(text)).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn rejects_malformed_row_with_line_number() {
        let text = "  2020.0  TEST  x\n  1  0  oops  0.0\n9999\n";
        match GaussCoefficientSet::<f64>::from_reader(Cursor::new(text)) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_missing_header() {
        let text = "\n";
        assert!(GaussCoefficientSet::<f64>::from_reader(Cursor::new(text)).is_err());
    }

    #[test]
    fn dipole_equator_is_colatitudinal() {
        let set = dipole(-30000.0);
        let pos = GeoPosition::new(EARTH_RADIUS, std::f64::consts::FRAC_PI_2, 0.7);
        let b = set.evaluate_field(&pos, 1).unwrap();
        assert!((b.magnitude() - 3.0e-5).abs() / 3.0e-5 < 1e-12);
        assert!(b.radial.abs() < 1e-18);
        assert!(b.longitudinal.abs() < 1e-18);
    }

    #[test]
    fn dipole_pole_is_radial_and_doubled() {
        let set = dipole(-30000.0);
        let pos = GeoPosition::new(EARTH_RADIUS, 0.0, 0.0);
        let b = set.evaluate_field(&pos, 1).unwrap();
        assert!((b.magnitude() - 6.0e-5).abs() / 6.0e-5 < 1e-12);
        assert!(b.colatitudinal.abs() < 1e-18);
        assert!(b.longitudinal.abs() < 1e-18);
    }

    #[test]
    fn dipole_closed_form_everywhere() {
        // B_r = 2 (a/r)^3 g10 cos θ, B_θ = (a/r)^3 g10 sin θ.
        let g10 = -30000.0e-9;
        let set = dipole(-30000.0);
        for &(r, theta) in &[
            (6.5e6, 0.3),
            (7.0e6, 1.1),
            (6.4e6, 2.7),
            (2.0e7, 1.5707),
            (3.5e6, 0.01),
        ] {
            let pos = GeoPosition::new(r, theta, 1.9);
            let b = set.evaluate_field(&pos, 1).unwrap();
            let f = (EARTH_RADIUS / r).powi(3);
            let br = 2.0 * f * g10 * theta.cos();
            let bt = f * g10 * theta.sin();
            assert!((b.radial - br).abs() <= 1e-12 * br.abs().max(1e-9));
            assert!((b.colatitudinal - bt).abs() <= 1e-12 * bt.abs().max(1e-9));
        }
    }

    #[test]
    fn refuses_core_evaluation() {
        let set = dipole(-30000.0);
        let pos = GeoPosition::new(3.0e6, 1.0, 0.0);
        assert!(matches!(
            set.evaluate_field(&pos, 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn longitude_wraps_identically() {
        let set = dipole(-30000.0);
        let tilted = GaussCoefficientSet::from_tables(
            2020.0,
            vec![vec![0.0], vec![-25000.0e-9, 3000.0e-9]],
            vec![vec![0.0], vec![0.0, -1500.0e-9]],
        )
        .unwrap();
        for set in [&set, &tilted] {
            let a = set
                .evaluate_field(&GeoPosition::new(6.6e6, 1.2, 0.4), 1)
                .unwrap();
            let b = set
                .evaluate_field(
                    &GeoPosition::new(6.6e6, 1.2, 0.4 + 2.0 * std::f64::consts::PI),
                    1,
                )
                .unwrap();
            assert!((a.radial - b.radial).abs() < 1e-20);
            assert!((a.colatitudinal - b.colatitudinal).abs() < 1e-20);
            assert!((a.longitudinal - b.longitudinal).abs() < 1e-20);
        }
    }

    #[test]
    fn truncation_is_additive_per_degree() {
        // Field at degree d equals sum of per-degree-only contributions.
        let g = vec![
            vec![0.0],
            vec![-29404.5e-9, -1450.7e-9],
            vec![-2500.0e-9, 2982.0e-9, 1676.8e-9],
            vec![1363.9e-9, -2381.0e-9, 1236.2e-9, 525.7e-9],
        ];
        let h = vec![
            vec![0.0],
            vec![0.0, 4652.9e-9],
            vec![0.0, -2991.6e-9, -734.8e-9],
            vec![0.0, -82.2e-9, 241.8e-9, -542.9e-9],
        ];
        let full = GaussCoefficientSet::from_tables(2020.0, g.clone(), h.clone()).unwrap();
        let pos = GeoPosition::new(6.8e6, 0.9, -2.1);
        let b3 = full.evaluate_field(&pos, 3).unwrap();
        let mut sum = (0.0, 0.0, 0.0);
        for d in 1..=3 {
            let mut gd: Vec<Vec<f64>> = g.iter().map(|r| vec![0.0; r.len()]).collect();
            let mut hd = gd.clone();
            gd[d] = g[d].clone();
            hd[d] = h[d].clone();
            let single = GaussCoefficientSet::from_tables(2020.0, gd, hd).unwrap();
            let b = single.evaluate_field(&pos, 3).unwrap();
            sum.0 += b.radial;
            sum.1 += b.colatitudinal;
            sum.2 += b.longitudinal;
        }
        assert!((b3.radial - sum.0).abs() < 1e-19);
        assert!((b3.colatitudinal - sum.1).abs() < 1e-19);
        assert!((b3.longitudinal - sum.2).abs() < 1e-19);
    }

    #[test]
    fn divergence_free_by_finite_difference() {
        let g = vec![
            vec![0.0],
            vec![-29404.5e-9, -1450.7e-9],
            vec![-2500.0e-9, 2982.0e-9, 1676.8e-9],
        ];
        let h = vec![
            vec![0.0],
            vec![0.0, 4652.9e-9],
            vec![0.0, -2991.6e-9, -734.8e-9],
        ];
        let set = GaussCoefficientSet::from_tables(2020.0, g, h).unwrap();
        let step = 100.0;
        for &(x, y, z) in &[
            (5.0e6_f64, 2.0e6, 3.0e6),
            (-4.0e6, 4.0e6, -2.5e6),
            (6.0e6, -1.0e6, 3.0e6),
        ] {
            let p = Vec3::new(x, y, z);
            let mut div = 0.0;
            let mut mag = 0.0;
            for axis in 0..3 {
                let mut d = Vec3::zero();
                match axis {
                    0 => d.x = step,
                    1 => d.y = step,
                    _ => d.z = step,
                }
                let bp = set.evaluate_field_cartesian(p + d, 2).unwrap();
                let bm = set.evaluate_field_cartesian(p - d, 2).unwrap();
                let delta = match axis {
                    0 => bp.x - bm.x,
                    1 => bp.y - bm.y,
                    _ => bp.z - bm.z,
                };
                div += delta / (2.0 * step);
                mag = f64::max(mag, bp.norm());
            }
            assert!(div.abs() < 1e-6 * mag / step, "div = {div}");
        }
    }

    #[test]
    fn f32_agrees_with_f64_to_single_precision() {
        let text = "  2020.0  TEST  x\n  1  0  -30000.0  0.0\n  1  1  -1450.0  4650.0\n9999\n";
        let s64 = GaussCoefficientSet::<f64>::from_reader(Cursor::new(text)).unwrap();
        let s32 = GaussCoefficientSet::<f32>::from_reader(Cursor::new(text)).unwrap();
        let b64 = s64
            .evaluate_field(&GeoPosition::new(6.6e6, 1.0, 0.5), 1)
            .unwrap();
        let b32 = s32
            .evaluate_field(&GeoPosition::new(6.6e6_f32, 1.0, 0.5), 1)
            .unwrap();
        assert!((b64.magnitude() - b32.magnitude() as f64).abs() / b64.magnitude() < 1e-5);
    }
}
