//! Matched-filter amplitude extraction, campaign sensitivity, and
//! coupling exclusion curves.

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::scalar::Scalar;

/// Least-squares amplitude of `template` inside `signal`:
/// the inner product ratio <s,t>/<t,t>.
pub fn lockin_amplitude<T: Scalar>(signal: &[T], template: &[T]) -> Result<T> {
    if signal.len() != template.len() {
        return Err(Error::Argument(
            "signal and template lengths differ".into(),
        ));
    }
    if signal.is_empty() {
        return Err(Error::Argument("empty series".into()));
    }
    let mut st = KahanSum::new();
    let mut tt = KahanSum::new();
    for (&s, &t) in signal.iter().zip(template) {
        st.add(s * t);
        tt.add(t * t);
    }
    let power = tt.value();
    if power <= T::zero() {
        return Err(Error::Argument("template has zero power".into()));
    }
    Ok(st.value() / power)
}

/// Sinusoid amplitude at `frequency` from in-phase and quadrature
/// projections, independent of phase.
pub fn quadrature_amplitude<T: Scalar>(signal: &[T], dt: T, frequency: T) -> Result<T> {
    if signal.len() < 4 {
        return Err(Error::Argument("series too short".into()));
    }
    if dt <= T::zero() || frequency <= T::zero() {
        return Err(Error::Argument(
            "sample interval and frequency must be positive".into(),
        ));
    }
    let two_pi = T::from_f64c(core::f64::consts::TAU);
    let mut ci = KahanSum::new();
    let mut cq = KahanSum::new();
    for (i, &s) in signal.iter().enumerate() {
        let phase = two_pi * frequency * T::from_f64c(i as f64) * dt;
        ci.add(s * phase.cos());
        cq.add(s * phase.sin());
    }
    let n = T::from_f64c(signal.len() as f64);
    let two = T::from_f64c(2.0);
    let i_amp = two * ci.value() / n;
    let q_amp = two * cq.value() / n;
    Ok((i_amp * i_amp + q_amp * q_amp).sqrt())
}

/// Field threshold reachable by averaging independent shots over a campaign:
/// per-shot sensitivity divided by the square root of the shot count.
pub fn campaign_sensitivity<T: Scalar>(
    shot_sensitivity: T,
    shot_time_s: T,
    campaign_days: T,
) -> Result<T> {
    if shot_sensitivity <= T::zero() || shot_time_s <= T::zero() || campaign_days <= T::zero() {
        return Err(Error::Argument(
            "sensitivity, shot time, and campaign length must be positive".into(),
        ));
    }
    let shots = campaign_days * T::from_f64c(86_400.0) / shot_time_s;
    if shots < T::one() {
        return Err(Error::Argument(
            "campaign shorter than a single shot".into(),
        ));
    }
    Ok(shot_sensitivity / shots.sqrt())
}

/// Coupling upper limit versus interaction range.
#[derive(Debug, Clone)]
pub struct ExclusionCurve<T> {
    /// Interaction ranges, m.
    pub lambdas: Vec<T>,
    /// Predicted signal amplitude per unit coupling at each range.
    pub amplitudes: Vec<T>,
    /// Coupling limits: detection threshold / amplitude per unit coupling.
    pub limits: Vec<T>,
    /// True where the amplitude vanished and no limit can be set.
    pub unbounded: Vec<bool>,
}

/// Convert per-unit-coupling signal amplitudes into coupling limits at the
/// given detection threshold. Non-positive amplitudes yield no bound.
pub fn exclusion_curve<T: Scalar>(
    lambdas: &[T],
    amplitudes_per_unit_coupling: &[T],
    detection_threshold: T,
) -> Result<ExclusionCurve<T>> {
    if lambdas.len() != amplitudes_per_unit_coupling.len() {
        return Err(Error::Argument(
            "range and amplitude arrays differ in length".into(),
        ));
    }
    if lambdas.is_empty() {
        return Err(Error::Argument("empty range grid".into()));
    }
    if detection_threshold <= T::zero() {
        return Err(Error::Argument(
            "detection threshold must be positive".into(),
        ));
    }
    for &l in lambdas {
        if !(l > T::zero()) && !l.is_infinite() {
            return Err(Error::Argument(
                "interaction ranges must be positive".into(),
            ));
        }
    }
    let mut limits = Vec::with_capacity(lambdas.len());
    let mut unbounded = Vec::with_capacity(lambdas.len());
    for &a in amplitudes_per_unit_coupling {
        if a > T::zero() {
            limits.push(detection_threshold / a);
            unbounded.push(false);
        } else {
            limits.push(T::infinity());
            unbounded.push(true);
        }
    }
    Ok(ExclusionCurve {
        lambdas: lambdas.to_vec(),
        amplitudes: amplitudes_per_unit_coupling.to_vec(),
        limits,
        unbounded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn lockin_recovers_scale_factor() {
        let template: Vec<f64> = (0..500)
            .map(|i| (0.01 * i as f64).sin() + 0.3 * (0.02 * i as f64).cos())
            .collect();
        let signal: Vec<f64> = template.iter().map(|t| 3.7 * t).collect();
        let a = lockin_amplitude(&signal, &template).unwrap();
        assert!((a - 3.7).abs() < 1e-12);
    }

    #[test]
    fn lockin_orthogonal_component_ignored() {
        let n = 1000;
        let template: Vec<f64> = (0..n)
            .map(|i| (core::f64::consts::TAU * 10.0 * i as f64 / n as f64).sin())
            .collect();
        let orthogonal: Vec<f64> = (0..n)
            .map(|i| (core::f64::consts::TAU * 10.0 * i as f64 / n as f64).cos())
            .collect();
        let signal: Vec<f64> = template
            .iter()
            .zip(&orthogonal)
            .map(|(t, o)| 2.0 * t + 5.0 * o)
            .collect();
        let a = lockin_amplitude(&signal, &template).unwrap();
        assert!((a - 2.0).abs() < 1e-9);
    }

    #[test]
    fn lockin_zero_template_rejected() {
        let z = vec![0.0_f64; 10];
        let s = vec![1.0_f64; 10];
        assert!(lockin_amplitude(&s, &z).is_err());
        assert!(lockin_amplitude(&s, &s[..5]).is_err());
    }

    #[test]
    fn lockin_noise_averages_down() {
        // SNR 0.1 per sample: the matched filter still finds the amplitude
        // to within a few percent over a long record.
        let n = 200_000;
        let amp = 1.0e-15;
        let template: Vec<f64> = (0..n)
            .map(|i| (core::f64::consts::TAU * 123.0 * i as f64 / n as f64).sin())
            .collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let signal: Vec<f64> = template
            .iter()
            .map(|t| {
                let x: f64 = StandardNormal.sample(&mut rng);
                amp * t + 10.0 * amp * x
            })
            .collect();
        let a = lockin_amplitude(&signal, &template).unwrap();
        assert!((a - amp).abs() / amp < 0.1, "a = {a}");
    }

    #[test]
    fn quadrature_matches_known_amplitude_any_phase() {
        let dt = 2.0;
        let n = 4096;
        let f0 = 40.0 / (n as f64 * dt);
        for phase in [0.0, 0.7, 1.9, 3.0] {
            let series: Vec<f64> = (0..n)
                .map(|i| 5.5 * (core::f64::consts::TAU * f0 * i as f64 * dt + phase).cos())
                .collect();
            let a = quadrature_amplitude(&series, dt, f0).unwrap();
            assert!((a - 5.5).abs() < 1e-9, "phase {phase}: a = {a}");
        }
    }

    #[test]
    fn campaign_sensitivity_reference_value() {
        let t = campaign_sensitivity(4.3e-15_f64, 1165.0, 100.0).unwrap();
        assert!((t - 4.99e-17).abs() / 4.99e-17 < 0.01, "t = {t}");
    }

    #[test]
    fn campaign_sensitivity_scales_with_sqrt_shots() {
        let one = campaign_sensitivity(1.0e-15_f64, 100.0, 1.0).unwrap();
        let four = campaign_sensitivity(1.0e-15_f64, 100.0, 4.0).unwrap();
        assert!((one / four - 2.0).abs() < 1e-12);
        assert!(campaign_sensitivity(1.0e-15_f64, 86_400.0 * 2.0, 1.0).is_err());
    }

    #[test]
    fn exclusion_limits_satisfy_definition() {
        let lambdas = vec![1.0e5_f64, 1.0e6, 1.0e7, 1.0e9];
        let amps = vec![2.0e-14, 8.0e-13, 3.0e-12, 3.2e-12];
        let threshold = 4.99e-17;
        let curve = exclusion_curve(&lambdas, &amps, threshold).unwrap();
        for ((limit, amp), flag) in curve.limits.iter().zip(&curve.amplitudes).zip(&curve.unbounded)
        {
            assert!(!flag);
            assert!((limit * amp - threshold).abs() / threshold < 1e-12);
        }
        // Doubling the threshold doubles every limit.
        let curve2 = exclusion_curve(&lambdas, &amps, 2.0 * threshold).unwrap();
        for (a, b) in curve.limits.iter().zip(&curve2.limits) {
            assert!((b / a - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exclusion_marks_vanishing_amplitude_unbounded() {
        let curve = exclusion_curve(&[1.0_f64, 2.0], &[0.0, 1.0e-12], 1.0e-16).unwrap();
        assert_eq!(curve.unbounded, vec![true, false]);
        assert!(curve.limits[0].is_infinite());
    }

    #[test]
    fn exclusion_input_validation() {
        assert!(exclusion_curve(&[1.0_f64], &[1.0, 2.0], 1.0).is_err());
        assert!(exclusion_curve::<f64>(&[], &[], 1.0).is_err());
        assert!(exclusion_curve(&[1.0_f64], &[1.0], 0.0).is_err());
        assert!(exclusion_curve(&[-1.0_f64], &[1.0], 1.0).is_err());
    }
}
