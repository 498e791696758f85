//! Discrete Fourier amplitude spectrum with peak and line-split detection.

use rustfft::num_complex::Complex;
use rustfft::{FftNum, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Window applied before the transform. Rectangular keeps Parseval exact;
/// Hann trades leakage for scalloping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    None,
    Hann,
}

/// Detected spectral line.
#[derive(Debug, Clone, Copy)]
pub struct Peak<T> {
    pub frequency: T,
    pub amplitude: T,
}

/// Peak-finder configuration.
#[derive(Debug, Clone, Copy)]
pub struct PeakConfig<T> {
    /// Minimum amplitude relative to the strongest line.
    pub min_relative_amplitude: T,
    /// Minimum separation between reported peaks, Hz.
    pub min_separation_hz: T,
    /// Search window around the main line for its split partner, Hz.
    pub split_search_window_hz: T,
}

impl<T: Scalar> Default for PeakConfig<T> {
    fn default() -> Self {
        Self {
            min_relative_amplitude: T::from_f64c(1e-3),
            // Half of the expected Earth-rotation split.
            min_separation_hz: T::from_f64c(6.0e-6),
            split_search_window_hz: T::from_f64c(3.0e-5),
        }
    }
}

/// One-sided amplitude spectrum plus detected structure.
#[derive(Debug, Clone)]
pub struct SpectrumResult<T> {
    /// Uniform frequency grid spanning [0, 1/(2 dt)], Hz.
    pub frequencies: Vec<T>,
    /// Amplitude density per line (sinusoid amplitude units).
    pub amplitudes: Vec<T>,
    /// Peaks sorted by amplitude, descending.
    pub peaks: Vec<Peak<T>>,
    /// Strongest non-DC line, Hz.
    pub main_line: Option<T>,
    /// Separation of the main line's split pair, Hz, when resolvable.
    pub split: Option<T>,
    pub split_resolved: bool,
}

/// One-sided DFT amplitude spectrum of a uniformly sampled scalar series.
pub fn amplitude_spectrum<T: Scalar + FftNum>(
    values: &[T],
    dt: T,
    window: Window,
    peak_cfg: &PeakConfig<T>,
) -> Result<SpectrumResult<T>> {
    if values.len() < 4 {
        return Err(Error::Argument("series too short for a spectrum".into()));
    }
    if dt <= T::zero() {
        return Err(Error::Argument("sample interval must be positive".into()));
    }
    let n = values.len();
    let nf = T::from_f64c(n as f64);

    let mut buf: Vec<Complex<T>> = match window {
        Window::None => values.iter().map(|&v| Complex::new(v, T::zero())).collect(),
        Window::Hann => {
            let two_pi = T::from_f64c(core::f64::consts::TAU);
            let denom = T::from_f64c((n - 1) as f64);
            // Normalize by the coherent gain so line amplitudes stay calibrated.
            let half = T::from_f64c(0.5);
            let mut gain = T::zero();
            let w: Vec<T> = (0..n)
                .map(|i| {
                    let x = half * (T::one() - (two_pi * T::from_f64c(i as f64) / denom).cos());
                    gain += x;
                    x
                })
                .collect();
            let gain = gain / nf;
            values
                .iter()
                .zip(&w)
                .map(|(&v, &wi)| Complex::new(v * wi / gain, T::zero()))
                .collect()
        }
    };

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);

    let n_half = n / 2;
    let two = T::from_f64c(2.0);
    let mut frequencies = Vec::with_capacity(n_half + 1);
    let mut amplitudes = Vec::with_capacity(n_half + 1);
    for (k, c) in buf.iter().take(n_half + 1).enumerate() {
        let f = T::from_f64c(k as f64) / (nf * dt);
        let mag = c.norm() / nf;
        let amp = if k == 0 || (n % 2 == 0 && k == n_half) {
            mag
        } else {
            two * mag
        };
        frequencies.push(f);
        amplitudes.push(amp);
    }

    let peaks = find_peaks(&frequencies, &amplitudes, peak_cfg);
    let main_line = peaks.first().map(|p| p.frequency);
    let (split, split_resolved) = match main_line {
        Some(f_main) => {
            let duration = nf * dt;
            let partner = peaks
                .iter()
                .skip(1)
                .filter(|p| {
                    let sep = (p.frequency - f_main).abs();
                    sep >= peak_cfg.min_separation_hz && sep <= peak_cfg.split_search_window_hz
                })
                .max_by(|a, b| a.amplitude.partial_cmp(&b.amplitude).unwrap());
            match partner {
                Some(p) => {
                    let sep = (p.frequency - f_main).abs();
                    if duration < two / sep {
                        (None, false)
                    } else {
                        (Some(sep), true)
                    }
                }
                None => (None, false),
            }
        }
        None => (None, false),
    };

    Ok(SpectrumResult {
        frequencies,
        amplitudes,
        peaks,
        main_line,
        split,
        split_resolved,
    })
}

/// Local maxima above the relative-amplitude floor, pruned greedily so
/// reported peaks honor the minimum separation (strongest wins).
fn find_peaks<T: Scalar>(
    frequencies: &[T],
    amplitudes: &[T],
    cfg: &PeakConfig<T>,
) -> Vec<Peak<T>> {
    let max_amp = amplitudes
        .iter()
        .skip(1)
        .cloned()
        .fold(T::zero(), T::max);
    if max_amp <= T::zero() {
        return Vec::new();
    }
    let floor = max_amp * cfg.min_relative_amplitude;
    let mut candidates: Vec<Peak<T>> = (1..amplitudes.len().saturating_sub(1))
        .filter(|&i| {
            amplitudes[i] >= floor
                && amplitudes[i] > amplitudes[i - 1]
                && amplitudes[i] >= amplitudes[i + 1]
        })
        .map(|i| Peak {
            frequency: frequencies[i],
            amplitude: amplitudes[i],
        })
        .collect();
    candidates.sort_by(|a, b| b.amplitude.partial_cmp(&a.amplitude).unwrap());
    let mut accepted: Vec<Peak<T>> = Vec::new();
    for c in candidates {
        if accepted
            .iter()
            .all(|a| (a.frequency - c.frequency).abs() >= cfg.min_separation_hz)
        {
            accepted.push(c);
        }
    }
    accepted
}
