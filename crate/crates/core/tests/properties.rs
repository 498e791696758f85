//! Randomized invariant checks across the library.

use proptest::prelude::*;

use geospin::comag::{extract_pseudofield, forward_model, xe129, xe131};
use geospin::earth_source::polarized_density;
use geospin::ssvi::{kernel_vs, FieldSample, InteractionKernel, KernelInput};
use geospin::{FieldSeries64, SensorConfig64, Vec64};

fn quiet_sensor(bias: f64, seed: u64) -> SensorConfig64 {
    SensorConfig64 {
        bias_field: bias,
        sensitive_axis: Vec64::new(0.0, 0.0, 1.0),
        shield_factor: 1.0e8,
        calibration_error: 0.0,
        gyro_noise: 0.0,
        laser_coefficient: 1.9e-17,
        laser_stability_ppm: 190.0,
        shot_sensitivity: 4.3e-15,
        rng_seed: seed,
    }
}

fn series(values: &[f64]) -> FieldSeries64 {
    FieldSeries64 {
        samples: values
            .iter()
            .enumerate()
            .map(|(i, &b)| FieldSample {
                t: i as f64,
                b_eci: Vec64::new(0.0, 0.0, b),
                projection: b,
            })
            .collect(),
        dt: 1.0,
        projection_axis: Vec64::new(0.0, 0.0, 1.0),
    }
}

proptest! {
    // The inversion recovers any injected pseudofield exactly (no noise,
    // perfect calibration), independent of bias, ambient, and rotation.
    #[test]
    fn extraction_round_trips(
        fields in prop::collection::vec(-1.0e-9_f64..1.0e-9, 1..24),
        bias in 1.0e-7_f64..1.0e-5,
        ambient in -5.0e-5_f64..5.0e-5,
        rot in -1.0e-4_f64..1.0e-4,
        seed in any::<u64>(),
    ) {
        let s = series(&fields);
        let n = fields.len();
        let ambient_v = vec![Vec64::new(0.0, 0.0, ambient); n];
        let rotation = vec![rot; n];
        let cfg = quiet_sensor(bias, seed);
        let rec = forward_model(&s, &ambient_v, &rotation, &cfg, (xe129(), xe131())).unwrap();
        let est = extract_pseudofield(&rec, (xe129(), xe131()), &cfg).unwrap();
        for (e, t) in est.iter().zip(&fields) {
            prop_assert!((e - t).abs() <= 1e-9 * t.abs().max(1e-15), "{e} vs {t}");
        }
    }

    // Kernel output is linear in the coupling and odd in the velocity.
    #[test]
    fn kernel_linear_and_velocity_odd(
        sx in -1.0_f64..1.0, sy in -1.0_f64..1.0, sz in 0.1_f64..1.0,
        vx in -8.0e3_f64..8.0e3, vy in -8.0e3_f64..8.0e3, vz in -8.0e3_f64..8.0e3,
        r in 1.0e5_f64..1.0e7,
        scale in 0.01_f64..100.0,
    ) {
        let spin = Vec64::new(sx, sy, sz).normalized().unwrap();
        let sep = Vec64::new(r, 0.3 * r, -0.2 * r);
        let input = KernelInput {
            source_spin: spin,
            velocity: Vec64::new(vx, vy, vz),
            separation: sep,
            distance: sep.norm(),
        };
        let flipped = KernelInput {
            velocity: Vec64::new(-vx, -vy, -vz),
            ..input
        };
        let k1 = InteractionKernel::spin_velocity(1.0, 1.0e7).unwrap();
        let ks = InteractionKernel::spin_velocity(scale, 1.0e7).unwrap();
        let b1 = kernel_vs(&input, &k1).unwrap();
        let bs = kernel_vs(&input, &ks).unwrap();
        let bf = kernel_vs(&flipped, &k1).unwrap();
        prop_assert!((bs - b1.scale(scale)).norm() <= 1e-12 * bs.norm().max(1e-300));
        prop_assert!((bf + b1).norm() <= 1e-12 * b1.norm().max(1e-300));
    }

    // Thermal polarization is bilinear in carrier density and field.
    #[test]
    fn polarization_bilinear(
        rho in 1.0e27_f64..1.0e30,
        b in 1.0e-6_f64..1.0e-3,
        t in 300.0_f64..4000.0,
        k in 0.1_f64..10.0,
    ) {
        let base: f64 = polarized_density(rho, b, t).unwrap();
        let in_rho: f64 = polarized_density(rho * k, b, t).unwrap();
        let in_b: f64 = polarized_density(rho, b * k, t).unwrap();
        prop_assert!((in_rho - base * k).abs() <= 1e-12 * in_rho);
        prop_assert!((in_b - base * k).abs() <= 1e-12 * in_b);
    }

    // z-rotation preserves norms and the z component.
    #[test]
    fn rotation_preserves_norm(
        x in -1.0e7_f64..1.0e7, y in -1.0e7_f64..1.0e7, z in -1.0e7_f64..1.0e7,
        theta in -10.0_f64..10.0,
    ) {
        let v = Vec64::new(x, y, z);
        let r = v.rotated_z(theta);
        prop_assert!((r.norm() - v.norm()).abs() <= 1e-9 * v.norm().max(1e-300));
        prop_assert!((r.z - v.z).abs() == 0.0);
        let back = r.rotated_z(-theta);
        prop_assert!((back - v).norm() <= 1e-9 * v.norm().max(1e-300));
    }

    // Matched-filter amplitude is exact on noiseless scaled templates.
    #[test]
    fn lockin_recovers_scale(
        template in prop::collection::vec(-1.0_f64..1.0, 8..64),
        scale in -100.0_f64..100.0,
    ) {
        let power: f64 = template.iter().map(|t| t * t).sum();
        prop_assume!(power > 1e-6);
        let signal: Vec<f64> = template.iter().map(|t| scale * t).collect();
        let a = geospin::analysis::lockin_amplitude(&signal, &template).unwrap();
        prop_assert!((a - scale).abs() <= 1e-9 * scale.abs().max(1e-12));
    }
}
