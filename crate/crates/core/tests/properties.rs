use fewbody::cli::csv::{decode_row, encode_row, float};
use fewbody::cli::RunConfig;
use fewbody::faddeev::extrapolate_to_zero;
use fewbody::model::{kinematic_rotation, radial_grid, MassSet, Pair, PotentialSpec};
use fewbody::twobody::{critical_coupling, unit_mu};
use fewbody::variational::{ball_fraction, Width};
use proptest::prelude::*;

fn config(depth: f64, range: f64, ratio: f64) -> String {
    format!("[model]\nmasses = 1, 2, 3\n[model.pair12]\nkind = exponential\ndepth = {depth}\nrange = {range}\ncoupling_ratio = {ratio}\n[numerics]\ntol = 1e-7\n")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn csv_floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let back: f64 = float(x).parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }

    #[test]
    fn csv_rows_round_trip(row in proptest::collection::vec("[ -~]{0,12}", 1..6)) {
        prop_assert_eq!(decode_row(&encode_row(&row)).unwrap(), row);
    }

    #[test]
    fn echo_is_a_fixed_point(depth in 0.1f64..10.0, range in 0.1f64..5.0, ratio in 0.0f64..1.5) {
        let a = RunConfig::parse_str(&config(depth, range, ratio)).unwrap();
        let b = RunConfig::parse_str(&a.echo()).unwrap();
        prop_assert_eq!(a.echo(), b.echo());
        prop_assert_eq!(a.hash(), b.hash());
    }

    #[test]
    fn hash_sees_every_physics_change(depth in 0.1f64..10.0, bump in 1e-9f64..1e-3) {
        let a = RunConfig::parse_str(&config(depth, 1.0, 0.5)).unwrap();
        let b = RunConfig::parse_str(&config(depth * (1.0 + bump), 1.0, 0.5)).unwrap();
        prop_assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn rotation_is_orthogonal(m1 in 0.1f64..10.0, m2 in 0.1f64..10.0, m3 in 0.1f64..10.0) {
        let masses = MassSet::new(m1, m2, m3).unwrap();
        for a in Pair::ALL {
            for b in Pair::ALL {
                let (c, s) = kinematic_rotation(&masses, a, b);
                prop_assert!((c * c + s * s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ball_fraction_is_a_monotone_probability(a in 0.01f64..10.0, b in 0.01f64..10.0, t in -0.99f64..0.99, r in 0.01f64..10.0) {
        let w = Width { xx: a, yy: b, xy: t * (a * b).sqrt() };
        let p = ball_fraction(&w, r).unwrap();
        let q = ball_fraction(&w, 1.1 * r).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(q >= p - 1e-12);
        prop_assert_eq!(ball_fraction(&w, r).unwrap(), ball_fraction(&w.exchanged(), r).unwrap());
    }

    #[test]
    fn linear_data_extrapolates_exactly(r0 in -5.0f64..5.0, slope in -5.0f64..5.0) {
        let z = [1e-2, 1e-3];
        let r = z.map(|zz| r0 + slope * zz);
        prop_assert!((extrapolate_to_zero(z, r) - r0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // -Δ - λ d V(r/R) maps to -Δ - λ d R² V(r) by r → R r
    #[test]
    fn threshold_scales_with_depth_and_range(depth in 0.2f64..5.0, range in 0.3f64..3.0) {
        let unit = PotentialSpec::gaussian(1.0, 1.0).unwrap();
        let base = critical_coupling(&unit, &radial_grid(&unit, 32), 1e-8).unwrap();
        let pot = PotentialSpec::gaussian(depth, range).unwrap();
        let star = critical_coupling(&pot, &radial_grid(&pot, 32), 1e-8).unwrap();
        prop_assert!((star * depth * range * range / base - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mu_decreases_with_k(k in 0.0f64..2.0) {
        let pot = PotentialSpec::gaussian(1.0, 1.0).unwrap();
        let grid = radial_grid(&pot, 32);
        let a = unit_mu(&pot, k, &grid).unwrap();
        let b = unit_mu(&pot, k + 0.1, &grid).unwrap();
        prop_assert!(b < a);
        prop_assert!(a > 0.0);
    }
}
