use polarization::asymptotics::tau;
use polarization::distribution::{empirical_counts, weighted_hausdorff, Partition, Region};
use polarization::energy::energy_of;
use polarization::extremal::covering_radius;
use polarization::*;
use proptest::prelude::*;

fn sets() -> Vec<SetDescriptor> {
    vec![
        SetDescriptor::interval(-1.0, 2.0).unwrap(),
        SetDescriptor::circle(1.5).unwrap(),
        SetDescriptor::sphere(3).unwrap(),
        SetDescriptor::cube(2).unwrap(),
        SetDescriptor::ball(2).unwrap(),
    ]
}

fn config_on(set: &SetDescriptor, raw: &[f64]) -> Configuration {
    let p = set.ambient_dim();
    let pts: Vec<Vec<f64>> = raw.chunks_exact(p).map(|c| c.to_vec()).collect();
    Configuration::projected(set, &pts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projection_is_idempotent(which in 0usize..5, x in prop::collection::vec(-3.0f64..3.0, 3)) {
        let set = &sets()[which];
        let p = set.project(&x[..set.ambient_dim()]);
        prop_assert!(set.contains(&p, set.membership_tolerance()));
        let q = set.project(&p);
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn tau_is_multiplicative(p in 1usize..4, extra in 0.01f64..3.0, m in 2u32..5, n in 2usize..500) {
        let s = p as f64 + extra;
        let lhs = tau(s, p, (m.pow(p as u32) as usize * n) as f64).unwrap();
        let rhs = (m as f64).powf(s) * tau(s, p, n as f64).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn energy_is_permutation_invariant(raw in prop::collection::vec(-1.0f64..1.0, 12), rot in 1usize..6) {
        let set = SetDescriptor::circle(1.0).unwrap();
        let cfg = config_on(&set, &raw);
        let mut pts = cfg.to_vecs();
        let len = pts.len();
        pts.rotate_left(rot % len);
        pts.reverse();
        let k = KernelSpec::riesz(2.0).unwrap();
        let a = energy_of(&cfg, &k).unwrap();
        let b = energy_of(&Configuration::new(&set, &pts).unwrap(), &k).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn counts_sum_to_n(raw in prop::collection::vec(-2.0f64..2.0, 2..40), k in 1usize..9) {
        let set = SetDescriptor::circle(1.0).unwrap();
        let cfg = config_on(&set, &raw[..raw.len() / 2 * 2]);
        let part = Partition::param_bins(&set, k, 0.37).unwrap();
        let counts = empirical_counts(&cfg, &set, &part).unwrap();
        prop_assert_eq!(counts.iter().sum::<usize>(), cfg.len());
        let sq = SetDescriptor::cube(2).unwrap();
        let cfg = config_on(&sq, &raw[..raw.len() / 2 * 2]);
        let counts = empirical_counts(&cfg, &sq, &Partition::box_grid(&sq, k).unwrap()).unwrap();
        prop_assert_eq!(counts.iter().sum::<usize>(), cfg.len());
    }

    #[test]
    fn potential_scales_and_translates(raw in prop::collection::vec(-1.0f64..1.0, 10), y in -1.0f64..1.0, alpha in 0.1f64..10.0, b in -5.0f64..5.0) {
        let set = SetDescriptor::interval(-1.0, 1.0).unwrap();
        let cfg = config_on(&set, &raw);
        let s = 1.7;
        let k = KernelSpec::riesz(s).unwrap();
        let u = potential_at(&[y], &cfg, &k);
        let v = potential_at(&[alpha * y + b], &cfg.transformed(alpha, &[b]), &k);
        prop_assume!(u.is_finite());
        prop_assert!((v - alpha.powf(-s) * u).abs() <= 1e-10 * v.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// `ρ^{-s} ≤ P_s ≤ N ρ^{-s}`.
    #[test]
    fn polarization_is_sandwiched_by_covering_radius(raw in prop::collection::vec(-1.0f64..1.0, 2..12), s in 1.0f64..30.0) {
        let set = SetDescriptor::circle(1.0).unwrap();
        let cfg = config_on(&set, &raw[..raw.len() / 2 * 2]);
        let n = cfg.len() as f64;
        let rho = covering_radius(&cfg, &set, 1e-9).unwrap();
        let p = polarization_with(&cfg, &set, &KernelSpec::riesz(s).unwrap(), &BracketOptions::relative(1e-9)).unwrap();
        prop_assert!(p.upper.powf(1.0 / s) * rho.upper >= 1.0 - 1e-8);
        prop_assert!(p.lower.powf(1.0 / s) * rho.lower <= n.powf(1.0 / s) * (1.0 + 1e-8));
    }

    #[test]
    fn weighted_measure_is_additive(k in 1usize..7, offset in 0.0f64..6.3, s in 1.0f64..6.0) {
        let set = SetDescriptor::circle(1.0).unwrap();
        let w = Weight::separable(ScalarField::axial(2.0, 0.5, 2), ScalarField::axial(1.5, -0.5, 2), 0.1).unwrap();
        let total = weighted_hausdorff(&set, Some(&w), s, &Region::Whole).unwrap();
        let parts: f64 = Partition::param_bins(&set, k, offset)
            .unwrap()
            .regions
            .iter()
            .map(|r| weighted_hausdorff(&set, Some(&w), s, r).unwrap())
            .sum();
        prop_assert!((parts - total).abs() <= 1e-8 * total);
    }
}
