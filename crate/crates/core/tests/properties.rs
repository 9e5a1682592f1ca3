use std::collections::BTreeMap;

use etadense::dirichlet::mangoldt_sum;
use etadense::eta::{eta_tilde_weighted, y_m, QuadSpec};
use etadense::hunt::{kronecker_search, TorusTarget};
use etadense::polygon::{polygon_angles, RadiiSet};
use etadense::polylog::polylog;
use etadense::torus::s_sum;
use etadense::{log_zeta_horizontal, zeta, ComplexPoint, EvalParams, ZeroRecord, ZeroTable};
use num_complex::Complex64;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn exp_log_zeta_is_zeta(sigma in 0.55f64..3.0, t in 1.0f64..60.0) {
        let table = ZeroTable::bundled();
        let p = EvalParams::default();
        prop_assume!(table.near(t, 0.05).is_empty());
        let l = log_zeta_horizontal(sigma, t, &table, &p).unwrap();
        let z = zeta(ComplexPoint::new(sigma, t).unwrap(), &p).unwrap();
        prop_assert!((l.exp() - z).norm() <= 1e-9 * z.norm().max(1.0));
    }

    #[test]
    fn log_zeta_conjugate_symmetry(sigma in 0.55f64..3.0, t in 0.5f64..60.0) {
        let table = ZeroTable::bundled();
        let p = EvalParams::default();
        prop_assume!(table.near(t, 0.05).is_empty());
        let up = log_zeta_horizontal(sigma, t, &table, &p).unwrap();
        let down = log_zeta_horizontal(sigma, -t, &table, &p).unwrap();
        prop_assert!((up - down.conj()).norm() <= 1e-10);
    }

    #[test]
    fn log_zeta_matches_dirichlet_series(sigma in 2.0f64..4.0, t in -50.0f64..50.0) {
        let p = EvalParams::default();
        let l = log_zeta_horizontal(sigma, t, &ZeroTable::empty(), &p).unwrap();
        // Σ Λ(n)/(log n) n^{-s}, truncated; each omitted coefficient is at most 1
        let x = 2e5;
        let direct = mangoldt_sum(0, sigma, t, x);
        let tail = x.powf(1.0 - sigma) / (sigma - 1.0);
        prop_assert!((l - direct).norm() <= tail + 1e-10, "{} vs {}", l, direct);
    }

    #[test]
    fn eta_tilde_conjugate_symmetry(m in 1u32..=3, sigma in 0.6f64..2.5, t in 1.0f64..40.0) {
        let table = ZeroTable::bundled();
        let q = QuadSpec::default();
        prop_assume!(table.near(t, 0.05).is_empty());
        let up = eta_tilde_weighted(m, sigma, t, &table, &q).unwrap().value;
        let down = eta_tilde_weighted(m, sigma, -t, &table, &q).unwrap().value;
        prop_assert!((up - down.conj()).norm() <= 1e-8);
    }

    #[test]
    fn eta_tilde_decays_right_of_two(m in 1u32..=3, sigma in 2.0f64..6.0, t in -30.0f64..30.0) {
        let q = QuadSpec::default();
        let v = eta_tilde_weighted(m, sigma, t, &ZeroTable::empty(), &q).unwrap().value;
        // |η̃_m| ≤ Σ_{n≥2} n^{-σ} / (log 2)^m
        let bound = (2f64.powf(-sigma) + 2f64.powf(1.0 - sigma) / (sigma - 1.0)) / 2f64.ln().powi(m as i32);
        prop_assert!(v.norm() <= bound, "{} > {}", v.norm(), bound);
    }

    #[test]
    fn polygon_closes_and_rotates(
        radii in prop::collection::vec(0.05f64..1.0, 3..40),
        r in 0.0f64..1.0,
        phase in 0.0f64..6.0,
        spin in 0.0f64..6.0,
    ) {
        let set = RadiiSet::new(radii, None).unwrap();
        let max = set.radii.iter().cloned().fold(0.0, f64::max);
        prop_assume!(2.0 * max <= set.total());
        let z = Complex64::from_polar(r * set.total(), phase);
        let a = polygon_angles(&set, z).unwrap();
        prop_assert!(a.residual <= 1e-10);
        prop_assert!(a.thetas.iter().all(|t| (0.0..1.0).contains(t)));
        let rotated = polygon_angles(&set, z * Complex64::from_polar(1.0, spin)).unwrap();
        prop_assert!(rotated.residual <= 1e-10);
        // the same polygon turned: every angle shifts by the same amount
        if z.norm() > 1e-6 {
            let shift = spin / std::f64::consts::TAU;
            for (x, y) in a.thetas.iter().zip(&rotated.thetas) {
                let d = (x - shift - y).rem_euclid(1.0);
                prop_assert!(d.min(1.0 - d) <= 1e-8);
            }
        }
    }

    #[test]
    fn polylog_conjugate_symmetry(order in 1u32..=6, r in 0.0f64..0.95, phase in -3.1f64..3.1) {
        let z = Complex64::from_polar(r, phase);
        let a = polylog(order, z).unwrap();
        let b = polylog(order, z.conj()).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-14);
    }

    #[test]
    fn zero_sum_is_linear_in_multiplicity(
        m in 1u32..=3,
        beta in 0.55f64..0.99,
        gamma in 1.0f64..30.0,
        mult in 1u32..4,
    ) {
        let one = ZeroTable::new(vec![ZeroRecord { beta, gamma, multiplicity: 1 }], "one").unwrap();
        let many = ZeroTable::new(vec![ZeroRecord { beta, gamma, multiplicity: mult }], "many").unwrap();
        let a = y_m(m, 0.5, 35.0, &one) * mult as f64;
        let b = y_m(m, 0.5, 35.0, &many);
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn torus_sum_is_additive(thetas in prop::collection::vec(0.0f64..1.0, 2..30), split in 1usize..29, m in 1u32..=3) {
        const PRIMES: [u64; 30] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113];
        let split = split.min(thetas.len() - 1);
        let all: BTreeMap<u64, f64> = PRIMES.iter().copied().zip(thetas.iter().copied()).collect();
        let head: BTreeMap<u64, f64> = all.iter().take(split).map(|(&p, &t)| (p, t)).collect();
        let tail: BTreeMap<u64, f64> = all.iter().skip(split).map(|(&p, &t)| (p, t)).collect();
        let whole = s_sum(&all, 0.7, m).unwrap();
        let parts = s_sum(&head, 0.7, m).unwrap() + s_sum(&tail, 0.7, m).unwrap();
        prop_assert!((whole - parts).norm() <= 1e-13);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn kronecker_hits_are_inside_the_box(
        thetas in prop::collection::vec(0.0f64..1.0, 1..=3),
        delta in 0.05f64..0.2,
    ) {
        let primes = [2u64, 3, 5][..thetas.len()].to_vec();
        let target = TorusTarget::new(primes.clone(), thetas.clone(), delta).unwrap();
        let step = delta / (*primes.last().unwrap() as f64).ln();
        let hits = kronecker_search(&target, 0.0, 500.0, step).unwrap();
        prop_assert!(hits.windows(2).all(|w| w[0] < w[1]));
        for t in hits {
            for (&p, &th) in primes.iter().zip(&thetas) {
                let x = (t * (p as f64).ln() / std::f64::consts::TAU).fract();
                let d = (x - th).rem_euclid(1.0);
                prop_assert!(d.min(1.0 - d) <= delta + 1e-12);
            }
        }
    }
}
