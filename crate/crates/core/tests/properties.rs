use censored_mdpd::empirical::{
    kaplan_meier_survival, mdpd_weights, na_tail_ratio, nelson_aalen_survival,
};
use censored_mdpd::estimators::{classical_estimate, Method, SolverOptions, TailFit};
use censored_mdpd::sample::{top_log_excesses, CensoredObservation, OrderedSample};
use censored_mdpd::simulation::{burr_cdf, burr_quantile, frechet_cdf, frechet_quantile};
use proptest::prelude::*;

/// Tie-free observations: strictly increasing times in a shuffled order.
fn observations() -> impl Strategy<Value = Vec<CensoredObservation>> {
    (3usize..60)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0.01f64..5.0, n),
                prop::collection::vec(any::<bool>(), n),
                0.05f64..20.0,
            )
        })
        .prop_map(|(steps, delta, start)| {
            let mut z = start;
            steps
                .iter()
                .zip(delta)
                .map(|(s, d)| {
                    z += s;
                    CensoredObservation { z, delta: d }
                })
                .collect::<Vec<_>>()
        })
        .prop_shuffle()
}

fn with_uncensored_top() -> impl Strategy<Value = Vec<CensoredObservation>> {
    observations().prop_map(|mut obs| {
        let top = obs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.z.total_cmp(&b.1.z))
            .map(|(i, _)| i)
            .unwrap();
        obs[top].delta = true;
        obs
    })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ordering_is_idempotent(obs in observations()) {
        let once = OrderedSample::from_observations(&obs).unwrap();
        let twice = OrderedSample::from_observations(&once.observations()).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn log_excesses_are_nonincreasing_and_nonnegative(obs in observations(), kf in 0.0f64..1.0) {
        let s = OrderedSample::from_observations(&obs).unwrap();
        let k = 1 + (kf * (s.len() - 2) as f64) as usize;
        let w = top_log_excesses(&s, k).unwrap();
        prop_assert!(w.log_excess.iter().all(|&l| l >= 0.0));
        prop_assert!(w.log_excess.windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn permutation_leaves_estimators_unchanged(
        (obs, permuted) in with_uncensored_top().prop_flat_map(|o| (Just(o.clone()), Just(o).prop_shuffle())),
        kf in 0.0f64..1.0,
    ) {
        let s = OrderedSample::from_observations(&obs).unwrap();
        let r = OrderedSample::from_observations(&permuted).unwrap();
        prop_assert_eq!(&s, &r);
        let k = 1 + (kf * (s.len() - 2) as f64) as usize;
        for m in [Method::Hill, Method::Efg, Method::Mns] {
            let a = classical_estimate(m, &s, k).ok().map(|e| e.gamma1_hat);
            let b = classical_estimate(m, &r, k).ok().map(|e| e.gamma1_hat);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn ratio_identity(obs in observations(), kf in 0.0f64..1.0, if_ in 0.0f64..1.0) {
        let s = OrderedSample::from_observations(&obs).unwrap();
        let n = s.len();
        let k = 1 + (kf * (n - 2) as f64) as usize;
        let i = 1 + (if_ * (k - 1) as f64) as usize;
        let z = s.z_sorted();
        // Strict inequality: survival at Z_{n-i+1:n} counts order statistics up
        // to Z_{n-i:n}; evaluating between Z_{n-k:n} and the next one counts up
        // to Z_{n-k:n}.
        let num = nelson_aalen_survival(&s, z[n - i]);
        let den = nelson_aalen_survival(&s, 0.5 * (z[n - k - 1] + z[n - k]));
        prop_assert!(close(num / den, na_tail_ratio(&s, k, i).unwrap(), 1e-12));
    }

    #[test]
    fn weights_nest_across_windows(obs in observations(), kf in 0.0f64..1.0, kpf in 0.0f64..1.0) {
        let s = OrderedSample::from_observations(&obs).unwrap();
        let n = s.len();
        let k = 1 + (kf * (n - 2) as f64) as usize;
        let kp = 1 + (kpf * (k - 1) as f64) as usize;
        let big = mdpd_weights(&s, k).unwrap();
        let small = mdpd_weights(&s, kp).unwrap();
        let top = s.delta_concomitant().iter().rev();
        let factor: f64 = top
            .enumerate()
            .map(|(idx, &d)| (idx + 1, d))
            .filter(|&(j, d)| j > kp && j <= k && d)
            .map(|(j, _)| (-1.0 / j as f64).exp())
            .product();
        for i in 0..kp {
            prop_assert!(close(big.a[i], small.a[i] * factor, 1e-12) || (big.a[i] == 0.0 && small.a[i] == 0.0));
        }
    }

    #[test]
    fn weights_are_bounded(obs in observations(), kf in 0.0f64..1.0) {
        let s = OrderedSample::from_observations(&obs).unwrap();
        let k = 1 + (kf * (s.len() - 2) as f64) as usize;
        let w = mdpd_weights(&s, k).unwrap();
        for (i, &a) in w.a.iter().enumerate() {
            prop_assert!(a >= 0.0 && a <= 1.0 / (i + 1) as f64);
        }
    }

    #[test]
    fn survival_estimators_are_monotone(obs in observations(), xs in prop::collection::vec(0.0f64..400.0, 2..20)) {
        let s = OrderedSample::from_observations(&obs).unwrap();
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        for p in xs.windows(2) {
            prop_assert!(kaplan_meier_survival(&s, p[1]) <= kaplan_meier_survival(&s, p[0]));
            prop_assert!(nelson_aalen_survival(&s, p[1]) <= nelson_aalen_survival(&s, p[0]));
        }
    }

    #[test]
    fn estimators_are_scale_invariant(obs in with_uncensored_top(), kf in 0.0f64..1.0, c in 0.01f64..100.0) {
        let s = OrderedSample::from_observations(&obs).unwrap();
        let t = s.scaled(c).unwrap();
        let k = 1 + (kf * (s.len() - 2) as f64) as usize;
        for m in [Method::Hill, Method::Efg, Method::Worms, Method::Mns] {
            match (classical_estimate(m, &s, k), classical_estimate(m, &t, k)) {
                (Ok(a), Ok(b)) => prop_assert!((a.gamma1_hat - b.gamma1_hat).abs() <= 1e-10 * (1.0 + a.gamma1_hat.abs())),
                (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
            }
        }
        let opts = SolverOptions::default();
        let a = TailFit::new(&s, k).unwrap().estimate(0.3, &opts);
        let b = TailFit::new(&t, k).unwrap().estimate(0.3, &opts);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert!((a.gamma1_hat - b.gamma1_hat).abs() <= 1e-7 * (1.0 + a.gamma1_hat)),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn roots_are_valid(obs in with_uncensored_top(), kf in 0.0f64..1.0, alpha in 0.01f64..2.0) {
        let s = OrderedSample::from_observations(&obs).unwrap();
        let k = 1 + (kf * (s.len() - 2) as f64) as usize;
        let fit = TailFit::new(&s, k).unwrap();
        if let Ok(e) = fit.estimate(alpha, &SolverOptions::default()) {
            let d = e.diagnostics.unwrap();
            prop_assert!(d.residual.abs() <= 1e-10);
            prop_assert!(fit.residual(e.gamma1_hat, alpha).abs() <= 1e-10);
            prop_assert!(d.bracket.0 < e.gamma1_hat && e.gamma1_hat < d.bracket.1);
            for r in d.roots {
                prop_assert!(fit.residual(r, alpha).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn alpha_zero_is_mns(obs in observations(), kf in 0.0f64..1.0) {
        let s = OrderedSample::from_observations(&obs).unwrap();
        let k = 1 + (kf * (s.len() - 2) as f64) as usize;
        let fit = TailFit::new(&s, k).unwrap();
        let mns = censored_mdpd::estimators::mns_estimator(&s, k).unwrap();
        match fit.estimate(0.0, &SolverOptions::default()) {
            Ok(e) => prop_assert_eq!(e.gamma1_hat.to_bits(), mns.to_bits()),
            Err(_) => prop_assert!(!fit.has_uncensored()),
        }
    }

    #[test]
    fn quantiles_round_trip(u in 1e-9f64..(1.0 - 1e-9), g1 in 0.1f64..1.5, eta in 0.1f64..2.0, g2 in 0.1f64..2.0) {
        let x = burr_quantile(u, g1, eta).unwrap();
        prop_assert!((burr_cdf(x, g1, eta) - u).abs() <= 1e-12);
        let y = frechet_quantile(u, g2).unwrap();
        prop_assert!((frechet_cdf(y, g2) - u).abs() <= 1e-12);
    }
}
