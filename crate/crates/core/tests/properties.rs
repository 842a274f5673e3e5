use betacoal::coalescent::{cpp_of_path, simulate_path, tree_length};
use betacoal::coupling_lab::{BlockCoupler, CouplingMode};
use betacoal::limits::{classify_regime, normalize_length, Case};
use betacoal::rates::{dominance_check, jump_law, merge_rate, total_rate, DiscreteLaw};
use betacoal::sampling::{sample_uv_pair, RandomStream, VSampler};
use betacoal::stats::report::Comparison;
use betacoal::stats::{hill_tail_index, ks_two_sample, TailSide};
use betacoal::{AlphaParams, AlphaSpec, BoundaryTag};
use proptest::prelude::*;

fn alpha() -> impl Strategy<Value = f64> {
    1.01f64..1.99
}

fn params(a: f64) -> AlphaParams {
    AlphaParams::new(a).unwrap()
}

fn sample_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, 1..60)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ks_is_symmetric(a in sample_vec(), b in sample_vec()) {
        let ab = ks_two_sample(&a, &b).unwrap();
        let ba = ks_two_sample(&b, &a).unwrap();
        prop_assert_eq!(ab.statistic, ba.statistic);
        prop_assert!((0.0..=1.0).contains(&ab.statistic));
    }

    #[test]
    fn ks_invariant_under_increasing_maps(a in sample_vec(), b in sample_vec()) {
        let f = |x: &f64| (x / 1e3).atan() * 2.0 + 5.0;
        let fa: Vec<f64> = a.iter().map(f).collect();
        let fb: Vec<f64> = b.iter().map(f).collect();
        let d0 = ks_two_sample(&a, &b).unwrap().statistic;
        let d1 = ks_two_sample(&fa, &fb).unwrap().statistic;
        prop_assert!((d0 - d1).abs() < 1e-12);
    }

    #[test]
    fn hill_is_scale_invariant(seed in any::<u64>(), scale in 0.01f64..100.0) {
        let mut s = RandomStream::new(seed, 0);
        let xs: Vec<f64> = (0..400).map(|_| s.uniform().powf(-1.0 / 1.5)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * scale).collect();
        let h0 = hill_tail_index(&xs, 40, TailSide::Right).unwrap();
        let h1 = hill_tail_index(&ys, 40, TailSide::Right).unwrap();
        prop_assert!((h0 - h1).abs() <= 1e-9 * h0.abs());
    }

    #[test]
    fn merge_rates_sum_to_total(a in alpha(), m in 2u64..300) {
        let p = params(a);
        let sum: f64 = (2..=m).map(|k| merge_rate(m, k, &p).unwrap()).sum();
        let total = total_rate(m, &p).unwrap();
        prop_assert!((sum - total).abs() <= 1e-10 * total);
    }

    #[test]
    fn jump_law_is_normalized_and_dominated(a in alpha(), m in 2u64..400) {
        let p = params(a);
        let law = jump_law(m, &p).unwrap();
        let total: f64 = law.pmf_table().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        prop_assert!(dominance_check(m, &p).unwrap());
    }

    #[test]
    fn coupled_pair_is_ordered(a in alpha(), m in 2u64..5000, seed in any::<u64>()) {
        let p = params(a);
        let mut s = RandomStream::new(seed, 3);
        for _ in 0..50 {
            let (u, v) = sample_uv_pair(m, &mut s, &p).unwrap();
            prop_assert!(u >= 1 && u <= m - 1);
            prop_assert!(u <= v);
        }
    }

    #[test]
    fn v_inversion_is_antitone(a in alpha(), u0 in 1e-9f64..1.0, u1 in 1e-9f64..1.0) {
        // invert reads u against the tail, so larger u means smaller k.
        let sampler = VSampler::for_params(&params(a));
        let (lo, hi) = if u0 <= u1 { (u0, u1) } else { (u1, u0) };
        prop_assert!(sampler.invert(lo) >= sampler.invert(hi));
        prop_assert!(sampler.invert(hi) >= sampler.law().support_start());
        let k = sampler.invert(lo);
        prop_assert!(sampler.law().tail(k + 1) <= lo);
    }

    #[test]
    fn paths_are_well_formed(a in alpha(), n in 2u64..2000, seed in any::<u64>()) {
        let p = params(a);
        let path = simulate_path(n, &mut RandomStream::new(seed, 0), &p).unwrap();
        let xs = path.states();
        prop_assert_eq!(xs[0], n);
        prop_assert_eq!(*xs.last().unwrap(), 1);
        prop_assert!(xs.windows(2).all(|w| w[1] < w[0]));
        let ts = path.times();
        prop_assert_eq!(ts[0], 0.0);
        prop_assert_eq!(ts.len(), xs.len());
        prop_assert!(ts.windows(2).all(|w| w[0] < w[1] && w[1].is_finite()));
        prop_assert!(tree_length(&path) > 0.0);
        let cpp = cpp_of_path(&path);
        prop_assert_eq!(cpp.len(), path.tau());
        prop_assert!(cpp.atoms().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn streams_reproduce(seed in any::<u64>(), id in any::<u64>()) {
        let mut a = RandomStream::new(seed, id);
        let mut b = RandomStream::new(seed, id);
        for _ in 0..32 {
            prop_assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
    }

    #[test]
    fn block_step_gap_is_bounded(seed in any::<u64>(), m in 513u64..=1024, m2 in 513u64..=1024) {
        let coupler = BlockCoupler::new(&params(1.5));
        let mut s = RandomStream::new(seed, 0);
        for mode in [CouplingMode::Coupled, CouplingMode::Independent] {
            let res = coupler.run(10, m, m2, mode, &mut s).unwrap();
            prop_assert!(res.step_gap_bounded());
            prop_assert!(res.end_states.0 <= 512 && res.end_states.1 <= 512);
        }
    }

    #[test]
    fn normalization_is_increasing(a in alpha(), n in 2u64..1_000_000, l in 0.0f64..1e6, dl in 1e-3f64..1e3) {
        let p = params(a);
        prop_assert!(normalize_length(l, n, &p).unwrap() < normalize_length(l + dl, n, &p).unwrap());
    }

    #[test]
    fn numeric_alpha_is_never_a_boundary(a in alpha()) {
        let r = classify_regime(&params(a));
        prop_assert!(r.length_case != Case::II && r.sites_case != Case::II);
        let golden = BoundaryTag::Golden.value();
        prop_assert_eq!(r.length_case == Case::I, a < golden);
        prop_assert_eq!(r.sites_case == Case::I, a < std::f64::consts::SQRT_2);
    }

    #[test]
    fn loosening_a_threshold_keeps_a_pass(v in -10f64..10.0, t in -10f64..10.0, slack in 0f64..5.0) {
        if Comparison::AtMost.holds(v, t) {
            prop_assert!(Comparison::AtMost.holds(v, t + slack));
        }
        if Comparison::AtLeast.holds(v, t) {
            prop_assert!(Comparison::AtLeast.holds(v, t - slack));
        }
    }
}

#[test]
fn boundary_tags_select_case_two() {
    let g = classify_regime(&AlphaParams::new(AlphaSpec::Boundary(BoundaryTag::Golden)).unwrap());
    assert_eq!(g.length_case, Case::II);
    let s = classify_regime(&AlphaParams::new(AlphaSpec::Boundary(BoundaryTag::Sqrt2)).unwrap());
    assert_eq!(s.sites_case, Case::II);
    assert_eq!(s.length_case, Case::I);
}
