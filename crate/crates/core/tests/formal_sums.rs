use proptest::prelude::*;
use riesz_core::formal_sums::{
    common_refine, evaluate, four_corner, minmax, procedure1, subdecompose_dominated, verify_decomposition, Listing,
};
use riesz_core::intervals::exact_decompose;
use riesz_core::sample::{Grid, Sampler};
use riesz_core::{FormalSum, Rat, StepProfile, XReal};

const G: Grid = Grid::new(0, 4, 2);

/// Profile at every atom of the joint refinement.
fn same_values(a: &StepProfile, b: &StepProfile) -> bool {
    a == b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn random_decompositions_verify(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let c = s.extended_sum(G, 4, false);
        let (d, w) = s.decompose(&c, 3);
        prop_assert!(verify_decomposition(&c, &d, &w));
        prop_assert_eq!(evaluate(&c), evaluate(&d));
        // dropping a nonzero term of a finite parent breaks conservation
        let parent = &c.terms()[w[0]].coeff;
        if d.len() > 1 && !d.terms()[0].coeff.is_zero() && parent.as_finite().is_some() {
            let shorter = FormalSum::new(d.terms()[1..].to_vec()).unwrap();
            prop_assert!(!verify_decomposition(&c, &shorter, &w[1..]));
        }
    }

    #[test]
    fn procedure1_input_decompositions(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let inputs: Vec<FormalSum> = (0..s.below(3) + 1).map(|_| s.formal_sum(G, 4, 6, true)).collect();
        let out = procedure1(&inputs, Listing::Diagonal).unwrap();
        for (n, c) in inputs.iter().enumerate() {
            let (child, witness) = out.input_decomposition(n);
            prop_assert!(verify_decomposition(c, &child, &witness));
        }
        let total = inputs.iter().fold(StepProfile::zero(), |a, c| a.add(&evaluate(c)));
        let colored = (0..inputs.len()).fold(StepProfile::zero(), |a, n| a.add(&out.color_profile(n)));
        prop_assert_eq!(colored, total);
        for p in &out.pieces {
            prop_assert_eq!(&p.lift.v - &p.lift.u, p.coeff.clone());
        }
    }

    #[test]
    fn listings_agree_on_colors(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let inputs: Vec<FormalSum> = (0..s.below(4) + 1).map(|_| s.formal_sum(G, 4, 6, true)).collect();
        let a = procedure1(&inputs, Listing::Diagonal).unwrap();
        let b = procedure1(&inputs, Listing::Rowmajor).unwrap();
        for n in 0..inputs.len() {
            prop_assert!(same_values(&a.color_profile(n), &b.color_profile(n)));
        }
    }

    #[test]
    fn common_refinement(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let c = s.formal_sum(G, 4, 6, true);
        let (d, _) = s.decompose(&evaluate(&c).to_formal_sum(), 2);
        let r = common_refine(&c, &d).unwrap();
        prop_assert!(verify_decomposition(&c, &r.sum, &r.left_witness));
        prop_assert!(verify_decomposition(&d, &r.sum, &r.right_witness));
    }

    #[test]
    fn mismatched_profiles_are_rejected(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let c = s.formal_sum(G, 3, 6, true);
        let d = c.concat(&FormalSum::from_pairs([(Rat::one(), s.interval(G))]));
        prop_assert_eq!(common_refine(&c, &d).unwrap_err().name(), "ProfileMismatch");
    }

    #[test]
    fn dominated_subdecomposition(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let c = s.formal_sum(G, 4, 4, true);
        let d = c.concat(&s.formal_sum(G, 3, 4, true));
        let (d, _) = s.decompose(&d, 2);
        let out = subdecompose_dominated(&c, &d).unwrap();
        prop_assert!(verify_decomposition(&c, &out.c_prime, &out.c_witness));
        prop_assert!(verify_decomposition(&d, &out.c_prime.concat(&out.e), &out.d_witness));
        prop_assert!(out.e.is_nonnegative());
    }

    #[test]
    fn min_and_max(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let c = s.formal_sum(G, 4, 6, true);
        let d = s.formal_sum(G, 4, 6, true);
        let out = minmax(&c, &d).unwrap();
        let both = c.concat(&d);
        prop_assert!(verify_decomposition(&both, &out.e_min.concat(&out.e_max), &out.witness));
        let (pc, pd) = (evaluate(&c), evaluate(&d));
        let want_min = pc.combine(&pd, |a, b| if a.le(b) { a.clone() } else { b.clone() });
        let want_max = pc.combine(&pd, |a, b| if a.le(b) { b.clone() } else { a.clone() });
        prop_assert_eq!(evaluate(&out.e_min), want_min);
        prop_assert_eq!(evaluate(&out.e_max), want_max);
    }

    #[test]
    fn four_corners(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let c = s.formal_sum(G, 4, 5, false);
        let (d, _) = s.decompose(&evaluate(&c).to_formal_sum(), 2);
        let a = s.rat(1, 3, 2);
        let set = s.interval(G);
        let d = d.concat(&FormalSum::from_pairs([(a.clone(), set.clone()), (-a, set)]));
        let out = four_corner(&c, &d).unwrap();
        prop_assert!(out.verify(&c, &d));
    }

    #[test]
    fn evaluation_is_additive(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let c = s.formal_sum(G, 4, 5, false);
        let d = s.formal_sum(G, 4, 5, false);
        prop_assert_eq!(evaluate(&c.concat(&d)), evaluate(&c).add(&evaluate(&d)));
        let atoms = exact_decompose(&c.sets()).atoms;
        for a in atoms {
            let x = a.sample_point();
            prop_assert_eq!(evaluate(&c).value_at(&x), c.value_at(&x));
        }
        prop_assert_eq!(evaluate(&c.negate()), evaluate(&c).map(XReal::neg));
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let c = s.extended_sum(G, 4, true);
        let text = serde_json::to_string(&c).unwrap();
        prop_assert_eq!(serde_json::from_str::<FormalSum>(&text).unwrap(), c.clone());
        let p = evaluate(&c);
        let text = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(serde_json::from_str::<StepProfile>(&text).unwrap(), p);
    }
}
