use proptest::prelude::*;
use riesz_core::daniell::{
    functional_eval, functional_jordan, lattice_combine, level_difference, max_minus, measure_of_level_set,
    procedure2, DaniellFunctional, LatticeOp, StepLatticeElem,
};
use riesz_core::sample::{Grid, Sampler};
use riesz_core::selftest::lattice_split;
use riesz_core::Rat;

const G: Grid = Grid::new(0, 4, 2);

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn additive_on_lattice_splits(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let func = DaniellFunctional::new(s.measure(G));
        let f = s.lattice_elem(G, 5);
        let parts = lattice_split(&mut s, &f);
        let total: Rat = parts.iter().map(|p| functional_eval(&func, p)).sum();
        prop_assert_eq!(total, functional_eval(&func, &f));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn lattice_laws(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (f, g) = (s.lattice_elem(G, 4), s.lattice_elem(G, 4));
        let join = lattice_combine(&f, &g, LatticeOp::Join);
        let meet = lattice_combine(&f, &g, LatticeOp::Meet);
        prop_assert_eq!(join.plus(&meet), f.plus(&g));
        prop_assert_eq!(f.monus(&g).plus(&meet), f.clone());
        let d = s.rat(0, 3, 2);
        prop_assert_eq!(f.cap(&d).unwrap().plus(&f.monus(&f.cap(&d).unwrap())), f.clone());
    }

    #[test]
    fn jordan_bounds_dominated_values(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let func = DaniellFunctional::new(s.measure(G));
        let f = s.lattice_elem(G, 4);
        let (plus, minus) = functional_jordan(&func, &f);
        prop_assert_eq!(&plus - &minus, functional_eval(&func, &f));
        for _ in 0..10 {
            let g = f.meet(&s.lattice_elem(G, 4));
            let v = functional_eval(&func, &g);
            prop_assert!(v <= plus && -v <= minus);
        }
    }

    #[test]
    fn level_sets_by_series(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let func = DaniellFunctional::new(s.measure(G));
        let (f, g) = (s.lattice_elem(G, 4), s.lattice_elem(G, 4));
        let direct: Rat = level_difference(&f, &g).iter().map(|i| func.backing.eval(i)).sum();
        prop_assert_eq!(measure_of_level_set(&func, &f, &g).unwrap(), direct);
    }

    #[test]
    fn procedure2_laws(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let inputs: Vec<Vec<StepLatticeElem>> = (0..s.below(3) + 1)
            .map(|_| (0..s.below(3) + 1).map(|_| s.lattice_elem(G, 2)).collect())
            .collect();
        let out = procedure2(&inputs).unwrap();
        let sums: Vec<StepLatticeElem> = inputs.iter().map(|c| c.iter().fold(StepLatticeElem::zero(), |a, f| a.plus(f))).collect();
        let refs: Vec<&StepLatticeElem> = sums.iter().collect();
        for n in 0..inputs.len() {
            prop_assert_eq!(out.color_total(n), max_minus(&refs, n));
        }
        for (n, c) in inputs.iter().enumerate() {
            for (m, f) in c.iter().enumerate() {
                prop_assert_eq!(&out.term_total(n, m), f);
            }
        }
    }
}

#[test]
fn negative_elements_are_rejected() {
    let p = riesz_core::StepProfile::constant(Rat::from_int(-1), riesz_core::Interval::point(Rat::zero()));
    assert_eq!(StepLatticeElem::new(p).unwrap_err().name(), "DomainError");
    let bad: Result<StepLatticeElem, _> =
        serde_json::from_str(r#"{"pieces":[{"set":{"lo":"0/1","hi":"1/1","lo_closed":true,"hi_closed":false},"value":"-1/1"}]}"#);
    assert!(bad.is_err());
}
