use std::sync::OnceLock;

use proptest::prelude::*;

use ceppa::exactlin::Q;
use ceppa::gradealg::{
    build_graded, preprojective_presentation, preprojective_presentation_oriented, GradedQuotient, Presentation,
};
use ceppa::lietheory::{sample_regular_weight, t_matrices};
use ceppa::rootsys::{build_cartan, build_root_system, is_regular, supported_types, Family, Weight};
use ceppa::traceform::{graded_trace_data, trace_functional, AlgebraSpaces};

fn d4_random() -> &'static GradedQuotient {
    static GQ: OnceLock<GradedQuotient> = OnceLock::new();
    GQ.get_or_init(|| {
        let d = build_cartan(Family::D, 4).unwrap();
        let mu = Weight::from_ints(&[3, 1, 4, 2]);
        build_graded(&preprojective_presentation(&d, &mu, true).unwrap(), 10).unwrap()
    })
}

fn basis_index(gq: &GradedQuotient, seed: usize) -> (usize, usize) {
    let sizes: Vec<(usize, usize)> = (0..=gq.max_degree()).filter(|&d| gq.dim(d) > 0).map(|d| (d, gq.dim(d))).collect();
    let (d, n) = sizes[seed % sizes.len()];
    (d, (seed / sizes.len()) % n)
}

struct Oriented {
    dims: Vec<Vec<Vec<usize>>>,
    quotient: Vec<usize>,
    trace: Vec<Q>,
}

fn oriented(f: Family, n: usize, mu: &Weight, flip: &[bool]) -> Oriented {
    let d = build_cartan(f, n).unwrap();
    let h = build_root_system(&d).coxeter;
    let gq = build_graded(&preprojective_presentation_oriented(&d, mu, true, flip).unwrap(), 2 * (h - 2) + 2).unwrap();
    let spaces = AlgebraSpaces::compute(&gq).unwrap();
    let trace = trace_functional(&gq, &spaces, None).unwrap().values;
    Oriented {
        dims: gq.dimension_table(),
        quotient: graded_trace_data(&gq, &spaces).unwrap().p,
        trace,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(a in 0usize..10_000, b in 0usize..10_000, c in 0usize..10_000) {
        let gq = d4_random();
        let [x, y, z] = [a, b, c].map(|s| {
            let (d, i) = basis_index(gq, s);
            gq.basis_element(d, i)
        });
        if x.degree + y.degree + z.degree <= gq.max_degree() {
            let left = gq.product(&gq.product(&x, &y).unwrap(), &z).unwrap();
            let right = gq.product(&x, &gq.product(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }

    #[test]
    fn z_is_central(a in 0usize..10_000) {
        let gq = d4_random();
        let (d, i) = basis_index(gq, a);
        if d + 2 <= gq.max_degree() {
            let x = gq.basis_element(d, i);
            let z = gq.central_element().unwrap();
            prop_assert_eq!(gq.product(&z, &x).unwrap(), gq.product(&x, &z).unwrap());
        }
    }

    #[test]
    fn orientation_does_not_matter(flips in proptest::collection::vec(any::<bool>(), 4), seed in 0u64..1000) {
        let rs = build_root_system(&build_cartan(Family::D, 5).unwrap());
        let (mu, _) = sample_regular_weight(&rs, seed);
        let base = oriented(Family::D, 5, &mu, &[false; 4]);
        let other = oriented(Family::D, 5, &mu, &flips);
        prop_assert_eq!(base.dims, other.dims);
        prop_assert_eq!(base.quotient, other.quotient);
        for (x, y) in base.trace.iter().zip(&other.trace) {
            prop_assert!(x == y || *x == -y.clone(), "{} vs {}", x, y);
        }
    }

    #[test]
    fn presentation_text_round_trip(flips in proptest::collection::vec(any::<bool>(), 5), seed in 0u64..1000, z in any::<bool>()) {
        let d = build_cartan(Family::E, 6).unwrap();
        let (mu, _) = sample_regular_weight(&build_root_system(&d), seed);
        let p = preprojective_presentation_oriented(&d, &mu, z, &flips).unwrap();
        prop_assert_eq!(Presentation::from_text(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn sampled_weights_are_regular(k in 0usize..16, seed in 0u64..10_000) {
        let types = supported_types(8);
        let (f, n) = types[k % types.len()];
        let rs = build_root_system(&build_cartan(f, n).unwrap());
        let (mu, draws) = sample_regular_weight(&rs, seed);
        prop_assert!(draws >= 1);
        prop_assert!(is_regular(&mu, &rs).unwrap());
        let hs = t_matrices(&rs, &mu).unwrap();
        prop_assert_eq!(hs.t.len(), rs.coxeter - 2);
    }
}

#[test]
fn root_statistics_for_all_types() {
    for (f, n) in supported_types(8) {
        let rs = build_root_system(&build_cartan(f, n).unwrap());
        let h = rs.coxeter;
        let mut ex = rs.exponents.clone();
        ex.sort_unstable();
        assert_eq!(ex.iter().sum::<usize>(), rs.num_positive());
        assert_eq!(rs.num_positive() * 2, n * h);
        let mut mirrored: Vec<usize> = ex.iter().map(|m| h - m).collect();
        mirrored.sort_unstable();
        assert_eq!(ex, mirrored);
        for (p, &c) in rs.height_counts().iter().enumerate() {
            assert_eq!(c, ex.iter().filter(|&&m| m > p).count());
        }
    }
}
