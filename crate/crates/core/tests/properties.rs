use proptest::prelude::*;

use wdrcm::aba::grow_aba;
use wdrcm::model::{KernelKind, ModelParams, ProfileKind, SpatialDomain};
use wdrcm::paths::{
    classify_regularity, path_to_tree, skeleton_local_maxima, skeleton_scan, tree_to_path,
    MarkedPath, Regularity,
};
use wdrcm::percolation::wilson_interval;
use wdrcm::rng::seed_derivation;
use wdrcm::sampling::{from_text, potential_edges, sample_graph, sample_palm_vertices, to_text};
use wdrcm::verify::{verify_appendix_lemma, Lemma, LemmaPoint};

fn distinct_marks(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1u32..1_000_000, 1..=max_len).prop_map(|v| {
        let mut seen = std::collections::HashSet::new();
        v.into_iter()
            .filter(|x| seen.insert(*x))
            .map(|x| x as f64 / 1_000_000.0)
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn skeleton_constructions_agree(marks in distinct_marks(24)) {
        let path = MarkedPath::from_marks(&marks).unwrap();
        let a = skeleton_scan(&path);
        prop_assert_eq!(&a, &skeleton_local_maxima(&path));
        prop_assert!(a.is_valley(&path));
        prop_assert_eq!(a.indices[0], 0);
        prop_assert_eq!(*a.indices.last().unwrap(), path.len() - 1);
        let oldest = marks.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(a.min_mark(&path), oldest);
        let regular = classify_regularity(&a, &path) == Regularity::Regular;
        prop_assert_eq!(regular, oldest > 0.5f64.powi(a.m() as i32));
    }

    /// Endpoints older than every connector give a two-vertex skeleton,
    /// and both round trips are the identity.
    #[test]
    fn path_tree_round_trip(marks in distinct_marks(12), a in 1u32..100, b in 1u32..100) {
        prop_assume!(a != b);
        let (ma, mb) = (a as f64 / 1e4, b as f64 / 1e4);
        let mut items = vec![(0usize, ma)];
        items.extend(marks.iter().enumerate().map(|(i, &m)| (i + 2, 0.01 + 0.99 * m)));
        items.push((1, mb));
        let Ok(path) = MarkedPath::new(items) else { return Ok(()) };
        let tree = path_to_tree(&path).unwrap();
        tree.validate().unwrap();
        prop_assert_eq!(tree.len(), marks.len());
        let back = tree_to_path(&tree, path.item(0), path.item(path.len() - 1)).unwrap();
        prop_assert_eq!(&back, &path);
        prop_assert_eq!(path_to_tree(&back).unwrap(), tree);
    }

    #[test]
    fn seed_derivation_is_order_sensitive(m in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        prop_assume!(a != b);
        prop_assert_eq!(seed_derivation(m, &[a, b]), seed_derivation(m, &[a, b]));
        prop_assert_ne!(seed_derivation(m, &[a, b]), seed_derivation(m, &[b, a]));
        prop_assert_ne!(seed_derivation(m, &[a]), seed_derivation(m, &[a, 0]));
    }

    #[test]
    fn wilson_interval_brackets_estimate(n in 1usize..5000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as usize;
        let (lo, hi) = wilson_interval(k, n);
        let phat = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= phat + 1e-12 && phat <= hi + 1e-12 && hi <= 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Shared variates: the edge set grows with the retention parameter.
    #[test]
    fn coupled_edges_nest_in_p(seed in any::<u64>(), p1 in 0.0f64..1.0, p2 in 0.0f64..1.0) {
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let params = ModelParams::pa_polynomial(1, 0.6, 1.0, 2.0).unwrap();
        let dom = SpatialDomain::torus(40.0, 1).unwrap();
        let palm = sample_palm_vertices(&params, &dom, seed).unwrap();
        let pe = potential_edges(&palm.vertices, &params, &dom, seed).unwrap();
        let small = pe.realize(lo);
        let big = pe.realize(hi);
        prop_assert!(small.iter().all(|e| big.binary_search(e).is_ok()));
        prop_assert_eq!(pe.realize(1.0).len(), pe.len());
    }

    #[test]
    fn text_format_round_trips(seed in any::<u64>(), d in 1usize..=3, torus in any::<bool>()) {
        let params = ModelParams::new(d, 0.4, 0.8, 2.5, KernelKind::Sum, ProfileKind::normalized_polynomial(d, 2.5))
            .unwrap()
            .with_p(0.7)
            .unwrap();
        let side = [30.0, 6.0, 3.0][d - 1];
        let dom = if torus { SpatialDomain::torus(side, d) } else { SpatialDomain::cube(side, d) }.unwrap();
        let g = sample_graph(&params, &dom, seed, true).unwrap();
        let parsed = from_text(&to_text(&g, None)).unwrap();
        prop_assert_eq!(parsed.graph, g);
        prop_assert_eq!(parsed.root, None);
    }

    /// Growth is prefix-consistent: a snapshot equals a shorter run.
    #[test]
    fn aba_snapshot_is_shorter_run(seed in any::<u64>(), frac in 0.1f64..0.9) {
        let params = ModelParams::pa_polynomial(1, 0.7, 1.0, 2.0).unwrap();
        let full = grow_aba(200.0, &params, seed).unwrap();
        let t = 200.0 * frac;
        let snap = full.snapshot(t).unwrap();
        let short = grow_aba(t, &params, seed).unwrap();
        prop_assert_eq!(snap.arrivals(), short.arrivals());
        prop_assert_eq!(snap.edges(), short.edges());
    }

    /// Closed-form equalities hold at random admissible points.
    #[test]
    fn closed_form_lemmas_hold(gamma in 0.05f64..0.95, t0 in 0.01f64..0.9, xf in 0.05f64..0.95, k in 0u32..4) {
        let a1b = verify_appendix_lemma(Lemma::A1b, &LemmaPoint::new(gamma, k).with_t0(t0)).unwrap();
        prop_assert!(a1b.pass, "{:?}", a1b);
        let a3 = verify_appendix_lemma(Lemma::A3, &LemmaPoint::new(gamma, k + 1).with_t0(t0).with_x(xf * t0)).unwrap();
        prop_assert!(a3.pass, "{:?}", a3);
    }
}
