mod support;

use graphgen::graph::{parse_graph_lines, write_graph_lines, Graph};
use graphgen::iso::{is_isomorphic, CanonicalKey};
use graphgen::prompt::parse_p_estimate;
use proptest::prelude::*;
use support::oracles::brute_isomorphic;

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let all = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            Graph::from_zero_based(n, all.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e))
        })
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn text_round_trips(g in graph(12)) {
        prop_assert_eq!(Graph::parse(&g.to_text()).unwrap(), g.clone());
        let lines = write_graph_lines(&[g.clone(), g.clone()]);
        prop_assert_eq!(parse_graph_lines(&lines).unwrap(), vec![g.clone(), g]);
    }

    #[test]
    fn relabeling_preserves_isomorphism_class(
        (g, perm) in graph(9).prop_flat_map(|g| { let n = g.node_count(); (Just(g), permutation(n)) })
    ) {
        let h = g.relabel(&perm);
        prop_assert!(is_isomorphic(&g, &h).unwrap());
        prop_assert_eq!(CanonicalKey::of(&g).unwrap(), CanonicalKey::of(&h).unwrap());
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), h.degrees().iter().sum::<usize>());
    }

    #[test]
    fn isomorphism_matches_brute_force(g in graph(6), h in graph(6)) {
        let expected = brute_isomorphic(&g, &h);
        prop_assert_eq!(is_isomorphic(&g, &h).unwrap(), expected);
        prop_assert_eq!(CanonicalKey::of(&g).unwrap() == CanonicalKey::of(&h).unwrap(), expected);
    }

    #[test]
    fn p_estimates_round_trip(k in 0u32..=100) {
        let p = f64::from(k) / 100.0;
        let got = parse_p_estimate(&format!("I estimate p = {p}")).unwrap().unwrap();
        prop_assert!((got - p).abs() < 1e-12);
        let got = parse_p_estimate(&format!("roughly {k}% of them")).unwrap().unwrap();
        prop_assert!((got - p).abs() < 1e-12);
    }

    #[test]
    fn p_parser_never_panics(s in "\\PC{0,80}") {
        if let Some(Ok(p)) = parse_p_estimate(&s) {
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}
