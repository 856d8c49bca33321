mod support;

use graphgen::rules::{generate_exemplar, validate_rule, GenerateError, RuleKind, RuleSpec, SizePreset, Witness};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracles::{self, all_graphs, specs_for};

#[test]
fn validators_match_oracles_exhaustively_up_to_five_nodes() {
    let mut checked = 0;
    for n in 1..=5 {
        for g in all_graphs(n) {
            for spec in specs_for(n, g.edge_count(), 5) {
                let got = validate_rule(&spec, &g).unwrap().valid;
                assert_eq!(got, oracles::oracle(&spec, &g), "{} on {}", spec.label(), g.to_text());
                checked += 1;
            }
        }
    }
    assert!(checked > 30_000);
}

#[test]
fn validators_match_oracles_on_random_graphs_up_to_seven_nodes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..2_000 {
        let n = rng.random_range(1..=7);
        let g = if rng.random_bool(0.5) {
            support::random_graph(n, rng.random_range(0.1..0.9), &mut rng)
        } else {
            let kind = RuleKind::ALL[rng.random_range(0..8)];
            let spec = specs_for(n, 0, 3)
                .into_iter()
                .filter(|s| s.kind == kind && s.m.is_none())
                .next_back()
                .unwrap_or(RuleSpec::tree(n));
            match generate_exemplar(&spec, rng.random()) {
                Ok(g) => support::perturb(&g, rng.random_range(0..3), &mut rng),
                Err(_) => support::random_graph(n, 0.5, &mut rng),
            }
        };
        for spec in specs_for(n, g.edge_count(), 3) {
            assert_eq!(
                validate_rule(&spec, &g).unwrap().valid,
                oracles::oracle(&spec, &g),
                "{} on {}",
                spec.label(),
                g.to_text()
            );
        }
    }
}

#[test]
fn kuratowski_graphs_are_rejected() {
    let k5 = graphgen::graph::Graph::from_zero_based(5, (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))));
    let k33 = graphgen::graph::Graph::from_zero_based(6, (0..3).flat_map(|u| (3..6).map(move |v| (u, v))));
    // K3,3 with one edge subdivided.
    let sub = graphgen::graph::Graph::from_zero_based(
        7,
        [(0, 3), (0, 4), (0, 6), (6, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)],
    );
    for g in [k5, k33, sub] {
        let spec = RuleSpec::planar(g.node_count(), g.edge_count());
        let report = validate_rule(&spec, &g).unwrap();
        assert!(!report.valid);
        assert!(matches!(report.witness, Some(Witness::Obstruction(_))));
        assert!(!oracles::oracle(&spec, &g));
    }
}

#[test]
fn generators_are_sound_deterministic_and_varied() {
    for kind in RuleKind::ALL {
        let spec = SizePreset::Medium.spec(kind).unwrap();
        let mut distinct = std::collections::HashSet::new();
        for seed in 0..10_000u64 {
            let g = generate_exemplar(&spec, seed).unwrap();
            assert!(validate_rule(&spec, &g).unwrap().valid, "{} seed {seed}", spec.label());
            if seed < 20 {
                assert_eq!(g, generate_exemplar(&spec, seed).unwrap());
                distinct.insert(g.to_text());
            }
        }
        assert!(distinct.len() > 10, "{} produced {} distinct graphs", spec.label(), distinct.len());
    }
}

#[test]
fn unsatisfiable_specs_are_reported() {
    assert!(matches!(
        generate_exemplar(&RuleSpec::k_regular(5, 3), 0),
        Err(GenerateError::Unsatisfiable(_))
    ));
}

#[test]
fn bipartite_witness_has_requested_sizes() {
    let spec = RuleSpec::bipartite(5, 5);
    for seed in 0..200 {
        let g = generate_exemplar(&spec, seed).unwrap();
        let Some(Witness::Bipartition { u, v }) = validate_rule(&spec, &g).unwrap().witness else {
            panic!("no witness")
        };
        assert_eq!((u.len(), v.len()), (5, 5));
        for &(a, b) in g.edges() {
            assert_ne!(u.contains(&a), u.contains(&b));
        }
    }
}

#[test]
fn tree_probability_under_uniform_sampling() {
    // Cayley: n^(n-2) labeled trees among C(n(n-1)/2, n-1) edge sets.
    let (n, pairs) = (15u32, 105u32);
    let mut exact = f64::from(n).powi(13);
    for i in 0..14 {
        exact /= f64::from(pairs - i) / f64::from(i + 1);
    }
    assert!((exact - 0.021_212_254_975_781_59).abs() < 1e-15);

    let est = graphgen::rules::estimate_random_valid_prob(&RuleSpec::tree(15), 10_000, 0).unwrap();
    assert!((est.p - exact).abs() < 3.0 * est.se, "{} vs {exact}", est.p);
    assert_eq!(est.valid, FROZEN_TREE_HITS);
}

const FROZEN_TREE_HITS: usize = 222;
