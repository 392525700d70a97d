//! Property tests over randomly drawn instances: structural invariants
//! of the samplers and invariance laws of the counters.

use proptest::prelude::*;
use rainbow_lab::census::{census, census_walks};
use rainbow_lab::colouring::{build_bipartite, project_back, sample_colouring_with, EquitableColouring};
use rainbow_lab::config_model::{project_multigraph, sample_pairing_with, DegreeSpec, Edge, Multigraph, Pairing};
use rainbow_lab::rng::stream_rng;
use rainbow_lab::search::{count_rainbow_hamilton, count_rainbow_matching, SearchMode};

fn shapes() -> impl Strategy<Value = (usize, usize)> {
    prop::sample::select(vec![(3usize, 4usize), (4, 4), (5, 4), (6, 4), (4, 6), (3, 6)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_pairings_project_to_regular_multigraphs(seed in any::<u64>(), (n, d) in shapes()) {
        let spec = DegreeSpec::new(n, d).unwrap();
        let p = sample_pairing_with(spec, &mut stream_rng(seed, 0));
        let g = project_multigraph(&p);
        prop_assert!(g.degrees().iter().all(|&x| x == d));
        // involution, no fixed points
        for h in 0..spec.half_edges() {
            prop_assert_ne!(p.partner(h), h);
            prop_assert_eq!(p.partner(p.partner(h)), h);
        }
    }

    #[test]
    fn pairing_serialization_round_trips(seed in any::<u64>(), (n, d) in shapes()) {
        let spec = DegreeSpec::new(n, d).unwrap();
        let p = sample_pairing_with(spec, &mut stream_rng(seed, 1));
        let q = Pairing::parse(spec, &p.serialize()).unwrap();
        prop_assert_eq!(p, q);
    }

    #[test]
    fn bipartite_construction_round_trips(seed in any::<u64>(), (n, d) in shapes()) {
        let spec = DegreeSpec::new(n, d).unwrap();
        let mut rng = stream_rng(seed, 2);
        let g = project_multigraph(&sample_pairing_with(spec, &mut rng));
        let col = sample_colouring_with(&g, n, d / 2, &mut rng).unwrap();
        let tb = build_bipartite(&g, &col).unwrap();
        let (g2, col2) = project_back(&tb);
        prop_assert_eq!(g.edges, g2.edges);
        prop_assert_eq!(col, col2);
    }

    #[test]
    fn link_and_walk_census_agree(seed in any::<u64>(), (n, d) in shapes()) {
        let spec = DegreeSpec::new(n, d).unwrap();
        let mut rng = stream_rng(seed, 3);
        let g = project_multigraph(&sample_pairing_with(spec, &mut rng));
        let col = sample_colouring_with(&g, n, d / 2, &mut rng).unwrap();
        let tb = build_bipartite(&g, &col).unwrap();
        let i_max = 3.min(n);
        prop_assert_eq!(census(&tb, i_max).unwrap(), census_walks(&tb, i_max).unwrap());
    }

    #[test]
    fn hamilton_count_is_relabelling_invariant(seed in any::<u64>(), rot in 1usize..4, (n, d) in shapes()) {
        let spec = DegreeSpec::new(n, d).unwrap();
        let mut rng = stream_rng(seed, 4);
        let g = project_multigraph(&sample_pairing_with(spec, &mut rng));
        let col = sample_colouring_with(&g, n, d / 2, &mut rng).unwrap();
        let base = count_rainbow_hamilton(&g, &col, SearchMode::Count).unwrap().count;

        let edges: Vec<Edge> = g
            .edges
            .iter()
            .map(|e| Edge { u: (e.u + rot) % n, v: (e.v + rot) % n, hu: e.hu, hv: e.hv })
            .collect();
        let g2 = Multigraph { n, degree: d, edges };
        let colours: Vec<u32> = col
            .colours()
            .iter()
            .map(|&c| (c + rot as u32) % n as u32)
            .collect();
        let col2 = EquitableColouring::new(n, d / 2, colours).unwrap();
        let moved = count_rainbow_hamilton(&g2, &col2, SearchMode::Count).unwrap().count;
        prop_assert_eq!(base, moved);
    }

    #[test]
    fn matching_count_is_colour_relabelling_invariant(seed in any::<u64>()) {
        let n = 3usize;
        let d = 4usize;
        let spec = DegreeSpec::new(2 * n, d).unwrap();
        let mut rng = stream_rng(seed, 5);
        let g = project_multigraph(&sample_pairing_with(spec, &mut rng));
        let col = sample_colouring_with(&g, n, d, &mut rng).unwrap();
        let base = count_rainbow_matching(&g, &col).unwrap().count;
        let colours: Vec<u32> = col.colours().iter().map(|&c| (c + 1) % n as u32).collect();
        let col2 = EquitableColouring::new(n, d, colours).unwrap();
        prop_assert_eq!(base, count_rainbow_matching(&g, &col2).unwrap().count);
    }
}
