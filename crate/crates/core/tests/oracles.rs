mod common;

use common::*;
use hfree::cliques::{clique_number, count_cliques};
use hfree::coloring::{chromatic_number, is_q_colorable, Budget, Constraints};
use hfree::density::{d2_density, ky_bound, m2, potential, potential_thresholds, verify_potential_lemma, SubsetFilter};
use hfree::ensemble::sample_gnp;
use hfree::extremal::{
    contains, deletion_heuristic, enumerate_copies, exact_max_hfree_cliques, km_cleanup, partite_heuristic,
    ExactBudget,
};
use hfree::graph::{complete_graph, read_edge_list, write_edge_list};
use hfree::{AdjRows, ExactRational, Graph, VertexSet};
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let len = pairs.len();
        proptest::collection::vec(any::<bool>(), len).prop_map(move |keep| {
            Graph::from_edges(n, pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e)).unwrap()
        })
    })
}

fn q_colourable_brute(g: &Graph, q: usize) -> bool {
    let n = g.vertex_count();
    if q == 0 {
        return n == 0;
    }
    let edges: Vec<_> = g.edges().collect();
    let mut colours = vec![0usize; n];
    loop {
        if edges.iter().all(|&(u, v)| colours[u] != colours[v]) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            colours[i] += 1;
            if colours[i] < q {
                break;
            }
            colours[i] = 0;
            i += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn m2_matches_subset_brute_force(g in graph_strategy(9)) {
        match brute_m2(&g) {
            Some((num, den)) if g.edge_count() >= 2 => {
                let r = m2(&g, false).unwrap();
                prop_assert_eq!(&r.value, &ExactRational::new(num, den).unwrap());
                prop_assert_eq!(d2_density(&g, &r.witness).unwrap(), r.value.clone());
                let p = m2(&g, true).unwrap();
                prop_assert_eq!(p.value, r.value);
                prop_assert_eq!(p.witness, r.witness);
            }
            _ => prop_assert!(m2(&g, false).is_err()),
        }
    }

    #[test]
    fn clique_counts_match_subset_brute_force(g in graph_strategy(10), m in 2usize..6) {
        let s = count_cliques(&g, m).unwrap();
        let (total, per_edge) = brute_cliques(&g, m);
        prop_assert_eq!(s.total, total);
        prop_assert_eq!(&s.per_edge, &per_edge);
        let handshake: u64 = s.per_edge.values().sum();
        prop_assert_eq!(handshake, total * (m * (m - 1) / 2) as u64);
        prop_assert!(s.involved <= s.total);
        let brute_omega = (1..=g.vertex_count()).rev().find(|&k| brute_cliques(&g, k).0 > 0 || k == 1).unwrap_or(0);
        prop_assert_eq!(clique_number(&g), brute_omega.min(g.vertex_count()));
    }

    #[test]
    fn containment_matches_all_injective_maps(host in graph_strategy(8), pattern in graph_strategy(5)) {
        let found = contains(&host, &pattern).unwrap();
        prop_assert_eq!(found.is_some(), naive_contains(&Matrix::of(&host), &Matrix::of(&pattern)));
        if let Some(map) = found {
            let mut seen = map.clone();
            seen.sort_unstable();
            seen.dedup();
            prop_assert_eq!(seen.len(), map.len());
            for (a, b) in pattern.edges() {
                prop_assert!(host.has_edge(map[a], map[b]));
            }
        }
    }

    #[test]
    fn copies_are_distinct_host_subgraphs(host in graph_strategy(7), pattern in graph_strategy(4)) {
        prop_assume!(pattern.edge_count() > 0);
        let copies = enumerate_copies(&host, &pattern, 1_000_000).unwrap();
        for c in &copies {
            prop_assert_eq!(c.edges.len(), pattern.edge_count());
            prop_assert!(c.edges.iter().all(|&(u, v)| host.has_edge(u, v)));
            let sub = Graph::from_edges(host.vertex_count(), c.edges.clone()).unwrap();
            prop_assert!(contains(&sub, &pattern).unwrap().is_some());
        }
        let mut sets: Vec<_> = copies.iter().map(|c| c.edges.clone()).collect();
        sets.dedup();
        prop_assert_eq!(sets.len(), copies.len());
    }

    #[test]
    fn cleanup_leaves_an_edge_disjoint_packing(g in graph_strategy(9), m in 2usize..5) {
        let out = km_cleanup(&g, m).unwrap();
        prop_assert!(out.edges().all(|(u, v)| g.has_edge(u, v)));
        let s = count_cliques(&out, m).unwrap();
        prop_assert_eq!(s.per_edge.len(), out.edge_count());
        prop_assert!(s.per_edge.values().all(|&c| c == 1));
        prop_assert_eq!(km_cleanup(&out, m).unwrap(), out);
    }

    #[test]
    fn colouring_matches_brute_force(g in graph_strategy(7)) {
        let (chi, colouring) = chromatic_number(&g, Budget::UNLIMITED).unwrap();
        prop_assert!(colouring.is_proper(&g));
        prop_assert_eq!(colouring.colors_used(), chi);
        prop_assert!(q_colourable_brute(&g, chi));
        prop_assert!(chi == 0 || !q_colourable_brute(&g, chi - 1));
    }

    #[test]
    fn equality_constraints_are_honoured(g in graph_strategy(7), u in 0usize..7, v in 0usize..7) {
        prop_assume!(u < g.vertex_count() && v < g.vertex_count() && u != v);
        let c = Constraints::equal(u, v);
        let got = is_q_colorable(&g, 3, &c, Budget::UNLIMITED).unwrap();
        let merged_brute = {
            let n = g.vertex_count();
            let mut found = false;
            let mut colours = vec![0usize; n];
            'outer: loop {
                if colours[u] == colours[v] && g.edges().all(|(a, b)| colours[a] != colours[b]) {
                    found = true;
                    break;
                }
                let mut i = 0;
                loop {
                    if i == n { break 'outer; }
                    colours[i] += 1;
                    if colours[i] < 3 { break; }
                    colours[i] = 0;
                    i += 1;
                }
            }
            found
        };
        prop_assert_eq!(got.is_some(), merged_brute);
        if let Some(col) = got {
            prop_assert!(col.is_proper(&g));
            prop_assert_eq!(col.colors[u], col.colors[v]);
        }
    }

    #[test]
    fn potential_sweep_matches_direct_evaluation(g in graph_strategy(10), k in 4usize..7, tg in -20i64..40, tb in -20i64..60) {
        let base = VertexSet::from_vertices(g.vertex_count(), (0..g.vertex_count().min(2)).collect::<Vec<_>>()).unwrap();
        let out = verify_potential_lemma(&g, k, tg, tb, &base, &SubsetFilter::default()).unwrap();
        let n = g.vertex_count();
        let (mut examined, mut violations) = (0u64, 0u64);
        let mut worst: Option<i64> = None;
        for mask in 0u64..(1 << n) {
            let s = members(mask);
            if s.len() < 2 { continue; }
            examined += 1;
            let a = VertexSet::from_vertices(n, s.clone()).unwrap();
            let rho = potential(&g, k, &a).unwrap();
            let bound = if base.is_subset(&a) { tg.max(tb) } else { tg };
            if rho < bound {
                violations += 1;
                worst = Some(worst.map_or(rho - bound, |w| w.min(rho - bound)));
            }
        }
        prop_assert_eq!(out.examined, examined);
        prop_assert_eq!(out.violations, violations);
        prop_assert_eq!(out.worst.map(|v| v.potential - v.threshold), worst);
    }

    #[test]
    fn potential_threshold_matches_density_bound(g in graph_strategy(10), k in 4usize..7) {
        let (general, _) = potential_thresholds(k);
        let n = g.vertex_count();
        for mask in 0u64..(1 << n) {
            let s = members(mask);
            if s.len() < 3 { continue; }
            let a = VertexSet::from_vertices(n, s).unwrap();
            let by_potential = potential(&g, k, &a).unwrap() >= general;
            let by_density = d2_density(&g, &a).unwrap() <= ky_bound(k);
            prop_assert_eq!(by_potential, by_density);
        }
    }

    #[test]
    fn adding_an_edge_never_lowers_m2(g in graph_strategy(9), u in 0usize..9, v in 0usize..9) {
        let n = g.vertex_count();
        prop_assume!(u < n && v < n && u != v && !g.has_edge(u, v) && g.edge_count() >= 2);
        let mut edges: Vec<_> = g.edges().collect();
        edges.push((u.min(v), u.max(v)));
        let bigger = Graph::from_edges(n, edges).unwrap();
        prop_assert!(m2(&bigger, true).unwrap().value >= m2(&g, true).unwrap().value);
    }

    #[test]
    fn edge_list_text_round_trips(g in graph_strategy(12)) {
        prop_assert_eq!(read_edge_list(&write_edge_list(&g)).unwrap(), g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn exact_extremal_matches_edge_subset_brute_force(host in graph_strategy(7), which in 0usize..2) {
        prop_assume!(host.edge_count() <= 12);
        let h = if which == 0 { complete_graph(4).unwrap() } else { triangle_with_pendant() };
        let exact = exact_max_hfree_cliques(&host, &h, 3, ExactBudget::default()).unwrap();
        prop_assert_eq!(exact.clique_count, brute_extremal(&host, &h, 3));
        prop_assert!(exact.h_free_certified);
        prop_assert!(exact.survivor.edges().all(|(u, v)| host.has_edge(u, v)));
        prop_assert_eq!(brute_cliques(&exact.survivor, 3).0, exact.clique_count);

        let del = deletion_heuristic(&host, &h, 3, 100_000).unwrap();
        prop_assert!(del.h_free_certified);
        prop_assert!(del.clique_count <= exact.clique_count);
        prop_assert_eq!(brute_cliques(&del.survivor, 3).0, del.clique_count);
        prop_assert!(del.survivor.edges().all(|(u, v)| host.has_edge(u, v)));

        if which == 0 {
            let part = partite_heuristic(&host, 4, 3, 3, 7).unwrap();
            prop_assert!(part.clique_count <= exact.clique_count);
            prop_assert_eq!(brute_cliques(&part.survivor, 3).0, part.clique_count);
            prop_assert!(!naive_contains(&Matrix::of(&part.survivor), &Matrix::of(&h)));
        }
    }
}

#[test]
fn dense_sampler_edge_mean_and_spread() {
    // 1000 trials at n = 50, p = 1/2: mean 612.5, per-trial sd √(1225/4).
    let p = ExactRational::new(1, 2).unwrap();
    let sd = (1225.0f64 * 0.25).sqrt();
    let counts: Vec<f64> = (0..1000u64).map(|s| sample_gnp(50, &p, s).unwrap().edge_count() as f64).collect();
    let mean = counts.iter().sum::<f64>() / 1000.0;
    assert!((mean - 612.5).abs() <= 3.0 * sd / 1000f64.sqrt(), "mean {mean}");
    let within = counts.iter().filter(|&&c| (c - 612.5).abs() <= 4.0 * sd).count();
    assert!(within >= 990, "{within} of 1000 within 4 sd");
}

#[test]
fn sparse_sampler_spread() {
    // n = 300, p = 1/50: C(300,2)p = 897, sd √(897·49/50).
    let p = ExactRational::new(1, 50).unwrap();
    let sd = (897.0f64 * 0.98).sqrt();
    let within = (0..200u64)
        .filter(|&s| ((sample_gnp(300, &p, s).unwrap().edge_count() as f64) - 897.0).abs() <= 4.0 * sd)
        .count();
    assert!(within >= 198, "{within} of 200 within 4 sd");
}

#[test]
fn oracle_inputs_cover_the_curated_graphs() {
    for (name, g, k) in critical_graphs() {
        assert_eq!(chromatic_number(&g, Budget::UNLIMITED).unwrap().0, k, "{name}");
        let (num, den) = brute_m2(&g).unwrap();
        assert_eq!(m2(&g, false).unwrap().value, ExactRational::new(num, den).unwrap(), "{name}");
    }
    let g = random_graph(9, 40, 5);
    assert_eq!(brute_cliques(&g, 3).0, count_cliques(&g, 3).unwrap().total);
}
