//! Census values for named graphs. The non-complete values were frozen from
//! the first verified run and cross-checked against hand counts where one
//! is easy (the Petersen graph has 12, 10, 15 and 20 cycles of lengths 5,
//! 6, 8 and 9; the 5-wheel has 21 cycles).

use modk::census::census_mod;
use modk::coloring::{chromatic_number, is_critical};
use modk::corpus::{generate_range, hajos_join, ingest_graph6, Provenance};
use modk::graph::{Edge, Graph};
use modk::kempe::{build_injection_f, extract_one_mod_k, min_degree_vertex, prescribed_coloring};
use modk::verify::{verify_corpus, verify_main, verify_one_mod, verify_structure, Status, Suite, VerifyOptions};

fn counts(g: &Graph, r: usize) -> Vec<u64> {
    census_mod(g, r, 0).unwrap().counts().to_vec()
}

#[test]
fn complete_graph_censuses() {
    assert_eq!(counts(&Graph::complete(4), 3), vec![4, 3, 0]);
    assert_eq!(counts(&Graph::complete(5), 4)[..2], [15, 12]);
    // K6: cycles of length 3..6 number 20, 45, 72, 60.
    assert_eq!(counts(&Graph::complete(6), 5)[..2], [72, 60]);
}

#[test]
fn named_graph_censuses() {
    assert_eq!(counts(&Graph::petersen(), 3), vec![30, 0, 27]);
    assert_eq!(counts(&Graph::wheel(5), 3), vec![10, 5, 6]);
    assert_eq!(counts(&Graph::grotzsch(), 3), vec![75, 121, 141]);
    assert_eq!(counts(&Graph::grotzsch(), 4), vec![110, 81, 81, 65]);
}

#[test]
fn grotzsch_passes_every_suite() {
    let g = Graph::grotzsch();
    assert_eq!(chromatic_number(&g).unwrap(), 4);
    assert!(is_critical(&g, 4));
    let main = verify_main(&g);
    assert!(!main.failed(), "{main:?}");
    assert_eq!(main.good_count, Some(75));
    let one = verify_one_mod(&g, 3);
    assert!(!one.failed(), "{one:?}");
    assert_eq!(one.one_mod_count, Some(121));
    assert_eq!(extract_one_mod_k(&g, 10, 3).unwrap().len(), 3);
}

#[test]
fn regular_fixture_exercises_structure_branch() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/regular12.g6");
    let (corpus, summary) = ingest_graph6(&path, 4).unwrap();
    assert_eq!(summary.accepted, 1);
    let g = &corpus.entries()[0].graph;
    assert!((0..12).all(|v| g.degree(v) == 4));
    assert_eq!(counts(g, 3), vec![492, 521, 537]);

    let rec = verify_structure(g);
    assert!(!rec.failed(), "{rec:?}");
    assert_eq!(rec.light_hypothesis_met, Some(false));
    let status = |name: &str| rec.checks.iter().find(|c| c.name == name).unwrap().status;
    assert_eq!(status("heavy_vertex_branch"), Status::Pass);
    assert_eq!(status("light_vertices_branch"), Status::Skipped);

    let main = verify_main(g);
    assert!(!main.failed());
    assert_eq!(main.checks.iter().find(|c| c.name == "min_degree_4_bound").unwrap().status, Status::Pass);
}

#[test]
fn structure_sweep_reports_vacuous_cases() {
    let corpus = generate_range(4, 8, 4).unwrap();
    let report = verify_corpus(Some(&corpus), &VerifyOptions::new(Suite::Structure, 3)).unwrap();
    let t = report.tallies();
    assert_eq!(t["heavy_vertex_branch"].skipped, corpus.len());
    assert_eq!(t["light_vertices_branch"].skipped, corpus.len());
    assert!(!report.has_counterexample());
}

#[test]
fn injection_at_k4_on_hajos_joins() {
    let k5 = Graph::complete(5);
    let mut g = k5.clone();
    for _ in 0..2 {
        let e = g.edges().last().unwrap();
        g = hajos_join(&g, e, &k5, Edge::new(0, 1)).unwrap();
        assert!(is_critical(&g, 5));
        let v = min_degree_vertex(&g, 4).unwrap();
        let c = prescribed_coloring(&g, v, 4).unwrap();
        let f = build_injection_f(&g, v, &c, 4).unwrap();
        assert_eq!(f.len(), 25);
        assert!(f.values().filter(|c| c.len() % 4 == 0).count() >= 15);
    }
}

#[test]
fn iterated_k4_joins_stay_critical() {
    let k4 = Graph::complete(4);
    let mut corpus = modk::corpus::Corpus::new(4);
    let mut g = k4.clone();
    for _ in 0..4 {
        let e = g.edges().next().unwrap();
        g = hajos_join(&g, e, &k4, Edge::new(2, 3)).unwrap();
        assert_eq!(corpus.offer(&g, Provenance::Hajos), modk::corpus::Admission::Added);
    }
    assert!(corpus.entries().iter().all(|e| e.min_degree == 3 && e.n % 3 == 1));
}
