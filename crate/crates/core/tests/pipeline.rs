//! End-to-end runs of build, verify and query on the reference families.

use hopset_core::hopset::{build_scale_hopset, lower_bound_violations, validate_witnesses};
use hopset_core::*;
use num_rational::Ratio;

fn er(n: usize, p: f64, wmin: u64, wmax: u64, seed: u64) -> Graph {
    generate_graph(&GraphModel::Er { n, p, wmin, wmax }, seed).unwrap()
}

#[test]
fn two_vertex_graph() {
    let g = Graph::from_edges(2, [(0, 1, 7)]).unwrap();
    for mode in [Mode::Direct, Mode::Reduced] {
        let h = build_hopset(
            &g,
            &HopsetParams {
                mode,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(h.edges.iter().all(|e| e.kind == EdgeKind::Node));
        assert!(verify_stretch(&g, &h, PairMode::All).unwrap().passed());
    }
}

#[test]
fn unit_weight_er_reduced() {
    let g = er(100, 0.1, 1, 1, 1);
    let h = build_hopset(&g, &HopsetParams::default()).unwrap();
    let r = verify_stretch(&g, &h, PairMode::All).unwrap();
    assert!(r.passed());
    assert_eq!(r.effective_beta, h.effective_beta);
}

#[test]
fn er_100_seed_5() {
    let g = er(100, 0.1, 1, 8, 5);
    let h = build_hopset(
        &g,
        &HopsetParams {
            seed: 5,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(verify_stretch(&g, &h, PairMode::All).unwrap().passed());
}

#[test]
fn exponential_path_both_modes() {
    let g = generate_graph(
        &GraphModel::Path {
            n: 64,
            base: Ratio::from_integer(2),
        },
        1,
    )
    .unwrap();
    let (reduced, rr) = build_hopset_with_report(&g, &HopsetParams::default()).unwrap();
    let direct_params = HopsetParams {
        mode: Mode::Direct,
        ..Default::default()
    };
    let (direct, dr) = build_hopset_with_report(&g, &direct_params).unwrap();
    let built = |r: &BuildReport| r.scales.iter().filter(|s| !s.trivial).count();
    assert!(built(&rr) > 0 && built(&dr) > 0);
    // reduced mode builds on contracted graphs of a few nodes per scale
    let reduced_nodes: usize = rr.scales.iter().map(|s| s.nodes).sum();
    let direct_nodes: usize = dr.scales.iter().map(|s| s.nodes).sum();
    assert!(reduced_nodes < direct_nodes);
    assert!(verify_stretch(&g, &reduced, PairMode::All)
        .unwrap()
        .passed());
    assert!(verify_stretch(&g, &direct, PairMode::All).unwrap().passed());
}

#[test]
fn reduced_mode_emits_scale_edges_with_valid_witnesses() {
    let g = er(128, 8.0 / 128.0, 1, 1 << 32, 3);
    let h = build_hopset(
        &g,
        &HopsetParams {
            seed: 3,
            path_reporting: true,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(h.count_kind(EdgeKind::Star) + h.count_kind(EdgeKind::Interconnect) > 0);
    assert!(h.count_kind(EdgeKind::Node) > 0);
    assert!(validate_witnesses(&g, &h).is_empty());
    assert!(lower_bound_violations(&g, &h).is_empty());
    let r = verify_stretch(&g, &h, PairMode::All).unwrap();
    assert!(r.passed(), "{:?}", r.violations.first());
}

#[test]
fn verification_is_read_only() {
    let g = er(60, 0.1, 1, 1 << 20, 2);
    let h = build_hopset(
        &g,
        &HopsetParams {
            seed: 2,
            path_reporting: true,
            ..Default::default()
        },
    )
    .unwrap();
    let digest = g.digest();
    let mut before = Vec::new();
    write_hopset(&h, &mut before).unwrap();
    verify_stretch(&g, &h, PairMode::All).unwrap();
    verify_stretch(&g, &h, PairMode::Sample { m: 100, seed: 1 }).unwrap();
    let mut after = Vec::new();
    write_hopset(&h, &mut after).unwrap();
    assert_eq!(before, after);
    assert_eq!(g.digest(), digest);
}

#[test]
fn star_set_bound_on_256() {
    for seed in 1..=10 {
        let g = er(256, 0.03, 1, 1 << 16, seed);
        let h = build_hopset(
            &g,
            &HopsetParams {
                seed,
                ..Default::default()
            },
        )
        .unwrap();
        let s = size_stats(&h, 256, 2);
        assert!(s.s_edges <= 256 * 8);
        assert_eq!(s.total, h.len());
        assert_eq!(s.per_scale.values().sum::<usize>(), h.len());
    }
}

#[test]
fn single_scale_band_contract_on_heavy_graph() {
    let g = er(40, 0.15, 1, 1 << 24, 4);
    let params = HopsetParams {
        mode: Mode::Direct,
        seed: 4,
        path_reporting: true,
        ..Default::default()
    };
    for k in relevant_scales(&g) {
        let (h, _) = build_scale_hopset(&g, &params, k).unwrap();
        assert!(validate_witnesses(&g, &h).is_empty());
        let r = verify_stretch(&g, &h, PairMode::Band(k)).unwrap();
        assert!(r.passed());
    }
}

#[test]
fn sampled_pairs_agree_with_all_pairs() {
    let g = er(80, 0.08, 1, 1 << 30, 6);
    let h = build_hopset(
        &g,
        &HopsetParams {
            seed: 6,
            ..Default::default()
        },
    )
    .unwrap();
    let all = verify_stretch(&g, &h, PairMode::All).unwrap();
    let some = verify_stretch(&g, &h, PairMode::Sample { m: 300, seed: 9 }).unwrap();
    assert_eq!(some.pairs_checked, 300);
    assert!(some.max_stretch_exact <= all.max_stretch_exact);
    assert!(all.passed() && some.passed());
}

#[test]
fn report_json_has_stable_keys() {
    let g = er(30, 0.2, 1, 10, 1);
    let h = build_hopset(&g, &HopsetParams::default()).unwrap();
    let json = verify_stretch(&g, &h, PairMode::All).unwrap().to_json();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["version"], 1);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert!(
        keys.contains(&"max_stretch") && keys.contains(&"violations") && keys.contains(&"sizes")
    );
    assert!(json.find("\"version\"").unwrap() < json.find("\"violations\"").unwrap());
}
