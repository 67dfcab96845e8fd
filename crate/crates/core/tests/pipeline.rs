use reeb_strip::constructions::{
    build_pair, catalogue, divergence_witnesses, verify_asymptotics, AsymptoticClaim, Branch, Catalogue,
    ConstructionSpec, PairParams, Side, Target, Theorem,
};
use reeb_strip::oracle::{graphs_equivalent, grid_reeb, grid_tolerance};
use reeb_strip::reeb::{export, predict_mthm2, to_json, ExportFormat, VertexKind};
use reeb_strip::strip::FunctionSource;
use reeb_strip::{
    build_reeb_graph, find_critical_set, make_region, slice, ReebGraph, SweepOptions, Tolerances, TsFunction, Window,
};

fn f(s: &str) -> TsFunction {
    TsFunction::from_expr_text(s).unwrap()
}

#[test]
fn construction_specs_replay_bit_identically() {
    let specs = [
        r#"{"variant": "catalogue", "name": "c_p0", "p": [1.0, 0.0, 1.0]}"#,
        r#"{"variant": "catalogue", "name": "c_e_p1_p2", "p1": 0.1, "p2": 0.7}"#,
        r#"{"variant": "rotate", "c0": {"expr": "1/(x^2+1)"}, "a_c": 0.6495190528383290, "bounds": [0.6495190528383290, 1.0]}"#,
    ];
    for text in specs {
        let spec: ConstructionSpec = serde_json::from_str(text).unwrap();
        let first = spec.build().unwrap();
        let dumped = serde_json::to_string(first.source()).unwrap();
        let source: FunctionSource = serde_json::from_str(&dumped).unwrap();
        let second = TsFunction::from_source(&source).unwrap();
        for x in Window::symmetric(2.0).lattice(64) {
            let (a, b) = (first.jet(x).unwrap(), second.jet(x).unwrap());
            assert_eq!(a.value.to_bits(), b.value.to_bits(), "{text} at {x}");
            assert_eq!(a.d1.to_bits(), b.d1.to_bits());
        }
    }
}

#[test]
fn sine_pair_from_slices_to_export() {
    let r = make_region(f("sin(x)"), f("sin(x)+1"), Window::symmetric(7.0)).unwrap();
    assert!(slice(&r, -2.0).unwrap().is_empty());
    // Two full periods fit in [-7, 7] at height 0.5.
    assert!(slice(&r, 0.5).unwrap().len() >= 4);

    let g = build_reeb_graph(&r, &SweepOptions::default()).unwrap();
    let v = to_json(&g);
    let kinds: Vec<&str> = v["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["kind"].as_str().unwrap())
        .collect();
    assert!(kinds.contains(&"critical") && kinds.contains(&"cut"));
    for e in v["edges"].as_array().unwrap() {
        let (lo, hi) = (e["lo"].as_u64().unwrap() as usize, e["hi"].as_u64().unwrap() as usize);
        assert!(g.vertices[lo].height < g.vertices[hi].height);
    }
    let svg = String::from_utf8(export(&g, ExportFormat::Svg)).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn constants_give_a_single_edge() {
    let r = make_region(f("-1"), f("1"), Window::symmetric(3.0)).unwrap();
    let s = slice(&r, 0.0).unwrap();
    assert_eq!(s.len(), 1);
    let g = build_reeb_graph(&r, &SweepOptions::default()).unwrap();
    assert_eq!(g.edges.len(), 1);
    assert!(g.vertices.iter().all(|v| v.kind == VertexKind::Cut));
    let dot = String::from_utf8(export(&g, ExportFormat::Dot)).unwrap();
    assert_eq!(dot.matches("->").count(), 1);

    let q = grid_reeb(&r, r.window, 512, 2048).unwrap();
    assert!(graphs_equivalent(&g, &q.graph, grid_tolerance(&q)).equivalent);
}

#[test]
fn empty_graph_exports_empty_arrays() {
    let g = ReebGraph {
        vertices: vec![],
        edges: vec![],
        window: Window::symmetric(1.0),
    };
    let v = to_json(&g);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 0);
    assert_eq!(v["edges"].as_array().unwrap().len(), 0);
}

#[test]
fn cubic_prediction() {
    let cs = find_critical_set(&f("x^3"), Window::symmetric(2.0), &Tolerances::default()).unwrap();
    let p = predict_mthm2(&cs, 0.5).unwrap();
    let got: Vec<(f64, usize)> = p.vertices.iter().map(|v| (v.height, v.degree)).collect();
    assert_eq!(got, vec![(0.0, 2), (0.5, 2)]);
}

#[test]
fn theorem_pairs() {
    let (c1, c2) = build_pair(Theorem::T4, &PairParams::default()).unwrap();
    for x in Window::symmetric(15.0).lattice(3000) {
        assert!(c2.eval(x).unwrap() > c1.eval(x).unwrap());
    }
    let (c1, _) = build_pair(Theorem::T5a, &PairParams::default()).unwrap();
    for x in Window::symmetric(15.0).lattice(3000) {
        assert!(c1.jet(x).unwrap().d1 > 0.0);
    }
}

#[test]
fn catalogue_limits_and_witnesses() {
    let hyper = catalogue(&Catalogue::HyperbolaPlusInf { r: 1.0 }).unwrap();
    for side in [Side::MinusInf, Side::PlusInf] {
        let claim = AsymptoticClaim {
            side,
            target: Target::PlusInf,
        };
        assert!(reeb_strip::constructions::verify_asymptotics_with(&hyper, claim, 3..=12).consistent());
    }
    let sin = catalogue(&Catalogue::Sin).unwrap();
    let claim = AsymptoticClaim {
        side: Side::PlusInf,
        target: Target::Limit(0.0),
    };
    assert!(!verify_asymptotics(&sin, claim).consistent());

    let p0 = Catalogue::P0 { p: vec![1.0, 0.0, 1.0] };
    let branch = Branch {
        side: Side::PlusInf,
        cos_sign: 1,
    };
    assert!(divergence_witnesses(&p0, 0, branch).unwrap().points.is_empty());
    assert!(divergence_witnesses(&Catalogue::Sin, 3, branch).is_err());
}
