use std::collections::HashSet;
use std::sync::OnceLock;

use reductlab::constellations::{classify_constellation, find_case};
use reductlab::lattice::{build_preservation_table, display_label, ExpectedTable, Lattice};
use reductlab::{Engine, GroupSpec};

fn setup() -> &'static (Engine, Lattice) {
    static SETUP: OnceLock<(Engine, Lattice)> = OnceLock::new();
    SETUP.get_or_init(|| {
        let engine = Engine::new();
        let lattice = Lattice::enumerate(&engine).unwrap();
        (engine, lattice)
    })
}

#[test]
fn table_output_is_stable() {
    let (_, lattice) = setup();
    let rows = ExpectedTable::bundled();
    let a = build_preservation_table(lattice, None, &rows.row_labels()).unwrap();
    let b = build_preservation_table(lattice, None, &rows.row_labels()).unwrap();
    assert_eq!(a.to_tsv(), b.to_tsv());
    assert_eq!(a.to_tsv().lines().count(), 43);
    let json: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 42);
    assert_eq!(json["columns"].as_array().unwrap().len(), 14);
    assert!(json["sd_surrogate"].is_null());
}

#[test]
fn hasse_diagram_is_reduced_and_acyclic() {
    let (_, lattice) = setup();
    let edges: HashSet<(usize, usize)> = lattice.hasse_edges().into_iter().collect();
    for &(u, v) in &edges {
        assert!(lattice.leq(u, v) && u != v);
        assert!(!lattice.leq(v, u));
        // no node strictly between
        for w in 0..lattice.len() {
            assert!(!(w != u && w != v && lattice.leq(u, w) && lattice.leq(w, v)));
        }
    }
    let dot = lattice.to_dot();
    assert_eq!(dot.matches("->").count(), edges.len());
    assert_eq!(lattice.to_dot(), dot);
}

#[test]
fn meets_and_joins_agree_with_the_order() {
    let (_, lattice) = setup();
    let n = lattice.len();
    for u in 0..n {
        for v in 0..n {
            let j = lattice.join(u, v);
            assert!(lattice.leq(u, j) && lattice.leq(v, j));
            let m = lattice.meet(u, v).expect("finite lattice has meets");
            assert!(lattice.leq(m, u) && lattice.leq(m, v));
        }
    }
    assert_eq!(display_label(&lattice.nodes()[lattice.bottom()]), "∅");
    assert_eq!(lattice.nodes()[lattice.top()].ideal, GroupSpec::all());
}

#[test]
fn classification_of_two_slot_cases() {
    let (engine, lattice) = setup();
    let op: GroupSpec = "cdghj".parse().unwrap();
    let candidates: Vec<GroupSpec> = lattice
        .nodes()
        .iter()
        .map(|n| n.ideal)
        .filter(|i| i.is_subset(op))
        .collect();
    for (id, minimal) in [
        ("C2:a3", "cdghj"),
        ("C2:b3", "cg"),
        ("C2:b5", "ch"),
        ("C2:a2", "d"),
    ] {
        let c = find_case(id).unwrap().constellation;
        let r = classify_constellation(engine, &c, &candidates, 4, 4, 6).unwrap();
        let want: GroupSpec = minimal.parse().unwrap();
        assert_eq!(r.minimal, vec![want], "{id}");
        assert!(r.forced.is_subset(want), "{id}: forced {}", r.forced);
    }
}
