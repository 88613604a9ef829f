use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use reductlab::constellations::{
    check_compatible, enumerate_constellations, instantiate, Behavior,
};
use reductlab::structures::{pairs, type_of_tuple, OrderedGraph};
use reductlab::transforms::{
    apply_move, concrete_transform, induced_param, ConcreteParam, GeneratorLabel, MoveTables,
    TypeMove,
};
use reductlab::{Engine, GroupSpec};

fn engine() -> &'static Engine {
    static ENGINE: OnceLock<Engine> = OnceLock::new();
    ENGINE.get_or_init(|| Engine::with_tables(Arc::new(MoveTables::new())))
}

fn graph(n: usize, bits: u64) -> OrderedGraph {
    let mut g = OrderedGraph::empty(n);
    for (i, (u, v)) in pairs(n).enumerate() {
        g.set_edge(u, v, bits >> (i % 64) & 1 == 1);
    }
    g
}

/// Distinct vertices of `0..n`, in the order drawn.
fn tuple(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut s = seed;
    let mut out = Vec::new();
    for _ in 0..k {
        s = s
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        out.push(pool.remove((s >> 33) as usize % pool.len()));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tuple_type_ignores_the_rest_of_the_host(n in 1usize..=8, bits: u64, k in 1usize..=5, seed: u64) {
        let k = k.min(n);
        let g = graph(n, bits);
        let t = tuple(n, k, seed);
        let mut support = t.clone();
        support.sort_unstable();
        let sub = g.induced(&support);
        let moved: Vec<usize> = t.iter().map(|v| support.binary_search(v).unwrap()).collect();
        prop_assert_eq!(type_of_tuple(&g, &t).unwrap(), type_of_tuple(&sub, &moved).unwrap());
    }

    #[test]
    fn host_transforms_agree_with_type_moves(
        n in 1usize..=8,
        bits: u64,
        k in 1usize..=4,
        seed: u64,
        li in 0usize..8,
        cut in 0usize..=8,
        subset: u8,
    ) {
        let k = k.min(n);
        let label = GeneratorLabel::ALL[li];
        let g = graph(n, bits);
        let t = tuple(n, k, seed);
        let param = if label == GeneratorLabel::D {
            ConcreteParam::Subset((0..n).filter(|v| subset >> v & 1 == 1).collect())
        } else if label.is_cut_family() {
            ConcreteParam::Cut(cut.min(n))
        } else {
            ConcreteParam::None
        };
        let out = concrete_transform(label, &param, &g).unwrap();
        let before = type_of_tuple(&g, &t).unwrap();
        let after = type_of_tuple(&out.graph, &out.image(&t)).unwrap();
        let mv = TypeMove { label, arity: k, param: induced_param(label, &param, &t) };
        prop_assert_eq!(apply_move(&mv, &before).unwrap(), vec![after]);
    }

    #[test]
    fn keep_everywhere_changes_nothing(n in 1usize..=6, bits: u64, split in 0usize..=6) {
        let keep = &enumerate_constellations(&[0, 1], &[Behavior::Keep]).unwrap()[0];
        let placement: Vec<usize> = (0..n).map(|p| usize::from(p < split.min(n))).rev().collect();
        let g = graph(n, bits);
        let once = instantiate(keep, &placement, &g).unwrap();
        prop_assert_eq!(&instantiate(keep, &placement, &once).unwrap(), &g);
    }
}

#[test]
fn orbit_partitions_grow_with_the_group() {
    let e = engine();
    let specs: Vec<GroupSpec> = GroupSpec::all()
        .subsets()
        .filter(|s| s.len() <= 2)
        .collect();
    for &small in &specs {
        for &large in &specs {
            if !small.is_subset(large) {
                continue;
            }
            for k in 1..=3 {
                let p = e.orbit_partition(small, k).unwrap();
                let q = e.orbit_partition(large, k).unwrap();
                assert!(p.refines(&q), "{small} vs {large} at arity {k}");
            }
        }
    }
}

#[test]
fn compatibility_grows_with_the_group() {
    let e = engine();
    let chain: Vec<GroupSpec> = ["", "c", "cg", "cdgh", "cdghj"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    for levels in [&[0, 0][..], &[1, 0][..]] {
        for c in enumerate_constellations(levels, &Behavior::KEEP_FLIP).unwrap() {
            let verdicts: Vec<bool> = chain
                .iter()
                .map(|&g| check_compatible(e, &c, g, 3).unwrap())
                .collect();
            // once compatible, compatible with every larger group
            assert!(
                verdicts.windows(2).all(|w| !w[0] || w[1]),
                "{c}: {verdicts:?}"
            );
        }
    }
}

#[test]
fn eradication_needs_the_full_order_group() {
    let e = engine();
    let j: GroupSpec = "j".parse().unwrap();
    for levels in [&[0][..], &[0, 0][..], &[1, 0][..]] {
        for c in enumerate_constellations(levels, &Behavior::ALL).unwrap() {
            if !c.has_eradicating_entry() {
                continue;
            }
            assert!(check_compatible(e, &c, j, 3).unwrap(), "{c}");
            assert!(
                !check_compatible(e, &c, GroupSpec::EMPTY, 3).unwrap(),
                "{c}"
            );
        }
    }
}
