//! The eleven join-irreducible generator families acting on k-types.
//!
//! Labels `a`..`h` are single coupled permutations. Applied to a tuple they
//! act on its type deterministically once the position of the cut (for the
//! rotating and sporadic operations) or the switched subset (for `d`) relative
//! to the tuple is fixed, so each family is a finite list of type maps.
//! Labels `i`, `j`, `k` are the automorphism groups of `(D;E)`, `(D;<)` and
//! `(D;T)`; their orbits on k-tuples are the classes of types with the same
//! graph, order or tournament respectively. This is the one place where the
//! universality of the random ordered graph is used: every pattern compatible
//! with the kept reduct is realized.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::structures::{
    check_arity, num_pairs, pair_index, pairs, type_count, KType, OrderedGraph, MAX_ARITY,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GeneratorLabel {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
}

impl GeneratorLabel {
    pub const ALL: [GeneratorLabel; 11] = [
        GeneratorLabel::A,
        GeneratorLabel::B,
        GeneratorLabel::C,
        GeneratorLabel::D,
        GeneratorLabel::E,
        GeneratorLabel::F,
        GeneratorLabel::G,
        GeneratorLabel::H,
        GeneratorLabel::I,
        GeneratorLabel::J,
        GeneratorLabel::K,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    pub fn as_char(self) -> char {
        (b'a' + self as u8) as char
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'a'..='k' => Ok(Self::ALL[(c as u8 - b'a') as usize]),
            _ => Err(Error::UnknownLabel(c.to_string())),
        }
    }

    /// Human-readable description of the generated group.
    pub fn description(self) -> &'static str {
        match self {
            GeneratorLabel::A => "cl{mix id <->}",
            GeneratorLabel::B => "cl{mix id turn}",
            GeneratorLabel::C => "cl{mix - id}",
            GeneratorLabel::D => "cl{mix sw id}",
            GeneratorLabel::E => "cl{mix - <->}",
            GeneratorLabel::F => "cl{mix sw turn}",
            GeneratorLabel::G => "cl{mix l id}",
            GeneratorLabel::H => "cl{mix u id}",
            GeneratorLabel::I => "Aut(D;E)",
            GeneratorLabel::J => "Aut(D;<)",
            GeneratorLabel::K => "Aut(D;T)",
        }
    }

    pub fn is_grouping(self) -> bool {
        matches!(
            self,
            GeneratorLabel::I | GeneratorLabel::J | GeneratorLabel::K
        )
    }

    pub fn is_cut_family(self) -> bool {
        matches!(
            self,
            GeneratorLabel::B | GeneratorLabel::F | GeneratorLabel::G | GeneratorLabel::H
        )
    }
}

impl fmt::Display for GeneratorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for GeneratorLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Self::from_char(c),
            _ => Err(Error::UnknownLabel(s.to_string())),
        }
    }
}

/// Parameter of one move of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MoveParam {
    None,
    /// Number of tuple entries below the cut.
    Cut(u8),
    /// Bitmask of switched positions.
    Subset(u8),
    Grouping,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TypeMove {
    pub label: GeneratorLabel,
    pub arity: usize,
    pub param: MoveParam,
}

/// Every parameterization of `label` on k-types.
pub fn generator_moves(label: GeneratorLabel, k: usize) -> Vec<TypeMove> {
    use GeneratorLabel::*;
    let mk = |param| TypeMove {
        label,
        arity: k,
        param,
    };
    match label {
        A | C | E => vec![mk(MoveParam::None)],
        B | F | G | H => (0..=k as u8).map(|c| mk(MoveParam::Cut(c))).collect(),
        D => (0..1u16 << k)
            .map(|s| mk(MoveParam::Subset(s as u8)))
            .collect(),
        I | J | K => vec![mk(MoveParam::Grouping)],
    }
}

fn full_mask(k: usize) -> u16 {
    ((1u32 << num_pairs(k)) - 1) as u16
}

fn pair_mask(k: usize, pred: impl Fn(usize, usize) -> bool) -> u16 {
    pairs(k)
        .filter(|&(i, j)| pred(i, j))
        .fold(0u16, |m, (i, j)| m | 1 << pair_index(i, j, k))
}

fn reverse_ranks(t: &KType) -> KType {
    let k = t.arity();
    let ranks: Vec<u8> = t.ranks().iter().map(|&r| (k - 1) as u8 - r).collect();
    t.with_ranks(&ranks)
}

fn rotate_ranks(t: &KType, cut: usize) -> KType {
    let k = t.arity();
    let ranks: Vec<u8> = t
        .ranks()
        .iter()
        .map(|&r| ((r as usize + k - cut) % k) as u8)
        .collect();
    t.with_ranks(&ranks)
}

/// Image of `t` under a deterministic move (labels `a`..`h`).
fn apply_deterministic(label: GeneratorLabel, param: MoveParam, t: &KType) -> KType {
    use GeneratorLabel::*;
    let k = t.arity();
    match (label, param) {
        (A, _) => reverse_ranks(t),
        (B, MoveParam::Cut(c)) => rotate_ranks(t, c as usize),
        (C, _) => t.with_adj(t.adj_bits() ^ full_mask(k)),
        (D, MoveParam::Subset(s)) => {
            let inside = |p: usize| s >> p & 1 == 1;
            t.with_adj(t.adj_bits() ^ pair_mask(k, |i, j| inside(i) != inside(j)))
        }
        (E, _) => reverse_ranks(&t.with_adj(t.adj_bits() ^ full_mask(k))),
        (F, MoveParam::Cut(c)) => {
            let above = |p: usize| t.rank(p) >= c as usize;
            let flipped = t.with_adj(t.adj_bits() ^ pair_mask(k, |i, j| above(i) != above(j)));
            rotate_ranks(&flipped, c as usize)
        }
        (G, MoveParam::Cut(c)) => {
            let below = |p: usize| t.rank(p) < c as usize;
            t.with_adj(t.adj_bits() ^ pair_mask(k, |i, j| below(i) && below(j)))
        }
        (H, MoveParam::Cut(c)) => {
            let above = |p: usize| t.rank(p) >= c as usize;
            t.with_adj(t.adj_bits() ^ pair_mask(k, |i, j| above(i) && above(j)))
        }
        _ => unreachable!("move {label:?} with {param:?} is not deterministic"),
    }
}

/// Invariant whose classes are the orbits of the grouping labels `i`, `j`, `k`.
pub fn grouping_key(label: GeneratorLabel, t: &KType) -> u32 {
    match label {
        // same graph on the positions, any order
        GeneratorLabel::I => t.adj_bits() as u32,
        // same order, any graph
        GeneratorLabel::J => t.code() >> num_pairs(t.arity()),
        // same tournament
        GeneratorLabel::K => {
            let k = t.arity();
            pairs(k)
                .filter(|&(p, q)| t.arrow(p, q))
                .fold(0u32, |acc, (p, q)| acc | 1 << pair_index(p, q, k))
        }
        _ => panic!("{label} is not a grouping label"),
    }
}

/// Image set of `t` under `m`: a singleton for deterministic moves, the whole
/// class of `t` for grouping moves.
pub fn apply_move(m: &TypeMove, t: &KType) -> Result<Vec<KType>> {
    if m.arity != t.arity() {
        return Err(Error::ArityMismatch {
            expected: m.arity,
            found: t.arity(),
        });
    }
    validate_param(m)?;
    if m.label.is_grouping() {
        let key = grouping_key(m.label, t);
        Ok((0..type_count(m.arity) as u32)
            .map(|c| KType::decode_unchecked(m.arity, c))
            .filter(|s| grouping_key(m.label, s) == key)
            .collect())
    } else {
        Ok(vec![apply_deterministic(m.label, m.param, t)])
    }
}

fn validate_param(m: &TypeMove) -> Result<()> {
    let ok = match (m.label, m.param) {
        (l, MoveParam::None) => {
            matches!(l, GeneratorLabel::A | GeneratorLabel::C | GeneratorLabel::E)
        }
        (l, MoveParam::Cut(c)) => l.is_cut_family() && c as usize <= m.arity,
        (GeneratorLabel::D, MoveParam::Subset(s)) => (s as u32) < 1 << m.arity,
        (l, MoveParam::Grouping) => l.is_grouping(),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            what: format!("move {}", m.label),
            param: match m.param {
                MoveParam::Cut(c) => c as usize,
                MoveParam::Subset(s) => s as usize,
                _ => 0,
            },
        })
    }
}

/// Precomputed action of one label on the k-types.
#[derive(Debug, Clone)]
pub enum MoveTable {
    /// One code map per parameterization.
    Maps(Vec<(MoveParam, Vec<u32>)>),
    /// Grouping key per code.
    Keys(Vec<u32>),
}

impl MoveTable {
    fn build(label: GeneratorLabel, k: usize) -> Self {
        let n = type_count(k) as u32;
        if label.is_grouping() {
            MoveTable::Keys(
                (0..n)
                    .map(|c| grouping_key(label, &KType::decode_unchecked(k, c)))
                    .collect(),
            )
        } else {
            MoveTable::Maps(
                generator_moves(label, k)
                    .into_iter()
                    .map(|m| {
                        let map = (0..n)
                            .map(|c| {
                                apply_deterministic(label, m.param, &KType::decode_unchecked(k, c))
                                    .code()
                            })
                            .collect();
                        (m.param, map)
                    })
                    .collect(),
            )
        }
    }

    fn identity(label: GeneratorLabel, k: usize) -> Self {
        let n = type_count(k) as u32;
        if label.is_grouping() {
            MoveTable::Keys((0..n).collect())
        } else {
            MoveTable::Maps(
                generator_moves(label, k)
                    .into_iter()
                    .map(|m| (m.param, (0..n).collect()))
                    .collect(),
            )
        }
    }
}

#[derive(Serialize)]
struct MoveTableDump {
    label: char,
    arity: usize,
    param: MoveParam,
    map: Vec<[u32; 2]>,
}

/// Lazily built move tables for all labels and arities.
///
/// A table set can be built with one label replaced by the identity action,
/// which is how verification runs are fault-injected in tests.
#[derive(Debug)]
pub struct MoveTables {
    tables: Vec<OnceLock<Arc<MoveTable>>>,
    corrupted: Option<GeneratorLabel>,
}

impl Default for MoveTables {
    fn default() -> Self {
        Self::new()
    }
}

impl MoveTables {
    pub fn new() -> Self {
        Self {
            tables: (0..11 * MAX_ARITY).map(|_| OnceLock::new()).collect(),
            corrupted: None,
        }
    }

    /// Tables in which `label` acts trivially.
    pub fn corrupted(label: GeneratorLabel) -> Self {
        Self {
            corrupted: Some(label),
            ..Self::new()
        }
    }

    pub fn corruption(&self) -> Option<GeneratorLabel> {
        self.corrupted
    }

    pub fn get(&self, label: GeneratorLabel, k: usize) -> Arc<MoveTable> {
        assert!((1..=MAX_ARITY).contains(&k));
        self.tables[label.index() * MAX_ARITY + k - 1]
            .get_or_init(|| {
                if self.corrupted == Some(label) {
                    Arc::new(MoveTable::identity(label, k))
                } else {
                    Arc::new(MoveTable::build(label, k))
                }
            })
            .clone()
    }

    /// JSON dump of the deterministic maps of `label` at arity `k`, one object per parameter.
    pub fn dump_json(&self, label: GeneratorLabel, k: usize) -> Result<String> {
        check_arity(k)?;
        let rows: Vec<MoveTableDump> = match &*self.get(label, k) {
            MoveTable::Maps(maps) => maps
                .iter()
                .map(|(param, map)| MoveTableDump {
                    label: label.as_char(),
                    arity: k,
                    param: *param,
                    map: map
                        .iter()
                        .enumerate()
                        .map(|(i, &j)| [i as u32, j])
                        .collect(),
                })
                .collect(),
            MoveTable::Keys(keys) => vec![MoveTableDump {
                label: label.as_char(),
                arity: k,
                param: MoveParam::Grouping,
                map: keys
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| [i as u32, j])
                    .collect(),
            }],
        };
        Ok(serde_json::to_string(&rows).expect("move tables serialize"))
    }
}

/// Parameter of a graph-level transform on a finite host.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConcreteParam {
    None,
    /// Vertices `0..cut` lie below the cut.
    Cut(usize),
    Subset(Vec<usize>),
}

/// A transformed host together with the vertex relabeling (`map[v]` is the new name of `v`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transformed {
    pub graph: OrderedGraph,
    pub map: Vec<usize>,
}

impl Transformed {
    pub fn image(&self, tuple: &[usize]) -> Vec<usize> {
        tuple.iter().map(|&v| self.map[v]).collect()
    }
}

fn relabel(g: &OrderedGraph, sigma: &[usize]) -> OrderedGraph {
    let mut out = OrderedGraph::empty(g.len());
    for (u, v) in g.edges() {
        out.set_edge(sigma[u], sigma[v], true);
    }
    out
}

fn flip_where(g: &OrderedGraph, pred: impl Fn(usize, usize) -> bool) -> OrderedGraph {
    let mut out = g.clone();
    for (u, v) in pairs(g.len()) {
        if pred(u, v) {
            out.flip_edge(u, v);
        }
    }
    out
}

/// Graph-level analogue of a generator move on a finite host.
pub fn concrete_transform(
    label: GeneratorLabel,
    param: &ConcreteParam,
    g: &OrderedGraph,
) -> Result<Transformed> {
    use GeneratorLabel::*;
    let n = g.len();
    let identity: Vec<usize> = (0..n).collect();
    let cut = |p: &ConcreteParam| -> Result<usize> {
        match p {
            ConcreteParam::Cut(c) if *c <= n => Ok(*c),
            ConcreteParam::Cut(c) => Err(Error::ParamOutOfRange {
                what: format!("cut of {label} on {n} vertices"),
                param: *c,
            }),
            _ => Err(Error::ParamOutOfRange {
                what: format!("{label} needs a cut"),
                param: 0,
            }),
        }
    };
    let reversal: Vec<usize> = (0..n).map(|v| n - 1 - v).collect();
    let rotation = |c: usize| -> Vec<usize> { (0..n).map(|v| (v + n - c) % n.max(1)).collect() };
    let out = match label {
        A => Transformed {
            graph: relabel(g, &reversal),
            map: reversal,
        },
        B => {
            let c = cut(param)?;
            let sigma = rotation(c);
            Transformed {
                graph: relabel(g, &sigma),
                map: sigma,
            }
        }
        C => Transformed {
            graph: g.complement(),
            map: identity,
        },
        D => {
            let ConcreteParam::Subset(s) = param else {
                return Err(Error::ParamOutOfRange {
                    what: "d needs a vertex subset".into(),
                    param: 0,
                });
            };
            if let Some(&bad) = s.iter().find(|&&v| v >= n) {
                return Err(Error::VertexOutOfRange { vertex: bad, n });
            }
            let mut inside = vec![false; n];
            for &v in s {
                inside[v] = true;
            }
            Transformed {
                graph: flip_where(g, |u, v| inside[u] != inside[v]),
                map: identity,
            }
        }
        E => Transformed {
            graph: relabel(&g.complement(), &reversal),
            map: reversal,
        },
        F => {
            let c = cut(param)?;
            let sigma = rotation(c);
            let flipped = flip_where(g, |u, v| (u >= c) != (v >= c));
            Transformed {
                graph: relabel(&flipped, &sigma),
                map: sigma,
            }
        }
        G => {
            let c = cut(param)?;
            Transformed {
                graph: flip_where(g, |u, v| u < c && v < c),
                map: identity,
            }
        }
        H => {
            let c = cut(param)?;
            Transformed {
                graph: flip_where(g, |u, v| u >= c && v >= c),
                map: identity,
            }
        }
        I | J | K => return Err(Error::NotConcrete(label.as_char())),
    };
    Ok(out)
}

/// Complement the edges that cross the cut and keep all others.
pub fn cut_switch(g: &OrderedGraph, cut: usize) -> OrderedGraph {
    flip_where(g, |u, v| (u < cut) != (v < cut))
}

/// The type-level parameter that a host parameter induces on `tuple`.
pub fn induced_param(label: GeneratorLabel, param: &ConcreteParam, tuple: &[usize]) -> MoveParam {
    match param {
        ConcreteParam::None => MoveParam::None,
        ConcreteParam::Cut(c) => MoveParam::Cut(tuple.iter().filter(|&&v| v < *c).count() as u8),
        ConcreteParam::Subset(s) => {
            debug_assert_eq!(label, GeneratorLabel::D);
            MoveParam::Subset(
                tuple
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| s.contains(v))
                    .fold(0u8, |m, (p, _)| m | 1 << p),
            )
        }
    }
}
