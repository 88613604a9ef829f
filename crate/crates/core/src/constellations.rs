//! Finite model of order-preserving canonical behaviors on a few infinite
//! orbits ("slots") of the structure expanded by constants.
//!
//! A slot has a level (how many constants lie below it) and a behavior on
//! pairs inside it. Two slots on the same level interleave, so a pair with
//! one point in each has two entries: one for the pair whose lower point is
//! in the first slot (`asc`) and one for the opposite case (`desc`). Slots on
//! different levels never interleave and need one entry.
//!
//! A finite ordered graph is placed into the slots by listing the slot of
//! each point in increasing order. Levels must not decrease along the
//! placement; within a level the interleaving is free. Applying the behavior
//! then gives the image graph on the same ordered point set.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::orbits::{Engine, GroupSpec};
use crate::structures::{num_pairs, pair_index, pairs, KType, OrderedGraph, MAX_ARITY};
use crate::transforms::GeneratorLabel;

/// What a behavior does to the graph relation on the pairs it governs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Behavior {
    Keep,
    Flip,
    EradicateEdges,
    EradicateNonEdges,
}

impl Behavior {
    pub const KEEP_FLIP: [Behavior; 2] = [Behavior::Keep, Behavior::Flip];
    pub const ALL: [Behavior; 4] = [
        Behavior::Keep,
        Behavior::Flip,
        Behavior::EradicateEdges,
        Behavior::EradicateNonEdges,
    ];

    pub fn apply(self, edge: bool) -> bool {
        match self {
            Behavior::Keep => edge,
            Behavior::Flip => !edge,
            Behavior::EradicateEdges => false,
            Behavior::EradicateNonEdges => true,
        }
    }

    pub fn is_eradicating(self) -> bool {
        matches!(self, Behavior::EradicateEdges | Behavior::EradicateNonEdges)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Behavior::Keep => "id",
            Behavior::Flip => "-",
            Behavior::EradicateEdges => "N",
            Behavior::EradicateNonEdges => "E",
        }
    }
}

impl fmt::Display for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Slot {
    pub level: i32,
    pub behavior: Behavior,
}

/// Behavior between two slots `s < t`. `asc` governs pairs whose lower point
/// lies in `s`, `desc` the others. For slots on different levels only one
/// kind of pair exists and both fields hold the same entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PairEntry {
    pub asc: Behavior,
    pub desc: Behavior,
}

impl PairEntry {
    pub fn uniform(b: Behavior) -> Self {
        Self { asc: b, desc: b }
    }

    pub fn lines(asc: Behavior, desc: Behavior) -> Self {
        Self { asc, desc }
    }
}

/// Slot `i` of every placement, listed per point in increasing order.
pub type Placement = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Constellation {
    slots: Vec<Slot>,
    /// Indexed by `pair_index(s, t, slots.len())`.
    between: Vec<PairEntry>,
}

impl Constellation {
    pub fn new(slots: Vec<Slot>, between: Vec<PairEntry>) -> Result<Self> {
        let k = slots.len();
        if k == 0 || k > MAX_ARITY {
            return Err(Error::InvalidArity(k));
        }
        if between.len() != num_pairs(k) {
            return Err(Error::ArityMismatch {
                expected: num_pairs(k),
                found: between.len(),
            });
        }
        for (s, t) in pairs(k) {
            let e = between[pair_index(s, t, k)];
            if slots[s].level != slots[t].level && e.asc != e.desc {
                return Err(Error::InconsistentPlacement(format!(
                    "slots {s} and {t} lie on different levels but have two entries"
                )));
            }
        }
        Ok(Self { slots, between })
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn between(&self, s: usize, t: usize) -> PairEntry {
        self.between[pair_index(s.min(t), s.max(t), self.slots.len())]
    }

    pub fn has_eradicating_entry(&self) -> bool {
        self.slots.iter().any(|s| s.behavior.is_eradicating())
            || self
                .between
                .iter()
                .any(|e| e.asc.is_eradicating() || e.desc.is_eradicating())
    }

    /// Behavior on the pair of points `p < q` placed in slots `sp` and `sq`.
    fn pair_behavior(&self, sp: usize, sq: usize) -> Behavior {
        if sp == sq {
            return self.slots[sp].behavior;
        }
        let e = self.between(sp, sq);
        if sp < sq {
            e.asc
        } else {
            e.desc
        }
    }

    fn check_placement(&self, placement: &[usize]) -> Result<()> {
        for &s in placement {
            if s >= self.slots.len() {
                return Err(Error::InconsistentPlacement(format!("no slot {s}")));
            }
        }
        if placement
            .windows(2)
            .any(|w| self.slots[w[0]].level > self.slots[w[1]].level)
        {
            return Err(Error::InconsistentPlacement(format!(
                "levels decrease along {placement:?}"
            )));
        }
        Ok(())
    }

    /// Every placement of `m` points.
    pub fn placements(&self, m: usize) -> Vec<Placement> {
        let k = self.slots.len();
        let mut out = Vec::new();
        let mut current = vec![0usize; m];
        loop {
            if self.check_placement(&current).is_ok() {
                out.push(current.clone());
            }
            // odometer over k^m assignments
            let mut i = m;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                current[i] += 1;
                if current[i] < k {
                    break;
                }
                current[i] = 0;
            }
        }
    }

    /// Adjacency bits of the image of the graph with adjacency bits `adj` on
    /// `placement.len()` points.
    fn apply_bits(&self, placement: &[usize], adj: u16) -> u16 {
        let m = placement.len();
        let mut out = 0u16;
        for (p, q) in pairs(m) {
            let bit = pair_index(p, q, m);
            let edge = adj >> bit & 1 == 1;
            if self.pair_behavior(placement[p], placement[q]).apply(edge) {
                out |= 1 << bit;
            }
        }
        out
    }
}

impl fmt::Display for Constellation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [char; MAX_ARITY] = ['X', 'Y', 'Z', 'W', 'V'];
        let k = self.slots.len();
        let slots: Vec<String> = self
            .slots
            .iter()
            .enumerate()
            .map(|(i, s)| format!("{}@{}:{}", NAMES[i], s.level, s.behavior))
            .collect();
        write!(f, "{}", slots.join(" "))?;
        for (s, t) in pairs(k) {
            let e = self.between(s, t);
            if self.slots[s].level == self.slots[t].level {
                write!(f, " {}{}:{}/{}", NAMES[s], NAMES[t], e.asc, e.desc)?;
            } else {
                write!(f, " {}{}:{}", NAMES[s], NAMES[t], e.asc)?;
            }
        }
        Ok(())
    }
}

/// All constellations on slots with the given levels, with entries drawn
/// from `vocab`. Slots are labeled, so no two slot orders are identified.
pub fn enumerate_constellations(levels: &[i32], vocab: &[Behavior]) -> Result<Vec<Constellation>> {
    let k = levels.len();
    if k > 3 {
        return Err(Error::SizeLimit(k));
    }
    if k == 0 {
        return Err(Error::InvalidArity(0));
    }
    // one choice per slot, then one or two per pair
    let mut positions = k;
    for (s, t) in pairs(k) {
        positions += if levels[s] == levels[t] { 2 } else { 1 };
    }
    let v = vocab.len();
    let total = v.pow(positions as u32);
    let mut out = Vec::with_capacity(total);
    for mut index in 0..total {
        let mut next = || {
            let b = vocab[index % v];
            index /= v;
            b
        };
        let slots: Vec<Slot> = levels
            .iter()
            .map(|&level| Slot {
                level,
                behavior: next(),
            })
            .collect();
        let between: Vec<PairEntry> = pairs(k)
            .map(|(s, t)| {
                if levels[s] == levels[t] {
                    let asc = next();
                    PairEntry::lines(asc, next())
                } else {
                    PairEntry::uniform(next())
                }
            })
            .collect();
        out.push(Constellation::new(slots, between)?);
    }
    Ok(out)
}

/// The image of `before` when its points are placed into the slots of `c`.
pub fn instantiate(
    c: &Constellation,
    placement: &[usize],
    before: &OrderedGraph,
) -> Result<OrderedGraph> {
    if placement.len() != before.len() {
        return Err(Error::ArityMismatch {
            expected: before.len(),
            found: placement.len(),
        });
    }
    c.check_placement(placement)?;
    let mut after = before.clone();
    for (p, q) in pairs(before.len()) {
        let b = c.pair_behavior(placement[p], placement[q]);
        after.set_edge(p, q, b.apply(before.has_edge(p, q)));
    }
    Ok(after)
}

/// A placement and base graph on which the behavior leaves an orbit of the group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Incompatibility {
    pub placement: Placement,
    pub before: u32,
    pub after: u32,
}

/// First placement (by number of points, then placement, then base graph)
/// whose before and after types lie in different orbits of `gs`.
pub fn find_incompatibility(
    engine: &Engine,
    c: &Constellation,
    gs: GroupSpec,
    max_arity: usize,
) -> Result<Option<Incompatibility>> {
    for m in 1..=max_arity {
        let partition = engine.orbit_partition(gs, m)?;
        let ranks: Vec<u8> = (0..m as u8).collect();
        for placement in c.placements(m) {
            for adj in 0..1u32 << num_pairs(m) {
                let after = c.apply_bits(&placement, adj as u16);
                let before = KType::new(&ranks, adj as u16)?.code();
                let after = KType::new(&ranks, after)?.code();
                if !partition.same_block(before, after) {
                    return Ok(Some(Incompatibility {
                        placement,
                        before,
                        after,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Whether every instantiation on at most `max_arity` points stays inside the orbits of `gs`.
pub fn check_compatible(
    engine: &Engine,
    c: &Constellation,
    gs: GroupSpec,
    max_arity: usize,
) -> Result<bool> {
    Ok(find_incompatibility(engine, c, gs, max_arity)?.is_none())
}

/// A transformation of ordered graphs on `0..m` that a behavior may be asked to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Target {
    Identity,
    Complement,
    /// Flip every pair with exactly one point in the bitmask.
    Switch(u8),
    /// Flip every pair inside the lowest `n` points.
    Prefix(usize),
    /// Flip every pair inside the points from position `n` on.
    Suffix(usize),
    Pair(usize, usize),
}

impl Target {
    fn apply(self, m: usize, adj: u16) -> u16 {
        let mask = pairs(m)
            .filter(|&(p, q)| match self {
                Target::Identity => false,
                Target::Complement => true,
                Target::Switch(s) => (s >> p & 1) != (s >> q & 1),
                Target::Prefix(n) => q < n,
                Target::Suffix(n) => p >= n,
                Target::Pair(i, j) => (p, q) == (i, j),
            })
            .fold(0u16, |acc, (p, q)| acc | 1 << pair_index(p, q, m));
        adj ^ mask
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Identity => write!(f, "identity"),
            Target::Complement => write!(f, "complement"),
            Target::Switch(s) => write!(f, "switch {s:#b}"),
            Target::Prefix(n) => write!(f, "flip below {n}"),
            Target::Suffix(n) => write!(f, "flip from {n}"),
            Target::Pair(i, j) => write!(f, "flip pair {i}{j}"),
        }
    }
}

/// Transformations on `m` points that together stand for the group of
/// `label`; `None` stands for the bottom group.
pub fn targets_for(label: Option<GeneratorLabel>, m: usize) -> Result<Vec<Target>> {
    use GeneratorLabel::*;
    Ok(match label {
        None => vec![Target::Identity],
        Some(C) => vec![Target::Complement],
        Some(D) => (0..1u8 << m).map(Target::Switch).collect(),
        Some(G) => (0..=m).map(Target::Prefix).collect(),
        Some(H) => (0..=m).map(Target::Suffix).collect(),
        Some(J) => pairs(m).map(|(i, j)| Target::Pair(i, j)).collect(),
        Some(other) => return Err(Error::NotConcrete(other.as_char())),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub target: Target,
    /// Placements applied one after the other; `None` when not found.
    pub moves: Option<Vec<Placement>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub label: Option<GeneratorLabel>,
    pub set_size: usize,
    pub max_depth: usize,
    pub witnesses: Vec<Witness>,
    /// Distinct composite transformations visited.
    pub explored: usize,
}

impl WitnessReport {
    pub fn success(&self) -> bool {
        self.witnesses.iter().all(|w| w.moves.is_some())
    }

    /// Length of the longest witness, when all were found.
    pub fn depth(&self) -> Option<usize> {
        self.witnesses
            .iter()
            .map(|w| w.moves.as_ref().map(Vec::len))
            .collect::<Option<Vec<_>>>()
            .map(|d| d.into_iter().max().unwrap_or(0))
    }
}

/// Bound on the number of composite transformations a search may visit.
pub const NODE_BUDGET: usize = 200_000;

/// Breadth-first search for compositions of placements of a set of
/// `set_size` points that act like each target on every graph on the set.
///
/// A search state is the composite transformation, stored as the image of
/// each of the `2^C(m,2)` graphs, so a witness works uniformly for all of them.
pub fn witness_generates(
    c: &Constellation,
    label: Option<GeneratorLabel>,
    set_size: usize,
    max_depth: usize,
) -> Result<WitnessReport> {
    let m = set_size;
    if m == 0 || m > MAX_ARITY {
        return Err(Error::InvalidArity(m));
    }
    let graphs = 1usize << num_pairs(m);
    let targets = targets_for(label, m)?;
    let goal: Vec<Vec<u16>> = targets
        .iter()
        .map(|t| (0..graphs).map(|g| t.apply(m, g as u16)).collect())
        .collect();

    let placements = c.placements(m);
    let tables: Vec<Vec<u16>> = placements
        .iter()
        .map(|p| (0..graphs).map(|g| c.apply_bits(p, g as u16)).collect())
        .collect();

    let start: Vec<u16> = (0..graphs as u16).collect();
    let mut states = vec![start.clone()];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut index: HashMap<Vec<u16>, usize> = HashMap::from([(start, 0)]);
    let mut found: Vec<Option<usize>> = goal.iter().map(|g| index.get(g).copied()).collect();
    let mut frontier = vec![0usize];
    let mut depth = 0;
    while depth < max_depth && found.iter().any(Option::is_none) && !frontier.is_empty() {
        let mut next = Vec::new();
        for &s in &frontier {
            for (mi, table) in tables.iter().enumerate() {
                let image: Vec<u16> = states[s].iter().map(|&g| table[g as usize]).collect();
                if index.contains_key(&image) {
                    continue;
                }
                if states.len() >= NODE_BUDGET {
                    break;
                }
                states.push(image.clone());
                parent.push(Some((s, mi)));
                index.insert(image, states.len() - 1);
                next.push(states.len() - 1);
            }
        }
        for (ti, g) in goal.iter().enumerate() {
            if found[ti].is_none() {
                found[ti] = index.get(g).copied();
            }
        }
        frontier = next;
        depth += 1;
    }

    let path = |mut s: usize| {
        let mut moves = Vec::new();
        while let Some((prev, mi)) = parent[s] {
            moves.push(placements[mi].clone());
            s = prev;
        }
        moves.reverse();
        moves
    };
    let witnesses = targets
        .iter()
        .zip(&found)
        .map(|(&target, f)| Witness {
            target,
            moves: f.map(path),
        })
        .collect();
    Ok(WitnessReport {
        label,
        set_size,
        max_depth,
        witnesses,
        explored: states.len(),
    })
}

/// Whether applying `moves` in order acts like `target` on every graph on `m` points.
pub fn replay(c: &Constellation, moves: &[Placement], target: Target) -> Result<bool> {
    let m = target_arity(moves)?;
    let graphs = 1u32 << num_pairs(m);
    for g in 0..graphs {
        let mut cur = g as u16;
        for p in moves {
            c.check_placement(p)?;
            cur = c.apply_bits(p, cur);
        }
        if cur != target.apply(m, g as u16) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn target_arity(moves: &[Placement]) -> Result<usize> {
    let m = moves.first().map_or(0, Vec::len);
    if m == 0 || m > MAX_ARITY || moves.iter().any(|p| p.len() != m) {
        return Err(Error::InvalidArity(m));
    }
    Ok(m)
}

/// Four placements into two same-level slots `0` and `1` whose combined
/// effect flips the pair `(i, j)`: nothing in slot 1, then `i`, then `j`,
/// then both.
pub fn four_embedding_recipe(m: usize, i: usize, j: usize) -> Vec<Placement> {
    let with = |set: &[usize]| (0..m).map(|p| usize::from(set.contains(&p))).collect();
    vec![with(&[]), with(&[i]), with(&[j]), with(&[i, j])]
}

/// Result of comparing a constellation with candidate groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub compatible: Vec<GroupSpec>,
    /// Compatible candidates with no compatible candidate strictly below.
    pub minimal: Vec<GroupSpec>,
    /// Labels among `c, d, g, h, j` for which every target was witnessed.
    pub forced: GroupSpec,
}

/// Compatibility with each candidate, plus the labels whose targets the
/// constellation was seen to generate on `set_size` points.
pub fn classify_constellation(
    engine: &Engine,
    c: &Constellation,
    candidates: &[GroupSpec],
    max_arity: usize,
    set_size: usize,
    max_depth: usize,
) -> Result<Classification> {
    let mut compatible = Vec::new();
    for &gs in candidates {
        if check_compatible(engine, c, gs, max_arity)? {
            compatible.push(gs);
        }
    }
    let minimal = compatible
        .iter()
        .copied()
        .filter(|&g| !compatible.iter().any(|&h| h != g && h.is_subset(g)))
        .collect();
    let mut forced = GroupSpec::EMPTY;
    for label in [
        GeneratorLabel::C,
        GeneratorLabel::D,
        GeneratorLabel::G,
        GeneratorLabel::H,
        GeneratorLabel::J,
    ] {
        if witness_generates(c, Some(label), set_size, max_depth)?.success() {
            forced = forced.with(label);
        }
    }
    Ok(Classification {
        compatible,
        minimal,
        forced,
    })
}

/// Whether the geometry of a case is given explicitly or inferred from its neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClaimSource {
    Stated,
    Reconstructed,
}

/// One case of the constellation analysis with the group it is said to generate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseRecord {
    pub id: String,
    pub constellation: Constellation,
    pub claimed: GroupSpec,
    pub source: ClaimSource,
}

impl CaseRecord {
    /// Label whose targets witness the claim (`None` for the bottom group).
    pub fn target_label(&self) -> Option<GeneratorLabel> {
        self.claimed.labels().last()
    }
}

mod build {
    use super::*;
    use Behavior::{Flip as F, Keep as K};

    pub(super) fn slot(level: i32, behavior: Behavior) -> Slot {
        Slot { level, behavior }
    }

    pub(super) fn u(b: Behavior) -> PairEntry {
        PairEntry::uniform(b)
    }

    pub(super) fn l(asc: Behavior, desc: Behavior) -> PairEntry {
        PairEntry::lines(asc, desc)
    }

    /// Flip on the second slot and on pairs whose lower point is in it.
    pub(super) const LOWER_IN_FLIPPED: PairEntry = PairEntry { asc: K, desc: F };
    /// Flip on the second slot and on pairs whose upper point is in it.
    pub(super) const UPPER_IN_FLIPPED: PairEntry = PairEntry { asc: F, desc: K };
}

fn case(
    id: &str,
    slots: Vec<Slot>,
    between: Vec<PairEntry>,
    claimed: &str,
    source: ClaimSource,
) -> CaseRecord {
    CaseRecord {
        id: id.to_string(),
        constellation: Constellation::new(slots, between).expect("catalog geometry is consistent"),
        claimed: claimed.parse().expect("catalog labels parse"),
        source,
    }
}

/// The cases of the two-, three- and four-slot analysis. Cases marked
/// `Reconstructed` take the geometry that their neighbours and the claimed
/// group determine.
pub fn case_catalog() -> Vec<CaseRecord> {
    use build::*;
    use Behavior::{Flip as F, Keep as K};
    use ClaimSource::{Reconstructed, Stated};
    let mut out = Vec::new();

    // two slots on one level; X keeps, entries are (Y, asc, desc)
    let c2a = [
        ("a1", K, K, K, ""),
        ("a2", K, F, F, "d"),
        ("a3", K, F, K, "j"),
        ("a4", F, K, K, "j"),
        ("a5", F, F, F, "j"),
        ("a6", F, K, F, "h"),
        ("a7", F, F, K, "g"),
    ];
    for (id, y, asc, desc, claim) in c2a {
        out.push(case(
            &format!("C2:{id}"),
            vec![slot(0, K), slot(0, y)],
            vec![l(asc, desc)],
            claim,
            Stated,
        ));
    }

    // X above Y; entries are (X, Y, between)
    let c2b = [
        ("b1", K, K, K, ""),
        ("b2", K, K, F, "d"),
        ("b3", K, F, K, "g"),
        ("b4", K, F, F, "h"),
        ("b5", F, K, K, "h"),
        ("b6", F, K, F, "g"),
    ];
    for (id, x, y, between, claim) in c2b {
        out.push(case(
            &format!("C2:{id}"),
            vec![slot(1, x), slot(0, y)],
            vec![u(between)],
            claim,
            Stated,
        ));
    }

    // three slots on one level, X and Y kept and kept between; entries are (Z, XZ, YZ)
    let c3a = [
        ("a1", K, l(K, K), l(K, K), ""),
        ("a2", K, l(K, K), l(F, F), "j"),
        ("a3", K, l(F, F), l(F, F), "d"),
        ("a4", F, LOWER_IN_FLIPPED, LOWER_IN_FLIPPED, "h"),
        ("a5", F, LOWER_IN_FLIPPED, UPPER_IN_FLIPPED, "j"),
        ("a6", F, UPPER_IN_FLIPPED, UPPER_IN_FLIPPED, "g"),
    ];
    for (id, z, xz, yz, claim) in c3a {
        out.push(case(
            &format!("C3:{id}"),
            vec![slot(0, K), slot(0, K), slot(0, z)],
            vec![l(K, K), xz, yz],
            claim,
            Stated,
        ));
    }

    // X > Y > Z, entries (Z, XZ, YZ); C3:c and C3:d put X and Y on one level
    // with Z below or above
    let c3b = [
        ("1", K, K, K, ""),
        ("2", K, F, K, "j"),
        ("3", K, K, F, "j"),
        ("4", K, F, F, "d"),
        ("5", F, K, K, "g"),
        ("6", F, F, K, "j"),
        ("7", F, K, F, "j"),
        ("8", F, F, F, "h"),
    ];
    for (n, z, xz, yz, claim) in c3b {
        out.push(case(
            &format!("C3:b{n}"),
            vec![slot(2, K), slot(1, K), slot(0, z)],
            vec![u(K), u(xz), u(yz)],
            claim,
            Stated,
        ));
    }
    for (n, z, xz, yz, claim) in c3b {
        out.push(case(
            &format!("C3:c{n}"),
            vec![slot(1, K), slot(1, K), slot(0, z)],
            vec![l(K, K), u(xz), u(yz)],
            claim,
            Reconstructed,
        ));
    }
    for (n, z, xz, yz, claim) in c3b {
        // mirror image: a flip on the highest slot gives suffix flips
        let mirrored = match claim {
            "g" => "h",
            "h" => "g",
            other => other,
        };
        out.push(case(
            &format!("C3:d{n}"),
            vec![slot(0, K), slot(0, K), slot(1, z)],
            vec![l(K, K), u(xz), u(yz)],
            mirrored,
            Reconstructed,
        ));
    }

    // four slots: three kept and kept between, the fourth flipped
    let same4 = |w_pairs: PairEntry| vec![l(K, K), l(K, K), w_pairs, l(K, K), w_pairs, w_pairs];
    out.push(case(
        "C4:a1",
        vec![slot(0, K), slot(0, K), slot(0, K), slot(0, F)],
        same4(UPPER_IN_FLIPPED),
        "g",
        Stated,
    ));
    out.push(case(
        "C4:a2",
        vec![slot(0, K), slot(0, K), slot(0, K), slot(0, F)],
        same4(LOWER_IN_FLIPPED),
        "h",
        Stated,
    ));

    for (id, b, claim) in [("C4:b1", K, "g"), ("C4:b2", F, "h")] {
        out.push(case(
            id,
            vec![slot(1, K), slot(1, K), slot(1, K), slot(0, F)],
            vec![l(K, K), l(K, K), u(b), l(K, K), u(b), u(b)],
            claim,
            Stated,
        ));
    }

    // X > Y > Z with Z flipped and W beside X (C4:c) or beside Y (C4:d)
    for (prefix, w_level) in [("C4:c", 2), ("C4:d", 1)] {
        for (n, b, claim) in [("1", K, "g"), ("2", F, "h")] {
            let levels = [2, 1, 0, w_level];
            let entry = |s: usize, t: usize| {
                if s == 2 || t == 2 {
                    u(b)
                } else if levels[s] == levels[t] {
                    l(K, K)
                } else {
                    u(K)
                }
            };
            out.push(case(
                &format!("{prefix}{n}"),
                vec![slot(2, K), slot(1, K), slot(0, F), slot(w_level, K)],
                pairs(4).map(|(s, t)| entry(s, t)).collect(),
                claim,
                Stated,
            ));
        }
    }

    // X, Y above Z, W; entries are (XW and YW, ZW)
    let c4e = [
        ("e1", K, LOWER_IN_FLIPPED, "j"),
        ("e2", K, UPPER_IN_FLIPPED, "g"),
        ("e3", F, LOWER_IN_FLIPPED, "h"),
        ("e4", F, UPPER_IN_FLIPPED, "j"),
    ];
    for (id, upper, zw, claim) in c4e {
        out.push(case(
            &format!("C4:{id}"),
            vec![slot(1, K), slot(1, K), slot(0, K), slot(0, F)],
            vec![l(K, K), u(K), u(upper), u(K), u(upper), zw],
            claim,
            Stated,
        ));
    }

    for (id, b, claim) in [("C4:f1", K, "g"), ("C4:f2", F, "h")] {
        out.push(case(
            id,
            vec![slot(3, K), slot(2, K), slot(1, K), slot(0, F)],
            vec![u(K), u(K), u(b), u(K), u(b), u(b)],
            claim,
            Stated,
        ));
    }
    out
}

/// The record with the given id, e.g. `"C2:a2"`.
pub fn find_case(id: &str) -> Result<CaseRecord> {
    case_catalog()
        .into_iter()
        .find(|r| r.id.eq_ignore_ascii_case(id))
        .ok_or_else(|| Error::UnknownCase(id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::MoveTables;
    use std::sync::Arc;

    fn engine() -> Engine {
        Engine::with_tables(Arc::new(MoveTables::new()))
    }

    #[test]
    fn enumeration_counts() {
        let kf = Behavior::KEEP_FLIP;
        assert_eq!(enumerate_constellations(&[0, 0], &kf).unwrap().len(), 16);
        assert_eq!(enumerate_constellations(&[1, 0], &kf).unwrap().len(), 8);
        assert_eq!(enumerate_constellations(&[0], &kf).unwrap().len(), 2);
        assert_eq!(
            enumerate_constellations(&[0, 0, 0, 0], &kf),
            Err(Error::SizeLimit(4))
        );
    }

    #[test]
    fn placements_respect_levels() {
        let c = find_case("C2:b2").unwrap().constellation;
        // X is above Y, so X points must come last
        let ps = c.placements(2);
        assert_eq!(ps, vec![vec![0, 0], vec![1, 0], vec![1, 1]]);
        let g = OrderedGraph::empty(2);
        assert!(matches!(
            instantiate(&c, &[0, 1], &g),
            Err(Error::InconsistentPlacement(_))
        ));
    }

    #[test]
    fn instantiate_examples() {
        let a2 = find_case("C2:a2").unwrap().constellation;
        let g = OrderedGraph::empty(2);
        assert!(instantiate(&a2, &[0, 1], &g).unwrap().has_edge(0, 1));
        let keep = find_case("C2:a1").unwrap().constellation;
        let tri = OrderedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(instantiate(&keep, &[0, 1, 0], &tri).unwrap(), tri);
        let erad = Constellation::new(
            vec![Slot {
                level: 0,
                behavior: Behavior::EradicateEdges,
            }],
            vec![],
        )
        .unwrap();
        let full = OrderedGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert!(instantiate(&erad, &[0, 0, 0], &full)
            .unwrap()
            .edges()
            .is_empty());
    }

    #[test]
    fn compatibility_examples() {
        let e = engine();
        let a2 = find_case("C2:a2").unwrap().constellation;
        let keep = find_case("C2:a1").unwrap().constellation;
        let gs = |s: &str| s.parse::<GroupSpec>().unwrap();
        assert!(check_compatible(&e, &keep, GroupSpec::EMPTY, 4).unwrap());
        assert!(!check_compatible(&e, &a2, GroupSpec::EMPTY, 4).unwrap());
        assert!(check_compatible(&e, &a2, gs("d"), 4).unwrap());
        assert!(check_compatible(&e, &a2, gs("j"), 4).unwrap());
    }

    #[test]
    fn witness_examples() {
        let a2 = find_case("C2:a2").unwrap().constellation;
        let r = witness_generates(&a2, Some(GeneratorLabel::D), 3, 6).unwrap();
        assert!(r.success());
        assert_eq!(r.depth(), Some(1));
        let keep = find_case("C2:a1").unwrap().constellation;
        let r = witness_generates(&keep, Some(GeneratorLabel::J), 3, 6).unwrap();
        assert!(!r.success());
        assert!(matches!(
            witness_generates(&keep, Some(GeneratorLabel::A), 3, 2),
            Err(Error::NotConcrete('a'))
        ));
    }

    #[test]
    fn four_embedding_recipe_flips_one_pair() {
        for id in ["C2:a3", "C2:a4", "C2:a5"] {
            let c = find_case(id).unwrap().constellation;
            for (i, j) in pairs(4) {
                let recipe = four_embedding_recipe(4, i, j);
                assert_eq!(recipe.len(), 4);
                assert!(
                    replay(&c, &recipe, Target::Pair(i, j)).unwrap(),
                    "{id} {i}{j}"
                );
            }
        }
    }

    #[test]
    fn catalog_lookup() {
        assert_eq!(find_case("C2:a2").unwrap().claimed.to_string(), "d");
        assert_eq!(find_case("C4:a1").unwrap().claimed.to_string(), "g");
        assert_eq!(find_case("C3:b2").unwrap().claimed.to_string(), "j");
        assert!(matches!(find_case("C9:z1"), Err(Error::UnknownCase(_))));
        let ids: std::collections::HashSet<String> =
            case_catalog().into_iter().map(|r| r.id).collect();
        assert_eq!(ids.len(), case_catalog().len());
    }
}
