//! Orbits of generated groups on k-types, preservation tests and a
//! brute-force oracle on concrete graphs.
//!
//! Every generator family acts on k-types by maps whose inverses are again
//! moves of the same family, so the orbit of a type is the connected
//! component of the undirected move graph. A union-find over type codes
//! computes these components exactly. Taking the topological closure of the
//! generated group adds no new images of a fixed finite tuple, because the
//! orbit of a tuple is already reached at a finite stage.
//!
//! Groups are compared through their partitions at arities 1 to 5. For the
//! 44 groups studied here this separates everything (each is the
//! automorphism group of relations of arity at most 5), but the engine has
//! no way to certify that in general.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::structures::{
    build_bit_graph, check_arity, enumerate_ktypes, realize_type, type_count, type_of_tuple, KType,
    Relation, TypeSet, MAX_ARITY,
};
use crate::transforms::{
    concrete_transform, ConcreteParam, GeneratorLabel, MoveTable, MoveTables, Transformed,
};

/// Environment variable naming a directory for the on-disk partition cache.
pub const CACHE_ENV: &str = "REDUCTLAB_CACHE";

/// Union-find whose class representative is always the least element.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    pub fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    /// Merges the classes of `x` and `y`; returns whether they were distinct.
    pub fn union(&mut self, x: u32, y: u32) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        let (lo, hi) = (rx.min(ry), rx.max(ry));
        self.parent[hi as usize] = lo;
        true
    }

    fn into_reps(mut self) -> Vec<u32> {
        (0..self.parent.len() as u32)
            .map(|c| self.find(c))
            .collect()
    }
}

/// A set of generator labels, standing for the closed group they generate
/// together with `Aut(D;<,E)`. The empty set is that group itself.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupSpec(u16);

impl GroupSpec {
    pub const EMPTY: GroupSpec = GroupSpec(0);

    pub fn all() -> Self {
        GroupSpec((1 << GeneratorLabel::ALL.len()) - 1)
    }

    pub fn from_bits(bits: u16) -> Self {
        GroupSpec(bits & Self::all().0)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn single(label: GeneratorLabel) -> Self {
        GroupSpec(1 << label.index())
    }

    pub fn contains(self, label: GeneratorLabel) -> bool {
        self.0 >> label.index() & 1 == 1
    }

    pub fn with(self, label: GeneratorLabel) -> Self {
        GroupSpec(self.0 | 1 << label.index())
    }

    pub fn without(self, label: GeneratorLabel) -> Self {
        GroupSpec(self.0 & !(1 << label.index()))
    }

    pub fn union(self, other: Self) -> Self {
        GroupSpec(self.0 | other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn labels(self) -> impl Iterator<Item = GeneratorLabel> {
        GeneratorLabel::ALL
            .into_iter()
            .filter(move |l| self.contains(*l))
    }

    /// Every subset of `self`, in increasing bit order.
    pub fn subsets(self) -> impl Iterator<Item = GroupSpec> {
        let full = self.0 as u32;
        (0..=full)
            .filter(move |s| s & !full == 0)
            .map(|s| GroupSpec(s as u16))
    }
}

impl FromIterator<GeneratorLabel> for GroupSpec {
    fn from_iter<I: IntoIterator<Item = GeneratorLabel>>(iter: I) -> Self {
        iter.into_iter().fold(GroupSpec::EMPTY, GroupSpec::with)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        for l in self.labels() {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSpec({self})")
    }
}

impl serde::Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Letters `a`..`k` in any order; `∅`, `-` or the empty string for the bottom.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "" | "∅" | "-" | "{}") {
            return Ok(GroupSpec::EMPTY);
        }
        s.chars()
            .filter(|c| !matches!(c, ',' | ' ' | '{' | '}'))
            .map(GeneratorLabel::from_char)
            .collect()
    }
}

/// Orbits of a group on the k-types, as a least-element representative per code.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OrbitPartition {
    arity: usize,
    rep: Vec<u32>,
    classes: usize,
}

impl fmt::Debug for OrbitPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "OrbitPartition(arity {}, {} classes)",
            self.arity, self.classes
        )
    }
}

impl OrbitPartition {
    pub fn discrete(k: usize) -> Result<Self> {
        check_arity(k)?;
        Ok(Self::from_reps(k, (0..type_count(k) as u32).collect()))
    }

    fn from_reps(arity: usize, rep: Vec<u32>) -> Self {
        let classes = rep
            .iter()
            .enumerate()
            .filter(|&(c, &r)| c as u32 == r)
            .count();
        Self {
            arity,
            rep,
            classes,
        }
    }

    fn from_union_find(arity: usize, uf: UnionFind) -> Self {
        Self::from_reps(arity, uf.into_reps())
    }

    /// Builds a partition from an explicit list of blocks; codes not listed stay singletons.
    pub fn from_blocks(k: usize, blocks: &[Vec<u32>]) -> Result<Self> {
        check_arity(k)?;
        let n = type_count(k);
        let mut uf = UnionFind::new(n);
        for block in blocks {
            for &c in block {
                if c as usize >= n {
                    return Err(Error::InvalidCode { code: c, arity: k });
                }
                uf.union(block[0], c);
            }
        }
        Ok(Self::from_union_find(k, uf))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn rep(&self, code: u32) -> u32 {
        self.rep[code as usize]
    }

    pub fn reps(&self) -> &[u32] {
        &self.rep
    }

    pub fn same_block(&self, x: u32, y: u32) -> bool {
        self.rep[x as usize] == self.rep[y as usize]
    }

    /// Blocks with sorted members, ordered by least member.
    pub fn blocks(&self) -> Vec<Vec<u32>> {
        let mut by_rep: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (c, &r) in self.rep.iter().enumerate() {
            by_rep.entry(r).or_default().push(c as u32);
        }
        by_rep.into_values().collect()
    }

    /// Whether every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &OrbitPartition) -> bool {
        self.arity == other.arity
            && self
                .rep
                .iter()
                .enumerate()
                .all(|(c, &r)| other.rep[c] == other.rep[r as usize])
    }

    /// Whether `set` is a union of blocks.
    pub fn is_union_of(&self, set: &TypeSet) -> bool {
        set.arity() == self.arity
            && self
                .rep
                .iter()
                .enumerate()
                .all(|(c, &r)| set.contains(c as u32) == set.contains(r))
    }

    /// The finest common coarsening.
    pub fn join(&self, other: &OrbitPartition) -> OrbitPartition {
        assert_eq!(
            self.arity, other.arity,
            "join of partitions of different arity"
        );
        let mut uf = UnionFind::new(self.rep.len());
        for c in 0..self.rep.len() {
            uf.union(c as u32, self.rep[c]);
            uf.union(c as u32, other.rep[c]);
        }
        Self::from_union_find(self.arity, uf)
    }
}

/// Orbit partitions at arities `1..=max_arity`, the fingerprint of a group.
#[derive(Debug, Clone)]
pub struct GroupSignature {
    partitions: Vec<Arc<OrbitPartition>>,
}

impl GroupSignature {
    pub(crate) fn from_partitions(parts: Vec<OrbitPartition>) -> Self {
        Self {
            partitions: parts.into_iter().map(Arc::new).collect(),
        }
    }

    pub fn max_arity(&self) -> usize {
        self.partitions.len()
    }

    pub fn partition(&self, k: usize) -> &OrbitPartition {
        &self.partitions[k - 1]
    }

    pub fn class_counts(&self) -> Vec<usize> {
        self.partitions.iter().map(|p| p.class_count()).collect()
    }

    pub fn refines(&self, other: &GroupSignature) -> bool {
        self.partitions.len() == other.partitions.len()
            && self
                .partitions
                .iter()
                .zip(&other.partitions)
                .all(|(p, q)| p.refines(q))
    }

    pub fn preserves(&self, r: &Relation) -> bool {
        r.arity() <= self.max_arity() && self.partition(r.arity()).is_union_of(r.members())
    }
}

impl PartialEq for GroupSignature {
    fn eq(&self, other: &Self) -> bool {
        self.partitions.len() == other.partitions.len()
            && self
                .partitions
                .iter()
                .zip(&other.partitions)
                .all(|(p, q)| p.rep == q.rep)
    }
}

impl Eq for GroupSignature {}

impl Hash for GroupSignature {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for p in &self.partitions {
            p.rep.hash(state);
        }
    }
}

/// Memoizing orbit calculator over a fixed set of move tables.
pub struct Engine {
    tables: Arc<MoveTables>,
    memo: Mutex<HashMap<(GroupSpec, usize), Arc<OrbitPartition>>>,
    cache_dir: Option<PathBuf>,
    max_arity: usize,
}

impl fmt::Debug for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Engine")
            .field("corruption", &self.tables.corruption())
            .field("cache_dir", &self.cache_dir)
            .field("max_arity", &self.max_arity)
            .finish()
    }
}

impl Default for Engine {
    fn default() -> Self {
        Self::new()
    }
}

impl Engine {
    /// Engine with correct tables; uses the disk cache named by `REDUCTLAB_CACHE` if set.
    pub fn new() -> Self {
        let cache_dir = std::env::var_os(CACHE_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from);
        Self::with_tables(Arc::new(MoveTables::new())).with_cache_dir(cache_dir)
    }

    /// Engine over the given tables, without a disk cache.
    pub fn with_tables(tables: Arc<MoveTables>) -> Self {
        Self {
            tables,
            memo: Mutex::new(HashMap::new()),
            cache_dir: None,
            max_arity: MAX_ARITY,
        }
    }

    /// Sets the cache directory. Ignored for fault-injected tables so that a
    /// corrupted run can never poison or read the shared cache.
    pub fn with_cache_dir(mut self, dir: Option<PathBuf>) -> Self {
        self.cache_dir = if self.tables.corruption().is_some() {
            None
        } else {
            dir
        };
        self
    }

    /// Caps the arities used for signatures (default 5).
    pub fn with_max_arity(mut self, k: usize) -> Result<Self> {
        check_arity(k)?;
        self.max_arity = k;
        Ok(self)
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn tables(&self) -> &Arc<MoveTables> {
        &self.tables
    }

    pub fn orbit_partition(&self, gs: GroupSpec, k: usize) -> Result<Arc<OrbitPartition>> {
        check_arity(k)?;
        if let Some(p) = self.memo.lock().unwrap().get(&(gs, k)) {
            return Ok(p.clone());
        }
        let p = match self.load_cached(gs, k) {
            Some(p) => p,
            None => {
                let p = self.compute(gs, k)?;
                self.store_cached(gs, &p);
                p
            }
        };
        let p = Arc::new(p);
        Ok(self
            .memo
            .lock()
            .unwrap()
            .entry((gs, k))
            .or_insert(p)
            .clone())
    }

    fn compute(&self, gs: GroupSpec, k: usize) -> Result<OrbitPartition> {
        match gs.len() {
            0 => OrbitPartition::discrete(k),
            1 => Ok(self.label_partition(gs.labels().next().unwrap(), k)),
            _ => {
                let n = type_count(k);
                let mut uf = UnionFind::new(n);
                for l in gs.labels() {
                    let p = self.orbit_partition(GroupSpec::single(l), k)?;
                    for c in 0..n as u32 {
                        uf.union(c, p.rep(c));
                    }
                }
                Ok(OrbitPartition::from_union_find(k, uf))
            }
        }
    }

    fn label_partition(&self, label: GeneratorLabel, k: usize) -> OrbitPartition {
        let n = type_count(k);
        let mut uf = UnionFind::new(n);
        match &*self.tables.get(label, k) {
            MoveTable::Maps(maps) => {
                for (_, map) in maps {
                    for (c, &img) in map.iter().enumerate() {
                        uf.union(c as u32, img);
                    }
                }
            }
            MoveTable::Keys(keys) => {
                let mut first: HashMap<u32, u32> = HashMap::new();
                for (c, &key) in keys.iter().enumerate() {
                    let f = *first.entry(key).or_insert(c as u32);
                    uf.union(f, c as u32);
                }
            }
        }
        OrbitPartition::from_union_find(k, uf)
    }

    fn cache_path(dir: &Path, gs: GroupSpec, k: usize) -> PathBuf {
        let name = if gs.is_empty() {
            "bottom".to_string()
        } else {
            gs.to_string()
        };
        dir.join(format!("orbits-{name}-k{k}.bin"))
    }

    fn load_cached(&self, gs: GroupSpec, k: usize) -> Option<OrbitPartition> {
        let bytes = std::fs::read(Self::cache_path(self.cache_dir.as_ref()?, gs, k)).ok()?;
        let n = type_count(k);
        if bytes.len() != 4 * n {
            return None;
        }
        let rep: Vec<u32> = bytes
            .chunks_exact(4)
            .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        // accept only well-formed least-representative arrays
        let valid = rep
            .iter()
            .enumerate()
            .all(|(c, &r)| r as usize <= c && rep[r as usize] == r);
        valid.then(|| OrbitPartition::from_reps(k, rep))
    }

    fn store_cached(&self, gs: GroupSpec, p: &OrbitPartition) {
        let Some(dir) = &self.cache_dir else { return };
        if std::fs::create_dir_all(dir).is_err() {
            return;
        }
        let bytes: Vec<u8> = p.rep.iter().flat_map(|r| r.to_le_bytes()).collect();
        let path = Self::cache_path(dir, gs, p.arity);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        // a failed write only costs a recomputation later
        if std::fs::write(&tmp, bytes).is_ok() {
            let _ = std::fs::rename(&tmp, &path);
        }
    }

    pub fn signature(&self, gs: GroupSpec) -> Result<GroupSignature> {
        let partitions = (1..=self.max_arity)
            .into_par_iter()
            .map(|k| self.orbit_partition(gs, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupSignature { partitions })
    }

    pub fn preserves(&self, gs: GroupSpec, r: &Relation) -> Result<bool> {
        Ok(self
            .orbit_partition(gs, r.arity())?
            .is_union_of(r.members()))
    }

    /// Preservation checked move by move, without building any partition.
    pub fn preserves_direct(&self, gs: GroupSpec, r: &Relation) -> Result<bool> {
        let k = r.arity();
        check_arity(k)?;
        let members = r.members();
        for label in gs.labels() {
            let ok = match &*self.tables.get(label, k) {
                MoveTable::Maps(maps) => maps
                    .iter()
                    .all(|(_, map)| members.iter().all(|c| members.contains(map[c as usize]))),
                MoveTable::Keys(keys) => {
                    let inside: HashSet<u32> = members.iter().map(|c| keys[c as usize]).collect();
                    keys.iter()
                        .enumerate()
                        .all(|(c, key)| !inside.contains(key) || members.contains(c as u32))
                }
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// A pair of 5-types whose 4-subtype orbit data agree but which lie in
    /// different 5-orbits, or the other way round. `None` when 5-orbits are
    /// determined by the orbits of the five 4-subtuples.
    pub fn four_ary_counterexample(&self, gs: GroupSpec) -> Result<Option<(u32, u32)>> {
        let p4 = self.orbit_partition(gs, 4)?;
        let p5 = self.orbit_partition(gs, 5)?;
        let key = |c: u32| -> [u32; 5] {
            let t = KType::decode_unchecked(5, c);
            std::array::from_fn(|drop| {
                let positions: Vec<usize> = (0..5).filter(|&p| p != drop).collect();
                p4.rep(t.restrict(&positions).code())
            })
        };
        let mut by_key: HashMap<[u32; 5], u32> = HashMap::new();
        let mut by_block: HashMap<u32, [u32; 5]> = HashMap::new();
        for c in 0..type_count(5) as u32 {
            let kc = key(c);
            let block = p5.rep(c);
            let seen = *by_key.entry(kc).or_insert(c);
            if p5.rep(seen) != block {
                return Ok(Some((seen, c)));
            }
            let bk = *by_block.entry(block).or_insert(kc);
            if bk != kc {
                return Ok(Some((block, c)));
            }
        }
        Ok(None)
    }
}

fn concrete_params(label: GeneratorLabel, n: usize, tuple: &[usize]) -> Vec<ConcreteParam> {
    use GeneratorLabel::*;
    match label {
        A | C | E => vec![ConcreteParam::None],
        B | F | G | H => (0..=n).map(ConcreteParam::Cut).collect(),
        D => (0..1usize << tuple.len())
            .map(|s| {
                ConcreteParam::Subset(
                    (0..tuple.len())
                        .filter(|i| s >> i & 1 == 1)
                        .map(|i| tuple[i])
                        .collect(),
                )
            })
            .collect(),
        I | J | K => Vec::new(),
    }
}

/// Orbits computed by transforming a concrete host graph instead of types.
///
/// Every type is realized in `build_bit_graph(n)`, every concrete transform
/// of the listed labels is applied to the host, and the image tuple's type is
/// read off the transformed graph and realized in the host again. Types
/// reachable within `depth` such steps are merged. Only labels `a`..`h` have
/// concrete transforms.
pub fn oracle_orbits(gs: GroupSpec, k: usize, n: usize, depth: usize) -> Result<OrbitPartition> {
    check_arity(k)?;
    if let Some(l) = gs.labels().find(|l| l.is_grouping()) {
        return Err(Error::NotConcrete(l.as_char()));
    }
    let host = build_bit_graph(n);
    let types = enumerate_ktypes(k)?;
    let tuples = types
        .iter()
        .map(|t| realize_type(t, &host))
        .collect::<Result<Vec<_>>>()?;

    // transforms that do not depend on the tuple
    let mut fixed: Vec<Transformed> = Vec::new();
    for label in gs.labels().filter(|&l| l != GeneratorLabel::D) {
        for param in concrete_params(label, n, &[]) {
            fixed.push(concrete_transform(label, &param, &host)?);
        }
    }

    let step = |tuple: &Vec<usize>| -> Result<Vec<u32>> {
        let mut out = Vec::new();
        let mut push = |tr: &Transformed| -> Result<()> {
            out.push(type_of_tuple(&tr.graph, &tr.image(tuple))?.code());
            Ok(())
        };
        for tr in &fixed {
            push(tr)?;
        }
        if gs.contains(GeneratorLabel::D) {
            for param in concrete_params(GeneratorLabel::D, n, tuple) {
                push(&concrete_transform(GeneratorLabel::D, &param, &host)?)?;
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    };
    let neighbours = tuples.par_iter().map(step).collect::<Result<Vec<_>>>()?;

    let mut uf = UnionFind::new(types.len());
    for start in 0..types.len() {
        let mut seen = vec![false; types.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([(start as u32, 0usize)]);
        while let Some((c, d)) = queue.pop_front() {
            uf.union(start as u32, c);
            if d == depth {
                continue;
            }
            for &next in &neighbours[c as usize] {
                if !seen[next as usize] {
                    seen[next as usize] = true;
                    queue.push_back((next, d + 1));
                }
            }
        }
    }
    Ok(OrbitPartition::from_union_find(k, uf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{named_relation, RelationName};
    use GeneratorLabel::*;

    fn gs(s: &str) -> GroupSpec {
        s.parse().unwrap()
    }

    #[test]
    fn union_find_keeps_least_root() {
        let mut uf = UnionFind::new(6);
        uf.union(5, 3);
        uf.union(3, 4);
        uf.union(4, 1);
        assert_eq!(uf.find(5), 1);
        assert!(!uf.union(1, 3));
        assert_eq!(uf.into_reps(), vec![0, 1, 2, 1, 1, 1]);
    }

    #[test]
    fn group_spec_text() {
        assert_eq!(gs("hgd").to_string(), "dgh");
        assert_eq!(gs("∅"), GroupSpec::EMPTY);
        assert_eq!(GroupSpec::EMPTY.to_string(), "∅");
        assert_eq!(GroupSpec::all().to_string(), "abcdefghijk");
        assert!(matches!(
            "az".parse::<GroupSpec>(),
            Err(Error::UnknownLabel(_))
        ));
        assert_eq!(gs("dg").subsets().count(), 4);
    }

    #[test]
    fn small_partitions() {
        let engine = Engine::with_tables(Arc::new(MoveTables::new()));
        assert_eq!(
            engine
                .orbit_partition(GroupSpec::EMPTY, 2)
                .unwrap()
                .class_count(),
            4
        );
        let c = engine.orbit_partition(GroupSpec::single(C), 2).unwrap();
        assert_eq!(c.blocks(), vec![vec![0, 1], vec![2, 3]]);
        let top = engine.orbit_partition(GroupSpec::all(), 2).unwrap();
        assert_eq!(top.class_count(), 1);
        assert!(matches!(
            engine.orbit_partition(GroupSpec::EMPTY, 6),
            Err(Error::InvalidArity(6))
        ));
    }

    #[test]
    fn preservation_examples() {
        let engine = Engine::with_tables(Arc::new(MoveTables::new()));
        let rel = |n| named_relation(n, None).unwrap();
        let p = |g: &str, n| engine.preserves(gs(g), &rel(n)).unwrap();
        assert!(p("a", RelationName::E));
        assert!(!p("a", RelationName::Lt));
        assert!(p("g", RelationName::R3l));
        assert!(!p("j", RelationName::R3l));
        assert!(p("d", RelationName::R3));
        assert!(!p("d", RelationName::R4));
        for name in RelationName::ALL
            .into_iter()
            .filter(|&n| n != RelationName::SD)
        {
            assert!(engine.preserves(GroupSpec::EMPTY, &rel(name)).unwrap());
        }
    }

    #[test]
    fn direct_check_agrees_on_named_relations() {
        let engine = Engine::with_tables(Arc::new(MoveTables::new()));
        for name in RelationName::ALL
            .into_iter()
            .filter(|&n| n != RelationName::SD)
        {
            let r = named_relation(name, None).unwrap();
            for l in GeneratorLabel::ALL {
                let g = GroupSpec::single(l);
                assert_eq!(
                    engine.preserves(g, &r).unwrap(),
                    engine.preserves_direct(g, &r).unwrap(),
                    "{l} on {name}"
                );
            }
        }
    }

    #[test]
    fn signatures() {
        let engine = Engine::with_tables(Arc::new(MoveTables::new()));
        let bottom = engine.signature(GroupSpec::EMPTY).unwrap();
        assert_eq!(bottom.class_counts(), vec![1, 4, 48, 1536, 122880]);
        assert_eq!(
            engine.signature(gs("gh")).unwrap(),
            engine.signature(gs("cdgh")).unwrap()
        );
        assert_ne!(
            engine.signature(gs("a")).unwrap(),
            engine.signature(gs("e")).unwrap()
        );
    }

    #[test]
    fn corrupted_label_acts_trivially() {
        let engine = Engine::with_tables(Arc::new(MoveTables::corrupted(C)));
        assert_eq!(
            engine
                .orbit_partition(GroupSpec::single(C), 2)
                .unwrap()
                .class_count(),
            4
        );
        let cached = Engine::with_tables(Arc::new(MoveTables::corrupted(C)))
            .with_cache_dir(Some(PathBuf::from("/nonexistent")));
        assert!(cached.cache_dir.is_none());
    }

    #[test]
    fn disk_cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("reductlab-cache-{}", std::process::id()));
        let first =
            Engine::with_tables(Arc::new(MoveTables::new())).with_cache_dir(Some(dir.clone()));
        let p = first.orbit_partition(gs("dg"), 3).unwrap();
        assert!(Engine::cache_path(&dir, gs("dg"), 3).exists());
        let second =
            Engine::with_tables(Arc::new(MoveTables::new())).with_cache_dir(Some(dir.clone()));
        assert_eq!(*second.orbit_partition(gs("dg"), 3).unwrap(), *p);
        // a damaged file is ignored
        std::fs::write(Engine::cache_path(&dir, gs("c"), 2), [9u8; 16]).unwrap();
        let third =
            Engine::with_tables(Arc::new(MoveTables::new())).with_cache_dir(Some(dir.clone()));
        assert_eq!(third.orbit_partition(gs("c"), 2).unwrap().class_count(), 2);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn oracle_small_cases() {
        let engine = Engine::with_tables(Arc::new(MoveTables::new()));
        assert_eq!(
            oracle_orbits(gs("c"), 2, 16, 3).unwrap(),
            *engine.orbit_partition(gs("c"), 2).unwrap()
        );
        assert_eq!(
            oracle_orbits(GroupSpec::EMPTY, 3, 16, 0).unwrap(),
            OrbitPartition::discrete(3).unwrap()
        );
        assert_eq!(
            oracle_orbits(gs("gh"), 2, 16, 4).unwrap(),
            *engine.orbit_partition(gs("cdgh"), 2).unwrap()
        );
        assert_eq!(
            oracle_orbits(gs("i"), 2, 16, 1),
            Err(Error::NotConcrete('i'))
        );
        assert_eq!(
            oracle_orbits(gs("a"), 4, 16, 1),
            Err(Error::HostTooSmall(4))
        );
    }
}
