//! Finite ordered graphs, k-types and the named relations of the catalog.
//!
//! A k-type is the quantifier-free data of a tuple of `k` distinct points:
//! the relative order of the entries and the graph induced on them. Since
//! the random ordered graph is homogeneous, this data is the complete type
//! of the tuple, so every invariant relation is a set of type codes.
//!
//! Type codes are `perm_index(ranks) * 2^C(k,2) + adj_bits`, where
//! `perm_index` is the lexicographic rank of the order pattern and pair
//! `(i, j)`, `i < j`, occupies bit `pair_index(i, j, k)` of `adj_bits`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ARITY: usize = 5;

const FACTORIAL: [u32; 6] = [1, 1, 2, 6, 24, 120];

pub fn num_pairs(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Lexicographic index of the pair `(i, j)`, `i < j`, among all pairs of `0..k`.
pub fn pair_index(i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i < j && j < k);
    i * (2 * k - i - 1) / 2 + (j - i - 1)
}

/// All pairs `(i, j)` with `i < j < k` in lexicographic order.
pub fn pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |i| (i + 1..k).map(move |j| (i, j)))
}

/// Number of k-types: `k! * 2^C(k,2)`.
pub fn type_count(k: usize) -> usize {
    FACTORIAL[k] as usize * (1usize << num_pairs(k))
}

pub fn check_arity(k: usize) -> Result<()> {
    if (1..=MAX_ARITY).contains(&k) {
        Ok(())
    } else {
        Err(Error::InvalidArity(k))
    }
}

fn perm_index(perm: &[u8]) -> u32 {
    let k = perm.len();
    let mut index = 0;
    for i in 0..k {
        let smaller_later = perm[i + 1..].iter().filter(|&&p| p < perm[i]).count() as u32;
        index += smaller_later * FACTORIAL[k - 1 - i];
    }
    index
}

fn perm_unrank(k: usize, mut index: u32) -> [u8; MAX_ARITY] {
    let mut pool: Vec<u8> = (0..k as u8).collect();
    let mut out = [0u8; MAX_ARITY];
    for (i, slot) in out.iter_mut().enumerate().take(k) {
        let f = FACTORIAL[k - 1 - i];
        let pick = (index / f) as usize;
        index %= f;
        *slot = pool.remove(pick);
    }
    out
}

/// The order-and-graph type of a tuple of distinct points.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KType {
    k: u8,
    ranks: [u8; MAX_ARITY],
    adj: u16,
}

impl KType {
    /// Builds a type from its order pattern and adjacency bits.
    pub fn new(ranks: &[u8], adj: u16) -> Result<Self> {
        let k = ranks.len();
        check_arity(k)?;
        let mut seen = [false; MAX_ARITY];
        for &r in ranks {
            if r as usize >= k || seen[r as usize] {
                return Err(Error::ParamOutOfRange {
                    what: "rank permutation".into(),
                    param: r as usize,
                });
            }
            seen[r as usize] = true;
        }
        if (adj as u32) >> num_pairs(k) != 0 {
            return Err(Error::ParamOutOfRange {
                what: "adjacency bits".into(),
                param: adj as usize,
            });
        }
        let mut r = [0u8; MAX_ARITY];
        r[..k].copy_from_slice(ranks);
        Ok(Self {
            k: k as u8,
            ranks: r,
            adj,
        })
    }

    /// Builds a type from its order pattern and a list of position pairs that are edges.
    pub fn with_edges(ranks: &[u8], edges: &[(usize, usize)]) -> Result<Self> {
        let k = ranks.len();
        let mut adj = 0u16;
        for &(i, j) in edges {
            let (i, j) = (i.min(j), i.max(j));
            if i == j || j >= k {
                return Err(Error::ParamOutOfRange {
                    what: "edge position".into(),
                    param: j,
                });
            }
            adj |= 1 << pair_index(i, j, k);
        }
        Self::new(ranks, adj)
    }

    pub fn decode(k: usize, code: u32) -> Result<Self> {
        check_arity(k)?;
        if code as usize >= type_count(k) {
            return Err(Error::InvalidCode { code, arity: k });
        }
        Ok(Self::decode_unchecked(k, code))
    }

    pub(crate) fn decode_unchecked(k: usize, code: u32) -> Self {
        let bits = num_pairs(k);
        Self {
            k: k as u8,
            ranks: perm_unrank(k, code >> bits),
            adj: (code & ((1u32 << bits) - 1)) as u16,
        }
    }

    pub fn code(&self) -> u32 {
        (perm_index(self.ranks()) << num_pairs(self.arity())) | self.adj as u32
    }

    pub fn arity(&self) -> usize {
        self.k as usize
    }

    pub fn ranks(&self) -> &[u8] {
        &self.ranks[..self.k as usize]
    }

    pub fn rank(&self, position: usize) -> usize {
        self.ranks[position] as usize
    }

    pub fn adj_bits(&self) -> u16 {
        self.adj
    }

    pub fn less(&self, p: usize, q: usize) -> bool {
        self.ranks[p] < self.ranks[q]
    }

    pub fn edge(&self, p: usize, q: usize) -> bool {
        if p == q {
            return false;
        }
        let (i, j) = (p.min(q), p.max(q));
        self.adj >> pair_index(i, j, self.arity()) & 1 == 1
    }

    pub fn edge_count(&self) -> u32 {
        self.adj.count_ones()
    }

    /// Tournament arrow `p -> q`: `p < q` exactly when `{p, q}` is an edge.
    pub fn arrow(&self, p: usize, q: usize) -> bool {
        p != q && self.less(p, q) == self.edge(p, q)
    }

    pub fn with_ranks(&self, ranks: &[u8]) -> Self {
        let mut t = *self;
        t.ranks[..ranks.len()].copy_from_slice(ranks);
        t
    }

    pub fn with_adj(&self, adj: u16) -> Self {
        Self { adj, ..*self }
    }

    /// The type of the rearranged tuple `b` with `b[i] = a[sigma[i]]`.
    pub fn rearrange(&self, sigma: &[usize]) -> Self {
        let k = self.arity();
        debug_assert_eq!(sigma.len(), k);
        let mut ranks = [0u8; MAX_ARITY];
        for i in 0..k {
            ranks[i] = self.ranks[sigma[i]];
        }
        let mut adj = 0u16;
        for (i, j) in pairs(k) {
            if self.edge(sigma[i], sigma[j]) {
                adj |= 1 << pair_index(i, j, k);
            }
        }
        Self {
            k: self.k,
            ranks,
            adj,
        }
    }

    /// The type of the subtuple at `positions` (kept in the given order).
    pub fn restrict(&self, positions: &[usize]) -> Self {
        let m = positions.len();
        let mut ranks = [0u8; MAX_ARITY];
        for (i, &p) in positions.iter().enumerate() {
            ranks[i] = positions
                .iter()
                .filter(|&&q| self.ranks[q] < self.ranks[p])
                .count() as u8;
        }
        let mut adj = 0u16;
        for (i, j) in pairs(m) {
            if self.edge(positions[i], positions[j]) {
                adj |= 1 << pair_index(i, j, m);
            }
        }
        Self {
            k: m as u8,
            ranks,
            adj,
        }
    }

    /// The ordered graph realizing this type, vertices listed in increasing order.
    /// Tuple position `p` is vertex `rank(p)`.
    pub fn pattern(&self) -> OrderedGraph {
        let k = self.arity();
        let mut g = OrderedGraph::empty(k);
        for (i, j) in pairs(k) {
            if self.edge(i, j) {
                g.set_edge(self.rank(i), self.rank(j), true);
            }
        }
        g
    }
}

impl fmt::Display for KType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ranks: Vec<String> = self.ranks().iter().map(|r| r.to_string()).collect();
        let bits: String = pairs(self.arity())
            .map(|(i, j)| if self.edge(i, j) { '1' } else { '0' })
            .collect();
        write!(f, "ranks=({});adj={}", ranks.join(","), bits)
    }
}

impl fmt::Debug for KType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KType({self})")
    }
}

impl FromStr for KType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParamOutOfRange {
            what: format!("type text {s:?}"),
            param: 0,
        };
        let (ranks_part, adj_part) = s.split_once(';').ok_or_else(bad)?;
        let inner = ranks_part
            .strip_prefix("ranks=(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let ranks: Vec<u8> = inner
            .split(',')
            .map(|r| r.trim().parse::<u8>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let bits = adj_part.strip_prefix("adj=").ok_or_else(bad)?;
        let k = ranks.len();
        if bits.len() != num_pairs(k) {
            return Err(bad());
        }
        let mut adj = 0u16;
        for (p, c) in bits.chars().enumerate() {
            match c {
                '1' => adj |= 1 << p,
                '0' => {}
                _ => return Err(bad()),
            }
        }
        Self::new(&ranks, adj)
    }
}

/// All k-types in increasing code order.
pub fn enumerate_ktypes(k: usize) -> Result<Vec<KType>> {
    check_arity(k)?;
    Ok((0..type_count(k) as u32)
        .map(|c| KType::decode_unchecked(k, c))
        .collect())
}

/// A finite graph on `0..n` ordered by the integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OrderedGraph {
    n: usize,
    adj: Vec<bool>,
}

impl OrderedGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adj: vec![false; n * n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::DuplicateEntry(u));
            }
            g.set_edge(u, v, true);
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    pub fn set_edge(&mut self, u: usize, v: usize, on: bool) {
        if u == v {
            return;
        }
        self.adj[u * self.n + v] = on;
        self.adj[v * self.n + u] = on;
    }

    pub fn flip_edge(&mut self, u: usize, v: usize) {
        let on = self.has_edge(u, v);
        self.set_edge(u, v, !on);
    }

    pub fn complement(&self) -> Self {
        let mut g = self.clone();
        for (u, v) in pairs(self.n) {
            g.flip_edge(u, v);
        }
        g
    }

    /// Edges `(u, v)` with `u < v`, lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        pairs(self.n)
            .filter(|&(u, v)| self.has_edge(u, v))
            .collect()
    }

    /// Adjacency packed as lexicographic pair bits (only for small graphs).
    pub fn pair_bits(&self) -> u64 {
        debug_assert!(num_pairs(self.n) <= 64);
        pairs(self.n)
            .enumerate()
            .filter(|&(_, (u, v))| self.has_edge(u, v))
            .fold(0u64, |acc, (p, _)| acc | 1 << p)
    }

    pub fn from_pair_bits(n: usize, bits: u64) -> Self {
        let mut g = Self::empty(n);
        for (p, (u, v)) in pairs(n).enumerate() {
            if bits >> p & 1 == 1 {
                g.set_edge(u, v, true);
            }
        }
        g
    }

    /// Induced subgraph on `vertices`, which must be increasing.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut g = Self::empty(vertices.len());
        for (i, j) in pairs(vertices.len()) {
            if self.has_edge(vertices[i], vertices[j]) {
                g.set_edge(i, j, true);
            }
        }
        g
    }
}

impl fmt::Debug for OrderedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrderedGraph(n={}, edges={:?})", self.n, self.edges())
    }
}

/// The type of the tuple `t` in `g`.
pub fn type_of_tuple(g: &OrderedGraph, t: &[usize]) -> Result<KType> {
    check_arity(t.len())?;
    for (i, &v) in t.iter().enumerate() {
        if v >= g.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: g.n });
        }
        if t[..i].contains(&v) {
            return Err(Error::DuplicateEntry(v));
        }
    }
    let k = t.len();
    let mut ranks = [0u8; MAX_ARITY];
    for i in 0..k {
        ranks[i] = t.iter().filter(|&&w| w < t[i]).count() as u8;
    }
    let mut adj = 0u16;
    for (i, j) in pairs(k) {
        if g.has_edge(t[i], t[j]) {
            adj |= 1 << pair_index(i, j, k);
        }
    }
    Ok(KType {
        k: k as u8,
        ranks,
        adj,
    })
}

/// Deterministic host: `i ~ j` for `i < j` iff bit `i` of `j` is set.
///
/// Every ordered graph on at most 4 vertices embeds into the host on 16 vertices.
pub fn build_bit_graph(n: usize) -> OrderedGraph {
    let mut g = OrderedGraph::empty(n);
    for j in 0..n {
        for i in 0..j.min(usize::BITS as usize) {
            if j >> i & 1 == 1 {
                g.set_edge(i, j, true);
            }
        }
    }
    g
}

/// Lexicographically least increasing map of `pattern` into `host` that
/// preserves edges and non-edges.
pub fn embed_pattern(pattern: &OrderedGraph, host: &OrderedGraph) -> Option<Vec<usize>> {
    fn extend(pattern: &OrderedGraph, host: &OrderedGraph, image: &mut Vec<usize>) -> bool {
        let m = image.len();
        if m == pattern.len() {
            return true;
        }
        let start = image.last().map_or(0, |&v| v + 1);
        let remaining = pattern.len() - m;
        for v in start..=host.len().saturating_sub(remaining) {
            if (0..m).all(|i| pattern.has_edge(i, m) == host.has_edge(image[i], v)) {
                image.push(v);
                if extend(pattern, host, image) {
                    return true;
                }
                image.pop();
            }
        }
        false
    }
    if pattern.len() > host.len() {
        return None;
    }
    let mut image = Vec::with_capacity(pattern.len());
    extend(pattern, host, &mut image).then_some(image)
}

/// A host tuple of type `t`, found through the least embedding of its pattern.
pub fn realize_type(t: &KType, host: &OrderedGraph) -> Result<Vec<usize>> {
    let image = embed_pattern(&t.pattern(), host).ok_or(Error::HostTooSmall(t.arity()))?;
    Ok((0..t.arity()).map(|p| image[t.rank(p)]).collect())
}

/// A set of type codes of one arity, stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TypeSet {
    arity: usize,
    words: Vec<u64>,
}

impl fmt::Debug for TypeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TypeSet(arity {}, {:?})",
            self.arity,
            self.iter().collect::<Vec<_>>()
        )
    }
}

impl TypeSet {
    pub fn empty(arity: usize) -> Self {
        Self {
            arity,
            words: vec![0; type_count(arity).div_ceil(64)],
        }
    }

    pub fn from_codes(arity: usize, codes: impl IntoIterator<Item = u32>) -> Self {
        let mut s = Self::empty(arity);
        for c in codes {
            s.insert(c);
        }
        s
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn insert(&mut self, code: u32) {
        self.words[code as usize / 64] |= 1 << (code % 64);
    }

    pub fn contains(&self, code: u32) -> bool {
        self.words[code as usize / 64] >> (code % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| (i * 64 + b) as u32)
        })
    }

    pub fn union_with(&mut self, other: &TypeSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }
}

/// The relation names used across the catalog, in preservation-table column order
/// followed by the auxiliary relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationName {
    E,
    R3,
    R4,
    R5,
    Lt,
    Betw,
    Cycl,
    Sep,
    T,
    BetwT,
    CyclT,
    SepT,
    R3l,
    R3u,
    SD,
    N,
}

/// Columns of the preservation table, in order.
pub const TABLE_COLUMNS: [RelationName; 15] = [
    RelationName::E,
    RelationName::R3,
    RelationName::R4,
    RelationName::R5,
    RelationName::Lt,
    RelationName::Betw,
    RelationName::Cycl,
    RelationName::Sep,
    RelationName::T,
    RelationName::BetwT,
    RelationName::CyclT,
    RelationName::SepT,
    RelationName::R3l,
    RelationName::R3u,
    RelationName::SD,
];

impl RelationName {
    pub const ALL: [RelationName; 16] = [
        RelationName::E,
        RelationName::R3,
        RelationName::R4,
        RelationName::R5,
        RelationName::Lt,
        RelationName::Betw,
        RelationName::Cycl,
        RelationName::Sep,
        RelationName::T,
        RelationName::BetwT,
        RelationName::CyclT,
        RelationName::SepT,
        RelationName::R3l,
        RelationName::R3u,
        RelationName::SD,
        RelationName::N,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationName::E => "E",
            RelationName::R3 => "R3",
            RelationName::R4 => "R4",
            RelationName::R5 => "R5",
            RelationName::Lt => "<",
            RelationName::Betw => "Betw",
            RelationName::Cycl => "Cycl",
            RelationName::Sep => "Sep",
            RelationName::T => "T",
            RelationName::BetwT => "BetwT",
            RelationName::CyclT => "CyclT",
            RelationName::SepT => "SepT",
            RelationName::R3l => "R3l",
            RelationName::R3u => "R3u",
            RelationName::SD => "SD",
            RelationName::N => "N",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            RelationName::E | RelationName::Lt | RelationName::N | RelationName::T => 2,
            RelationName::R3
            | RelationName::Betw
            | RelationName::Cycl
            | RelationName::BetwT
            | RelationName::CyclT
            | RelationName::R3l
            | RelationName::R3u => 3,
            RelationName::R4 | RelationName::Sep | RelationName::SepT | RelationName::SD => 4,
            RelationName::R5 => 5,
        }
    }
}

impl fmt::Display for RelationName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let name = match s {
            "Lt" | "lt" => return Ok(RelationName::Lt),
            "Cyc" => return Ok(RelationName::Cycl),
            "CycT" => return Ok(RelationName::CyclT),
            other => other,
        };
        RelationName::ALL
            .into_iter()
            .find(|r| r.as_str() == name)
            .ok_or_else(|| Error::UnknownRelation(s.to_string()))
    }
}

/// A relation given extensionally as a set of k-types.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "RelationJson", try_from = "RelationJson")]
pub struct Relation {
    name: String,
    members: TypeSet,
}

#[derive(Serialize, Deserialize)]
struct RelationJson {
    name: String,
    arity: usize,
    members: Vec<u32>,
}

impl From<Relation> for RelationJson {
    fn from(r: Relation) -> Self {
        RelationJson {
            arity: r.arity(),
            members: r.members.iter().collect(),
            name: r.name,
        }
    }
}

impl TryFrom<RelationJson> for Relation {
    type Error = Error;

    fn try_from(j: RelationJson) -> Result<Self> {
        check_arity(j.arity)?;
        let limit = type_count(j.arity) as u32;
        if let Some(&bad) = j.members.iter().find(|&&c| c >= limit) {
            return Err(Error::InvalidCode {
                code: bad,
                arity: j.arity,
            });
        }
        Ok(Relation {
            name: j.name,
            members: TypeSet::from_codes(j.arity, j.members),
        })
    }
}

impl Relation {
    pub fn new(name: impl Into<String>, members: TypeSet) -> Self {
        Self {
            name: name.into(),
            members,
        }
    }

    /// All k-types satisfying `pred`.
    pub fn from_predicate(
        name: impl Into<String>,
        k: usize,
        pred: impl Fn(&KType) -> bool,
    ) -> Self {
        let members = TypeSet::from_codes(
            k,
            (0..type_count(k) as u32).filter(|&c| pred(&KType::decode_unchecked(k, c))),
        );
        Self::new(name, members)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.members.arity()
    }

    pub fn members(&self) -> &TypeSet {
        &self.members
    }

    pub fn contains(&self, t: &KType) -> bool {
        t.arity() == self.arity() && self.members.contains(t.code())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Whether membership is invariant under rearranging arguments by `sigma`.
    pub fn is_closed_under(&self, sigma: &[usize]) -> bool {
        let k = self.arity();
        self.members.iter().all(|c| {
            self.members
                .contains(KType::decode_unchecked(k, c).rearrange(sigma).code())
        })
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Relation({}, arity {}, {} types)",
            self.name,
            self.arity(),
            self.len()
        )
    }
}

fn cycl(t: &KType, x: usize, y: usize, z: usize) -> bool {
    (t.less(x, y) && t.less(y, z))
        || (t.less(y, z) && t.less(z, x))
        || (t.less(z, x) && t.less(x, y))
}

fn odd_edges(t: &KType) -> bool {
    t.edge_count() % 2 == 1
}

/// The relation `name`, evaluated on every type of its arity.
/// `SD` is the dihedral closure of the supplied 4-ary base relation.
pub fn named_relation(name: RelationName, s4: Option<&Relation>) -> Result<Relation> {
    use RelationName::*;
    let k = name.arity();
    let label = name.as_str();
    let rel = match name {
        E => Relation::from_predicate(label, k, |t| t.edge(0, 1)),
        Lt => Relation::from_predicate(label, k, |t| t.less(0, 1)),
        N => Relation::from_predicate(label, k, |t| !t.edge(0, 1)),
        T => Relation::from_predicate(label, k, |t| t.arrow(0, 1)),
        Betw => Relation::from_predicate(label, k, |t| {
            (t.less(0, 1) && t.less(1, 2)) || (t.less(2, 1) && t.less(1, 0))
        }),
        Cycl => Relation::from_predicate(label, k, |t| cycl(t, 0, 1, 2)),
        Sep => Relation::from_predicate(label, k, |t| {
            (cycl(t, 0, 1, 2) && cycl(t, 0, 3, 1)) || (cycl(t, 0, 2, 1) && cycl(t, 0, 1, 3))
        }),
        R3 | R4 | R5 => Relation::from_predicate(label, k, odd_edges),
        BetwT => Relation::from_predicate(label, k, |t| {
            (t.arrow(0, 1) && t.arrow(1, 2) && t.arrow(2, 0))
                || (t.arrow(2, 1) && t.arrow(1, 0) && t.arrow(0, 2))
        }),
        CyclT => Relation::from_predicate(label, k, |t| {
            (t.arrow(0, 1) && t.arrow(1, 2) && t.arrow(2, 0))
                || (t.arrow(0, 2) && t.arrow(2, 1) && t.arrow(0, 1))
                || (t.arrow(1, 0) && t.arrow(0, 2) && t.arrow(1, 2))
                || (t.arrow(2, 1) && t.arrow(1, 0) && t.arrow(2, 0))
        }),
        SepT => Relation::from_predicate(label, k, |t| {
            let count = [(0, 2), (0, 3), (1, 2), (1, 3)]
                .iter()
                .filter(|&&(p, q)| t.arrow(p, q))
                .count();
            count % 2 == 0
        }),
        R3l => Relation::from_predicate(label, k, |t| {
            t.ranks() == [0, 1, 2] && t.edge(0, 2) == t.edge(1, 2)
        }),
        R3u => Relation::from_predicate(label, k, |t| {
            t.ranks() == [0, 1, 2] && t.edge(0, 2) == t.edge(0, 1)
        }),
        SD => {
            let base = s4.ok_or_else(|| Error::MissingBaseRelation("SD".into()))?;
            dihedral_closure(base)?.renamed(label)
        }
    };
    Ok(rel)
}

/// The eight symmetries of the square 0-1-2-3 as argument permutations.
pub fn dihedral_permutations() -> [[usize; 4]; 8] {
    std::array::from_fn(|p| {
        let m = p % 4;
        if p < 4 {
            std::array::from_fn(|i| (i + m) % 4)
        } else {
            std::array::from_fn(|i| (m + 4 - i) % 4)
        }
    })
}

/// Union of the argument-permuted copies `r^sigma` over the dihedral group.
pub fn dihedral_closure(r: &Relation) -> Result<Relation> {
    if r.arity() != 4 {
        return Err(Error::ArityMismatch {
            expected: 4,
            found: r.arity(),
        });
    }
    let mut members = TypeSet::empty(4);
    for sigma in dihedral_permutations() {
        for c in 0..type_count(4) as u32 {
            let t = KType::decode_unchecked(4, c);
            if r.members.contains(t.rearrange(&sigma).code()) {
                members.insert(c);
            }
        }
    }
    Ok(Relation::new(format!("D4({})", r.name()), members))
}

/// Codes of a relation, collected.
pub fn member_codes(r: &Relation) -> BTreeSet<u32> {
    r.members.iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_counts_match_formula() {
        let expected = [1, 4, 48, 1536, 122880];
        for k in 1..=5 {
            assert_eq!(enumerate_ktypes(k).unwrap().len(), expected[k - 1]);
        }
        assert_eq!(enumerate_ktypes(0), Err(Error::InvalidArity(0)));
        assert_eq!(enumerate_ktypes(6), Err(Error::InvalidArity(6)));
    }

    #[test]
    fn codes_round_trip_and_are_increasing() {
        for k in 1..=5 {
            for (i, t) in enumerate_ktypes(k).unwrap().iter().enumerate() {
                assert_eq!(t.code() as usize, i);
                assert_eq!(KType::decode(k, t.code()).unwrap(), *t);
            }
        }
    }

    #[test]
    fn pair_index_is_lexicographic() {
        for k in 1..=5 {
            for (p, (i, j)) in pairs(k).enumerate() {
                assert_eq!(pair_index(i, j, k), p);
            }
        }
    }

    #[test]
    fn type_of_tuple_examples() {
        let g = OrderedGraph::from_edges(8, &[(3, 7)]).unwrap();
        let t = type_of_tuple(&g, &[3, 7]).unwrap();
        assert_eq!(t.ranks(), [0, 1]);
        assert_eq!(t.adj_bits(), 1);
        let t = type_of_tuple(&g, &[7, 3]).unwrap();
        assert_eq!(t.ranks(), [1, 0]);
        assert_eq!(t.adj_bits(), 1);
        let e = OrderedGraph::empty(3);
        let t = type_of_tuple(&e, &[0, 1, 2]).unwrap();
        assert_eq!(t.to_string(), "ranks=(0,1,2);adj=000");
        assert_eq!(type_of_tuple(&g, &[3, 3]), Err(Error::DuplicateEntry(3)));
        assert_eq!(
            type_of_tuple(&g, &[3, 8]),
            Err(Error::VertexOutOfRange { vertex: 8, n: 8 })
        );
        assert_eq!(type_of_tuple(&g, &[]), Err(Error::InvalidArity(0)));
    }

    #[test]
    fn text_form_round_trips() {
        for t in enumerate_ktypes(4).unwrap() {
            let parsed: KType = t.to_string().parse().unwrap();
            assert_eq!(parsed, t);
        }
        assert!("ranks=(0,0);adj=1".parse::<KType>().is_err());
        assert!("ranks=(0,1);adj=11".parse::<KType>().is_err());
    }

    #[test]
    fn betw_is_monotone_triples() {
        let betw = named_relation(RelationName::Betw, None).unwrap();
        for t in enumerate_ktypes(3).unwrap() {
            let mono = t.ranks() == [0, 1, 2] || t.ranks() == [2, 1, 0];
            assert_eq!(betw.contains(&t), mono, "{t}");
        }
        assert_eq!(betw.len(), 16);
    }

    #[test]
    fn tournament_relation() {
        let t = named_relation(RelationName::T, None).unwrap();
        let up_edge = KType::with_edges(&[0, 1], &[(0, 1)]).unwrap();
        let down_non = KType::with_edges(&[1, 0], &[]).unwrap();
        assert!(t.contains(&up_edge));
        assert!(t.contains(&down_non));
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn r3_is_odd_edge_count() {
        let r3 = named_relation(RelationName::R3, None).unwrap();
        for t in enumerate_ktypes(3).unwrap() {
            assert_eq!(r3.contains(&t), matches!(t.edge_count(), 1 | 3));
        }
        assert_eq!(r3.len(), 6 * 4);
    }

    #[test]
    fn r3l_biconditional() {
        let r = named_relation(RelationName::R3l, None).unwrap();
        let inside = KType::with_edges(&[0, 1, 2], &[(0, 2), (1, 2)]).unwrap();
        let inside2 = KType::with_edges(&[0, 1, 2], &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let outside = KType::with_edges(&[0, 1, 2], &[(0, 2)]).unwrap();
        assert!(r.contains(&inside));
        assert!(r.contains(&inside2));
        assert!(!r.contains(&outside));
    }

    #[test]
    fn named_symmetries_hold() {
        let betw = named_relation(RelationName::Betw, None).unwrap();
        assert!(betw.is_closed_under(&[2, 1, 0]));
        for name in [RelationName::R3, RelationName::R4, RelationName::R5] {
            let r = named_relation(name, None).unwrap();
            let k = r.arity();
            for i in 0..k {
                for j in i + 1..k {
                    let mut sigma: Vec<usize> = (0..k).collect();
                    sigma.swap(i, j);
                    assert!(r.is_closed_under(&sigma), "{name} swap {i} {j}");
                }
            }
        }
        let sept = named_relation(RelationName::SepT, None).unwrap();
        assert!(sept.is_closed_under(&[1, 0, 2, 3]));
        assert!(sept.is_closed_under(&[0, 1, 3, 2]));
        let cycl = named_relation(RelationName::Cycl, None).unwrap();
        assert!(cycl.is_closed_under(&[1, 2, 0]));
        assert!(!cycl.is_closed_under(&[2, 1, 0]));
    }

    #[test]
    fn edge_and_non_edge_partition_pairs() {
        let e = named_relation(RelationName::E, None).unwrap();
        let n = named_relation(RelationName::N, None).unwrap();
        for t in enumerate_ktypes(2).unwrap() {
            assert!(e.contains(&t) ^ n.contains(&t));
        }
    }

    #[test]
    fn sd_needs_base() {
        assert_eq!(
            named_relation(RelationName::SD, None),
            Err(Error::MissingBaseRelation("SD".into()))
        );
    }

    #[test]
    fn dihedral_closure_properties() {
        let single = Relation::new("one", TypeSet::from_codes(4, [777]));
        let closed = dihedral_closure(&single).unwrap();
        assert!(closed.len() <= 8 && 8 % closed.len() == 0);
        assert_eq!(
            dihedral_closure(&closed).unwrap().members(),
            closed.members()
        );
        let r4 = named_relation(RelationName::R4, None).unwrap();
        assert_eq!(dihedral_closure(&r4).unwrap().members(), r4.members());
        // Sep is symmetric on the square x,u,y,v, not on 1,2,3,4
        let sep = named_relation(RelationName::Sep, None).unwrap();
        assert_ne!(dihedral_closure(&sep).unwrap().members(), sep.members());
        let betw = named_relation(RelationName::Betw, None).unwrap();
        assert!(matches!(
            dihedral_closure(&betw),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn bit_graph_small_cases() {
        let g = build_bit_graph(4);
        assert_eq!(g.edges(), vec![(0, 1), (0, 3), (1, 2), (1, 3)]);
        assert!(build_bit_graph(1).edges().is_empty());
    }

    #[test]
    fn embeddings() {
        let host = build_bit_graph(4);
        let edge = OrderedGraph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(embed_pattern(&edge, &host), Some(vec![0, 1]));
        let non_edge = OrderedGraph::empty(2);
        assert_eq!(embed_pattern(&non_edge, &host), Some(vec![0, 2]));
        assert_eq!(embed_pattern(&host, &host), Some(vec![0, 1, 2, 3]));
        let triangle = OrderedGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(embed_pattern(&triangle, &OrderedGraph::empty(6)), None);
    }

    #[test]
    fn bit_hosts_realize_small_types() {
        let host = build_bit_graph(16);
        for k in 1..=3 {
            for t in enumerate_ktypes(k).unwrap() {
                let tuple = realize_type(&t, &host).unwrap();
                assert_eq!(type_of_tuple(&host, &tuple).unwrap(), t);
            }
        }
        let fours = enumerate_ktypes(4).unwrap();
        assert!(fours.iter().any(|t| realize_type(t, &host).is_err()));
        assert!(fours
            .iter()
            .all(|t| realize_type(t, &build_bit_graph(51)).is_ok()));
        assert!(fours
            .iter()
            .any(|t| realize_type(t, &build_bit_graph(50)).is_err()));
    }

    #[test]
    fn relation_json_shape() {
        let t = named_relation(RelationName::T, None).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"name":"T","arity":2,"members":[1,2]}"#);
        let back: Relation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert!(
            serde_json::from_str::<Relation>(r#"{"name":"x","arity":2,"members":[4]}"#).is_err()
        );
    }
}
