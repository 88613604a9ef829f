//! The lattice of groups generated by the join-irreducibles `a`..`k`.
//!
//! A subset of labels is identified with the group it generates. Its ideal is
//! every label whose orbit partitions are refined by those of the subset, at
//! every arity up to the engine cap. Two subsets generate the same group
//! exactly when their ideals agree, which is how all 2048 subsets collapse to
//! the nodes of the lattice.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::orbits::{Engine, GroupSignature, GroupSpec, OrbitPartition, UnionFind};
use crate::structures::{
    dihedral_permutations, member_codes, named_relation, KType, Relation, RelationName, TypeSet,
    TABLE_COLUMNS,
};
use crate::transforms::GeneratorLabel;

const LABEL_COUNT: usize = 11;

/// A closed set of labels together with the signature of its join.
#[derive(Debug, Clone)]
pub struct Ideal {
    pub members: GroupSpec,
    pub signature: GroupSignature,
}

fn join_signature(
    engine: &Engine,
    base: &GroupSignature,
    label: GeneratorLabel,
) -> Result<GroupSignature> {
    let extra = engine.signature(GroupSpec::single(label))?;
    let parts = (1..=base.max_arity())
        .into_par_iter()
        .map(|k| base.partition(k).join(extra.partition(k)))
        .collect::<Vec<OrbitPartition>>();
    Ok(GroupSignature::from_partitions(parts))
}

/// Every label whose own orbits are refined by `sig`.
fn labels_below(engine: &Engine, sig: &GroupSignature) -> Result<GroupSpec> {
    let mut out = GroupSpec::EMPTY;
    for l in GeneratorLabel::ALL {
        if engine.signature(GroupSpec::single(l))?.refines(sig) {
            out = out.with(l);
        }
    }
    Ok(out)
}

/// The ideal of the group generated by `s`.
pub fn join_closure(engine: &Engine, s: GroupSpec) -> Result<Ideal> {
    let signature = engine.signature(s)?;
    let members = labels_below(engine, &signature)?.union(s);
    Ok(Ideal { members, signature })
}

/// One element of the lattice.
#[derive(Debug, Clone)]
pub struct LatticeNode {
    pub ideal: GroupSpec,
    /// Maximal labels of the ideal, in alphabetical order.
    pub label: String,
    pub signature: GroupSignature,
}

impl LatticeNode {
    pub fn is_bottom(&self) -> bool {
        self.ideal.is_empty()
    }

    pub fn is_top(&self) -> bool {
        self.ideal == GroupSpec::all()
    }
}

/// All groups generated by subsets of the join-irreducibles.
#[derive(Debug, Clone)]
pub struct Lattice {
    nodes: Vec<LatticeNode>,
    /// Node index of the group generated by each subset, indexed by its bits.
    closure: Vec<usize>,
    /// `below[u][v]` iff node `u` is contained in node `v`.
    below: Vec<Vec<bool>>,
    /// `order[x]` is the ideal generated by label `x` alone.
    order: [GroupSpec; LABEL_COUNT],
}

impl Lattice {
    /// Closes all 2048 subsets. Subsets are visited in increasing order, so
    /// the ideal of `s` is obtained from the ideal of `s` minus its highest
    /// label by one join; at most one join per (node, label) pair is computed.
    pub fn enumerate(engine: &Engine) -> Result<Lattice> {
        let mut order = [GroupSpec::EMPTY; LABEL_COUNT];
        for l in GeneratorLabel::ALL {
            order[l.index()] = join_closure(engine, GroupSpec::single(l))?.members;
        }

        let bottom = engine.signature(GroupSpec::EMPTY)?;
        let mut nodes = vec![(GroupSpec::EMPTY, bottom)];
        let mut by_ideal: HashMap<GroupSpec, usize> = HashMap::from([(GroupSpec::EMPTY, 0)]);
        let mut step: HashMap<(usize, GeneratorLabel), usize> = HashMap::new();
        let total = 1usize << LABEL_COUNT;
        let mut closure = vec![0usize; total];
        for bits in 1..total {
            let high = GeneratorLabel::from_index(15 - (bits as u16).leading_zeros() as usize);
            let from = closure[bits & !(1 << high.index())];
            if let Some(&to) = step.get(&(from, high)) {
                closure[bits] = to;
                continue;
            }
            let to = if nodes[from].0.contains(high) {
                from
            } else {
                let sig = join_signature(engine, &nodes[from].1, high)?;
                let ideal = labels_below(engine, &sig)?;
                match by_ideal.get(&ideal) {
                    Some(&existing) => {
                        if nodes[existing].1 != sig {
                            return Err(Error::ClassificationViolation(format!(
                                "ideal {ideal} reached with two different signatures"
                            )));
                        }
                        existing
                    }
                    None => {
                        nodes.push((ideal, sig));
                        by_ideal.insert(ideal, nodes.len() - 1);
                        nodes.len() - 1
                    }
                }
            };
            step.insert((from, high), to);
            closure[bits] = to;
        }

        // stable presentation: by size, then alphabetically
        let mut perm: Vec<usize> = (0..nodes.len()).collect();
        perm.sort_by_key(|&i| (nodes[i].0.len(), nodes[i].0.to_string()));
        let mut new_index = vec![0; nodes.len()];
        for (new, &old) in perm.iter().enumerate() {
            new_index[old] = new;
        }
        let closure = closure.into_iter().map(|i| new_index[i]).collect();
        let nodes: Vec<LatticeNode> = perm
            .into_iter()
            .map(|i| {
                let (ideal, signature) = nodes[i].clone();
                LatticeNode {
                    ideal,
                    label: maximal_label(ideal, &order),
                    signature,
                }
            })
            .collect();

        let below = nodes
            .par_iter()
            .map(|u| {
                nodes
                    .iter()
                    .map(|v| u.signature.refines(&v.signature))
                    .collect()
            })
            .collect();
        Ok(Lattice {
            nodes,
            closure,
            below,
            order,
        })
    }

    pub fn nodes(&self) -> &[LatticeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn bottom(&self) -> usize {
        self.closure[0]
    }

    pub fn top(&self) -> usize {
        self.closure[GroupSpec::all().bits() as usize]
    }

    /// Node of the group generated by `s`.
    pub fn node_of(&self, s: GroupSpec) -> usize {
        self.closure[s.bits() as usize]
    }

    pub fn node_by_label(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.label == label)
    }

    /// Ideal generated by a single label.
    pub fn label_ideal(&self, l: GeneratorLabel) -> GroupSpec {
        self.order[l.index()]
    }

    pub fn leq(&self, u: usize, v: usize) -> bool {
        self.below[u][v]
    }

    pub fn join(&self, u: usize, v: usize) -> usize {
        self.node_of(self.nodes[u].ideal.union(self.nodes[v].ideal))
    }

    /// Greatest common lower bound, if a unique one exists among the nodes.
    pub fn meet(&self, u: usize, v: usize) -> Option<usize> {
        let lower: Vec<usize> = (0..self.len())
            .filter(|&w| self.leq(w, u) && self.leq(w, v))
            .collect();
        lower
            .iter()
            .copied()
            .find(|&w| lower.iter().all(|&x| self.leq(x, w)))
    }

    /// Covering pairs `(lower, upper)` of the containment order.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v
                    && self.leq(u, v)
                    && !(0..n).any(|w| w != u && w != v && self.leq(u, w) && self.leq(w, v))
                {
                    edges.push((u, v));
                }
            }
        }
        edges
    }

    /// Nodes covering the bottom.
    pub fn atoms(&self) -> Vec<usize> {
        let b = self.bottom();
        self.hasse_edges()
            .into_iter()
            .filter(|&(u, _)| u == b)
            .map(|(_, v)| v)
            .collect()
    }

    /// Whether relabeling by `perm` (label `x` goes to `perm[x]`) and closing
    /// again is an order automorphism of the node set.
    pub fn check_automorphism(&self, perm: &[GeneratorLabel; LABEL_COUNT]) -> bool {
        let mut seen = BTreeSet::new();
        if perm.iter().any(|l| !seen.insert(*l)) {
            return false;
        }
        let image: Vec<usize> = self
            .nodes
            .iter()
            .map(|n| self.node_of(n.ideal.labels().map(|l| perm[l.index()]).collect()))
            .collect();
        // the relabeled ideal must already be closed
        let closed = self
            .nodes
            .iter()
            .zip(&image)
            .all(|(n, &i)| self.nodes[i].ideal.len() == n.ideal.len());
        let bijective = image.iter().collect::<BTreeSet<_>>().len() == self.len();
        closed
            && bijective
            && (0..self.len())
                .all(|u| (0..self.len()).all(|v| self.leq(u, v) == self.leq(image[u], image[v])))
    }

    /// DOT digraph of the covering relation, edges pointing upwards.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph reducts {\n  rankdir=BT;\n  node [shape=plaintext];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", display_label(n));
        }
        for (u, v) in self.hasse_edges() {
            let _ = writeln!(out, "  n{u} -> n{v};");
        }
        out.push_str("}\n");
        out
    }
}

/// Label used in listings: the bottom has no maximal labels.
pub fn display_label(n: &LatticeNode) -> &str {
    if n.is_bottom() {
        "∅"
    } else {
        &n.label
    }
}

fn maximal_label(ideal: GroupSpec, order: &[GroupSpec; LABEL_COUNT]) -> String {
    ideal
        .labels()
        .filter(|&x| {
            !ideal
                .labels()
                .any(|y| y != x && order[y.index()].contains(x) && !order[x.index()].contains(y))
        })
        .map(|l| l.as_char())
        .collect()
}

/// Permutation of the labels given as disjoint cycles, e.g. `"(ik)(ae)(bf)"`.
pub fn label_permutation(cycles: &str) -> Result<[GeneratorLabel; LABEL_COUNT]> {
    let mut perm = GeneratorLabel::ALL;
    for cycle in cycles.split(')') {
        let cycle = cycle.trim().trim_start_matches('(');
        let letters = cycle
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(GeneratorLabel::from_char)
            .collect::<Result<Vec<_>>>()?;
        for (i, &l) in letters.iter().enumerate() {
            perm[l.index()] = letters[(i + 1) % letters.len()];
        }
    }
    Ok(perm)
}

/// Stand-in for the dihedral 4-ary relation of the table.
///
/// The orbits of `join{a,b,d,e,f,g,h}` on 4-types are permuted by the
/// dihedral argument permutations, so dihedrally closed unions of orbits are
/// unions of classes of orbits. Among the nonempty proper ones that none of
/// `i`, `j`, `k` preserves, the one whose sorted code list is
/// lexicographically least is returned.
pub fn derive_sd_surrogate(engine: &Engine) -> Result<Relation> {
    let base: GroupSpec = "abdefgh".parse().expect("static label set");
    let partition = engine.orbit_partition(base, 4)?;
    let blocks = partition.blocks();
    let block_of: HashMap<u32, usize> = blocks.iter().enumerate().map(|(i, b)| (b[0], i)).collect();

    let mut uf = UnionFind::new(blocks.len());
    for (i, block) in blocks.iter().enumerate() {
        let t = KType::decode(4, block[0])?;
        for sigma in dihedral_permutations() {
            let image = partition.rep(t.rearrange(&sigma).code());
            uf.union(i as u32, block_of[&image] as u32);
        }
    }
    let mut classes: Vec<Vec<u32>> = vec![Vec::new(); blocks.len()];
    for (i, block) in blocks.iter().enumerate() {
        classes[uf.find(i as u32) as usize].extend(block);
    }
    classes.retain(|c| !c.is_empty());
    if classes.len() > 20 {
        return Err(Error::SurrogateSearchFailure);
    }

    let groupings: Vec<GroupSpec> = "ijk"
        .chars()
        .map(|c| c.to_string().parse().unwrap())
        .collect();
    let mut best: Option<Vec<u32>> = None;
    for mask in 1u32..(1 << classes.len()) - 1 {
        let mut codes: Vec<u32> = (0..classes.len())
            .filter(|i| mask >> i & 1 == 1)
            .flat_map(|i| classes[i].iter().copied())
            .collect();
        codes.sort_unstable();
        if best.as_ref().is_some_and(|b| *b <= codes) {
            continue;
        }
        let candidate = Relation::new("SD", TypeSet::from_codes(4, codes.iter().copied()));
        let mut preserved = false;
        for &g in &groupings {
            preserved |= engine.preserves(g, &candidate)?;
        }
        if !preserved {
            best = Some(codes);
        }
    }
    let codes = best.ok_or(Error::SurrogateSearchFailure)?;
    Ok(Relation::new("SD", TypeSet::from_codes(4, codes)))
}

/// Column relations of the table. Without a surrogate the `SD` column is left out.
pub fn table_relations(sd: Option<&Relation>) -> Result<Vec<Relation>> {
    TABLE_COLUMNS
        .iter()
        .filter(|&&name| name != RelationName::SD || sd.is_some())
        .map(|&name| named_relation(name, sd))
        .collect()
}

/// The bundled expected table.
pub const EXPECTED_TABLE_TSV: &str = include_str!("../fixtures/preservation_table.tsv");

/// One cell of an expected table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExpectedCell {
    pub preserved: bool,
    /// Part of the characterizing relation set of the row.
    pub bold: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpectedRow {
    pub label: String,
    pub cells: Vec<ExpectedCell>,
}

/// Table parsed from TSV: `#` comments, a header row, then one row per group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpectedTable {
    pub columns: Vec<RelationName>,
    pub rows: Vec<ExpectedRow>,
}

impl ExpectedTable {
    pub fn bundled() -> Self {
        Self::parse(EXPECTED_TABLE_TSV).expect("bundled table parses")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::ClassificationViolation("table has no header".into()))?;
        let columns = header
            .split('\t')
            .skip(1)
            .map(str::parse)
            .collect::<Result<Vec<RelationName>>>()?;
        let mut rows = Vec::new();
        for line in lines {
            let mut fields = line.split('\t');
            let label = fields.next().unwrap_or_default().to_string();
            let mut cells: Vec<ExpectedCell> = fields
                .map(|f| match f.trim() {
                    "" => Ok(ExpectedCell {
                        preserved: false,
                        bold: false,
                    }),
                    "x" => Ok(ExpectedCell {
                        preserved: true,
                        bold: false,
                    }),
                    "X" => Ok(ExpectedCell {
                        preserved: true,
                        bold: true,
                    }),
                    other => Err(Error::ClassificationViolation(format!(
                        "row {label}: unreadable cell {other:?}"
                    ))),
                })
                .collect::<Result<_>>()?;
            // trailing empty cells may be trimmed by editors
            cells.resize(
                columns.len(),
                ExpectedCell {
                    preserved: false,
                    bold: false,
                },
            );
            if cells.len() != columns.len() {
                return Err(Error::ClassificationViolation(format!(
                    "row {label} has {} cells for {} columns",
                    cells.len(),
                    columns.len()
                )));
            }
            rows.push(ExpectedRow { label, cells });
        }
        Ok(ExpectedTable { columns, rows })
    }

    pub fn row_labels(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.label.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    /// Row name; its letters generate the row's group.
    pub label: String,
    /// Computed label of that group in the lattice.
    pub group: String,
    pub ideal: String,
    pub cells: Vec<bool>,
}

/// Computed preservation table: one row per proper nontrivial group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreservationTable {
    pub columns: Vec<RelationName>,
    pub rows: Vec<TableRow>,
    /// Sorted member codes of the relation used in the `SD` column, if any.
    pub sd_surrogate: Option<Vec<u32>>,
}

/// A cell on which a computed table and an expected table disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellMismatch {
    pub row: String,
    pub column: RelationName,
    pub expected: bool,
    pub found: bool,
}

/// Rows follow `row_order`; the group of a row is generated by the letters of its label.
pub fn build_preservation_table(
    lattice: &Lattice,
    sd: Option<&Relation>,
    row_order: &[&str],
) -> Result<PreservationTable> {
    let relations = table_relations(sd)?;
    let rows = row_order
        .iter()
        .map(|&label| {
            let generators: GroupSpec = label.parse()?;
            let node = &lattice.nodes()[lattice.node_of(generators)];
            Ok(TableRow {
                label: label.to_string(),
                group: display_label(node).to_string(),
                ideal: node.ideal.to_string(),
                cells: relations
                    .iter()
                    .map(|r| node.signature.preserves(r))
                    .collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PreservationTable {
        columns: TABLE_COLUMNS
            .iter()
            .copied()
            .filter(|&c| c != RelationName::SD || sd.is_some())
            .collect(),
        rows,
        sd_surrogate: sd.map(|r| member_codes(r).into_iter().collect()),
    })
}

impl PreservationTable {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("row");
        for c in &self.columns {
            let _ = write!(out, "\t{c}");
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.label);
            for &cell in &row.cells {
                out.push('\t');
                if cell {
                    out.push('x');
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// Disagreements with `expected`, restricted to the columns in `columns`.
    pub fn diff(
        &self,
        expected: &ExpectedTable,
        columns: &[RelationName],
    ) -> Result<Vec<CellMismatch>> {
        if self.row_labels() != expected.row_labels() {
            return Err(Error::ClassificationViolation(
                "computed and expected tables list different rows".into(),
            ));
        }
        let mut out = Vec::new();
        for (row, exp) in self.rows.iter().zip(&expected.rows) {
            for &column in columns {
                let (Some(ci), Some(ei)) = (
                    self.columns.iter().position(|&c| c == column),
                    expected.columns.iter().position(|&c| c == column),
                ) else {
                    return Err(Error::UnknownRelation(column.to_string()));
                };
                if row.cells[ci] != exp.cells[ei].preserved {
                    out.push(CellMismatch {
                        row: row.label.clone(),
                        column,
                        expected: exp.cells[ei].preserved,
                        found: row.cells[ci],
                    });
                }
            }
        }
        Ok(out)
    }

    pub fn row_labels(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.label.as_str()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::MoveTables;
    use std::sync::Arc;

    #[test]
    fn permutation_parsing() {
        let p = label_permutation("(ik)(ae)(bf)").unwrap();
        assert_eq!(p[GeneratorLabel::I.index()], GeneratorLabel::K);
        assert_eq!(p[GeneratorLabel::K.index()], GeneratorLabel::I);
        assert_eq!(p[GeneratorLabel::C.index()], GeneratorLabel::C);
        assert_eq!(label_permutation("").unwrap(), GeneratorLabel::ALL);
        assert!(label_permutation("(az)").is_err());
    }

    #[test]
    fn expected_table_shape() {
        let t = ExpectedTable::bundled();
        assert_eq!(t.columns, TABLE_COLUMNS.to_vec());
        assert_eq!(t.rows.len(), 42);
        assert_eq!(t.rows[0].label, "a");
        assert!(t.rows[0].cells[0].bold && !t.rows[0].cells[1].bold);
        assert!(ExpectedTable::parse("row\tE\na\tq\n").is_err());
    }

    #[test]
    fn small_closures() {
        let engine = Engine::with_tables(Arc::new(MoveTables::new()));
        let close = |s: &str| {
            join_closure(&engine, s.parse().unwrap())
                .unwrap()
                .members
                .to_string()
        };
        assert_eq!(close("gh"), "cdgh");
        assert_eq!(close("a"), "a");
        assert_eq!(close("i"), "abi");
        assert_eq!(close(""), "∅");
    }
}
