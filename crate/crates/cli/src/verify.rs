//! Sections of `verify-all`. A section fails when an invariant of the build
//! is broken; it is a finding when the build is consistent but disagrees with
//! an expected value. Findings fail the run only in strict mode.

use std::fmt::Write;

use serde::Serialize;

use reductlab::constellations::{case_catalog, check_compatible, witness_generates, ClaimSource};
use reductlab::lattice::{
    build_preservation_table, derive_sd_surrogate, display_label, label_permutation, ExpectedTable,
    Lattice,
};
use reductlab::orbits::oracle_orbits;
use reductlab::structures::{build_bit_graph, OrderedGraph, RelationName, TABLE_COLUMNS};
use reductlab::transforms::{concrete_transform, cut_switch, ConcreteParam, GeneratorLabel};
use reductlab::{Engine, GroupSpec};

use crate::Config;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Finding,
    Fail,
}

#[derive(Debug, Serialize)]
pub struct Section {
    pub name: &'static str,
    pub status: Status,
    pub details: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub ok: bool,
    pub strict: bool,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn failed(&self) -> Vec<&'static str> {
        self.sections
            .iter()
            .filter(|s| s.status == Status::Fail || (self.strict && s.status == Status::Finding))
            .map(|s| s.name)
            .collect()
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            let status = match s.status {
                Status::Pass => "pass",
                Status::Finding => "finding",
                Status::Fail => "FAIL",
            };
            let _ = writeln!(out, "{:15} {status}", s.name);
            for d in &s.details {
                let _ = writeln!(out, "    {d}");
            }
        }
        out
    }
}

fn gs(s: &str) -> GroupSpec {
    s.parse().expect("static label set")
}

fn section(name: &'static str, ok: bool, details: Vec<String>) -> Section {
    Section {
        name,
        status: if ok { Status::Pass } else { Status::Fail },
        details,
    }
}

fn finding(name: &'static str, ok: bool, details: Vec<String>) -> Section {
    Section {
        name,
        status: if ok { Status::Pass } else { Status::Finding },
        details,
    }
}

fn table(lattice: &Lattice, max_arity: usize) -> anyhow::Result<Section> {
    let columns: Vec<RelationName> = TABLE_COLUMNS
        .iter()
        .copied()
        .filter(|&c| c != RelationName::SD && c.arity() <= max_arity)
        .collect();
    let expected = ExpectedTable::bundled();
    let t = build_preservation_table(lattice, None, &expected.row_labels())?;
    let mismatches = t.diff(&expected, &columns)?;
    let mut details = vec![format!(
        "{} rows, {} columns compared",
        t.rows.len(),
        columns.len()
    )];
    details.extend(mismatches.iter().map(|m| {
        format!(
            "{} / {}: expected {}, found {}",
            m.row, m.column, m.expected, m.found
        )
    }));
    Ok(section(
        "table",
        mismatches.is_empty() && columns.len() == 14,
        details,
    ))
}

fn sd(engine: &Engine) -> anyhow::Result<Section> {
    Ok(match derive_sd_surrogate(engine) {
        Ok(r) => finding(
            "sd-surrogate",
            true,
            vec![format!("{} member types", r.len())],
        ),
        Err(e) => finding("sd-surrogate", false, vec![e.to_string()]),
    })
}

fn lattice_shape(lattice: &Lattice) -> Section {
    let mut details = vec![format!("{} groups, expected 44", lattice.len())];
    for (x, y) in [("bdfgh", "bfj"), ("abdefgh", "abefj")] {
        if lattice.node_of(gs(x)) == lattice.node_of(gs(y)) {
            details.push(format!("{x} and {y} generate the same group"));
        }
    }
    finding("lattice-size", lattice.len() == 44, details)
}

fn order_checks(lattice: &Lattice) -> anyhow::Result<Vec<Section>> {
    let atoms: Vec<String> = lattice
        .atoms()
        .into_iter()
        .map(|a| display_label(&lattice.nodes()[a]).to_string())
        .collect();
    let atoms_ok = atoms.join("") == "abcdef";
    let mut autos = Vec::new();
    let mut autos_ok = true;
    for (cycles, expect) in [
        ("", true),
        ("(gh)", true),
        ("(ik)(ae)(bf)", true),
        ("(ab)", false),
    ] {
        let got = lattice.check_automorphism(&label_permutation(cycles)?);
        autos_ok &= got == expect;
        autos.push(format!(
            "{}: {got}",
            if cycles.is_empty() {
                "identity"
            } else {
                cycles
            }
        ));
    }

    let ideals: Vec<GroupSpec> = lattice.nodes().iter().map(|n| n.ideal).collect();
    let mut families = Vec::new();
    let mut families_ok = true;
    for letter in ['i', 'j', 'k'] {
        let l = GeneratorLabel::from_char(letter)?;
        let n = ideals.iter().filter(|i| i.contains(l)).count();
        families_ok &= n == 5;
        families.push(format!("{n} ideals contain {letter}"));
    }
    let law = |i: &GroupSpec, set: &str| gs(set).labels().filter(|&l| i.contains(l)).count() != 2;
    let bad = ideals
        .iter()
        .filter(|i| !law(i, "ace") || !law(i, "bdf"))
        .count();
    families_ok &= bad == 0;
    families.push(format!(
        "{bad} ideals contain exactly two of {{a,c,e}} or of {{b,d,f}}"
    ));

    let j = GeneratorLabel::J;
    let with_j: Vec<String> = ["g", "h", "dgh", "adegh", "bdfgh", "abdefgh"]
        .iter()
        .filter(|s| lattice.nodes()[lattice.node_of(gs(s))].ideal.contains(j))
        .map(|s| s.to_string())
        .collect();
    let items = vec![format!("listed g/h ideals that contain j: {with_j:?}")];
    Ok(vec![
        section("atoms", atoms_ok, vec![atoms.join(" ")]),
        section("automorphisms", autos_ok, autos),
        section("ideal-families", families_ok, families),
        finding("g-h-family", with_j.is_empty(), items),
    ])
}

fn composition(engine: &Engine) -> anyhow::Result<Section> {
    let mut bad = 0;
    for n in 0..=12 {
        let empty = OrderedGraph::empty(n);
        for g in [empty.complement(), empty, build_bit_graph(n)] {
            for cut in 0..=n {
                let p = ConcreteParam::Cut(cut);
                let u = concrete_transform(GeneratorLabel::H, &p, &g)?.graph;
                let l = concrete_transform(GeneratorLabel::G, &p, &u)?.graph;
                let out = concrete_transform(GeneratorLabel::C, &ConcreteParam::None, &l)?.graph;
                bad += usize::from(out != cut_switch(&g, cut));
            }
        }
    }
    let same = engine.signature(gs("gh"))? == engine.signature(gs("cdgh"))?;
    Ok(section(
        "composition",
        bad == 0 && same,
        vec![
            format!("{bad} hosts differ from the cut switch"),
            format!("signature(gh) = signature(cdgh): {same}"),
        ],
    ))
}

fn oracle(engine: &Engine, cfg: &Config) -> anyhow::Result<Section> {
    let mut details = Vec::new();
    for l in "abcdefgh".chars() {
        for k in 1..=3.min(cfg.max_arity as usize) {
            let s = gs(&l.to_string());
            let o = oracle_orbits(s, k, cfg.oracle_host_size, 4)?;
            let p = engine.orbit_partition(s, k)?;
            if o != *p {
                details.push(format!(
                    "{l} arity {k}: oracle {} classes, engine {}",
                    o.class_count(),
                    p.class_count()
                ));
            }
        }
    }
    Ok(section("oracle", details.is_empty(), details))
}

fn constellations(
    engine: &Engine,
    lattice: &Lattice,
    cfg: &Config,
) -> anyhow::Result<Vec<Section>> {
    let arity = 4.min(cfg.max_arity as usize);
    let mut stated = Vec::new();
    let mut rebuilt = Vec::new();
    for r in case_catalog() {
        let ideal = lattice.nodes()[lattice.node_of(r.claimed)].ideal;
        let compatible = check_compatible(engine, &r.constellation, ideal, arity)?;
        let w = witness_generates(
            &r.constellation,
            r.target_label(),
            4,
            cfg.witness_depth as usize,
        )?;
        if !compatible || !w.success() {
            let line = format!(
                "{}: compatible {compatible}, witness depth {:?}",
                r.id,
                w.depth()
            );
            match r.source {
                ClaimSource::Stated => stated.push(line),
                ClaimSource::Reconstructed => rebuilt.push(line),
            }
        }
    }
    Ok(vec![
        section("constellations", stated.is_empty(), stated),
        finding("rebuilt-cases", rebuilt.is_empty(), rebuilt),
    ])
}

fn determination(engine: &Engine) -> anyhow::Result<Section> {
    let mut details = Vec::new();
    for s in gs("cdghj").subsets() {
        if let Some((x, y)) = engine.four_ary_counterexample(s)? {
            details.push(format!("{s}: 5-types {x} and {y}"));
        }
    }
    Ok(section("determination", details.is_empty(), details))
}

pub fn run(cfg: &Config, strict: bool) -> anyhow::Result<Report> {
    let engine = cfg.engine()?;
    let lattice = Lattice::enumerate(&engine)?;
    let max_arity = cfg.max_arity as usize;
    let mut sections = vec![table(&lattice, max_arity)?];
    if max_arity >= 4 {
        sections.push(sd(&engine)?);
    }
    sections.push(lattice_shape(&lattice));
    sections.extend(order_checks(&lattice)?);
    sections.push(composition(&engine)?);
    sections.push(oracle(&engine, cfg)?);
    sections.extend(constellations(&engine, &lattice, cfg)?);
    if max_arity == 5 {
        sections.push(determination(&engine)?);
    }
    let mut report = Report {
        ok: true,
        strict,
        sections,
    };
    report.ok = report.failed().is_empty();
    Ok(report)
}
