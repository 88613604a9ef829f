use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use reductlab::constellations::{
    case_catalog, find_case, find_incompatibility, witness_generates, CaseRecord, ClaimSource,
    Placement, WitnessReport,
};
use reductlab::lattice::{
    build_preservation_table, derive_sd_surrogate, display_label, ExpectedTable, Lattice,
    PreservationTable,
};
use reductlab::orbits::oracle_orbits;
use reductlab::structures::RelationName;
use reductlab::transforms::{GeneratorLabel, MoveTables};
use reductlab::{Engine, Error, GroupSpec};

mod verify;

#[derive(Parser)]
#[command(
    name = "reductlab",
    version,
    about = "Verify the lattice of reducts of the random ordered graph"
)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Config {
    /// Largest tuple length whose orbits are computed.
    #[arg(long, global = true, default_value_t = 5, value_parser = clap::value_parser!(u8).range(1..=5))]
    max_arity: u8,
    /// Vertices of the finite host used by the oracle.
    #[arg(long, global = true, default_value_t = 16)]
    oracle_host_size: usize,
    /// Longest composition tried by the witness search.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=8))]
    witness_depth: u8,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Act as if the moves of this generator did nothing.
    #[arg(long, global = true, hide = true)]
    corrupt: Option<char>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the preservation table.
    Table {
        #[arg(long, value_enum, default_value_t = TableFormat::Tsv)]
        format: TableFormat,
        /// Compare with an expected table and exit 1 on any difference.
        #[arg(long, value_name = "FILE")]
        diff_expected: Option<PathBuf>,
        /// Treat a missing or mismatching SD column as a failure.
        #[arg(long)]
        strict: bool,
    },
    /// List the groups, their covers and atoms.
    Lattice {
        /// Also write the Hasse diagram in DOT format.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Print the orbits of a group on types of one arity.
    Orbits {
        /// Generators, e.g. "gh" or "∅".
        group: String,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        /// Compute by moving tuples in a finite host instead.
        #[arg(long)]
        oracle: bool,
        /// Composition depth for the oracle.
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Check constellation cases against their claimed groups.
    Check {
        /// Case id such as C2:a2; all cases when omitted.
        #[arg(long)]
        case: Option<String>,
        #[arg(long)]
        json: bool,
        /// Number of points the witness search places.
        #[arg(long, default_value_t = 4)]
        set_size: usize,
        /// Largest instantiation checked for compatibility.
        #[arg(long, default_value_t = 4)]
        arity: usize,
    },
    /// Search for the SD surrogate relation.
    FindSd,
    /// Run every check and report per section.
    VerifyAll {
        /// Also fail on findings that differ from expected values.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Tsv,
    Json,
}

/// Verification failed; the message has already been printed.
#[derive(Debug)]
struct Mismatch;

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("verification mismatch")
    }
}

impl std::error::Error for Mismatch {}

/// Arguments that parse but cannot be honored.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Mismatch>() => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.is::<Usage>()
                || matches!(
                    e.downcast_ref::<Error>(),
                    Some(
                        Error::UnknownLabel(_)
                            | Error::UnknownCase(_)
                            | Error::InvalidArity(_)
                            | Error::NotConcrete(_)
                            | Error::HostTooSmall(_)
                    )
                );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

impl Config {
    fn engine(&self) -> anyhow::Result<Engine> {
        let engine = match self.corrupt {
            Some(c) => Engine::with_tables(Arc::new(MoveTables::corrupted(
                GeneratorLabel::from_char(c)?,
            ))),
            None => Engine::new(),
        };
        Ok(engine.with_max_arity(self.max_arity as usize)?)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = cli.config;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    match cli.command {
        Command::Table {
            format,
            diff_expected,
            strict,
        } => cmd_table(&cfg, format, diff_expected, strict),
        Command::Lattice { dot } => cmd_lattice(&cfg, dot),
        Command::Orbits {
            group,
            arity,
            oracle,
            depth,
        } => cmd_orbits(&cfg, &group, arity, oracle, depth),
        Command::Check {
            case,
            json,
            set_size,
            arity,
        } => cmd_check(&cfg, case.as_deref(), json, set_size, arity),
        Command::FindSd => cmd_find_sd(&cfg),
        Command::VerifyAll { strict, json } => {
            let report = verify::run(&cfg, strict)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", report.text());
            }
            if report.ok {
                Ok(())
            } else {
                eprintln!("failed sections: {}", report.failed().join(", "));
                Err(Mismatch.into())
            }
        }
    }
}

fn check_table_arity(cfg: &Config) -> anyhow::Result<()> {
    let needed = reductlab::structures::TABLE_COLUMNS
        .iter()
        .map(|c| c.arity())
        .max()
        .unwrap_or(1);
    if (cfg.max_arity as usize) < needed {
        return Err(usage(format!("the table needs --max-arity {needed}")));
    }
    Ok(())
}

fn compute_table(
    engine: &Engine,
    lattice: &Lattice,
    strict: bool,
) -> anyhow::Result<PreservationTable> {
    let rows = ExpectedTable::bundled();
    let sd = match derive_sd_surrogate(engine) {
        Ok(r) => Some(r),
        Err(e @ Error::SurrogateSearchFailure) => {
            eprintln!("warning: {e}; the SD column is left out");
            if strict {
                return Err(Mismatch.into());
            }
            None
        }
        Err(e) => return Err(e.into()),
    };
    Ok(build_preservation_table(
        lattice,
        sd.as_ref(),
        &rows.row_labels(),
    )?)
}

fn cmd_table(
    cfg: &Config,
    format: TableFormat,
    diff: Option<PathBuf>,
    strict: bool,
) -> anyhow::Result<()> {
    check_table_arity(cfg)?;
    let engine = cfg.engine()?;
    let lattice = Lattice::enumerate(&engine)?;
    let table = compute_table(&engine, &lattice, strict)?;
    match format {
        TableFormat::Tsv => print!("{}", table.to_tsv()),
        TableFormat::Json => println!("{}", table.to_json()),
    }
    let Some(path) = diff else { return Ok(()) };
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let expected = ExpectedTable::parse(&text)?;
    let mismatches = table.diff(&expected, &table.columns)?;
    let (sd, other): (Vec<_>, Vec<_>) = mismatches
        .into_iter()
        .partition(|m| m.column == RelationName::SD);
    for m in other.iter().chain(&sd) {
        eprintln!(
            "{} / {}: expected {}, found {}",
            m.row, m.column, m.expected, m.found
        );
    }
    if !other.is_empty() || (strict && !sd.is_empty()) {
        return Err(Mismatch.into());
    }
    Ok(())
}

fn cmd_lattice(cfg: &Config, dot: Option<PathBuf>) -> anyhow::Result<()> {
    let engine = cfg.engine()?;
    let lattice = Lattice::enumerate(&engine)?;
    let name = |i: usize| display_label(&lattice.nodes()[i]).to_string();
    println!("groups {}", lattice.len());
    for (i, node) in lattice.nodes().iter().enumerate() {
        let covers: Vec<String> = lattice
            .hasse_edges()
            .into_iter()
            .filter(|&(_, v)| v == i)
            .map(|(u, _)| name(u))
            .collect();
        println!(
            "{}\tideal {}\tcovers {}",
            display_label(node),
            node.ideal,
            covers.join(" ")
        );
    }
    let atoms: Vec<String> = lattice.atoms().into_iter().map(name).collect();
    println!("atoms {}", atoms.join(" "));
    if let Some(path) = dot {
        fs::write(&path, lattice.to_dot())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_orbits(
    cfg: &Config,
    group: &str,
    arity: usize,
    oracle: bool,
    depth: usize,
) -> anyhow::Result<()> {
    let gs: GroupSpec = group.parse()?;
    if arity == 0 || arity > cfg.max_arity as usize {
        return Err(usage(format!("--arity must lie in 1..={}", cfg.max_arity)));
    }
    let partition = if oracle {
        oracle_orbits(gs, arity, cfg.oracle_host_size, depth)?
    } else {
        cfg.engine()?.orbit_partition(gs, arity)?.as_ref().clone()
    };
    for block in partition.blocks() {
        let codes: Vec<String> = block.iter().map(u32::to_string).collect();
        println!("k={arity} size={}: {}", block.len(), codes.join(","));
    }
    Ok(())
}

#[derive(Serialize)]
struct CaseVerdict {
    id: String,
    geometry: String,
    source: ClaimSource,
    claimed: GroupSpec,
    compatible: Vec<(GroupSpec, bool)>,
    minimal: Vec<GroupSpec>,
    /// First instantiation leaving the claimed group, if any.
    counterexample: Option<(Placement, u32, u32)>,
    witness: WitnessReport,
    ok: bool,
}

fn op_nodes(lattice: &Lattice) -> Vec<GroupSpec> {
    let op: GroupSpec = "cdghj".parse().expect("static label set");
    lattice
        .nodes()
        .iter()
        .map(|n| n.ideal)
        .filter(|i| i.is_subset(op))
        .collect()
}

fn check_case(
    engine: &Engine,
    lattice: &Lattice,
    record: &CaseRecord,
    cfg: &Config,
    set_size: usize,
    arity: usize,
) -> anyhow::Result<CaseVerdict> {
    let c = &record.constellation;
    let claimed = lattice.nodes()[lattice.node_of(record.claimed)].ideal;
    let mut compatible = Vec::new();
    for g in op_nodes(lattice) {
        compatible.push((g, find_incompatibility(engine, c, g, arity)?.is_none()));
    }
    let yes: Vec<GroupSpec> = compatible
        .iter()
        .filter(|(_, ok)| *ok)
        .map(|(g, _)| *g)
        .collect();
    let minimal: Vec<GroupSpec> = yes
        .iter()
        .copied()
        .filter(|&g| !yes.iter().any(|&h| h != g && h.is_subset(g)))
        .collect();
    let counterexample =
        find_incompatibility(engine, c, claimed, arity)?.map(|i| (i.placement, i.before, i.after));
    let witness = witness_generates(
        c,
        record.target_label(),
        set_size,
        cfg.witness_depth as usize,
    )?;
    let ok = counterexample.is_none() && minimal == [claimed] && witness.success();
    Ok(CaseVerdict {
        id: record.id.clone(),
        geometry: c.to_string(),
        source: record.source,
        claimed,
        compatible,
        minimal,
        counterexample,
        witness,
        ok,
    })
}

fn slot_script(p: &Placement) -> String {
    const NAMES: [char; 5] = ['X', 'Y', 'Z', 'W', 'V'];
    p.iter().map(|&s| NAMES[s]).collect()
}

fn print_verdict(v: &CaseVerdict) {
    let source = match v.source {
        ClaimSource::Stated => "stated",
        ClaimSource::Reconstructed => "reconstructed",
    };
    println!("{}  [{}]  {}", v.id, source, v.geometry);
    println!("  claimed {}", v.claimed);
    for (g, ok) in &v.compatible {
        println!(
            "  {:6} {}",
            g.to_string(),
            if *ok { "compatible" } else { "incompatible" }
        );
    }
    let minimal: Vec<String> = v.minimal.iter().map(ToString::to_string).collect();
    println!("  minimal {}", minimal.join(" "));
    if let Some((p, before, after)) = &v.counterexample {
        println!(
            "  leaves the claimed group: placement {} maps type {before} to {after}",
            slot_script(p)
        );
    }
    for w in &v.witness.witnesses {
        match &w.moves {
            Some(moves) if moves.is_empty() => println!("  {}: no placement needed", w.target),
            Some(moves) => {
                let script: Vec<String> = moves.iter().map(slot_script).collect();
                println!("  {}: {}", w.target, script.join(" then "));
            }
            None => println!("  {}: exhausted at depth {}", w.target, v.witness.max_depth),
        }
    }
    println!("  {}", if v.ok { "ok" } else { "MISMATCH" });
}

fn cmd_check(
    cfg: &Config,
    case: Option<&str>,
    json: bool,
    set_size: usize,
    arity: usize,
) -> anyhow::Result<()> {
    if arity == 0 || arity > cfg.max_arity as usize {
        return Err(usage(format!("--arity must lie in 1..={}", cfg.max_arity)));
    }
    if !(1..=4).contains(&set_size) {
        return Err(usage("--set-size must lie in 1..=4"));
    }
    let records = match case {
        Some(id) => vec![find_case(id)?],
        None => case_catalog(),
    };
    let engine = cfg.engine()?;
    let lattice = Lattice::enumerate(&engine)?;
    let verdicts = records
        .iter()
        .map(|r| check_case(&engine, &lattice, r, cfg, set_size, arity))
        .collect::<anyhow::Result<Vec<_>>>()?;
    if json {
        if case.is_some() {
            println!("{}", serde_json::to_string_pretty(&verdicts[0])?);
        } else {
            println!("{}", serde_json::to_string_pretty(&verdicts)?);
        }
    } else if case.is_some() {
        print_verdict(&verdicts[0]);
    } else {
        for v in &verdicts {
            println!(
                "{:6} claimed {:6} minimal {:6} witness depth {}  {}",
                v.id,
                v.claimed.to_string(),
                v.minimal
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
                v.witness.depth().map_or("-".into(), |d| d.to_string()),
                if v.ok { "ok" } else { "MISMATCH" }
            );
        }
    }
    if verdicts.iter().all(|v| v.ok) {
        Ok(())
    } else {
        Err(Mismatch.into())
    }
}

fn cmd_find_sd(cfg: &Config) -> anyhow::Result<()> {
    if cfg.max_arity < 4 {
        return Err(usage("the search needs --max-arity 4 or more"));
    }
    let engine = cfg.engine()?;
    match derive_sd_surrogate(&engine) {
        Ok(r) => {
            println!("{}", serde_json::to_string(&r)?);
            Ok(())
        }
        Err(Error::SurrogateSearchFailure) => {
            let base: GroupSpec = "abdefgh".parse().expect("static label set");
            let p = engine.orbit_partition(base, 4)?;
            println!(
                "no surrogate: join{{{base}}} has {} orbits on 4-types",
                p.class_count()
            );
            println!(
                "every union of them closed under the square symmetries is preserved by i, j or k"
            );
            Err(Mismatch.into())
        }
        Err(e) => Err(e.into()),
    }
}
