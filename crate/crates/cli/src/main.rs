//! Command-line front end: builds the graphs, reproduces the k4 tables,
//! materializes and verifies designs, and runs the k4 analysis.
//!
//! Every command is deterministic for a fixed set of arguments (canonical
//! field labeling, canonical orderings, seeded sampling), so repeated runs
//! produce identical bytes. Exit status is nonzero whenever a requested
//! verification fails.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use paley_designs::analysis::{analysis_report, analysis_to_csv, thomason_check};
use paley_designs::census::{
    brute_census_with_cap, census_from_k4, census_rows, census_to_csv, census_to_json,
    check_linear_relations, k4_fast, triangle_counts, IsoClass4,
};
use paley_designs::designs::{
    build_blocks_with_cap, complement_design, complement_reference_lambdas, cornerstone_designs,
    AppendixRow, BlockFamily, Design, SmallGraph,
};
use paley_designs::field::FieldSpec;
use paley_designs::graph::{Graph, GraphKind};
use paley_designs::k4_char_sum;
use paley_designs::reference::{paley_k4_reference, peisert_k4_reference, K4Row};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "paley-designs",
    version,
    about = "Paley/Peisert graphs, 4-vertex censuses, and verified 2-designs over GF(p^r)"
)]
struct Cli {
    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph, optionally verify its structure, and export it.
    Graph(GraphArgs),
    /// Tabulate k4 over a range of q or against the embedded reference rows.
    K4Table(K4TableArgs),
    /// Exact census of the 11 four-vertex induced-subgraph classes.
    Census(CensusArgs),
    /// Build and exhaustively verify 2-designs from subgraph families.
    Designs(DesignsArgs),
    /// Character-sum, bound, and asymptotic report for k4 (Paley only).
    Analysis(AnalysisArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Paley,
    Peisert,
}

impl From<KindArg> for GraphKind {
    fn from(k: KindArg) -> GraphKind {
        match k {
            KindArg::Paley => GraphKind::Paley,
            KindArg::Peisert => GraphKind::Peisert,
        }
    }
}

#[derive(Args)]
struct FieldArgs {
    /// Prime characteristic.
    #[arg(long)]
    p: u64,
    /// Extension degree.
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Cap on q = p^r (env PALEY_DESIGNS_Q_CAP).
    #[arg(long)]
    q_cap: Option<u64>,
}

impl FieldArgs {
    fn build(&self) -> Result<FieldSpec> {
        let cap = cap_value(
            self.q_cap,
            "PALEY_DESIGNS_Q_CAP",
            paley_designs::DEFAULT_Q_CAP,
        );
        Ok(FieldSpec::with_cap(self.p, self.r, cap)?)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Text,
    Json,
    Dimacs,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Run the strong-regularity and self-complementarity checks.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_enum, default_value_t = GraphFormat::Text)]
    format: GraphFormat,
    /// Write the export here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum K4Method {
    Fast,
    Brute,
    Charsum,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct K4TableArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Smallest q to include.
    #[arg(long, default_value_t = 5)]
    q_min: u64,
    /// Largest q to include (required unless --check-reference).
    #[arg(long)]
    q_max: Option<u64>,
    #[arg(long, value_enum, default_value_t = K4Method::Fast)]
    method: K4Method,
    /// Compare against the embedded reference rows instead of enumerating;
    /// exits nonzero on any mismatch.
    #[arg(long)]
    check_reference: bool,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Cap for --method brute (env PALEY_DESIGNS_BRUTE_CAP).
    #[arg(long)]
    brute_cap: Option<u64>,
    /// Cap on q = p^r (env PALEY_DESIGNS_Q_CAP).
    #[arg(long)]
    q_cap: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CensusMethod {
    Brute,
    FromK4,
}

#[derive(Args)]
struct CensusArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, value_enum, default_value_t = CensusMethod::Brute)]
    method: CensusMethod,
    /// Also evaluate the five linear class-count relations.
    #[arg(long)]
    relations: bool,
    /// Also report the directly counted triangle and 3-path totals.
    #[arg(long)]
    triangles: bool,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Cap for the brute-force census (env PALEY_DESIGNS_BRUTE_CAP).
    #[arg(long)]
    brute_cap: Option<u64>,
}

#[derive(Args)]
struct DesignsArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum, default_value_t = KindArg::Paley)]
    kind: KindArg,
    /// Comma-separated family: either tilde classes among K4,D,R,C4,K13,P4
    /// or small graphs among K2,K3,P3.
    #[arg(long, conflicts_with_all = ["corollary2", "appendix", "complements"])]
    family: Option<String>,
    /// Build and verify the four standing designs.
    #[arg(long, conflicts_with_all = ["appendix", "complements"])]
    corollary2: bool,
    /// Build and verify all 62 four-vertex families, comparing lambdas
    /// against the embedded reference table.
    #[arg(long, conflicts_with = "complements")]
    appendix: bool,
    /// Build and verify the complements of the four standing designs.
    #[arg(long)]
    complements: bool,
    /// Write block lists into this directory (one file per design).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Block export format.
    #[arg(long, value_enum, default_value_t = BlockFormat::Json)]
    format: BlockFormat,
    /// Cap on the block size k (env PALEY_DESIGNS_K_CAP).
    #[arg(long)]
    k_cap: Option<u32>,
    /// Cap on q for the appendix table (env PALEY_DESIGNS_APPENDIX_CAP).
    #[arg(long)]
    appendix_cap: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BlockFormat {
    Json,
    Text,
}

#[derive(Args)]
struct AnalysisArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Evaluate the character sum only when q is at most this.
    #[arg(long, default_value_t = 2000)]
    charsum_cap: u64,
    /// Number of seeded random subsets for the edge-distribution bound.
    #[arg(long, default_value_t = 100)]
    thomason_samples: u64,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> Result<()> {
    // Die quietly when a pipe downstream closes early (e.g. `... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("building the thread pool")?;
    }
    match cli.command {
        Command::Graph(args) => cmd_graph(args),
        Command::K4Table(args) => cmd_k4_table(args),
        Command::Census(args) => cmd_census(args),
        Command::Designs(args) => cmd_designs(args),
        Command::Analysis(args) => cmd_analysis(args),
    }
}

fn cap_value<T: Copy + std::str::FromStr>(flag: Option<T>, env: &str, default: T) -> T {
    flag.or_else(|| std::env::var(env).ok().and_then(|v| v.parse().ok()))
        .unwrap_or(default)
}

fn build_graph(field: &FieldSpec, kind: KindArg) -> Result<Graph> {
    Ok(match kind {
        KindArg::Paley => Graph::paley(field)?,
        KindArg::Peisert => Graph::peisert(field)?,
    })
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<()> {
    match output {
        Some(path) => {
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_graph(args: GraphArgs) -> Result<()> {
    let field = args.field.build()?;
    let graph = build_graph(&field, args.kind)?;
    // keep stdout clean when the export itself goes to stdout
    let summarize = args.format == GraphFormat::Text || args.output.is_some();
    if summarize {
        println!(
            "{} graph on GF({}) = GF({}^{}): {} vertices, {} edges",
            graph.kind().label(),
            graph.q(),
            field.p(),
            field.r(),
            graph.q(),
            graph.edge_count()
        );
    }
    if args.verify {
        let params = graph.verify_srg()?;
        graph.complement_map()?;
        if summarize {
            println!(
                "strongly regular: ({}, {}, {}, {}) with the matrix identity A^2 = kI + lA + m(J-I-A)",
                params.v, params.k, params.lambda, params.mu
            );
            println!("self-complementary: verified by an explicit multiplicative relabeling");
        }
    }
    match args.format {
        GraphFormat::Text => {}
        GraphFormat::Json => emit(&args.output, &format!("{}\n", graph.to_edge_json()))?,
        GraphFormat::Dimacs => emit(&args.output, &graph.to_dimacs())?,
    }
    Ok(())
}

fn admissible_field(kind: KindArg, q: u64, q_cap: u64) -> Option<FieldSpec> {
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q; // q prime
    }
    let mut rest = q;
    let mut r = 0;
    while rest > 1 {
        if !rest.is_multiple_of(p) {
            return None; // not a prime power
        }
        rest /= p;
        r += 1;
    }
    let good = match kind {
        KindArg::Paley => q % 4 == 1,
        KindArg::Peisert => p % 4 == 3 && r % 2 == 0,
    };
    if !good {
        return None;
    }
    FieldSpec::with_cap(p, r, q_cap).ok()
}

fn k4_by_method(
    field: &FieldSpec,
    kind: KindArg,
    method: K4Method,
    brute_cap: u64,
) -> Result<i128> {
    match method {
        K4Method::Fast => Ok(k4_fast(&build_graph(field, kind)?)?),
        K4Method::Brute => Ok(brute_census_with_cap(&build_graph(field, kind)?, brute_cap)?.k4()),
        K4Method::Charsum => {
            if kind != KindArg::Paley {
                bail!("--method charsum is only defined for Paley graphs");
            }
            Ok(k4_char_sum(field)?.k4_value)
        }
    }
}

fn cmd_k4_table(args: K4TableArgs) -> Result<()> {
    let q_cap = cap_value(
        args.q_cap,
        "PALEY_DESIGNS_Q_CAP",
        paley_designs::DEFAULT_Q_CAP,
    );
    let brute_cap = cap_value(
        args.brute_cap,
        "PALEY_DESIGNS_BRUTE_CAP",
        paley_designs::DEFAULT_BRUTE_CAP,
    );
    if args.check_reference {
        let rows: &[K4Row] = match args.kind {
            KindArg::Paley => paley_k4_reference(),
            KindArg::Peisert => peisert_k4_reference(),
        };
        let q_max = args.q_max.unwrap_or(u64::MAX);
        let mut mismatches = 0;
        let mut csv = String::from("label_q,q,k4,reference_k4,match\n");
        let mut json_rows = Vec::new();
        for row in rows.iter().filter(|r| r.q >= args.q_min && r.q <= q_max) {
            let field = FieldSpec::with_cap(
                smallest_prime_factor(row.q),
                prime_power_degree(row.q),
                q_cap,
            )?;
            let k4 = k4_by_method(&field, args.kind, args.method, brute_cap)?;
            let ok = k4 == row.k4;
            if !ok {
                mismatches += 1;
            }
            writeln!(csv, "{},{},{},{},{}", row.label_q, row.q, k4, row.k4, ok).unwrap();
            json_rows.push(serde_json::json!({
                "label_q": row.label_q,
                "q": row.q,
                "k4": k4 as i64,
                "reference_k4": row.k4 as i64,
                "match": ok,
            }));
        }
        match args.format {
            TableFormat::Csv => emit(&args.output, &csv)?,
            TableFormat::Json => emit(
                &args.output,
                &format!("{}\n", serde_json::to_string_pretty(&json_rows)?),
            )?,
        }
        if mismatches > 0 {
            bail!("{mismatches} reference rows did not match");
        }
        return Ok(());
    }

    let q_max = args
        .q_max
        .ok_or_else(|| anyhow!("--q-max is required without --check-reference"))?;
    let mut csv = String::from("q,k4\n");
    let mut json_rows = Vec::new();
    for q in args.q_min..=q_max {
        let Some(field) = admissible_field(args.kind, q, q_cap) else {
            continue;
        };
        let k4 = k4_by_method(&field, args.kind, args.method, brute_cap)?;
        writeln!(csv, "{q},{k4}").unwrap();
        json_rows.push(serde_json::json!({"q": q, "k4": k4 as i64}));
    }
    match args.format {
        TableFormat::Csv => emit(&args.output, &csv)?,
        TableFormat::Json => emit(
            &args.output,
            &format!("{}\n", serde_json::to_string_pretty(&json_rows)?),
        )?,
    }
    Ok(())
}

fn smallest_prime_factor(q: u64) -> u64 {
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            return p;
        }
        p += 1;
    }
    q
}

fn prime_power_degree(q: u64) -> u32 {
    let p = smallest_prime_factor(q);
    let mut rest = q;
    let mut r = 0;
    while rest > 1 {
        rest /= p;
        r += 1;
    }
    r
}

fn cmd_census(args: CensusArgs) -> Result<()> {
    let field = args.field.build()?;
    let graph = build_graph(&field, args.kind)?;
    let brute_cap = cap_value(
        args.brute_cap,
        "PALEY_DESIGNS_BRUTE_CAP",
        paley_designs::DEFAULT_BRUTE_CAP,
    );
    let census = match args.method {
        CensusMethod::Brute => brute_census_with_cap(&graph, brute_cap)?,
        CensusMethod::FromK4 => census_from_k4(field.q(), k4_fast(&graph)?)?,
    };
    let rows = census_rows(field.q(), graph.kind().label(), &census)?;
    match args.format {
        TableFormat::Csv => emit(&args.output, &census_to_csv(&rows))?,
        TableFormat::Json => emit(&args.output, &format!("{}\n", census_to_json(&rows)))?,
    }
    if args.relations {
        let report = check_linear_relations(field.q(), &census);
        for check in &report.checks {
            println!(
                "relation ({}): {} — {} [{} = {}]",
                check.name,
                if check.holds() { "PASS" } else { "FAIL" },
                check.statement,
                check.lhs,
                check.rhs
            );
        }
        if !report.all_hold() {
            bail!("relations failed: {:?}", report.failing());
        }
    }
    if args.triangles {
        let (k3, p3) = triangle_counts(&graph)?;
        println!("triangles: {k3} (= q(q-1)(q-5)/48), induced 3-paths: {p3} (= q(q-1)^2/16)");
    }
    Ok(())
}

enum FamilySpec {
    Classes(Vec<IsoClass4>),
    Small(Vec<SmallGraph>),
}

fn parse_family(spec: &str) -> Result<FamilySpec> {
    let names: Vec<String> = spec
        .split(',')
        .map(|s| s.trim().to_ascii_uppercase())
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        bail!("empty family spec");
    }
    let tilde_names = ["K4", "D", "R", "C4", "K13", "P4"];
    if names.iter().all(|n| tilde_names.contains(&n.as_str())) {
        let classes = names
            .iter()
            .map(|n| IsoClass4::from_label(n))
            .collect::<paley_designs::Result<Vec<_>>>()?;
        return Ok(FamilySpec::Classes(classes));
    }
    let smalls = names
        .iter()
        .map(|n| match n.as_str() {
            "K2" => Ok(SmallGraph::complete(2)),
            "K3" => Ok(SmallGraph::complete(3)),
            "P3" => Ok(SmallGraph::path(3)),
            other => Err(anyhow!(
                "unknown family member {other:?}: expected tilde classes (K4,D,R,C4,K13,P4) \
                 or small graphs (K2,K3,P3)"
            )),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FamilySpec::Small(smalls))
}

fn design_summary(name: &str, d: &Design) -> String {
    format!(
        "design {name}: 2-({}, {}, {}) with {} blocks — verified by exhaustive pair counting",
        d.q(),
        d.k(),
        d.lambda(),
        d.b()
    )
}

fn write_design(dir: &Path, name: &str, d: &Design, format: BlockFormat) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let (ext, content) = match format {
        BlockFormat::Json => ("json", format!("{}\n", d.to_json())),
        BlockFormat::Text => ("txt", d.to_text()),
    };
    let path = dir.join(format!("{name}.{ext}"));
    std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn appendix_text(rows: &[AppendixRow]) -> String {
    let mut out = String::from("family                     blocks  lambda  reference  status\n");
    for row in rows {
        let (reference, status) = match row.reference_lambda {
            Some(l) if row.matches_reference => (l.to_string(), "match"),
            Some(l) => (l.to_string(), "MISMATCH"),
            None => ("-".to_string(), "-"),
        };
        writeln!(
            out,
            "{:<26} {:>6}  {:>6}  {:>9}  {status}",
            row.family_label(),
            row.block_count,
            row.lambda_verified,
            reference
        )
        .unwrap();
    }
    out
}

fn cmd_designs(args: DesignsArgs) -> Result<()> {
    let field = args.field.build()?;
    let graph = build_graph(&field, args.kind)?;
    let k_cap = cap_value(
        args.k_cap,
        "PALEY_DESIGNS_K_CAP",
        paley_designs::DEFAULT_K_CAP,
    );

    if args.appendix {
        let cap = cap_value(
            args.appendix_cap,
            "PALEY_DESIGNS_APPENDIX_CAP",
            paley_designs::DEFAULT_APPENDIX_Q_CAP,
        );
        let rows = paley_designs::designs::appendix_table_with_cap(&graph, cap)?;
        debug_assert_eq!(rows.len(), 62);
        print!("{}", appendix_text(&rows));
        let mismatched = rows.iter().filter(|r| !r.matches_reference).count();
        println!(
            "62 families verified (predicted = verified for all); {mismatched} rows disagree \
             with the reference table"
        );
        if let Some(dir) = &args.output {
            std::fs::create_dir_all(dir)?;
            let path = dir.join("appendix.json");
            std::fs::write(&path, format!("{}\n", serde_json::to_string_pretty(&rows)?))?;
            println!("wrote {}", path.display());
        }
        return Ok(());
    }

    if args.corollary2 || args.complements {
        let designs = cornerstone_designs(&graph)?;
        let named = [
            ("B1", &designs.b1),
            ("B2", &designs.b2),
            ("B3", &designs.b3),
            ("B4", &designs.b4),
        ];
        if args.corollary2 {
            for (name, d) in named {
                println!("{}", design_summary(name, d));
                if let Some(dir) = &args.output {
                    write_design(dir, name, d, args.format)?;
                }
            }
            return Ok(());
        }
        let stated = complement_reference_lambdas(field.q());
        for ((name, d), stated) in named.into_iter().zip(stated) {
            let comp = complement_design(d)?;
            let flag = if comp.lambda() == stated {
                "match"
            } else {
                "MISMATCH"
            };
            println!(
                "{}; stated closed form gives {stated} ({flag})",
                design_summary(&format!("complement of {name}"), &comp)
            );
            if let Some(dir) = &args.output {
                write_design(dir, &format!("{name}-complement"), &comp, args.format)?;
            }
        }
        return Ok(());
    }

    let spec = args.family.as_deref().ok_or_else(|| {
        anyhow!("choose one of --family, --corollary2, --appendix, --complements")
    })?;
    let family = match parse_family(spec)? {
        FamilySpec::Classes(classes) => BlockFamily::from_classes(&classes)?,
        FamilySpec::Small(graphs) => BlockFamily::new(graphs)?,
    };
    let design = build_blocks_with_cap(&graph, &family, k_cap)?;
    println!("{}", design_summary(spec, &design));
    if let Some(dir) = &args.output {
        let name = spec.replace(',', "+");
        write_design(dir, &name, &design, args.format)?;
    }
    Ok(())
}

fn cmd_analysis(args: AnalysisArgs) -> Result<()> {
    let field = args.field.build()?;
    let report = analysis_report(&field, args.charsum_cap)?;
    match args.format {
        TableFormat::Csv => emit(
            &args.output,
            &analysis_to_csv(std::slice::from_ref(&report)),
        )?,
        TableFormat::Json => emit(
            &args.output,
            &format!("{}\n", serde_json::to_string_pretty(&report)?),
        )?,
    }
    if !report.interval_contains_k4 {
        bail!("the k4 interval does not contain the census value");
    }

    if args.thomason_samples > 0 {
        let graph = Graph::paley(&field)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b9);
        let verts: Vec<usize> = (0..graph.q()).collect();
        let mut worst_slack = None::<i128>;
        for _ in 0..args.thomason_samples {
            let size = rng.gen_range(0..=graph.q());
            let subset: Vec<usize> = verts.choose_multiple(&mut rng, size).copied().collect();
            let rep = thomason_check(&graph, &subset)?;
            if !rep.holds {
                bail!(
                    "edge-distribution bound violated on a subset of size {}",
                    rep.subset_size
                );
            }
            let slack = rep.rhs_scaled - rep.lhs_scaled;
            worst_slack = Some(worst_slack.map_or(slack, |w| w.min(slack)));
        }
        println!(
            "edge-distribution bound held on {} seeded subsets (min scaled slack {})",
            args.thomason_samples,
            worst_slack.unwrap_or(0)
        );
    }
    Ok(())
}
