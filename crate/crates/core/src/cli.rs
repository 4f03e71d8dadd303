//! Command-line front end. Machine-readable JSON goes to standard output,
//! human summaries to standard error.
//!
//! Exit codes: 0 success, 1 promise violation, 2 no containment, 64 usage or
//! input error, 65 budget exceeded, 70 failed self-check.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::aip::{solve_tractable_pcsp, Hypergraph};
use crate::connectivity::{is_bklm_connected, reconfiguration_graph};
use crate::error::{Error, Result};
use crate::gadget::{
    build_gadget, count_2to1_maps, decode_and_check, gen_planted_rich_instance, gen_rich_instance,
    gen_sampled_instance, has_perfect_labelling, DistributionChoice, GadgetMode, GadgetOptions, LabelCoverInstance,
    Labelling, SideConditions, DEFAULT_GADGET_BUDGET,
};
use crate::mmsnp::{check_expansion_free, classify, find_recolouring, mono_clique_family, PatternFamily, Verdict};
use crate::oracle::{pcsp_decide_brute, pmmsnp_decide_brute, DEFAULT_BUDGET};
use crate::reduce::{build_template_pair, girth_exceeds, sigma_reduce, tau_reduce, TemplatePair};
use crate::structure::{FiniteRelation, NamedRelation, RelStructure};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROMISE_VIOLATION: i32 = 1;
pub const EXIT_NO_CONTAINMENT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_BUDGET: i32 = 65;
pub const EXIT_SELF_CHECK: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "pmmsnp", version, about = "Promise forbidden-pattern problems, promise CSPs and their reductions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the monochromatic clique problem (c, d, k, ℓ).
    Classify { c: usize, d: usize, k: usize, l: usize },
    /// Build template pairs and translate instances between the two sides.
    Reduce {
        #[command(subcommand)]
        op: ReduceOp,
    },
    /// Check whether a structure has girth above a bound.
    Girth {
        #[arg(long)]
        bound: usize,
        structure: PathBuf,
    },
    /// Solve a tractable clique-colouring PCSP instance given as a hypergraph.
    Solve {
        #[command(flatten)]
        params: Params,
        hypergraph: PathBuf,
    },
    /// Brute-force deciders.
    Oracle {
        #[command(subcommand)]
        op: OracleOp,
    },
    /// Solution-space connectivity of a relation.
    Connectivity {
        #[command(subcommand)]
        op: ConnectivityOp,
    },
    /// Search for a recolouring between two pattern families.
    Recolour {
        #[command(flatten)]
        families: FamilyArgs,
    },
    /// Build the label-cover gadget hypergraph.
    Gadget(GadgetArgs),
    /// Graph → hypergraph → colouring on the tractable side.
    Pipeline {
        graph: PathBuf,
        #[command(flatten)]
        params: Params,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct Params {
    #[arg(long)]
    c: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// Monochromatic clique families as C:K:D:L.
    #[arg(long, conflicts_with_all = ["source", "target"])]
    cliques: Option<String>,
    /// Source pattern family JSON.
    #[arg(long, requires = "target")]
    source: Option<PathBuf>,
    /// Target pattern family JSON.
    #[arg(long, requires = "source")]
    target: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum ReduceOp {
    /// Print the template pair (S, T).
    Templates {
        #[command(flatten)]
        families: FamilyArgs,
    },
    /// Map a pattern-problem instance to a PCSP instance.
    Sigma {
        instance: PathBuf,
        #[command(flatten)]
        families: FamilyArgs,
        /// Include the full `~` relation.
        #[arg(long)]
        materialize_sim: bool,
    },
    /// Map a high-girth PCSP instance back to a pattern-problem instance.
    Tau {
        instance: PathBuf,
        #[command(flatten)]
        families: FamilyArgs,
        #[arg(long)]
        girth: usize,
    },
}

#[derive(Subcommand, Debug)]
enum OracleOp {
    Pcsp {
        instance: PathBuf,
        #[arg(long)]
        promise: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    Pmmsnp {
        instance: PathBuf,
        #[command(flatten)]
        families: FamilyArgs,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
}

#[derive(Args, Debug)]
struct RelationArgs {
    /// Named relation such as nae:2:3, kinl:2:4, lo:3:3, urel:3:2:2.
    #[arg(long, conflicts_with = "rel_file", required_unless_present = "rel_file")]
    rel: Option<String>,
    /// Relation JSON file.
    #[arg(long)]
    rel_file: Option<PathBuf>,
    /// Emit Graphviz DOT instead of JSON.
    #[arg(long)]
    dot: bool,
}

#[derive(Subcommand, Debug)]
enum ConnectivityOp {
    Reconf(RelationArgs),
    Bklm(RelationArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InstanceKind {
    /// Rich instance with a planted perfect labelling.
    Planted,
    /// Latin-square rich instance.
    Latin,
    /// Random instance without richness.
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DistributionArg {
    /// Strict when n ≥ |R|, thinned otherwise.
    Auto,
    Strict,
    Thinned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Exhaustive,
    Sample { count: usize, seed: Option<u64> },
}

impl FromStr for ModeArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.parse::<u64>().map_err(|_| format!("invalid number {x:?} in mode {s:?}"));
        match parts.as_slice() {
            ["exhaustive"] => Ok(ModeArg::Exhaustive),
            ["sample", count] => Ok(ModeArg::Sample { count: num(count)? as usize, seed: None }),
            ["sample", count, seed] => Ok(ModeArg::Sample { count: num(count)? as usize, seed: Some(num(seed)?) }),
            _ => Err(format!("mode must be exhaustive, sample:COUNT or sample:COUNT:SEED, got {s:?}")),
        }
    }
}

#[derive(Args, Debug)]
struct GadgetArgs {
    /// Optional action word; `gadget build ...` and `gadget ...` are the same.
    #[arg(value_parser = ["build"])]
    action: Option<String>,
    /// Label parameter: U-labels in [2n], V-labels in [n].
    #[arg(long)]
    n: usize,
    /// Number of U-vertices.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Symmetric relation R, e.g. nae:2:2.
    #[arg(long, alias = "relation")]
    rel: String,
    #[arg(long, default_value = "exhaustive")]
    mode: ModeArg,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Label Cover generator; defaults to planted when all 2-to-1 maps can be
    /// listed and to sampled otherwise.
    #[arg(long, value_enum)]
    instance: Option<InstanceKind>,
    /// Read the Label Cover instance from a JSON file instead.
    #[arg(long, conflicts_with = "instance")]
    instance_file: Option<PathBuf>,
    /// |V| for sampled instances.
    #[arg(long, default_value_t = 4)]
    v: usize,
    /// U-degree for sampled instances (defaults to |V|).
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    distribution: DistributionArg,
    #[arg(long, default_value_t = DEFAULT_GADGET_BUDGET)]
    budget: u128,
    /// Write the hypergraph here; the summary then goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Provenance sidecar path (defaults to OUT.provenance.json).
    #[arg(long, requires = "out")]
    provenance: Option<PathBuf>,
}

/// Outcome of a command that is not an error: exit code plus optional
/// standard-output payload.
struct Outcome {
    code: i32,
    stdout: String,
}

impl Outcome {
    fn json<T: Serialize>(code: i32, value: &T) -> Result<Self> {
        let mut stdout = serde_json::to_string_pretty(value)?;
        stdout.push('\n');
        Ok(Outcome { code, stdout })
    }

    fn text(code: i32, stdout: String) -> Self {
        Outcome { code, stdout }
    }
}

/// Maps a library error to an exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::PromiseViolation(_) => EXIT_PROMISE_VIOLATION,
        Error::MissingContainment { .. } => EXIT_NO_CONTAINMENT,
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, stderr) {
        Ok(out) => {
            let _ = stdout.write_all(out.stdout.as_bytes());
            out.code
        }
        Err(e) => {
            if let Error::PromiseViolation(reason) = &e {
                let _ = writeln!(stdout, "{}", json!({"result": "PROMISE_VIOLATION", "reason": reason}));
            }
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_input(path)?).map_err(|e| Error::structure(format!("{}: {e}", path.display())))
}

fn parse_cliques(spec: &str) -> Result<[usize; 4]> {
    let parts: Vec<usize> = spec
        .split(':')
        .map(|p| p.parse::<usize>().map_err(|_| Error::param(format!("invalid clique spec {spec:?}"))))
        .collect::<Result<_>>()?;
    let arr: [usize; 4] =
        parts.try_into().map_err(|_| Error::param(format!("clique spec must be C:K:D:L, got {spec:?}")))?;
    if arr.contains(&0) {
        return Err(Error::param("clique spec entries must be positive"));
    }
    Ok(arr)
}

fn load_families(args: &FamilyArgs) -> Result<(PatternFamily, PatternFamily)> {
    match (&args.cliques, &args.source, &args.target) {
        (Some(spec), _, _) => {
            let [c, k, d, l] = parse_cliques(spec)?;
            Ok((mono_clique_family(c, k), mono_clique_family(d, l)))
        }
        (None, Some(s), Some(t)) => Ok((read_json(s)?, read_json(t)?)),
        _ => Err(Error::param("give either --cliques C:K:D:L or both --source and --target")),
    }
}

fn load_pair(args: &FamilyArgs) -> Result<TemplatePair> {
    let (f, g) = load_families(args)?;
    build_template_pair(&[f], &[g])
}

fn load_relation(args: &RelationArgs) -> Result<FiniteRelation> {
    match (&args.rel, &args.rel_file) {
        (Some(spec), _) => spec.parse::<NamedRelation>()?.relation(),
        (None, Some(path)) => read_json(path),
        _ => Err(Error::param("give --rel or --rel-file")),
    }
}

fn dispatch(command: Command, stderr: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Classify { c, d, k, l } => {
            let v = classify(c, d, k, l)?;
            let _ = writeln!(stderr, "(c,d,k,ℓ) = ({c},{d},{k},{l}): {:?}, c(k−1) = {}", v.verdict, v.boundary);
            let code = if v.verdict == Verdict::NoContainment { EXIT_NO_CONTAINMENT } else { EXIT_OK };
            Outcome::json(code, &v)
        }
        Command::Reduce { op } => reduce(op, stderr),
        Command::Girth { bound, structure } => {
            let s: RelStructure = read_json(&structure)?;
            let report = girth_exceeds(&s, bound);
            let _ = writeln!(stderr, "girth above {bound}: {}", report.verdict);
            Outcome::json(EXIT_OK, &report)
        }
        Command::Solve { params, hypergraph } => {
            let h: Hypergraph = read_json(&hypergraph)?;
            let colouring = solve(&h, params)?;
            let _ = writeln!(stderr, "coloured {} variables, {} edges", h.variables(), h.edges().len());
            Outcome::json(EXIT_OK, &json!({ "colouring": colouring }))
        }
        Command::Oracle { op } => match op {
            OracleOp::Pcsp { instance, promise, target, budget } => {
                let i: RelStructure = read_json(&instance)?;
                let a: RelStructure = read_json(&promise)?;
                let b: RelStructure = read_json(&target)?;
                let out = pcsp_decide_brute(&i, &a, &b, budget)?;
                let _ = writeln!(stderr, "{:?}", out.verdict);
                Outcome::json(EXIT_OK, &out)
            }
            OracleOp::Pmmsnp { instance, families, budget } => {
                let x: RelStructure = read_json(&instance)?;
                let (f, g) = load_families(&families)?;
                let out = pmmsnp_decide_brute(&x, &f, &g, budget)?;
                let _ = writeln!(stderr, "{:?}", out.verdict);
                Outcome::json(EXIT_OK, &out)
            }
        },
        Command::Connectivity { op } => connectivity(op, stderr),
        Command::Recolour { families } => {
            let (f, g) = load_families(&families)?;
            match find_recolouring(&f, &g)? {
                Some(r) => {
                    let _ = writeln!(stderr, "recolouring found");
                    Outcome::json(EXIT_OK, &json!({ "recolouring": r.table }))
                }
                None => {
                    let _ = writeln!(stderr, "no recolouring exists");
                    Outcome::json(EXIT_NO_CONTAINMENT, &json!({ "recolouring": null }))
                }
            }
        }
        Command::Gadget(args) => gadget(args, stderr),
        Command::Pipeline { graph, params } => pipeline(&graph, params, stderr),
    }
}

fn solve(h: &Hypergraph, p: Params) -> Result<Vec<usize>> {
    match solve_tractable_pcsp(h, p.c, p.d, p.k, p.l) {
        Err(Error::NotTractable(msg)) => {
            let v = classify(p.c, p.d, p.k, p.l)?;
            if v.verdict == Verdict::NoContainment {
                return Err(Error::MissingContainment { index: 0 });
            }
            Err(Error::NotTractable(format!("{msg}; see the `gadget` command for the hard side")))
        }
        other => other,
    }
}

fn reduce(op: ReduceOp, stderr: &mut dyn Write) -> Result<Outcome> {
    match op {
        ReduceOp::Templates { families } => {
            let pair = load_pair(&families)?;
            let _ = writeln!(
                stderr,
                "S has {} elements, T has {} elements, {} derived symbols",
                pair.source.domain_size(),
                pair.target.domain_size(),
                pair.symbols.len()
            );
            Outcome::json(EXIT_OK, &pair)
        }
        ReduceOp::Sigma { instance, families, materialize_sim } => {
            let x: RelStructure = read_json(&instance)?;
            let pair = load_pair(&families)?;
            let s = sigma_reduce(&x, &pair, materialize_sim)?;
            let _ = writeln!(stderr, "σ instance with {} tuples", s.tuple_count());
            Outcome::json(EXIT_OK, &s)
        }
        ReduceOp::Tau { instance, families, girth } => {
            let i: RelStructure = read_json(&instance)?;
            let pair = load_pair(&families)?;
            let t = tau_reduce(&i, &pair, girth)?;
            let _ = writeln!(stderr, "τ instance with {} tuples", t.tuple_count());
            Outcome::json(EXIT_OK, &t)
        }
    }
}

fn connectivity(op: ConnectivityOp, stderr: &mut dyn Write) -> Result<Outcome> {
    match op {
        ConnectivityOp::Reconf(args) => {
            let rel = load_relation(&args)?;
            let g = reconfiguration_graph(&rel);
            let connected = g.is_connected();
            let _ = writeln!(stderr, "{} nodes, {} edges, reconfigurable: {connected}", g.nodes.len(), g.edges.len());
            if args.dot {
                return Ok(Outcome::text(EXIT_OK, g.to_dot()));
            }
            Outcome::json(EXIT_OK, &json!({ "reconfigurable": connected, "graph": g }))
        }
        ConnectivityOp::Bklm(args) => {
            let rel = load_relation(&args)?;
            let report = is_bklm_connected(&rel)?;
            let _ = writeln!(stderr, "BKLM-connected: {} (per split: {:?})", report.connected, report.per_split);
            if args.dot {
                return Ok(Outcome::text(EXIT_OK, report.graphs.iter().map(|g| g.to_dot()).collect()));
            }
            Outcome::json(EXIT_OK, &report)
        }
    }
}

fn side_condition_summary(sc: &SideConditions) -> String {
    let flags = [
        ("support", sc.support_preserved),
        ("α-balance", sc.alpha_balanced),
        ("equal marginals", sc.marginals_equal),
        ("rich", sc.rich),
        ("biregular", sc.biregular),
    ];
    let pick = |want: bool| flags.iter().filter(|f| f.1 == want).map(|f| f.0).collect::<Vec<_>>().join(", ");
    format!("hold [{}], fail [{}]", pick(true), pick(false))
}

fn gadget(args: GadgetArgs, stderr: &mut dyn Write) -> Result<Outcome> {
    let rel = args.rel.parse::<NamedRelation>()?.relation()?;
    let listable = args.n > 0 && count_2to1_maps(args.n) <= 100_000;
    let (inst, planted): (LabelCoverInstance, Option<Labelling>) = match (&args.instance_file, args.instance) {
        (Some(path), _) => (read_json(path)?, None),
        (None, Some(InstanceKind::Planted)) => {
            let (i, l) = gen_planted_rich_instance(args.n, args.m)?;
            (i, Some(l))
        }
        (None, Some(InstanceKind::Latin)) => (gen_rich_instance(args.n, args.m)?, None),
        (None, None) if listable => {
            let (i, l) = gen_planted_rich_instance(args.n, args.m)?;
            (i, Some(l))
        }
        (None, _) => (gen_sampled_instance(args.n, args.m, args.v, args.degree.unwrap_or(args.v), args.seed)?, None),
    };
    let mode = match args.mode {
        ModeArg::Exhaustive => GadgetMode::Exhaustive,
        ModeArg::Sample { count, seed } => GadgetMode::Sample { count, seed: seed.unwrap_or(args.seed) },
    };
    let distribution = match args.distribution {
        DistributionArg::Auto if inst.n() < rel.len() => {
            let _ = writeln!(stderr, "n = {} < |R| = {}: using thinned rounding", inst.n(), rel.len());
            DistributionChoice::Thinned
        }
        DistributionArg::Auto | DistributionArg::Strict => DistributionChoice::Strict,
        DistributionArg::Thinned => DistributionChoice::Thinned,
    };
    let opts = GadgetOptions { mode, distribution, budget: args.budget };
    let h = build_gadget(&inst, &rel, &opts)?;
    let audit = h.audit(&inst)?;
    let labelling = match planted {
        Some(l) => Some(l),
        None => has_perfect_labelling(&inst, args.budget).ok().flatten(),
    };
    let completeness = match &labelling {
        Some(l) => Some(decode_and_check(&inst, l, &rel, &h)?),
        None => None,
    };
    let _ = writeln!(
        stderr,
        "classes: {}; edges: {}; μ audit {}; completeness {}; side conditions: {}",
        h.class_count,
        h.edges.len(),
        if audit { "passed" } else { "FAILED" },
        match completeness {
            Some(true) => "passed for the perfect labelling",
            Some(false) => "FAILED",
            None => "not checked (no perfect labelling known)",
        },
        side_condition_summary(&h.side_conditions)
    );
    if let GadgetMode::Sample { .. } = mode {
        let _ = writeln!(stderr, "{} draws attempted, {} realised", h.attempts, h.realised);
    }
    let code = if audit && completeness != Some(false) { EXIT_OK } else { EXIT_SELF_CHECK };
    let hypergraph = h.to_hypergraph();
    match args.out {
        None => Outcome::json(code, &hypergraph),
        Some(out) => {
            let side = args.provenance.unwrap_or_else(|| {
                let mut p = out.clone().into_os_string();
                p.push(".provenance.json");
                PathBuf::from(p)
            });
            fs::write(&out, serde_json::to_string_pretty(&hypergraph)? + "\n")?;
            fs::write(&side, serde_json::to_string_pretty(&h.provenance())? + "\n")?;
            Outcome::json(
                code,
                &json!({
                    "classes": h.class_count,
                    "edges": h.edges.len(),
                    "attempts": h.attempts,
                    "realised": h.realised,
                    "audit": audit,
                    "completeness": completeness,
                    "side_conditions": h.side_conditions,
                    "hypergraph": out,
                    "provenance": side,
                }),
            )
        }
    }
}

fn pipeline(graph: &Path, p: Params, stderr: &mut dyn Write) -> Result<Outcome> {
    let x: RelStructure = read_json(graph)?;
    let v = classify(p.c, p.d, p.k, p.l)?;
    match v.verdict {
        Verdict::NoContainment => return Err(Error::MissingContainment { index: 0 }),
        Verdict::HardUnderRich2to1 => {
            return Err(Error::NotTractable(format!(
                "(c,d,k,ℓ) = ({},{},{},{}) is on the hard side; see the `gadget` command",
                p.c, p.d, p.k, p.l
            )))
        }
        Verdict::TractableAip => {}
    }
    let (f, g) = (mono_clique_family(p.c, p.k), mono_clique_family(p.d, p.l));
    let pair = build_template_pair(&[f], std::slice::from_ref(&g))?;
    let s = sigma_reduce(&x, &pair, false)?;
    let rel = s.relation(&pair.symbols[0].name).expect("σ output has the derived symbol");
    let h = Hypergraph::from_relation(s.domain_size(), rel)?;
    let colouring = solve(&h, p)?;
    let verified = check_expansion_free(&x, &colouring, &g)?;
    let _ = writeln!(stderr, "{} hyperedges; colouring free of monochromatic K_{}: {verified}", h.edges().len(), p.l);
    Outcome::json(
        if verified { EXIT_OK } else { EXIT_SELF_CHECK },
        &json!({ "colouring": colouring, "hyperedges": h.edges().len(), "verified": verified }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("pmmsnp").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn classify_exit_codes() {
        let (code, out, _) = run_args(&["classify", "2", "2", "3", "4"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"TractableAIP\""));
        let (code, out, _) = run_args(&["classify", "3", "6", "2", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("HardUnderRich2to1"));
        let (code, out, _) = run_args(&["classify", "3", "2", "2", "2"]);
        assert_eq!(code, 2);
        assert!(out.contains("NoContainment"));
        assert_eq!(run_args(&["classify", "x", "2", "2", "2"]).0, 64);
        assert_eq!(run_args(&["classify", "0", "2", "2", "2"]).0, 64);
        assert_eq!(run_args(&["frobnicate"]).0, 64);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("exhaustive".parse::<ModeArg>().unwrap(), ModeArg::Exhaustive);
        assert_eq!("sample:10:3".parse::<ModeArg>().unwrap(), ModeArg::Sample { count: 10, seed: Some(3) });
        assert_eq!("sample:10".parse::<ModeArg>().unwrap(), ModeArg::Sample { count: 10, seed: None });
        assert!("sample".parse::<ModeArg>().is_err());
    }

    #[test]
    fn gadget_rejects_bad_relation() {
        assert_eq!(run_args(&["gadget", "--n", "1", "--rel", "nae:x"]).0, 64);
    }

    #[test]
    fn connectivity_dot() {
        let (code, out, _) = run_args(&["connectivity", "reconf", "--rel", "lo:3:3", "--dot"]);
        assert_eq!(code, 0);
        assert_eq!(out.matches(" -- ").count(), 21);
    }
}
