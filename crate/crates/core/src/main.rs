use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tmb::io::{self, InstanceFile, Provenance};
use tmb::reductions::{
    gen_single_source_gadget, gen_two_source_gadget, reachfast_to_tmb, regenerate,
    tmb_to_reachfast, witness_labeling, Assignment, GadgetParams,
};
use tmb::{
    approx_ft_mw, brute_force, distance, objective, path_stats, solve_exact, BruteForceLimits,
    Labeling, Measure, Schedule, SolveResult, Status, TmbError,
};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  file could not be read or written
  2  invalid command line
  3  input could not be parsed
  4  input violates a structural or parameter constraint
  5  no exact polynomial regime applies (use --approx or --oracle)
  6  labeling or instance is infeasible
  7  exhaustive search space exceeds the configured limits
  8  a vertex is temporally unreachable";

#[derive(Parser)]
#[command(name = "tmb", version, about = "Temporal multi-broadcast scheduling", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve with the exact solver of the detected regime.
    Solve(SolveArgs),
    /// Exhaustive exact solve within limits.
    Oracle(OracleArgs),
    /// Distance between two vertices with a witness path.
    Distance(DistanceArgs),
    /// Check feasibility of a labeling and recompute its objective.
    Verify(VerifyArgs),
    /// Generate a hardness gadget from a DIMACS formula.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Convert between the label-budget and label-shifting formulations.
    Convert(ConvertArgs),
    /// Witness labeling of a gadget for a satisfying assignment.
    Witness(WitnessArgs),
    /// Graphviz rendering of an instance.
    ExportDot(ExportDotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Ea,
    Ld,
    Ft,
    St,
    Mh,
    Mw,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Ea => Measure::Ea,
            MeasureArg::Ld => Measure::Ld,
            MeasureArg::Ft => Measure::Ft,
            MeasureArg::St => Measure::St,
            MeasureArg::Mh => Measure::Mh,
            MeasureArg::Mw => Measure::Mw,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GadgetMeasureArg {
    Ft,
    St,
    Mh,
    Mw,
}

impl From<GadgetMeasureArg> for Measure {
    fn from(m: GadgetMeasureArg) -> Self {
        match m {
            GadgetMeasureArg::Ft => Measure::Ft,
            GadgetMeasureArg::St => Measure::St,
            GadgetMeasureArg::Mh => Measure::Mh,
            GadgetMeasureArg::Mw => Measure::Mw,
        }
    }
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = 2_000_000)]
    max_labelings: u128,
    #[arg(long, default_value_t = 16)]
    max_edges: usize,
    #[arg(long, default_value_t = 16)]
    max_tau: u64,
}

impl LimitArgs {
    fn limits(&self) -> BruteForceLimits {
        BruteForceLimits {
            max_edges: self.max_edges,
            max_tau: self.max_tau,
            max_labelings: self.max_labelings,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    measure: MeasureArg,
    #[arg(long = "in")]
    input: PathBuf,
    /// Write the labeling document here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the FT/MW approximation (single source).
    #[arg(long, conflicts_with = "oracle")]
    approx: bool,
    /// Fall back to exhaustive search when no exact regime applies.
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum)]
    measure: MeasureArg,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Args)]
struct DistanceArgs {
    #[arg(long, value_enum)]
    measure: MeasureArg,
    /// Vertex name or index.
    #[arg(long)]
    from: String,
    /// Vertex name or index.
    #[arg(long)]
    to: String,
    #[arg(long = "in")]
    input: PathBuf,
    /// Defaults to the full temporal graph.
    #[arg(long)]
    labeling: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    labeling: PathBuf,
    #[arg(long, value_enum)]
    measure: MeasureArg,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Single-source gadget for FT, ST, MH or MW.
    Sat {
        #[arg(long, value_enum)]
        measure: GadgetMeasureArg,
        #[arg(long)]
        cnf: PathBuf,
        #[arg(short = 'a')]
        a: u64,
        /// Only used by MW.
        #[arg(short = 'b', default_value_t = 2)]
        b: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Multi-source feasibility gadget for a 3-SAT formula.
    Twosource {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long, default_value_t = 2)]
        sources: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Formulation {
    Reachfast,
    Tmb,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long, value_enum)]
    to: Formulation,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long)]
    cnf: PathBuf,
    /// One character per variable, `1` for true and `0` for false.
    #[arg(long)]
    assignment: String,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExportDotArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    labeling: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Io(PathBuf, std::io::Error),
    Tmb(TmbError),
    /// A completed check with a negative verdict; the report is still printed.
    Infeasible(Value),
}

impl From<TmbError> for Failure {
    fn from(e: TmbError) -> Self {
        Failure::Tmb(e)
    }
}

fn exit_code(e: &TmbError) -> u8 {
    match e {
        TmbError::Parse { .. } => 3,
        TmbError::NoTractableRegime(_) => 5,
        TmbError::SearchSpaceTooLarge(_) => 7,
        TmbError::Unreachable { .. } => 8,
        _ => 4,
    }
}

type Outcome = Result<Value, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn load_instance(path: &Path) -> Result<InstanceFile, Failure> {
    Ok(io::parse_instance_file(&read(path)?)?)
}

fn load_labeling(
    path: &Path,
    file: &InstanceFile,
) -> Result<(Labeling, Option<Provenance>), Failure> {
    Ok(io::parse_labeling_for(&read(path)?, &file.instance)?)
}

fn report(result: &SolveResult, file: &InstanceFile) -> Value {
    let distances: Vec<Value> = result
        .per_source_distances
        .iter()
        .map(|(&(s, v), d)| json!({"source": file.name(s), "target": file.name(v), "value": d.value}))
        .collect();
    let mut out = json!({
        "measure": result.measure.tag(),
        "objective": result.objective,
        "status": result.status.tag(),
        "labels": result.labeling.sets(),
        "distances": distances,
    });
    if let Some(b) = result.certificate {
        out["certificate"] = json!({
            "ft_min": b.ft_min, "ft_max": b.ft_max, "mw_min": b.mw_min, "mw_max": b.mw_max,
        });
    }
    out
}

fn emit_labeling(out: Option<&Path>, result: &SolveResult, solver: &str) -> Result<(), Failure> {
    if let Some(path) = out {
        let prov = Provenance {
            measure: Some(result.measure.tag().into()),
            objective: result.objective,
            solver: solver.into(),
        };
        write(path, &io::serialize_labeling(&result.labeling, Some(&prov)))?;
    }
    Ok(())
}

fn finish(result: &SolveResult, mut value: Value, regime: &str) -> Outcome {
    value["regime"] = json!(regime);
    if result.status == Status::Infeasible {
        Err(Failure::Infeasible(value))
    } else {
        Ok(value)
    }
}

fn solve(args: &SolveArgs) -> Outcome {
    let file = load_instance(&args.input)?;
    let measure: Measure = args.measure.into();
    let (result, regime, solver) = if args.approx {
        (
            approx_ft_mw(&file.instance, measure)?,
            "approximation",
            "approx",
        )
    } else {
        match solve_exact(&file.instance, measure) {
            Ok((regime, result)) => (result, regime.tag(), "exact"),
            Err(TmbError::NoTractableRegime(_)) if args.oracle => (
                brute_force(&file.instance, measure, args.limits.limits())?,
                "oracle",
                "oracle",
            ),
            Err(e) => return Err(e.into()),
        }
    };
    emit_labeling(args.out.as_deref(), &result, solver)?;
    finish(&result, report(&result, &file), regime)
}

fn oracle(args: &OracleArgs) -> Outcome {
    let file = load_instance(&args.input)?;
    let result = brute_force(&file.instance, args.measure.into(), args.limits.limits())?;
    emit_labeling(args.out.as_deref(), &result, "oracle")?;
    finish(&result, report(&result, &file), "oracle")
}

fn distance_cmd(args: &DistanceArgs) -> Outcome {
    let file = load_instance(&args.input)?;
    let inst = &file.instance;
    let (u, v) = (file.resolve(&args.from)?, file.resolve(&args.to)?);
    let labeling = match &args.labeling {
        Some(p) => Some(load_labeling(p, &file)?.0),
        None => None,
    };
    let schedule = match &labeling {
        Some(l) => Schedule::Labeled(l),
        None => Schedule::Full { tau: inst.tau },
    };
    let measure: Measure = args.measure.into();
    let d = distance(inst, &schedule, u, v, measure)?;
    let Some(path) = d.witness else {
        return Err(TmbError::Unreachable { from: u, target: v }.into());
    };
    let stats = path_stats(&path, &inst.traversal)?;
    let vertices = path.vertices(&inst.graph)?;
    let steps: Vec<Value> = path
        .steps
        .iter()
        .zip(vertices.windows(2))
        .map(|(s, w)| {
            json!({
                "from": file.name(w[0]),
                "to": file.name(w[1]),
                "departure": s.departure,
                "arrival": s.departure + inst.weight(s.edge, s.departure),
            })
        })
        .collect();
    Ok(json!({
        "from": file.name(u),
        "to": file.name(v),
        "measure": measure.tag(),
        "value": d.value,
        "path": steps,
        "departure": stats.departure,
        "arrival": stats.arrival,
    }))
}

fn verify(args: &VerifyArgs) -> Outcome {
    let file = load_instance(&args.input)?;
    let (labeling, prov) = load_labeling(&args.labeling, &file)?;
    let measure: Measure = args.measure.into();
    let value = objective(&file.instance, &labeling, measure)?;
    let mut out = json!({
        "feasible": value.is_some(),
        "measure": measure.tag(),
        "objective": value,
    });
    if let Some(claimed) = prov.and_then(|p| p.objective) {
        out["claimed_objective"] = json!(claimed);
    }
    match value {
        Some(_) => Ok(out),
        None => Err(Failure::Infeasible(out)),
    }
}

fn gen(cmd: &GenCommand) -> Outcome {
    let (gadget, out) = match cmd {
        GenCommand::Sat {
            measure,
            cnf,
            a,
            b,
            out,
        } => {
            let formula = io::parse_cnf(&read(cnf)?)?;
            let params = GadgetParams::new((*measure).into(), *a, *b);
            (gen_single_source_gadget(&formula, params)?, out)
        }
        GenCommand::Twosource { cnf, sources, out } => {
            let formula = io::parse_cnf(&read(cnf)?)?;
            (gen_two_source_gadget(&formula, *sources)?, out)
        }
    };
    write(
        out,
        &io::serialize_instance_file(&InstanceFile::from_gadget(&gadget)),
    )?;
    Ok(json!({
        "vertices": gadget.instance.vertex_count(),
        "edges": gadget.instance.edge_count(),
        "tau": gadget.instance.tau,
        "yes_value": gadget.yes_value,
        "no_value_lower_bound": gadget.no_value_lower_bound,
    }))
}

fn convert(args: &ConvertArgs) -> Outcome {
    let text = read(&args.input)?;
    match args.to {
        Formulation::Reachfast => {
            let inst = io::parse_instance(&text)?;
            write(
                &args.out,
                &io::serialize_reachfast(&tmb_to_reachfast(&inst)),
            )?;
        }
        Formulation::Tmb => {
            let rf = io::parse_reachfast(&text)?;
            write(&args.out, &io::serialize_instance(&reachfast_to_tmb(&rf)?))?;
        }
    }
    Ok(json!({"written": args.out.display().to_string()}))
}

fn witness(args: &WitnessArgs) -> Outcome {
    let formula = io::parse_cnf(&read(&args.cnf)?)?;
    let file = load_instance(&args.input)?;
    let meta = file
        .gadget
        .as_ref()
        .ok_or_else(|| TmbError::Validation("instance carries no gadget metadata".into()))?;
    let gadget = regenerate(&formula, &meta.kind)?;
    if gadget.instance != file.instance {
        return Err(
            TmbError::Validation("gadget was not generated from this formula".into()).into(),
        );
    }
    let assignment = Assignment::from_bits(&args.assignment)?;
    let labeling = witness_labeling(&gadget, &assignment)?;
    let prov = Provenance {
        measure: None,
        objective: None,
        solver: "witness".into(),
    };
    write(&args.out, &io::serialize_labeling(&labeling, Some(&prov)))?;
    Ok(json!({"labels": labeling.total_labels(), "written": args.out.display().to_string()}))
}

fn export_dot(args: &ExportDotArgs) -> Outcome {
    let file = load_instance(&args.input)?;
    let labeling = match &args.labeling {
        Some(p) => Some(load_labeling(p, &file)?.0),
        None => None,
    };
    write(&args.out, &io::to_dot(&file, labeling.as_ref()))?;
    Ok(json!({"written": args.out.display().to_string()}))
}

/// A closed stdout (e.g. piped into `head`) is not an error.
fn print(value: &Value) {
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => oracle(a),
        Command::Distance(a) => distance_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Gen(c) => gen(c),
        Command::Convert(a) => convert(a),
        Command::Witness(a) => witness(a),
        Command::ExportDot(a) => export_dot(a),
    };
    match outcome {
        Ok(v) => {
            print(&v);
            ExitCode::SUCCESS
        }
        Err(Failure::Infeasible(v)) => {
            print(&v);
            eprintln!("error: infeasible");
            ExitCode::from(6)
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(1)
        }
        Err(Failure::Tmb(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
