use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use thetanull::bielliptic::{classify_bielliptic, invariants, witness_quadruples};
use thetanull::f2::F2Vector;
use thetanull::hyperelliptic::{
    class_counts, std_labeling, trans_config_partitions, vanishing_thetanulls, HyperellipticError,
};
use thetanull::orbits::{
    census, classify, classify_by_delta, classify_with_base, delta_parities, invariants_with_base, OrbitError,
    Quadruple, QuadrupleParseError, MAX_BFS_GENUS,
};
use thetanull::quadform::{even_count, odd_count, parity, Characteristic, Parity};
use thetanull::theta::{
    block_diag_split_check, theta_constant, transform_modulus_check, IntSymplectic, SiegelMatrix, ThetaError,
};
use thetanull::transversal::{transversality_report, NodeSet, TransversalError};
use thetanull::verify::{run_criterion, CRITERIA, DEFAULT_SEED};

const VERSION: &str = env!("CARGO_PKG_VERSION");

const EXIT_FAIL: u8 = 1;
const EXIT_MALFORMED: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "thetanull", version, about = "Theta characteristics, thetanull orbits and certified theta constants")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count even and odd characteristics.
    Enumerate {
        #[arg(long)]
        genus: usize,
        #[arg(long, value_enum)]
        parity: Option<ParityArg>,
    },
    /// Classify a quadruple of even characteristics.
    Classify {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        input: PathBuf,
    },
    /// Classify every quadruple and check the classes against orbits.
    OrbitCensus {
        #[arg(long)]
        genus: usize,
    },
    /// The hyperelliptic partition model.
    Hyperelliptic {
        #[command(subcommand)]
        action: HyperAction,
    },
    /// The bi-elliptic witness quadruples.
    Bielliptic {
        #[command(subcommand)]
        action: BiAction,
    },
    /// Theta constants on the Siegel upper half-space.
    Theta {
        #[command(subcommand)]
        action: ThetaAction,
    },
    /// Exact transversality check for a configuration.
    Transversal {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        nodes: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        points: Vec<u32>,
    },
    /// Run the verification suite.
    VerifyAll {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ParityArg {
    Even,
    Odd,
}

#[derive(Subcommand, Debug)]
enum HyperAction {
    /// Even, odd and vanishing counts by partition size.
    Counts {
        #[arg(long)]
        genus: usize,
    },
    /// List the characteristics with even h⁰ ≥ 2.
    Vanishing {
        #[arg(long)]
        genus: usize,
    },
    /// The configuration attached to g − 2 branch points.
    Cut {
        #[arg(long)]
        genus: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        points: Vec<u32>,
    },
}

#[derive(Subcommand, Debug)]
enum BiAction {
    /// Classify the four witness sets.
    Verify,
}

#[derive(Subcommand, Debug)]
enum ThetaAction {
    /// Evaluate θ[k](Z); every characteristic when `k` is absent.
    Eval {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
    },
    /// Compare |θ[M·k](M·Z)| with |det(CZ+D)|^{1/2}·|θ[k](Z)|.
    Transform {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
    },
    /// Compare a block-diagonal theta constant with the product of its blocks.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn malformed(m: impl ToString) -> Self {
        Self { code: EXIT_MALFORMED, message: m.to_string() }
    }

    fn domain(m: impl ToString) -> Self {
        Self { code: EXIT_DOMAIN, message: m.to_string() }
    }
}

impl From<OrbitError> for CliError {
    fn from(e: OrbitError) -> Self {
        match e {
            OrbitError::OddCharacteristic(_) | OrbitError::GenusTooLarge(_) => Self::domain(e),
            _ => Self::malformed(e),
        }
    }
}

impl From<QuadrupleParseError> for CliError {
    fn from(e: QuadrupleParseError) -> Self {
        match e {
            QuadrupleParseError::Invalid(inner) => inner.into(),
            QuadrupleParseError::Json(_) => Self::malformed(e),
        }
    }
}

impl From<HyperellipticError> for CliError {
    fn from(e: HyperellipticError) -> Self {
        match e {
            HyperellipticError::InvalidGenus(_) => Self::domain(e),
            _ => Self::malformed(e),
        }
    }
}

impl From<ThetaError> for CliError {
    fn from(e: ThetaError) -> Self {
        match e {
            ThetaError::Json(_) | ThetaError::NotSquare(..) | ThetaError::NotFinite | ThetaError::BadEpsilon(_) => {
                Self::malformed(e)
            }
            _ => Self::domain(e),
        }
    }
}

impl From<TransversalError> for CliError {
    fn from(e: TransversalError) -> Self {
        match e {
            TransversalError::InvalidGenus(_) => Self::domain(e),
            TransversalError::Hyperelliptic(inner) => inner.into(),
            _ => Self::malformed(e),
        }
    }
}

/// A finished command: the JSON result and whether its checks passed.
struct Report {
    result: Value,
    pass: bool,
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

fn check_genus(genus: usize, lo: usize, hi: usize) -> Result<(), CliError> {
    if (lo..=hi).contains(&genus) {
        Ok(())
    } else {
        Err(CliError::domain(format!("genus {genus} is outside {lo}..={hi} for this command")))
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable report")
}

fn enumerate(genus: usize, filter: Option<ParityArg>) -> Result<Report, CliError> {
    check_genus(genus, 1, 8)?;
    let (mut even, mut odd) = (0u64, 0u64);
    for k in F2Vector::all(genus) {
        match parity(&k) {
            Parity::Even => even += 1,
            Parity::Odd => odd += 1,
        }
    }
    let pass = even == even_count(genus) && odd == odd_count(genus);
    let mut result = match filter {
        Some(ParityArg::Even) => json!({ "even": even }),
        Some(ParityArg::Odd) => json!({ "odd": odd }),
        None => json!({ "even": even, "odd": odd }),
    };
    if genus <= 6 {
        let counts = class_counts(genus)?;
        result["hyperelliptic"] = to_value(&counts);
        result["vanishing"] = json!(counts.vanishing);
    }
    Ok(Report { result, pass })
}

fn classify_cmd(genus: usize, input: &PathBuf) -> Result<Report, CliError> {
    let q = Quadruple::from_json(&read(input)?)?;
    if q.genus() != genus {
        return Err(CliError::malformed(format!("input has genus {}, expected {genus}", q.genus())));
    }
    let class = classify(&q);
    let per_base = (0..4).map(|b| classify_with_base(&q, b)).collect::<Result<Vec<_>, _>>()?;
    let inv = invariants_with_base(&q, 3)?;
    let by_delta = classify_by_delta(&q);
    let base_independent = per_base.iter().all(|c| *c == class);
    Ok(Report {
        result: json!({
            "quadruple": q,
            "class": class,
            "invariants": inv,
            "delta_parities": delta_parities(&q),
            "class_by_delta": by_delta,
            "class_per_base": per_base,
            "base_independent": base_independent,
        }),
        pass: base_independent && by_delta == class,
    })
}

fn orbit_census(genus: usize) -> Result<Report, CliError> {
    check_genus(genus, 2, MAX_BFS_GENUS)?;
    let c = census(genus)?;
    let pass = c.orbit_consistent;
    Ok(Report { result: to_value(&c), pass })
}

fn hyperelliptic(action: &HyperAction) -> Result<Report, CliError> {
    match action {
        HyperAction::Counts { genus } => {
            check_genus(*genus, 1, 32)?;
            let c = class_counts(*genus)?;
            let pass = c.even == even_count(*genus) && c.odd == odd_count(*genus);
            Ok(Report { result: to_value(&c), pass })
        }
        HyperAction::Vanishing { genus } => {
            check_genus(*genus, 1, 8)?;
            let list = vanishing_thetanulls(&std_labeling(*genus)?)?;
            let expected = class_counts(*genus)?.vanishing;
            Ok(Report {
                result: json!({ "count": list.len(), "characteristics": list }),
                pass: list.len() as u64 == expected,
            })
        }
        HyperAction::Cut { genus, points } => {
            check_genus(*genus, 3, 32)?;
            let labeling = std_labeling(*genus)?;
            let parts = trans_config_partitions(&labeling, points)?;
            let chars = parts
                .iter()
                .map(|t| thetanull::hyperelliptic::partition_to_char(t, &labeling))
                .collect::<Result<Vec<_>, _>>()?;
            let h0s = parts.iter().map(thetanull::hyperelliptic::h0).collect::<Result<Vec<_>, _>>()?;
            let pass = chars.iter().all(|k| parity(k).is_even()) && h0s.iter().all(|&h| h == 2);
            Ok(Report { result: json!({ "partitions": parts, "characteristics": chars, "h0": h0s }), pass })
        }
    }
}

fn bielliptic() -> Result<Report, CliError> {
    let mut rows = Vec::new();
    let mut pass = true;
    for w in witness_quadruples() {
        let class = classify_bielliptic(&w.chars).map_err(CliError::domain)?;
        let inv = invariants(&w.chars).map_err(CliError::domain)?;
        pass &= class == w.expected;
        rows.push(json!({
            "name": w.name,
            "chars": w.chars,
            "invariants": inv,
            "class": class,
            "expected": w.expected,
        }));
    }
    Ok(Report { result: Value::Array(rows), pass })
}

#[derive(Deserialize)]
struct EvalInput {
    z: Value,
    k: Option<Characteristic>,
}

#[derive(Deserialize)]
struct TransformInput {
    m: Value,
    z: Value,
    k: Characteristic,
}

#[derive(Deserialize)]
struct SplitBlock {
    z: Value,
    k: Characteristic,
}

fn siegel(v: &Value) -> Result<SiegelMatrix, CliError> {
    Ok(SiegelMatrix::from_json(&v.to_string())?)
}

#[derive(Deserialize)]
struct SplitInput {
    blocks: Vec<SplitBlock>,
}

fn parse<T: for<'de> Deserialize<'de>>(path: &PathBuf) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(CliError::malformed)
}

fn theta(action: &ThetaAction) -> Result<Report, CliError> {
    match action {
        ThetaAction::Eval { input, eps } => {
            let inp: EvalInput = parse(input)?;
            let z = siegel(&inp.z)?;
            let g = z.genus();
            let chars: Vec<Characteristic> = match inp.k {
                Some(k) => vec![k],
                None => {
                    check_genus(g, 1, 3)?;
                    F2Vector::all(g).collect()
                }
            };
            let mut rows = Vec::new();
            for k in &chars {
                let v = theta_constant(&z, k, *eps)?;
                rows.push(json!({ "k": k, "parity": parity(k), "value": v }));
            }
            Ok(Report { result: json!({ "lambda_min": z.lambda_min(), "values": rows }), pass: true })
        }
        ThetaAction::Transform { input, eps } => {
            let inp: TransformInput = parse(input)?;
            let m = IntSymplectic::from_json(&inp.m.to_string())?;
            let rep = transform_modulus_check(&m, &siegel(&inp.z)?, &inp.k, *eps)?;
            let pass = rep.pass;
            Ok(Report { result: to_value(&rep), pass })
        }
        ThetaAction::Split { input, eps } => {
            let inp: SplitInput = parse(input)?;
            let zs = inp.blocks.iter().map(|b| siegel(&b.z)).collect::<Result<Vec<_>, _>>()?;
            let ks: Vec<Characteristic> = inp.blocks.iter().map(|b| b.k).collect();
            let rep = block_diag_split_check(&zs, &ks, *eps)?;
            let pass = rep.pass;
            Ok(Report { result: to_value(&rep), pass })
        }
    }
}

fn transversal(genus: usize, nodes: Option<&PathBuf>, points: &[u32]) -> Result<Report, CliError> {
    let ns = match nodes {
        Some(p) => NodeSet::from_json(&read(p)?)?,
        None => NodeSet::integers(genus)?,
    };
    if ns.genus() != genus {
        return Err(CliError::malformed(format!("node set has genus {}, expected {genus}", ns.genus())));
    }
    let points: Vec<u32> =
        if points.is_empty() { (1..=genus.saturating_sub(2) as u32).collect() } else { points.to_vec() };
    let rep = transversality_report(&ns, &points)?;
    let pass = rep.pass;
    Ok(Report { result: json!({ "nodes": ns, "report": rep }), pass })
}

/// Plain-text report; timings go to stderr so stdout stays deterministic.
fn verify_all(seed: u64) -> (String, bool) {
    let mut out = String::new();
    out.push_str(&format!("thetanull {VERSION} verify-all\nseed: {seed}\n\n"));
    let mut all = true;
    for (id, _) in CRITERIA {
        let start = Instant::now();
        let o = run_criterion(id, seed).expect("listed criterion");
        eprintln!("criterion {id}: {:.2}s", start.elapsed().as_secs_f64());
        all &= o.pass;
        out.push_str(&format!("[{}] {}. {}\n", if o.pass { "PASS" } else { "FAIL" }, o.id, o.title));
        for d in &o.details {
            out.push_str(&format!("    {d}\n"));
        }
    }
    out.push_str(&format!("\nresult: {}\n", if all { "PASS" } else { "FAIL" }));
    (out, all)
}

fn config(cli: &Cli) -> Value {
    json!({
        "command": format!("{:?}", cli.command),
        "output": cli.output.as_ref().map(|p| p.display().to_string()),
    })
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::malformed(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    if let Command::VerifyAll { seed } = cli.command {
        let (text, pass) = verify_all(seed);
        emit(cli, &text)?;
        return Ok(pass);
    }
    let report = match &cli.command {
        Command::Enumerate { genus, parity } => enumerate(*genus, *parity)?,
        Command::Classify { genus, input } => classify_cmd(*genus, input)?,
        Command::OrbitCensus { genus } => orbit_census(*genus)?,
        Command::Hyperelliptic { action } => hyperelliptic(action)?,
        Command::Bielliptic { action: BiAction::Verify } => bielliptic()?,
        Command::Theta { action } => theta(action)?,
        Command::Transversal { genus, nodes, points } => transversal(*genus, nodes.as_ref(), points)?,
        Command::VerifyAll { .. } => unreachable!(),
    };
    let doc = json!({
        "version": VERSION,
        "config": config(cli),
        "pass": report.pass,
        "result": report.result,
    });
    emit(cli, &(serde_json::to_string_pretty(&doc).expect("serializable") + "\n"))?;
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
