//! Command-line front end: diagram/presentation ingestion, the Δ → χ
//! pipeline, slope calculus, JSON output, and a persistent result cache.

mod cache;

use std::io::BufRead;
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use knotchi::alexander::{
    delta_of_diagram, delta_of_presentation, knot_delta_of_diagram, symmetrize_knot_delta,
};
use knotchi::eulerchi::{
    chi_khi_minus, chi_knot, chi_link, chi_sharp_decompose, chi_slope, GradedChi, LSpaceVerdict,
};
use knotchi::fpgroup::Presentation;
use knotchi::laurent::LaurentPoly;
use knotchi::linkdiag::{parse_braid, parse_pd, LinkDiagram};
use knotchi::triangle::{
    bypass_decompose, cobordism_degree, ncf, ncf_eval, surgery_parity, triangle_solve,
    unknot_chi, CobordismInvariants, OddPosition, Slope, TriangleChi,
};

#[derive(Parser)]
#[command(name = "knotchi", version, about = "Alexander polynomials and graded Euler characteristics")]
struct Cli {
    /// Bypass the result cache entirely.
    #[arg(long, global = true)]
    no_cache: bool,

    /// Cache file location (default: $KNOTCHI_CACHE or ./.knotchi-cache.jsonl).
    #[arg(long, global = true)]
    cache_file: Option<String>,

    /// Emit polynomials as exponent/coefficient tuples instead of pretty text.
    #[arg(long, global = true)]
    raw_json: bool,

    /// Run every line of this JSON-lines file as one invocation.
    #[arg(long)]
    batch: Option<String>,

    /// Worker threads for batch mode.
    #[arg(long, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct DiagramInput {
    /// Braid word, e.g. "1 -2 1 -2" (requires --strands).
    #[arg(long)]
    braid: Option<String>,
    /// PD code, e.g. "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)".
    #[arg(long)]
    pd: Option<String>,
}

impl DiagramInput {
    fn diagram(&self, strands: Option<usize>) -> Result<LinkDiagram, Error> {
        match (&self.braid, &self.pd) {
            (Some(w), None) => {
                let strands = strands.ok_or_else(|| Error::usage("--braid requires --strands"))?;
                Ok(parse_braid(w, strands)?)
            }
            (None, Some(t)) => Ok(parse_pd(t)?),
            _ => Err(Error::usage("give exactly one of --braid, --pd")),
        }
    }
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Alexander polynomial of a diagram or group presentation.
    Alex {
        #[command(flatten)]
        input: AlexInput,
        #[arg(long)]
        strands: Option<usize>,
        /// Normalize to the symmetric associate with value 1 at t = 1
        /// (knots only).
        #[arg(long)]
        symmetrize: bool,
    },
    /// χ_gr of a link: Δ_L · ∏ (t_j − 1).
    ChiLink {
        #[command(flatten)]
        input: DiagramInput,
        #[arg(long)]
        strands: Option<usize>,
    },
    /// χ_gr of a knot with meridian class t^k: Δ · (t^k − 1)/(t − 1).
    ChiKnot {
        #[command(flatten)]
        input: DiagramInput,
        #[arg(long)]
        strands: Option<usize>,
        /// Exponent k of the meridian class.
        #[arg(long, default_value_t = 1)]
        meridian: i64,
    },
    /// Truncation of the minus-flavored series −Δ_K · (1 + t⁻¹ + …).
    KhiMinus {
        #[command(flatten)]
        input: DiagramInput,
        #[arg(long)]
        strands: Option<usize>,
        #[arg(long, default_value_t = 10)]
        depth: u32,
    },
    /// Split an integer χ into the q equal surgery pieces.
    SharpDecompose {
        #[arg(long)]
        chi: i64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        h1_order: Option<u64>,
    },
    /// Convolve a meridional χ with the slope-y window 1 + t + … + t^{y−1}.
    SlopeChi {
        /// χ_μ as a polynomial in t.
        #[arg(long)]
        chi_mu: String,
        #[arg(long)]
        y: u64,
    },
    /// Solid-torus χ at a slope, with its bypass decomposition trace.
    UnknotChi {
        /// Slope as x/y, e.g. -5/7.
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
    },
    /// Negative continued fraction of −y/z.
    Ncf {
        #[arg(long)]
        y: i64,
        #[arg(long)]
        z: i64,
    },
    /// Bypass decomposition of a slope.
    Bypass {
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
    },
    /// Position of the odd map in a surgery triangle from the three
    /// intersection numbers.
    Parity {
        #[arg(long, num_args = 3, allow_hyphen_values = true)]
        dots: Vec<i64>,
    },
    /// Mod-2 degree of a cobordism map.
    Degree {
        #[arg(long, allow_hyphen_values = true)]
        euler: i64,
        #[arg(long, allow_hyphen_values = true)]
        sigma: i64,
        /// b₁ of the incoming and outgoing boundary.
        #[arg(long, num_args = 2)]
        b1: Vec<i64>,
        /// b₀ of the incoming and outgoing boundary.
        #[arg(long, num_args = 2)]
        b0: Vec<i64>,
    },
    /// Solve an exact triangle for its one unknown χ.
    SolveTriangle {
        #[arg(long, allow_hyphen_values = true)]
        chi1: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        chi2: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        chi3: Option<i64>,
        /// Odd map position: 1, 2, 3 or "all".
        #[arg(long)]
        odd: String,
    },
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct AlexInput {
    #[arg(long)]
    braid: Option<String>,
    #[arg(long)]
    pd: Option<String>,
    /// Group presentation, e.g. "gens: a b\nrel: a b a B A B".
    #[arg(long)]
    presentation: Option<String>,
}

/// A domain error: surfaced as {"error": {...}} with exit code 1, or a usage
/// error surfaced by clap conventions with exit code 2.
struct Error {
    kind: String,
    message: String,
    usage: bool,
}

impl Error {
    fn usage(msg: &str) -> Self {
        Error { kind: "Usage".into(), message: msg.into(), usage: true }
    }

    fn to_json(&self) -> Value {
        json!({"error": {"kind": self.kind, "message": self.message}})
    }
}

impl<E: std::error::Error> From<E> for Error {
    fn from(e: E) -> Self {
        // The Debug form of our error enums starts with the variant name.
        let dbg = format!("{e:?}");
        let kind = dbg
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or("Error")
            .to_string();
        Error { kind, message: e.to_string(), usage: false }
    }
}

fn poly_json(p: &LaurentPoly, raw: bool) -> Value {
    if raw {
        p.to_json()
    } else {
        Value::String(p.to_string())
    }
}

fn parse_slope(text: &str) -> Result<Slope, Error> {
    let (xs, ys) = text
        .split_once('/')
        .ok_or_else(|| Error::usage("slope must be written x/y"))?;
    let x: i64 = xs.trim().parse().map_err(|_| Error::usage("bad slope numerator"))?;
    let y: i64 = ys.trim().parse().map_err(|_| Error::usage("bad slope denominator"))?;
    Ok(Slope::new(x, y)?)
}

fn slope_string(s: &Slope) -> String {
    format!("{}/{}", s.x(), s.y())
}

fn chi_json(chi: &GradedChi, raw: bool) -> Value {
    poly_json(&chi.poly, raw)
}

fn run_command(cmd: &Command, raw: bool) -> Result<Value, Error> {
    match cmd {
        Command::Alex { input, strands, symmetrize } => {
            let delta = match (&input.braid, &input.pd, &input.presentation) {
                (_, _, Some(text)) => {
                    let p = Presentation::parse(text)?;
                    let delta = delta_of_presentation(&p)?;
                    if *symmetrize {
                        symmetrize_knot_delta(&delta)?
                    } else {
                        delta
                    }
                }
                _ => {
                    let d = DiagramInput { braid: input.braid.clone(), pd: input.pd.clone() }
                        .diagram(*strands)?;
                    if *symmetrize {
                        knot_delta_of_diagram(&d)?
                    } else {
                        delta_of_diagram(&d)?
                    }
                }
            };
            Ok(json!({"delta": poly_json(&delta, raw)}))
        }
        Command::ChiLink { input, strands } => {
            let d = input.diagram(*strands)?;
            let delta = delta_of_diagram(&d)?;
            let chi = chi_link(&delta, d.num_components())?;
            Ok(json!({"chi": chi_json(&chi, raw), "components": d.num_components()}))
        }
        Command::ChiKnot { input, strands, meridian } => {
            let d = input.diagram(*strands)?;
            let delta = knot_delta_of_diagram(&d)?;
            let chi = chi_knot(&delta, *meridian)?;
            Ok(json!({"chi": chi_json(&chi, raw)}))
        }
        Command::KhiMinus { input, strands, depth } => {
            let d = input.diagram(*strands)?;
            let delta = knot_delta_of_diagram(&d)?;
            let series = chi_khi_minus(&delta, *depth)?;
            let stable: Vec<Value> = series
                .stable_coefficients()
                .into_iter()
                .rev()
                .map(|(d, c)| json!([d, c.to_string().parse::<Value>().unwrap_or(Value::String(c.to_string()))]))
                .collect();
            Ok(json!({
                "stable": stable,
                "stable_floor": series.stable_floor(),
                "series": poly_json(series.poly(), raw),
            }))
        }
        Command::SharpDecompose { chi, q, h1_order } => {
            let d = chi_sharp_decompose(*chi, *q, *h1_order);
            let verdict = d.verdict.map(|v| match v {
                LSpaceVerdict::Sharp => "sharp",
                LSpaceVerdict::Compatible => "compatible",
                LSpaceVerdict::NotLSpace => "not-l-space",
            });
            Ok(json!({"q": d.q, "pieces": d.pieces, "total": d.total, "verdict": verdict}))
        }
        Command::SlopeChi { chi_mu, y } => {
            let p = LaurentPoly::parse(chi_mu, 1)?;
            let chi = chi_slope(&GradedChi::exact(p), *y)?;
            Ok(json!({"chi": chi_json(&chi, raw)}))
        }
        Command::UnknotChi { slope } => {
            let s = parse_slope(slope)?;
            let chi = unknot_chi(&s)?;
            let trace: Vec<Value> = if s.y() >= 2 {
                let (s2, s3) = bypass_decompose(&s);
                vec![json!([s2.y(), s2.x()]), json!([s3.y(), s3.x()])]
            } else {
                vec![]
            };
            Ok(json!({"chi": chi, "trace": trace}))
        }
        Command::Ncf { y, z } => {
            let f = ncf(*y, *z)?;
            let (num, den) = ncf_eval(f.entries())?;
            Ok(json!({"entries": f.entries(), "value": format!("{num}/{den}")}))
        }
        Command::Bypass { slope } => {
            let s = parse_slope(slope)?;
            let (s2, s3) = bypass_decompose(&s);
            Ok(json!({"s2": slope_string(&s2), "s3": slope_string(&s3)}))
        }
        Command::Parity { dots } => {
            let dots: [i64; 3] = dots
                .as_slice()
                .try_into()
                .map_err(|_| Error::usage("--dots takes exactly three integers"))?;
            Ok(json!({"odd": surgery_parity(dots)?}))
        }
        Command::Degree { euler, sigma, b1, b0 } => {
            if b1.len() != 2 || b0.len() != 2 {
                return Err(Error::usage("--b1 and --b0 each take two integers"));
            }
            let parity = cobordism_degree(&CobordismInvariants {
                euler_char: *euler,
                signature: *sigma,
                b1_in: b1[0],
                b1_out: b1[1],
                b0_in: b0[0],
                b0_out: b0[1],
            })?;
            Ok(json!({"parity": parity}))
        }
        Command::SolveTriangle { chi1, chi2, chi3, odd } => {
            let odd_position = match odd.as_str() {
                "1" => OddPosition::One,
                "2" => OddPosition::Two,
                "3" => OddPosition::Three,
                "all" => OddPosition::AllOdd,
                _ => return Err(Error::usage("--odd must be 1, 2, 3 or all")),
            };
            let t = TriangleChi { chis: [*chi1, *chi2, *chi3], odd_position };
            Ok(json!({"value": triangle_solve(&t)?}))
        }
    }
}

/// The canonical cache identity of one invocation: the subcommand argv plus
/// any output-shaping flag.
fn cache_input(argv: &[String], raw: bool) -> String {
    serde_json::to_string(&json!({"argv": argv, "raw_json": raw})).unwrap()
}

fn op_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Alex { .. } => "alex",
        Command::ChiLink { .. } => "chi-link",
        Command::ChiKnot { .. } => "chi-knot",
        Command::KhiMinus { .. } => "khi-minus",
        Command::SharpDecompose { .. } => "sharp-decompose",
        Command::SlopeChi { .. } => "slope-chi",
        Command::UnknotChi { .. } => "unknot-chi",
        Command::Ncf { .. } => "ncf",
        Command::Bypass { .. } => "bypass",
        Command::Parity { .. } => "parity",
        Command::Degree { .. } => "degree",
        Command::SolveTriangle { .. } => "solve-triangle",
    }
}

/// Run one parsed invocation, consulting the cache. Returns the exact output
/// line and the exit code it implies (0 success, 1 domain error, 2 usage).
fn execute(cli: &Cli, cmd: &Command, argv: &[String], store: &Mutex<cache::Store>) -> (String, i32) {
    let key_input = cache_input(argv, cli.raw_json);
    if !cli.no_cache {
        if let Some(hit) = store.lock().unwrap().lookup(op_name(cmd), &key_input) {
            return (hit, 0);
        }
    }
    match run_command(cmd, cli.raw_json) {
        Ok(v) => {
            let out = v.to_string();
            if !cli.no_cache {
                store.lock().unwrap().insert(op_name(cmd), &key_input, &out);
            }
            (out, 0)
        }
        Err(e) => (e.to_json().to_string(), if e.usage { 2 } else { 1 }),
    }
}

fn batch(cli: &Cli, path: &str, store: &Mutex<cache::Store>) -> i32 {
    let file = match std::fs::File::open(path) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("cannot open batch file {path}: {e}");
            return 2;
        }
    };
    let lines: Vec<String> = std::io::BufReader::new(file)
        .lines()
        .map_while(Result::ok)
        .filter(|l| !l.trim().is_empty())
        .collect();

    let jobs = cli.jobs.max(1);
    let results: Mutex<Vec<Option<(String, i32)>>> = Mutex::new(vec![None; lines.len()]);
    let next = std::sync::atomic::AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(lines.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= lines.len() {
                    break;
                }
                let out = run_batch_line(cli, &lines[i], store);
                results.lock().unwrap()[i] = Some(out);
            });
        }
    });

    let mut exit = 0;
    for r in results.into_inner().unwrap() {
        let (line, code) = r.expect("all lines processed");
        println!("{line}");
        exit = exit.max(code.min(1)); // batch failures report as domain errors
    }
    exit
}

fn run_batch_line(cli: &Cli, line: &str, store: &Mutex<cache::Store>) -> (String, i32) {
    let parsed: Result<Vec<String>, String> = (|| {
        let v: Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let arr = match &v {
            Value::Array(a) => a.clone(),
            Value::Object(o) => o
                .get("args")
                .and_then(Value::as_array)
                .cloned()
                .ok_or("batch object needs an \"args\" array")?,
            _ => return Err("batch line must be an array or {\"args\": [...]}".into()),
        };
        arr.iter()
            .map(|x| {
                x.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| "batch args must be strings".to_string())
            })
            .collect()
    })();
    let argv = match parsed {
        Ok(a) => a,
        Err(m) => {
            return (
                json!({"error": {"kind": "BatchParse", "message": m}}).to_string(),
                1,
            )
        }
    };
    let full: Vec<String> = std::iter::once("knotchi".to_string())
        .chain(argv.iter().cloned())
        .collect();
    match Cli::try_parse_from(&full) {
        Ok(sub) => {
            let Some(cmd) = &sub.command else {
                return (
                    json!({"error": {"kind": "Usage", "message": "batch line has no subcommand"}})
                        .to_string(),
                    2,
                );
            };
            // Inherit cache settings from the outer invocation; output shape
            // may be set per line.
            let merged = Cli {
                no_cache: cli.no_cache || sub.no_cache,
                cache_file: cli.cache_file.clone(),
                raw_json: cli.raw_json || sub.raw_json,
                batch: None,
                jobs: 1,
                command: None,
            };
            execute(&merged, cmd, &argv, store)
        }
        Err(e) => (
            json!({"error": {"kind": "Usage", "message": e.to_string()}}).to_string(),
            2,
        ),
    }
}

fn main() {
    let raw_args: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let store = Mutex::new(cache::Store::open(cli.cache_file.as_deref(), cli.no_cache));

    if let Some(path) = cli.batch.clone() {
        std::process::exit(batch(&cli, &path, &store));
    }

    let Some(cmd) = cli.command.as_ref() else {
        eprintln!("error: a subcommand or --batch is required (see --help)");
        std::process::exit(2);
    };
    // Cache identity is the subcommand argv (program name stripped).
    let argv: Vec<String> = raw_args.into_iter().skip(1).collect();
    let (out, code) = execute(&cli, cmd, &argv, &store);
    println!("{out}");
    std::process::exit(code);
}
