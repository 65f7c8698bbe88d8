use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maxrep::bergmann::{bergmann_beta_margin, cocycle_test, BetaTolerances, IsotropicLine};
use maxrep::chain::{lemma71_construct, seeded_configuration, CVec, ComplexHyperplane, HeisenbergPoint};
use maxrep::delzant_py::{
    check_qs_invariance, displayed_tangent, pairing_vanishes, pi_s_columns, qs_coefficient, qs_invariant_coefficient,
    qs_sign_pattern_ok, tangent_finite_difference, toledo_density, FourierTruncation, Mobius, QsWeights,
};
use maxrep::lie_triple::{verify_complex_structure, HermitianSpace};
use maxrep::pingpong::{build_witness, generated_algebra_dimension, verify_pingpong, PingPongWitness};
use maxrep::toledo::{compute_toledo, milnor_wood_check, FreeGroupRep};
use maxrep::{check_group_membership, signature_of_restriction, Error, GroupElement, IndefiniteForm, Tolerances};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

const VERSION: &str = env!("CARGO_PKG_VERSION");

const EXIT_FAIL: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

#[derive(Parser, Debug)]
#[command(name = "maxrep", version, about = "Numerical checks for maximal representations of O(2,q) and friends")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Seed for all random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1e-9)]
    sig_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    group_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-10)]
    orient_tol: f64,
    #[arg(long, global = true, default_value_t = maxrep::toledo::FIXED_TOL)]
    fixed_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-6)]
    leak_tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Indefinite forms.
    #[command(subcommand)]
    Core(CoreCmd),
    /// The Bergmann cocycle.
    #[command(subcommand)]
    Bergmann(BergmannCmd),
    /// Ping-pong witnesses.
    #[command(subcommand)]
    Pingpong(PingpongCmd),
    /// Toledo invariant of a two-generator representation.
    #[command(subcommand)]
    Toledo(ToledoCmd),
    /// The vanishing-Toledo family on Fourier truncations.
    #[command(subcommand, name = "delzant-py")]
    DelzantPy(DelzantCmd),
    /// Lie triple systems and complex structures.
    #[command(subcommand)]
    Lietriple(LieCmd),
    /// Chains in the Heisenberg model.
    #[command(subcommand)]
    Chain(ChainCmd),
}

#[derive(Subcommand, Debug)]
enum CoreCmd {
    /// Signature of the form restricted to the span of the given vectors.
    Signature {
        /// JSON `{"p", "q", "vectors": [[...], ...]}`; `-` reads stdin.
        #[arg(long, default_value = "-")]
        input: String,
    },
}

#[derive(Subcommand, Debug)]
enum BergmannCmd {
    /// beta(x, y, z) for three isotropic vectors.
    Eval {
        /// JSON `{"q", "x", "y", "z"}`; `-` reads stdin.
        #[arg(long, default_value = "-")]
        input: String,
    },
    /// Value, alternation and cocycle checks on seeded random quadruples.
    CocycleTest {
        #[arg(long, default_value_t = 8)]
        q: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
}

#[derive(Subcommand, Debug)]
enum PingpongCmd {
    /// Build and certify a witness; the seed picks the pseudo-irrational angles.
    Build {
        #[arg(long, default_value_t = 16)]
        q: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Re-certify a witness produced by `build`.
    Verify {
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ToledoCmd {
    /// Fixed line of the commutator in cl(I_{y,z}) and the invariant.
    Compute {
        /// JSON with `A`, `B`, `y`, `z` (a `pingpong build` report works).
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Score non-opposite triples as zero instead of failing.
        #[arg(long)]
        allow_degenerate: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Weights {
    Displayed,
    Invariant,
}

#[derive(Subcommand, Debug)]
enum DelzantCmd {
    Report {
        #[arg(long, default_value_t = 2.0)]
        s: f64,
        #[arg(long = "N", default_value_t = 256)]
        n: usize,
        /// Inner block for the invariance residual.
        #[arg(long = "K", default_value_t = 16)]
        k: usize,
        /// Hyperbolic parameter of the element tested for invariance.
        #[arg(long, default_value_t = 1.5)]
        t: f64,
        #[arg(long, default_value_t = 1e-4)]
        t_step: f64,
        #[arg(long, value_enum, default_value_t = Weights::Invariant)]
        weights: Weights,
        /// Also write `n,displayed,invariant` coefficients here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Space {
    Xc,
    Xr,
    Siegel,
    Ostar,
}

#[derive(Subcommand, Debug)]
enum LieCmd {
    /// J0^2 = -Id, isometry and K-commutation on random samples.
    Check {
        #[arg(long, value_enum)]
        space: Space,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 3)]
        q: usize,
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ChainCmd {
    /// The chain through y meeting the vertical chain over p_C and S_X.
    Construct {
        /// JSON `{"y", "p_c", "s_x"}` with points of `C^{n-1}` as lists of
        /// `[re, im]`. Without it a configuration is drawn from the seed.
        #[arg(long)]
        input: Option<String>,
        /// Complex hyperbolic dimension for seeded configurations.
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
}

#[derive(Debug, Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    fn exit(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => EXIT_FAIL,
            Status::Inconclusive => EXIT_INCONCLUSIVE,
        }
    }
}

enum Failure {
    Usage(String),
    Data(String),
}

type Outcome = std::result::Result<(Status, Value), Failure>;

fn from_bool(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn error_report(e: &Error) -> (Status, Value) {
    let status = if e.is_inconclusive() { Status::Inconclusive } else { Status::Fail };
    (status, json!({ "error": e.to_string() }))
}

fn body<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn read_input(path: &str) -> std::result::Result<String, Failure> {
    let mut s = String::new();
    let r = if path == "-" {
        io::stdin().read_to_string(&mut s).map(|_| ())
    } else {
        fs::read_to_string(path).map(|t| s = t)
    };
    r.map_err(|e| Failure::Data(format!("{path}: {e}")))?;
    Ok(s)
}

fn parse<T: for<'de> Deserialize<'de>>(path: &str) -> std::result::Result<T, Failure> {
    serde_json::from_str(&read_input(path)?).map_err(|e| Failure::Data(format!("{path}: {e}")))
}

impl Global {
    fn validate(&self) -> std::result::Result<(), Failure> {
        let all = [
            ("sig-tol", self.sig_tol),
            ("group-tol", self.group_tol),
            ("orient-tol", self.orient_tol),
            ("fixed-tol", self.fixed_tol),
            ("leak-tol", self.leak_tol),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Failure::Usage(format!("--{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances { sig_tol: self.sig_tol, group_tol: self.group_tol, ..Tolerances::default() }
    }

    fn beta(&self) -> BetaTolerances {
        BetaTolerances { sig_tol: self.sig_tol, orient_tol: self.orient_tol, ..BetaTolerances::default() }
    }
}

#[derive(Deserialize)]
struct SignatureInput {
    p: usize,
    q: usize,
    vectors: Vec<Vec<f64>>,
}

fn columns(vs: &[Vec<f64>], dim: usize) -> std::result::Result<DMatrix<f64>, Failure> {
    if vs.is_empty() || vs.iter().any(|v| v.len() != dim) {
        return Err(Failure::Data(format!("expected nonempty list of vectors of length {dim}")));
    }
    Ok(DMatrix::from_fn(dim, vs.len(), |i, j| vs[j][i]))
}

fn core_signature(g: &Global, input: &str) -> Outcome {
    let inp: SignatureInput = parse(input)?;
    let form = match IndefiniteForm::real(inp.p, inp.q) {
        Ok(f) => f,
        Err(e) => return Ok(error_report(&e)),
    };
    let m = columns(&inp.vectors, form.dim())?;
    Ok(match signature_of_restriction(&form, &m, &g.tolerances()) {
        Ok(sig) => (Status::Pass, json!({ "form": form, "signature": sig })),
        Err(e) => error_report(&e),
    })
}

#[derive(Deserialize)]
struct TripleInput {
    q: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
}

fn bergmann_eval(g: &Global, input: &str) -> Outcome {
    let inp: TripleInput = parse(input)?;
    let tol = Tolerances { iso_tol: g.sig_tol, ..Tolerances::default() };
    let run = || -> maxrep::Result<Value> {
        let form = IndefiniteForm::real(2, inp.q)?;
        let line = |v: &Vec<f64>| IsotropicLine::new(form, DVector::from_column_slice(v), &tol);
        let (x, y, z) = (line(&inp.x)?, line(&inp.y)?, line(&inp.z)?);
        let b = bergmann_beta_margin(&x, &y, &z, &g.beta())?;
        Ok(json!({ "q": inp.q, "beta": b.value, "margin": b.margin }))
    };
    Ok(match run() {
        Ok(v) => (Status::Pass, v),
        Err(e) => error_report(&e),
    })
}

fn bergmann_cocycle(g: &Global, q: usize, trials: usize) -> Outcome {
    Ok(match cocycle_test(q, trials, g.seed) {
        Ok(r) => {
            let mut v = body(&r);
            v["seed"] = json!(g.seed);
            v["violations"] = json!(r.violations());
            (from_bool(r.violations() == 0), v)
        }
        Err(e) => error_report(&e),
    })
}

fn algebra_dimension(w: &PingPongWitness) -> usize {
    generated_algebra_dimension(&[w.a.matrix(), w.b.matrix()], 1e-9)
}

fn pingpong_build(g: &Global, q: usize, samples: usize) -> Outcome {
    Ok(match build_witness(q, g.seed, samples) {
        Ok(w) => {
            let dim = algebra_dimension(&w);
            let full = w.form.dim() * w.form.dim();
            let mut v = body(&w);
            v["seed"] = json!(g.seed);
            v["algebra_dimension"] = json!(dim);
            v["irreducible"] = json!(dim == full);
            (Status::Pass, v)
        }
        Err(e) => error_report(&e),
    })
}

fn pingpong_verify(input: &str, samples: usize) -> Outcome {
    let w: PingPongWitness = parse(input)?;
    Ok(match verify_pingpong(&w, samples) {
        Ok(r) => {
            let dim = algebra_dimension(&w);
            let mut v = body(&r);
            v["algebra_dimension"] = json!(dim);
            (from_bool(r.pass && r.min_margin > 0.0), v)
        }
        Err(e) => error_report(&e),
    })
}

#[derive(Deserialize)]
struct RawElement {
    form: IndefiniteForm,
    matrix: DMatrix<f64>,
}

#[derive(Deserialize)]
struct RawLine {
    form: IndefiniteForm,
    rep: DVector<f64>,
}

#[derive(Deserialize)]
struct ToledoInput {
    #[serde(rename = "A")]
    a: RawElement,
    #[serde(rename = "B")]
    b: RawElement,
    y: RawLine,
    z: RawLine,
}

fn toledo(g: &Global, input: &str, max_iter: usize, allow_degenerate: bool) -> Outcome {
    let inp: ToledoInput = parse(input)?;
    let tol = g.tolerances();
    let run = || -> maxrep::Result<Value> {
        let elem = |r: &RawElement| -> maxrep::Result<GroupElement<f64>> {
            check_group_membership(&r.form, r.matrix.clone(), &tol)
        };
        let rep = FreeGroupRep::new(elem(&inp.a)?, elem(&inp.b)?)?;
        let line = |r: &RawLine| IsotropicLine::new(r.form, r.rep.clone(), &Tolerances::default());
        let (y, z) = (line(&inp.y)?, line(&inp.z)?);
        let (fixed, result) = compute_toledo(&rep, &y, &z, g.fixed_tol, max_iter, allow_degenerate)?;
        Ok(json!({
            "fixed_line": fixed,
            "result": result,
            "i_rho": result.i_rho,
            "maximal": result.i_rho.abs() == 2,
            "milnor_wood": milnor_wood_check(&result),
        }))
    };
    Ok(match run() {
        Ok(v) => (Status::Pass, v),
        Err(e) => error_report(&e),
    })
}

#[allow(clippy::too_many_arguments)]
fn delzant(
    g: &Global,
    s: f64,
    n: usize,
    k: usize,
    t: f64,
    t_step: f64,
    weights: Weights,
    csv: Option<&PathBuf>,
) -> Outcome {
    let weights = match weights {
        Weights::Displayed => QsWeights::Displayed,
        Weights::Invariant => QsWeights::Invariant,
    };
    let run = || -> maxrep::Result<Value> {
        let trunc = FourierTruncation::new(n)?;
        let gt = Mobius::hyperbolic(t);
        // The leakage bound applies to the small steps used for derivatives;
        // for g_t itself the tail outside the truncation is only reported.
        let step_leakage = pi_s_columns(s, &Mobius::hyperbolic(t_step), &trunc, 5, None, Some(g.leak_tol))?.leakage;
        let leakage = pi_s_columns(s, &gt, &trunc, 2 * k + 1, None, None)?.leakage;
        let residual = check_qs_invariance(s, &gt, &trunc, k, weights)?;
        let fd = tangent_finite_difference(s, t_step, &trunc, None)?;
        let shown = displayed_tangent(s);
        let tangent_error = (0..3).map(|c| (fd[(0, c)] - shown[c]).abs()).fold(0.0, f64::max);
        let coefficients: Vec<f64> = (0..=n).map(|i| qs_coefficient(s, i)).collect::<maxrep::Result<_>>()?;
        Ok(json!({
            "s": s,
            "N": n,
            "K": k,
            "t": t,
            "weights": weights,
            "sign_pattern_ok": qs_sign_pattern_ok(s, n)?,
            "qs_at_2": coefficients.get(2),
            "invariance_residual": residual,
            "leakage": leakage,
            "step_leakage": step_leakage,
            "pairing": pairing_vanishes(s),
            "density_estimate": toledo_density(s, t_step, &trunc)?,
            "tangent_finite_difference": fd.row(0).iter().collect::<Vec<_>>(),
            "tangent_displayed": shown,
            "tangent_error": tangent_error,
        }))
    };
    let v = match run() {
        Ok(v) => v,
        Err(e) => return Ok(error_report(&e)),
    };
    if let Some(path) = csv {
        let mut out = String::from("n,displayed,invariant\n");
        for i in 0..=n {
            let (a, b) = (qs_coefficient(s, i), qs_invariant_coefficient(s, i));
            if let (Ok(a), Ok(b)) = (a, b) {
                out.push_str(&format!("{i},{a:e},{b:e}\n"));
            }
        }
        fs::write(path, out).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    let ok = v["sign_pattern_ok"] == json!(true) && v["pairing"] == json!(0.0);
    Ok((from_bool(ok), v))
}

fn lietriple(g: &Global, space: Space, p: usize, q: usize, d: usize, samples: usize) -> Outcome {
    let space = match space {
        Space::Xc => HermitianSpace::Xc { p, q },
        Space::Xr => HermitianSpace::Xr { q },
        Space::Siegel => HermitianSpace::Siegel { d },
        Space::Ostar => HermitianSpace::Ostar { d },
    };
    Ok(match verify_complex_structure(space, samples, g.seed) {
        Ok(r) => (from_bool(r.pass), body(&r)),
        Err(e) => error_report(&e),
    })
}

#[derive(Deserialize)]
struct ChainInput {
    y: HeisenbergPoint,
    #[serde(with = "maxrep::chain::cvec_serde")]
    p_c: CVec,
    s_x: ComplexHyperplane,
}

fn chain(g: &Global, input: Option<&str>, n: usize) -> Outcome {
    let (y, p_c, s_x) = match input {
        Some(path) => {
            let c: ChainInput = parse(path)?;
            let s_x = ComplexHyperplane::new(c.s_x.base, c.s_x.normal).map_err(|e| Failure::Data(e.to_string()))?;
            (c.y, c.p_c, s_x)
        }
        None if n >= 2 => seeded_configuration(n, g.seed, 0).expect("n >= 2"),
        None => return Err(Failure::Usage("--n must be at least 2".into())),
    };
    Ok(match lemma71_construct(&y, &p_c, &s_x) {
        Ok(out) => {
            let mut v = body(&out);
            v["input"] = json!({ "y": y, "p_c": p_c.as_slice(), "s_x": s_x });
            (from_bool(out.residual <= maxrep::chain::GENERIC_TOL), v)
        }
        Err(e) => error_report(&e),
    })
}

fn dispatch(cli: &Cli) -> Outcome {
    let g = &cli.global;
    g.validate()?;
    match &cli.command {
        Command::Core(CoreCmd::Signature { input }) => core_signature(g, input),
        Command::Bergmann(BergmannCmd::Eval { input }) => bergmann_eval(g, input),
        Command::Bergmann(BergmannCmd::CocycleTest { q, trials }) => bergmann_cocycle(g, *q, *trials),
        Command::Pingpong(PingpongCmd::Build { q, samples }) => pingpong_build(g, *q, *samples),
        Command::Pingpong(PingpongCmd::Verify { input, samples }) => pingpong_verify(input, *samples),
        Command::Toledo(ToledoCmd::Compute { input, max_iter, allow_degenerate }) => {
            toledo(g, input, *max_iter, *allow_degenerate)
        }
        Command::DelzantPy(DelzantCmd::Report { s, n, k, t, t_step, weights, csv }) => {
            delzant(g, *s, *n, *k, *t, *t_step, *weights, csv.as_ref())
        }
        Command::Lietriple(LieCmd::Check { space, p, q, d, samples }) => lietriple(g, *space, *p, *q, *d, *samples),
        Command::Chain(ChainCmd::Construct { input, n }) => chain(g, input.as_deref(), *n),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Core(_) => "core signature",
        Command::Bergmann(BergmannCmd::Eval { .. }) => "bergmann eval",
        Command::Bergmann(BergmannCmd::CocycleTest { .. }) => "bergmann cocycle-test",
        Command::Pingpong(PingpongCmd::Build { .. }) => "pingpong build",
        Command::Pingpong(PingpongCmd::Verify { .. }) => "pingpong verify",
        Command::Toledo(_) => "toledo compute",
        Command::DelzantPy(_) => "delzant-py report",
        Command::Lietriple(_) => "lietriple check",
        Command::Chain(_) => "chain construct",
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var("MAXREP_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| format!("MAXREP_THREADS={raw:?} is not a thread count"))?;
    if n == 0 {
        return Err("MAXREP_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("maxrep: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    let (status, v) = match dispatch(&cli) {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            eprintln!("maxrep: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(Failure::Data(msg)) => {
            eprintln!("maxrep: malformed input: {msg}");
            return ExitCode::from(EXIT_DATA);
        }
    };
    let mut report = serde_json::Map::new();
    report.insert("version".into(), json!(VERSION));
    report.insert("command".into(), json!(command_name(&cli.command)));
    report.insert("status".into(), json!(status));
    match v {
        Value::Object(m) => report.extend(m),
        other => {
            report.insert("result".into(), other);
        }
    }
    let text = serde_json::to_string_pretty(&Value::Object(report)).expect("reports serialize") + "\n";
    let written = match &cli.global.output {
        Some(path) => fs::write(path, &text),
        None => io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("maxrep: cannot write report: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    ExitCode::from(status.exit())
}
