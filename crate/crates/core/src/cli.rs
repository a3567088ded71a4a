//! Command-line front end. [`run`] parses arguments, loads and validates
//! the input files, dispatches, and renders a JSON [`RunReport`].
//!
//! Exit codes: 0 on success, 1 on a negative verdict (non-membership,
//! failed certificate, non-PSD functional, ...), 2 on input errors.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::approx::{self, Certificate};
use crate::error::{Error, Result};
use crate::moments::{self, MeasureSpec, MomentFunctional, PowerOutcome};
use crate::poly::Polynomial;
use crate::spectrum;
use crate::topologies::{self, Region, RegionFile, WeightFunction};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const TOL_ENV: &str = "CONE2D_TOL";

#[derive(Parser, Debug)]
#[command(
    name = "cone2d",
    version,
    about = "Sums of 2d-powers: topologies, approximation certificates and moment checks"
)]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Omit wall time and timestamp so reports are byte-reproducible.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Print a short prose summary to stderr.
    #[arg(long, global = true)]
    pub summary: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluation seminorms, sampled sup-norm and weighted l1 norm of a polynomial.
    Norms(NormsArgs),
    #[command(subcommand)]
    Spectrum(SpectrumCmd),
    #[command(subcommand)]
    Approx(ApproxCmd),
    #[command(subcommand)]
    Moments(MomentsCmd),
    /// Lasserre weight against the sup-norm bound M^k/k! on a region.
    Compare(CompareArgs),
    /// Polynomial small at the points but of sup-norm about 1 on the region.
    Witness(WitnessArgs),
}

#[derive(Args, Debug)]
pub struct NormsArgs {
    #[arg(long)]
    poly: PathBuf,
    /// Evaluation point, comma separated; repeatable.
    #[arg(long = "point", value_parser = parse_point, allow_hyphen_values = true)]
    points: Vec<Coords>,
    #[arg(long)]
    region: Option<PathBuf>,
    #[arg(long)]
    phi: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum SpectrumCmd {
    /// Outer box of K_phi from univariate weights.
    KphiBox {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        degree: u32,
        /// Variable count, for weights that do not fix one.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Degree-D test of |x^s| <= phi(s).
    KphiContains {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: Coords,
        #[arg(long)]
        degree: u32,
    },
    /// Whether no nonzero polynomial of degree <= D vanishes on the points.
    Hausdorff {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Basis of the degree-D part of the vanishing ideal.
    Vanishing {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ApproxCmd {
    /// Single 2d-power matching f at finitely many points.
    Tk {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        eps: f64,
    },
    /// 2d-power close to f in sampled sup-norm.
    Sup {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 20)]
        max_degree: u32,
    },
    /// Truncated binomial series of (r + sign a)^{1/2d}.
    Series {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        terms: u32,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sign: i8,
    },
    /// Element of the module generated by the generators matching a at the points.
    Module {
        #[arg(long)]
        poly: PathBuf,
        /// Generator polynomial file; repeatable.
        #[arg(long = "generator")]
        generators: Vec<PathBuf>,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        d: u32,
    },
    /// Minimum of f over fattenings of a region.
    Fattening {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        region: PathBuf,
        /// Comma-separated increasing radii.
        #[arg(long, value_parser = parse_point)]
        eps: Coords,
    },
}

#[derive(Subcommand, Debug)]
pub enum MomentsCmd {
    /// Hankel PSD check plus the sampled L(h^{2d}) >= 0 test.
    Check {
        #[arg(long)]
        moments: PathBuf,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Nonnegative atomic measure on the region's samples matching the moments.
    Recover {
        #[arg(long)]
        moments: PathBuf,
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Continuity constant against a weighted l1 norm.
    Continuity {
        #[arg(long)]
        moments: PathBuf,
        #[arg(long)]
        phi: PathBuf,
    },
    /// Moments of an atomic or uniform measure, as a moment file.
    FromMeasure {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        degree: u32,
    },
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long)]
    region: PathBuf,
    #[arg(long, default_value_t = 20)]
    max_degree: u32,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    region: PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 15)]
    degree: u32,
}

/// Comma-separated floats. An alias so clap treats it as one value.
type Coords = Vec<f64>;

fn parse_point(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad coordinate {t:?}: {e}"))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    pub tolerance: f64,
    pub exit_code: i32,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
    pub version: String,
}

/// What a finished invocation prints.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Verdict {
    ok: bool,
    result: Value,
    summary: String,
}

struct Ctx {
    inputs: Vec<InputDigest>,
    tol: f64,
    seed: u64,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        self.inputs.push(InputDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) });
        String::from_utf8(bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    fn json<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> Result<T> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    fn poly(&mut self, path: &Path) -> Result<Polynomial> {
        let file: crate::poly::PolynomialFile = self.json(path)?;
        Polynomial::try_from(file).map_err(|e| in_file(path, e))
    }

    fn points(&mut self, path: &Path) -> Result<Vec<Vec<f64>>> {
        let pts: Vec<Vec<f64>> = self.json(path)?;
        if let Some(p) = pts.iter().flatten().find(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("{}: non-finite coordinate {p}", path.display())));
        }
        Ok(pts)
    }

    fn region(&mut self, path: &Path) -> Result<Region> {
        let file: RegionFile = self.json(path)?;
        let base = path.parent().map(Path::to_path_buf);
        // inequality files referenced by path are inputs too
        for r in &file.ineqs {
            if let topologies::IneqRef::Path(p) = r {
                let full = base.as_ref().map_or_else(|| PathBuf::from(p), |b| b.join(p));
                self.read(&full)?;
            }
        }
        Region::from_file(file, base.as_deref()).map_err(|e| in_file(path, e))
    }

    fn phi(&mut self, path: &Path) -> Result<WeightFunction> {
        let file = self.json(path)?;
        WeightFunction::from_file(file).map_err(|e| in_file(path, e))
    }

    fn moments(&mut self, path: &Path) -> Result<MomentFunctional> {
        let file = self.json(path)?;
        MomentFunctional::from_file(file).map_err(|e| in_file(path, e))
    }
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        Error::Invariant { invariant, detail } => {
            Error::Invariant { invariant, detail: format!("{}: {detail}", path.display()) }
        }
        other => other,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report payloads serialize")
}

fn certificate_verdict(cert: Certificate, what: &str) -> Verdict {
    let summary = format!(
        "{what}: {} (largest residual {:e})",
        if cert.success { "certificate found" } else { "no certificate within budget" },
        cert.residuals.max()
    );
    Verdict { ok: cert.success, result: json!({ "certificate": to_value(&cert) }), summary }
}

/// Errors that are answers rather than bad input.
fn negative_verdict(e: &Error) -> Option<Verdict> {
    let (kind, extra) = match e {
        Error::NonMembership { point, value, tolerance } => {
            ("non-membership", json!({ "point": point, "value": value, "tolerance": tolerance }))
        }
        Error::ModuleContradiction { point, value } => {
            ("module-contradiction", json!({ "point": point, "value": value }))
        }
        Error::RankDeficient { degree, rank, columns, condition } => {
            ("rank-deficient", json!({ "degree": degree, "rank": rank, "columns": columns, "condition": condition }))
        }
        Error::NoSeparatedPoint { resolution } => ("no-separated-point", json!({ "resolution": resolution })),
        Error::IterationCap(n) => ("iteration-cap", json!({ "iterations": n })),
        _ => return None,
    };
    Some(Verdict {
        ok: false,
        result: json!({ "verdict": kind, "witness": extra, "message": e.to_string() }),
        summary: e.to_string(),
    })
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<Verdict> {
    match cmd {
        Command::Norms(a) => {
            let f = ctx.poly(&a.poly)?;
            let mut out = serde_json::Map::new();
            let mut lines = Vec::new();
            let rho = a
                .points
                .iter()
                .map(|x| Ok(json!({ "point": x, "rho": topologies::rho_alpha(&f, x)? })))
                .collect::<Result<Vec<_>>>()?;
            if !rho.is_empty() {
                lines.push(format!("{} evaluation seminorms", rho.len()));
                out.insert("rho".into(), Value::Array(rho));
            }
            if let Some(path) = &a.region {
                let k = ctx.region(path)?;
                let s = topologies::sup_norm(&f, &k)?;
                lines.push(format!("sup-norm {} on {} samples", s.value, s.samples));
                out.insert("sup".into(), to_value(&s));
            }
            if let Some(path) = &a.phi {
                let phi = ctx.phi(path)?;
                let v = topologies::phi_norm(&f, &phi)?;
                lines.push(format!("phi-norm {v}"));
                out.insert("phi_norm".into(), json!(v));
            }
            Ok(Verdict { ok: true, result: Value::Object(out), summary: lines.join("; ") })
        }
        Command::Spectrum(s) => match s {
            SpectrumCmd::KphiBox { phi, degree, n } => {
                let phi = ctx.phi(phi)?;
                let n = n
                    .or(phi.dim())
                    .ok_or_else(|| Error::InvalidArgument("this weight does not fix n; pass --n".into()))?;
                let radii = spectrum::kphi_box(&phi, n, *degree)?;
                let summary = format!("K_phi lies in the box with radii {radii:?}");
                Ok(Verdict { ok: true, result: json!({ "radii": radii, "degree": degree }), summary })
            }
            SpectrumCmd::KphiContains { phi, point, degree } => {
                let phi = ctx.phi(phi)?;
                let m = spectrum::kphi_contains(point, &phi, *degree)?;
                let summary = match &m.violated_at {
                    None => format!("{point:?} passes every test up to degree {degree}"),
                    Some(s) => format!("{point:?} violates |x^s| <= phi(s) at s = {s:?}"),
                };
                Ok(Verdict { ok: m.inside, result: to_value(&m), summary })
            }
            SpectrumCmd::Hausdorff { points, degree, tol } => {
                let pts = ctx.points(points)?;
                let basis = spectrum::vanishing_ideal_basis(&pts, *degree, tol.unwrap_or(ctx.tol))?;
                let dense = basis.basis.is_empty();
                let summary = format!(
                    "kernel dimension {} at degree {degree}: {}",
                    basis.basis.len(),
                    if dense { "Zariski dense to this degree" } else { "contained in a hypersurface" }
                );
                Ok(Verdict {
                    ok: dense,
                    result: json!({ "hausdorff": dense, "kernel_dimension": basis.basis.len(), "vanishing": to_value(&basis) }),
                    summary,
                })
            }
            SpectrumCmd::Vanishing { points, degree, tol } => {
                let pts = ctx.points(points)?;
                let basis = spectrum::vanishing_ideal_basis(&pts, *degree, tol.unwrap_or(ctx.tol))?;
                let summary = format!("{} vanishing polynomials of degree <= {degree}", basis.basis.len());
                Ok(Verdict { ok: true, result: to_value(&basis), summary })
            }
        },
        Command::Approx(a) => match a {
            ApproxCmd::Tk { poly, points, d, eps } => {
                let f = ctx.poly(poly)?;
                let pts = ctx.points(points)?;
                Ok(certificate_verdict(approx::tk_approximate(&f, &pts, *d, *eps)?, "tk"))
            }
            ApproxCmd::Sup { poly, region, d, eps, max_degree } => {
                let f = ctx.poly(poly)?;
                let k = ctx.region(region)?;
                Ok(certificate_verdict(approx::sup_approximate(&f, &k, *d, *eps, *max_degree)?, "sup"))
            }
            ApproxCmd::Series { poly, r, d, terms, phi, sign } => {
                let a = ctx.poly(poly)?;
                let phi = ctx.phi(phi)?;
                Ok(certificate_verdict(approx::series_root(*r, &a, *d, *terms, &phi, *sign)?, "series"))
            }
            ApproxCmd::Module { poly, generators, points, d } => {
                let a = ctx.poly(poly)?;
                let gens = generators.iter().map(|g| ctx.poly(g)).collect::<Result<Vec<_>>>()?;
                let pts = ctx.points(points)?;
                Ok(certificate_verdict(approx::module_interpolate(&a, &gens, &pts, *d)?, "module"))
            }
            ApproxCmd::Fattening { poly, region, eps } => {
                let f = ctx.poly(poly)?;
                let k = ctx.region(region)?;
                let rep = approx::psd_on_fattening(&f, &k, eps)?;
                let summary = format!(
                    "min over the eps = {} fattening is {}: {}",
                    rep.rows[0].eps,
                    rep.rows[0].min,
                    if rep.member { "nonnegative near K" } else { "negative arbitrarily close to K" }
                );
                Ok(Verdict { ok: rep.member, result: to_value(&rep), summary })
            }
        },
        Command::Moments(m) => match m {
            MomentsCmd::Check { moments, d, trials, tol } => {
                let l = ctx.moments(moments)?;
                let tol = tol.unwrap_or(ctx.tol);
                let hankel = if l.degree() >= 2 { Some(moments::hankel_psd_check(&l, tol)?) } else { None };
                let power = moments::power_psd_check(&l, *d, *trials, ctx.seed, tol)?;
                let hankel_ok = hankel.as_ref().is_none_or(|h| h.psd);
                let power_ok = power.outcome == PowerOutcome::PsdConsistent;
                let summary = format!(
                    "moment matrix {}; sampled 2d-power test {}",
                    match &hankel {
                        Some(h) if h.psd => format!("PSD (min eigenvalue {:e})", h.min_eigenvalue),
                        Some(h) => format!("not PSD (min eigenvalue {:e})", h.min_eigenvalue),
                        None => "not formed (D < 2)".into(),
                    },
                    if power_ok { "found no counterexample" } else { "found a counterexample" }
                );
                Ok(Verdict {
                    ok: hankel_ok && power_ok,
                    result: json!({ "hankel": hankel.map(|h| to_value(&h)), "power": to_value(&power) }),
                    summary,
                })
            }
            MomentsCmd::Recover { moments, region, tol } => {
                let l = ctx.moments(moments)?;
                let k = ctx.region(region)?;
                let r = moments::measure_recover(&l, &k, tol.unwrap_or(ctx.tol))?;
                let summary = format!(
                    "residual {:e} with {} atoms of {}{}",
                    r.residual,
                    r.support,
                    r.grid,
                    if r.success { "" } else { "; likely no representing measure on this grid" }
                );
                Ok(Verdict { ok: r.success, result: to_value(&r), summary })
            }
            MomentsCmd::Continuity { moments, phi } => {
                let l = ctx.moments(moments)?;
                let phi = ctx.phi(phi)?;
                let r = moments::phi_continuity(&l, &phi)?;
                let summary = format!(
                    "C_D = {} at s = {:?}; {}",
                    r.constant,
                    r.argmax,
                    if r.bounded { "stable at the truncation" } else { "still growing at the truncation" }
                );
                Ok(Verdict { ok: true, result: to_value(&r), summary })
            }
            MomentsCmd::FromMeasure { measure, degree } => {
                let mu: MeasureSpec = ctx.json(measure)?;
                let l = moments::from_measure(&mu, *degree)?;
                let summary = format!("{} moments up to degree {degree}", l.moments().count());
                Ok(Verdict { ok: true, result: to_value(&l.to_file()), summary })
            }
        },
        Command::Compare(a) => {
            let k = ctx.region(&a.region)?;
            let t = topologies::lasserre_threshold(&k, a.max_degree)?;
            let summary = match t.threshold {
                Some(n) => format!("M = {}; M^k/k! < 1 from k = {n}", t.m),
                None => format!("M = {}; M^k/k! >= 1 up to degree {}", t.m, a.max_degree),
            };
            Ok(Verdict { ok: true, result: to_value(&t), summary })
        }
        Command::Witness(a) => {
            let pts = ctx.points(&a.points)?;
            let k = ctx.region(&a.region)?;
            Ok(certificate_verdict(approx::strictness_witness(&pts, &k, a.eps, a.degree)?, "witness"))
        }
    }
}

/// Tolerance from `CONE2D_TOL`, or the default.
pub fn env_tolerance() -> std::result::Result<f64, String> {
    match std::env::var(TOL_ENV) {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
            _ => Err(format!("{TOL_ENV} must be a positive number, got {s:?}")),
        },
        Err(_) => Ok(DEFAULT_TOL),
    }
}

/// Runs one invocation. `args` excludes the program name.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(std::iter::once("cone2d".to_string()).chain(args.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let tol = match env_tolerance() {
        Ok(t) => t,
        Err(m) => return Outcome { code: 2, stdout: String::new(), stderr: format!("error: {m}\n") },
    };
    let start = Instant::now();
    let mut ctx = Ctx { inputs: Vec::new(), tol, seed: cli.seed };
    let verdict = match dispatch(&cli.command, &mut ctx) {
        Ok(v) => v,
        Err(e) => match negative_verdict(&e) {
            Some(v) => v,
            None => return Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
        },
    };
    let code = if verdict.ok { 0 } else { 1 };
    let report = RunReport {
        command: args,
        inputs: ctx.inputs,
        seed: cli.seed,
        tolerance: tol,
        exit_code: code,
        result: verdict.result,
        wall_time_ms: (!cli.no_timestamp).then(|| start.elapsed().as_secs_f64() * 1e3),
        timestamp_unix: (!cli.no_timestamp)
            .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let mut stdout = serde_json::to_string_pretty(&report).expect("reports serialize");
    stdout.push('\n');
    let stderr = if cli.summary { format!("{}\n", verdict.summary) } else { String::new() };
    Outcome { code, stdout, stderr }
}
