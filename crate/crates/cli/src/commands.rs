use clap::Args;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use siegel_theta::abelian_embed::{phi_d, psi_d, theta_null};
use siegel_theta::cones_tubes::{
    build_cm, build_mib, cone_contains, cone_generators, relative_interior_contains, theta0_constants, xd_member, xdk_member, ConeJson,
    IntegralCone, RaysJson,
};
use siegel_theta::reduction::{in_fundamental_set, in_fundamental_set_union, siegel_reduce, ReductionStatus};
use siegel_theta::sampling::{random_complex_vector, random_siegel_point};
use siegel_theta::sym_core::{in_siegel_space, MatrixJson, SiegelPoint};
use siegel_theta::symplectic::SymplecticJson;
use siegel_theta::theta_engine::{theta, theta_char, transformation_constancy, Characteristic};
use siegel_theta::Error;

use crate::input::{
    parse_int_rows, parse_polarization, parse_rational, parse_reals, parse_sym, parse_symplectic, parse_vector, resolve,
};
use crate::{CliError, Command, Config, Output};

#[derive(Args, Debug)]
pub struct TauArgs {
    /// Period matrix: complex literal, JSON rows, or {"re": .., "im": ..}.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: String,
    /// Expected genus, checked against the input.
    #[arg(long)]
    pub g: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ThetaArgs {
    #[command(flatten)]
    pub tau: TauArgs,
    /// Argument vector: JSON array or comma-separated complex literals.
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    /// Upper characteristic.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Lower characteristic.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
}

#[derive(Args, Debug)]
pub struct FundamentalArgs {
    #[command(flatten)]
    pub tau: TauArgs,
    /// JSON list of symplectic matrices; reports the first `k` with
    /// `tau` in `M_k` applied to the fundamental set.
    #[arg(long)]
    pub reps: Option<String>,
}

#[derive(Args, Debug)]
pub struct MemberArgs {
    #[command(flatten)]
    pub tau: TauArgs,
    /// Membership of tau in the fundamental set.
    #[arg(long, conflicts_with_all = ["xd", "xdk"])]
    pub fund: bool,
    /// Membership of (z, tau) in the closed parallelogram over the fundamental set.
    #[arg(long, requires_all = ["z", "d"])]
    pub xd: bool,
    /// Membership of (z, tau) in the coordinate box of size K over the fundamental set.
    #[arg(long, value_name = "K", requires_all = ["z", "d"], conflicts_with = "xd")]
    pub xdk: Option<f64>,
    /// Torus point for `--xd` and `--xdk`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Polarization type, e.g. `[1,2]`.
    #[arg(long = "D", id = "d")]
    pub d: Option<String>,
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub tau: TauArgs,
    /// Polarization type, e.g. `[1,2]`.
    #[arg(long = "D", id = "d")]
    pub d: String,
    /// Point of the torus; the theta-null point is returned when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Return both the point and the theta-null point.
    #[arg(long, requires = "z")]
    pub big: bool,
}

#[derive(Args, Debug)]
pub struct ThetaNullArgs {
    #[command(flatten)]
    pub tau: TauArgs,
    /// Upper characteristic, zero when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Lower characteristic, zero when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
}

#[derive(Args, Debug)]
pub struct ConeArgs {
    /// Print the constants (m, d, R) for genus g, type D and box size K.
    #[arg(long, requires_all = ["g", "d", "k"])]
    pub theta0: bool,
    /// Genus for `--theta0` and `--cm`.
    #[arg(long)]
    pub g: Option<usize>,
    /// Polarization type for `--theta0`.
    #[arg(long = "D", id = "d")]
    pub d: Option<String>,
    /// Box size for `--theta0`.
    #[arg(long = "K", id = "k")]
    pub k: Option<f64>,
    /// Print the closed Minkowski cone of the given genus.
    #[arg(long, value_name = "G")]
    pub mib: Option<usize>,
    /// Print the cone C_m of genus `--g` for the rational `m`.
    #[arg(long, value_name = "M", requires = "g")]
    pub cm: Option<String>,
    /// Cone as {"n": .., "A": [[..]]} or a JSON integer matrix.
    #[arg(long)]
    pub cone: Option<String>,
    /// Print integer generators of `--cone`.
    #[arg(long, requires = "cone")]
    pub generators: bool,
    /// Test membership of a real vector in `--cone`.
    #[arg(long, value_name = "X", requires = "cone", allow_hyphen_values = true)]
    pub contains: Option<String>,
    /// Test membership in the relative interior of `--cone`.
    #[arg(long, value_name = "X", requires = "cone", allow_hyphen_values = true)]
    pub interior: Option<String>,
    /// Tolerance for floating membership tests.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    /// Integral symplectic matrix as JSON rows or {"m": ..}.
    #[arg(long)]
    pub m: String,
    /// Upper characteristic of the theta function evaluated at `M tau`.
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<String>,
    /// Lower characteristic of the theta function evaluated at `M tau`.
    #[arg(long, allow_hyphen_values = true)]
    pub b1: Option<String>,
    /// Upper characteristic of the theta function evaluated at `tau`.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Lower characteristic of the theta function evaluated at `tau`.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// JSON list of {"z": [...], "tau": ...}.
    #[arg(long, conflicts_with = "random")]
    pub samples: Option<String>,
    /// Number of seeded random samples.
    #[arg(long, default_value_t = 20)]
    pub random: usize,
}

pub fn run(cmd: &Command, cfg: &Config) -> Output {
    match cmd {
        Command::Theta(a) => cmd_theta(a, cfg),
        Command::ReduceTau(a) => cmd_reduce(a, cfg),
        Command::CheckFundamental(a) => cmd_fundamental(a, cfg),
        Command::Member(a) => cmd_member(a, cfg),
        Command::Embed(a) => cmd_embed(a, cfg),
        Command::ThetaNull(a) => cmd_theta_null(a, cfg),
        Command::Cone(a) => cmd_cone(a),
        Command::TransformCheck(a) => cmd_transform(a, cfg),
    }
}

fn to_value(v: impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

fn read_tau(args: &TauArgs, cfg: &Config) -> Result<SiegelPoint, CliError> {
    let sym = parse_sym(&resolve(&args.tau)?)?;
    if let Some(g) = args.g {
        if g != sym.g() {
            return Err(Error::DimensionMismatch { expected: g, found: sym.g() }.into());
        }
    }
    in_siegel_space(&sym, cfg.pd_tol).ok_or(CliError::Domain(Error::NotInSiegelSpace))
}

fn read_z(text: &str, g: usize) -> Result<Vec<Complex64>, CliError> {
    let z = parse_vector(&resolve(text)?)?;
    if z.len() != g {
        return Err(Error::DimensionMismatch { expected: g, found: z.len() }.into());
    }
    Ok(z)
}

fn read_characteristic(a: &Option<String>, b: &Option<String>, g: usize) -> Result<Characteristic, CliError> {
    let part = |s: &Option<String>| -> Result<Vec<f64>, CliError> {
        match s {
            Some(s) => parse_reals(&resolve(s)?),
            None => Ok(vec![0.0; g]),
        }
    };
    let ch = Characteristic::new(part(a)?, part(b)?)?;
    if ch.g() != g {
        return Err(Error::DimensionMismatch { expected: g, found: ch.g() }.into());
    }
    Ok(ch)
}

fn cmd_theta(args: &ThetaArgs, cfg: &Config) -> Output {
    let tau = read_tau(&args.tau, cfg)?;
    let z = read_z(&args.z, tau.g())?;
    let v = if args.a.is_none() && args.b.is_none() {
        theta(&z, &tau, cfg.eps)?
    } else {
        theta_char(&read_characteristic(&args.a, &args.b, tau.g())?, &z, &tau, cfg.eps)?
    };
    Ok(to_value(v))
}

fn cmd_reduce(args: &TauArgs, cfg: &Config) -> Output {
    let tau = read_tau(args, cfg)?;
    let cert = siegel_reduce(&tau, cfg.check_radius)?;
    let (status, radius) = match cert.status {
        ReductionStatus::Exact => ("Exact", None),
        ReductionStatus::CheckedOnBall(r) => ("CheckedOnBall", Some(r)),
    };
    Ok(json!({
        "tau_reduced": MatrixJson::from(cert.tau_reduced.tau()),
        "sigma": SymplecticJson::from(&cert.sigma),
        "status": status,
        "check_radius": radius,
        "residual": cert.residual,
        "iterations": cert.iterations,
    }))
}

fn cmd_fundamental(args: &FundamentalArgs, cfg: &Config) -> Output {
    let tau = read_tau(&args.tau, cfg)?;
    match &args.reps {
        None => Ok(json!({ "verdict": in_fundamental_set(&tau, cfg.check_radius) })),
        Some(text) => {
            let specs: Vec<SymplecticJson> =
                serde_json::from_str(&resolve(text)?).map_err(|e| CliError::Parse(format!("invalid reps JSON: {e}")))?;
            let reps = specs.iter().map(SymplecticJson::to_matrix).collect::<Result<Vec<_>, _>>()?;
            Ok(json!({ "index": in_fundamental_set_union(&tau, &reps, cfg.check_radius)? }))
        }
    }
}

fn cmd_member(args: &MemberArgs, cfg: &Config) -> Output {
    let tau = read_tau(&args.tau, cfg)?;
    let verdict = in_fundamental_set(&tau, cfg.check_radius);
    if !args.xd && args.xdk.is_none() {
        return Ok(json!({ "verdict": verdict }));
    }
    let d = parse_polarization(args.d.as_deref().unwrap_or_default())?;
    let z = read_z(args.z.as_deref().unwrap_or_default(), tau.g())?;
    let pred = |_: &SiegelPoint| verdict.is_member();
    let member = match args.xdk {
        Some(k) if !(k > 0.0) => return Err(Error::InvalidParameter("K must be positive".into()).into()),
        Some(k) => xdk_member(&z, &tau, &d, k, pred)?,
        None => xd_member(&z, &tau, &d, pred, cfg.matrix_tol)?,
    };
    Ok(json!({ "member": member, "verdict": verdict }))
}

fn cmd_embed(args: &EmbedArgs, cfg: &Config) -> Output {
    let tau = read_tau(&args.tau, cfg)?;
    let d = parse_polarization(&resolve(&args.d)?)?;
    if d.d1() < 2 {
        eprintln!("warning: d1 = {} < 2, the theta coordinates may vanish simultaneously", d.d1());
    }
    match &args.z {
        None => Ok(to_value(psi_d(&tau, &d, cfg.eps)?)),
        Some(text) => {
            let z = read_z(text, tau.g())?;
            let phi = phi_d(&z, &tau, &d, cfg.eps)?;
            if args.big {
                Ok(json!({ "phi": phi, "psi": psi_d(&tau, &d, cfg.eps)? }))
            } else {
                Ok(to_value(phi))
            }
        }
    }
}

fn cmd_theta_null(args: &ThetaNullArgs, cfg: &Config) -> Output {
    let tau = read_tau(&args.tau, cfg)?;
    let ch = read_characteristic(&args.a, &args.b, tau.g())?;
    Ok(to_value(theta_null(&ch, &tau, cfg.eps)?))
}

fn read_cone(text: &str) -> Result<IntegralCone, CliError> {
    let text = resolve(text)?;
    let t = text.trim();
    if t.starts_with('{') {
        let spec: ConeJson = serde_json::from_str(t).map_err(|e| CliError::Parse(format!("invalid cone JSON: {e}")))?;
        return Ok(spec.to_cone()?);
    }
    let rows = parse_int_rows(t)?;
    let n = rows.first().map_or(0, Vec::len);
    Ok(IntegralCone::new(n, rows)?)
}

fn cmd_cone(args: &ConeArgs) -> Output {
    if args.theta0 {
        let (g, k) = (args.g.unwrap_or_default(), args.k.unwrap_or_default());
        let d = parse_polarization(args.d.as_deref().unwrap_or_default())?;
        if d.g() != g {
            return Err(Error::DimensionMismatch { expected: g, found: d.g() }.into());
        }
        if !(k > 0.0) {
            return Err(Error::InvalidParameter("K must be positive".into()).into());
        }
        return Ok(to_value(theta0_constants(g, &d, k)));
    }
    if let Some(g) = args.mib {
        return Ok(to_value(ConeJson::from(&build_mib(g)?)));
    }
    if let Some(m) = &args.cm {
        return Ok(to_value(ConeJson::from(&build_cm(args.g.unwrap_or_default(), parse_rational(m)?)?)));
    }
    let Some(text) = &args.cone else {
        return Err(CliError::Parse("cone needs one of --theta0, --mib, --cm or --cone".into()));
    };
    let cone = read_cone(text)?;
    if let Some(x) = &args.contains {
        let x = parse_reals(&resolve(x)?)?;
        return Ok(json!({ "member": cone_contains(&cone, &x, args.tol)? }));
    }
    if let Some(x) = &args.interior {
        let x = parse_reals(&resolve(x)?)?;
        return Ok(json!({ "interior": relative_interior_contains(&cone, &x, args.tol)? }));
    }
    if args.generators {
        return Ok(to_value(RaysJson { rays: cone_generators(&cone)? }));
    }
    Ok(to_value(ConeJson::from(&cone)))
}

#[derive(Deserialize)]
struct SampleJson {
    z: Value,
    tau: Value,
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn cmd_transform(args: &TransformArgs, cfg: &Config) -> Output {
    let m = parse_symplectic(&resolve(&args.m)?)?;
    let g = m.g();
    let ch1 = read_characteristic(&args.a1, &args.b1, g)?;
    let ch = read_characteristic(&args.a, &args.b, g)?;
    let samples: Vec<(Vec<Complex64>, SiegelPoint)> = match &args.samples {
        Some(text) => {
            let raw: Vec<SampleJson> =
                serde_json::from_str(&resolve(text)?).map_err(|e| CliError::Parse(format!("invalid samples JSON: {e}")))?;
            raw.iter()
                .map(|s| {
                    let tau = read_tau(&TauArgs { tau: value_text(&s.tau), g: Some(g) }, cfg)?;
                    Ok((read_z(&value_text(&s.z), g)?, tau))
                })
                .collect::<Result<_, CliError>>()?
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..args.random)
                .map(|_| {
                    let tau = random_siegel_point(g, 0.5, 0.5, &mut rng);
                    (random_complex_vector(g, 0.5, &mut rng), tau)
                })
                .collect()
        }
    };
    Ok(to_value(transformation_constancy(&m, &ch1, &ch, &samples, cfg.eps)?))
}
