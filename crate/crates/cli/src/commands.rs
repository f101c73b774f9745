//! Subcommand arguments and implementations.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use nlyoung::frac_calc::{frac_integral_left, frac_integral_right, weyl_left, weyl_right, QuadratureConfig};
use nlyoung::grid_fields::io::{read_path_csv, write_path_csv_to};
use nlyoung::grid_fields::{
    holder_seminorm_fn, holder_seminorm_path, parse_field, parse_function, parse_path, Regularity, SharedField, SharedFn,
};
use nlyoung::iterated::{growth_check, iterated_integral, IterConfig, IterMode, JointField};
use nlyoung::nonlinear_young::{
    centered_bound_check, indefinite_integral, integrate_sewing, kappa_holder, min_over_window, refined_bound_check,
    stability_in_medium, stability_in_path, FieldNorms, FractionalIntegrator, Method, DEFAULT_CELLS,
};
use nlyoung::young_core::{young_integral, YoungExponents};

use crate::spec::{run, ExperimentSpec};
use crate::suite::suite;
use crate::{CmdResult, Failure, Output, Status};

const COARSE_TOL: f64 = 1e-6;

/// Options shared by every subcommand.
#[derive(Clone, Debug, Default)]
pub struct Global {
    pub out: Output,
    /// `--quad`: cells or nodes of the fractional quadrature
    pub quad: Option<usize>,
    pub tol: Option<f64>,
}

impl Global {
    /// Commands with a coarse default resolution pass a looser default tolerance.
    fn cfg(&self, default_nodes: usize, default_tol: f64) -> QuadratureConfig {
        let mut c = QuadratureConfig::with_nodes(self.quad.unwrap_or(default_nodes));
        c.tol = self.tol.unwrap_or(default_tol);
        c
    }
}

/// A medium, a path, an interval and the exponents.
#[derive(Args, Clone, Debug)]
pub struct Problem {
    /// field descriptor or `.json` grid file
    #[arg(long)]
    pub field: String,
    /// path descriptor or `.csv` file
    #[arg(long)]
    pub path: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub gamma: f64,
    /// fractional order; the window midpoint by default
    #[arg(long)]
    pub alpha: Option<f64>,
}

struct Loaded {
    w: SharedField,
    phi: SharedFn,
    reg: Regularity,
}

impl Problem {
    fn load(&self) -> Result<Loaded, Failure> {
        let mut reg = Regularity::new(self.tau, self.lambda, self.gamma);
        if let Some(a) = self.alpha {
            reg = reg.with_alpha(a);
        }
        reg.validate()?;
        if self.a.is_nan() || self.b.is_nan() || self.a >= self.b {
            return Err(Failure::Invalid(format!("need a < b, got [{}, {}]", self.a, self.b)));
        }
        Ok(Loaded { w: parse_field(&self.field)?, phi: parse_path(&self.path)?, reg })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Frac,
    Sewing,
    Both,
}

#[derive(Args, Clone, Debug)]
pub struct IntegrateArgs {
    #[arg(long, value_enum, default_value_t = MethodChoice::Both)]
    pub method: MethodChoice,
    #[command(flatten)]
    pub problem: Problem,
    /// dyadic levels for the sewing method
    #[arg(long, default_value_t = 20)]
    pub levels: usize,
}

pub fn integrate(args: &IntegrateArgs, g: &Global) -> CmdResult {
    let p = args.problem.load()?;
    let (a, b) = (args.problem.a, args.problem.b);
    let mut reports = Vec::new();
    if args.method != MethodChoice::Sewing {
        let fi = FractionalIntegrator::new(g.cfg(DEFAULT_CELLS, 1e-8));
        reports.push(fi.integrate(p.w.as_ref(), p.phi.as_ref(), &p.reg, a, b)?);
    }
    if args.method != MethodChoice::Frac {
        let tol = g.tol.unwrap_or(0.0);
        reports.push(integrate_sewing(p.w.as_ref(), p.phi.as_ref(), a, b, args.levels, tol)?.0);
    }
    let converged = reports.iter().all(|r| r.converged);
    if reports.len() == 1 {
        g.out.json("integrate.json", &reports[0])?;
    } else {
        g.out.json("integrate.json", &reports)?;
    }
    Ok(Status { converged, passed: true })
}

#[derive(Args, Clone, Debug)]
pub struct YoungArgs {
    /// integrand descriptor
    #[arg(long)]
    pub f: String,
    /// integrator descriptor
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    pub alpha_f: f64,
    #[arg(long)]
    pub beta_g: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    /// fractional order; the window midpoint by default
    #[arg(long)]
    pub gamma: Option<f64>,
}

pub fn young(args: &YoungArgs, g: &Global) -> CmdResult {
    let (f, h) = (parse_path(&args.f)?, parse_path(&args.g)?);
    let exps = YoungExponents { alpha_f: args.alpha_f, beta_g: args.beta_g };
    let r = young_integral(f.as_ref(), h.as_ref(), exps, args.a, args.b, args.gamma, &g.cfg(4096, COARSE_TOL))?;
    g.out.json("young.json", &r)?;
    Ok(Status { converged: r.converged, passed: true })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundCheck {
    Holder,
    Centered,
    Refined,
    StabilityW,
    StabilityPhi,
}

#[derive(Args, Clone, Debug)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub check: BoundCheck,
    #[command(flatten)]
    pub problem: Problem,
    /// intervals `[a, a + (b - a) 2^-j]` for `j = 0..=j_max`
    #[arg(long, default_value_t = 6)]
    pub j_max: u32,
    /// `ℓ` of the pinned-start condition
    #[arg(long, default_value_t = 1.0)]
    pub ell: f64,
    /// `L` of the pinned-start condition
    #[arg(long, default_value_t = 1.0)]
    pub big_l: f64,
    /// target exponent of the refined bound; 0.9 of the threshold by default
    #[arg(long)]
    pub beta: Option<f64>,
    /// second medium for `stability-w`
    #[arg(long)]
    pub field2: Option<String>,
    /// second path for `stability-phi`
    #[arg(long)]
    pub path2: Option<String>,
    /// `θ` for `stability-phi`; the middle of its admissible range by default
    #[arg(long)]
    pub theta: Option<f64>,
}

#[derive(Serialize)]
struct Row {
    j: u32,
    interval: String,
    lhs: f64,
    rhs1: f64,
    rhs2: f64,
    ratio: f64,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else {
        f64::NAN
    }
}

pub fn bounds(args: &BoundsArgs, g: &Global) -> CmdResult {
    let p = args.problem.load()?;
    let cfg = g.cfg(DEFAULT_CELLS, 1e-8);
    let (w, phi, reg) = (p.w.as_ref(), p.phi.as_ref(), &p.reg);
    let a = args.problem.a;
    let second = |d: &Option<String>, what: &str| d.clone().ok_or_else(|| Failure::Invalid(format!("--{what} is required")));
    let w2 = if args.check == BoundCheck::StabilityW { Some(parse_field(&second(&args.field2, "field2")?)?) } else { None };
    let phi2 = if args.check == BoundCheck::StabilityPhi { Some(parse_path(&second(&args.path2, "path2")?)?) } else { None };
    let theta = args.theta.unwrap_or(0.5 * (1.0 + (1.0 - reg.tau) / (reg.lambda * reg.gamma)));
    let fi = FractionalIntegrator::new(cfg).diagnostics(false);
    let mut converged = true;
    let mut rows = Vec::new();
    for j in 0..=args.j_max {
        let b = a + (args.problem.b - a) * 0.5f64.powi(j as i32);
        let (lhs, rhs1, rhs2, r) = match args.check {
            BoundCheck::Holder => {
                let ev = fi.evaluate(w, phi, reg, a, b)?;
                converged &= ev.converged;
                let n = FieldNorms::estimate(w, phi, reg, a, b, fi.probe)?;
                let len = b - a;
                let t1 = n.field.total * len.powf(reg.tau);
                let t2 = n.holder_scale(reg, len) - t1;
                (ev.value.abs(), t1, t2, ratio(ev.value.abs(), t1 + t2))
            }
            BoundCheck::Centered => {
                let c = centered_bound_check(w, phi, reg, a, b, a, &cfg)?;
                (c.numerator, c.scale, c.kappa, c.ratio)
            }
            BoundCheck::Refined => {
                let thr = 1.0 + reg.epsilon() * args.ell / reg.gamma;
                let beta = args.beta.unwrap_or(0.9 * thr);
                let c = refined_bound_check(w, phi, reg, a, b, args.ell, args.big_l, beta, &cfg)?;
                (c.numerator, (b - a).powf(beta), c.beta_threshold, c.ratio)
            }
            BoundCheck::StabilityW => {
                let s = stability_in_medium(p.w.clone(), w2.clone().expect("checked"), phi, reg, a, b, &cfg)?;
                (s.lhs, s.terms.0, s.terms.1, ratio(s.lhs, s.bound))
            }
            BoundCheck::StabilityPhi => {
                let s = stability_in_path(w, phi, phi2.as_deref().expect("checked"), reg, theta, a, b, &cfg)?;
                (s.lhs, s.terms.0, s.terms.1, ratio(s.lhs, s.bound))
            }
        };
        rows.push(Row { j, interval: format!("[{a}, {b}]"), lhs, rhs1, rhs2, ratio: r });
    }
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        wtr.serialize(r).map_err(|e| Failure::Runtime(e.into()))?;
    }
    let bytes = wtr.into_inner().map_err(|e| Failure::Runtime(anyhow::anyhow!("{e}")))?;
    let name = format!("bounds_{}.csv", args.check.to_possible_value().expect("named").get_name());
    g.out.text(&name, &String::from_utf8_lossy(&bytes))?;
    if args.check == BoundCheck::Holder {
        eprintln!("constant over the window: {:.6}", min_over_window(reg, kappa_holder));
    }
    Ok(Status { converged, passed: true })
}

#[derive(Args, Clone, Debug)]
pub struct IndefiniteArgs {
    #[command(flatten)]
    pub problem: Problem,
    /// uniform points including both ends
    #[arg(long, default_value_t = 513)]
    pub points: usize,
}

pub fn indefinite(args: &IndefiniteArgs, g: &Global) -> CmdResult {
    let p = args.problem.load()?;
    let r = indefinite_integral(p.w.as_ref(), p.phi.as_ref(), &p.reg, args.problem.a, args.problem.b, args.points, &g.cfg(512, COARSE_TOL))?;
    let summary = json!({
        "slope": r.slope,
        "lags": r.lags,
        "rms_increments": r.rms_increments,
        "error_estimate": r.error_estimate,
        "converged": r.converged,
        "tau": p.reg.tau,
    });
    if g.out.dir.is_some() {
        let mut buf = Vec::new();
        write_path_csv_to(&r.path, &mut buf)?;
        g.out.text("indefinite_path.csv", &String::from_utf8_lossy(&buf))?;
        g.out.json("indefinite.json", &summary)?;
    } else {
        let mut v = summary;
        v["t"] = json!(r.path.ts());
        v["value"] = json!(r.path.values());
        g.out.json("indefinite.json", &v)?;
    }
    Ok(Status { converged: r.converged, passed: true })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeChoice {
    Diagonal,
    Nested,
    NestedPathBase,
}

#[derive(Args, Clone, Debug)]
pub struct IterateArgs {
    /// field descriptors separated by `;`, used in order; the last one repeats up to `--n`
    #[arg(long)]
    pub fields: String,
    /// `ρ` descriptor or `.csv` file
    #[arg(long, default_value = "const:c=1")]
    pub rho: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = ModeChoice::Diagonal)]
    pub mode: ModeChoice,
    #[arg(long, value_enum, default_value_t = MethodChoice::Frac)]
    pub method: MethodChoice,
    /// stage paths on `2^m + 1` points
    #[arg(long, default_value_t = 9)]
    pub m: usize,
    /// interval lengths `h1,h2,..` for the growth check on `[a, a + h]`
    #[arg(long, value_delimiter = ',')]
    pub growth_scales: Vec<f64>,
    /// growth exponent; 0.9 ℓ_n by default
    #[arg(long)]
    pub gamma_n: Option<f64>,
}

pub fn iterate(args: &IterateArgs, g: &Global) -> CmdResult {
    let descs: Vec<&str> = args.fields.split(';').map(str::trim).filter(|d| !d.is_empty()).collect();
    if descs.is_empty() {
        return Err(Failure::Invalid("--fields is empty".into()));
    }
    let n = args.n.unwrap_or(descs.len());
    if n < descs.len() {
        return Err(Failure::Invalid(format!("--n {n} is smaller than the {} fields given", descs.len())));
    }
    let mut fs = Vec::with_capacity(n);
    for k in 0..n {
        let d = descs[k.min(descs.len() - 1)];
        fs.push(JointField::new(parse_field(d)?, args.tau, args.lambda)?);
    }
    let rho = if args.rho.ends_with(".csv") {
        let p: SharedFn = std::sync::Arc::new(read_path_csv(&PathBuf::from(&args.rho))?);
        p
    } else {
        parse_function(&args.rho)?
    };
    let method = match args.method {
        MethodChoice::Frac => Method::Fractional,
        MethodChoice::Sewing => Method::Sewing,
        MethodChoice::Both => return Err(Failure::Invalid("iterate takes --method frac or sewing".into())),
    };
    let mode = match args.mode {
        ModeChoice::Diagonal => IterMode::Diagonal,
        ModeChoice::Nested => IterMode::Nested,
        ModeChoice::NestedPathBase => IterMode::NestedPathBase,
    };
    let cfg = IterConfig { mode, method, m: args.m, quad: g.cfg(4096, COARSE_TOL), ..Default::default() };
    let it = iterated_integral(&fs, rho.clone(), args.a, args.b, &cfg)?;
    let mut v = json!({
        "value": it.value,
        "error_estimate": it.error_estimate,
        "converged": it.converged,
        "stage_stats": it.stages,
    });
    if !args.growth_scales.is_empty() {
        let ell = nlyoung::iterated::GrowthParams::new(args.tau, args.lambda).ell(n);
        let gc = growth_check(&fs, rho, args.a, &args.growth_scales, args.gamma_n.unwrap_or(0.9 * ell), &cfg)?;
        v["growth"] = serde_json::to_value(&gc)?;
    }
    g.out.json("iterate.json", &v)?;
    Ok(Status { converged: it.converged, passed: true })
}

#[derive(Args, Clone, Debug)]
pub struct HolderArgs {
    /// path descriptor or `.csv` file
    #[arg(long)]
    pub path: String,
    #[arg(long)]
    pub exponent: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    /// probe cells for closed-form paths
    #[arg(long, default_value_t = 4096)]
    pub points: usize,
}

pub fn holder(args: &HolderArgs, g: &Global) -> CmdResult {
    let r = if args.path.ends_with(".csv") {
        holder_seminorm_path(&read_path_csv(&PathBuf::from(&args.path))?, args.exponent, args.a, args.b)?
    } else {
        holder_seminorm_fn(parse_function(&args.path)?.as_ref(), args.exponent, args.a, args.b, args.points)?
    };
    g.out.json("holder.json", &r)?;
    Ok(Status::OK)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FracOp {
    IntegralLeft,
    IntegralRight,
    WeylLeft,
    WeylRight,
}

#[derive(Args, Clone, Debug)]
pub struct FracArgs {
    #[arg(long, value_enum)]
    pub op: FracOp,
    /// function descriptor
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub alpha: f64,
    /// interval `[a, b]`; left operators are evaluated at `b`, right ones at `a`
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    /// Hölder exponent of `f` for the derivatives
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
}

pub fn frac(args: &FracArgs, g: &Global) -> CmdResult {
    let f = parse_function(&args.f)?;
    let cfg = g.cfg(4096, COARSE_TOL);
    let (f, al, a, b, mu) = (f.as_ref(), args.alpha, args.a, args.b, args.mu);
    let r = match args.op {
        FracOp::IntegralLeft => frac_integral_left(f, al, a, b, &cfg)?,
        FracOp::IntegralRight => frac_integral_right(f, al, a, b, &cfg)?,
        FracOp::WeylLeft => weyl_left(f, al, a, b, mu, &cfg)?,
        FracOp::WeylRight => weyl_right(f, al, a, b, mu, &cfg)?,
    };
    g.out.json("frac.json", &r)?;
    Ok(Status { converged: r.converged, passed: true })
}

pub fn run_spec(path: &PathBuf, g: &Global) -> CmdResult {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    let mut spec = ExperimentSpec::from_json(&text)?;
    if let Some(n) = g.quad {
        spec.quadrature.n_nodes = n;
    }
    if let Some(t) = g.tol {
        spec.quadrature.tol = t;
    }
    let report = run(&spec)?;
    let name = spec.output.clone().unwrap_or_else(|| "report.json".into());
    g.out.json(&name, &report)?;
    Ok(report.status())
}

pub fn run_suite(name: &str, g: &Global) -> CmdResult {
    let report = suite(name)?;
    g.out.json(&format!("suite_{name}.json"), &report)?;
    Ok(report.status())
}
