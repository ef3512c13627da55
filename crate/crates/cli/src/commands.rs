use crate::config::{Resolved, RunConfig};
use crate::output::{file_name, num, OutputDir};
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;
use std::time::Instant;
use weyl_scatter::oracle::mie_farfield;
use weyl_scatter::scattering::{
    amplitude_from_system, eigenfunction_from_system, resolvent_kernel_from_system, s_matrix, AmplitudeConvention, DirectionGrid, FarField,
    Scatterer,
};
use weyl_scatter::specfun::far_field_constant;
use weyl_scatter::validation::{self, Check, Fault, Level, Options};
use weyl_scatter::{Branch, Complex64, Error, SpectralParameter, Support};

pub const SEED_GOLDEN_VAR: &str = "WEYL_SCATTER_SEED_GOLDEN";

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    ValidationFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ValidationFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::ValidationFailed(n) => write!(f, "validation failed: {n} check(s) did not pass"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Config(format!("{}: {e}", path.display()))
}

#[derive(Serialize)]
struct Software {
    name: &'static str,
    version: &'static str,
}

#[derive(Serialize)]
struct Convention {
    argument_order: &'static str,
    normalization: &'static str,
    far_field_constant: Vec<KConstant>,
}

#[derive(Serialize)]
struct KConstant {
    k: f64,
    re: f64,
    im: f64,
}

#[derive(Serialize, Default)]
struct RunRecord {
    k: f64,
    file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    condition_estimate: Option<f64>,
    seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    unitarity_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    helmholtz_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    masked_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resolvent: Option<ResolventRecord>,
}

#[derive(Serialize)]
struct ResolventRecord {
    limit: [f64; 2],
    swapped_limit: [f64; 2],
    symmetry_difference: f64,
    sweep: Vec<SweepPoint>,
    monotone_approach: bool,
}

#[derive(Serialize)]
struct SweepPoint {
    eps: f64,
    distance_to_limit: f64,
}

#[derive(Serialize)]
struct CheckRecord {
    criterion: u32,
    name: String,
    comparison: &'static str,
    tolerance: f64,
    observed: Option<f64>,
    passed: bool,
    seconds: f64,
}

impl From<&Check> for CheckRecord {
    fn from(c: &Check) -> Self {
        CheckRecord {
            criterion: c.criterion,
            name: c.name.clone(),
            comparison: c.comparison.symbol(),
            tolerance: c.tolerance,
            observed: c.observed.is_finite().then_some(c.observed),
            passed: c.passed,
            seconds: c.seconds,
        }
    }
}

#[derive(Serialize)]
pub struct Manifest {
    schema: &'static str,
    software: Software,
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<RunConfig>,
    threads: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    golden: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    convention: Option<Convention>,
    runs: Vec<RunRecord>,
    checks: Vec<CheckRecord>,
    total_seconds: f64,
    files: Vec<String>,
}

impl Manifest {
    fn new(command: &str, config: Option<RunConfig>) -> Self {
        Manifest {
            schema: "weyl-scatter-manifest/1",
            software: Software { name: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") },
            command: command.into(),
            config,
            threads: rayon::current_num_threads(),
            golden: None,
            convention: None,
            runs: vec![],
            checks: vec![],
            total_seconds: 0.0,
            files: vec![],
        }
    }

    fn finish(mut self, out: &mut OutputDir, started: Instant) -> Result<(), CliError> {
        self.total_seconds = started.elapsed().as_secs_f64();
        self.files = out.files.clone();
        out.write_manifest(&self).map_err(io_err(&out.root))
    }
}

fn convention(ks: &[f64]) -> Convention {
    let c = AmplitudeConvention::default();
    Convention {
        argument_order: c.argument_order(),
        normalization: c.normalization(),
        far_field_constant: ks
            .iter()
            .map(|&k| {
                let v = far_field_constant(k);
                KConstant { k, re: v.re, im: v.im }
            })
            .collect(),
    }
}

pub struct Context<'a> {
    pub run: &'a Resolved,
    pub out: &'a Path,
    pub quiet: bool,
}

impl Context<'_> {
    fn scatterer(&self) -> Scatterer {
        Scatterer::new(self.run.curve.clone(), self.run.bc.clone(), self.run.config.n)
    }

    fn branch(&self) -> Branch {
        self.run.config.branch.into()
    }

    fn sweep(&self) -> bool {
        self.run.config.k.is_sweep()
    }

    fn log(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

/// Far fields for every wavenumber, computed concurrently.
fn far_fields(ctx: &Context) -> Result<Vec<(FarField, f64)>, CliError> {
    let sc = ctx.scatterer();
    let dirs = DirectionGrid::uniform(ctx.run.config.m)?;
    let branch = ctx.branch();
    ctx.run
        .ks
        .par_iter()
        .map(|&k| {
            let t = Instant::now();
            let sys = sc.system(&SpectralParameter::limit(k, branch)?)?;
            let ff = amplitude_from_system(&sys, &dirs)?;
            Ok((ff, t.elapsed().as_secs_f64()))
        })
        .collect::<Result<Vec<_>, Error>>()
        .map_err(CliError::from)
}

fn farfield_rows(ff: &FarField) -> Vec<Vec<String>> {
    let m = ff.dirs.len();
    let mut rows = Vec::with_capacity(m * m);
    for o in 0..m {
        for i in 0..m {
            let s = ff.amplitude[(o, i)];
            rows.push(vec![num(ff.dirs.angles[o]), num(ff.dirs.angles[i]), num(s.re), num(s.im)]);
        }
    }
    rows
}

const FARFIELD_HEADER: [&str; 4] = ["theta_out", "theta_in", "re_s", "im_s"];

pub fn farfield(ctx: &Context) -> Result<(), CliError> {
    if std::env::var(SEED_GOLDEN_VAR).is_ok_and(|v| v == "1") {
        return seed_golden(ctx);
    }
    let started = Instant::now();
    let results = far_fields(ctx)?;
    let mut out = OutputDir::create(ctx.out).map_err(io_err(ctx.out))?;
    let mut manifest = Manifest::new("farfield", Some(ctx.run.config.clone()));
    manifest.convention = Some(convention(&ctx.run.ks));
    for (idx, (ff, secs)) in results.iter().enumerate() {
        let name = file_name("farfield", idx, ctx.sweep());
        out.write_csv(&name, &FARFIELD_HEADER, farfield_rows(ff)).map_err(io_err(ctx.out))?;
        ctx.log(format!("k = {}: wrote {name} (condition {:.3e})", ff.k, ff.condition));
        manifest.runs.push(RunRecord { k: ff.k, file: name, condition_estimate: Some(ff.condition), seconds: *secs, ..Default::default() });
    }
    manifest.finish(&mut out, started)
}

/// Writes the partial-wave far field in place of the boundary-integral one.
/// Only for circles with constant couplings, and only into an empty
/// directory.
fn seed_golden(ctx: &Context) -> Result<(), CliError> {
    let started = Instant::now();
    if let Ok(mut entries) = std::fs::read_dir(ctx.out) {
        if entries.next().is_some() {
            return Err(CliError::Config(format!(
                "{SEED_GOLDEN_VAR}=1 refuses to write into the non-empty directory {}",
                ctx.out.display()
            )));
        }
    }
    let radius = match ctx.run.curve {
        weyl_scatter::ClosedCurve::Circle { radius } => radius,
        _ => return Err(CliError::Config("golden fixtures are generated for circles only".into())),
    };
    if ctx.run.bc.support != Support::FullCurve {
        return Err(CliError::Config("golden fixtures need a full-curve condition".into()));
    }
    let dirs = DirectionGrid::uniform(ctx.run.config.m)?;
    let mut out = OutputDir::create(ctx.out).map_err(io_err(ctx.out))?;
    let mut manifest = Manifest::new("farfield", Some(ctx.run.config.clone()));
    manifest.golden = Some(true);
    manifest.convention = Some(convention(&ctx.run.ks));
    for (idx, &k) in ctx.run.ks.iter().enumerate() {
        let t = Instant::now();
        let mut ff = mie_farfield(&ctx.run.bc, k, radius, &dirs).map_err(|e| CliError::Config(e.to_string()))?;
        if ctx.branch() == Branch::Plus {
            ff.amplitude = ff.amplitude.adjoint();
        }
        let name = file_name("farfield", idx, ctx.sweep());
        out.write_csv(&name, &FARFIELD_HEADER, farfield_rows(&ff)).map_err(io_err(ctx.out))?;
        manifest.runs.push(RunRecord { k, file: name, seconds: t.elapsed().as_secs_f64(), ..Default::default() });
    }
    ctx.log(format!("seeded golden far field in {}", ctx.out.display()));
    manifest.finish(&mut out, started)
}

pub fn smatrix(ctx: &Context) -> Result<(), CliError> {
    let started = Instant::now();
    let results = far_fields(ctx)?;
    let mut out = OutputDir::create(ctx.out).map_err(io_err(ctx.out))?;
    let mut manifest = Manifest::new("smatrix", Some(ctx.run.config.clone()));
    manifest.convention = Some(convention(&ctx.run.ks));
    for (idx, (ff, secs)) in results.iter().enumerate() {
        let s = s_matrix(ff);
        let m = s.matrix.nrows();
        let rows = (0..m).flat_map(|r| {
            let s = &s;
            (0..m).map(move |c| vec![r.to_string(), c.to_string(), num(s.matrix[(r, c)].re), num(s.matrix[(r, c)].im)])
        });
        let name = file_name("smatrix", idx, ctx.sweep());
        out.write_csv(&name, &["row", "col", "re", "im"], rows).map_err(io_err(ctx.out))?;
        let residual = s.unitarity_residual();
        ctx.log(format!("k = {}: wrote {name}, unitarity residual {residual:.3e}", ff.k));
        manifest.runs.push(RunRecord {
            k: ff.k,
            file: name,
            condition_estimate: Some(ff.condition),
            seconds: *secs,
            unitarity_residual: Some(residual),
            ..Default::default()
        });
    }
    manifest.finish(&mut out, started)
}

pub fn field(ctx: &Context) -> Result<(), CliError> {
    let started = Instant::now();
    let fc = ctx.run.config.field.as_ref().ok_or_else(|| CliError::Config("field: the `field` section is required".into()))?;
    if ctx.branch() != Branch::Minus {
        return Err(CliError::Config("branch: generalized eigenfunctions use the outgoing (minus) branch".into()));
    }
    let points = fc.all_points();
    if points.is_empty() {
        return Err(CliError::Config("field: give `points` or a `grid`".into()));
    }
    let sc = ctx.scatterer();
    let h = 1e-3;
    let results = ctx
        .run
        .ks
        .par_iter()
        .map(|&k| -> Result<_, Error> {
            let t = Instant::now();
            let sys = sc.system(&SpectralParameter::limit(k, Branch::Minus)?)?;
            let u = eigenfunction_from_system(&sys, fc.incident, &points)?;
            // spot check on up to five points well away from the curve
            let far: Vec<_> = points.iter().filter(|p| sys.grid().distance_to_curve(**p) >= 0.5).take(5).copied().collect();
            let residual = if far.is_empty() {
                None
            } else {
                let mut stencil = Vec::new();
                for p in &far {
                    stencil.extend([*p, [p[0] + h, p[1]], [p[0] - h, p[1]], [p[0], p[1] + h], [p[0], p[1] - h]]);
                }
                let v = eigenfunction_from_system(&sys, fc.incident, &stencil)?.values;
                Some(
                    v.chunks(5)
                        .map(|c| ((c[1] + c[2] + c[3] + c[4] - 4.0 * c[0]) / (h * h) + k * k * c[0]).norm() / c[0].norm())
                        .fold(0.0, f64::max),
                )
            };
            Ok((k, u, residual, t.elapsed().as_secs_f64()))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut out = OutputDir::create(ctx.out).map_err(io_err(ctx.out))?;
    let mut manifest = Manifest::new("field", Some(ctx.run.config.clone()));
    for (idx, (k, u, residual, secs)) in results.into_iter().enumerate() {
        let rows = u.points.iter().zip(&u.values).zip(&u.masked).map(|((p, v), &masked)| {
            let (re, im) = if masked { ("NaN".to_string(), "NaN".to_string()) } else { (num(v.re), num(v.im)) };
            vec![num(p[0]), num(p[1]), re, im, u8::from(masked).to_string()]
        });
        let name = file_name("field", idx, ctx.sweep());
        out.write_csv(&name, &["x", "y", "re_u", "im_u", "masked"], rows).map_err(io_err(ctx.out))?;
        let masked = u.masked.iter().filter(|m| **m).count();
        ctx.log(format!("k = {k}: wrote {name} ({masked} masked point(s))"));
        manifest.runs.push(RunRecord {
            k,
            file: name,
            condition_estimate: Some(u.condition),
            seconds: secs,
            helmholtz_residual: residual,
            masked_points: Some(masked),
            ..Default::default()
        });
    }
    manifest.finish(&mut out, started)
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

pub fn resolvent(ctx: &Context) -> Result<(), CliError> {
    let started = Instant::now();
    let rc = ctx.run.config.resolvent.as_ref().ok_or_else(|| CliError::Config("resolvent: the `resolvent` section is required".into()))?;
    let sc = ctx.scatterer();
    let branch = ctx.branch();
    // Minus is approached from below the real axis, Plus from above.
    let side = if branch == Branch::Minus { -1.0 } else { 1.0 };
    let results = ctx
        .run
        .ks
        .par_iter()
        .map(|&k| -> Result<_, Error> {
            let t = Instant::now();
            let sys = sc.system(&SpectralParameter::limit(k, branch)?)?;
            let limit = resolvent_kernel_from_system(&sys, rc.x, rc.y0)?;
            let swapped = resolvent_kernel_from_system(&sys, rc.y0, rc.x)?;
            let mut sweep = Vec::new();
            for &eps in &rc.eps {
                let s = SpectralParameter::off_axis(Complex64::new(-k * k, side * eps))?;
                sweep.push((eps, resolvent_kernel_from_system(&sc.system(&s)?, rc.x, rc.y0)?));
            }
            Ok((k, limit, swapped, sweep, sys.condition, t.elapsed().as_secs_f64()))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut out = OutputDir::create(ctx.out).map_err(io_err(ctx.out))?;
    let mut manifest = Manifest::new("resolvent", Some(ctx.run.config.clone()));
    for (idx, (k, limit, swapped, sweep, condition, secs)) in results.into_iter().enumerate() {
        let mut rows: Vec<Vec<String>> = sweep.iter().map(|(eps, v)| vec![num(*eps), num(v.re), num(v.im)]).collect();
        rows.push(vec![num(0.0), num(limit.re), num(limit.im)]);
        let name = file_name("resolvent", idx, ctx.sweep());
        out.write_csv(&name, &["eps", "re_g", "im_g"], rows).map_err(io_err(ctx.out))?;
        let mut by_eps: Vec<SweepPoint> =
            sweep.iter().map(|(eps, v)| SweepPoint { eps: *eps, distance_to_limit: (v - limit).norm() }).collect();
        by_eps.sort_by(|a, b| b.eps.total_cmp(&a.eps));
        let monotone = by_eps.windows(2).all(|w| w[1].distance_to_limit <= w[0].distance_to_limit);
        ctx.log(format!("k = {k}: wrote {name}, limit {limit}"));
        manifest.runs.push(RunRecord {
            k,
            file: name,
            condition_estimate: Some(condition),
            seconds: secs,
            resolvent: Some(ResolventRecord {
                limit: pair(limit),
                swapped_limit: pair(swapped),
                symmetry_difference: (limit - swapped).norm(),
                sweep: by_eps,
                monotone_approach: monotone,
            }),
            ..Default::default()
        });
    }
    manifest.finish(&mut out, started)
}

pub fn validate(level: Level, fault: Fault, out: Option<&Path>, quiet: bool) -> Result<(), CliError> {
    let started = Instant::now();
    let opts = Options { level, fault };
    let mut checks = Vec::new();
    if !quiet {
        println!("{:<4} {:<46} {:>12} {:>12}  result", "crit", "check", "tolerance", "observed");
    }
    for c in validation::CRITERIA {
        for ch in validation::run_criterion(c, opts) {
            if !quiet {
                println!(
                    "{:<4} {:<46} {:>2} {:>9.2e} {:>12.4e}  {}",
                    ch.criterion,
                    ch.name,
                    ch.comparison.symbol(),
                    ch.tolerance,
                    ch.observed,
                    if ch.passed { "pass" } else { "FAIL" }
                );
            }
            checks.push(ch);
        }
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if !quiet {
        println!("{} checks, {} failed, {:.1} s", checks.len(), failed, started.elapsed().as_secs_f64());
    }
    if let Some(dir) = out {
        let mut od = OutputDir::create(dir).map_err(io_err(dir))?;
        let name = match level {
            Level::Quick => "validate quick",
            Level::Full => "validate full",
        };
        let mut manifest = Manifest::new(name, None);
        manifest.checks = checks.iter().map(CheckRecord::from).collect();
        manifest.finish(&mut od, started)?;
    }
    if failed > 0 {
        Err(CliError::ValidationFailed(failed))
    } else {
        Ok(())
    }
}
