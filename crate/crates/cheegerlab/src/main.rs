//! Command-line frontend: model-space tables, constellation verdicts,
//! test-surface generation and mesh analysis.
//!
//! Exit codes: 0 success, 2 spec/parse error, 3 numeric failure,
//! 4 input mismatch (domains, truncation, ambient tags).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cheegerlab::ambient::AmbientModel;
use cheegerlab::error::Error;
use cheegerlab::extrinsic::{
    cheeger_estimate_from_profile, compute_profile, verify_isoperimetric_inequality,
    CheegerReport, MarginReport,
};
use cheegerlab::generators::{generate_surface, SurfaceKind};
use cheegerlab::iso_comparison::{
    BalanceVerdict, CheegerValue, ComparisonConstellation, ConstructionMethod,
};
use cheegerlab::laplacian::{
    discrete_laplacian_check, divergence_audit, DivergenceReport, LaplacianReport,
};
use cheegerlab::mesh::SampledSubmanifold;
use cheegerlab::model_space::{AnalyticProfile, ModelSpace, WarpingFunction};
use cheegerlab::numerics::{linear_grid, log_grid};
use cheegerlab::Result;

#[derive(Parser)]
#[command(
    name = "cheegerlab",
    version,
    about = "Comparison geometry of model spaces and Cheeger bounds on sampled minimal submanifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate w, eta_w, K_w, volumes and the isoperimetric quotient.
    Model(ModelArgs),
    /// Build a comparison space from a constellation spec and report
    /// balance verdicts and both Cheeger bound values.
    Constellation(ConstellationArgs),
    /// Generate a test surface mesh.
    Gen(GenArgs),
    /// Analyze a mesh against a constellation: growth profile,
    /// isoperimetric margins, Cheeger estimate.
    Analyze(AnalyzeArgs),
    /// Pointwise discrete Laplacian comparison on a mesh.
    LaplacianCheck(MeshCheckArgs),
    /// Divergence-theorem audit on an extrinsic ball.
    DivergenceAudit(DivergenceArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Space-form curvature of the warping profile.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["w_csv", "profile"])]
    b: Option<f64>,
    /// Tabulated warping profile (CSV with header 'r,w').
    #[arg(long)]
    w_csv: Option<PathBuf>,
    /// Named analytic profile (e.g. 'exp-r2').
    #[arg(long)]
    profile: Option<String>,
    /// Model dimension m >= 2.
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long)]
    rmax: f64,
    #[arg(long, default_value_t = 1e-3)]
    rmin: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstellationArgs {
    /// Constellation spec JSON.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    grid_min: f64,
    /// Upper end of the balance grid (defaults to 0.999 R).
    #[arg(long)]
    grid_max: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    grid_points: usize,
    /// Largest probe radius for the Cheeger tail limits.
    #[arg(long, default_value_t = 40.0)]
    rmax: f64,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Plane,
    Catenoid,
    Helicoid,
    H2InH3,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    #[arg(long)]
    tmax: f64,
    /// Resolution multiplier (1.0 = calibrated defaults).
    #[arg(long, default_value_t = 1.0)]
    density: f64,
    /// Catenoid neck radius.
    #[arg(long, default_value_t = 1.0)]
    neck: f64,
    /// Helicoid pitch.
    #[arg(long, default_value_t = 1.0)]
    pitch: f64,
    /// Ambient curvature for h2-in-h3.
    #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
    b: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    t_min: f64,
    #[arg(long)]
    t_max: f64,
    #[arg(long, default_value_t = 60)]
    t_count: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    spacing: Spacing,
}

#[derive(Clone, Copy, ValueEnum)]
enum Spacing {
    Linear,
    Log,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    constellation: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    /// Also run the discrete Laplacian comparison.
    #[arg(long)]
    laplacian: bool,
    /// Also run the divergence audit at this radius.
    #[arg(long)]
    divergence: Option<f64>,
    /// Output directory for profile.csv and verdict.json.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct MeshCheckArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    constellation: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DivergenceArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    constellation: PathBuf,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    cheegerlab::init_thread_pool_from_env();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Model(a) => cmd_model(a),
        Command::Constellation(a) => cmd_constellation(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::LaplacianCheck(a) => cmd_laplacian(a),
        Command::DivergenceAudit(a) => cmd_divergence(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Spec(_) | Error::InvalidProfile(_) | Error::InvalidBounding(_) | Error::Io(_) => 2,
        Error::QuadratureNonConvergent { .. } | Error::NonConvergentTail { .. } => 3,
        Error::Domain { .. }
        | Error::AmbientMismatch(_)
        | Error::OffModel { .. }
        | Error::InvalidMesh(_) => 4,
    }
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut json = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Spec(format!("report serialization: {e}")))?;
    json.push('\n');
    Ok(json)
}

fn cmd_model(a: ModelArgs) -> Result<()> {
    let warping = match (a.b, &a.w_csv, &a.profile) {
        (Some(b), None, None) => WarpingFunction::space_form(b),
        (None, Some(p), None) => {
            let text = std::fs::read_to_string(p)?;
            WarpingFunction::from_csv(&text)?
        }
        (None, None, Some(name)) => WarpingFunction::Analytic(AnalyticProfile::parse(name)?),
        _ => {
            return Err(Error::Spec(
                "exactly one of --b, --w-csv, --profile must be given".into(),
            ))
        }
    };
    let ms = ModelSpace::new(a.m, warping)?;
    if !(a.rmin > 0.0 && a.rmax > a.rmin) {
        return Err(Error::Spec(format!("bad radius range [{}, {}]", a.rmin, a.rmax)));
    }
    let grid = log_grid(a.rmin, a.rmax, a.points.max(2));
    let mut csv = String::from("r,w,eta_w,K_w,vol_sphere,vol_ball,q_w\n");
    for &r in &grid {
        let w = ms.eval_w(r)?;
        let eta = ms.eta_w(r)?;
        let k = ms.curvature_k_w(r)?;
        let vs = ms.sphere_volume(r)?;
        let vb = ms.ball_volume(r)?;
        let q = ms.isoperimetric_quotient(r)?;
        csv.push_str(&format!("{r},{w},{eta},{k},{vs},{vb},{q}\n"));
    }
    emit(&a.out, &csv)
}

/// A Cheeger bound value, or the reason none exists. Divergent tails are
/// expected for spaces violating a balance hypothesis and are data, not
/// command failures.
#[derive(Serialize)]
#[serde(untagged)]
enum CheegerOutcome {
    Value(CheegerValue),
    Failed { error: String },
}

impl From<Result<CheegerValue>> for CheegerOutcome {
    fn from(r: Result<CheegerValue>) -> Self {
        match r {
            Ok(v) => CheegerOutcome::Value(v),
            Err(e) => CheegerOutcome::Failed { error: e.to_string() },
        }
    }
}

#[derive(Serialize)]
struct ConstellationReport {
    m: usize,
    r_end: f64,
    ambient_curvature: Option<f64>,
    construction_method: ConstructionMethod,
    ode_cross_check_max_rel_dev: f64,
    balance: BalanceVerdict,
    cheeger_upper: CheegerOutcome,
    cheeger_lower: CheegerOutcome,
}

fn cmd_constellation(a: ConstellationArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.spec)?;
    let base = a.spec.parent().unwrap_or(Path::new("."));
    let cons = ComparisonConstellation::parse_json(&text, base)?;
    let space = cons.space();
    let hi = a
        .grid_max
        .unwrap_or(space.r_end() * 0.999)
        .min(space.r_end() * 0.999);
    let grid = log_grid(a.grid_min, hi, a.grid_points.max(100));
    let balance = cons.balance_verdict(&grid)?;
    let rmax = a.rmax.min(space.r_end() * 0.99);
    let report = ConstellationReport {
        m: cons.dimension(),
        r_end: space.r_end(),
        ambient_curvature: cons.ambient_curvature(),
        construction_method: space.construction_method(),
        ode_cross_check_max_rel_dev: space.cross_check_max_rel_dev(),
        balance,
        cheeger_upper: space.cheeger_upper_value(rmax, 9).into(),
        cheeger_lower: space.cheeger_lower_value(rmax, 9).into(),
    };
    emit(&a.out, &to_json(&report)?)
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let kind = match a.kind {
        GenKind::Plane => SurfaceKind::EuclideanPlaneThroughPole,
        GenKind::Catenoid => SurfaceKind::Catenoid { neck: a.neck },
        GenKind::Helicoid => SurfaceKind::Helicoid { pitch: a.pitch },
        GenKind::H2InH3 => SurfaceKind::HyperbolicGeodesicPlane { b: a.b },
    };
    let mesh = generate_surface(kind, a.tmax, a.density)?;
    mesh.write_off(&a.out)?;
    eprintln!(
        "wrote {} ({} vertices, {} faces, truncation radius {:.6})",
        a.out.display(),
        mesh.n_vertices(),
        mesh.n_faces(),
        mesh.truncation_radius()
    );
    Ok(())
}

fn load_matching(
    mesh_path: &Path,
    cons_path: &Path,
) -> Result<(SampledSubmanifold, ComparisonConstellation)> {
    let mesh = SampledSubmanifold::read_off(mesh_path)?;
    let text = std::fs::read_to_string(cons_path)?;
    let base = cons_path.parent().unwrap_or(Path::new("."));
    let cons = ComparisonConstellation::parse_json(&text, base)?;
    if cons.dimension() != 2 {
        return Err(Error::AmbientMismatch(format!(
            "mesh analysis needs m = 2, constellation has m = {}",
            cons.dimension()
        )));
    }
    match cons.ambient_curvature() {
        Some(b) => {
            let mesh_b = mesh.ambient().curvature();
            if (b - mesh_b).abs() > 1e-12 {
                let tag = match mesh.ambient().model() {
                    AmbientModel::Euclidean => "euclidean".to_string(),
                    AmbientModel::Hyperboloid => format!("hyperboloid b={mesh_b}"),
                };
                return Err(Error::AmbientMismatch(format!(
                    "mesh is tagged '{tag}' but the constellation has b = {b}"
                )));
            }
        }
        None => {
            return Err(Error::AmbientMismatch(
                "mesh analysis needs a space-form ambient bound in the constellation".into(),
            ))
        }
    }
    Ok((mesh, cons))
}

#[derive(Serialize)]
struct MeshSummary {
    n_vertices: usize,
    n_faces: usize,
    h_max: f64,
    mean_edge: f64,
    truncation_radius: f64,
    max_radiality: f64,
}

fn mesh_summary(mesh: &SampledSubmanifold) -> MeshSummary {
    MeshSummary {
        n_vertices: mesh.n_vertices(),
        n_faces: mesh.n_faces(),
        h_max: mesh.h_max(),
        mean_edge: mesh.mean_edge(),
        truncation_radius: mesh.truncation_radius(),
        max_radiality: mesh.max_radiality(),
    }
}

#[derive(Serialize)]
struct AnalyzeReport {
    mesh: MeshSummary,
    eps_mesh: f64,
    worst_f_monotonicity_violation: f64,
    worst_deficit_negativity: f64,
    balance: BalanceVerdict,
    isoperimetric: MarginReport,
    cheeger: CheegerReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    laplacian: Option<LaplacianReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    divergence: Option<DivergenceReport>,
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<()> {
    let (mesh, cons) = load_matching(&a.mesh, &a.constellation)?;
    let space = cons.space();
    if !(a.grid.t_min > 0.0 && a.grid.t_max > a.grid.t_min) {
        return Err(Error::Spec(format!(
            "bad t grid [{}, {}]",
            a.grid.t_min, a.grid.t_max
        )));
    }
    let grid = match a.grid.spacing {
        Spacing::Linear => linear_grid(a.grid.t_min, a.grid.t_max, a.grid.t_count.max(2)),
        Spacing::Log => log_grid(a.grid.t_min, a.grid.t_max, a.grid.t_count.max(2)),
    };
    let profile = compute_profile(&mesh, space, &grid)?;
    let isoperimetric = verify_isoperimetric_inequality(&profile);
    let cheeger = cheeger_estimate_from_profile(&profile, space)?;
    let balance_grid = log_grid((a.grid.t_min * 1e-2).max(1e-4), space.r_end() * 0.999, 400);
    let balance = cons.balance_verdict(&balance_grid)?;
    let laplacian = if a.laplacian {
        Some(discrete_laplacian_check(&mesh, space)?)
    } else {
        None
    };
    let divergence = match a.divergence {
        Some(t) => Some(divergence_audit(&mesh, space, t)?),
        None => None,
    };
    let report = AnalyzeReport {
        mesh: mesh_summary(&mesh),
        eps_mesh: profile.eps_mesh,
        worst_f_monotonicity_violation: profile.worst_monotonicity_violation(),
        worst_deficit_negativity: profile.worst_deficit_negativity(),
        balance,
        isoperimetric,
        cheeger,
        laplacian,
        divergence,
    };
    std::fs::create_dir_all(&a.out_dir)?;
    std::fs::write(a.out_dir.join("profile.csv"), profile.to_csv())?;
    std::fs::write(a.out_dir.join("verdict.json"), to_json(&report)?)?;
    Ok(())
}

fn cmd_laplacian(a: MeshCheckArgs) -> Result<()> {
    let (mesh, cons) = load_matching(&a.mesh, &a.constellation)?;
    let report = discrete_laplacian_check(&mesh, cons.space())?;
    emit(&a.out, &to_json(&report)?)
}

fn cmd_divergence(a: DivergenceArgs) -> Result<()> {
    let (mesh, cons) = load_matching(&a.mesh, &a.constellation)?;
    let report = divergence_audit(&mesh, cons.space(), a.t)?;
    emit(&a.out, &to_json(&report)?)
}
