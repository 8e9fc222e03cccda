//! Command-line front end. `run` parses arguments, loads every input before
//! computing anything and returns the text to print plus any files to write,
//! so a failing command never leaves partial output behind.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{attach_pipeline, evaluate_all, evaluate_bound, exact_inverse_gap, reports_csv, BoundReport, Params};
use crate::covers::tree_fundamental_domain;
use crate::error::{Error, Result};
use crate::graph::{graph_diameter, shortest_path_tree};
use crate::homology::homology_table;
use crate::hyperbolic::{ball_volume, kappa, moser_constant};
use crate::io::{cycle_from_value, params_from_value, read_json, Workspace};
use crate::scl::{l1_filling, least_norm_filling, scl_report};
use crate::spectra::lambda1_split;
use crate::whitney::{
    chain_dual_norm, comb_norm, empirical_sup_constants, inner_product, norm_equivalence_constants, whitney_l2,
    whitney_sup_estimate, NormFamily, P,
};

#[derive(Parser, Debug)]
#[command(name = "hypspec", version, about = "Spectra, covers and filling bounds for triangulated manifolds")]
pub struct Cli {
    /// Seed for random cover specs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for JSON/CSV artifacts (stdout only when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simplicial complex checks.
    #[command(subcommand)]
    Complex(ComplexCmd),
    /// Finite covers from permutation specs.
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Smallest nonzero Laplacian eigenvalues in one degree.
    Spectrum(SpectrumArgs),
    /// Cochain norms and norm-comparison constants.
    #[command(subcommand)]
    Norms(NormsCmd),
    /// Least-norm fillings of null-homologous cycles.
    #[command(subcommand)]
    Scl(SclCmd),
    /// Catalogue of inequalities.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Moser constant, Sobolev constant and hyperbolic ball volume.
    Constants(ConstantsArgs),
}

#[derive(Subcommand, Debug)]
pub enum ComplexCmd {
    Validate { file: PathBuf },
    Homology { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum CoverCmd {
    Build { spec: PathBuf },
    /// Shortest-path spanning tree of the tile adjacency graph.
    Tree {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        root: usize,
    },
    /// Face pairings of the tree-type fundamental domain.
    Pairings {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        root: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Inner {
    Comb,
    Whitney,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Complex or cover spec, optionally followed by a geometry file.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    #[arg(long, value_enum, default_value_t = Inner::Comb)]
    pub inner: Inner,
    /// Also list the whole spectrum.
    #[arg(long)]
    pub full: bool,
}

#[derive(Subcommand, Debug)]
pub enum NormsCmd {
    /// Norm-equivalence constants of the Gram matrix and sampled sup ratios.
    Constants {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        /// Barycentric sampling denominator.
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// Norms of one cochain, `{"values": [...]}`.
    Eval {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        cochain: PathBuf,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
}

#[derive(Args, Debug)]
pub struct FillArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub cycle: PathBuf,
    #[arg(long, value_enum, default_value_t = Inner::Comb)]
    pub inner: Inner,
    /// Allowed relative excess of the rounded Whitney filling.
    #[arg(long, default_value_t = 1e-6)]
    pub delta: f64,
    /// Minimise the combinatorial ℓ¹ norm instead.
    #[arg(long)]
    pub l1: bool,
}

#[derive(Subcommand, Debug)]
pub enum SclCmd {
    Fill(FillArgs),
    Report(FillArgs),
}

#[derive(Subcommand, Debug)]
pub enum BoundsCmd {
    /// Evaluate one catalogue entry.
    Eval {
        #[arg(long)]
        id: String,
        #[arg(long)]
        params: Option<PathBuf>,
        /// Comma-separated complex/cover/geometry files.
        #[arg(long, value_delimiter = ',')]
        attach: Vec<PathBuf>,
    },
    /// Evaluate the whole catalogue.
    All {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        attach: Vec<PathBuf>,
    },
    /// List catalogue ids, formulas and parameters.
    List,
}

#[derive(Args, Debug)]
pub struct ConstantsArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long = "L", default_value_t = 1.0)]
    pub l: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Radius for the ball volume.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
}

/// What a command produced: text for stdout and named artifacts.
#[derive(Debug, Default, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub files: Vec<(String, String)>,
}

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Numerical(e.to_string()))
}

fn emit<T: Serialize>(name: &str, v: &T) -> Result<Output> {
    let text = pretty(v)?;
    Ok(Output { stdout: text.clone(), files: vec![(format!("{name}.json"), text)] })
}

fn geometry_for<'a>(ws: &'a Workspace, inner: Inner) -> Result<Option<&'a crate::whitney::Geometry>> {
    match inner {
        Inner::Comb => Ok(None),
        Inner::Whitney => ws.geometry.as_ref().map(Some).ok_or_else(|| Error::MissingParameter("geometry file".into())),
    }
}

fn need_geometry(ws: &Workspace) -> Result<&crate::whitney::Geometry> {
    ws.geometry.as_ref().ok_or_else(|| Error::MissingParameter("geometry file".into()))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Result<Output>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Parse(e.to_string()))?;
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Result<Output> {
    let seed = cli.seed;
    match &cli.command {
        Command::Complex(ComplexCmd::Validate { file }) => {
            let ws = Workspace::load(std::slice::from_ref(file), seed)?;
            let k = &ws.complex;
            emit(
                "validate",
                &json!({
                    "dim": k.dim(),
                    "cell_counts": k.cell_counts(),
                    "euler_characteristic": k.euler_characteristic(),
                    "added_faces": ws.added_faces,
                    "labels": k.labels().len(),
                }),
            )
        }
        Command::Complex(ComplexCmd::Homology { file }) => {
            let ws = Workspace::load(std::slice::from_ref(file), seed)?;
            let rows = homology_table(&ws.complex)?;
            let mut out = emit("homology", &json!({ "homology": rows }))?;
            let mut csv = String::from("degree,betti,torsion,torsion_order\n");
            for r in &rows {
                csv.push_str(&format!("{},{},{},{}\n", r.degree, r.betti, r.torsion.join(" "), r.torsion_order));
            }
            out.files.push(("homology.csv".into(), csv));
            Ok(out)
        }
        Command::Cover(cmd) => cover(cmd, seed),
        Command::Spectrum(a) => {
            let ws = Workspace::load(&a.inputs, seed)?;
            let split = lambda1_split(&ws.complex, a.degree, geometry_for(&ws, a.inner)?, a.full)?;
            emit("spectrum", &split)
        }
        Command::Norms(cmd) => norms(cmd, seed),
        Command::Scl(cmd) => scl(cmd, seed),
        Command::Bounds(cmd) => bounds(cmd, seed),
        Command::Constants(a) => {
            let m = moser_constant(a.n, a.q, a.l, a.lambda)?;
            let kap = if a.n >= 3 { Some(kappa(a.n)?) } else { None };
            emit(
                "constants",
                &json!({
                    "n": a.n, "q": a.q, "L": a.l, "lambda": a.lambda,
                    "moser": m,
                    "kappa": kap,
                    "ball_volume": { "radius": a.radius, "curvature": -1.0, "value": ball_volume(a.n, a.radius, 1.0)? },
                }),
            )
        }
    }
}

fn cover(cmd: &CoverCmd, seed: Option<u64>) -> Result<Output> {
    let (path, root) = match cmd {
        CoverCmd::Build { spec } => (spec, 0),
        CoverCmd::Tree { spec, root } | CoverCmd::Pairings { spec, root } => (spec, *root),
    };
    let ws = Workspace::load(std::slice::from_ref(path), seed)?;
    let c = ws.cover.as_ref().ok_or_else(|| Error::Parse(format!("{} is not a cover spec", path.display())))?;
    match cmd {
        CoverCmd::Build { .. } => emit(
            "cover",
            &json!({
                "degree": c.degree(),
                "connected": c.is_connected(),
                "components": c.components,
                "monodromy_transitive": c.spec.monodromy_transitive()?,
                "cell_counts": c.complex.cell_counts(),
                "euler_characteristic": c.complex.euler_characteristic(),
                "base_euler_characteristic": c.spec.base().euler_characteristic(),
            }),
        ),
        CoverCmd::Tree { .. } => {
            let g = c.spec.schreier_graph();
            if root >= g.num_vertices() {
                return Err(Error::InvalidParameter(format!("root tile {root} out of range")));
            }
            let tree = shortest_path_tree(&g, root)?;
            emit(
                "tree",
                &json!({
                    "root": root,
                    "graph_diameter": graph_diameter(&g)?,
                    "tree_diameter": tree.diameter(),
                    "depth": tree.depth,
                    "access_words": tree.access_words,
                }),
            )
        }
        CoverCmd::Pairings { .. } => {
            let g = c.spec.schreier_graph();
            if root >= g.num_vertices() {
                return Err(Error::InvalidParameter(format!("root tile {root} out of range")));
            }
            let tree = shortest_path_tree(&g, root)?;
            let fd = tree_fundamental_domain(c, &tree)?;
            fd.verify_words(&c.spec)?;
            emit("pairings", &fd)
        }
    }
}

fn norms(cmd: &NormsCmd, seed: Option<u64>) -> Result<Output> {
    match cmd {
        NormsCmd::Constants { inputs, degree, samples } => {
            let ws = Workspace::load(inputs, seed)?;
            let geo = need_geometry(&ws)?;
            let ip = inner_product(&ws.complex, Some(geo), *degree)?;
            let (lo, hi) = norm_equivalence_constants(&ip)?;
            let emp = empirical_sup_constants(&ws.complex, geo, *degree, *samples)?;
            emit("norms", &json!({ "degree": degree, "l2_lower": lo, "l2_upper": hi, "empirical": emp }))
        }
        NormsCmd::Eval { inputs, cochain, degree, samples } => {
            let ws = Workspace::load(inputs, seed)?;
            let doc = read_json(cochain)?;
            let values: Vec<f64> = doc
                .get("values")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("cochain file needs `values`".into()))?
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| Error::Parse("cochain values must be numbers".into())))
                .collect::<Result<_>>()?;
            if values.len() != ws.complex.num_cells(*degree) {
                return Err(Error::ShapeMismatch(format!(
                    "{} values for {} cells of degree {degree}",
                    values.len(),
                    ws.complex.num_cells(*degree)
                )));
            }
            let mut report = json!({
                "degree": degree,
                "comb": { "l1": comb_norm(&values, P::One), "l2": comb_norm(&values, P::Two), "sup": comb_norm(&values, P::Inf) },
                "comb_chain_dual_l2": chain_dual_norm(&values, NormFamily::Comb, P::Two, None)?,
            });
            if let Some(geo) = &ws.geometry {
                let ip = inner_product(&ws.complex, Some(geo), *degree)?;
                report["whitney"] = json!({
                    "l2": whitney_l2(&values, &ip)?,
                    "sup_estimate": whitney_sup_estimate(&ws.complex, geo, *degree, &values, *samples)?,
                    "chain_dual_l2": chain_dual_norm(&values, NormFamily::Whitney, P::Two, Some(&ip))?,
                });
            }
            emit("norms", &report)
        }
    }
}

fn scl(cmd: &SclCmd, seed: Option<u64>) -> Result<Output> {
    let (SclCmd::Fill(a) | SclCmd::Report(a)) = cmd;
    let ws = Workspace::load(&a.inputs, seed)?;
    let cycle_doc = read_json(&a.cycle)?;
    let f = cycle_from_value(&cycle_doc, &ws.complex, ws.cover.as_ref())?;
    let geo = geometry_for(&ws, a.inner)?;
    match cmd {
        SclCmd::Fill(_) => {
            let cert = if a.l1 { l1_filling(&ws.complex, &f, geo)? } else { least_norm_filling(&ws.complex, &f, geo, a.delta)? };
            emit("filling", &cert.report(&ws.complex))
        }
        SclCmd::Report(_) => emit("scl_report", &scl_report(&ws.complex, geo, &f, a.delta, a.l1)?),
    }
}

fn load_params(params: &Option<PathBuf>, attach: &[PathBuf], seed: Option<u64>) -> Result<(Params, Option<Workspace>)> {
    let mut ps = match params {
        Some(p) => params_from_value(&read_json(p)?)?,
        None => Params::new(),
    };
    let ws = if attach.is_empty() { None } else { Some(Workspace::load(attach, seed)?) };
    if let Some(ws) = &ws {
        attach_pipeline(&mut ps, &ws.complex, ws.geometry.as_ref(), ws.cover.as_ref())?;
    }
    Ok((ps, ws))
}

fn exp_gap_note(reports: &mut [BoundReport], ws: &Option<Workspace>) {
    let Some(ws) = ws else { return };
    if let Some(r) = reports.iter_mut().find(|r| r.id == "exp_gap") {
        match exact_inverse_gap(&ws.complex) {
            Ok((s, l)) => r.notes.push(format!("exact sum of inverse nonzero eigenvalues {s} (lambda_1 = {l:e})")),
            Err(e) => r.notes.push(format!("exact characteristic polynomial route skipped: {e}")),
        }
    }
}

fn bounds(cmd: &BoundsCmd, seed: Option<u64>) -> Result<Output> {
    match cmd {
        BoundsCmd::Eval { id, params, attach } => {
            let (ps, ws) = load_params(params, attach, seed)?;
            let mut reports = vec![evaluate_bound(id, &ps)?];
            exp_gap_note(&mut reports, &ws);
            let mut out = emit("bound", &reports[0])?;
            out.files.push(("bound.csv".into(), reports_csv(&reports)));
            Ok(out)
        }
        BoundsCmd::All { params, attach } => {
            let (ps, ws) = load_params(params, attach, seed)?;
            let mut reports = evaluate_all(&ps);
            exp_gap_note(&mut reports, &ws);
            let csv = reports_csv(&reports);
            let json = pretty(&json!({ "reports": reports }))?;
            Ok(Output { stdout: json.clone(), files: vec![("bounds.json".into(), json), ("bounds.csv".into(), csv)] })
        }
        BoundsCmd::List => {
            let entries: Vec<Value> = crate::bounds::catalogue()
                .iter()
                .map(|e| json!({ "id": e.id, "title": e.title, "formula": e.formula, "relation": e.relation, "lhs": e.lhs, "params": e.params }))
                .collect();
            emit("catalogue", &entries)
        }
    }
}

/// Writes artifacts into `dir`, creating it if needed.
pub fn write_outputs(dir: &std::path::Path, out: &Output) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
    for (name, text) in &out.files {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    }
    Ok(())
}
