//! Command-line surface: argument parsing, command dispatch and reports.
//!
//! Every command reads one spec file. With `--out DIR` the artifacts, the
//! normalized input and `manifest.json` are written there and the manifest is
//! printed; otherwise the command's JSON summary is printed.

pub mod output;
pub mod spec_file;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::dimension::{dimension_report, symplectic_shortcuts, DimensionReport};
use crate::error::Error;
use crate::moduli3::{
    compactness_certificate, enumerate_components, perturbed_components, stratum_codimension, tunneling_admissible,
    tunneling_moduli, ComponentKind, ModuliComponent3, NuZeroSet, TunnelingClass, TunnelingModuli,
};
use crate::rational::{fmt_rational, HalfInt};
use crate::specflow::{
    q_signature_closed_form, parse_dense_matrix, resonance_prediction, run_oracle, sf_closed_form,
    spectral_flow_bruteforce, RandomSpec, SpectralPath,
};
use crate::spinc::PullbackClassOnY;
use crate::sumformula::{
    dimension_additivity_check, enumerate_splittings, reducible_defect, sum_rhs_report, AdditivityReport, GluedData,
    ReducibleDefect, RelativeInvariantTable, SignTable, SplitProblem, SumReport,
};
use crate::topology::CircleBundle;
use crate::vortex::{
    solve_vortex, summary_csv, verify_integrated_identity, write_grid_binary, GridHeader, SolveOptions, TorusGeometry,
    VortexProblem,
};
use output::{csv_bytes, to_json_bytes, write_dir, Outputs};
use spec_file::{resolve, LoadedPair, PairSpecFile};

#[derive(Debug, Parser)]
#[command(name = "relsw", version, about = "Relative Seiberg-Witten toolkit for pairs (X, Sigma)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimensions, components, compactness, CSD ordering and strata.
    Report(CommonArgs),
    /// Components of the three-dimensional moduli space per class.
    Components(CommonArgs),
    /// Dimension reports for each spin^c structure.
    Dims(CommonArgs),
    /// Tunneling dimensions and moduli descriptions.
    Tunneling(CommonArgs),
    /// Spectral flow: explicit path, random oracle or closed form.
    Specflow(CommonArgs),
    /// Vortex solve with grid and summary export.
    Vortex(CommonArgs),
    /// Splittings, sum-formula right-hand side and additivity checks.
    Sum(CommonArgs),
}

#[derive(Clone, Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the vortex grid size N.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Overrides the vortex Newton tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Resonance depth for spectral flow predictions.
    #[arg(long)]
    pub depth: Option<usize>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Report(_) => "report",
            Command::Components(_) => "components",
            Command::Dims(_) => "dims",
            Command::Tunneling(_) => "tunneling",
            Command::Specflow(_) => "specflow",
            Command::Vortex(_) => "vortex",
            Command::Sum(_) => "sum",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Report(a)
            | Command::Components(a)
            | Command::Dims(a)
            | Command::Tunneling(a)
            | Command::Specflow(a)
            | Command::Vortex(a)
            | Command::Sum(a) => a,
        }
    }
}

const DEFAULT_DEPTH: usize = 3;
const DEFAULT_SAMPLES: usize = 64;
const DEFAULT_ORACLE_SEED: u64 = 1;

/// Runs a command and returns the text for stdout.
pub fn execute(cli: &Cli) -> Result<String, Error> {
    let args = cli.command.args();
    let spec = PairSpecFile::read(&args.input)?;
    let base = args.input.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut out = run(&cli.command, &spec, &base)?;
    out.push("input.normalized.json", spec.to_normalized_json().into_bytes());
    match &args.out {
        Some(dir) => {
            let m = write_dir(dir, cli.command.name(), &out.artifacts)?;
            Ok(String::from_utf8(to_json_bytes(&m)).expect("json is utf-8"))
        }
        None => Ok(String::from_utf8(to_json_bytes(&out.summary)).expect("json is utf-8")),
    }
}

/// Runs a command on a parsed spec; `base` resolves relative paths.
pub fn run(cmd: &Command, spec: &PairSpecFile, base: &Path) -> Result<Outputs, Error> {
    let args = cmd.args();
    match cmd {
        Command::Report(_) => cmd_report(spec),
        Command::Components(_) => cmd_components(spec),
        Command::Dims(_) => cmd_dims(spec),
        Command::Tunneling(_) => cmd_tunneling(spec),
        Command::Specflow(_) => cmd_specflow(spec, base, args),
        Command::Vortex(_) => cmd_vortex(spec, args),
        Command::Sum(_) => cmd_sum(spec, base),
    }
}

#[derive(Clone, Debug, Serialize)]
struct DimsRow {
    spinc: usize,
    m: HalfInt,
    degree_along_sigma: HalfInt,
    d_main: i64,
    d_adapted: i64,
    d_reducible: Option<i64>,
    xi_compact: String,
    xi_adapted: String,
    route_check: bool,
    shortcut_main: Option<i64>,
    shortcut_adapted: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
struct DimsEntry {
    spinc: usize,
    #[serde(flatten)]
    report: DimensionReport,
    symplectic_shortcuts: Option<(i64, i64)>,
}

const DIMS_HEADER: &[&str] = &[
    "spinc",
    "m",
    "degree_along_sigma",
    "d_main",
    "d_adapted",
    "d_reducible",
    "xi_compact",
    "xi_adapted",
    "route_check",
    "shortcut_main",
    "shortcut_adapted",
];

fn dims_of(lp: &LoadedPair) -> Result<(Vec<DimsEntry>, Vec<DimsRow>), Error> {
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for (i, s) in lp.spinc.iter().enumerate() {
        let report = dimension_report(s)?;
        let shortcuts = symplectic_shortcuts(s)?;
        rows.push(DimsRow {
            spinc: i,
            m: report.m,
            degree_along_sigma: report.degree_along_sigma,
            d_main: report.d_main,
            d_adapted: report.d_adapted,
            d_reducible: report.d_reducible,
            xi_compact: fmt_rational(&report.xi_compact),
            xi_adapted: fmt_rational(&report.xi_adapted),
            route_check: report.route_check,
            shortcut_main: shortcuts.map(|s| s.0),
            shortcut_adapted: shortcuts.map(|s| s.1),
        });
        entries.push(DimsEntry { spinc: i, report, symplectic_shortcuts: shortcuts });
    }
    Ok((entries, rows))
}

fn cmd_dims(spec: &PairSpecFile) -> Result<Outputs, Error> {
    let lp = spec.load_pair()?;
    let (entries, rows) = dims_of(&lp)?;
    let mut out = Outputs::default();
    out.push("dims.csv", csv_bytes(&rows, DIMS_HEADER)?);
    out.push_json("dims.json", &entries);
    out.summary = json!({ "command": "dims", "dimensions": entries });
    Ok(out)
}

/// One class of M(Y): the spin^c structure it came from, if any.
struct ClassSource {
    spinc: Option<usize>,
    class: PullbackClassOnY,
}

fn classes(lp: &LoadedPair) -> Vec<ClassSource> {
    let y = lp.pair.circle_bundle();
    if !lp.spinc.is_empty() {
        return lp
            .spinc
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.pullback_class().map(|class| ClassSource { spinc: Some(i), class }))
            .collect();
    }
    // Every class: residues mod |ℓ|, or each degree 0..=2g−2 when ℓ = 0.
    let degrees: Vec<i64> =
        if y.degree == 0 { (0..=(2 * y.base_genus - 2).max(0)).collect() } else { (0..y.degree.abs()).collect() };
    degrees.into_iter().map(|d| ClassSource { spinc: None, class: PullbackClassOnY::new(y, d) }).collect()
}

#[derive(Clone, Debug, Serialize)]
struct ComponentRow {
    spinc: Option<usize>,
    class_residue: i64,
    index: usize,
    kind: ComponentKind,
    description: String,
    degree: Option<i64>,
    m: Option<HalfInt>,
    d: Option<i64>,
    real_dimension: Option<i64>,
    theta_flag: bool,
    non_degenerate: Option<bool>,
    csd_level: Option<String>,
}

const COMPONENT_HEADER: &[&str] = &[
    "spinc",
    "class_residue",
    "index",
    "kind",
    "description",
    "degree",
    "m",
    "d",
    "real_dimension",
    "theta_flag",
    "non_degenerate",
    "csd_level",
];

#[derive(Clone, Debug, Serialize)]
struct CsdRow {
    spinc: Option<usize>,
    class_residue: i64,
    from: usize,
    to: usize,
    csd_from: String,
    csd_to: String,
}

const CSD_HEADER: &[&str] = &["spinc", "class_residue", "from", "to", "csd_from", "csd_to"];

fn component_tables(lp: &LoadedPair) -> (Vec<ComponentRow>, Vec<CsdRow>) {
    let y = lp.pair.circle_bundle();
    let mut rows = Vec::new();
    let mut csd = Vec::new();
    for src in classes(lp) {
        let comps: Vec<ModuliComponent3> = enumerate_components(&y, &src.class);
        for (i, c) in comps.iter().enumerate() {
            rows.push(ComponentRow {
                spinc: src.spinc,
                class_residue: src.class.degree_residue,
                index: i,
                kind: c.kind,
                description: c.describe(),
                degree: c.degree,
                m: c.m,
                d: c.d,
                real_dimension: c.real_dimension(),
                theta_flag: c.theta_flag,
                non_degenerate: c.non_degenerate,
                csd_level: c.csd_level.as_ref().map(fmt_rational),
            });
        }
        for (i, a) in comps.iter().enumerate() {
            for (j, b) in comps.iter().enumerate() {
                if tunneling_admissible(a, b) {
                    csd.push(CsdRow {
                        spinc: src.spinc,
                        class_residue: src.class.degree_residue,
                        from: i,
                        to: j,
                        csd_from: a.csd_level.as_ref().map(fmt_rational).unwrap_or_default(),
                        csd_to: b.csd_level.as_ref().map(fmt_rational).unwrap_or_default(),
                    });
                }
            }
        }
    }
    (rows, csd)
}

fn cmd_components(spec: &PairSpecFile) -> Result<Outputs, Error> {
    let lp = spec.load_pair()?;
    let (rows, csd) = component_tables(&lp);
    let mut out = Outputs::default();
    out.push("components.csv", csv_bytes(&rows, COMPONENT_HEADER)?);
    out.push("csd_ordering.csv", csv_bytes(&csd, CSD_HEADER)?);
    out.summary = json!({
        "command": "components",
        "circle_bundle": lp.pair.circle_bundle(),
        "components": rows,
        "csd_ordering": csd,
    });
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
struct StratumRow {
    k: i64,
    starts_at_reducible: bool,
    codimension: Option<i64>,
    rejected: Option<String>,
}

const STRATUM_LEVELS: i64 = 3;

fn strata(sigma_self: i64) -> Vec<StratumRow> {
    let mut rows = Vec::new();
    for k in 1..=STRATUM_LEVELS {
        for start in [false, true] {
            let (codimension, rejected) = match stratum_codimension(k, start, sigma_self) {
                Ok(c) => (Some(c), None),
                Err(e) => (None, Some(e.to_string())),
            };
            rows.push(StratumRow { k, starts_at_reducible: start, codimension, rejected });
        }
    }
    rows
}

#[derive(Clone, Debug, Serialize)]
struct PerturbedCount {
    d: i64,
    count: usize,
}

fn perturbed_counts(zeros: &NuZeroSet) -> Result<Vec<PerturbedCount>, Error> {
    (0..=i64::from(zeros.total()))
        .map(|d| Ok(PerturbedCount { d, count: perturbed_components(zeros, d)?.count() }))
        .collect()
}

fn cmd_report(spec: &PairSpecFile) -> Result<Outputs, Error> {
    let lp = spec.load_pair()?;
    let (dims, dim_rows) = dims_of(&lp)?;
    let (comp_rows, csd) = component_tables(&lp);
    let strata = strata(lp.pair.sigma_self());
    let counts = match spec.nu_zeros(lp.pair.genus())? {
        Some(z) => Some(perturbed_counts(&z)?),
        None => None,
    };
    let x = lp.pair.manifold();
    let report = json!({
        "command": "report",
        "manifold": {
            "name": x.name(),
            "euler": x.euler(),
            "signature": x.signature(),
            "b_plus": x.b_plus(),
            "b_minus": x.b_minus(),
        },
        "pair": {
            "genus": lp.pair.genus(),
            "sigma_self": lp.pair.sigma_self(),
            "b_plus_complement": lp.pair.b_plus_complement(),
            "circle_bundle": lp.pair.circle_bundle(),
        },
        "compactness_certificate": compactness_certificate(&lp.pair),
        "dimensions": dims,
        "components": comp_rows,
        "csd_ordering": csd,
        "strata": strata,
        "perturbed_counts": counts,
    });
    let mut out = Outputs::default();
    out.push("dims.csv", csv_bytes(&dim_rows, DIMS_HEADER)?);
    out.push("components.csv", csv_bytes(&comp_rows, COMPONENT_HEADER)?);
    out.push("csd_ordering.csv", csv_bytes(&csd, CSD_HEADER)?);
    out.push("strata.csv", csv_bytes(&strata, &["k", "starts_at_reducible", "codimension", "rejected"])?);
    if let Some(c) = &counts {
        out.push("perturbed_counts.csv", csv_bytes(c, &["d", "count"])?);
    }
    out.push_json("report.json", &report);
    out.summary = report;
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
struct TunnelingEntry {
    a: i64,
    b_plus: i64,
    b_minus: i64,
    adapted: bool,
    dimension: i64,
    moduli: TunnelingModuli,
    assumes_regularity: bool,
}

fn cmd_tunneling(spec: &PairSpecFile) -> Result<Outputs, Error> {
    if spec.tunneling.is_empty() {
        return Err(Error::Schema("tunneling: at least one class is required".into()));
    }
    let lp = spec.load_pair()?;
    let CircleBundle { base_genus: g, degree: ell } = lp.pair.circle_bundle();
    let zeros = spec.nu_zeros(g)?;
    let mut entries = Vec::new();
    for t in &spec.tunneling {
        let tc = TunnelingClass::new(t.a, t.b_plus, t.b_minus, g, ell)?;
        let moduli = tunneling_moduli(&tc, t.adapted, zeros.as_ref());
        entries.push(TunnelingEntry {
            a: t.a,
            b_plus: t.b_plus,
            b_minus: t.b_minus,
            adapted: t.adapted,
            dimension: tc.dimension(t.adapted),
            assumes_regularity: moduli.assumes_regularity(),
            moduli,
        });
    }
    let mut out = Outputs::default();
    out.push_json("tunneling.json", &entries);
    out.summary = json!({ "command": "tunneling", "genus": g, "ell": ell, "classes": entries });
    Ok(out)
}

fn read_matrix(base: &Path, p: &Path) -> Result<nalgebra::DMatrix<f64>, Error> {
    let path = resolve(base, p);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(path.display(), e))?;
    Ok(parse_dense_matrix(&text)?)
}

fn cmd_specflow(spec: &PairSpecFile, base: &Path, args: &CommonArgs) -> Result<Outputs, Error> {
    let block = spec.specflow.as_ref().ok_or_else(|| Error::Schema("a specflow block is required".into()))?;
    let depth = args.depth.unwrap_or(DEFAULT_DEPTH);
    let samples = block.samples.unwrap_or(DEFAULT_SAMPLES);
    let mut summary = serde_json::Map::new();
    summary.insert("command".into(), json!("specflow"));
    let mut out = Outputs::default();
    match (&block.h0, &block.p) {
        (Some(h0), Some(p)) => {
            let (h0, p) = (read_matrix(base, h0)?, read_matrix(base, p)?);
            let brute = spectral_flow_bruteforce(&SpectralPath::new(h0.clone(), p.clone(), samples)?)?;
            let prediction = resonance_prediction(&h0, &p, depth)?;
            let agree = brute.flow == prediction.predicted_flow;
            let v = json!({ "brute_force": brute, "prediction": prediction, "agree": agree });
            out.push_json("specflow_path.json", &v);
            summary.insert("path".into(), v);
        }
        (None, None) => {}
        _ => return Err(Error::Schema("specflow: h0 and p must be given together".into())),
    }
    if let Some(r) = &block.random {
        let d = RandomSpec::default();
        let rs = RandomSpec {
            max_dim: r.max_dim.unwrap_or(d.max_dim),
            max_kernel: r.max_kernel.unwrap_or(d.max_kernel),
            max_order: r.max_order.unwrap_or(d.max_order),
            epsilon: r.epsilon.unwrap_or(d.epsilon),
        };
        let valid = rs.max_kernel >= 1
            && (1..=3).contains(&rs.max_order)
            && rs.max_dim > rs.max_kernel
            && rs.epsilon > 0.0
            && rs.epsilon.is_finite();
        if !valid {
            return Err(Error::Schema(
                "specflow.random: need max_kernel >= 1, max_order in 1..=3, max_dim > max_kernel, epsilon > 0".into(),
            ));
        }
        let seed = args.seed.unwrap_or(DEFAULT_ORACLE_SEED);
        let s = run_oracle(seed, r.count, &rs, depth, samples);
        let v = json!({ "seed": seed, "depth": depth, "summary": s, "all_agree": s.all_agree() });
        out.push_json("specflow_oracle.json", &v);
        summary.insert("oracle".into(), v);
    }
    if let Some(c) = &block.closed_form {
        let (ker, neg) = q_signature_closed_form(c.g, c.d_plus, c.d_minus)?;
        let flow = sf_closed_form(c.g, c.d_plus, c.d_minus, c.ell)?;
        let v = json!({ "dim_ker_q": ker, "dim_neg_q": neg, "minus_sf": flow.minus_sf, "x": flow.x });
        out.push_json("specflow_closed_form.json", &v);
        summary.insert("closed_form".into(), v);
    }
    if summary.len() == 1 {
        return Err(Error::Schema("specflow: give h0/p, random or closed_form".into()));
    }
    out.summary = serde_json::Value::Object(summary);
    Ok(out)
}

fn cmd_vortex(spec: &PairSpecFile, args: &CommonArgs) -> Result<Outputs, Error> {
    let v = spec.vortex.as_ref().ok_or_else(|| Error::Schema("a vortex block is required".into()))?;
    let grid = args.grid.unwrap_or(v.n);
    let tolerance = args.tolerance.unwrap_or(v.tolerance);
    let geom = TorusGeometry::new(Complex64::new(v.modulus[0], v.modulus[1]), grid, v.area)?;
    let problem = VortexProblem::new(geom, v.divisor.iter().map(|p| (p[0], p[1])).collect(), v.tau, tolerance)?;
    let opts = SolveOptions { seed: args.seed.or(v.seed), ..SolveOptions::default() };
    let sol = solve_vortex(&problem, &opts)?;
    let identity = verify_integrated_identity(&sol, &problem);

    let mut out = Outputs::default();
    for (name, field) in [("phi_modulus", &sol.phi_modulus), ("u_field", &sol.u_field)] {
        let mut bytes = Vec::new();
        write_grid_binary(&mut bytes, &GridHeader::new(&problem, name), field)
            .map_err(|e| Error::io(format!("{name}.grid"), e))?;
        out.push(format!("{name}.grid"), bytes);
    }
    out.push("summary.csv", summary_csv(&problem, &sol, &identity).into_bytes());
    let report = json!({
        "command": "vortex",
        "N": grid,
        "d": problem.degree(),
        "iterations": sol.iterations,
        "residual_sup": sol.residual_sup,
        "curvature_integral": sol.curvature_integral,
        "curvature_over_2pi": sol.curvature_integral / (2.0 * std::f64::consts::PI),
        "plaquette_flux_sum": sol.plaquette_flux_sum,
        "zero_count": sol.zero_count,
        "zero_locations": sol.zero_locations,
        "dbar_residual": sol.dbar_residual,
        "identity": identity,
    });
    out.push_json("vortex.json", &report);
    out.summary = report;
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
struct AdditivityEntry {
    splitting: [i64; 2],
    spinc: [usize; 2],
    #[serde(flatten)]
    report: AdditivityReport,
}

#[derive(Clone, Debug, Serialize)]
struct ReducibleEntry {
    spinc: [usize; 2],
    #[serde(flatten)]
    defect: ReducibleDefect,
}

#[derive(Clone, Debug, Serialize)]
struct SplittingRow {
    m1: i64,
    m2: i64,
}

fn pick<'a, T>(list: &'a [T], i: usize, what: &str) -> Result<&'a T, Error> {
    list.get(i).ok_or_else(|| Error::Schema(format!("{what}: index {i} out of range (have {})", list.len())))
}

fn read_table(base: &Path, p: &Path) -> Result<RelativeInvariantTable, Error> {
    let path = resolve(base, p);
    let f = std::fs::File::open(&path).map_err(|e| Error::io(path.display(), e))?;
    Ok(RelativeInvariantTable::read_csv(f)?)
}

fn cmd_sum(spec: &PairSpecFile, base: &Path) -> Result<Outputs, Error> {
    let block = spec.sum.as_ref().ok_or_else(|| Error::Schema("a sum block is required".into()))?;
    let lp1 = spec.load_pair()?;
    let lp2 = block.pair2.load()?;
    let sp = SplitProblem::new(lp1.pair.clone(), lp2.pair.clone(), (block.residues[0], block.residues[1]))?;
    let splittings: Vec<SplittingRow> = enumerate_splittings(&sp).into_iter().map(|(m1, m2)| SplittingRow { m1, m2 }).collect();

    let mut out = Outputs::default();
    out.push("splittings.csv", csv_bytes(&splittings, &["m1", "m2"])?);

    let rhs: Option<SumReport> = match &block.tables {
        None => None,
        Some(t) => {
            let zeros = spec
                .nu_zeros(sp.genus())?
                .ok_or_else(|| Error::Schema("sum.tables needs a nu block".into()))?;
            let t1 = read_table(base, &t.side1)?;
            let t2 = read_table(base, &t.side2)?;
            let signs = match &t.signs {
                Some(p) => {
                    let path = resolve(base, p);
                    let f = std::fs::File::open(&path).map_err(|e| Error::io(path.display(), e))?;
                    SignTable::read_csv(f)?
                }
                None => SignTable::new(),
            };
            let report = sum_rhs_report(&sp, &t1, &t2, &zeros, &signs)?;
            out.push("sum_terms.csv", csv_bytes(&report.terms, &["m1", "m2", "q", "sign", "left", "right"])?);
            Some(report)
        }
    };

    let mut additivity = Vec::new();
    for g in &block.glued {
        let s1 = pick(&lp1.spinc, g.spinc[0], "sum.glued spinc (side 1)")?;
        let s2 = pick(&lp2.spinc, g.spinc[1], "sum.glued spinc (side 2)")?;
        let data = GluedData { euler: g.euler, signature: g.signature, c1_square: g.c1_square };
        let report = dimension_additivity_check(&sp, (g.splitting[0], g.splitting[1]), s1, s2, &data)?;
        additivity.push(AdditivityEntry { splitting: g.splitting, spinc: g.spinc, report });
    }
    let mut reducible = Vec::new();
    for &[i, j] in &block.reducible {
        let s1 = pick(&lp1.spinc, i, "sum.reducible (side 1)")?;
        let s2 = pick(&lp2.spinc, j, "sum.reducible (side 2)")?;
        reducible.push(ReducibleEntry { spinc: [i, j], defect: reducible_defect(s1, s2)? });
    }

    let report = json!({
        "command": "sum",
        "genus": sp.genus(),
        "splittings": splittings,
        "rhs": rhs,
        "additivity": additivity,
        "all_additive": additivity.iter().all(|a| a.report.additive),
        "reducible": reducible,
    });
    out.push_json("sum.json", &report);
    out.summary = report;
    Ok(out)
}
