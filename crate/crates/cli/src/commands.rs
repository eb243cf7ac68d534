use std::collections::BTreeMap;

use bochner::abelian::{isometry_exact, psd_agreement, random_case, random_hermitian, CyclicPdFunction};
use bochner::cantor::{lambda4, max_orth_search, onb_gram, IfsMeasure};
use bochner::comb::{comb_element, comb_norm_identity, DiracComb};
use bochner::gp::{monte_carlo_check, sample_paths, variance_r, GpModel};
use bochner::rkhs::verify_isometry;
use bochner::spectra::{builtin_catalog, catalog_entry, catalog_to_json, KernelCatalogEntry, Regularization, CATALOG_VERSION};
use bochner::testfn::TestFunction;
use bochner::Error;
use serde::Serialize;

use crate::{CatalogAction, Cli, Command, Format};

/// Absolute tolerance handed to every quadrature; independent of the pass threshold.
const QUAD_TOL: f64 = 1e-10;

pub enum CliError {
    Config(String),
    Compute(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownName(_) | Error::InvalidArgument(_) | Error::Parse(_) => CliError::Config(e.to_string()),
            other => CliError::Compute(other.to_string()),
        }
    }
}

pub struct Outcome {
    pub body: String,
    pub pass: bool,
}

#[derive(Serialize)]
struct Report<R: Serialize> {
    command: &'static str,
    catalog_version: &'static str,
    seed: u64,
    tolerances: BTreeMap<&'static str, f64>,
    parameters: BTreeMap<&'static str, u64>,
    pass: bool,
    records: Vec<R>,
}

type Tolerances = BTreeMap<&'static str, f64>;
type Parameters = BTreeMap<&'static str, u64>;

fn json<R: Serialize>(
    command: &'static str,
    cli: &Cli,
    (tolerances, parameters): (Tolerances, Parameters),
    pass: bool,
    records: Vec<R>,
) -> Result<String, CliError> {
    let report = Report { command, catalog_version: CATALOG_VERSION, seed: cli.common.seed, tolerances, parameters, pass, records };
    let mut s = serde_json::to_string_pretty(&report).map_err(|e| CliError::Compute(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn tolerance(cli: &Cli, default: f64) -> Result<f64, CliError> {
    let t = cli.common.tol.unwrap_or(default);
    if t.is_nan() || t < 0.0 {
        return Err(CliError::Config(format!("tolerance must be nonnegative, got {t}")));
    }
    Ok(t)
}

fn phi_by_name(name: &str) -> Result<TestFunction<f64>, CliError> {
    match name {
        "gaussian" => Ok(TestFunction::standard_gaussian()),
        "indicator" => Ok(TestFunction::indicator(0.0, 1.0)),
        "bspline3" => Ok(TestFunction::bspline(3, 1.0)),
        "bump" => Ok(TestFunction::bump(0.0, 1.0)),
        other => Err(CliError::Config(format!("unknown test function `{other}`"))),
    }
}

fn phis(cli: &Cli, default: &[&str]) -> Result<Vec<(String, TestFunction<f64>)>, CliError> {
    let names: Vec<String> = match &cli.common.phis {
        Some(v) => v.iter().filter(|s| !s.is_empty()).cloned().collect(),
        None => default.iter().map(|s| s.to_string()).collect(),
    };
    names.into_iter().map(|n| phi_by_name(&n).map(|f| (n, f))).collect()
}

fn pairs(cli: &Cli, default: &[&str]) -> Result<Vec<KernelCatalogEntry<f64>>, CliError> {
    let names: Vec<&str> = if cli.common.pairs.is_empty() {
        default.to_vec()
    } else {
        cli.common.pairs.iter().map(String::as_str).collect()
    };
    names.into_iter().map(|n| catalog_entry(n).map_err(CliError::from)).collect()
}

fn csv_line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Isometry => isometry(cli),
        Command::Comb { truncation } => comb(cli, *truncation),
        Command::Cantor { size } => cantor(cli, *size),
        Command::Gp { paths } => gp(cli, *paths),
        Command::Abelian { n, cases } => abelian(cli, *n, *cases),
        Command::Catalog { action: CatalogAction::List } => catalog(cli),
    }
}

#[derive(Serialize)]
struct IsometryRecord {
    pair: String,
    phi: String,
    lhs: f64,
    rhs: f64,
    rel_err: f64,
    pass: bool,
}

fn isometry(cli: &Cli) -> Result<Outcome, CliError> {
    let tol = tolerance(cli, 1e-6)?;
    let pairs = pairs(cli, &["cos", "exp", "gaussian", "constant", "sinc"])?;
    if let Some(p) = pairs.iter().find(|p| !p.kernel.is_continuous()) {
        return Err(CliError::Config(format!("pair `{}` is tempered; its x-side norm is not a double integral", p.name)));
    }
    let phis = phis(cli, &["gaussian", "indicator", "bspline3", "bump"])?;
    let mut records = Vec::new();
    for pair in &pairs {
        for (name, phi) in &phis {
            let r = verify_isometry(phi, pair, QUAD_TOL)?;
            records.push(IsometryRecord {
                pair: pair.name.clone(),
                phi: name.clone(),
                lhs: r.lhs,
                rhs: r.rhs,
                rel_err: r.rel_err,
                pass: r.rel_err <= tol,
            });
        }
    }
    let pass = records.iter().all(|r| r.pass);
    let body = match cli.common.format {
        Format::Json => json("isometry", cli, (BTreeMap::from([("rel_err", tol), ("quadrature", QUAD_TOL)]), BTreeMap::new()), pass, records)?,
        Format::Csv => {
            let mut s = csv_line(&["pair,phi,lhs,rhs,rel_err".into()]);
            for r in &records {
                s += &csv_line(&[r.pair.clone(), r.phi.clone(), format!("{:?}", r.lhs), format!("{:?}", r.rhs), format!("{:?}", r.rel_err)]);
            }
            s
        }
    };
    Ok(Outcome { body, pass })
}

#[derive(Serialize)]
struct CombRecord {
    phi: String,
    xside: Option<f64>,
    freqside: Option<f64>,
    tail_bound: Option<f64>,
    bandwidth: Option<usize>,
    error: Option<String>,
    pass: bool,
}

fn comb(cli: &Cli, truncation: usize) -> Result<Outcome, CliError> {
    let tol = tolerance(cli, 1e-9)?;
    let comb = DiracComb::new(1.0, truncation, Regularization::Truncate(truncation))?;
    let phis = phis(cli, &["gaussian", "bspline3"])?;
    let quad = QUAD_TOL.min(tol.max(1e-13));
    let mut records = Vec::new();
    let mut csv = csv_line(&["phi,n,re,im".into()]);
    for (name, phi) in &phis {
        match comb_norm_identity(phi, &comb, quad) {
            Ok(r) => {
                records.push(CombRecord {
                    phi: name.clone(),
                    xside: Some(r.xside),
                    freqside: Some(r.freqside),
                    tail_bound: Some(r.tail_bound),
                    bandwidth: Some(r.bandwidth),
                    error: None,
                    pass: (r.xside - r.freqside).abs() <= tol,
                });
                let h = comb_element(phi, &comb, quad)?;
                for (n, c) in h.coefficients.iter().filter(|(n, _)| n.unsigned_abs() as usize <= truncation) {
                    csv += &csv_line(&[name.clone(), n.to_string(), format!("{:?}", c.re), format!("{:?}", c.im)]);
                }
            }
            Err(e @ Error::TailNotCertified { .. }) => records.push(CombRecord {
                phi: name.clone(),
                xside: None,
                freqside: None,
                tail_bound: None,
                bandwidth: None,
                error: Some(e.to_string()),
                pass: false,
            }),
            Err(e) => return Err(e.into()),
        }
    }
    let pass = records.iter().all(|r| r.pass);
    let body = match cli.common.format {
        Format::Json => json(
            "comb",
            cli,
            (BTreeMap::from([("abs_diff", tol), ("quadrature", quad)]), BTreeMap::from([("truncation", truncation as u64)])),
            pass,
            records,
        )?,
        Format::Csv => csv,
    };
    Ok(Outcome { body, pass })
}

#[derive(Serialize)]
struct CantorRecord {
    spectrum: Vec<u64>,
    gram_off_diagonal_max: f64,
    gram_diagonal_defect: f64,
    nu3_grid: String,
    nu3_eps: f64,
    nu3_max_size: usize,
    nu3_witness: Vec<f64>,
    nu3_status: &'static str,
}

fn cantor(cli: &Cli, size: usize) -> Result<Outcome, CliError> {
    let tol = tolerance(cli, 1e-8)?;
    if size == 0 || size > 1 << 12 {
        return Err(CliError::Config(format!("spectrum size must be in 1..=4096, got {size}")));
    }
    let terms = usize::BITS - (size - 1).leading_zeros();
    let spectrum: Vec<u64> = lambda4(terms.max(1))?.into_iter().take(size).collect();
    let freqs: Vec<f64> = spectrum.iter().map(|&l| l as f64).collect();
    let nu4 = IfsMeasure::nu4();
    let g = onb_gram(&nu4, &freqs)?;
    let off = g.max_off_diagonal();
    let diag = (0..g.dim()).map(|i| (g.get(i, i) - 1.0).norm()).fold(0.0, f64::max);
    let grid: Vec<f64> = (0..=100).map(|i| f64::from(i) * 0.5).collect();
    let eps = 1e-3;
    let search = max_orth_search(&IfsMeasure::nu3(), &grid, eps)?;
    let pass = off <= tol && diag <= tol && search.max_size <= 2;
    let body = match cli.common.format {
        Format::Json => {
            let rec = CantorRecord {
                spectrum,
                gram_off_diagonal_max: off,
                gram_diagonal_defect: diag,
                nu3_grid: "0:0.5:50".into(),
                nu3_eps: eps,
                nu3_max_size: search.max_size,
                nu3_witness: search.witness,
                nu3_status: search.status,
            };
            json("cantor", cli, (BTreeMap::from([("gram", tol), ("nu3_eps", eps)]), BTreeMap::from([("size", size as u64)])), pass, vec![rec])?
        }
        Format::Csv => {
            let mut s = String::new();
            for row in g.rows() {
                s += &csv_line(&row.iter().map(|z| format!("{:?}", z.norm())).collect::<Vec<_>>());
            }
            s
        }
    };
    Ok(Outcome { body, pass })
}

#[derive(Serialize)]
struct GpRecord {
    statistic: &'static str,
    x: f64,
    y: f64,
    estimate: f64,
    predicted: f64,
    std_error: f64,
    z_score: f64,
}

fn gp(cli: &Cli, n_paths: usize) -> Result<Outcome, CliError> {
    let tol = tolerance(cli, 3.0)?;
    let pair = pairs(cli, &["lebesgue"])?;
    let [pair] = pair.as_slice() else {
        return Err(CliError::Config("gp takes exactly one --pair".into()));
    };
    let grid: Vec<f64> = (0..=10).map(|i| f64::from(i) / 5.0).collect();
    let model = GpModel::new(pair.measure.clone(), grid.clone(), cli.common.seed)?;
    if cli.common.format == Format::Csv {
        let paths = sample_paths(&model, n_paths, QUAD_TOL)?;
        return Ok(Outcome { body: paths.to_csv(), pass: true });
    }
    let mut records = Vec::new();
    if n_paths > 0 {
        let mc = monte_carlo_check(&model, n_paths, QUAD_TOL)?;
        let mut push = |statistic, x: f64, y: f64, e: &bochner::gp::McEstimate<f64>| {
            records.push(GpRecord {
                statistic,
                x,
                y,
                estimate: e.estimate,
                predicted: e.predicted,
                std_error: e.std_error,
                z_score: e.z_score(),
            })
        };
        for (i, e) in mc.variance.iter().enumerate() {
            push("variance", grid[i], grid[i], e);
        }
        for (i, e) in mc.cross.iter().enumerate() {
            push("cross", grid[i], grid[i + 1], e);
        }
        for (i, e) in mc.increment.iter().enumerate() {
            push("increment", grid[i], grid[i + 1], e);
        }
    } else {
        for &x in &grid {
            let r = variance_r(model.measure(), x, QUAD_TOL)?;
            records.push(GpRecord { statistic: "variance", x, y: x, estimate: r, predicted: r, std_error: 0.0, z_score: 0.0 });
        }
    }
    let pass = records.iter().all(|r| r.z_score <= tol);
    let tolerances = (BTreeMap::from([("z_score", tol), ("quadrature", QUAD_TOL)]), BTreeMap::from([("paths", n_paths as u64)]));
    Ok(Outcome { body: json("gp", cli, tolerances, pass, records)?, pass })
}

#[derive(Serialize)]
struct AbelianRecord {
    case: usize,
    xside: f64,
    freqside: f64,
    rel_err: f64,
    circulant_psd: bool,
    spectrum_nonnegative: bool,
}

fn abelian(cli: &Cli, n: usize, cases: usize) -> Result<Outcome, CliError> {
    let tol = tolerance(cli, 1e-12)?;
    if n == 0 {
        return Err(CliError::Config("group order must be positive".into()));
    }
    let mut records = Vec::with_capacity(cases);
    for case in 0..cases {
        let (mu, phi) = random_case::<f64>(n, cli.common.seed, case as u64);
        let f = CyclicPdFunction::from_measure(&mu)?;
        let r = isometry_exact(&f, &phi)?;
        let h = random_hermitian::<f64>(n, cli.common.seed, (cases + case) as u64);
        let (psd, nonneg) = psd_agreement(&h, 1e-10)?;
        records.push(AbelianRecord {
            case,
            xside: r.xside,
            freqside: r.freqside,
            rel_err: r.rel_err,
            circulant_psd: psd,
            spectrum_nonnegative: nonneg,
        });
    }
    let pass = records.iter().all(|r| r.rel_err <= tol && r.circulant_psd == r.spectrum_nonnegative);
    let body = match cli.common.format {
        Format::Json => json("abelian", cli, (BTreeMap::from([("rel_err", tol)]), BTreeMap::from([("n", n as u64), ("cases", cases as u64)])), pass, records)?,
        Format::Csv => {
            let mut s = csv_line(&["case,xside,freqside,rel_err,circulant_psd,spectrum_nonnegative".into()]);
            for r in &records {
                s += &csv_line(&[
                    r.case.to_string(),
                    format!("{:?}", r.xside),
                    format!("{:?}", r.freqside),
                    format!("{:?}", r.rel_err),
                    r.circulant_psd.to_string(),
                    r.spectrum_nonnegative.to_string(),
                ]);
            }
            s
        }
    };
    Ok(Outcome { body, pass })
}

fn catalog(cli: &Cli) -> Result<Outcome, CliError> {
    let cat = builtin_catalog::<f64>()?;
    let body = match cli.common.format {
        Format::Json => {
            let doc = serde_json::json!({ "catalog_version": CATALOG_VERSION, "entries": catalog_to_json(&cat)? });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Compute(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = csv_line(&["name,continuous".into()]);
            for e in &cat {
                s += &csv_line(&[e.name.clone(), e.kernel.is_continuous().to_string()]);
            }
            s
        }
    };
    Ok(Outcome { body, pass: true })
}
