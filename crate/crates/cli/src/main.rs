//! Batch front end: parse instance files, dispatch to the library, emit
//! reports and plot data.
//!
//! Exit status: 0 on success, 2 when the interpolation hypothesis is not
//! witnessed (`d_hat >= 1`), 1 on any other error. Reports embed the
//! effective parameter set with defaults resolved; CSV outputs carry it in a
//! leading comment line, so identical configurations produce byte-identical
//! files.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use pwinterp::concentration::concentration_operator;
use pwinterp::error::Error;
use pwinterp::harness::{
    run_proof_pipeline, sharp_example, verify_instance, BoundReport, ProblemInstance,
};
use pwinterp::instance::InstanceSpec;
use pwinterp::matio;
use pwinterp::pwkernel::RidgeSolver;
use pwinterp::width::extract_subspace;
use pwinterp::windows::window_by_name;

#[derive(Parser)]
#[command(
    name = "pwinterp",
    version,
    about = "Band-limited approximate interpolation toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum DensityKindArg {
    #[value(name = "upper-uniform")]
    UpperUniform,
    #[value(name = "upper")]
    Upper,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize the instance spectrum, optionally dilate it, report measure
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        /// Minkowski dilation radius
        #[arg(long)]
        dilate: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Density estimate for the instance point set
    Density {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "upper-uniform")]
        kind: DensityKindArg,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Per-index regularized interpolation reports on one window
    Interpolate {
        #[arg(long)]
        input: PathBuf,
        /// Window radius (defaults to the largest of the schedule)
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        center: f64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Closed-form sharp-example check
    Sharp {
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Subspace extraction from a matrix whose columns are the vectors
    Width {
        /// Matrix file, CSV or binary dump (detected by magic)
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        alpha: f64,
        /// Write the subspace basis to this path (.csv or binary otherwise)
        #[arg(long)]
        emit_basis: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Concentration operator spectrum for (S, Q)
    Concentration {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Density-bound verification; mode follows the instance growth field
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also append a sweep CSV row to this file
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Finite-scale certification pipeline at one radius
    Pipeline {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Plot data for a multiplier window: CSV of (x, value) for `fejer`,
    /// (x, value, envelope) for `sinc-product`
    Window {
        /// Registry name: fejer | sinc-product
        #[arg(long, default_value = "fejer")]
        window: String,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 50.0)]
        x_max: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() {
    if let Ok(threads) = std::env::var("PWINTERP_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(()) => 0,
        Err(Error::HypothesisNotWitnessed { d_hat }) => {
            eprintln!("hypothesis not witnessed: d_hat = {d_hat}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Spectrum {
            input,
            dilate,
            output,
        } => {
            let spec = load(&input)?;
            let mut s = spec.spectrum()?;
            if let Some(delta) = dilate {
                s = s.dilate(delta)?;
            }
            let report = serde_json::json!({
                "spectrum": s,
                "measure": s.measure(),
                "dilate": dilate,
                "params": spec.params,
            });
            emit(output.as_deref(), &pretty(&report))
        }
        Command::Density {
            input,
            kind,
            output,
            format,
        } => {
            let spec = load(&input)?;
            let points = spec.point_set()?;
            let est = match kind {
                DensityKindArg::UpperUniform => {
                    points.upper_uniform_density(&spec.params.radii, None)?
                }
                DensityKindArg::Upper => points.upper_density(&spec.params.radii)?,
            };
            match format {
                Format::Json => {
                    let report = serde_json::json!({
                        "density": est,
                        "points": spec.points,
                        "params": spec.params,
                    });
                    emit(output.as_deref(), &pretty(&report))
                }
                Format::Csv => {
                    let mut text = params_comment(&spec)?;
                    text.push_str("r,ratio\n");
                    for (r, ratio) in &est.per_radius {
                        text.push_str(&format!("{r},{ratio}\n"));
                    }
                    text.push_str(&format!("# value = {}, exact = {}\n", est.value, est.exact));
                    emit(output.as_deref(), &text)
                }
            }
        }
        Command::Interpolate {
            input,
            radius,
            center,
            output,
            format,
        } => {
            let spec = load(&input)?;
            let s = spec.spectrum()?;
            let points = spec.point_set()?;
            let r = radius.unwrap_or_else(|| *spec.params.radii.last().unwrap());
            let (nodes, n) = points.window(center, r)?;
            let solver = RidgeSolver::new(&s, nodes)?;
            let mut rows = Vec::new();
            for &mu in &spec.params.mu_grid {
                for j in 0..n {
                    match solver.solve(j, mu) {
                        Ok((_, rep)) => rows.push(rep),
                        Err(Error::IllConditioned { .. }) => {
                            eprintln!("mu = {mu}: Gram ill-conditioned, skipped");
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            match format {
                Format::Csv => {
                    let mut text = params_comment(&spec)?;
                    text.push_str("j,mu,residual_l2,norm_l2,window_lo,window_hi\n");
                    for rep in &rows {
                        text.push_str(&format!(
                            "{},{},{},{},{},{}\n",
                            rep.index,
                            rep.mu,
                            rep.residual_l2,
                            rep.norm_l2,
                            rep.window_lo,
                            rep.window_hi
                        ));
                    }
                    emit(output.as_deref(), &text)
                }
                Format::Json => {
                    let report = serde_json::json!({
                        "reports": rows,
                        "params": spec.params,
                    });
                    emit(output.as_deref(), &pretty(&report))
                }
            }
        }
        Command::Sharp { a, n, output } => {
            let report = sharp_example(a, n)?;
            emit(
                output.as_deref(),
                &pretty(&serde_json::to_value(&report).expect("serializable")),
            )
        }
        Command::Width {
            matrix,
            d,
            alpha,
            emit_basis,
            output,
        } => {
            let m = read_matrix(&matrix)?;
            if m.nrows() != m.ncols() {
                return Err(Error::InvalidNodes(format!(
                    "expected a square matrix of column vectors, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            let cols: Vec<_> = (0..m.ncols()).map(|j| m.column(j).clone_owned()).collect();
            let result = extract_subspace(&cols, d, alpha)?;
            if let Some(path) = emit_basis {
                write_matrix(&path, &result.subspace_basis)?;
            }
            let report = serde_json::json!({
                "dim": result.dim,
                "certified_bound": result.certified_bound,
                "measured_bound": result.measured_bound,
                "stated_constant_met": result.stated_constant_met,
                "alpha": result.alpha,
                "d": result.d,
                "singular_values": result.singular_values,
            });
            emit(output.as_deref(), &pretty(&report))
        }
        Command::Concentration {
            input,
            output,
            format,
        } => {
            let spec = load(&input)?;
            let s = spec.spectrum()?;
            let q = spec.q_spectrum()?.ok_or_else(|| {
                Error::Parse("concentration requires a `q` interval list in the instance".into())
            })?;
            let report = concentration_operator(&s, &q, spec.params.quad_nodes)?;
            match format {
                Format::Csv => {
                    let mut text = params_comment(&spec)?;
                    text.push_str("index,lambda\n");
                    for (i, l) in report.eigenvalues.iter().enumerate() {
                        text.push_str(&format!("{i},{l}\n"));
                    }
                    emit(output.as_deref(), &text)
                }
                Format::Json => {
                    let checks: Vec<_> = (1..10)
                        .map(|i| {
                            let c = i as f64 / 10.0;
                            serde_json::json!({
                                "c": c,
                                "count": report.count_at_least(c),
                                "bound": report.level_bound(c),
                            })
                        })
                        .collect();
                    let out = serde_json::json!({
                        "report": report,
                        "level_checks": checks,
                        "params": spec.params,
                    });
                    emit(output.as_deref(), &pretty(&out))
                }
            }
        }
        Command::Verify { input, output, csv } => {
            let spec = load(&input)?;
            let inst = ProblemInstance::from_spec(&spec)?;
            let (report, certificates) = verify_instance(&inst)?;
            let drift = certificates.revalidate()?;
            if let Some(path) = csv {
                let id = input
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "instance".into());
                append_csv_row(&path, &report, &id)?;
            }
            let out = serde_json::json!({
                "report": report,
                "certificate_count": certificates.certificates.len(),
                "certificate_drift": drift,
            });
            emit(output.as_deref(), &pretty(&out))
        }
        Command::Pipeline {
            input,
            r,
            a,
            output,
        } => {
            let spec = load(&input)?;
            let inst = ProblemInstance::from_spec(&spec)?;
            let report = run_proof_pipeline(&inst, r, a)?;
            emit(
                output.as_deref(),
                &pretty(&serde_json::to_value(&report).expect("serializable")),
            )
        }
        Command::Window {
            window,
            delta,
            beta,
            x_max,
            step,
            output,
        } => {
            if !(step > 0.0 && x_max > 0.0) {
                return Err(Error::invalid_parameter(
                    "step/x_max",
                    "must be positive".to_string(),
                ));
            }
            let w = window_by_name(&window, delta, beta)?;
            let with_envelope = window == "sinc-product";
            let product = if with_envelope {
                Some(pwinterp::windows::ProductWindow::new(
                    delta,
                    beta.expect("validated by the registry"),
                )?)
            } else {
                None
            };
            let mut text = format!("# window = {window}, delta = {delta}, beta = {beta:?}\n");
            text.push_str(if with_envelope {
                "x,value,envelope\n"
            } else {
                "x,value\n"
            });
            let n = (x_max / step).round() as usize;
            for i in 0..=n {
                let x = i as f64 * step;
                match &product {
                    Some(p) => text.push_str(&format!("{x},{},{}\n", w.eval(x), p.envelope(x))),
                    None => text.push_str(&format!("{x},{}\n", w.eval(x))),
                }
            }
            emit(output.as_deref(), &text)
        }
    }
}

fn load(path: &Path) -> Result<InstanceSpec, Error> {
    let text = fs::read_to_string(path)?;
    InstanceSpec::from_json(&text)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn params_comment(spec: &InstanceSpec) -> Result<String, Error> {
    let params = serde_json::to_string(&spec.params).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(format!("# params: {params}\n"))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn append_csv_row(path: &Path, report: &BoundReport, id: &str) -> Result<(), Error> {
    let mut text = if path.exists() {
        fs::read_to_string(path)?
    } else {
        format!("{}\n", BoundReport::CSV_HEADER)
    };
    text.push_str(&report.csv_row(id));
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn read_matrix(path: &Path) -> Result<pwinterp::linalg::CMatrix, Error> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(b"PWMX") {
        matio::read_binary(&mut bytes.as_slice())
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| Error::Parse("matrix file is neither binary dump nor UTF-8 CSV".into()))?;
        matio::read_csv(&text)
    }
}

fn write_matrix(path: &Path, m: &pwinterp::linalg::CMatrix) -> Result<(), Error> {
    if path.extension().is_some_and(|e| e == "csv") {
        let mut buf = Vec::new();
        matio::write_csv(&mut buf, m)?;
        fs::write(path, buf)?;
    } else {
        let mut buf = Vec::new();
        matio::write_binary(&mut buf, m, matio::ScalarKind::Complex)?;
        fs::write(path, buf)?;
    }
    Ok(())
}
