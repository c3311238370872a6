//! `qda` subcommands.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use qda_core::synth::{generate_field, Component, MagnitudeLaw, SynthSpec};
use qda_core::{rank_cases, DisplacementField, FitReport, RankedCases, ZeroPolicy};

use crate::config::{OmegaArg, Overrides, RunConfig};
use crate::error::{AppError, ParseError};
use crate::formats::{
    case_id_from_path, parse_displacement_csv, read_histogram_csv, read_report_json, write_displacement_csv,
    write_histogram_csv, write_ranking_csv, write_report_json, write_summary_csv,
};
use crate::parallel::evaluate_cases;
use crate::plot::{render_svg, write_plot_csv};

#[derive(Debug, Parser)]
#[command(name = "qda", version, about = "Rank FEA design cases by quasi-distribution variance")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one case and write its report and summary.
    Fit {
        input: PathBuf,
        /// Case label; defaults to the file name stem.
        #[arg(long)]
        case_id: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Fit several cases and rank them by variance.
    Rank {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Leave failing cases out of the ranking instead of aborting.
        #[arg(long)]
        skip_errors: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Draw a case's histogram and quasi-distribution as SVG.
    Plot {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        histogram: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Where to write the `k,prob,fit` table; defaults to plot.csv next to the SVG.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generate a synthetic displacement export.
    Synth {
        /// Node count.
        #[arg(long)]
        n: usize,
        /// `uniform:A,B`, `lognormal:MU,SIGMA`, `gaussian:MEAN,SIGMA` or
        /// `mixture:MEAN,SIGMA,WEIGHT;MEAN,SIGMA,WEIGHT...`.
        #[arg(long)]
        law: String,
        #[arg(long, default_value_t = 0.0)]
        zero_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Histogram bin count [default: 350].
    #[arg(long)]
    pub bins: Option<usize>,
    /// Bézier segment degree [default: 5].
    #[arg(long)]
    pub degree: Option<usize>,
    /// Segmentation point, or `auto` for the grid search [default: auto].
    #[arg(long)]
    pub omega: Option<OmegaArg>,
    /// Grid lower bound [default: 0.05].
    #[arg(long)]
    pub omega_lo: Option<f64>,
    /// Grid upper bound [default: 0.95].
    #[arg(long)]
    pub omega_hi: Option<f64>,
    /// Grid step [default: 0.002].
    #[arg(long)]
    pub omega_step: Option<f64>,
    /// Uniform curve samples [default: 16 per bin].
    #[arg(long)]
    pub samples: Option<usize>,
    /// `include` or `exclude` zero-deformation nodes [default: include].
    #[arg(long)]
    pub zero_policy: Option<ZeroPolicy>,
    /// Directory for output files [default: .].
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads, 0 for all cores [default: 0].
    #[arg(long)]
    pub threads: Option<usize>,
    /// Optional `key = value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            bins: self.bins,
            degree: self.degree,
            omega: self.omega,
            omega_lo: self.omega_lo,
            omega_hi: self.omega_hi,
            omega_step: self.omega_step,
            samples: self.samples,
            zero_policy: self.zero_policy,
            output_dir: self.output_dir.clone(),
            threads: self.threads,
        }
    }

    pub fn resolve(&self) -> Result<RunConfig, AppError> {
        RunConfig::resolve(self.config.as_deref(), &self.overrides())
    }
}

pub fn load_field(path: &Path, case_id: Option<&str>) -> Result<DisplacementField, AppError> {
    let file = File::open(path).map_err(|e| AppError::io(path, e))?;
    let id = case_id.map(str::to_string).unwrap_or_else(|| case_id_from_path(path));
    parse_displacement_csv(BufReader::new(file), &id).map_err(|e| AppError::parse(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, AppError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| AppError::io(path, e))
}

fn csv_io(path: &Path, e: csv::Error) -> AppError {
    AppError::io(path, std::io::Error::other(e))
}

/// Files written for one case.
#[derive(Debug, Clone)]
pub struct CaseOutputs {
    pub report: PathBuf,
    pub summary: PathBuf,
    pub histogram: PathBuf,
}

fn write_case(dir: &Path, eval: &qda_core::CaseEvaluation) -> Result<CaseOutputs, AppError> {
    let id = &eval.report.case_id;
    let out = CaseOutputs {
        report: dir.join(format!("{id}.report.json")),
        summary: dir.join(format!("{id}.summary.csv")),
        histogram: dir.join(format!("{id}.histogram.csv")),
    };
    write_report_json(&eval.report, create(&out.report)?).map_err(|e| AppError::io(&out.report, e))?;
    write_summary_csv(&eval.report, create(&out.summary)?).map_err(|e| csv_io(&out.summary, e))?;
    write_histogram_csv(&eval.histogram, id, create(&out.histogram)?).map_err(|e| AppError::io(&out.histogram, e))?;
    Ok(out)
}

pub fn cmd_fit(input: &Path, case_id: Option<&str>, cfg: &RunConfig) -> Result<(FitReport, CaseOutputs), AppError> {
    let field = load_field(input, case_id)?;
    let mut evals = evaluate_cases(std::slice::from_ref(&field), &cfg.pipeline(), cfg.threads);
    let eval = evals.pop().expect("one case")?;
    let outputs = write_case(&cfg.output_dir, &eval)?;
    Ok((eval.report, outputs))
}

pub fn cmd_rank(inputs: &[PathBuf], cfg: &RunConfig, skip_errors: bool) -> Result<(RankedCases, PathBuf), AppError> {
    let mut fields = Vec::with_capacity(inputs.len());
    for path in inputs {
        match load_field(path, None) {
            Ok(f) => fields.push(f),
            Err(e) if skip_errors => eprintln!("skipping {e}"),
            Err(e) => return Err(e),
        }
    }
    let mut ids = std::collections::HashSet::new();
    for f in &fields {
        if !ids.insert(f.case_id().to_string()) {
            return Err(AppError::Usage(format!("duplicate case id `{}`", f.case_id())));
        }
    }

    let mut reports = Vec::with_capacity(fields.len());
    for result in evaluate_cases(&fields, &cfg.pipeline(), cfg.threads) {
        match result {
            Ok(eval) => {
                write_case(&cfg.output_dir, &eval)?;
                reports.push(eval.report);
            }
            Err(e) if skip_errors => eprintln!("skipping {e}"),
            Err(e) => return Err(e.into()),
        }
    }
    let ranked = rank_cases(reports)?;
    let path = cfg.output_dir.join("ranking.csv");
    write_ranking_csv(&ranked, create(&path)?).map_err(|e| csv_io(&path, e))?;
    Ok((ranked, path))
}

pub fn cmd_plot(report: &Path, histogram: &Path, output: &Path, csv: Option<&Path>) -> Result<PathBuf, AppError> {
    let rep = File::open(report).map_err(|e| AppError::io(report, e))?;
    let rep = read_report_json(BufReader::new(rep)).map_err(|e| AppError::parse(report, e))?;
    let hist = File::open(histogram).map_err(|e| AppError::io(histogram, e))?;
    let table = read_histogram_csv(BufReader::new(hist)).map_err(|e| AppError::parse(histogram, e))?;
    if let Some(id) = &table.case_id {
        if *id != rep.case_id {
            return Err(AppError::Usage(format!(
                "histogram belongs to case `{id}` but the report is for `{}`",
                rep.case_id
            )));
        }
    }
    if table.probs.len() != rep.signal.len() {
        let reason = format!("{} bins, report has {}", table.probs.len(), rep.signal.len());
        return Err(AppError::parse(histogram, ParseError::Malformed { line: 0, reason }));
    }
    let svg = render_svg(&rep, &table.probs);
    std::io::Write::write_all(&mut create(output)?, svg.as_bytes()).map_err(|e| AppError::io(output, e))?;
    let csv_path = csv
        .map(Path::to_path_buf)
        .unwrap_or_else(|| output.parent().unwrap_or(Path::new("")).join("plot.csv"));
    write_plot_csv(&rep, &table.probs, create(&csv_path)?).map_err(|e| AppError::io(&csv_path, e))?;
    Ok(csv_path)
}

fn numbers(text: &str, count: usize, what: &str) -> Result<Vec<f64>, AppError> {
    let vals: Result<Vec<f64>, _> = text.split(',').map(|v| v.trim().parse::<f64>()).collect();
    match vals {
        Ok(v) if v.len() == count => Ok(v),
        _ => Err(AppError::Usage(format!("{what} expects {count} comma-separated numbers, got `{text}`"))),
    }
}

/// Parses the `--law` flag.
pub fn parse_law(spec: &str) -> Result<MagnitudeLaw, AppError> {
    let (kind, args) = spec
        .split_once(':')
        .ok_or_else(|| AppError::Usage(format!("law `{spec}` must look like kind:params")))?;
    match kind {
        "uniform" => {
            let v = numbers(args, 2, "uniform")?;
            Ok(MagnitudeLaw::Uniform { a: v[0], b: v[1] })
        }
        "lognormal" => {
            let v = numbers(args, 2, "lognormal")?;
            Ok(MagnitudeLaw::LogNormal { mu: v[0], sigma: v[1] })
        }
        "gaussian" => {
            let v = numbers(args, 2, "gaussian")?;
            Ok(MagnitudeLaw::GaussianMixture(vec![Component {
                mean: v[0],
                sigma: v[1],
                weight: 1.0,
            }]))
        }
        "mixture" => args
            .split(';')
            .map(|c| {
                numbers(c, 3, "mixture component").map(|v| Component {
                    mean: v[0],
                    sigma: v[1],
                    weight: v[2],
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(MagnitudeLaw::GaussianMixture),
        other => Err(AppError::Usage(format!("unknown law `{other}`"))),
    }
}

pub fn cmd_synth(spec: &SynthSpec, output: &Path) -> Result<(), AppError> {
    spec.validate().map_err(|e| AppError::Usage(e.to_string()))?;
    let field = generate_field(spec, case_id_from_path(output))?;
    write_displacement_csv(&field, create(output)?).map_err(|e| AppError::io(output, e))
}

pub fn execute(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Fit { input, case_id, run } => {
            let cfg = run.resolve()?;
            let (report, out) = cmd_fit(&input, case_id.as_deref(), &cfg)?;
            println!(
                "{}: omega={} variance={} -> {}",
                report.case_id,
                report.omega,
                report.variance,
                out.report.display()
            );
        }
        Command::Rank { inputs, skip_errors, run } => {
            let cfg = run.resolve()?;
            let (ranked, path) = cmd_rank(&inputs, &cfg, skip_errors)?;
            println!("best: {} (variance {}) -> {}", ranked.best().case_id, ranked.best().variance, path.display());
        }
        Command::Plot {
            report,
            histogram,
            output,
            csv,
        } => {
            cmd_plot(&report, &histogram, &output, csv.as_deref())?;
        }
        Command::Synth {
            n,
            law,
            zero_fraction,
            seed,
            output,
        } => {
            let spec = SynthSpec {
                n_nodes: n,
                law: parse_law(&law)?,
                zero_fraction,
                seed,
            };
            cmd_synth(&spec, &output)?;
        }
    }
    Ok(())
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
