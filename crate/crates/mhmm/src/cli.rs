//! The `mhmm` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand};
use mhmm_core::selection::model_table;
use mhmm_core::{em_fit, FitOptions, FitResult, ModelSpec, ObservedSeries};

use crate::csvio::{read_series, write_series};
use crate::error::{Category, Error, Result};
use crate::modelfile::{format_interactions, read_model, write_model};
use crate::report::{comparison_csv, count_report, fit_report};
use crate::spec::{read_spec, SpecFile};

#[derive(Debug, Parser)]
#[command(name = "mhmm", version, about = "Multiple hidden Markov models for categorical time series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a spec to a CSV series by EM.
    Fit {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Output directory for model.txt, interactions.txt and report.txt.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Draw a series of the given length from a model file.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV file to write.
        #[arg(long)]
        out: PathBuf,
        /// Optional CSV file for the latent path.
        #[arg(long)]
        states: Option<PathBuf>,
    },
    /// Fit several specs and test each against a reference.
    Compare {
        #[arg(long = "spec", required = true)]
        specs: Vec<PathBuf>,
        /// Reference spec; defaults to the first `--spec`.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        /// Output directory for comparison.txt and comparison.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Count total, zeroed and free parameters of a spec.
    CountParams {
        #[arg(long)]
        spec: PathBuf,
    },
    /// List the independence statements implied by a spec's graph.
    Independencies {
        #[arg(long)]
        spec: PathBuf,
        /// Keep only the statement with the largest left set per class.
        #[arg(long)]
        minimal: bool,
    },
    /// Look for a latent relabelling that maps one graph onto another.
    Equivalent {
        /// Give exactly two.
        #[arg(long = "spec", required = true)]
        specs: Vec<PathBuf>,
    },
}

/// Parses arguments, runs the command and returns the exit status. Output
/// goes to stdout; failures print one `error:<category>: message` line.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            let text: Vec<&str> = msg
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            let text = text.join(" ");
            eprintln!("error:{}: {}", Category::Usage, text.trim_start_matches("error: "));
            return 2;
        }
    };
    let mut stdout = String::new();
    match execute(cli.command, &mut stdout) {
        Ok(()) => {
            print!("{stdout}");
            0
        }
        Err(e) => {
            eprintln!("error:{}: {}", e.category(), e.to_string().replace('\n', " "));
            e.exit_code()
        }
    }
}

fn label(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn options(spec: &SpecFile, seed: Option<u64>, restarts: Option<usize>) -> Result<FitOptions> {
    let mut o = spec.options;
    if let Some(s) = seed {
        o.seed = s;
    }
    if let Some(r) = restarts {
        if r == 0 {
            return Err(Error::Usage("--restarts must be positive".into()));
        }
        o.restarts = r;
    }
    Ok(o)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn execute(command: Command, out: &mut String) -> Result<()> {
    match command {
        Command::Fit {
            spec,
            data,
            out: dir,
            seed,
            restarts,
        } => {
            let file = read_spec(&spec)?;
            let model_spec = file.model_spec()?;
            let series = read_series(&data, model_spec.observed())?;
            let fit = em_fit(&model_spec, &series, &options(&file, seed, restarts)?)?;
            create_dir(&dir)?;
            write_model(&dir.join("model.txt"), &fit.model)?;
            let mut inter = format_interactions(model_spec.transition_parameterization(), &fit.transition_interactions);
            inter.push_str(&format_interactions(
                model_spec.emission_parameterization(),
                &fit.emission_interactions,
            ));
            write(&dir.join("interactions.txt"), &inter)?;
            let report = fit_report(&label(&spec), &fit);
            write(&dir.join("report.txt"), &report)?;
            out.push_str(&report);
        }
        Command::Simulate {
            model,
            length,
            seed,
            out: file,
            states,
        } => {
            if length == 0 {
                return Err(Error::Usage("--length must be positive".into()));
            }
            let model = read_model(&model)?;
            let (path, series) = model.simulate(length, seed)?;
            write_series(&file, &series)?;
            if let Some(states) = states {
                let rows: Vec<Vec<usize>> = path.iter().map(|&s| model.latent_scheme().decode(s)).collect();
                write_series(&states, &ObservedSeries::new(model.latent_scheme().clone(), &rows)?)?;
            }
        }
        Command::Compare {
            specs,
            reference,
            data,
            out: dir,
            seed,
            restarts,
        } => {
            let mut paths = specs;
            let given = paths.len();
            let reference = reference.unwrap_or_else(|| paths[0].clone());
            let ref_pos = match paths.iter().position(|p| *p == reference) {
                Some(i) => i,
                None => {
                    paths.push(reference.clone());
                    paths.len() - 1
                }
            };
            let files = paths.iter().map(|p| read_spec(p)).collect::<Result<Vec<_>>>()?;
            let specs = files.iter().map(|f| f.model_spec()).collect::<Result<Vec<_>>>()?;
            let series = read_series(&data, specs[ref_pos].observed())?;
            let opts = files
                .iter()
                .map(|f| options(f, seed, restarts))
                .collect::<Result<Vec<_>>>()?;
            let fits = fit_all(&specs, &series, &opts)?;
            let rows: Vec<(String, &FitResult)> = paths
                .iter()
                .zip(&fits)
                .take(given)
                .map(|(p, f)| (label(p), f))
                .collect();
            let table = model_table(&rows, &fits[ref_pos])?;
            let text = table.to_string();
            if let Some(dir) = dir {
                create_dir(&dir)?;
                write(&dir.join("comparison.txt"), &text)?;
                write(&dir.join("comparison.csv"), &comparison_csv(&table))?;
            }
            out.push_str(&text);
        }
        Command::CountParams { spec } => {
            let spec = read_spec(&spec)?.model_spec()?;
            out.push_str(&count_report(spec.schemes(), spec.constraints()));
        }
        Command::Independencies { spec, minimal } => {
            let file = read_spec(&spec)?;
            for s in file.graph.independencies(minimal) {
                out.push_str(&s.render(&file.latent, &file.observed));
                out.push('\n');
            }
        }
        Command::Equivalent { specs } => {
            if specs.len() != 2 {
                return Err(Error::Usage(format!("equivalent takes two --spec files, got {}", specs.len())));
            }
            let a = read_spec(&specs[0])?;
            let b = read_spec(&specs[1])?;
            let cards: Vec<usize> = a.latent.variables().iter().map(|v| v.categories).collect();
            let b_cards: Vec<usize> = b.latent.variables().iter().map(|v| v.categories).collect();
            let mapping = if cards == b_cards && a.observed == b.observed {
                a.graph.equivalent_to(&b.graph, &cards)
            } else {
                None
            };
            match mapping {
                Some(nu) => {
                    for (i, j) in nu.iter().enumerate() {
                        out.push_str(&format!("{} -> {}\n", a.latent.variables()[i].name, b.latent.variables()[*j].name));
                    }
                }
                None => out.push_str("not equivalent\n"),
            }
        }
    }
    Ok(())
}

/// Fits every spec on its own worker; results come back in input order.
fn fit_all(specs: &[ModelSpec], series: &ObservedSeries, opts: &[FitOptions]) -> Result<Vec<FitResult>> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(specs.len());
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<FitResult>>>> = Mutex::new((0..specs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= specs.len() {
                    break;
                }
                let r = em_fit(&specs[i], series, &opts[i]).map_err(Error::from);
                results.lock().expect("no worker panics while holding the lock")[i] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every spec was fitted"))
        .collect()
}
