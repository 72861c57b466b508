use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use hwt::ca::{correspondence_analysis, double, FrequencyTable};
use hwt::compress::{compress_eval, compress_tsv, encode_raster, CompressEval};
use hwt::condense::{benchmark, benchmark_tsv, condense, unique_partitions, DEFAULT_RESTARTS};
use hwt::datasets::{self, GaussianSpec, Normalization};
use hwt::filtering::{filter_decomposition, sweep_tsv, threshold_sweep};
use hwt::haar::{forward, forward_with, inverse};
use hwt::hierarchy::build_hierarchy;
use hwt::{Criterion, DataMatrix, Dendrogram, HaarDecomposition, Orientation};

/// Hierarchical Haar wavelet transform toolkit.
///
/// Matrix inputs are CSV files, `-` for stdin, or one of the built-in names
/// `iris`, `scalar-demo` and `gaussian` (the 1200x400 Gaussian structure with
/// noise, drawn with --seed). Results go to --out, or stdout when omitted.
#[derive(Parser)]
#[command(name = "hwt", version)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "HWT_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Ward,
    Median,
    UnweightedAverage,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Ward => Criterion::Ward,
            CriterionArg::Median => Criterion::Median,
            CriterionArg::UnweightedAverage => Criterion::UnweightedAverage,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    Canonical,
    AsRecorded,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dataset {
    Iris,
    Uniform,
    Gaussian,
    ScalarDemo,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Raster,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizationArg {
    Peak,
    TotalSum,
}

#[derive(Subcommand)]
enum Command {
    /// Agglomerative clustering into a dendrogram.
    Cluster {
        input: String,
        #[arg(long, value_enum, default_value = "ward")]
        criterion: CriterionArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forward transform of a matrix along a dendrogram.
    Haar {
        input: String,
        tree: PathBuf,
        #[arg(long, value_enum, default_value = "canonical")]
        orientation: OrientationArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstructs a matrix from a decomposition.
    Inverse {
        decomposition: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hard-thresholds the details and reconstructs.
    Filter {
        input: String,
        #[arg(long, value_enum, default_value = "ward")]
        criterion: CriterionArg,
        #[arg(long, allow_hyphen_values = true)]
        threshold: f64,
        /// Reconstructed matrix as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Statistics TSV (stdout when omitted).
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Percentage zeroed and mean squared error per threshold.
    Sweep {
        input: String,
        #[arg(long, value_enum, default_value = "ward")]
        criterion: CriterionArg,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        thresholds: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Collapses merges whose detail norm is below tau.
    Condense {
        input: String,
        #[arg(long, value_enum, default_value = "ward")]
        criterion: CriterionArg,
        #[arg(long, allow_hyphen_values = true)]
        tau: f64,
        /// Condensed tree.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Partition versus k-means table.
        #[arg(long)]
        benchmark: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
    },
    /// Correspondence analysis factor coordinates of a count table.
    Ca {
        counts: String,
        /// Append complement columns before the analysis.
        #[arg(long)]
        double: bool,
        /// Drop zero-mass rows and columns instead of failing.
        #[arg(long)]
        drop_empty: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes a built-in or generated dataset.
    Gen {
        #[arg(value_enum)]
        dataset: Dataset,
        #[arg(long, default_value_t = 150)]
        rows: usize,
        #[arg(long, default_value_t = 4)]
        cols: usize,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long, default_value_t = 7.9)]
        hi: f64,
        /// Gaussian component `row,col,fwhm,amount` (repeatable; the
        /// five-component 1200x400 configuration when omitted).
        #[arg(long = "component", value_parser = parse_component)]
        components: Vec<GaussianSpec>,
        #[arg(long, value_enum, default_value = "peak")]
        normalization: NormalizationArg,
        /// Noise amplitude is max / divisor; 0 disables noise.
        #[arg(long, default_value_t = 10.0)]
        noise_divisor: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Raster sizes before and after gzip for thresholded coefficients.
    CompressEval {
        input: String,
        #[arg(long, value_enum, default_value = "ward")]
        criterion: CriterionArg,
        #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.1")]
        thresholds: Vec<f64>,
        /// Thresholds applied directly to the input.
        #[arg(long, value_delimiter = ',')]
        direct_thresholds: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A problem with flags or paths rather than with the data.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: String) -> anyhow::Error {
    Usage(msg).into()
}

fn parse_component(s: &str) -> std::result::Result<GaussianSpec, String> {
    let f: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || format!("expected row,col,fwhm,amount, got {s:?}");
    if f.len() != 4 {
        return Err(bad());
    }
    Ok(GaussianSpec {
        center: (f[0].parse().map_err(|_| bad())?, f[1].parse().map_err(|_| bad())?),
        fwhm: f[2].parse().map_err(|_| bad())?,
        amount: f[3].parse().map_err(|_| bad())?,
    })
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        return Ok(buf);
    }
    fs::read(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read_bytes(path)?)
        .map_err(|_| anyhow::anyhow!("{} is not UTF-8 text", path.display()))
}

fn load_matrix(source: &str, seed: u64) -> Result<DataMatrix> {
    let path = Path::new(source);
    if source == "-" || path.exists() {
        let bytes = read_bytes(path)?;
        return DataMatrix::read_csv(bytes.as_slice()).with_context(|| format!("reading {source}"));
    }
    match source {
        "iris" => Ok(datasets::iris()),
        "scalar-demo" => Ok(datasets::scalar_demo()),
        "gaussian" => Ok(datasets::add_uniform_noise(&datasets::gaussian_reference(), 10.0, seed)?),
        _ => Err(usage(format!(
            "{source}: no such file (built-in inputs are iris, scalar-demo, gaussian)"
        ))),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn csv_bytes(x: &DataMatrix) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    x.write_csv(&mut buf)?;
    Ok(buf)
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Cluster { input, criterion, out } => {
            let x = load_matrix(&input, seed)?;
            let tree = build_hierarchy(&x, criterion.into())?;
            emit(out.as_deref(), tree.to_text().as_bytes())
        }
        Command::Haar {
            input,
            tree,
            orientation,
            out,
        } => {
            let x = load_matrix(&input, seed)?;
            let tree = Dendrogram::from_text(&read_text(&tree)?)
                .with_context(|| format!("reading {}", tree.display()))?;
            let orientation = match orientation {
                OrientationArg::Canonical => Orientation::Canonical,
                OrientationArg::AsRecorded => Orientation::AsRecorded,
            };
            let h = forward_with(&x, &tree, orientation)?;
            emit(out.as_deref(), h.to_text().as_bytes())
        }
        Command::Inverse { decomposition, out } => {
            let h = HaarDecomposition::from_text(&read_text(&decomposition)?)
                .with_context(|| format!("reading {}", decomposition.display()))?;
            emit(out.as_deref(), &csv_bytes(&inverse(&h)?)?)
        }
        Command::Filter {
            input,
            criterion,
            threshold,
            out,
            stats,
        } => {
            let x = load_matrix(&input, seed)?;
            if threshold.is_nan() || threshold < 0.0 {
                anyhow::bail!("threshold must be nonnegative, got {threshold}");
            }
            let tree = build_hierarchy(&x, criterion.into())?;
            let h = forward(&x, &tree)?;
            let (approx, summary) = filter_decomposition(&x, &h, threshold)?;
            if let Some(p) = out.as_deref() {
                emit(Some(p), &csv_bytes(&approx)?)?;
            }
            emit(stats.as_deref(), summary.to_tsv().as_bytes())
        }
        Command::Sweep {
            input,
            criterion,
            thresholds,
            out,
        } => {
            let x = load_matrix(&input, seed)?;
            let rows = threshold_sweep(&x, criterion.into(), &thresholds)?;
            emit(out.as_deref(), sweep_tsv(&rows).as_bytes())
        }
        Command::Condense {
            input,
            criterion,
            tau,
            out,
            benchmark: bench,
            restarts,
        } => {
            let x = load_matrix(&input, seed)?;
            let tree = build_hierarchy(&x, criterion.into())?;
            let h = forward(&x, &tree)?;
            let (condensed, _) = condense(&h, tau)?;
            emit(out.as_deref(), condensed.to_text().as_bytes())?;
            if let Some(p) = bench {
                let rows = benchmark(&condensed, &x, seed, restarts)?;
                emit(Some(&p), benchmark_tsv(&rows).as_bytes())?;
            }
            eprintln!(
                "collapsed {} of {} merges, {} partitions",
                condensed.collapsed_count(),
                condensed.collapsed().len(),
                unique_partitions(&condensed).len()
            );
            Ok(())
        }
        Command::Ca {
            counts,
            double: dbl,
            drop_empty,
            out,
        } => {
            let mut table = FrequencyTable::new(load_matrix(&counts, seed)?)?;
            if drop_empty {
                table = table.without_zero_mass()?;
            }
            if dbl {
                table = double(&table)?;
            }
            let fc = correspondence_analysis(&table)?;
            emit(out.as_deref(), &csv_bytes(&fc.coords)?)
        }
        Command::Gen {
            dataset,
            rows,
            cols,
            lo,
            hi,
            components,
            normalization,
            noise_divisor,
            format,
            out,
        } => {
            let x = match dataset {
                Dataset::Iris => datasets::iris(),
                Dataset::ScalarDemo => datasets::scalar_demo(),
                Dataset::Uniform => datasets::uniform_matrix(rows, cols, lo, hi, seed)?,
                Dataset::Gaussian => {
                    let norm = match normalization {
                        NormalizationArg::Peak => Normalization::Peak,
                        NormalizationArg::TotalSum => Normalization::TotalSum,
                    };
                    let base = if components.is_empty() {
                        let (r, c) = datasets::REFERENCE_SHAPE;
                        datasets::gaussian_structure(r, c, &datasets::REFERENCE_COMPONENTS, norm)?
                    } else {
                        datasets::gaussian_structure(rows, cols, &components, norm)?
                    };
                    if noise_divisor == 0.0 {
                        base
                    } else {
                        datasets::add_uniform_noise(&base, noise_divisor, seed)?
                    }
                }
            };
            match format {
                Format::Csv => emit(out.as_deref(), &csv_bytes(&x)?),
                Format::Raster => emit(out.as_deref(), &encode_raster(&x)),
            }
        }
        Command::CompressEval {
            input,
            criterion,
            thresholds,
            direct_thresholds,
            out,
        } => {
            let x = load_matrix(&input, seed)?;
            let cfg = CompressEval {
                criterion: criterion.into(),
                thresholds,
                direct_thresholds,
                seed,
            };
            let rows = compress_eval(&x, &cfg)?;
            emit(out.as_deref(), compress_tsv(&rows).as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hwt: {}", format!("{e:#}").replace('\n', " "));
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
