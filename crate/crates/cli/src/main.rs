use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fastsa::baselines::{geary_c, moran_i, permutation_null, GlobalStat, NullStatistic, WeightScheme};
use fastsa::error::Error;
use fastsa::experiments::{
    experiment_disk, experiment_grid, experiment_subsample, experiment_timing, log_spaced, machine_metadata,
    BenchRecord, DiskConfig, GridConfig, SubsampleConfig, TimingConfig,
};
use fastsa::linkage::{LinkageOptions, DEFAULT_MATRIX_CAP};
use fastsa::synth::GenSpec;
use fastsa::{build_order, compute_sa, compute_sa_multi, io, Dataset, MergeOrder, Method};

mod format;

use format::sig6;

#[derive(Debug, Parser)]
#[command(name = "fastsa", version, about = "S_A spatial autocorrelation, Moran's I and Geary's C")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// Dataset CSV: coordinate columns first, then feature columns.
    #[arg(long = "in")]
    input: PathBuf,
    /// Number of leading coordinate columns.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    dims: u8,
}

impl Input {
    fn load(&self) -> Result<Dataset, Error> {
        Ok(io::read_dataset(&self.input, self.dims as usize)?)
    }
}

#[derive(Debug, Args)]
struct LinkageArgs {
    /// Merge-order builder.
    #[arg(long, default_value = "single", value_parser = parse_method)]
    method: Method,
    /// Largest n accepted by the distance-matrix builders.
    #[arg(long, default_value_t = DEFAULT_MATRIX_CAP)]
    matrix_cap: usize,
}

impl LinkageArgs {
    fn options(&self) -> LinkageOptions {
        LinkageOptions { matrix_cap: self.matrix_cap, ..LinkageOptions::default() }
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s.parse::<Method>() {
        Ok(Method::External) | Err(_) => Err(format!("expected one of single, average, median, furthest, kdtree; got '{s}'")),
        Ok(m) => Ok(m),
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenKind {
    IidNormal,
    UniformCoords,
    DiskAverage,
    GridSample,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a merge order from coordinates and write it as an SAORDER file.
    Linkage {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        linkage: LinkageArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute S_A for one feature, or for every feature when none is named.
    Sa {
        #[command(flatten)]
        input: Input,
        /// Precomputed merge order; built with --method when absent.
        #[arg(long)]
        order: Option<PathBuf>,
        #[command(flatten)]
        linkage: LinkageArgs,
        #[arg(long)]
        feature: Option<String>,
        /// Also write the SS(t) trace (requires --feature).
        #[arg(long, requires = "feature")]
        trace: Option<PathBuf>,
    },
    /// Moran's I with inverse-distance weights.
    Moran(BaselineArgs),
    /// Geary's C with inverse-distance weights.
    Geary(BaselineArgs),
    /// Write a synthetic dataset.
    Gen {
        #[arg(long, value_enum, default_value = "iid-normal")]
        kind: GenKind,
        #[arg(long)]
        n: usize,
        /// Disk radius for disk-average.
        #[arg(long, default_value_t = 0.0)]
        r: f64,
        /// Grid side for grid-sample.
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
        dims: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the SS(t) trajectory as CSV `t,ss,ss_normalized`.
    Trace {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        order: Option<PathBuf>,
        #[command(flatten)]
        linkage: LinkageArgs,
        #[arg(long)]
        feature: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time order construction and each statistic on i.i.d. data.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000,8000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip Moran and Geary above this size.
        #[arg(long, default_value_t = 80_000)]
        baseline_max_n: usize,
        #[arg(long, default_value_t = DEFAULT_MATRIX_CAP)]
        matrix_cap: usize,
        /// Machine details are written next to it with a `.meta` suffix.
        #[arg(long)]
        out: PathBuf,
    },
    /// Disk-averaging sensitivity sweep.
    ExpDisk {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 1e-3)]
        r_min: f64,
        #[arg(long, default_value_t = 1.0)]
        r_max: f64,
        #[arg(long, default_value_t = 31)]
        radii: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Half-range radius per statistic.
        #[arg(long)]
        half_range_out: Option<PathBuf>,
    },
    /// Grid-convergence sweep with a log-sigmoid fit per grid size.
    ExpGrid {
        #[arg(long, value_delimiter = ',', default_value = "10")]
        ks: Vec<usize>,
        #[arg(long, default_value_t = 10.0)]
        n_min: f64,
        #[arg(long, default_value_t = 1e5)]
        n_max: f64,
        #[arg(long, default_value_t = 3)]
        per_decade: usize,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        /// Cap on points per sweep cell; larger n then use fewer replicates.
        #[arg(long)]
        point_budget: Option<usize>,
        /// Skip Moran and Geary above this size.
        #[arg(long, default_value_t = 5000)]
        baseline_max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        fits_out: Option<PathBuf>,
    },
    /// Repeated random row subsampling of a dataset.
    ExpSubsample {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        feature: String,
        #[arg(long, value_delimiter = ',', required = true)]
        ms: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MATRIX_CAP)]
        matrix_cap: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the log-sigmoid model to a two-column `n,value` CSV.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Debug, Args)]
struct BaselineArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    feature: Option<String>,
    /// Permutation replicates for a null mean and spread.
    #[arg(long, default_value_t = 0)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_or_build(order: Option<&Path>, data: &Dataset, linkage: &LinkageArgs) -> Result<MergeOrder, Error> {
    match order {
        Some(path) => Ok(io::read_merge_order(path, Some(data.len()))?),
        None => Ok(build_order(data.points(), linkage.method, &linkage.options())?),
    }
}

/// The named feature, or the only one when the dataset has exactly one.
fn pick_feature<'a>(data: &'a Dataset, name: Option<&str>) -> Result<&'a fastsa::FeatureVector, Error> {
    match name {
        Some(name) => Ok(data.require_feature(name)?),
        None => {
            let mut all = data.features();
            match (all.next(), all.next()) {
                (Some(f), None) => Ok(f),
                _ => Err(Error::Experiment("dataset has several features; choose one with --feature".into())),
            }
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Linkage { input, linkage, out } => {
            let data = input.load()?;
            let order = build_order(data.points(), linkage.method, &linkage.options())?;
            io::write_merge_order(&order, &out)?;
            println!("wrote {} merges to {}", order.events().len(), out.display());
        }
        Command::Sa { input, order, linkage, feature, trace } => {
            let data = input.load()?;
            let order = load_or_build(order.as_deref(), &data, &linkage)?;
            match feature {
                Some(name) => {
                    let z = data.require_feature(&name)?;
                    let r = compute_sa(&order, z.values(), trace.is_some())?;
                    println!("{}", sig6(r.value));
                    if let Some(path) = trace {
                        fastsa::sa::trace_export(&r, &path)?;
                    }
                }
                None => {
                    let features: Vec<_> = data.features().cloned().collect();
                    for (f, r) in features.iter().zip(compute_sa_multi(&order, &features)) {
                        match r {
                            Ok(r) => println!("{},{}", f.name(), sig6(r.value)),
                            Err(e) => println!("{},NaN,{e}", f.name()),
                        }
                    }
                }
            }
        }
        Command::Moran(args) => baseline(args, false)?,
        Command::Geary(args) => baseline(args, true)?,
        Command::Gen { kind, n, r, k, dims, seed, out } => {
            let spec = match kind {
                GenKind::IidNormal => GenSpec::IidNormal { n, seed },
                GenKind::UniformCoords => GenSpec::UniformCoords { n, dims: dims as usize, seed },
                GenKind::DiskAverage => GenSpec::DiskAverage { n, r, seed },
                GenKind::GridSample => GenSpec::GridSample { k, n, seed },
            };
            let data = spec.generate()?;
            io::write_dataset(&data, &out)?;
            println!("wrote {} rows to {}", data.len(), out.display());
        }
        Command::Trace { input, order, linkage, feature, out } => {
            let data = input.load()?;
            let order = load_or_build(order.as_deref(), &data, &linkage)?;
            let r = compute_sa(&order, data.require_feature(&feature)?.values(), true)?;
            fastsa::sa::trace_export(&r, &out)?;
            println!("{}", sig6(r.value));
        }
        Command::Bench { sizes, seed, baseline_max_n, matrix_cap, out } => {
            let mut cfg = TimingConfig::new(sizes, seed);
            cfg.baseline_max_n = baseline_max_n;
            cfg.linkage.matrix_cap = matrix_cap;
            let (records, notices) = experiment_timing(&cfg)?;
            for note in notices {
                eprintln!("note: {note}");
            }
            BenchRecord::write_csv(&records, &out)?;
            let meta = meta_path(&out);
            std::fs::write(&meta, machine_metadata()).map_err(|source| Error::Io { path: meta, source })?;
            for r in &records {
                println!("{:<13} n={:<8} {}s", r.statistic, r.n, sig6(r.seconds));
            }
        }
        Command::ExpDisk { n, reps, r_min, r_max, radii, seed, out, half_range_out } => {
            if !(r_min > 0.0 && r_max >= r_min) || radii == 0 {
                return Err(Error::Experiment("need 0 < r-min <= r-max and at least one radius".into()));
            }
            let cfg = DiskConfig { n, radii: log_spaced(r_min, r_max, radii), reps, seed, linkage: LinkageOptions::default() };
            let report = experiment_disk(&cfg)?;
            report.write_csv(&out)?;
            if let Some(path) = half_range_out {
                report.write_half_range_csv(path)?;
            }
            for (stat, r) in &report.half_range {
                println!("half-range radius {stat}: {}", r.map_or("none".into(), sig6));
            }
            if report.dropped > 0 {
                eprintln!("note: {} zero-variance replicate(s) dropped", report.dropped);
            }
        }
        Command::ExpGrid { ks, n_min, n_max, per_decade, reps, point_budget, baseline_max_n, seed, out, fits_out } => {
            if !(n_min >= 2.0 && n_max >= n_min) || per_decade == 0 {
                return Err(Error::Experiment("need 2 <= n-min <= n-max and per-decade >= 1".into()));
            }
            let count = ((n_max / n_min).log10() * per_decade as f64).round() as usize + 1;
            let mut ns: Vec<usize> = log_spaced(n_min, n_max, count).iter().map(|v| v.round() as usize).collect();
            ns.dedup();
            let cfg = GridConfig { ks, ns, reps, seed, baseline_max_n, point_budget, linkage: LinkageOptions::default() };
            let report = experiment_grid(&cfg)?;
            report.write_csv(&out)?;
            if let Some(path) = fits_out {
                report.write_fits_csv(path)?;
            }
            for f in &report.fits {
                match &f.fit {
                    Ok(p) => println!(
                        "k={}: s_max={} a={} b={} ci95=[{}, {}]",
                        f.k,
                        sig6(p.s_max),
                        sig6(p.a),
                        sig6(p.b),
                        sig6(p.ci_s_max.0),
                        sig6(p.ci_s_max.1)
                    ),
                    Err(e) => println!("k={}: fit failed: {e}", f.k),
                }
            }
        }
        Command::ExpSubsample { input, feature, ms, reps, seed, matrix_cap, out } => {
            let data = input.load()?;
            let linkage = LinkageOptions { matrix_cap, ..LinkageOptions::default() };
            let cfg = SubsampleConfig { ms, reps, seed, feature, linkage };
            let report = experiment_subsample(&data, &cfg)?;
            report.write_csv(&out)?;
            println!("wrote {} rows to {}", report.rows.len(), out.display());
            if report.dropped > 0 {
                eprintln!("note: {} replicate(s) dropped", report.dropped);
            }
        }
        Command::Fit { input } => {
            let file = std::fs::File::open(&input).map_err(|source| Error::Io { path: input.clone(), source })?;
            let samples = fastsa::fitting::parse_samples(file)
                .map_err(|msg| Error::Experiment(format!("{}: {msg}", input.display())))?;
            let f = fastsa::fitting::fit_log_sigmoid(&samples)?;
            println!("s_max {}", sig6(f.s_max));
            println!("a {}", sig6(f.a));
            println!("b {}", sig6(f.b));
            println!("rss {}", sig6(f.rss));
            println!("ci95_s_max {} {}", sig6(f.ci_s_max.0), sig6(f.ci_s_max.1));
        }
    }
    Ok(())
}

fn baseline(args: BaselineArgs, geary: bool) -> Result<(), Error> {
    let data = args.input.load()?;
    let z = pick_feature(&data, args.feature.as_deref())?.values();
    let stat: GlobalStat = if geary {
        geary_c(data.points(), z, WeightScheme::InverseDistance)?
    } else {
        moran_i(data.points(), z, WeightScheme::InverseDistance)?
    };
    println!("{}", sig6(stat.value));
    if args.reps > 0 {
        let which = if geary { NullStatistic::Geary(data.points()) } else { NullStatistic::Moran(data.points()) };
        let null = permutation_null(which, z, args.reps, args.seed).map_err(Error::from)?;
        println!("null mean {} std {} reps {}", sig6(null.mean), sig6(null.std), null.reps);
    }
    Ok(())
}

fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}
