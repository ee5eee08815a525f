use std::path::Path;
use std::time::Instant;

use super::{fmt_num, write_table};
use crate::baselines::{geary_c, moran_i, WeightScheme};
use crate::error::Error;
use crate::linkage::{build_order, LinkageOptions};
use crate::model::Method;
use crate::sa::compute_sa;
use crate::synth::{gen_iid, VALUE};

/// Repetitions per measurement; the median is reported.
const REPETITIONS: usize = 3;
/// Fast operations are looped until one repetition lasts this long.
const MIN_SAMPLE_SECS: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub statistic: String,
    pub n: usize,
    /// Median wall time of one call.
    pub seconds: f64,
    pub repetitions: usize,
}

pub const BENCH_HEADER: [&str; 4] = ["statistic", "n", "seconds", "repetitions"];

impl BenchRecord {
    pub fn write_csv(records: &[BenchRecord], path: impl AsRef<Path>) -> Result<(), Error> {
        let rows = records
            .iter()
            .map(|r| vec![r.statistic.clone(), r.n.to_string(), fmt_num(r.seconds), r.repetitions.to_string()]);
        write_table(path.as_ref(), &BENCH_HEADER, rows)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingConfig {
    pub sizes: Vec<usize>,
    pub seed: u64,
    pub linkage: LinkageOptions,
    /// Moran and Geary are skipped above this size.
    pub baseline_max_n: usize,
    /// Statistics to time; `None` times all of them.
    pub only: Option<Vec<String>>,
}

impl TimingConfig {
    pub fn new(sizes: Vec<usize>, seed: u64) -> Self {
        Self { sizes, seed, linkage: LinkageOptions::default(), baseline_max_n: usize::MAX, only: None }
    }

    fn wants(&self, stat: &str) -> bool {
        self.only.as_ref().map_or(true, |o| o.iter().any(|s| s == stat))
    }
}

pub const TIMED_STATISTICS: [&str; 5] = ["single_build", "median_build", "sa", "moran", "geary"];

/// Seconds per call of `f`: median over [`REPETITIONS`] samples.
fn time_op<T>(mut f: impl FnMut() -> T) -> f64 {
    let start = Instant::now();
    std::hint::black_box(f());
    let first = start.elapsed().as_secs_f64();
    // a slow first call already counts as a sample
    let (inner, mut samples) = if first >= MIN_SAMPLE_SECS {
        (1, vec![first])
    } else {
        ((MIN_SAMPLE_SECS / first.max(1e-9)).ceil() as usize, Vec::new())
    };
    let done = samples.len();
    samples.extend((done..REPETITIONS).map(|_| {
        let start = Instant::now();
        for _ in 0..inner {
            std::hint::black_box(f());
        }
        start.elapsed().as_secs_f64() / inner as f64
    }));
    samples.sort_by(f64::total_cmp);
    samples[REPETITIONS / 2].max(f64::MIN_POSITIVE)
}

/// Times order construction and each statistic on i.i.d. data. Runs on a
/// single worker thread. Sizes above a cap are skipped and reported in the
/// returned notices.
pub fn experiment_timing(cfg: &TimingConfig) -> Result<(Vec<BenchRecord>, Vec<String>), Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Experiment(e.to_string()))?;
    pool.install(|| run_timing(cfg))
}

fn run_timing(cfg: &TimingConfig) -> Result<(Vec<BenchRecord>, Vec<String>), Error> {
    let mut records = Vec::new();
    let mut notices = Vec::new();
    let mut record = |statistic: &str, n: usize, seconds: f64| {
        records.push(BenchRecord { statistic: statistic.to_string(), n, seconds, repetitions: REPETITIONS });
    };
    for &n in &cfg.sizes {
        let data = gen_iid(n, cfg.seed)?;
        let points = data.points();
        let z = data.require_feature(VALUE)?.values();

        let single = build_order(points, Method::Single, &cfg.linkage)?;
        if cfg.wants("single_build") {
            record("single_build", n, time_op(|| build_order(points, Method::Single, &cfg.linkage)));
        }
        if cfg.wants("median_build") {
            if n <= cfg.linkage.matrix_cap {
                record("median_build", n, time_op(|| build_order(points, Method::Median, &cfg.linkage)));
            } else {
                notices.push(format!("median_build skipped at n={n}: above matrix cap {}", cfg.linkage.matrix_cap));
            }
        }
        if cfg.wants("sa") {
            record("sa", n, time_op(|| compute_sa(&single, z, false)));
        }
        for (stat, f) in [
            ("moran", moran_i as fn(_, _, _) -> _),
            ("geary", geary_c as fn(_, _, _) -> _),
        ] {
            if !cfg.wants(stat) {
                continue;
            }
            if n <= cfg.baseline_max_n {
                record(stat, n, time_op(|| f(points, z, WeightScheme::InverseDistance)));
            } else {
                notices.push(format!("{stat} skipped at n={n}: above baseline limit {}", cfg.baseline_max_n));
            }
        }
    }
    Ok((records, notices))
}

/// Least-squares slope of `ln seconds` against `ln n`.
pub fn loglog_slope(points: &[(usize, f64)]) -> f64 {
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `key=value` lines describing the machine a timing table came from.
pub fn machine_metadata() -> String {
    let cpus = std::thread::available_parallelism().map_or(0, |n| n.get());
    let cpu_model = std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|s| s.lines().find(|l| l.starts_with("model name")).map(|l| l.split(':').nth(1).unwrap_or("").trim().to_string()))
        .unwrap_or_else(|| "unknown".into());
    format!(
        "os={}\narch={}\ncpus={cpus}\ncpu_model={cpu_model}\nthreads_used=1\nrepetitions={REPETITIONS}\nmin_sample_secs={MIN_SAMPLE_SECS}\n",
        std::env::consts::OS,
        std::env::consts::ARCH,
    )
}
