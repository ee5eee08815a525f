//! Log-sigmoid saturation model `S(n) = s_max / (1 + exp(-a (ln n - b)))`
//! fitted by Levenberg–Marquardt.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::FitError;

pub const MAX_ITERATIONS: usize = 500;
const TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmoidFit {
    pub s_max: f64,
    /// Slope per unit of `ln n`.
    pub a: f64,
    /// Midpoint in `ln n`.
    pub b: f64,
    pub rss: f64,
    /// 95% interval for `s_max` from the linearised covariance.
    pub ci_s_max: (f64, f64),
    pub iterations: usize,
}

impl SigmoidFit {
    pub fn predict(&self, n: f64) -> f64 {
        sigmoid([self.s_max, self.a, self.b], n.ln())
    }
}

#[inline]
fn sigmoid(p: [f64; 3], u: f64) -> f64 {
    p[0] / (1.0 + (-p[1] * (u - p[2])).exp())
}

/// Model value and partial derivatives with respect to `(s_max, a, b)`.
#[inline]
fn model_grad(p: [f64; 3], u: f64) -> (f64, [f64; 3]) {
    let [s, a, b] = p;
    let e = (-a * (u - b)).exp();
    let g = 1.0 / (1.0 + e);
    // g² e = g (1 - g), which stays finite when e overflows
    let ge = g * (1.0 - g);
    (s * g, [g, s * ge * (u - b), -s * ge * a])
}

fn rss(p: [f64; 3], u: &[f64], y: &[f64]) -> f64 {
    u.iter().zip(y).map(|(&u, &y)| (y - sigmoid(p, u)).powi(2)).sum()
}

/// Solves the symmetric 3x3 system by Gaussian elimination with pivoting.
fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> Option<[f64; 3]> {
    for c in 0..3 {
        let p = (c..3).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, p);
        v.swap(c, p);
        for r in c + 1..3 {
            let f = m[r][c] / m[c][c];
            for k in c..3 {
                m[r][k] -= f * m[c][k];
            }
            v[r] -= f * v[c];
        }
    }
    let mut x = [0.0; 3];
    for c in (0..3).rev() {
        let s: f64 = (c + 1..3).map(|k| m[c][k] * x[k]).sum();
        x[c] = (v[c] - s) / m[c][c];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn normal_equations(p: [f64; 3], u: &[f64], y: &[f64]) -> ([[f64; 3]; 3], [f64; 3]) {
    let mut jtj = [[0.0; 3]; 3];
    let mut jtr = [0.0; 3];
    for (&u, &y) in u.iter().zip(y) {
        let (f, g) = model_grad(p, u);
        let r = y - f;
        for i in 0..3 {
            jtr[i] += g[i] * r;
            for j in 0..3 {
                jtj[i][j] += g[i] * g[j];
            }
        }
    }
    (jtj, jtr)
}

/// Starting point: `s_max` at the largest value, `b` where the data first
/// reach half of it (interpolated in `ln n`), `a = 1`.
fn initial_guess(u: &[f64], y: &[f64]) -> [f64; 3] {
    let s = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let half = 0.5 * s;
    let mut b = u[0];
    for k in 1..u.len() {
        if y[k - 1] < half && y[k] >= half {
            let w = (half - y[k - 1]) / (y[k] - y[k - 1]);
            b = u[k - 1] + w * (u[k] - u[k - 1]);
            break;
        }
    }
    [s, 1.0, b]
}

/// Least-squares fit to `(n, value)` samples. Repeated `n` are allowed
/// (e.g. one sample per replicate); at least four distinct `n` are needed.
pub fn fit_log_sigmoid(samples: &[(f64, f64)]) -> Result<SigmoidFit, FitError> {
    if samples.iter().any(|&(n, v)| !n.is_finite() || !v.is_finite() || n <= 0.0) {
        return Err(FitError::NonFinite);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut distinct = sorted.iter().map(|s| s.0).collect::<Vec<_>>();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(FitError::TooFewPoints(distinct.len()));
    }
    let u: Vec<f64> = sorted.iter().map(|s| s.0.ln()).collect();
    let y: Vec<f64> = sorted.iter().map(|s| s.1).collect();
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    if hi - lo < 1e-6 {
        return Err(FitError::Unidentifiable(format!("values span {:e}", hi - lo)));
    }

    let mut p = initial_guess(&u, &y);
    let mut cost = rss(p, &u, &y);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (jtj, jtr) = normal_equations(p, &u, &y);
        let mut damped = jtj;
        for i in 0..3 {
            damped[i][i] += lambda * jtj[i][i].max(1e-12);
        }
        let Some(step) = solve3(damped, jtr) else {
            lambda *= 10.0;
            continue;
        };
        let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
        let change = (0..3)
            .map(|i| step[i].abs() / (p[i].abs() + TOLERANCE))
            .fold(0.0, f64::max);
        let trial_cost = rss(trial, &u, &y);
        if trial_cost.is_finite() && trial_cost <= cost {
            p = trial;
            cost = trial_cost;
            lambda = (lambda / 10.0).max(1e-12);
            if change < TOLERANCE {
                converged = true;
                break;
            }
        } else {
            if change < TOLERANCE {
                // no representable improvement left
                converged = true;
                break;
            }
            lambda *= 10.0;
        }
    }
    if !converged {
        return Err(FitError::NonConvergence(MAX_ITERATIONS));
    }
    let [s_max, a, b] = p;
    if !(s_max > 0.0 && s_max <= 1.0 && a > 0.0) {
        return Err(FitError::Inadmissible { s_max, a });
    }

    let m = u.len();
    let (jtj, _) = normal_equations(p, &u, &y);
    let half_width = if m > 3 && cost > 0.0 {
        let sigma2 = cost / (m - 3) as f64;
        let var_s = solve3(jtj, [1.0, 0.0, 0.0]).map_or(f64::INFINITY, |c| c[0]);
        let t = StudentsT::new(0.0, 1.0, (m - 3) as f64)
            .map(|d| d.inverse_cdf(0.975))
            .unwrap_or(f64::INFINITY);
        t * (sigma2 * var_s.max(0.0)).sqrt()
    } else {
        0.0
    };
    Ok(SigmoidFit { s_max, a, b, rss: cost, ci_s_max: (s_max - half_width, s_max + half_width), iterations })
}

/// Parses a two-column `n,value` CSV with a header row.
pub fn parse_samples(reader: impl std::io::Read) -> Result<Vec<(f64, f64)>, String> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        if rec.len() != 2 {
            return Err(format!("row {}: expected 2 columns, found {}", row + 1, rec.len()));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|_| format!("row {}: bad number {s:?}", row + 1));
        out.push((parse(&rec[0])?, parse(&rec[1])?));
    }
    Ok(out)
}
