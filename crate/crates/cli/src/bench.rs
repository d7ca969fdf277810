//! Error and timing experiments emitted as CSV.

use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use serde::Serialize;
use tricorner::oracle::{self, counted};
use tricorner::{
    factorize, factorize_extended, factorize_with, inverse_with, loglog_slope, solve_with, Corners,
    Error, ExtF64, StructuredMatrix,
};

pub const CSV_HEADER: [&str; 8] = [
    "n",
    "method",
    "trial",
    "seed",
    "elapsed_ns",
    "flops",
    "eps_r",
    "overflow",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Method {
    /// Structured inverse (factorize + dense triple product).
    Structured,
    /// Structured factorize + O(n) solve.
    StructuredSolve,
    /// Dense LU with partial pivoting, then inversion.
    Lu,
    GaussJordan,
    /// `(AᵀA)⁻¹Aᵀ` through dense LU.
    PinvNormalEq,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Structured,
        Method::StructuredSolve,
        Method::Lu,
        Method::GaussJordan,
        Method::PinvNormalEq,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Structured => "structured",
            Method::StructuredSolve => "structured_solve",
            Method::Lu => "lu",
            Method::GaussJordan => "gauss_jordan",
            Method::PinvNormalEq => "pinv_normal_eq",
        }
    }
}

/// One CSV row. A missing `trial` marks a per-order mean row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub n: usize,
    pub method: &'static str,
    pub trial: Option<usize>,
    pub seed: u64,
    pub elapsed_ns: Option<u64>,
    pub flops: Option<u64>,
    pub eps_r: Option<f64>,
    pub overflow: bool,
}

pub struct BenchConfig {
    pub orders: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub margin: f64,
    pub corners: Corners,
}

/// Seed of one trial, derived so that orders and trials never share a stream.
pub fn trial_seed(base: u64, n: usize, trial: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((n as u64) << 24)
        .wrapping_add(trial as u64)
}

fn corners_for(n: usize, c: Corners) -> Corners {
    if n < 3 {
        Corners::None
    } else {
        c
    }
}

/// Warm-up run discarded, then the median of five timed runs.
pub fn median_time_ns<R>(mut f: impl FnMut() -> R) -> u64 {
    black_box(f());
    let mut runs: Vec<u64> = (0..5)
        .map(|_| {
            let t = Instant::now();
            black_box(f());
            (t.elapsed().as_nanos() as u64).max(1)
        })
        .collect();
    runs.sort_unstable();
    runs[2]
}

pub fn write_csv(out: &mut dyn Write, records: &[BenchRecord]) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn mean_row(n: usize, method: &'static str, seed: u64, rows: &[&BenchRecord]) -> BenchRecord {
    let mean_of = |v: Vec<f64>| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    let elapsed = mean_of(
        rows.iter()
            .filter_map(|r| r.elapsed_ns)
            .map(|v| v as f64)
            .collect(),
    );
    let flops = mean_of(
        rows.iter()
            .filter_map(|r| r.flops)
            .map(|v| v as f64)
            .collect(),
    );
    BenchRecord {
        n,
        method,
        trial: None,
        seed,
        elapsed_ns: elapsed.map(|v| v.round() as u64),
        flops: flops.map(|v| v.round() as u64),
        eps_r: mean_of(rows.iter().filter_map(|r| r.eps_r).collect()),
        overflow: rows.iter().any(|r| r.overflow),
    }
}

/// Structured inverse against the LU-oracle inverse, per-trial relative
/// error plus one mean row per order. Overflowing trials are kept with an
/// empty `eps_r`.
pub fn bench_error(cfg: &BenchConfig) -> anyhow::Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for &n in &cfg.orders {
        if n < 2 {
            anyhow::bail!(Error::Shape(format!(
                "error experiment needs orders >= 2, got {n}"
            )));
        }
        let mut trials = Vec::new();
        for trial in 0..cfg.trials {
            let seed = trial_seed(cfg.seed, n, trial);
            let m = StructuredMatrix::random_dominant(
                n,
                cfg.margin,
                corners_for(n, cfg.corners),
                seed,
            )?;
            let start = Instant::now();
            let structured = counted(|c| {
                let f = factorize_with::<f64>(&m, c)?;
                inverse_with(&f, c)
            });
            let elapsed = (start.elapsed().as_nanos() as u64).max(1);
            let record = match structured {
                (Ok(inv), flops) => {
                    let lu = oracle::lu_invert(&oracle::lu_decompose(&m.to_dense())?);
                    BenchRecord {
                        n,
                        method: Method::Structured.tag(),
                        trial: Some(trial),
                        seed,
                        elapsed_ns: Some(elapsed),
                        flops: Some(flops.total()),
                        eps_r: Some(oracle::relative_error_inf(&inv, &lu)?),
                        overflow: false,
                    }
                }
                (Err(Error::Overflow { .. }), _) => BenchRecord {
                    n,
                    method: Method::Structured.tag(),
                    trial: Some(trial),
                    seed,
                    elapsed_ns: Some(elapsed),
                    flops: None,
                    eps_r: None,
                    overflow: true,
                },
                (Err(e), _) => return Err(e.into()),
            };
            trials.push(record);
        }
        if !trials.is_empty() {
            let refs: Vec<&BenchRecord> = trials.iter().collect();
            let mean = mean_row(n, Method::Structured.tag(), cfg.seed, &refs);
            records.extend(trials);
            records.push(mean);
        }
    }
    Ok(records)
}

fn time_method(method: Method, m: &StructuredMatrix) -> anyhow::Result<(u64, u64)> {
    let n = m.n();
    let dense = m.to_dense();
    let rhs = vec![1.0; n];
    Ok(match method {
        Method::Structured => {
            let (r, c) = counted(|c| factorize_with::<f64>(m, c).and_then(|f| inverse_with(&f, c)));
            r?;
            let t = median_time_ns(|| factorize(m).and_then(|f| tricorner::inverse(&f)));
            (t, c.total())
        }
        Method::StructuredSolve => {
            let (r, c) =
                counted(|c| factorize_with::<ExtF64>(m, c).and_then(|f| solve_with(&f, &rhs, c)));
            r?;
            let t =
                median_time_ns(|| factorize_extended(m).and_then(|f| tricorner::solve(&f, &rhs)));
            (t, c.total())
        }
        Method::Lu => {
            let (r, c) = counted(|c| {
                oracle::lu_decompose_with(&dense, c).map(|lu| oracle::lu_invert_with(&lu, c))
            });
            r?;
            let t =
                median_time_ns(|| oracle::lu_decompose(&dense).map(|lu| oracle::lu_invert(&lu)));
            (t, c.total())
        }
        Method::GaussJordan => {
            let (r, c) = counted(|c| oracle::gauss_jordan_invert_with(&dense, c));
            r?;
            let t = median_time_ns(|| oracle::gauss_jordan_invert(&dense));
            (t, c.total())
        }
        Method::PinvNormalEq => {
            let (r, c) = counted(|c| oracle::pinv_normal_eq_with(&dense, c));
            r?;
            let t = median_time_ns(|| oracle::pinv_normal_eq(&dense));
            (t, c.total())
        }
    })
}

/// Wall-clock and operation counts per method, trial and order, followed
/// by one mean row per (order, method).
pub fn bench_time(cfg: &BenchConfig, methods: &[Method]) -> anyhow::Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for &n in &cfg.orders {
        for &method in methods {
            let mut rows = Vec::new();
            for trial in 0..cfg.trials {
                let seed = trial_seed(cfg.seed, n, trial);
                let m = StructuredMatrix::random_dominant(
                    n,
                    cfg.margin,
                    corners_for(n, cfg.corners),
                    seed,
                )?;
                let record = match time_method(method, &m) {
                    Ok((elapsed, flops)) => BenchRecord {
                        n,
                        method: method.tag(),
                        trial: Some(trial),
                        seed,
                        elapsed_ns: Some(elapsed),
                        flops: Some(flops),
                        eps_r: None,
                        overflow: false,
                    },
                    Err(e) if matches!(e.downcast_ref::<Error>(), Some(Error::Overflow { .. })) => {
                        BenchRecord {
                            n,
                            method: method.tag(),
                            trial: Some(trial),
                            seed,
                            elapsed_ns: None,
                            flops: None,
                            eps_r: None,
                            overflow: true,
                        }
                    }
                    Err(e) => return Err(e),
                };
                rows.push(record);
            }
            if !rows.is_empty() {
                let refs: Vec<&BenchRecord> = rows.iter().collect();
                let mean = mean_row(n, method.tag(), cfg.seed, &refs);
                records.extend(rows);
                records.push(mean);
            }
        }
    }
    Ok(records)
}

/// Log-log slopes of mean time and mean flops against `n` for each method,
/// over the mean rows without overflow.
pub fn slopes(records: &[BenchRecord]) -> Vec<(&'static str, Option<f64>, Option<f64>)> {
    let mut methods: Vec<&'static str> = records.iter().map(|r| r.method).collect();
    methods.dedup();
    methods.sort_unstable();
    methods.dedup();
    methods
        .into_iter()
        .map(|method| {
            let means: Vec<&BenchRecord> = records
                .iter()
                .filter(|r| r.method == method && r.trial.is_none() && !r.overflow)
                .collect();
            let fit = |pick: fn(&BenchRecord) -> Option<u64>| {
                let pts: Vec<(f64, f64)> = means
                    .iter()
                    .filter_map(|r| pick(r).map(|v| (r.n as f64, v as f64)))
                    .collect();
                (pts.len() >= 2).then(|| loglog_slope(&pts))
            };
            (method, fit(|r| r.elapsed_ns), fit(|r| r.flops))
        })
        .collect()
}

/// Operation counts of factorization and solve per order.
#[derive(Clone, Debug, PartialEq)]
pub struct FlopRow {
    pub n: usize,
    pub factorize: u64,
    pub solve: u64,
}

impl FlopRow {
    /// Excess of the factorization count over the `7n - 8` budget.
    pub fn excess_over_budget(&self) -> i64 {
        self.factorize as i64 - (7 * self.n as i64 - 8)
    }
}

pub fn flop_table(
    orders: &[usize],
    margin: f64,
    corners: Corners,
    seed: u64,
) -> anyhow::Result<Vec<FlopRow>> {
    let mut rows = Vec::new();
    for &n in orders {
        let m = StructuredMatrix::random_dominant(n, margin, corners_for(n, corners), seed)?;
        let (f, fc) = counted(|c| factorize_with::<ExtF64>(&m, c));
        let f = f?;
        let (s, sc) = counted(|c| solve_with(&f, &vec![1.0; n], c));
        s?;
        rows.push(FlopRow {
            n,
            factorize: fc.total(),
            solve: sc.total(),
        });
    }
    Ok(rows)
}
