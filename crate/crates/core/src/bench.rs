//! Random instances and the ancilla-count and control-precision sweeps.
//!
//! Every instance is generated from `(seed, n, lambda, index)` alone, so the
//! sweeps can run in parallel and still produce byte-identical CSV.

use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ancilla::DEFAULT_NODE_BUDGET;
use crate::compile::{plan_cubic, Strategy};
use crate::error::{Error, Result};
use crate::gadget::{apply_plan, GadgetMode};
use crate::poly::{control_precision, Monomial, OffsetPolicy, Polynomial, DEFAULT_ENUMERATION_CAP};
use crate::verify::verify_reduction;

pub const CSV_HEADER: &str =
    "n,lambda,strategy,gadget,mean_ancilla,mean_precision_increase_pct,proven_optimal_frac,mean_wall_ms";

/// Env var capping the number of worker threads.
pub const THREADS_ENV: &str = "PUBO_FORGE_THREADS";

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub n: u32,
    /// Cubic term counts to sweep.
    pub lambdas: Vec<u64>,
    /// Add every quadratic term.
    pub include_quadratic_layer: bool,
    pub coeff_min: i64,
    pub coeff_max: i64,
    pub instances: u32,
    pub seed: u64,
    pub strategies: Vec<Strategy>,
    pub gadgets: Vec<GadgetMode>,
    pub ilp_budget: u64,
    /// Fraction of instances checked by the brute-force oracle.
    pub verify_fraction: f64,
    pub verify_cap: usize,
    /// Fill the wall-time column. Off by default so output is reproducible.
    pub record_timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            n: 6,
            lambdas: vec![1, 5, 10, 20],
            include_quadratic_layer: false,
            coeff_min: -8,
            coeff_max: 8,
            instances: 20,
            seed: 0,
            strategies: vec![Strategy::MinAncilla, Strategy::ReduceMin],
            gadgets: vec![GadgetMode::SingleAncilla],
            ilp_budget: DEFAULT_NODE_BUDGET,
            verify_fraction: 0.05,
            verify_cap: DEFAULT_ENUMERATION_CAP,
            record_timing: false,
        }
    }
}

pub fn choose3(n: u64) -> u64 {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// `points` values spread evenly over `1..=C(n,3)`, rounded, deduplicated.
pub fn lambda_grid(n: u32, points: u32) -> Vec<u64> {
    let top = choose3(n as u64);
    if top == 0 || points == 0 {
        return Vec::new();
    }
    if points == 1 {
        return vec![top];
    }
    let mut grid: Vec<u64> = (0..points as u64)
        .map(|i| 1 + ((top - 1) * i + (points as u64 - 1) / 2) / (points as u64 - 1))
        .collect();
    grid.dedup();
    grid
}

impl BenchConfig {
    /// Ancilla-count sweep at desk scale.
    pub fn ancilla_preset() -> Self {
        BenchConfig {
            n: 8,
            lambdas: lambda_grid(8, 12),
            instances: 100,
            ..BenchConfig::default()
        }
    }

    /// Control-precision sweep: eleven variables with every quadratic term.
    pub fn precision_preset() -> Self {
        BenchConfig {
            n: 11,
            lambdas: vec![10, 20, 30, 40, 50, 60, 70, 80],
            include_quadratic_layer: true,
            instances: 100,
            strategies: vec![Strategy::MinPrecision, Strategy::Arbitrary],
            gadgets: vec![GadgetMode::SingleAncilla, GadgetMode::TripleAncilla],
            ..BenchConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(3..=63).contains(&self.n) {
            return bad(format!("n must be in 3..=63, got {}", self.n));
        }
        let top = choose3(self.n as u64);
        if let Some(l) = self.lambdas.iter().find(|&&l| l > top) {
            return bad(format!("lambda {l} exceeds C({}, 3) = {top}", self.n));
        }
        if self.coeff_min > self.coeff_max || (self.coeff_min == 0 && self.coeff_max == 0) {
            return bad(format!(
                "coefficient range [{}, {}] has no nonzero value",
                self.coeff_min, self.coeff_max
            ));
        }
        if self.instances == 0 {
            return bad("instances must be positive".into());
        }
        if self.strategies.is_empty() || self.gadgets.is_empty() {
            return bad("need at least one strategy and one gadget".into());
        }
        if !(0.0..=1.0).contains(&self.verify_fraction) {
            return bad(format!(
                "verify fraction {} outside [0, 1]",
                self.verify_fraction
            ));
        }
        Ok(())
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn instance_seed(config: &BenchConfig, lambda: u64, index: u32) -> u64 {
    splitmix(splitmix(splitmix(config.seed) ^ ((config.n as u64) << 40 | lambda)) ^ index as u64)
}

fn draw_coeff(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> i64 {
    if lo > 0 || hi < 0 {
        return rng.gen_range(lo..=hi);
    }
    // skip zero by shifting the nonnegative half up
    let v = rng.gen_range(lo..hi);
    if v >= 0 {
        v + 1
    } else {
        v
    }
}

/// Instance `index` of the sweep point `lambda`: `lambda` distinct cubic
/// terms sampled without replacement, then every quadratic term if the
/// layer is on. Coefficients are uniform on the nonzero values of the range.
pub fn random_pubo(config: &BenchConfig, lambda: u64, index: u32) -> Result<Polynomial> {
    let n = config.n;
    let top = choose3(n as u64);
    if lambda > top {
        return Err(Error::InvalidArgument(format!(
            "lambda {lambda} exceeds C({n}, 3) = {top}"
        )));
    }
    let mut triples = Vec::with_capacity(top as usize);
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                triples.push([i, j, k]);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(config, lambda, index));
    let mut picked = sample(&mut rng, top as usize, lambda as usize).into_vec();
    picked.sort_unstable();
    let mut poly = Polynomial::new(n);
    for t in picked {
        let c = draw_coeff(&mut rng, config.coeff_min, config.coeff_max);
        poly.add_term(Monomial::comp(&triples[t]), c)?;
    }
    if config.include_quadratic_layer {
        for i in 1..=n {
            for j in i + 1..=n {
                let c = draw_coeff(&mut rng, config.coeff_min, config.coeff_max);
                poly.add_term(Monomial::comp(&[i, j]), c)?;
            }
        }
    }
    Ok(poly)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub n: u32,
    pub lambda: u64,
    pub index: u32,
    pub strategy: Strategy,
    pub gadget: GadgetMode,
    pub ancilla_count: usize,
    pub precision_before: Option<u64>,
    pub precision_after: Option<u64>,
    pub precision_increase_pct: f64,
    /// Only set by the exact strategy.
    pub proven_optimal: Option<bool>,
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchOutcome {
    pub records: Vec<BenchRecord>,
    pub csv: String,
    pub verified: usize,
    /// Instances over the oracle cap that were selected but not checked.
    pub verify_skipped: usize,
    pub verification_failures: Vec<String>,
}

/// Run `f` on a pool limited by the thread env var, if set.
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let k: usize = v.trim().parse().ok().filter(|k| *k > 0).ok_or_else(|| {
                Error::InvalidArgument(format!("{THREADS_ENV}={v} is not a positive integer"))
            })?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

fn selected_for_verification(index: u32, fraction: f64) -> bool {
    ((index as f64 + 1.0) * fraction).floor() > (index as f64 * fraction).floor()
}

struct InstanceResult {
    records: Vec<BenchRecord>,
    verified: usize,
    skipped: usize,
    failures: Vec<String>,
}

fn run_instance(config: &BenchConfig, lambda: u64, index: u32) -> Result<InstanceResult> {
    let poly = random_pubo(config, lambda, index)?;
    let before = match control_precision(&poly, OffsetPolicy::Include) {
        Ok(r) => Some(r.control_precision),
        Err(Error::EmptyPolynomial) => None,
        Err(e) => return Err(e),
    };
    let check = selected_for_verification(index, config.verify_fraction);
    let mut out = InstanceResult {
        records: Vec::new(),
        verified: 0,
        skipped: 0,
        failures: Vec::new(),
    };
    let plan_seed = splitmix(instance_seed(config, lambda, index));
    for &strategy in &config.strategies {
        for &gadget in &config.gadgets {
            let start = Instant::now();
            let (plan, ilp) = plan_cubic(&poly, strategy, gadget, config.ilp_budget, plan_seed)?;
            let reduced = apply_plan(&poly, &plan)?;
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            let after = match control_precision(&reduced.quadratic, OffsetPolicy::Include) {
                Ok(r) => Some(r.control_precision),
                Err(Error::EmptyPolynomial) => None,
                Err(e) => return Err(e),
            };
            let pct = match (before, after) {
                (Some(b), Some(a)) if b > 0 => 100.0 * (a as f64 - b as f64) / b as f64,
                _ => 0.0,
            };
            if check {
                match verify_reduction(&poly, &reduced, config.verify_cap) {
                    Ok(report) if report.passed() => out.verified += 1,
                    Ok(report) => out.failures.push(format!(
                        "n={} lambda={lambda} index={index} strategy={} gadget={}: {}",
                        config.n,
                        strategy.bench_name(),
                        gadget.name(),
                        report.to_string().trim_end().replace('\n', "; ")
                    )),
                    Err(Error::TooManyVariables { .. }) => out.skipped += 1,
                    Err(e) => return Err(e),
                }
            }
            out.records.push(BenchRecord {
                n: config.n,
                lambda,
                index,
                strategy,
                gadget,
                ancilla_count: reduced.ancilla_count(),
                precision_before: before,
                precision_after: after,
                precision_increase_pct: pct,
                proven_optimal: ilp.map(|s| s.proven_optimal),
                wall_ms: config.record_timing.then_some(wall_ms),
            });
        }
    }
    Ok(out)
}

fn run_sweep(config: &BenchConfig, preamble: &[String]) -> Result<BenchOutcome> {
    config.validate()?;
    let work: Vec<(u64, u32)> = config
        .lambdas
        .iter()
        .flat_map(|&l| (0..config.instances).map(move |i| (l, i)))
        .collect();
    let results: Vec<InstanceResult> = with_thread_cap(|| {
        work.par_iter()
            .map(|&(l, i)| run_instance(config, l, i))
            .collect::<Result<Vec<_>>>()
    })??;

    let mut outcome = BenchOutcome::default();
    for r in results {
        outcome.records.extend(r.records);
        outcome.verified += r.verified;
        outcome.verify_skipped += r.skipped;
        outcome.verification_failures.extend(r.failures);
    }
    let mut csv = String::new();
    for line in preamble {
        csv.push_str(&format!("# {line}\n"));
    }
    csv.push_str(&format!(
        "# n={} instances={} seed={} coeffs=[{},{}] quadratic_layer={}\n",
        config.n,
        config.instances,
        config.seed,
        config.coeff_min,
        config.coeff_max,
        config.include_quadratic_layer
    ));
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for &lambda in &config.lambdas {
        for &strategy in &config.strategies {
            for &gadget in &config.gadgets {
                let rows: Vec<&BenchRecord> = outcome
                    .records
                    .iter()
                    .filter(|r| r.lambda == lambda && r.strategy == strategy && r.gadget == gadget)
                    .collect();
                csv.push_str(&summary_row(config.n, lambda, strategy, gadget, &rows));
            }
        }
    }
    outcome.csv = csv;
    Ok(outcome)
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

fn summary_row(
    n: u32,
    lambda: u64,
    strategy: Strategy,
    gadget: GadgetMode,
    rows: &[&BenchRecord],
) -> String {
    let ancilla = mean(rows.iter().map(|r| r.ancilla_count as f64));
    let pct = mean(rows.iter().map(|r| r.precision_increase_pct));
    let proven = if strategy == Strategy::MinAncilla {
        format!(
            "{:.4}",
            mean(rows.iter().map(|r| if r.proven_optimal == Some(true) {
                1.0
            } else {
                0.0
            }))
        )
    } else {
        String::new()
    };
    let wall = if rows.iter().all(|r| r.wall_ms.is_some()) && !rows.is_empty() {
        format!("{:.3}", mean(rows.iter().filter_map(|r| r.wall_ms)))
    } else {
        String::new()
    };
    format!(
        "{n},{lambda},{},{},{ancilla:.4},{pct:.4},{proven},{wall}\n",
        strategy.bench_name(),
        gadget.name()
    )
}

/// Mean ancilla counts per sweep point for each strategy.
pub fn run_ancilla_experiment(config: &BenchConfig) -> Result<BenchOutcome> {
    run_sweep(
        config,
        &["mean ancilla count per cubic term count".to_string()],
    )
}

/// Mean percent increase of control precision per sweep point.
pub fn run_precision_experiment(config: &BenchConfig) -> Result<BenchOutcome> {
    run_sweep(
        config,
        &[
            "mean percent increase of control precision per cubic term count".to_string(),
            "threshold_pct=100: a doubling of control precision exceeds current annealer resolution".to_string(),
        ],
    )
}
