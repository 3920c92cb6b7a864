//! Simulated measurement records, estimators and Cramér-Rao benchmarking.
//!
//! Outcomes of the binary measurement `{Π, 𝕀 − Π}` are kept as counts, which
//! are sufficient for the Bernoulli likelihood. Random draws come from ChaCha8
//! keyed by the run seed, with the batch index as stream id and the draw
//! index as the block counter, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{Domain, TwoLevelModel};
use crate::metrology::{thermal_fisher, thermal_outcome_probability, thermal_qfi, MeasurementDirection};

/// `n_success` outcomes `Π` out of `m_total` shots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub m_total: u64,
    pub n_success: u64,
    pub seed: u64,
    pub q_true: f64,
}

impl OutcomeRecord {
    /// A record of observed counts (seed and `q_true` unknown).
    pub fn observed(m_total: u64, n_success: u64) -> Result<Self> {
        if n_success > m_total {
            return Err(Error::InvalidInput(format!(
                "n_success = {n_success} exceeds m_total = {m_total}"
            )));
        }
        Ok(Self {
            m_total,
            n_success,
            seed: 0,
            q_true: f64::NAN,
        })
    }

    pub fn frequency(&self) -> f64 {
        self.n_success as f64 / self.m_total as f64
    }
}

fn check_probability(q: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(q))
    }
}

fn sample_stream(q: f64, m: u64, seed: u64, stream: u64) -> Result<OutcomeRecord> {
    check_probability(q)?;
    if m == 0 {
        return Err(Error::InvalidInput("need at least one measurement".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let n_success = Binomial::new(m, q)
        .map_err(|e| Error::InvalidInput(e.to_string()))?
        .sample(&mut rng);
    Ok(OutcomeRecord {
        m_total: m,
        n_success,
        seed,
        q_true: q,
    })
}

/// Draws `n_success ~ Binomial(m, q)` deterministically from `seed`.
pub fn sample_outcomes(q: f64, m: u64, seed: u64) -> Result<OutcomeRecord> {
    sample_stream(q, m, seed, 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorMethod {
    #[default]
    Mle,
    /// Posterior mean under a uniform prior.
    Bayes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorConfig {
    pub method: EstimatorMethod,
    pub search_interval: Domain,
    pub grid_points: usize,
    pub tolerance: f64,
}

impl EstimatorConfig {
    pub fn new(method: EstimatorMethod, search_interval: Domain) -> Self {
        Self {
            method,
            search_interval,
            grid_points: 1025,
            tolerance: 1e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.search_interval.is_finite() {
            return Err(Error::InvalidInput("search interval must be finite".into()));
        }
        if self.grid_points < 64 {
            return Err(Error::InvalidInput(format!(
                "grid_points must be >= 64, got {}",
                self.grid_points
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput("tolerance must be > 0".into()));
        }
        Ok(())
    }
}

/// Outcome probability `q_β(λ)` on a λ grid over the search interval.
struct LikelihoodGrid {
    lambdas: Vec<f64>,
    qs: Vec<f64>,
}

impl LikelihoodGrid {
    fn new<M: TwoLevelModel + ?Sized>(
        model: &M,
        r: &MeasurementDirection,
        beta: f64,
        config: &EstimatorConfig,
    ) -> Result<Self> {
        config.validate()?;
        let dom = model.domain();
        let Domain { lo, hi } = config.search_interval;
        if lo < dom.lo || hi > dom.hi {
            return Err(Error::InvalidInput(format!(
                "search interval [{lo}, {hi}] leaves the model domain [{}, {}]",
                dom.lo, dom.hi
            )));
        }
        let n = config.grid_points;
        let lambdas: Vec<f64> = (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect();
        let qs = lambdas
            .iter()
            .map(|&l| thermal_outcome_probability(&model.coefficients(l), beta, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { lambdas, qs })
    }

    /// +1 or −1 when `q_β` is strictly monotone on the grid.
    fn monotonicity(&self) -> Result<f64> {
        let sign = (self.qs[1] - self.qs[0]).signum();
        let strict = self
            .qs
            .windows(2)
            .all(|w| (w[1] - w[0]) * sign > 0.0);
        if strict {
            Ok(sign)
        } else {
            Err(Error::NonIdentifiable(
                "outcome probability is not strictly monotone on the search interval".into(),
            ))
        }
    }
}

/// Maximum-likelihood estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MleEstimate {
    pub value: f64,
    /// The observed frequency was outside `q_β` of the search interval and the
    /// nearest endpoint was returned.
    pub clamped: bool,
}

/// Solves `q_β(λ̂) = n/m` by bisection after checking `q_β` is monotone.
pub fn mle_estimate<M: TwoLevelModel + ?Sized>(
    model: &M,
    r: &MeasurementDirection,
    beta: f64,
    record: &OutcomeRecord,
    config: &EstimatorConfig,
) -> Result<MleEstimate> {
    let grid = LikelihoodGrid::new(model, r, beta, config)?;
    let sign = grid.monotonicity()?;
    mle_on_grid(&grid, sign, model, r, beta, record, config.tolerance)
}

fn mle_on_grid<M: TwoLevelModel + ?Sized>(
    grid: &LikelihoodGrid,
    sign: f64,
    model: &M,
    r: &MeasurementDirection,
    beta: f64,
    record: &OutcomeRecord,
    tolerance: f64,
) -> Result<MleEstimate> {
    if record.m_total == 0 {
        return Err(Error::InvalidInput("MLE needs at least one measurement".into()));
    }
    let f = record.frequency();
    let last = grid.qs.len() - 1;
    // orient so that q increases with the index
    let (q_first, q_last) = (grid.qs[0], grid.qs[last]);
    let (q_min, q_max) = if sign > 0.0 { (q_first, q_last) } else { (q_last, q_first) };
    if f <= q_min || f >= q_max {
        let at_min = f <= q_min;
        let value = if at_min == (sign > 0.0) { grid.lambdas[0] } else { grid.lambdas[last] };
        let exact = f == q_min || f == q_max;
        return Ok(MleEstimate {
            value,
            clamped: !exact,
        });
    }
    // grid cell holding the root
    let k = grid.qs.partition_point(|&q| (q - f) * sign < 0.0);
    let (mut a, mut b) = (grid.lambdas[k - 1], grid.lambdas[k]);
    let q = |l: f64| thermal_outcome_probability(&model.coefficients(l), beta, r);
    while b - a > tolerance {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if (q(mid)? - f) * sign < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(MleEstimate {
        value: 0.5 * (a + b),
        clamped: false,
    })
}

/// Posterior mean under a uniform prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BayesEstimate {
    pub mean: f64,
    /// More than 90% of the posterior mass sits on one grid node; refine the grid.
    pub concentrated: bool,
}

/// Grid posterior with trapezoidal quadrature and log-domain likelihood.
pub fn bayes_estimate<M: TwoLevelModel + ?Sized>(
    model: &M,
    r: &MeasurementDirection,
    beta: f64,
    record: &OutcomeRecord,
    config: &EstimatorConfig,
) -> Result<BayesEstimate> {
    let grid = LikelihoodGrid::new(model, r, beta, config)?;
    Ok(bayes_on_grid(&grid, record))
}

fn log_likelihood(q: f64, n: u64, m: u64) -> f64 {
    let k = (m - n) as f64;
    let n = n as f64;
    let term = |count: f64, p: f64| if count == 0.0 { 0.0 } else { count * p.ln() };
    term(n, q) + term(k, 1.0 - q)
}

fn bayes_on_grid(grid: &LikelihoodGrid, record: &OutcomeRecord) -> BayesEstimate {
    let ll: Vec<f64> = grid
        .qs
        .iter()
        .map(|&q| log_likelihood(q, record.n_success, record.m_total))
        .collect();
    let peak = ll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = ll.iter().map(|&v| (v - peak).exp()).collect();
    let mut mass = 0.0;
    let mut moment = 0.0;
    let mut node = vec![0.0; w.len()];
    for k in 0..w.len() - 1 {
        let half = 0.5 * (grid.lambdas[k + 1] - grid.lambdas[k]);
        node[k] += half * w[k];
        node[k + 1] += half * w[k + 1];
    }
    for (k, &nk) in node.iter().enumerate() {
        mass += nk;
        moment += nk * grid.lambdas[k];
    }
    let largest = node.iter().copied().fold(0.0, f64::max);
    BayesEstimate {
        mean: moment / mass,
        concentrated: largest > 0.9 * mass,
    }
}

/// Result of repeated simulated experiments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationReport {
    pub lambda_true: f64,
    pub q_true: f64,
    pub shots: u64,
    pub batches: usize,
    pub seed: u64,
    pub estimates: Vec<f64>,
    pub mean: f64,
    pub bias: f64,
    pub empirical_variance: f64,
    pub fisher: f64,
    pub qfi: f64,
    /// `1/(m·F_β)`.
    pub crb_classical: f64,
    /// `1/(m·H_β)`.
    pub crb_quantum: f64,
    /// Batches whose estimate hit the search-interval boundary or whose
    /// posterior was under-resolved.
    pub flagged_batches: Vec<usize>,
}

impl EstimationReport {
    pub fn variance_to_quantum_crb(&self) -> f64 {
        self.empirical_variance / self.crb_quantum
    }

    pub fn variance_to_classical_crb(&self) -> f64 {
        self.empirical_variance / self.crb_classical
    }
}

/// Runs `batches` experiments of `m` shots each, in parallel, and compares the
/// spread of the estimates with the Cramér-Rao bounds at `λ_true`.
#[allow(clippy::too_many_arguments)]
pub fn run_experiment<M: TwoLevelModel + ?Sized>(
    model: &M,
    lambda_true: f64,
    r: &MeasurementDirection,
    beta: f64,
    m: u64,
    batches: usize,
    seed: u64,
    config: &EstimatorConfig,
) -> Result<EstimationReport> {
    if batches < 2 {
        return Err(Error::InvalidInput("need at least two batches".into()));
    }
    let c = model.coefficients(lambda_true);
    let d = model.derivatives(lambda_true)?;
    let q_true = thermal_outcome_probability(&c, beta, r)?;
    let fisher = thermal_fisher(&c, &d, beta, r)?.value;
    let qfi = thermal_qfi(&c, &d, beta)?.total;

    let grid = LikelihoodGrid::new(model, r, beta, config)?;
    let sign = match config.method {
        EstimatorMethod::Mle => grid.monotonicity()?,
        EstimatorMethod::Bayes => 0.0,
    };
    if fisher == 0.0 {
        return Err(Error::NonIdentifiable(
            "measurement carries no information at lambda_true".into(),
        ));
    }

    let results: Vec<Result<(f64, bool)>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let record = sample_stream(q_true, m, seed, b as u64)?;
            match config.method {
                EstimatorMethod::Mle => mle_on_grid(&grid, sign, model, r, beta, &record, config.tolerance)
                    .map(|e| (e.value, e.clamped)),
                EstimatorMethod::Bayes => {
                    let e = bayes_on_grid(&grid, &record);
                    Ok((e.mean, e.concentrated))
                }
            }
            .map_err(|e| Error::Batch {
                index: b,
                source: Box::new(e),
            })
        })
        .collect();

    let mut estimates = Vec::with_capacity(batches);
    let mut flagged_batches = Vec::new();
    for (b, res) in results.into_iter().enumerate() {
        let (value, flag) = res?;
        if flag {
            flagged_batches.push(b);
        }
        estimates.push(value);
    }
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let empirical_variance = estimates.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(EstimationReport {
        lambda_true,
        q_true,
        shots: m,
        batches,
        seed,
        estimates,
        mean,
        bias: mean - lambda_true,
        empirical_variance,
        fisher,
        qfi,
        crb_classical: 1.0 / (m as f64 * fisher),
        crb_quantum: 1.0 / (m as f64 * qfi),
        flagged_batches,
    })
}
