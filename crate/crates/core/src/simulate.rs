//! Monte-Carlo random-walk oracle: simulates walks until absorption and
//! estimates expected visits, hitting time, hitting cost, and absorption
//! frequencies, each with a standard error.
//!
//! Walks are embarrassingly parallel. Every walk draws from its own
//! counter-derived stream, and per-block partial sums are merged in block
//! order, so results are bit-identical regardless of thread count.

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::TransitionMatrix;
use crate::linalg::DenseMatrix;
use crate::rng::SplitMix64;

/// Walks are truncated at this many steps unless configured otherwise.
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;
/// Minimum number of walks for a reported estimate.
pub const MIN_WALKS: u64 = 1_000;
/// Runs fail when more than this fraction of walks hits the step cap.
pub const MAX_TRUNCATION_RATE: f64 = 0.001;

const BLOCK: u64 = 4096;

#[derive(Debug, Error)]
pub enum SimulateError {
    #[error("num_walks must be at least {MIN_WALKS}, got {0}")]
    TooFewWalks(u64),
    #[error("start index {0} out of range")]
    InvalidStart(usize),
    #[error("target index {0} out of range")]
    InvalidTarget(usize),
    #[error("target set must not be empty")]
    EmptyTargets,
    #[error(
        "targets miss recurrent class {class:?}; walks from there would never terminate"
    )]
    UncoveredRecurrentClass { class: Vec<usize> },
    #[error("{truncated} of {total} walks exceeded the step cap (allowed rate {MAX_TRUNCATION_RATE})")]
    ExcessiveTruncation { truncated: u64, total: u64 },
}

#[derive(Clone, Copy, Debug)]
pub struct WalkConfig {
    pub num_walks: u64,
    pub rng_seed: u64,
    pub max_steps: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            num_walks: 10_000,
            rng_seed: 0,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

/// Mean and standard error of one simulated quantity.
#[derive(Clone, Copy, Debug)]
pub struct SimulationEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub num_walks: u64,
}

impl SimulationEstimate {
    fn from_sums(sum: f64, sum_sq: f64, n: u64) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let variance = if n > 1 {
            ((sum_sq - sum * sum / nf) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            mean,
            standard_error: (variance / nf).sqrt(),
            num_walks: n,
        }
    }
}

/// Full set of estimates for one (start, target-set) run.
#[derive(Clone, Debug)]
pub struct SimulationReport {
    pub start: usize,
    pub targets: Vec<usize>,
    /// Expected visits per transient node, in `transient` order.
    pub transient: Vec<usize>,
    pub visits: Vec<SimulationEstimate>,
    pub hitting_time: SimulationEstimate,
    /// Present when a cost matrix was supplied.
    pub hitting_cost: Option<SimulationEstimate>,
    /// First-absorbed frequency per target, in `targets` order.
    pub absorption: Vec<SimulationEstimate>,
    pub truncated_walks: u64,
}

struct BlockSums {
    visits_sum: Vec<f64>,
    visits_sq: Vec<f64>,
    steps_sum: f64,
    steps_sq: f64,
    cost_sum: f64,
    cost_sq: f64,
    absorbed: Vec<u64>,
    completed: u64,
    truncated: u64,
}

impl BlockSums {
    fn new(n: usize, k: usize) -> Self {
        Self {
            visits_sum: vec![0.0; n],
            visits_sq: vec![0.0; n],
            steps_sum: 0.0,
            steps_sq: 0.0,
            cost_sum: 0.0,
            cost_sq: 0.0,
            absorbed: vec![0; k],
            completed: 0,
            truncated: 0,
        }
    }

    fn merge(&mut self, other: &BlockSums) {
        for (a, b) in self.visits_sum.iter_mut().zip(&other.visits_sum) {
            *a += b;
        }
        for (a, b) in self.visits_sq.iter_mut().zip(&other.visits_sq) {
            *a += b;
        }
        self.steps_sum += other.steps_sum;
        self.steps_sq += other.steps_sq;
        self.cost_sum += other.cost_sum;
        self.cost_sq += other.cost_sq;
        for (a, b) in self.absorbed.iter_mut().zip(&other.absorbed) {
            *a += b;
        }
        self.completed += other.completed;
        self.truncated += other.truncated;
    }
}

/// Alias tables for O(1) sampling of each row of `P`.
struct AliasSampler {
    n: usize,
    prob: Vec<f64>,
    alias: Vec<usize>,
}

impl AliasSampler {
    fn build(p: &TransitionMatrix) -> Self {
        let n = p.n();
        let mut prob = vec![0.0; n * n];
        let mut alias = vec![0usize; n * n];
        let mut small = Vec::with_capacity(n);
        let mut large = Vec::with_capacity(n);
        let mut scaled = vec![0.0; n];
        for row in 0..n {
            small.clear();
            large.clear();
            let src = p.matrix().row(row);
            for (j, &v) in src.iter().enumerate() {
                scaled[j] = v * n as f64;
                if scaled[j] < 1.0 {
                    small.push(j);
                } else {
                    large.push(j);
                }
            }
            let base = row * n;
            while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
                small.pop();
                prob[base + s] = scaled[s];
                alias[base + s] = l;
                scaled[l] = (scaled[l] + scaled[s]) - 1.0;
                if scaled[l] < 1.0 {
                    large.pop();
                    small.push(l);
                }
            }
            for &l in &large {
                prob[base + l] = 1.0;
                alias[base + l] = l;
            }
            for &s in &small {
                prob[base + s] = 1.0;
                alias[base + s] = s;
            }
        }
        Self { n, prob, alias }
    }

    #[inline]
    fn sample(&self, row: usize, rng: &mut SplitMix64) -> usize {
        let j = rng.next_below(self.n);
        let k = row * self.n + j;
        if rng.next_f64() < self.prob[k] {
            j
        } else {
            self.alias[k]
        }
    }
}

/// Simulates `cfg.num_walks` walks from `start` until a target absorbs
/// them, returning estimates for every stochastic-form metric.
pub fn simulate_walks(
    p: &TransitionMatrix,
    start: usize,
    targets: &[usize],
    costs: Option<&DenseMatrix>,
    cfg: &WalkConfig,
) -> Result<SimulationReport, SimulateError> {
    let n = p.n();
    if start >= n {
        return Err(SimulateError::InvalidStart(start));
    }
    if targets.is_empty() {
        return Err(SimulateError::EmptyTargets);
    }
    let mut targets = targets.to_vec();
    targets.sort_unstable();
    targets.dedup();
    if let Some(&bad) = targets.iter().find(|&&t| t >= n) {
        return Err(SimulateError::InvalidTarget(bad));
    }
    if cfg.num_walks < MIN_WALKS {
        return Err(SimulateError::TooFewWalks(cfg.num_walks));
    }
    for class in p.recurrent_classes() {
        if !class.iter().any(|m| targets.binary_search(m).is_ok()) {
            return Err(SimulateError::UncoveredRecurrentClass { class });
        }
    }
    let mut is_target = vec![false; n];
    let mut target_slot = vec![usize::MAX; n];
    for (i, &t) in targets.iter().enumerate() {
        is_target[t] = true;
        target_slot[t] = i;
    }
    let transient: Vec<usize> = (0..n).filter(|i| !is_target[*i]).collect();

    let sampler = AliasSampler::build(p);
    let blocks = cfg.num_walks.div_ceil(BLOCK);
    let partials: Vec<BlockSums> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK;
            let hi = ((b + 1) * BLOCK).min(cfg.num_walks);
            let mut sums = BlockSums::new(n, targets.len());
            let mut counts = vec![0u64; n];
            let mut touched: Vec<usize> = Vec::with_capacity(64);
            for w in lo..hi {
                let mut rng = SplitMix64::stream(cfg.rng_seed, w);
                let mut x = start;
                let mut steps = 0u64;
                let mut cost = 0.0;
                let mut truncated = false;
                while !is_target[x] {
                    if counts[x] == 0 {
                        touched.push(x);
                    }
                    counts[x] += 1;
                    if steps >= cfg.max_steps {
                        truncated = true;
                        break;
                    }
                    let next = sampler.sample(x, &mut rng);
                    if let Some(w) = costs {
                        cost += w.get(x, next);
                    }
                    x = next;
                    steps += 1;
                }
                if truncated {
                    sums.truncated += 1;
                } else {
                    for &node in &touched {
                        let c = counts[node] as f64;
                        sums.visits_sum[node] += c;
                        sums.visits_sq[node] += c * c;
                    }
                    let sf = steps as f64;
                    sums.steps_sum += sf;
                    sums.steps_sq += sf * sf;
                    sums.cost_sum += cost;
                    sums.cost_sq += cost * cost;
                    sums.absorbed[target_slot[x]] += 1;
                    sums.completed += 1;
                }
                for &node in &touched {
                    counts[node] = 0;
                }
                touched.clear();
            }
            sums
        })
        .collect();

    let mut total = BlockSums::new(n, targets.len());
    for part in &partials {
        total.merge(part);
    }
    if (total.truncated as f64) > MAX_TRUNCATION_RATE * (cfg.num_walks as f64) {
        return Err(SimulateError::ExcessiveTruncation {
            truncated: total.truncated,
            total: cfg.num_walks,
        });
    }
    let m = total.completed;
    let visits = transient
        .iter()
        .map(|&node| {
            SimulationEstimate::from_sums(total.visits_sum[node], total.visits_sq[node], m)
        })
        .collect();
    let absorption = (0..targets.len())
        .map(|i| {
            let s = total.absorbed[i] as f64;
            // Indicator variable: sum of squares equals the sum.
            SimulationEstimate::from_sums(s, s, m)
        })
        .collect();
    Ok(SimulationReport {
        start,
        targets,
        transient,
        visits,
        hitting_time: SimulationEstimate::from_sums(total.steps_sum, total.steps_sq, m),
        hitting_cost: costs
            .map(|_| SimulationEstimate::from_sums(total.cost_sum, total.cost_sq, m)),
        absorption,
        truncated_walks: total.truncated,
    })
}
