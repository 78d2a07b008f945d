//! Seeded Monte Carlo walkers for stationary frequencies and hitting times.
//!
//! Trial `i` of a hitting run draws from ChaCha8 seeded with `seed` on stream
//! `i`, so results do not depend on how trials are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::walks::TransitionMatrix;

pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;
/// Hitting runs with a larger truncated share give no point estimate.
pub const MAX_TRUNCATION_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimConfig {
    pub seed: u64,
    pub trials: u64,
    pub max_steps: u64,
    pub burn_in: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { seed: 0, trials: 100_000, max_steps: DEFAULT_MAX_STEPS, burn_in: 1_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    Stationary,
    Hitting,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RngInfo {
    pub algorithm: &'static str,
    pub implementation: &'static str,
    pub seed: u64,
    pub streams: &'static str,
}

fn rng_info(seed: u64, streams: &'static str) -> RngInfo {
    RngInfo { algorithm: "ChaCha8", implementation: "rand_chacha 0.9", seed, streams }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub mode: SimMode,
    /// Per-node frequencies (stationary) or the single mean hitting time.
    pub estimates: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Steps counted (stationary) or trials run (hitting).
    pub samples: u64,
    pub truncated: u64,
    pub truncation_fraction: f64,
    /// Mean over trials that reached the target.
    pub mean_completed: Option<f64>,
    /// Mean with truncated trials counted at the cap, a lower bound.
    pub mean_capped: Option<f64>,
    pub point_estimate_refused: bool,
    pub rng: RngInfo,
}

/// Sparse inverse-CDF sampler over the rows of `P`.
struct Sampler {
    targets: Vec<Vec<usize>>,
    cdf: Vec<Vec<f64>>,
}

impl Sampler {
    fn new(p: &TransitionMatrix) -> Result<Sampler> {
        let n = p.n();
        let mut targets = Vec::with_capacity(n);
        let mut cdf = Vec::with_capacity(n);
        for i in 0..n {
            let mut t = Vec::new();
            let mut c = Vec::new();
            let mut acc = 0.0;
            for j in 0..n {
                let v = p.p[(i, j)];
                if v > 0.0 {
                    acc += v;
                    t.push(j);
                    c.push(acc);
                }
            }
            match c.last_mut() {
                Some(last) => *last = 1.0,
                None => return Err(Error::InvalidParams(format!("row {i} of the transition matrix is empty"))),
            }
            targets.push(t);
            cdf.push(c);
        }
        Ok(Sampler { targets, cdf })
    }

    fn step<R: Rng>(&self, from: usize, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let c = &self.cdf[from];
        let k = c.partition_point(|&x| x <= u).min(c.len() - 1);
        self.targets[from][k]
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// One trajectory from `start`: `burn_in` discarded steps, then `max_steps`
/// counted ones split into `floor(sqrt(max_steps))` batches for the standard
/// errors. Steps beyond a whole number of batches are not counted.
pub fn simulate_stationary(p: &TransitionMatrix, start: usize, cfg: SimConfig) -> Result<SimResult> {
    let n = p.n();
    if start >= n {
        return Err(Error::InvalidParams(format!("start node {start} out of range")));
    }
    let batches = (cfg.max_steps as f64).sqrt().floor() as u64;
    if batches < 2 {
        return Err(Error::InvalidParams(format!("need at least 4 counted steps, got {}", cfg.max_steps)));
    }
    let len = cfg.max_steps / batches;
    let sampler = Sampler::new(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut at = start;
    for _ in 0..cfg.burn_in {
        at = sampler.step(at, &mut rng);
    }
    let mut per_batch = vec![vec![0.0; batches as usize]; n];
    let mut counts = vec![0u64; n];
    for b in 0..batches as usize {
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..len {
            at = sampler.step(at, &mut rng);
            counts[at] += 1;
        }
        for i in 0..n {
            per_batch[i][b] = counts[i] as f64 / len as f64;
        }
    }
    let (estimates, std_errors) = per_batch.iter().map(|xs| mean_se(xs)).unzip();
    Ok(SimResult {
        mode: SimMode::Stationary,
        estimates,
        std_errors,
        samples: batches * len,
        truncated: 0,
        truncation_fraction: 0.0,
        mean_completed: None,
        mean_capped: None,
        point_estimate_refused: false,
        rng: rng_info(cfg.seed, "stream 0"),
    })
}

/// `trials` independent walks from `source` until first arrival at `target`,
/// each capped at `max_steps`.
pub fn simulate_hitting(p: &TransitionMatrix, source: usize, target: usize, cfg: SimConfig) -> Result<SimResult> {
    let n = p.n();
    if source >= n || target >= n {
        return Err(Error::InvalidParams(format!("nodes ({source}, {target}) out of range")));
    }
    if source == target {
        return Err(Error::InvalidParams("source and target coincide".into()));
    }
    if cfg.trials == 0 || cfg.max_steps == 0 {
        return Err(Error::InvalidParams("trials and max_steps must be positive".into()));
    }
    let sampler = Sampler::new(p)?;
    let steps: Vec<Option<u64>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(trial);
            let mut at = source;
            for k in 1..=cfg.max_steps {
                at = sampler.step(at, &mut rng);
                if at == target {
                    return Some(k);
                }
            }
            None
        })
        .collect();

    let done: Vec<f64> = steps.iter().flatten().map(|&k| k as f64).collect();
    let truncated = cfg.trials - done.len() as u64;
    let frac = truncated as f64 / cfg.trials as f64;
    let capped: Vec<f64> = steps.iter().map(|s| s.unwrap_or(cfg.max_steps) as f64).collect();
    let (mean_completed, se) = if done.is_empty() { (None, f64::NAN) } else { let (m, s) = mean_se(&done); (Some(m), s) };
    let refused = frac > MAX_TRUNCATION_FRACTION || mean_completed.is_none();
    let (estimates, std_errors) = if refused { (vec![], vec![]) } else { (vec![mean_completed.unwrap_or(f64::NAN)], vec![se]) };
    Ok(SimResult {
        mode: SimMode::Hitting,
        estimates,
        std_errors,
        samples: cfg.trials,
        truncated,
        truncation_fraction: frac,
        mean_completed,
        mean_capped: Some(mean_se(&capped).0),
        point_estimate_refused: refused,
        rng: rng_info(cfg.seed, "stream = trial index"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::walks::turw_transition;

    fn k3() -> TransitionMatrix {
        turw_transition(&Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()).unwrap()
    }

    #[test]
    fn stationary_on_triangle() {
        let cfg = SimConfig { seed: 11, trials: 1, max_steps: 100_000, burn_in: 100 };
        let r = simulate_stationary(&k3(), 0, cfg).unwrap();
        assert_eq!(r.samples, 316 * 316);
        for (e, s) in r.estimates.iter().zip(&r.std_errors) {
            assert!((e - 1.0 / 3.0).abs() < 4.0 * s);
        }
        assert!((r.estimates.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_steps_rejected() {
        let cfg = SimConfig { max_steps: 0, ..SimConfig::default() };
        assert!(simulate_stationary(&k3(), 0, cfg).is_err());
        assert!(simulate_hitting(&k3(), 0, 1, cfg).is_err());
        assert!(simulate_hitting(&k3(), 1, 1, SimConfig::default()).is_err());
    }

    #[test]
    fn hitting_is_deterministic_and_close() {
        let cfg = SimConfig { seed: 3, trials: 20_000, max_steps: 1_000, burn_in: 0 };
        let a = simulate_hitting(&k3(), 0, 1, cfg).unwrap();
        let b = simulate_hitting(&k3(), 0, 1, cfg).unwrap();
        assert_eq!(a, b);
        assert!((a.estimates[0] - 2.0).abs() < 4.0 * a.std_errors[0]);
        assert_eq!(a.truncated, 0);
    }

    #[test]
    fn truncation_refuses_estimate() {
        let cfg = SimConfig { seed: 3, trials: 1_000, max_steps: 1, burn_in: 0 };
        let r = simulate_hitting(&k3(), 0, 1, cfg).unwrap();
        assert!(r.truncated > 0);
        assert!(r.point_estimate_refused && r.estimates.is_empty());
        assert_eq!(r.mean_capped, Some(1.0));
        assert_eq!(r.mean_completed, Some(1.0));
    }
}
