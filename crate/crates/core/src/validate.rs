//! Self-validation suite: runs the oracle/analytic cross-checks and
//! reports observed values against their bounds.

use rand::Rng;
use rand::SeedableRng;
use serde::Serialize;

use crate::analytic::{conditional_moment_bounds, moment_bounds, renyi_entropy};
use crate::error::Result;
use crate::oracle::{
    conditional_guesswork_moment, distortion_guesswork_greedy, exact_guesswork_moment,
    failure_constrained_guesswork, failure_constrained_with_skips, moment_under_strategy,
    skip_types, type_mass, DiscreteDistribution, JointDistribution,
};
use crate::puf_model::Seed;

/// Knobs for the validation run.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationConfig {
    /// Random distributions get supports up to 2^max_support_bits.
    pub max_support_bits: u32,
    /// Number of random distributions for the sandwich check.
    pub num_distributions: usize,
    /// Moment orders exercised everywhere.
    pub rhos: Vec<f64>,
    /// Word length for the conditional (side-information) check.
    pub conditional_bits: u32,
    /// Largest tolerated gap between the finite-size conditional rate and
    /// its asymptotic limit. The finite-size rate sits well below the
    /// limit (the gap shrinks like log(m)/m), so this is a coarse guard.
    pub max_rate_gap: f64,
    pub seed: Seed,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            max_support_bits: 10,
            num_distributions: 120,
            rhos: vec![0.5, 1.0, 2.0],
            conditional_bits: 12,
            max_rate_gap: 0.25,
            seed: Seed(0),
        }
    }
}

/// One named check with what was observed and what bounded it.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub bound: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub config: ValidationConfig,
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

fn random_distribution(
    rng: &mut rand_chacha::ChaCha8Rng,
    max_bits: u32,
) -> Result<DiscreteDistribution> {
    let m = 1 + rng.random::<u32>() % max_bits;
    let n = 1usize << m;
    let mut probs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    // sprinkle zeros and ties so degenerate orderings get exercised
    if rng.random::<f64>() < 0.5 {
        let z = rng.random::<u32>() as usize % n;
        probs[z] = 0.0;
    }
    if n >= 4 && rng.random::<f64>() < 0.5 {
        let i = rng.random::<u32>() as usize % n;
        let j = rng.random::<u32>() as usize % n;
        probs[j] = probs[i];
    }
    let sum: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= sum;
    }
    DiscreteDistribution::from_probs(m, probs)
}

/// Run the full suite. Every check is exact or oracle-backed; a failing
/// check means an implementation bug or an intentionally corrupted config.
pub fn run_validation(config: &ValidationConfig) -> Result<ValidationReport> {
    let mut checks = Vec::new();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed.0 ^ 0x5eed);

    // 1. sandwich: exact optimal moment inside the analytic bounds
    let mut worst_margin = f64::INFINITY;
    let mut sandwich_ok = true;
    let mut detail = String::new();
    for i in 0..config.num_distributions {
        let dist = random_distribution(&mut rng, config.max_support_bits)?;
        for &rho in &config.rhos {
            let (moment, _) = exact_guesswork_moment(&dist, rho)?;
            let b = moment_bounds(dist.probs(), rho)?;
            let ok = b.lower <= moment * (1.0 + 1e-9) && moment <= b.upper * (1.0 + 1e-9);
            let margin = (moment - b.lower).min(b.upper - moment) / b.upper;
            worst_margin = worst_margin.min(margin);
            if !ok && sandwich_ok {
                sandwich_ok = false;
                detail = format!("dist {i} rho {rho}: {moment} outside [{}, {}]", b.lower, b.upper);
            }
        }
    }
    checks.push(CheckResult {
        name: "moment_sandwich".into(),
        passed: sandwich_ok,
        observed: worst_margin,
        bound: 0.0,
        detail: if sandwich_ok {
            format!(
                "{} random distributions x {} moment orders stayed inside the bounds",
                config.num_distributions,
                config.rhos.len()
            )
        } else {
            detail
        },
    });

    // 2. descending order beats random transpositions
    let mut optimal_ok = true;
    let mut worst_gap = f64::INFINITY;
    for _ in 0..100 {
        let dist = random_distribution(&mut rng, config.max_support_bits)?;
        let rho = config.rhos[rng.random::<u32>() as usize % config.rhos.len()];
        let (opt, rec) = exact_guesswork_moment(&dist, rho)?;
        let mut perturbed = rec.strategy.clone();
        let n = perturbed.len();
        perturbed.swap(
            rng.random::<u32>() as usize % n,
            rng.random::<u32>() as usize % n,
        );
        let other = moment_under_strategy(&dist, &perturbed, rho)?;
        worst_gap = worst_gap.min(other - opt);
        if other + 1e-9 < opt {
            optimal_ok = false;
        }
    }
    checks.push(CheckResult {
        name: "sorted_strategy_optimal".into(),
        passed: optimal_ok,
        observed: worst_gap,
        bound: 0.0,
        detail: "random transpositions of the sorted strategy never improve the moment".into(),
    });

    // 3. conditional oracle inside the conditional sandwich, and the
    // observed finite-size rate within the configured gap of the limit
    let m = config.conditional_bits;
    let joint = JointDistribution::correlated_bernoulli(m, 0.5, 0.2)?;
    let cond = conditional_guesswork_moment(&joint, 1.0)?;
    let b = conditional_moment_bounds(joint.probs(), 1 << m, 1 << m, 1.0)?;
    let in_bounds = b.lower <= cond * (1.0 + 1e-9) && cond <= b.upper * (1.0 + 1e-9);
    let rate = cond.log2() / m as f64;
    let limit = renyi_entropy(0.2, 0.5)?;
    checks.push(CheckResult {
        name: "conditional_sandwich".into(),
        passed: in_bounds,
        observed: cond,
        bound: b.upper,
        detail: format!(
            "m={m} side-information oracle: rate {rate:.4}, asymptotic limit {limit:.4}, \
bounds [{:.1}, {:.1}]",
            b.lower, b.upper
        ),
    });
    checks.push(CheckResult {
        name: "conditional_rate_gap".into(),
        passed: (limit - rate).abs() <= config.max_rate_gap,
        observed: (limit - rate).abs(),
        bound: config.max_rate_gap,
        detail: format!(
            "finite-size conditional rate {rate:.4} vs limit {limit:.4}; the gap shrinks \
like log(m)/m"
        ),
    });

    // 4. greedy distortion oracle: equality at D=0, monotone in D
    let (g0, _) = distortion_guesswork_greedy(0.35, 10, 0.0, 1.0)?;
    let d10 = DiscreteDistribution::bernoulli_iid(10, 0.35)?;
    let (e0, _) = exact_guesswork_moment(&d10, 1.0)?;
    checks.push(CheckResult {
        name: "greedy_equals_sorted_at_zero_distortion".into(),
        passed: g0 == e0,
        observed: g0,
        bound: e0,
        detail: "radius-0 greedy must reproduce the sorted oracle exactly".into(),
    });
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    for &dd in &[0.0, 0.1, 0.2, 0.3] {
        let (g, _) = distortion_guesswork_greedy(0.35, 10, dd, 1.0)?;
        if g > prev + 1e-12 {
            monotone = false;
        }
        prev = g;
    }
    checks.push(CheckResult {
        name: "greedy_monotone_in_distortion".into(),
        passed: monotone,
        observed: prev,
        bound: e0,
        detail: "wider tolerance can only reduce the expected guesswork".into(),
    });

    // 5. failure-constrained oracle: empty skip set is the unconstrained
    // oracle; derived skip set never exceeds it and never fails more often
    // than the skipped-type mass
    let (unconstrained, _) = exact_guesswork_moment(&DiscreteDistribution::bernoulli_iid(14, 0.3)?, 1.0)?;
    let (empty_skip, _) = failure_constrained_with_skips(0.3, 14, 0.0, &[], 1.0)?;
    checks.push(CheckResult {
        name: "empty_skip_set_is_unconstrained".into(),
        passed: empty_skip == unconstrained,
        observed: empty_skip,
        bound: unconstrained,
        detail: "type-skipping with nothing skipped must match the sorted oracle exactly".into(),
    });
    let (constrained, rec) = failure_constrained_guesswork(0.3, 14, 0.0, 0.35, 1.0)?;
    let skipped = skip_types(0.3, 14, 0.35)?;
    let mass = type_mass(0.3, 14, &skipped);
    checks.push(CheckResult {
        name: "failure_constrained_dominated".into(),
        passed: constrained <= unconstrained && rec.failure_probability <= mass + 1e-12,
        observed: constrained,
        bound: unconstrained,
        detail: format!(
            "achieved failure {:.6} vs skipped-type mass {:.6}",
            rec.failure_probability, mass
        ),
    });

    let all_passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport {
        config: config.clone(),
        checks,
        all_passed,
    })
}
