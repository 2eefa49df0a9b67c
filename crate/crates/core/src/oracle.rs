//! Brute-force and Monte Carlo ground truth at small instance sizes.
//!
//! Everything the closed forms claim asymptotically is checked here
//! exactly: sorted-strategy guesswork moments, conditional guesswork,
//! greedy guessing within a Hamming ball, type-skipping guessing under an
//! attack-failure budget, and simulations of the authentication and MAC
//! games.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::analytic::{kl_divergence, MacMapping};
use crate::error::{Error, Result};
use crate::puf_model::{stream_rng, Seed, DOMAIN_AUTH_GAME, DOMAIN_MAC_GAME};
use rand::Rng;

/// Hard cap on exhaustive supports.
pub const MAX_SUPPORT_BITS: u32 = 24;
/// Hard cap for the covering-game oracles (greedy and type-skipping).
pub const MAX_COVER_BITS: u32 = 20;

/// Explicit pmf over m-bit words, dense over all 2^m words.
#[derive(Debug, Clone)]
pub struct DiscreteDistribution {
    m: u32,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn from_probs(m: u32, probs: Vec<f64>) -> Result<Self> {
        if m > MAX_SUPPORT_BITS {
            return Err(Error::SupportTooLarge {
                bits: m,
                max_bits: MAX_SUPPORT_BITS,
            });
        }
        if probs.len() != 1usize << m {
            return Err(Error::InvalidParameter(format!(
                "expected 2^{m} probabilities, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter(
                "probability outside [0, 1]".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { sum });
        }
        Ok(DiscreteDistribution { m, probs })
    }

    pub fn bernoulli_iid(m: u32, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p={p} outside [0, 1]")));
        }
        if m > MAX_SUPPORT_BITS {
            return Err(Error::SupportTooLarge {
                bits: m,
                max_bits: MAX_SUPPORT_BITS,
            });
        }
        let probs = (0u32..1 << m)
            .map(|w| {
                let k = w.count_ones() as i32;
                p.powi(k) * (1.0 - p).powi(m as i32 - k)
            })
            .collect();
        // renormalize the tiny accumulation drift so downstream sums are clean
        let mut dist = DiscreteDistribution { m, probs };
        let sum: f64 = dist.probs.iter().sum();
        for p in &mut dist.probs {
            *p /= sum;
        }
        Ok(dist)
    }

    pub fn uniform(m: u32) -> Result<Self> {
        if m > MAX_SUPPORT_BITS {
            return Err(Error::SupportTooLarge {
                bits: m,
                max_bits: MAX_SUPPORT_BITS,
            });
        }
        let n = 1usize << m;
        Ok(DiscreteDistribution {
            m,
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn point_mass(m: u32, word: u32) -> Result<Self> {
        if m > MAX_SUPPORT_BITS {
            return Err(Error::SupportTooLarge {
                bits: m,
                max_bits: MAX_SUPPORT_BITS,
            });
        }
        let n = 1usize << m;
        if word as usize >= n {
            return Err(Error::InvalidParameter(format!(
                "word {word} outside 2^{m} support"
            )));
        }
        let mut probs = vec![0.0; n];
        probs[word as usize] = 1.0;
        Ok(DiscreteDistribution { m, probs })
    }

    pub fn word_bits(&self) -> u32 {
        self.m
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Joint pmf over (x, y) pairs of mx- and my-bit words, stored y-major so
/// each y exposes a contiguous conditional slice.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    mx: u32,
    my: u32,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn from_probs(mx: u32, my: u32, probs: Vec<f64>) -> Result<Self> {
        if mx + my > MAX_SUPPORT_BITS {
            return Err(Error::SupportTooLarge {
                bits: mx + my,
                max_bits: MAX_SUPPORT_BITS,
            });
        }
        if probs.len() != 1usize << (mx + my) {
            return Err(Error::InvalidParameter(format!(
                "expected 2^{} probabilities, got {}",
                mx + my,
                probs.len()
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { sum });
        }
        Ok(JointDistribution { mx, my, probs })
    }

    /// x ~ Bernoulli(p)^m and y = x XOR e with e ~ Bernoulli(e_flip)^m.
    pub fn correlated_bernoulli(m: u32, p: f64, e_flip: f64) -> Result<Self> {
        if 2 * m > MAX_SUPPORT_BITS {
            return Err(Error::SupportTooLarge {
                bits: 2 * m,
                max_bits: MAX_SUPPORT_BITS,
            });
        }
        let n = 1usize << m;
        let px: Vec<f64> = DiscreteDistribution::bernoulli_iid(m, p)?.probs;
        let pe: Vec<f64> = DiscreteDistribution::bernoulli_iid(m, e_flip)?.probs;
        let mut probs = vec![0.0; n * n];
        for y in 0..n {
            let row = &mut probs[y * n..(y + 1) * n];
            for (x, slot) in row.iter_mut().enumerate() {
                *slot = px[x] * pe[x ^ y];
            }
        }
        Ok(JointDistribution { mx: m, my: m, probs })
    }

    /// Independent product of a marginal on x with a uniform y.
    pub fn independent(x: &DiscreteDistribution, my: u32) -> Result<Self> {
        if x.m + my > MAX_SUPPORT_BITS {
            return Err(Error::SupportTooLarge {
                bits: x.m + my,
                max_bits: MAX_SUPPORT_BITS,
            });
        }
        let ny = 1usize << my;
        let nx = 1usize << x.m;
        let mut probs = vec![0.0; nx * ny];
        for y in 0..ny {
            for xi in 0..nx {
                probs[y * nx + xi] = x.probs[xi] / ny as f64;
            }
        }
        Ok(JointDistribution {
            mx: x.m,
            my,
            probs,
        })
    }

    pub fn x_bits(&self) -> u32 {
        self.mx
    }

    pub fn y_bits(&self) -> u32 {
        self.my
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// The realized guessing strategy of an oracle run.
#[derive(Debug, Clone)]
pub struct GuessRecord {
    /// Words (or ball centers) in guess order.
    pub strategy: Vec<u32>,
    /// Probability that the guessed value is never identified.
    pub failure_probability: f64,
}

impl GuessRecord {
    /// 1-based guess index of a word, if it is ever guessed.
    pub fn guess_count(&self, word: u32) -> Option<usize> {
        self.strategy.iter().position(|&w| w == word).map(|i| i + 1)
    }
}

fn pow_index(i: usize, rho: f64) -> f64 {
    let x = i as f64;
    if rho == 1.0 {
        x
    } else if rho == 2.0 {
        x * x
    } else {
        x.powf(rho)
    }
}

/// Sorted-word order: descending probability, ascending word on ties.
fn sorted_strategy(probs: &[f64]) -> Vec<u32> {
    let mut order: Vec<u32> = (0..probs.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        probs[b as usize]
            .partial_cmp(&probs[a as usize])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Exact rho-th guesswork moment of the optimal (descending-probability)
/// strategy: `sum_i i^rho * p(i-th most probable word)`.
pub fn exact_guesswork_moment(
    dist: &DiscreteDistribution,
    rho: f64,
) -> Result<(f64, GuessRecord)> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho={rho} must be > 0")));
    }
    let order = sorted_strategy(&dist.probs);
    let moment = order
        .iter()
        .enumerate()
        .map(|(i, &w)| pow_index(i + 1, rho) * dist.probs[w as usize])
        .sum();
    Ok((
        moment,
        GuessRecord {
            strategy: order,
            failure_probability: 0.0,
        },
    ))
}

/// Moment of an arbitrary full-order strategy; used to check that the
/// sorted order is optimal.
pub fn moment_under_strategy(
    dist: &DiscreteDistribution,
    strategy: &[u32],
    rho: f64,
) -> Result<f64> {
    if strategy.len() != dist.probs.len() {
        return Err(Error::InvalidParameter(
            "strategy must order the full support".into(),
        ));
    }
    Ok(strategy
        .iter()
        .enumerate()
        .map(|(i, &w)| pow_index(i + 1, rho) * dist.probs[w as usize])
        .sum())
}

/// Exact conditional guesswork moment: per value of the side information,
/// the attacker guesses x in descending conditional probability.
pub fn conditional_guesswork_moment(joint: &JointDistribution, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho={rho} must be > 0")));
    }
    let nx = 1usize << joint.mx;
    let ny = 1usize << joint.my;
    let total: f64 = (0..ny)
        .into_par_iter()
        .map(|y| {
            let row = &joint.probs[y * nx..(y + 1) * nx];
            let order = sorted_strategy(row);
            order
                .iter()
                .enumerate()
                .map(|(i, &x)| pow_index(i + 1, rho) * row[x as usize])
                .sum::<f64>()
        })
        .sum();
    Ok(total)
}

struct Candidate {
    gain: f64,
    word: u32,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.gain == other.gain && self.word == other.word
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap: larger gain first, then smaller word
        self.gain
            .total_cmp(&other.gain)
            .then(other.word.cmp(&self.word))
    }
}

/// Lazy greedy cover: repeatedly guess the ball center covering the most
/// not-yet-covered target mass. Gains are submodular, so a stale heap
/// entry re-evaluated at the top stays correct.
fn greedy_ball_cover(
    probs: &[f64],
    radius: u32,
    rho: f64,
    target: Option<&[bool]>, // words that must be covered; None = all
) -> (f64, Vec<u32>, f64) {
    let n = probs.len();
    let ball: Vec<u32> = (0u32..n as u32)
        .filter(|w| w.count_ones() <= radius)
        .collect();
    let mut covered = vec![false; n];
    let mut remaining: f64 = match target {
        Some(t) => probs
            .iter()
            .zip(t)
            .filter(|(_, &keep)| keep)
            .map(|(p, _)| p)
            .sum(),
        None => 1.0,
    };
    let counts = |w: u32, covered: &[bool]| -> f64 {
        let mut g = 0.0;
        for &o in &ball {
            let v = (w ^ o) as usize;
            if !covered[v] && target.map(|t| t[v]).unwrap_or(true) {
                g += probs[v];
            }
        }
        g
    };
    let mut heap: BinaryHeap<Candidate> = (0..n as u32)
        .map(|w| Candidate {
            gain: counts(w, &covered),
            word: w,
        })
        .collect();
    let mut moment = 0.0;
    let mut strategy = Vec::new();
    let mut guess_index = 0usize;
    let eps = 1e-15;
    while remaining > eps {
        let top = match heap.pop() {
            Some(c) => c,
            None => break,
        };
        let fresh = counts(top.word, &covered);
        if fresh <= 0.0 {
            continue;
        }
        let next_best = heap.peek().map(|c| c.gain).unwrap_or(f64::NEG_INFINITY);
        if fresh + eps < next_best {
            heap.push(Candidate {
                gain: fresh,
                word: top.word,
            });
            continue;
        }
        guess_index += 1;
        strategy.push(top.word);
        // covering also ends the game for non-target words inside the ball
        let mut covered_mass = 0.0;
        for &o in &ball {
            let v = (top.word ^ o) as usize;
            if !covered[v] {
                covered[v] = true;
                covered_mass += probs[v];
                if target.map(|t| t[v]).unwrap_or(true) {
                    remaining -= probs[v];
                }
            }
        }
        moment += pow_index(guess_index, rho) * covered_mass;
    }
    let failure: f64 = covered
        .iter()
        .zip(probs)
        .filter(|(&c, _)| !c)
        .map(|(_, p)| p)
        .sum();
    (moment, strategy, failure.clamp(0.0, 1.0))
}

/// Greedy achievable strategy for guessing a Bernoulli(p) word up to
/// Hamming distortion D: each guess maximizes newly covered probability
/// mass within radius floor(m*D). At D = 0 this is exactly the sorted
/// strategy.
pub fn distortion_guesswork_greedy(
    p: f64,
    m: u32,
    d: f64,
    rho: f64,
) -> Result<(f64, GuessRecord)> {
    if m > MAX_COVER_BITS {
        return Err(Error::SupportTooLarge {
            bits: m,
            max_bits: MAX_COVER_BITS,
        });
    }
    if !(d >= 0.0) {
        return Err(Error::InvalidParameter(format!("d={d} must be >= 0")));
    }
    let radius = ((m as f64) * d).floor() as u32;
    let dist = DiscreteDistribution::bernoulli_iid(m, p)?;
    if radius == 0 {
        return exact_guesswork_moment(&dist, rho);
    }
    if radius >= m {
        // one guess covers everything
        return Ok((
            1.0,
            GuessRecord {
                strategy: vec![0],
                failure_probability: 0.0,
            },
        ));
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho={rho} must be > 0")));
    }
    let (moment, strategy, failure) = greedy_ball_cover(&dist.probs, radius, rho, None);
    Ok((
        moment,
        GuessRecord {
            strategy,
            failure_probability: failure,
        },
    ))
}

/// Type classes (as counts of ones) the attacker skips for boundary s:
/// every type at or above s, plus low-side types below p whose divergence
/// from p reaches D(s||p). At p = 1/2 the divergence is symmetric and the
/// boundary degenerates: no type is worth skipping, so the set is empty.
pub fn skip_types(p: f64, m: u32, s: f64) -> Result<Vec<u32>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p={p} outside (0, 1)")));
    }
    if !(s > p && s <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "skip boundary s={s} outside (p, 1]"
        )));
    }
    if p == 0.5 {
        return Ok(Vec::new());
    }
    let threshold = kl_divergence(s, p)?;
    let mut skipped = Vec::new();
    for k in 0..=m {
        let q = k as f64 / m as f64;
        let high = q >= s;
        let low = q < p && kl_divergence(q, p)? >= threshold;
        if high || low {
            skipped.push(k);
        }
    }
    Ok(skipped)
}

/// Exact probability mass of a set of type classes under Bernoulli(p).
pub fn type_mass(p: f64, m: u32, types: &[u32]) -> f64 {
    // ln C(m, k) built incrementally; summed in the log domain
    let mut ln_choose = vec![0.0f64; m as usize + 1];
    for k in 0..m as usize {
        ln_choose[k + 1] = ln_choose[k] + ((m as usize - k) as f64).ln() - ((k + 1) as f64).ln();
    }
    let mut total = 0.0;
    for &k in types {
        let term = ln_choose[k as usize]
            + if p > 0.0 { k as f64 * p.ln() } else { if k == 0 { 0.0 } else { f64::NEG_INFINITY } }
            + if p < 1.0 {
                (m - k) as f64 * (1.0 - p).ln()
            } else if k == m {
                0.0
            } else {
                f64::NEG_INFINITY
            };
        total += term.exp();
    }
    total.clamp(0.0, 1.0)
}

/// Type-skipping guesser under an attack-failure budget, with an explicit
/// skip set (counts of ones that are never targeted). Remaining words are
/// guessed in descending probability; when D > 0 the guesses are greedy
/// ball centers targeting the unskipped mass.
pub fn failure_constrained_with_skips(
    p: f64,
    m: u32,
    d: f64,
    skipped: &[u32],
    rho: f64,
) -> Result<(f64, GuessRecord)> {
    if m > MAX_COVER_BITS {
        return Err(Error::SupportTooLarge {
            bits: m,
            max_bits: MAX_COVER_BITS,
        });
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho={rho} must be > 0")));
    }
    let dist = DiscreteDistribution::bernoulli_iid(m, p)?;
    let radius = ((m as f64) * d).floor() as u32;
    let skip_mask: Vec<bool> = {
        let mut mask = vec![false; m as usize + 1];
        for &k in skipped {
            mask[k as usize] = true;
        }
        mask
    };
    if radius == 0 {
        let order = sorted_strategy(&dist.probs);
        let mut moment = 0.0;
        let mut strategy = Vec::new();
        let mut failure = 0.0;
        for &w in &order {
            if skip_mask[w.count_ones() as usize] {
                failure += dist.probs[w as usize];
            } else {
                strategy.push(w);
                moment += pow_index(strategy.len(), rho) * dist.probs[w as usize];
            }
        }
        return Ok((
            moment,
            GuessRecord {
                strategy,
                failure_probability: failure.clamp(0.0, 1.0),
            },
        ));
    }
    let target: Vec<bool> = (0..dist.probs.len() as u32)
        .map(|w| !skip_mask[w.count_ones() as usize])
        .collect();
    let (moment, strategy, failure) = greedy_ball_cover(&dist.probs, radius, rho, Some(&target));
    Ok((
        moment,
        GuessRecord {
            strategy,
            failure_probability: failure,
        },
    ))
}

/// Type-skipping guesser with the skip set derived from boundary s.
pub fn failure_constrained_guesswork(
    p: f64,
    m: u32,
    d: f64,
    s: f64,
    rho: f64,
) -> Result<(f64, GuessRecord)> {
    let skipped = skip_types(p, m, s)?;
    failure_constrained_with_skips(p, m, d, &skipped, rho)
}

/// Empirical statistics of the single-guess-per-challenge authentication
/// game.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AuthGameStats {
    pub trials: u64,
    /// Mean guess count over all trials; a failed attack contributes 0.
    pub mean_guesses: f64,
    /// Entry l-1 is the empirical Pr(success within l challenges).
    pub success_cdf: Vec<f64>,
    pub failure_rate: f64,
}

/// Monte Carlo over the authentication game: per challenge i the attacker
/// guesses the most probable response and succeeds with probability
/// 2^(-H(i)).
pub fn simulate_auth_game(
    minentropies: &[f64],
    trials: u64,
    seed: Seed,
) -> Result<AuthGameStats> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if minentropies.is_empty() {
        return Err(Error::InvalidParameter("need >= 1 challenge".into()));
    }
    if minentropies.iter().any(|&h| !(h >= 0.0)) {
        return Err(Error::InvalidParameter("min-entropies must be >= 0".into()));
    }
    let hits: Vec<f64> = minentropies.iter().map(|&h| (-h).exp2()).collect();
    let n = hits.len();
    let (sum_guesses, success_at, failures) = (0..trials)
        .into_par_iter()
        .fold(
            || (0u64, vec![0u64; n], 0u64),
            |(mut sum, mut succ, mut fail), t| {
                let mut rng = stream_rng(seed, &[DOMAIN_AUTH_GAME, t]);
                let mut done = false;
                for (i, &hit) in hits.iter().enumerate() {
                    if rng.random::<f64>() < hit {
                        sum += i as u64 + 1;
                        succ[i] += 1;
                        done = true;
                        break;
                    }
                }
                if !done {
                    fail += 1;
                }
                (sum, succ, fail)
            },
        )
        .reduce(
            || (0u64, vec![0u64; n], 0u64),
            |(s1, v1, f1), (s2, v2, f2)| {
                let merged = v1.iter().zip(&v2).map(|(a, b)| a + b).collect();
                (s1 + s2, merged, f1 + f2)
            },
        );
    let mut cdf = Vec::with_capacity(n);
    let mut cum = 0u64;
    for c in &success_at {
        cum += c;
        cdf.push(cum as f64 / trials as f64);
    }
    Ok(AuthGameStats {
        trials,
        mean_guesses: sum_guesses as f64 / trials as f64,
        success_cdf: cdf,
        failure_rate: failures as f64 / trials as f64,
    })
}

/// Empirical statistics of the idealized MAC game.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MacGameStats {
    pub trials: u64,
    pub mean_total_guesses: f64,
    /// The exact reference mean the deviations are measured against.
    pub reference_mean: f64,
    /// For each requested alpha: empirical Pr(G - eta > alpha * eta).
    pub deviation_frequencies: Vec<f64>,
}

/// Monte Carlo over the MAC game: per trial a key is drawn, each of the
/// 2^N messages gets an L-bit bin, and the attacker guesses bins in
/// descending marginal probability. Returns the empirical mean total
/// guesswork and tail-deviation frequencies.
pub fn simulate_mac_game(
    n_bits: u32,
    l_bits: u32,
    p: f64,
    mapping: MacMapping,
    trials: u64,
    alphas: &[f64],
    seed: Seed,
) -> Result<MacGameStats> {
    if n_bits > 10 || l_bits > 10 || l_bits == 0 {
        return Err(Error::InvalidParameter(
            "N and L must be in 0..=10 (L >= 1)".into(),
        ));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "key bias p={p} outside (0, 1/2]"
        )));
    }
    if p < 0.5 && mapping == MacMapping::Uniform {
        return Err(Error::InvalidParameter(
            "biased keys are only characterized for the identity mapping".into(),
        ));
    }
    let nl = 1usize << l_bits;
    let messages = 1u64 << n_bits;
    // guess rank of each L-bit bin value under the key-bit marginal:
    // descending probability, ties by ascending value
    let bin_probs: Vec<f64> = (0..nl as u32)
        .map(|w| {
            let k = w.count_ones() as i32;
            p.powi(k) * (1.0 - p).powi(l_bits as i32 - k)
        })
        .collect();
    let order = sorted_strategy(&bin_probs);
    let mut rank = vec![0u64; nl];
    for (i, &w) in order.iter().enumerate() {
        rank[w as usize] = i as u64 + 1;
    }
    // exact per-message mean guess count, summed over messages
    let per_message: f64 = match mapping {
        MacMapping::Uniform => (nl as f64 + 1.0) / 2.0,
        MacMapping::Identity => bin_probs
            .iter()
            .enumerate()
            .map(|(w, &pw)| rank[w] as f64 * pw)
            .sum(),
    };
    let reference_mean = per_message * messages as f64;

    let mask = (nl - 1) as u32;
    let (sum_total, dev_counts) = (0..trials)
        .into_par_iter()
        .fold(
            || (0.0f64, vec![0u64; alphas.len()]),
            |(mut sum, mut devs), t| {
                let mut rng = stream_rng(seed, &[DOMAIN_MAC_GAME, t]);
                let mut total = 0u64;
                for _ in 0..messages {
                    let bin = match mapping {
                        MacMapping::Uniform => rng.random::<u32>() & mask,
                        MacMapping::Identity => {
                            let mut w = 0u32;
                            for _ in 0..l_bits {
                                w = (w << 1) | (rng.random::<f64>() < p) as u32;
                            }
                            w
                        }
                    };
                    total += rank[bin as usize];
                }
                sum += total as f64;
                for (i, &a) in alphas.iter().enumerate() {
                    if total as f64 - reference_mean > a * reference_mean {
                        devs[i] += 1;
                    }
                }
                (sum, devs)
            },
        )
        .reduce(
            || (0.0f64, vec![0u64; alphas.len()]),
            |(s1, d1), (s2, d2)| {
                let merged = d1.iter().zip(&d2).map(|(a, b)| a + b).collect();
                (s1 + s2, merged)
            },
        );
    Ok(MacGameStats {
        trials,
        mean_total_guesses: sum_total / trials as f64,
        reference_mean,
        deviation_frequencies: dev_counts
            .iter()
            .map(|&c| c as f64 / trials as f64)
            .collect(),
    })
}
