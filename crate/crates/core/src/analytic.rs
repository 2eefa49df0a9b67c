//! Closed-form guesswork and entropy quantities.
//!
//! Everything here is a pure function of scalar parameters. Exponential
//! quantities are expressed as log2 rates (bits per symbol) except where a
//! formula is exact at finite size (moment sandwich bounds, authentication
//! game, uniform MAC), in which case absolute values are returned.

use crate::error::{Error, Result};

/// Analysis knobs shared by reports and sweeps.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct GuessworkParams {
    /// Guesswork moment order; 1 is the average guesswork.
    pub rho: f64,
    /// Hamming distortion fraction (guessing succeeds within radius m*D).
    pub distortion: f64,
    /// Optional skip-boundary type for the failure-constrained game.
    pub skip_boundary: Option<f64>,
}

impl Default for GuessworkParams {
    fn default() -> Self {
        GuessworkParams {
            rho: 1.0,
            distortion: 0.0,
            skip_boundary: None,
        }
    }
}

impl GuessworkParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rho={} must be > 0",
                self.rho
            )));
        }
        if !(0.0..=0.5).contains(&self.distortion) {
            return Err(Error::InvalidParameter(format!(
                "distortion {} outside [0, 1/2]",
                self.distortion
            )));
        }
        if let Some(s) = self.skip_boundary {
            if !(s > 0.0 && s <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "skip boundary {s} outside (0, 1]"
                )));
            }
        }
        Ok(())
    }
}

fn check_probability(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidParameter(format!(
            "{name}={value} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Binary Shannon entropy in bits, with the 0*log(0) = 0 convention.
pub fn binary_entropy(q: f64) -> Result<f64> {
    check_probability("q", q)?;
    if q == 0.0 || q == 1.0 {
        return Ok(0.0);
    }
    Ok(-q * q.log2() - (1.0 - q) * (1.0 - q).log2())
}

/// Renyi entropy of a Bernoulli(p) bit, in bits, for a positive order != 1.
/// Order 1/2 governs the average-guesswork growth rate:
/// `2 * log2(sqrt(p) + sqrt(1-p))`.
pub fn renyi_entropy(p: f64, order: f64) -> Result<f64> {
    check_probability("p", p)?;
    if !(order > 0.0) || order == 1.0 {
        return Err(Error::InvalidParameter(format!(
            "Renyi order {order} must be positive and != 1"
        )));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok((p.powf(order) + (1.0 - p).powf(order)).log2() / (1.0 - order))
}

/// Binary Kullback-Leibler divergence D(s || p) in bits.
pub fn kl_divergence(s: f64, p: f64) -> Result<f64> {
    check_probability("s", s)?;
    check_probability("p", p)?;
    if p == 0.0 || p == 1.0 {
        // divergence against a point mass is only finite on the point
        if s == p {
            return Ok(0.0);
        }
        return Err(Error::InvalidParameter(format!(
            "D({s}||{p}) is infinite for a point-mass reference"
        )));
    }
    let mut total = 0.0;
    if s > 0.0 {
        total += s * (s / p).log2();
    }
    if s < 1.0 {
        total += (1.0 - s) * ((1.0 - s) / (1.0 - p)).log2();
    }
    // tiny negative round-off at s == p
    Ok(total.max(0.0))
}

/// Growth rate (as a log2 exponent per bit) of the rho-th guesswork moment
/// of an i.i.d. Bernoulli(p) word: `rho * H_{1/(1+rho)}(p)`.
pub fn moment_growth_rate(p: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho={rho} must be > 0")));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(rho * renyi_entropy(p, 1.0 / (1.0 + rho))?)
}

/// Growth rate of the rho-th guesswork moment when guessing succeeds within
/// Hamming distortion D (equivalently, when the source is re-read through a
/// Bernoulli(D) noise channel): `max(rho*H_{1/(1+rho)}(p) - rho*H(D), 0)`.
pub fn distortion_growth_rate(p: f64, d: f64, rho: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&d) {
        return Err(Error::InvalidParameter(format!(
            "distortion d={d} outside [0, 1/2]"
        )));
    }
    let rate = moment_growth_rate(p, rho)? - rho * binary_entropy(d)?;
    Ok(rate.max(0.0))
}

/// The type class that dominates the rho-th guesswork moment of a
/// Bernoulli(p) source: the maximizer of `rho*H(q) - D(q||p)` over q.
/// Skipping types above this boundary no longer lowers the guesswork rate.
pub fn dominant_type(p: f64, rho: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p={p} outside (0, 1)")));
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho={rho} must be > 0")));
    }
    let a = 1.0 / (1.0 + rho);
    let pa = p.powf(a);
    Ok(pa / (pa + (1.0 - p).powf(a)))
}

/// Result of the failure-constrained guesswork bound.
#[derive(Debug, Clone, Copy)]
pub struct FailureConstrainedRate {
    /// Upper bound on the growth rate of the rho-th guesswork moment for
    /// the type-skipping strategy.
    pub rate: f64,
    /// Attack-failure exponent alpha = D(s||p): the failure probability
    /// decays like 2^(-alpha*m).
    pub failure_exponent: f64,
}

/// Guesswork growth-rate bound when the attacker may skip type classes,
/// trading an attack-failure probability of 2^(-m*D(s||p)) for fewer
/// guesses. Piecewise in the skip boundary s:
/// above the dominant type the unconstrained distortion rate applies;
/// below it the rate drops to `rho*(H(s) - H(D)) - D(s||p)`.
pub fn failure_constrained_rate(
    p: f64,
    d: f64,
    rho: f64,
    s: f64,
) -> Result<FailureConstrainedRate> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::InvalidParameter(format!("p={p} outside (0, 1/2]")));
    }
    if !(0.0..=1.0).contains(&d) || d > p {
        return Err(Error::InvalidParameter(format!(
            "distortion d={d} must satisfy 0 <= d <= p"
        )));
    }
    if !(s > p && s <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "skip boundary s={s} outside (p, 1]"
        )));
    }
    let failure_exponent = kl_divergence(s, p)?;
    let boundary = dominant_type(p, rho)?;
    let rate = if s >= boundary {
        rho * (renyi_entropy(p, 1.0 / (1.0 + rho))? - binary_entropy(d)?)
    } else {
        rho * (binary_entropy(s)? - binary_entropy(d)?) - failure_exponent
    };
    Ok(FailureConstrainedRate {
        rate,
        failure_exponent,
    })
}

/// Min-entropy rate (bits per symbol) of a Bernoulli(p) word when a guess
/// within Hamming distortion D counts: `D(D||p)` for D <= p, else 0.
pub fn min_entropy_distortion_rate(p: f64, d: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::InvalidParameter(format!("p={p} outside [0, 1/2]")));
    }
    check_probability("d", d)?;
    if p == 0.0 {
        return Ok(0.0);
    }
    if d <= p {
        kl_divergence(d, p)
    } else {
        Ok(0.0)
    }
}

/// Sandwich bounds on an optimal guesswork moment (absolute values, not
/// rates). `lower <= E[G*^rho] <= upper` always holds for the
/// descending-probability strategy.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct MomentBounds {
    pub lower: f64,
    pub upper: f64,
}

fn normalized(sum: f64) -> Result<()> {
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

/// Arikan-style sandwich bounds on `E[G*(X)^rho]` for an explicit pmf:
/// `upper = (sum_x p(x)^(1/(1+rho)))^(1+rho)` and
/// `lower = upper / (1 + ln M)^rho`, with M the support size.
pub fn moment_bounds(pmf: &[f64], rho: f64) -> Result<MomentBounds> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho={rho} must be > 0")));
    }
    if pmf.is_empty() {
        return Err(Error::InvalidParameter("empty pmf".into()));
    }
    if pmf.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::InvalidParameter("pmf entry outside [0, 1]".into()));
    }
    normalized(pmf.iter().sum())?;
    let support = pmf.iter().filter(|&&p| p > 0.0).count().max(1);
    let a = 1.0 / (1.0 + rho);
    let upper = pmf
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p.powf(a))
        .sum::<f64>()
        .powf(1.0 + rho);
    let lower = upper / (1.0 + (support as f64).ln()).powf(rho);
    Ok(MomentBounds { lower, upper })
}

/// Conditional variant: `upper = sum_y (sum_x P(x,y)^(1/(1+rho)))^(1+rho)`
/// bounding `E[G*(X|Y)^rho]`, with M the number of x values carrying mass.
/// `joint` is indexed y-major: `joint[y * nx + x]`.
pub fn conditional_moment_bounds(
    joint: &[f64],
    nx: usize,
    ny: usize,
    rho: f64,
) -> Result<MomentBounds> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho={rho} must be > 0")));
    }
    if nx == 0 || ny == 0 || joint.len() != nx * ny {
        return Err(Error::InvalidParameter(
            "joint pmf shape does not match nx * ny".into(),
        ));
    }
    normalized(joint.iter().sum())?;
    let a = 1.0 / (1.0 + rho);
    let mut upper = 0.0;
    let mut x_has_mass = vec![false; nx];
    for y in 0..ny {
        let row = &joint[y * nx..(y + 1) * nx];
        let inner: f64 = row
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(x, &p)| {
                x_has_mass[x] = true;
                p.powf(a)
            })
            .sum();
        upper += inner.powf(1.0 + rho);
    }
    let support = x_has_mass.iter().filter(|&&b| b).count().max(1);
    let lower = upper / (1.0 + (support as f64).ln()).powf(rho);
    Ok(MomentBounds { lower, upper })
}

/// log2 of the probability that a Bernoulli(p) word of length m lands
/// within Hamming distance floor(m*D) of the all-most-likely word, i.e.
/// log2 of the cumulative binomial `sum_{i<=m*D} C(m,i) p^i (1-p)^(m-i)`.
/// Computed in the log domain; stable up to m around 10^6.
pub fn log2_ball_probability(p: f64, m: u64, d: f64) -> Result<f64> {
    check_probability("p", p)?;
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    if !(d >= 0.0) {
        return Err(Error::InvalidParameter(format!("d={d} must be >= 0")));
    }
    let radius = ((m as f64) * d).floor() as u64;
    let radius = radius.min(m);
    if radius == m {
        return Ok(0.0);
    }
    if p == 0.0 {
        return Ok(0.0); // the zero word is certain and within any ball
    }
    if p == 1.0 {
        // all ones; within radius < m of the all-zero center never happens
        return Ok(f64::NEG_INFINITY);
    }
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln();
    // streaming log-sum-exp over ln C(m,i) + i ln p + (m-i) ln q
    let mut ln_choose = 0.0f64;
    let mut max_term = f64::NEG_INFINITY;
    let mut acc = 0.0f64;
    for i in 0..=radius {
        let term = ln_choose + (i as f64) * ln_p + ((m - i) as f64) * ln_q;
        if term > max_term {
            acc = acc * (max_term - term).exp() + 1.0;
            max_term = term;
        } else {
            acc += (term - max_term).exp();
        }
        ln_choose += ((m - i) as f64).ln() - ((i + 1) as f64).ln();
    }
    Ok((max_term + acc.ln()) / std::f64::consts::LN_2)
}

/// Linear-domain ball probability; underflows to 0 for extreme exponents.
pub fn ball_probability(p: f64, m: u64, d: f64) -> Result<f64> {
    Ok(log2_ball_probability(p, m, d)?.exp2().min(1.0))
}

/// Average guesswork of the single-guess-per-challenge authentication game
/// with per-challenge min-entropies `H(1), ..., H(n)`:
/// `E(G) = 2^{-H(1)} + sum_{i=2..n} i * 2^{-H(i)} * prod_{k<i} (1 - 2^{-H(k)})`.
/// A failed attack contributes no guess count.
pub fn auth_avg_guesswork(minentropies: &[f64]) -> Result<f64> {
    if minentropies.iter().any(|&h| !(h >= 0.0)) {
        return Err(Error::InvalidParameter(
            "min-entropies must be >= 0".into(),
        ));
    }
    let mut survive = 1.0; // probability all previous guesses failed
    let mut total = 0.0;
    for (i, &h) in minentropies.iter().enumerate() {
        let hit = (-h).exp2();
        total += (i as f64 + 1.0) * hit * survive;
        survive *= 1.0 - hit;
    }
    Ok(total)
}

/// Closed form of `auth_avg_guesswork` when the min-entropy is constant
/// across n challenges: `2^H - (1 - 2^{-H})^n * (n + 2^H)`.
pub fn auth_avg_guesswork_const(h_inf: f64, n: u64) -> Result<f64> {
    if !(h_inf >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "min-entropy {h_inf} must be >= 0"
        )));
    }
    let cap = h_inf.exp2();
    let miss = 1.0 - (-h_inf).exp2();
    Ok(cap - miss.powi(n as i32) * (n as f64 + cap))
}

/// Probability that the authentication game ends within the first l
/// challenges, for constant min-entropy: `1 - (1 - 2^{-H})^l`.
pub fn auth_success_cdf(h_inf: f64, l: u64) -> Result<f64> {
    if !(h_inf >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "min-entropy {h_inf} must be >= 0"
        )));
    }
    Ok(1.0 - (1.0 - (-h_inf).exp2()).powi(l as i32))
}

/// Per-challenge cumulative success probabilities for a min-entropy
/// sequence; entry l-1 is Pr(G <= l).
pub fn auth_success_cdf_seq(minentropies: &[f64]) -> Result<Vec<f64>> {
    if minentropies.iter().any(|&h| !(h >= 0.0)) {
        return Err(Error::InvalidParameter(
            "min-entropies must be >= 0".into(),
        ));
    }
    let mut survive = 1.0;
    let mut cum = 0.0;
    let mut out = Vec::with_capacity(minentropies.len());
    for &h in minentropies {
        let hit = (-h).exp2();
        cum += hit * survive;
        survive *= 1.0 - hit;
        out.push(cum);
    }
    Ok(out)
}

/// Probability the attacker fails every challenge:
/// `prod_i (1 - 2^{-H(i)})`. The empty product is 1.
pub fn auth_failure_prob(minentropies: &[f64]) -> Result<f64> {
    if minentropies.iter().any(|&h| !(h >= 0.0)) {
        return Err(Error::InvalidParameter(
            "min-entropies must be >= 0".into(),
        ));
    }
    Ok(minentropies
        .iter()
        .map(|&h| 1.0 - (-h).exp2())
        .product::<f64>()
        .clamp(0.0, 1.0))
}

/// Guess budget needed to reach a target success confidence.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct GuessBudget {
    /// Smallest l with `1 - (1 - 2^{-H})^l >= confidence`; saturates at
    /// u64::MAX when the exact count overflows.
    pub guesses: u64,
    pub saturated: bool,
    /// log2 of the (real-valued) guess count estimate; exact-count cases
    /// carry log2(guesses).
    pub log2_guesses: f64,
}

/// Smallest number of single-response guesses for which the success
/// probability reaches `confidence`:
/// `ceil(ln(1 - confidence) / ln(1 - 2^{-H}))`.
pub fn guesses_for_confidence(h_inf: f64, confidence: f64) -> Result<GuessBudget> {
    if !(h_inf > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "min-entropy {h_inf} must be > 0"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence {confidence} outside (0, 1)"
        )));
    }
    let hit = (-h_inf).exp2();
    // ln(1 - hit) via ln_1p for tiny hit
    let ln_miss = (-hit).ln_1p();
    let ln_target = (1.0 - confidence).ln();
    let real = ln_target / ln_miss; // both negative
    // l ~ ln(1/(1-c)) * 2^H for small hit rates
    let log2_est = if real.is_finite() && real > 0.0 {
        real.log2()
    } else {
        (-ln_target).log2() + h_inf
    };
    if !real.is_finite() || real >= 9.0e18 {
        return Ok(GuessBudget {
            guesses: u64::MAX,
            saturated: true,
            log2_guesses: log2_est,
        });
    }
    // nail the boundary against the actual CDF: division round-off can
    // land the formula one step off in either direction
    let mut l = real.ceil().max(1.0) as u64;
    while l > 1 && auth_success_cdf(h_inf, l - 1)? >= confidence {
        l -= 1;
    }
    while auth_success_cdf(h_inf, l)? < confidence {
        l += 1;
    }
    Ok(GuessBudget {
        guesses: l,
        saturated: false,
        log2_guesses: (l as f64).log2(),
    })
}

/// Min-entropy (bits) available against a model-building attacker whose
/// per-bit prediction rate is r over an m-bit response. A stable response
/// gives `-m*log2(r)`; under re-read noise a guess within Hamming radius
/// m*D counts, giving `-log2(ball(1-r, m, D))`.
pub fn model_attack_min_entropy(r: f64, m: u64, d: f64) -> Result<f64> {
    if !(0.5..1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "prediction rate r={r} outside [1/2, 1)"
        )));
    }
    if !(0.0..=0.5).contains(&d) {
        return Err(Error::InvalidParameter(format!(
            "distortion d={d} outside [0, 1/2]"
        )));
    }
    if d == 0.0 {
        Ok(-(m as f64) * r.log2())
    } else {
        Ok(-log2_ball_probability(1.0 - r, m, d)?)
    }
}

/// How an idealized MAC key selects its hash function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MacMapping {
    /// Message bins are i.i.d. uniform L-bit words (any bijection from a
    /// uniform key behaves this way).
    Uniform,
    /// Bins are consecutive L-bit slices of the key itself.
    Identity,
}

/// Average total guesswork of the idealized MAC game over all 2^N messages.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct MacAvgGuesswork {
    /// log2 of the expected total number of guesses. Exact for uniform
    /// keys; the asymptotic-in-L rate `N + L*H_{1/2}(p)` for biased keys
    /// under the identity mapping.
    pub log2_total: f64,
    /// Exact expected count when available (uniform keys, small sizes).
    pub exact_total: Option<f64>,
}

/// Average total guesswork to break all 2^N message bins of an idealized
/// MAC with an L-bit output. Uniform key: exactly `2^N * (2^L + 1) / 2`.
/// Biased key with the identity mapping: grows like `2^(N + L*H_{1/2}(p))`.
pub fn mac_avg_guesswork(
    n_bits: u32,
    l_bits: u32,
    p: f64,
    mapping: MacMapping,
) -> Result<MacAvgGuesswork> {
    if l_bits == 0 {
        return Err(Error::InvalidParameter("L must be >= 1".into()));
    }
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "key bias p={p} outside (0, 1/2]"
        )));
    }
    if p == 0.5 {
        // per-message mean (2^L + 1)/2, summed over 2^N messages
        let log2_total =
            n_bits as f64 + (l_bits as f64 - 1.0) + (1.0 + (-(l_bits as f64)).exp2()).log2();
        let exact_total = if n_bits + l_bits < 52 {
            Some((n_bits as f64).exp2() * ((l_bits as f64).exp2() + 1.0) / 2.0)
        } else {
            None
        };
        return Ok(MacAvgGuesswork {
            log2_total,
            exact_total,
        });
    }
    match mapping {
        MacMapping::Identity => Ok(MacAvgGuesswork {
            log2_total: n_bits as f64 + l_bits as f64 * renyi_entropy(p, 0.5)?,
            exact_total: None,
        }),
        MacMapping::Uniform => Err(Error::InvalidParameter(
            "biased keys are only characterized for the identity mapping".into(),
        )),
    }
}

/// Azuma concentration bound on the MAC game's total guesswork:
/// `Pr(G - eta > alpha*eta) <= exp(-(alpha^2/8) * 2^(N - 2L(1 - H_{1/2}(p))))`,
/// which reduces to `exp(-(alpha^2/8) * 2^N)` for uniform keys. Clamped to 1.
pub fn mac_tail_bound(
    n_bits: u32,
    l_bits: u32,
    p: f64,
    alpha: f64,
    mapping: MacMapping,
) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha={alpha} must be >= 0"
        )));
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
    let exponent_bits = match mapping {
        MacMapping::Uniform => n_bits as f64,
        MacMapping::Identity => {
            n_bits as f64 - 2.0 * l_bits as f64 * (1.0 - renyi_entropy(p, 0.5)?)
        }
    };
    let bound = (-(alpha * alpha / 8.0) * exponent_bits.exp2()).exp();
    Ok(bound.min(1.0))
}
