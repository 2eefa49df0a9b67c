//! Empirical PUF-quality statistics and the security report pipeline.

use serde::Serialize;

use crate::analytic::{
    binary_entropy, distortion_growth_rate, min_entropy_distortion_rate, moment_growth_rate,
    GuessworkParams,
};
use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::puf_model::Population;

/// Summary of a sample of fractions in [0, 1].
#[derive(Debug, Clone, Serialize)]
pub struct DistributionSummary {
    pub mean: f64,
    pub std_dev: f64,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Histogram>,
}

/// Equal-width binned counts over [lo, hi].
#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    fn build(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Histogram {
        let mut counts = vec![0u64; bins.max(1)];
        let width = (hi - lo) / counts.len() as f64;
        for &s in samples {
            let idx = (((s - lo) / width) as usize).min(counts.len() - 1);
            counts[idx] += 1;
        }
        Histogram { lo, hi, counts }
    }

    /// Two-column (bin center, count) rows for plot export.
    pub fn rows(&self) -> Vec<(f64, u64)> {
        let width = (self.hi - self.lo) / self.counts.len() as f64;
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (self.lo + width * (i as f64 + 0.5), c))
            .collect()
    }
}

impl DistributionSummary {
    pub fn from_samples(samples: &[f64], bins: Option<usize>) -> Result<DistributionSummary> {
        if samples.is_empty() {
            return Err(Error::InsufficientData("no samples to summarize".into()));
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
        Ok(DistributionSummary {
            mean,
            std_dev: var.sqrt(),
            count: samples.len(),
            histogram: bins.map(|b| Histogram::build(samples, 0.0, 1.0, b)),
        })
    }
}

/// Fractional Hamming distance between two equal-length words.
pub fn fhd(a: &BitVector, b: &BitVector) -> Result<f64> {
    let d = a.hamming_distance(b)?;
    Ok(d as f64 / a.len() as f64)
}

/// Intra-device FHD over all unordered pairs of a read set.
pub fn intra_fhd(reads: &[BitVector]) -> Result<DistributionSummary> {
    intra_fhd_binned(reads, None)
}

pub fn intra_fhd_binned(reads: &[BitVector], bins: Option<usize>) -> Result<DistributionSummary> {
    if reads.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "intra-FHD needs >= 2 reads, got {}",
            reads.len()
        )));
    }
    let mut samples = Vec::with_capacity(reads.len() * (reads.len() - 1) / 2);
    for i in 0..reads.len() {
        for j in i + 1..reads.len() {
            samples.push(fhd(&reads[i], &reads[j])?);
        }
    }
    DistributionSummary::from_samples(&samples, bins)
}

/// Inter-device FHD over all unordered pairs of ground-truth responses.
pub fn inter_fhd(truths: &[BitVector]) -> Result<DistributionSummary> {
    inter_fhd_binned(truths, None)
}

pub fn inter_fhd_binned(truths: &[BitVector], bins: Option<usize>) -> Result<DistributionSummary> {
    if truths.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "inter-FHD needs >= 2 devices, got {}",
            truths.len()
        )));
    }
    let mut samples = Vec::with_capacity(truths.len() * (truths.len() - 1) / 2);
    for i in 0..truths.len() {
        for j in i + 1..truths.len() {
            samples.push(fhd(&truths[i], &truths[j])?);
        }
    }
    DistributionSummary::from_samples(&samples, bins)
}

/// Fraction of bit positions identical across every read of a device.
pub fn stability(reads: &[BitVector]) -> Result<f64> {
    if reads.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "stability needs >= 2 reads, got {}",
            reads.len()
        )));
    }
    let first = &reads[0];
    // a position is stable iff no read differs from the first there
    let mut stable = BitVector::zeros(first.len()).complement();
    for r in &reads[1..] {
        let agree = first.xor(r)?.complement();
        stable = stable.and(&agree)?;
    }
    Ok(stable.count_ones() as f64 / first.len() as f64)
}

/// Pooled (ones, zeros) bit fractions over a set of responses. The two
/// components sum to exactly 1.
pub fn bias_level(truths: &[BitVector]) -> Result<(f64, f64)> {
    if truths.is_empty() {
        return Err(Error::InsufficientData("bias needs >= 1 response".into()));
    }
    let total: usize = truths.iter().map(|t| t.len()).sum();
    let ones: usize = truths.iter().map(|t| t.count_ones()).sum();
    let ones_fraction = ones as f64 / total as f64;
    Ok((ones_fraction, 1.0 - ones_fraction))
}

/// Empirical Shannon entropy of non-overlapping k-bit tuples.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TupleEntropy {
    /// Entropy of the empirical k-tuple distribution, bits per tuple.
    pub entropy_bits: f64,
    /// Independence reference: k * H(pooled one-fraction).
    pub independence_reference_bits: f64,
    /// Number of complete tuples used.
    pub tuples: usize,
}

/// Group a pooled bit stream into non-overlapping k-tuples in stream order
/// and compute the entropy of their empirical distribution.
pub fn empirical_tuple_entropy(bits: &BitVector, k: usize) -> Result<TupleEntropy> {
    if k == 0 || k > 24 {
        return Err(Error::InvalidParameter(format!(
            "tuple size k={k} outside 1..=24"
        )));
    }
    if bits.len() < k {
        return Err(Error::InsufficientData(format!(
            "stream of {} bits is shorter than k={k}",
            bits.len()
        )));
    }
    let n = bits.len() / k;
    let mut counts = vec![0u64; 1 << k];
    let mut ones = 0usize;
    for t in 0..n {
        let mut word = 0usize;
        for j in 0..k {
            let bit = bits.get(t * k + j);
            word = (word << 1) | bit as usize;
            ones += bit as usize;
        }
        counts[word] += 1;
    }
    let entropy_bits = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let f = c as f64 / n as f64;
            -f * f.log2()
        })
        .sum();
    let pooled = ones as f64 / (n * k) as f64;
    Ok(TupleEntropy {
        entropy_bits,
        independence_reference_bits: k as f64 * binary_entropy(pooled)?,
        tuples: n,
    })
}

/// Analytic growth rates derived from a (bias, noise) operating point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GrowthRates {
    /// Moment order the rates refer to.
    pub rho: f64,
    /// Measurement-pipeline growth rate: noisy sources are treated as
    /// unbiased, `rho*(1 - H(d))`; stable sources use the bias-aware Renyi
    /// rate `rho*H_{1/(1+rho)}(p)`.
    pub growth_rate: f64,
    /// Bias-and-noise-aware rate `max(rho*(H_{1/(1+rho)}(p) - H(d)), 0)`.
    pub growth_rate_bias_aware: f64,
    /// Min-entropy rate under distortion d (bias folded to p <= 1/2).
    pub min_entropy_rate: f64,
}

/// Derive the report's growth rates from bias p and re-read noise d.
pub fn growth_rates(p: f64, d: f64, rho: f64) -> Result<GrowthRates> {
    let growth_rate = if d > 0.0 {
        rho * (1.0 - binary_entropy(d)?)
    } else {
        moment_growth_rate(p, rho)?
    };
    let folded = p.min(1.0 - p);
    Ok(GrowthRates {
        rho,
        growth_rate,
        growth_rate_bias_aware: distortion_growth_rate(p, d, rho)?,
        min_entropy_rate: min_entropy_distortion_rate(folded, d)?,
    })
}

/// Measured quality statistics plus the analytic rates derived from them.
#[derive(Debug, Clone, Serialize)]
pub struct SecurityReport {
    pub devices: usize,
    pub bits_per_device: usize,
    pub reads_per_device: usize,
    pub ones_fraction: f64,
    pub zeros_fraction: f64,
    /// Mean FHD between the enrollment response and each re-read; this is
    /// the estimator of the per-re-read transition probability that feeds
    /// the growth-rate pipeline.
    pub intra_fhd: Option<DistributionSummary>,
    /// FHD over all unordered pairs of re-reads (roughly 2d(1-d) under
    /// i.i.d. noise d).
    pub intra_fhd_read_pairs: Option<DistributionSummary>,
    /// FHD over all unordered device pairs; absent for a single device.
    pub inter_fhd: Option<DistributionSummary>,
    /// Mean fraction of positions stable across all reads of a device.
    pub stability: Option<f64>,
    pub rates: GrowthRates,
}

/// Compute the full measurement-to-rates pipeline over a population.
pub fn security_report(pop: &Population, params: &GuessworkParams) -> Result<SecurityReport> {
    security_report_binned(pop, params, None)
}

pub fn security_report_binned(
    pop: &Population,
    params: &GuessworkParams,
    bins: Option<usize>,
) -> Result<SecurityReport> {
    params.validate()?;
    if pop.devices.is_empty() {
        return Err(Error::InsufficientData("population has no devices".into()));
    }
    let truths: Vec<BitVector> = pop.devices.iter().map(|d| d.truth.clone()).collect();
    let (ones_fraction, zeros_fraction) = bias_level(&truths)?;

    // enrollment-referenced noise estimate
    let mut noise_samples = Vec::new();
    for dev in &pop.devices {
        for r in &dev.reads {
            noise_samples.push(fhd(&dev.truth, r)?);
        }
    }
    let intra = if noise_samples.is_empty() {
        None
    } else {
        Some(DistributionSummary::from_samples(&noise_samples, bins)?)
    };

    // pairwise samples pooled across devices
    let intra_pairs = if pop.devices[0].reads.len() >= 2 {
        let mut samples = Vec::new();
        for dev in &pop.devices {
            for i in 0..dev.reads.len() {
                for j in i + 1..dev.reads.len() {
                    samples.push(fhd(&dev.reads[i], &dev.reads[j])?);
                }
            }
        }
        Some(DistributionSummary::from_samples(&samples, bins)?)
    } else {
        None
    };

    let inter = if truths.len() >= 2 {
        Some(inter_fhd_binned(&truths, bins)?)
    } else {
        None
    };

    let stab = if pop.devices[0].reads.len() >= 2 {
        let mut total = 0.0;
        for dev in &pop.devices {
            total += stability(&dev.reads)?;
        }
        Some(total / pop.devices.len() as f64)
    } else {
        None
    };

    let d_hat = intra.as_ref().map(|s| s.mean).unwrap_or(0.0);
    let rates = growth_rates(ones_fraction, d_hat, params.rho)?;

    Ok(SecurityReport {
        devices: pop.devices.len(),
        bits_per_device: pop.spec.m,
        reads_per_device: pop.devices[0].reads.len(),
        ones_fraction,
        zeros_fraction,
        intra_fhd: intra,
        intra_fhd_read_pairs: intra_pairs,
        inter_fhd: inter,
        stability: stab,
        rates,
    })
}

impl SecurityReport {
    /// Flat CSV (header, row) pair for this device set.
    pub fn csv(&self) -> (String, String) {
        let header = "devices,bits,reads,ones_fraction,zeros_fraction,intra_fhd_mean,\
intra_fhd_std,intra_pairs_mean,inter_fhd_mean,inter_fhd_std,stability,rho,growth_rate,\
growth_rate_bias_aware,min_entropy_rate"
            .to_string();
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        let row = format!(
            "{},{},{},{:.6},{:.6},{},{},{},{},{},{},{},{:.6},{:.6},{:.6}",
            self.devices,
            self.bits_per_device,
            self.reads_per_device,
            self.ones_fraction,
            self.zeros_fraction,
            opt(self.intra_fhd.as_ref().map(|s| s.mean)),
            opt(self.intra_fhd.as_ref().map(|s| s.std_dev)),
            opt(self.intra_fhd_read_pairs.as_ref().map(|s| s.mean)),
            opt(self.inter_fhd.as_ref().map(|s| s.mean)),
            opt(self.inter_fhd.as_ref().map(|s| s.std_dev)),
            opt(self.stability),
            self.rates.rho,
            self.rates.growth_rate,
            self.rates.growth_rate_bias_aware,
            self.rates.min_entropy_rate,
        );
        (header, row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puf_model::{find_preset, resample, sample_population, sample_response, PufSpec, Seed};

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn fhd_basics() {
        let x = BitVector::from_fn(8, |i| i >= 4);
        close(fhd(&x, &x).unwrap(), 0.0, 0.0);
        close(fhd(&x, &x.complement()).unwrap(), 1.0, 0.0);
        let zero = BitVector::zeros(8);
        close(fhd(&x, &zero).unwrap(), 0.5, 0.0); // 00001111 vs 00000000
        assert!(fhd(&x, &BitVector::zeros(9)).is_err());
    }

    #[test]
    fn intra_fhd_cases() {
        let x = BitVector::from_fn(64, |i| i % 2 == 0);
        let s = intra_fhd(&[x.clone(), x.clone(), x.clone()]).unwrap();
        close(s.mean, 0.0, 0.0);
        close(s.std_dev, 0.0, 0.0);
        assert_eq!(s.count, 3);
        assert!(intra_fhd(&[x.clone()]).is_err());

        // {x, resample(x, 0.5)}: expected pair FHD 1/2
        let spec = PufSpec::new(1_000_000, 0.5, 0.0, 0.5).unwrap();
        let x = sample_response(&spec, Seed(2)).unwrap();
        let y = resample(&x, 0.5, Seed(3)).unwrap();
        let s = intra_fhd(&[x, y]).unwrap();
        close(s.mean, 0.5, 0.01);
    }

    #[test]
    fn intra_fhd_sram_pairs_matches_channel_oracle() {
        // ten re-reads of one device under i.i.d. noise d: a pair of reads
        // differs where exactly one of two independent flips hit, so the
        // pairwise mean is 2d(1-d) = 0.044178 for d = 0.0226. (The measured
        // hardware quotes 2.26% because it references the enrollment read;
        // the report pipeline uses that convention, see security_report.)
        let spec = find_preset("sram").unwrap().spec(100_000);
        let pop = sample_population(&spec, 1, 10, Seed(5)).unwrap();
        let s = intra_fhd(&pop.devices[0].reads).unwrap();
        close(s.mean, 2.0 * 0.0226 * (1.0 - 0.0226), 0.003);
        // enrollment-referenced estimate recovers d itself
        let mut refd = Vec::new();
        for r in &pop.devices[0].reads {
            refd.push(fhd(&pop.devices[0].truth, r).unwrap());
        }
        let s = DistributionSummary::from_samples(&refd, None).unwrap();
        close(s.mean, 0.0226, 0.003);
    }

    #[test]
    fn inter_fhd_cases() {
        let x = BitVector::from_fn(32, |i| i % 3 == 0);
        let s = inter_fhd(&[x.clone(), x.clone()]).unwrap();
        close(s.mean, 0.0, 0.0);
        assert!(inter_fhd(&[x]).is_err());

        let spec = PufSpec::new(512, 0.5, 0.0, 0.5).unwrap();
        let pop = sample_population(&spec, 1000, 1, Seed(8)).unwrap();
        let truths: Vec<BitVector> = pop.devices.iter().map(|d| d.truth.clone()).collect();
        let s = inter_fhd(&truths).unwrap();
        close(s.mean, 0.5, 0.005);

        // biased devices: analytic pairwise mismatch probability 2p(1-p)
        let spec = PufSpec::new(512, 0.4626, 0.0, 0.5).unwrap();
        let pop = sample_population(&spec, 1000, 1, Seed(9)).unwrap();
        let truths: Vec<BitVector> = pop.devices.iter().map(|d| d.truth.clone()).collect();
        let s = inter_fhd(&truths).unwrap();
        close(s.mean, 2.0 * 0.4626 * 0.5374, 0.005);
    }

    #[test]
    fn stability_cases() {
        let x = BitVector::from_fn(64, |i| i % 2 == 0);
        close(stability(&[x.clone(), x.clone(), x.clone()]).unwrap(), 1.0, 0.0);
        close(stability(&[x.clone(), x.complement()]).unwrap(), 0.0, 0.0);
        assert!(stability(&[x]).is_err());
    }

    #[test]
    fn stability_sram_matches_monte_carlo_oracle() {
        // Under i.i.d. Bernoulli(d) re-read noise, a position never flips
        // across 10 reads with probability (1-d)^10 + d^10 = 0.79565 at
        // d = 0.0226. (The silicon table quotes 93.42% because hardware
        // noise is concentrated on a few unstable cells; per-bit
        // heterogeneous noise is out of scope for this model.)
        let spec = find_preset("sram").unwrap().spec(100_000);
        let pop = sample_population(&spec, 1, 10, Seed(6)).unwrap();
        let s = stability(&pop.devices[0].reads).unwrap();
        let oracle = 0.9774f64.powi(10) + 0.0226f64.powi(10);
        close(s, oracle, 0.02);
    }

    #[test]
    fn stability_bounded_by_pairwise_intra() {
        let spec = find_preset("ro20").unwrap().spec(4096);
        let pop = sample_population(&spec, 3, 6, Seed(10)).unwrap();
        for dev in &pop.devices {
            let s = stability(&dev.reads).unwrap();
            let mut max_pair: f64 = 0.0;
            for i in 0..dev.reads.len() {
                for j in i + 1..dev.reads.len() {
                    max_pair = max_pair.max(fhd(&dev.reads[i], &dev.reads[j]).unwrap());
                }
            }
            assert!(s <= 1.0 - max_pair + 1e-12, "stability {s} vs pair {max_pair}");
        }
    }

    #[test]
    fn bias_level_cases() {
        let ones = BitVector::zeros(16).complement();
        let (a, b) = bias_level(&[ones]).unwrap();
        assert_eq!((a, b), (1.0, 0.0));
        assert!(bias_level(&[]).is_err());

        let spec = find_preset("ledpuf").unwrap().spec(100_000);
        let pop = sample_population(&spec, 10, 1, Seed(12)).unwrap();
        let truths: Vec<BitVector> = pop.devices.iter().map(|d| d.truth.clone()).collect();
        let (ones, zeros) = bias_level(&truths).unwrap();
        close(ones, 0.4626, 0.002);
        close(zeros, 0.5374, 0.002);
        assert_eq!(ones + zeros, 1.0);

        let spec = PufSpec::new(1_000_000, 0.5, 0.0, 0.5).unwrap();
        let pop = sample_population(&spec, 1, 1, Seed(13)).unwrap();
        let (ones, _) = bias_level(&[pop.devices[0].truth.clone()]).unwrap();
        close(ones, 0.5, 0.002);
    }

    #[test]
    fn tuple_entropy_cases() {
        let zeros = BitVector::zeros(300);
        let t = empirical_tuple_entropy(&zeros, 3).unwrap();
        close(t.entropy_bits, 0.0, 0.0);

        let alt = BitVector::from_fn(100, |i| i % 2 == 1);
        let t = empirical_tuple_entropy(&alt, 1).unwrap();
        close(t.entropy_bits, 1.0, 1e-12);

        // 1500 bits i.i.d. at the measured bias: triple entropy lands near
        // the independence reference 3*H(p)
        let spec = PufSpec::new(1500, 0.4626, 0.0, 0.5).unwrap();
        let x = sample_response(&spec, Seed(14)).unwrap();
        let t = empirical_tuple_entropy(&x, 3).unwrap();
        assert_eq!(t.tuples, 500);
        let target = 3.0 * binary_entropy(0.4626).unwrap();
        close(t.entropy_bits, target, 0.02);

        assert!(empirical_tuple_entropy(&BitVector::zeros(2), 3).is_err());
    }

    #[test]
    fn tuple_entropy_subadditive() {
        let spec = find_preset("sram").unwrap().spec(9000);
        let x = sample_response(&spec, Seed(15)).unwrap();
        for k in [2usize, 3, 5] {
            let t = empirical_tuple_entropy(&x, k).unwrap();
            assert!(
                t.entropy_bits <= t.independence_reference_bits + 1e-12,
                "k={k}: {} > {}",
                t.entropy_bits,
                t.independence_reference_bits
            );
        }
    }

    #[test]
    fn growth_rates_reproduce_pipeline_table() {
        // analytic path from the preset constants
        let r = growth_rates(0.4913, 0.0226, 1.0).unwrap();
        close(r.growth_rate, 0.8442, 3e-3);
        let r = growth_rates(0.5138, 0.0248, 1.0).unwrap();
        close(r.growth_rate, 0.8323, 3e-3);
        let r = growth_rates(0.5138, 0.12, 1.0).unwrap();
        close(r.growth_rate, 0.4706, 3e-3);
        let r = growth_rates(0.4626, 0.0, 1.0).unwrap();
        close(r.growth_rate, 0.9980, 3e-3);
    }

    #[test]
    fn security_report_on_measured_populations() {
        let spec = find_preset("ledpuf").unwrap().spec(50_000);
        let pop = sample_population(&spec, 20, 2, Seed(16)).unwrap();
        let rep = security_report(&pop, &GuessworkParams::default()).unwrap();
        close(rep.rates.growth_rate, 0.9980, 5e-4);
        assert_eq!(rep.intra_fhd.as_ref().unwrap().mean, 0.0);
        assert_eq!(rep.stability, Some(1.0));

        let spec = find_preset("sram").unwrap().spec(32_768);
        let pop = sample_population(&spec, 10, 10, Seed(17)).unwrap();
        let rep = security_report(&pop, &GuessworkParams::default()).unwrap();
        close(rep.intra_fhd.as_ref().unwrap().mean, 0.0226, 0.003);
        close(rep.rates.growth_rate, 0.8442, 2e-3);
        let oracle_stability = 0.9774f64.powi(10) + 0.0226f64.powi(10);
        close(rep.stability.unwrap(), oracle_stability, 0.02);

        let spec = find_preset("ro60").unwrap().spec(32_768);
        let pop = sample_population(&spec, 10, 10, Seed(18)).unwrap();
        let rep = security_report(&pop, &GuessworkParams::default()).unwrap();
        close(rep.rates.growth_rate, 0.4706, 3e-3);
    }

    #[test]
    fn single_device_report_has_no_inter() {
        let spec = find_preset("sram").unwrap().spec(512);
        let pop = sample_population(&spec, 1, 3, Seed(19)).unwrap();
        let rep = security_report(&pop, &GuessworkParams::default()).unwrap();
        assert!(rep.inter_fhd.is_none());
        let (_, row) = rep.csv();
        assert!(row.contains(",,"), "absent statistics stay empty in CSV");
    }
}
