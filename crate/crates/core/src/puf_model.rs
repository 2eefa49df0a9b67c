//! Synthetic PUF populations.
//!
//! Responses are modeled as i.i.d. Bernoulli bit sources: a stable device
//! has a fixed ground-truth word, and each re-read passes the truth through
//! an additive binary noise channel. A correlated device pair models a
//! side-channel observer holding a second device whose bits flip with
//! probability `e` relative to the first.
//!
//! All sampling is keyed by a `Seed` plus structural indices (device,
//! read), so results are bit-identical regardless of thread count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{Error, Result};

/// Root seed for all sampling operations. Identical seed + identical
/// parameters give bit-identical outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

/// Generative parameters of a PUF family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PufSpec {
    /// Response length in bits.
    pub m: usize,
    /// Per-bit probability of a 1.
    pub p: f64,
    /// Per-re-read transition probability. `d = 0` is a stable PUF.
    pub d: f64,
    /// Cross-device correlation flip probability. `e = 1/2` means
    /// independent devices.
    pub e: f64,
}

impl PufSpec {
    pub fn new(m: usize, p: f64, d: f64, e: f64) -> Result<Self> {
        let spec = PufSpec { m, p, d, e };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParameter("bit length m must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter(format!(
                "bias p={} outside [0, 1]",
                self.p
            )));
        }
        if !(0.0..=0.5).contains(&self.d) {
            return Err(Error::InvalidParameter(format!(
                "noise d={} outside [0, 1/2]",
                self.d
            )));
        }
        if !(0.0..=0.5).contains(&self.e) {
            return Err(Error::InvalidParameter(format!(
                "correlation e={} outside [0, 1/2]",
                self.e
            )));
        }
        Ok(())
    }
}

/// A named PUF family with measured bias and noise levels.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Preset {
    pub name: &'static str,
    /// Per-bit probability of a 1 (measured bias level).
    pub p: f64,
    /// Per-re-read transition probability (measured intra-device noise).
    pub d: f64,
    pub source: &'static str,
}

impl Preset {
    /// Spec at the requested bit length; devices are independent (e = 1/2).
    pub fn spec(&self, m: usize) -> PufSpec {
        PufSpec {
            m,
            p: self.p,
            d: self.d,
            e: 0.5,
        }
    }
}

/// Measured hardware presets.
pub const PRESETS: [Preset; 4] = [
    Preset {
        name: "ledpuf",
        p: 0.4626,
        d: 0.0,
        source: "stable defect-based PUF; bias from connection-formation statistics, zero re-read noise",
    },
    Preset {
        name: "sram",
        p: 0.4913,
        d: 0.0226,
        source: "SRAM power-up state measurements at room temperature",
    },
    Preset {
        name: "ro20",
        p: 0.5138,
        d: 0.0248,
        source: "ring-oscillator PUF measured at 20C",
    },
    Preset {
        name: "ro60",
        p: 0.5138,
        d: 0.12,
        source: "ring-oscillator PUF enrolled at 20C, re-read at 60C",
    },
];

pub fn find_preset(name: &str) -> Option<&'static Preset> {
    let lower = name.to_ascii_lowercase();
    PRESETS.iter().find(|p| p.name == lower)
}

// Stream domains. Every sampling operation derives its generator from
// (seed, domain, indices...) so streams never collide.
const DOMAIN_RESPONSE: u64 = 1;
const DOMAIN_RESAMPLE: u64 = 2;
const DOMAIN_PAIR_BASE: u64 = 3;
const DOMAIN_PAIR_FLIP: u64 = 4;
pub(crate) const DOMAIN_AUTH_GAME: u64 = 5;
pub(crate) const DOMAIN_MAC_GAME: u64 = 6;
pub(crate) const DOMAIN_STRONG_KEY: u64 = 7;
pub(crate) const DOMAIN_STRONG_CHALLENGE: u64 = 8;
pub(crate) const DOMAIN_STRONG_FLIP: u64 = 9;

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive an independent generator for (seed, tags...). Tags are the
/// structural coordinates of the stream: domain, device index, read index,
/// trial index, and so on.
pub(crate) fn stream_rng(seed: Seed, tags: &[u64]) -> ChaCha8Rng {
    let mut h = mix64(seed.0);
    for &t in tags {
        h = mix64(h ^ mix64(t));
    }
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
        chunk.copy_from_slice(&mix64(h ^ (i as u64 + 1)).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

fn bernoulli_bits(rng: &mut ChaCha8Rng, m: usize, p: f64) -> BitVector {
    BitVector::from_fn(m, |_| rng.random::<f64>() < p)
}

/// Draw one ground-truth response: `m` bits i.i.d. Bernoulli(p).
pub fn sample_response(spec: &PufSpec, seed: Seed) -> Result<BitVector> {
    spec.validate()?;
    let mut rng = stream_rng(seed, &[DOMAIN_RESPONSE, 0]);
    Ok(bernoulli_bits(&mut rng, spec.m, spec.p))
}

/// Re-read a response through an additive Bernoulli(d) flip channel.
pub fn resample(original: &BitVector, d: f64, seed: Seed) -> Result<BitVector> {
    if !(0.0..=0.5).contains(&d) {
        return Err(Error::InvalidParameter(format!(
            "noise d={d} outside [0, 1/2]"
        )));
    }
    let mut rng = stream_rng(seed, &[DOMAIN_RESAMPLE, 0, 0]);
    let noise = bernoulli_bits(&mut rng, original.len(), d);
    original.xor(&noise)
}

/// Draw a correlated device pair: x ~ Bernoulli(p)^m and y = x XOR e with
/// e ~ Bernoulli(spec.e)^m.
pub fn correlated_pair(spec: &PufSpec, seed: Seed) -> Result<(BitVector, BitVector)> {
    spec.validate()?;
    let mut base = stream_rng(seed, &[DOMAIN_PAIR_BASE, 0]);
    let x = bernoulli_bits(&mut base, spec.m, spec.p);
    let mut flip = stream_rng(seed, &[DOMAIN_PAIR_FLIP, 0]);
    let e = bernoulli_bits(&mut flip, spec.m, spec.e);
    let y = x.xor(&e)?;
    Ok((x, y))
}

/// One device's measurement set: the enrollment (ground-truth) response
/// plus noisy re-reads.
#[derive(Debug, Clone)]
pub struct DeviceMeasurements {
    pub truth: BitVector,
    pub reads: Vec<BitVector>,
}

/// A simulated device population.
#[derive(Debug, Clone)]
pub struct Population {
    pub spec: PufSpec,
    pub seed: Seed,
    pub devices: Vec<DeviceMeasurements>,
}

/// Draw `devices` independent devices, each with one ground truth and
/// `resamples` noisy re-reads.
pub fn sample_population(
    spec: &PufSpec,
    devices: usize,
    resamples: usize,
    seed: Seed,
) -> Result<Population> {
    spec.validate()?;
    if devices == 0 {
        return Err(Error::InvalidParameter("devices must be >= 1".into()));
    }
    if resamples == 0 {
        return Err(Error::InvalidParameter("resamples must be >= 1".into()));
    }
    let spec = *spec;
    let devices: Vec<DeviceMeasurements> = (0..devices as u64)
        .into_par_iter()
        .map(|dev| {
            let mut rng = stream_rng(seed, &[DOMAIN_RESPONSE, dev]);
            let truth = bernoulli_bits(&mut rng, spec.m, spec.p);
            let reads = (0..resamples as u64)
                .map(|r| {
                    let mut nrng = stream_rng(seed, &[DOMAIN_RESAMPLE, dev, r]);
                    let noise = bernoulli_bits(&mut nrng, spec.m, spec.d);
                    truth.xor(&noise).expect("equal lengths by construction")
                })
                .collect();
            DeviceMeasurements { truth, reads }
        })
        .collect();
    Ok(Population {
        spec,
        seed,
        devices,
    })
}

#[derive(Serialize, Deserialize)]
struct DeviceJson {
    truth: String,
    reads: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct PopulationJson {
    spec: PufSpec,
    seed: Seed,
    devices: Vec<DeviceJson>,
}

impl Population {
    /// JSON export: `{spec, seed, devices: [{truth: hex, reads: [hex...]}]}`
    /// with most-significant-bit-first hex strings.
    pub fn to_json_value(&self) -> serde_json::Value {
        let raw = PopulationJson {
            spec: self.spec,
            seed: self.seed,
            devices: self
                .devices
                .iter()
                .map(|d| DeviceJson {
                    truth: d.truth.to_hex(),
                    reads: d.reads.iter().map(|r| r.to_hex()).collect(),
                })
                .collect(),
        };
        serde_json::to_value(raw).expect("population serialization cannot fail")
    }

    /// Parse a population back from its JSON form. Unknown extra fields are
    /// ignored.
    pub fn from_json_value(value: &serde_json::Value) -> Result<Population> {
        let raw: PopulationJson = serde_json::from_value(value.clone())?;
        raw.spec.validate()?;
        let m = raw.spec.m;
        let devices = raw
            .devices
            .iter()
            .map(|d| {
                Ok(DeviceMeasurements {
                    truth: BitVector::from_hex(&d.truth, m)?,
                    reads: d
                        .reads
                        .iter()
                        .map(|r| BitVector::from_hex(r, m))
                        .collect::<Result<Vec<_>>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Population {
            spec: raw.spec,
            seed: raw.seed,
            devices,
        })
    }
}
