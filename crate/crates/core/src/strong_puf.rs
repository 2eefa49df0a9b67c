//! Keyed-hash strong PUF built on a weak-PUF key.
//!
//! A 512-bit weak-PUF response keys an HMAC-SHA-256; challenges are hashed
//! into 256-bit responses. 512 bits is exactly the SHA-256 block size, so
//! the key is used unpadded and unhashed. Responses are bit-exact against
//! the RFC 4231 HMAC-SHA-256 test vectors.

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::metrics::DistributionSummary;
use crate::puf_model::{
    stream_rng, Seed, DOMAIN_STRONG_CHALLENGE, DOMAIN_STRONG_FLIP, DOMAIN_STRONG_KEY,
};

const BLOCK_LEN: usize = 64;
pub const KEY_BITS: usize = 512;
pub const RESPONSE_BITS: usize = 256;
pub const DEFAULT_CHALLENGE_BITS: usize = 256;

/// HMAC-SHA-256 over an arbitrary-length key and message (RFC 2104).
/// Keys longer than the 64-byte block are hashed first; shorter keys are
/// zero-padded to the block length.
pub fn hmac_sha256(key: &[u8], msg: &[u8]) -> [u8; 32] {
    let mut block = [0u8; BLOCK_LEN];
    if key.len() > BLOCK_LEN {
        let digest = Sha256::digest(key);
        block[..32].copy_from_slice(&digest);
    } else {
        block[..key.len()].copy_from_slice(key);
    }
    let mut ipad = [0x36u8; BLOCK_LEN];
    let mut opad = [0x5cu8; BLOCK_LEN];
    for i in 0..BLOCK_LEN {
        ipad[i] ^= block[i];
        opad[i] ^= block[i];
    }
    let mut inner = Sha256::new();
    inner.update(ipad);
    inner.update(msg);
    let inner_hash = inner.finalize();
    let mut outer = Sha256::new();
    outer.update(opad);
    outer.update(inner_hash);
    outer.finalize().into()
}

/// A challenge payload; any nonempty byte string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Challenge {
    payload: Vec<u8>,
}

impl Challenge {
    pub fn new(payload: Vec<u8>) -> Result<Self> {
        if payload.is_empty() {
            return Err(Error::InvalidParameter("empty challenge".into()));
        }
        Ok(Challenge { payload })
    }

    pub fn from_bits(bits: &BitVector) -> Result<Self> {
        Self::new(bits.to_bytes())
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }
}

/// A strong PUF device: an immutable 512-bit key driving HMAC-SHA-256.
#[derive(Debug, Clone)]
pub struct StrongPufDevice {
    key: [u8; KEY_BITS / 8],
}

/// Build a device from a 512-bit weak-PUF response. Identical responses
/// give identical devices; no weak-key screening is applied.
pub fn build_device(weak_response: &BitVector) -> Result<StrongPufDevice> {
    if weak_response.len() != KEY_BITS {
        return Err(Error::InvalidParameter(format!(
            "strong PUF key must be exactly {KEY_BITS} bits, got {}",
            weak_response.len()
        )));
    }
    let bytes = weak_response.to_bytes();
    let mut key = [0u8; KEY_BITS / 8];
    key.copy_from_slice(&bytes);
    Ok(StrongPufDevice { key })
}

impl StrongPufDevice {
    /// The full 256-bit HMAC-SHA-256 tag for a challenge.
    pub fn respond(&self, challenge: &Challenge) -> BitVector {
        let tag = hmac_sha256(&self.key, challenge.payload());
        BitVector::from_bytes(&tag, RESPONSE_BITS).expect("tag length is fixed")
    }

    pub fn key_bits(&self) -> BitVector {
        BitVector::from_bytes(&self.key, KEY_BITS).expect("key length is fixed")
    }
}

fn random_challenge(rng: &mut rand_chacha::ChaCha8Rng) -> Challenge {
    let mut payload = vec![0u8; DEFAULT_CHALLENGE_BITS / 8];
    rng.fill(payload.as_mut_slice());
    Challenge::new(payload).expect("nonempty by construction")
}

/// Flip `k` distinct key bits and measure the response FHD on a fresh
/// challenge, per trial. Summarizes over `challenges` trials.
pub fn avalanche_experiment(
    device: &StrongPufDevice,
    bit_flips: usize,
    challenges: usize,
    seed: Seed,
) -> Result<DistributionSummary> {
    if bit_flips > KEY_BITS {
        return Err(Error::InvalidParameter(format!(
            "cannot flip {bit_flips} of {KEY_BITS} key bits"
        )));
    }
    if challenges == 0 {
        return Err(Error::InvalidParameter("need >= 1 challenge".into()));
    }
    let base_key = device.key_bits();
    let mut samples = Vec::with_capacity(challenges);
    for t in 0..challenges as u64 {
        let mut ch_rng = stream_rng(seed, &[DOMAIN_STRONG_CHALLENGE, t]);
        let challenge = random_challenge(&mut ch_rng);
        let mut flip_rng = stream_rng(seed, &[DOMAIN_STRONG_FLIP, t]);
        let mut flipped = base_key.clone();
        // partial Fisher-Yates over the key positions
        let mut positions: Vec<usize> = (0..KEY_BITS).collect();
        for i in 0..bit_flips {
            let j = i + (flip_rng.random::<u64>() as usize) % (KEY_BITS - i);
            positions.swap(i, j);
            flipped.flip(positions[i]);
        }
        let other = build_device(&flipped)?;
        let a = device.respond(&challenge);
        let b = other.respond(&challenge);
        samples.push(a.hamming_distance(&b)? as f64 / RESPONSE_BITS as f64);
    }
    DistributionSummary::from_samples(&samples, None)
}

/// Re-read the 512-bit key through a Bernoulli(d) flip channel per trial
/// and measure the response FHD on a shared fresh challenge. A perfectly
/// reproduced key gives 0; any flip avalanches to about 1/2, so the mean
/// approaches (1 - (1-d)^512) / 2.
pub fn noise_propagation(
    weak_intra: f64,
    trials: usize,
    seed: Seed,
) -> Result<DistributionSummary> {
    if !(0.0..=0.5).contains(&weak_intra) {
        return Err(Error::InvalidParameter(format!(
            "weak intra-FHD {weak_intra} outside [0, 1/2]"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("need >= 1 trial".into()));
    }
    let mut key_rng = stream_rng(seed, &[DOMAIN_STRONG_KEY, 0]);
    let base_key = BitVector::from_fn(KEY_BITS, |_| key_rng.random::<f64>() < 0.5);
    let device = build_device(&base_key)?;
    let mut samples = Vec::with_capacity(trials);
    for t in 0..trials as u64 {
        let mut ch_rng = stream_rng(seed, &[DOMAIN_STRONG_CHALLENGE, t]);
        let challenge = random_challenge(&mut ch_rng);
        let mut noise_rng = stream_rng(seed, &[DOMAIN_STRONG_FLIP, t]);
        let noisy = BitVector::from_fn(KEY_BITS, |i| {
            base_key.get(i) ^ (noise_rng.random::<f64>() < weak_intra)
        });
        let reread = build_device(&noisy)?;
        let a = device.respond(&challenge);
        let b = reread.respond(&challenge);
        samples.push(a.hamming_distance(&b)? as f64 / RESPONSE_BITS as f64);
    }
    DistributionSummary::from_samples(&samples, None)
}

/// Give the same fresh challenge to `devices` independent random-key
/// devices and summarize the pairwise response FHD.
pub fn inter_device_experiment(devices: usize, seed: Seed) -> Result<DistributionSummary> {
    if devices < 2 {
        return Err(Error::InsufficientData(format!(
            "inter-device FHD needs >= 2 devices, got {devices}"
        )));
    }
    let mut ch_rng = stream_rng(seed, &[DOMAIN_STRONG_CHALLENGE, u64::MAX]);
    let challenge = random_challenge(&mut ch_rng);
    let responses: Vec<BitVector> = (0..devices as u64)
        .map(|dev| {
            let mut rng = stream_rng(seed, &[DOMAIN_STRONG_KEY, dev]);
            let key = BitVector::from_fn(KEY_BITS, |_| rng.random::<f64>() < 0.5);
            build_device(&key).expect("fixed length").respond(&challenge)
        })
        .collect();
    let mut samples = Vec::with_capacity(devices * (devices - 1) / 2);
    for i in 0..responses.len() {
        for j in i + 1..responses.len() {
            samples.push(
                responses[i].hamming_distance(&responses[j])? as f64 / RESPONSE_BITS as f64,
            );
        }
    }
    DistributionSummary::from_samples(&samples, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hex(bytes: &[u8]) -> String {
        bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    // RFC 4231 test vectors for HMAC-SHA-256
    #[test]
    fn rfc4231_case_1() {
        let out = hmac_sha256(&[0x0b; 20], b"Hi There");
        assert_eq!(
            hex(&out),
            "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7"
        );
    }

    #[test]
    fn rfc4231_case_2() {
        let out = hmac_sha256(b"Jefe", b"what do ya want for nothing?");
        assert_eq!(
            hex(&out),
            "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843"
        );
    }

    #[test]
    fn rfc4231_case_3() {
        let out = hmac_sha256(&[0xaa; 20], &[0xdd; 50]);
        assert_eq!(
            hex(&out),
            "773ea91e36800e46854db8ebd09181a72959098b3ef8c122d9635514ced565fe"
        );
    }

    #[test]
    fn rfc4231_case_4() {
        let key: Vec<u8> = (1..=25).collect();
        let out = hmac_sha256(&key, &[0xcd; 50]);
        assert_eq!(
            hex(&out),
            "82558a389a443c0ea4cc819899f2083a85f0faa3e578f8077a2e3ff46729665b"
        );
    }

    #[test]
    fn rfc4231_case_5_truncated() {
        let out = hmac_sha256(&[0x0c; 20], b"Test With Truncation");
        assert_eq!(hex(&out[..16]), "a3b6167473100ee06e0c796c2955552b");
    }

    #[test]
    fn rfc4231_case_6_long_key() {
        let out = hmac_sha256(
            &[0xaa; 131],
            b"Test Using Larger Than Block-Size Key - Hash Key First",
        );
        assert_eq!(
            hex(&out),
            "60e431591ee0b67f0d8a26aacbf5b77f8e0bc6213728c5140546040f0ee37f54"
        );
    }

    #[test]
    fn rfc4231_case_7_long_key_and_data() {
        let out = hmac_sha256(
            &[0xaa; 131],
            b"This is a test using a larger than block-size key and a larger than block-size data. The key needs to be hashed before being used by the HMAC algorithm." as &[u8],
        );
        assert_eq!(
            hex(&out),
            "9b09ffa71b942fcb27635fbcd5b0e944bfdc63644f0713938a7f51535c3a35e2"
        );
    }

    #[test]
    fn device_is_deterministic() {
        let key = BitVector::from_fn(512, |i| i % 3 == 0);
        let a = build_device(&key).unwrap();
        let b = build_device(&key).unwrap();
        let ch = Challenge::new(b"fixed challenge".to_vec()).unwrap();
        assert_eq!(a.respond(&ch), b.respond(&ch));
        assert_eq!(a.respond(&ch).len(), 256);
        // the all-zero key is accepted
        let z = build_device(&BitVector::zeros(512)).unwrap();
        assert_eq!(z.respond(&ch), z.respond(&ch));
        assert!(build_device(&BitVector::zeros(511)).is_err());
    }

    #[test]
    fn single_key_bit_flip_avalanches() {
        let key = BitVector::from_fn(512, |i| (i * 5) % 7 < 3);
        let device = build_device(&key).unwrap();
        let mut flipped = key.clone();
        flipped.flip(200);
        let other = build_device(&flipped).unwrap();
        let ch = Challenge::new(b"avalanche probe".to_vec()).unwrap();
        let f = a_fhd(&device.respond(&ch), &other.respond(&ch));
        assert!((f - 0.5).abs() < 0.15, "single-flip FHD {f}");
    }

    fn a_fhd(a: &BitVector, b: &BitVector) -> f64 {
        a.hamming_distance(b).unwrap() as f64 / a.len() as f64
    }

    #[test]
    fn avalanche_experiment_endpoints() {
        let key = BitVector::from_fn(512, |i| i % 2 == 0);
        let device = build_device(&key).unwrap();
        let s = avalanche_experiment(&device, 0, 100, Seed(1)).unwrap();
        assert_eq!(s.mean, 0.0);
        let s = avalanche_experiment(&device, 1, 1000, Seed(2)).unwrap();
        close(s.mean, 0.5, 0.01);
        let s = avalanche_experiment(&device, 512, 1000, Seed(3)).unwrap();
        close(s.mean, 0.5, 0.01);
        assert!(avalanche_experiment(&device, 513, 10, Seed(4)).is_err());
    }

    #[test]
    fn single_challenge_bit_flip_avalanches() {
        let key = BitVector::from_fn(512, |i| (i * 11) % 13 < 6);
        let device = build_device(&key).unwrap();
        let mut rng = stream_rng(Seed(60), &[DOMAIN_STRONG_CHALLENGE, 0]);
        let mut samples = Vec::new();
        for t in 0..1000usize {
            let base = BitVector::from_fn(256, |_| rng.random::<f64>() < 0.5);
            let mut flipped = base.clone();
            flipped.flip(t % 256);
            let ca = Challenge::from_bits(&base).unwrap();
            let cb = Challenge::from_bits(&flipped).unwrap();
            samples.push(a_fhd(&device.respond(&ca), &device.respond(&cb)));
        }
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        close(mean, 0.5, 0.02);
    }

    #[test]
    fn noise_propagation_curve() {
        let s = noise_propagation(0.0, 200, Seed(5)).unwrap();
        assert_eq!(s.mean, 0.0);
        let s = noise_propagation(0.001, 2000, Seed(6)).unwrap();
        close(s.mean, 0.20, 0.02);
        let s = noise_propagation(0.05, 500, Seed(7)).unwrap();
        close(s.mean, 0.5, 0.01);
        // monotone, saturating toward 1/2
        let mut prev = -1.0;
        for &d in &[0.0, 1e-4, 1e-3, 1e-2, 1e-1] {
            let s = noise_propagation(d, 1500, Seed(8)).unwrap();
            assert!(s.mean >= prev - 0.01, "mean dropped at d={d}");
            prev = s.mean;
        }
        assert!(prev > 0.45);
    }

    #[test]
    fn inter_device_distribution() {
        let s = inter_device_experiment(400, Seed(9)).unwrap();
        close(s.mean, 0.5, 0.01);
        close(s.std_dev, 0.03125, 0.01);
    }
}
