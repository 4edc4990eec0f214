//! BI-AWGN links of the relay channel.
//!
//! All SNRs are Es/N0 per BPSK dimension: `SNR = 1 / (2 sigma^2)` for unit
//! energy symbols and per-dimension noise variance `sigma^2`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `-10 log10(2 sigma^2)`.
pub fn snr_db_from_sigma(sigma: f64) -> f64 {
    -10.0 * (2.0 * sigma * sigma).log10()
}

/// Inverse of [`snr_db_from_sigma`].
pub fn sigma_from_snr_db(snr_db: f64) -> f64 {
    (0.5 * 10f64.powf(-snr_db / 10.0)).sqrt()
}

/// `20 log10(delta)`, the gap `SNR_RD - SNR_SD` in dB.
pub fn discrepancy_db(delta: f64) -> f64 {
    20.0 * delta.log10()
}

/// Inverse of [`discrepancy_db`].
pub fn delta_from_db(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Noise levels of the source-relay, source-destination and relay-destination
/// links.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct RelayChannelParams {
    pub sigma_sr: f64,
    pub sigma_sd: f64,
    pub sigma_rd: f64,
}

#[derive(Deserialize)]
struct RawParams {
    sigma_sr: f64,
    sigma_sd: f64,
    sigma_rd: f64,
}

impl TryFrom<RawParams> for RelayChannelParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        RelayChannelParams::new(r.sigma_sr, r.sigma_sd, r.sigma_rd)
    }
}

impl RelayChannelParams {
    pub fn new(sigma_sr: f64, sigma_sd: f64, sigma_rd: f64) -> Result<Self> {
        for (name, s) in [("sigma_sr", sigma_sr), ("sigma_sd", sigma_sd), ("sigma_rd", sigma_rd)] {
            if !(s > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {s}")));
            }
        }
        let p = RelayChannelParams {
            sigma_sr,
            sigma_sd,
            sigma_rd,
        };
        if !p.is_degraded() {
            log::warn!("relay channel is not degraded (sigma_sr={sigma_sr}, sigma_sd={sigma_sd}, sigma_rd={sigma_rd})");
        }
        Ok(p)
    }

    /// Parameters from destination-side SNRs in dB; the source-relay link
    /// is given directly.
    pub fn from_snr_db(sigma_sr: f64, snr_sd_db: f64, snr_rd_db: f64) -> Result<Self> {
        Self::new(sigma_sr, sigma_from_snr_db(snr_sd_db), sigma_from_snr_db(snr_rd_db))
    }

    /// Channel discrepancy `sigma_sd / sigma_rd`.
    pub fn delta(&self) -> f64 {
        self.sigma_sd / self.sigma_rd
    }

    /// The noise parameter `sigma_rd`.
    pub fn sigma(&self) -> f64 {
        self.sigma_rd
    }

    /// Both relay-side links are better than the direct one.
    pub fn is_degraded(&self) -> bool {
        self.sigma_sr < self.sigma_sd && self.sigma_rd < self.sigma_sd
    }
}

/// Log-likelihood ratios, positive when bit 0 is more likely.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrVector {
    values: Vec<f64>,
}

impl LlrVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("LLR {i} is not finite")));
        }
        Ok(LlrVector { values })
    }

    /// All-erased vector.
    pub fn zeros(n: usize) -> Self {
        LlrVector { values: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl AsRef<[f64]> for LlrVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// BPSK over AWGN: `y = (1 - 2b) + sigma n`, `LLR = 2y / sigma^2`.
pub fn transmit<R: Rng + ?Sized>(bits: &[u8], sigma: f64, rng: &mut R) -> Result<LlrVector> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    let mut out = vec![0.0; bits.len()];
    transmit_into(bits, sigma, rng, &mut out);
    Ok(LlrVector { values: out })
}

/// Allocation-free [`transmit`]; `sigma` must be positive.
pub fn transmit_into<R: Rng + ?Sized>(bits: &[u8], sigma: f64, rng: &mut R, out: &mut [f64]) {
    debug_assert_eq!(bits.len(), out.len());
    let scale = 2.0 / (sigma * sigma);
    for (o, &b) in out.iter_mut().zip(bits) {
        let n: f64 = rng.sample(StandardNormal);
        let x = if b & 1 == 0 { 1.0 } else { -1.0 };
        *o = scale * (x + sigma * n);
    }
}
