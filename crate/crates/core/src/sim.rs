//! Monte-Carlo simulation of decode-and-forward relaying.
//!
//! Per frame: the source encodes random information bits with `H1` and
//! broadcasts the codeword. The relay decodes it (or, in genie mode, knows
//! it) and forwards either the extended bits of the split-extension or a copy
//! of the information bits. A relay that fails to decode stays silent. The
//! destination decodes what it received.
//!
//! Frames are processed in fixed-size batches; batch `b` draws from an RNG
//! seeded with `seed + b`, so results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{sigma_from_snr_db, transmit_into, RelayChannelParams};
use crate::decoder::{Decoder, DecoderKind, DEFAULT_MAX_ITER};
use crate::encode::SystematicEncoder;
use crate::error::{Error, Result};
use crate::matrix::SparseBinaryMatrix;
use crate::split::SplitExtension;

const BATCH: usize = 32;
// Batches per stopping-rule check; fixed so that stopping is reproducible.
const ROUND: usize = 8;
const Z95: f64 = 1.96;
// The contour search looks at the running estimate after every round, so a
// single look uses a much wider interval (two-sided 99.9%).
const Z_STOP: f64 = 3.29;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Relay sends the extended bits; destination decodes with `H`.
    SplitExtend,
    /// Relay repeats the information bits; destination adds LLRs and decodes
    /// with `H1`.
    Repetition,
    /// No relay; destination decodes with `H1`.
    NoCooperation,
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "split_extend" | "split-extend" => Ok(Scenario::SplitExtend),
            "repetition" => Ok(Scenario::Repetition),
            "no_cooperation" | "no-cooperation" => Ok(Scenario::NoCooperation),
            _ => Err(Error::Config(format!(
                "unknown scenario {s:?} (split_extend | repetition | no_cooperation)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelayMode {
    /// The relay decodes its own noisy observation.
    #[default]
    Real,
    /// The relay always knows the source codeword.
    Genie,
}

impl std::str::FromStr for RelayMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(RelayMode::Real),
            "genie" => Ok(RelayMode::Genie),
            _ => Err(Error::Config(format!("unknown relay mode {s:?} (real | genie)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub relay_mode: RelayMode,
    pub channel: RelayChannelParams,
    pub decoder: DecoderKind,
    pub max_iter: usize,
    pub seed: u64,
    /// Transmit the all-zero codeword. Honoured only when the decoder passes
    /// a symmetry self-check on this code.
    pub all_zero: bool,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario, channel: RelayChannelParams) -> Self {
        ScenarioConfig {
            scenario,
            relay_mode: RelayMode::Real,
            channel,
            decoder: DecoderKind::Scms,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
            all_zero: false,
        }
    }
}

/// Frame and bit error counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimResult {
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub relay_failures: u64,
    /// Information bits per frame.
    pub info_bits: u64,
}

impl SimResult {
    pub fn fer(&self) -> f64 {
        ratio(self.frame_errors, self.frames)
    }

    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors, self.frames * self.info_bits)
    }

    /// 95% normal-approximation half-width of the FER.
    pub fn fer_ci(&self) -> f64 {
        half_width(self.fer(), self.frames)
    }

    pub fn ber_ci(&self) -> f64 {
        half_width(self.ber(), self.frames * self.info_bits)
    }

    /// 95% Wilson score interval of the FER; unlike the normal
    /// approximation it stays informative with zero errors.
    pub fn fer_wilson(&self) -> (f64, f64) {
        wilson(self.frame_errors, self.frames, Z95)
    }

    fn add(&mut self, o: &SimResult) {
        self.frames += o.frames;
        self.frame_errors += o.frame_errors;
        self.bit_errors += o.bit_errors;
        self.relay_failures += o.relay_failures;
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn half_width(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    Z95 * (p * (1.0 - p) / n as f64).sqrt()
}

fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// The matrices and encoder shared by all frames.
#[derive(Clone, Debug)]
pub struct SimCode {
    h1: SparseBinaryMatrix,
    extension: Option<SplitExtension>,
    encoder: SystematicEncoder,
}

impl SimCode {
    /// Code for all three scenarios.
    pub fn new(extension: &SplitExtension) -> Result<Self> {
        Ok(SimCode {
            h1: extension.h1().clone(),
            encoder: SystematicEncoder::new(extension.h1())?,
            extension: Some(extension.clone()),
        })
    }

    /// Code without a split-extension; the split-extend scenario is not
    /// available.
    pub fn point_to_point(h1: &SparseBinaryMatrix) -> Result<Self> {
        Ok(SimCode {
            h1: h1.clone(),
            encoder: SystematicEncoder::new(h1)?,
            extension: None,
        })
    }

    pub fn h1(&self) -> &SparseBinaryMatrix {
        &self.h1
    }

    pub fn encoder(&self) -> &SystematicEncoder {
        &self.encoder
    }

    pub fn extension(&self) -> Option<&SplitExtension> {
        self.extension.as_ref()
    }
}

/// Per-thread decoders and buffers.
#[derive(Clone)]
struct Worker {
    relay: Decoder,
    dest_h1: Decoder,
    dest_h: Option<Decoder>,
    info: Vec<u8>,
    llr: Vec<f64>,
    relay_llr: Vec<f64>,
    fwd_llr: Vec<f64>,
}

/// A configured simulation over one code.
#[derive(Clone)]
pub struct Simulator {
    code: SimCode,
    cfg: ScenarioConfig,
    all_zero: bool,
    template: Worker,
}

impl Simulator {
    pub fn new(code: &SimCode, cfg: &ScenarioConfig) -> Result<Self> {
        if cfg.scenario == Scenario::SplitExtend && code.extension.is_none() {
            return Err(Error::Config("split_extend scenario needs a split-extension".into()));
        }
        if cfg.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        let n1 = code.h1.n_cols();
        let dest_h = code
            .extension
            .as_ref()
            .map(|e| Decoder::new(e.h(), cfg.decoder, cfg.max_iter));
        let n = code.extension.as_ref().map_or(n1, |e| e.h().n_cols());
        let template = Worker {
            relay: Decoder::new(&code.h1, cfg.decoder, cfg.max_iter),
            dest_h1: Decoder::new(&code.h1, cfg.decoder, cfg.max_iter),
            dest_h,
            info: vec![0; code.encoder.k()],
            llr: vec![0.0; n],
            relay_llr: vec![0.0; n1],
            fwd_llr: vec![0.0; n.max(n1)],
        };
        let mut sim = Simulator {
            code: code.clone(),
            cfg: cfg.clone(),
            all_zero: false,
            template,
        };
        if cfg.all_zero {
            sim.all_zero = sim.symmetry_check(16)?;
            if !sim.all_zero {
                log::warn!("decoder symmetry check failed; simulating random codewords");
            }
        }
        Ok(sim)
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    /// Whether frames use the all-zero codeword.
    pub fn uses_all_zero(&self) -> bool {
        self.all_zero
    }

    /// Checks, on random codewords, that decoding the observation of `x`
    /// equals decoding its sign-flipped version as an all-zero observation,
    /// for every decoder this configuration uses.
    pub fn symmetry_check(&self, trials: usize) -> Result<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed ^ 0x5eed_5eed);
        let mut w = self.template.clone();
        let mut targets: Vec<(&SparseBinaryMatrix, &mut Decoder)> = vec![(&self.code.h1, &mut w.dest_h1)];
        if let (Some(e), Some(d)) = (self.code.extension.as_ref(), w.dest_h.as_mut()) {
            targets.push((e.h(), d));
        }
        let sigma = self.cfg.channel.sigma_sd.max(self.cfg.channel.sigma_rd);
        for (h, dec) in targets {
            let enc = SystematicEncoder::new(h)?;
            let mut llr = vec![0.0; h.n_cols()];
            for _ in 0..trials {
                let info: Vec<u8> = (0..enc.k()).map(|_| rng.random_range(0..2u8)).collect();
                let x = enc.encode(&info)?.into_bits();
                transmit_into(&x, sigma, &mut rng, &mut llr);
                let a = dec.decode(&llr)?;
                let flipped: Vec<f64> = llr.iter().zip(&x).map(|(&l, &b)| if b == 1 { -l } else { l }).collect();
                let b = dec.decode(&flipped)?;
                let mirrored = a
                    .final_llrs
                    .iter()
                    .zip(&b.final_llrs)
                    .zip(&x)
                    .all(|((&p, &q), &bit)| p == if bit == 1 { -q } else { q });
                if a.converged != b.converged || a.iterations_used != b.iterations_used || !mirrored {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Simulates exactly `n_frames` frames.
    pub fn run_frames(&self, n_frames: u64) -> SimResult {
        let batches = n_frames.div_ceil(BATCH as u64);
        let mut total = self.run_batches(0, batches, n_frames);
        total.info_bits = self.code.encoder.k() as u64;
        total
    }

    /// Simulates rounds of batches until `stop` says enough, or `max_frames`
    /// frames have been run.
    pub fn run_until(&self, max_frames: u64, mut stop: impl FnMut(&SimResult) -> bool) -> SimResult {
        let mut total = SimResult {
            info_bits: self.code.encoder.k() as u64,
            ..Default::default()
        };
        let mut next = 0u64;
        while total.frames < max_frames {
            let r = self.run_batches(next, ROUND as u64, max_frames - total.frames);
            next += ROUND as u64;
            total.add(&r);
            if stop(&total) {
                break;
            }
        }
        total
    }

    /// Batches `first..first + count`, capped at `limit` frames in total.
    fn run_batches(&self, first: u64, count: u64, limit: u64) -> SimResult {
        (0..count)
            .into_par_iter()
            .map_init(
                || self.template.clone(),
                |w, i| {
                    let start = i * BATCH as u64;
                    let n = (BATCH as u64).min(limit.saturating_sub(start));
                    let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed.wrapping_add(first + i));
                    let mut r = SimResult::default();
                    for _ in 0..n {
                        self.frame(w, &mut rng, &mut r);
                    }
                    r
                },
            )
            .reduce(SimResult::default, |mut a, b| {
                a.add(&b);
                a
            })
    }

    fn frame(&self, w: &mut Worker, rng: &mut ChaCha8Rng, out: &mut SimResult) {
        let ch = &self.cfg.channel;
        let enc = &self.code.encoder;
        let n1 = self.code.h1.n_cols();
        for b in w.info.iter_mut() {
            *b = if self.all_zero { 0 } else { rng.random_range(0..2u8) };
        }
        let x1 = enc.encode(&w.info).expect("info length matches").into_bits();
        transmit_into(&x1, ch.sigma_sd, rng, &mut w.llr[..n1]);

        // relay: the word it believes was sent, if it decoded at all
        let relay_word: Option<Vec<u8>> = match (self.cfg.scenario, self.cfg.relay_mode) {
            (Scenario::NoCooperation, _) => None,
            (_, RelayMode::Genie) => Some(x1.clone()),
            (_, RelayMode::Real) => {
                transmit_into(&x1, ch.sigma_sr, rng, &mut w.relay_llr);
                let r = w.relay.decode(&w.relay_llr).expect("length matches");
                r.converged.then_some(r.hard_bits)
            }
        };
        if self.cfg.scenario != Scenario::NoCooperation && relay_word.is_none() {
            out.relay_failures += 1;
        }

        let decoded = match self.cfg.scenario {
            Scenario::NoCooperation => w.dest_h1.decode(&w.llr[..n1]),
            Scenario::SplitExtend => {
                let ext = self.code.extension.as_ref().expect("checked in new");
                let tail = &mut w.llr[n1..];
                match &relay_word {
                    Some(x) => transmit_into(&ext.extended_bits_unchecked(x), ch.sigma_rd, rng, tail),
                    None => tail.fill(0.0),
                }
                w.dest_h.as_mut().expect("checked in new").decode(&w.llr)
            }
            Scenario::Repetition => {
                if let Some(x) = &relay_word {
                    let rep = enc.extract_info(x);
                    let fwd = &mut w.fwd_llr[..rep.len()];
                    transmit_into(&rep, ch.sigma_rd, rng, fwd);
                    for (&p, &l) in enc.info_positions().iter().zip(fwd.iter()) {
                        w.llr[p] += l;
                    }
                }
                w.dest_h1.decode(&w.llr[..n1])
            }
        }
        .expect("length matches");

        // an undecided (zero) posterior counts as an error whatever the bit,
        // which keeps the all-zero shortcut unbiased
        let errors = enc
            .info_positions()
            .iter()
            .zip(&w.info)
            .filter(|(&p, &b)| decoded.final_llrs[p] == 0.0 || decoded.hard_bits[p] != b)
            .count() as u64;
        out.frames += 1;
        out.bit_errors += errors;
        out.frame_errors += u64::from(errors > 0);
    }
}

/// Frame budget and stopping rule for each FER estimate of a contour search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContourOptions {
    /// Stop once this many frame errors are seen.
    pub min_errors: u64,
    pub max_frames: u64,
    /// Stop the SNR_RD bisection when the bracket is narrower than this.
    pub bracket_db: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        ContourOptions {
            min_errors: 200,
            max_frames: 200_000,
            bracket_db: 0.1,
        }
    }
}

/// One point of a target-FER contour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourPoint {
    pub snr_sd_db: f64,
    /// `(lo, hi)`: the target is missed at `lo` and met at `hi`. `None` when
    /// the target is not met even at the upper search bound.
    pub bracket: Option<(f64, f64)>,
    /// Estimate at the upper end of the bracket.
    pub at_hi: Option<SimResult>,
}

impl ContourPoint {
    /// Required SNR_RD, the bracket midpoint.
    pub fn snr_rd_db(&self) -> Option<f64> {
        self.bracket.map(|(lo, hi)| 0.5 * (lo + hi))
    }

    pub fn is_reachable(&self) -> bool {
        self.bracket.is_some()
    }
}

/// For each SNR_SD, the smallest SNR_RD (within `bounds`) at which the FER
/// falls below `target_fer`. Every estimate reuses the template seed, so
/// neighbouring SNRs see the same noise realisations. Grid points run in
/// parallel.
pub fn snr_contour(
    code: &SimCode,
    template: &ScenarioConfig,
    target_fer: f64,
    snr_sd_grid: &[f64],
    bounds: (f64, f64),
    opts: &ContourOptions,
) -> Result<Vec<ContourPoint>> {
    if !(target_fer > 0.0 && target_fer < 0.5) {
        return Err(Error::Config(format!(
            "target FER must lie in (0, 0.5), got {target_fer}"
        )));
    }
    if !(bounds.0 < bounds.1) {
        return Err(Error::Config(format!("empty SNR_RD search range {bounds:?}")));
    }
    snr_sd_grid
        .par_iter()
        .map(|&snr_sd| contour_point(code, template, target_fer, snr_sd, bounds, opts))
        .collect()
}

fn contour_point(
    code: &SimCode,
    template: &ScenarioConfig,
    target_fer: f64,
    snr_sd: f64,
    bounds: (f64, f64),
    opts: &ContourOptions,
) -> Result<ContourPoint> {
    let meets = |snr_rd: f64| -> Result<(bool, SimResult)> {
        let mut cfg = template.clone();
        cfg.channel = RelayChannelParams::new(
            template.channel.sigma_sr,
            sigma_from_snr_db(snr_sd),
            sigma_from_snr_db(snr_rd),
        )?;
        let sim = Simulator::new(code, &cfg)?;
        let r = sim.run_until(opts.max_frames, |r| {
            let (lo, hi) = wilson(r.frame_errors, r.frames, Z_STOP);
            r.frame_errors >= opts.min_errors || hi < target_fer || lo > target_fer
        });
        Ok((r.fer() <= target_fer, r))
    };
    let (ok_hi, r_hi) = meets(bounds.1)?;
    if !ok_hi {
        log::info!("SNR_SD {snr_sd} dB: target FER unreachable below {} dB", bounds.1);
        return Ok(ContourPoint {
            snr_sd_db: snr_sd,
            bracket: None,
            at_hi: Some(r_hi),
        });
    }
    let (mut lo, mut hi, mut at_hi) = (bounds.0, bounds.1, r_hi);
    let (ok_lo, r_lo) = meets(lo)?;
    if ok_lo {
        hi = lo;
        at_hi = r_lo;
    }
    while hi - lo > opts.bracket_db {
        let mid = 0.5 * (lo + hi);
        let (ok, r) = meets(mid)?;
        if ok {
            hi = mid;
            at_hi = r;
        } else {
            lo = mid;
        }
    }
    log::info!("SNR_SD {snr_sd} dB: SNR_RD in [{lo:.3}, {hi:.3}] dB");
    Ok(ContourPoint {
        snr_sd_db: snr_sd,
        bracket: Some((lo, hi)),
        at_hi: Some(at_hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_handles_zero() {
        let (lo, hi) = wilson(0, 1000, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.01);
        let (lo, hi) = wilson(50, 100, Z95);
        assert!(lo < 0.5 && hi > 0.5);
    }

    #[test]
    fn result_ratios() {
        let r = SimResult {
            frames: 100,
            frame_errors: 10,
            bit_errors: 30,
            relay_failures: 0,
            info_bits: 10,
        };
        assert_eq!(r.fer(), 0.1);
        assert_eq!(r.ber(), 0.03);
        assert!((r.fer_ci() - 1.96 * (0.09f64 / 100.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn parse_enums() {
        assert_eq!("split_extend".parse::<Scenario>().unwrap(), Scenario::SplitExtend);
        assert_eq!("genie".parse::<RelayMode>().unwrap(), RelayMode::Genie);
        assert!("relay".parse::<Scenario>().is_err());
    }
}
