//! Monte Carlo BER engine.
//!
//! Blocks are grouped into fixed batches of [`BATCH_BLOCKS`]. Block `b` of SNR
//! point `i` always draws its bits, channel and noise from
//! `RngStream::for_block(seed, i, b)`, and the stop rule is evaluated after each
//! batch in batch order. Batches may run on any number of workers, but the
//! counts only ever depend on `(cfg, snr, stop, seed)`.

use std::time::Instant;

use rayon::prelude::*;

use crate::analysis::DistanceSpectrum;
use crate::bits::hamming;
use crate::channel::{add_awgn_in_place, draw_extended_channel, RngStream};
use crate::codec::{transmit, SchemeConfig, DEFAULT_ENUMERATION_CAP};
use crate::detect::{detect_bruteforce, detect_fast, Codebook, DetectorChoice};
use crate::error::{Error, Result};

/// Blocks per deterministic work unit.
pub const BATCH_BLOCKS: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_bit_errors: u64,
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_bit_errors: 200,
            max_bits: 100_000_000,
        }
    }
}

impl StopRule {
    pub fn new(min_bit_errors: u64, max_bits: u64) -> Result<Self> {
        if min_bit_errors == 0 || max_bits == 0 {
            return Err(Error::Config(format!(
                "stop rule needs positive limits, got min_bit_errors={min_bit_errors} max_bits={max_bits}"
            )));
        }
        Ok(Self {
            min_bit_errors,
            max_bits,
        })
    }
}

/// One measured point of a BER curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerRecord {
    /// `E_b/N0` in dB.
    pub snr_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    /// ABEP union bound at this point, when requested.
    pub theory: Option<f64>,
    /// Wall-clock seconds spent on the point.
    pub elapsed: f64,
}

impl BerRecord {
    /// Binomial standard deviation of `ber` given its own estimate.
    pub fn sigma(&self) -> f64 {
        if self.bits == 0 {
            return 0.0;
        }
        (self.ber * (1.0 - self.ber) / self.bits as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Worker threads; results do not depend on this.
    pub workers: usize,
    pub detector: DetectorChoice,
    /// Attach the ABEP bound to each record.
    pub theory: bool,
    /// Debug hook: transmit without noise.
    pub zero_noise: bool,
    /// Largest codebook enumerated for brute force or theory.
    pub enumeration_cap: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            detector: DetectorChoice::Fast,
            theory: false,
            zero_noise: false,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

/// A configured simulator; owns the worker pool and any precomputed tables.
pub struct Simulator {
    cfg: SchemeConfig,
    opts: SimOptions,
    pool: rayon::ThreadPool,
    codebook: Option<Codebook>,
    spectrum: Option<DistanceSpectrum>,
}

impl Simulator {
    pub fn new(cfg: &SchemeConfig, opts: SimOptions) -> Result<Self> {
        if opts.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", opts.workers)))?;
        let codebook = match opts.detector {
            DetectorChoice::BruteForce => Some(Codebook::new(cfg, opts.enumeration_cap)?),
            DetectorChoice::Fast => None,
        };
        let spectrum = if opts.theory {
            Some(pool.install(|| DistanceSpectrum::exact(cfg, opts.enumeration_cap))?)
        } else {
            None
        };
        Ok(Self {
            cfg: cfg.clone(),
            opts,
            pool,
            codebook,
            spectrum,
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    /// Bit errors over blocks `start..end` of SNR point `snr_index`.
    fn run_blocks(&self, snr_index: u64, n0: f64, seed: u64, start: u64, end: u64) -> Result<u64> {
        let cfg = &self.cfg;
        let width = cfg.bits_per_codeword();
        let mut errors = 0u64;
        for b in start..end {
            let mut rng = RngStream::for_block(seed, snr_index, b);
            let block = rng.bits(width);
            let cw = cfg.encode_block(block);
            let ch = draw_extended_channel(cfg.rx(), cfg.channel_columns(), &mut rng);
            let mut y = transmit(&cw, &ch);
            if !self.opts.zero_noise {
                add_awgn_in_place(&mut y, n0, &mut rng)?;
            }
            let det = match &self.codebook {
                Some(book) => detect_bruteforce(&y, &ch, book)?,
                None => detect_fast(&y, &ch, cfg)?,
            };
            errors += u64::from(hamming(block, det.block));
        }
        Ok(errors)
    }

    /// Simulates one point; `snr_index` selects the point's random streams.
    pub fn run_point(&self, snr_index: u64, snr_db: f64, stop: StopRule, seed: u64) -> Result<BerRecord> {
        if !snr_db.is_finite() {
            return Err(Error::Config(format!("snr_db must be finite, got {snr_db}")));
        }
        let started = Instant::now();
        let n0 = self.cfg.n0_for_snr_db(snr_db);
        let bits_per_block = u64::from(self.cfg.bits_per_codeword());
        let total_blocks = stop.max_bits.div_ceil(bits_per_block);
        let total_batches = total_blocks.div_ceil(BATCH_BLOCKS);
        let max_round = (4 * self.opts.workers) as u64;
        let mut bits = 0u64;
        let mut errors = 0u64;
        let mut next = 0u64;
        let mut round = 1u64;
        'outer: while next < total_batches {
            let count = round.min(total_batches - next);
            let results: Vec<Result<(u64, u64)>> = self.pool.install(|| {
                (next..next + count)
                    .into_par_iter()
                    .map(|batch| {
                        let start = batch * BATCH_BLOCKS;
                        let end = (start + BATCH_BLOCKS).min(total_blocks);
                        let e = self.run_blocks(snr_index, n0, seed, start, end)?;
                        Ok(((end - start) * bits_per_block, e))
                    })
                    .collect()
            });
            for r in results {
                let (b, e) = r?;
                bits += b;
                errors += e;
                next += 1;
                if errors >= stop.min_bit_errors || bits >= stop.max_bits {
                    break 'outer;
                }
            }
            round = (2 * round).min(max_round);
        }
        let theory = self.spectrum.as_ref().map(|s| s.abep_bound(self.cfg.rx(), n0));
        Ok(BerRecord {
            snr_db,
            bits,
            errors,
            ber: if bits == 0 { 0.0 } else { errors as f64 / bits as f64 },
            theory,
            elapsed: started.elapsed().as_secs_f64(),
        })
    }

    /// Simulates every point of `snr_list`, point `i` using stream index `i`.
    pub fn run_sweep(&self, snr_list: &[f64], stop: StopRule, seed: u64) -> Result<Vec<BerRecord>> {
        validate_snr_list(snr_list)?;
        snr_list
            .iter()
            .enumerate()
            .map(|(i, &s)| self.run_point(i as u64, s, stop, seed))
            .collect()
    }

    /// Theory-only records (`bits = errors = 0`).
    pub fn theory_curve(&self, snr_list: &[f64]) -> Result<Vec<BerRecord>> {
        validate_snr_list(snr_list)?;
        let spectrum = self
            .spectrum
            .as_ref()
            .ok_or_else(|| Error::Config("theory curve requested without theory enabled".into()))?;
        Ok(snr_list
            .iter()
            .map(|&snr_db| {
                let n0 = self.cfg.n0_for_snr_db(snr_db);
                BerRecord {
                    snr_db,
                    bits: 0,
                    errors: 0,
                    ber: 0.0,
                    theory: Some(spectrum.abep_bound(self.cfg.rx(), n0)),
                    elapsed: 0.0,
                }
            })
            .collect())
    }
}

fn validate_snr_list(snr_list: &[f64]) -> Result<()> {
    if snr_list.is_empty() {
        return Err(Error::Config("snr list is empty".into()));
    }
    if snr_list.iter().any(|s| !s.is_finite()) || snr_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("snr list must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Single point with default options (one worker, fast detector, no theory).
pub fn run_point(cfg: &SchemeConfig, snr_db: f64, stop: StopRule, seed: u64) -> Result<BerRecord> {
    Simulator::new(cfg, SimOptions::default())?.run_point(0, snr_db, stop, seed)
}

/// Sweep with default options.
pub fn run_sweep(cfg: &SchemeConfig, snr_list: &[f64], stop: StopRule, seed: u64) -> Result<Vec<BerRecord>> {
    Simulator::new(cfg, SimOptions::default())?.run_sweep(snr_list, stop, seed)
}
