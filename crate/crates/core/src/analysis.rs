//! Union-bound error analysis over Rayleigh fading.
//!
//! For a pairwise event `Z -> Z_hat` the unconditional PEP is
//!
//! ```text
//! P(Z -> Z_hat) = (1/pi) * int_0^{pi/2} prod_d (1 + lambda_d / (4 N0 sin^2 theta))^(-R) d theta
//! ```
//!
//! where `lambda_d` are the nonzero eigenvalues of `(Z - Z_hat)^H (Z - Z_hat)`.
//! The bit-error bound averages `P * e / b` over all ordered pairs of the
//! `2^b` codewords, `e` being the Hamming distance of their bit labels.
//!
//! Pair enumeration is independent of `R` and `N0`, so it is done once into a
//! [`DistanceSpectrum`] (distinct eigenvalue pairs with accumulated bit-error
//! weights); each bound evaluation is then a short sum over that spectrum.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bits::hamming;
use crate::channel::RngStream;
use crate::codec::{Codeword, Scheme, SchemeConfig};
use crate::constellation::ConstellationKind;
use crate::error::{Error, Result};
use crate::math::{binomial, integrate_theta_graded};

/// Relative threshold (against the Gram trace) below which an eigenvalue counts as zero.
pub const RANK_TOLERANCE: f64 = 1e-9;

/// Eigen-structure of one pairwise error event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseEvent {
    pub from: u64,
    pub to: u64,
    /// Nonzero eigenvalues in decreasing order; only the first `rank` are meaningful.
    pub lambdas: [f64; 2],
    pub rank: usize,
    pub bit_errors: u32,
}

impl PairwiseEvent {
    pub fn new(cfg: &SchemeConfig, from: u64, to: u64) -> Self {
        let (lambdas, rank) = pairwise_eigs(&cfg.encode_block(from), &cfg.encode_block(to));
        Self {
            from,
            to,
            lambdas,
            rank,
            bit_errors: hamming(from, to),
        }
    }

    pub fn nonzero_lambdas(&self) -> &[f64] {
        &self.lambdas[..self.rank]
    }
}

/// Gram matrix `(Z - Z_hat)^H (Z - Z_hat)` as `[g00, g11]` and `g01`.
fn difference_gram(a: &Codeword, b: &Codeword) -> (f64, f64, Complex64) {
    let mut diff: [(usize, usize, Complex64); 8] = [(0, 0, Complex64::new(0.0, 0.0)); 8];
    let mut len = 0;
    let (ea, na) = a.entries();
    let (eb, nb) = b.entries();
    let mut push = |row: usize, slot: usize, v: Complex64| {
        if let Some(d) = diff[..len].iter_mut().find(|d| d.0 == row && d.1 == slot) {
            d.2 += v;
        } else {
            diff[len] = (row, slot, v);
            len += 1;
        }
    };
    for e in &ea[..na] {
        push(e.row, e.slot, e.value);
    }
    for e in &eb[..nb] {
        push(e.row, e.slot, -e.value);
    }
    let mut g00 = 0.0;
    let mut g11 = 0.0;
    let mut g01 = Complex64::new(0.0, 0.0);
    for i in 0..len {
        let (ri, si, vi) = diff[i];
        if si == 0 {
            g00 += vi.norm_sqr();
        } else {
            g11 += vi.norm_sqr();
        }
        if si == 0 {
            for &(rj, sj, vj) in &diff[..len] {
                if sj == 1 && rj == ri {
                    g01 += vi.conj() * vj;
                }
            }
        }
    }
    (g00, g11, g01)
}

/// Eigenvalues (decreasing, clamped at zero) and rank of the difference Gram matrix.
pub fn pairwise_eigs(z: &Codeword, z_hat: &Codeword) -> ([f64; 2], usize) {
    let (a, c, b) = difference_gram(z, z_hat);
    let trace = a + c;
    if trace <= 0.0 {
        return ([0.0, 0.0], 0);
    }
    let half_gap = 0.5 * (a - c);
    let disc = (half_gap * half_gap + b.norm_sqr()).sqrt();
    let l1 = 0.5 * trace + disc;
    let det = a * c - b.norm_sqr();
    // det / l1 is the accurate route to the small eigenvalue
    let l2 = (det / l1).max(0.0);
    let tol = RANK_TOLERANCE * trace;
    let rank = usize::from(l1 > tol) + usize::from(l2 > tol);
    ([l1, if rank == 2 { l2 } else { 0.0 }], rank)
}

/// UPEP for nonzero eigenvalues `lambdas`, `rx` receive antennas and noise density `n0`.
pub fn upep(lambdas: &[f64], rx: usize, n0: f64) -> f64 {
    let scaled: Vec<f64> = lambdas.iter().map(|l| l / (4.0 * n0)).collect();
    let r = rx as i32;
    let c_min = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    integrate_theta_graded(|s2| scaled.iter().map(|&c| (s2 / (s2 + c)).powi(r)).product::<f64>(), c_min)
}

/// UPEP of an STCM (or any) pairwise event.
pub fn upep_stcm(event: &PairwiseEvent, rx: usize, n0: f64) -> Result<f64> {
    if event.rank == 0 {
        return Err(Error::Contract("pairwise event with rank 0 is not an error event".into()));
    }
    check_n0(n0)?;
    Ok(upep(event.nonzero_lambdas(), rx, n0))
}

/// UPEP of a single-antenna event with squared distance `dist_sq = ||z - z_hat||^2`.
pub fn upep_mbm(dist_sq: f64, rx: usize, n0: f64) -> Result<f64> {
    if dist_sq.is_nan() || dist_sq <= 0.0 {
        return Err(Error::Contract(format!("squared distance must be positive, got {dist_sq}")));
    }
    check_n0(n0)?;
    Ok(upep(&[dist_sq], rx, n0))
}

/// Upper bound on the UPEP from the `theta = pi/2` end of the integrand.
pub fn upep_chernoff(lambdas: &[f64], rx: usize, n0: f64) -> f64 {
    lambdas
        .iter()
        .map(|l| (1.0 + l / (4.0 * n0)).powi(-(rx as i32)))
        .product()
}

fn check_n0(n0: f64) -> Result<()> {
    if n0 > 0.0 && n0.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("N0 must be positive and finite, got {n0}")))
    }
}

/// One distinct eigenvalue signature within a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumLine {
    pub lambdas: [f64; 2],
    pub rank: usize,
    /// Number of ordered pairs with this signature.
    pub pairs: u64,
    /// Sum of bit errors over those pairs.
    pub bit_errors: u64,
}

/// Pairwise eigenvalue spectrum of a codebook.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSpectrum {
    pub lines: Vec<SpectrumLine>,
    pub codewords: u64,
    pub bits_per_codeword: u32,
}

type LineKey = (usize, i64, i64);

fn line_key(lambdas: [f64; 2], rank: usize) -> LineKey {
    (rank, (lambdas[0] * 1e9).round() as i64, (lambdas[1] * 1e9).round() as i64)
}

fn merge_into(acc: &mut BTreeMap<LineKey, SpectrumLine>, part: BTreeMap<LineKey, SpectrumLine>) {
    for (k, v) in part {
        acc.entry(k)
            .and_modify(|e| {
                e.pairs += v.pairs;
                e.bit_errors += v.bit_errors;
            })
            .or_insert(v);
    }
}

const SPECTRUM_CHUNK: usize = 32;

impl DistanceSpectrum {
    /// Exact spectrum over all ordered pairs of distinct codewords.
    ///
    /// Outer codewords are processed in fixed chunks and merged in chunk order,
    /// so the result does not depend on the worker count.
    pub fn exact(cfg: &SchemeConfig, cap: u64) -> Result<Self> {
        let book = cfg.enumerate_codewords(cap)?;
        let n = book.len();
        let chunks: Vec<BTreeMap<LineKey, SpectrumLine>> = (0..n.div_ceil(SPECTRUM_CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut map = BTreeMap::new();
                for a in c * SPECTRUM_CHUNK..((c + 1) * SPECTRUM_CHUNK).min(n) {
                    for b in 0..n {
                        if a == b {
                            continue;
                        }
                        let (lambdas, rank) = pairwise_eigs(&book[a], &book[b]);
                        if rank == 0 {
                            continue;
                        }
                        let e = u64::from(hamming(a as u64, b as u64));
                        map.entry(line_key(lambdas, rank))
                            .and_modify(|l: &mut SpectrumLine| {
                                l.pairs += 1;
                                l.bit_errors += e;
                            })
                            .or_insert(SpectrumLine {
                                lambdas,
                                rank,
                                pairs: 1,
                                bit_errors: e,
                            });
                    }
                }
                map
            })
            .collect();
        let mut acc = BTreeMap::new();
        for part in chunks {
            merge_into(&mut acc, part);
        }
        Ok(Self {
            lines: acc.into_values().collect(),
            codewords: n as u64,
            bits_per_codeword: cfg.bits_per_codeword(),
        })
    }

    pub fn min_rank(&self) -> usize {
        self.lines.iter().map(|l| l.rank).min().unwrap_or(0)
    }

    pub fn total_pairs(&self) -> u64 {
        self.lines.iter().map(|l| l.pairs).sum()
    }

    /// ABEP union bound at noise density `n0` with `rx` receive antennas.
    pub fn abep_bound(&self, rx: usize, n0: f64) -> f64 {
        let sum: f64 = self
            .lines
            .iter()
            .map(|l| upep(&l.lambdas[..l.rank], rx, n0) * l.bit_errors as f64)
            .sum();
        sum / (self.codewords as f64 * self.bits_per_codeword as f64)
    }
}

/// ABEP union bound of any scheme by exact pair enumeration.
pub fn abep_bound(cfg: &SchemeConfig, n0: f64, cap: u64) -> Result<f64> {
    check_n0(n0)?;
    Ok(DistanceSpectrum::exact(cfg, cap)?.abep_bound(cfg.rx(), n0))
}

/// ABEP union bound for an STCM (or Alamouti) configuration.
pub fn abep_bound_stcm(cfg: &SchemeConfig, n0: f64, cap: u64) -> Result<f64> {
    if !cfg.scheme().is_two_slot() {
        return Err(Error::UnsupportedScheme(format!("{} is not a space-time scheme", cfg.scheme())));
    }
    abep_bound(cfg, n0, cap)
}

/// ABEP bound of MBM-SIMO with `mirrors` RF mirrors and a `q`-ary constellation.
///
/// Plain MBM (`q = 1`) uses the fixed reference `z = e_1`: every wrong state is
/// at squared distance 2, so the bound is `(1/M) sum_{z_hat} P(2) n(z, z_hat)`.
/// Symbol-aided MBM falls back to full enumeration.
pub fn abep_bound_mbm(
    mirrors: u32,
    q: usize,
    kind: ConstellationKind,
    rx: usize,
    n0: f64,
    cap: u64,
) -> Result<f64> {
    check_n0(n0)?;
    if mirrors == 0 {
        return Err(Error::Config("MBM needs at least one mirror".into()));
    }
    if q <= 1 {
        let p = upep_mbm(2.0, rx, n0)?;
        let weight: u64 = (1..1u64 << mirrors).map(|zh| u64::from(zh.count_ones())).sum();
        return Ok(p * weight as f64 / f64::from(mirrors));
    }
    let cfg = SchemeConfig::new(Scheme::MbmSimo, mirrors, q, kind, rx)?;
    abep_bound(&cfg, n0, cap)
}

/// ABEP bound of SSK with `tx` transmit antennas (identical to plain MBM with `log2 tx` mirrors).
pub fn abep_bound_ssk(tx: usize, rx: usize, n0: f64) -> Result<f64> {
    if tx < 2 || !tx.is_power_of_two() {
        return Err(Error::Config(format!("SSK needs T a power of two >= 2, got {tx}")));
    }
    abep_bound_mbm(tx.trailing_zeros(), 1, ConstellationKind::Psk, rx, n0, u64::MAX)
}

/// Minimum rank of the difference Gram matrix over all pairs of distinct codewords.
pub fn diversity_min(cfg: &SchemeConfig, cap: u64) -> Result<usize> {
    Ok(DistanceSpectrum::exact(cfg, cap)?.min_rank())
}

/// A uniformly sampled spectrum over ordered pairs of distinct codewords.
#[derive(Debug, Clone)]
pub struct SampledSpectrum {
    lines: Vec<(SpectrumLine, u64)>,
    samples: u64,
    codewords: u64,
    bits_per_codeword: u32,
}

/// Default number of sampled pairs.
pub const DEFAULT_PAIR_SAMPLES: u64 = 1_000_000;

/// A sampled bound with its 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledBound {
    pub estimate: f64,
    pub half_width: f64,
}

impl SampledSpectrum {
    /// Samples `samples` ordered pairs `(Z, Z_hat)`, `Z != Z_hat`, uniformly.
    /// The codebook is never materialised, so any codeword count is allowed.
    pub fn sample(cfg: &SchemeConfig, samples: u64, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::Config("pair sample count must be positive".into()));
        }
        let bits = cfg.bits_per_codeword();
        let n = cfg.codeword_count();
        let mut rng = RngStream::new(seed, 0x5a3b_1e00_0000_0001);
        let mut map: BTreeMap<LineKey, (SpectrumLine, u64)> = BTreeMap::new();
        for _ in 0..samples {
            let a = rng.bits(bits);
            let mut b = rng.bits(bits);
            while b == a {
                b = rng.bits(bits);
            }
            let ev = PairwiseEvent::new(cfg, a, b);
            let e = u64::from(ev.bit_errors);
            map.entry(line_key(ev.lambdas, ev.rank))
                .and_modify(|(l, sq)| {
                    l.pairs += 1;
                    l.bit_errors += e;
                    *sq += e * e;
                })
                .or_insert((
                    SpectrumLine {
                        lambdas: ev.lambdas,
                        rank: ev.rank,
                        pairs: 1,
                        bit_errors: e,
                    },
                    e * e,
                ));
        }
        Ok(Self {
            lines: map.into_values().collect(),
            samples,
            codewords: n,
            bits_per_codeword: bits,
        })
    }

    pub fn abep_bound(&self, rx: usize, n0: f64) -> SampledBound {
        let n = self.samples as f64;
        let mut mean = 0.0;
        let mut second = 0.0;
        for (l, sq) in &self.lines {
            if l.rank == 0 {
                continue;
            }
            let p = upep(&l.lambdas[..l.rank], rx, n0);
            mean += p * l.bit_errors as f64;
            second += p * p * *sq as f64;
        }
        mean /= n;
        second /= n;
        let var = (second - mean * mean).max(0.0);
        let scale = (self.codewords - 1) as f64 / self.bits_per_codeword as f64;
        SampledBound {
            estimate: scale * mean,
            half_width: scale * 1.96 * (var / n).sqrt(),
        }
    }
}

/// Least-squares slope magnitude of `log10(values)` against `snr_db / 10`.
pub fn loglog_slope(snr_db: &[f64], values: &[f64]) -> f64 {
    let n = snr_db.len() as f64;
    let xs: Vec<f64> = snr_db.iter().map(|s| s / 10.0).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.log10()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -sxy / sxx
}

/// One row of the rate / diversity / complexity comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffRow {
    pub name: &'static str,
    /// Constellation order used for this row.
    pub q: u64,
    pub eta: f64,
    pub d_min: u32,
    /// Number of ML metric evaluations per decision.
    pub complexity: u64,
}

/// Rows that cannot be evaluated (e.g. no integer `Q` reaches the rate) are `None`.
pub type TradeoffTable = Vec<(&'static str, Option<TradeoffRow>)>;

pub const TRADEOFF_SCHEMES: [&str; 8] = [
    "Classical SIMO",
    "Alamouti's STBC",
    "STBC-SM",
    "MBM-SIMO",
    "MBM-MIMO",
    "STCM Scheme 1",
    "STCM Scheme 2",
    "STCM Scheme 3",
];

/// Antenna-pair bits of STBC-SM with `t` transmit antennas: `floor(log2 binom(t, 2))`.
pub fn stbc_sm_pair_bits(t: u64) -> u32 {
    let pairs = binomial(t, 2) as u64;
    if pairs == 0 {
        0
    } else {
        63 - pairs.leading_zeros()
    }
}

fn row(name: &'static str, m: u32, q: u64, t: u64) -> TradeoffRow {
    let lq = f64::from(q.trailing_zeros());
    let mf = f64::from(m);
    let c = stbc_sm_pair_bits(t);
    let (eta, d_min, complexity) = match name {
        "Classical SIMO" => (lq, 1, q),
        "Alamouti's STBC" => (lq, 2, 2 * q),
        "STBC-SM" => (0.5 * f64::from(c) + lq, 2, (1u64 << (c + 1)) * q),
        "MBM-SIMO" => (mf + lq, 1, (1u64 << m) * q),
        "MBM-MIMO" => (2.0 * mf + 2.0 * lq, 1, (1u64 << (2 * m)) * q * q),
        "STCM Scheme 1" => (mf + lq, 1, (1u64 << (2 * m + 1)) * q),
        "STCM Scheme 2" => (0.5 * mf + lq, 2, (1u64 << (m + 1)) * q),
        "STCM Scheme 3" => (mf + lq, 2, (1u64 << (2 * m)) * q * q),
        _ => unreachable!("unknown trade-off row {name}"),
    };
    TradeoffRow {
        name,
        q,
        eta,
        d_min,
        complexity,
    }
}

/// Trade-off rows with a common `(M, Q)`; `t` is the STBC-SM antenna count.
pub fn tradeoff_table(m: u32, q: u64, t: u64) -> TradeoffTable {
    TRADEOFF_SCHEMES
        .iter()
        .map(|&name| (name, Some(row(name, m, q, t))))
        .collect()
}

/// Trade-off rows at a common data rate `eta`: each row picks the constellation
/// order that reaches `eta` with `M` mirrors (or `t` antennas for STBC-SM).
pub fn rate_matched_table(eta: f64, m: u32, t: u64) -> TradeoffTable {
    TRADEOFF_SCHEMES
        .iter()
        .map(|&name| {
            let base = row(name, m, 1, t);
            // rate grows by log2 Q for single-symbol rows, 2 log2 Q for MBM-MIMO
            let per_bit = if name == "MBM-MIMO" { 2.0 } else { 1.0 };
            let needed = (eta - base.eta) / per_bit;
            let min_bits = if matches!(name, "MBM-SIMO" | "MBM-MIMO") { 0.0 } else { 1.0 };
            let ok = needed >= min_bits && (needed - needed.round()).abs() < 1e-12 && needed < 32.0;
            (name, ok.then(|| row(name, m, 1u64 << needed.round() as u32, t)))
        })
        .collect()
}

/// Plain-text rendering of a trade-off table.
pub fn format_tradeoff_table(table: &TradeoffTable) -> String {
    let mut out = format!("{:<16} {:>6} {:>8} {:>6} {:>12}\n", "scheme", "Q", "eta", "D_min", "complexity");
    for (name, row) in table {
        match row {
            Some(r) => out.push_str(&format!(
                "{:<16} {:>6} {:>8} {:>6} {:>12}\n",
                name, r.q, r.eta, r.d_min, r.complexity
            )),
            None => out.push_str(&format!("{:<16} {:>6} {:>8} {:>6} {:>12}\n", name, "-", "-", "-", "-")),
        }
    }
    out
}
