//! Maximum-likelihood detectors.
//!
//! * [`detect_bruteforce`] scans an enumerated codebook with the direct metric
//!   `||Y - C Z||_F^2`. It is the reference every other detector must agree with.
//! * [`detect_stcm_conditional`] is the reduced-complexity detector for STCM
//!   Schemes 1 and 2: for each admissible state pair the orthogonal columns of
//!   the equivalent channel decouple `x1` and `x2`, so each symbol is found by a
//!   matched-filter projection followed by nearest-point quantization.
//! * [`detect_alamouti`] is the single-state (`M = 0`) case of the above.
//! * [`detect_exhaustive`] is an exact joint search over state pairs and both
//!   symbols that expands the metric as a quadratic form in per-column
//!   correlations. It serves Scheme 3 and MBM-MIMO.
//! * [`detect_simo`] handles the single-antenna family (classical SIMO, SSK, MBM-SIMO).
//!
//! Metric counts report the number of ML metric evaluations of the corresponding
//! search, as tabulated for each scheme, not the arithmetic actually executed.
//! Ties resolve to the lowest block index.

use num_complex::Complex64;

use crate::channel::ExtendedChannel;
use crate::codec::{Codeword, Scheme, SchemeConfig};
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::matrix::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    /// Decoded information block (MSB-first integer).
    pub block: u64,
    pub codeword: Codeword,
    pub metric_count: u64,
}

/// An enumerated codebook, `codewords[b]` carrying block `b`.
#[derive(Debug, Clone)]
pub struct Codebook {
    cfg: SchemeConfig,
    codewords: Vec<Codeword>,
}

impl Codebook {
    pub fn new(cfg: &SchemeConfig, cap: u64) -> Result<Self> {
        Ok(Self {
            cfg: cfg.clone(),
            codewords: cfg.enumerate_codewords(cap)?,
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn codewords(&self) -> &[Codeword] {
        &self.codewords
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }
}

fn check_shapes(y: &CMatrix, ch: &ExtendedChannel, cfg: &SchemeConfig) -> Result<()> {
    if y.rows() != cfg.rx() || y.cols() != cfg.slots() {
        return Err(Error::Contract(format!(
            "received matrix is {}x{}, {} expects {}x{}",
            y.rows(),
            y.cols(),
            cfg.scheme(),
            cfg.rx(),
            cfg.slots()
        )));
    }
    if ch.rx() != cfg.rx() || ch.states() != cfg.channel_columns() {
        return Err(Error::Contract(format!(
            "channel is {}x{}, {} expects {}x{}",
            ch.rx(),
            ch.states(),
            cfg.scheme(),
            cfg.rx(),
            cfg.channel_columns()
        )));
    }
    Ok(())
}

/// Direct-metric ML search over every codeword in `book`.
pub fn detect_bruteforce(y: &CMatrix, ch: &ExtendedChannel, book: &Codebook) -> Result<Detection> {
    check_shapes(y, ch, &book.cfg)?;
    let rx = ch.rx();
    let mut resid = vec![ZERO; rx];
    let mut best = (f64::INFINITY, 0usize);
    for (b, cw) in book.codewords.iter().enumerate() {
        let (entries, n) = cw.entries();
        let mut metric = 0.0;
        for slot in 0..y.cols() {
            resid.copy_from_slice(y.column(slot));
            for en in entries[..n].iter().filter(|e| e.slot == slot) {
                for (r, &h) in resid.iter_mut().zip(ch.column(en.row)) {
                    *r -= h * en.value;
                }
            }
            metric += resid.iter().map(|r| r.norm_sqr()).sum::<f64>();
        }
        if metric < best.0 {
            best = (metric, b);
        }
    }
    Ok(Detection {
        block: best.1 as u64,
        codeword: book.codewords[best.1],
        metric_count: book.codewords.len() as u64,
    })
}

#[inline]
fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// `min_x ||y - c x||^2` over the constellation, via `x_hat = c^H y / ||c||^2`.
///
/// Returns `(metric, label)`.
#[inline]
fn project_and_slice(
    y_energy: f64,
    c_energy: f64,
    corr: Complex64,
    constellation: &Constellation,
) -> (f64, u32) {
    if c_energy == 0.0 {
        return (y_energy, 0);
    }
    let x_hat = corr / c_energy;
    let label = constellation.nearest_label(x_hat);
    let x = constellation.point(label);
    (y_energy + c_energy * ((x - x_hat).norm_sqr() - x_hat.norm_sqr()), label)
}

/// Per-column correlations of one observation: `a[j] = h_j^H y_1`,
/// `b[j] = (h_j^H y_2)^*` and `e[j] = ||h_j||^2`. Every equivalent-channel
/// inner product is a sum of two of these, so a state pair costs O(1).
struct Projections {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    e: Vec<f64>,
    y_energy: f64,
}

impl Projections {
    fn new(y: &CMatrix, ch: &ExtendedChannel) -> Self {
        let cols = ch.states();
        let two_slot = y.cols() == 2;
        let mut a = Vec::with_capacity(cols);
        let mut b = Vec::with_capacity(if two_slot { cols } else { 0 });
        let mut e = Vec::with_capacity(cols);
        for j in 0..cols {
            let h = ch.column(j);
            a.push(dot_conj(h, y.column(0)));
            if two_slot {
                b.push(dot_conj(h, y.column(1)).conj());
            }
            e.push(norm_sqr(h));
        }
        Self {
            a,
            b,
            e,
            y_energy: y.frobenius_sqr(),
        }
    }

    /// `(c1^H y_eq, c2^H y_eq, ||c1||^2, ||c2||^2)` for 0-based states `[k, l, m, n]`.
    #[inline]
    fn pair(&self, half: usize, [k, l, m, n]: [usize; 4]) -> (Complex64, Complex64, f64, f64) {
        (
            self.a[k] + self.b[half + n],
            self.a[half + l] - self.b[m],
            self.e[k] + self.e[half + n],
            self.e[half + l] + self.e[m],
        )
    }
}

/// Searches state pairs with decoupled symbol decisions. `pairs` yields
/// 0-based `(k, l)` with the block prefix they encode.
fn conditional_search<I>(p: &Projections, half: usize, constellation: &Constellation, pairs: I) -> (u64, u32, u32)
where
    I: Iterator<Item = (usize, usize, u64)>,
{
    let mut best = (f64::INFINITY, 0u64, 0u32, 0u32);
    for (k, l, prefix) in pairs {
        let (a1, a2, n1, n2) = p.pair(half, [k, l, k, l]);
        let (m1, x1) = project_and_slice(p.y_energy, n1, a1, constellation);
        let (m2, x2) = project_and_slice(p.y_energy, n2, a2, constellation);
        let d = m1 + m2;
        if d < best.0 {
            best = (d, prefix, x1, x2);
        }
    }
    (best.1, best.2, best.3)
}

/// Reduced-complexity exact ML detector for STCM Schemes 1 and 2.
pub fn detect_stcm_conditional(y: &CMatrix, ch: &ExtendedChannel, cfg: &SchemeConfig) -> Result<Detection> {
    let scheme = cfg.scheme();
    if !matches!(scheme, Scheme::Stcm1 | Scheme::Stcm2) {
        return Err(Error::UnsupportedScheme(format!(
            "conditional detection needs orthogonal equivalent channels (Scheme 1 or 2), got {scheme}"
        )));
    }
    check_shapes(y, ch, cfg)?;
    let c = cfg.constellation().expect("STCM schemes always carry a constellation");
    let half = cfg.states_per_antenna();
    let q = cfg.order() as u64;
    let proj = Projections::new(y, ch);
    let (prefix, x1, x2, count) = if scheme == Scheme::Stcm1 {
        let pairs = (0..half).flat_map(|k| (0..half).map(move |l| (k, l, (k * half + l) as u64)));
        let (p, a, b) = conditional_search(&proj, half, c, pairs);
        (p, a, b, (half * half) as u64 * 2 * q)
    } else {
        let pairs = (0..half).map(|k| (k, k, k as u64));
        let (p, a, b) = conditional_search(&proj, half, c, pairs);
        (p, a, b, half as u64 * 2 * q)
    };
    Ok(finish(cfg, prefix, x1, x2, count))
}

/// Alamouti ML detection by orthogonal decoupling; `h` is the `R x 2` channel.
pub fn detect_alamouti(y: &CMatrix, h: &ExtendedChannel, cfg: &SchemeConfig) -> Result<Detection> {
    if cfg.scheme() != Scheme::Alamouti {
        return Err(Error::UnsupportedScheme(format!("expected alamouti, got {}", cfg.scheme())));
    }
    check_shapes(y, h, cfg)?;
    let c = cfg.constellation().expect("Alamouti always carries a constellation");
    let proj = Projections::new(y, h);
    let (_, x1, x2) = conditional_search(&proj, 1, c, std::iter::once((0, 0, 0)));
    Ok(finish(cfg, 0, x1, x2, 2 * cfg.order() as u64))
}

fn finish(cfg: &SchemeConfig, prefix: u64, x1: u32, x2: u32, metric_count: u64) -> Detection {
    let sb = cfg.symbol_bits();
    let block = (prefix << (2 * sb)) | (u64::from(x1) << sb) | u64::from(x2);
    Detection {
        block,
        codeword: cfg.encode_block(block),
        metric_count,
    }
}

/// Exact ML over all state pairs and symbol pairs for two-antenna schemes
/// (STCM 1/2/3, Alamouti, MBM-MIMO), using the expanded quadratic metric
/// `||y||^2 - 2Re(x1* a1) - 2Re(x2* a2) + |x1|^2 n1 + |x2|^2 n2 + 2Re(x1* x2 g)`.
/// For each `x1` the best `x2` is found by slicing, so the search is exact
/// while touching `Q` rather than `Q^2` candidates per state pair.
pub fn detect_exhaustive(y: &CMatrix, ch: &ExtendedChannel, cfg: &SchemeConfig) -> Result<Detection> {
    let scheme = cfg.scheme();
    if !matches!(
        scheme,
        Scheme::Stcm1 | Scheme::Stcm2 | Scheme::Stcm3 | Scheme::Alamouti | Scheme::MbmMimo
    ) {
        return Err(Error::UnsupportedScheme(format!(
            "joint two-symbol search does not apply to {scheme}"
        )));
    }
    check_shapes(y, ch, cfg)?;
    let half = cfg.states_per_antenna();
    let constellation = cfg.constellation();
    let points: Vec<Complex64> = match constellation {
        Some(c) => (0..c.order() as u32).map(|l| c.point(l)).collect(),
        None => vec![Complex64::new(1.0, 0.0)],
    };
    let energies: Vec<f64> = points.iter().map(|p| p.norm_sqr()).collect();
    let q = points.len();

    let single_slot = scheme == Scheme::MbmMimo;
    let proj = Projections::new(y, ch);
    let h = if scheme == Scheme::Alamouti { 1 } else { half };
    // cross[k * h + l] = h_k^H h_{h+l}
    let mut cross = vec![ZERO; h * h];
    if scheme != Scheme::Stcm1 && scheme != Scheme::Stcm2 {
        for k in 0..h {
            for l in 0..h {
                cross[k * h + l] = dot_conj(ch.column(k), ch.column(h + l));
            }
        }
    }
    let mut t1 = vec![0.0; q];
    let mut t2 = vec![0.0; q];

    let pairs: Vec<(usize, usize, u64)> = match scheme {
        Scheme::Alamouti => vec![(0, 0, 0)],
        Scheme::Stcm2 => (0..half).map(|k| (k, k, k as u64)).collect(),
        _ => (0..half)
            .flat_map(|k| (0..half).map(move |l| (k, l, (k * half + l) as u64)))
            .collect(),
    };
    let mut best = (f64::INFINITY, 0u64, 0usize, 0usize);
    for &(k, l, prefix) in &pairs {
        let (a1, a2, n1, n2, g) = if single_slot {
            (proj.a[k], proj.a[h + l], proj.e[k], proj.e[h + l], cross[k * h + l])
        } else {
            let (m, n) = if scheme == Scheme::Stcm3 { (l, k) } else { (k, l) };
            let (a1, a2, n1, n2) = proj.pair(h, [k, l, m, n]);
            // c1^H c2 = h_k^H h_{h+l} - h_m^H h_{h+n}; zero for Schemes 1 and 2
            let g = if scheme == Scheme::Stcm3 {
                cross[k * h + l] - cross[m * h + n]
            } else {
                ZERO
            };
            (a1, a2, n1, n2, g)
        };
        let y_energy = proj.y_energy;
        for i in 0..q {
            t1[i] = energies[i] * n1 - 2.0 * (points[i].conj() * a1).re;
            t2[i] = energies[i] * n2 - 2.0 * (points[i].conj() * a2).re;
        }
        for i in 0..q {
            let u = points[i].conj() * g;
            let base = y_energy + t1[i];
            match constellation {
                // for fixed x1 the metric is n2 |x2 - (a2 - x1 g*) / n2|^2 + const
                Some(c) if q >= 16 && n2 > 0.0 => {
                    let j = c.nearest_label((a2 - points[i] * g.conj()) / n2) as usize;
                    let metric = base + t2[j] + 2.0 * (u * points[j]).re;
                    if metric < best.0 {
                        best = (metric, prefix, i, j);
                    }
                }
                _ => {
                    for j in 0..q {
                        let metric = base + t2[j] + 2.0 * (u * points[j]).re;
                        if metric < best.0 {
                            best = (metric, prefix, i, j);
                        }
                    }
                }
            }
        }
    }
    let metric_count = (pairs.len() * q * q) as u64;
    Ok(finish(cfg, best.1, best.2 as u32, best.3 as u32, metric_count))
}

/// Exact ML for the single-antenna family: per channel state, the best symbol
/// is the quantized matched-filter output (or the unit carrier when `Q = 1`).
pub fn detect_simo(y: &CMatrix, ch: &ExtendedChannel, cfg: &SchemeConfig) -> Result<Detection> {
    let scheme = cfg.scheme();
    if !matches!(scheme, Scheme::ClassicalSimo | Scheme::Ssk | Scheme::MbmSimo) {
        return Err(Error::UnsupportedScheme(format!(
            "single-antenna detection does not apply to {scheme}"
        )));
    }
    check_shapes(y, ch, cfg)?;
    let yv = y.column(0);
    let y_energy = norm_sqr(yv);
    let mut best = (f64::INFINITY, 0usize, 0u32);
    for i in 0..ch.states() {
        let h = ch.column(i);
        let (metric, label) = match cfg.constellation() {
            Some(c) => project_and_slice(y_energy, norm_sqr(h), dot_conj(h, yv), c),
            None => (yv.iter().zip(h).map(|(a, b)| (a - b).norm_sqr()).sum(), 0),
        };
        if metric < best.0 {
            best = (metric, i, label);
        }
    }
    let sb = cfg.symbol_bits();
    let block = ((best.1 as u64) << sb) | u64::from(best.2);
    Ok(Detection {
        block,
        codeword: cfg.encode_block(block),
        metric_count: (ch.states() * cfg.order()) as u64,
    })
}

/// Which detector the simulator runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetectorChoice {
    /// Cheapest exact-ML detector for the scheme.
    #[default]
    Fast,
    /// Codebook scan with the direct metric (cross-validation).
    BruteForce,
}

/// Dispatches to the cheapest exact-ML detector for `cfg`.
pub fn detect_fast(y: &CMatrix, ch: &ExtendedChannel, cfg: &SchemeConfig) -> Result<Detection> {
    match cfg.scheme() {
        Scheme::ClassicalSimo | Scheme::Ssk | Scheme::MbmSimo => detect_simo(y, ch, cfg),
        Scheme::Stcm1 | Scheme::Stcm2 => detect_stcm_conditional(y, ch, cfg),
        Scheme::Alamouti => detect_alamouti(y, ch, cfg),
        Scheme::Stcm3 | Scheme::MbmMimo => detect_exhaustive(y, ch, cfg),
    }
}
