//! Scheme configuration, bit-to-codeword encoders, and the STCM matrix algebra.
//!
//! Bit layout of every block: channel-state fields first (natural mapping),
//! then symbol fields (Gray labels). Two-antenna schemes order the fields as
//! `(k, l, x1, x2)`; Scheme 2 carries a single `k` field.
//!
//! Channel-state indices exposed on codewords are 1-based, matching the
//! `k, l, m, n in {1..2^M}` convention. Extended-channel columns are 0-based:
//! antenna 1 state `k` is column `k - 1`, antenna 2 state `l` is `2^M + l - 1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::bits::field;
use crate::channel::ExtendedChannel;
use crate::constellation::{Constellation, ConstellationKind};
use crate::error::{Error, Result};
use crate::matrix::CMatrix;

/// Default cap on the number of codewords an enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 16;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    ClassicalSimo,
    Ssk,
    MbmSimo,
    MbmMimo,
    Alamouti,
    Stcm1,
    Stcm2,
    Stcm3,
}

impl Scheme {
    pub const ALL: [Scheme; 8] = [
        Scheme::ClassicalSimo,
        Scheme::Ssk,
        Scheme::MbmSimo,
        Scheme::MbmMimo,
        Scheme::Alamouti,
        Scheme::Stcm1,
        Scheme::Stcm2,
        Scheme::Stcm3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::ClassicalSimo => "simo",
            Scheme::Ssk => "ssk",
            Scheme::MbmSimo => "mbm-simo",
            Scheme::MbmMimo => "mbm-mimo",
            Scheme::Alamouti => "alamouti",
            Scheme::Stcm1 => "stcm1",
            Scheme::Stcm2 => "stcm2",
            Scheme::Stcm3 => "stcm3",
        }
    }

    pub fn is_stcm(self) -> bool {
        matches!(self, Scheme::Stcm1 | Scheme::Stcm2 | Scheme::Stcm3)
    }

    /// Schemes whose codeword spans two time slots.
    pub fn is_two_slot(self) -> bool {
        self.is_stcm() || self == Scheme::Alamouti
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme '{s}'")))
    }
}

/// A fully validated link configuration.
///
/// For SSK, `mirrors` holds `log2 T` (the number of antenna-index bits) so that
/// SSK with `T = 2^M` and MBM with `M` mirrors share every derived quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    scheme: Scheme,
    mirrors: u32,
    order: usize,
    rx: usize,
    tx: usize,
    constellation: Option<Constellation>,
}

impl SchemeConfig {
    /// `order = 1` means no data symbols (plain MBM / SSK). `kind` is ignored then.
    pub fn new(
        scheme: Scheme,
        mirrors: u32,
        order: usize,
        kind: ConstellationKind,
        rx: usize,
    ) -> Result<Self> {
        if rx == 0 {
            return Err(Error::Config("R (receive antennas) must be at least 1".into()));
        }
        let needs_symbols = matches!(
            scheme,
            Scheme::ClassicalSimo | Scheme::Alamouti | Scheme::Stcm1 | Scheme::Stcm2 | Scheme::Stcm3
        );
        let uses_mirrors = !matches!(scheme, Scheme::ClassicalSimo | Scheme::Alamouti);
        if needs_symbols && order < 2 {
            return Err(Error::Config(format!("Q must be >= 2 for scheme {scheme}, got {order}")));
        }
        if scheme == Scheme::Ssk && order != 1 {
            return Err(Error::Config(format!("SSK carries no symbols: Q must be 1, got {order}")));
        }
        if uses_mirrors && mirrors == 0 {
            return Err(Error::Config(format!("M must be >= 1 for scheme {scheme}")));
        }
        if !uses_mirrors && mirrors != 0 {
            return Err(Error::Config(format!("M must be 0 for scheme {scheme}, got {mirrors}")));
        }
        if mirrors > 24 {
            return Err(Error::Config(format!("M = {mirrors} is too large")));
        }
        let constellation = if order >= 2 {
            Some(Constellation::new(kind, order)?)
        } else if order == 1 {
            None
        } else {
            return Err(Error::Config("Q must be at least 1".into()));
        };
        let tx = match scheme {
            Scheme::ClassicalSimo | Scheme::MbmSimo => 1,
            Scheme::Ssk => 1usize << mirrors,
            _ => 2,
        };
        let cfg = Self {
            scheme,
            mirrors,
            order,
            rx,
            tx,
            constellation,
        };
        if cfg.bits_per_codeword() > 62 {
            return Err(Error::Config(format!(
                "{} bits per codeword is beyond the supported 62",
                cfg.bits_per_codeword()
            )));
        }
        Ok(cfg)
    }

    /// SSK with `tx` transmit antennas (a power of two).
    pub fn ssk(tx: usize, rx: usize) -> Result<Self> {
        if tx < 2 || !tx.is_power_of_two() {
            return Err(Error::Config(format!("SSK needs T a power of two >= 2, got {tx}")));
        }
        Self::new(Scheme::Ssk, tx.trailing_zeros(), 1, ConstellationKind::Psk, rx)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn mirrors(&self) -> u32 {
        self.mirrors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rx(&self) -> usize {
        self.rx
    }

    pub fn tx(&self) -> usize {
        self.tx
    }

    pub fn constellation(&self) -> Option<&Constellation> {
        self.constellation.as_ref()
    }

    pub fn with_rx(&self, rx: usize) -> Result<Self> {
        let kind = self.constellation_kind();
        Self::new(self.scheme, self.mirrors, self.order, kind, rx)
    }

    pub fn constellation_kind(&self) -> ConstellationKind {
        self.constellation
            .as_ref()
            .map(Constellation::kind)
            .unwrap_or(ConstellationKind::Psk)
    }

    pub fn symbol_bits(&self) -> u32 {
        self.order.trailing_zeros()
    }

    /// Channel states selectable per transmit antenna (`2^M`; 1 without mirrors).
    pub fn states_per_antenna(&self) -> usize {
        1usize << self.mirrors
    }

    pub fn state_bits(&self) -> u32 {
        match self.scheme {
            Scheme::ClassicalSimo | Scheme::Alamouti => 0,
            Scheme::Ssk | Scheme::MbmSimo | Scheme::Stcm2 => self.mirrors,
            Scheme::MbmMimo | Scheme::Stcm1 | Scheme::Stcm3 => 2 * self.mirrors,
        }
    }

    pub fn symbols_per_codeword(&self) -> u32 {
        match self.scheme {
            Scheme::ClassicalSimo | Scheme::Ssk | Scheme::MbmSimo => 1,
            _ => 2,
        }
    }

    pub fn bits_per_codeword(&self) -> u32 {
        self.state_bits() + self.symbols_per_codeword() * self.symbol_bits()
    }

    pub fn slots(&self) -> usize {
        if self.scheme.is_two_slot() {
            2
        } else {
            1
        }
    }

    /// Number of columns of the extended channel matrix.
    pub fn channel_columns(&self) -> usize {
        match self.scheme {
            Scheme::ClassicalSimo => 1,
            Scheme::Ssk | Scheme::MbmSimo => self.states_per_antenna(),
            Scheme::Alamouti => 2,
            Scheme::MbmMimo | Scheme::Stcm1 | Scheme::Stcm2 | Scheme::Stcm3 => {
                2 * self.states_per_antenna()
            }
        }
    }

    /// Spectral efficiency in bits per channel use.
    pub fn eta(&self) -> f64 {
        self.bits_per_codeword() as f64 / self.slots() as f64
    }

    /// Average transmitted energy per codeword (unit-energy symbols, no power scaling).
    pub fn energy_per_codeword(&self) -> f64 {
        match self.scheme {
            Scheme::ClassicalSimo | Scheme::Ssk | Scheme::MbmSimo => 1.0,
            Scheme::MbmMimo => 2.0,
            _ => 4.0,
        }
    }

    /// Energy per information bit.
    pub fn eb(&self) -> f64 {
        self.energy_per_codeword() / self.bits_per_codeword() as f64
    }

    /// Noise density for a given `E_b/N_0` in dB.
    pub fn n0_for_snr_db(&self, snr_db: f64) -> f64 {
        self.eb() / 10f64.powf(snr_db / 10.0)
    }

    pub fn codeword_count(&self) -> u64 {
        1u64 << self.bits_per_codeword()
    }

    #[inline]
    fn symbol(&self, label: u64) -> Complex64 {
        match &self.constellation {
            Some(c) => c.point(label as u32),
            None => ONE,
        }
    }

    /// Maps a block (bits as an MSB-first integer) to its codeword.
    pub fn encode_block(&self, block: u64) -> Codeword {
        let total = self.bits_per_codeword();
        let m = self.mirrors;
        let sb = self.symbol_bits();
        let half = self.states_per_antenna();
        match self.scheme {
            Scheme::ClassicalSimo | Scheme::Ssk | Scheme::MbmSimo => {
                let sbits = self.state_bits();
                let state = field(block, total, 0, sbits) as usize + 1;
                let x = self.symbol(field(block, total, sbits, sb));
                Codeword::Single(MbmCodeword { state, symbol: x })
            }
            Scheme::MbmMimo => {
                let k = field(block, total, 0, m) as usize + 1;
                let l = field(block, total, m, m) as usize + 1;
                let x1 = self.symbol(field(block, total, 2 * m, sb));
                let x2 = self.symbol(field(block, total, 2 * m + sb, sb));
                Codeword::Dual(DualCodeword {
                    k,
                    l,
                    x1,
                    x2,
                    states: half,
                })
            }
            Scheme::Alamouti | Scheme::Stcm1 | Scheme::Stcm2 | Scheme::Stcm3 => {
                let sbits = self.state_bits();
                let (k, l) = match self.scheme {
                    Scheme::Alamouti => (1, 1),
                    Scheme::Stcm2 => {
                        let k = field(block, total, 0, m) as usize + 1;
                        (k, k)
                    }
                    _ => (
                        field(block, total, 0, m) as usize + 1,
                        field(block, total, m, m) as usize + 1,
                    ),
                };
                let (mm, nn) = match self.scheme {
                    Scheme::Stcm3 => (l, k),
                    _ => (k, l),
                };
                let x1 = self.symbol(field(block, total, sbits, sb));
                let x2 = self.symbol(field(block, total, sbits + sb, sb));
                Codeword::Stcm(StcmCodeword {
                    k,
                    l,
                    m: mm,
                    n: nn,
                    x1,
                    x2,
                    states: half,
                })
            }
        }
    }

    /// Encodes a bit block; its length must equal [`bits_per_codeword`](Self::bits_per_codeword).
    pub fn encode(&self, bits: &[u8]) -> Result<Codeword> {
        if bits.len() != self.bits_per_codeword() as usize {
            return Err(Error::Contract(format!(
                "bit block has {} bits, {} expects {}",
                bits.len(),
                self.scheme,
                self.bits_per_codeword()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Contract("bit values must be 0 or 1".into()));
        }
        Ok(self.encode_block(crate::bits::bits_to_value(bits)))
    }

    /// Recovers the block carried by a codeword of this scheme.
    pub fn decode_block(&self, cw: &Codeword) -> Result<u64> {
        let sb = self.symbol_bits();
        let m = self.mirrors;
        let label = |x: Complex64| -> u64 {
            self.constellation
                .as_ref()
                .map(|c| u64::from(c.nearest_label(x)))
                .unwrap_or(0)
        };
        let mismatch = || Error::Contract(format!("codeword shape does not belong to {}", self.scheme));
        match (self.scheme, cw) {
            (Scheme::ClassicalSimo | Scheme::Ssk | Scheme::MbmSimo, Codeword::Single(c)) => {
                Ok((((c.state - 1) as u64) << sb) | label(c.symbol))
            }
            (Scheme::MbmMimo, Codeword::Dual(c)) => Ok((((c.k - 1) as u64) << (m + 2 * sb))
                | (((c.l - 1) as u64) << (2 * sb))
                | (label(c.x1) << sb)
                | label(c.x2)),
            (Scheme::Alamouti, Codeword::Stcm(c)) => Ok((label(c.x1) << sb) | label(c.x2)),
            (Scheme::Stcm2, Codeword::Stcm(c)) => {
                Ok((((c.k - 1) as u64) << (2 * sb)) | (label(c.x1) << sb) | label(c.x2))
            }
            (Scheme::Stcm1 | Scheme::Stcm3, Codeword::Stcm(c)) => Ok((((c.k - 1) as u64)
                << (m + 2 * sb))
                | (((c.l - 1) as u64) << (2 * sb))
                | (label(c.x1) << sb)
                | label(c.x2)),
            _ => Err(mismatch()),
        }
    }

    /// All codewords in block order, `codewords[b]` carrying block `b`.
    pub fn enumerate_codewords(&self, cap: u64) -> Result<Vec<Codeword>> {
        let count = self.codeword_count();
        if count > cap {
            return Err(Error::EnumerationTooLarge { codewords: count, cap });
        }
        Ok((0..count).map(|b| self.encode_block(b)).collect())
    }
}

/// Transmission vector of a single-antenna, single-slot scheme: one nonzero
/// entry `symbol` at 1-based position `state`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbmCodeword {
    pub state: usize,
    pub symbol: Complex64,
}

/// Two antennas in one slot: antenna 1 sends `x1` over state `k`, antenna 2
/// sends `x2` over state `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualCodeword {
    pub k: usize,
    pub l: usize,
    pub x1: Complex64,
    pub x2: Complex64,
    /// States per antenna (`2^M`).
    pub states: usize,
}

/// Two-slot sparse codeword `Z` (a `2^(M+1) x 2` matrix).
///
/// Slot 1 carries `x1` at row `k` and `x2` at row `2^M + l`; slot 2 carries
/// `-x2*` at row `m` and `x1*` at row `2^M + n`. Alamouti is the `M = 0` case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StcmCodeword {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub x1: Complex64,
    pub x2: Complex64,
    /// States per antenna (`2^M`).
    pub states: usize,
}

/// One nonzero of a transmission matrix: 0-based channel column, 0-based slot, value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub row: usize,
    pub slot: usize,
    pub value: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Codeword {
    Single(MbmCodeword),
    Dual(DualCodeword),
    Stcm(StcmCodeword),
}

impl Codeword {
    pub fn slots(&self) -> usize {
        match self {
            Codeword::Stcm(_) => 2,
            _ => 1,
        }
    }

    /// Nonzero entries of the transmission matrix (at most four).
    pub fn entries(&self) -> ([Entry; 4], usize) {
        let e = |row, slot, value| Entry { row, slot, value };
        let pad = e(0, 0, Complex64::new(0.0, 0.0));
        match *self {
            Codeword::Single(c) => ([e(c.state - 1, 0, c.symbol), pad, pad, pad], 1),
            Codeword::Dual(c) => (
                [e(c.k - 1, 0, c.x1), e(c.states + c.l - 1, 0, c.x2), pad, pad],
                2,
            ),
            Codeword::Stcm(c) => (
                [
                    e(c.k - 1, 0, c.x1),
                    e(c.states + c.l - 1, 0, c.x2),
                    e(c.m - 1, 1, -c.x2.conj()),
                    e(c.states + c.n - 1, 1, c.x1.conj()),
                ],
                4,
            ),
        }
    }

    /// Dense transmission matrix with `rows` rows (the channel column count).
    pub fn to_dense(&self, rows: usize) -> CMatrix {
        let mut z = CMatrix::zeros(rows, self.slots());
        let (entries, n) = self.entries();
        for en in &entries[..n] {
            let cur = z.get(en.row, en.slot);
            z.set(en.row, en.slot, cur + en.value);
        }
        z
    }

    pub fn as_stcm(&self) -> Option<&StcmCodeword> {
        match self {
            Codeword::Stcm(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_mbm(&self) -> Option<&MbmCodeword> {
        match self {
            Codeword::Single(c) => Some(c),
            _ => None,
        }
    }
}

/// Noiseless received signal `C Z` (`R x slots`), computed from the sparse
/// nonzeros in `O(R)` per entry.
pub fn transmit(cw: &Codeword, ch: &ExtendedChannel) -> CMatrix {
    let mut y = CMatrix::zeros(ch.rx(), cw.slots());
    let (entries, n) = cw.entries();
    for en in &entries[..n] {
        let h = ch.column(en.row);
        for (o, &g) in y.column_mut(en.slot).iter_mut().zip(h) {
            *o += g * en.value;
        }
    }
    y
}

/// Equivalent `2R x 2` channel `[c1 c2]` for the state quadruplet `(k, l, m, n)` (1-based).
///
/// Row pair `r` is `(h_{k,r}, h_{2^M+l,r})` followed by `(h*_{2^M+n,r}, -h*_{m,r})`.
pub fn build_equivalent_channel(
    ch: &ExtendedChannel,
    k: usize,
    l: usize,
    m: usize,
    n: usize,
) -> Result<CMatrix> {
    let cols = ch.states();
    if cols < 2 || !cols.is_multiple_of(2) {
        return Err(Error::Contract(format!("extended channel with {cols} columns has no two-antenna split")));
    }
    let half = cols / 2;
    for (name, v) in [("k", k), ("l", l), ("m", m), ("n", n)] {
        if v == 0 || v > half {
            return Err(Error::Contract(format!("state index {name} = {v} outside 1..={half}")));
        }
    }
    let rx = ch.rx();
    let mut c1 = vec![Complex64::new(0.0, 0.0); 2 * rx];
    let mut c2 = c1.clone();
    equivalent_columns(ch, half, [k - 1, l - 1, m - 1, n - 1], &mut c1, &mut c2);
    c1.extend_from_slice(&c2);
    Ok(CMatrix::from_columns(2 * rx, 2, c1))
}

/// Writes the two equivalent-channel columns for 0-based states `[k, l, m, n]`.
#[inline]
pub(crate) fn equivalent_columns(
    ch: &ExtendedChannel,
    half: usize,
    [k, l, m, n]: [usize; 4],
    c1: &mut [Complex64],
    c2: &mut [Complex64],
) {
    let hk = ch.column(k);
    let hl = ch.column(half + l);
    let hm = ch.column(m);
    let hn = ch.column(half + n);
    for r in 0..ch.rx() {
        c1[2 * r] = hk[r];
        c1[2 * r + 1] = hn[r].conj();
        c2[2 * r] = hl[r];
        c2[2 * r + 1] = -hm[r].conj();
    }
}

/// Stacks a two-slot observation as `[y_{1,1}, y*_{2,1}, ..., y_{1,R}, y*_{2,R}]`.
pub fn equivalent_received(y: &CMatrix) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(2 * y.rows());
    for r in 0..y.rows() {
        out.push(y.get(r, 0));
        out.push(y.get(r, 1).conj());
    }
    out
}
