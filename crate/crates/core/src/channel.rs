//! Rayleigh block-fading extended channels, AWGN, and reproducible random streams.
//!
//! Every simulated block owns a [`RngStream`] keyed by `(seed, stream id)`.
//! The stream id is a hash of the SNR-point index and the block index, so a
//! block's samples never depend on which worker ran it or in what order.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::CMatrix;

/// A ChaCha8 keystream selected by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream id for block `block_index` of SNR point `snr_index`.
pub fn block_stream_id(snr_index: u64, block_index: u64) -> u64 {
    mix64(mix64(snr_index.wrapping_add(0x9e37_79b9_7f4a_7c15)) ^ block_index)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn for_block(seed: u64, snr_index: u64, block_index: u64) -> Self {
        Self::new(seed, block_stream_id(snr_index, block_index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// One `CN(0, variance)` sample: real and imaginary parts `N(0, variance/2)`.
    #[inline]
    pub fn complex_gaussian(&mut self, variance: f64) -> Complex64 {
        let s = (0.5 * variance).sqrt();
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        Complex64::new(s * re, s * im)
    }

    /// `width` uniformly random bits packed into the low end of a `u64`.
    #[inline]
    pub fn bits(&mut self, width: u32) -> u64 {
        if width == 0 {
            return 0;
        }
        let v = self.rng.next_u64();
        if width >= 64 {
            v
        } else {
            v >> (64 - width)
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// The `R x S` matrix of all selectable channel realizations.
///
/// Column `i` (0-based) is the receive vector `h_{i+1}`. For two-antenna
/// schemes the first `2^M` columns belong to antenna 1 and the rest to antenna 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedChannel {
    matrix: CMatrix,
}

impl ExtendedChannel {
    pub fn from_matrix(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rx(&self) -> usize {
        self.matrix.rows()
    }

    pub fn states(&self) -> usize {
        self.matrix.cols()
    }

    /// Channel vector of column `i` (0-based).
    #[inline]
    pub fn column(&self, i: usize) -> &[Complex64] {
        self.matrix.column(i)
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// Draws `R x S` i.i.d. `CN(0,1)` fading gains, column by column.
pub fn draw_extended_channel(rx: usize, states: usize, rng: &mut RngStream) -> ExtendedChannel {
    let mut data = Vec::with_capacity(rx * states);
    for _ in 0..rx * states {
        data.push(rng.complex_gaussian(1.0));
    }
    ExtendedChannel {
        matrix: CMatrix::from_columns(rx, states, data),
    }
}

/// Returns `signal + noise` with i.i.d. `CN(0, n0)` noise; `signal` is untouched.
pub fn add_awgn(signal: &CMatrix, n0: f64, rng: &mut RngStream) -> Result<CMatrix> {
    let mut out = signal.clone();
    add_awgn_in_place(&mut out, n0, rng)?;
    Ok(out)
}

pub fn add_awgn_in_place(signal: &mut CMatrix, n0: f64, rng: &mut RngStream) -> Result<()> {
    if n0 <= 0.0 || !n0.is_finite() {
        return Err(Error::Config(format!("noise density N0 must be positive and finite, got {n0}")));
    }
    for x in signal.as_mut_slice() {
        *x += rng.complex_gaussian(n0);
    }
    Ok(())
}
