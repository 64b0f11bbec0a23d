//! Unit-energy PSK and QAM signal sets with binary-reflected Gray labels.
//!
//! PSK points sit at `exp(j 2 pi q / Q)` and point `q` carries label `gray(q)`.
//! QAM points sit on the odd-integer grid, scaled to unit average energy; the
//! in-phase axis index is Gray coded into the high-order label bits and the
//! quadrature axis into the low-order bits. 8-QAM is the 4x2 rectangular grid.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::bits::{bits_to_value, value_to_bits};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstellationKind {
    Psk,
    Qam,
}

impl fmt::Display for ConstellationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstellationKind::Psk => "psk",
            ConstellationKind::Qam => "qam",
        })
    }
}

impl FromStr for ConstellationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "psk" => Ok(ConstellationKind::Psk),
            "qam" => Ok(ConstellationKind::Qam),
            other => Err(Error::Config(format!("unknown constellation kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Geometry {
    Psk,
    Rect {
        levels_i: usize,
        levels_q: usize,
        bits_q: u32,
        scale: f64,
    },
}

/// A Q-ary signal set. `points[j]` carries label `labels[j]`; points are kept in
/// geometric order (angular for PSK, column-major grid for QAM).
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    kind: ConstellationKind,
    order: usize,
    bits: u32,
    points: Vec<Complex64>,
    labels: Vec<u32>,
    by_label: Vec<Complex64>,
    geometry: Geometry,
}

#[inline]
pub(crate) fn gray(v: usize) -> usize {
    v ^ (v >> 1)
}

#[inline]
fn gray_inverse(mut g: usize) -> usize {
    let mut v = g;
    while g > 0 {
        g >>= 1;
        v ^= g;
    }
    v
}

impl Constellation {
    /// Builds the standard constellation for `(kind, order)`.
    ///
    /// PSK accepts any power of two `>= 2`; QAM accepts `4^k` (square grids) and 8.
    pub fn new(kind: ConstellationKind, order: usize) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::Config(format!(
                "unsupported constellation ({kind}, {order}): order must be a power of two >= 2"
            )));
        }
        let bits = order.trailing_zeros();
        match kind {
            ConstellationKind::Psk => Ok(Self::psk(order, bits)),
            ConstellationKind::Qam => {
                let (bits_i, bits_q) = if bits.is_multiple_of(2) {
                    (bits / 2, bits / 2)
                } else if order == 8 {
                    (2, 1)
                } else {
                    return Err(Error::Config(format!(
                        "unsupported constellation (qam, {order}): QAM needs a square order or 8"
                    )));
                };
                Ok(Self::rect(order, bits_i, bits_q))
            }
        }
    }

    fn psk(order: usize, bits: u32) -> Self {
        let points: Vec<Complex64> = (0..order)
            .map(|q| Complex64::from_polar(1.0, 2.0 * PI * q as f64 / order as f64))
            .collect();
        let labels: Vec<u32> = (0..order).map(|q| gray(q) as u32).collect();
        Self::assemble(ConstellationKind::Psk, order, bits, points, labels, Geometry::Psk)
    }

    fn rect(order: usize, bits_i: u32, bits_q: u32) -> Self {
        let levels_i = 1usize << bits_i;
        let levels_q = 1usize << bits_q;
        let energy = ((levels_i * levels_i - 1) + (levels_q * levels_q - 1)) as f64 / 3.0;
        let scale = energy.sqrt();
        let mut points = Vec::with_capacity(order);
        let mut labels = Vec::with_capacity(order);
        for a in 0..levels_i {
            for b in 0..levels_q {
                let re = (2 * a) as f64 - (levels_i - 1) as f64;
                let im = (2 * b) as f64 - (levels_q - 1) as f64;
                points.push(Complex64::new(re / scale, im / scale));
                labels.push(((gray(a) << bits_q) | gray(b)) as u32);
            }
        }
        let geometry = Geometry::Rect {
            levels_i,
            levels_q,
            bits_q,
            scale,
        };
        Self::assemble(ConstellationKind::Qam, order, bits_i + bits_q, points, labels, geometry)
    }

    fn assemble(
        kind: ConstellationKind,
        order: usize,
        bits: u32,
        points: Vec<Complex64>,
        labels: Vec<u32>,
        geometry: Geometry,
    ) -> Self {
        let mut by_label = vec![Complex64::new(0.0, 0.0); order];
        for (p, &l) in points.iter().zip(&labels) {
            by_label[l as usize] = *p;
        }
        Self {
            kind,
            order,
            bits,
            points,
            labels,
            by_label,
            geometry,
        }
    }

    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Point carrying `label`.
    #[inline]
    pub fn point(&self, label: u32) -> Complex64 {
        self.by_label[label as usize]
    }

    pub fn bits_to_symbol(&self, bits: &[u8]) -> Result<Complex64> {
        if bits.len() != self.bits as usize {
            return Err(Error::Contract(format!(
                "symbol field has {} bits, expected {}",
                bits.len(),
                self.bits
            )));
        }
        Ok(self.point(bits_to_value(bits) as u32))
    }

    /// Label of the constellation point nearest to `x`, as bits.
    pub fn symbol_to_bits(&self, x: Complex64) -> Vec<u8> {
        value_to_bits(u64::from(self.nearest_label(x)), self.bits as usize)
    }

    /// Label of the point nearest to `z` in Euclidean distance.
    ///
    /// PSK rounds the angle to the nearest sector; rectangular QAM rounds and
    /// clamps each axis independently. Both are exact nearest-point searches.
    #[inline]
    pub fn nearest_label(&self, z: Complex64) -> u32 {
        match self.geometry {
            Geometry::Psk if self.order == 2 => u32::from(z.re < 0.0),
            Geometry::Psk if self.order == 4 => {
                let q = if z.re.abs() >= z.im.abs() {
                    if z.re >= 0.0 {
                        0
                    } else {
                        2
                    }
                } else if z.im > 0.0 {
                    1
                } else {
                    3
                };
                gray(q) as u32
            }
            Geometry::Psk => {
                let sector = z.im.atan2(z.re) * self.order as f64 / (2.0 * PI);
                let q = (sector.round() as i64).rem_euclid(self.order as i64) as usize;
                gray(q) as u32
            }
            Geometry::Rect {
                levels_i,
                levels_q,
                bits_q,
                scale,
            } => {
                let a = axis_index(z.re * scale, levels_i);
                let b = axis_index(z.im * scale, levels_q);
                ((gray(a) << bits_q) | gray(b)) as u32
            }
        }
    }

    /// Geometric index (position in [`points`](Self::points)) of a label.
    pub fn index_of_label(&self, label: u32) -> usize {
        match self.geometry {
            Geometry::Psk => gray_inverse(label as usize),
            Geometry::Rect { levels_q, bits_q, .. } => {
                let a = gray_inverse((label >> bits_q) as usize);
                let b = gray_inverse((label as usize) & ((1 << bits_q) - 1));
                a * levels_q + b
            }
        }
    }

    /// Pairs of geometric indices that are nearest neighbours on the signal
    /// set's natural layout (around the circle for PSK, on the grid for QAM).
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        match self.geometry {
            Geometry::Psk => {
                if self.order == 2 {
                    vec![(0, 1)]
                } else {
                    (0..self.order).map(|q| (q, (q + 1) % self.order)).collect()
                }
            }
            Geometry::Rect { levels_i, levels_q, .. } => {
                let mut pairs = Vec::new();
                for a in 0..levels_i {
                    for b in 0..levels_q {
                        let j = a * levels_q + b;
                        if a + 1 < levels_i {
                            pairs.push((j, j + levels_q));
                        }
                        if b + 1 < levels_q {
                            pairs.push((j, j + 1));
                        }
                    }
                }
                pairs
            }
        }
    }

    pub fn average_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.order as f64
    }
}

#[inline]
fn axis_index(v: f64, levels: usize) -> usize {
    let idx = ((v + (levels - 1) as f64) / 2.0).round();
    idx.clamp(0.0, (levels - 1) as f64) as usize
}
