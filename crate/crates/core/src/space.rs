//! Binary strategy space and Hamming fitness.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::rng::unit_draw;

/// A point in the `D`-dimensional binary strategy space.
///
/// Bits are stored as `0`/`1` bytes, dimension 0 first. The textual form is a
/// string of `'0'`/`'1'` characters with dimension 0 leftmost.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StrategyPosition {
    bits: Vec<u8>,
}

impl StrategyPosition {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::param("bits", format!("bit value {b} is not 0 or 1")));
        }
        Ok(Self { bits })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn bit(&self, d: usize) -> u8 {
        self.bits[d]
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| 1 - b).collect(),
        }
    }

    pub fn flip(&mut self, d: usize) {
        self.bits[d] ^= 1;
    }

    pub(crate) fn set_bit(&mut self, d: usize, bit: bool) {
        self.bits[d] = u8::from(bit);
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }
}

impl fmt::Display for StrategyPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for StrategyPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StrategyPosition({self})")
    }
}

impl FromStr for StrategyPosition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidBit(other)),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(bits)
    }
}

/// Distance to the goal strategy; lower is better, zero means the goal is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fitness(pub u32);

impl Fitness {
    pub fn distance(self) -> u32 {
        self.0
    }

    pub fn is_goal(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn hamming_distance(a: &StrategyPosition, b: &StrategyPosition) -> Result<u32> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(a.bits.iter().zip(&b.bits).filter(|(x, y)| x != y).count() as u32)
}

pub fn fitness(position: &StrategyPosition, goal: &StrategyPosition) -> Result<Fitness> {
    hamming_distance(position, goal).map(Fitness)
}

/// Draws each bit independently with probability 1/2, one [`unit_draw`] per
/// dimension in ascending order.
pub fn random_position<R: RngCore + ?Sized>(dim: usize, rng: &mut R) -> Result<StrategyPosition> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let bits = (0..dim).map(|_| u8::from(unit_draw(rng) < 0.5)).collect();
    Ok(StrategyPosition { bits })
}
