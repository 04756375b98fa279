//! Equations of motion on the binary strategy space.
//!
//! Velocity follows the classic inertia + two-attractor rule with bits read as
//! reals `0.0`/`1.0`. Positions are resampled bit by bit with probability
//! `sigmoid(v[d])` of being 1.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::unit_draw;
use crate::space::StrategyPosition;

#[derive(Debug, Clone, PartialEq)]
pub struct Velocity(Vec<f64>);

impl Velocity {
    pub fn new(components: Vec<f64>) -> Self {
        Self(components)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Inertia `W`, self-belief `C1` and prestige bias `C2` of one agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTriple {
    pub inertia: f64,
    pub self_belief: f64,
    pub prestige_bias: f64,
}

impl CoefficientTriple {
    pub fn new(inertia: f64, self_belief: f64, prestige_bias: f64) -> Self {
        Self {
            inertia,
            self_belief,
            prestige_bias,
        }
    }

    fn check_finite(&self) -> Result<()> {
        for (name, value) in [
            ("inertia", self.inertia),
            ("self_belief", self.self_belief),
            ("prestige_bias", self.prestige_bias),
        ] {
            if !value.is_finite() {
                return Err(Error::param(
                    name,
                    format!("coefficient {value} is not finite"),
                ));
            }
        }
        Ok(())
    }
}

/// Position-to-bit transfer. Only the stochastic sigmoid rule exists today.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Binarization {
    #[default]
    #[serde(rename = "sigmoid-stochastic")]
    SigmoidStochastic,
}

fn check_dims(v: &Velocity, positions: &[&StrategyPosition]) -> Result<()> {
    for p in positions {
        if p.dim() != v.dim() {
            return Err(Error::DimensionMismatch {
                left: v.dim(),
                right: p.dim(),
            });
        }
    }
    Ok(())
}

/// `v'[d] = W·v[d] + C1·(pbest[d] − p[d]) + C2·(gbest[d] − p[d])`, unclamped.
pub fn update_velocity(
    v: &Velocity,
    p: &StrategyPosition,
    pbest: &StrategyPosition,
    gbest: &StrategyPosition,
    coeffs: &CoefficientTriple,
) -> Result<Velocity> {
    check_dims(v, &[p, pbest, gbest])?;
    coeffs.check_finite()?;
    let components = (0..v.dim())
        .map(|d| {
            let here = f64::from(p.bit(d));
            coeffs.inertia * v.0[d]
                + coeffs.self_belief * (f64::from(pbest.bit(d)) - here)
                + coeffs.prestige_bias * (f64::from(gbest.bit(d)) - here)
        })
        .collect();
    Ok(Velocity(components))
}

/// Same as [`update_velocity`] but each acceleration term is scaled by a fresh
/// uniform draw: per dimension in ascending order, first the `C1` multiplier
/// then the `C2` multiplier (2·D draws).
pub fn update_velocity_stochastic<R: RngCore + ?Sized>(
    v: &Velocity,
    p: &StrategyPosition,
    pbest: &StrategyPosition,
    gbest: &StrategyPosition,
    coeffs: &CoefficientTriple,
    rng: &mut R,
) -> Result<Velocity> {
    check_dims(v, &[p, pbest, gbest])?;
    coeffs.check_finite()?;
    let components = (0..v.dim())
        .map(|d| {
            let r1 = unit_draw(rng);
            let r2 = unit_draw(rng);
            let here = f64::from(p.bit(d));
            coeffs.inertia * v.0[d]
                + r1 * coeffs.self_belief * (f64::from(pbest.bit(d)) - here)
                + r2 * coeffs.prestige_bias * (f64::from(gbest.bit(d)) - here)
        })
        .collect();
    Ok(Velocity(components))
}

pub fn clamp_velocity(v: &Velocity, v_max: f64) -> Result<Velocity> {
    if !v_max.is_finite() || v_max <= 0.0 {
        return Err(Error::param(
            "v_max",
            format!("{v_max} must be positive and finite"),
        ));
    }
    Ok(Velocity(
        v.0.iter().map(|c| c.max(-v_max).min(v_max)).collect(),
    ))
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Resamples every bit: draw `u` on `[0, 1)`, bit is 1 iff `u < sigmoid(v[d])`.
/// Consumes exactly `D` draws in ascending dimension order.
pub fn update_position<R: RngCore + ?Sized>(
    p: &StrategyPosition,
    v: &Velocity,
    rng: &mut R,
) -> Result<StrategyPosition> {
    check_dims(v, &[p])?;
    let mut next = p.clone();
    for (d, &c) in v.0.iter().enumerate() {
        let u = unit_draw(rng);
        next.set_bit(d, u < sigmoid(c));
    }
    Ok(next)
}
