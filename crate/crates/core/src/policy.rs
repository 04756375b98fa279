//! Feedback-driven adaptation of self-belief and prestige bias.
//!
//! Improvement moves weight from prestige bias to self-belief, deterioration
//! moves it back. Reactive agents respond to every iteration's feedback at
//! full step. Perceptive agents follow an exponential moving average of the
//! feedback with a step that grows from `delta·alpha` to `delta` as
//! performance pressure ramps up. Inertia is never adapted.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::CoefficientTriple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tendency {
    Reactive,
    Perceptive,
}

impl Tendency {
    pub const ALL: [Tendency; 2] = [Tendency::Reactive, Tendency::Perceptive];

    pub fn as_str(&self) -> &'static str {
        match self {
            Tendency::Reactive => "reactive",
            Tendency::Perceptive => "perceptive",
        }
    }
}

impl fmt::Display for Tendency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffBounds {
    pub min: f64,
    pub max: f64,
}

impl CoeffBounds {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min >= 0.0 && min <= max) {
            return Err(Error::param(
                "coeff_bounds",
                format!("[{min}, {max}] is not a valid range"),
            ));
        }
        Ok(Self { min, max })
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.min).min(self.max)
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.min..=self.max).contains(&x)
    }

    pub fn contains_triple(&self, c: &CoefficientTriple) -> bool {
        self.contains(c.inertia) && self.contains(c.self_belief) && self.contains(c.prestige_bias)
    }
}

impl Default for CoeffBounds {
    fn default() -> Self {
        Self { min: 0.0, max: 2.0 }
    }
}

/// Step size, smoothing and bounds shared by both tendencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyParams {
    pub delta: f64,
    pub alpha: f64,
    pub bounds: CoeffBounds,
}

impl PolicyParams {
    pub fn validate(&self) -> Result<()> {
        check_delta(self.delta)?;
        check_alpha(self.alpha)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::param(
            "delta",
            format!("{delta} must be positive and finite"),
        ));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", format!("{alpha} must be in (0, 1]")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyState {
    pub tendency: Tendency,
    pub feedback_ema: f64,
    pub last_fitness: u32,
    pub pressure_horizon: u32,
}

impl PolicyState {
    pub fn new(tendency: Tendency, initial_fitness: u32, pressure_horizon: u32) -> Self {
        Self {
            tendency,
            feedback_ema: 0.0,
            last_fitness: initial_fitness,
            pressure_horizon,
        }
    }

    /// Feeds the fitness observed at iteration `t` and returns the adapted coefficients.
    pub fn observe(
        &mut self,
        coeffs: &CoefficientTriple,
        new_fitness: u32,
        t: u32,
        params: &PolicyParams,
    ) -> Result<CoefficientTriple> {
        let signal = feedback_signal(self.last_fitness, new_fitness);
        let next = match self.tendency {
            Tendency::Reactive => reactive_update(coeffs, signal, params.delta, &params.bounds)?,
            Tendency::Perceptive => {
                let (state, next) = perceptive_update(
                    self,
                    coeffs,
                    signal,
                    t,
                    params.alpha,
                    params.delta,
                    &params.bounds,
                )?;
                *self = state;
                next
            }
        };
        self.last_fitness = new_fitness;
        Ok(next)
    }
}

/// Positive when fitness improved (distance shrank).
pub fn feedback_signal(prev_fitness: u32, new_fitness: u32) -> f64 {
    f64::from(prev_fitness) - f64::from(new_fitness)
}

pub fn reactive_update(
    coeffs: &CoefficientTriple,
    signal: f64,
    delta: f64,
    bounds: &CoeffBounds,
) -> Result<CoefficientTriple> {
    check_delta(delta)?;
    Ok(shift(coeffs, signal, delta, bounds))
}

fn shift(
    coeffs: &CoefficientTriple,
    direction: f64,
    step: f64,
    bounds: &CoeffBounds,
) -> CoefficientTriple {
    let towards_self = if direction > 0.0 {
        step
    } else if direction < 0.0 {
        -step
    } else {
        return *coeffs;
    };
    CoefficientTriple {
        inertia: coeffs.inertia,
        self_belief: bounds.clamp(coeffs.self_belief + towards_self),
        prestige_bias: bounds.clamp(coeffs.prestige_bias - towards_self),
    }
}

/// Linear ramp `min(1, t / horizon)`.
pub fn pressure(t: u32, horizon: u32) -> f64 {
    (f64::from(t) / f64::from(horizon.max(1))).min(1.0)
}

/// Step magnitude of a perceptive agent at iteration `t`.
pub fn perceptive_step(t: u32, horizon: u32, alpha: f64, delta: f64) -> f64 {
    let p = pressure(t, horizon);
    delta * (p + (1.0 - p) * alpha)
}

pub fn perceptive_update(
    state: &PolicyState,
    coeffs: &CoefficientTriple,
    signal: f64,
    t: u32,
    alpha: f64,
    delta: f64,
    bounds: &CoeffBounds,
) -> Result<(PolicyState, CoefficientTriple)> {
    check_alpha(alpha)?;
    check_delta(delta)?;
    if state.pressure_horizon == 0 {
        return Err(Error::param("pressure_horizon", "must be at least 1"));
    }
    if !signal.is_finite() {
        return Err(Error::param("signal", format!("{signal} is not finite")));
    }
    let ema = (1.0 - alpha) * state.feedback_ema + alpha * signal;
    let step = perceptive_step(t, state.pressure_horizon, alpha, delta);
    let next_state = PolicyState {
        feedback_ema: ema,
        ..*state
    };
    Ok((next_state, shift(coeffs, ema, step, bounds)))
}
