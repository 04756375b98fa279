//! One replicate of the simulation: initialization, the synchronous
//! iteration loop and result recording.

use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{
    clamp_velocity, update_position, update_velocity, update_velocity_stochastic, Binarization,
    CoefficientTriple, Velocity,
};
use crate::policy::{CoeffBounds, PolicyParams, PolicyState, Tendency};
use crate::rng::{replicate_seed, stream, uniform_in};
use crate::space::{fitness, random_position, StrategyPosition};
use crate::topology::{build_assignment, reshuffle, OrgDesign, SiloAssignment};

/// Which reference an agent's prestige term pulls toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GbestMode {
    /// Best personal best found so far inside the silo.
    #[default]
    Historical,
    /// Current position of the silo's fittest member.
    Instantaneous,
}

/// Half-open range `[lo, hi)` for drawing initial coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitRange {
    pub lo: f64,
    pub hi: f64,
}

impl InitRange {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dim: usize,
    pub agent_count: usize,
    pub design: OrgDesign,
    pub tendency: Tendency,
    pub max_iterations: u32,
    pub v_max: f64,
    pub delta: f64,
    pub alpha: f64,
    pub pressure_horizon: u32,
    pub coeff_bounds: CoeffBounds,
    pub inertia_init: InitRange,
    pub self_belief_init: InitRange,
    pub prestige_bias_init: InitRange,
    pub master_seed: u64,
    pub replicate_count: u32,
    pub gbest_mode: GbestMode,
    pub stochastic_acceleration: bool,
    pub binarization: Binarization,
    pub freeze_on_goal: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dim: 25,
            agent_count: 20,
            design: OrgDesign::FullyNetworked,
            tendency: Tendency::Reactive,
            max_iterations: 1000,
            v_max: 4.0,
            delta: 0.1,
            alpha: 0.1,
            pressure_horizon: 500,
            coeff_bounds: CoeffBounds::default(),
            inertia_init: InitRange::new(0.97, 1.0),
            self_belief_init: InitRange::new(0.5, 1.5),
            prestige_bias_init: InitRange::new(0.5, 1.5),
            master_seed: 0,
            replicate_count: 200,
            gbest_mode: GbestMode::Historical,
            stochastic_acceleration: false,
            binarization: Binarization::SigmoidStochastic,
            freeze_on_goal: false,
        }
    }
}

/// One out-of-range field found by [`SimConfig::issues`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub field: &'static str,
    pub value: String,
    pub bounds: String,
}

impl SimConfig {
    pub fn policy_params(&self) -> PolicyParams {
        PolicyParams {
            delta: self.delta,
            alpha: self.alpha,
            bounds: self.coeff_bounds,
        }
    }

    /// Every field that violates its documented range.
    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let mut check = |ok: bool, field: &'static str, value: String, bounds: &str| {
            if !ok {
                out.push(ConfigIssue {
                    field,
                    value,
                    bounds: bounds.to_string(),
                });
            }
        };
        check(self.dim >= 1, "dim", self.dim.to_string(), ">= 1");
        check(
            self.agent_count >= 1,
            "agent_count",
            self.agent_count.to_string(),
            ">= 1",
        );
        check(
            self.max_iterations >= 1,
            "max_iterations",
            self.max_iterations.to_string(),
            ">= 1",
        );
        check(
            self.v_max > 0.0 && self.v_max.is_finite(),
            "v_max",
            self.v_max.to_string(),
            "> 0",
        );
        check(
            self.delta > 0.0 && self.delta.is_finite(),
            "delta",
            self.delta.to_string(),
            "> 0",
        );
        check(
            self.alpha > 0.0 && self.alpha <= 1.0,
            "alpha",
            self.alpha.to_string(),
            "(0, 1]",
        );
        check(
            self.pressure_horizon >= 1,
            "pressure_horizon",
            self.pressure_horizon.to_string(),
            ">= 1",
        );
        check(
            self.replicate_count >= 1,
            "replicate_count",
            self.replicate_count.to_string(),
            ">= 1",
        );
        let b = self.coeff_bounds;
        let bounds_ok = b.min.is_finite() && b.max.is_finite() && b.min >= 0.0 && b.min <= b.max;
        check(
            bounds_ok,
            "coeff_bounds",
            format!("[{}, {}]", b.min, b.max),
            "0 <= min <= max",
        );
        let silos = self.design.silo_count();
        check(
            silos >= 1 && silos <= self.agent_count,
            "silo_count",
            silos.to_string(),
            &format!("[1, agent_count = {}]", self.agent_count),
        );
        if let OrgDesign::Dynamic {
            reshuffle_interval, ..
        } = self.design
        {
            check(
                reshuffle_interval >= 1,
                "reshuffle_interval",
                reshuffle_interval.to_string(),
                ">= 1",
            );
        }
        for (field, r) in [
            ("inertia_init", self.inertia_init),
            ("self_belief_init", self.self_belief_init),
            ("prestige_bias_init", self.prestige_bias_init),
        ] {
            let ok = bounds_ok && r.lo <= r.hi && b.contains(r.lo) && b.contains(r.hi);
            check(
                ok,
                field,
                format!("[{}, {}]", r.lo, r.hi),
                &format!("lo <= hi within [{}, {}]", b.min, b.max),
            );
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            return Ok(());
        }
        let listed = issues
            .iter()
            .map(|i| format!("{} = {} (expected {})", i.field, i.value, i.bounds))
            .collect::<Vec<_>>()
            .join("; ");
        Err(Error::param("config", listed))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub index: usize,
    pub position: StrategyPosition,
    pub velocity: Velocity,
    pub pbest_position: StrategyPosition,
    pub pbest_fitness: u32,
    pub fitness: u32,
    pub coeffs: CoefficientTriple,
    pub policy: PolicyState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub best_fitness: u32,
    pub mean_fitness: f64,
}

/// Per-agent snapshot for full trace output.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentFrame {
    pub fitness: Vec<u32>,
    pub coeffs: Vec<CoefficientTriple>,
    pub silo: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceLevel {
    #[default]
    None,
    Group,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateResult {
    pub replicate: u32,
    pub seed: u64,
    pub goal: StrategyPosition,
    pub first_hit: Vec<Option<u32>>,
    pub group_convergence: Option<u32>,
    /// Entry `t` describes the swarm after iteration `t`; entry 0 is the initial evaluation.
    pub trace: Vec<TraceRow>,
    pub agent_trace: Option<Vec<AgentFrame>>,
    pub final_iteration: u32,
}

impl ReplicateResult {
    pub fn first_any_hit(&self) -> Option<u32> {
        self.first_hit.iter().flatten().min().copied()
    }

    pub fn success(&self) -> bool {
        self.group_convergence.is_some()
    }

    pub fn final_best_fitness(&self) -> u32 {
        self.trace.last().map_or(0, |r| r.best_fitness)
    }
}

/// Mutable state of one replicate.
#[derive(Debug, Clone)]
pub struct Swarm<R = ChaCha8Rng> {
    config: SimConfig,
    params: PolicyParams,
    goal: StrategyPosition,
    agents: Vec<Agent>,
    assignment: SiloAssignment,
    rng: R,
    iteration: u32,
    first_hit: Vec<Option<u32>>,
    group_convergence: Option<u32>,
    trace: Vec<TraceRow>,
    agent_trace: Option<Vec<AgentFrame>>,
}

/// Draw order: goal, every agent's position, every agent's `(W, C1, C2)`,
/// then the silo assignment. Velocities start at zero and personal bests at
/// the initial positions.
pub fn init_swarm<R: RngCore>(config: &SimConfig, mut rng: R) -> Result<Swarm<R>> {
    config.validate()?;
    let goal = random_position(config.dim, &mut rng)?;
    let positions = (0..config.agent_count)
        .map(|_| random_position(config.dim, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let coeffs: Vec<CoefficientTriple> = (0..config.agent_count)
        .map(|_| {
            let w = uniform_in(&mut rng, config.inertia_init.lo, config.inertia_init.hi);
            let c1 = uniform_in(
                &mut rng,
                config.self_belief_init.lo,
                config.self_belief_init.hi,
            );
            let c2 = uniform_in(
                &mut rng,
                config.prestige_bias_init.lo,
                config.prestige_bias_init.hi,
            );
            CoefficientTriple::new(w, c1, c2)
        })
        .collect();
    let assignment = build_assignment(&config.design, config.agent_count, &mut rng)?;

    let mut agents = Vec::with_capacity(config.agent_count);
    let mut first_hit = Vec::with_capacity(config.agent_count);
    for (index, (position, coeffs)) in positions.into_iter().zip(coeffs).enumerate() {
        let f = fitness(&position, &goal)?.0;
        first_hit.push((f == 0).then_some(0));
        agents.push(Agent {
            index,
            velocity: Velocity::zeros(config.dim),
            pbest_position: position.clone(),
            pbest_fitness: f,
            fitness: f,
            position,
            coeffs,
            policy: PolicyState::new(config.tendency, f, config.pressure_horizon),
        });
    }

    let mut swarm = Swarm {
        config: config.clone(),
        params: config.policy_params(),
        goal,
        agents,
        assignment,
        rng,
        iteration: 0,
        first_hit,
        group_convergence: None,
        trace: Vec::with_capacity(config.max_iterations as usize + 1),
        agent_trace: None,
    };
    swarm.check_convergence();
    swarm.record();
    Ok(swarm)
}

impl<R: RngCore> Swarm<R> {
    pub fn goal(&self) -> &StrategyPosition {
        &self.goal
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn assignment(&self) -> &SiloAssignment {
        &self.assignment
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    pub fn group_convergence(&self) -> Option<u32> {
        self.group_convergence
    }

    pub fn first_hit(&self) -> &[Option<u32>] {
        &self.first_hit
    }

    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }

    pub fn rng_mut(&mut self) -> &mut R {
        &mut self.rng
    }

    /// Starts recording per-agent frames, beginning with the current state.
    pub fn enable_agent_trace(&mut self) {
        let frame = self.frame();
        self.agent_trace = Some(vec![frame]);
    }

    /// The reference position each agent is attracted to this iteration.
    fn attractors(&self) -> Vec<usize> {
        let scores: Vec<u32> = match self.config.gbest_mode {
            GbestMode::Historical => self.agents.iter().map(|a| a.pbest_fitness).collect(),
            GbestMode::Instantaneous => self.agents.iter().map(|a| a.fitness).collect(),
        };
        self.assignment.silo_leaders(&scores)
    }

    /// Advances one iteration:
    /// reshuffle (dynamic designs, when due), freeze every agent's neighborhood
    /// best, move agents in index order, evaluate, update personal bests, adapt
    /// coefficients, record.
    pub fn step(&mut self) -> Result<()> {
        let t = self.iteration + 1;
        if self.config.design.reshuffles_at(t) {
            self.assignment = reshuffle(&self.assignment, &mut self.rng);
        }

        let leaders = self.attractors();
        let references: Vec<StrategyPosition> = leaders
            .iter()
            .map(|&l| match self.config.gbest_mode {
                GbestMode::Historical => self.agents[l].pbest_position.clone(),
                GbestMode::Instantaneous => self.agents[l].position.clone(),
            })
            .collect();

        for i in 0..self.agents.len() {
            if self.config.freeze_on_goal && self.first_hit[i].is_some() {
                continue;
            }
            let gbest = &references[self.assignment.silo_of(i)];
            let agent = &self.agents[i];
            let raw = if self.config.stochastic_acceleration {
                update_velocity_stochastic(
                    &agent.velocity,
                    &agent.position,
                    &agent.pbest_position,
                    gbest,
                    &agent.coeffs,
                    &mut self.rng,
                )?
            } else {
                update_velocity(
                    &agent.velocity,
                    &agent.position,
                    &agent.pbest_position,
                    gbest,
                    &agent.coeffs,
                )?
            };
            let velocity = clamp_velocity(&raw, self.config.v_max)?;
            let position = match self.config.binarization {
                Binarization::SigmoidStochastic => {
                    update_position(&agent.position, &velocity, &mut self.rng)?
                }
            };
            let agent = &mut self.agents[i];
            agent.velocity = velocity;
            agent.position = position;
        }

        for i in 0..self.agents.len() {
            let agent = &mut self.agents[i];
            let f = fitness(&agent.position, &self.goal)?.0;
            agent.fitness = f;
            if f < agent.pbest_fitness {
                agent.pbest_fitness = f;
                agent.pbest_position = agent.position.clone();
            }
            if f == 0 && self.first_hit[i].is_none() {
                self.first_hit[i] = Some(t);
            }
            agent.coeffs = agent.policy.observe(&agent.coeffs, f, t, &self.params)?;
        }

        self.iteration = t;
        self.check_invariants()?;
        self.check_convergence();
        self.record();
        Ok(())
    }

    fn check_convergence(&mut self) {
        if self.group_convergence.is_none() && self.first_hit.iter().all(Option::is_some) {
            self.group_convergence = Some(self.iteration);
        }
    }

    fn check_invariants(&self) -> Result<()> {
        let fail = |detail: String| Error::Invariant {
            iteration: self.iteration,
            detail,
        };
        for a in &self.agents {
            if a.velocity.max_abs() > self.config.v_max {
                return Err(fail(format!("agent {} velocity exceeds v_max", a.index)));
            }
            if !self.params.bounds.contains_triple(&a.coeffs) {
                return Err(fail(format!(
                    "agent {} coefficients {:?} out of bounds",
                    a.index, a.coeffs
                )));
            }
            if a.fitness as usize > self.config.dim || a.pbest_fitness > a.fitness {
                return Err(fail(format!(
                    "agent {} fitness bookkeeping is inconsistent",
                    a.index
                )));
            }
        }
        if !self.assignment.is_balanced() {
            return Err(fail("silo assignment lost balance".into()));
        }
        Ok(())
    }

    fn frame(&self) -> AgentFrame {
        AgentFrame {
            fitness: self.agents.iter().map(|a| a.fitness).collect(),
            coeffs: self.agents.iter().map(|a| a.coeffs).collect(),
            silo: self.assignment.membership().to_vec(),
        }
    }

    fn record(&mut self) {
        let best = self.agents.iter().map(|a| a.fitness).min().unwrap_or(0);
        let sum: u64 = self.agents.iter().map(|a| u64::from(a.fitness)).sum();
        self.trace.push(TraceRow {
            best_fitness: best,
            mean_fitness: sum as f64 / self.agents.len() as f64,
        });
        if self.agent_trace.is_some() {
            let frame = self.frame();
            if let Some(frames) = self.agent_trace.as_mut() {
                frames.push(frame);
            }
        }
    }

    /// Steps until the whole group has reached the goal or the budget is spent.
    pub fn run_to_end(&mut self) -> Result<()> {
        while self.group_convergence.is_none() && self.iteration < self.config.max_iterations {
            self.step()?;
        }
        Ok(())
    }

    pub fn into_result(self, replicate: u32, seed: u64) -> ReplicateResult {
        ReplicateResult {
            replicate,
            seed,
            goal: self.goal,
            first_hit: self.first_hit,
            group_convergence: self.group_convergence,
            trace: self.trace,
            agent_trace: self.agent_trace,
            final_iteration: self.iteration,
        }
    }
}

pub fn run_replicate(config: &SimConfig, replicate: u32) -> Result<ReplicateResult> {
    run_replicate_traced(config, replicate, TraceLevel::Group)
}

/// Runs replicate `replicate` on the stream seeded by
/// [`replicate_seed`]`(master_seed, replicate)`.
pub fn run_replicate_traced(
    config: &SimConfig,
    replicate: u32,
    level: TraceLevel,
) -> Result<ReplicateResult> {
    let seed = replicate_seed(config.master_seed, replicate);
    let mut swarm = init_swarm(config, stream(seed))?;
    if level == TraceLevel::Full {
        swarm.enable_agent_trace();
    }
    swarm.run_to_end()?;
    Ok(swarm.into_result(replicate, seed))
}
