//! Organizational designs as silo partitions of the agent population.
//!
//! Silos are disjoint cliques: an agent sees the memory of every member of its
//! own silo and nobody else. A fully-networked organization is a single silo.

use std::fmt;

use rand::seq::SliceRandom;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::StrategyPosition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrgDesign {
    FullyNetworked,
    Siloed {
        silo_count: usize,
    },
    /// Siloed, with membership redrawn every `reshuffle_interval` iterations.
    Dynamic {
        silo_count: usize,
        reshuffle_interval: u32,
    },
}

impl OrgDesign {
    pub fn kind(&self) -> DesignKind {
        match self {
            OrgDesign::FullyNetworked => DesignKind::FullyNetworked,
            OrgDesign::Siloed { .. } => DesignKind::Siloed,
            OrgDesign::Dynamic { .. } => DesignKind::Dynamic,
        }
    }

    pub fn silo_count(&self) -> usize {
        match *self {
            OrgDesign::FullyNetworked => 1,
            OrgDesign::Siloed { silo_count } | OrgDesign::Dynamic { silo_count, .. } => silo_count,
        }
    }

    /// Whether membership is redrawn before iteration `t`.
    pub fn reshuffles_at(&self, t: u32) -> bool {
        match *self {
            OrgDesign::Dynamic {
                reshuffle_interval, ..
            } => t > 0 && t.is_multiple_of(reshuffle_interval),
            _ => false,
        }
    }

    pub fn validate(&self, agent_count: usize) -> Result<()> {
        let silos = self.silo_count();
        if silos == 0 || silos > agent_count {
            return Err(Error::param(
                "silo_count",
                format!("{silos} must be in [1, agent_count = {agent_count}]"),
            ));
        }
        if let OrgDesign::Dynamic {
            reshuffle_interval: 0,
            ..
        } = self
        {
            return Err(Error::param("reshuffle_interval", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignKind {
    FullyNetworked,
    Siloed,
    Dynamic,
}

impl DesignKind {
    pub const ALL: [DesignKind; 3] = [
        DesignKind::FullyNetworked,
        DesignKind::Siloed,
        DesignKind::Dynamic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            DesignKind::FullyNetworked => "fully-networked",
            DesignKind::Siloed => "siloed",
            DesignKind::Dynamic => "dynamic",
        }
    }
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which silo each agent belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiloAssignment {
    membership: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl SiloAssignment {
    /// Builds an assignment from an explicit membership vector.
    pub fn from_membership(membership: Vec<usize>, silo_count: usize) -> Result<Self> {
        if membership.is_empty() {
            return Err(Error::EmptyInput("membership"));
        }
        let mut members = vec![Vec::new(); silo_count];
        for (agent, &silo) in membership.iter().enumerate() {
            if silo >= silo_count {
                return Err(Error::param(
                    "membership",
                    format!("silo {silo} >= silo_count {silo_count}"),
                ));
            }
            members[silo].push(agent);
        }
        if members.iter().any(Vec::is_empty) {
            return Err(Error::param(
                "membership",
                "every silo needs at least one member",
            ));
        }
        Ok(Self {
            membership,
            members,
        })
    }

    fn balanced(order: &[usize], silo_count: usize) -> Self {
        let mut membership = vec![0; order.len()];
        for (slot, &agent) in order.iter().enumerate() {
            membership[agent] = slot % silo_count;
        }
        let mut members = vec![Vec::new(); silo_count];
        for (agent, &silo) in membership.iter().enumerate() {
            members[silo].push(agent);
        }
        Self {
            membership,
            members,
        }
    }

    pub fn agent_count(&self) -> usize {
        self.membership.len()
    }

    pub fn silo_count(&self) -> usize {
        self.members.len()
    }

    pub fn silo_of(&self, agent: usize) -> usize {
        self.membership[agent]
    }

    pub fn membership(&self) -> &[usize] {
        &self.membership
    }

    /// Members of `silo` in ascending agent order.
    pub fn members(&self, silo: usize) -> &[usize] {
        &self.members[silo]
    }

    pub fn silo_sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn is_balanced(&self) -> bool {
        let sizes = self.silo_sizes();
        let max = sizes.iter().max().copied().unwrap_or(0);
        let min = sizes.iter().min().copied().unwrap_or(0);
        min > 0 && max - min <= 1
    }

    /// For every silo, the member with the lowest score (ties to the lowest index).
    pub fn silo_leaders(&self, scores: &[u32]) -> Vec<usize> {
        self.members
            .iter()
            .map(|silo| {
                *silo
                    .iter()
                    .min_by_key(|&&a| (scores[a], a))
                    .expect("silos are never empty")
            })
            .collect()
    }
}

/// Shuffles the agent order and deals agents round-robin into the silos.
/// Fully-networked designs consume no randomness.
pub fn build_assignment<R: RngCore + ?Sized>(
    design: &OrgDesign,
    agent_count: usize,
    rng: &mut R,
) -> Result<SiloAssignment> {
    if agent_count == 0 {
        return Err(Error::param("agent_count", "must be at least 1"));
    }
    design.validate(agent_count)?;
    let order: Vec<usize> = (0..agent_count).collect();
    match design {
        OrgDesign::FullyNetworked => Ok(SiloAssignment::balanced(&order, 1)),
        _ => Ok(deal(order, design.silo_count(), rng)),
    }
}

fn deal<R: RngCore + ?Sized>(
    mut order: Vec<usize>,
    silo_count: usize,
    rng: &mut R,
) -> SiloAssignment {
    order.shuffle(rng);
    SiloAssignment::balanced(&order, silo_count)
}

/// Redraws a balanced partition with the same silo count (hence the same sizes).
pub fn reshuffle<R: RngCore + ?Sized>(assignment: &SiloAssignment, rng: &mut R) -> SiloAssignment {
    let order: Vec<usize> = (0..assignment.agent_count()).collect();
    deal(order, assignment.silo_count(), rng)
}

/// Personal best of the fittest member of `agent`'s silo; ties go to the lowest index.
pub fn neighborhood_best<'a>(
    agent: usize,
    assignment: &SiloAssignment,
    pbest_positions: &'a [StrategyPosition],
    pbest_fitnesses: &[u32],
) -> Result<&'a StrategyPosition> {
    let n = assignment.agent_count();
    if pbest_positions.len() != n || pbest_fitnesses.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: pbest_positions.len().min(pbest_fitnesses.len()),
        });
    }
    if agent >= n {
        return Err(Error::param(
            "agent_index",
            format!("{agent} >= agent_count {n}"),
        ));
    }
    let silo = assignment.members(assignment.silo_of(agent));
    let leader = silo
        .iter()
        .copied()
        .min_by_key(|&a| (pbest_fitnesses[a], a))
        .ok_or(Error::Invariant {
            iteration: 0,
            detail: "empty silo".into(),
        })?;
    Ok(&pbest_positions[leader])
}
