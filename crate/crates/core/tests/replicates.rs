use orgswarm_core::rng::{stream, unit_draw};
use orgswarm_core::stats::first_hit_iteration;
use orgswarm_core::{
    run_replicate, run_replicate_traced, OrgDesign, SimConfig, Tendency, TraceLevel,
};

fn tiny() -> SimConfig {
    SimConfig {
        dim: 3,
        agent_count: 4,
        design: OrgDesign::FullyNetworked,
        tendency: Tendency::Reactive,
        max_iterations: 500,
        pressure_horizon: 250,
        master_seed: 17,
        ..SimConfig::default()
    }
}

/// Every agent samples a fresh uniform position each iteration.
fn random_search_converges(dim: usize, agents: usize, budget: u32, seed: u64) -> bool {
    let mut rng = stream(seed);
    let draw = |rng: &mut _| -> Vec<bool> { (0..dim).map(|_| unit_draw(rng) < 0.5).collect() };
    let goal = draw(&mut rng);
    let mut hit = vec![false; agents];
    for _ in 0..=budget {
        for h in hit.iter_mut() {
            if draw(&mut rng) == goal {
                *h = true;
            }
        }
        if hit.iter().all(|&h| h) {
            return true;
        }
    }
    false
}

#[test]
fn tiny_space_converges_like_random_search_floor() {
    let cfg = tiny();
    let guided = (0..100)
        .filter(|&k| run_replicate(&cfg, k).unwrap().success())
        .count();
    let random = (0..100u64)
        .filter(|&k| random_search_converges(3, 4, 500, 1000 + k))
        .count();
    assert!(random >= 95, "random search floor {random}/100");
    assert!(guided >= 95, "guided search {guided}/100");
}

#[test]
fn replicates_are_reproducible_and_distinct() {
    let cfg = SimConfig {
        design: OrgDesign::Siloed { silo_count: 5 },
        ..SimConfig::default()
    };
    let a = run_replicate(&cfg, 3).unwrap();
    let b = run_replicate(&cfg, 3).unwrap();
    assert_eq!(a, b);
    let c = run_replicate(&cfg, 4).unwrap();
    assert_ne!(a.seed, c.seed);
}

#[test]
fn first_hits_match_full_trace() {
    let cfg = SimConfig {
        design: OrgDesign::Dynamic {
            silo_count: 5,
            reshuffle_interval: 10,
        },
        tendency: Tendency::Perceptive,
        ..SimConfig::default()
    };
    for k in 0..5 {
        let r = run_replicate_traced(&cfg, k, TraceLevel::Full).unwrap();
        let frames = r.agent_trace.as_ref().unwrap();
        for agent in 0..cfg.agent_count {
            let series: Vec<u32> = frames.iter().map(|f| f.fitness[agent]).collect();
            let hit = first_hit_iteration(&series).unwrap().map(|t| t as u32);
            assert_eq!(hit, r.first_hit[agent]);
        }
        if let Some(g) = r.group_convergence {
            assert!(r.first_any_hit().unwrap() <= g);
        }
    }
}

#[test]
fn default_grid_converges_within_budget() {
    for tendency in Tendency::ALL {
        for design in [
            OrgDesign::FullyNetworked,
            OrgDesign::Siloed { silo_count: 5 },
            OrgDesign::Dynamic {
                silo_count: 5,
                reshuffle_interval: 10,
            },
        ] {
            let cfg = SimConfig {
                design,
                tendency,
                ..SimConfig::default()
            };
            let converged = (0..20)
                .filter(|&k| run_replicate(&cfg, k).unwrap().success())
                .count();
            assert_eq!(converged, 20, "{design:?} {tendency}");
        }
    }
}
