//! Seeded Monte Carlo playouts of a fixed strategy profile.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::AnalysisError;
use crate::game::{Node, NodeId, PlayerId, StrategyProfile};
use crate::payoff::Payoff;

/// Playouts per independently seeded batch.
pub const PLAYOUTS_PER_BATCH: u64 = 4096;

/// Recorded in every report so a run can be reproduced.
pub const GENERATOR: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64(seed), stream = batch index, 4096 playouts per batch";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlayerStats {
    pub mean: Payoff,
    /// Standard error of the mean; 0 for a single playout, infinite when a
    /// `-inf` payoff was drawn.
    pub std_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassFrequency {
    pub count: u64,
    pub frequency: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub n: u64,
    pub seed: u64,
    pub generator: &'static str,
    /// Hit counts per terminal identifier (terminals never hit are listed
    /// with 0).
    pub terminal_counts: BTreeMap<NodeId, u64>,
    /// Frequencies keyed by terminal label.
    pub classes: BTreeMap<String, ClassFrequency>,
    pub alice: PlayerStats,
    pub tom: PlayerStats,
}

impl SimulationReport {
    pub fn stats(&self, player: PlayerId) -> PlayerStats {
        match player {
            PlayerId::Alice => self.alice,
            PlayerId::Tom => self.tom,
        }
    }
}

/// Leaves in preorder with their labels, and for every node the way play
/// continues from it under the profile.
struct Plan {
    leaves: Vec<(NodeId, String, [f64; 2])>,
    nodes: Vec<Step>,
}

enum Step {
    Goto(usize),
    Lottery(Vec<(f64, usize)>),
    Leaf(usize),
}

impl Plan {
    fn new(tree: &Node, profile: &StrategyProfile) -> Self {
        let mut plan = Plan { leaves: Vec::new(), nodes: Vec::new() };
        plan.push(tree, NodeId::root(), profile);
        plan
    }

    fn push(&mut self, node: &Node, id: NodeId, profile: &StrategyProfile) -> usize {
        let slot = self.nodes.len();
        self.nodes.push(Step::Leaf(usize::MAX));
        let step = match node {
            Node::Terminal { label, payoffs } => {
                self.leaves.push((id, label.clone(), [payoffs.alice.to_f64(), payoffs.tom.to_f64()]));
                Step::Leaf(self.leaves.len() - 1)
            }
            Node::Decision { actions, .. } => {
                let chosen = profile.choice(&id);
                let mut target = usize::MAX;
                for a in actions {
                    let child = self.push(&a.child, id.child(&a.label), profile);
                    if chosen == Some(a.label.as_str()) {
                        target = child;
                    }
                }
                Step::Goto(target)
            }
            Node::Chance { branches, .. } => Step::Lottery(
                branches
                    .iter()
                    .map(|b| (b.probability, self.push(&b.child, id.child(&b.label), profile)))
                    .collect(),
            ),
        };
        self.nodes[slot] = step;
        slot
    }

    fn play(&self, rng: &mut impl Rng) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Step::Leaf(leaf) => return *leaf,
                Step::Goto(next) => at = *next,
                Step::Lottery(options) => {
                    let u: f64 = rng.random();
                    let mut acc = 0.0;
                    // Rounding can leave u above the running total; fall back
                    // to the last branch with positive probability.
                    let mut pick = options.iter().rev().find(|(p, _)| *p > 0.0).map(|(_, c)| *c).unwrap_or(options[0].1);
                    for &(p, child) in options {
                        acc += p;
                        if u < acc {
                            pick = child;
                            break;
                        }
                    }
                    at = pick;
                }
            }
        }
    }
}

#[derive(Default)]
struct Tally {
    counts: Vec<u64>,
}

/// `n` playouts of `profile` on `tree`. The same `(tree, profile, n, seed)`
/// always gives the same report, however many worker threads run.
pub fn simulate(tree: &Node, profile: &StrategyProfile, n: u64, seed: u64) -> Result<SimulationReport, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::NoPlayouts);
    }
    profile.check_against(tree)?;
    let plan = Plan::new(tree, profile);
    let batches = n.div_ceil(PLAYOUTS_PER_BATCH);
    let tallies: Vec<Tally> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let size = PLAYOUTS_PER_BATCH.min(n - b * PLAYOUTS_PER_BATCH);
            let mut tally = Tally { counts: vec![0; plan.leaves.len()] };
            for _ in 0..size {
                tally.counts[plan.play(&mut rng)] += 1;
            }
            tally
        })
        .collect();

    let mut counts = vec![0u64; plan.leaves.len()];
    for t in &tallies {
        for (c, k) in counts.iter_mut().zip(&t.counts) {
            *c += k;
        }
    }

    let nf = n as f64;
    let stats = |player: usize| {
        if plan.leaves.iter().zip(&counts).any(|((_, _, v), &c)| c > 0 && v[player] == f64::NEG_INFINITY) {
            return PlayerStats { mean: Payoff::NegInf, std_error: f64::INFINITY };
        }
        let mean = plan.leaves.iter().zip(&counts).map(|((_, _, v), &c)| c as f64 * v[player]).sum::<f64>() / nf;
        let ss = plan.leaves.iter().zip(&counts).map(|((_, _, v), &c)| c as f64 * (v[player] - mean).powi(2)).sum::<f64>();
        let std_error = if n > 1 { (ss / (nf - 1.0)).sqrt() / nf.sqrt() } else { 0.0 };
        PlayerStats { mean: Payoff::Finite(mean), std_error }
    };

    let mut by_label: BTreeMap<String, u64> = BTreeMap::new();
    for ((_, label, _), &c) in plan.leaves.iter().zip(&counts) {
        *by_label.entry(label.clone()).or_insert(0) += c;
    }
    let classes = by_label
        .into_iter()
        .map(|(label, count)| {
            let p = count as f64 / nf;
            (label, ClassFrequency { count, frequency: p, std_error: (p * (1.0 - p) / nf).sqrt() })
        })
        .collect();

    Ok(SimulationReport {
        n,
        seed,
        generator: GENERATOR,
        terminal_counts: plan.leaves.iter().zip(&counts).map(|((id, _, _), &c)| (id.clone(), c)).collect(),
        classes,
        alice: stats(0),
        tom: stats(1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Action, ActionKind, Branch, PlayerValues};

    fn coin(p: f64) -> Node {
        Node::Chance {
            label: "coin".into(),
            branches: vec![
                Branch { label: "heads".into(), probability: p, child: Node::terminal("h", PlayerValues::new(1.0, 0.0)) },
                Branch { label: "tails".into(), probability: 1.0 - p, child: Node::terminal("t", PlayerValues::new(0.0, 0.0)) },
            ],
        }
    }

    #[test]
    fn deterministic_tree_always_hits_one_terminal() {
        let tree = Node::Decision {
            owner: PlayerId::Tom,
            label: "d".into(),
            actions: vec![
                Action { label: "a".into(), kind: ActionKind::Active, child: Node::terminal("x", PlayerValues::new(2.0, 1.0)) },
                Action { label: "b".into(), kind: ActionKind::Passive, child: Node::terminal("y", PlayerValues::new(0.0, 0.0)) },
            ],
        };
        let profile = StrategyProfile::default().with_choice(NodeId::root(), "a");
        let r = simulate(&tree, &profile, 1000, 7).unwrap();
        assert_eq!(r.terminal_counts[&NodeId::from("/a")], 1000);
        assert_eq!(r.terminal_counts[&NodeId::from("/b")], 0);
        assert_eq!(r.alice.mean, Payoff::Finite(2.0));
        assert_eq!(r.alice.std_error, 0.0);
    }

    #[test]
    fn fair_coin_mean_is_half() {
        let tree = coin(0.5);
        for seed in [0, 1, 42, u64::MAX] {
            let r = simulate(&tree, &StrategyProfile::default(), 100_000, seed).unwrap();
            let m = r.alice.mean.to_f64();
            assert!((m - 0.5).abs() <= 5.0 * r.alice.std_error, "seed {seed}: {m} ± {}", r.alice.std_error);
        }
    }

    #[test]
    fn same_seed_same_report() {
        let tree = coin(0.3);
        let a = simulate(&tree, &StrategyProfile::default(), 10_001, 9).unwrap();
        let b = simulate(&tree, &StrategyProfile::default(), 10_001, 9).unwrap();
        assert_eq!(a, b);
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = single.install(|| simulate(&tree, &StrategyProfile::default(), 10_001, 9).unwrap());
        assert_eq!(a, c);
        let d = simulate(&tree, &StrategyProfile::default(), 10_001, 10).unwrap();
        assert_ne!(a.terminal_counts, d.terminal_counts);
    }

    #[test]
    fn zero_playouts_rejected() {
        assert_eq!(simulate(&coin(0.5), &StrategyProfile::default(), 0, 1), Err(AnalysisError::NoPlayouts));
    }

    #[test]
    fn neg_inf_payoff_mean() {
        let tree = Node::Chance {
            label: "c".into(),
            branches: vec![
                Branch { label: "a".into(), probability: 0.5, child: Node::terminal("x", PlayerValues::new(0.0, Payoff::NegInf)) },
                Branch { label: "b".into(), probability: 0.5, child: Node::terminal("y", PlayerValues::new(0.0, 0.0)) },
            ],
        };
        let r = simulate(&tree, &StrategyProfile::default(), 100, 3).unwrap();
        assert_eq!(r.tom.mean, Payoff::NegInf);
        assert_eq!(r.alice.mean, Payoff::Finite(0.0));
    }
}
