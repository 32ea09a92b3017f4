//! Randomized invariants of the entropy, reward and agent layers.

use ioentropy_core::agents::{BiasedCoin, FictitiousPlayer, LaplaceAgent, Role, Side, HEADS, TAILS};
use ioentropy_core::entropy::{conditional_entropy, entropy, kl, JointDistribution};
use ioentropy_core::io::{Interaction, InteractionHistory, IoSystem};
use ioentropy_core::reward::{
    gibbs_transform, reward, reward_complement, reward_union, DesirabilityMap, RewardValue,
};
use ioentropy_core::{ExtReal, FiniteDistribution};
use proptest::prelude::*;

fn dist(max_len: usize) -> impl Strategy<Value = FiniteDistribution> {
    prop::collection::vec(0.0f64..1.0, 1..=max_len).prop_filter_map("all-zero weights", |w| {
        FiniteDistribution::over_indices_from_weights(&w)
    })
}

trait FromWeights: Sized {
    fn over_indices_from_weights(w: &[f64]) -> Option<Self>;
}

impl FromWeights for FiniteDistribution {
    fn over_indices_from_weights(w: &[f64]) -> Option<Self> {
        FiniteDistribution::from_weights((0..w.len() as u32).collect(), w).ok()
    }
}

fn pair(max_len: usize) -> impl Strategy<Value = (FiniteDistribution, FiniteDistribution)> {
    (1..=max_len).prop_flat_map(|n| {
        let w = || prop::collection::vec(0.001f64..1.0, n);
        (w(), w()).prop_map(|(a, b)| {
            (
                FiniteDistribution::over_indices_from_weights(&a).unwrap(),
                FiniteDistribution::over_indices_from_weights(&b).unwrap(),
            )
        })
    })
}

fn joint() -> impl Strategy<Value = JointDistribution<u32>> {
    (1usize..5, 1usize..5).prop_flat_map(|(ny, nx)| {
        (
            prop::collection::vec(0.0f64..1.0, ny),
            prop::collection::vec(prop::collection::vec(0.01f64..1.0, nx), ny),
        )
            .prop_filter_map("degenerate outer", |(outer, conds)| {
                let outer = FiniteDistribution::over_indices_from_weights(&outer)?;
                let conds = conds
                    .iter()
                    .map(|w| FiniteDistribution::over_indices_from_weights(w))
                    .collect();
                JointDistribution::new(outer, conds).ok()
            })
    })
}

proptest! {
    #[test]
    fn entropy_is_bounded(d in dist(6)) {
        let h = entropy(&d);
        let max = (d.len() as f64).ln();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= max + 1e-12);
        if d.is_point_mass() {
            prop_assert_eq!(h, 0.0);
        }
    }

    #[test]
    fn uniform_attains_maximum(n in 1usize..12) {
        let h = entropy(&FiniteDistribution::uniform(n).unwrap());
        prop_assert!((h - (n as f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn gibbs_inequality((p, q) in pair(6)) {
        let d = kl(&p, &q).unwrap();
        prop_assert!(d >= ExtReal::ZERO);
        prop_assert_eq!(kl(&p, &p).unwrap(), ExtReal::ZERO);
        let max_gap = p.probs().iter().zip(q.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if max_gap > 1e-3 {
            prop_assert!(d > ExtReal::ZERO);
        }
    }

    #[test]
    fn conditional_entropy_is_average_of_entropies(j in joint()) {
        let expected: f64 = j
            .outer()
            .probs()
            .iter()
            .enumerate()
            .filter(|(_, &py)| py > 0.0)
            .map(|(i, &py)| py * entropy(j.conditional(i).unwrap()))
            .sum();
        prop_assert!((conditional_entropy(&j) - expected).abs() < 1e-12);
    }

    #[test]
    fn entropy_chain_rule(j in joint()) {
        let lhs = entropy(&j.joint().unwrap());
        let rhs = entropy(j.outer()) + conditional_entropy(&j);
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn rewards_are_additive(p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
        let joint = reward(p * q).unwrap().value();
        let sum = reward(p).unwrap().value() + reward(q).unwrap().value();
        prop_assert!(joint.abs_diff(sum) < 1e-12);
    }

    #[test]
    fn rewards_preserve_order(p in 1e-300f64..=1.0, q in 1e-300f64..=1.0) {
        let (rp, rq) = (reward(p).unwrap(), reward(q).unwrap());
        prop_assert_eq!(p > q, rp > rq);
        prop_assert!(rp <= RewardValue::CERTAIN);
    }

    #[test]
    fn complement_is_an_involution(x in -50.0f64..-1e-9) {
        let r = RewardValue::new(ExtReal::Finite(x)).unwrap();
        let back = reward_complement(reward_complement(r));
        prop_assert!(back.value().abs_diff(r.value()) < 1e-12);
    }

    #[test]
    fn union_of_atoms_is_certain(d in dist(8)) {
        let rs: Vec<RewardValue> = d.probs().iter().map(|&p| reward(p).unwrap()).collect();
        let u = reward_union(&rs).unwrap();
        prop_assert!(u.value().abs_diff(ExtReal::ZERO) < 1e-12);
    }

    #[test]
    fn gibbs_preserves_order_and_ignores_shifts(
        d in prop::collection::vec(-20.0f64..20.0, 1..8),
        alpha in 0.01f64..10.0,
        shift in -100.0f64..100.0,
    ) {
        let n = d.len();
        let dm = DesirabilityMap::new((0..n).collect(), d.clone()).unwrap();
        let g = gibbs_transform(&dm, alpha).unwrap();
        let total: f64 = g.distribution.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(d[i].partial_cmp(&d[j]), g.rewards[i].partial_cmp(&g.rewards[j]));
            }
        }
        let shifted = DesirabilityMap::new((0..n).collect(), d.iter().map(|x| x + shift).collect()).unwrap();
        let gs = gibbs_transform(&shifted, alpha).unwrap();
        for (a, b) in g.distribution.probs().iter().zip(gs.distribution.probs()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn laplace_state_is_replay(obs in prop::collection::vec(0u32..2, 0..60)) {
        let mut live = LaplaceAgent::new();
        let mut h = InteractionHistory::new();
        for &o in &obs {
            let step = Interaction::new(HEADS, o);
            live.observe(step);
            h.push(step);
        }
        let replayed = LaplaceAgent::replay(&h);
        prop_assert_eq!(live, replayed);
        prop_assert_eq!(replayed.tosses() as usize, obs.len());
        prop_assert_eq!(replayed.heads() as usize, obs.iter().filter(|&&o| o == HEADS).count());
    }

    #[test]
    fn laplace_prediction_moves_with_evidence(t in 0u32..500, frac in 0.0f64..=1.0) {
        let n = ((t as f64) * frac).floor() as u32;
        let a = LaplaceAgent::from_counts(t, n).unwrap();
        let before = a.predict().p(HEADS);
        let after_heads = LaplaceAgent::from_counts(t + 1, n + 1).unwrap().predict().p(HEADS);
        let after_tails = LaplaceAgent::from_counts(t + 1, n).unwrap().predict().p(HEADS);
        prop_assert!(after_heads > before);
        prop_assert!(after_tails < before);
    }

    #[test]
    fn matcher_mirrors_unmatcher(k1 in 0.0f64..50.0, k2 in 0.0f64..50.0, alpha in 0.1f64..20.0) {
        prop_assume!(k1 + k2 > 0.0);
        let m = FictitiousPlayer::with_prior(Role::Matcher, Side::Agent, alpha, [k1, k2]).unwrap();
        let u = FictitiousPlayer::with_prior(Role::Unmatcher, Side::Agent, alpha, [k2, k1]).unwrap();
        prop_assert!((m.gamma() - (1.0 - u.gamma())).abs() < 1e-12);
        prop_assert!((m.policy().p(HEADS) - u.policy().p(HEADS)).abs() < 1e-12);
    }
}

fn random_history(seed: u64, len: usize) -> InteractionHistory {
    let mut x = seed;
    let mut h = InteractionHistory::new();
    for _ in 0..len {
        x = ioentropy_core::rng::splitmix64(x);
        h.push(Interaction::new((x & 1) as u32, ((x >> 1) & 1) as u32));
    }
    h
}

fn assert_valid(d: &FiniteDistribution) {
    assert_eq!(d.support(), &[HEADS, TAILS]);
    let total: f64 = d.probs().iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(d.probs().iter().all(|p| (0.0..=1.0).contains(p)));
}

#[test]
fn built_in_systems_emit_valid_distributions() {
    let systems: Vec<Box<dyn IoSystem>> = vec![
        Box::new(LaplaceAgent::new()),
        Box::new(BiasedCoin::new(0.9).unwrap()),
        Box::new(FictitiousPlayer::new(Role::Matcher, Side::Agent, 4.0).unwrap()),
        Box::new(FictitiousPlayer::new(Role::Unmatcher, Side::Environment, 4.0).unwrap()),
        Box::new(FictitiousPlayer::new(Role::Matcher, Side::Environment, 250.0).unwrap()),
    ];
    for seed in 0..10_000u64 {
        let h = random_history(seed, (seed % 97) as usize);
        for sys in &systems {
            assert_valid(&sys.action_distribution(&h));
            for a in [HEADS, TAILS] {
                assert_valid(&sys.observation_prediction(&h, a));
            }
        }
    }
}

#[test]
fn queries_do_not_touch_state() {
    let mut player = FictitiousPlayer::new(Role::Unmatcher, Side::Environment, 4.0).unwrap();
    let h = random_history(5, 40);
    player.observe(Interaction::new(HEADS, TAILS));
    let before = player;
    let first = (player.action_distribution(&h), player.observation_prediction(&h, HEADS));
    let second = (player.action_distribution(&h), player.observation_prediction(&h, HEADS));
    assert_eq!(first, second);
    assert_eq!(player, before);
}
