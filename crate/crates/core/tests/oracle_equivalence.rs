//! Exact-enumeration results checked against a naive oracle that walks every
//! interaction string by counting in base `|A|·|O|`, with no pruning, and
//! evaluates each system step by step using `std` logarithms.

use ioentropy_core::agents::{BiasedCoin, LaplaceAgent, HEADS};
use ioentropy_core::analysis::{
    expected_rewards_bruteforce, expected_utilities, InteractionProcess, DEFAULT_ENUMERATION_BUDGET,
};
use ioentropy_core::io::{
    sequence_probability, GenerativeCoupling, Interaction, InteractionAlphabet, InteractionHistory, IoSystem,
    RandomIoSystem,
};
use ioentropy_core::process::{entropy_rate, expected_utility, for_each_string, RandomProcess};
use ioentropy_core::reward::{probability_from_utility, utility_of_string};
use ioentropy_core::rng::UniformSource;
use ioentropy_core::ExtReal;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Oracle {
    e_g: f64,
    e_p: f64,
    e_q: f64,
    h_act: f64,
    h_obs: f64,
    kl_obs: f64,
    kl_act: f64,
    mass: f64,
}

fn all_histories(alphabet: &InteractionAlphabet, t: usize) -> Vec<InteractionHistory> {
    let n_obs = alphabet.num_observations();
    let z = alphabet.num_interactions();
    let count = z.pow(t as u32);
    (0..count)
        .map(|mut code| {
            let mut steps = Vec::with_capacity(t);
            for _ in 0..t {
                let s = code % z;
                code /= z;
                steps.push(Interaction::new((s / n_obs) as u32, (s % n_obs) as u32));
            }
            InteractionHistory::from_steps(&steps)
        })
        .collect()
}

/// Factor lists of one system along a history, queried directly.
fn factors<S: IoSystem>(sys: &S, h: &InteractionHistory) -> (Vec<f64>, Vec<f64>) {
    let mut acts = Vec::new();
    let mut obs = Vec::new();
    for i in 0..h.len() {
        let prefix = InteractionHistory::from_steps(&h.steps()[..i]);
        let step = h.steps()[i];
        acts.push(sys.action_distribution(&prefix).p(step.action));
        obs.push(sys.observation_prediction(&prefix, step.action).p(step.observation));
    }
    (acts, obs)
}

fn log_sum(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x.ln()).sum()
}

fn oracle<P: IoSystem, Q: IoSystem>(c: &GenerativeCoupling<P, Q>, t: usize) -> Oracle {
    let mut o = Oracle { e_g: 0.0, e_p: 0.0, e_q: 0.0, h_act: 0.0, h_obs: 0.0, kl_obs: 0.0, kl_act: 0.0, mass: 0.0 };
    for h in all_histories(&c.alphabet, t) {
        let (pa, po) = factors(&c.agent, &h);
        let (qa, qo) = factors(&c.environment, &h);
        let g: f64 = pa.iter().product::<f64>() * qo.iter().product::<f64>();
        if g == 0.0 {
            continue;
        }
        o.mass += g;
        o.e_g += g * (log_sum(&pa) + log_sum(&qo));
        o.e_p += g * (log_sum(&pa) + log_sum(&po));
        o.e_q += g * (log_sum(&qa) + log_sum(&qo));
        o.h_act -= g * log_sum(&pa);
        o.h_obs -= g * log_sum(&qo);
        o.kl_obs += g * (log_sum(&qo) - log_sum(&po));
        o.kl_act += g * (log_sum(&pa) - log_sum(&qa));
    }
    o
}

fn random_coupling(seed: u64) -> GenerativeCoupling<RandomIoSystem, RandomIoSystem> {
    GenerativeCoupling::new(
        RandomIoSystem::new(2, 2, seed),
        RandomIoSystem::new(2, 2, seed ^ 0xDEAD_BEEF),
        InteractionAlphabet::heads_tails(),
    )
}

#[test]
fn reports_match_the_naive_oracle() {
    for seed in 0..40u64 {
        let t = 1 + (seed % 5) as usize;
        let c = random_coupling(seed);
        let r = expected_rewards_bruteforce(&c, t, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let o = oracle(&c, t);
        let close = |a: ExtReal, b: f64| a.abs_diff(ExtReal::Finite(b)) < 1e-9;
        assert!(close(r.e_reward_g, o.e_g), "seed {seed}");
        assert!(close(r.e_reward_p, o.e_p), "seed {seed}");
        assert!(close(r.e_reward_q, o.e_q), "seed {seed}");
        assert!((r.h_actions - o.h_act).abs() < 1e-9);
        assert!((r.h_observations - o.h_obs).abs() < 1e-9);
        assert!(close(r.kl_obs, o.kl_obs));
        assert!(close(r.kl_act, o.kl_act));
        assert!((o.mass - 1.0).abs() < 1e-10);
        assert!((r.total_mass - 1.0).abs() < 1e-10);
        assert!(r.kl_obs.to_f64() >= -1e-12 && r.kl_act.to_f64() >= -1e-12);
    }
}

#[test]
fn coin_report_matches_the_naive_oracle() {
    let c = GenerativeCoupling::new(LaplaceAgent::new(), BiasedCoin::new(0.9).unwrap(), InteractionAlphabet::heads_tails());
    for t in 1..=6 {
        let r = expected_rewards_bruteforce(&c, t, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let o = oracle(&c, t);
        assert!(r.e_reward_p.abs_diff(ExtReal::Finite(o.e_p)) < 1e-9);
        assert!(r.kl_obs.abs_diff(ExtReal::Finite(o.kl_obs)) < 1e-9);
        assert_eq!(r.h_actions, 0.0);
        // the Laplace agent acts deterministically, so G has 2^t strings
        assert_eq!(r.support_size, 1 << t);
    }
}

#[test]
fn generative_distribution_is_normalized_and_factorizes() {
    for seed in 0..6u64 {
        let c = random_coupling(seed);
        for t in 0..=6 {
            let histories = all_histories(&c.alphabet, t);
            assert!(histories.len() <= 4096);
            let mut total = 0.0;
            for h in &histories {
                let g = sequence_probability(&c.generative(), h);
                let p = sequence_probability(&c.agent, h);
                let q = sequence_probability(&c.environment, h);
                assert!((g.total - p.action_product * q.observation_product).abs() < 1e-12);
                assert_eq!(g.total, g.action_product * g.observation_product);
                total += g.total;
            }
            assert!((total - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn utility_rates_follow_the_chain_rule() {
    for seed in 0..20u64 {
        let t = 1 + (seed % 5) as usize;
        let c = random_coupling(seed + 500);
        let r = expected_rewards_bruteforce(&c, t, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let u = expected_utilities(&c, t, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert!(u.deviation_from(&r) < 1e-10, "seed {seed}");
        assert!(u.pu_agent <= ExtReal::ZERO && u.pu_env <= ExtReal::ZERO);
        assert!(u.e_utility_g.abs_diff(ExtReal::Finite(u.gu_agent + u.gu_env)) < 1e-10);
    }
}

#[test]
fn generative_mean_utility_is_negative_entropy_rate() {
    for seed in 0..10u64 {
        let c = random_coupling(seed + 900);
        let g = c.generative();
        let process = InteractionProcess::new(&g, &c.alphabet);
        for t in 1..=4 {
            let eu = expected_utility(&process, t, DEFAULT_ENUMERATION_BUDGET).unwrap();
            let rate = entropy_rate(&process, t, DEFAULT_ENUMERATION_BUDGET).unwrap();
            assert!(eu.abs_diff(ExtReal::Finite(-rate)) < 1e-9);
        }
    }
}

#[test]
fn string_probability_from_utility() {
    for alphabet in 1..=3 {
        for seed in 0..5u64 {
            let p = RandomProcess { alphabet, seed, sparse: seed % 2 == 1 };
            for t in 1..=6 {
                for_each_string(&p, t, 1 << 12, |s| {
                    let u = utility_of_string(s).unwrap();
                    let back = probability_from_utility(u, t).unwrap();
                    let direct: f64 = s.conditionals().iter().product();
                    if direct == 0.0 {
                        assert_eq!(back, 0.0);
                    } else {
                        assert!(((back - direct) / direct).abs() < 1e-12);
                    }
                })
                .unwrap();
            }
        }
    }
}

#[test]
fn coin_emission_frequency() {
    let mut c = GenerativeCoupling::new(LaplaceAgent::new(), BiasedCoin::new(0.9).unwrap(), InteractionAlphabet::heads_tails());
    let mut rng = ChaCha8Rng::seed_from_u64(12345);
    let h = c.run_episode(100_000, &mut rng);
    let freq = h.observation_count(HEADS) as f64 / h.len() as f64;
    assert!((freq - 0.9).abs() < 0.01, "{freq}");
    assert_eq!(c.agent, LaplaceAgent::replay(&h));
    // the learned estimate after 1000 tosses
    let early = LaplaceAgent::replay(&h.prefix(1000));
    assert!((early.predict().p(HEADS) - 0.9).abs() < 0.02);
}

/// A generator that replays a fixed list of uniforms.
struct Script(Vec<f64>, usize);

impl UniformSource for Script {
    fn next_uniform(&mut self) -> f64 {
        let u = self.0[self.1 % self.0.len()];
        self.1 += 1;
        u
    }
}

#[test]
fn sampling_uses_inverse_cdf_on_the_uniform_stream() {
    let mut c = GenerativeCoupling::new(LaplaceAgent::new(), BiasedCoin::new(0.9).unwrap(), InteractionAlphabet::heads_tails());
    // action draw, observation draw; 0.95 lands past P(H) = 0.9
    let h = c.run_episode(2, &mut Script(vec![0.3, 0.95, 0.3, 0.1], 0));
    // after one tail the agent switches to T
    assert_eq!(h.steps(), &[Interaction::new(0, 1), Interaction::new(1, 0)]);
}
