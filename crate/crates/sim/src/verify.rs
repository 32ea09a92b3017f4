//! The identity-check suite behind `ioentropy verify`.
//!
//! Every check runs over a family of cases and keeps the worst one, so the
//! printed values are the pair with the largest discrepancy.

use std::fmt;

use ioentropy_core::analysis::{
    expected_rewards_bruteforce, expected_utilities, monte_carlo_rewards, ExpectedRewardReport,
    DEFAULT_ENUMERATION_BUDGET,
};
use ioentropy_core::io::{GenerativeCoupling, IoSystem, RandomIoSystem};
use ioentropy_core::process::{entropy_rate, expected_utility, for_each_string, RandomProcess};
use ioentropy_core::reward::{
    gibbs_transform, probability_from_utility, reward, reward_complement, reward_union, utility_of_string,
    DesirabilityMap, RewardValue,
};
use ioentropy_core::rng::{splitmix64, UniformSource};
use ioentropy_core::ExtReal;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::experiment::{coin_coupling, pennies_coupling, DEFAULT_BIAS};
use crate::SimError;

pub const DEFAULT_COUPLINGS: usize = 100;
pub const MAX_HORIZON: usize = 5;
pub const REWARD_SETS: usize = 10_000;
pub const DESIRABILITY_MAPS: usize = 1_000;
pub const MC_EPISODES: usize = 10_000;
pub const MC_HORIZON: usize = 4;

const THEOREM3_TOL: f64 = 1e-9;
const SLACK: f64 = 1e-12;
const RATE_TOL: f64 = 1e-10;

/// Deliberate errors for testing the verifier itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Flip the sign of the observation KL term in the agent's decomposition.
    KlSign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub couplings: usize,
    pub fault: Fault,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        VerifyConfig { seed, couplings: DEFAULT_COUPLINGS, fault: Fault::None }
    }
}

/// Outcome of one named check: the worst case seen.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub labels: (&'static str, &'static str),
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    /// What `discrepancy` measures: `|diff|`, `rel`, `excess`, `count` or `|z|`.
    pub metric: &'static str,
    /// The quantity compared against `tolerance`.
    pub discrepancy: f64,
    pub tolerance: f64,
    pub cases: usize,
    pub passed: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<36} {}={} {}={} {}={:.3e} tol={:.0e} cases={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.labels.0,
            fmt_ext(self.lhs),
            self.labels.1,
            fmt_ext(self.rhs),
            self.metric,
            self.discrepancy,
            self.tolerance,
            self.cases
        )
    }
}

fn fmt_ext(x: ExtReal) -> String {
    match x {
        ExtReal::Finite(v) => format!("{v:.15e}"),
        other => other.to_string(),
    }
}

/// Tracks the worst case of one check.
struct Worst {
    name: &'static str,
    labels: (&'static str, &'static str),
    metric: &'static str,
    tolerance: f64,
    cases: usize,
    worst: Option<(ExtReal, ExtReal, f64)>,
    failed: bool,
}

impl Worst {
    fn new(name: &'static str, labels: (&'static str, &'static str), tolerance: f64) -> Self {
        Worst { name, labels, metric: "|diff|", tolerance, cases: 0, worst: None, failed: false }
    }

    fn metric(mut self, metric: &'static str) -> Self {
        self.metric = metric;
        self
    }

    /// Keeps the largest discrepancy, or the first failure once there is one.
    /// A NaN discrepancy counts as a failure.
    fn record(&mut self, lhs: ExtReal, rhs: ExtReal, discrepancy: f64) {
        self.cases += 1;
        if self.failed {
            return;
        }
        let bad = discrepancy.is_nan() || discrepancy > self.tolerance;
        if bad || self.worst.is_none_or(|(_, _, d)| discrepancy > d) {
            self.worst = Some((lhs, rhs, discrepancy));
        }
        self.failed = bad;
    }

    fn abs(&mut self, lhs: ExtReal, rhs: ExtReal) {
        let d = lhs.abs_diff(rhs);
        self.record(lhs, rhs, d);
    }

    fn finish(self) -> Check {
        let (lhs, rhs, discrepancy) = self.worst.unwrap_or((ExtReal::ZERO, ExtReal::ZERO, 0.0));
        Check {
            name: self.name,
            labels: self.labels,
            metric: self.metric,
            lhs,
            rhs,
            discrepancy,
            tolerance: self.tolerance,
            cases: self.cases,
            passed: self.cases > 0 && !self.failed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verify: seed {}", self.seed)?;
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        if failed == 0 {
            write!(f, "all {} checks passed", self.checks.len())
        } else {
            write!(f, "{failed} of {} checks failed", self.checks.len())
        }
    }
}

/// Sub-seed for a named family of cases.
fn derive(seed: u64, family: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ family.wrapping_mul(0x9E37_79B9_7F4A_7C15)) ^ index)
}

/// The randomized 2x2 couplings used by the decomposition checks; every
/// fifth one has sparse tables.
pub fn random_coupling(seed: u64, index: usize) -> GenerativeCoupling<RandomIoSystem, RandomIoSystem> {
    let sparse = index % 5 == 4;
    let mut p = RandomIoSystem::new(2, 2, derive(seed, 1, index as u64));
    let mut q = RandomIoSystem::new(2, 2, derive(seed, 2, index as u64));
    p.sparse = sparse;
    q.sparse = sparse;
    GenerativeCoupling::new(p, q, ioentropy_core::io::InteractionAlphabet::heads_tails())
}

struct DecompositionChecks {
    generative: Worst,
    agent: Worst,
    environment: Worst,
    dominance: Worst,
    kl: Worst,
    normalization: Worst,
    chain_rule: Worst,
}

impl DecompositionChecks {
    fn new() -> Self {
        DecompositionChecks {
            generative: Worst::new("theorem3_generative_decomposition", ("direct", "-(H_a+H_o)"), THEOREM3_TOL),
            agent: Worst::new("theorem3_agent_decomposition", ("direct", "-(H_a+H_o)-KL_o"), THEOREM3_TOL),
            environment: Worst::new("theorem3_environment_decomposition", ("direct", "-(H_a+H_o)-KL_a"), THEOREM3_TOL),
            dominance: Worst::new("dominance", ("E[r_G]", "max(E[r_P],E[r_Q])"), SLACK).metric("excess"),
            kl: Worst::new("kl_nonnegativity", ("min_kl", "zero"), SLACK).metric("excess"),
            normalization: Worst::new("normalization", ("sum_G", "one"), SLACK),
            chain_rule: Worst::new("corollary1_chain_rule", ("per_step", "full/t"), RATE_TOL),
        }
    }

    fn run<P: IoSystem, Q: IoSystem>(
        &mut self,
        c: &GenerativeCoupling<P, Q>,
        t: usize,
        fault: Fault,
    ) -> Result<(), SimError> {
        let r = expected_rewards_bruteforce(c, t, DEFAULT_ENUMERATION_BUDGET)?;
        self.record_report(&r, fault);
        let u = expected_utilities(c, t, DEFAULT_ENUMERATION_BUDGET)?;
        let worst = u.deviation_from(&r);
        self.chain_rule.record(u.e_utility_p, r.e_reward_p.over(t as f64), worst);
        Ok(())
    }

    fn record_report(&mut self, r: &ExpectedRewardReport, fault: Fault) {
        self.generative.abs(r.e_reward_g, r.decomposed_g());
        let agent = match fault {
            Fault::None => r.decomposed_p(),
            Fault::KlSign => r.decomposed_g() + r.kl_obs,
        };
        self.agent.abs(r.e_reward_p, agent);
        self.environment.abs(r.e_reward_q, r.decomposed_q());

        let rival = if r.e_reward_p > r.e_reward_q { r.e_reward_p } else { r.e_reward_q };
        let violation = match rival - r.e_reward_g {
            ExtReal::Finite(v) => v.max(0.0),
            ExtReal::NegInf => 0.0,
            ExtReal::PosInf => f64::INFINITY,
        };
        self.dominance.record(r.e_reward_g, rival, violation);

        let min_kl = if r.kl_obs < r.kl_act { r.kl_obs } else { r.kl_act };
        let negative = match min_kl {
            ExtReal::Finite(v) => (-v).max(0.0),
            ExtReal::PosInf => 0.0,
            ExtReal::NegInf => f64::INFINITY,
        };
        self.kl.record(min_kl, ExtReal::ZERO, negative);

        self.normalization.abs(ExtReal::Finite(r.total_mass), ExtReal::Finite(1.0));
    }
}

fn process_checks(seed: u64) -> Result<[Check; 2], SimError> {
    let mut from_utility = Worst::new("prop2_probability_from_utility", ("P(x)", "exp(tU)"), SLACK).metric("rel");
    let mut entropy = Worst::new("prop2_negative_entropy_rate", ("E[U]", "-H/t"), RATE_TOL);
    let mut index = 0;
    for alphabet in 1..=3 {
        for t in 1..=6 {
            for sparse in [false, true] {
                let p = RandomProcess { alphabet, seed: derive(seed, 3, index), sparse };
                index += 1;
                let mut failure = None;
                for_each_string(&p, t, DEFAULT_ENUMERATION_BUDGET, |s| {
                    if failure.is_some() {
                        return;
                    }
                    let direct = s.probability();
                    let recovered = match utility_of_string(s).and_then(|u| probability_from_utility(u, t)) {
                        Ok(v) => v,
                        Err(e) => {
                            failure = Some(e);
                            return;
                        }
                    };
                    let rel = if direct == 0.0 && recovered == 0.0 {
                        0.0
                    } else {
                        (direct - recovered).abs() / direct.abs().max(recovered.abs())
                    };
                    from_utility.record(ExtReal::Finite(direct), ExtReal::Finite(recovered), rel);
                })?;
                if let Some(e) = failure {
                    return Err(e.into());
                }
                let mean = expected_utility(&p, t, DEFAULT_ENUMERATION_BUDGET)?;
                let rate = entropy_rate(&p, t, DEFAULT_ENUMERATION_BUDGET)?;
                entropy.abs(mean, ExtReal::Finite(-rate));
            }
        }
    }
    Ok([from_utility.finish(), entropy.finish()])
}

fn reward_checks(seed: u64) -> Result<[Check; 2], SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, 4, 0));
    let mut involution = Worst::new("prop1_complement_involution", ("r", "c(c(r))"), SLACK);
    let mut union = Worst::new("prop1_disjoint_union", ("union", "ln_sum_p"), SLACK);
    for _ in 0..REWARD_SETS {
        // probabilities spread over many orders of magnitude
        let p = (-40.0 * rng.next_uniform() * rng.next_uniform()).exp();
        let r = reward(p)?;
        involution.abs(r.value(), reward_complement(reward_complement(r)).value());

        let n = 1 + (rng.next_uniform() * 8.0) as usize;
        let weights: Vec<f64> = (0..n).map(|_| rng.next_uniform()).collect();
        let total: f64 = weights.iter().sum();
        // the atoms cover a random fraction of the space
        let cover = rng.next_uniform();
        let probs: Vec<f64> = weights.iter().map(|w| cover * w / total).collect();
        let rewards = probs.iter().map(|&p| reward(p)).collect::<Result<Vec<RewardValue>, _>>()?;
        let joined = reward_union(&rewards)?;
        let expected = ExtReal::ln(probs.iter().sum::<f64>().min(1.0));
        union.abs(joined.value(), expected);
    }
    Ok([involution.finish(), union.finish()])
}

fn gibbs_checks(seed: u64) -> Result<[Check; 3], SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, 5, 0));
    let mut normalization = Worst::new("theorem2_normalization", ("sum_p", "one"), SLACK);
    let mut order = Worst::new("theorem2_order", ("order_violations", "zero"), 0.0).metric("count");
    let mut shift = Worst::new("theorem2_shift_invariance", ("r(d)", "r(d+c)"), SLACK);
    for _ in 0..DESIRABILITY_MAPS {
        let n = 2 + (rng.next_uniform() * 9.0) as usize;
        let values: Vec<f64> = (0..n).map(|_| 10.0 * rng.next_uniform() - 5.0).collect();
        let alpha = 0.1 + 4.9 * rng.next_uniform();
        let c = 100.0 * rng.next_uniform() - 50.0;
        let outcomes: Vec<u32> = (0..n as u32).collect();
        let g = gibbs_transform(&DesirabilityMap::new(outcomes.clone(), values.clone())?, alpha)?;
        let shifted_values: Vec<f64> = values.iter().map(|d| d + c).collect();
        let h = gibbs_transform(&DesirabilityMap::new(outcomes, shifted_values)?, alpha)?;

        let sum: f64 = g.distribution.probs().iter().sum();
        normalization.abs(ExtReal::Finite(sum), ExtReal::Finite(1.0));

        let mut violations = 0usize;
        for i in 0..n {
            for j in 0..n {
                if values[i] > values[j] && g.rewards[i].value() <= g.rewards[j].value() {
                    violations += 1;
                }
            }
        }
        order.record(ExtReal::Finite(violations as f64), ExtReal::ZERO, violations as f64);

        for (a, b) in g.rewards.iter().zip(&h.rewards) {
            shift.abs(a.value(), b.value());
        }
    }
    Ok([normalization.finish(), order.finish(), shift.finish()])
}

/// Monte Carlo mean of the realized `ln P` against its exact expectation on
/// the coin coupling. Passes within three standard errors.
fn monte_carlo_check(seed: u64) -> Result<Check, SimError> {
    let mut coupling = coin_coupling(DEFAULT_BIAS)?;
    let exact = expected_rewards_bruteforce(&coupling, MC_HORIZON, DEFAULT_ENUMERATION_BUDGET)?.e_reward_p;
    let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, 6, 0));
    let est = monte_carlo_rewards(&mut coupling, MC_HORIZON, MC_EPISODES, &mut rng)?;
    let mean = ExtReal::from_f64(est.mean[1]);
    let se = est.std_error[1];
    let mut check = Worst::new("monte_carlo_bridge", ("mean_r_P", "exact_E[r_P]"), 3.0).metric("|z|");
    // discrepancy in standard errors
    let z = if se > 0.0 { mean.abs_diff(exact) / se } else { mean.abs_diff(exact) * f64::INFINITY };
    check.record(mean, exact, if z.is_nan() { 0.0 } else { z });
    Ok(check.finish())
}

pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport, SimError> {
    let mut d = DecompositionChecks::new();
    for i in 0..config.couplings {
        let t = 1 + i % MAX_HORIZON;
        d.run(&random_coupling(config.seed, i), t, config.fault)?;
    }
    let coin = coin_coupling(DEFAULT_BIAS)?;
    let pennies = pennies_coupling(ioentropy_core::agents::DEFAULT_SFP_ALPHA)?;
    for t in 1..=MAX_HORIZON {
        d.run(&coin, t, config.fault)?;
        d.run(&pennies, t, config.fault)?;
    }

    let mut checks = vec![
        d.generative.finish(),
        d.agent.finish(),
        d.environment.finish(),
        d.dominance.finish(),
        d.kl.finish(),
        d.normalization.finish(),
        d.chain_rule.finish(),
    ];
    checks.extend(process_checks(config.seed)?);
    checks.extend(reward_checks(config.seed)?);
    checks.extend(gibbs_checks(config.seed)?);
    checks.push(monte_carlo_check(config.seed)?);
    Ok(VerifyReport { seed: config.seed, checks })
}
