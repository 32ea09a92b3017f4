//! Expected rewards and utilities of a coupled agent-environment system, by
//! exact enumeration, and entropy traces along a single realized run.
//!
//! Three computations are kept apart on purpose:
//!
//! * the **direct** route evaluates `Σ_h G(h) ln S(h)` from the full sequence
//!   probability of each system `S ∈ {G, P, Q}`;
//! * the **decomposition** route sums the log action factors and log
//!   observation factors separately, giving the entropy terms
//!   `H[P(a_≤t|o_<t)]`, `H[Q(o_≤t|a_≤t)]` and the divergences
//!   `D[Q(o_≤t|a_≤t) ‖ P(o_≤t|a_≤t)]`, `D[P(a_≤t|o_<t) ‖ Q(a_≤t|o_<t)]`;
//! * the **per-step** route averages the instantaneous conditional entropies
//!   and divergences over prefixes (the GU/PU rates).
//!
//! Agreement between them is what [`ExpectedRewardReport::decomposition_gap`]
//! and [`UtilityDecomposition::deviation_from`] measure.

use alloc::vec::Vec;

use crate::entropy::{entropy, kl};
use crate::io::{sequence_probability, GenerativeCoupling, Interaction, InteractionAlphabet, InteractionHistory, IoSystem};
use crate::process::{string_count, StochasticProcess};
use crate::rng::UniformSource;
use crate::{Error, ExtReal, FiniteDistribution, Symbol};

/// Default cap on the number of interaction strings an enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 65_536;

/// Expected rewards over the first `horizon` interactions.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedRewardReport {
    pub horizon: usize,
    /// `E_G[ln G(h)]`, direct route.
    pub e_reward_g: ExtReal,
    /// `E_G[ln P(h)]`, direct route.
    pub e_reward_p: ExtReal,
    /// `E_G[ln Q(h)]`, direct route.
    pub e_reward_q: ExtReal,
    /// `H[P(a_≤t | o_<t)]`.
    pub h_actions: f64,
    /// `H[Q(o_≤t | a_≤t)]`.
    pub h_observations: f64,
    /// `D[Q(o_≤t | a_≤t) ‖ P(o_≤t | a_≤t)]`.
    pub kl_obs: ExtReal,
    /// `D[P(a_≤t | o_<t) ‖ Q(a_≤t | o_<t)]`.
    pub kl_act: ExtReal,
    /// `Σ_h G(h)` over the enumerated strings.
    pub total_mass: f64,
    /// Strings with `G(h) > 0`.
    pub support_size: usize,
}

impl ExpectedRewardReport {
    /// `-(H_actions + H_observations)`.
    pub fn decomposed_g(&self) -> ExtReal {
        ExtReal::Finite(-(self.h_actions + self.h_observations))
    }

    /// `-(H_actions + H_observations) - D_obs`.
    pub fn decomposed_p(&self) -> ExtReal {
        self.decomposed_g() - self.kl_obs
    }

    /// `-(H_actions + H_observations) - D_act`.
    pub fn decomposed_q(&self) -> ExtReal {
        self.decomposed_g() - self.kl_act
    }

    /// Largest absolute gap between the direct and decomposed expectations,
    /// in the order `[G, P, Q]`.
    pub fn decomposition_gap(&self) -> [f64; 3] {
        [
            self.e_reward_g.abs_diff(self.decomposed_g()),
            self.e_reward_p.abs_diff(self.decomposed_p()),
            self.e_reward_q.abs_diff(self.decomposed_q()),
        ]
    }
}

/// Expected utilities (reward rates) and their GU/PU contributions, in nats
/// per interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityDecomposition {
    pub horizon: usize,
    /// `-(1/t) Σ_τ E_G H[P(a_τ | ao_<τ)]`.
    pub gu_agent: f64,
    /// `-(1/t) Σ_τ E_G H[Q(o_τ | ao_<τ a_τ)]`.
    pub gu_env: f64,
    /// `-(1/t) Σ_τ E_G D[Q(o_τ | ·) ‖ P(o_τ | ·)]`.
    pub pu_agent: ExtReal,
    /// `-(1/t) Σ_τ E_G D[P(a_τ | ·) ‖ Q(a_τ | ·)]`.
    pub pu_env: ExtReal,
    pub e_utility_g: ExtReal,
    pub e_utility_p: ExtReal,
    pub e_utility_q: ExtReal,
}

impl UtilityDecomposition {
    /// Largest absolute gap to the full-sequence quantities of `report`
    /// divided by the horizon.
    pub fn deviation_from(&self, report: &ExpectedRewardReport) -> f64 {
        let t = report.horizon as f64;
        [
            ExtReal::Finite(self.gu_agent).abs_diff(ExtReal::Finite(-report.h_actions / t)),
            ExtReal::Finite(self.gu_env).abs_diff(ExtReal::Finite(-report.h_observations / t)),
            self.pu_agent.abs_diff((-report.kl_obs).over(t)),
            self.pu_env.abs_diff((-report.kl_act).over(t)),
            self.e_utility_g.abs_diff(report.e_reward_g.over(t)),
            self.e_utility_p.abs_diff(report.e_reward_p.over(t)),
            self.e_utility_q.abs_diff(report.e_reward_q.over(t)),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn check_budget(alphabet: &InteractionAlphabet, t: usize, budget: u128) -> Result<(), Error> {
    string_count(alphabet.num_interactions(), t, budget).map(|_| ())
}

#[derive(Default)]
struct RewardSums {
    direct_g: f64,
    direct_p: ExtReal,
    direct_q: ExtReal,
    h_actions: f64,
    h_observations: f64,
    kl_obs: ExtReal,
    kl_act: ExtReal,
    mass: f64,
    support: usize,
}

impl Default for ExtReal {
    fn default() -> Self {
        ExtReal::ZERO
    }
}

/// Log factors accumulated along one path of the interaction tree.
#[derive(Clone, Copy)]
struct PathLogs {
    weight: f64,
    p_act: f64,
    q_obs: f64,
    p_obs: ExtReal,
    q_act: ExtReal,
}

/// Exact expected rewards of `G`, `P` and `Q` over all strings of length `t`.
///
/// Branches with `G = 0` are pruned; they contribute nothing to an expectation
/// under `G`. A zero under `P` (or `Q`) on a `G`-possible string makes the
/// corresponding expectation `-∞` and the divergence `+∞`.
pub fn expected_rewards_bruteforce<P: IoSystem, Q: IoSystem>(
    coupling: &GenerativeCoupling<P, Q>,
    t: usize,
    budget: u128,
) -> Result<ExpectedRewardReport, Error> {
    check_budget(&coupling.alphabet, t, budget)?;
    let mut sums = RewardSums::default();
    let start = PathLogs { weight: 1.0, p_act: 0.0, q_obs: 0.0, p_obs: ExtReal::ZERO, q_act: ExtReal::ZERO };
    reward_walk(coupling, t, &mut InteractionHistory::new(), start, &mut sums);
    Ok(ExpectedRewardReport {
        horizon: t,
        e_reward_g: ExtReal::Finite(sums.direct_g),
        e_reward_p: sums.direct_p,
        e_reward_q: sums.direct_q,
        h_actions: sums.h_actions,
        h_observations: sums.h_observations,
        kl_obs: sums.kl_obs,
        kl_act: sums.kl_act,
        total_mass: sums.mass,
        support_size: sums.support,
    })
}

fn reward_walk<P: IoSystem, Q: IoSystem>(
    c: &GenerativeCoupling<P, Q>,
    t: usize,
    h: &mut InteractionHistory,
    path: PathLogs,
    sums: &mut RewardSums,
) {
    if h.len() == t {
        // direct route: full-sequence probabilities
        let g = sequence_probability(&c.generative(), h).total;
        let p = sequence_probability(&c.agent, h).total;
        let q = sequence_probability(&c.environment, h).total;
        sums.direct_g += g * libm::log(g);
        sums.direct_p += ExtReal::ln(p).weighted(g);
        sums.direct_q += ExtReal::ln(q).weighted(g);
        sums.mass += g;
        sums.support += 1;

        // decomposition route: separated factor logs
        let w = path.weight;
        sums.h_actions -= w * path.p_act;
        sums.h_observations -= w * path.q_obs;
        sums.kl_obs += (ExtReal::Finite(path.q_obs) - path.p_obs).weighted(w);
        sums.kl_act += (ExtReal::Finite(path.p_act) - path.q_act).weighted(w);
        return;
    }
    let p_actions = c.agent.action_distribution(h);
    let q_actions = c.environment.action_distribution(h);
    for (&a, pa) in p_actions.iter() {
        if pa == 0.0 {
            continue;
        }
        let q_obs = c.environment.observation_prediction(h, a);
        let p_obs = c.agent.observation_prediction(h, a);
        for (&o, qo) in q_obs.iter() {
            if qo == 0.0 {
                continue;
            }
            let next = PathLogs {
                weight: path.weight * pa * qo,
                p_act: path.p_act + libm::log(pa),
                q_obs: path.q_obs + libm::log(qo),
                p_obs: path.p_obs + ExtReal::ln(p_obs.p(o)),
                q_act: path.q_act + ExtReal::ln(q_actions.p(a)),
            };
            h.push(Interaction::new(a, o));
            reward_walk(c, t, h, next, sums);
            h.pop();
        }
    }
}

#[derive(Default)]
struct RateSums {
    h_act_agent: f64,
    h_obs_env: f64,
    kl_obs: ExtReal,
    kl_act: ExtReal,
}

/// Exact GU/PU rates by summing instantaneous conditional entropies and
/// divergences over every `G`-reachable prefix shorter than `t`.
pub fn expected_utilities<P: IoSystem, Q: IoSystem>(
    coupling: &GenerativeCoupling<P, Q>,
    t: usize,
    budget: u128,
) -> Result<UtilityDecomposition, Error> {
    if t == 0 {
        return Err(Error::EmptyString);
    }
    check_budget(&coupling.alphabet, t, budget)?;
    let mut sums = RateSums::default();
    rate_walk(coupling, t, &mut InteractionHistory::new(), 1.0, &mut sums);
    let n = t as f64;
    let gu_agent = -sums.h_act_agent / n;
    let gu_env = -sums.h_obs_env / n;
    let pu_agent = (-sums.kl_obs).over(n);
    let pu_env = (-sums.kl_act).over(n);
    let e_utility_g = ExtReal::Finite(gu_agent + gu_env);
    Ok(UtilityDecomposition {
        horizon: t,
        gu_agent,
        gu_env,
        pu_agent,
        pu_env,
        e_utility_g,
        e_utility_p: e_utility_g + pu_agent,
        e_utility_q: e_utility_g + pu_env,
    })
}

fn rate_walk<P: IoSystem, Q: IoSystem>(
    c: &GenerativeCoupling<P, Q>,
    t: usize,
    h: &mut InteractionHistory,
    weight: f64,
    sums: &mut RateSums,
) {
    if h.len() == t {
        return;
    }
    let p_actions = c.agent.action_distribution(h);
    let q_actions = c.environment.action_distribution(h);
    sums.h_act_agent += weight * entropy(&p_actions);
    sums.kl_act += kl(&p_actions, &q_actions).expect("shared action alphabet").weighted(weight);
    for (&a, pa) in p_actions.iter() {
        if pa == 0.0 {
            continue;
        }
        let w = weight * pa;
        let q_obs = c.environment.observation_prediction(h, a);
        let p_obs = c.agent.observation_prediction(h, a);
        sums.h_obs_env += w * entropy(&q_obs);
        sums.kl_obs += kl(&q_obs, &p_obs).expect("shared observation alphabet").weighted(w);
        for (&o, qo) in q_obs.iter() {
            if qo == 0.0 {
                continue;
            }
            h.push(Interaction::new(a, o));
            rate_walk(c, t, h, w * qo, sums);
            h.pop();
        }
    }
}

/// An I/O system read as a stochastic process over interactions, with
/// `(a, o)` encoded as `a · |O| + o` and `P(z | z_<t) = P(a | h) P(o | h, a)`.
#[derive(Debug, Clone, Copy)]
pub struct InteractionProcess<'a, S: ?Sized> {
    system: &'a S,
    alphabet: &'a InteractionAlphabet,
}

impl<'a, S: IoSystem + ?Sized> InteractionProcess<'a, S> {
    pub fn new(system: &'a S, alphabet: &'a InteractionAlphabet) -> Self {
        InteractionProcess { system, alphabet }
    }

    pub fn encode(&self, step: Interaction) -> Symbol {
        step.action * self.alphabet.num_observations() as Symbol + step.observation
    }

    pub fn decode(&self, z: Symbol) -> Interaction {
        let n = self.alphabet.num_observations() as Symbol;
        Interaction::new(z / n, z % n)
    }
}

impl<S: IoSystem + ?Sized> StochasticProcess for InteractionProcess<'_, S> {
    fn alphabet_size(&self) -> usize {
        self.alphabet.num_interactions()
    }

    fn conditional(&self, prefix: &[Symbol]) -> FiniteDistribution {
        let steps: Vec<Interaction> = prefix.iter().map(|&z| self.decode(z)).collect();
        let h = InteractionHistory::from_steps(&steps);
        let actions = self.system.action_distribution(&h);
        let n_obs = self.alphabet.num_observations();
        let mut probs = alloc::vec![0.0; self.alphabet_size()];
        for (&a, pa) in actions.iter() {
            if pa == 0.0 {
                continue;
            }
            let obs = self.system.observation_prediction(&h, a);
            for (&o, po) in obs.iter() {
                probs[a as usize * n_obs + o as usize] = pa * po;
            }
        }
        FiniteDistribution::from_weights((0..probs.len() as Symbol).collect(), &probs)
            .expect("product of valid conditionals")
    }
}

/// One step of an [`EntropyTrace`]. Values are nats; `+∞`/`-∞` are IEEE
/// infinities here since the trace is a reporting type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    /// 1-based step index.
    pub step: usize,
    pub action: Symbol,
    pub observation: Symbol,
    /// `H[P(a_τ | ao_<τ)]`
    pub h_act_agent: f64,
    /// `H[Q(o_τ | ao_<τ a_τ)]`
    pub h_obs_env: f64,
    /// `H[P(o_τ | ao_<τ a_τ)]`
    pub h_obs_agent: f64,
    /// `H[Q(a_τ | ao_<τ)]`
    pub h_act_env: f64,
    /// `D[Q(o_τ | ·) ‖ P(o_τ | ·)]`
    pub kl_obs_inst: f64,
    /// `D[P(a_τ | ·) ‖ Q(a_τ | ·)]`
    pub kl_act_inst: f64,
    pub h_act_agent_cum: f64,
    pub h_obs_env_cum: f64,
    pub h_obs_agent_cum: f64,
    pub h_act_env_cum: f64,
    pub kl_obs_cum: f64,
    pub kl_act_cum: f64,
    /// Realized rewards `ln G`, `ln P`, `ln Q` of this step's interaction.
    pub r_g: f64,
    pub r_p: f64,
    pub r_q: f64,
    /// Running utilities: means of the realized rewards so far.
    pub u_g_cum: f64,
    pub u_p_cum: f64,
    pub u_q_cum: f64,
}

impl TraceRow {
    /// `H[P(a)] + H[Q(o)] + D[Q(o) ‖ P(o)]`, averaged up to this step: the
    /// agent's cross-entropy rate under the conditionals of the realized path.
    pub fn cross_entropy_rate(&self) -> f64 {
        self.h_act_agent_cum + self.h_obs_env_cum + self.kl_obs_cum
    }
}

/// Per-step entropy dynamics along one realized history.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EntropyTrace {
    pub rows: Vec<TraceRow>,
}

impl EntropyTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// Row for 1-based `step`.
    pub fn at(&self, step: usize) -> Option<&TraceRow> {
        step.checked_sub(1).and_then(|i| self.rows.get(i))
    }
}

struct Running {
    total: f64,
}

impl Running {
    fn push(&mut self, x: f64, n: usize) -> f64 {
        self.total += x;
        self.total / n as f64
    }
}

/// Evaluates both systems' instantaneous conditionals at each realized prefix.
///
/// Symbols outside a distribution's support count as probability zero.
pub fn realized_trace<P: IoSystem, Q: IoSystem>(
    coupling: &GenerativeCoupling<P, Q>,
    history: &InteractionHistory,
) -> EntropyTrace {
    let mut rows = Vec::with_capacity(history.len());
    let mut prefix = InteractionHistory::new();
    let mut run: [Running; 9] = core::array::from_fn(|_| Running { total: 0.0 });
    for (i, &step) in history.steps().iter().enumerate() {
        let n = i + 1;
        let pa = coupling.agent.action_distribution(&prefix);
        let qa = coupling.environment.action_distribution(&prefix);
        let qo = coupling.environment.observation_prediction(&prefix, step.action);
        let po = coupling.agent.observation_prediction(&prefix, step.action);

        let h_act_agent = entropy(&pa);
        let h_obs_env = entropy(&qo);
        let h_obs_agent = entropy(&po);
        let h_act_env = entropy(&qa);
        let kl_obs_inst = kl(&qo, &po).expect("shared observation alphabet").to_f64();
        let kl_act_inst = kl(&pa, &qa).expect("shared action alphabet").to_f64();

        let ln = |d: &FiniteDistribution, s: Symbol| ExtReal::ln(d.p(s)).to_f64();
        let r_g = ln(&pa, step.action) + ln(&qo, step.observation);
        let r_p = ln(&pa, step.action) + ln(&po, step.observation);
        let r_q = ln(&qa, step.action) + ln(&qo, step.observation);

        rows.push(TraceRow {
            step: n,
            action: step.action,
            observation: step.observation,
            h_act_agent,
            h_obs_env,
            h_obs_agent,
            h_act_env,
            kl_obs_inst,
            kl_act_inst,
            h_act_agent_cum: run[0].push(h_act_agent, n),
            h_obs_env_cum: run[1].push(h_obs_env, n),
            h_obs_agent_cum: run[2].push(h_obs_agent, n),
            h_act_env_cum: run[3].push(h_act_env, n),
            kl_obs_cum: run[4].push(kl_obs_inst, n),
            kl_act_cum: run[5].push(kl_act_inst, n),
            r_g,
            r_p,
            r_q,
            u_g_cum: run[6].push(r_g, n),
            u_p_cum: run[7].push(r_p, n),
            u_q_cum: run[8].push(r_q, n),
        });
        prefix.push(step);
    }
    EntropyTrace { rows }
}

/// Sample means and standard errors of the realized total rewards
/// `ln G(h)`, `ln P(h)`, `ln Q(h)` over independent episodes.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloEstimate {
    pub episodes: usize,
    pub horizon: usize,
    /// `[G, P, Q]`
    pub mean: [f64; 3],
    /// `[G, P, Q]`
    pub std_error: [f64; 3],
}

pub fn monte_carlo_rewards<P, Q, R>(
    coupling: &mut GenerativeCoupling<P, Q>,
    t: usize,
    episodes: usize,
    rng: &mut R,
) -> Result<MonteCarloEstimate, Error>
where
    P: IoSystem,
    Q: IoSystem,
    R: UniformSource + ?Sized,
{
    if episodes < 2 {
        return Err(Error::InvalidParameter("need at least two episodes for a standard error"));
    }
    let mut sum = [0.0; 3];
    let mut sum_sq = [0.0; 3];
    for _ in 0..episodes {
        let h = coupling.run_episode(t, rng);
        let values = [
            libm::log(sequence_probability(&coupling.generative(), &h).total),
            ExtReal::ln(sequence_probability(&coupling.agent, &h).total).to_f64(),
            ExtReal::ln(sequence_probability(&coupling.environment, &h).total).to_f64(),
        ];
        for k in 0..3 {
            sum[k] += values[k];
            sum_sq[k] += values[k] * values[k];
        }
    }
    let n = episodes as f64;
    let mean = sum.map(|s| s / n);
    let mut std_error = [0.0; 3];
    for k in 0..3 {
        let var = ((sum_sq[k] - n * mean[k] * mean[k]) / (n - 1.0)).max(0.0);
        std_error[k] = libm::sqrt(var / n);
    }
    Ok(MonteCarloEstimate { episodes, horizon: t, mean, std_error })
}
