//! I/O systems, interaction histories and the generative coupling of an agent
//! with an environment.
//!
//! An I/O system is a distribution over interaction strings `a₁o₁a₂o₂…`,
//! fixed by two families of conditionals: `P(a_t | ao_<t)` and
//! `P(o_t | ao_<t a_t)`. For the agent the first family is its policy and the
//! second its prediction of the environment; for the environment the roles
//! are swapped. Coupling takes the action conditionals from the agent and the
//! observation conditionals from the environment.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::process::random_weights;
use crate::rng::{KeyHasher, UniformSource};
use crate::{Error, FiniteDistribution, Symbol};

/// Ordered action and observation sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionAlphabet {
    actions: Vec<String>,
    observations: Vec<String>,
}

impl InteractionAlphabet {
    pub fn new(actions: Vec<String>, observations: Vec<String>) -> Result<Self, Error> {
        for set in [&actions, &observations] {
            if set.is_empty() {
                return Err(Error::EmptySupport);
            }
            if (1..set.len()).any(|i| set[..i].contains(&set[i])) {
                return Err(Error::DuplicateSymbol);
            }
        }
        Ok(InteractionAlphabet { actions, observations })
    }

    /// Symbols `0..n_actions` and `0..n_observations`, named by their index.
    pub fn indexed(n_actions: usize, n_observations: usize) -> Result<Self, Error> {
        let names = |n: usize| (0..n).map(|i| alloc::format!("{i}")).collect::<Vec<_>>();
        Self::new(names(n_actions), names(n_observations))
    }

    /// `{H, T}` on both sides; `H = 0`, `T = 1`.
    pub fn heads_tails() -> Self {
        let ht = || alloc::vec![String::from("H"), String::from("T")];
        InteractionAlphabet { actions: ht(), observations: ht() }
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn observations(&self) -> &[String] {
        &self.observations
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn num_observations(&self) -> usize {
        self.observations.len()
    }

    /// `|A| · |O|`.
    pub fn num_interactions(&self) -> usize {
        self.actions.len() * self.observations.len()
    }
}

/// One action-observation pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interaction {
    pub action: Symbol,
    pub observation: Symbol,
}

impl Interaction {
    pub fn new(action: Symbol, observation: Symbol) -> Self {
        Interaction { action, observation }
    }
}

/// The interaction string `ao_≤t`, with running per-symbol tallies so that
/// count-based systems read their state in constant time.
///
/// Equality, ordering and hashing look at the interaction string only.
#[derive(Debug, Clone, Default)]
pub struct InteractionHistory {
    steps: Vec<Interaction>,
    action_counts: Vec<u32>,
    observation_counts: Vec<u32>,
}

fn bump(counts: &mut Vec<u32>, s: Symbol) {
    let i = s as usize;
    if counts.len() <= i {
        counts.resize(i + 1, 0);
    }
    counts[i] += 1;
}

impl InteractionHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: &[Interaction]) -> Self {
        let mut h = Self::new();
        for &s in steps {
            h.push(s);
        }
        h
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Interaction] {
        &self.steps
    }

    pub fn push(&mut self, step: Interaction) {
        bump(&mut self.action_counts, step.action);
        bump(&mut self.observation_counts, step.observation);
        self.steps.push(step);
    }

    pub fn pop(&mut self) -> Option<Interaction> {
        let step = self.steps.pop()?;
        self.action_counts[step.action as usize] -= 1;
        self.observation_counts[step.observation as usize] -= 1;
        Some(step)
    }

    /// A copy of `self` followed by `step`.
    pub fn extended(&self, step: Interaction) -> Self {
        let mut h = self.clone();
        h.push(step);
        h
    }

    /// The first `n` interactions.
    pub fn prefix(&self, n: usize) -> Self {
        Self::from_steps(&self.steps[..n.min(self.len())])
    }

    pub fn action_count(&self, s: Symbol) -> u32 {
        self.action_counts.get(s as usize).copied().unwrap_or(0)
    }

    pub fn observation_count(&self, s: Symbol) -> u32 {
        self.observation_counts.get(s as usize).copied().unwrap_or(0)
    }

    /// Checks every symbol against `alphabet`.
    pub fn validate(&self, alphabet: &InteractionAlphabet) -> Result<(), Error> {
        for s in &self.steps {
            if s.action as usize >= alphabet.num_actions() {
                return Err(Error::UnknownSymbol(s.action));
            }
            if s.observation as usize >= alphabet.num_observations() {
                return Err(Error::UnknownSymbol(s.observation));
            }
        }
        Ok(())
    }
}

impl PartialEq for InteractionHistory {
    fn eq(&self, other: &Self) -> bool {
        self.steps == other.steps
    }
}

impl Eq for InteractionHistory {}

impl core::hash::Hash for InteractionHistory {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.steps.hash(state);
    }
}

impl PartialOrd for InteractionHistory {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for InteractionHistory {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.steps.cmp(&other.steps)
    }
}

/// The conditional probabilities that define an I/O system.
///
/// Query methods are pure functions of the history. Implementations may keep
/// a running state for the path being sampled, advanced only through
/// [`IoSystem::observe`]; every query must agree with what a replay of the
/// history would give.
pub trait IoSystem {
    /// `P(a_t | ao_<t)` over the action alphabet.
    fn action_distribution(&self, history: &InteractionHistory) -> FiniteDistribution;

    /// `P(o_t | ao_<t a_t)` over the observation alphabet.
    fn observation_prediction(&self, history: &InteractionHistory, action: Symbol) -> FiniteDistribution;

    /// Advances internal state after an interaction has been realized.
    fn observe(&mut self, _step: Interaction) {}

    /// Returns internal state to its initial value.
    fn reset(&mut self) {}
}

impl<T: IoSystem + ?Sized> IoSystem for Box<T> {
    fn action_distribution(&self, history: &InteractionHistory) -> FiniteDistribution {
        (**self).action_distribution(history)
    }

    fn observation_prediction(&self, history: &InteractionHistory, action: Symbol) -> FiniteDistribution {
        (**self).observation_prediction(history, action)
    }

    fn observe(&mut self, step: Interaction) {
        (**self).observe(step)
    }

    fn reset(&mut self) {
        (**self).reset()
    }
}

impl<T: IoSystem + ?Sized> IoSystem for &T {
    fn action_distribution(&self, history: &InteractionHistory) -> FiniteDistribution {
        (**self).action_distribution(history)
    }

    fn observation_prediction(&self, history: &InteractionHistory, action: Symbol) -> FiniteDistribution {
        (**self).observation_prediction(history, action)
    }
}

/// Probability of a history under one system, split into the action factors
/// `P(a_≤t | o_<t)` and the observation factors `P(o_≤t | a_≤t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceProbability {
    pub action_factors: Vec<f64>,
    pub observation_factors: Vec<f64>,
    pub action_product: f64,
    pub observation_product: f64,
    /// `action_product · observation_product`.
    pub total: f64,
}

pub fn sequence_probability<S: IoSystem + ?Sized>(sys: &S, history: &InteractionHistory) -> SequenceProbability {
    let mut prefix = InteractionHistory::new();
    let mut action_factors = Vec::with_capacity(history.len());
    let mut observation_factors = Vec::with_capacity(history.len());
    for &step in history.steps() {
        action_factors.push(sys.action_distribution(&prefix).p(step.action));
        observation_factors.push(sys.observation_prediction(&prefix, step.action).p(step.observation));
        prefix.push(step);
    }
    let action_product: f64 = action_factors.iter().product();
    let observation_product: f64 = observation_factors.iter().product();
    SequenceProbability {
        action_factors,
        observation_factors,
        action_product,
        observation_product,
        total: action_product * observation_product,
    }
}

/// An agent `P` and an environment `Q` coupled through their I/O streams.
#[derive(Debug, Clone)]
pub struct GenerativeCoupling<P, Q> {
    pub agent: P,
    pub environment: Q,
    pub alphabet: InteractionAlphabet,
}

/// The generative distribution `G` of a coupling, viewed as an I/O system:
/// `G(a|h) = P(a|h)` and `G(o|h,a) = Q(o|h,a)`.
#[derive(Debug, Clone, Copy)]
pub struct Generative<'a, P, Q> {
    agent: &'a P,
    environment: &'a Q,
}

impl<P: IoSystem, Q: IoSystem> IoSystem for Generative<'_, P, Q> {
    fn action_distribution(&self, history: &InteractionHistory) -> FiniteDistribution {
        self.agent.action_distribution(history)
    }

    fn observation_prediction(&self, history: &InteractionHistory, action: Symbol) -> FiniteDistribution {
        self.environment.observation_prediction(history, action)
    }
}

impl<P: IoSystem, Q: IoSystem> GenerativeCoupling<P, Q> {
    pub fn new(agent: P, environment: Q, alphabet: InteractionAlphabet) -> Self {
        GenerativeCoupling { agent, environment, alphabet }
    }

    pub fn generative(&self) -> Generative<'_, P, Q> {
        Generative { agent: &self.agent, environment: &self.environment }
    }

    /// Samples `a ~ P(·|h)`, then `o ~ Q(·|h, a)`, one uniform each, and
    /// returns the interaction with the extended history.
    pub fn generative_step<R: UniformSource + ?Sized>(
        &mut self,
        history: &InteractionHistory,
        rng: &mut R,
    ) -> (Interaction, InteractionHistory) {
        let mut next = history.clone();
        let step = self.advance(&mut next, rng);
        (step, next)
    }

    /// In-place form of [`generative_step`](Self::generative_step).
    pub fn advance<R: UniformSource + ?Sized>(&mut self, history: &mut InteractionHistory, rng: &mut R) -> Interaction {
        let actions = self.agent.action_distribution(history);
        let action = actions.support()[actions.sample_index(rng.next_uniform())];
        let observations = self.environment.observation_prediction(history, action);
        let observation = observations.support()[observations.sample_index(rng.next_uniform())];
        let step = Interaction { action, observation };
        self.agent.observe(step);
        self.environment.observe(step);
        history.push(step);
        step
    }

    /// Resets both systems and runs `steps` interactions from the empty history.
    pub fn run_episode<R: UniformSource + ?Sized>(&mut self, steps: usize, rng: &mut R) -> InteractionHistory {
        self.agent.reset();
        self.environment.reset();
        let mut history = InteractionHistory::new();
        for _ in 0..steps {
            self.advance(&mut history, rng);
        }
        history
    }
}

/// An I/O system whose conditionals are pseudo-random functions of the full
/// history (and action), reproducible from `seed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomIoSystem {
    pub actions: usize,
    pub observations: usize,
    pub seed: u64,
    /// Zero out about a quarter of the entries of each conditional.
    pub sparse: bool,
}

impl RandomIoSystem {
    pub fn new(actions: usize, observations: usize, seed: u64) -> Self {
        RandomIoSystem { actions, observations, seed, sparse: false }
    }

    fn key(&self, tag: u64, history: &InteractionHistory) -> KeyHasher {
        history.steps().iter().fold(
            KeyHasher::new(self.seed).push(tag).push(history.len() as u64),
            |h, s| h.push(((s.action as u64) << 32) | s.observation as u64),
        )
    }
}

impl IoSystem for RandomIoSystem {
    fn action_distribution(&self, history: &InteractionHistory) -> FiniteDistribution {
        random_weights(self.key(0xA, history), self.actions, self.sparse)
    }

    fn observation_prediction(&self, history: &InteractionHistory, action: Symbol) -> FiniteDistribution {
        random_weights(self.key(0xB, history).push(action as u64), self.observations, self.sparse)
    }
}
