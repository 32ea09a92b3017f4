//! Example I/O systems over `{H, T}`: a biased coin, the Laplace agent, and
//! smooth fictitious-play players for matching pennies.
//!
//! Every system derives its state from the history alone. The running state
//! kept for [`IoSystem::observe`] mirrors the replay and is what the
//! state-level methods (`predict`, `act`, `policy`) read.

use crate::io::{Interaction, InteractionHistory, IoSystem};
use crate::{Error, FiniteDistribution, Symbol};

pub const HEADS: Symbol = 0;
pub const TAILS: Symbol = 1;

/// Default sigmoid gain for fictitious play.
pub const DEFAULT_SFP_ALPHA: f64 = 4.0;

fn bernoulli(p: f64) -> FiniteDistribution {
    FiniteDistribution::bernoulli(p).expect("probability in [0, 1]")
}

fn check_probability(p: f64) -> Result<f64, Error> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// A memoryless coin used as the environment.
///
/// It emits `H` with probability `bias` and expects the agent's action to be
/// `H` with probability `action_expectation`, independently of the history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasedCoin {
    bias: f64,
    action_expectation: f64,
}

impl BiasedCoin {
    pub fn new(bias: f64) -> Result<Self, Error> {
        Self::with_action_expectation(bias, 0.5)
    }

    pub fn with_action_expectation(bias: f64, action_expectation: f64) -> Result<Self, Error> {
        Ok(BiasedCoin {
            bias: check_probability(bias)?,
            action_expectation: check_probability(action_expectation)?,
        })
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn action_expectation(&self) -> f64 {
        self.action_expectation
    }

    /// `(action expectation, observation emission)`.
    pub fn policy(&self) -> (FiniteDistribution, FiniteDistribution) {
        (bernoulli(self.action_expectation), bernoulli(self.bias))
    }
}

impl IoSystem for BiasedCoin {
    fn action_distribution(&self, _history: &InteractionHistory) -> FiniteDistribution {
        bernoulli(self.action_expectation)
    }

    fn observation_prediction(&self, _history: &InteractionHistory, _action: Symbol) -> FiniteDistribution {
        bernoulli(self.bias)
    }
}

/// Predicts coin tosses by the rule of succession and bets on the likelier face.
///
/// `P(o = H | t, n) = (n + 1) / (t + 2)` after `t` tosses with `n` heads. The
/// action is `H` whenever that estimate is at least one half, so the tie at
/// exactly one half (including the very first move) resolves to `H`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LaplaceAgent {
    tosses: u32,
    heads: u32,
}

impl LaplaceAgent {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(tosses: u32, heads: u32) -> Result<Self, Error> {
        if heads > tosses {
            return Err(Error::InvalidParameter("more heads than tosses"));
        }
        Ok(LaplaceAgent { tosses, heads })
    }

    /// State after the observations in `history`.
    pub fn replay(history: &InteractionHistory) -> Self {
        LaplaceAgent { tosses: history.len() as u32, heads: history.observation_count(HEADS) }
    }

    pub fn tosses(&self) -> u32 {
        self.tosses
    }

    pub fn heads(&self) -> u32 {
        self.heads
    }

    pub fn estimate(&self) -> f64 {
        (self.heads as f64 + 1.0) / (self.tosses as f64 + 2.0)
    }

    pub fn predict(&self) -> FiniteDistribution {
        bernoulli(self.estimate())
    }

    pub fn act(&self) -> FiniteDistribution {
        // (n+1)/(t+2) >= 1/2, in integers
        let choice = if 2 * (self.heads as u64 + 1) >= self.tosses as u64 + 2 { HEADS } else { TAILS };
        FiniteDistribution::point_mass(2, choice).expect("binary alphabet")
    }
}

impl IoSystem for LaplaceAgent {
    fn action_distribution(&self, history: &InteractionHistory) -> FiniteDistribution {
        Self::replay(history).act()
    }

    fn observation_prediction(&self, history: &InteractionHistory, _action: Symbol) -> FiniteDistribution {
        Self::replay(history).predict()
    }

    fn observe(&mut self, step: Interaction) {
        self.tosses += 1;
        if step.observation == HEADS {
            self.heads += 1;
        }
    }

    fn reset(&mut self) {
        *self = Self::default();
    }
}

/// Which outcome a matching-pennies player wants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Wins on `HH` or `TT`.
    Matcher,
    /// Wins on `HT` or `TH`.
    Unmatcher,
}

/// Which end of the coupling a player sits on. The agent's opponent moves are
/// the observations; the environment's are the actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Agent,
    Environment,
}

/// A smooth fictitious-play player.
///
/// It counts the opponent's heads and tails (`κ⁽¹⁾`, `κ⁽²⁾`), predicts the
/// opponent plays `H` with `γ = κ⁽¹⁾ / (κ⁽¹⁾ + κ⁽²⁾)`, and answers through a
/// sigmoid best response with gain `alpha`: `σ(α(γ - ½))` for the matcher and
/// `σ(α(½ - γ))` for the unmatcher. Counts start at the pseudo-counts `(1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FictitiousPlayer {
    role: Role,
    side: Side,
    alpha: f64,
    prior: [f64; 2],
    kappa: [f64; 2],
}

impl FictitiousPlayer {
    pub fn new(role: Role, side: Side, alpha: f64) -> Result<Self, Error> {
        Self::with_prior(role, side, alpha, [1.0, 1.0])
    }

    pub fn with_prior(role: Role, side: Side, alpha: f64, prior: [f64; 2]) -> Result<Self, Error> {
        if !crate::ext::is_positive_finite(alpha) {
            return Err(Error::InvalidAlpha(alpha));
        }
        if prior.iter().any(|c| !c.is_finite() || *c < 0.0) || prior[0] + prior[1] <= 0.0 {
            return Err(Error::InvalidParameter("pseudo-counts must be non-negative with a positive sum"));
        }
        Ok(FictitiousPlayer { role, side, alpha, prior, kappa: prior })
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(κ⁽¹⁾, κ⁽²⁾)`: opponent heads and tails, pseudo-counts included.
    pub fn kappa(&self) -> [f64; 2] {
        self.kappa
    }

    /// Predicted probability that the opponent plays `H`.
    pub fn gamma(&self) -> f64 {
        self.kappa[0] / (self.kappa[0] + self.kappa[1])
    }

    /// State after the opponent moves recorded in `history`.
    pub fn replay(&self, history: &InteractionHistory) -> Self {
        let (heads, tails) = match self.side {
            Side::Agent => (history.observation_count(HEADS), history.observation_count(TAILS)),
            Side::Environment => (history.action_count(HEADS), history.action_count(TAILS)),
        };
        FictitiousPlayer {
            kappa: [self.prior[0] + heads as f64, self.prior[1] + tails as f64],
            ..*self
        }
    }

    /// Own mixed strategy.
    pub fn policy(&self) -> FiniteDistribution {
        let drive = match self.role {
            Role::Matcher => self.gamma() - 0.5,
            Role::Unmatcher => 0.5 - self.gamma(),
        };
        bernoulli(sigmoid(self.alpha * drive))
    }

    /// Prediction of the opponent's next move.
    pub fn predict(&self) -> FiniteDistribution {
        bernoulli(self.gamma())
    }

    fn opponent_move(&self, step: Interaction) -> Symbol {
        match self.side {
            Side::Agent => step.observation,
            Side::Environment => step.action,
        }
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

impl IoSystem for FictitiousPlayer {
    fn action_distribution(&self, history: &InteractionHistory) -> FiniteDistribution {
        let state = self.replay(history);
        match self.side {
            Side::Agent => state.policy(),
            Side::Environment => state.predict(),
        }
    }

    // Moves are simultaneous: the environment-side player does not react to
    // the action of the current round.
    fn observation_prediction(&self, history: &InteractionHistory, _action: Symbol) -> FiniteDistribution {
        let state = self.replay(history);
        match self.side {
            Side::Agent => state.predict(),
            Side::Environment => state.policy(),
        }
    }

    fn observe(&mut self, step: Interaction) {
        match self.opponent_move(step) {
            HEADS => self.kappa[0] += 1.0,
            _ => self.kappa[1] += 1.0,
        }
    }

    fn reset(&mut self) {
        self.kappa = self.prior;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::entropy;

    fn h_of(steps: &[(Symbol, Symbol)]) -> InteractionHistory {
        InteractionHistory::from_steps(&steps.iter().map(|&(a, o)| Interaction::new(a, o)).collect::<alloc::vec::Vec<_>>())
    }

    #[test]
    fn coin_policy() {
        let coin = BiasedCoin::new(0.9).unwrap();
        let (act, obs) = coin.policy();
        assert_eq!(act.p(HEADS), 0.5);
        assert_eq!(obs.p(HEADS), 0.9);
        let h = h_of(&[(0, 1), (1, 1), (0, 0)]);
        assert_eq!(coin.observation_prediction(&h, TAILS).p(HEADS), 0.9);
        assert_eq!(coin.action_distribution(&h).p(HEADS), 0.5);
        let sure = BiasedCoin::new(1.0).unwrap();
        assert_eq!(entropy(&sure.policy().1), 0.0);
        assert!(BiasedCoin::new(1.1).is_err());
        assert!(BiasedCoin::with_action_expectation(0.5, -0.1).is_err());
    }

    #[test]
    fn laplace_prediction() {
        assert_eq!(LaplaceAgent::new().predict().p(HEADS), 0.5);
        let a = LaplaceAgent::from_counts(10, 9).unwrap();
        assert!((a.predict().p(HEADS) - 10.0 / 12.0).abs() < 1e-15);
        assert_eq!(LaplaceAgent::from_counts(2, 2).unwrap().predict().p(HEADS), 0.75);
        assert!(LaplaceAgent::from_counts(2, 3).is_err());
    }

    #[test]
    fn laplace_action() {
        assert_eq!(LaplaceAgent::new().act().p(HEADS), 1.0);
        assert_eq!(LaplaceAgent::from_counts(2, 0).unwrap().act().p(TAILS), 1.0);
        assert_eq!(LaplaceAgent::from_counts(2, 1).unwrap().act().p(HEADS), 1.0);
        assert_eq!(LaplaceAgent::from_counts(5, 1).unwrap().act().p(TAILS), 1.0);
        for t in 0..20 {
            for n in 0..=t {
                assert_eq!(entropy(&LaplaceAgent::from_counts(t, n).unwrap().act()), 0.0);
            }
        }
    }

    #[test]
    fn laplace_replay_matches_observe() {
        let h = h_of(&[(0, 0), (0, 1), (1, 0), (0, 0)]);
        let mut live = LaplaceAgent::new();
        for &s in h.steps() {
            live.observe(s);
        }
        assert_eq!(live, LaplaceAgent::replay(&h));
        assert_eq!((live.tosses(), live.heads()), (4, 3));
        live.reset();
        assert_eq!(live, LaplaceAgent::new());
    }

    #[test]
    fn sfp_policy_examples() {
        for role in [Role::Matcher, Role::Unmatcher] {
            for alpha in [0.1, 4.0, 100.0] {
                let p = FictitiousPlayer::new(role, Side::Agent, alpha).unwrap();
                assert_eq!(p.policy().p(HEADS), 0.5);
            }
        }
        // γ = 1 needs zero tails
        let m = FictitiousPlayer::with_prior(Role::Matcher, Side::Agent, 4.0, [1.0, 0.0]).unwrap();
        assert!((m.policy().p(HEADS) - 0.880_797_077_977_882_4).abs() < 1e-15);
        let u = FictitiousPlayer::with_prior(Role::Unmatcher, Side::Agent, 4.0, [1.0, 0.0]).unwrap();
        assert!((u.policy().p(HEADS) - 0.119_202_922_022_117_56).abs() < 1e-15);
        assert!(FictitiousPlayer::new(Role::Matcher, Side::Agent, 0.0).is_err());
        assert!(FictitiousPlayer::with_prior(Role::Matcher, Side::Agent, 1.0, [0.0, 0.0]).is_err());
    }

    #[test]
    fn sfp_prediction_follows_counts() {
        let p = FictitiousPlayer::new(Role::Matcher, Side::Agent, 4.0).unwrap();
        assert_eq!(p.predict().p(HEADS), 0.5);
        let c = FictitiousPlayer::with_prior(Role::Matcher, Side::Agent, 4.0, [3.0, 1.0]).unwrap();
        assert_eq!(c.predict().p(HEADS), 0.75);
        for k in 0..10u32 {
            let steps: alloc::vec::Vec<_> = (0..k).map(|_| (TAILS, HEADS)).collect();
            let g = p.replay(&h_of(&steps)).gamma();
            assert!((g - (k as f64 + 1.0) / (k as f64 + 2.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn sfp_sides_read_the_opponent_stream() {
        // agent plays H, environment plays T, twice
        let h = h_of(&[(HEADS, TAILS), (HEADS, TAILS)]);
        let agent = FictitiousPlayer::new(Role::Matcher, Side::Agent, 4.0).unwrap();
        let env = FictitiousPlayer::new(Role::Unmatcher, Side::Environment, 4.0).unwrap();
        assert_eq!(agent.replay(&h).kappa(), [1.0, 3.0]);
        assert_eq!(env.replay(&h).kappa(), [3.0, 1.0]);
        assert_eq!(env.action_distribution(&h).p(HEADS), 0.75);
        // unmatcher expecting H leans to T
        assert!(env.observation_prediction(&h, HEADS).p(HEADS) < 0.5);
        // matcher expecting T leans to T
        assert!(agent.action_distribution(&h).p(HEADS) < 0.5);

        let mut live = env;
        for &s in h.steps() {
            live.observe(s);
        }
        assert_eq!(live, env.replay(&h));
        live.reset();
        assert_eq!(live, env);
    }

    #[test]
    fn extreme_gain_stays_normalized() {
        let p = FictitiousPlayer::with_prior(Role::Matcher, Side::Agent, 1e6, [5.0, 0.0]).unwrap();
        let d = p.policy();
        assert_eq!(d.p(HEADS), 1.0);
        assert_eq!(d.p(TAILS), 0.0);
    }
}
