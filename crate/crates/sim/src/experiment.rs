//! The two example experiments: a Laplace agent against a biased coin, and
//! two smooth fictitious-play players at matching pennies.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ioentropy_core::agents::{BiasedCoin, FictitiousPlayer, LaplaceAgent, Role, Side, DEFAULT_SFP_ALPHA};
use ioentropy_core::analysis::{realized_trace, EntropyTrace, TraceRow};
use ioentropy_core::io::{GenerativeCoupling, InteractionAlphabet, InteractionHistory, IoSystem};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::trace::{format_real, write_trace};
use crate::SimError;

pub const DEFAULT_COIN_STEPS: usize = 1000;
pub const DEFAULT_PENNIES_STEPS: usize = 5000;
pub const DEFAULT_BIAS: f64 = 0.9;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Coin,
    Pennies,
    Verify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Coin => "coin",
            Experiment::Pennies => "pennies",
            Experiment::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub steps: usize,
    pub seed: u64,
    pub bias: f64,
    pub alpha: f64,
    /// Where the CSV trace goes; `<experiment>_trace.csv` when unset.
    pub output_path: Option<PathBuf>,
    pub summary: bool,
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        RunConfig {
            experiment,
            steps: match experiment {
                Experiment::Pennies => DEFAULT_PENNIES_STEPS,
                _ => DEFAULT_COIN_STEPS,
            },
            seed: DEFAULT_SEED,
            bias: DEFAULT_BIAS,
            alpha: DEFAULT_SFP_ALPHA,
            output_path: None,
            summary: false,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.steps == 0 {
            return Err(SimError::Config("--steps must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.bias) {
            return Err(SimError::Config(format!("--bias must lie in [0, 1], got {}", self.bias)));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(SimError::Config(format!("--alpha must be positive, got {}", self.alpha)));
        }
        Ok(())
    }

    pub fn output(&self) -> PathBuf {
        self.output_path
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}_trace.csv", self.experiment.name())))
    }
}

pub fn coin_coupling(bias: f64) -> Result<GenerativeCoupling<LaplaceAgent, BiasedCoin>, SimError> {
    Ok(GenerativeCoupling::new(LaplaceAgent::new(), BiasedCoin::new(bias)?, InteractionAlphabet::heads_tails()))
}

/// Player 1 (matcher) is the agent, player 2 (unmatcher) the environment.
pub fn pennies_coupling(alpha: f64) -> Result<GenerativeCoupling<FictitiousPlayer, FictitiousPlayer>, SimError> {
    Ok(GenerativeCoupling::new(
        FictitiousPlayer::new(Role::Matcher, Side::Agent, alpha)?,
        FictitiousPlayer::new(Role::Unmatcher, Side::Environment, alpha)?,
        InteractionAlphabet::heads_tails(),
    ))
}

/// One simulated episode with its entropy trace.
#[derive(Debug, Clone)]
pub struct Run {
    pub seed: u64,
    pub history: InteractionHistory,
    pub trace: EntropyTrace,
}

fn simulate<P: IoSystem, Q: IoSystem>(mut coupling: GenerativeCoupling<P, Q>, steps: usize, seed: u64) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let history = coupling.run_episode(steps, &mut rng);
    let trace = realized_trace(&coupling, &history);
    Run { seed, history, trace }
}

pub fn simulate_coin(bias: f64, steps: usize, seed: u64) -> Result<Run, SimError> {
    Ok(simulate(coin_coupling(bias)?, steps, seed))
}

pub fn simulate_pennies(alpha: f64, steps: usize, seed: u64) -> Result<Run, SimError> {
    Ok(simulate(pennies_coupling(alpha)?, steps, seed))
}

/// End-of-run numbers for the coin experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinSummary {
    pub steps: usize,
    pub seed: u64,
    pub bias: f64,
    pub kl_obs_cum: f64,
    /// Mean of `H[P(a)] + H[Q(o)] + D[Q(o) ‖ P(o)]` over the realized prefixes.
    pub cross_entropy_rate: f64,
    /// `-u_P`: minus the mean realized agent reward.
    pub realized_cross_entropy_rate: f64,
    pub h_act_agent_cum: f64,
    pub h_act_env_cum: f64,
    pub h_obs_env_cum: f64,
    pub h_obs_agent_cum: f64,
}

impl CoinSummary {
    pub fn from_run(run: &Run, bias: f64) -> Option<Self> {
        let last = run.trace.last()?;
        Some(CoinSummary {
            steps: last.step,
            seed: run.seed,
            bias,
            kl_obs_cum: last.kl_obs_cum,
            cross_entropy_rate: last.cross_entropy_rate(),
            realized_cross_entropy_rate: -last.u_p_cum,
            h_act_agent_cum: last.h_act_agent_cum,
            h_act_env_cum: last.h_act_env_cum,
            h_obs_env_cum: last.h_obs_env_cum,
            h_obs_agent_cum: last.h_obs_agent_cum,
        })
    }
}

impl fmt::Display for CoinSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "coin: Laplace agent vs coin(bias={}), {} steps, seed {}", self.bias, self.steps, self.seed)?;
        writeln!(f, "  cumulative KL[Q(o)||P(o)]          {}", format_real(self.kl_obs_cum))?;
        writeln!(f, "  agent cross-entropy rate           {}", format_real(self.cross_entropy_rate))?;
        writeln!(f, "  realized agent cross-entropy rate  {}", format_real(self.realized_cross_entropy_rate))?;
        writeln!(f, "  agent action entropy (mean)        {}", format_real(self.h_act_agent_cum))?;
        writeln!(f, "  coin action-expectation entropy    {}", format_real(self.h_act_env_cum))?;
        writeln!(f, "  coin observation entropy (mean)    {}", format_real(self.h_obs_env_cum))?;
        write!(f, "  agent observation entropy (mean)   {}", format_real(self.h_obs_agent_cum))
    }
}

/// End-of-run numbers for matching pennies. Player 1 is the agent.
#[derive(Debug, Clone, PartialEq)]
pub struct PenniesSummary {
    pub steps: usize,
    pub seed: u64,
    pub alpha: f64,
    /// Mean action entropy of player 1 and player 2.
    pub action_entropy: [f64; 2],
    /// Player 1's and player 2's cumulative prediction KL at the final step.
    pub kl_final: [f64; 2],
    /// The same at step 100 (or the last step if the run is shorter).
    pub kl_at_100: [f64; 2],
}

impl PenniesSummary {
    pub fn from_run(run: &Run, alpha: f64) -> Option<Self> {
        let last = run.trace.last()?;
        let early = run.trace.at(100).unwrap_or(last);
        let kl = |r: &TraceRow| [r.kl_obs_cum, r.kl_act_cum];
        Some(PenniesSummary {
            steps: last.step,
            seed: run.seed,
            alpha,
            action_entropy: [last.h_act_agent_cum, last.h_obs_env_cum],
            kl_final: kl(last),
            kl_at_100: kl(early),
        })
    }
}

impl fmt::Display for PenniesSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pennies: matcher vs unmatcher, alpha={}, {} steps, seed {}", self.alpha, self.steps, self.seed)?;
        for p in 0..2 {
            writeln!(f, "  player {} action entropy (mean)      {}", p + 1, format_real(self.action_entropy[p]))?;
            writeln!(
                f,
                "  player {} prediction KL (cum) @100   {}  final {}",
                p + 1,
                format_real(self.kl_at_100[p]),
                format_real(self.kl_final[p])
            )?;
        }
        write!(f, "  ln 2                                {}", format_real(std::f64::consts::LN_2))
    }
}

fn write_csv(path: &Path, run: &Run) -> Result<(), SimError> {
    let io_err = |source| SimError::Io { path: path.display().to_string(), source };
    let file = File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    write_trace(&mut out, run.seed, &run.trace)?;
    out.flush().map_err(io_err)?;
    Ok(())
}

pub fn cmd_coin<W: Write>(config: &RunConfig, stdout: &mut W) -> Result<CoinSummary, SimError> {
    config.validate()?;
    let run = simulate_coin(config.bias, config.steps, config.seed)?;
    write_csv(&config.output(), &run)?;
    let summary = CoinSummary::from_run(&run, config.bias).expect("steps >= 1");
    if config.summary {
        writeln!(stdout, "{summary}").map_err(|source| SimError::Io { path: "<stdout>".into(), source })?;
    }
    Ok(summary)
}

pub fn cmd_pennies<W: Write>(config: &RunConfig, stdout: &mut W) -> Result<PenniesSummary, SimError> {
    config.validate()?;
    let run = simulate_pennies(config.alpha, config.steps, config.seed)?;
    write_csv(&config.output(), &run)?;
    let summary = PenniesSummary::from_run(&run, config.alpha).expect("steps >= 1");
    if config.summary {
        writeln!(stdout, "{summary}").map_err(|source| SimError::Io { path: "<stdout>".into(), source })?;
    }
    Ok(summary)
}
