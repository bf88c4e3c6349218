//! Seeded Monte-Carlo harness for the security games.
//!
//! Each `run_*` function plays a game for `trials` independent trials and
//! returns a [`GameReport`]. All randomness comes from per-trial streams (see
//! [`seeding`]), so a fixed seed reproduces the report byte for byte whatever
//! the thread count.

mod classical;
mod oracles;
mod qcp_games;
mod report;
pub mod seeding;
mod ud_games;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use classical::{
    run_flip_ul, run_lor_cpa, run_seuf_cma, run_ul, run_wprf, AdvCtx, ClassicalGameConfig, FlipUlGuesser,
    FlipUlLearner, Forger, LorCpaAdversary, LorCpaChallenger, SignOracle, UlGuesser, UlLearner, WprfDistinguisher,
};
pub use oracles::{
    ClassicalOracles, EvalOracle, FlipOracle, FlipSource, LorOracle, LorSource, RandomInputOracle, RandomInputSource,
    WprfOracle, LOR_RESAMPLE_LIMIT,
};
pub use qcp_games::{
    run_flip_qcp, run_lor_qcp, run_qcp_game, run_weak_qcp, ChallengeKind, FreeloaderCtx, PirateCtx, QcpAdversary,
    QcpChallenge, QcpFreeloader, QcpGameConfig, QcpGameKind, QcpShare,
};
pub use report::{
    hoeffding_half_width, verdict_for, GameParams, GameReport, Interval, LiveRange, OracleStats, TrialRecord, Verdict,
    CI_DELTA,
};
pub use seeding::{Role, TrialRng, TrialSeeds};
pub use ud_games::{
    run_ind, run_ud, IndAdversary, IndChoice, IndCtx, IndGameConfig, IndGuesser, UdAdversary, UdDistCtx,
    UdDistinguisher, UdGameConfig, UdPirateCtx, UdShare,
};

use crate::bbf::BbfError;
use crate::qcp::QcpError;
use crate::schemes::SchemeError;
use crate::signatures::SigError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("adversary protocol violation: {0}")]
    AdversaryProtocolViolation(String),
    #[error("{0} oracle is not available in this game")]
    OracleUnavailable(&'static str),
    #[error("challenge messages differ in length")]
    ChallengeLengthMismatch,
    #[error("left-or-right oracle could not find x1 with f(x1) != f(x0)")]
    ResampleExhausted,
    #[error("pre-evaluated input list is exhausted")]
    ListExhausted,
    #[error("query budget exceeded")]
    QueryBudgetExceeded,
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Qcp(#[from] QcpError),
    #[error(transparent)]
    Bbf(#[from] BbfError),
    #[error(transparent)]
    Sig(#[from] SigError),
}

/// Which classical oracles the adversary gets, by phase:
/// `Cpa` encryption in both phases, `Cca1` adds decryption before the
/// challenge, `Cca2` also after it (excluding the challenge itself).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleProfile {
    None,
    Cpa,
    Cca1,
    Cca2,
}

impl OracleProfile {
    pub const ALL: [OracleProfile; 4] = [OracleProfile::None, OracleProfile::Cpa, OracleProfile::Cca1, OracleProfile::Cca2];

    pub fn name(self) -> &'static str {
        match self {
            OracleProfile::None => "none",
            OracleProfile::Cpa => "cpa",
            OracleProfile::Cca1 => "cca1",
            OracleProfile::Cca2 => "cca2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Some(OracleProfile::None),
            "cpa" => Some(OracleProfile::Cpa),
            "cca1" => Some(OracleProfile::Cca1),
            "cca2" => Some(OracleProfile::Cca2),
            _ => None,
        }
    }

    pub fn encryption(self) -> bool {
        self != OracleProfile::None
    }

    pub fn decryption_before(self) -> bool {
        matches!(self, OracleProfile::Cca1 | OracleProfile::Cca2)
    }

    pub fn decryption_after(self) -> bool {
        self == OracleProfile::Cca2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub trials: u64,
    pub seed: u64,
    pub threads: usize,
    /// Verdict slack; `None` means `0.02 × max score`.
    pub slack: Option<f64>,
    /// Record wall-clock time in the report (makes the JSON non-reproducible).
    pub timing: bool,
}

impl RunOptions {
    pub fn new(trials: u64, seed: u64) -> Self {
        RunOptions { trials, seed, threads: 1, slack: None, timing: false }
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn slack(mut self, slack: f64) -> Self {
        self.slack = Some(slack);
        self
    }

    pub fn timing(mut self, on: bool) -> Self {
        self.timing = on;
        self
    }
}

pub(crate) fn run_trials<F>(opts: &RunOptions, trial: F) -> Result<(Vec<TrialRecord>, u64), GameError>
where
    F: Fn(TrialSeeds) -> Result<TrialRecord, GameError> + Sync,
{
    if opts.trials == 0 {
        return Err(GameError::InvalidParams("trials must be positive".into()));
    }
    let start = Instant::now();
    let seed = opts.seed;
    let records = if opts.threads <= 1 {
        (0..opts.trials).map(|t| trial(TrialSeeds::new(seed, t))).collect::<Result<Vec<_>, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| GameError::InvalidParams(format!("thread pool: {e}")))?;
        pool.install(|| {
            (0..opts.trials).into_par_iter().map(|t| trial(TrialSeeds::new(seed, t))).collect::<Result<Vec<_>, _>>()
        })?
    };
    Ok((records, start.elapsed().as_millis() as u64))
}

pub(crate) fn finish(mut report: GameReport, opts: &RunOptions, elapsed_ms: u64) -> GameReport {
    if opts.timing {
        report.wallclock_ms = Some(elapsed_ms);
    }
    report
}
