//! Classical games: LoR-CPA, weak PRF, unlearnability (UL and FLIP-UL) and sEUF-CMA.

use rand::Rng;

use super::oracles::{EvalOracle, FlipOracle, FlipSource, RandomInputSource, WprfOracle};
use super::report::{GameParams, GameReport, OracleStats, ReportSpec, TrialRecord};
use super::seeding::{Role, TrialRng, TrialSeeds};
use super::{finish, run_trials, GameError, RunOptions};
use crate::bbf::{self, BbfFamily};
use crate::bits::BitString;
use crate::schemes::{Ciphertext, SchemeInstance, UdKey};
use crate::signatures::{self, PublicKey, SigKeyPair, SigSchemeTag, Signature};

#[derive(Debug, Clone)]
pub struct ClassicalGameConfig {
    pub lambda: usize,
    pub family: BbfFamily,
    pub run: RunOptions,
}

impl ClassicalGameConfig {
    pub fn new(run: RunOptions) -> Self {
        ClassicalGameConfig { lambda: 64, family: BbfFamily::KeyedMix, run }
    }

    pub fn lambda(mut self, lambda: usize) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn family(mut self, family: BbfFamily) -> Self {
        self.family = family;
        self
    }
}

/// An adversary's random stream plus access to labelled private streams.
pub struct AdvCtx<'a> {
    pub rng: &'a mut TrialRng,
    seeds: TrialSeeds,
}

impl<'a> AdvCtx<'a> {
    pub fn new(rng: &'a mut TrialRng, seeds: TrialSeeds) -> Self {
        AdvCtx { rng, seeds }
    }

    pub fn seeds(&self) -> TrialSeeds {
        self.seeds
    }

    pub fn aux(&self, label: &str, index: u64) -> TrialRng {
        self.seeds.aux(label, index)
    }
}

fn report(
    game: &str,
    params: GameParams,
    threshold: f64,
    run: &RunOptions,
    records: Vec<TrialRecord>,
    ms: u64,
) -> GameReport {
    let spec = ReportSpec {
        game: game.to_string(),
        params,
        max_score: 1,
        threshold,
        slack: run.slack,
        seed: run.seed,
        track_live: false,
    };
    finish(GameReport::build(spec, records), run, ms)
}

fn single(won: bool, stats: OracleStats) -> TrialRecord {
    TrialRecord { score: u32::from(won), wins: vec![won], live: 0, stats }
}

/// Answers each submitted pair with an encryption of `m_b` for the trial's hidden `b`.
pub struct LorCpaChallenger {
    scheme: SchemeInstance,
    key: UdKey,
    b: bool,
    rng: TrialRng,
    queries: u64,
}

impl LorCpaChallenger {
    pub fn submit(&mut self, m0: &BitString, m1: &BitString) -> Result<Ciphertext, GameError> {
        if m0.len() != m1.len() {
            return Err(GameError::ChallengeLengthMismatch);
        }
        self.queries += 1;
        let m = if self.b { m1 } else { m0 };
        Ok(self.scheme.encrypt(&self.key, m, &mut self.rng)?)
    }

    pub fn lambda(&self) -> usize {
        self.key.lambda
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }
}

pub trait LorCpaAdversary: Sync {
    fn name(&self) -> String;

    fn play(&self, challenger: &mut LorCpaChallenger, ctx: &mut AdvCtx<'_>) -> Result<bool, GameError>;
}

pub fn run_lor_cpa(
    se: &SchemeInstance,
    cfg: &ClassicalGameConfig,
    adversary: &dyn LorCpaAdversary,
) -> Result<GameReport, GameError> {
    let (records, ms) = run_trials(&cfg.run, |seeds| {
        let key = se.key_gen(cfg.lambda, &mut seeds.stream(Role::Key, 0))?;
        let b: bool = seeds.stream(Role::Hidden, 0).gen();
        let mut challenger =
            LorCpaChallenger { scheme: se.clone(), key, b, rng: seeds.stream(Role::Oracle, 0), queries: 0 };
        let mut rng = seeds.stream(Role::Adversary, 0);
        let guess = adversary.play(&mut challenger, &mut AdvCtx::new(&mut rng, seeds))?;
        let stats = OracleStats { enc_queries: challenger.queries, ..OracleStats::default() };
        Ok(single(guess == b, stats))
    })?;
    let params = GameParams {
        adversary: adversary.name(),
        trials: cfg.run.trials,
        lambda: cfg.lambda,
        scheme: Some(se.name()),
        ..GameParams::default()
    };
    Ok(report("lor_cpa", params, 0.5, &cfg.run, records, ms))
}

/// Guesses the weak-PRF coin: `true` means "random function".
pub trait WprfDistinguisher: Sync {
    fn name(&self) -> String;

    fn distinguish(&self, oracle: &mut dyn RandomInputSource, ctx: &mut AdvCtx<'_>) -> Result<bool, GameError>;
}

pub fn run_wprf(cfg: &ClassicalGameConfig, distinguisher: &dyn WprfDistinguisher) -> Result<GameReport, GameError> {
    let (records, ms) = run_trials(&cfg.run, |seeds| {
        let f = bbf::sample(cfg.family, cfg.lambda, &mut seeds.stream(Role::Key, 0))?;
        let coin: bool = seeds.stream(Role::Hidden, 0).gen();
        let mut oracle = WprfOracle::new(&f, coin, seeds.stream(Role::Oracle, 0), seeds.stream(Role::Resample, 0));
        let mut rng = seeds.stream(Role::Adversary, 0);
        let guess = distinguisher.distinguish(&mut oracle, &mut AdvCtx::new(&mut rng, seeds))?;
        let stats = OracleStats { random_input_queries: oracle.queries(), ..OracleStats::default() };
        Ok(single(guess == coin, stats))
    })?;
    let params = GameParams {
        adversary: distinguisher.name(),
        trials: cfg.run.trials,
        lambda: cfg.lambda,
        family: Some(format!("{:?}", cfg.family)),
        ..GameParams::default()
    };
    Ok(report("wprf", params, 0.5, &cfg.run, records, ms))
}

/// First phase of the unlearnability game: classical evaluation queries, then a guesser.
pub trait UlLearner: Sync {
    fn name(&self) -> String;

    fn learn(&self, oracle: &mut EvalOracle<'_>, ctx: &mut AdvCtx<'_>) -> Result<Box<dyn UlGuesser>, GameError>;
}

pub trait UlGuesser {
    fn predict(&mut self, x: &BitString, ctx: &mut AdvCtx<'_>) -> Result<bool, GameError>;
}

pub trait FlipUlLearner: Sync {
    fn name(&self) -> String;

    fn learn(&self, oracle: &mut EvalOracle<'_>, ctx: &mut AdvCtx<'_>) -> Result<Box<dyn FlipUlGuesser>, GameError>;
}

pub trait FlipUlGuesser {
    fn detect(&mut self, flips: &mut dyn FlipSource, ctx: &mut AdvCtx<'_>) -> Result<bool, GameError>;
}

fn ul_params(name: String, cfg: &ClassicalGameConfig) -> GameParams {
    GameParams {
        adversary: name,
        trials: cfg.run.trials,
        lambda: cfg.lambda,
        family: Some(format!("{:?}", cfg.family)),
        ..GameParams::default()
    }
}

pub fn run_ul(cfg: &ClassicalGameConfig, learner: &dyn UlLearner) -> Result<GameReport, GameError> {
    let (records, ms) = run_trials(&cfg.run, |seeds| {
        let f = bbf::sample(cfg.family, cfg.lambda, &mut seeds.stream(Role::Key, 0))?;
        let mut oracle = EvalOracle::new(&f);
        let mut guesser = {
            let mut rng = seeds.stream(Role::Adversary, 0);
            learner.learn(&mut oracle, &mut AdvCtx::new(&mut rng, seeds))?
        };
        let x = BitString::random(f.input_len(), &mut seeds.stream(Role::Point, 0));
        let mut rng = seeds.stream(Role::Freeloader, 0);
        let y = guesser.predict(&x, &mut AdvCtx::new(&mut rng, seeds))?;
        let stats = OracleStats { eval_queries: oracle.queries(), ..OracleStats::default() };
        Ok(single(y == f.eval(&x)?, stats))
    })?;
    Ok(report("ul", ul_params(learner.name(), cfg), 0.5, &cfg.run, records, ms))
}

pub fn run_flip_ul(cfg: &ClassicalGameConfig, learner: &dyn FlipUlLearner) -> Result<GameReport, GameError> {
    let (records, ms) = run_trials(&cfg.run, |seeds| {
        let f = bbf::sample(cfg.family, cfg.lambda, &mut seeds.stream(Role::Key, 0))?;
        let mut oracle = EvalOracle::new(&f);
        let mut guesser = {
            let mut rng = seeds.stream(Role::Adversary, 0);
            learner.learn(&mut oracle, &mut AdvCtx::new(&mut rng, seeds))?
        };
        let b: bool = seeds.stream(Role::Hidden, 0).gen();
        let mut flips = FlipOracle::new(&f, b, seeds.stream(Role::Point, 0));
        let mut rng = seeds.stream(Role::Freeloader, 0);
        let guess = guesser.detect(&mut flips, &mut AdvCtx::new(&mut rng, seeds))?;
        let stats = OracleStats {
            eval_queries: oracle.queries(),
            flip_queries: flips.queries(),
            ..OracleStats::default()
        };
        Ok(single(guess == b, stats))
    })?;
    Ok(report("flip_ul", ul_params(learner.name(), cfg), 0.5, &cfg.run, records, ms))
}

/// Signing oracle that logs every (message, signature) pair it hands out.
pub struct SignOracle<'a> {
    kp: &'a SigKeyPair,
    log: Vec<(Vec<u8>, Signature)>,
    max_queries: usize,
}

impl SignOracle<'_> {
    pub fn sign(&mut self, msg: &[u8]) -> Result<Signature, GameError> {
        if self.log.len() >= self.max_queries {
            return Err(GameError::QueryBudgetExceeded);
        }
        let sig = signatures::sign(self.kp, msg)?;
        self.log.push((msg.to_vec(), sig.clone()));
        Ok(sig)
    }

    pub fn log(&self) -> &[(Vec<u8>, Signature)] {
        &self.log
    }

    pub fn remaining(&self) -> usize {
        self.max_queries - self.log.len()
    }
}

pub trait Forger: Sync {
    fn name(&self) -> String;

    /// Returns a candidate forgery, or `None` to give up.
    fn forge(
        &self,
        pk: &PublicKey,
        oracle: &mut SignOracle<'_>,
        ctx: &mut AdvCtx<'_>,
    ) -> Result<Option<(Vec<u8>, Signature)>, GameError>;
}

pub fn run_seuf_cma(
    scheme: SigSchemeTag,
    max_queries: usize,
    cfg: &ClassicalGameConfig,
    forger: &dyn Forger,
) -> Result<GameReport, GameError> {
    if scheme == SigSchemeTag::LamportMerkle && max_queries > signatures::LEAF_COUNT {
        return Err(GameError::InvalidParams(format!(
            "max_queries {max_queries} exceeds signature capacity {}",
            signatures::LEAF_COUNT
        )));
    }
    let (records, ms) = run_trials(&cfg.run, |seeds| {
        let kp = signatures::keygen(scheme, cfg.lambda, &mut seeds.stream(Role::Key, 0))?;
        let mut oracle = SignOracle { kp: &kp, log: Vec::new(), max_queries };
        let mut rng = seeds.stream(Role::Adversary, 0);
        let attempt = forger.forge(kp.public(), &mut oracle, &mut AdvCtx::new(&mut rng, seeds))?;
        let won = match attempt {
            Some((m, s)) => {
                signatures::verify(kp.public(), &m, &s) && !oracle.log.iter().any(|(lm, ls)| *lm == m && *ls == s)
            }
            None => false,
        };
        let stats = OracleStats { sign_queries: oracle.log.len() as u64, ..OracleStats::default() };
        Ok(single(won, stats))
    })?;
    let params = GameParams {
        adversary: forger.name(),
        trials: cfg.run.trials,
        lambda: cfg.lambda,
        signature: Some(scheme.name().to_string()),
        max_queries: Some(max_queries),
        ..GameParams::default()
    };
    Ok(report("seuf_cma", params, 0.0, &cfg.run, records, ms))
}
