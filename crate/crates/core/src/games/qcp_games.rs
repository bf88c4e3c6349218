//! WEAK-QCP, FLIP-QCP and LoR-QCP, each optionally with a random-input oracle (RIA).

use std::collections::BTreeSet;

use rand::Rng;

use super::oracles::{FlipOracle, FlipSource, LorOracle, LorSource, RandomInputOracle, RandomInputSource};
use super::report::{GameParams, GameReport, ReportSpec, TrialRecord};
use super::seeding::{Role, TrialRng, TrialSeeds};
use super::{finish, run_trials, GameError, RunOptions};
use crate::bbf::BbfFamily;
use crate::bits::BitString;
use crate::qcp::{self, BackendTag, ProtectedProgram, ResourceLedger};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcpGameKind {
    Weak,
    Flip,
    Lor,
}

impl QcpGameKind {
    pub fn name(self, ria: bool) -> String {
        let base = match self {
            QcpGameKind::Weak => "weak_qcp",
            QcpGameKind::Flip => "flip_qcp",
            QcpGameKind::Lor => "lor_qcp",
        };
        if ria {
            format!("{base}_ria")
        } else {
            base.to_string()
        }
    }
}

#[derive(Debug, Clone)]
pub struct QcpGameConfig {
    pub backend: BackendTag,
    pub family: BbfFamily,
    pub lambda: usize,
    pub n: usize,
    pub k: usize,
    pub ria: bool,
    pub run: RunOptions,
}

impl QcpGameConfig {
    pub fn new(backend: BackendTag, n: usize, k: usize, run: RunOptions) -> Self {
        QcpGameConfig { backend, family: BbfFamily::KeyedMix, lambda: 64, n, k, ria: false, run }
    }

    pub fn lambda(mut self, lambda: usize) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn family(mut self, family: BbfFamily) -> Self {
        self.family = family;
        self
    }

    pub fn ria(mut self, ria: bool) -> Self {
        self.ria = ria;
        self
    }
}

/// A pirate: receives the `n` honest programs and must hand out exactly `n + k`
/// live, distinct programs, each with its own freeloader.
pub trait QcpAdversary: Sync {
    fn name(&self) -> String;

    fn pirate(&self, programs: Vec<ProtectedProgram>, ctx: &mut PirateCtx<'_>) -> Result<Vec<QcpShare>, GameError>;
}

pub struct QcpShare {
    pub program: ProtectedProgram,
    pub freeloader: Box<dyn QcpFreeloader>,
}

pub trait QcpFreeloader {
    fn respond(
        &mut self,
        program: &ProtectedProgram,
        challenge: &mut QcpChallenge<'_>,
        ctx: &mut FreeloaderCtx<'_>,
    ) -> Result<bool, GameError>;
}

pub struct PirateCtx<'a> {
    pub ledger: &'a mut ResourceLedger,
    pub rng: &'a mut TrialRng,
    pub n: usize,
    pub k: usize,
    pub input_len: usize,
    pub backend: BackendTag,
    pub game: QcpGameKind,
    pub ria: bool,
    seeds: TrialSeeds,
}

impl PirateCtx<'_> {
    pub fn players(&self) -> usize {
        self.n + self.k
    }

    /// A labelled stream that does not disturb `rng`.
    pub fn aux_rng(&self, label: &str) -> TrialRng {
        self.seeds.aux(label, 0)
    }

    pub fn seeds(&self) -> TrialSeeds {
        self.seeds
    }

    /// Pads to `n + k` programs with duds drawn from a private stream.
    pub fn pad_with_duds(&mut self, programs: Vec<ProtectedProgram>) -> Result<Vec<ProtectedProgram>, GameError> {
        let mut rng = self.aux_rng("duds");
        Ok(qcp::distribute(self.ledger, programs, self.n + self.k, &mut rng)?)
    }

    pub fn eval(&self, p: &ProtectedProgram, x: &BitString) -> Result<bool, GameError> {
        Ok(qcp::eval_program(self.ledger, p, x)?)
    }
}

pub struct FreeloaderCtx<'a> {
    pub ledger: &'a ResourceLedger,
    pub rng: &'a mut TrialRng,
    pub index: usize,
    pub input_len: usize,
}

impl FreeloaderCtx<'_> {
    pub fn eval(&self, p: &ProtectedProgram, x: &BitString) -> Result<bool, GameError> {
        Ok(qcp::eval_program(self.ledger, p, x)?)
    }
}

pub enum ChallengeKind<'a> {
    Point(BitString),
    Flip(&'a mut dyn FlipSource),
    Lor(&'a mut dyn LorSource),
}

/// What a freeloader is challenged with, plus its random-input oracle in RIA games.
pub struct QcpChallenge<'a> {
    kind: ChallengeKind<'a>,
    ria: Option<&'a mut dyn RandomInputSource>,
}

impl<'a> QcpChallenge<'a> {
    pub fn point(x: BitString) -> Self {
        QcpChallenge { kind: ChallengeKind::Point(x), ria: None }
    }

    pub fn flip(src: &'a mut dyn FlipSource) -> Self {
        QcpChallenge { kind: ChallengeKind::Flip(src), ria: None }
    }

    pub fn lor(src: &'a mut dyn LorSource) -> Self {
        QcpChallenge { kind: ChallengeKind::Lor(src), ria: None }
    }

    pub fn with_random_inputs(mut self, ria: &'a mut dyn RandomInputSource) -> Self {
        self.ria = Some(ria);
        self
    }

    pub fn kind(&self) -> &ChallengeKind<'a> {
        &self.kind
    }

    pub fn has_random_inputs(&self) -> bool {
        self.ria.is_some()
    }

    pub fn challenge_point(&self) -> Result<&BitString, GameError> {
        match &self.kind {
            ChallengeKind::Point(x) => Ok(x),
            _ => Err(GameError::OracleUnavailable("challenge point")),
        }
    }

    pub fn flip_query(&mut self) -> Result<(BitString, bool), GameError> {
        match &mut self.kind {
            ChallengeKind::Flip(src) => src.query(),
            _ => Err(GameError::OracleUnavailable("flip")),
        }
    }

    pub fn lor_query(&mut self) -> Result<(BitString, BitString, bool), GameError> {
        match &mut self.kind {
            ChallengeKind::Lor(src) => src.query(),
            _ => Err(GameError::OracleUnavailable("left-or-right")),
        }
    }

    pub fn random_input(&mut self) -> Result<(BitString, bool), GameError> {
        match &mut self.ria {
            Some(src) => src.query(),
            None => Err(GameError::OracleUnavailable("random-input")),
        }
    }

    /// The same challenge with the random-input oracle replaced by `ria`.
    pub fn substitute_random_inputs<'b>(&'b mut self, ria: &'b mut dyn RandomInputSource) -> QcpChallenge<'b> {
        let kind = match &mut self.kind {
            ChallengeKind::Point(x) => ChallengeKind::Point(x.clone()),
            ChallengeKind::Flip(src) => ChallengeKind::Flip(&mut **src),
            ChallengeKind::Lor(src) => ChallengeKind::Lor(&mut **src),
        };
        QcpChallenge { kind, ria: Some(ria) }
    }

    /// A challenge of another kind that keeps this challenge's random-input oracle.
    pub fn replace_kind<'b>(&'b mut self, kind: ChallengeKind<'b>) -> QcpChallenge<'b> {
        let ria = self.ria.as_mut().map(|src| &mut **src as &mut dyn RandomInputSource);
        QcpChallenge { kind, ria }
    }
}

pub(crate) fn validate_programs<'p>(
    ledger: &ResourceLedger,
    programs: impl Iterator<Item = &'p ProtectedProgram>,
    expected: usize,
) -> Result<(), GameError> {
    let mut seen = BTreeSet::new();
    for p in programs {
        if !ledger.is_live(p.id()) {
            return Err(GameError::AdversaryProtocolViolation(format!("shipped dead handle {}", p.id())));
        }
        if !seen.insert(p.id()) {
            return Err(GameError::AdversaryProtocolViolation(format!("shipped handle {} twice", p.id())));
        }
    }
    if seen.len() != expected {
        return Err(GameError::AdversaryProtocolViolation(format!(
            "shipped {} programs, expected {expected}",
            seen.len()
        )));
    }
    if ledger.live_count() != expected {
        return Err(GameError::AdversaryProtocolViolation(format!(
            "{} live handles after the pirate, expected {expected}",
            ledger.live_count()
        )));
    }
    Ok(())
}

fn qcp_trial(
    cfg: &QcpGameConfig,
    kind: QcpGameKind,
    adversary: &dyn QcpAdversary,
    seeds: TrialSeeds,
) -> Result<TrialRecord, GameError> {
    let f = qcp::sample_function(cfg.backend, cfg.family, cfg.lambda, &mut seeds.stream(Role::Key, 0))?;
    let mut ledger = ResourceLedger::new();
    let mut dec_rng = seeds.stream(Role::DecGen, 0);
    let programs = (0..cfg.n)
        .map(|_| qcp::protect(cfg.backend, &f, &mut ledger, &mut dec_rng))
        .collect::<Result<Vec<_>, _>>()?;
    let players = cfg.n + cfg.k;
    let mut shares = {
        let mut rng = seeds.stream(Role::Adversary, 0);
        let mut ctx = PirateCtx {
            ledger: &mut ledger,
            rng: &mut rng,
            n: cfg.n,
            k: cfg.k,
            input_len: f.input_len(),
            backend: cfg.backend,
            game: kind,
            ria: cfg.ria,
            seeds,
        };
        adversary.pirate(programs, &mut ctx)?
    };
    if shares.len() != players {
        return Err(GameError::AdversaryProtocolViolation(format!("{} shares, expected {players}", shares.len())));
    }
    validate_programs(&ledger, shares.iter().map(|s| &s.program), players)?;

    let mut record = TrialRecord { live: ledger.live_count(), ..TrialRecord::default() };
    for (i, share) in shares.iter_mut().enumerate() {
        let idx = i as u64;
        let mut rng = seeds.stream(Role::Freeloader, idx);
        let mut ctx = FreeloaderCtx { ledger: &ledger, rng: &mut rng, index: i, input_len: f.input_len() };
        let mut ria = cfg.ria.then(|| RandomInputOracle::new(&f, seeds.stream(Role::Oracle, idx)));
        let won = match kind {
            QcpGameKind::Weak => {
                let x = BitString::random(f.input_len(), &mut seeds.stream(Role::Point, idx));
                let mut ch = QcpChallenge::point(x.clone());
                if let Some(r) = ria.as_mut() {
                    ch = ch.with_random_inputs(r);
                }
                let y = share.freeloader.respond(&share.program, &mut ch, &mut ctx)?;
                y == f.eval(&x)?
            }
            QcpGameKind::Flip => {
                let b: bool = seeds.stream(Role::Hidden, idx).gen();
                let mut oracle = FlipOracle::new(&f, b, seeds.stream(Role::Point, idx));
                let mut ch = QcpChallenge::flip(&mut oracle);
                if let Some(r) = ria.as_mut() {
                    ch = ch.with_random_inputs(r);
                }
                let y = share.freeloader.respond(&share.program, &mut ch, &mut ctx)?;
                record.stats.flip_queries += oracle.queries();
                y == b
            }
            QcpGameKind::Lor => {
                let b: bool = seeds.stream(Role::Hidden, idx).gen();
                let mut oracle =
                    LorOracle::new(&f, b, seeds.stream(Role::Point, idx), seeds.stream(Role::Resample, idx));
                let mut ch = QcpChallenge::lor(&mut oracle);
                if let Some(r) = ria.as_mut() {
                    ch = ch.with_random_inputs(r);
                }
                share.freeloader.respond(&share.program, &mut ch, &mut ctx)? == b
            }
        };
        if let Some(r) = &ria {
            record.stats.random_input_queries += r.queries();
        }
        record.wins.push(won);
        record.score += u32::from(won);
    }
    Ok(record)
}

pub fn run_qcp_game(
    kind: QcpGameKind,
    cfg: &QcpGameConfig,
    adversary: &dyn QcpAdversary,
) -> Result<GameReport, GameError> {
    if cfg.n == 0 {
        return Err(GameError::InvalidParams("n must be at least 1".into()));
    }
    let (records, ms) = run_trials(&cfg.run, |seeds| qcp_trial(cfg, kind, adversary, seeds))?;
    let players = cfg.n + cfg.k;
    let spec = ReportSpec {
        game: kind.name(cfg.ria),
        params: GameParams {
            adversary: adversary.name(),
            trials: cfg.run.trials,
            lambda: cfg.lambda,
            n: Some(cfg.n),
            k: Some(cfg.k),
            backend: Some(cfg.backend.name().to_string()),
            family: Some(format!("{:?}", cfg.family)),
            ria: Some(cfg.ria),
            ..GameParams::default()
        },
        max_score: players as u32,
        threshold: cfg.n as f64 + cfg.k as f64 / 2.0,
        slack: cfg.run.slack,
        seed: cfg.run.seed,
        track_live: true,
    };
    Ok(finish(GameReport::build(spec, records), &cfg.run, ms))
}

pub fn run_weak_qcp(cfg: &QcpGameConfig, adversary: &dyn QcpAdversary) -> Result<GameReport, GameError> {
    run_qcp_game(QcpGameKind::Weak, cfg, adversary)
}

pub fn run_flip_qcp(cfg: &QcpGameConfig, adversary: &dyn QcpAdversary) -> Result<GameReport, GameError> {
    run_qcp_game(QcpGameKind::Flip, cfg, adversary)
}

pub fn run_lor_qcp(cfg: &QcpGameConfig, adversary: &dyn QcpAdversary) -> Result<GameReport, GameError> {
    run_qcp_game(QcpGameKind::Lor, cfg, adversary)
}
