//! Uncloneable-decryptor games (UD, UD1 under every oracle profile) and classical IND.

use rand::Rng;

use super::oracles::ClassicalOracles;
use super::qcp_games::validate_programs;
use super::report::{GameParams, GameReport, ReportSpec, TrialRecord};
use super::seeding::{Role, TrialRng, TrialSeeds};
use super::{finish, run_trials, GameError, OracleProfile, RunOptions};
use crate::adversaries::SimulatedDecryptionOracle;
use crate::bits::BitString;
use crate::qcp::{self, ResourceLedger};
use crate::schemes::{Ciphertext, Decryptor, SchemeInstance, UdKey};
use crate::signatures::PublicKey;

#[derive(Debug, Clone)]
pub struct UdGameConfig {
    pub scheme: SchemeInstance,
    pub lambda: usize,
    pub n: usize,
    pub k: usize,
    pub profile: OracleProfile,
    /// UD1: the challenge plaintext is the hidden bit itself.
    pub bit_variant: bool,
    /// Attach a simulated decryption oracle and count disagreements with the real one.
    pub shadow_sim: bool,
    pub run: RunOptions,
}

impl UdGameConfig {
    pub fn new(scheme: SchemeInstance, n: usize, k: usize, profile: OracleProfile, run: RunOptions) -> Self {
        UdGameConfig { scheme, lambda: 64, n, k, profile, bit_variant: false, shadow_sim: false, run }
    }

    pub fn lambda(mut self, lambda: usize) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn bit_variant(mut self, on: bool) -> Self {
        self.bit_variant = on;
        self
    }

    pub fn shadow_sim(mut self, on: bool) -> Self {
        self.shadow_sim = on;
        self
    }

    fn game_name(&self) -> String {
        let base = if self.bit_variant { "ud1" } else { "ud" };
        format!("{base}_{}", self.profile.name())
    }
}

pub trait UdAdversary: Sync {
    fn name(&self) -> String;

    fn pirate(&self, decryptors: Vec<Decryptor>, ctx: &mut UdPirateCtx<'_>) -> Result<Vec<UdShare>, GameError>;
}

/// One output of the pirate: a decryptor, the challenge pair (ignored in UD1), and the distinguisher.
pub struct UdShare {
    pub decryptor: Decryptor,
    pub pair: Option<(BitString, BitString)>,
    pub distinguisher: Box<dyn UdDistinguisher>,
}

pub trait UdDistinguisher {
    fn distinguish(&mut self, decryptor: &Decryptor, c: &Ciphertext, ctx: &mut UdDistCtx<'_>) -> Result<bool, GameError>;
}

pub struct UdPirateCtx<'a> {
    pub ledger: &'a mut ResourceLedger,
    pub rng: &'a mut TrialRng,
    pub oracles: &'a mut ClassicalOracles,
    pub n: usize,
    pub k: usize,
    pub bit_variant: bool,
    seeds: TrialSeeds,
}

impl UdPirateCtx<'_> {
    pub fn players(&self) -> usize {
        self.n + self.k
    }

    pub fn seeds(&self) -> TrialSeeds {
        self.seeds
    }

    pub fn aux_rng(&self, label: &str) -> TrialRng {
        self.seeds.aux(label, 0)
    }

    /// A decryptor whose program is a dud; decrypting with it yields coin flips.
    pub fn dud_decryptor(&mut self, pk: Option<PublicKey>, rng: &mut TrialRng) -> Decryptor {
        Decryptor::new(qcp::dud(self.ledger, rng), pk)
    }

    /// Pads the decryptor list to `n + k` with duds drawn from a private stream.
    pub fn pad_with_duds(&mut self, mut decryptors: Vec<Decryptor>) -> Vec<Decryptor> {
        let pk = decryptors.first().and_then(|d| d.pk().cloned());
        let mut rng = self.aux_rng("duds");
        while decryptors.len() < self.players() {
            let d = self.dud_decryptor(pk.clone(), &mut rng);
            decryptors.push(d);
        }
        decryptors
    }

    pub fn decrypt(&self, d: &Decryptor, c: &Ciphertext) -> Result<Option<BitString>, GameError> {
        Ok(self.oracles.scheme().decrypt_q(self.ledger, d, c)?)
    }
}

pub struct UdDistCtx<'a> {
    pub ledger: &'a ResourceLedger,
    pub rng: &'a mut TrialRng,
    pub oracles: &'a mut ClassicalOracles,
    pub index: usize,
}

impl UdDistCtx<'_> {
    pub fn decrypt(&self, d: &Decryptor, c: &Ciphertext) -> Result<Option<BitString>, GameError> {
        Ok(self.oracles.scheme().decrypt_q(self.ledger, d, c)?)
    }
}

fn phase_one(
    scheme: &SchemeInstance,
    key: &UdKey,
    profile: OracleProfile,
    seeds: &TrialSeeds,
    shadow: bool,
) -> ClassicalOracles {
    let mut o = ClassicalOracles::new(scheme.clone(), key.clone());
    if profile.encryption() {
        o = o.with_encryption(seeds.stream(Role::Oracle, 0));
    }
    if profile.decryption_before() {
        o = o.with_decryption(None);
    }
    o.with_shadow(shadow.then(SimulatedDecryptionOracle::new))
}

fn phase_two(
    scheme: &SchemeInstance,
    key: &UdKey,
    profile: OracleProfile,
    oracle_rng: TrialRng,
    challenge: &Ciphertext,
    shadow: Option<SimulatedDecryptionOracle>,
) -> ClassicalOracles {
    let mut o = ClassicalOracles::new(scheme.clone(), key.clone());
    if profile.encryption() {
        o = o.with_encryption(oracle_rng);
    }
    if profile.decryption_after() {
        o = o.with_decryption(Some(challenge.to_bytes()));
    }
    o.with_shadow(shadow)
}

fn ud_trial(cfg: &UdGameConfig, adversary: &dyn UdAdversary, seeds: TrialSeeds) -> Result<TrialRecord, GameError> {
    let scheme = &cfg.scheme;
    let key = scheme.key_gen(cfg.lambda, &mut seeds.stream(Role::Key, 0))?;
    let mut ledger = ResourceLedger::new();
    let mut dec_rng = seeds.stream(Role::DecGen, 0);
    let decryptors =
        (0..cfg.n).map(|_| scheme.dec_gen(&key, &mut ledger, &mut dec_rng)).collect::<Result<Vec<_>, _>>()?;
    let mut oracles = phase_one(scheme, &key, cfg.profile, &seeds, cfg.shadow_sim);
    let players = cfg.n + cfg.k;
    let mut shares = {
        let mut rng = seeds.stream(Role::Adversary, 0);
        let mut ctx = UdPirateCtx {
            ledger: &mut ledger,
            rng: &mut rng,
            oracles: &mut oracles,
            n: cfg.n,
            k: cfg.k,
            bit_variant: cfg.bit_variant,
            seeds,
        };
        adversary.pirate(decryptors, &mut ctx)?
    };
    if shares.len() != players {
        return Err(GameError::AdversaryProtocolViolation(format!("{} shares, expected {players}", shares.len())));
    }
    validate_programs(&ledger, shares.iter().map(|s| s.decryptor.program()), players)?;

    let mut record = TrialRecord { live: ledger.live_count(), ..TrialRecord::default() };
    record.stats.merge(oracles.stats());
    for (i, share) in shares.iter_mut().enumerate() {
        let idx = i as u64;
        let b: bool = seeds.stream(Role::Hidden, idx).gen();
        let m = if cfg.bit_variant {
            BitString::single(b)
        } else {
            let (m0, m1) = share.pair.as_ref().ok_or_else(|| {
                GameError::AdversaryProtocolViolation(format!("share {i} carries no challenge pair"))
            })?;
            if m0.len() != m1.len() {
                return Err(GameError::ChallengeLengthMismatch);
            }
            if b { m1.clone() } else { m0.clone() }
        };
        let c = scheme.encrypt(&key, &m, &mut seeds.stream(Role::Challenge, idx))?;
        let shadow = oracles.shadow().cloned();
        let mut phase2 = phase_two(scheme, &key, cfg.profile, seeds.stream(Role::Oracle, 1 + idx), &c, shadow);
        let mut rng = seeds.stream(Role::Freeloader, idx);
        let mut ctx = UdDistCtx { ledger: &ledger, rng: &mut rng, oracles: &mut phase2, index: i };
        let guess = share.distinguisher.distinguish(&share.decryptor, &c, &mut ctx)?;
        record.stats.merge(phase2.stats());
        let won = guess == b;
        record.wins.push(won);
        record.score += u32::from(won);
    }
    Ok(record)
}

/// Plays the UD game (or UD1 with `bit_variant`) against `adversary`.
pub fn run_ud(cfg: &UdGameConfig, adversary: &dyn UdAdversary) -> Result<GameReport, GameError> {
    if cfg.n == 0 {
        return Err(GameError::InvalidParams("n must be at least 1".into()));
    }
    let (records, ms) = run_trials(&cfg.run, |seeds| ud_trial(cfg, adversary, seeds))?;
    let players = cfg.n + cfg.k;
    let spec = ReportSpec {
        game: cfg.game_name(),
        params: GameParams {
            adversary: adversary.name(),
            trials: cfg.run.trials,
            lambda: cfg.lambda,
            n: Some(cfg.n),
            k: Some(cfg.k),
            scheme: Some(cfg.scheme.name()),
            profile: Some(cfg.profile.name().to_string()),
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

#[derive(Debug, Clone)]
pub struct IndGameConfig {
    pub scheme: SchemeInstance,
    pub lambda: usize,
    pub profile: OracleProfile,
    pub run: RunOptions,
}

impl IndGameConfig {
    pub fn new(scheme: SchemeInstance, profile: OracleProfile, run: RunOptions) -> Self {
        IndGameConfig { scheme, lambda: 64, profile, run }
    }

    pub fn lambda(mut self, lambda: usize) -> Self {
        self.lambda = lambda;
        self
    }
}

/// Context of either IND phase: the phase's oracles and the caller's random stream.
pub struct IndCtx<'a> {
    pub oracles: &'a mut ClassicalOracles,
    pub rng: &'a mut TrialRng,
    seeds: TrialSeeds,
}

impl<'a> IndCtx<'a> {
    pub fn new(oracles: &'a mut ClassicalOracles, rng: &'a mut TrialRng, seeds: TrialSeeds) -> Self {
        IndCtx { oracles, rng, seeds }
    }

    pub fn seeds(&self) -> TrialSeeds {
        self.seeds
    }
}

pub struct IndChoice {
    pub m0: BitString,
    pub m1: BitString,
    pub guesser: Box<dyn IndGuesser>,
}

pub trait IndAdversary: Sync {
    fn name(&self) -> String;

    fn choose(&self, ctx: &mut IndCtx<'_>) -> Result<IndChoice, GameError>;
}

pub trait IndGuesser {
    fn guess(&mut self, c: &Ciphertext, ctx: &mut IndCtx<'_>) -> Result<bool, GameError>;
}

fn ind_trial(cfg: &IndGameConfig, adversary: &dyn IndAdversary, seeds: TrialSeeds) -> Result<TrialRecord, GameError> {
    let scheme = &cfg.scheme;
    let key = scheme.key_gen(cfg.lambda, &mut seeds.stream(Role::Key, 0))?;
    let mut oracles = phase_one(scheme, &key, cfg.profile, &seeds, false);
    let choice = {
        let mut rng = seeds.stream(Role::Adversary, 0);
        adversary.choose(&mut IndCtx::new(&mut oracles, &mut rng, seeds))?
    };
    let IndChoice { m0, m1, mut guesser } = choice;
    if m0.len() != m1.len() {
        return Err(GameError::ChallengeLengthMismatch);
    }
    let b: bool = seeds.stream(Role::Hidden, 0).gen();
    let m = if b { &m1 } else { &m0 };
    let c = scheme.encrypt(&key, m, &mut seeds.stream(Role::Challenge, 0))?;
    let mut phase2 = phase_two(scheme, &key, cfg.profile, seeds.stream(Role::Oracle, 1), &c, None);
    let mut rng = seeds.stream(Role::Freeloader, 0);
    let guess = guesser.guess(&c, &mut IndCtx::new(&mut phase2, &mut rng, seeds))?;
    let won = guess == b;
    let mut stats = oracles.stats().clone();
    stats.merge(phase2.stats());
    Ok(TrialRecord { score: u32::from(won), wins: vec![won], live: 0, stats })
}

/// Classical-query IND game with a single challenge pair.
pub fn run_ind(cfg: &IndGameConfig, adversary: &dyn IndAdversary) -> Result<GameReport, GameError> {
    let (records, ms) = run_trials(&cfg.run, |seeds| ind_trial(cfg, adversary, seeds))?;
    let spec = ReportSpec {
        game: format!("ind_{}", cfg.profile.name()),
        params: GameParams {
            adversary: adversary.name(),
            trials: cfg.run.trials,
            lambda: cfg.lambda,
            scheme: Some(cfg.scheme.name()),
            profile: Some(cfg.profile.name().to_string()),
            ..GameParams::default()
        },
        max_score: 1,
        threshold: 0.5,
        slack: cfg.run.slack,
        seed: cfg.run.seed,
        track_live: false,
    };
    Ok(finish(GameReport::build(spec, records), &cfg.run, ms))
}
