use rand::Rng;
use udlab::adversaries::{CcaAttack, CcaAttackKind, HonestQcp, RandomGuessInd};
use udlab::bbf::BbfFamily;
use udlab::bits::BitString;
use udlab::games::*;
use udlab::qcp::{self, hooks, BackendTag, ProtectedProgram};
use udlab::schemes::{self, Ciphertext, Decryptor};
use udlab::signatures::{SigSchemeTag, LEAF_COUNT};

struct Evaluate;

impl QcpFreeloader for Evaluate {
    fn respond(&mut self, p: &ProtectedProgram, ch: &mut QcpChallenge<'_>, ctx: &mut FreeloaderCtx<'_>) -> Result<bool, GameError> {
        let x = ch.challenge_point()?.clone();
        ctx.eval(p, &x)
    }
}

fn shares(programs: Vec<ProtectedProgram>) -> Vec<QcpShare> {
    programs.into_iter().map(|program| QcpShare { program, freeloader: Box::new(Evaluate) }).collect()
}

/// Hands out the same handle twice.
struct Aliaser;

impl QcpAdversary for Aliaser {
    fn name(&self) -> String {
        "aliaser".into()
    }

    fn pirate(&self, programs: Vec<ProtectedProgram>, _: &mut PirateCtx<'_>) -> Result<Vec<QcpShare>, GameError> {
        let alias = hooks::forge_alias(&programs[0]);
        Ok(shares(vec![programs.into_iter().next().unwrap(), alias]))
    }
}

/// Reads the protected function out, mints a copy and keeps it back.
struct Hoarder;

impl QcpAdversary for Hoarder {
    fn name(&self) -> String {
        "hoarder".into()
    }

    fn pirate(&self, programs: Vec<ProtectedProgram>, ctx: &mut PirateCtx<'_>) -> Result<Vec<QcpShare>, GameError> {
        let f = hooks::unseal(&programs[0]).unwrap().clone();
        let _kept = qcp::protect(BackendTag::IdealToken, &f, ctx.ledger, ctx.rng)?;
        Ok(shares(ctx.pad_with_duds(programs)?))
    }
}

/// Returns fewer programs than there are players.
struct Dropper;

impl QcpAdversary for Dropper {
    fn name(&self) -> String {
        "dropper".into()
    }

    fn pirate(&self, programs: Vec<ProtectedProgram>, _: &mut PirateCtx<'_>) -> Result<Vec<QcpShare>, GameError> {
        Ok(shares(programs))
    }
}

fn weak(n: usize, k: usize) -> QcpGameConfig {
    QcpGameConfig::new(BackendTag::IdealToken, n, k, RunOptions::new(20, 1))
}

#[test]
fn duplicated_handles_are_rejected() {
    let err = run_weak_qcp(&weak(1, 1), &Aliaser).unwrap_err();
    assert!(matches!(err, GameError::AdversaryProtocolViolation(_)), "{err}");
}

#[test]
fn copies_kept_by_the_pirate_are_rejected() {
    let err = run_weak_qcp(&weak(1, 1), &Hoarder).unwrap_err();
    assert!(matches!(err, GameError::AdversaryProtocolViolation(_)), "{err}");
}

#[test]
fn short_share_lists_are_rejected() {
    let err = run_weak_qcp(&weak(1, 2), &Dropper).unwrap_err();
    assert!(matches!(err, GameError::AdversaryProtocolViolation(_)), "{err}");
}

#[test]
fn lor_resampling_fails_on_a_constant_function() {
    let cfg = weak(1, 1).family(BbfFamily::ConstantZero);
    assert!(matches!(run_lor_qcp(&cfg, &HonestQcp), Err(GameError::ResampleExhausted)));
}

#[test]
fn zero_players_or_trials_are_invalid() {
    assert!(matches!(run_weak_qcp(&weak(0, 1), &HonestQcp), Err(GameError::InvalidParams(_))));
    let cfg = QcpGameConfig::new(BackendTag::IdealToken, 1, 1, RunOptions::new(0, 1));
    assert!(matches!(run_weak_qcp(&cfg, &HonestQcp), Err(GameError::InvalidParams(_))));
}

/// Submits the challenge itself to the phase-two decryption oracle.
struct EchoChallenge;

struct Echo;

impl UdDistinguisher for Echo {
    fn distinguish(&mut self, d: &Decryptor, c: &Ciphertext, ctx: &mut UdDistCtx<'_>) -> Result<bool, GameError> {
        if ctx.oracles.decrypt(c)?.is_some() {
            return Err(GameError::AdversaryProtocolViolation("challenge was decrypted".into()));
        }
        Ok(ctx.decrypt(d, c)?.is_some_and(|m| m.get(0)))
    }
}

impl UdAdversary for EchoChallenge {
    fn name(&self) -> String {
        "echo".into()
    }

    fn pirate(&self, decryptors: Vec<Decryptor>, ctx: &mut UdPirateCtx<'_>) -> Result<Vec<UdShare>, GameError> {
        let pair = (BitString::single(false), BitString::single(true));
        Ok(ctx
            .pad_with_duds(decryptors)
            .into_iter()
            .map(|decryptor| UdShare { decryptor, pair: Some(pair.clone()), distinguisher: Box::new(Echo) })
            .collect())
    }
}

#[test]
fn cca2_oracle_refuses_exactly_the_challenge() {
    let trials = 50;
    let scheme = schemes::extend(schemes::build_ud1_cpa(BackendTag::IdealToken)).unwrap();
    let cfg = UdGameConfig::new(scheme, 2, 1, OracleProfile::Cca2, RunOptions::new(trials, 4));
    let r = run_ud(&cfg, &EchoChallenge).unwrap();
    let s = &r.oracle_stats;
    assert_eq!(s.dec_queries, 3 * trials);
    assert_eq!(s.dec_excluded, 3 * trials);
    assert_eq!(s.dec_bottom, 3 * trials);
}

#[test]
fn cca1_has_no_phase_two_decryption() {
    let scheme = schemes::extend(schemes::build_ud1_cpa(BackendTag::IdealToken)).unwrap();
    let cfg = UdGameConfig::new(scheme, 1, 1, OracleProfile::Cca1, RunOptions::new(5, 4));
    assert!(matches!(run_ud(&cfg, &EchoChallenge), Err(GameError::OracleUnavailable("decryption"))));
}

#[test]
fn simulated_oracle_is_wrong_on_malleable_ciphertexts() {
    // The mauled challenge decrypts under the real key but was never encrypted
    // through the oracle, so the simulation answers ⊥ every time.
    let trials = 200;
    let scheme = schemes::extend(schemes::build_ud1_cpa(BackendTag::IdealToken)).unwrap();
    let cfg = UdGameConfig::new(scheme, 1, 1, OracleProfile::Cca2, RunOptions::new(trials, 9)).shadow_sim(true);
    let r = run_ud(&cfg, &CcaAttack { kind: CcaAttackKind::Malleability }).unwrap();
    let s = &r.oracle_stats;
    assert_eq!(s.dec_bottom, 0);
    assert_eq!(s.sim_checked, s.dec_queries);
    assert_eq!(s.sim_disagreements, s.dec_queries);
    assert!(s.dec_queries >= trials);
}

#[test]
fn random_guessing_has_no_ind_advantage() {
    let cfg = IndGameConfig::new(schemes::build_ud1_cpa(BackendTag::IdealToken), OracleProfile::Cca2, RunOptions::new(4000, 2));
    let r = run_ind(&cfg, &RandomGuessInd).unwrap();
    assert!((r.mean - 0.5).abs() <= r.ci.half_width, "{}", r.mean);
    assert_ne!(r.verdict, Verdict::ExceedsBound);
}

struct NoForgery;

impl Forger for NoForgery {
    fn name(&self) -> String {
        "none".into()
    }

    fn forge(
        &self,
        _: &udlab::signatures::PublicKey,
        oracle: &mut SignOracle<'_>,
        ctx: &mut AdvCtx<'_>,
    ) -> Result<Option<(Vec<u8>, udlab::signatures::Signature)>, GameError> {
        while oracle.remaining() > 0 {
            let msg: [u8; 4] = ctx.rng.gen();
            oracle.sign(&msg)?;
        }
        assert!(matches!(oracle.sign(b"one more"), Err(GameError::QueryBudgetExceeded)));
        Ok(None)
    }
}

#[test]
fn signing_budget_is_enforced() {
    let cfg = ClassicalGameConfig::new(RunOptions::new(3, 5));
    let r = run_seuf_cma(SigSchemeTag::LamportMerkle, 4, &cfg, &NoForgery).unwrap();
    assert_eq!(r.mean, 0.0);
    let err = run_seuf_cma(SigSchemeTag::LamportMerkle, LEAF_COUNT + 1, &cfg, &NoForgery).unwrap_err();
    assert!(matches!(err, GameError::InvalidParams(_)));
}
