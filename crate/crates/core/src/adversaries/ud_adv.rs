//! Pirates and distinguishers for the uncloneable-decryptor games, plus IND adversaries.

use rand::Rng;

use crate::bits::BitString;
use crate::games::{
    GameError, IndAdversary, IndChoice, IndCtx, IndGuesser, TrialSeeds, UdAdversary, UdDistCtx, UdDistinguisher,
    UdPirateCtx, UdShare,
};
use crate::qcp::{self, ProgramKind};
use crate::schemes::{Ciphertext, Decryptor};

type Pair = (BitString, BitString);

fn bits(s: &str) -> BitString {
    s.parse().expect("literal bit string")
}

fn bit_pair() -> Pair {
    (BitString::single(false), BitString::single(true))
}

/// Maps a decrypted plaintext to a guess for `b`; `None` when it matches neither message.
fn decide(m: &BitString, pair: Option<&Pair>) -> Option<bool> {
    match pair {
        None => (m.len() == 1).then(|| m.get(0)),
        Some((m0, m1)) => {
            if m == m1 {
                Some(true)
            } else if m == m0 {
                Some(false)
            } else {
                None
            }
        }
    }
}

/// Decrypts with the held decryptor; guesses when that gives nothing usable.
fn decrypt_or_guess(
    d: &Decryptor,
    c: &Ciphertext,
    pair: Option<&Pair>,
    ctx: &mut UdDistCtx<'_>,
) -> Result<bool, GameError> {
    let m = ctx.decrypt(d, c)?;
    match m.as_ref().and_then(|m| decide(m, pair)) {
        Some(g) => Ok(g),
        None => Ok(ctx.rng.gen()),
    }
}

fn shares_with(
    decryptors: Vec<Decryptor>,
    pair: Option<Pair>,
    mut make: impl FnMut(usize, Option<Pair>) -> Box<dyn UdDistinguisher>,
) -> Vec<UdShare> {
    decryptors
        .into_iter()
        .enumerate()
        .map(|(i, decryptor)| UdShare { decryptor, pair: pair.clone(), distinguisher: make(i, pair.clone()) })
        .collect()
}

fn default_pair(ctx: &UdPirateCtx<'_>, pair: Pair) -> Option<Pair> {
    (!ctx.bit_variant).then_some(pair)
}

/// Forwards the decryptors plus `k` duds; everybody decrypts its challenge.
#[derive(Debug, Clone, Copy, Default)]
pub struct HonestUd;

struct HonestDistinguisher {
    pair: Option<Pair>,
}

impl UdDistinguisher for HonestDistinguisher {
    fn distinguish(&mut self, d: &Decryptor, c: &Ciphertext, ctx: &mut UdDistCtx<'_>) -> Result<bool, GameError> {
        decrypt_or_guess(d, c, self.pair.as_ref(), ctx)
    }
}

impl UdAdversary for HonestUd {
    fn name(&self) -> String {
        "honest".into()
    }

    fn pirate(&self, decryptors: Vec<Decryptor>, ctx: &mut UdPirateCtx<'_>) -> Result<Vec<UdShare>, GameError> {
        let pair = default_pair(ctx, bit_pair());
        let decryptors = ctx.pad_with_duds(decryptors);
        Ok(shares_with(decryptors, pair, |_, pair| Box::new(HonestDistinguisher { pair })))
    }
}

/// Splits the decryptor of a two-bit extension into halves and challenges on
/// `00` / `11`: each half holder decrypts whichever item falls in its half.
/// On backends that refuse to split it forwards honestly.
#[derive(Debug, Clone, Copy, Default)]
pub struct SplitUd2Attack;

struct SplitUd2Distinguisher {
    pair: Option<Pair>,
}

fn items(c: &Ciphertext) -> Vec<(BitString, bool)> {
    match c {
        Ciphertext::Bit(b) => vec![(b.r.clone(), b.beta)],
        Ciphertext::Seq(items) => items.iter().map(|b| (b.r.clone(), b.beta)).collect(),
        Ciphertext::SignedBit(s) => vec![(s.inner.r.clone(), s.inner.beta)],
        Ciphertext::SignedSeq { items, .. } => items.iter().map(|s| (s.inner.r.clone(), s.inner.beta)).collect(),
    }
}

impl UdDistinguisher for SplitUd2Distinguisher {
    fn distinguish(&mut self, d: &Decryptor, c: &Ciphertext, ctx: &mut UdDistCtx<'_>) -> Result<bool, GameError> {
        let ProgramKind::Half { bit } = d.program().kind() else {
            return decrypt_or_guess(d, c, self.pair.as_ref(), ctx);
        };
        for (r, beta) in items(c) {
            if r.first() == Some(bit) {
                let v = qcp::eval_program(ctx.ledger, d.program(), &r)?;
                return Ok(beta ^ v);
            }
        }
        Ok(ctx.rng.gen())
    }
}

impl UdAdversary for SplitUd2Attack {
    fn name(&self) -> String {
        "split_ud2".into()
    }

    fn pirate(&self, mut decryptors: Vec<Decryptor>, ctx: &mut UdPirateCtx<'_>) -> Result<Vec<UdShare>, GameError> {
        if ctx.bit_variant {
            return Err(GameError::InvalidParams("split_ud2 chooses its own plaintexts".into()));
        }
        let pair = Some((bits("00"), bits("11")));
        if ctx.k > 0 && !decryptors.is_empty() {
            let (program, pk) = decryptors.remove(0).into_parts();
            match qcp::split_pair(ctx.ledger, program) {
                Ok((h0, h1)) => {
                    decryptors.insert(0, Decryptor::new(h1, pk.clone()));
                    decryptors.insert(0, Decryptor::new(h0, pk));
                }
                Err(rejected) => decryptors.insert(0, Decryptor::new(rejected.program, pk)),
            }
        }
        let decryptors = ctx.pad_with_duds(decryptors);
        Ok(shares_with(decryptors, pair, |_, pair| Box::new(SplitUd2Distinguisher { pair })))
    }
}

/// Which ciphertext surgery a [`CcaAttack`] performs before its decryption query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcaAttackKind {
    /// Flip the plaintext-carrying bit of the first item.
    Malleability,
    /// Drop the last item.
    Truncate,
    /// Swap the first two items.
    Rearrange,
    /// Replace the second item by the second item of a fresh encryption of `00`.
    Splice,
}

impl CcaAttackKind {
    pub fn name(self) -> &'static str {
        match self {
            CcaAttackKind::Malleability => "malleability",
            CcaAttackKind::Truncate => "truncate",
            CcaAttackKind::Rearrange => "rearrange",
            CcaAttackKind::Splice => "splice",
        }
    }

    fn pair(self) -> Pair {
        match self {
            CcaAttackKind::Malleability => bit_pair(),
            _ => (bits("01"), bits("10")),
        }
    }
}

/// Honest pirate whose distinguishers modify their challenge, ask the
/// post-challenge decryption oracle about the result and undo the
/// modification. When the oracle says ⊥ (or is absent) they fall back to
/// their own decryptor.
#[derive(Debug, Clone, Copy)]
pub struct CcaAttack {
    pub kind: CcaAttackKind,
}

struct CcaDistinguisher {
    kind: CcaAttackKind,
    pair: Option<Pair>,
}

fn flip_first(c: &Ciphertext) -> Ciphertext {
    let mut c = c.clone();
    match &mut c {
        Ciphertext::Bit(b) => b.beta = !b.beta,
        Ciphertext::Seq(items) => {
            if let Some(b) = items.first_mut() {
                b.beta = !b.beta;
            }
        }
        Ciphertext::SignedBit(s) => s.inner.beta = !s.inner.beta,
        Ciphertext::SignedSeq { items, .. } => {
            if let Some(s) = items.first_mut() {
                s.inner.beta = !s.inner.beta;
            }
        }
    }
    c
}

fn truncate(c: &Ciphertext) -> Option<Ciphertext> {
    match c {
        Ciphertext::Seq(items) if items.len() > 1 => Some(Ciphertext::Seq(items[..items.len() - 1].to_vec())),
        Ciphertext::SignedSeq { serial, items } if items.len() > 1 => {
            Some(Ciphertext::SignedSeq { serial: serial.clone(), items: items[..items.len() - 1].to_vec() })
        }
        _ => None,
    }
}

fn swap_first_two(c: &Ciphertext) -> Option<Ciphertext> {
    let mut c = c.clone();
    match &mut c {
        Ciphertext::Seq(items) if items.len() > 1 => items.swap(0, 1),
        Ciphertext::SignedSeq { items, .. } if items.len() > 1 => items.swap(0, 1),
        _ => return None,
    }
    Some(c)
}

fn splice_second(c: &Ciphertext, donor: &Ciphertext) -> Option<Ciphertext> {
    match (c, donor) {
        (Ciphertext::Seq(a), Ciphertext::Seq(b)) if a.len() > 1 && b.len() > 1 => {
            let mut items = a.clone();
            items[1] = b[1].clone();
            Some(Ciphertext::Seq(items))
        }
        (Ciphertext::SignedSeq { serial, items: a }, Ciphertext::SignedSeq { items: b, .. })
            if a.len() > 1 && b.len() > 1 =>
        {
            let mut items = a.clone();
            items[1] = b[1].clone();
            Some(Ciphertext::SignedSeq { serial: serial.clone(), items })
        }
        _ => None,
    }
}

impl CcaDistinguisher {
    /// Modified ciphertext and the map from its decryption back to the challenge plaintext.
    fn attempt(&self, c: &Ciphertext, ctx: &mut UdDistCtx<'_>) -> Result<Option<BitString>, GameError> {
        if !ctx.oracles.has_decryption() {
            return Ok(None);
        }
        let modified = match self.kind {
            CcaAttackKind::Malleability => Some(flip_first(c)),
            CcaAttackKind::Truncate => truncate(c),
            CcaAttackKind::Rearrange => swap_first_two(c),
            CcaAttackKind::Splice => {
                if !ctx.oracles.has_encryption() {
                    return Ok(None);
                }
                let donor = ctx.oracles.encrypt(&bits("00"))?;
                splice_second(c, &donor)
            }
        };
        let Some(modified) = modified else { return Ok(None) };
        let Some(m) = ctx.oracles.decrypt(&modified)? else { return Ok(None) };
        Ok(match self.kind {
            CcaAttackKind::Malleability => {
                let mut m = m;
                if m.is_empty() {
                    return Ok(None);
                }
                m.flip(0);
                Some(m)
            }
            CcaAttackKind::Rearrange if m.len() == 2 => Some(BitString::from_bits([m.get(1), m.get(0)])),
            // Truncation and splicing keep the first bit, which is enough to tell 01 from 10.
            CcaAttackKind::Truncate | CcaAttackKind::Splice if !m.is_empty() => {
                Some(if m.get(0) { bits("10") } else { bits("01") })
            }
            _ => None,
        })
    }
}

impl UdDistinguisher for CcaDistinguisher {
    fn distinguish(&mut self, d: &Decryptor, c: &Ciphertext, ctx: &mut UdDistCtx<'_>) -> Result<bool, GameError> {
        if let Some(m) = self.attempt(c, ctx)? {
            if let Some(g) = decide(&m, self.pair.as_ref()) {
                return Ok(g);
            }
        }
        decrypt_or_guess(d, c, self.pair.as_ref(), ctx)
    }
}

impl UdAdversary for CcaAttack {
    fn name(&self) -> String {
        self.kind.name().to_string()
    }

    fn pirate(&self, decryptors: Vec<Decryptor>, ctx: &mut UdPirateCtx<'_>) -> Result<Vec<UdShare>, GameError> {
        let pair = default_pair(ctx, self.kind.pair());
        let decryptors = ctx.pad_with_duds(decryptors);
        let kind = self.kind;
        Ok(shares_with(decryptors, pair, |_, pair| Box::new(CcaDistinguisher { kind, pair })))
    }
}

/// Honest adversary that also exercises every available oracle in both phases
/// with legitimate queries: encrypt a bit, decrypt the result.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleProbe;

struct ProbeDistinguisher {
    pair: Option<Pair>,
}

fn probe(oracles: &mut crate::games::ClassicalOracles, bit: bool) -> Result<(), GameError> {
    if oracles.has_encryption() {
        let c = oracles.encrypt(&BitString::single(bit))?;
        if oracles.has_decryption() {
            oracles.decrypt(&c)?;
        }
    }
    Ok(())
}

impl UdDistinguisher for ProbeDistinguisher {
    fn distinguish(&mut self, d: &Decryptor, c: &Ciphertext, ctx: &mut UdDistCtx<'_>) -> Result<bool, GameError> {
        let bit = ctx.rng.gen();
        probe(ctx.oracles, bit)?;
        decrypt_or_guess(d, c, self.pair.as_ref(), ctx)
    }
}

impl UdAdversary for OracleProbe {
    fn name(&self) -> String {
        "oracle_probe".into()
    }

    fn pirate(&self, decryptors: Vec<Decryptor>, ctx: &mut UdPirateCtx<'_>) -> Result<Vec<UdShare>, GameError> {
        let bit = ctx.rng.gen();
        probe(ctx.oracles, bit)?;
        let pair = default_pair(ctx, bit_pair());
        let decryptors = ctx.pad_with_duds(decryptors);
        Ok(shares_with(decryptors, pair, |_, pair| Box::new(ProbeDistinguisher { pair })))
    }
}

/// Builds a UD adversary with `n + k ≥ 2` from an IND adversary: the inner
/// adversary's first phase runs as the pirate, its guesser becomes
/// distinguisher 0 (holding a dud), and distinguisher 1 holds the real
/// decryptor and wins with certainty.
pub struct UdToInd<A> {
    pub inner: A,
}

struct IndForward {
    guesser: Box<dyn IndGuesser>,
    seeds: TrialSeeds,
}

impl UdDistinguisher for IndForward {
    fn distinguish(&mut self, _: &Decryptor, c: &Ciphertext, ctx: &mut UdDistCtx<'_>) -> Result<bool, GameError> {
        self.guesser.guess(c, &mut IndCtx::new(ctx.oracles, ctx.rng, self.seeds))
    }
}

impl<A: IndAdversary> UdAdversary for UdToInd<A> {
    fn name(&self) -> String {
        format!("ud_to_ind({})", self.inner.name())
    }

    fn pirate(&self, decryptors: Vec<Decryptor>, ctx: &mut UdPirateCtx<'_>) -> Result<Vec<UdShare>, GameError> {
        if ctx.bit_variant {
            return Err(GameError::InvalidParams("ud_to_ind needs chosen plaintexts".into()));
        }
        if ctx.players() < 2 {
            return Err(GameError::InvalidParams("ud_to_ind needs n + k >= 2".into()));
        }
        let seeds = ctx.seeds();
        let IndChoice { m0, m1, guesser } = {
            let mut ind = IndCtx::new(ctx.oracles, ctx.rng, seeds);
            self.inner.choose(&mut ind)?
        };
        let pk = decryptors.first().and_then(|d| d.pk().cloned());
        let mut rng = ctx.aux_rng("ud_to_ind_dud");
        let dud = ctx.dud_decryptor(pk, &mut rng);
        let mut shares = vec![UdShare {
            decryptor: dud,
            pair: Some((m0, m1)),
            distinguisher: Box::new(IndForward { guesser, seeds }),
        }];
        let take = ctx.players() - 1;
        let mut rest = decryptors.into_iter();
        let mut held: Vec<Decryptor> = rest.by_ref().take(take).collect();
        for surplus in rest {
            qcp::discard(ctx.ledger, surplus.into_parts().0)?;
        }
        let pk = held.first().and_then(|d| d.pk().cloned());
        while held.len() < take {
            let d = ctx.dud_decryptor(pk.clone(), &mut rng);
            held.push(d);
        }
        for decryptor in held {
            shares.push(UdShare {
                decryptor,
                pair: Some(bit_pair()),
                distinguisher: Box::new(HonestDistinguisher { pair: Some(bit_pair()) }),
            });
        }
        Ok(shares)
    }
}

/// Chooses `0` / `1` and guesses uniformly.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomGuessInd;

struct RandomGuesser;

impl IndGuesser for RandomGuesser {
    fn guess(&mut self, _: &Ciphertext, ctx: &mut IndCtx<'_>) -> Result<bool, GameError> {
        Ok(ctx.rng.gen())
    }
}

impl IndAdversary for RandomGuessInd {
    fn name(&self) -> String {
        "random".into()
    }

    fn choose(&self, _: &mut IndCtx<'_>) -> Result<IndChoice, GameError> {
        let (m0, m1) = bit_pair();
        Ok(IndChoice { m0, m1, guesser: Box::new(RandomGuesser) })
    }
}

/// Flips the challenge's first plaintext-carrying bit and asks the
/// post-challenge decryption oracle; guesses when refused.
#[derive(Debug, Clone, Copy, Default)]
pub struct MalleabilityInd;

struct MalleabilityGuesser;

impl IndGuesser for MalleabilityGuesser {
    fn guess(&mut self, c: &Ciphertext, ctx: &mut IndCtx<'_>) -> Result<bool, GameError> {
        if ctx.oracles.has_decryption() {
            if let Some(m) = ctx.oracles.decrypt(&flip_first(c))? {
                if m.len() == 1 {
                    return Ok(!m.get(0));
                }
            }
        }
        Ok(ctx.rng.gen())
    }
}

impl IndAdversary for MalleabilityInd {
    fn name(&self) -> String {
        "malleability".into()
    }

    fn choose(&self, _: &mut IndCtx<'_>) -> Result<IndChoice, GameError> {
        let (m0, m1) = bit_pair();
        Ok(IndChoice { m0, m1, guesser: Box::new(MalleabilityGuesser) })
    }
}

/// Reads the first plaintext-carrying bit of the challenge as the answer with
/// probability `accuracy` and guesses otherwise. Against a key whose pad is
/// constantly zero this wins with probability `(1 + accuracy) / 2`.
#[derive(Debug, Clone, Copy)]
pub struct NoisyReader {
    pub accuracy: f64,
}

struct NoisyGuesser(f64);

impl IndGuesser for NoisyGuesser {
    fn guess(&mut self, c: &Ciphertext, ctx: &mut IndCtx<'_>) -> Result<bool, GameError> {
        let u: f64 = ctx.rng.gen();
        let coin: bool = ctx.rng.gen();
        if u < self.0 {
            if let Some((_, beta)) = items(c).first() {
                return Ok(*beta);
            }
        }
        Ok(coin)
    }
}

impl IndAdversary for NoisyReader {
    fn name(&self) -> String {
        format!("noisy_reader:accuracy={}", self.accuracy)
    }

    fn choose(&self, _: &mut IndCtx<'_>) -> Result<IndChoice, GameError> {
        let (m0, m1) = bit_pair();
        Ok(IndChoice { m0, m1, guesser: Box::new(NoisyGuesser(self.accuracy)) })
    }
}
