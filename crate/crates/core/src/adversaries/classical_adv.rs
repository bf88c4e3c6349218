//! Adversaries for LoR-CPA, the weak-PRF game, UL / FLIP-UL and sEUF-CMA.

use std::collections::HashMap;

use rand::Rng;

use crate::bits::BitString;
use crate::games::{
    AdvCtx, ClassicalGameConfig, EvalOracle, FlipSource, FlipUlGuesser, FlipUlLearner, Forger, GameError,
    LorCpaAdversary, LorCpaChallenger, RandomInputSource, Role, RunOptions, SignOracle, TrialRng, TrialSeeds,
    UlGuesser, UlLearner, WprfDistinguisher,
};
use crate::schemes::Ciphertext;
use crate::signatures::{PublicKey, Signature};

/// Largest domain the table-building learners enumerate.
pub const MAX_TABLE_INPUT_LEN: usize = 16;

fn first_beta(c: &Ciphertext) -> Option<(BitString, bool)> {
    match c {
        Ciphertext::Bit(b) => Some((b.r.clone(), b.beta)),
        Ciphertext::Seq(items) => items.first().map(|b| (b.r.clone(), b.beta)),
        Ciphertext::SignedBit(s) => Some((s.inner.r.clone(), s.inner.beta)),
        Ciphertext::SignedSeq { items, .. } => items.first().map(|s| (s.inner.r.clone(), s.inner.beta)),
    }
}

/// Makes no queries and answers 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct AlwaysZeroLorCpa;

impl LorCpaAdversary for AlwaysZeroLorCpa {
    fn name(&self) -> String {
        "always_zero".into()
    }

    fn play(&self, _: &mut LorCpaChallenger, _: &mut AdvCtx<'_>) -> Result<bool, GameError> {
        Ok(false)
    }
}

/// Submits `(0, 1)` once and answers with the ciphertext's plaintext-carrying bit.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReadBetaLorCpa;

impl LorCpaAdversary for ReadBetaLorCpa {
    fn name(&self) -> String {
        "read_beta".into()
    }

    fn play(&self, challenger: &mut LorCpaChallenger, _: &mut AdvCtx<'_>) -> Result<bool, GameError> {
        let c = challenger.submit(&BitString::single(false), &BitString::single(true))?;
        Ok(first_beta(&c).map(|(_, beta)| beta).unwrap_or(false))
    }
}

/// Random-input oracle built from a left-or-right encryption oracle: each
/// query submits `(0, z)` for fresh uniform `z` and returns `(r, β)`.
struct LorAsRandomInput<'a> {
    challenger: &'a mut LorCpaChallenger,
    z_rng: TrialRng,
}

impl RandomInputSource for LorAsRandomInput<'_> {
    fn query(&mut self) -> Result<(BitString, bool), GameError> {
        let z = BitString::single(self.z_rng.gen());
        let c = self.challenger.submit(&BitString::single(false), &z)?;
        first_beta(&c).ok_or(GameError::AdversaryProtocolViolation("empty ciphertext".into()))
    }
}

/// LoR-CPA adversary running a weak-PRF distinguisher on `(r, β)` pairs.
pub struct WprfFromLorCpa<D> {
    pub inner: D,
}

impl<D: WprfDistinguisher> LorCpaAdversary for WprfFromLorCpa<D> {
    fn name(&self) -> String {
        format!("wprf_from_lorcpa({})", self.inner.name())
    }

    fn play(&self, challenger: &mut LorCpaChallenger, ctx: &mut AdvCtx<'_>) -> Result<bool, GameError> {
        let z_rng = ctx.aux("wprf_z", 0);
        let mut source = LorAsRandomInput { challenger, z_rng };
        self.inner.distinguish(&mut source, ctx)
    }
}

/// Says "random function" unless at least three quarters of `queries` sampled
/// values agree.
#[derive(Debug, Clone, Copy)]
pub struct MajorityDistinguisher {
    pub queries: usize,
}

impl WprfDistinguisher for MajorityDistinguisher {
    fn name(&self) -> String {
        format!("majority:queries={}", self.queries)
    }

    fn distinguish(&self, oracle: &mut dyn RandomInputSource, _: &mut AdvCtx<'_>) -> Result<bool, GameError> {
        let mut ones = 0usize;
        for _ in 0..self.queries {
            ones += usize::from(oracle.query()?.1);
        }
        let majority = ones.max(self.queries - ones);
        Ok(4 * majority < 3 * self.queries)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroQueryDistinguisher;

impl WprfDistinguisher for ZeroQueryDistinguisher {
    fn name(&self) -> String {
        "zero_query".into()
    }

    fn distinguish(&self, _: &mut dyn RandomInputSource, ctx: &mut AdvCtx<'_>) -> Result<bool, GameError> {
        Ok(ctx.rng.gen())
    }
}

fn table_len(oracle: &EvalOracle<'_>) -> Result<usize, GameError> {
    let len = oracle.input_len();
    if len > MAX_TABLE_INPUT_LEN {
        return Err(GameError::InvalidParams(format!("input length {len} too large to tabulate")));
    }
    Ok(len)
}

/// Queries every input and looks the challenge up.
#[derive(Debug, Clone, Copy, Default)]
pub struct Memorizer;

struct TableGuesser(HashMap<BitString, bool>);

impl UlGuesser for TableGuesser {
    fn predict(&mut self, x: &BitString, ctx: &mut AdvCtx<'_>) -> Result<bool, GameError> {
        Ok(match self.0.get(x) {
            Some(y) => *y,
            None => ctx.rng.gen(),
        })
    }
}

impl UlLearner for Memorizer {
    fn name(&self) -> String {
        "memorizer".into()
    }

    fn learn(&self, oracle: &mut EvalOracle<'_>, _: &mut AdvCtx<'_>) -> Result<Box<dyn UlGuesser>, GameError> {
        let len = table_len(oracle)?;
        let mut table = HashMap::with_capacity(1 << len);
        for v in 0..(1u64 << len) {
            let x = BitString::from_u64(v, len);
            let y = oracle.query(&x)?;
            table.insert(x, y);
        }
        Ok(Box::new(TableGuesser(table)))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoQueryLearner;

struct CoinGuesser;

impl UlGuesser for CoinGuesser {
    fn predict(&mut self, _: &BitString, ctx: &mut AdvCtx<'_>) -> Result<bool, GameError> {
        Ok(ctx.rng.gen())
    }
}

impl UlLearner for NoQueryLearner {
    fn name(&self) -> String {
        "no_query".into()
    }

    fn learn(&self, _: &mut EvalOracle<'_>, _: &mut AdvCtx<'_>) -> Result<Box<dyn UlGuesser>, GameError> {
        Ok(Box::new(CoinGuesser))
    }
}

/// FLIP-UL learner that tabulates the half of the domain starting with 0 and
/// then spends up to `q` flip queries looking for a point in its table.
#[derive(Debug, Clone, Copy)]
pub struct HalfTable {
    pub q: usize,
}

struct HalfTableGuesser {
    table: HashMap<BitString, bool>,
    q: usize,
}

impl FlipUlGuesser for HalfTableGuesser {
    fn detect(&mut self, flips: &mut dyn FlipSource, ctx: &mut AdvCtx<'_>) -> Result<bool, GameError> {
        for _ in 0..self.q {
            let (r, y) = flips.query()?;
            if let Some(v) = self.table.get(&r) {
                return Ok(y ^ v);
            }
        }
        Ok(ctx.rng.gen())
    }
}

impl FlipUlLearner for HalfTable {
    fn name(&self) -> String {
        format!("half_table:q={}", self.q)
    }

    fn learn(&self, oracle: &mut EvalOracle<'_>, _: &mut AdvCtx<'_>) -> Result<Box<dyn FlipUlGuesser>, GameError> {
        let len = table_len(oracle)?;
        let mut table = HashMap::new();
        // Inputs whose first bit is 0: bit 0 is the least significant bit of `v`.
        for v in (0..(1u64 << len)).step_by(2) {
            let x = BitString::from_u64(v, len);
            let y = oracle.query(&x)?;
            table.insert(x, y);
        }
        Ok(Box::new(HalfTableGuesser { table, q: self.q }))
    }
}

/// FLIP-UL learner from a UL learner: one flip query `(r, z)`, answer `z ⊕ inner(r)`.
pub struct UlFlipForward<L> {
    pub inner: L,
}

struct ForwardGuesser(Box<dyn UlGuesser>);

impl FlipUlGuesser for ForwardGuesser {
    fn detect(&mut self, flips: &mut dyn FlipSource, ctx: &mut AdvCtx<'_>) -> Result<bool, GameError> {
        let (r, z) = flips.query()?;
        Ok(z ^ self.0.predict(&r, ctx)?)
    }
}

impl<L: UlLearner> FlipUlLearner for UlFlipForward<L> {
    fn name(&self) -> String {
        format!("ul_flip_forward({})", self.inner.name())
    }

    fn learn(&self, oracle: &mut EvalOracle<'_>, ctx: &mut AdvCtx<'_>) -> Result<Box<dyn FlipUlGuesser>, GameError> {
        Ok(Box::new(ForwardGuesser(self.inner.learn(oracle, ctx)?)))
    }
}

/// Serves `q` pairs: correct ones before position `iota`, then `(x, 0)` at
/// `iota` if a challenge is planted, then flipped ones. 1-based positions.
struct HybridSource {
    pairs: Vec<(BitString, bool)>,
    iota: usize,
    challenge: Option<BitString>,
    served: usize,
}

impl FlipSource for HybridSource {
    fn query(&mut self) -> Result<(BitString, bool), GameError> {
        if self.served >= self.pairs.len() {
            return Err(GameError::QueryBudgetExceeded);
        }
        self.served += 1;
        let j = self.served;
        let (r, y) = &self.pairs[j - 1];
        Ok(match (&self.challenge, j.cmp(&self.iota)) {
            (_, std::cmp::Ordering::Less) => (r.clone(), *y),
            (Some(x), std::cmp::Ordering::Equal) => (x.clone(), false),
            (None, std::cmp::Ordering::Equal) => (r.clone(), !*y),
            (_, std::cmp::Ordering::Greater) => (r.clone(), !*y),
        })
    }
}

fn collect_pairs(oracle: &mut EvalOracle<'_>, q: usize, rng: &mut TrialRng) -> Result<Vec<(BitString, bool)>, GameError> {
    (0..q)
        .map(|_| {
            let r = BitString::random(oracle.input_len(), rng);
            let y = oracle.query(&r)?;
            Ok((r, y))
        })
        .collect()
}

/// UL learner from a FLIP-UL learner making at most `q` flip queries: collects
/// `q` labelled points in phase 1, then plants the challenge at a uniform
/// position among them (correct before, flipped after) and outputs the inner bit.
pub struct UlFlipHybrid<L> {
    pub inner: L,
    pub q: usize,
}

struct HybridGuesser {
    inner: Box<dyn FlipUlGuesser>,
    pairs: Vec<(BitString, bool)>,
}

impl UlGuesser for HybridGuesser {
    fn predict(&mut self, x: &BitString, ctx: &mut AdvCtx<'_>) -> Result<bool, GameError> {
        let iota = ctx.rng.gen_range(1..=self.pairs.len());
        let mut source =
            HybridSource { pairs: std::mem::take(&mut self.pairs), iota, challenge: Some(x.clone()), served: 0 };
        self.inner.detect(&mut source, ctx)
    }
}

impl<L: FlipUlLearner> UlLearner for UlFlipHybrid<L> {
    fn name(&self) -> String {
        format!("ul_flip_hybrid:q={}({})", self.q, self.inner.name())
    }

    fn learn(&self, oracle: &mut EvalOracle<'_>, ctx: &mut AdvCtx<'_>) -> Result<Box<dyn UlGuesser>, GameError> {
        if self.q == 0 {
            return Err(GameError::InvalidParams("hybrid needs q >= 1".into()));
        }
        let inner = self.inner.learn(oracle, ctx)?;
        let pairs = collect_pairs(oracle, self.q, &mut ctx.aux("hybrid_pairs", 0))?;
        Ok(Box::new(HybridGuesser { inner, pairs }))
    }
}

/// Rate at which a FLIP-UL learner outputs 1 in each hybrid `H_0, ..., H_q`,
/// where `H_i` answers the first `i` flip queries correctly and the rest flipped.
/// `H_q` is the `b = 0` game and `H_0` the `b = 1` game.
pub fn hybrid_output_rates(
    learner: &dyn FlipUlLearner,
    q: usize,
    cfg: &ClassicalGameConfig,
) -> Result<Vec<f64>, GameError> {
    let run: RunOptions = cfg.run;
    let mut ones = vec![0u64; q + 1];
    for t in 0..run.trials {
        let seeds = TrialSeeds::new(run.seed, t);
        let f = crate::bbf::sample(cfg.family, cfg.lambda, &mut seeds.stream(Role::Key, 0))?;
        for (i, count) in ones.iter_mut().enumerate() {
            let mut oracle = EvalOracle::new(&f);
            let mut rng = seeds.stream(Role::Adversary, 0);
            let mut guesser = learner.learn(&mut oracle, &mut AdvCtx::new(&mut rng, seeds))?;
            let pairs = collect_pairs(&mut oracle, q, &mut seeds.stream(Role::Point, 0))?;
            let mut source = HybridSource { pairs, iota: i + 1, challenge: None, served: 0 };
            let mut rng = seeds.stream(Role::Freeloader, 0);
            if guesser.detect(&mut source, &mut AdvCtx::new(&mut rng, seeds))? {
                *count += 1;
            }
        }
    }
    Ok(ones.into_iter().map(|c| c as f64 / run.trials as f64).collect())
}

/// Asks for one signature and hands it back unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReplayForger;

impl Forger for ReplayForger {
    fn name(&self) -> String {
        "replay".into()
    }

    fn forge(
        &self,
        _: &PublicKey,
        oracle: &mut SignOracle<'_>,
        ctx: &mut AdvCtx<'_>,
    ) -> Result<Option<(Vec<u8>, Signature)>, GameError> {
        let msg: [u8; 16] = ctx.rng.gen();
        let sig = oracle.sign(&msg)?;
        Ok(Some((msg.to_vec(), sig)))
    }
}

/// Outputs a fixed message with a one-byte signature, no queries.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrivialForger;

impl Forger for TrivialForger {
    fn name(&self) -> String {
        "trivial".into()
    }

    fn forge(
        &self,
        _: &PublicKey,
        _: &mut SignOracle<'_>,
        _: &mut AdvCtx<'_>,
    ) -> Result<Option<(Vec<u8>, Signature)>, GameError> {
        Ok(Some((b"forged".to_vec(), Signature(vec![0]))))
    }
}

/// Asks for one signature and flips a uniformly chosen bit of it.
#[derive(Debug, Clone, Copy, Default)]
pub struct BitFlipForger;

impl Forger for BitFlipForger {
    fn name(&self) -> String {
        "bitflip".into()
    }

    fn forge(
        &self,
        _: &PublicKey,
        oracle: &mut SignOracle<'_>,
        ctx: &mut AdvCtx<'_>,
    ) -> Result<Option<(Vec<u8>, Signature)>, GameError> {
        let msg: [u8; 16] = ctx.rng.gen();
        let mut sig = oracle.sign(&msg)?;
        let bit = ctx.rng.gen_range(0..sig.0.len() * 8);
        sig.0[bit / 8] ^= 1 << (bit % 8);
        Ok(Some((msg.to_vec(), sig)))
    }
}
