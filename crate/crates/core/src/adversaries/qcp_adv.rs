//! Pirates and freeloaders for the copy-protection games.

use rand::Rng;

use crate::bits::BitString;
use crate::games::{
    ChallengeKind, FreeloaderCtx, GameError, PirateCtx, QcpAdversary, QcpChallenge, QcpFreeloader, QcpShare,
    RandomInputSource,
};
use crate::qcp::{self, ProgramKind, ProtectedProgram};

fn boxed(programs: Vec<ProtectedProgram>, mut make: impl FnMut(usize) -> Box<dyn QcpFreeloader>) -> Vec<QcpShare> {
    programs.into_iter().enumerate().map(|(i, program)| QcpShare { program, freeloader: make(i) }).collect()
}

/// Forwards the `n` programs and `k` duds; every holder answers with its program.
#[derive(Debug, Clone, Copy, Default)]
pub struct HonestQcp;

struct HonestFreeloader;

impl QcpFreeloader for HonestFreeloader {
    fn respond(
        &mut self,
        program: &ProtectedProgram,
        ch: &mut QcpChallenge<'_>,
        ctx: &mut FreeloaderCtx<'_>,
    ) -> Result<bool, GameError> {
        match ch.kind() {
            ChallengeKind::Point(x) => ctx.eval(program, x),
            ChallengeKind::Flip(_) => {
                let (r, y) = ch.flip_query()?;
                Ok(y ^ ctx.eval(program, &r)?)
            }
            ChallengeKind::Lor(_) => {
                let (x0, _, y) = ch.lor_query()?;
                Ok(ctx.eval(program, &x0)? != y)
            }
        }
    }
}

impl QcpAdversary for HonestQcp {
    fn name(&self) -> String {
        "honest".into()
    }

    fn pirate(&self, programs: Vec<ProtectedProgram>, ctx: &mut PirateCtx<'_>) -> Result<Vec<QcpShare>, GameError> {
        let programs = ctx.pad_with_duds(programs)?;
        Ok(boxed(programs, |_| Box::new(HonestFreeloader)))
    }
}

/// Honest pirate whose freeloaders all answer `bit` without looking at anything.
#[derive(Debug, Clone, Copy)]
pub struct ConstantQcp {
    pub bit: bool,
}

struct ConstantFreeloader(bool);

impl QcpFreeloader for ConstantFreeloader {
    fn respond(
        &mut self,
        _: &ProtectedProgram,
        _: &mut QcpChallenge<'_>,
        _: &mut FreeloaderCtx<'_>,
    ) -> Result<bool, GameError> {
        Ok(self.0)
    }
}

impl QcpAdversary for ConstantQcp {
    fn name(&self) -> String {
        format!("constant:bit={}", u8::from(self.bit))
    }

    fn pirate(&self, programs: Vec<ProtectedProgram>, ctx: &mut PirateCtx<'_>) -> Result<Vec<QcpShare>, GameError> {
        let programs = ctx.pad_with_duds(programs)?;
        let bit = self.bit;
        Ok(boxed(programs, |_| Box::new(ConstantFreeloader(bit))))
    }
}

/// Honest pirate whose freeloaders evaluate and then negate.
#[derive(Debug, Clone, Copy, Default)]
pub struct NegatingQcp;

struct NegatingFreeloader;

impl QcpFreeloader for NegatingFreeloader {
    fn respond(
        &mut self,
        program: &ProtectedProgram,
        ch: &mut QcpChallenge<'_>,
        ctx: &mut FreeloaderCtx<'_>,
    ) -> Result<bool, GameError> {
        Ok(!HonestFreeloader.respond(program, ch, ctx)?)
    }
}

impl QcpAdversary for NegatingQcp {
    fn name(&self) -> String {
        "negating".into()
    }

    fn pirate(&self, programs: Vec<ProtectedProgram>, ctx: &mut PirateCtx<'_>) -> Result<Vec<QcpShare>, GameError> {
        let programs = ctx.pad_with_duds(programs)?;
        Ok(boxed(programs, |_| Box::new(NegatingFreeloader)))
    }
}

/// Splits the first program into its two halves and gives one to each of the
/// first two freeloaders. A half holder answers on inputs in its half of the
/// domain and guesses otherwise, spending up to `q` oracle queries to find
/// such an input.
#[derive(Debug, Clone, Copy)]
pub struct SplitFlipAttack {
    pub q: usize,
}

struct HalfFreeloader {
    q: usize,
}

fn in_half(program: &ProtectedProgram, x: &BitString) -> bool {
    match program.kind() {
        ProgramKind::Half { bit } => x.first() == Some(bit),
        ProgramKind::Dud => false,
        _ => true,
    }
}

impl QcpFreeloader for HalfFreeloader {
    fn respond(
        &mut self,
        program: &ProtectedProgram,
        ch: &mut QcpChallenge<'_>,
        ctx: &mut FreeloaderCtx<'_>,
    ) -> Result<bool, GameError> {
        match ch.kind() {
            ChallengeKind::Point(x) => {
                let x = x.clone();
                if in_half(program, &x) {
                    return ctx.eval(program, &x);
                }
            }
            ChallengeKind::Flip(_) => {
                for _ in 0..self.q {
                    let (r, y) = ch.flip_query()?;
                    if in_half(program, &r) {
                        return Ok(y ^ ctx.eval(program, &r)?);
                    }
                }
            }
            ChallengeKind::Lor(_) => {
                for _ in 0..self.q {
                    let (x0, x1, y) = ch.lor_query()?;
                    if in_half(program, &x0) {
                        return Ok(ctx.eval(program, &x0)? != y);
                    }
                    if in_half(program, &x1) {
                        return Ok(ctx.eval(program, &x1)? == y);
                    }
                }
            }
        }
        Ok(ctx.rng.gen())
    }
}

impl QcpAdversary for SplitFlipAttack {
    fn name(&self) -> String {
        format!("split_flip:q={}", self.q)
    }

    fn pirate(&self, mut programs: Vec<ProtectedProgram>, ctx: &mut PirateCtx<'_>) -> Result<Vec<QcpShare>, GameError> {
        if ctx.k == 0 || programs.is_empty() {
            let programs = ctx.pad_with_duds(programs)?;
            return Ok(boxed(programs, |_| Box::new(HalfFreeloader { q: self.q })));
        }
        let first = programs.remove(0);
        let (h0, h1) = qcp::split_pair(ctx.ledger, first).map_err(|rej| GameError::Qcp(rej.error))?;
        let mut out = vec![h0, h1];
        out.extend(programs);
        let out = ctx.pad_with_duds(out)?;
        let q = self.q;
        Ok(boxed(out, |_| Box::new(HalfFreeloader { q })))
    }
}

/// Turns a WEAK-QCP adversary into a FLIP-QCP one: each freeloader makes one
/// flip query `(r, y)`, asks the inner freeloader for `f(r)` and answers `y ⊕ f(r)`.
pub struct FlipToWeak<A> {
    pub inner: A,
}

struct FlipToWeakFreeloader(Box<dyn QcpFreeloader>);

impl QcpFreeloader for FlipToWeakFreeloader {
    fn respond(
        &mut self,
        program: &ProtectedProgram,
        ch: &mut QcpChallenge<'_>,
        ctx: &mut FreeloaderCtx<'_>,
    ) -> Result<bool, GameError> {
        if !matches!(ch.kind(), ChallengeKind::Flip(_)) {
            return self.0.respond(program, ch, ctx);
        }
        let (r, y) = ch.flip_query()?;
        let mut weak = ch.replace_kind(ChallengeKind::Point(r));
        Ok(y ^ self.0.respond(program, &mut weak, ctx)?)
    }
}

impl<A: QcpAdversary> QcpAdversary for FlipToWeak<A> {
    fn name(&self) -> String {
        format!("flip_to_weak({})", self.inner.name())
    }

    fn pirate(&self, programs: Vec<ProtectedProgram>, ctx: &mut PirateCtx<'_>) -> Result<Vec<QcpShare>, GameError> {
        let shares = self.inner.pirate(programs, ctx)?;
        Ok(shares
            .into_iter()
            .map(|s| QcpShare { program: s.program, freeloader: Box::new(FlipToWeakFreeloader(s.freeloader)) })
            .collect())
    }
}

/// Turns a WEAK-QCP adversary into a LoR-QCP one: one query `(x0, x1, y)`, and
/// the answer is 0 exactly when the inner freeloader's value at `x0` equals `y`.
pub struct LorToWeak<A> {
    pub inner: A,
}

struct LorToWeakFreeloader(Box<dyn QcpFreeloader>);

impl QcpFreeloader for LorToWeakFreeloader {
    fn respond(
        &mut self,
        program: &ProtectedProgram,
        ch: &mut QcpChallenge<'_>,
        ctx: &mut FreeloaderCtx<'_>,
    ) -> Result<bool, GameError> {
        if !matches!(ch.kind(), ChallengeKind::Lor(_)) {
            return self.0.respond(program, ch, ctx);
        }
        let (x0, _, y) = ch.lor_query()?;
        let mut weak = ch.replace_kind(ChallengeKind::Point(x0));
        Ok(self.0.respond(program, &mut weak, ctx)? != y)
    }
}

impl<A: QcpAdversary> QcpAdversary for LorToWeak<A> {
    fn name(&self) -> String {
        format!("lor_to_weak({})", self.inner.name())
    }

    fn pirate(&self, programs: Vec<ProtectedProgram>, ctx: &mut PirateCtx<'_>) -> Result<Vec<QcpShare>, GameError> {
        let shares = self.inner.pirate(programs, ctx)?;
        Ok(shares
            .into_iter()
            .map(|s| QcpShare { program: s.program, freeloader: Box::new(LorToWeakFreeloader(s.freeloader)) })
            .collect())
    }
}

/// Pre-evaluated `(r, f(r))` pairs served in order in place of a random-input oracle.
pub struct ListSource {
    entries: std::vec::IntoIter<(BitString, bool)>,
}

impl ListSource {
    pub fn new(entries: Vec<(BitString, bool)>) -> Self {
        ListSource { entries: entries.into_iter() }
    }
}

impl RandomInputSource for ListSource {
    fn query(&mut self) -> Result<(BitString, bool), GameError> {
        self.entries.next().ok_or(GameError::ListExhausted)
    }
}

/// Removes the random-input oracle from an adversary: before the inner pirate
/// runs, the first program is evaluated on `q` uniform points per freeloader
/// and each freeloader's random-input queries are answered from its list.
pub struct RiaPirateWrapper<A> {
    pub inner: A,
    pub q: usize,
}

struct ListFreeloader {
    inner: Box<dyn QcpFreeloader>,
    list: ListSource,
}

impl QcpFreeloader for ListFreeloader {
    fn respond(
        &mut self,
        program: &ProtectedProgram,
        ch: &mut QcpChallenge<'_>,
        ctx: &mut FreeloaderCtx<'_>,
    ) -> Result<bool, GameError> {
        let mut with_list = ch.substitute_random_inputs(&mut self.list);
        self.inner.respond(program, &mut with_list, ctx)
    }
}

impl<A: QcpAdversary> QcpAdversary for RiaPirateWrapper<A> {
    fn name(&self) -> String {
        format!("ria_pirate:q={}({})", self.q, self.inner.name())
    }

    fn pirate(&self, programs: Vec<ProtectedProgram>, ctx: &mut PirateCtx<'_>) -> Result<Vec<QcpShare>, GameError> {
        let first = programs.first().ok_or_else(|| GameError::InvalidParams("no program to pre-evaluate".into()))?;
        let len = first.input_len().unwrap_or(ctx.input_len);
        let mut rng = ctx.aux_rng("ria_list");
        let mut lists = Vec::with_capacity(ctx.players());
        for _ in 0..ctx.players() {
            let mut list = Vec::with_capacity(self.q);
            for _ in 0..self.q {
                let r = BitString::random(len, &mut rng);
                let y = ctx.eval(first, &r)?;
                list.push((r, y));
            }
            lists.push(ListSource::new(list));
        }
        let shares = self.inner.pirate(programs, ctx)?;
        Ok(shares
            .into_iter()
            .zip(lists)
            .map(|(s, list)| QcpShare {
                program: s.program,
                freeloader: Box::new(ListFreeloader { inner: s.freeloader, list }),
            })
            .collect())
    }
}

/// Honest pirate whose freeloaders first collect `q` random-input pairs and
/// answer from that table when the challenge point is in it.
#[derive(Debug, Clone, Copy)]
pub struct RiaLookup {
    pub q: usize,
}

struct LookupFreeloader {
    q: usize,
}

impl LookupFreeloader {
    fn value(
        table: &[(BitString, bool)],
        program: &ProtectedProgram,
        x: &BitString,
        ctx: &mut FreeloaderCtx<'_>,
    ) -> Result<bool, GameError> {
        match table.iter().find(|(r, _)| r == x) {
            Some((_, y)) => Ok(*y),
            None => ctx.eval(program, x),
        }
    }
}

impl QcpFreeloader for LookupFreeloader {
    fn respond(
        &mut self,
        program: &ProtectedProgram,
        ch: &mut QcpChallenge<'_>,
        ctx: &mut FreeloaderCtx<'_>,
    ) -> Result<bool, GameError> {
        let mut table = Vec::with_capacity(self.q);
        if ch.has_random_inputs() {
            for _ in 0..self.q {
                table.push(ch.random_input()?);
            }
        }
        match ch.kind() {
            ChallengeKind::Point(x) => {
                let x = x.clone();
                Self::value(&table, program, &x, ctx)
            }
            ChallengeKind::Flip(_) => {
                let (r, y) = ch.flip_query()?;
                Ok(y ^ Self::value(&table, program, &r, ctx)?)
            }
            ChallengeKind::Lor(_) => {
                let (x0, _, y) = ch.lor_query()?;
                Ok(Self::value(&table, program, &x0, ctx)? != y)
            }
        }
    }
}

impl QcpAdversary for RiaLookup {
    fn name(&self) -> String {
        format!("ria_lookup:q={}", self.q)
    }

    fn pirate(&self, programs: Vec<ProtectedProgram>, ctx: &mut PirateCtx<'_>) -> Result<Vec<QcpShare>, GameError> {
        let programs = ctx.pad_with_duds(programs)?;
        let q = self.q;
        Ok(boxed(programs, |_| Box::new(LookupFreeloader { q })))
    }
}
