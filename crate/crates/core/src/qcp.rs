//! Copy-protection backends. A [`ProtectedProgram`] is a linear resource: it is
//! not `Clone`, every transformation consumes its input, and a
//! [`ResourceLedger`] tracks which handles are live together with their provenance.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::bbf::{BbfDescriptor, BbfError, BbfFamily};
use crate::bits::BitString;
use crate::quantum::{self, QuantumError, Statevector, Subspace, MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendTag {
    IdealToken,
    SplitPair,
    SubspaceModel,
}

impl BackendTag {
    pub const ALL: [BackendTag; 3] = [BackendTag::IdealToken, BackendTag::SplitPair, BackendTag::SubspaceModel];

    pub fn name(self) -> &'static str {
        match self {
            BackendTag::IdealToken => "ideal_token",
            BackendTag::SplitPair => "split_pair",
            BackendTag::SubspaceModel => "subspace_model",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ideal_token" | "IdealToken" => Some(BackendTag::IdealToken),
            "split_pair" | "SplitPair" => Some(BackendTag::SplitPair),
            "subspace_model" | "SubspaceModel" => Some(BackendTag::SubspaceModel),
            _ => None,
        }
    }
}

impl fmt::Display for BackendTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResourceId(pub u64);

impl fmt::Display for ResourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProgramKind {
    Ideal,
    SplitPair,
    Half { bit: bool },
    Subspace,
    Dud,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QcpError {
    #[error("handle {0} is not live")]
    DeadHandle(ResourceId),
    #[error("operation needs backend {expected}, program is {got:?}")]
    BackendMismatch { expected: BackendTag, got: ProgramKind },
    #[error("input is outside the domain of this half-program")]
    OutOfDomain,
    #[error("input length {got} does not match program length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{0} qubits exceeds the simulator limit")]
    DimensionTooLarge(usize),
    #[error("cannot distribute {given} programs into {count} slots")]
    InvalidCount { given: usize, count: usize },
    #[error(transparent)]
    Bbf(#[from] BbfError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

#[derive(Debug, Clone, Serialize)]
struct Record {
    id: ResourceId,
    kind: ProgramKind,
    parent: Option<ResourceId>,
    live: bool,
}

/// Live-set and provenance log for protected programs.
#[derive(Debug, Default, Clone)]
pub struct ResourceLedger {
    next: u64,
    live: BTreeSet<ResourceId>,
    records: BTreeMap<ResourceId, Record>,
}

impl ResourceLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn live_count(&self) -> usize {
        self.live.len()
    }

    pub fn is_live(&self, id: ResourceId) -> bool {
        self.live.contains(&id)
    }

    pub fn live_ids(&self) -> impl Iterator<Item = ResourceId> + '_ {
        self.live.iter().copied()
    }

    pub fn parent_of(&self, id: ResourceId) -> Option<ResourceId> {
        self.records.get(&id).and_then(|r| r.parent)
    }

    pub fn created(&self) -> usize {
        self.records.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "live": self.live.iter().map(|id| id.0).collect::<Vec<_>>(),
            "records": self.records.values().collect::<Vec<_>>(),
        })
    }

    fn register(&mut self, kind: ProgramKind, parent: Option<ResourceId>) -> ResourceId {
        let id = ResourceId(self.next);
        self.next += 1;
        self.live.insert(id);
        self.records.insert(id, Record { id, kind, parent, live: true });
        id
    }

    fn retire(&mut self, id: ResourceId) -> Result<(), QcpError> {
        if !self.live.remove(&id) {
            return Err(QcpError::DeadHandle(id));
        }
        if let Some(r) = self.records.get_mut(&id) {
            r.live = false;
        }
        Ok(())
    }

    fn check_live(&self, id: ResourceId) -> Result<(), QcpError> {
        if self.is_live(id) {
            Ok(())
        } else {
            Err(QcpError::DeadHandle(id))
        }
    }
}

struct SubspacePayload {
    f: BbfDescriptor,
    subspace: Subspace,
    dual: Subspace,
    state: Statevector,
}

enum Payload {
    Ideal(BbfDescriptor),
    Pair(BbfDescriptor),
    Half { bit: bool, f: BbfDescriptor, input_len: usize },
    Subspace(Box<SubspacePayload>),
    Dud(Cell<u64>),
}

/// A sealed program. Not `Clone`; moving it is the only way to hand it on.
pub struct ProtectedProgram {
    id: ResourceId,
    payload: Payload,
}

impl fmt::Debug for ProtectedProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProtectedProgram").field("id", &self.id).field("kind", &self.kind()).finish()
    }
}

impl ProtectedProgram {
    pub fn id(&self) -> ResourceId {
        self.id
    }

    pub fn kind(&self) -> ProgramKind {
        match &self.payload {
            Payload::Ideal(_) => ProgramKind::Ideal,
            Payload::Pair(_) => ProgramKind::SplitPair,
            Payload::Half { bit, .. } => ProgramKind::Half { bit: *bit },
            Payload::Subspace(_) => ProgramKind::Subspace,
            Payload::Dud(_) => ProgramKind::Dud,
        }
    }

    pub fn is_dud(&self) -> bool {
        matches!(self.payload, Payload::Dud(_))
    }

    /// Input length the program answers on, if it has one.
    pub fn input_len(&self) -> Option<usize> {
        match &self.payload {
            Payload::Ideal(f) | Payload::Pair(f) => Some(f.input_len()),
            Payload::Half { input_len, .. } => Some(*input_len),
            Payload::Subspace(p) => Some(p.f.input_len()),
            Payload::Dud(_) => None,
        }
    }
}

fn splitmix(state: &Cell<u64>) -> u64 {
    let s = state.get().wrapping_add(0x9e37_79b9_7f4a_7c15);
    state.set(s);
    let mut z = s;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn protect<R: RngCore + ?Sized>(
    backend: BackendTag,
    f: &BbfDescriptor,
    ledger: &mut ResourceLedger,
    rng: &mut R,
) -> Result<ProtectedProgram, QcpError> {
    let payload = match backend {
        BackendTag::IdealToken => Payload::Ideal(f.clone()),
        BackendTag::SplitPair => {
            if f.family() != BbfFamily::Paired {
                return Err(QcpError::BackendMismatch { expected: BackendTag::SplitPair, got: ProgramKind::Ideal });
            }
            Payload::Pair(f.clone())
        }
        BackendTag::SubspaceModel => {
            let n = f.input_len();
            if n > MAX_QUBITS {
                return Err(QcpError::DimensionTooLarge(n));
            }
            let subspace = quantum::random_subspace(n, n / 2, rng)?;
            let state = quantum::subspace_state(&subspace)?;
            let dual = subspace.dual();
            Payload::Subspace(Box::new(SubspacePayload { f: f.clone(), subspace, dual, state }))
        }
    };
    let program = ProtectedProgram { id: ResourceId(0), payload };
    let id = ledger.register(program.kind(), None);
    Ok(ProtectedProgram { id, ..program })
}

/// Samples the function a backend protects: a pair of `family` members for
/// `SplitPair`, a member with at most 16 input bits for `SubspaceModel`, and a
/// plain member otherwise.
pub fn sample_function<R: RngCore + ?Sized>(
    backend: BackendTag,
    family: BbfFamily,
    lambda: usize,
    rng: &mut R,
) -> Result<BbfDescriptor, BbfError> {
    match backend {
        BackendTag::SplitPair => {
            let f0 = crate::bbf::sample(family, lambda, rng)?;
            let f1 = crate::bbf::sample(family, lambda, rng)?;
            crate::bbf::pair_compose(f0, f1)
        }
        BackendTag::SubspaceModel => crate::bbf::sample(family, lambda.min(MAX_QUBITS), rng),
        BackendTag::IdealToken => crate::bbf::sample(family, lambda, rng),
    }
}

/// Evaluates the program on `x`. Read-only with respect to the ledger.
pub fn eval_program(ledger: &ResourceLedger, p: &ProtectedProgram, x: &BitString) -> Result<bool, QcpError> {
    ledger.check_live(p.id)?;
    match &p.payload {
        Payload::Ideal(f) | Payload::Pair(f) => Ok(f.eval(x)?),
        Payload::Subspace(s) => Ok(s.f.eval(x)?),
        Payload::Half { bit, f, input_len } => {
            if x.len() != *input_len {
                return Err(QcpError::LengthMismatch { expected: *input_len, got: x.len() });
            }
            if x.get(0) != *bit {
                return Err(QcpError::OutOfDomain);
            }
            Ok(f.eval(&x.tail())?)
        }
        Payload::Dud(state) => Ok(splitmix(state) & 1 == 1),
    }
}

/// Refused split: the program is handed back untouched.
#[derive(Debug)]
pub struct Rejected {
    pub program: ProtectedProgram,
    pub error: QcpError,
}

/// Splits a `SplitPair` program into the half answering inputs `0||.` and the half answering `1||.`.
pub fn split_pair(
    ledger: &mut ResourceLedger,
    p: ProtectedProgram,
) -> Result<(ProtectedProgram, ProtectedProgram), Rejected> {
    if let Err(error) = ledger.check_live(p.id) {
        return Err(Rejected { program: p, error });
    }
    let f = match &p.payload {
        Payload::Pair(f) => f.clone(),
        _ => {
            let error = QcpError::BackendMismatch { expected: BackendTag::SplitPair, got: p.kind() };
            return Err(Rejected { program: p, error });
        }
    };
    let (f0, f1) = f.subs().expect("paired descriptor");
    let input_len = f.input_len();
    ledger.retire(p.id).expect("checked live");
    let mut half = |bit: bool, sub: &BbfDescriptor| {
        let id = ledger.register(ProgramKind::Half { bit }, Some(p.id));
        ProtectedProgram { id, payload: Payload::Half { bit, f: sub.clone(), input_len } }
    };
    Ok((half(false, f0), half(true, f1)))
}

/// A placeholder whose evaluation is an independent fair coin per call.
pub fn dud<R: RngCore + ?Sized>(ledger: &mut ResourceLedger, rng: &mut R) -> ProtectedProgram {
    let id = ledger.register(ProgramKind::Dud, None);
    ProtectedProgram { id, payload: Payload::Dud(Cell::new(rng.next_u64())) }
}

/// Pads `programs` with duds up to `count` after checking every handle is live and distinct.
pub fn distribute<R: RngCore + ?Sized>(
    ledger: &mut ResourceLedger,
    programs: Vec<ProtectedProgram>,
    count: usize,
    rng: &mut R,
) -> Result<Vec<ProtectedProgram>, QcpError> {
    if programs.len() > count {
        return Err(QcpError::InvalidCount { given: programs.len(), count });
    }
    let mut seen = BTreeSet::new();
    for p in &programs {
        ledger.check_live(p.id)?;
        if !seen.insert(p.id) {
            return Err(QcpError::DeadHandle(p.id));
        }
    }
    let mut out = programs;
    while out.len() < count {
        out.push(dud(ledger, rng));
    }
    Ok(out)
}

/// Consumes a program and marks it dead.
pub fn discard(ledger: &mut ResourceLedger, p: ProtectedProgram) -> Result<(), QcpError> {
    ledger.retire(p.id)
}

/// Projective check that a `SubspaceModel` state lies in `A` (computational
/// basis) or in `A⊥` (after `H^{⊗n}`). Honest states pass with certainty and are
/// left undisturbed.
pub fn probe_subspace<R: RngCore + ?Sized>(
    ledger: &ResourceLedger,
    p: &ProtectedProgram,
    dual_basis: bool,
    rng: &mut R,
) -> Result<bool, QcpError> {
    ledger.check_live(p.id)?;
    let Payload::Subspace(s) = &p.payload else {
        return Err(QcpError::BackendMismatch { expected: BackendTag::SubspaceModel, got: p.kind() });
    };
    if dual_basis {
        let x = quantum::measure_computational(&quantum::hadamard_all(&s.state), rng)?;
        Ok(s.dual.contains(&x)?)
    } else {
        let x = quantum::measure_computational(&s.state, rng)?;
        Ok(s.subspace.contains(&x)?)
    }
}

/// Test-only access to sealed internals.
#[cfg(any(test, feature = "test-hooks"))]
pub mod hooks {
    use super::*;

    pub fn unseal(p: &ProtectedProgram) -> Option<&BbfDescriptor> {
        match &p.payload {
            Payload::Ideal(f) | Payload::Pair(f) => Some(f),
            Payload::Half { f, .. } => Some(f),
            Payload::Subspace(s) => Some(&s.f),
            Payload::Dud(_) => None,
        }
    }

    /// A second handle carrying the same id, for exercising duplicate-handle checks.
    pub fn forge_alias(p: &ProtectedProgram) -> ProtectedProgram {
        let payload = match &p.payload {
            Payload::Ideal(f) => Payload::Ideal(f.clone()),
            Payload::Pair(f) => Payload::Pair(f.clone()),
            Payload::Half { bit, f, input_len } => Payload::Half { bit: *bit, f: f.clone(), input_len: *input_len },
            Payload::Subspace(s) => Payload::Subspace(Box::new(SubspacePayload {
                f: s.f.clone(),
                subspace: s.subspace.clone(),
                dual: s.dual.clone(),
                state: s.state.clone(),
            })),
            Payload::Dud(c) => Payload::Dud(Cell::new(c.get())),
        };
        ProtectedProgram { id: p.id, payload }
    }

    pub fn subspace_of(p: &ProtectedProgram) -> Option<&Subspace> {
        match &p.payload {
            Payload::Subspace(s) => Some(&s.subspace),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bbf::{pair_compose, sample};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn paired(lambda: usize, r: &mut ChaCha8Rng) -> BbfDescriptor {
        let f0 = sample(BbfFamily::KeyedMix, lambda, r).unwrap();
        let f1 = sample(BbfFamily::KeyedMix, lambda, r).unwrap();
        pair_compose(f0, f1).unwrap()
    }

    #[test]
    fn ideal_token_agrees_with_function() {
        let mut r = rng(1);
        let f = sample(BbfFamily::KeyedMix, 64, &mut r).unwrap();
        let mut ledger = ResourceLedger::new();
        let p = protect(BackendTag::IdealToken, &f, &mut ledger, &mut r).unwrap();
        for _ in 0..100 {
            let x = BitString::random(64, &mut r);
            assert_eq!(eval_program(&ledger, &p, &x).unwrap(), f.eval(&x).unwrap());
        }
        assert_eq!(ledger.live_count(), 1);
    }

    #[test]
    fn split_halves_answer_their_domain_only() {
        let mut r = rng(2);
        let f = paired(16, &mut r);
        let mut ledger = ResourceLedger::new();
        let p = protect(BackendTag::SplitPair, &f, &mut ledger, &mut r).unwrap();
        let parent = p.id();
        let (h0, h1) = split_pair(&mut ledger, p).unwrap();
        assert!(!ledger.is_live(parent));
        assert_eq!(ledger.live_count(), 2);
        assert_eq!(ledger.parent_of(h0.id()), Some(parent));
        let x = BitString::random(16, &mut r);
        assert_eq!(eval_program(&ledger, &h0, &x.prepend(false)).unwrap(), f.eval(&x.prepend(false)).unwrap());
        assert_eq!(eval_program(&ledger, &h1, &x.prepend(true)).unwrap(), f.eval(&x.prepend(true)).unwrap());
        assert_eq!(eval_program(&ledger, &h0, &x.prepend(true)), Err(QcpError::OutOfDomain));
    }

    #[test]
    fn split_refuses_non_pair_programs_and_returns_them() {
        let mut r = rng(3);
        let f = sample(BbfFamily::KeyedMix, 64, &mut r).unwrap();
        let mut ledger = ResourceLedger::new();
        let p = protect(BackendTag::IdealToken, &f, &mut ledger, &mut r).unwrap();
        let rejected = split_pair(&mut ledger, p).unwrap_err();
        assert!(matches!(rejected.error, QcpError::BackendMismatch { .. }));
        assert!(ledger.is_live(rejected.program.id()));
        assert_eq!(ledger.live_count(), 1);
    }

    #[test]
    fn split_pair_backend_needs_paired_descriptor() {
        let mut r = rng(4);
        let f = sample(BbfFamily::KeyedMix, 64, &mut r).unwrap();
        let err = protect(BackendTag::SplitPair, &f, &mut ResourceLedger::new(), &mut r).unwrap_err();
        assert!(matches!(err, QcpError::BackendMismatch { .. }));
    }

    #[test]
    fn subspace_model_limits_and_probes() {
        let mut r = rng(5);
        let big = sample(BbfFamily::KeyedMix, 17, &mut r).unwrap();
        let mut ledger = ResourceLedger::new();
        assert_eq!(
            protect(BackendTag::SubspaceModel, &big, &mut ledger, &mut r).unwrap_err(),
            QcpError::DimensionTooLarge(17)
        );
        let f = sample(BbfFamily::KeyedMix, 10, &mut r).unwrap();
        let p = protect(BackendTag::SubspaceModel, &f, &mut ledger, &mut r).unwrap();
        assert_eq!(hooks::subspace_of(&p).unwrap().dim(), 5);
        for _ in 0..20 {
            assert!(probe_subspace(&ledger, &p, false, &mut r).unwrap());
            assert!(probe_subspace(&ledger, &p, true, &mut r).unwrap());
        }
    }

    #[test]
    fn distribute_pads_with_duds_and_rejects_aliases() {
        let mut r = rng(6);
        let f = sample(BbfFamily::KeyedMix, 64, &mut r).unwrap();
        let mut ledger = ResourceLedger::new();
        let p = protect(BackendTag::IdealToken, &f, &mut ledger, &mut r).unwrap();
        let alias = hooks::forge_alias(&p);
        assert_eq!(
            distribute(&mut ledger, vec![p, alias], 3, &mut r).unwrap_err(),
            QcpError::DeadHandle(ResourceId(0))
        );
        let p = protect(BackendTag::IdealToken, &f, &mut ledger, &mut r).unwrap();
        let out = distribute(&mut ledger, vec![p], 3, &mut r).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out[1].is_dud() && out[2].is_dud());
    }

    #[test]
    fn dead_handles_cannot_be_evaluated() {
        let mut r = rng(7);
        let f = sample(BbfFamily::KeyedMix, 64, &mut r).unwrap();
        let mut ledger = ResourceLedger::new();
        let p = protect(BackendTag::IdealToken, &f, &mut ledger, &mut r).unwrap();
        let alias = hooks::forge_alias(&p);
        discard(&mut ledger, p).unwrap();
        let x = BitString::zeros(64);
        assert_eq!(eval_program(&ledger, &alias, &x), Err(QcpError::DeadHandle(ResourceId(0))));
        assert_eq!(ledger.live_count(), 0);
    }

    #[test]
    fn dud_outputs_are_roughly_fair() {
        let mut r = rng(8);
        let mut ledger = ResourceLedger::new();
        let d = dud(&mut ledger, &mut r);
        let x = BitString::zeros(8);
        let ones = (0..10_000).filter(|_| eval_program(&ledger, &d, &x).unwrap()).count();
        assert!((4_700..5_300).contains(&ones));
    }

    #[test]
    fn ledger_json_lists_provenance() {
        let mut r = rng(9);
        let f = paired(8, &mut r);
        let mut ledger = ResourceLedger::new();
        let p = protect(BackendTag::SplitPair, &f, &mut ledger, &mut r).unwrap();
        let _halves = split_pair(&mut ledger, p).unwrap();
        let j = ledger.to_json();
        assert_eq!(j["live"], serde_json::json!([1, 2]));
        assert_eq!(j["records"][1]["parent"], serde_json::json!(0));
    }
}
