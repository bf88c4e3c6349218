//! Named adversaries, attacks and reduction wrappers, and a string registry
//! for selecting them (`split_flip:q=2`, `flip_to_weak(honest)`).

mod classical_adv;
mod qcp_adv;
mod simdec;
mod ud_adv;

use std::collections::BTreeMap;

pub use classical_adv::{
    hybrid_output_rates, AlwaysZeroLorCpa, BitFlipForger, HalfTable, MajorityDistinguisher, Memorizer,
    NoQueryLearner, ReadBetaLorCpa, ReplayForger, TrivialForger, UlFlipForward, UlFlipHybrid, WprfFromLorCpa,
    ZeroQueryDistinguisher, MAX_TABLE_INPUT_LEN,
};
pub use qcp_adv::{
    ConstantQcp, FlipToWeak, HonestQcp, ListSource, LorToWeak, NegatingQcp, RiaLookup, RiaPirateWrapper,
    SplitFlipAttack,
};
pub use simdec::SimulatedDecryptionOracle;
pub use ud_adv::{
    CcaAttack, CcaAttackKind, HonestUd, MalleabilityInd, NoisyReader, OracleProbe, RandomGuessInd, SplitUd2Attack,
    UdToInd,
};

use crate::games::{
    AdvCtx, EvalOracle, FlipUlGuesser, FlipUlLearner, Forger, GameError, IndAdversary, IndChoice,
    IndCtx, LorCpaAdversary, LorCpaChallenger, PirateCtx, QcpAdversary, QcpShare, RandomInputSource, SignOracle,
    UdAdversary, UdPirateCtx, UdShare, UlGuesser, UlLearner, WprfDistinguisher,
};
use crate::qcp::ProtectedProgram;
use crate::schemes::Decryptor;
use crate::signatures::{PublicKey, Signature};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("unknown adversary `{0}`")]
    Unknown(String),
    #[error("bad parameter in `{spec}`: {reason}")]
    BadParam { spec: String, reason: String },
}

/// A parsed adversary spec: `name[:key=val,...][(inner)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversarySpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub inner: Option<Box<AdversarySpec>>,
}

impl AdversarySpec {
    pub fn parse(spec: &str) -> Result<Self, RegistryError> {
        let spec = spec.trim();
        let bad = |reason: &str| RegistryError::BadParam { spec: spec.to_string(), reason: reason.to_string() };
        let (head, inner) = match spec.find('(') {
            Some(open) => {
                let body = spec[open + 1..].strip_suffix(')').ok_or_else(|| bad("unbalanced parenthesis"))?;
                (&spec[..open], Some(Box::new(AdversarySpec::parse(body)?)))
            }
            None => (spec, None),
        };
        let (name, rest) = head.split_once(':').unwrap_or((head, ""));
        if name.is_empty() {
            return Err(bad("empty name"));
        }
        let mut params = BTreeMap::new();
        for kv in rest.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(AdversarySpec { name: name.to_string(), params, inner })
    }

    fn raw(&self) -> String {
        self.name.clone()
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, RegistryError> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| RegistryError::BadParam {
                spec: self.raw(),
                reason: format!("cannot parse {key}={v}"),
            }),
        }
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool, RegistryError> {
        match self.params.get(key).map(String::as_str) {
            None => Ok(default),
            Some("1") | Some("true") => Ok(true),
            Some("0") | Some("false") => Ok(false),
            Some(v) => Err(RegistryError::BadParam { spec: self.raw(), reason: format!("{key}={v} is not a bit") }),
        }
    }

    fn inner(&self) -> Result<&AdversarySpec, RegistryError> {
        self.inner.as_deref().ok_or_else(|| RegistryError::BadParam {
            spec: self.raw(),
            reason: "wrapper needs an inner adversary in parentheses".into(),
        })
    }

    fn no_inner(&self) -> Result<(), RegistryError> {
        match self.inner {
            Some(_) => Err(RegistryError::BadParam { spec: self.raw(), reason: "takes no inner adversary".into() }),
            None => Ok(()),
        }
    }
}

/// Names accepted by each registry lookup, for `udlab list`.
pub const QCP_ADVERSARIES: &[&str] =
    &["honest", "constant:bit=B", "negating", "split_flip:q=Q", "ria_lookup:q=Q", "flip_to_weak(A)", "lor_to_weak(A)", "ria_pirate:q=Q(A)"];
pub const UD_ADVERSARIES: &[&str] =
    &["honest", "split_ud2", "malleability", "truncate", "rearrange", "splice", "oracle_probe", "ud_to_ind(I)"];
pub const IND_ADVERSARIES: &[&str] = &["random", "malleability", "noisy_reader:accuracy=P"];
pub const LOR_CPA_ADVERSARIES: &[&str] = &["always_zero", "read_beta", "wprf_from_lorcpa(D)"];
pub const WPRF_DISTINGUISHERS: &[&str] = &["majority:queries=Q", "zero_query"];
pub const UL_LEARNERS: &[&str] = &["memorizer", "no_query", "ul_flip_hybrid:q=Q(L)"];
pub const FLIP_UL_LEARNERS: &[&str] = &["half_table:q=Q", "ul_flip_forward(L)"];
pub const FORGERS: &[&str] = &["replay", "trivial", "bitflip"];

macro_rules! forward_boxed {
    ($tr:ident { $($body:tt)* }) => {
        impl $tr for Box<dyn $tr> { $($body)* }
        impl $tr for &dyn $tr { $($body)* }
    };
}

forward_boxed!(QcpAdversary {
    fn name(&self) -> String { (**self).name() }
    fn pirate(&self, programs: Vec<ProtectedProgram>, ctx: &mut PirateCtx<'_>) -> Result<Vec<QcpShare>, GameError> {
        (**self).pirate(programs, ctx)
    }
});

forward_boxed!(UdAdversary {
    fn name(&self) -> String { (**self).name() }
    fn pirate(&self, decryptors: Vec<Decryptor>, ctx: &mut UdPirateCtx<'_>) -> Result<Vec<UdShare>, GameError> {
        (**self).pirate(decryptors, ctx)
    }
});

forward_boxed!(IndAdversary {
    fn name(&self) -> String { (**self).name() }
    fn choose(&self, ctx: &mut IndCtx<'_>) -> Result<IndChoice, GameError> { (**self).choose(ctx) }
});

forward_boxed!(LorCpaAdversary {
    fn name(&self) -> String { (**self).name() }
    fn play(&self, challenger: &mut LorCpaChallenger, ctx: &mut AdvCtx<'_>) -> Result<bool, GameError> {
        (**self).play(challenger, ctx)
    }
});

forward_boxed!(WprfDistinguisher {
    fn name(&self) -> String { (**self).name() }
    fn distinguish(&self, oracle: &mut dyn RandomInputSource, ctx: &mut AdvCtx<'_>) -> Result<bool, GameError> {
        (**self).distinguish(oracle, ctx)
    }
});

forward_boxed!(UlLearner {
    fn name(&self) -> String { (**self).name() }
    fn learn(&self, oracle: &mut EvalOracle<'_>, ctx: &mut AdvCtx<'_>) -> Result<Box<dyn UlGuesser>, GameError> {
        (**self).learn(oracle, ctx)
    }
});

forward_boxed!(FlipUlLearner {
    fn name(&self) -> String { (**self).name() }
    fn learn(&self, oracle: &mut EvalOracle<'_>, ctx: &mut AdvCtx<'_>) -> Result<Box<dyn FlipUlGuesser>, GameError> {
        (**self).learn(oracle, ctx)
    }
});

forward_boxed!(Forger {
    fn name(&self) -> String { (**self).name() }
    fn forge(
        &self,
        pk: &PublicKey,
        oracle: &mut SignOracle<'_>,
        ctx: &mut AdvCtx<'_>,
    ) -> Result<Option<(Vec<u8>, Signature)>, GameError> {
        (**self).forge(pk, oracle, ctx)
    }
});

fn unknown(spec: &AdversarySpec) -> RegistryError {
    RegistryError::Unknown(spec.name.clone())
}

pub fn qcp_adversary(spec: &str) -> Result<Box<dyn QcpAdversary>, RegistryError> {
    build_qcp(&AdversarySpec::parse(spec)?)
}

fn build_qcp(s: &AdversarySpec) -> Result<Box<dyn QcpAdversary>, RegistryError> {
    Ok(match s.name.as_str() {
        "flip_to_weak" => Box::new(FlipToWeak { inner: build_qcp(s.inner()?)? }),
        "lor_to_weak" => Box::new(LorToWeak { inner: build_qcp(s.inner()?)? }),
        "ria_pirate" => Box::new(RiaPirateWrapper { inner: build_qcp(s.inner()?)?, q: s.get("q", 1)? }),
        name => {
            s.no_inner()?;
            match name {
                "honest" => Box::new(HonestQcp),
                "constant" => Box::new(ConstantQcp { bit: s.flag("bit", false)? }),
                "negating" => Box::new(NegatingQcp),
                "split_flip" => Box::new(SplitFlipAttack { q: s.get("q", 2)? }),
                "ria_lookup" => Box::new(RiaLookup { q: s.get("q", 1)? }),
                _ => return Err(unknown(s)),
            }
        }
    })
}

pub fn ud_adversary(spec: &str) -> Result<Box<dyn UdAdversary>, RegistryError> {
    let s = AdversarySpec::parse(spec)?;
    if s.name == "ud_to_ind" {
        return Ok(Box::new(UdToInd { inner: build_ind(s.inner()?)? }));
    }
    s.no_inner()?;
    Ok(match s.name.as_str() {
        "honest" => Box::new(HonestUd),
        "split_ud2" => Box::new(SplitUd2Attack),
        "malleability" => Box::new(CcaAttack { kind: CcaAttackKind::Malleability }),
        "truncate" => Box::new(CcaAttack { kind: CcaAttackKind::Truncate }),
        "rearrange" => Box::new(CcaAttack { kind: CcaAttackKind::Rearrange }),
        "splice" => Box::new(CcaAttack { kind: CcaAttackKind::Splice }),
        "oracle_probe" => Box::new(OracleProbe),
        _ => return Err(unknown(&s)),
    })
}

pub fn ind_adversary(spec: &str) -> Result<Box<dyn IndAdversary>, RegistryError> {
    build_ind(&AdversarySpec::parse(spec)?)
}

fn build_ind(s: &AdversarySpec) -> Result<Box<dyn IndAdversary>, RegistryError> {
    s.no_inner()?;
    Ok(match s.name.as_str() {
        "random" => Box::new(RandomGuessInd),
        "malleability" => Box::new(MalleabilityInd),
        "noisy_reader" => {
            let accuracy: f64 = s.get("accuracy", 0.8)?;
            if !(0.0..=1.0).contains(&accuracy) {
                return Err(RegistryError::BadParam { spec: s.raw(), reason: "accuracy must be in [0, 1]".into() });
            }
            Box::new(NoisyReader { accuracy })
        }
        _ => return Err(unknown(s)),
    })
}

pub fn lor_cpa_adversary(spec: &str) -> Result<Box<dyn LorCpaAdversary>, RegistryError> {
    let s = AdversarySpec::parse(spec)?;
    if s.name == "wprf_from_lorcpa" {
        return Ok(Box::new(WprfFromLorCpa { inner: build_wprf(s.inner()?)? }));
    }
    s.no_inner()?;
    Ok(match s.name.as_str() {
        "always_zero" => Box::new(AlwaysZeroLorCpa),
        "read_beta" => Box::new(ReadBetaLorCpa),
        _ => return Err(unknown(&s)),
    })
}

pub fn wprf_distinguisher(spec: &str) -> Result<Box<dyn WprfDistinguisher>, RegistryError> {
    build_wprf(&AdversarySpec::parse(spec)?)
}

fn build_wprf(s: &AdversarySpec) -> Result<Box<dyn WprfDistinguisher>, RegistryError> {
    s.no_inner()?;
    Ok(match s.name.as_str() {
        "majority" => Box::new(MajorityDistinguisher { queries: s.get("queries", 32)? }),
        "zero_query" => Box::new(ZeroQueryDistinguisher),
        _ => return Err(unknown(s)),
    })
}

pub fn ul_learner(spec: &str) -> Result<Box<dyn UlLearner>, RegistryError> {
    build_ul(&AdversarySpec::parse(spec)?)
}

fn build_ul(s: &AdversarySpec) -> Result<Box<dyn UlLearner>, RegistryError> {
    if s.name == "ul_flip_hybrid" {
        return Ok(Box::new(UlFlipHybrid { inner: build_flip_ul(s.inner()?)?, q: s.get("q", 1)? }));
    }
    s.no_inner()?;
    Ok(match s.name.as_str() {
        "memorizer" => Box::new(Memorizer),
        "no_query" => Box::new(NoQueryLearner),
        _ => return Err(unknown(s)),
    })
}

pub fn flip_ul_learner(spec: &str) -> Result<Box<dyn FlipUlLearner>, RegistryError> {
    build_flip_ul(&AdversarySpec::parse(spec)?)
}

fn build_flip_ul(s: &AdversarySpec) -> Result<Box<dyn FlipUlLearner>, RegistryError> {
    if s.name == "ul_flip_forward" {
        return Ok(Box::new(UlFlipForward { inner: build_ul(s.inner()?)? }));
    }
    s.no_inner()?;
    Ok(match s.name.as_str() {
        "half_table" => Box::new(HalfTable { q: s.get("q", 1)? }),
        _ => return Err(unknown(s)),
    })
}

pub fn forger(spec: &str) -> Result<Box<dyn Forger>, RegistryError> {
    let s = AdversarySpec::parse(spec)?;
    s.no_inner()?;
    Ok(match s.name.as_str() {
        "replay" => Box::new(ReplayForger),
        "trivial" => Box::new(TrivialForger),
        "bitflip" => Box::new(BitFlipForger),
        _ => return Err(unknown(&s)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_specs() {
        let s = AdversarySpec::parse("ria_pirate:q=3(split_flip:q=2)").unwrap();
        assert_eq!(s.name, "ria_pirate");
        assert_eq!(s.params["q"], "3");
        let inner = s.inner.unwrap();
        assert_eq!(inner.name, "split_flip");
        assert_eq!(inner.params["q"], "2");
    }

    #[test]
    fn registry_round_trips_names() {
        assert_eq!(qcp_adversary("split_flip:q=2").unwrap().name(), "split_flip:q=2");
        assert_eq!(qcp_adversary("flip_to_weak(honest)").unwrap().name(), "flip_to_weak(honest)");
        assert_eq!(ud_adversary("ud_to_ind(random)").unwrap().name(), "ud_to_ind(random)");
        assert_eq!(flip_ul_learner("ul_flip_forward(memorizer)").unwrap().name(), "ul_flip_forward(memorizer)");
    }

    #[test]
    fn unknown_and_malformed_specs_are_rejected() {
        assert!(matches!(qcp_adversary("nope"), Err(RegistryError::Unknown(_))));
        assert!(matches!(qcp_adversary("split_flip:q=x"), Err(RegistryError::BadParam { .. })));
        assert!(matches!(qcp_adversary("flip_to_weak"), Err(RegistryError::BadParam { .. })));
        assert!(matches!(qcp_adversary("honest(honest)"), Err(RegistryError::BadParam { .. })));
        assert!(matches!(AdversarySpec::parse("a(b"), Err(RegistryError::BadParam { .. })));
    }
}
