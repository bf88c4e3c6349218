//! Known-answer vectors for the deterministic primitives. The checked-in files
//! under `kat/` are embedded at build time; `regenerate` rewrites them.

use std::fs;
use std::io;
use std::path::Path;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::bbf::BbfDescriptor;
use crate::bits::BitString;
use crate::games::TrialRng;
use crate::prf::SipKey;
use crate::qcp::BackendTag;
use crate::schemes::{self, Ciphertext};
use crate::signatures::{self, PublicKey, SigSchemeTag, Signature};

const BBF_JSON: &str = include_str!("../kat/bbf.json");
const SIG_JSON: &str = include_str!("../kat/sig.json");
const SCHEME_JSON: &str = include_str!("../kat/scheme.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BbfVector {
    pub key: String,
    pub input: BitString,
    pub output: bool,
    pub descriptor: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigVector {
    pub scheme: String,
    pub seed: String,
    pub message: String,
    pub public_key: String,
    pub signature: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeVector {
    pub scheme: String,
    pub rng_seed: u64,
    pub lambda: usize,
    pub message: BitString,
    pub ciphertext: String,
}

#[derive(Debug, thiserror::Error)]
pub enum KatError {
    #[error("{file}: vector {index} mismatch: {detail}")]
    Mismatch { file: &'static str, index: usize, detail: String },
    #[error("{file}: {source}")]
    Parse { file: &'static str, source: serde_json::Error },
    #[error("{0}")]
    Primitive(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn fail(e: impl std::fmt::Display) -> KatError {
    KatError::Primitive(e.to_string())
}

fn seed_key(i: u8) -> SipKey {
    std::array::from_fn(|j| i.wrapping_mul(31).wrapping_add(j as u8))
}

pub fn bbf_vectors() -> Result<Vec<BbfVector>, KatError> {
    let inputs = ["0", "1", "0110", "10000001", "1111111111111111", &"01".repeat(32)];
    let mut out = Vec::new();
    for (i, input) in inputs.iter().enumerate() {
        let key = seed_key(i as u8);
        let x: BitString = input.parse().map_err(fail)?;
        let f = BbfDescriptor::keyed_mix(key, x.len()).map_err(fail)?;
        out.push(BbfVector {
            key: hex::encode(key),
            output: f.eval(&x).map_err(fail)?,
            input: x,
            descriptor: hex::encode(f.to_bytes()),
        });
    }
    Ok(out)
}

pub fn sig_vectors() -> Result<Vec<SigVector>, KatError> {
    let mut out = Vec::new();
    for (i, scheme) in [SigSchemeTag::Malleable, SigSchemeTag::LamportMerkle].into_iter().enumerate() {
        for msg in [&b""[..], b"abc"] {
            let seed = seed_key(10 + i as u8);
            let kp = signatures::keypair_from_seed(scheme, seed);
            let sig = signatures::sign(&kp, msg).map_err(fail)?;
            out.push(SigVector {
                scheme: scheme.name().to_string(),
                seed: hex::encode(seed),
                message: hex::encode(msg),
                public_key: hex::encode(kp.public().as_bytes()),
                signature: hex::encode(sig.as_bytes()),
            });
        }
    }
    Ok(out)
}

const KAT_SCHEMES: [&str; 7] = [
    "ud1_cpa",
    "extend(ud1_cpa)",
    "decouple_bit(ud1_cpa)",
    "decouple_general(ud1_cpa)",
    "wrap_cca2_bit(decouple_bit(ud1_cpa),malleable)",
    "wrap_cca2_full(ud1_cpa,malleable)",
    "se_bbf",
];

pub fn scheme_vectors() -> Result<Vec<SchemeVector>, KatError> {
    let mut out = Vec::new();
    for (i, spec) in KAT_SCHEMES.iter().enumerate() {
        let scheme = schemes::parse_scheme(spec, BackendTag::IdealToken).map_err(fail)?;
        let bit_only = scheme.message_support() == schemes::MessageSupport::BitOnly;
        let message: BitString = if bit_only { "1" } else { "101" }.parse().map_err(fail)?;
        let rng_seed = 1000 + i as u64;
        let mut rng = TrialRng::seed_from_u64(rng_seed);
        let key = scheme.key_gen(16, &mut rng).map_err(fail)?;
        let ct = scheme.encrypt(&key, &message, &mut rng).map_err(fail)?;
        out.push(SchemeVector {
            scheme: spec.to_string(),
            rng_seed,
            lambda: 16,
            message,
            ciphertext: hex::encode(ct.to_bytes()),
        });
    }
    Ok(out)
}

fn compare<T: PartialEq + std::fmt::Debug>(file: &'static str, stored: &[T], fresh: &[T]) -> Result<usize, KatError> {
    if stored.len() != fresh.len() {
        return Err(KatError::Mismatch {
            file,
            index: stored.len().min(fresh.len()),
            detail: format!("{} stored vectors, {} computed", stored.len(), fresh.len()),
        });
    }
    for (index, (s, f)) in stored.iter().zip(fresh).enumerate() {
        if s != f {
            return Err(KatError::Mismatch { file, index, detail: format!("stored {s:?}, computed {f:?}") });
        }
    }
    Ok(stored.len())
}

fn parse<T: for<'de> Deserialize<'de>>(file: &'static str, text: &str) -> Result<Vec<T>, KatError> {
    serde_json::from_str(text).map_err(|source| KatError::Parse { file, source })
}

/// Checks that each stored vector also verifies through the public API, independent of recomputation.
fn cross_check(sigs: &[SigVector], cts: &[SchemeVector]) -> Result<(), KatError> {
    for (index, v) in sigs.iter().enumerate() {
        let scheme = SigSchemeTag::parse(&v.scheme).ok_or_else(|| fail(&v.scheme))?;
        let seed: SipKey = hex::decode(&v.seed).map_err(fail)?.try_into().map_err(|_| fail("seed length"))?;
        let pk: PublicKey = signatures::keypair_from_seed(scheme, seed).public().clone();
        let sig = Signature(hex::decode(&v.signature).map_err(fail)?);
        if hex::encode(pk.as_bytes()) != v.public_key || !signatures::verify(&pk, &hex::decode(&v.message).map_err(fail)?, &sig) {
            return Err(KatError::Mismatch { file: "sig.json", index, detail: "signature does not verify".into() });
        }
    }
    for (index, v) in cts.iter().enumerate() {
        let scheme = schemes::parse_scheme(&v.scheme, BackendTag::IdealToken).map_err(fail)?;
        let key = scheme.key_gen(v.lambda, &mut TrialRng::seed_from_u64(v.rng_seed)).map_err(fail)?;
        let ct = Ciphertext::from_bytes(&hex::decode(&v.ciphertext).map_err(fail)?).map_err(fail)?;
        if scheme.decrypt_key(&key, &ct).map_err(fail)? != Some(v.message.clone()) {
            return Err(KatError::Mismatch { file: "scheme.json", index, detail: "ciphertext does not decrypt".into() });
        }
    }
    Ok(())
}

/// Verifies the embedded vectors; returns the number checked.
pub fn verify_embedded() -> Result<usize, KatError> {
    verify_texts(BBF_JSON, SIG_JSON, SCHEME_JSON)
}

/// Verifies vector files in `dir` instead of the embedded copies.
pub fn verify_dir(dir: &Path) -> Result<usize, KatError> {
    let read = |f: &str| fs::read_to_string(dir.join(f));
    verify_texts(&read("bbf.json")?, &read("sig.json")?, &read("scheme.json")?)
}

fn verify_texts(bbf: &str, sig: &str, scheme: &str) -> Result<usize, KatError> {
    let sigs: Vec<SigVector> = parse("sig.json", sig)?;
    let cts: Vec<SchemeVector> = parse("scheme.json", scheme)?;
    cross_check(&sigs, &cts)?;
    Ok(compare("bbf.json", &parse::<BbfVector>("bbf.json", bbf)?, &bbf_vectors()?)?
        + compare("sig.json", &sigs, &sig_vectors()?)?
        + compare("scheme.json", &cts, &scheme_vectors()?)?)
}

/// Rewrites the three vector files in `dir`.
pub fn regenerate(dir: &Path) -> Result<(), KatError> {
    fs::create_dir_all(dir)?;
    let write = |name: &str, value: serde_json::Result<String>| -> Result<(), KatError> {
        fs::write(dir.join(name), value.map_err(fail)? + "\n")?;
        Ok(())
    };
    write("bbf.json", serde_json::to_string_pretty(&bbf_vectors()?))?;
    write("sig.json", serde_json::to_string_pretty(&sig_vectors()?))?;
    write("scheme.json", serde_json::to_string_pretty(&scheme_vectors()?))?;
    Ok(())
}

/// Default location of the checked-in vectors.
pub fn default_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/kat"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bbf::BbfFamily;

    #[test]
    fn embedded_vectors_match() {
        assert_eq!(verify_embedded().unwrap(), 6 + 4 + KAT_SCHEMES.len());
    }

    #[test]
    fn regenerated_files_verify_and_tampering_is_caught() {
        let dir = tempfile::tempdir().unwrap();
        regenerate(dir.path()).unwrap();
        assert!(verify_dir(dir.path()).is_ok());
        let path = dir.path().join("bbf.json");
        let mut v: Vec<BbfVector> = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        v[2].output = !v[2].output;
        fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
        assert!(matches!(verify_dir(dir.path()), Err(KatError::Mismatch { index: 2, .. })));
    }

    #[test]
    fn keyed_mix_family_tag_is_stable() {
        let v = &bbf_vectors().unwrap()[0];
        assert_eq!(hex::decode(&v.descriptor).unwrap()[0], BbfFamily::KeyedMix.tag());
    }
}
