//! Deterministic stateless signatures.
//!
//! `LamportMerkle` puts 2^10 seed-derived Lamport one-time keys under a Merkle
//! root. The leaf used for a message is a keyed hash of the message, so signing
//! needs no state and repeated signing of the same message is byte-identical.
//! `Malleable` is a deliberately broken control whose verifier accepts anything.
//!
//! Lamport signature layout: 2-byte LE leaf index, then 256 16-byte values where
//! slot `2i + d_i` holds the revealed secret for digest bit `d_i` and slot
//! `2i + 1 - d_i` holds the public value for the other bit, then the 10 sibling
//! hashes of the authentication path from leaf to root.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Mutex;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::prf::{sip128, sip64, SipKey};

pub const MERKLE_DEPTH: usize = 10;
pub const LEAF_COUNT: usize = 1 << MERKLE_DEPTH;
const DIGEST_BITS: usize = 128;
const SLOTS: usize = 2 * DIGEST_BITS;
pub const LAMPORT_SIGNATURE_LEN: usize = 2 + SLOTS * 16 + MERKLE_DEPTH * 16;

const F_KEY: SipKey = *b"udlab/lamport/f\0";
const LEAF_KEY: SipKey = *b"udlab/merkle/lf\0";
const NODE_KEY: SipKey = *b"udlab/merkle/nd\0";
const DIGEST_KEY: SipKey = *b"udlab/lamport/m\0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigSchemeTag {
    LamportMerkle,
    Malleable,
}

impl SigSchemeTag {
    pub fn name(self) -> &'static str {
        match self {
            SigSchemeTag::LamportMerkle => "lamport_merkle",
            SigSchemeTag::Malleable => "malleable",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lamport_merkle" | "LamportMerkle" | "lamport" => Some(SigSchemeTag::LamportMerkle),
            "malleable" | "Malleable" => Some(SigSchemeTag::Malleable),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SigError {
    #[error("all {0} one-time keys have been used")]
    CapacityExhausted(usize),
    #[error("security parameter must be positive")]
    InvalidLambda,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PublicKey {
    scheme: SigSchemeTag,
    bytes: Vec<u8>,
}

impl PublicKey {
    pub fn scheme(&self) -> SigSchemeTag {
        self.scheme
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Signature(pub Vec<u8>);

impl Signature {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature({} bytes)", self.0.len())
    }
}

pub struct SigKeyPair {
    scheme: SigSchemeTag,
    seed: SipKey,
    index_key: SipKey,
    public: PublicKey,
    // Heap layout: node 1 is the root, leaves sit at LEAF_COUNT..2*LEAF_COUNT.
    tree: Vec<[u8; 16]>,
    used: Mutex<BTreeSet<[u8; 16]>>,
}

impl fmt::Debug for SigKeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SigKeyPair").field("scheme", &self.scheme).field("public", &self.public).finish()
    }
}

impl SigKeyPair {
    pub fn public(&self) -> &PublicKey {
        &self.public
    }

    pub fn scheme(&self) -> SigSchemeTag {
        self.scheme
    }

    pub fn capacity(&self) -> usize {
        match self.scheme {
            SigSchemeTag::LamportMerkle => LEAF_COUNT,
            SigSchemeTag::Malleable => usize::MAX,
        }
    }

    /// Number of distinct messages signed so far.
    pub fn signed_count(&self) -> usize {
        self.used.lock().expect("signature log poisoned").len()
    }

    /// Leaf index a message is signed under.
    pub fn leaf_index(&self, msg: &[u8]) -> usize {
        (sip64(&self.index_key, msg) % LEAF_COUNT as u64) as usize
    }
}

/// All 256 secrets of one leaf, expanded from a per-leaf ChaCha8 stream.
fn leaf_secrets(seed: &SipKey, leaf: usize) -> Vec<[u8; 16]> {
    let mut stream_seed = [0u8; 32];
    stream_seed[..16].copy_from_slice(seed);
    stream_seed[16..18].copy_from_slice(&(leaf as u16).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(stream_seed);
    let mut out = vec![[0u8; 16]; SLOTS];
    for s in &mut out {
        rng.fill_bytes(s);
    }
    out
}

fn one_way(x: &[u8; 16]) -> [u8; 16] {
    sip128(&F_KEY, x)
}

fn leaf_hash(leaf: usize, publics: &[[u8; 16]]) -> [u8; 16] {
    let mut buf = Vec::with_capacity(2 + SLOTS * 16);
    buf.extend_from_slice(&(leaf as u16).to_le_bytes());
    for p in publics {
        buf.extend_from_slice(p);
    }
    sip128(&LEAF_KEY, &buf)
}

fn node_hash(left: &[u8; 16], right: &[u8; 16]) -> [u8; 16] {
    let mut buf = [0u8; 32];
    buf[..16].copy_from_slice(left);
    buf[16..].copy_from_slice(right);
    sip128(&NODE_KEY, &buf)
}

fn digest_bit(digest: &[u8; 16], i: usize) -> usize {
    ((digest[i / 8] >> (i % 8)) & 1) as usize
}

pub fn keygen<R: RngCore + ?Sized>(scheme: SigSchemeTag, lambda: usize, rng: &mut R) -> Result<SigKeyPair, SigError> {
    if lambda == 0 {
        return Err(SigError::InvalidLambda);
    }
    let mut seed = [0u8; 16];
    rng.fill_bytes(&mut seed);
    Ok(keypair_from_seed(scheme, seed))
}

/// Rebuilds the key pair determined by `seed`.
pub fn keypair_from_seed(scheme: SigSchemeTag, seed: SipKey) -> SigKeyPair {
    let index_key = sip128(&seed, b"leaf-index");
    let (public, tree) = match scheme {
        SigSchemeTag::Malleable => (PublicKey { scheme, bytes: vec![0x4d] }, Vec::new()),
        SigSchemeTag::LamportMerkle => {
            let mut tree = vec![[0u8; 16]; 2 * LEAF_COUNT];
            let mut publics = vec![[0u8; 16]; SLOTS];
            for leaf in 0..LEAF_COUNT {
                for (p, sk) in publics.iter_mut().zip(leaf_secrets(&seed, leaf)) {
                    *p = one_way(&sk);
                }
                tree[LEAF_COUNT + leaf] = leaf_hash(leaf, &publics);
            }
            for node in (1..LEAF_COUNT).rev() {
                tree[node] = node_hash(&tree[2 * node], &tree[2 * node + 1]);
            }
            (PublicKey { scheme, bytes: tree[1].to_vec() }, tree)
        }
    };
    SigKeyPair { scheme, seed, index_key, public, tree, used: Mutex::new(BTreeSet::new()) }
}

pub fn sign(kp: &SigKeyPair, msg: &[u8]) -> Result<Signature, SigError> {
    if kp.scheme == SigSchemeTag::Malleable {
        return Ok(Signature(vec![0]));
    }
    let digest = sip128(&DIGEST_KEY, msg);
    {
        let mut used = kp.used.lock().expect("signature log poisoned");
        if !used.contains(&digest) {
            if used.len() >= LEAF_COUNT {
                return Err(SigError::CapacityExhausted(LEAF_COUNT));
            }
            used.insert(digest);
        }
    }
    let leaf = kp.leaf_index(msg);
    let mut out = Vec::with_capacity(LAMPORT_SIGNATURE_LEN);
    out.extend_from_slice(&(leaf as u16).to_le_bytes());
    let secrets = leaf_secrets(&kp.seed, leaf);
    for i in 0..DIGEST_BITS {
        let d = digest_bit(&digest, i);
        for b in 0..2 {
            let sk = &secrets[2 * i + b];
            if b == d {
                out.extend_from_slice(sk);
            } else {
                out.extend_from_slice(&one_way(sk));
            }
        }
    }
    let mut node = LEAF_COUNT + leaf;
    while node > 1 {
        out.extend_from_slice(&kp.tree[node ^ 1]);
        node /= 2;
    }
    Ok(Signature(out))
}

pub fn verify(pk: &PublicKey, msg: &[u8], sig: &Signature) -> bool {
    match pk.scheme {
        SigSchemeTag::Malleable => true,
        SigSchemeTag::LamportMerkle => verify_lamport(pk, msg, &sig.0),
    }
}

fn verify_lamport(pk: &PublicKey, msg: &[u8], sig: &[u8]) -> bool {
    if sig.len() != LAMPORT_SIGNATURE_LEN || pk.bytes.len() != 16 {
        return false;
    }
    let leaf = u16::from_le_bytes([sig[0], sig[1]]) as usize;
    if leaf >= LEAF_COUNT {
        return false;
    }
    let digest = sip128(&DIGEST_KEY, msg);
    let value = |slot: usize| -> [u8; 16] {
        sig[2 + slot * 16..2 + (slot + 1) * 16].try_into().expect("16-byte slot")
    };
    let mut publics = vec![[0u8; 16]; SLOTS];
    for i in 0..DIGEST_BITS {
        let d = digest_bit(&digest, i);
        publics[2 * i + d] = one_way(&value(2 * i + d));
        publics[2 * i + 1 - d] = value(2 * i + 1 - d);
    }
    let mut acc = leaf_hash(leaf, &publics);
    let path = &sig[2 + SLOTS * 16..];
    let mut node = LEAF_COUNT + leaf;
    for sibling in path.chunks_exact(16) {
        let sibling: [u8; 16] = sibling.try_into().expect("16-byte node");
        acc = if node.is_multiple_of(2) { node_hash(&acc, &sibling) } else { node_hash(&sibling, &acc) };
        node /= 2;
    }
    acc.as_slice() == pk.bytes.as_slice()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lamport(seed: u64) -> SigKeyPair {
        keygen(SigSchemeTag::LamportMerkle, 64, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn sign_then_verify() {
        let kp = lamport(1);
        let s = sign(&kp, b"hello").unwrap();
        assert_eq!(s.0.len(), LAMPORT_SIGNATURE_LEN);
        assert!(verify(kp.public(), b"hello", &s));
        assert!(!verify(kp.public(), b"hellp", &s));
    }

    #[test]
    fn signing_is_deterministic() {
        let kp = lamport(2);
        assert_eq!(sign(&kp, b"m").unwrap(), sign(&kp, b"m").unwrap());
        assert_eq!(kp.signed_count(), 1);
    }

    #[test]
    fn any_single_bit_flip_is_rejected() {
        let kp = lamport(3);
        let s = sign(&kp, b"abc").unwrap();
        for byte in [0usize, 1, 2, 100, 2 + 256 * 16 - 1, LAMPORT_SIGNATURE_LEN - 1] {
            for bit in 0..8 {
                let mut t = s.clone();
                t.0[byte] ^= 1 << bit;
                assert!(!verify(kp.public(), b"abc", &t), "byte {byte} bit {bit}");
            }
        }
    }

    #[test]
    fn wrong_lengths_are_rejected() {
        let kp = lamport(4);
        let mut s = sign(&kp, b"x").unwrap();
        s.0.push(0);
        assert!(!verify(kp.public(), b"x", &s));
        assert!(!verify(kp.public(), b"x", &Signature(vec![0])));
    }

    #[test]
    fn malleable_accepts_everything() {
        let kp = keygen(SigSchemeTag::Malleable, 8, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(sign(&kp, b"anything").unwrap(), Signature(vec![0]));
        assert!(verify(kp.public(), b"other", &Signature(vec![1, 2, 3])));
    }

    #[test]
    fn capacity_is_enforced() {
        let kp = lamport(6);
        for i in 0..LEAF_COUNT as u32 {
            sign(&kp, &i.to_le_bytes()).unwrap();
        }
        assert_eq!(sign(&kp, b"one more"), Err(SigError::CapacityExhausted(LEAF_COUNT)));
        assert!(sign(&kp, &7u32.to_le_bytes()).is_ok());
    }

    #[test]
    fn seed_determines_public_key() {
        let a = lamport(7);
        let b = keypair_from_seed(SigSchemeTag::LamportMerkle, a.seed);
        assert_eq!(a.public(), b.public());
    }
}
