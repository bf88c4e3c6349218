//! Encryption schemes with quantum decryptors, the classical transforms over
//! them, and a plain secret-key baseline.
//!
//! Every scheme is used through [`SchemeInstance`], a shared trait object, so
//! transforms compose freely: `extend(ud1_cpa(..))`,
//! `wrap_cca2_bit(decouple_bit(ud1_cpa(..)), ..)`, and so on.

mod ciphertext;
mod constructions;
mod parse;

use std::fmt;
use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};

pub use ciphertext::{seq_item_message, BitCipher, Ciphertext, DecodeError, SignedItem};
pub use constructions::{
    build_se_bbf, build_ud1_cpa, build_ud1_cpa_with_family, decouple_bit, decouple_general, extend, underlying,
    wrap_cca2_bit, wrap_cca2_full, MAX_DERIVED_COINS, SERIAL_COIN_BITS,
};
pub use parse::{parse_scheme, SchemeSpecError, SCHEME_GRAMMAR};

use crate::bbf::{BbfDescriptor, BbfError};
use crate::bits::BitString;
use crate::prf::SipKey;
use crate::qcp::{ProtectedProgram, QcpError, ResourceLedger};
use crate::signatures::{PublicKey, SigError, SigKeyPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageSupport {
    BitOnly,
    Unrestricted,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemeError {
    #[error("message is empty")]
    EmptyMessage,
    #[error("scheme encrypts single bits, got {got} bits")]
    UnsupportedMessageLength { got: usize },
    #[error("scheme has no quantum decryptor")]
    DecryptorUnavailable,
    #[error("decryptor carries no verification key")]
    MissingPublicKey,
    #[error("inner scheme produced an unsupported ciphertext shape: {0}")]
    UnsupportedCiphertext(&'static str),
    #[error("needs {needed} derived coins, limit is {max}")]
    RandomnessBudgetExceeded { needed: usize, max: usize },
    #[error("expected {expected} coins, got {got}")]
    CoinLengthMismatch { expected: usize, got: usize },
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    #[error(transparent)]
    Qcp(#[from] QcpError),
    #[error(transparent)]
    Bbf(#[from] BbfError),
    #[error(transparent)]
    Sig(#[from] SigError),
}

/// Secret key material. Fields are filled in by whichever layers the scheme is built from.
#[derive(Clone, Debug)]
pub struct UdKey {
    pub lambda: usize,
    pub bbf: BbfDescriptor,
    pub sig: Option<Arc<SigKeyPair>>,
    pub prf: Option<SipKey>,
}

impl UdKey {
    pub fn public_key(&self) -> Option<PublicKey> {
        self.sig.as_ref().map(|kp| kp.public().clone())
    }
}

/// A protected program together with the public verification key, if the scheme signs.
#[derive(Debug)]
pub struct Decryptor {
    program: ProtectedProgram,
    pk: Option<PublicKey>,
}

impl Decryptor {
    pub fn new(program: ProtectedProgram, pk: Option<PublicKey>) -> Self {
        Decryptor { program, pk }
    }

    pub fn program(&self) -> &ProtectedProgram {
        &self.program
    }

    pub fn pk(&self) -> Option<&PublicKey> {
        self.pk.as_ref()
    }

    pub fn into_parts(self) -> (ProtectedProgram, Option<PublicKey>) {
        (self.program, self.pk)
    }
}

pub trait UdScheme: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn message_support(&self) -> MessageSupport;

    /// True for schemes whose encryption coins can be chosen independently of the plaintext.
    fn decoupled(&self) -> bool {
        false
    }

    fn key_gen(&self, lambda: usize, rng: &mut dyn RngCore) -> Result<UdKey, SchemeError>;

    fn dec_gen(&self, key: &UdKey, ledger: &mut ResourceLedger, rng: &mut dyn RngCore)
        -> Result<Decryptor, SchemeError>;

    /// Number of coins `encrypt_with_coins` consumes for a message of `msg_len` bits.
    fn randomness_budget(&self, key: &UdKey, msg_len: usize) -> Result<usize, SchemeError>;

    fn encrypt_with_coins(&self, key: &UdKey, m: &BitString, coins: &BitString) -> Result<Ciphertext, SchemeError>;

    fn encrypt(&self, key: &UdKey, m: &BitString, rng: &mut dyn RngCore) -> Result<Ciphertext, SchemeError> {
        check_message(self.message_support(), m)?;
        let t = self.randomness_budget(key, m.len())?;
        let coins = BitString::random(t, rng);
        self.encrypt_with_coins(key, m, &coins)
    }

    /// Classical decryption with the key. `Ok(None)` is ⊥.
    fn decrypt_key(&self, key: &UdKey, c: &Ciphertext) -> Result<Option<BitString>, SchemeError>;

    /// Decryption with a (possibly dud or split) decryptor. `Ok(None)` is ⊥.
    fn decrypt_q(&self, ledger: &ResourceLedger, d: &Decryptor, c: &Ciphertext)
        -> Result<Option<BitString>, SchemeError>;
}

pub type SchemeInstance = Arc<dyn UdScheme>;

pub(crate) fn check_message(support: MessageSupport, m: &BitString) -> Result<(), SchemeError> {
    if m.is_empty() {
        return Err(SchemeError::EmptyMessage);
    }
    if support == MessageSupport::BitOnly && m.len() != 1 {
        return Err(SchemeError::UnsupportedMessageLength { got: m.len() });
    }
    Ok(())
}

/// Decrypts raw bytes; anything that does not parse is ⊥.
pub fn decrypt_bytes(scheme: &dyn UdScheme, key: &UdKey, bytes: &[u8]) -> Result<Option<BitString>, SchemeError> {
    match Ciphertext::from_bytes(bytes) {
        Ok(c) => scheme.decrypt_key(key, &c),
        Err(_) => Ok(None),
    }
}
