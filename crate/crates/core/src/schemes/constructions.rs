use std::sync::Arc;

use rand::RngCore;

use super::{
    check_message, seq_item_message, BitCipher, Ciphertext, Decryptor, MessageSupport, SchemeError, SchemeInstance,
    SignedItem, UdKey, UdScheme,
};
use crate::bbf::{self, BbfFamily, BbfError};
use crate::bits::BitString;
use crate::prf::{sip64, SipKey};
use crate::qcp::{self, BackendTag, QcpError, ResourceLedger};
use crate::signatures::{self, SigSchemeTag};

/// Cap on coins produced by `decouple_general`'s expander.
pub const MAX_DERIVED_COINS: usize = 4096;
/// Length of the public coin string `decouple_general` consumes.
pub const SERIAL_COIN_BITS: usize = 64;

fn bit_of(m: &BitString) -> bool {
    m.get(0)
}

fn expect_coins(coins: &BitString, expected: usize) -> Result<(), SchemeError> {
    if coins.len() != expected {
        return Err(SchemeError::CoinLengthMismatch { expected, got: coins.len() });
    }
    Ok(())
}

/// Evaluation failures caused by the ciphertext shape are ⊥; everything else propagates.
fn eval_or_bottom(result: Result<bool, QcpError>) -> Result<Option<bool>, SchemeError> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(QcpError::LengthMismatch { .. }) | Err(QcpError::Bbf(BbfError::LengthMismatch { .. })) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn single_bit(inner: &dyn UdScheme) -> Result<(), SchemeError> {
    if inner.message_support() != MessageSupport::BitOnly {
        return Err(SchemeError::InvalidComposition(format!("{} is not a single-bit scheme", inner.name())));
    }
    Ok(())
}

fn expect_bit(c: Ciphertext) -> Result<BitCipher, SchemeError> {
    match c {
        Ciphertext::Bit(b) => Ok(b),
        other => Err(SchemeError::UnsupportedCiphertext(other.kind_name())),
    }
}

#[derive(Debug)]
struct Ud1Cpa {
    backend: BackendTag,
    family: BbfFamily,
}

/// Single-bit scheme: `Enc(b) = (r, b ⊕ f(r))`, decrypted by evaluating a protected copy of `f`.
pub fn build_ud1_cpa(backend: BackendTag) -> SchemeInstance {
    Arc::new(Ud1Cpa { backend, family: BbfFamily::KeyedMix })
}

pub fn build_ud1_cpa_with_family(backend: BackendTag, family: BbfFamily) -> SchemeInstance {
    Arc::new(Ud1Cpa { backend, family })
}

impl UdScheme for Ud1Cpa {
    fn name(&self) -> String {
        match self.family {
            BbfFamily::KeyedMix => format!("ud1_cpa[{}]", self.backend),
            other => format!("ud1_cpa[{},{:?}]", self.backend, other),
        }
    }

    fn message_support(&self) -> MessageSupport {
        MessageSupport::BitOnly
    }

    fn key_gen(&self, lambda: usize, rng: &mut dyn RngCore) -> Result<UdKey, SchemeError> {
        let f = qcp::sample_function(self.backend, self.family, lambda, rng)?;
        Ok(UdKey { lambda, bbf: f, sig: None, prf: None })
    }

    fn dec_gen(&self, key: &UdKey, ledger: &mut ResourceLedger, rng: &mut dyn RngCore) -> Result<Decryptor, SchemeError> {
        let program = qcp::protect(self.backend, &key.bbf, ledger, rng)?;
        Ok(Decryptor::new(program, None))
    }

    fn randomness_budget(&self, key: &UdKey, msg_len: usize) -> Result<usize, SchemeError> {
        check_message(self.message_support(), &BitString::zeros(msg_len))?;
        Ok(key.bbf.input_len())
    }

    fn encrypt_with_coins(&self, key: &UdKey, m: &BitString, coins: &BitString) -> Result<Ciphertext, SchemeError> {
        check_message(self.message_support(), m)?;
        expect_coins(coins, key.bbf.input_len())?;
        let beta = bit_of(m) ^ key.bbf.eval(coins)?;
        Ok(Ciphertext::Bit(BitCipher::new(coins.clone(), beta)))
    }

    fn decrypt_key(&self, key: &UdKey, c: &Ciphertext) -> Result<Option<BitString>, SchemeError> {
        match c {
            Ciphertext::Bit(b) if b.r.len() == key.bbf.input_len() => {
                Ok(Some(BitString::single(b.beta ^ key.bbf.eval(&b.r)?)))
            }
            _ => Ok(None),
        }
    }

    fn decrypt_q(&self, ledger: &ResourceLedger, d: &Decryptor, c: &Ciphertext) -> Result<Option<BitString>, SchemeError> {
        match c {
            Ciphertext::Bit(b) => {
                let v = eval_or_bottom(qcp::eval_program(ledger, d.program(), &b.r))?;
                Ok(v.map(|v| BitString::single(b.beta ^ v)))
            }
            _ => Ok(None),
        }
    }
}

#[derive(Debug)]
struct Extend {
    inner: SchemeInstance,
}

/// Bit-by-bit encryption of arbitrary messages with an independent item per bit.
pub fn extend(inner: SchemeInstance) -> Result<SchemeInstance, SchemeError> {
    single_bit(inner.as_ref())?;
    Ok(Arc::new(Extend { inner }))
}

impl UdScheme for Extend {
    fn name(&self) -> String {
        format!("extend({})", self.inner.name())
    }

    fn message_support(&self) -> MessageSupport {
        MessageSupport::Unrestricted
    }

    fn key_gen(&self, lambda: usize, rng: &mut dyn RngCore) -> Result<UdKey, SchemeError> {
        self.inner.key_gen(lambda, rng)
    }

    fn dec_gen(&self, key: &UdKey, ledger: &mut ResourceLedger, rng: &mut dyn RngCore) -> Result<Decryptor, SchemeError> {
        self.inner.dec_gen(key, ledger, rng)
    }

    fn randomness_budget(&self, key: &UdKey, msg_len: usize) -> Result<usize, SchemeError> {
        if msg_len == 0 {
            return Err(SchemeError::EmptyMessage);
        }
        Ok(msg_len * self.inner.randomness_budget(key, 1)?)
    }

    fn encrypt_with_coins(&self, key: &UdKey, m: &BitString, coins: &BitString) -> Result<Ciphertext, SchemeError> {
        check_message(MessageSupport::Unrestricted, m)?;
        let t = self.inner.randomness_budget(key, 1)?;
        expect_coins(coins, m.len() * t)?;
        let items = m
            .iter()
            .enumerate()
            .map(|(i, bit)| {
                let c = self.inner.encrypt_with_coins(key, &BitString::single(bit), &coins.slice(i * t, (i + 1) * t))?;
                expect_bit(c)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Ciphertext::Seq(items))
    }

    fn decrypt_key(&self, key: &UdKey, c: &Ciphertext) -> Result<Option<BitString>, SchemeError> {
        let Ciphertext::Seq(items) = c else { return Ok(None) };
        if items.is_empty() {
            return Ok(None);
        }
        let mut out = BitString::new();
        for item in items {
            match self.inner.decrypt_key(key, &Ciphertext::Bit(item.clone()))? {
                Some(b) if b.len() == 1 => out.push(b.get(0)),
                _ => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    fn decrypt_q(&self, ledger: &ResourceLedger, d: &Decryptor, c: &Ciphertext) -> Result<Option<BitString>, SchemeError> {
        let Ciphertext::Seq(items) = c else { return Ok(None) };
        if items.is_empty() {
            return Ok(None);
        }
        let mut out = BitString::new();
        for item in items {
            match self.inner.decrypt_q(ledger, d, &Ciphertext::Bit(item.clone()))? {
                Some(b) if b.len() == 1 => out.push(b.get(0)),
                _ => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

/// Delegates everything except encryption to `inner`.
macro_rules! delegate_decryption {
    () => {
        fn key_gen(&self, lambda: usize, rng: &mut dyn RngCore) -> Result<UdKey, SchemeError> {
            self.inner.key_gen(lambda, rng)
        }

        fn dec_gen(
            &self,
            key: &UdKey,
            ledger: &mut ResourceLedger,
            rng: &mut dyn RngCore,
        ) -> Result<Decryptor, SchemeError> {
            self.inner.dec_gen(key, ledger, rng)
        }

        fn decrypt_key(&self, key: &UdKey, c: &Ciphertext) -> Result<Option<BitString>, SchemeError> {
            self.inner.decrypt_key(key, c)
        }

        fn decrypt_q(
            &self,
            ledger: &ResourceLedger,
            d: &Decryptor,
            c: &Ciphertext,
        ) -> Result<Option<BitString>, SchemeError> {
            self.inner.decrypt_q(ledger, d, c)
        }
    };
}

#[derive(Debug)]
struct DecoupleBit {
    inner: SchemeInstance,
}

/// Draws coins `r0 || r1` and encrypts `b` with `r_b`, so the coins no longer depend on `b`.
pub fn decouple_bit(inner: SchemeInstance) -> Result<SchemeInstance, SchemeError> {
    single_bit(inner.as_ref())?;
    Ok(Arc::new(DecoupleBit { inner }))
}

impl UdScheme for DecoupleBit {
    fn name(&self) -> String {
        format!("decouple_bit({})", self.inner.name())
    }

    fn message_support(&self) -> MessageSupport {
        MessageSupport::BitOnly
    }

    fn decoupled(&self) -> bool {
        true
    }

    delegate_decryption!();

    fn randomness_budget(&self, key: &UdKey, msg_len: usize) -> Result<usize, SchemeError> {
        Ok(2 * self.inner.randomness_budget(key, msg_len)?)
    }

    fn encrypt_with_coins(&self, key: &UdKey, m: &BitString, coins: &BitString) -> Result<Ciphertext, SchemeError> {
        check_message(MessageSupport::BitOnly, m)?;
        let t = self.inner.randomness_budget(key, 1)?;
        expect_coins(coins, 2 * t)?;
        let r_b = if bit_of(m) { coins.slice(t, 2 * t) } else { coins.slice(0, t) };
        self.inner.encrypt_with_coins(key, m, &r_b)
    }
}

#[derive(Debug)]
struct DecoupleGeneral {
    inner: SchemeInstance,
    fixed_key: Option<SipKey>,
}

/// Encrypts with coins `PRF_k(m || r)` for public coins `r`. The PRF key joins
/// the scheme key; `fixed_key` pins it, otherwise key generation samples it.
pub fn decouple_general(inner: SchemeInstance, fixed_key: Option<SipKey>) -> SchemeInstance {
    Arc::new(DecoupleGeneral { inner, fixed_key })
}

fn expand_coins(key: &SipKey, m: &BitString, r: &BitString, needed: usize) -> Result<BitString, SchemeError> {
    if needed > MAX_DERIVED_COINS {
        return Err(SchemeError::RandomnessBudgetExceeded { needed, max: MAX_DERIVED_COINS });
    }
    let mut prefix = Vec::new();
    prefix.extend_from_slice(&(m.len() as u32).to_le_bytes());
    prefix.extend(m.to_packed());
    prefix.extend_from_slice(&(r.len() as u32).to_le_bytes());
    prefix.extend(r.to_packed());
    let mut out = BitString::new();
    let mut block = 0u32;
    while out.len() < needed {
        let mut msg = prefix.clone();
        msg.extend_from_slice(&block.to_le_bytes());
        let word = sip64(key, &msg);
        for i in 0..64 {
            if out.len() == needed {
                break;
            }
            out.push((word >> i) & 1 == 1);
        }
        block += 1;
    }
    Ok(out)
}

impl UdScheme for DecoupleGeneral {
    fn name(&self) -> String {
        format!("decouple_general({})", self.inner.name())
    }

    fn message_support(&self) -> MessageSupport {
        self.inner.message_support()
    }

    fn decoupled(&self) -> bool {
        true
    }

    fn key_gen(&self, lambda: usize, rng: &mut dyn RngCore) -> Result<UdKey, SchemeError> {
        let mut key = self.inner.key_gen(lambda, rng)?;
        key.prf = Some(match self.fixed_key {
            Some(k) => k,
            None => {
                let mut k = [0u8; 16];
                rng.fill_bytes(&mut k);
                k
            }
        });
        Ok(key)
    }

    fn dec_gen(&self, key: &UdKey, ledger: &mut ResourceLedger, rng: &mut dyn RngCore) -> Result<Decryptor, SchemeError> {
        self.inner.dec_gen(key, ledger, rng)
    }

    fn decrypt_key(&self, key: &UdKey, c: &Ciphertext) -> Result<Option<BitString>, SchemeError> {
        self.inner.decrypt_key(key, c)
    }

    fn decrypt_q(&self, ledger: &ResourceLedger, d: &Decryptor, c: &Ciphertext) -> Result<Option<BitString>, SchemeError> {
        self.inner.decrypt_q(ledger, d, c)
    }

    fn randomness_budget(&self, key: &UdKey, msg_len: usize) -> Result<usize, SchemeError> {
        let needed = self.inner.randomness_budget(key, msg_len)?;
        if needed > MAX_DERIVED_COINS {
            return Err(SchemeError::RandomnessBudgetExceeded { needed, max: MAX_DERIVED_COINS });
        }
        Ok(SERIAL_COIN_BITS)
    }

    fn encrypt_with_coins(&self, key: &UdKey, m: &BitString, coins: &BitString) -> Result<Ciphertext, SchemeError> {
        check_message(self.message_support(), m)?;
        expect_coins(coins, SERIAL_COIN_BITS)?;
        let prf = key.prf.as_ref().ok_or_else(|| SchemeError::InvalidComposition("key lacks a PRF key".into()))?;
        let needed = self.inner.randomness_budget(key, m.len())?;
        let derived = expand_coins(prf, m, coins, needed)?;
        self.inner.encrypt_with_coins(key, m, &derived)
    }
}

#[derive(Debug)]
struct WrapCca2Bit {
    inner: SchemeInstance,
    sig: SigSchemeTag,
}

/// Signs each single-bit ciphertext with a deterministic signature scheme.
pub fn wrap_cca2_bit(inner: SchemeInstance, sig: SigSchemeTag) -> Result<SchemeInstance, SchemeError> {
    single_bit(inner.as_ref())?;
    if !inner.decoupled() {
        return Err(SchemeError::InvalidComposition(format!("{} is not decoupled", inner.name())));
    }
    Ok(Arc::new(WrapCca2Bit { inner, sig }))
}

fn add_signing_key(mut key: UdKey, sig: SigSchemeTag, rng: &mut dyn RngCore) -> Result<UdKey, SchemeError> {
    key.sig = Some(Arc::new(signatures::keygen(sig, key.lambda, rng)?));
    Ok(key)
}

fn signing_key(key: &UdKey) -> Result<&signatures::SigKeyPair, SchemeError> {
    key.sig.as_deref().ok_or_else(|| SchemeError::InvalidComposition("key lacks a signing key".into()))
}

impl UdScheme for WrapCca2Bit {
    fn name(&self) -> String {
        format!("wrap_cca2_bit({},{})", self.inner.name(), self.sig.name())
    }

    fn message_support(&self) -> MessageSupport {
        MessageSupport::BitOnly
    }

    fn key_gen(&self, lambda: usize, rng: &mut dyn RngCore) -> Result<UdKey, SchemeError> {
        let key = self.inner.key_gen(lambda, rng)?;
        add_signing_key(key, self.sig, rng)
    }

    fn dec_gen(&self, key: &UdKey, ledger: &mut ResourceLedger, rng: &mut dyn RngCore) -> Result<Decryptor, SchemeError> {
        let (program, _) = self.inner.dec_gen(key, ledger, rng)?.into_parts();
        Ok(Decryptor::new(program, key.public_key()))
    }

    fn randomness_budget(&self, key: &UdKey, msg_len: usize) -> Result<usize, SchemeError> {
        self.inner.randomness_budget(key, msg_len)
    }

    fn encrypt_with_coins(&self, key: &UdKey, m: &BitString, coins: &BitString) -> Result<Ciphertext, SchemeError> {
        let inner = expect_bit(self.inner.encrypt_with_coins(key, m, coins)?)?;
        let sig = signatures::sign(signing_key(key)?, &inner.body_bytes())?;
        Ok(Ciphertext::SignedBit(SignedItem { inner, sig }))
    }

    fn decrypt_key(&self, key: &UdKey, c: &Ciphertext) -> Result<Option<BitString>, SchemeError> {
        let Ciphertext::SignedBit(item) = c else { return Ok(None) };
        let pk = signing_key(key)?.public();
        if !signatures::verify(pk, &item.inner.body_bytes(), &item.sig) {
            return Ok(None);
        }
        self.inner.decrypt_key(key, &Ciphertext::Bit(item.inner.clone()))
    }

    fn decrypt_q(&self, ledger: &ResourceLedger, d: &Decryptor, c: &Ciphertext) -> Result<Option<BitString>, SchemeError> {
        let Ciphertext::SignedBit(item) = c else { return Ok(None) };
        let pk = d.pk().ok_or(SchemeError::MissingPublicKey)?;
        if !signatures::verify(pk, &item.inner.body_bytes(), &item.sig) {
            return Ok(None);
        }
        self.inner.decrypt_q(ledger, d, &Ciphertext::Bit(item.inner.clone()))
    }
}

#[derive(Debug)]
struct WrapCca2Full {
    inner: SchemeInstance,
    sig: SigSchemeTag,
}

/// Arbitrary-length encryption where item `i` of `|m|` is signed together with
/// `|m|`, `i` and a fresh `λ`-bit serial, so items cannot be reordered,
/// dropped or moved between ciphertexts.
pub fn wrap_cca2_full(inner: SchemeInstance, sig: SigSchemeTag) -> Result<SchemeInstance, SchemeError> {
    single_bit(inner.as_ref())?;
    Ok(Arc::new(WrapCca2Full { inner, sig }))
}

impl WrapCca2Full {
    fn open(
        &self,
        pk: &signatures::PublicKey,
        c: &Ciphertext,
        mut decrypt_item: impl FnMut(&BitCipher) -> Result<Option<BitString>, SchemeError>,
    ) -> Result<Option<BitString>, SchemeError> {
        let Ciphertext::SignedSeq { serial, items } = c else { return Ok(None) };
        if items.is_empty() {
            return Ok(None);
        }
        for (i, item) in items.iter().enumerate() {
            let msg = seq_item_message(&item.inner, items.len(), i + 1, serial);
            if !signatures::verify(pk, &msg, &item.sig) {
                return Ok(None);
            }
        }
        let mut out = BitString::new();
        for item in items {
            match decrypt_item(&item.inner)? {
                Some(b) if b.len() == 1 => out.push(b.get(0)),
                _ => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

impl UdScheme for WrapCca2Full {
    fn name(&self) -> String {
        format!("wrap_cca2_full({},{})", self.inner.name(), self.sig.name())
    }

    fn message_support(&self) -> MessageSupport {
        MessageSupport::Unrestricted
    }

    fn key_gen(&self, lambda: usize, rng: &mut dyn RngCore) -> Result<UdKey, SchemeError> {
        let key = self.inner.key_gen(lambda, rng)?;
        add_signing_key(key, self.sig, rng)
    }

    fn dec_gen(&self, key: &UdKey, ledger: &mut ResourceLedger, rng: &mut dyn RngCore) -> Result<Decryptor, SchemeError> {
        let (program, _) = self.inner.dec_gen(key, ledger, rng)?.into_parts();
        Ok(Decryptor::new(program, key.public_key()))
    }

    fn randomness_budget(&self, key: &UdKey, msg_len: usize) -> Result<usize, SchemeError> {
        if msg_len == 0 {
            return Err(SchemeError::EmptyMessage);
        }
        Ok(key.lambda + msg_len * self.inner.randomness_budget(key, 1)?)
    }

    fn encrypt_with_coins(&self, key: &UdKey, m: &BitString, coins: &BitString) -> Result<Ciphertext, SchemeError> {
        check_message(MessageSupport::Unrestricted, m)?;
        let t = self.inner.randomness_budget(key, 1)?;
        let lambda = key.lambda;
        expect_coins(coins, lambda + m.len() * t)?;
        let serial = coins.slice(0, lambda);
        let kp = signing_key(key)?;
        let mut items = Vec::with_capacity(m.len());
        for (i, bit) in m.iter().enumerate() {
            let start = lambda + i * t;
            let c = self.inner.encrypt_with_coins(key, &BitString::single(bit), &coins.slice(start, start + t))?;
            let inner = expect_bit(c)?;
            let sig = signatures::sign(kp, &seq_item_message(&inner, m.len(), i + 1, &serial))?;
            items.push(SignedItem { inner, sig });
        }
        Ok(Ciphertext::SignedSeq { serial, items })
    }

    fn decrypt_key(&self, key: &UdKey, c: &Ciphertext) -> Result<Option<BitString>, SchemeError> {
        let pk = signing_key(key)?.public().clone();
        self.open(&pk, c, |item| self.inner.decrypt_key(key, &Ciphertext::Bit(item.clone())))
    }

    fn decrypt_q(&self, ledger: &ResourceLedger, d: &Decryptor, c: &Ciphertext) -> Result<Option<BitString>, SchemeError> {
        let pk = d.pk().ok_or(SchemeError::MissingPublicKey)?;
        self.open(pk, c, |item| self.inner.decrypt_q(ledger, d, &Ciphertext::Bit(item.clone())))
    }
}

#[derive(Debug)]
struct Underlying {
    inner: SchemeInstance,
}

/// The classical scheme left after forgetting the quantum decryptor.
pub fn underlying(inner: SchemeInstance) -> SchemeInstance {
    Arc::new(Underlying { inner })
}

impl UdScheme for Underlying {
    fn name(&self) -> String {
        format!("underlying({})", self.inner.name())
    }

    fn message_support(&self) -> MessageSupport {
        self.inner.message_support()
    }

    fn decoupled(&self) -> bool {
        self.inner.decoupled()
    }

    fn key_gen(&self, lambda: usize, rng: &mut dyn RngCore) -> Result<UdKey, SchemeError> {
        self.inner.key_gen(lambda, rng)
    }

    fn dec_gen(&self, _: &UdKey, _: &mut ResourceLedger, _: &mut dyn RngCore) -> Result<Decryptor, SchemeError> {
        Err(SchemeError::DecryptorUnavailable)
    }

    fn randomness_budget(&self, key: &UdKey, msg_len: usize) -> Result<usize, SchemeError> {
        self.inner.randomness_budget(key, msg_len)
    }

    fn encrypt_with_coins(&self, key: &UdKey, m: &BitString, coins: &BitString) -> Result<Ciphertext, SchemeError> {
        self.inner.encrypt_with_coins(key, m, coins)
    }

    fn decrypt_key(&self, key: &UdKey, c: &Ciphertext) -> Result<Option<BitString>, SchemeError> {
        self.inner.decrypt_key(key, c)
    }

    fn decrypt_q(&self, _: &ResourceLedger, _: &Decryptor, _: &Ciphertext) -> Result<Option<BitString>, SchemeError> {
        Err(SchemeError::DecryptorUnavailable)
    }
}

#[derive(Debug)]
struct SeBbf {
    family: BbfFamily,
}

/// Plain secret-key encryption `Enc_f(b) = (r, b ⊕ f(r))`, written independently of the copy-protected scheme.
pub fn build_se_bbf(family: BbfFamily) -> SchemeInstance {
    Arc::new(SeBbf { family })
}

impl UdScheme for SeBbf {
    fn name(&self) -> String {
        match self.family {
            BbfFamily::KeyedMix => "se_bbf".to_string(),
            other => format!("se_bbf[{other:?}]"),
        }
    }

    fn message_support(&self) -> MessageSupport {
        MessageSupport::BitOnly
    }

    fn key_gen(&self, lambda: usize, rng: &mut dyn RngCore) -> Result<UdKey, SchemeError> {
        Ok(UdKey { lambda, bbf: bbf::sample(self.family, lambda, rng)?, sig: None, prf: None })
    }

    fn dec_gen(&self, _: &UdKey, _: &mut ResourceLedger, _: &mut dyn RngCore) -> Result<Decryptor, SchemeError> {
        Err(SchemeError::DecryptorUnavailable)
    }

    fn randomness_budget(&self, key: &UdKey, msg_len: usize) -> Result<usize, SchemeError> {
        check_message(MessageSupport::BitOnly, &BitString::zeros(msg_len))?;
        Ok(key.bbf.input_len())
    }

    fn encrypt_with_coins(&self, key: &UdKey, m: &BitString, coins: &BitString) -> Result<Ciphertext, SchemeError> {
        check_message(MessageSupport::BitOnly, m)?;
        expect_coins(coins, key.bbf.input_len())?;
        let pad = key.bbf.eval(coins)?;
        Ok(Ciphertext::Bit(BitCipher { r: coins.clone(), beta: m.get(0) ^ pad }))
    }

    fn decrypt_key(&self, key: &UdKey, c: &Ciphertext) -> Result<Option<BitString>, SchemeError> {
        let Ciphertext::Bit(b) = c else { return Ok(None) };
        match key.bbf.eval(&b.r) {
            Ok(pad) => Ok(Some(BitString::single(b.beta ^ pad))),
            Err(_) => Ok(None),
        }
    }

    fn decrypt_q(&self, _: &ResourceLedger, _: &Decryptor, _: &Ciphertext) -> Result<Option<BitString>, SchemeError> {
        Err(SchemeError::DecryptorUnavailable)
    }
}
