//! Challenger-side oracles.

use std::collections::HashMap;

use rand::Rng;

use super::report::OracleStats;
use super::seeding::TrialRng;
use super::GameError;
use crate::adversaries::SimulatedDecryptionOracle;
use crate::bbf::BbfDescriptor;
use crate::bits::BitString;
use crate::schemes::{Ciphertext, SchemeInstance, UdKey, UdScheme};

/// Maximum number of `x1` resamples a left-or-right oracle makes.
pub const LOR_RESAMPLE_LIMIT: usize = 128;

/// Source of pairs `(r, f(r) ⊕ b)` for a fixed hidden `b`.
pub trait FlipSource {
    fn query(&mut self) -> Result<(BitString, bool), GameError>;
}

/// Source of pairs `(r, f(r))` for uniform `r`.
pub trait RandomInputSource {
    fn query(&mut self) -> Result<(BitString, bool), GameError>;
}

/// Source of triples `(x0, x1, f(x_b))` with `f(x0) ≠ f(x1)`.
pub trait LorSource {
    fn query(&mut self) -> Result<(BitString, BitString, bool), GameError>;
}

pub struct FlipOracle<'a> {
    f: &'a BbfDescriptor,
    b: bool,
    rng: TrialRng,
    queries: u64,
}

impl<'a> FlipOracle<'a> {
    pub fn new(f: &'a BbfDescriptor, b: bool, rng: TrialRng) -> Self {
        FlipOracle { f, b, rng, queries: 0 }
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }
}

impl FlipSource for FlipOracle<'_> {
    fn query(&mut self) -> Result<(BitString, bool), GameError> {
        self.queries += 1;
        let r = BitString::random(self.f.input_len(), &mut self.rng);
        let y = self.f.eval(&r)? ^ self.b;
        Ok((r, y))
    }
}

pub struct RandomInputOracle<'a> {
    f: &'a BbfDescriptor,
    rng: TrialRng,
    queries: u64,
}

impl<'a> RandomInputOracle<'a> {
    pub fn new(f: &'a BbfDescriptor, rng: TrialRng) -> Self {
        RandomInputOracle { f, rng, queries: 0 }
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }
}

impl RandomInputSource for RandomInputOracle<'_> {
    fn query(&mut self) -> Result<(BitString, bool), GameError> {
        self.queries += 1;
        let r = BitString::random(self.f.input_len(), &mut self.rng);
        let y = self.f.eval(&r)?;
        Ok((r, y))
    }
}

pub struct LorOracle<'a> {
    f: &'a BbfDescriptor,
    b: bool,
    x0_rng: TrialRng,
    x1_rng: TrialRng,
    queries: u64,
}

impl<'a> LorOracle<'a> {
    pub fn new(f: &'a BbfDescriptor, b: bool, x0_rng: TrialRng, x1_rng: TrialRng) -> Self {
        LorOracle { f, b, x0_rng, x1_rng, queries: 0 }
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }
}

impl LorSource for LorOracle<'_> {
    fn query(&mut self) -> Result<(BitString, BitString, bool), GameError> {
        self.queries += 1;
        let len = self.f.input_len();
        let x0 = BitString::random(len, &mut self.x0_rng);
        let y0 = self.f.eval(&x0)?;
        for _ in 0..LOR_RESAMPLE_LIMIT {
            let x1 = BitString::random(len, &mut self.x1_rng);
            if self.f.eval(&x1)? != y0 {
                let y = if self.b { !y0 } else { y0 };
                return Ok((x0, x1, y));
            }
        }
        Err(GameError::ResampleExhausted)
    }
}

/// Classical evaluation access to `f`, used in the first phase of the unlearnability games.
pub struct EvalOracle<'a> {
    f: &'a BbfDescriptor,
    queries: u64,
}

impl<'a> EvalOracle<'a> {
    pub fn new(f: &'a BbfDescriptor) -> Self {
        EvalOracle { f, queries: 0 }
    }

    pub fn input_len(&self) -> usize {
        self.f.input_len()
    }

    pub fn query(&mut self, x: &BitString) -> Result<bool, GameError> {
        self.queries += 1;
        Ok(self.f.eval(x)?)
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }
}

/// Random-input oracle for the weak-PRF game: answers with `f` when `coin = 0`
/// and with a lazily sampled random function otherwise.
pub struct WprfOracle<'a> {
    f: &'a BbfDescriptor,
    coin: bool,
    r_rng: TrialRng,
    value_rng: TrialRng,
    table: HashMap<BitString, bool>,
    queries: u64,
}

impl<'a> WprfOracle<'a> {
    pub fn new(f: &'a BbfDescriptor, coin: bool, r_rng: TrialRng, value_rng: TrialRng) -> Self {
        WprfOracle { f, coin, r_rng, value_rng, table: HashMap::new(), queries: 0 }
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }
}

impl RandomInputSource for WprfOracle<'_> {
    fn query(&mut self) -> Result<(BitString, bool), GameError> {
        self.queries += 1;
        let r = BitString::random(self.f.input_len(), &mut self.r_rng);
        let y = if self.coin {
            let value_rng = &mut self.value_rng;
            *self.table.entry(r.clone()).or_insert_with(|| value_rng.gen())
        } else {
            self.f.eval(&r)?
        };
        Ok((r, y))
    }
}

#[derive(Debug, Clone)]
enum DecMode {
    Disabled,
    Enabled { excluded: Option<Vec<u8>> },
}

/// Encryption and decryption oracles for one phase of one player.
///
/// Decryption queries equal byte-for-byte to the excluded challenge are
/// answered with ⊥ and counted. When a shadow simulated oracle is attached,
/// every decryption query is answered by both and disagreements are counted.
pub struct ClassicalOracles {
    scheme: SchemeInstance,
    key: UdKey,
    enc_rng: Option<TrialRng>,
    dec: DecMode,
    shadow: Option<SimulatedDecryptionOracle>,
    stats: OracleStats,
}

impl ClassicalOracles {
    pub(crate) fn new(scheme: SchemeInstance, key: UdKey) -> Self {
        ClassicalOracles { scheme, key, enc_rng: None, dec: DecMode::Disabled, shadow: None, stats: OracleStats::default() }
    }

    pub(crate) fn with_encryption(mut self, rng: TrialRng) -> Self {
        self.enc_rng = Some(rng);
        self
    }

    pub(crate) fn with_decryption(mut self, excluded: Option<Vec<u8>>) -> Self {
        self.dec = DecMode::Enabled { excluded };
        self
    }

    pub(crate) fn with_shadow(mut self, shadow: Option<SimulatedDecryptionOracle>) -> Self {
        self.shadow = shadow;
        self
    }

    pub(crate) fn shadow(&self) -> Option<&SimulatedDecryptionOracle> {
        self.shadow.as_ref()
    }

    pub(crate) fn stats(&self) -> &OracleStats {
        &self.stats
    }

    pub fn scheme(&self) -> &dyn UdScheme {
        self.scheme.as_ref()
    }

    pub fn scheme_instance(&self) -> &SchemeInstance {
        &self.scheme
    }

    pub fn lambda(&self) -> usize {
        self.key.lambda
    }

    pub fn has_encryption(&self) -> bool {
        self.enc_rng.is_some()
    }

    pub fn has_decryption(&self) -> bool {
        matches!(self.dec, DecMode::Enabled { .. })
    }

    pub fn encrypt(&mut self, m: &BitString) -> Result<Ciphertext, GameError> {
        let rng = self.enc_rng.as_mut().ok_or(GameError::OracleUnavailable("encryption"))?;
        self.stats.enc_queries += 1;
        let c = self.scheme.encrypt(&self.key, m, rng)?;
        if let Some(shadow) = self.shadow.as_mut() {
            shadow.record(&c, m);
        }
        Ok(c)
    }

    pub fn decrypt(&mut self, c: &Ciphertext) -> Result<Option<BitString>, GameError> {
        let DecMode::Enabled { excluded } = &self.dec else {
            return Err(GameError::OracleUnavailable("decryption"));
        };
        self.stats.dec_queries += 1;
        let real = if excluded.as_deref() == Some(c.to_bytes().as_slice()) {
            self.stats.dec_excluded += 1;
            None
        } else {
            self.scheme.decrypt_key(&self.key, c)?
        };
        if real.is_none() {
            self.stats.dec_bottom += 1;
        }
        if let Some(shadow) = &self.shadow {
            self.stats.sim_checked += 1;
            if shadow.answer(c) != real {
                self.stats.sim_disagreements += 1;
            }
        }
        Ok(real)
    }

    /// Decrypts raw bytes; bytes that do not parse are ⊥.
    pub fn decrypt_bytes(&mut self, bytes: &[u8]) -> Result<Option<BitString>, GameError> {
        match Ciphertext::from_bytes(bytes) {
            Ok(c) => self.decrypt(&c),
            Err(_) => {
                if !self.has_decryption() {
                    return Err(GameError::OracleUnavailable("decryption"));
                }
                self.stats.dec_queries += 1;
                self.stats.dec_bottom += 1;
                Ok(None)
            }
        }
    }
}
