use std::collections::HashMap;

use crate::bits::BitString;
use crate::schemes::Ciphertext;

/// Decryption by lookup: remembers every ciphertext the encryption oracle
/// produced and answers ⊥ for anything else.
#[derive(Debug, Clone, Default)]
pub struct SimulatedDecryptionOracle {
    log: HashMap<Vec<u8>, BitString>,
}

impl SimulatedDecryptionOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, c: &Ciphertext, m: &BitString) {
        self.log.insert(c.to_bytes(), m.clone());
    }

    pub fn answer(&self, c: &Ciphertext) -> Option<BitString> {
        self.log.get(&c.to_bytes()).cloned()
    }

    pub fn len(&self) -> usize {
        self.log.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::BitCipher;

    fn bit(r: &str, beta: bool) -> Ciphertext {
        Ciphertext::Bit(BitCipher::new(r.parse().unwrap(), beta))
    }

    #[test]
    fn empty_log_answers_bottom() {
        let o = SimulatedDecryptionOracle::new();
        assert!(o.is_empty());
        assert_eq!(o.answer(&bit("0101", true)), None);
    }

    #[test]
    fn logged_cipher_returns_its_plaintext() {
        let mut o = SimulatedDecryptionOracle::new();
        let c = bit("0101", true);
        o.record(&c, &BitString::single(false));
        assert_eq!(o.answer(&c), Some(BitString::single(false)));
        assert_eq!(o.answer(&bit("0101", false)), None);
        assert_eq!(o.len(), 1);
    }
}
