//! Binary-output function families ("BBF"): sampling, evaluation, pairing and a
//! canonical descriptor encoding.
//!
//! `KeyedMix` evaluates `f_k(x) = LSB(SipHash-2-4_k(pad(x)))`, where `pad(x)` is
//! the packed input followed by one byte holding `len(x) mod 256`.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::prf::{sip64, SipKey};

pub const MIN_INPUT_LEN: usize = 8;
pub const MAX_INPUT_LEN: usize = u16::MAX as usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BbfFamily {
    KeyedMix,
    ConstantZero,
    Paired,
}

impl BbfFamily {
    pub fn tag(self) -> u8 {
        match self {
            BbfFamily::KeyedMix => 1,
            BbfFamily::ConstantZero => 2,
            BbfFamily::Paired => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            1 => Some(BbfFamily::KeyedMix),
            2 => Some(BbfFamily::ConstantZero),
            3 => Some(BbfFamily::Paired),
            _ => None,
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "keyed_mix" | "KeyedMix" => Some(BbfFamily::KeyedMix),
            "constant_zero" | "ConstantZero" => Some(BbfFamily::ConstantZero),
            "paired" | "Paired" => Some(BbfFamily::Paired),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BbfError {
    #[error("family {0:?} cannot be sampled directly")]
    UnsupportedFamily(BbfFamily),
    #[error("input length {got} does not match descriptor length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("security parameter {0} is out of range")]
    InvalidLambda(usize),
    #[error("malformed descriptor: {0}")]
    Malformed(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BbfDescriptor {
    family: BbfFamily,
    key: Vec<u8>,
    input_len: usize,
    subs: Option<Box<(BbfDescriptor, BbfDescriptor)>>,
}

impl BbfDescriptor {
    pub fn family(&self) -> BbfFamily {
        self.family
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn key(&self) -> &[u8] {
        &self.key
    }

    pub fn subs(&self) -> Option<(&BbfDescriptor, &BbfDescriptor)> {
        self.subs.as_deref().map(|(a, b)| (a, b))
    }

    /// Builds a `KeyedMix` descriptor from an explicit key.
    pub fn keyed_mix(key: SipKey, input_len: usize) -> Result<Self, BbfError> {
        check_len(input_len)?;
        Ok(BbfDescriptor { family: BbfFamily::KeyedMix, key: key.to_vec(), input_len, subs: None })
    }

    pub fn constant_zero(input_len: usize) -> Result<Self, BbfError> {
        check_len(input_len)?;
        Ok(BbfDescriptor { family: BbfFamily::ConstantZero, key: Vec::new(), input_len, subs: None })
    }

    pub fn eval(&self, x: &BitString) -> Result<bool, BbfError> {
        if x.len() != self.input_len {
            return Err(BbfError::LengthMismatch { expected: self.input_len, got: x.len() });
        }
        Ok(self.eval_unchecked(x.as_slice()))
    }

    fn eval_unchecked(&self, x: &[bool]) -> bool {
        match self.family {
            BbfFamily::ConstantZero => false,
            BbfFamily::KeyedMix => {
                let key: &SipKey = self.key.as_slice().try_into().expect("keyed mix key is 16 bytes");
                sip64(key, &pad(x)) & 1 == 1
            }
            BbfFamily::Paired => {
                let (f0, f1) = self.subs().expect("paired descriptor has two parts");
                if x[0] {
                    f1.eval_unchecked(&x[1..])
                } else {
                    f0.eval_unchecked(&x[1..])
                }
            }
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_bytes(&mut out);
        out
    }

    fn write_bytes(&self, out: &mut Vec<u8>) {
        out.push(self.family.tag());
        out.extend_from_slice(&(self.input_len as u16).to_le_bytes());
        out.extend_from_slice(&self.key);
        if let Some((a, b)) = self.subs() {
            a.write_bytes(out);
            b.write_bytes(out);
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, BbfError> {
        let (desc, used) = Self::read_bytes(bytes, 0)?;
        if used != bytes.len() {
            return Err(BbfError::Malformed("trailing bytes"));
        }
        Ok(desc)
    }

    fn read_bytes(bytes: &[u8], depth: usize) -> Result<(Self, usize), BbfError> {
        if depth > 8 {
            return Err(BbfError::Malformed("nesting too deep"));
        }
        if bytes.len() < 3 {
            return Err(BbfError::Malformed("truncated header"));
        }
        let family = BbfFamily::from_tag(bytes[0]).ok_or(BbfError::Malformed("unknown family tag"))?;
        let input_len = u16::from_le_bytes([bytes[1], bytes[2]]) as usize;
        let rest = &bytes[3..];
        match family {
            BbfFamily::KeyedMix => {
                let key: SipKey = rest
                    .get(..16)
                    .ok_or(BbfError::Malformed("truncated key"))?
                    .try_into()
                    .expect("16-byte slice");
                let desc = BbfDescriptor::keyed_mix(key, input_len).map_err(|_| BbfError::Malformed("bad length"))?;
                Ok((desc, 19))
            }
            BbfFamily::ConstantZero => {
                let desc = BbfDescriptor::constant_zero(input_len).map_err(|_| BbfError::Malformed("bad length"))?;
                Ok((desc, 3))
            }
            BbfFamily::Paired => {
                let (f0, a) = Self::read_bytes(rest, depth + 1)?;
                let (f1, b) = Self::read_bytes(&rest[a..], depth + 1)?;
                let desc = pair_compose(f0, f1).map_err(|_| BbfError::Malformed("mismatched pair"))?;
                if desc.input_len != input_len {
                    return Err(BbfError::Malformed("pair length disagrees with header"));
                }
                Ok((desc, 3 + a + b))
            }
        }
    }
}

fn check_len(input_len: usize) -> Result<(), BbfError> {
    if (1..=MAX_INPUT_LEN).contains(&input_len) {
        Ok(())
    } else {
        Err(BbfError::InvalidLambda(input_len))
    }
}

/// Packed bits followed by a single length byte (`len mod 256`).
pub fn pad(x: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; x.len().div_ceil(8) + 1];
    for (i, b) in x.iter().enumerate() {
        if *b {
            out[i / 8] |= 1 << (i % 8);
        }
    }
    *out.last_mut().expect("non-empty") = (x.len() & 0xff) as u8;
    out
}

/// Samples a member of `family` with input length `max(lambda, 8)`.
pub fn sample<R: RngCore + ?Sized>(family: BbfFamily, lambda: usize, rng: &mut R) -> Result<BbfDescriptor, BbfError> {
    if lambda == 0 || lambda > MAX_INPUT_LEN {
        return Err(BbfError::InvalidLambda(lambda));
    }
    let input_len = lambda.max(MIN_INPUT_LEN);
    match family {
        BbfFamily::KeyedMix => {
            let mut key = [0u8; 16];
            rng.fill_bytes(&mut key);
            BbfDescriptor::keyed_mix(key, input_len)
        }
        BbfFamily::ConstantZero => BbfDescriptor::constant_zero(input_len),
        BbfFamily::Paired => Err(BbfError::UnsupportedFamily(BbfFamily::Paired)),
    }
}

pub fn eval(f: &BbfDescriptor, x: &BitString) -> Result<bool, BbfError> {
    f.eval(x)
}

/// `f(0||x) = f0(x)`, `f(1||x) = f1(x)`.
pub fn pair_compose(f0: BbfDescriptor, f1: BbfDescriptor) -> Result<BbfDescriptor, BbfError> {
    if f0.input_len != f1.input_len {
        return Err(BbfError::LengthMismatch { expected: f0.input_len, got: f1.input_len });
    }
    let input_len = f0.input_len + 1;
    check_len(input_len)?;
    Ok(BbfDescriptor { family: BbfFamily::Paired, key: Vec::new(), input_len, subs: Some(Box::new((f0, f1))) })
}

/// Empirical `|Pr[f=0] - Pr[f=1]|` over uniform inputs.
pub fn balancedness_estimate<R: Rng + ?Sized>(f: &BbfDescriptor, trials: usize, rng: &mut R) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let ones = (0..trials)
        .filter(|_| f.eval(&BitString::random(f.input_len, rng)).expect("length matches"))
        .count();
    let zeros = trials - ones;
    (zeros as f64 - ones as f64).abs() / trials as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_zero_is_zero() {
        let f = sample(BbfFamily::ConstantZero, 8, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(f.input_len(), 8);
        assert!(!f.eval(&"10110011".parse().unwrap()).unwrap());
    }

    #[test]
    fn input_length_is_floored_at_eight() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample(BbfFamily::KeyedMix, 3, &mut rng).unwrap().input_len(), 8);
        assert_eq!(sample(BbfFamily::KeyedMix, 64, &mut rng).unwrap().input_len(), 64);
        assert_eq!(sample(BbfFamily::KeyedMix, 0, &mut rng), Err(BbfError::InvalidLambda(0)));
    }

    #[test]
    fn eval_rejects_wrong_length() {
        let f = sample(BbfFamily::KeyedMix, 64, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(
            f.eval(&BitString::zeros(63)),
            Err(BbfError::LengthMismatch { expected: 64, got: 63 })
        );
    }

    #[test]
    fn paired_routes_on_first_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f0 = sample(BbfFamily::KeyedMix, 16, &mut rng).unwrap();
        let f1 = sample(BbfFamily::KeyedMix, 16, &mut rng).unwrap();
        let f = pair_compose(f0.clone(), f1.clone()).unwrap();
        assert_eq!(f.input_len(), 17);
        for _ in 0..64 {
            let x = BitString::random(16, &mut rng);
            assert_eq!(f.eval(&x.prepend(false)).unwrap(), f0.eval(&x).unwrap());
            assert_eq!(f.eval(&x.prepend(true)).unwrap(), f1.eval(&x).unwrap());
        }
    }

    #[test]
    fn pair_compose_rejects_unequal_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f0 = sample(BbfFamily::KeyedMix, 16, &mut rng).unwrap();
        let f1 = sample(BbfFamily::KeyedMix, 17, &mut rng).unwrap();
        assert!(matches!(pair_compose(f0, f1), Err(BbfError::LengthMismatch { .. })));
    }

    #[test]
    fn paired_family_is_not_directly_sampleable() {
        let r = sample(BbfFamily::Paired, 8, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(r, Err(BbfError::UnsupportedFamily(BbfFamily::Paired)));
    }

    #[test]
    fn descriptor_bytes_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f0 = sample(BbfFamily::KeyedMix, 20, &mut rng).unwrap();
        let f1 = sample(BbfFamily::ConstantZero, 20, &mut rng).unwrap();
        let f = pair_compose(f0, f1).unwrap();
        let bytes = f.to_bytes();
        assert_eq!(bytes[0], 3);
        assert_eq!(u16::from_le_bytes([bytes[1], bytes[2]]), 21);
        assert_eq!(BbfDescriptor::from_bytes(&bytes).unwrap(), f);
        assert!(BbfDescriptor::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn pad_appends_length_byte() {
        let x: BitString = "101".parse().unwrap();
        assert_eq!(pad(x.as_slice()), vec![0b101, 3]);
        assert_eq!(pad(&[]), vec![0]);
    }

    #[test]
    fn keyed_mix_is_roughly_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = sample(BbfFamily::KeyedMix, 64, &mut rng).unwrap();
        assert!(balancedness_estimate(&f, 20_000, &mut rng) < 0.05);
    }
}
