//! Ciphertext shapes and their byte encoding.
//!
//! Every encoding starts with a one-byte tag. A `Bit` body is a 2-byte LE
//! length `ℓ`, the packed `r`, and one byte holding `β` (0 or 1). Signed
//! variants append a 4-byte LE signature length and the signature after each
//! body. `SignedSeq` starts with the serial as a 2-byte LE bit length and its
//! packed bits, then a 4-byte LE item count.

use crate::bits::BitString;
use crate::signatures::Signature;

const TAG_BIT: u8 = 1;
const TAG_SEQ: u8 = 2;
const TAG_SIGNED_BIT: u8 = 3;
const TAG_SIGNED_SEQ: u8 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitCipher {
    pub r: BitString,
    pub beta: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedItem {
    pub inner: BitCipher,
    pub sig: Signature,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ciphertext {
    Bit(BitCipher),
    Seq(Vec<BitCipher>),
    SignedBit(SignedItem),
    SignedSeq { serial: BitString, items: Vec<SignedItem> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("truncated ciphertext")]
    Truncated,
    #[error("unknown ciphertext tag {0}")]
    UnknownTag(u8),
    #[error("plaintext-carrying byte must be 0 or 1")]
    BadBeta,
    #[error("trailing bytes after ciphertext")]
    Trailing,
}

impl BitCipher {
    pub fn new(r: BitString, beta: bool) -> Self {
        BitCipher { r, beta }
    }

    /// The `Bit` body without a tag. This is also the signed message for `SignedBit`.
    pub fn body_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(3 + self.r.len().div_ceil(8));
        self.write_body(&mut out);
        out
    }

    fn write_body(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.r.len() as u16).to_le_bytes());
        out.extend(self.r.to_packed());
        out.push(u8::from(self.beta));
    }
}

fn write_sig(sig: &Signature, out: &mut Vec<u8>) {
    out.extend_from_slice(&(sig.0.len() as u32).to_le_bytes());
    out.extend_from_slice(&sig.0);
}

/// Message signed for item `index` (1-based) of a `SignedSeq` of `total` items.
pub fn seq_item_message(item: &BitCipher, total: usize, index: usize, serial: &BitString) -> Vec<u8> {
    let mut out = item.body_bytes();
    out.extend_from_slice(&(total as u32).to_le_bytes());
    out.extend_from_slice(&(index as u32).to_le_bytes());
    out.extend_from_slice(&(serial.len() as u16).to_le_bytes());
    out.extend(serial.to_packed());
    out
}

impl Ciphertext {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Ciphertext::Bit(_) => "bit",
            Ciphertext::Seq(_) => "seq",
            Ciphertext::SignedBit(_) => "signed_bit",
            Ciphertext::SignedSeq { .. } => "signed_seq",
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        match self {
            Ciphertext::Bit(c) => {
                out.push(TAG_BIT);
                c.write_body(&mut out);
            }
            Ciphertext::Seq(items) => {
                out.push(TAG_SEQ);
                out.extend_from_slice(&(items.len() as u32).to_le_bytes());
                for c in items {
                    c.write_body(&mut out);
                }
            }
            Ciphertext::SignedBit(item) => {
                out.push(TAG_SIGNED_BIT);
                item.inner.write_body(&mut out);
                write_sig(&item.sig, &mut out);
            }
            Ciphertext::SignedSeq { serial, items } => {
                out.push(TAG_SIGNED_SEQ);
                out.extend_from_slice(&(serial.len() as u16).to_le_bytes());
                out.extend(serial.to_packed());
                out.extend_from_slice(&(items.len() as u32).to_le_bytes());
                for item in items {
                    item.inner.write_body(&mut out);
                    write_sig(&item.sig, &mut out);
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut rd = Reader { bytes, pos: 0 };
        let tag = rd.u8()?;
        let c = match tag {
            TAG_BIT => Ciphertext::Bit(rd.body()?),
            TAG_SEQ => {
                let count = rd.u32()? as usize;
                let mut items = Vec::with_capacity(count.min(1 << 16));
                for _ in 0..count {
                    items.push(rd.body()?);
                }
                Ciphertext::Seq(items)
            }
            TAG_SIGNED_BIT => {
                let inner = rd.body()?;
                let sig = rd.sig()?;
                Ciphertext::SignedBit(SignedItem { inner, sig })
            }
            TAG_SIGNED_SEQ => {
                let serial = rd.bits()?;
                let count = rd.u32()? as usize;
                let mut items = Vec::with_capacity(count.min(1 << 16));
                for _ in 0..count {
                    let inner = rd.body()?;
                    let sig = rd.sig()?;
                    items.push(SignedItem { inner, sig });
                }
                Ciphertext::SignedSeq { serial, items }
            }
            other => return Err(DecodeError::UnknownTag(other)),
        };
        if rd.pos != bytes.len() {
            return Err(DecodeError::Trailing);
        }
        Ok(c)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], DecodeError> {
        let end = self.pos.checked_add(n).ok_or(DecodeError::Truncated)?;
        let s = self.bytes.get(self.pos..end).ok_or(DecodeError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, DecodeError> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32, DecodeError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn bits(&mut self) -> Result<BitString, DecodeError> {
        let len = self.u16()? as usize;
        let packed = self.take(len.div_ceil(8))?;
        Ok(BitString::from_packed(packed, len).expect("length checked"))
    }

    fn body(&mut self) -> Result<BitCipher, DecodeError> {
        let r = self.bits()?;
        let beta = match self.u8()? {
            0 => false,
            1 => true,
            _ => return Err(DecodeError::BadBeta),
        };
        Ok(BitCipher { r, beta })
    }

    fn sig(&mut self) -> Result<Signature, DecodeError> {
        let len = self.u32()? as usize;
        Ok(Signature(self.take(len)?.to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bc(r: &str, beta: bool) -> BitCipher {
        BitCipher::new(r.parse().unwrap(), beta)
    }

    #[test]
    fn bit_layout() {
        let c = Ciphertext::Bit(bc("101", true));
        assert_eq!(c.to_bytes(), vec![1, 3, 0, 0b101, 1]);
    }

    #[test]
    fn all_shapes_round_trip() {
        let item = SignedItem { inner: bc("1100", false), sig: Signature(vec![9, 8, 7]) };
        let shapes = vec![
            Ciphertext::Bit(bc("10101010101", false)),
            Ciphertext::Seq(vec![bc("0", true), bc("1", false)]),
            Ciphertext::SignedBit(item.clone()),
            Ciphertext::SignedSeq { serial: "0110".parse().unwrap(), items: vec![item.clone(), item] },
        ];
        for c in shapes {
            assert_eq!(Ciphertext::from_bytes(&c.to_bytes()).unwrap(), c);
        }
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert_eq!(Ciphertext::from_bytes(&[]), Err(DecodeError::Truncated));
        assert_eq!(Ciphertext::from_bytes(&[9]), Err(DecodeError::UnknownTag(9)));
        assert_eq!(Ciphertext::from_bytes(&[1, 1, 0, 1, 2]), Err(DecodeError::BadBeta));
        assert_eq!(Ciphertext::from_bytes(&[1, 1, 0, 1, 1, 0]), Err(DecodeError::Trailing));
        assert_eq!(Ciphertext::from_bytes(&[2, 255, 255, 255, 255]), Err(DecodeError::Truncated));
    }

    #[test]
    fn padding_bits_are_ignored() {
        let c = Ciphertext::from_bytes(&[1, 3, 0, 0b1111_0101, 0]).unwrap();
        assert_eq!(c, Ciphertext::Bit(bc("101", false)));
    }
}
