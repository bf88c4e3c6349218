//! Thin wrappers over SipHash-2-4, the only keyed primitive in the crate.

use siphasher::sip::SipHasher24;
use siphasher::sip128::SipHasher24 as SipHasher24x128;

pub type SipKey = [u8; 16];

/// SipHash-2-4 with 64-bit output.
pub fn sip64(key: &SipKey, msg: &[u8]) -> u64 {
    SipHasher24::new_with_key(key).hash(msg)
}

/// SipHash-2-4 with 128-bit output, as 16 little-endian bytes.
pub fn sip128(key: &SipKey, msg: &[u8]) -> [u8; 16] {
    SipHasher24x128::new_with_key(key).hash(msg).as_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kat_key() -> SipKey {
        core::array::from_fn(|i| i as u8)
    }

    #[test]
    fn empty_message_vector() {
        assert_eq!(sip64(&kat_key(), &[]), 0x726f_db47_dd0e_0e31);
        assert_eq!(sip64(&kat_key(), &[]) & 1, 1);
    }

    #[test]
    fn fifteen_byte_vector() {
        let msg: Vec<u8> = (0..15).collect();
        assert_eq!(sip64(&kat_key(), &msg), 0xa129_ca61_49be_45e5);
    }

    #[test]
    fn wide_empty_message_vector() {
        assert_eq!(
            hex::encode(sip128(&kat_key(), &[])),
            "a3817f04ba25a8e66df67214c7550293"
        );
    }
}
