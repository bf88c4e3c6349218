//! An independent SipHash-2-4 written from the published algorithm, used as an
//! oracle for the crate's wrappers.

use proptest::prelude::*;
use udlab::prf::{sip128, sip64};

struct State([u64; 4]);

impl State {
    fn new(key: &[u8; 16], wide: bool) -> Self {
        let k0 = u64::from_le_bytes(key[..8].try_into().unwrap());
        let k1 = u64::from_le_bytes(key[8..].try_into().unwrap());
        let mut v = [
            k0 ^ 0x736f_6d65_7073_6575,
            k1 ^ 0x646f_7261_6e64_6f6d,
            k0 ^ 0x6c79_6765_6e65_7261,
            k1 ^ 0x7465_6462_7974_6573,
        ];
        if wide {
            v[1] ^= 0xee;
        }
        State(v)
    }

    fn round(&mut self) {
        let v = &mut self.0;
        v[0] = v[0].wrapping_add(v[1]);
        v[1] = v[1].rotate_left(13) ^ v[0];
        v[0] = v[0].rotate_left(32);
        v[2] = v[2].wrapping_add(v[3]);
        v[3] = v[3].rotate_left(16) ^ v[2];
        v[0] = v[0].wrapping_add(v[3]);
        v[3] = v[3].rotate_left(21) ^ v[0];
        v[2] = v[2].wrapping_add(v[1]);
        v[1] = v[1].rotate_left(17) ^ v[2];
        v[2] = v[2].rotate_left(32);
    }

    fn absorb(&mut self, m: u64) {
        self.0[3] ^= m;
        self.round();
        self.round();
        self.0[0] ^= m;
    }

    fn squeeze(&mut self, marker: u64) -> u64 {
        self.0[2] ^= marker;
        for _ in 0..4 {
            self.round();
        }
        self.0.iter().fold(0, |a, b| a ^ b)
    }
}

fn reference(key: &[u8; 16], msg: &[u8], wide: bool) -> Vec<u8> {
    let mut s = State::new(key, wide);
    let mut chunks = msg.chunks_exact(8);
    for c in &mut chunks {
        s.absorb(u64::from_le_bytes(c.try_into().unwrap()));
    }
    let mut last = [0u8; 8];
    last[..chunks.remainder().len()].copy_from_slice(chunks.remainder());
    last[7] = msg.len() as u8;
    s.absorb(u64::from_le_bytes(last));
    let mut out = s.squeeze(if wide { 0xee } else { 0xff }).to_le_bytes().to_vec();
    if wide {
        s.0[1] ^= 0xdd;
        out.extend_from_slice(&s.squeeze(0).to_le_bytes());
    }
    out
}

fn key() -> [u8; 16] {
    std::array::from_fn(|i| i as u8)
}

#[test]
fn reference_matches_published_vectors() {
    let msg: Vec<u8> = (0..15).collect();
    assert_eq!(reference(&key(), &msg, false), 0xa129_ca61_49be_45e5u64.to_le_bytes());
    assert_eq!(hex::encode(reference(&key(), &[], true)), "a3817f04ba25a8e66df67214c7550293");
}

proptest! {
    #[test]
    fn narrow_output_agrees(k in any::<[u8; 16]>(), msg in proptest::collection::vec(any::<u8>(), 0..80)) {
        prop_assert_eq!(sip64(&k, &msg).to_le_bytes().to_vec(), reference(&k, &msg, false));
    }

    #[test]
    fn wide_output_agrees(k in any::<[u8; 16]>(), msg in proptest::collection::vec(any::<u8>(), 0..80)) {
        prop_assert_eq!(sip128(&k, &msg).to_vec(), reference(&k, &msg, true));
    }
}
