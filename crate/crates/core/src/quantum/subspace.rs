use rand::RngCore;

use super::{QuantumError, MAX_QUBITS};
use crate::bits::BitString;

/// A linear subspace of GF(2)^n held as a canonical reduced row-echelon basis.
///
/// Rows are index-encoded vectors sorted by descending pivot (highest set bit);
/// every pivot column is zero in all other rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    n: usize,
    rows: Vec<u32>,
}

impl Subspace {
    pub fn zero(n: usize) -> Result<Self, QuantumError> {
        check_n(n)?;
        Ok(Subspace { n, rows: Vec::new() })
    }

    pub fn full(n: usize) -> Result<Self, QuantumError> {
        Subspace::from_indices(n, (0..n).map(|i| 1u32 << i))
    }

    /// Spans the given vectors (coordinate 0 first).
    pub fn from_vectors(n: usize, vectors: &[BitString]) -> Result<Self, QuantumError> {
        check_n(n)?;
        let mut idx = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != n {
                return Err(QuantumError::DimensionMismatch { expected: n, got: v.len() });
            }
            idx.push(to_index(v));
        }
        Subspace::from_indices(n, idx)
    }

    /// Spans the given index-encoded vectors.
    pub fn from_indices<I: IntoIterator<Item = u32>>(n: usize, vectors: I) -> Result<Self, QuantumError> {
        check_n(n)?;
        let mask = full_mask(n);
        let mut s = Subspace { n, rows: Vec::new() };
        for v in vectors {
            if v & !mask != 0 {
                return Err(QuantumError::DimensionMismatch { expected: n, got: 32 - v.leading_zeros() as usize });
            }
            s.insert(v);
        }
        Ok(s)
    }

    fn reduce(&self, mut v: u32) -> u32 {
        for &row in &self.rows {
            if v & pivot(row) != 0 {
                v ^= row;
            }
        }
        v
    }

    fn insert(&mut self, v: u32) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let p = pivot(v);
        for row in &mut self.rows {
            if *row & p != 0 {
                *row ^= v;
            }
        }
        self.rows.push(v);
        self.rows.sort_unstable_by(|a, b| b.cmp(a));
        true
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Index-encoded basis rows in canonical order.
    pub fn basis_indices(&self) -> &[u32] {
        &self.rows
    }

    pub fn basis(&self) -> Vec<BitString> {
        self.rows.iter().map(|&r| from_index(r, self.n)).collect()
    }

    pub fn contains_index(&self, x: u32) -> bool {
        x & !full_mask(self.n) == 0 && self.reduce(x) == 0
    }

    pub fn contains(&self, x: &BitString) -> Result<bool, QuantumError> {
        if x.len() != self.n {
            return Err(QuantumError::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok(self.contains_index(to_index(x)))
    }

    /// All `2^dim` members as basis indices, in no particular order.
    pub fn element_indices(&self) -> Vec<u32> {
        let mut out = vec![0u32];
        for &row in &self.rows {
            let extra: Vec<u32> = out.iter().map(|e| e ^ row).collect();
            out.extend(extra);
        }
        out
    }

    pub fn dual(&self) -> Subspace {
        let pivots: u32 = self.rows.iter().fold(0, |acc, &r| acc | pivot(r));
        let mut vectors = Vec::with_capacity(self.n - self.dim());
        for f in 0..self.n {
            let fbit = 1u32 << f;
            if pivots & fbit != 0 {
                continue;
            }
            let mut y = fbit;
            for &row in &self.rows {
                if row & fbit != 0 {
                    y |= pivot(row);
                }
            }
            vectors.push(y);
        }
        Subspace::from_indices(self.n, vectors).expect("dual vectors fit in n bits")
    }

    /// `n` byte, `dim` byte, then each basis row packed coordinate-first.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![self.n as u8, self.dim() as u8];
        let mut bits = BitString::new();
        for &r in &self.rows {
            bits = bits.concat(&from_index(r, self.n));
        }
        out.extend(bits.to_packed());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, QuantumError> {
        if bytes.len() < 2 {
            return Err(QuantumError::Malformed("truncated header"));
        }
        let (n, dim) = (bytes[0] as usize, bytes[1] as usize);
        check_n(n)?;
        if dim > n {
            return Err(QuantumError::Malformed("dimension exceeds ambient space"));
        }
        let bits = BitString::from_packed(&bytes[2..], n * dim).ok_or(QuantumError::Malformed("wrong body length"))?;
        let rows: Vec<BitString> = (0..dim).map(|i| bits.slice(i * n, (i + 1) * n)).collect();
        let s = Subspace::from_vectors(n, &rows)?;
        if s.dim() != dim || s.to_bytes() != bytes {
            return Err(QuantumError::Malformed("basis is not canonical"));
        }
        Ok(s)
    }
}

fn check_n(n: usize) -> Result<(), QuantumError> {
    if n > MAX_QUBITS {
        Err(QuantumError::DimensionTooLarge(n))
    } else {
        Ok(())
    }
}

fn full_mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn pivot(row: u32) -> u32 {
    1u32 << (31 - row.leading_zeros())
}

/// Coordinate `j` of an `n`-bit vector maps to bit `n-1-j` of the index.
pub(crate) fn to_index(x: &BitString) -> u32 {
    let n = x.len();
    x.iter().enumerate().fold(0u32, |acc, (j, b)| if b { acc | 1 << (n - 1 - j) } else { acc })
}

pub(crate) fn from_index(idx: u32, n: usize) -> BitString {
    BitString::from_bits((0..n).map(|j| (idx >> (n - 1 - j)) & 1 == 1))
}

pub fn dual(a: &Subspace) -> Subspace {
    a.dual()
}

pub fn membership(a: &Subspace, x: &BitString) -> Result<bool, QuantumError> {
    a.contains(x)
}

/// Uniform subspace of dimension `dim`, built from random vectors until the span is large enough.
pub fn random_subspace<R: RngCore + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Result<Subspace, QuantumError> {
    check_n(n)?;
    if dim > n {
        return Err(QuantumError::DimensionMismatch { expected: n, got: dim });
    }
    let mut s = Subspace::zero(n)?;
    let mask = full_mask(n);
    while s.dim() < dim {
        s.insert(rng.next_u32() & mask);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn span_of_single_vector_has_complementary_dual() {
        let a = Subspace::from_vectors(2, &[bs("10")]).unwrap();
        assert_eq!(a.basis_indices(), &[2]);
        let d = a.dual();
        assert_eq!(d.basis(), vec![bs("01")]);
    }

    #[test]
    fn diagonal_line_is_self_dual() {
        let a = Subspace::from_vectors(2, &[bs("11")]).unwrap();
        assert_eq!(a.dual(), a);
    }

    #[test]
    fn rref_is_canonical() {
        let a = Subspace::from_vectors(3, &[bs("110"), bs("011")]).unwrap();
        let b = Subspace::from_vectors(3, &[bs("101"), bs("110")]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.basis(), vec![bs("101"), bs("011")]);
    }

    #[test]
    fn wrong_length_is_rejected() {
        let r = Subspace::from_vectors(3, &[bs("10")]);
        assert_eq!(r, Err(QuantumError::DimensionMismatch { expected: 3, got: 2 }));
        assert!(matches!(Subspace::zero(17), Err(QuantumError::DimensionTooLarge(17))));
    }

    #[test]
    fn bytes_round_trip() {
        let a = Subspace::from_vectors(5, &[bs("10011"), bs("01110")]).unwrap();
        let bytes = a.to_bytes();
        assert_eq!(&bytes[..2], &[5, 2]);
        assert_eq!(Subspace::from_bytes(&bytes).unwrap(), a);
    }

    #[test]
    fn elements_enumerate_the_span() {
        let a = Subspace::from_vectors(4, &[bs("1100"), bs("0011")]).unwrap();
        let mut e = a.element_indices();
        e.sort_unstable();
        assert_eq!(e, vec![0b0000, 0b0011, 0b1100, 0b1111]);
    }
}
