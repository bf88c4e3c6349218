use num_complex::Complex64;
use rand::Rng;

use super::subspace::{from_index, Subspace};
use super::{QuantumError, MAX_QUBITS, TOLERANCE};
use crate::bits::BitString;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self, QuantumError> {
        if n > MAX_QUBITS {
            return Err(QuantumError::DimensionTooLarge(n));
        }
        if amps.len() != 1 << n {
            return Err(QuantumError::DimensionMismatch { expected: 1 << n, got: amps.len() });
        }
        let sv = Statevector { n, amps };
        let norm = sv.norm_sqr();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(QuantumError::NotNormalized(format!("{norm}")));
        }
        Ok(sv)
    }

    pub fn basis_state(n: usize, index: u32) -> Result<Self, QuantumError> {
        if n > MAX_QUBITS {
            return Err(QuantumError::DimensionTooLarge(n));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        *amps.get_mut(index as usize).ok_or(QuantumError::DimensionMismatch { expected: 1 << n, got: index as usize })? =
            Complex64::new(1.0, 0.0);
        Ok(Statevector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: u32) -> Complex64 {
        self.amps[index as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }
}

/// `|A> = |A|^{-1/2} sum_{a in A} |a>`.
pub fn subspace_state(a: &Subspace) -> Result<Statevector, QuantumError> {
    let n = a.n();
    if n > MAX_QUBITS {
        return Err(QuantumError::DimensionTooLarge(n));
    }
    let amp = Complex64::new((0.5f64).powf(a.dim() as f64 / 2.0), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for idx in a.element_indices() {
        amps[idx as usize] = amp;
    }
    Ok(Statevector { n, amps })
}

/// `H^{⊗n}` via an in-place fast Walsh-Hadamard transform.
pub fn hadamard_all(sv: &Statevector) -> Statevector {
    let mut amps = sv.amps.clone();
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = 1;
    while h < amps.len() {
        for block in (0..amps.len()).step_by(2 * h) {
            for i in block..block + h {
                let (x, y) = (amps[i], amps[i + h]);
                amps[i] = (x + y) * scale;
                amps[i + h] = (x - y) * scale;
            }
        }
        h *= 2;
    }
    Statevector { n: sv.n, amps }
}

/// Samples a basis outcome with probability `|amp|^2`, returned coordinate-first.
pub fn measure_computational<R: Rng + ?Sized>(sv: &Statevector, rng: &mut R) -> Result<BitString, QuantumError> {
    let norm = sv.norm_sqr();
    if (norm - 1.0).abs() > TOLERANCE {
        return Err(QuantumError::NotNormalized(format!("{norm}")));
    }
    let u: f64 = rng.gen::<f64>() * norm;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, a) in sv.amps.iter().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            last_nonzero = i;
        }
        acc += p;
        if u < acc {
            return Ok(from_index(i as u32, sv.n));
        }
    }
    Ok(from_index(last_nonzero as u32, sv.n))
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &Statevector, b: &Statevector) -> Result<f64, QuantumError> {
    if a.n != b.n {
        return Err(QuantumError::DimensionMismatch { expected: a.n, got: b.n });
    }
    Ok(a.inner(b).norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random_subspace;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_qubit_plus_state() {
        let a = Subspace::full(1).unwrap();
        let sv = subspace_state(&a).unwrap();
        let h = (0.5f64).sqrt();
        assert!((sv.amplitude(0).re - h).abs() < 1e-12);
        assert!((sv.amplitude(1).re - h).abs() < 1e-12);
        let zero = hadamard_all(&sv);
        assert!((zero.amplitude(0).re - 1.0).abs() < 1e-12);
        assert!(zero.amplitude(1).norm() < 1e-12);
    }

    #[test]
    fn hadamard_maps_subspace_state_to_dual_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=8 {
            let a = random_subspace(n, n / 2, &mut rng).unwrap();
            let lhs = hadamard_all(&subspace_state(&a).unwrap());
            let rhs = subspace_state(&a.dual()).unwrap();
            assert!(fidelity(&lhs, &rhs).unwrap() >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn measurement_lands_in_subspace() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = random_subspace(6, 3, &mut rng).unwrap();
        let sv = subspace_state(&a).unwrap();
        for _ in 0..200 {
            let x = measure_computational(&sv, &mut rng).unwrap();
            assert!(a.contains(&x).unwrap());
        }
    }

    #[test]
    fn unnormalized_amplitudes_are_rejected() {
        let amps = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(matches!(Statevector::from_amplitudes(1, amps), Err(QuantumError::NotNormalized(_))));
    }

    #[test]
    fn too_many_qubits_is_rejected() {
        let a = Subspace::zero(16).unwrap();
        assert!(subspace_state(&a).is_ok());
        assert!(matches!(Statevector::basis_state(17, 0), Err(QuantumError::DimensionTooLarge(17))));
    }
}
