//! Hermitian qubit operators in the Pauli basis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::hamiltonian::BlochState;

/// `c0·𝕀 + c1·σ1 + c2·σ2 + c3·σ3` with real coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PauliOperator {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl PauliOperator {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const IDENTITY: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const SIGMA1: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const SIGMA2: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const SIGMA3: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(c0: f64, c1: f64, c2: f64, c3: f64) -> Self {
        Self { c0, c1, c2, c3 }
    }

    /// Length of the traceless part, `√(c1²+c2²+c3²)`.
    pub fn vector_norm(&self) -> f64 {
        (self.c1 * self.c1 + self.c2 * self.c2 + self.c3 * self.c3).sqrt()
    }

    /// `(c0 − |c|, c0 + |c|)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let r = self.vector_norm();
        (self.c0 - r, self.c0 + r)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(k * self.c0, k * self.c1, k * self.c2, k * self.c3)
    }

    /// `Tr[ρ A]` for `ρ = ½(𝕀 + n·σ)`.
    pub fn expectation(&self, state: &BlochState) -> f64 {
        let n = state.vector();
        self.c0 + self.c1 * n[0] + self.c2 * n[1] + self.c3 * n[2]
    }

    /// `Tr[ρ A²]`.
    pub fn second_moment(&self, state: &BlochState) -> f64 {
        // A² = (c0² + |c|²)𝕀 + 2c0 c·σ
        let n = state.vector();
        let v = self.vector_norm();
        self.c0 * self.c0
            + v * v
            + 2.0 * self.c0 * (self.c1 * n[0] + self.c2 * n[1] + self.c3 * n[2])
    }

    /// Row-major complex matrix.
    pub fn to_matrix(&self) -> [[Complex64; 2]; 2] {
        let i = Complex64::i();
        [
            [
                Complex64::from(self.c0 + self.c3),
                Complex64::from(self.c1) - i * self.c2,
            ],
            [
                Complex64::from(self.c1) + i * self.c2,
                Complex64::from(self.c0 - self.c3),
            ],
        ]
    }
}

impl std::ops::Add for PauliOperator {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.c0 + o.c0, self.c1 + o.c1, self.c2 + o.c2, self.c3 + o.c3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_and_moments() {
        let a = PauliOperator::new(1.0, 3.0, 0.0, 4.0);
        assert_eq!(a.eigenvalues(), (-4.0, 6.0));
        let s = BlochState::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(a.expectation(&s), 5.0);
        // |0⟩ is not an eigenvector: ⟨A²⟩ = 26 + 2·4 = 34
        assert_eq!(a.second_moment(&s), 34.0);
    }

    #[test]
    fn matrix_form() {
        let m = PauliOperator::SIGMA2.to_matrix();
        assert_eq!(m[0][1], Complex64::new(0.0, -1.0));
        assert_eq!(m[1][0], Complex64::new(0.0, 1.0));
        let m = (PauliOperator::IDENTITY + PauliOperator::SIGMA3).to_matrix();
        assert_eq!(m[0][0], Complex64::from(2.0));
        assert_eq!(m[1][1], Complex64::from(0.0));
    }
}
