//! Unitary evolution under the time-independent Hamiltonian and the QFI of
//! evolved superpositions of its eigenstates.
//!
//! A state prepared as `cos(θ/2)|ψ−⟩ + e^{iφ} sin(θ/2)|ψ+⟩` in the λ-dependent
//! eigenbasis evolves into
//!
//! ```text
//! |ψθ(t)⟩ = cos(θ/2) e^{−ih−t}|ψ−⟩ + e^{iφ} sin(θ/2) e^{−ih+t}|ψ+⟩
//! ```
//!
//! Its QFI is
//!
//! ```text
//! H_t = H₀[1 − sin²θ sin²φ'] + t² sin²θ (∂gap)² + t·ϑ'·sin2θ·sinφ'·∂gap,
//! φ' = φ − gap·t,   ϑ' = −(Δ∂γ − γ∂Δ)/(γ²+Δ²)
//! ```
//!
//! which reduces to the ground-state value `H₀` for real superpositions at
//! `t = 0` (and for eigenstates at any `t`), but not in general: the relative
//! phase `gap·t` depends on λ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{BlochState, CoefficientBundle, DerivativeBundle, TwoLevelModel};
use crate::metrology::{fidelity_qfi_refined, qfi_ground};

/// A 2×2 complex matrix that is unitary to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitUnitary {
    m: [[Complex64; 2]; 2],
}

impl QubitUnitary {
    pub const IDENTITY: Self = Self {
        m: [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ],
    };

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn apply(&self, v: &[Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn adjoint(&self) -> Self {
        let m = self.m;
        Self {
            m: [
                [m[0][0].conj(), m[1][0].conj()],
                [m[0][1].conj(), m[1][1].conj()],
            ],
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        let (a, b) = (self.m, other.m);
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                *out = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self { m }
    }

    /// Largest entrywise deviation of `U·U†` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.compose(&self.adjoint());
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p.m[i][j] - target).norm());
            }
        }
        worst
    }
}

/// `sin(z)/z`, by series below |z| = 10⁻⁴.
pub(crate) fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// `U_t = exp(−iHt) = e^{−iω0t}[cos(tR)𝕀 − i t·sinc(tR)(Δσ3 − γσ1)]`.
pub fn evolution_operator(c: &CoefficientBundle, t: f64) -> QubitUnitary {
    let r = c.half_gap();
    let cos = (t * r).cos();
    let s = t * sinc(t * r);
    let phase = Complex64::from_polar(1.0, -c.omega0 * t);
    let i = Complex64::i();
    // −i s (Δσ3 − γσ1)
    let m = [
        [Complex64::from(cos) - i * s * c.delta, i * s * c.gamma],
        [i * s * c.gamma, Complex64::from(cos) + i * s * c.delta],
    ];
    QubitUnitary {
        m: [
            [phase * m[0][0], phase * m[0][1]],
            [phase * m[1][0], phase * m[1][1]],
        ],
    }
}

/// Initial superposition angles and evolution time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionSpec {
    pub theta: f64,
    pub phi: f64,
    pub time: f64,
}

impl SuperpositionSpec {
    /// Requires `θ ∈ [0, π]`, `φ ∈ [0, 2π)` and a finite time.
    pub fn new(theta: f64, phi: f64, time: f64) -> Result<Self> {
        use std::f64::consts::{PI, TAU};
        if !(0.0..=PI).contains(&theta) || !(0.0..TAU).contains(&phi) || !time.is_finite() {
            return Err(Error::InvalidInput(format!(
                "superposition needs theta in [0, pi], phi in [0, 2pi), finite t; got ({theta}, {phi}, {time})"
            )));
        }
        Ok(Self { theta, phi, time })
    }
}

/// Constant phases `(α−, α+)` multiplying the eigenvectors.
///
/// A common phase leaves the QFI unchanged; a relative phase acts as a shift
/// of φ. The default is the real half-angle gauge.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EigenGauge {
    pub ground_phase: f64,
    pub excited_phase: f64,
}

/// `(|ψ−⟩, |ψ+⟩)` in the computational basis.
///
/// Uses the half-angle form `|ψ−⟩ = (cos ϑ/2, sin ϑ/2)`, `ϑ = atan2(γ, −Δ)`,
/// which is smooth in λ up to a simultaneous sign flip of both vectors.
pub fn eigenbasis(c: &CoefficientBundle, gauge: EigenGauge) -> Result<([Complex64; 2], [Complex64; 2])> {
    c.require_nondegenerate()?;
    let half = 0.5 * c.gamma.atan2(-c.delta);
    let (s, co) = half.sin_cos();
    let a = Complex64::from_polar(1.0, gauge.ground_phase);
    let b = Complex64::from_polar(1.0, gauge.excited_phase);
    Ok(([a * co, a * s], [-b * s, b * co]))
}

/// Evolved state in both bases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolvedState {
    /// Amplitudes on `(|ψ−⟩, |ψ+⟩)`.
    pub amplitudes: [Complex64; 2],
    /// Components on the computational basis.
    pub vector: [Complex64; 2],
    pub bloch: BlochState,
}

fn evolve_with_gauge(c: &CoefficientBundle, spec: &SuperpositionSpec, gauge: EigenGauge) -> Result<EvolvedState> {
    let (g, e) = eigenbasis(c, gauge)?;
    let r = c.half_gap();
    let (hm, hp) = (c.omega0 - r, c.omega0 + r);
    let t = spec.time;
    let a = Complex64::from_polar((0.5 * spec.theta).cos(), -hm * t);
    let b = Complex64::from_polar((0.5 * spec.theta).sin(), spec.phi - hp * t);
    let vector = [a * g[0] + b * e[0], a * g[1] + b * e[1]];
    Ok(EvolvedState {
        amplitudes: [a, b],
        vector,
        bloch: bloch_of(&vector),
    })
}

pub(crate) fn bloch_of(v: &[Complex64; 2]) -> BlochState {
    let x = v[0].conj() * v[1];
    let n = [
        2.0 * x.re,
        2.0 * x.im,
        v[0].norm_sqr() - v[1].norm_sqr(),
    ];
    BlochState::from_array_unchecked(n)
}

/// `|ψθ(t)⟩` for the eigenbasis at the given coefficients.
pub fn evolve_superposition(c: &CoefficientBundle, spec: &SuperpositionSpec) -> Result<EvolvedState> {
    evolve_with_gauge(c, spec, EigenGauge::default())
}

/// QFI of `|ψθ(t; λ)⟩` by the fidelity method, differentiating eigenbasis
/// and evolution phases together.
pub fn qfi_evolved<M: TwoLevelModel + ?Sized>(model: &M, lambda: f64, spec: &SuperpositionSpec) -> Result<f64> {
    qfi_evolved_with_gauge(model, lambda, spec, EigenGauge::default())
}

pub fn qfi_evolved_with_gauge<M: TwoLevelModel + ?Sized>(
    model: &M,
    lambda: f64,
    spec: &SuperpositionSpec,
    gauge: EigenGauge,
) -> Result<f64> {
    model
        .domain()
        .require_stencil(lambda, crate::metrology::default_fidelity_step(lambda))?;
    fidelity_qfi_refined(
        |l| evolve_with_gauge(&model.coefficients(l), spec, gauge).map(|s| s.vector),
        lambda,
    )
}

/// Closed-form QFI of the evolved superposition (see the module docs).
pub fn qfi_evolved_closed_form(
    c: &CoefficientBundle,
    d: &DerivativeBundle,
    spec: &SuperpositionSpec,
) -> Result<f64> {
    let h0 = qfi_ground(c, d)?;
    let r = c.half_gap();
    let rr = r * r;
    let dtheta = -(c.delta * d.d_gamma - c.gamma * d.d_delta) / rr;
    let gap = 2.0 * r;
    let dgap = 2.0 * (c.gamma * d.d_gamma + c.delta * d.d_delta) / r;
    let t = spec.time;
    let (s, co) = spec.theta.sin_cos();
    let sp = (spec.phi - gap * t).sin();
    Ok(h0 * (1.0 - s * s * sp * sp) + t * t * s * s * dgap * dgap + t * dtheta * 2.0 * s * co * sp * dgap)
}
