//! Quantum and classical Fisher information for ground and thermal states.
//!
//! All closed forms are written in terms of `R = √(γ²+Δ²)` and the
//! combination `N = Δ∂γ − γ∂Δ` rather than the ratio `x = γ/Δ`, so they stay
//! finite at `Δ = 0` and keep their meaning when `Δ < 0`.
//!
//! | quantity | closed form |
//! |---|---|
//! | ground QFI `H₀` | `N²/R⁴` |
//! | SLD | `(N/R³)(Δσ1 + γσ3)` |
//! | projective Fisher `F` | `H₀·g` |
//! | thermal QFI | `(γ∂γ+Δ∂Δ)²/R² · β²/cosh²(βR) + H₀·tanh²(βR)` |

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{
    check_beta, ground_direction, polarization, CoefficientBundle, DerivativeBundle, TwoLevelModel,
};
use crate::pauli::PauliOperator;

/// Below this value of `1 − (n·r)²` an outcome is treated as certain.
const DETERMINISTIC_EPS: f64 = 1e-24;

/// Unit Bloch vector of the projective measurement `{Π, 𝕀 − Π}`, `Π = ½(𝕀 + r·σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct MeasurementDirection {
    r: [f64; 3],
}

impl MeasurementDirection {
    /// Normalizes `(r1, r2, r3)`; fails on a zero or non-finite vector.
    pub fn new(r1: f64, r2: f64, r3: f64) -> Result<Self> {
        let n = (r1 * r1 + r2 * r2 + r3 * r3).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidInput(format!(
                "measurement direction ({r1}, {r2}, {r3}) cannot be normalized"
            )));
        }
        Ok(Self {
            r: [r1 / n, r2 / n, r3 / n],
        })
    }

    /// `σθ = sinθ·σ1 + cosθ·σ3`, the optimal family.
    pub fn in_xz_plane(theta: f64) -> Self {
        Self {
            r: [theta.sin(), 0.0, theta.cos()],
        }
    }

    pub const SIGMA1: Self = Self { r: [1.0, 0.0, 0.0] };
    pub const SIGMA2: Self = Self { r: [0.0, 1.0, 0.0] };
    pub const SIGMA3: Self = Self { r: [0.0, 0.0, 1.0] };

    pub fn components(&self) -> [f64; 3] {
        self.r
    }
    pub fn r1(&self) -> f64 {
        self.r[0]
    }
    pub fn r2(&self) -> f64 {
        self.r[1]
    }
    pub fn r3(&self) -> f64 {
        self.r[2]
    }
}

impl TryFrom<[f64; 3]> for MeasurementDirection {
    type Error = Error;
    fn try_from(r: [f64; 3]) -> Result<Self> {
        Self::new(r[0], r[1], r[2])
    }
}

impl From<MeasurementDirection> for [f64; 3] {
    fn from(r: MeasurementDirection) -> Self {
        r.r
    }
}

/// Thermal QFI split into population (classical) and eigenvector (quantum) parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherBreakdown {
    #[serde(rename = "H_total")]
    pub total: f64,
    #[serde(rename = "H_classical")]
    pub classical: f64,
    #[serde(rename = "H_quantum")]
    pub quantum: f64,
    pub k_c: f64,
    pub k_q: f64,
}

/// `N = Δ∂γ − γ∂Δ`.
fn transverse_rate(c: &CoefficientBundle, d: &DerivativeBundle) -> f64 {
    c.delta * d.d_gamma - c.gamma * d.d_delta
}

/// `γ∂γ + Δ∂Δ = R·∂R`.
fn radial_rate(c: &CoefficientBundle, d: &DerivativeBundle) -> f64 {
    c.gamma * d.d_gamma + c.delta * d.d_delta
}

/// Symmetric logarithmic derivative of the ground state, `L = ∂λn·σ`.
pub fn sld_ground(c: &CoefficientBundle, d: &DerivativeBundle) -> Result<PauliOperator> {
    c.require_nondegenerate()?;
    let r = c.half_gap();
    let k = transverse_rate(c, d) / (r * r * r);
    Ok(PauliOperator::new(0.0, k * c.delta, 0.0, k * c.gamma))
}

/// Zero-temperature QFI `(Δ∂γ − γ∂Δ)²/(γ²+Δ²)²`. Independent of ω0.
pub fn qfi_ground(c: &CoefficientBundle, d: &DerivativeBundle) -> Result<f64> {
    c.require_nondegenerate()?;
    let r2 = c.gamma * c.gamma + c.delta * c.delta;
    let n = transverse_rate(c, d);
    Ok((n / r2) * (n / r2))
}

/// Ground eigenvector of the explicit matrix `[[Δ, −γ], [−γ, −Δ]]`, solved
/// directly from `(H − h−)v = 0`.
fn ground_vector_from_matrix(c: &CoefficientBundle) -> Result<[Complex64; 2]> {
    c.require_nondegenerate()?;
    let (a, b, dd) = (c.delta, -c.gamma, -c.delta);
    let h = -(a * a + b * b).sqrt();
    // two rows of the null-space condition; keep the better conditioned one
    let v1 = [b, h - a];
    let v2 = [h - dd, b];
    let n1 = v1[0].hypot(v1[1]);
    let n2 = v2[0].hypot(v2[1]);
    let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
    Ok([Complex64::from(v[0] / n), Complex64::from(v[1] / n)])
}

/// `1 − |⟨a|b⟩|²` for normalized qubit vectors, via `|a1 b2 − a2 b1|²`.
pub(crate) fn infidelity(a: &[Complex64; 2], b: &[Complex64; 2]) -> f64 {
    (a[0] * b[1] - a[1] * b[0]).norm_sqr()
}

/// Symmetric fidelity estimate `4[1 − |⟨ψ(λ±δ)|ψ(λ)⟩|²]/δ²`, averaged over ±δ.
pub(crate) fn fidelity_qfi<F>(state: F, lambda: f64, dlambda: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<[Complex64; 2]>,
{
    let at = state(lambda)?;
    let plus = state(lambda + dlambda)?;
    let minus = state(lambda - dlambda)?;
    let s = dlambda * dlambda;
    Ok(2.0 * (infidelity(&plus, &at) + infidelity(&minus, &at)) / s)
}

/// Applies the default step `10⁻⁴·max(1, |λ|)` and Richardson-refines when
/// the δ and δ/2 estimates disagree by more than 10⁻⁴ relative.
pub(crate) fn fidelity_qfi_refined<F>(state: F, lambda: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<[Complex64; 2]>,
{
    let h = default_fidelity_step(lambda);
    let coarse = fidelity_qfi(&state, lambda, h)?;
    let fine = fidelity_qfi(&state, lambda, 0.5 * h)?;
    if (coarse - fine).abs() <= 1e-4 * coarse.abs().max(fine.abs()) {
        Ok(coarse)
    } else {
        Ok((4.0 * fine - coarse) / 3.0)
    }
}

pub fn default_fidelity_step(lambda: f64) -> f64 {
    1e-4 * lambda.abs().max(1.0)
}

/// Ground-state QFI from the fidelity between neighbouring ground states.
///
/// The eigenvectors come from the explicit 2×2 matrix, so this shares no code
/// path with [`qfi_ground`].
pub fn qfi_fidelity_oracle<M: TwoLevelModel + ?Sized>(
    model: &M,
    lambda: f64,
    dlambda: f64,
) -> Result<f64> {
    if !(dlambda > 0.0 && dlambda.is_finite()) {
        return Err(Error::InvalidInput(format!("step must be positive, got {dlambda}")));
    }
    model.domain().require_stencil(lambda, dlambda)?;
    fidelity_qfi(
        |l| ground_vector_from_matrix(&model.coefficients(l)),
        lambda,
        dlambda,
    )
}

/// [`qfi_fidelity_oracle`] with the default step and Richardson refinement.
pub fn qfi_fidelity_oracle_default<M: TwoLevelModel + ?Sized>(model: &M, lambda: f64) -> Result<f64> {
    model
        .domain()
        .require_stencil(lambda, default_fidelity_step(lambda))?;
    fidelity_qfi_refined(|l| ground_vector_from_matrix(&model.coefficients(l)), lambda)
}

/// Probability of outcome `Π` on the ground state, `½(1 + n·r)`.
pub fn outcome_probability(c: &CoefficientBundle, r: &MeasurementDirection) -> Result<f64> {
    c.require_nondegenerate()?;
    let n = ground_direction(c);
    let m = n[0] * r.r1() + n[1] * r.r2() + n[2] * r.r3();
    Ok((0.5 * (1.0 + m)).clamp(0.0, 1.0))
}

/// Efficiency `F/H = (r1 + x·r3)²/[1 + x² − (x·r1 − r3)²]`.
///
/// The denominator is evaluated as `(1+x²)r2² + (r1 + x r3)²`, equal for unit `r`.
pub fn g_function(x: f64, r: &MeasurementDirection) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("x must be finite, got {x}")));
    }
    let [r1, r2, r3] = r.components();
    let u = r1 + x * r3;
    let den = (1.0 + x * x) * r2 * r2 + u * u;
    if den <= DETERMINISTIC_EPS * (1.0 + x * x) {
        let q = 0.5 * (1.0 + (x * r1 - r3) / (1.0 + x * x).sqrt());
        return Err(Error::DeterministicOutcome { q: q.round() });
    }
    Ok(u * u / den)
}

/// Δ-safe efficiency `(Δr1 + γr3)²/[R²r2² + (Δr1 + γr3)²]`; equals
/// `g(γ/Δ, r)` for every `Δ ≠ 0`.
fn efficiency(c: &CoefficientBundle, r: &MeasurementDirection) -> Option<f64> {
    let [r1, r2, r3] = r.components();
    let u = c.delta * r1 + c.gamma * r3;
    let r2sq = c.gamma * c.gamma + c.delta * c.delta;
    let den = r2sq * r2 * r2 + u * u;
    (den > DETERMINISTIC_EPS * r2sq).then(|| u * u / den)
}

/// `1 − (n·r)²` with `n` the unit ground direction, as `|n × r|²`.
fn one_minus_m_sq(c: &CoefficientBundle, r: &MeasurementDirection) -> f64 {
    let [r1, r2, r3] = r.components();
    let rr = c.gamma * c.gamma + c.delta * c.delta;
    let u = c.delta * r1 + c.gamma * r3;
    (rr * r2 * r2 + u * u) / rr
}

/// Classical Fisher information of a projective measurement on the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectiveFisher {
    /// `(∂λq)²/[q(1−q)]`.
    pub direct: f64,
    /// `H₀·g`.
    pub via_qfi: f64,
}

impl ProjectiveFisher {
    pub fn value(&self) -> f64 {
        self.direct
    }
}

/// `F = (∂q)²/q(1−q)`, cross-checked against `H₀·g` to 10⁻⁸ of `H₀`.
pub fn fisher_projective(
    c: &CoefficientBundle,
    d: &DerivativeBundle,
    r: &MeasurementDirection,
) -> Result<ProjectiveFisher> {
    c.require_nondegenerate()?;
    let denom = one_minus_m_sq(c, r);
    if denom <= DETERMINISTIC_EPS {
        return Err(Error::DeterministicOutcome {
            q: outcome_probability(c, r)?.round(),
        });
    }
    let rr = c.half_gap();
    let [r1, _, r3] = r.components();
    // m = n·r = s/R; ∂m = (∂s·R − s·∂R)/R²
    let s = c.gamma * r1 - c.delta * r3;
    let ds = r1 * d.d_gamma - r3 * d.d_delta;
    let dr = radial_rate(c, d) / rr;
    let dm = (ds * rr - s * dr) / (rr * rr);
    // (∂q)² / q(1−q) with ∂q = ∂m/2 and q(1−q) = (1 − m²)/4
    let direct = dm * dm / denom;

    let h = qfi_ground(c, d)?;
    let g = efficiency(c, r).ok_or(Error::DeterministicOutcome {
        q: outcome_probability(c, r)?.round(),
    })?;
    let via_qfi = h * g;
    if (direct - via_qfi).abs() > 1e-8 * h.max(f64::MIN_POSITIVE) + 1e-300 {
        return Err(Error::Precondition(format!(
            "internal consistency: direct F = {direct} but H*g = {via_qfi}"
        )));
    }
    Ok(ProjectiveFisher { direct, via_qfi })
}

/// `(k_C, k_Q) = (β²/cosh²(βR), tanh²(βR))`.
fn temperature_factors(c: &CoefficientBundle, beta: f64) -> (f64, f64) {
    let t = polarization(c, beta);
    let x = beta * c.half_gap();
    let k_c = if beta.is_infinite() || x > 350.0 {
        0.0
    } else {
        let sech = 1.0 / x.cosh();
        beta * beta * sech * sech
    };
    (k_c, t * t)
}

/// QFI of the Gibbs state at inverse temperature β.
pub fn thermal_qfi(c: &CoefficientBundle, d: &DerivativeBundle, beta: f64) -> Result<FisherBreakdown> {
    check_beta(beta)?;
    c.require_nondegenerate()?;
    let (k_c, k_q) = temperature_factors(c, beta);
    let rr = c.gamma * c.gamma + c.delta * c.delta;
    let p = radial_rate(c, d);
    let classical = p * p / rr * k_c;
    let quantum = qfi_ground(c, d)? * k_q;
    Ok(FisherBreakdown {
        total: classical + quantum,
        classical,
        quantum,
        k_c,
        k_q,
    })
}

/// `q_β = ½ + (q − ½)·tanh(β√(γ²+Δ²))`.
pub fn thermal_outcome_probability(
    c: &CoefficientBundle,
    beta: f64,
    r: &MeasurementDirection,
) -> Result<f64> {
    check_beta(beta)?;
    let q = outcome_probability(c, r)?;
    Ok(0.5 + (q - 0.5) * polarization(c, beta))
}

/// Fisher information of a projective measurement on the Gibbs state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalFisher {
    /// Exact `(∂q_β)²/[q_β(1−q_β)]`.
    pub value: f64,
    /// `(r1∂γ − r3∂Δ)²`, the coefficient of β² as β → 0.
    pub small_beta_coefficient: f64,
}

pub fn thermal_fisher(
    c: &CoefficientBundle,
    d: &DerivativeBundle,
    beta: f64,
    r: &MeasurementDirection,
) -> Result<ThermalFisher> {
    check_beta(beta)?;
    c.require_nondegenerate()?;
    let [r1, _, r3] = r.components();
    let lead = r1 * d.d_gamma - r3 * d.d_delta;
    let small_beta_coefficient = lead * lead;
    if beta == 0.0 {
        return Ok(ThermalFisher {
            value: 0.0,
            small_beta_coefficient,
        });
    }
    let rr = c.half_gap();
    let s = c.gamma * r1 - c.delta * r3;
    let m = s / rr;
    let dr = radial_rate(c, d) / rr;
    let dm = transverse_rate(c, d) * (c.delta * r1 + c.gamma * r3) / (rr * rr * rr);
    let t = polarization(c, beta);
    let (sech_sq, dt) = if beta.is_infinite() || beta * rr > 350.0 {
        (0.0, 0.0)
    } else {
        let sech = 1.0 / (beta * rr).cosh();
        (sech * sech, sech * sech * beta * dr)
    };
    // 1 − T²m² = sech² + T²(1 − m²)
    let denom = sech_sq + t * t * one_minus_m_sq(c, r);
    if denom <= DETERMINISTIC_EPS {
        return Err(Error::DeterministicOutcome {
            q: (0.5 * (1.0 + t * m)).round(),
        });
    }
    let dmt = dt * m + t * dm;
    Ok(ThermalFisher {
        value: dmt * dmt / denom,
        small_beta_coefficient,
    })
}

/// Maximizer of `(r1∂γ − r3∂Δ)²` on the unit sphere: `r ∝ (∂γ, 0, −∂Δ)`.
pub fn optimal_direction_high_t(d: &DerivativeBundle) -> Result<MeasurementDirection> {
    if d.d_gamma == 0.0 && d.d_delta == 0.0 {
        return Err(Error::ZeroDerivative);
    }
    MeasurementDirection::new(d.d_gamma, 0.0, -d.d_delta)
}

/// The two xz-plane directions with `r3/r1 = γ/Δ` and `r3/r1 = −Δ/γ`.
///
/// These are reported for comparison with [`optimal_direction_high_t`]; they
/// coincide with it only for special derivative ratios.
pub fn ratio_directions(c: &CoefficientBundle) -> Result<[MeasurementDirection; 2]> {
    c.require_nondegenerate()?;
    Ok([
        MeasurementDirection::new(c.delta, 0.0, c.gamma)?,
        MeasurementDirection::new(c.gamma, 0.0, -c.delta)?,
    ])
}
