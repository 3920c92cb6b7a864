//! Worked example models with analytic derivatives.
//!
//! * [`PerturbationModel`]: `H = H₀ + λH₁` with a rotated rank-one perturbation.
//! * [`RabiModel`]: the rotating-wave effective Hamiltonian of a driven qubit,
//!   with the drive amplitude as parameter.
//! * [`ThreeLevelModel`]: a two-level model weakly coupled to a far third
//!   level, through its effective two-level reduction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{
    CoefficientBundle, DerivativeBundle, Domain, ModelWarning, TwoLevelModel,
};
use crate::metrology::qfi_ground;

/// `H₀ = diag(ω, ω+δ)`, `H₁ = R(φ)·diag(0, ε)·R(φ)ᵀ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationParams {
    pub omega: f64,
    #[serde(rename = "delta")]
    pub delta_gap: f64,
    pub epsilon: f64,
    pub phi: f64,
}

impl PerturbationParams {
    pub fn new(omega: f64, delta_gap: f64, epsilon: f64, phi: f64) -> Result<Self> {
        let p = Self {
            omega,
            delta_gap,
            epsilon,
            phi,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_gap > 0.0 && self.epsilon > 0.0) {
            return Err(Error::Config("perturbation: delta and epsilon must be > 0".into()));
        }
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&self.phi) {
            return Err(Error::Config("perturbation: phi must lie in [0, pi/2)".into()));
        }
        if !self.omega.is_finite() {
            return Err(Error::Config("perturbation: omega must be finite".into()));
        }
        Ok(())
    }
}

/// Coefficients read off `H₀ + λH₁ = [[ω1, γ], [γ, ω2]]`:
/// `ω0 = ω + (δ+λε)/2`, `Δ = ½(δ + λε cos2φ)`, `γ = −½λε sin2φ`.
pub fn perturbation_coefficients(p: &PerturbationParams, lambda: f64) -> CoefficientBundle {
    let (s2, c2) = (2.0 * p.phi).sin_cos();
    CoefficientBundle::new(
        p.omega + 0.5 * (p.delta_gap + lambda * p.epsilon),
        0.5 * (p.delta_gap + lambda * p.epsilon * c2),
        -0.5 * lambda * p.epsilon * s2,
    )
}

pub fn perturbation_derivatives(p: &PerturbationParams) -> DerivativeBundle {
    let (s2, c2) = (2.0 * p.phi).sin_cos();
    DerivativeBundle::new(0.5 * p.epsilon, 0.5 * p.epsilon * c2, -0.5 * p.epsilon * s2)
}

/// Ground QFI at `φ = π/4`, equal to `(ε/δ)²/[1 + (ελ/δ)²]²`.
pub fn perturbation_qfi_closed_form(p: &PerturbationParams, lambda: f64) -> Result<f64> {
    if (p.phi - std::f64::consts::FRAC_PI_4).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "closed form needs phi = pi/4, got {}",
            p.phi
        )));
    }
    qfi_ground(&perturbation_coefficients(p, lambda), &perturbation_derivatives(p))
}

/// The formula `1/(1 + y²λ²)²`, `y = ε/2δ`, kept for side-by-side output.
pub fn perturbation_qfi_printed(p: &PerturbationParams, lambda: f64) -> f64 {
    let y = p.epsilon / (2.0 * p.delta_gap);
    1.0 / (1.0 + y * y * lambda * lambda).powi(2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationModel {
    pub params: PerturbationParams,
    pub domain: Domain,
}

impl PerturbationModel {
    pub fn new(params: PerturbationParams, domain: Domain) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, domain })
    }
}

impl TwoLevelModel for PerturbationModel {
    fn name(&self) -> &str {
        "perturbation"
    }
    fn domain(&self) -> Domain {
        self.domain
    }
    fn coefficients(&self, lambda: f64) -> CoefficientBundle {
        perturbation_coefficients(&self.params, lambda)
    }
    fn analytic_derivatives(&self, _lambda: f64) -> Option<DerivativeBundle> {
        Some(perturbation_derivatives(&self.params))
    }
}

/// Which identification of Δ the Rabi model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaConvention {
    /// `Δ = Ω − 2ω`.
    #[default]
    Paper,
    /// `Δ = ½(ω2 − ω1) = ω − Ω/2` of the effective matrix.
    Matrix,
}

impl DeltaConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            DeltaConvention::Paper => "paper",
            DeltaConvention::Matrix => "matrix",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiParams {
    pub omega0: f64,
    pub omega: f64,
    #[serde(default)]
    pub delta_convention: DeltaConvention,
}

impl RabiParams {
    pub fn new(omega0: f64, omega: f64, delta_convention: DeltaConvention) -> Result<Self> {
        let p = Self {
            omega0,
            omega,
            delta_convention,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0 && self.omega > 0.0) {
            return Err(Error::Config("rabi: omega0 and omega must be > 0".into()));
        }
        Ok(())
    }
}

/// Effective coefficients `Ω = √(λ² + (ω−ω0)²)`, `γ = −(λ/4Ω)[Ω − (ω0−ω)]`,
/// `ω0 → ω`, Δ per the convention.
///
/// At `Ω = 0` (λ = 0 on resonance) γ takes its limit 0.
pub fn rabi_coefficients(p: &RabiParams, lambda: f64) -> CoefficientBundle {
    let detuning = p.omega0 - p.omega;
    let big = lambda.hypot(detuning);
    let gamma = if big == 0.0 {
        0.0
    } else {
        -(lambda / (4.0 * big)) * (big - detuning)
    };
    let delta = match p.delta_convention {
        DeltaConvention::Paper => big - 2.0 * p.omega,
        DeltaConvention::Matrix => p.omega - 0.5 * big,
    };
    CoefficientBundle::new(p.omega, delta, gamma)
}

/// Analytic derivatives with `∂Ω = λ/Ω`; the resonant `Ω = 0` point uses the
/// one-sided limits `∂γ = −¼`, `∂Ω = 1`.
pub fn rabi_derivatives(p: &RabiParams, lambda: f64) -> DerivativeBundle {
    let detuning = p.omega0 - p.omega;
    let big = lambda.hypot(detuning);
    let (d_big, d_gamma) = if big == 0.0 {
        (1.0, -0.25)
    } else {
        let d_big = lambda / big;
        // γ = −(λ/4)(1 − δω/Ω)
        let d_gamma = -0.25 * (1.0 - detuning / big) - 0.25 * lambda * detuning * d_big / (big * big);
        (d_big, d_gamma)
    };
    let d_delta = match p.delta_convention {
        DeltaConvention::Paper => d_big,
        DeltaConvention::Matrix => -0.5 * d_big,
    };
    DerivativeBundle::new(0.0, d_delta, d_gamma)
}

/// `(1/64ω0²)·(1 − y + 17y²/64)⁻²` with `y = λ/ω0`.
pub fn rabi_qfi_printed(omega0: f64, lambda: f64) -> f64 {
    let y = lambda / omega0;
    let den = 1.0 - y + 17.0 * y * y / 64.0;
    1.0 / (64.0 * omega0 * omega0 * den * den)
}

/// Ground QFI on resonance; requires `ω = ω0`.
pub fn rabi_qfi_resonance(p: &RabiParams, lambda: f64) -> Result<f64> {
    if p.omega != p.omega0 {
        return Err(Error::Precondition(format!(
            "resonance closed form needs omega = omega0, got {} vs {}",
            p.omega, p.omega0
        )));
    }
    qfi_ground(&rabi_coefficients(p, lambda), &rabi_derivatives(p, lambda))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RabiModel {
    pub params: RabiParams,
    pub domain: Domain,
}

impl RabiModel {
    /// The drive amplitude is nonnegative; domains reaching below 0 are rejected.
    pub fn new(params: RabiParams, domain: Domain) -> Result<Self> {
        params.validate()?;
        if domain.lo < 0.0 {
            return Err(Error::Config("rabi: domain must lie in lambda >= 0".into()));
        }
        Ok(Self { params, domain })
    }
}

impl TwoLevelModel for RabiModel {
    fn name(&self) -> &str {
        "rabi"
    }
    fn domain(&self) -> Domain {
        self.domain
    }
    fn coefficients(&self, lambda: f64) -> CoefficientBundle {
        rabi_coefficients(&self.params, lambda)
    }
    fn analytic_derivatives(&self, lambda: f64) -> Option<DerivativeBundle> {
        Some(rabi_derivatives(&self.params, lambda))
    }
}

/// A base two-level model coupled with strength `g` to a level at energy ε.
pub struct ThreeLevelModel {
    pub base: Box<dyn TwoLevelModel>,
    pub g: f64,
    pub eps_gap: f64,
    name: String,
}

impl std::fmt::Debug for ThreeLevelModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ThreeLevelModel")
            .field("base", &self.base.name())
            .field("g", &self.g)
            .field("eps_gap", &self.eps_gap)
            .finish()
    }
}

impl ThreeLevelModel {
    pub fn new(base: Box<dyn TwoLevelModel>, g: f64, eps_gap: f64) -> Result<Self> {
        if !(g >= 0.0 && g.is_finite()) || !(eps_gap > 0.0 && eps_gap.is_finite()) {
            return Err(Error::Config("three-level: need g >= 0 and eps_gap > 0".into()));
        }
        let name = format!("three-level({})", base.name());
        Ok(Self {
            base,
            g,
            eps_gap,
            name,
        })
    }

    /// `κ = g²/ε`.
    pub fn kappa(&self) -> f64 {
        self.g * self.g / self.eps_gap
    }
}

/// Effective reduction: `ω1, ω2, γ` each shifted by κ, Δ unchanged.
pub fn three_level_effective(base: &CoefficientBundle, kappa: f64) -> CoefficientBundle {
    CoefficientBundle::new(base.omega0 + kappa, base.delta, base.gamma + kappa)
}

impl TwoLevelModel for ThreeLevelModel {
    fn name(&self) -> &str {
        &self.name
    }
    fn domain(&self) -> Domain {
        self.base.domain()
    }
    fn coefficients(&self, lambda: f64) -> CoefficientBundle {
        three_level_effective(&self.base.coefficients(lambda), self.kappa())
    }
    fn analytic_derivatives(&self, lambda: f64) -> Option<DerivativeBundle> {
        self.base.analytic_derivatives(lambda)
    }
    fn derivatives(&self, lambda: f64) -> Result<DerivativeBundle> {
        // κ is constant, so the base derivatives carry over, including its
        // finite-difference fallback
        self.base.derivatives(lambda)
    }
    fn warnings(&self) -> Vec<ModelWarning> {
        let mut out = self.base.warnings();
        if self.g >= 0.3 {
            out.push(ModelWarning::Regime {
                message: format!("coupling g = {} is not small (g << 1 assumed)", self.g),
            });
        }
        let dom = self.base.domain();
        let (lo, hi) = (dom.lo.max(-10.0), dom.hi.min(10.0));
        let max_level = (0..=32)
            .map(|i| self.base.coefficients(lo + (hi - lo) * i as f64 / 32.0))
            .flat_map(|c| [c.omega1().abs(), c.omega2().abs()])
            .fold(0.0, f64::max);
        if self.eps_gap <= 10.0 * max_level {
            out.push(ModelWarning::Regime {
                message: format!(
                    "eps_gap = {} is not large against level energies up to {max_level}",
                    self.eps_gap
                ),
            });
        }
        out
    }
}

/// First-order expansion of the effective-model QFI in κ:
/// `H₀ − 2κ·(N/R²)·[2γΔ∂γ + ∂Δ(Δ² − γ²)]/R⁴`, with `N = Δ∂γ − γ∂Δ`.
///
/// `N/R²` is the signed square root of `H₀`.
pub fn three_level_qfi_first_order(c: &CoefficientBundle, d: &DerivativeBundle, kappa: f64) -> Result<f64> {
    let h0 = qfi_ground(c, d)?;
    if h0 == 0.0 {
        return Err(Error::ZeroQfi);
    }
    let rr = c.gamma * c.gamma + c.delta * c.delta;
    let root = (c.delta * d.d_gamma - c.gamma * d.d_delta) / rr;
    let bracket = 2.0 * c.gamma * c.delta * d.d_gamma + d.d_delta * (c.delta * c.delta - c.gamma * c.gamma);
    Ok(h0 - 2.0 * kappa * root * bracket / (rr * rr))
}
