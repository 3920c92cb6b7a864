//! Parametric two-level Hamiltonians, their spectra and equilibrium states.
//!
//! A Hamiltonian is described at each value of the parameter λ by three real
//! coefficients `(ω0, Δ, γ)`: the mean level energy, half the bare level
//! splitting and the transverse coupling. The operator used throughout the
//! crate is
//!
//! ```text
//! H = ω0·𝕀 + Δ·σ3 − γ·σ1
//! ```
//!
//! whose ground projector is `P− = ½[𝕀 − (Δσ3 − γσ1)/√(γ²+Δ²)]`. It has the
//! same spectrum `ω0 ± √(γ²+Δ²)` as the matrix `[[ω1, γ], [γ, ω2]]` with
//! `ω1 = ω0 − Δ`, `ω2 = ω0 + Δ`, and is unitarily equivalent to it, so every
//! precision quantity computed here is identical for both descriptions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hamiltonian coefficients at a single value of λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientBundle {
    pub omega0: f64,
    pub delta: f64,
    pub gamma: f64,
}

impl CoefficientBundle {
    pub const fn new(omega0: f64, delta: f64, gamma: f64) -> Self {
        Self {
            omega0,
            delta,
            gamma,
        }
    }

    /// Lower diagonal energy `ω1 = ω0 − Δ`.
    pub fn omega1(&self) -> f64 {
        self.omega0 - self.delta
    }

    /// Upper diagonal energy `ω2 = ω0 + Δ`.
    pub fn omega2(&self) -> f64 {
        self.omega0 + self.delta
    }

    /// Half gap `√(γ² + Δ²)`.
    pub fn half_gap(&self) -> f64 {
        self.gamma.hypot(self.delta)
    }

    /// True at a level crossing, where eigenvectors are undefined.
    pub fn is_degenerate(&self) -> bool {
        self.gamma == 0.0 && self.delta == 0.0
    }

    pub fn shifted(&self, s: f64) -> Self {
        Self {
            omega0: self.omega0 + s,
            ..*self
        }
    }

    /// The operator `ω0𝕀 + Δσ3 − γσ1` as a real symmetric matrix.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [
            [self.omega0 + self.delta, -self.gamma],
            [-self.gamma, self.omega0 - self.delta],
        ]
    }

    pub(crate) fn require_nondegenerate(&self) -> Result<()> {
        if self.is_degenerate() {
            Err(Error::DegenerateBundle)
        } else {
            Ok(())
        }
    }
}

/// λ-derivatives of the coefficients.
///
/// `step` is `Some(h)` when the values come from central differences with step `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeBundle {
    pub d_omega0: f64,
    pub d_delta: f64,
    pub d_gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

impl DerivativeBundle {
    pub const fn new(d_omega0: f64, d_delta: f64, d_gamma: f64) -> Self {
        Self {
            d_omega0,
            d_delta,
            d_gamma,
            step: None,
        }
    }
}

/// Eigenvalues `h± = ω0 ± √(γ²+Δ²)` and derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub h_minus: f64,
    pub h_plus: f64,
    pub gap: f64,
    /// `γ/Δ`; `+∞` when `Δ = 0, γ ≠ 0`, NaN at a crossing.
    pub x: f64,
    pub degenerate: bool,
}

pub fn eigenvalues(c: &CoefficientBundle) -> SpectralData {
    let r = c.half_gap();
    let x = if c.delta != 0.0 {
        c.gamma / c.delta
    } else if c.gamma != 0.0 {
        f64::INFINITY
    } else {
        f64::NAN
    };
    SpectralData {
        h_minus: c.omega0 - r,
        h_plus: c.omega0 + r,
        gap: 2.0 * r,
        x,
        degenerate: c.is_degenerate(),
    }
}

/// Qubit density operator `ρ = ½(𝕀 + n·σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    n: [f64; 3],
}

impl BlochState {
    pub const MAXIMALLY_MIXED: BlochState = BlochState { n: [0.0; 3] };

    /// Rejects vectors longer than one (beyond rounding slack).
    pub fn new(n1: f64, n2: f64, n3: f64) -> Result<Self> {
        let s = Self { n: [n1, n2, n3] };
        if !s.norm().is_finite() || s.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidInput(format!(
                "Bloch vector ({n1}, {n2}, {n3}) has length > 1"
            )));
        }
        Ok(s)
    }

    pub(crate) const fn from_array_unchecked(n: [f64; 3]) -> Self {
        Self { n }
    }

    pub fn vector(&self) -> [f64; 3] {
        self.n
    }

    pub fn norm(&self) -> f64 {
        self.n.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_pure(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-12
    }

    /// Born probability of the `+1` outcome of the projector `½(𝕀 + r·σ)`.
    pub fn probability_along(&self, r: [f64; 3]) -> f64 {
        0.5 * (1.0 + self.n[0] * r[0] + self.n[1] * r[1] + self.n[2] * r[2])
    }
}

/// `Tr ρ² = ½(1 + |n|²)`.
pub fn purity(s: &BlochState) -> f64 {
    let n = s.vector();
    0.5 * (1.0 + n[0] * n[0] + n[1] * n[1] + n[2] * n[2])
}

/// Unit Bloch vector of the ground projector, `(γ, 0, −Δ)/√(γ²+Δ²)`.
pub(crate) fn ground_direction(c: &CoefficientBundle) -> [f64; 3] {
    let r = c.half_gap();
    [c.gamma / r, 0.0, -c.delta / r]
}

/// Returns `(P−, P+)`: ground and excited projectors as pure Bloch states.
pub fn eigenprojectors(c: &CoefficientBundle) -> Result<(BlochState, BlochState)> {
    c.require_nondegenerate()?;
    let g = ground_direction(c);
    Ok((
        BlochState::from_array_unchecked(g),
        BlochState::from_array_unchecked([-g[0], -g[1], -g[2]]),
    ))
}

/// Gibbs weights `(p−, p+)` of ground and excited levels, `p∓ = ½[1 ± tanh(β√(γ²+Δ²))]`.
pub fn thermal_populations(c: &CoefficientBundle, beta: f64) -> Result<(f64, f64)> {
    check_beta(beta)?;
    let t = polarization(c, beta);
    Ok((0.5 * (1.0 + t), 0.5 * (1.0 - t)))
}

/// `tanh(β√(γ²+Δ²))`, with the conventions `β = 0 → 0` and crossing → 0.
pub(crate) fn polarization(c: &CoefficientBundle, beta: f64) -> f64 {
    if beta == 0.0 || c.is_degenerate() {
        0.0
    } else {
        (beta * c.half_gap()).tanh()
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta.is_nan() || beta < 0.0 {
        Err(Error::InvalidInput(format!(
            "inverse temperature must be >= 0, got {beta}"
        )))
    } else {
        Ok(())
    }
}

/// Equilibrium state `e^{−βH}/Z`. `β = ∞` gives the ground projector.
///
/// At a crossing the Gibbs state is exactly `𝕀/2` for every β.
pub fn thermal_state(c: &CoefficientBundle, beta: f64) -> Result<BlochState> {
    check_beta(beta)?;
    if c.is_degenerate() {
        return Ok(BlochState::MAXIMALLY_MIXED);
    }
    let t = polarization(c, beta);
    let g = ground_direction(c);
    Ok(BlochState::from_array_unchecked([t * g[0], t * g[1], t * g[2]]))
}

/// Real interval of admissible λ. Either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidInput(format!("empty domain [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub const fn real_line() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, lambda: f64) -> bool {
        lambda >= self.lo && lambda <= self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub(crate) fn require_stencil(&self, lambda: f64, h: f64) -> Result<()> {
        if self.contains(lambda - h) && self.contains(lambda + h) {
            Ok(())
        } else {
            Err(Error::DomainExceeded {
                lambda,
                step: h,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }
}

impl Serialize for Domain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.lo, self.hi].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Domain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [lo, hi] = <[f64; 2]>::deserialize(d)?;
        Domain::new(lo, hi).map_err(serde::de::Error::custom)
    }
}

/// Non-fatal findings about a model.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelWarning {
    /// Δ ≤ 0 at a sampled λ, against the `ω2 > ω1` convention.
    NonPositiveDelta { lambda: f64, delta: f64 },
    /// γ = Δ = 0 at a sampled λ.
    Crossing { lambda: f64 },
    /// An approximation the model relies on is outside its regime of validity.
    Regime { message: String },
}

/// A family `λ ↦ H(λ)` of two-level Hamiltonians.
pub trait TwoLevelModel: Send + Sync {
    fn name(&self) -> &str;

    fn domain(&self) -> Domain;

    /// Must be deterministic and total on [`TwoLevelModel::domain`].
    fn coefficients(&self, lambda: f64) -> CoefficientBundle;

    fn analytic_derivatives(&self, _lambda: f64) -> Option<DerivativeBundle> {
        None
    }

    /// Static warnings about the model's parameters.
    fn warnings(&self) -> Vec<ModelWarning> {
        Vec::new()
    }

    /// Analytic derivatives when available, otherwise central differences with
    /// the default step.
    fn derivatives(&self, lambda: f64) -> Result<DerivativeBundle> {
        match self.analytic_derivatives(lambda) {
            Some(d) => Ok(d),
            None => finite_difference_derivatives(self, lambda, default_step(lambda)),
        }
    }
}

impl<M: TwoLevelModel + ?Sized> TwoLevelModel for Box<M> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn coefficients(&self, lambda: f64) -> CoefficientBundle {
        (**self).coefficients(lambda)
    }
    fn analytic_derivatives(&self, lambda: f64) -> Option<DerivativeBundle> {
        (**self).analytic_derivatives(lambda)
    }
    fn warnings(&self) -> Vec<ModelWarning> {
        (**self).warnings()
    }
}

impl<M: TwoLevelModel + ?Sized> TwoLevelModel for &M {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn coefficients(&self, lambda: f64) -> CoefficientBundle {
        (**self).coefficients(lambda)
    }
    fn analytic_derivatives(&self, lambda: f64) -> Option<DerivativeBundle> {
        (**self).analytic_derivatives(lambda)
    }
    fn warnings(&self) -> Vec<ModelWarning> {
        (**self).warnings()
    }
}

/// `max(10⁻⁶, 10⁻⁶·|λ|)`.
pub fn default_step(lambda: f64) -> f64 {
    (1e-6 * lambda.abs()).max(1e-6)
}

/// Central differences `(f(λ+h) − f(λ−h))/2h` of all three coefficients.
pub fn finite_difference_derivatives<M: TwoLevelModel + ?Sized>(
    model: &M,
    lambda: f64,
    h: f64,
) -> Result<DerivativeBundle> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("step must be positive, got {h}")));
    }
    model.domain().require_stencil(lambda, h)?;
    let p = model.coefficients(lambda + h);
    let m = model.coefficients(lambda - h);
    let d = |a: f64, b: f64| (a - b) / (2.0 * h);
    Ok(DerivativeBundle {
        d_omega0: d(p.omega0, m.omega0),
        d_delta: d(p.delta, m.delta),
        d_gamma: d(p.gamma, m.gamma),
        step: Some(h),
    })
}

type CoefficientFn = dyn Fn(f64) -> CoefficientBundle + Send + Sync;
type DerivativeFn = dyn Fn(f64) -> DerivativeBundle + Send + Sync;

/// A model defined by closures.
///
/// ```
/// use anticross::hamiltonian::{CoefficientBundle, DerivativeBundle, Domain, FnModel, TwoLevelModel};
///
/// let model = FnModel::new("gamma = lambda", Domain::real_line(), |l| {
///     CoefficientBundle::new(0.0, 1.0, l)
/// })
/// .with_derivatives(|_| DerivativeBundle::new(0.0, 0.0, 1.0));
/// assert_eq!(model.coefficients(2.0).gamma, 2.0);
/// ```
pub struct FnModel {
    name: String,
    domain: Domain,
    eval: Box<CoefficientFn>,
    deriv: Option<Box<DerivativeFn>>,
}

impl FnModel {
    pub fn new(
        name: impl Into<String>,
        domain: Domain,
        eval: impl Fn(f64) -> CoefficientBundle + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            eval: Box::new(eval),
            deriv: None,
        }
    }

    pub fn with_derivatives(
        mut self,
        deriv: impl Fn(f64) -> DerivativeBundle + Send + Sync + 'static,
    ) -> Self {
        self.deriv = Some(Box::new(deriv));
        self
    }
}

impl TwoLevelModel for FnModel {
    fn name(&self) -> &str {
        &self.name
    }
    fn domain(&self) -> Domain {
        self.domain
    }
    fn coefficients(&self, lambda: f64) -> CoefficientBundle {
        (self.eval)(lambda)
    }
    fn analytic_derivatives(&self, lambda: f64) -> Option<DerivativeBundle> {
        self.deriv.as_ref().map(|d| d(lambda))
    }
}

/// Samples the model on `samples` evenly spaced points and collects warnings.
///
/// Infinite domains are sampled on their intersection with `[-10, 10]`.
pub fn validate_model<M: TwoLevelModel + ?Sized>(model: &M, samples: usize) -> Vec<ModelWarning> {
    let mut out = model.warnings();
    let dom = model.domain();
    let lo = dom.lo.max(-10.0);
    let hi = dom.hi.min(10.0);
    let n = samples.max(2);
    let mut reported_delta = false;
    for i in 0..n {
        let lambda = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let c = model.coefficients(lambda);
        if c.is_degenerate() {
            out.push(ModelWarning::Crossing { lambda });
        } else if c.delta <= 0.0 && !reported_delta {
            // one entry is enough to flag the convention violation
            out.push(ModelWarning::NonPositiveDelta {
                lambda,
                delta: c.delta,
            });
            reported_delta = true;
        }
    }
    out
}
