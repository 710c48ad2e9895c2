//! Pluggable functional forms and the [`Model`] bundle.
//!
//! The theory leaves four functions abstract: business creation `B(s, K, L)`,
//! government-led creation `C(G)`, destruction `D(G)`, and the investment
//! adjustment cost `c(e, tau, I)`. The defaults here are
//!
//! * `B = B0 * s^b_s * K^b_K * L^b_L` — monotone in every argument,
//! * `C = c0 * G^gamma`, `D = d0 * G` — net creation `s(G) = C - D` is
//!   strictly concave with an interior peak, so a maximizing government has
//!   a well-defined optimum with positive net creation,
//! * `c = (kappa/2) * W * I^2` with `W = 1 + tau + e` — marginal cost
//!   `c_I = kappa * W * I` is positive and increasing in `I`, `tau`, `e`.
//!
//! The adjustment-cost loading deliberately uses the raw tax and fine levels
//! rather than sector-share weights: the cost function's signature is
//! `c(e, tau, I)`, and the investment margin must not move with the sector
//! split (only the immigration process does).
//!
//! Alternate forms implement the traits below and plug into [`Model`]
//! without touching any solver. Forms read coefficients from the parameter
//! vector at call time, so a perturbed parameter set flows through
//! automatically.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model;
use crate::num::{lit, Real};
use crate::params::ModelParams;

fn require_non_negative<F: Real>(op: &'static str, name: &str, v: F) -> Result<()> {
    if !v.is_finite() || v < F::zero() {
        return Err(Error::domain(
            op,
            format!("{name} must be finite and non-negative, got {v}"),
        ));
    }
    Ok(())
}

/// Government-led creation and destruction of businesses as functions of
/// public investment `G`; the net effect `s(G) = C(G) - D(G)` is the
/// economy's creative destruction.
pub trait CreativeDestruction<F: Real>: Send + Sync {
    fn create(&self, params: &ModelParams<F>, g: F) -> Result<F>;
    fn destroy(&self, params: &ModelParams<F>, g: F) -> Result<F>;

    /// Net creation `s(G) = C(G) - D(G)`.
    fn net(&self, params: &ModelParams<F>, g: F) -> Result<F> {
        Ok(self.create(params, g)? - self.destroy(params, g)?)
    }

    /// `s'(G)`.
    fn net_prime(&self, params: &ModelParams<F>, g: F) -> Result<F>;

    /// `s''(G)`; the default is a central difference of `net_prime`.
    fn net_second(&self, params: &ModelParams<F>, g: F) -> Result<F> {
        let h = lit::<F>(1e-6) * g.abs().max(F::one());
        let lo = (g - h).max(h * lit(1e-3));
        let hi = g + h;
        Ok((self.net_prime(params, hi)? - self.net_prime(params, lo)?) / (hi - lo))
    }

    /// Closed-form argmax of `s(G)` when available.
    fn peak(&self, params: &ModelParams<F>) -> Option<F>;
}

/// Default creative destruction: power creation, linear destruction.
#[derive(Debug, Clone, Copy, Default)]
pub struct PowerLinear;

impl<F: Real> CreativeDestruction<F> for PowerLinear {
    fn create(&self, params: &ModelParams<F>, g: F) -> Result<F> {
        require_non_negative("creative_destruction", "G", g)?;
        Ok(params.c0() * g.powf(params.gamma()))
    }

    fn destroy(&self, params: &ModelParams<F>, g: F) -> Result<F> {
        require_non_negative("creative_destruction", "G", g)?;
        Ok(params.d0() * g)
    }

    fn net_prime(&self, params: &ModelParams<F>, g: F) -> Result<F> {
        require_non_negative("creative_destruction", "G", g)?;
        if g == F::zero() {
            return Err(Error::domain(
                "creative_destruction",
                "s'(G) diverges at G = 0".to_string(),
            ));
        }
        Ok(params.c0() * params.gamma() * g.powf(params.gamma() - F::one()) - params.d0())
    }

    fn net_second(&self, params: &ModelParams<F>, g: F) -> Result<F> {
        require_non_negative("creative_destruction", "G", g)?;
        let gamma = params.gamma();
        Ok(params.c0() * gamma * (gamma - F::one()) * g.powf(gamma - lit(2.0)))
    }

    fn peak(&self, params: &ModelParams<F>) -> Option<F> {
        // s'(G) = 0  =>  G = (c0*gamma/d0)^(1/(1-gamma))
        let gamma = params.gamma();
        Some((params.c0() * gamma / params.d0()).powf(F::one() / (F::one() - gamma)))
    }
}

/// Investment adjustment cost `c(e, tau, I)` with positive, increasing
/// marginal cost.
pub trait AdjustmentCost<F: Real>: Send + Sync {
    fn cost(&self, params: &ModelParams<F>, i: F) -> Result<F>;
    /// Marginal cost `c_I`.
    fn marginal(&self, params: &ModelParams<F>, i: F) -> Result<F>;
    /// Curvature `c_II`.
    fn curvature(&self, params: &ModelParams<F>, i: F) -> Result<F>;
}

/// Default adjustment cost, quadratic with tax/fine loading `W = 1 + tau + e`.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuadraticCost;

impl QuadraticCost {
    fn loading<F: Real>(params: &ModelParams<F>) -> F {
        F::one() + params.tau() + params.e()
    }
}

impl<F: Real> AdjustmentCost<F> for QuadraticCost {
    fn cost(&self, params: &ModelParams<F>, i: F) -> Result<F> {
        require_non_negative("adjustment_cost", "I", i)?;
        Ok(lit::<F>(0.5) * params.kappa() * Self::loading(params) * i * i)
    }

    fn marginal(&self, params: &ModelParams<F>, i: F) -> Result<F> {
        require_non_negative("adjustment_cost", "I", i)?;
        Ok(params.kappa() * Self::loading(params) * i)
    }

    fn curvature(&self, params: &ModelParams<F>, i: F) -> Result<F> {
        require_non_negative("adjustment_cost", "I", i)?;
        Ok(params.kappa() * Self::loading(params))
    }
}

/// New business creation from net creative destruction, capital, and
/// location.
pub trait BusinessCreation<F: Real>: Send + Sync {
    /// `B(s, K, L)`. Fails with [`Error::NoNetCreation`] when `s <= 0`:
    /// creation requires positive net creative destruction, and callers
    /// must treat that case explicitly rather than receive a number.
    fn business(&self, params: &ModelParams<F>, s: F, k: F, l: F) -> Result<F>;
}

/// Default business creation, Cobb-Douglas in `(s, K, L)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CobbDouglasCreation;

impl<F: Real> BusinessCreation<F> for CobbDouglasCreation {
    fn business(&self, params: &ModelParams<F>, s: F, k: F, l: F) -> Result<F> {
        if !s.is_finite() || s <= F::zero() {
            return Err(Error::NoNetCreation);
        }
        require_non_negative("business_creation", "K", k)?;
        require_non_negative("business_creation", "L", l)?;
        Ok(params.b0() * s.powf(params.b_s()) * k.powf(params.b_k()) * l.powf(params.b_l()))
    }
}

/// Parameter vector plus the functional forms: everything the solvers need.
///
/// Cheap to clone; forms are shared behind `Arc` and are safe to use from
/// concurrent sweeps.
#[derive(Clone)]
pub struct Model<F: Real> {
    params: ModelParams<F>,
    s_curve: Arc<dyn CreativeDestruction<F>>,
    cost: Arc<dyn AdjustmentCost<F>>,
    creation: Arc<dyn BusinessCreation<F>>,
}

impl<F: Real> std::fmt::Debug for Model<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Model").field("params", &self.params).finish_non_exhaustive()
    }
}

impl<F: Real> Model<F> {
    /// Model with the default functional forms.
    pub fn new(params: ModelParams<F>) -> Self {
        Model {
            params,
            s_curve: Arc::new(PowerLinear),
            cost: Arc::new(QuadraticCost),
            creation: Arc::new(CobbDouglasCreation),
        }
    }

    pub fn params(&self) -> &ModelParams<F> {
        &self.params
    }

    /// Same forms, different parameter vector (comparative statics).
    pub fn with_params(&self, params: ModelParams<F>) -> Self {
        let mut m = self.clone();
        m.params = params;
        m
    }

    pub fn with_creative_destruction(mut self, f: Arc<dyn CreativeDestruction<F>>) -> Self {
        self.s_curve = f;
        self
    }

    pub fn with_adjustment_cost(mut self, f: Arc<dyn AdjustmentCost<F>>) -> Self {
        self.cost = f;
        self
    }

    pub fn with_business_creation(mut self, f: Arc<dyn BusinessCreation<F>>) -> Self {
        self.creation = f;
        self
    }

    pub fn s_curve(&self) -> &dyn CreativeDestruction<F> {
        self.s_curve.as_ref()
    }

    // Convenience forwarding, so call sites read like the economics.

    pub fn production(&self, k: F, n: F, l: F, g: F) -> Result<F> {
        model::production(&self.params, k, n, l, g)
    }

    pub fn production_gradient(&self, k: F, n: F, l: F, g: F) -> Result<model::ProductionGradient<F>> {
        model::production_gradient(&self.params, k, n, l, g)
    }

    pub fn wage(&self, k: F, n: F, l: F, g: F) -> Result<F> {
        model::wage(&self.params, k, n, l, g)
    }

    pub fn labor_aggregate(&self, u_stock: F) -> Result<F> {
        model::labor_aggregate(&self.params, u_stock)
    }

    /// Net creative destruction `s(G)`.
    pub fn creative_destruction(&self, g: F) -> Result<F> {
        self.s_curve.net(&self.params, g)
    }

    pub fn adjustment_cost(&self, i: F) -> Result<F> {
        self.cost.cost(&self.params, i)
    }

    pub fn marginal_adjustment_cost(&self, i: F) -> Result<F> {
        self.cost.marginal(&self.params, i)
    }

    pub fn adjustment_curvature(&self, i: F) -> Result<F> {
        self.cost.curvature(&self.params, i)
    }

    pub fn business_creation(&self, s: F, k: F, l: F) -> Result<F> {
        self.creation.business(&self.params, s, k, l)
    }
}
