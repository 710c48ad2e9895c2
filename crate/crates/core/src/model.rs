//! Production technology, its derivatives, and the aggregate state.
//!
//! Aggregate output is Cobb-Douglas in capital and unskilled labor, scaled
//! by a location/public-good interaction term:
//!
//! ```text
//! F(K, N, L, G) = (1 + chi * L * G^(1/x)) * K^a * N^(1-a)
//! ```
//!
//! with `x > 1` so public-good investment has decreasing returns, and
//! unskilled labor the mix `N = g*U + (1-g)*u` of immigrant and domestic
//! workers. All functions here are pure; derivatives are closed-form.

use crate::error::{Error, Result};
use crate::num::Real;
use crate::params::ModelParams;

/// The economy's stock variables at one point in time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EconomyState<F> {
    pub k: F,
    pub l: F,
    pub u: F,
    pub t: u32,
}

impl<F: Real> EconomyState<F> {
    /// Validates finiteness and non-negativity of every component.
    pub fn new(k: F, l: F, u: F, t: u32) -> Result<Self> {
        for (name, v) in [("K", k), ("L", l), ("U", u)] {
            if !v.is_finite() || v < F::zero() {
                return Err(Error::domain(
                    "EconomyState",
                    format!("{name} must be finite and non-negative, got {v}"),
                ));
            }
        }
        Ok(EconomyState { k, l, u, t })
    }
}

/// First derivatives of the production function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductionGradient<F> {
    pub f_k: F,
    pub f_n: F,
    pub f_l: F,
    pub f_g: F,
}

/// Second derivatives used by the equilibrium solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductionCurvature<F> {
    pub f_kk: F,
    pub f_kn: F,
    pub f_nn: F,
    pub f_kl: F,
    pub f_kg: F,
}

fn check_inputs<F: Real>(op: &'static str, vals: &[(&str, F)]) -> Result<()> {
    for (name, v) in vals {
        if !v.is_finite() || *v < F::zero() {
            return Err(Error::domain(
                op,
                format!("{name} must be finite and non-negative, got {v}"),
            ));
        }
    }
    Ok(())
}

/// Location/public-good productivity scale `A = 1 + chi * L * G^(1/x)`.
fn scale<F: Real>(params: &ModelParams<F>, l: F, g: F) -> F {
    F::one() + params.chi() * l * g.powf(F::one() / params.x())
}

/// Aggregate output `F(K, N, L, G)`. Zero exactly when `K * N == 0`.
pub fn production<F: Real>(params: &ModelParams<F>, k: F, n: F, l: F, g: F) -> Result<F> {
    check_inputs("production", &[("K", k), ("N", n), ("L", l), ("G", g)])?;
    let a = params.a();
    Ok(scale(params, l, g) * k.powf(a) * n.powf(F::one() - a))
}

/// Closed-form partial derivatives of `production`.
///
/// Requires `K, N > 0` (fractional exponents) and, when `L > 0`, `G > 0`
/// (the `G`-derivative diverges at the origin). At `L == 0` the
/// `G`-derivative is identically zero and `G == 0` is allowed.
pub fn production_gradient<F: Real>(
    params: &ModelParams<F>,
    k: F,
    n: F,
    l: F,
    g: F,
) -> Result<ProductionGradient<F>> {
    check_inputs("production_gradient", &[("L", l), ("G", g)])?;
    if !(k > F::zero()) || !(n > F::zero()) {
        return Err(Error::domain(
            "production_gradient",
            format!("K and N must be strictly positive, got K={k}, N={n}"),
        ));
    }
    let (a, chi, x) = (params.a(), params.chi(), params.x());
    let one = F::one();
    let inv_x = one / x;
    let core = k.powf(a) * n.powf(one - a);
    let big_a = one + chi * l * g.powf(inv_x);
    let f_k = a * big_a * core / k;
    let f_n = (one - a) * big_a * core / n;
    let f_l = chi * g.powf(inv_x) * core;
    let f_g = if l == F::zero() {
        F::zero()
    } else {
        chi * l * inv_x * g.powf(inv_x - one) * core
    };
    let grad = ProductionGradient { f_k, f_n, f_l, f_g };
    for (name, v) in [("F_K", f_k), ("F_N", f_n), ("F_L", f_l), ("F_G", f_g)] {
        if !v.is_finite() {
            return Err(Error::domain(
                "production_gradient",
                format!("{name} is not finite at K={k}, N={n}, L={l}, G={g}"),
            ));
        }
    }
    Ok(grad)
}

/// Second partials of `production` needed by the Newton solvers.
pub fn production_curvature<F: Real>(
    params: &ModelParams<F>,
    k: F,
    n: F,
    l: F,
    g: F,
) -> Result<ProductionCurvature<F>> {
    let grad = production_gradient(params, k, n, l, g)?;
    let (a, chi, x) = (params.a(), params.chi(), params.x());
    let one = F::one();
    let inv_x = one / x;
    let core = k.powf(a) * n.powf(one - a);
    Ok(ProductionCurvature {
        f_kk: (a - one) * grad.f_k / k,
        f_kn: (one - a) * grad.f_k / n,
        f_nn: -a * grad.f_n / n,
        f_kl: a * grad.f_l / k,
        f_kg: if l == F::zero() {
            F::zero()
        } else {
            a * chi * l * inv_x * g.powf(inv_x - one) * core / k
        },
    })
}

/// Market wage when the labor input may sit at a zero-capital corner:
/// `w = F_N` evaluated with `K >= 0` allowed.
pub fn wage<F: Real>(params: &ModelParams<F>, k: F, n: F, l: F, g: F) -> Result<F> {
    check_inputs("wage", &[("K", k), ("L", l), ("G", g)])?;
    if !(n > F::zero()) {
        return Err(Error::domain("wage", format!("N must be positive, got {n}")));
    }
    let a = params.a();
    Ok((F::one() - a) * scale(params, l, g) * k.powf(a) * n.powf(-a))
}

/// Unskilled labor aggregate `N = g*U + (1-g)*u`.
pub fn labor_aggregate<F: Real>(params: &ModelParams<F>, u_stock: F) -> Result<F> {
    check_inputs("labor_aggregate", &[("U", u_stock)])?;
    Ok(params.g() * u_stock + (F::one() - params.g()) * params.u())
}
