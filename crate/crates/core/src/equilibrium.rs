//! Steady-state solvers for the two policy regimes.
//!
//! # The entrepreneur's problem and its first-order conditions
//!
//! The representative entrepreneur maximizes the discounted stream of
//! profits net of adjustment costs,
//!
//! ```text
//! max  sum_t beta^t [ F(K_t, N_t, L_t, G_t) - w_t N_t - I_t - c(e, tau, I_t) ]
//! ```
//!
//! choosing `I_t, K_{t+1}, L_{t+1}, N_t` subject to the capital and location
//! transitions (`beta = 1/(1+r)`). Writing `mu_t` for the multiplier on the
//! capital constraint `[I_t - p L_t + K_t - K_{t+1}]` and `theta_t` for the
//! multiplier on the location constraint
//! `[phi L_t (s_t - L_t/Q) - L_{t+1} + L_t]`, differentiating the Lagrangian
//! gives
//!
//! ```text
//! d/dI_t:      mu_t = 1 + c_I(I_t)
//! d/dK_{t+1}:  mu_t = beta * ( F_K(t+1) + mu_{t+1} )
//! d/dN_t:      F_N(t) = w_t
//! d/dL_{t+1}:  theta_t = beta * ( F_L(t+1) - mu_{t+1} p
//!                        + theta_{t+1} * (1 + phi s_{t+1} - 2 phi L_{t+1}/Q) )
//! ```
//!
//! In a steady state these become `mu = 1 + c_I(I)`, `F_K = r mu`,
//! `F_N = w`, and — using the stationarity of the location map, which for
//! `L > 0`, `phi > 0` forces the accommodation identity `s = L/Q` — the
//! costate relation
//!
//! ```text
//! theta * (r + phi L / Q) = F_L - mu p .
//! ```
//!
//! Together with `I = p L` (stationary capital) and `C(G) - D(G) = L/Q`
//! (the government accommodates the demanded net creation), this pins
//! `(mu, K, G, theta)` **given** the scale of location `L`, but nothing
//! above determines `L` itself: accommodation absorbs the location
//! transition, so the economy admits a continuum of accommodated steady
//! states indexed by `L`. A closure rule selects the operating point.
//!
//! # Closure rules
//!
//! Both closures are reconstructions — the level condition is the one
//! piece of the equilibrium the theory leaves open — and they are chosen
//! so the solved steady state has the recursive structure the rest of the
//! model relies on: investment is pinned on the adjustment-cost margin
//! alone, location follows as `L = I/p`, accommodation gives `s = L/Q`
//! and `G` from the net-creation curve, so `G` ends up a function of
//! `(p, e, tau, Q)` and the creation-curve coefficients only. Capital,
//! wages, and shadow prices then inherit everything else.
//!
//! * [`Closure::Rent`] (default) — investment-price parity: investment
//!   expands until the marginal adjustment friction equals the (unit)
//!   purchase price of capital, `c_I(I*) = 1`, i.e. Tobin's `mu* = 2`.
//!   Past that point installing one more unit of capital costs more in
//!   friction than the capital itself.
//! * [`Closure::PublicGood`] — the government-side margin: accommodation
//!   stops where the marginal net business creation of public investment
//!   falls to its unit resource cost, `C'(G*) - D'(G*) = 1`. This always
//!   lands on the rising branch of the net-creation curve.
//!
//! The location shadow price `theta` follows from the costate relation and
//! is generally nonzero under either rule; it is reported, not imposed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::Model;
use crate::linalg::{lu_solve, Mat};
use crate::model;
use crate::num::{lit, Real};
use crate::solve1d;

/// Which level condition closes the follower steady state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Closure {
    #[serde(rename = "rent")]
    Rent,
    #[serde(rename = "public-good")]
    PublicGood,
}

impl std::fmt::Display for Closure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Closure::Rent => write!(f, "rent"),
            Closure::PublicGood => write!(f, "public-good"),
        }
    }
}

impl std::str::FromStr for Closure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rent" => Ok(Closure::Rent),
            "public-good" => Ok(Closure::PublicGood),
            other => Err(Error::Invalid(format!(
                "unknown closure `{other}` (expected `rent` or `public-good`)"
            ))),
        }
    }
}

/// Newton iteration controls.
#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    /// Stop as soon as the residual inf-norm falls below this.
    pub tol_target: f64,
    /// Accept a stalled iterate whose residual is below this.
    pub tol_accept: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol_target: 1e-13,
            tol_accept: 1e-10,
            max_iterations: 200,
            max_halvings: 50,
        }
    }
}

/// The named residuals reported with every follower solution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SteadyResiduals<F> {
    pub investment_identity: F,
    pub accommodation_identity: F,
    pub net_creation: F,
    pub tobin_q: F,
    pub capital_euler: F,
    pub closure: F,
    pub location_costate: F,
    pub immigration: F,
    pub labor: F,
    pub wage: F,
}

impl<F: Real> SteadyResiduals<F> {
    pub fn as_array(&self) -> [F; 10] {
        [
            self.investment_identity,
            self.accommodation_identity,
            self.net_creation,
            self.tobin_q,
            self.capital_euler,
            self.closure,
            self.location_costate,
            self.immigration,
            self.labor,
            self.wage,
        ]
    }

    pub fn inf_norm(&self) -> F {
        self.as_array()
            .into_iter()
            .fold(F::zero(), |acc, r| acc.max(r.abs()))
    }
}

/// The follower-regime steady state.
#[derive(Debug, Clone, Serialize)]
pub struct SteadyState<F> {
    #[serde(rename = "I")]
    pub i: F,
    #[serde(rename = "K")]
    pub k: F,
    #[serde(rename = "L")]
    pub l: F,
    #[serde(rename = "G")]
    pub g: F,
    #[serde(rename = "U")]
    pub u: F,
    #[serde(rename = "N")]
    pub n: F,
    pub w: F,
    pub s: F,
    pub mu: F,
    pub theta: F,
    #[serde(rename = "B")]
    pub b: F,
    pub residual_norm: F,
    pub closure_rule: Closure,
    pub iterations: usize,
    pub residuals: SteadyResiduals<F>,
}

impl<F: Real + Serialize> SteadyState<F> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("steady state serializes")
    }
}

/// The leader-regime equilibrium record.
#[derive(Debug, Clone, Serialize)]
pub struct LeaderEquilibrium<F> {
    #[serde(rename = "G_hat")]
    pub g_hat: F,
    #[serde(rename = "s_hat")]
    pub s_hat: F,
    #[serde(rename = "L_hat")]
    pub l_hat: F,
    #[serde(rename = "K_hat")]
    pub k_hat: F,
    #[serde(rename = "I_hat")]
    pub i_hat: F,
    #[serde(rename = "U_hat")]
    pub u_hat: F,
    #[serde(rename = "B_hat")]
    pub b_hat: F,
}

impl<F: Real + Serialize> LeaderEquilibrium<F> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("leader equilibrium serializes")
    }
}

/// Outcome of putting the two regimes side by side.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeComparison<F> {
    #[serde(rename = "B_hat")]
    pub b_hat: F,
    #[serde(rename = "B_star")]
    pub b_star: F,
    /// `B_hat / B_star`.
    pub ratio: F,
    /// "leader", "follower", or "equal".
    pub larger: &'static str,
    pub leader: LeaderEquilibrium<F>,
    pub follower: SteadyState<F>,
}

impl<F: Real + Serialize> RegimeComparison<F> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("comparison serializes")
    }
}

/// The leader's optimal public investment: the argmax of net creation
/// `s(G)`, from the closed form when the creation curve provides one,
/// otherwise by bracketed golden-section search. Errors if the maximized
/// net creation is not strictly positive (the regime requires it).
pub fn leader_g<F: Real>(model: &Model<F>) -> Result<F> {
    let params = model.params();
    let g_hat = match model.s_curve().peak(params) {
        Some(g) => g,
        None => {
            // expand a bracket until the curve turns down, then golden-section
            let net = |g: F| model.s_curve().net(params, g).unwrap_or_else(|_| -F::infinity());
            let mut hi = F::one();
            let mut best = net(hi);
            for _ in 0..200 {
                let next = hi * lit(2.0);
                let v = net(next);
                if v < best {
                    break;
                }
                best = v;
                hi = next;
            }
            solve1d::golden_max(net, lit(1e-12), hi * lit(2.0), lit(1e-12))
        }
    };
    let s_hat = model.s_curve().net(params, g_hat)?;
    if !(s_hat > F::zero()) {
        return Err(Error::RegimeInfeasible(format!(
            "maximized net creative destruction is not positive (s(G_hat) = {s_hat})"
        )));
    }
    Ok(g_hat)
}

/// Smallest `G` accommodating a demanded net creation `s_star`, i.e. the
/// root of `C(G) - D(G) = s_star` on the rising branch `(0, G_hat]`. The
/// larger root wastes public investment and is never chosen.
pub fn follower_g<F: Real>(model: &Model<F>, s_star: F) -> Result<F> {
    let params = model.params();
    if !s_star.is_finite() || s_star < F::zero() {
        return Err(Error::domain(
            "follower_g",
            format!("demanded net creation must be non-negative, got {s_star}"),
        ));
    }
    if s_star == F::zero() {
        return Ok(F::zero());
    }
    let g_hat = leader_g(model)?;
    let s_hat = model.s_curve().net(params, g_hat)?;
    let feas_tol = lit::<F>(1e-9) * s_hat.max(F::one());
    if s_star > s_hat + feas_tol {
        return Err(Error::AccommodationInfeasible {
            required: s_star.to_f64().unwrap_or(f64::NAN),
            max: s_hat.to_f64().unwrap_or(f64::NAN),
        });
    }
    if s_star >= s_hat - feas_tol {
        return Ok(g_hat);
    }
    let f = |g: F| model.s_curve().net(params, g).unwrap_or(F::nan()) - s_star;
    let tol = lit::<F>(1e-15) * g_hat.max(F::one());
    solve1d::bisect(f, F::zero(), g_hat, tol)
}

/// Solves the leader regime. Location is exogenous there (`phi = 0`
/// branch of the stationarity condition), so `L_hat` and the initial
/// capital `K_hat = K0` are scenario inputs, `I_hat = p * L_hat` keeps
/// both constant, and immigration sits at its own fixed point.
pub fn solve_leader<F: Real>(model: &Model<F>, l_hat: F, k0: F) -> Result<LeaderEquilibrium<F>> {
    let params = model.params();
    if !(l_hat > F::zero()) || !l_hat.is_finite() {
        return Err(Error::domain(
            "solve_leader",
            format!("L_hat must be positive, got {l_hat}"),
        ));
    }
    if !(k0 > F::zero()) || !k0.is_finite() {
        return Err(Error::domain(
            "solve_leader",
            format!("K0 must be positive, got {k0}"),
        ));
    }
    let g_hat = leader_g(model)?;
    let s_hat = model.s_curve().net(params, g_hat)?;
    let u_hat = crate::dynamics::immigration_steady_state(params);
    let b_hat = model.business_creation(s_hat, k0, l_hat)?;
    Ok(LeaderEquilibrium {
        g_hat,
        s_hat,
        l_hat,
        k_hat: k0,
        i_hat: params.p() * l_hat,
        u_hat,
        b_hat,
    })
}

struct FollowerSystem<'m, F: Real> {
    model: &'m Model<F>,
    closure: Closure,
    n_bar: F,
    g_hat: F,
    l_max: F,
}

impl<'m, F: Real> FollowerSystem<'m, F> {
    /// Residuals of the four-equation system in `x = [K, L, G, mu]`:
    /// Tobin's q, the capital Euler condition, the closure, and
    /// accommodation.
    fn residuals(&self, x: &[F; 4]) -> Result<[F; 4]> {
        let [k, l, g, mu] = *x;
        let m = self.model;
        let params = m.params();
        let c_i = m.marginal_adjustment_cost(params.p() * l)?;
        let grad = m.production_gradient(k, self.n_bar, l, g)?;
        let closure = match self.closure {
            Closure::Rent => c_i - F::one(),
            Closure::PublicGood => m.s_curve().net_prime(params, g)? - F::one(),
        };
        Ok([
            mu - F::one() - c_i,
            grad.f_k - params.r() * mu,
            closure,
            m.s_curve().net(params, g)? - l / params.q(),
        ])
    }

    fn jacobian(&self, x: &[F; 4]) -> Result<Mat<F>> {
        let [k, l, g, _mu] = *x;
        let m = self.model;
        let params = m.params();
        let curv = model::production_curvature(params, k, self.n_bar, l, g)?;
        let c_ii = m.adjustment_curvature(params.p() * l)?; // d c_I / d I
        let mut j = Mat::zeros(4, 4);
        // r0 = mu - 1 - c_I(pL)
        j[(0, 1)] = -c_ii * params.p();
        j[(0, 3)] = F::one();
        // r1 = F_K - r*mu
        j[(1, 0)] = curv.f_kk;
        j[(1, 1)] = curv.f_kl;
        j[(1, 2)] = curv.f_kg;
        j[(1, 3)] = -params.r();
        // r2 = closure
        match self.closure {
            Closure::Rent => {
                j[(2, 1)] = c_ii * params.p();
            }
            Closure::PublicGood => {
                j[(2, 2)] = m.s_curve().net_second(params, g)?;
            }
        }
        // r3 = net(G) - L/Q
        j[(3, 1)] = -F::one() / params.q();
        j[(3, 2)] = m.s_curve().net_prime(params, g)?;
        Ok(j)
    }

    /// Keeps iterates inside the solver's domain: positive stocks, `G` on
    /// the rising branch of the net-creation curve, `L` below the
    /// accommodable maximum.
    fn in_domain(&self, x: &[F; 4]) -> bool {
        let eps = lit::<F>(1e-12);
        x.iter().all(|v| v.is_finite())
            && x[0] > eps
            && x[1] > eps
            && x[1] < self.l_max
            && x[2] > eps
            && x[2] < self.g_hat
    }

    fn project(&self, x: &mut [F; 4]) {
        let lo = lit::<F>(1e-9);
        x[0] = x[0].max(lo);
        x[1] = x[1].max(lo).min(self.l_max * lit(0.99));
        x[2] = x[2].max(self.g_hat * lit(1e-9)).min(self.g_hat * lit(0.99));
        if !x[3].is_finite() {
            x[3] = F::one();
        }
    }
}

fn inf_norm<F: Real>(r: &[F; 4]) -> F {
    r.iter().fold(F::zero(), |acc, v| acc.max(v.abs()))
}

/// Solves the follower steady state by damped Newton iteration on the
/// four-equation system described in the module docs.
///
/// `initial_guess` is `[K, L, G, mu]`; guesses outside the solver's domain
/// (for instance `G` beyond the net-creation peak) are projected into it
/// before iterating. Step halving rejects residual-norm increases and
/// out-of-domain iterates.
pub fn solve_follower<F: Real>(
    model: &Model<F>,
    closure: Closure,
    initial_guess: Option<[F; 4]>,
    opts: &NewtonOptions,
) -> Result<SteadyState<F>> {
    let params = model.params();
    let n_bar = model.labor_aggregate(crate::dynamics::immigration_steady_state(params))?;
    if !(n_bar > F::zero()) {
        return Err(Error::domain(
            "solve_follower",
            "labor aggregate is zero; production is degenerate".to_string(),
        ));
    }
    let g_hat = leader_g(model)?;
    let s_hat = model.s_curve().net(params, g_hat)?;
    let system = FollowerSystem {
        model,
        closure,
        n_bar,
        g_hat,
        l_max: s_hat * params.q(),
    };

    let mut x = initial_guess.unwrap_or([
        n_bar,
        F::one() / (params.kappa() * params.p()),
        g_hat * lit(0.1),
        lit(2.0),
    ]);
    system.project(&mut x);

    let mut r = system.residuals(&x)?;
    let mut norm = inf_norm(&r);
    let mut iterations = 0;
    let tol_target = lit::<F>(opts.tol_target);
    let tol_accept = lit::<F>(opts.tol_accept);

    while norm > tol_target && iterations < opts.max_iterations {
        iterations += 1;
        let mut jac = system.jacobian(&x)?;
        let mut step: Vec<F> = r.iter().map(|&v| -v).collect();
        if lu_solve(&mut jac, &mut step).is_err() {
            break; // singular Jacobian: treat like a stall
        }
        let mut lambda = F::one();
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let candidate = [
                x[0] + lambda * step[0],
                x[1] + lambda * step[1],
                x[2] + lambda * step[2],
                x[3] + lambda * step[3],
            ];
            if system.in_domain(&candidate) {
                if let Ok(cr) = system.residuals(&candidate) {
                    let cnorm = inf_norm(&cr);
                    if cnorm < norm {
                        x = candidate;
                        r = cr;
                        norm = cnorm;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda = lambda / lit(2.0);
        }
        if !accepted {
            break; // fully damped without progress
        }
    }

    if norm > tol_accept {
        return Err(Error::NoConvergence {
            iterations,
            residual: norm.to_f64().unwrap_or(f64::NAN),
            last_residuals: r.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
        });
    }

    let [k, l, g, mu] = x;
    let i = params.p() * l;
    let s = l / params.q();
    let u = crate::dynamics::immigration_steady_state(params);
    let n = n_bar;
    let grad = model.production_gradient(k, n, l, g)?;
    let w = grad.f_n;
    let theta = (grad.f_l - mu * params.p()) / (params.r() + params.phi() * l / params.q());
    let b = model.business_creation(s, k, l)?;

    let residuals = SteadyResiduals {
        investment_identity: i - params.p() * l,
        accommodation_identity: s - l / params.q(),
        net_creation: model.s_curve().net(params, g)? - s,
        tobin_q: mu - F::one() - model.marginal_adjustment_cost(i)?,
        capital_euler: grad.f_k - params.r() * mu,
        closure: r[2],
        location_costate: theta * (params.r() + params.phi() * l / params.q())
            - (grad.f_l - mu * params.p()),
        immigration: u - crate::dynamics::immigration_steady_state(params),
        labor: n - model.labor_aggregate(u)?,
        wage: w - grad.f_n,
    };

    Ok(SteadyState {
        i,
        k,
        l,
        g,
        u,
        n,
        w,
        s,
        mu,
        theta,
        b,
        residual_norm: residuals.inf_norm(),
        closure_rule: closure,
        iterations,
        residuals,
    })
}

/// Solves both regimes and reports which creates more businesses. The
/// ordering genuinely depends on the scenario inputs; there is no general
/// ranking.
pub fn compare_regimes<F: Real>(
    model: &Model<F>,
    closure: Closure,
    l_hat: F,
    k0: F,
) -> Result<RegimeComparison<F>> {
    let leader = solve_leader(model, l_hat, k0)?;
    let follower = solve_follower(model, closure, None, &NewtonOptions::default())?;
    let ratio = leader.b_hat / follower.b;
    let larger = if leader.b_hat > follower.b {
        "leader"
    } else if leader.b_hat < follower.b {
        "follower"
    } else {
        "equal"
    };
    Ok(RegimeComparison {
        b_hat: leader.b_hat,
        b_star: follower.b,
        ratio,
        larger,
        leader,
        follower,
    })
}
