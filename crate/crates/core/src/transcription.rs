//! Finite-horizon entrepreneur optimization by direct transcription.
//!
//! The entrepreneur chooses investment and labor paths `(I_t, N_t)` for
//! `t = 0..T-1` facing a given public-investment path (a leader constant or
//! the follower accommodation rule) and a given wage path. Location and
//! immigration evolve independently of the controls, so they are
//! precomputed; capital is eliminated through its transition
//! `K_{t+1} = K_t + I_t - p L_t`.
//!
//! The horizon is closed with a stationary continuation value: terminal
//! capital `K_T` is valued at `(1 + c_I(p L_T)) / beta` per unit, which is
//! exactly the shadow price that makes a steady state continue as a steady
//! state (it reproduces `mu_{T-1} = 1 + c_I(p L_T)` in the terminal Euler
//! condition). Without a continuation value the optimizer would run
//! capital down near the horizon and no finite-`T` path could agree with
//! the infinite-horizon steady state.
//!
//! The stacked first-order system over `x = [I | N | mu]` (3T unknowns) is
//! solved by damped Newton with an analytic Jacobian:
//!
//! ```text
//! R_I(t) = mu_t - 1 - c_I(I_t)                          t = 0..T-1
//! R_N(t) = F_N(K_t, N_t, L_t, G_t) - w_t                t = 0..T-1
//! R_K(t) = mu_t - beta*(F_K(t+1) + mu_{t+1})            t = 0..T-2
//! R_K(T-1) = mu_{T-1} - (1 + c_I(p L_T))
//! ```
//!
//! Residuals of all four first-order conditions and both transition
//! constraints are reported per period; the location condition is the
//! costate consistency of the stationary shadow price
//! `theta(K,N,L,G) = (F_L - mu p) / (r + phi L / Q)`, which is exact at a
//! steady state and diagnostic elsewhere.

use crate::dynamics::{self, GovernmentPolicy};
use crate::error::{Error, Result};
use crate::forms::Model;
use crate::linalg::{lu_solve, Mat};
use crate::model;
use crate::num::{lit, Real};

/// Per-period residuals of the first-order conditions and transitions.
#[derive(Debug, Clone)]
pub struct FocResiduals<F> {
    /// `mu_t - 1 - c_I(I_t)`, length `T`.
    pub investment: Vec<F>,
    /// Euler condition including the terminal continuation row, length `T`.
    pub capital: Vec<F>,
    /// Stationary-costate consistency of the location shadow price,
    /// length `T-1`.
    pub location: Vec<F>,
    /// `F_N - w`, length `T`.
    pub labor: Vec<F>,
    /// Capital-transition feasibility, length `T` (zero by construction).
    pub capital_transition: Vec<F>,
    /// Location-transition feasibility, length `T` (zero by construction).
    pub location_transition: Vec<F>,
}

impl<F: Real> FocResiduals<F> {
    pub fn inf_norm(&self) -> F {
        let mut m = F::zero();
        for v in self
            .investment
            .iter()
            .chain(&self.capital)
            .chain(&self.location)
            .chain(&self.labor)
            .chain(&self.capital_transition)
            .chain(&self.location_transition)
        {
            m = m.max(v.abs());
        }
        m
    }
}

/// A finite-horizon problem instance with precomputed exogenous paths.
#[derive(Debug, Clone)]
pub struct HorizonProblem<F: Real> {
    model: Model<F>,
    pub k0: F,
    /// Location path, length `T+1`.
    pub l_path: Vec<F>,
    /// Immigrant-stock path, length `T+1`.
    pub u_path: Vec<F>,
    /// Public investment per period, length `T`.
    pub g_path: Vec<F>,
    /// Net creation per period, length `T`.
    pub s_path: Vec<F>,
    /// Wage per period, length `T`.
    pub wages: Vec<F>,
}

impl<F: Real> HorizonProblem<F> {
    /// Builds the problem, rolling the location and immigration dynamics
    /// forward under `policy`. `wages` must have length `T`.
    pub fn new(
        model: &Model<F>,
        k0: F,
        l0: F,
        u0: F,
        policy: GovernmentPolicy<F>,
        wages: Vec<F>,
    ) -> Result<Self> {
        let horizon = wages.len();
        if horizon < 2 {
            return Err(Error::Invalid(format!(
                "finite-horizon optimization needs T >= 2, got {horizon}"
            )));
        }
        for (name, v) in [("K0", k0), ("L0", l0), ("U0", u0)] {
            if !(v > F::zero()) || !v.is_finite() {
                return Err(Error::domain(
                    "finite_horizon",
                    format!("{name} must be strictly positive, got {v}"),
                ));
            }
        }
        let params = model.params();
        let mut l_path = Vec::with_capacity(horizon + 1);
        let mut u_path = Vec::with_capacity(horizon + 1);
        let mut g_path = Vec::with_capacity(horizon);
        let mut s_path = Vec::with_capacity(horizon);
        let (mut l, mut u) = (l0, u0);
        for t in 0..horizon {
            l_path.push(l);
            u_path.push(u);
            let g = match policy {
                GovernmentPolicy::Constant(g) => g,
                GovernmentPolicy::Accommodate => {
                    crate::equilibrium::follower_g(model, l / params.q())?
                }
            };
            let s = model.creative_destruction(g)?;
            g_path.push(g);
            s_path.push(s);
            l = dynamics::location_step(params, l, s, t as u32)?;
            u = dynamics::immigration_step(params, u)?;
        }
        l_path.push(l);
        u_path.push(u);
        Ok(HorizonProblem {
            model: model.clone(),
            k0,
            l_path,
            u_path,
            g_path,
            s_path,
            wages,
        })
    }

    pub fn horizon(&self) -> usize {
        self.wages.len()
    }

    /// Capital path implied by an investment path, length `T+1`.
    /// Fails if capital goes negative.
    pub fn capital_path(&self, investment: &[F]) -> Result<Vec<F>> {
        let params = self.model.params();
        let mut k_path = Vec::with_capacity(investment.len() + 1);
        let mut k = self.k0;
        k_path.push(k);
        for (t, &i) in investment.iter().enumerate() {
            k = k + i - params.p() * self.l_path[t];
            if !(k > F::zero()) || !k.is_finite() {
                return Err(Error::InfeasiblePath {
                    t: t as u32,
                    value: k.to_f64().unwrap_or(f64::NAN),
                });
            }
            k_path.push(k);
        }
        Ok(k_path)
    }

    /// Discounted objective for a control path, including the stationary
    /// continuation value of terminal capital. This is the same function
    /// the Newton solver's first-order conditions differentiate, so a
    /// brute-force grid search over it is an independent check of the
    /// optimizer.
    pub fn objective(&self, investment: &[F], labor: &[F]) -> Result<F> {
        let horizon = self.horizon();
        if investment.len() != horizon || labor.len() != horizon {
            return Err(Error::Invalid("control path length mismatch".into()));
        }
        let params = self.model.params();
        let beta = params.beta();
        let k_path = self.capital_path(investment)?;
        let mut value = F::zero();
        let mut discount = F::one();
        for t in 0..horizon {
            let output = self.model.production(k_path[t], labor[t], self.l_path[t], self.g_path[t])?;
            let period = output
                - self.wages[t] * labor[t]
                - investment[t]
                - self.model.adjustment_cost(investment[t])?;
            value += discount * period;
            discount *= beta;
        }
        // stationary continuation value of K_T (discount is now beta^T)
        let mu_terminal = F::one() + self.model.marginal_adjustment_cost(params.p() * self.l_path[horizon])?;
        value += discount * mu_terminal / beta * k_path[horizon];
        Ok(value)
    }

    /// The within-horizon profit stream alone, without the terminal
    /// continuation value. Adjustment costs enter negatively, so this is
    /// weakly decreasing in the cost scale for any fixed control path.
    pub fn flow_objective(&self, investment: &[F], labor: &[F]) -> Result<F> {
        let horizon = self.horizon();
        if investment.len() != horizon || labor.len() != horizon {
            return Err(Error::Invalid("control path length mismatch".into()));
        }
        let beta = self.model.params().beta();
        let k_path = self.capital_path(investment)?;
        let mut value = F::zero();
        let mut discount = F::one();
        for t in 0..horizon {
            let output = self.model.production(k_path[t], labor[t], self.l_path[t], self.g_path[t])?;
            value += discount
                * (output
                    - self.wages[t] * labor[t]
                    - investment[t]
                    - self.model.adjustment_cost(investment[t])?);
            discount *= beta;
        }
        Ok(value)
    }

    fn mu_terminal(&self) -> Result<F> {
        let params = self.model.params();
        Ok(F::one()
            + self
                .model
                .marginal_adjustment_cost(params.p() * self.l_path[self.horizon()])?)
    }

    /// Stacked FOC residuals at `(I, N, mu)`.
    fn stacked_residuals(&self, x: &[F]) -> Result<Vec<F>> {
        let horizon = self.horizon();
        let (i_path, n_path, mu_path) = split(x, horizon);
        let params = self.model.params();
        let beta = params.beta();
        let k_path = self.capital_path(i_path)?;
        let mut r = vec![F::zero(); 3 * horizon];
        for t in 0..horizon {
            r[t] = mu_path[t] - F::one() - self.model.marginal_adjustment_cost(i_path[t])?;
            let grad = self
                .model
                .production_gradient(k_path[t], n_path[t], self.l_path[t], self.g_path[t])?;
            r[horizon + t] = grad.f_n - self.wages[t];
            r[2 * horizon + t] = if t + 1 < horizon {
                let next = self.model.production_gradient(
                    k_path[t + 1],
                    n_path[t + 1],
                    self.l_path[t + 1],
                    self.g_path[t + 1],
                )?;
                mu_path[t] - beta * (next.f_k + mu_path[t + 1])
            } else {
                mu_path[t] - self.mu_terminal()?
            };
        }
        Ok(r)
    }

    fn stacked_jacobian(&self, x: &[F]) -> Result<Mat<F>> {
        let horizon = self.horizon();
        let (i_path, n_path, mu_path) = split(x, horizon);
        let _ = mu_path;
        let params = self.model.params();
        let beta = params.beta();
        let k_path = self.capital_path(i_path)?;
        let n_unknowns = 3 * horizon;
        let mut j = Mat::zeros(n_unknowns, n_unknowns);
        let col_i = |t: usize| t;
        let col_n = |t: usize| horizon + t;
        let col_mu = |t: usize| 2 * horizon + t;

        for t in 0..horizon {
            let curv = model::production_curvature(
                params,
                k_path[t],
                n_path[t],
                self.l_path[t],
                self.g_path[t],
            )?;
            // R_I(t)
            j[(t, col_i(t))] = -self.model.adjustment_curvature(i_path[t])?;
            j[(t, col_mu(t))] = F::one();
            // R_N(t): F_N(K_t, N_t) - w_t ; K_t depends on I_0..I_{t-1}
            let row_n = horizon + t;
            j[(row_n, col_n(t))] = curv.f_nn;
            for s in 0..t {
                j[(row_n, col_i(s))] = curv.f_kn;
            }
            // R_K(t)
            let row_k = 2 * horizon + t;
            j[(row_k, col_mu(t))] = F::one();
            if t + 1 < horizon {
                let curv_next = model::production_curvature(
                    params,
                    k_path[t + 1],
                    n_path[t + 1],
                    self.l_path[t + 1],
                    self.g_path[t + 1],
                )?;
                j[(row_k, col_mu(t + 1))] = -beta;
                j[(row_k, col_n(t + 1))] = -beta * curv_next.f_kn;
                for s in 0..=t {
                    j[(row_k, col_i(s))] = -beta * curv_next.f_kk;
                }
            }
        }
        Ok(j)
    }
}

fn split<F>(x: &[F], horizon: usize) -> (&[F], &[F], &[F]) {
    (
        &x[..horizon],
        &x[horizon..2 * horizon],
        &x[2 * horizon..3 * horizon],
    )
}

/// Solution of the finite-horizon problem.
#[derive(Debug, Clone)]
pub struct HorizonSolution<F> {
    pub investment: Vec<F>,
    pub labor: Vec<F>,
    pub mu: Vec<F>,
    /// Capital path implied by the optimal investment, length `T+1`.
    pub k_path: Vec<F>,
    pub objective: F,
    pub residuals: FocResiduals<F>,
    pub iterations: usize,
}

/// Maximizes the finite-horizon objective by Newton iteration on the
/// stacked first-order system.
pub fn optimize<F: Real>(
    problem: &HorizonProblem<F>,
    opts: &crate::equilibrium::NewtonOptions,
) -> Result<HorizonSolution<F>> {
    let horizon = problem.horizon();
    let params = problem.model.params();

    // start from the stationary rule
    let mut x = Vec::with_capacity(3 * horizon);
    for t in 0..horizon {
        x.push(params.p() * problem.l_path[t]);
    }
    for t in 0..horizon {
        x.push(problem.model.labor_aggregate(problem.u_path[t])?);
    }
    for t in 0..horizon {
        let i = params.p() * problem.l_path[t];
        x.push(F::one() + problem.model.marginal_adjustment_cost(i)?);
    }

    let mut r = problem.stacked_residuals(&x)?;
    let mut norm = vec_inf_norm(&r);
    let tol_target = lit::<F>(opts.tol_target.max(1e-12));
    let tol_accept = lit::<F>(opts.tol_accept);
    let mut iterations = 0;

    while norm > tol_target && iterations < opts.max_iterations {
        iterations += 1;
        let mut jac = problem.stacked_jacobian(&x)?;
        let mut step: Vec<F> = r.iter().map(|&v| -v).collect();
        lu_solve(&mut jac, &mut step)?;
        let mut lambda = F::one();
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let candidate: Vec<F> = x
                .iter()
                .zip(&step)
                .map(|(&xi, &si)| xi + lambda * si)
                .collect();
            let feasible = candidate[..horizon].iter().all(|&i| i >= F::zero())
                && candidate[horizon..2 * horizon].iter().all(|&n| n > F::zero());
            if feasible {
                if let Ok(cr) = problem.stacked_residuals(&candidate) {
                    let cnorm = vec_inf_norm(&cr);
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
            break;
        }
    }

    if norm > tol_accept {
        return Err(Error::NoConvergence {
            iterations,
            residual: norm.to_f64().unwrap_or(f64::NAN),
            last_residuals: r.iter().take(16).map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
        });
    }

    let (i_path, n_path, mu_path) = split(&x, horizon);
    let k_path = problem.capital_path(i_path)?;
    let objective = problem.objective(i_path, n_path)?;
    let residuals = evaluate_foc_residuals(problem, i_path, n_path, mu_path)?;
    Ok(HorizonSolution {
        investment: i_path.to_vec(),
        labor: n_path.to_vec(),
        mu: mu_path.to_vec(),
        k_path,
        objective,
        residuals,
        iterations,
    })
}

fn vec_inf_norm<F: Real>(v: &[F]) -> F {
    v.iter().fold(F::zero(), |acc, x| acc.max(x.abs()))
}

/// Evaluates all first-order-condition and transition residuals along a
/// control path. Useful both for reporting an optimum and for checking
/// that a steady state, held constant, satisfies the full time-indexed
/// conditions.
pub fn evaluate_foc_residuals<F: Real>(
    problem: &HorizonProblem<F>,
    investment: &[F],
    labor: &[F],
    mu: &[F],
) -> Result<FocResiduals<F>> {
    let horizon = problem.horizon();
    let params = problem.model.params();
    let beta = params.beta();
    let k_path = problem.capital_path(investment)?;

    let theta_stat = |t: usize| -> Result<F> {
        let grad = problem.model.production_gradient(
            k_path[t],
            labor[t],
            problem.l_path[t],
            problem.g_path[t],
        )?;
        Ok((grad.f_l - mu[t] * params.p())
            / (params.r() + params.phi() * problem.l_path[t] / params.q()))
    };

    let mut res = FocResiduals {
        investment: Vec::with_capacity(horizon),
        capital: Vec::with_capacity(horizon),
        location: Vec::with_capacity(horizon.saturating_sub(1)),
        labor: Vec::with_capacity(horizon),
        capital_transition: vec![F::zero(); horizon],
        location_transition: vec![F::zero(); horizon],
    };

    for t in 0..horizon {
        res.investment.push(
            mu[t] - F::one() - problem.model.marginal_adjustment_cost(investment[t])?,
        );
        let grad = problem.model.production_gradient(
            k_path[t],
            labor[t],
            problem.l_path[t],
            problem.g_path[t],
        )?;
        res.labor.push(grad.f_n - problem.wages[t]);
        if t + 1 < horizon {
            let next = problem.model.production_gradient(
                k_path[t + 1],
                labor[t + 1],
                problem.l_path[t + 1],
                problem.g_path[t + 1],
            )?;
            res.capital.push(mu[t] - beta * (next.f_k + mu[t + 1]));
            let inner = F::one()
                + params.phi() * problem.s_path[t + 1]
                - lit::<F>(2.0) * params.phi() * problem.l_path[t + 1] / params.q();
            let theta_t = theta_stat(t)?;
            let theta_next = theta_stat(t + 1)?;
            res.location.push(
                theta_t
                    - beta * (next.f_l - mu[t + 1] * params.p() + theta_next * inner),
            );
        } else {
            res.capital.push(mu[t] - problem.mu_terminal()?);
        }
        // transitions hold by construction; re-evaluate them anyway
        let k_next = k_path[t] + investment[t] - params.p() * problem.l_path[t];
        res.capital_transition[t] = k_path[t + 1] - k_next;
        let l_next = problem.l_path[t]
            * (params.phi() * problem.s_path[t] + F::one()
                - params.phi() * problem.l_path[t] / params.q());
        res.location_transition[t] = problem.l_path[t + 1] - l_next;
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{solve_follower, Closure, NewtonOptions};
    use crate::forms::Model;
    use crate::params::{ModelParams, ParamKey};

    fn model() -> Model<f64> {
        Model::new(ModelParams::default_calibration())
    }

    fn steady_problem(model: &Model<f64>, horizon: usize) -> (HorizonProblem<f64>, crate::equilibrium::SteadyState<f64>) {
        let ss = solve_follower(model, Closure::Rent, None, &NewtonOptions::default()).unwrap();
        let problem = HorizonProblem::new(
            model,
            ss.k,
            ss.l,
            ss.u,
            GovernmentPolicy::Accommodate,
            vec![ss.w; horizon],
        )
        .unwrap();
        (problem, ss)
    }

    #[test]
    fn rejects_short_horizons_and_bad_states() {
        let m = model();
        assert!(HorizonProblem::new(&m, 1.0, 1.0, 1.0, GovernmentPolicy::Constant(1.0), vec![1.0]).is_err());
        assert!(HorizonProblem::new(&m, 0.0, 1.0, 1.0, GovernmentPolicy::Constant(1.0), vec![1.0; 4]).is_err());
    }

    #[test]
    fn steady_state_satisfies_time_indexed_focs() {
        let m = model();
        let (problem, ss) = steady_problem(&m, 12);
        let horizon = problem.horizon();
        let res = evaluate_foc_residuals(
            &problem,
            &vec![ss.i; horizon],
            &vec![ss.n; horizon],
            &vec![ss.mu; horizon],
        )
        .unwrap();
        assert!(res.inf_norm() < 1e-8, "residual {}", res.inf_norm());
    }

    #[test]
    fn optimizer_keeps_the_steady_state_stationary() {
        let m = model();
        let (problem, ss) = steady_problem(&m, 20);
        let sol = optimize(&problem, &NewtonOptions::default()).unwrap();
        for &i in &sol.investment {
            assert!((i - ss.i).abs() < 1e-8);
        }
        for &k in &sol.k_path {
            assert!((k - ss.k).abs() < 1e-6);
        }
        assert!(sol.residuals.inf_norm() < 1e-6);
    }

    #[test]
    fn objective_weakly_decreases_in_adjustment_scale() {
        let m = model();
        let (problem, ss) = steady_problem(&m, 8);
        let controls_i = vec![ss.i; 8];
        let controls_n = vec![ss.n; 8];
        let base = problem.flow_objective(&controls_i, &controls_n).unwrap();
        let costlier = Model::new(m.params().with_key(ParamKey::Kappa, 0.12).unwrap());
        let problem2 = HorizonProblem::new(
            &costlier,
            ss.k,
            ss.l,
            ss.u,
            GovernmentPolicy::Accommodate,
            vec![ss.w; 8],
        )
        .unwrap();
        let worse = problem2.flow_objective(&controls_i, &controls_n).unwrap();
        assert!(worse <= base);
    }

    #[test]
    fn small_brute_force_grid_agrees_with_newton_t2() {
        let m = model();
        let ss = solve_follower(&m, Closure::Rent, None, &NewtonOptions::default()).unwrap();
        // start slightly off the steady state so the optimum is interior
        let problem = HorizonProblem::new(
            &m,
            ss.k * 0.97,
            ss.l,
            ss.u,
            GovernmentPolicy::Accommodate,
            vec![ss.w; 2],
        )
        .unwrap();
        let sol = optimize(&problem, &NewtonOptions::default()).unwrap();
        assert!(sol.residuals.inf_norm() < 1e-6);

        // coarse 11-point grid per axis centered on the Newton solution
        let span = 0.05;
        let steps = 11usize;
        let axis = |center: f64| -> Vec<f64> {
            (0..steps)
                .map(|i| center * (1.0 - span + 2.0 * span * i as f64 / (steps - 1) as f64))
                .collect()
        };
        let (i0s, i1s) = (axis(sol.investment[0]), axis(sol.investment[1]));
        let (n0s, n1s) = (axis(sol.labor[0]), axis(sol.labor[1]));
        let mut best = f64::NEG_INFINITY;
        let mut best_idx = (0, 0, 0, 0);
        for (a, &i0) in i0s.iter().enumerate() {
            for (b, &i1) in i1s.iter().enumerate() {
                for (c, &n0) in n0s.iter().enumerate() {
                    for (d, &n1) in n1s.iter().enumerate() {
                        if let Ok(v) = problem.objective(&[i0, i1], &[n0, n1]) {
                            if v > best {
                                best = v;
                                best_idx = (a, b, c, d);
                            }
                        }
                    }
                }
            }
        }
        let center = (steps - 1) / 2;
        let (a, b, c, d) = best_idx;
        for idx in [a, b, c, d] {
            assert!(
                (idx as isize - center as isize).abs() <= 1,
                "grid optimum {best_idx:?} not adjacent to Newton center {center}"
            );
        }
    }
}
