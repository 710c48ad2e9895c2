//! State-transition maps and forward simulation.
//!
//! One period evolves the three stocks:
//!
//! * location (logistic, carrying capacity `Q`):
//!   `L' = L * (phi*s + 1 - phi*L/Q)`
//! * capital: `K' = K + I - p*L` — investment net of location spending
//! * immigration: `U' = U + z*alpha_f*M - (v - alpha_i)*U`
//!
//! None of the maps clamps: an overshoot past a feasibility boundary is an
//! error carrying the offending time index, because silent clamping would
//! corrupt the stability classification near unstable fixed points.

use crate::equilibrium;
use crate::error::{Error, Result};
use crate::forms::Model;
use crate::model::EconomyState;
use crate::num::{lit, Real};
use crate::params::ModelParams;

/// One period of the location map. `L = 0` is an absorbing fixed point.
pub fn location_step<F: Real>(params: &ModelParams<F>, l: F, s: F, t: u32) -> Result<F> {
    if !l.is_finite() || l < F::zero() {
        return Err(Error::domain(
            "location_step",
            format!("L must be finite and non-negative, got {l}"),
        ));
    }
    let next = l * (params.phi() * s + F::one() - params.phi() * l / params.q());
    if next < F::zero() {
        return Err(Error::DegenerateStep {
            t,
            value: next.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(next)
}

/// Analytic derivative of the constant-`s` location map at `l`.
pub fn location_map_derivative<F: Real>(params: &ModelParams<F>, l: F, s: F) -> F {
    F::one() + params.phi() * s - lit::<F>(2.0) * params.phi() * l / params.q()
}

/// One period of capital accumulation.
pub fn capital_step<F: Real>(params: &ModelParams<F>, k: F, i: F, l: F, t: u32) -> Result<F> {
    for (name, v) in [("K", k), ("I", i), ("L", l)] {
        if !v.is_finite() || v < F::zero() {
            return Err(Error::domain(
                "capital_step",
                format!("{name} must be finite and non-negative, got {v}"),
            ));
        }
    }
    let next = k + i - params.p() * l;
    if next < F::zero() {
        return Err(Error::InfeasiblePath {
            t,
            value: next.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(next)
}

/// One period of the immigration process. The parameter invariants
/// (`alpha_i < v < 1`) make this a contraction toward the fixed point.
pub fn immigration_step<F: Real>(params: &ModelParams<F>, u: F) -> Result<F> {
    if !u.is_finite() || u < F::zero() {
        return Err(Error::domain(
            "immigration_step",
            format!("U must be finite and non-negative, got {u}"),
        ));
    }
    Ok(u + params.z() * params.alpha_f() * params.m() - (params.v() - params.alpha_i()) * u)
}

/// The immigration fixed point `U* = z*alpha_f*M / (v - alpha_i)`.
pub fn immigration_steady_state<F: Real>(params: &ModelParams<F>) -> F {
    params.z() * params.alpha_f() * params.m() / (params.v() - params.alpha_i())
}

/// Government investment rule used while simulating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GovernmentPolicy<F> {
    /// Leader regime: `G` pinned at a constant.
    Constant(F),
    /// Follower regime: each period `G` accommodates the net creation the
    /// location dynamic demands, `s = L/Q`.
    Accommodate,
}

impl<F: Real> GovernmentPolicy<F> {
    fn g_at(&self, model: &Model<F>, l: F) -> Result<F> {
        match self {
            GovernmentPolicy::Constant(g) => Ok(*g),
            GovernmentPolicy::Accommodate => {
                equilibrium::follower_g(model, l / model.params().q())
            }
        }
    }
}

/// Per-period controls chosen by the entrepreneur.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPath<F> {
    pub investment: Vec<F>,
    pub labor: Vec<F>,
}

impl<F: Real> ControlPath<F> {
    pub fn new(investment: Vec<F>, labor: Vec<F>) -> Result<Self> {
        if investment.len() != labor.len() {
            return Err(Error::Invalid(format!(
                "control paths differ in length ({} vs {})",
                investment.len(),
                labor.len()
            )));
        }
        Ok(ControlPath { investment, labor })
    }

    pub fn len(&self) -> usize {
        self.investment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.investment.is_empty()
    }
}

/// Flows realized within one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flows<F> {
    pub i: F,
    pub n: F,
    pub w: F,
    pub s: F,
    pub g: F,
    /// `None` when net creative destruction is non-positive and business
    /// creation is undefined.
    pub b: Option<F>,
}

/// A simulated path: `T+1` states with the flows realized at each period.
///
/// The flows stored with the terminal state use the stationary
/// continuation convention (`I = p*L`, `N` the labor aggregate), so a path
/// that sits at a steady state is constant in every column.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<F> {
    pub states: Vec<EconomyState<F>>,
    pub flows: Vec<Flows<F>>,
}

impl<F: Real> Trajectory<F> {
    pub fn horizon(&self) -> usize {
        self.states.len() - 1
    }

    /// CSV export, one row per period: `t,K,L,U,I,N,w,s,G,B`, full double
    /// precision. An undefined business-creation entry is an empty cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,K,L,U,I,N,w,s,G,B\n");
        for (state, flows) in self.states.iter().zip(&self.flows) {
            let b = flows.b.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                state.t, state.k, state.l, state.u, flows.i, flows.n, flows.w, flows.s, flows.g, b
            ));
        }
        out
    }
}

fn flows_at<F: Real>(
    model: &Model<F>,
    state: &EconomyState<F>,
    i: F,
    n: F,
    policy: &GovernmentPolicy<F>,
) -> Result<Flows<F>> {
    let params = model.params();
    let g = policy.g_at(model, state.l)?;
    let s = model.creative_destruction(g)?;
    let w = crate::model::wage(params, state.k, n, state.l, g)?;
    let b = match model.business_creation(s, state.k, state.l) {
        Ok(b) => Some(b),
        Err(Error::NoNetCreation) => None,
        Err(e) => return Err(e),
    };
    Ok(Flows { i, n, w, s, g, b })
}

/// Simulates `T = controls.len()` periods from `initial`.
///
/// Step errors propagate with the offending time index. The terminal
/// state's flows use the stationary continuation convention described on
/// [`Trajectory`].
pub fn simulate<F: Real>(
    model: &Model<F>,
    initial: EconomyState<F>,
    controls: &ControlPath<F>,
    policy: GovernmentPolicy<F>,
) -> Result<Trajectory<F>> {
    let horizon = controls.len();
    if horizon == 0 {
        return Err(Error::Invalid("simulation horizon must be at least 1".into()));
    }
    let params = model.params();
    let mut states = Vec::with_capacity(horizon + 1);
    let mut flows = Vec::with_capacity(horizon + 1);
    let mut state = initial;
    for step in 0..horizon {
        let i = controls.investment[step];
        let n = controls.labor[step];
        if !i.is_finite() || i < F::zero() {
            return Err(Error::domain(
                "simulate",
                format!("gross investment must be non-negative, got {i} at t={step}"),
            ));
        }
        let f = flows_at(model, &state, i, n, &policy)?;
        let next = EconomyState {
            k: capital_step(params, state.k, i, state.l, state.t)?,
            l: location_step(params, state.l, f.s, state.t)?,
            u: immigration_step(params, state.u)?,
            t: state.t + 1,
        };
        states.push(state);
        flows.push(f);
        state = next;
    }
    // terminal flows: stationary continuation
    let i_terminal = params.p() * state.l;
    let n_terminal = model.labor_aggregate(state.u)?;
    let f = flows_at(model, &state, i_terminal, n_terminal, &policy)?;
    states.push(state);
    flows.push(f);
    Ok(Trajectory { states, flows })
}

/// The stationary control rule `I_t = p*L_t`, `N_t = g*U_t + (1-g)*u`
/// applied along the policy-induced state path. This is the default rule
/// the CLI simulates under.
pub fn stationary_controls<F: Real>(
    model: &Model<F>,
    initial: EconomyState<F>,
    policy: GovernmentPolicy<F>,
    horizon: usize,
) -> Result<ControlPath<F>> {
    if horizon == 0 {
        return Err(Error::Invalid("simulation horizon must be at least 1".into()));
    }
    let params = model.params();
    let mut investment = Vec::with_capacity(horizon);
    let mut labor = Vec::with_capacity(horizon);
    let mut state = initial;
    for _ in 0..horizon {
        let i = params.p() * state.l;
        let n = model.labor_aggregate(state.u)?;
        investment.push(i);
        labor.push(n);
        let g = policy.g_at(model, state.l)?;
        let s = model.creative_destruction(g)?;
        state = EconomyState {
            k: capital_step(params, state.k, i, state.l, state.t)?,
            l: location_step(params, state.l, s, state.t)?,
            u: immigration_step(params, state.u)?,
            t: state.t + 1,
        };
    }
    ControlPath::new(investment, labor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamKey;
    use approx::assert_relative_eq;

    type P = ModelParams<f64>;

    fn params() -> P {
        P::default_calibration()
    }

    #[test]
    fn location_step_examples() {
        let p = params(); // phi = 0.5, Q = 10
        assert_eq!(location_step(&p, 0.0, 0.7, 0).unwrap(), 0.0);
        // fixed point at L = s*Q
        let l = 0.5 * 10.0;
        assert_relative_eq!(location_step(&p, l, 0.5, 0).unwrap(), l, epsilon = 1e-14);
        assert_relative_eq!(location_step(&p, 4.0, 0.5, 0).unwrap(), 4.2, epsilon = 1e-14);
    }

    #[test]
    fn location_step_flags_overshoot() {
        let p = params();
        // L = 30, s = 0: 30 * (1 - 1.5) < 0
        assert!(matches!(
            location_step(&p, 30.0, 0.0, 3),
            Err(Error::DegenerateStep { t: 3, .. })
        ));
    }

    #[test]
    fn capital_step_examples() {
        let p = params(); // p = 1
        assert_relative_eq!(capital_step(&p, 7.0, 3.0, 3.0, 0).unwrap(), 7.0);
        let p2 = params().with_key(ParamKey::P, 2.0).unwrap();
        assert_relative_eq!(capital_step(&p2, 10.0, 6.0, 3.0, 0).unwrap(), 10.0);
        assert!(matches!(
            capital_step(&p, 1.0, 0.0, 2.0, 5),
            Err(Error::InfeasiblePath { t: 5, .. })
        ));
    }

    #[test]
    fn immigration_examples() {
        let p = params();
        assert_relative_eq!(immigration_step(&p, 0.0).unwrap(), 40.0);
        let u_star = immigration_steady_state(&p);
        assert_relative_eq!(u_star, 100.0, epsilon = 1e-12);
        assert_relative_eq!(immigration_step(&p, u_star).unwrap(), u_star, epsilon = 1e-12);
        let p0 = params().with_key(ParamKey::M, 0.0).unwrap();
        assert_eq!(immigration_steady_state(&p0), 0.0);
    }

    #[test]
    fn immigration_converges_monotonically() {
        let p = params();
        let mut u = 0.0;
        let mut prev_gap = 100.0;
        for _ in 0..60 {
            u = immigration_step(&p, u).unwrap();
            let gap = (100.0 - u).abs();
            assert!(gap < prev_gap || gap == 0.0);
            prev_gap = gap;
        }
        assert!((u - 100.0).abs() < 1e-9);
    }

    #[test]
    fn immigration_contraction_identity() {
        let p = params();
        let u_star = immigration_steady_state(&p);
        let rate = 1.0 - (p.v() - p.alpha_i());
        let mut u = 3.0;
        for _ in 0..30 {
            let next = immigration_step(&p, u).unwrap();
            // algebraic identity up to rounding, which cancellation magnifies
            // as the gap shrinks
            assert_relative_eq!(
                (next - u_star).abs(),
                rate * (u - u_star).abs(),
                max_relative = 1e-9
            );
            u = next;
        }
    }

    #[test]
    fn map_derivative_matches_finite_difference() {
        let p = params();
        for (l, s) in [(5.0, 0.5), (2.0, 0.3), (8.0, 1.2)] {
            let analytic = location_map_derivative(&p, l, s);
            let h = 1e-7 * l.max(1.0);
            let fd = (location_step(&p, l + h, s, 0).unwrap()
                - location_step(&p, l - h, s, 0).unwrap())
                / (2.0 * h);
            assert_relative_eq!(analytic, fd, epsilon = 1e-8);
        }
        // interior fixed point of the constant-s map has derivative 1 - phi*s
        let s = 0.5;
        let d = location_map_derivative(&p, s * p.q(), s);
        assert_relative_eq!(d, 1.0 - p.phi() * s, epsilon = 1e-14);
    }

    fn steady_initial(model: &Model<f64>, g: f64) -> (EconomyState<f64>, f64) {
        let s = model.creative_destruction(g).unwrap();
        let l = s * model.params().q();
        let u = immigration_steady_state(model.params());
        (EconomyState::new(20.0, l, u, 0).unwrap(), s)
    }

    #[test]
    fn simulate_holds_steady_state() {
        let model = Model::new(params());
        let g = 1.0;
        let (init, _) = steady_initial(&model, g);
        let controls =
            stationary_controls(&model, init, GovernmentPolicy::Constant(g), 20).unwrap();
        let traj = simulate(&model, init, &controls, GovernmentPolicy::Constant(g)).unwrap();
        for st in &traj.states {
            assert_relative_eq!(st.k, init.k, epsilon = 1e-10);
            assert_relative_eq!(st.l, init.l, epsilon = 1e-10);
            assert_relative_eq!(st.u, init.u, epsilon = 1e-10);
        }
        for w in traj.flows.windows(2) {
            assert_relative_eq!(w[0].i, w[1].i, epsilon = 1e-10);
        }
    }

    #[test]
    fn simulate_zero_horizon_errors() {
        let model = Model::new(params());
        let init = EconomyState::new(10.0, 1.0, 0.0, 0).unwrap();
        let controls = ControlPath::new(vec![], vec![]).unwrap();
        assert!(simulate(&model, init, &controls, GovernmentPolicy::Accommodate).is_err());
    }

    #[test]
    fn leader_location_converges_to_peak_capacity() {
        let model = Model::new(params());
        let g_hat = 4.0; // peak of s(G) at defaults, s_hat = 2
        let init = EconomyState::new(10.0, 1.0, 0.0, 0).unwrap();
        let controls =
            stationary_controls(&model, init, GovernmentPolicy::Constant(g_hat), 200).unwrap();
        let traj = simulate(&model, init, &controls, GovernmentPolicy::Constant(g_hat)).unwrap();
        let l_final = traj.states.last().unwrap().l;
        assert!((l_final - 2.0 * 10.0).abs() < 1e-8, "L_T = {l_final}");
    }

    #[test]
    fn resimulation_reproduces_suffix_bitwise() {
        let model = Model::new(params());
        let init = EconomyState::new(10.0, 1.0, 5.0, 0).unwrap();
        let policy = GovernmentPolicy::Constant(1.0);
        let controls = stationary_controls(&model, init, policy, 30).unwrap();
        let traj = simulate(&model, init, &controls, policy).unwrap();
        let mid = 12;
        let suffix_controls = ControlPath::new(
            controls.investment[mid..].to_vec(),
            controls.labor[mid..].to_vec(),
        )
        .unwrap();
        let resumed = simulate(&model, traj.states[mid], &suffix_controls, policy).unwrap();
        for (a, b) in resumed.states.iter().zip(&traj.states[mid..]) {
            assert_eq!(a.k.to_bits(), b.k.to_bits());
            assert_eq!(a.l.to_bits(), b.l.to_bits());
            assert_eq!(a.u.to_bits(), b.u.to_bits());
        }
    }

    #[test]
    fn transitions_hold_along_trajectory() {
        let model = Model::new(params());
        let p = model.params().clone();
        let init = EconomyState::new(15.0, 2.0, 10.0, 0).unwrap();
        let policy = GovernmentPolicy::Constant(0.8);
        let controls = stationary_controls(&model, init, policy, 25).unwrap();
        let traj = simulate(&model, init, &controls, policy).unwrap();
        for t in 0..traj.horizon() {
            let (st, next, fl) = (&traj.states[t], &traj.states[t + 1], &traj.flows[t]);
            assert!((next.k - (st.k + fl.i - p.p() * st.l)).abs() < 1e-12);
            assert!(
                (next.l - st.l * (p.phi() * fl.s + 1.0 - p.phi() * st.l / p.q())).abs() < 1e-12
            );
            assert!(
                (next.u - (st.u + p.z() * p.alpha_f() * p.m() - (p.v() - p.alpha_i()) * st.u))
                    .abs()
                    < 1e-12
            );
            assert_eq!(next.t, st.t + 1);
        }
    }

    #[test]
    fn csv_round_trips_shape() {
        let model = Model::new(params());
        let init = EconomyState::new(10.0, 1.0, 5.0, 0).unwrap();
        let policy = GovernmentPolicy::Constant(1.0);
        let controls = stationary_controls(&model, init, policy, 5).unwrap();
        let traj = simulate(&model, init, &controls, policy).unwrap();
        let csv = traj.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,K,L,U,I,N,w,s,G,B");
        assert_eq!(lines.count(), 6); // T + 1 rows
        for (i, line) in csv.lines().skip(1).enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 10);
            assert_eq!(fields[0].parse::<u32>().unwrap(), i as u32);
            let k: f64 = fields[1].parse().unwrap();
            assert!(k.is_finite());
        }
    }
}
