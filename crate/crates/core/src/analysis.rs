//! Fixed points, stability, and cobweb iteration of the location map.
//!
//! The one-dimensional map under study is
//!
//! ```text
//! L' = L * (phi * s(L) + 1 - phi * L / Q)
//! ```
//!
//! where the net-creation feed `s` may be a constant, a supplied function
//! of `L`, or the built-in sigmoid demonstration that produces the
//! three-equilibria configuration (two stable outer fixed points separated
//! by an unstable one).

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{lit, Real};
use crate::params::ModelParams;
use crate::solve1d;

/// Where the map's net-creation input comes from.
#[derive(Clone)]
pub enum SFeed<F> {
    /// Constant net creation.
    Constant(F),
    /// Logistic feedback `base + amplitude / (1 + exp(-rate * (L - center)))`.
    Sigmoid { base: F, amplitude: F, center: F, rate: F },
    /// Arbitrary supplied function.
    Custom(Arc<dyn Fn(F) -> F + Send + Sync>),
}

impl<F: Real> SFeed<F> {
    /// The canonical three-equilibria demonstration feed. The sigmoid is a
    /// stand-in: any S-shaped response of net creation to the location
    /// index produces the same multiple-equilibria geometry.
    pub fn demo_sigmoid() -> Self {
        SFeed::Sigmoid {
            base: lit(0.1),
            amplitude: lit(0.9),
            center: lit(5.0),
            rate: F::one(),
        }
    }

    pub fn eval(&self, l: F) -> F {
        match self {
            SFeed::Constant(s) => *s,
            SFeed::Sigmoid { base, amplitude, center, rate } => {
                *base + *amplitude / (F::one() + (-(*rate) * (l - *center)).exp())
            }
            SFeed::Custom(f) => f(l),
        }
    }
}

impl<F: Real> std::fmt::Debug for SFeed<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SFeed::Constant(s) => write!(f, "Constant({s})"),
            SFeed::Sigmoid { base, amplitude, center, rate } => write!(
                f,
                "Sigmoid(base={base}, amplitude={amplitude}, center={center}, rate={rate})"
            ),
            SFeed::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// The location map with its net-creation feed.
#[derive(Debug, Clone)]
pub struct LocationMapConfig<F> {
    pub phi: F,
    pub q: F,
    pub s_feed: SFeed<F>,
}

impl<F: Real> LocationMapConfig<F> {
    pub fn new(phi: F, q: F, s_feed: SFeed<F>) -> Result<Self> {
        if !(phi >= F::zero()) || !phi.is_finite() {
            return Err(Error::domain("LocationMapConfig", format!("phi must be >= 0, got {phi}")));
        }
        if !(q > F::zero()) || !q.is_finite() {
            return Err(Error::domain("LocationMapConfig", format!("Q must be > 0, got {q}")));
        }
        Ok(LocationMapConfig { phi, q, s_feed })
    }

    pub fn from_params(params: &ModelParams<F>, s_feed: SFeed<F>) -> Result<Self> {
        Self::new(params.phi(), params.q(), s_feed)
    }

    pub fn map(&self, l: F) -> F {
        l * (self.phi * self.s_feed.eval(l) + F::one() - self.phi * l / self.q)
    }

    /// Map derivative: analytic for a constant feed, central difference
    /// otherwise.
    pub fn derivative(&self, l: F) -> F {
        match self.s_feed {
            SFeed::Constant(s) => {
                F::one() + self.phi * s - lit::<F>(2.0) * self.phi * l / self.q
            }
            _ => {
                let h = lit::<F>(1e-6) * l.abs().max(F::one());
                let lo = (l - h).max(F::zero());
                (self.map(l + h) - self.map(lo)) / (l + h - lo)
            }
        }
    }
}

/// Stability class of a fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    Nonhyperbolic,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stability::Stable => write!(f, "stable"),
            Stability::Unstable => write!(f, "unstable"),
            Stability::Nonhyperbolic => write!(f, "nonhyperbolic"),
        }
    }
}

/// A fixed point of the location map with its classification.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FixedPoint<F> {
    pub l_star: F,
    pub map_derivative: F,
    pub classification: Stability,
}

/// Classifies a fixed point by the magnitude of the map derivative, with a
/// `1e-6` band around one treated as nonhyperbolic. Errors if `l_star` is
/// not actually fixed.
pub fn classify_stability<F: Real>(
    config: &LocationMapConfig<F>,
    l_star: F,
) -> Result<FixedPoint<F>> {
    let gap = (config.map(l_star) - l_star).abs();
    let tol = lit::<F>(1e-10) * l_star.abs().max(F::one());
    if gap > tol {
        return Err(Error::domain(
            "classify_stability",
            format!("L = {l_star} is not a fixed point (|map(L) - L| = {gap})"),
        ));
    }
    let d = config.derivative(l_star);
    let band = lit::<F>(1e-6);
    let classification = if (d.abs() - F::one()).abs() < band {
        Stability::Nonhyperbolic
    } else if d.abs() < F::one() {
        Stability::Stable
    } else {
        Stability::Unstable
    };
    Ok(FixedPoint { l_star, map_derivative: d, classification })
}

/// Finds all fixed points of the map on `[0, l_max]`.
///
/// The origin is always examined explicitly (it is structurally fixed).
/// Sign changes of `map(L) - L` over `n_brackets` subintervals are refined
/// by bisection to an interval below `1e-12`; brackets without a sign
/// change whose residual dips to zero are reported as nonhyperbolic
/// tangency candidates rather than dropped.
pub fn find_fixed_points<F: Real>(
    config: &LocationMapConfig<F>,
    l_max: F,
    n_brackets: usize,
) -> Result<Vec<FixedPoint<F>>> {
    if !(l_max > F::zero()) {
        return Err(Error::domain("find_fixed_points", format!("l_max must be > 0, got {l_max}")));
    }
    if n_brackets < 100 {
        return Err(Error::domain(
            "find_fixed_points",
            format!("need at least 100 brackets, got {n_brackets}"),
        ));
    }
    let residual = |l: F| config.map(l) - l;
    let mut roots: Vec<F> = vec![F::zero()];
    let grid: Vec<F> = (0..=n_brackets)
        .map(|i| l_max * F::from_usize(i).unwrap() / F::from_usize(n_brackets).unwrap())
        .collect();
    let tangent_tol = lit::<F>(1e-10) * l_max.max(F::one());
    for pair in grid.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let (flo, fhi) = (residual(lo), residual(hi));
        if flo == F::zero() && lo > F::zero() {
            roots.push(lo);
            continue;
        }
        if (flo > F::zero()) != (fhi > F::zero()) {
            let root = solve1d::bisect(residual, lo, hi, lit(1e-12))?;
            roots.push(root);
        } else {
            // possible tangency: look for an interior minimum of |residual|
            let mid = (lo + hi) / lit(2.0);
            let probe = residual(mid).abs();
            if probe < flo.abs() && probe < fhi.abs() {
                let best = solve1d::golden_min(|l| residual(l).abs(), lo, hi, lit(1e-12));
                if residual(best).abs() < tangent_tol && best > F::zero() {
                    roots.push(best);
                }
            }
        }
    }
    // dedupe (origin may also appear as a grid root)
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut unique: Vec<F> = Vec::new();
    let sep = lit::<F>(1e-7) * l_max.max(F::one());
    for r in roots {
        if unique.last().map_or(true, |&last| r - last > sep) {
            unique.push(r);
        }
    }
    unique.iter().map(|&r| classify_stability(config, r)).collect()
}

/// Iterate pairs plus the sampled map curve, ready for plotting.
#[derive(Debug, Clone)]
pub struct CobwebSeries<F> {
    /// `(L_t, L_{t+1})` pairs.
    pub steps: Vec<(F, F)>,
    /// `(L, map(L))` samples on a strictly increasing grid.
    pub curve: Vec<(F, F)>,
    pub converged: bool,
    pub diverged: bool,
}

impl<F: Real> CobwebSeries<F> {
    /// CSV with columns `L_t,L_next,curve_L,curve_map`; the shorter of the
    /// two series leaves its cells empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("L_t,L_next,curve_L,curve_map\n");
        let rows = self.steps.len().max(self.curve.len());
        for i in 0..rows {
            let (a, b) = self
                .steps
                .get(i)
                .map(|(x, y)| (x.to_string(), y.to_string()))
                .unwrap_or_default();
            let (c, d) = self
                .curve
                .get(i)
                .map(|(x, y)| (x.to_string(), y.to_string()))
                .unwrap_or_default();
            out.push_str(&format!("{a},{b},{c},{d}\n"));
        }
        out
    }
}

/// Forward-iterates the map from `l0` for up to `t_max` steps, recording
/// the cobweb pairs and a 512-point sample of the curve on `[0, l_max]`.
/// Iterates exceeding `l_max` truncate the series with the divergence
/// flag; convergence is `|L_T - L_{T-1}| < 1e-10`.
pub fn cobweb<F: Real>(
    config: &LocationMapConfig<F>,
    l0: F,
    t_max: usize,
    l_max: F,
) -> Result<CobwebSeries<F>> {
    if t_max == 0 {
        return Err(Error::domain("cobweb", "need at least one step".to_string()));
    }
    if !(l0 >= F::zero()) || !l0.is_finite() {
        return Err(Error::domain("cobweb", format!("L0 must be >= 0, got {l0}")));
    }
    let samples = 512;
    let curve: Vec<(F, F)> = (0..=samples)
        .map(|i| {
            let l = l_max * F::from_usize(i).unwrap() / F::from_usize(samples).unwrap();
            (l, config.map(l))
        })
        .collect();
    let mut steps = Vec::with_capacity(t_max);
    let mut l = l0;
    let mut diverged = false;
    for _ in 0..t_max {
        let next = config.map(l);
        steps.push((l, next));
        if !next.is_finite() || next > l_max * lit(2.0) || next < F::zero() {
            diverged = true;
            break;
        }
        l = next;
    }
    let converged = !diverged
        && steps
            .last()
            .map_or(false, |&(a, b)| (b - a).abs() < lit(1e-10));
    Ok(CobwebSeries { steps, curve, converged, diverged })
}

/// Fixed points as CSV (`L_star,map_derivative,classification`).
pub fn fixed_points_csv<F: Real>(points: &[FixedPoint<F>]) -> String {
    let mut out = String::from("L_star,map_derivative,classification\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.l_star, p.map_derivative, p.classification));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn constant_map(s: f64) -> LocationMapConfig<f64> {
        LocationMapConfig::new(0.5, 10.0, SFeed::Constant(s)).unwrap()
    }

    #[test]
    fn constant_feed_fixed_points() {
        let cfg = constant_map(0.5);
        let points = find_fixed_points(&cfg, 12.0, 200).unwrap();
        let locs: Vec<f64> = points.iter().map(|p| p.l_star).collect();
        assert_eq!(points.len(), 2, "{locs:?}");
        assert_relative_eq!(points[0].l_star, 0.0);
        assert_relative_eq!(points[1].l_star, 5.0, epsilon = 1e-9);
    }

    #[test]
    fn constant_feed_classification() {
        let cfg = constant_map(0.5);
        let origin = classify_stability(&cfg, 0.0).unwrap();
        assert_relative_eq!(origin.map_derivative, 1.25, epsilon = 1e-12);
        assert_eq!(origin.classification, Stability::Unstable);
        let interior = classify_stability(&cfg, 5.0).unwrap();
        assert_relative_eq!(interior.map_derivative, 0.75, epsilon = 1e-12);
        assert_eq!(interior.classification, Stability::Stable);
    }

    #[test]
    fn zero_feed_only_origin() {
        let cfg = constant_map(0.0);
        let points = find_fixed_points(&cfg, 12.0, 200).unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].l_star, 0.0);
    }

    #[test]
    fn classify_rejects_non_fixed_point() {
        let cfg = constant_map(0.5);
        assert!(classify_stability(&cfg, 3.0).is_err());
    }

    #[test]
    fn phi_zero_everything_nonhyperbolic() {
        let cfg = LocationMapConfig::new(0.0, 10.0, SFeed::Constant(0.7)).unwrap();
        for l in [0.0, 1.0, 4.0, 9.0] {
            let fp = classify_stability(&cfg, l).unwrap();
            assert_relative_eq!(fp.map_derivative, 1.0, epsilon = 1e-12);
            assert_eq!(fp.classification, Stability::Nonhyperbolic);
        }
    }

    #[test]
    fn sigmoid_demo_has_three_interior_crossings() {
        let cfg = LocationMapConfig::new(0.5, 10.0, SFeed::demo_sigmoid()).unwrap();
        let points = find_fixed_points(&cfg, 12.0, 400).unwrap();
        let interior: Vec<&FixedPoint<f64>> =
            points.iter().filter(|p| p.l_star > 0.0).collect();
        assert_eq!(interior.len(), 3, "{points:?}");
        assert_eq!(interior[0].classification, Stability::Stable);
        assert_eq!(interior[1].classification, Stability::Unstable);
        assert_eq!(interior[2].classification, Stability::Stable);
    }

    #[test]
    fn sigmoid_classification_agrees_with_forward_iteration() {
        let cfg = LocationMapConfig::new(0.5, 10.0, SFeed::demo_sigmoid()).unwrap();
        let points = find_fixed_points(&cfg, 12.0, 400).unwrap();
        for p in points.iter().filter(|p| p.l_star > 0.0) {
            for sign in [1.0, -1.0] {
                let mut l = p.l_star + sign * 1e-3;
                let start_gap = (l - p.l_star).abs();
                for _ in 0..20 {
                    l = cfg.map(l);
                }
                let end_gap = (l - p.l_star).abs();
                match p.classification {
                    Stability::Stable => assert!(end_gap < start_gap),
                    Stability::Unstable => assert!(end_gap > start_gap),
                    Stability::Nonhyperbolic => {}
                }
            }
        }
    }

    #[test]
    fn cobweb_stays_at_fixed_point() {
        let cfg = constant_map(0.5);
        let series = cobweb(&cfg, 5.0, 10, 12.0).unwrap();
        for (a, b) in &series.steps {
            assert_relative_eq!(*a, 5.0, epsilon = 1e-12);
            assert_relative_eq!(*b, 5.0, epsilon = 1e-12);
        }
        assert!(series.converged);
    }

    #[test]
    fn cobweb_converges_from_below() {
        let cfg = constant_map(0.5);
        let series = cobweb(&cfg, 1.0, 200, 12.0).unwrap();
        assert!(series.converged);
        assert!(!series.diverged);
        let last = series.steps.last().unwrap().1;
        assert_relative_eq!(last, 5.0, epsilon = 1e-8);
    }

    #[test]
    fn cobweb_moves_away_from_unstable_point() {
        let cfg = LocationMapConfig::new(0.5, 10.0, SFeed::demo_sigmoid()).unwrap();
        let points = find_fixed_points(&cfg, 12.0, 400).unwrap();
        let unstable = points
            .iter()
            .find(|p| p.l_star > 0.0 && p.classification == Stability::Unstable)
            .unwrap();
        let series = cobweb(&cfg, unstable.l_star + 1e-3, 10, 12.0).unwrap();
        let mut prev_gap = 1e-3;
        for (_, next) in series.steps.iter().take(3) {
            let gap = (next - unstable.l_star).abs();
            assert!(gap > prev_gap, "iterates should move away monotonically");
            prev_gap = gap;
        }
    }

    #[test]
    fn cobweb_flags_divergence() {
        // an explosive custom map
        let cfg = LocationMapConfig::new(1.0, 10.0, SFeed::Custom(Arc::new(|_l| 50.0))).unwrap();
        let series = cobweb(&cfg, 1.0, 50, 12.0).unwrap();
        assert!(series.diverged);
        assert!(series.steps.len() < 50);
    }

    #[test]
    fn cobweb_csv_shape() {
        let cfg = constant_map(0.5);
        let series = cobweb(&cfg, 1.0, 5, 12.0).unwrap();
        let csv = series.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "L_t,L_next,curve_L,curve_map");
        // curve has 513 samples, steps only 5 -> padded cells
        assert_eq!(csv.lines().count(), 514);
        let first = csv.lines().nth(1).unwrap();
        assert_eq!(first.split(',').count(), 4);
        let tail = csv.lines().last().unwrap();
        assert!(tail.starts_with(",,"));
    }

    #[test]
    fn derivative_analytic_vs_numeric_constant_feed() {
        let cfg = constant_map(0.7);
        for l in [0.5, 3.0, 7.0] {
            let analytic = cfg.derivative(l);
            let h = 1e-6 * l.max(1.0);
            let fd = (cfg.map(l + h) - cfg.map(l - h)) / (2.0 * h);
            assert!((analytic - fd).abs() < 1e-8);
        }
    }
}
