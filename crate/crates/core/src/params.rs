//! Exogenous model parameters and their validation.
//!
//! [`ModelParams`] carries the full exogenous vector of the economy: the
//! production technology, property price, tax/fine environment, sector
//! shares, immigration process, location dynamics, and the coefficients of
//! the business-creation and creative-destruction forms. Two quantities are
//! derived, never stored: the formal-sector share `alpha_f = 1 - alpha_i`
//! and the discount factor `beta = 1 / (1 + r)`.
//!
//! Construction validates every range constraint and fails on violation, so
//! a `ModelParams` value in hand is always internally consistent.
//!
//! The default calibration returned by [`ModelParams::default_calibration`]
//! is illustrative. It was chosen to make every regime solvable and every
//! demonstration vivid; it is not estimated from data.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::num::{lit, Real};

/// The exogenous parameter vector. See module docs.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<F> {
    a: F,
    p: F,
    v: F,
    x: F,
    chi: F,
    z: F,
    e: F,
    tau: F,
    alpha_i: F,
    phi: F,
    q: F,
    m: F,
    r: F,
    g: F,
    u: F,
    kappa: F,
    c0: F,
    gamma: F,
    d0: F,
    b0: F,
    b_s: F,
    b_k: F,
    b_l: F,
}

/// Identifies one parameter, including the derived `alpha_f` used by the
/// comparative-statics sweep (writing `alpha_f` rewrites `alpha_i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamKey {
    A,
    P,
    V,
    X,
    Chi,
    Z,
    E,
    Tau,
    AlphaI,
    /// Derived: reading returns `1 - alpha_i`, writing sets `alpha_i = 1 - value`.
    AlphaF,
    Phi,
    Q,
    M,
    R,
    G,
    U,
    Kappa,
    C0,
    Gamma,
    D0,
    B0,
    BS,
    BK,
    BL,
}

impl ParamKey {
    /// Configuration-document key for this parameter.
    pub fn name(self) -> &'static str {
        match self {
            ParamKey::A => "a",
            ParamKey::P => "p",
            ParamKey::V => "v",
            ParamKey::X => "x",
            ParamKey::Chi => "chi",
            ParamKey::Z => "z",
            ParamKey::E => "e",
            ParamKey::Tau => "tau",
            ParamKey::AlphaI => "alpha_i",
            ParamKey::AlphaF => "alpha_f",
            ParamKey::Phi => "phi",
            ParamKey::Q => "Q",
            ParamKey::M => "M",
            ParamKey::R => "r",
            ParamKey::G => "g",
            ParamKey::U => "u",
            ParamKey::Kappa => "kappa",
            ParamKey::C0 => "c0",
            ParamKey::Gamma => "gamma",
            ParamKey::D0 => "d0",
            ParamKey::B0 => "B0",
            ParamKey::BS => "b_s",
            ParamKey::BK => "b_K",
            ParamKey::BL => "b_L",
        }
    }
}

/// Storable keys in canonical configuration order (`alpha_f` excluded: it is
/// derived and is not a configuration field).
pub const CONFIG_KEYS: [ParamKey; 23] = [
    ParamKey::A,
    ParamKey::P,
    ParamKey::V,
    ParamKey::X,
    ParamKey::Chi,
    ParamKey::Z,
    ParamKey::E,
    ParamKey::Tau,
    ParamKey::AlphaI,
    ParamKey::Phi,
    ParamKey::Q,
    ParamKey::M,
    ParamKey::R,
    ParamKey::G,
    ParamKey::U,
    ParamKey::Kappa,
    ParamKey::C0,
    ParamKey::Gamma,
    ParamKey::D0,
    ParamKey::B0,
    ParamKey::BS,
    ParamKey::BK,
    ParamKey::BL,
];

impl<F: Real> ModelParams<F> {
    /// The illustrative default calibration (see module docs).
    pub fn default_calibration() -> Self {
        let raw = [
            0.33, 1.0, 0.6, 2.0, 0.1, 0.5, 0.1, 0.2, 0.2, 0.5, 10.0, 100.0, 0.04, 0.3, 50.0,
            0.1, 2.0, 0.5, 0.5, 1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0,
        ];
        let mut vals = raw.iter().map(|&x| lit::<F>(x));
        let mut next = || vals.next().unwrap();
        let params = ModelParams {
            a: next(),
            p: next(),
            v: next(),
            x: next(),
            chi: next(),
            z: next(),
            e: next(),
            tau: next(),
            alpha_i: next(),
            phi: next(),
            q: next(),
            m: next(),
            r: next(),
            g: next(),
            u: next(),
            kappa: next(),
            c0: next(),
            gamma: next(),
            d0: next(),
            b0: next(),
            b_s: next(),
            b_k: next(),
            b_l: next(),
        };
        params.validate().expect("default calibration is valid");
        params
    }

    /// Reads a parameter by key (`alpha_f` is computed).
    pub fn get(&self, key: ParamKey) -> F {
        match key {
            ParamKey::A => self.a,
            ParamKey::P => self.p,
            ParamKey::V => self.v,
            ParamKey::X => self.x,
            ParamKey::Chi => self.chi,
            ParamKey::Z => self.z,
            ParamKey::E => self.e,
            ParamKey::Tau => self.tau,
            ParamKey::AlphaI => self.alpha_i,
            ParamKey::AlphaF => self.alpha_f(),
            ParamKey::Phi => self.phi,
            ParamKey::Q => self.q,
            ParamKey::M => self.m,
            ParamKey::R => self.r,
            ParamKey::G => self.g,
            ParamKey::U => self.u,
            ParamKey::Kappa => self.kappa,
            ParamKey::C0 => self.c0,
            ParamKey::Gamma => self.gamma,
            ParamKey::D0 => self.d0,
            ParamKey::B0 => self.b0,
            ParamKey::BS => self.b_s,
            ParamKey::BK => self.b_k,
            ParamKey::BL => self.b_l,
        }
    }

    /// Returns a copy with one parameter replaced, re-validating the result.
    /// Writing `alpha_f` sets `alpha_i = 1 - value` (the shares always sum
    /// to one).
    pub fn with_key(&self, key: ParamKey, value: F) -> Result<Self> {
        let mut next = self.clone();
        match key {
            ParamKey::A => next.a = value,
            ParamKey::P => next.p = value,
            ParamKey::V => next.v = value,
            ParamKey::X => next.x = value,
            ParamKey::Chi => next.chi = value,
            ParamKey::Z => next.z = value,
            ParamKey::E => next.e = value,
            ParamKey::Tau => next.tau = value,
            ParamKey::AlphaI => next.alpha_i = value,
            ParamKey::AlphaF => next.alpha_i = F::one() - value,
            ParamKey::Phi => next.phi = value,
            ParamKey::Q => next.q = value,
            ParamKey::M => next.m = value,
            ParamKey::R => next.r = value,
            ParamKey::G => next.g = value,
            ParamKey::U => next.u = value,
            ParamKey::Kappa => next.kappa = value,
            ParamKey::C0 => next.c0 = value,
            ParamKey::Gamma => next.gamma = value,
            ParamKey::D0 => next.d0 = value,
            ParamKey::B0 => next.b0 = value,
            ParamKey::BS => next.b_s = value,
            ParamKey::BK => next.b_k = value,
            ParamKey::BL => next.b_l = value,
        }
        next.validate()?;
        Ok(next)
    }

    fn validate(&self) -> Result<()> {
        fn f64_of<F: Real>(v: F) -> f64 {
            v.to_f64().unwrap_or(f64::NAN)
        }
        let checks: [(ParamKey, F, bool, &'static str); 24] = [
            (ParamKey::A, self.a, self.a > F::zero() && self.a < F::one(), "0 < a < 1"),
            (ParamKey::P, self.p, self.p > F::zero(), "p > 0"),
            (ParamKey::X, self.x, self.x > F::one(), "x > 1"),
            (ParamKey::Chi, self.chi, self.chi > F::zero(), "chi > 0"),
            (ParamKey::Z, self.z, self.z > F::zero(), "z > 0"),
            (ParamKey::E, self.e, self.e >= F::zero(), "e >= 0"),
            (ParamKey::Tau, self.tau, self.tau >= F::zero(), "tau >= 0"),
            (
                ParamKey::AlphaI,
                self.alpha_i,
                self.alpha_i >= F::zero() && self.alpha_i < lit(0.5),
                "0 <= alpha_i < 0.5",
            ),
            (
                ParamKey::V,
                self.v,
                self.v > self.alpha_i && self.v < F::one(),
                "alpha_i < v < 1",
            ),
            (ParamKey::Phi, self.phi, self.phi >= F::zero(), "phi >= 0"),
            (ParamKey::Q, self.q, self.q > F::zero(), "Q > 0"),
            (ParamKey::M, self.m, self.m >= F::zero(), "M >= 0"),
            (ParamKey::R, self.r, self.r > F::zero(), "r > 0"),
            (
                ParamKey::G,
                self.g,
                self.g >= F::zero() && self.g <= F::one(),
                "0 <= g <= 1",
            ),
            (ParamKey::U, self.u, self.u >= F::zero(), "u >= 0"),
            (ParamKey::Kappa, self.kappa, self.kappa > F::zero(), "kappa > 0"),
            (ParamKey::C0, self.c0, self.c0 > F::zero(), "c0 > 0"),
            (
                ParamKey::Gamma,
                self.gamma,
                self.gamma > F::zero() && self.gamma < F::one(),
                "0 < gamma < 1",
            ),
            (ParamKey::D0, self.d0, self.d0 > F::zero(), "d0 > 0"),
            (ParamKey::B0, self.b0, self.b0 > F::zero(), "B0 > 0"),
            (ParamKey::BS, self.b_s, self.b_s > F::zero(), "b_s > 0"),
            (ParamKey::BK, self.b_k, self.b_k > F::zero(), "b_K > 0"),
            (ParamKey::BL, self.b_l, self.b_l > F::zero(), "b_L > 0"),
            (
                ParamKey::AlphaF,
                self.alpha_f(),
                self.alpha_f() > lit(0.5),
                "alpha_f = 1 - alpha_i > 0.5",
            ),
        ];
        for (key, value, ok, constraint) in checks {
            if !value.is_finite() {
                return Err(Error::InvalidParam {
                    key: key.name(),
                    constraint: "finite",
                    value: f64_of(value),
                });
            }
            if !ok {
                return Err(Error::InvalidParam {
                    key: key.name(),
                    constraint,
                    value: f64_of(value),
                });
            }
        }
        Ok(())
    }

    // Field accessors. `alpha_f` and `beta` are derived on the fly.

    pub fn a(&self) -> F {
        self.a
    }
    pub fn p(&self) -> F {
        self.p
    }
    pub fn v(&self) -> F {
        self.v
    }
    pub fn x(&self) -> F {
        self.x
    }
    pub fn chi(&self) -> F {
        self.chi
    }
    pub fn z(&self) -> F {
        self.z
    }
    pub fn e(&self) -> F {
        self.e
    }
    pub fn tau(&self) -> F {
        self.tau
    }
    pub fn alpha_i(&self) -> F {
        self.alpha_i
    }
    /// Formal-sector share, `1 - alpha_i`.
    pub fn alpha_f(&self) -> F {
        F::one() - self.alpha_i
    }
    pub fn phi(&self) -> F {
        self.phi
    }
    pub fn q(&self) -> F {
        self.q
    }
    pub fn m(&self) -> F {
        self.m
    }
    pub fn r(&self) -> F {
        self.r
    }
    pub fn g(&self) -> F {
        self.g
    }
    pub fn u(&self) -> F {
        self.u
    }
    pub fn kappa(&self) -> F {
        self.kappa
    }
    pub fn c0(&self) -> F {
        self.c0
    }
    pub fn gamma(&self) -> F {
        self.gamma
    }
    pub fn d0(&self) -> F {
        self.d0
    }
    pub fn b0(&self) -> F {
        self.b0
    }
    pub fn b_s(&self) -> F {
        self.b_s
    }
    pub fn b_k(&self) -> F {
        self.b_k
    }
    pub fn b_l(&self) -> F {
        self.b_l
    }
    /// Discount factor, `1 / (1 + r)`.
    pub fn beta(&self) -> F {
        F::one() / (F::one() + self.r)
    }

    /// Parses a flat `key = value` configuration document.
    ///
    /// One key per field, exact names as in [`CONFIG_KEYS`]. `#` starts a
    /// comment. Unknown or duplicate keys are errors. Missing keys fall back
    /// to the default calibration; each applied default is logged and also
    /// returned so callers can surface the list.
    pub fn from_config(text: &str) -> Result<(Self, Vec<&'static str>)> {
        let defaults = Self::default_calibration();
        let mut values: Vec<Option<F>> = vec![None; CONFIG_KEYS.len()];
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(i) => &raw_line[..i],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = parse_kv(line, lineno + 1)?;
            let idx = CONFIG_KEYS
                .iter()
                .position(|k| k.name() == key)
                .ok_or_else(|| Error::Config(format!("unknown key `{key}` at line {}", lineno + 1)))?;
            if values[idx].is_some() {
                return Err(Error::Config(format!(
                    "duplicate key `{key}` at line {}",
                    lineno + 1
                )));
            }
            let parsed: f64 = value.parse().map_err(|_| {
                Error::Config(format!(
                    "key `{key}` at line {}: `{value}` is not a number",
                    lineno + 1
                ))
            })?;
            values[idx] = Some(F::from_f64(parsed).ok_or_else(|| {
                Error::Config(format!("key `{key}`: value {parsed} not representable"))
            })?);
        }

        let mut applied_defaults = Vec::new();
        let mut params = defaults.clone();
        for (idx, key) in CONFIG_KEYS.iter().enumerate() {
            match values[idx] {
                Some(v) => params = params.with_key_unchecked(*key, v),
                None => {
                    log::info!(
                        "config: `{}` not set, using default {}",
                        key.name(),
                        defaults.get(*key)
                    );
                    applied_defaults.push(key.name());
                }
            }
        }
        params.validate()?;
        Ok((params, applied_defaults))
    }

    /// Serializes to the flat `key = value` document, canonical key order,
    /// full precision.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        for key in CONFIG_KEYS {
            writeln!(out, "{} = {}", key.name(), self.get(key)).unwrap();
        }
        out
    }

    /// Like `with_key` but defers validation (used while assembling from
    /// config, where the full vector is validated once at the end).
    fn with_key_unchecked(&self, key: ParamKey, value: F) -> Self {
        let mut next = self.clone();
        match key {
            ParamKey::A => next.a = value,
            ParamKey::P => next.p = value,
            ParamKey::V => next.v = value,
            ParamKey::X => next.x = value,
            ParamKey::Chi => next.chi = value,
            ParamKey::Z => next.z = value,
            ParamKey::E => next.e = value,
            ParamKey::Tau => next.tau = value,
            ParamKey::AlphaI => next.alpha_i = value,
            ParamKey::AlphaF => next.alpha_i = F::one() - value,
            ParamKey::Phi => next.phi = value,
            ParamKey::Q => next.q = value,
            ParamKey::M => next.m = value,
            ParamKey::R => next.r = value,
            ParamKey::G => next.g = value,
            ParamKey::U => next.u = value,
            ParamKey::Kappa => next.kappa = value,
            ParamKey::C0 => next.c0 = value,
            ParamKey::Gamma => next.gamma = value,
            ParamKey::D0 => next.d0 = value,
            ParamKey::B0 => next.b0 = value,
            ParamKey::BS => next.b_s = value,
            ParamKey::BK => next.b_k = value,
            ParamKey::BL => next.b_l = value,
        }
        next
    }
}

fn parse_kv(line: &str, lineno: usize) -> Result<(&str, &str)> {
    let mut parts = line.splitn(2, '=');
    let key = parts.next().unwrap_or("").trim();
    let value = parts
        .next()
        .ok_or_else(|| Error::Config(format!("line {lineno}: expected `key = value`")))?
        .trim();
    if key.is_empty() || value.is_empty() {
        return Err(Error::Config(format!("line {lineno}: expected `key = value`")));
    }
    Ok((key, value))
}
