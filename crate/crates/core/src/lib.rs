//! A numerical laboratory for a discrete-time general-equilibrium model of
//! government infrastructure investment, business location, and new firm
//! creation.
//!
//! The economy has three stocks — capital `K`, a location index `L`, and an
//! unskilled-immigrant pool `U` — and a government that invests `G` in
//! productivity-enhancing public goods. Net business turnover induced by
//! that investment ("creative destruction" `s = C(G) - D(G)`) feeds a
//! logistic location dynamic, and new business creation `B(s, K, L)` rises
//! with all three of its arguments.
//!
//! The crate provides:
//!
//! * the model primitives and their analytic derivatives ([`model`],
//!   [`forms`]),
//! * forward simulation of the state dynamics ([`dynamics`]),
//! * steady-state solvers for the two policy regimes — the accommodating
//!   "follower" government and the creative-destruction-maximizing
//!   "leader" — plus a finite-horizon optimizer that cross-checks the
//!   steady states against the first-order conditions ([`equilibrium`],
//!   [`transcription`]),
//! * fixed-point and stability analysis of the location map and numerical
//!   comparative statics ([`analysis`], [`statics`]),
//! * a synthetic-data study of why regressing business creation on
//!   government investment is misspecified when investment is itself an
//!   equilibrium outcome ([`econ`]).
//!
//! All numerics are generic over the scalar type via [`num::Real`]; the
//! aliases at the crate root pin the default `f64` instantiation.

pub mod analysis;
pub mod dynamics;
pub mod econ;
pub mod equilibrium;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod model;
pub mod num;
pub mod params;
pub mod solve1d;
pub mod statics;
pub mod transcription;

pub use error::{Error, Result};
pub use forms::Model;
pub use model::EconomyState;
pub use params::{ModelParams, ParamKey};

/// Default scalar used by the CLI and the concrete aliases below.
pub type DefaultScalar = f64;

/// Parameter vector at the default scalar.
pub type Params = ModelParams<DefaultScalar>;
/// Economy state at the default scalar.
pub type State = EconomyState<DefaultScalar>;
/// Model bundle at the default scalar.
pub type Economy = Model<DefaultScalar>;
