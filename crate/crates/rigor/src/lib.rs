//! Rigorous-numerics toolkit.
//!
//! The crate is organized around one value type, [`interval::Interval`]:
//! every quantity the library reports is an outward-rounded enclosure of the
//! exact real result. On top of the interval core sit
//!
//! * [`jet`] — degree-2 Taylor arithmetic (value, first and second derivative
//!   enclosures) used by the quadrature panel rule,
//! * [`quadrature`] — validated 1-D/2-D integration with singular-endpoint and
//!   infinite-tail handling,
//! * [`piecewise`] — meshes and per-cell enclosures of functions and their
//!   derivatives,
//! * [`weights`] — singular radial/mixed weights, Hölder weights, cutoffs and
//!   damping coefficients,
//! * [`transport`] — 1-D transport maps, sign thresholds and the sharp C^{1/2}
//!   constants of the velocity-gradient kernels,
//! * [`stability`] — checkers for the linear/nonlinear stability lemmas, the
//!   rank-one decoupling demonstrator and the toy-model suite,
//! * [`rescale`] — a desk-scale dynamic-rescaling solver for the 2-D
//!   Boussinesq system,
//! * [`report`] — report data model and CSV / JSON-lines emission shared by
//!   the CLI subcommands.

pub mod interval;
pub mod jet;
pub mod quadrature;
pub mod piecewise;
pub mod weights;
pub mod transport;
pub mod stability;
pub mod rescale;
pub mod report;

pub use interval::Interval;
