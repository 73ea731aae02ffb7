//! Green's-function extrema and Lyapunov-type thresholds for the two-point
//! problem `D^alpha u + q u = 0`, `u(a) = u(b) = 0`, with a Caputo-Fabrizio
//! derivative of order `1 < alpha <= 2`.
//!
//! | module       | contents |
//! |--------------|----------|
//! | [`problem`]  | [`Problem`], critical length, regime, `s*` |
//! | [`green`]    | `G`, its branches `g1`/`g2`, diagonal sections `h1`/`h2` |
//! | [`bounds`]   | closed-form `max |G|`, corrected and original thresholds, sweeps |
//! | [`oracle`]   | brute-force grid maxima, sign audits, finite differences |
//! | [`spectral`] | Nyström kernel, determinant scan, smallest characteristic value |
//! | [`ingest`]   | sampled potentials, `integral |q|`, nonexistence certificates |
//! | [`cli`]      | the `cflk` command-line front end |

pub mod bounds;
pub mod cli;
pub mod error;
pub mod format;
pub mod green;
pub mod ingest;
pub mod lu;
pub mod oracle;
pub mod problem;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
pub use problem::{ExtendedReal, Problem, Regime, RegimeKind};
