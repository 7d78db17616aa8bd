//! Floquet parametric amplifier: harmonic-space model, Green's functions,
//! topological diagnostics and time-domain checks.
//!
//! A single oscillator with modulated frequency and loss couples every
//! harmonic `omega + n Omega` to its neighbours. The crate builds that
//! tridiagonal lattice, inverts it, reads off local winding numbers and edge
//! solitons, and evaluates the resulting gain and signal-to-noise ratio.
//!
//! ```
//! use floquet_amp::{build_sambe, green::singular_triples, ModelParams};
//! use std::f64::consts::PI;
//!
//! let params = ModelParams {
//!     eta_omega: 10.0, eta_kappa: 30.0, eta_gamma: 30.0, eta_p: 58.5,
//!     phi: PI / 2.0, omega_mod: 2.0 * PI,
//! };
//! let h = build_sambe(&params, 50)?;
//! let t = singular_triples(&h, 0.0, 2)?;
//! assert!(t[1].value / t[0].value > 10.0);
//! # Ok::<(), floquet_amp::Error>(())
//! ```
//!
//! The guide in `book/` walks through each module.

pub mod dynamics;
pub mod error;
pub mod export;
pub mod green;
pub mod jackiw;
pub mod model;
pub mod ode;
pub mod response;
pub mod sambe;
pub mod scattering;
pub mod topology;
mod tridiag;

pub use error::{Error, Result};
pub use model::{DriveSpec, ModelParams};
pub use sambe::{build_sambe, SambeMatrix};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sambe-lattice.md")]
    mod sambe_lattice {}
    #[doc = include_str!("../../../book/src/green.md")]
    mod green {}
    #[doc = include_str!("../../../book/src/winding.md")]
    mod winding {}
    #[doc = include_str!("../../../book/src/solitons.md")]
    mod solitons {}
    #[doc = include_str!("../../../book/src/scattering-and-snr.md")]
    mod scattering_and_snr {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
