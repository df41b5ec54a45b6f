//! Quantum electrodynamics of emitters coupled to a 3D photonic Weyl lattice.
//!
//! The bath is a cubic lattice of localized photonic modes with staggered
//! nearest-neighbour hopping `J` and a tunable sublattice frequency offset
//! `M` (`+M` on sublattice A, `-M` on B). For `|M| < 2J` its two bands touch
//! at isolated Weyl points; two-level emitters tuned near the Weyl frequency
//! develop fractional decay, power-law photonic bound states, and — when many
//! emitters couple — a long-range effective spin model inheriting the Weyl
//! topology.
//!
//! Modules, bottom-up:
//! - [`lattice`]: real-space and Bloch Hamiltonians, bands, density of
//!   states, spectral gap, Weyl node location and chirality.
//! - [`greens`]: lattice resolvent `G(z)` (local, two-point, full-field) and
//!   the emitter self-energy.
//! - [`dynamics`]: exact single-excitation time evolution (Chebyshev
//!   propagator), two-emitter exchange, Markovian reference decay.
//! - [`bound_states`]: secular equation, critical detuning, bound-state
//!   wavefunction, power-law fits, residue.
//! - [`spin_model`]: bound-state-mediated couplings, spin bands, Berry
//!   curvature, emergent Weyl nodes.
//!
//! Conventions: `hbar = 1`; energies in units of `J`, lengths in units of
//! the lattice constant `a`, momenta in units of `1/a` of the original cubic
//! lattice. All operations are deterministic; parallel reductions use a
//! fixed chunk order so repeated runs are bit-identical.

pub mod berry;
pub mod bound_states;
pub mod chebyshev;
pub mod dynamics;
pub mod greens;
pub mod kgrid;
pub mod lattice;
pub mod numerics;
pub mod sparse;
pub mod spin_model;

pub use num_complex::Complex64;

/// Errors produced by lattice construction, resolvent evaluation, and
/// dynamics.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice parameters: {0}")]
    InvalidParams(String),
    #[error("lattice size {0} is odd; the staggering (-1)^(x+y) closes periodically only for even L")]
    OddLatticeSize(usize),
    #[error("momentum grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("resolvent pole on the evaluation contour: z = {re} + {eta}i lies on a grid eigenvalue")]
    PoleOnContour { re: f64, eta: f64 },
    #[error("norm drift {drift:.3e} exceeded {limit:.3e} at t = {time} (step {step}); integrator diagnostics: {diag}")]
    NormDrift {
        drift: f64,
        limit: f64,
        time: f64,
        step: usize,
        diag: String,
    },
    #[error("initial state is not a normalized single-excitation state: norm^2 = {0}")]
    BadInitialState(f64),
    #[error("no bound state: the secular function has no sign change in [{lo}, {hi}]")]
    NoBoundState { lo: f64, hi: f64 },
    #[error("E = {energy} lies in a region of nonzero Im Sigma ({im_sigma:.3e}); not a true bound state")]
    NotABoundState { energy: f64, im_sigma: f64 },
    #[error("self-energy slope at E = {energy} is ill-defined: |Im Sigma| = {im_sigma:.3e}")]
    ResonantSlopePoint { energy: f64, im_sigma: f64 },
    #[error("unphysical residue: self-energy slope {slope} >= 1")]
    UnphysicalResidue { slope: f64 },
    #[error("power-law fit needs >= {needed} usable points, found {found}")]
    InsufficientFitPoints { needed: usize, found: usize },
    #[error("{0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
