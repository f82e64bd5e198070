//! Resonant-mode spectra of closed cylindrical and toroidal microwave
//! cavities.
//!
//! Every mode of a cylinder or torus is described by a dimensionless
//! universal mode function `F(eps) = f d / c` of the aspect ratio alone
//! (`eps = d/h` for a cylinder, `eps = r/R` for a torus, `d` the minor
//! diameter). The crate evaluates those functions from Bessel zeros, turns
//! them into sorted physical spectra, and answers design questions on top:
//! ground states and crossovers, dark modes and their gaps, flow diagrams,
//! mode charts, machining-error calibration and wall-loss estimates.
//!
//! ```
//! use torospec::{build_spectrum, Geometry, SpectralModel, SPEED_OF_LIGHT};
//!
//! let cavity = Geometry::torus(0.010, 0.020)?;
//! let spectrum = build_spectrum(&cavity, &SpectralModel::TorusPerturbative, 12e9, SPEED_OF_LIGHT)?;
//! assert_eq!(spectrum.entries[0].mode.to_string(), "TE+110");
//! # Ok::<(), torospec::Error>(())
//! ```
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example` lists them.

pub mod error;
pub mod interp;
pub mod io;
pub mod mode;
pub mod quality;
pub mod special;
pub mod spectrum;

pub mod consts {
    /// Speed of light in vacuum, m/s.
    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
    /// Vacuum permeability, H/m.
    pub const MU_0: f64 = 1.256_637_062_12e-6;
    /// Vacuum permittivity, F/m.
    pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
    /// Impedance of free space `sqrt(mu_0 / eps_0)`, ohms.
    pub const VACUUM_IMPEDANCE: f64 = 376.730_313_668;
}

pub use consts::SPEED_OF_LIGHT;
pub use error::{Error, Result};
pub use mode::{
    cylinder_f, enumerate_modes, physical_frequency, torus_f, CavityKind, Family, FitTable,
    Geometry, ModeId, Parity, SpectralModel,
};
pub use quality::{
    photon_lifetime, q_ratio, ring_mode_frequency, skin_depth, surface_resistance, Material,
};
pub use special::{bessel_j, bessel_j_prime, bessel_prime_zero, bessel_zero};
pub use spectrum::{
    build_spectrum, calibrate_minor_radius, cylinder_crossover, dark_modes, flow_sweep, gaps,
    ground_state, mode_chart, mode_rank, MeasuredSpectrum, Spectrum,
};
