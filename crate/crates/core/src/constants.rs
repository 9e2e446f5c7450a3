//! Physical constants.
//!
//! `MU0` and `ETA0` are derived from `C0` and `EPS0` so the identities
//! `mu0*eps0*c0^2 == 1` and `eta0 == mu0*c0` hold to machine precision
//! everywhere in the crate.

/// Speed of light in vacuum, m/s.
pub const C0: f64 = 299_792_458.0;

/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854_187_8128e-12;

/// Vacuum permeability, H/m (derived).
pub const MU0: f64 = 1.0 / (C0 * C0 * EPS0);

/// Free-space wave impedance, ohms (derived; ≈ 376.7303).
pub const ETA0: f64 = MU0 * C0;
