//! One-dimensional electromagnetic modeling of layered biological tissue.
//!
//! The crate provides two solvers for a plane wave normally incident on a
//! planar stratified slab — a frequency-domain transfer-matrix chain
//! ([`tmm`]) and a time-domain finite-difference engine ([`fdtd`]) — plus
//! the supporting pieces: tissue dielectric models and layered geometry
//! ([`dielectrics`]), specific-absorption-rate profiles ([`dosimetry`]),
//! and packaged experiments with file reports ([`experiments`]).
//!
//! Conventions used throughout:
//! - time dependence e^{+jwt}; passive media have Im(eps) <= 0;
//! - the wave travels toward +z; depth is measured from the front face of
//!   the slab;
//! - SI units everywhere (Hz, meters, seconds, V/m, W/kg) unless a name
//!   says otherwise.

pub mod constants;
pub mod dielectrics;
pub mod dosimetry;
pub mod experiments;
pub mod fdtd;
pub mod tmm;
