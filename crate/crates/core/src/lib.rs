//! Scattering of a particle with position-dependent effective mass through a
//! PT-symmetric double heterojunction.
//!
//! The closed-form hypergeometric solution ([`analytic`]) and an independent
//! transfer-matrix oracle ([`numeric`]) both produce reflection and
//! transmission amplitudes; [`observables`] builds sweeps, singularity scans
//! and current diagnostics on top of them.

pub mod analytic;
pub mod cli;
pub mod model;
pub mod numeric;
pub mod observables;
pub mod specfun;
