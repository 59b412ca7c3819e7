//! Prolate spheroidal harmonics: joint spectrum, quantum monodromy and the
//! underlying classical integrable system.

pub mod asymptotics;
pub mod classical;
pub mod cli;
pub mod lattice;
pub mod oracle;
pub mod specfun;
pub mod spectral;
