//! Generating-function machinery for maximal independent sets and maximal
//! matchings in subcritical graph classes (forests, cacti, series-parallel
//! graphs): exact counting series, branch-point constants, and a brute-force
//! enumeration oracle.

pub mod series;
pub mod systems;
pub mod families;
pub mod oracle;
pub mod singularity;
pub mod cli;
