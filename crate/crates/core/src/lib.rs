pub mod bbf;
pub mod bits;
pub mod cli;
pub mod prf;
pub mod qcp;
pub mod quantum;
pub mod signatures;
pub mod schemes;
pub mod games;
pub mod adversaries;
pub mod acceptance;
pub mod kat;
pub mod stats;
