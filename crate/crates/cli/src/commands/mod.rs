pub mod check;
pub mod profile;
pub mod sample;
pub mod spectral;
