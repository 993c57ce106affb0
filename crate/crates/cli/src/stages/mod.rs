pub mod mellin;
pub mod merge;
pub mod moments;
pub mod sample;
pub mod spectral;
