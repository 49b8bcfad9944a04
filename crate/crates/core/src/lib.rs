//! Time-domain scalar wave-optics simulation of Mach-Zehnder
//! interferometer networks and double-slit apertures, with two rival
//! propagation semantics: local (retarded component-state sampling) and
//! nonlocal (instantaneous sampling).

pub mod analysis;
pub mod diffraction;
pub mod engine;
pub mod error;
pub mod network;
pub mod optics;

pub use engine::{
    DetectorTrace, PropagationModel, SimOutput, SimParams, SourceMode, SwitchingSchedule,
};
pub use error::{Error, Result};
pub use network::{build_mzi, build_mzi_with, MziParams, OpticalNetwork};
pub use optics::{ComplexAmplitude, WavePacket, SPEED_OF_LIGHT};
