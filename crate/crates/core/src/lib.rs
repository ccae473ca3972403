//! Quantum reflection of single photons from a Rydberg-defect potential.
//!
//! The crate builds the complex defect potential of a Rydberg-EIT medium from
//! laboratory parameters ([`physical`]), evolves one-photon wavepackets under
//! the dimensionless Schrödinger equation `i∂τ′Φ = [−∂ξ² + Ṽ(ξ)]Φ`
//! ([`solver`]), extracts reflection/transmission/trapping coefficients
//! ([`scattering`]) and maps the result onto an effective beam splitter
//! ([`beamsplitter`]). [`oracle`] holds independent back-ends used only for
//! cross-checks; [`io`] covers configuration files and CSV output.
//!
//! The dimensionless layers are generic over [`num::Real`] (`f32`/`f64`);
//! the `*64` aliases below fix the usual double-precision instantiation.

pub mod beamsplitter;
pub mod error;
pub mod grid;
pub mod io;
pub mod num;
pub mod oracle;
pub mod physical;
pub mod potential;
pub mod scattering;
pub mod solver;
pub mod wavepacket;

pub use error::{Error, Result};
pub use num::Real;

pub type Grid64 = grid::Grid<f64>;
pub type Wavepacket64 = wavepacket::Wavepacket<f64>;
pub type DefectPotential64 = potential::DefectPotential<f64>;
pub type ScatteringResult64 = scattering::ScatteringResult<f64>;
pub type RunParams64 = scattering::RunParams<f64>;
pub type Experiment64 = scattering::Experiment<f64>;
pub type PhaseDiagram64 = scattering::PhaseDiagram<f64>;
pub type BeamSplitter64 = beamsplitter::BeamSplitter<f64>;
pub type PiecewisePotential64 = oracle::PiecewisePotential<f64>;

pub type Grid32 = grid::Grid<f32>;
pub type Wavepacket32 = wavepacket::Wavepacket<f32>;
pub type DefectPotential32 = potential::DefectPotential<f32>;
