//! Linear stability, critical Rayleigh numbers, center-manifold reduction and
//! nonlinear simulation of rotating, stratified Boussinesq convection between
//! free-slip plates.

pub mod critical;
pub mod error;
pub mod field;
pub mod operator;
pub mod params;
pub mod reduction;
pub mod simulator;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
pub use params::{
    classify, lattice, LatticeClass, PhysicalParams, SpaceFlag, Truncation, WaveIndex, PI2,
};
