//! Shared fixtures for the criterion benchmarks.

use gce_core::{BoundarySpec, Complex64, Convention, PotentialProfile, Result};

/// Two uncoupled systems with a common barrier and a delta at the origin.
pub fn two_system_profile() -> Result<PotentialProfile> {
    PotentialProfile::diagonal(
        &[
            (-3.0, -1.0, vec![0.0, 0.4]),
            (-1.0, 0.0, vec![0.6, 0.6]),
            (0.0, 1.0, vec![0.6, 0.6]),
            (1.0, 3.0, vec![0.3, 0.0]),
        ],
        &[(0.0, vec![std::f64::consts::FRAC_PI_3, 0.0])],
    )
}

pub fn unit_incoming(n: usize) -> BoundarySpec {
    BoundarySpec::Scattering {
        incoming: vec![Complex64::new(1.0, 0.0); n],
    }
}

pub fn default_convention() -> Convention {
    Convention::default()
}
