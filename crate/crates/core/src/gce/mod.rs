//! Generalized currents, sources, GCE residuals and symmetry domains.

mod currents;
mod domains;
mod gauge;
mod relations;
mod residual;
mod stack;

pub use currents::{
    dirac_current, dirac_pair_current, dirac_total_current, ladder_pair_current,
    relative_variation, schrodinger_current, schrodinger_pair_current, transformed_current,
    CurrentIndex, CurrentKind, CurrentProfile, DomainStat,
};
pub use domains::{detect_domains, Domain, DomainBounds, TransformSpec};
pub use gauge::{gauge_residual, GaugeConfig, SpacetimeGrid, SpinorField};
pub use relations::{charge_current_relation, delta_domain_relation, ChargeRelation, DeltaRelation};
pub use residual::{
    convergence_order, gce_convergence_dirac, gce_convergence_schrodinger, gce_residual_dirac,
    gce_residual_schrodinger, DomainVerdict, GceReport, Target, NON_SOLUTION_THRESHOLD,
};
pub use stack::{DiracStack, StateStack, WaveStack};
