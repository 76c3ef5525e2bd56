//! Smooth partitions, refined quantum partitions and their entropies, the
//! entropic uncertainty inequality, subadditivity, observability constants
//! and survivor sets.

mod entropies;
mod observability;
mod partition;
mod refined;

pub use entropies::{
    averaged_entropies, ehrenfest, limit_entropy_estimate, norm_decay_scan, quantum_entropies,
    shannon, subadditivity_check, uncertainty_check, uncertainty_constant, EntropyReport,
    LimitEntropyReport, LimitEntropyRow, NormDecayReport, NormDecayRow, SubadditivityReport,
    UncertaintyReport, UNCERTAINTY_TOLERANCE,
};
pub use observability::{
    observability_constant, survivor_set, ObservabilityReport, SurvivorReport, MAX_RESOLUTION,
    OBSERVABILITY_FLOOR, VANISHING,
};
pub use partition::{build_partition, SmoothPartition, PARTITION_TOLERANCE};
pub use refined::{
    max_refined_norm, QuantumPartition, RefinedElement, RefinedNormSearch, NODE_BUDGET, WORD_CAP,
};
