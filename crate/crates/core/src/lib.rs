//! Deterministic sensing matrices built from linear codes over small finite
//! fields, with the coherence analysis, resizing operators, and sparse
//! recovery experiments that exercise them.

pub mod codes;
pub mod colrep;
pub mod error;
pub mod galois;
pub mod recovery;
pub mod resize;
pub mod sensing;

pub use codes::{enumerate_codewords, rs2_generator, Codebook, LinearCode};
pub use colrep::{
    column_replace, compose_codebooks, verify_gfp_closure, CodeComposition, PatternMatrix,
};
pub use error::{Error, Result};
pub use recovery::{
    gaussian_matrix, generate_sparse_signal, measure, omp, run_experiment,
    run_recovery_vs_sparsity, run_snr_sweep, ExperimentAxis, ExperimentConfig,
    ExperimentResult, MatrixSource, OmpResult, OmpStop, PointRecord, SparseSignal,
};
pub use resize::{
    compare_vs_kronecker, construct_example3, construct_example4,
    construct_example4_with_report, kronecker, pattern_resize, ComparisonRecord, ResizeReport,
    RowSelection,
};
pub use sensing::{
    base_codebook, coherence, coherence_estimate, construct_example1, construct_example2,
    coset_reduce, pattern_codebook,
    distance_coherence_bound, exponentiate, max_normalized_inner, rip_estimate,
    sampled_coherence, welch_bound, CoherenceEstimate, CoherenceMethod, CoherenceReport,
    Provenance, RipEstimate, SensingMatrix,
};
pub use galois::{additive_character, character_sum, find_irreducible, FieldElement, FieldSpec};
