//! Metric graphs with marks on vertices, the space of marked unit cycles
//! modulo reflection, and the scanning homotopy that retracts it onto the
//! cycles whose unmarked vertices are reduced to a single one at `(1, 0)`.
//!
//! * [`metric_graph`]: multigraphs with rational lengths and vertex marks.
//! * [`retraction`]: bridges, shrinking bridges, tropical stability and the
//!   candidate stabilizing retraction.
//! * [`moduli_space`]: marked cycles, canonical forms, ε-closeness and
//!   ε-neighborhood membership, plus a seeded neighbor sampler.
//! * [`scanning`]: the scanning homotopy and executable checks of its
//!   continuity.

pub mod error;
pub mod generate;
pub mod metric_graph;
pub mod moduli_space;
pub mod rational;
pub mod retraction;
pub mod scanning;
pub mod seed;

pub use error::{Error, Result};
pub use metric_graph::{Edge, Mark, MetricGraph, Vertex, Violation};
pub use moduli_space::{
    additivity_witness_check, canonical_form, denormalize, eps_close, in_neighborhood, is_in_y, is_tropical_point,
    iso_equal, normalize, reflect, sample_neighbor, to_tropical_point, x_coord, CloseMode, CyclePoint, MarkedCycle,
    ModuliPoint, NeighborhoodVerdict, Representative, Status,
};
pub use rational::{parse_rational, Rational};
pub use retraction::{conjectured_retract, find_bridges, is_tropically_stable, shrink_bridges};
pub use scanning::{
    continuity_certificate, homotopy_frame, lemma_step1_check, lemma_step2_check, non_strongness_witness, scan, scan_cycle,
    CertificateReport, HomotopyTime, ScanParameter,
};
