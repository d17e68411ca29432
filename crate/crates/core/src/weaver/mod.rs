//! Quantum relations between matrix algebras and completely positive maps.

mod algebra;
mod bridge;
mod channel;

pub use algebra::{numeric_commutant, MatrixAlgebra, QuantumRelationW};
pub use bridge::{algebra_of, function_to_intertwiner, graph_to_weaver, hom_to_intertwiner, relation_to_weaver};
pub use channel::{
    channel_from_operator_system, confusability, confusable, hs_adjoint, intertwiner_space, intertwiner_to_cohom,
    is_cp_morphism, is_tp_cohomomorphism, pullback, pushforward, satisfies_function_conditions, t_phi,
    theorem_o_check, transition_possible, CPMap, CohomReport, TheoremOReport,
};
