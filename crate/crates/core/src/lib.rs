//! Petri-net synthesis from transition systems with restricted place environments.
//!
//! A [`TransitionSystem`] is implementable by a net exactly when every separation atom
//! is solved by some region. [`synthesize`] searches for such regions with an exact
//! rational simplex, optionally bounding how many transitions may produce on or consume
//! from each place and whether places must be pure.

pub mod error;
pub mod gadgets;
pub mod linear;
pub mod oracle;
pub mod petri;
pub mod region;
pub mod synth;
pub mod tree;
pub mod ts;

pub use error::{InstanceError, ParseError, PetriError, RegionError};
pub use linear::{rescale_to_integers, Constraint, LinearSystem, Rational, Relation};
pub use oracle::{brute_force_region, for_each_region, for_each_solving_region, OracleBounds};
pub use petri::{
    fire, net_environment, parse_net, reachability_graph, verify, verify_detailed, Marking, NetEnvironment, PetriNet,
    Place, VerifyFailure,
};
pub use region::{
    atoms, expand_region_spec, parse_regions, regions_to_text, solved_atoms_report, Region, RegionDoc, RegionSpec,
    SeparationAtom,
};
pub use synth::{
    build_net, build_system, restrict_system, solve_atom, synthesize, AtomOutcome, Bound, Outcome, RestrictionBounds,
    SolverConfig, Strategy, SupportSelection, SynthesisOptions, SynthesisResult, SynthesisStats,
};
pub use tree::SpanningTree;
pub use ts::{isomorphic, isomorphism, parse_ts, Discrepancy, Edge, EventId, StateId, StateMap, TransitionSystem};
