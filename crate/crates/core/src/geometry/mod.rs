//! Convex polytopes, affine isometries, reflection groups and lattices.

pub mod group;
pub mod isometry;
pub mod lattice;
pub mod linalg;
pub mod overlap;
pub mod polytope;
pub mod projection;

pub use group::{
    reflection_group, reflection_group_from, separation, strict_tessellation_check, strict_tessellation_check_with,
    CertificateStatus, ReflectionGroup, TessellationCertificate, Witness,
};
pub use isometry::Isometry;
pub use lattice::Lattice;
pub use overlap::{overlap_first_order, overlap_volume};
pub use polytope::{make_polytope, Face, Polytope, PolytopeDescriptor, KINDS};
pub use projection::{reflected_distance_check, sigma_projection, ReflectedDistance, SigmaProjection};
