//! Domains, triangulations and boundary geometry.

mod curve;
mod domain;
mod intrinsic;
mod mesh;
mod theta;
mod tubular;

pub use curve::{BoundaryCurve, CurveKind};
pub use domain::{Component, DomainDescriptor, DomainKind, SegmentSpec};
pub use intrinsic::{intrinsic_distance, IntrinsicMetric, IntrinsicRegion};
pub use mesh::{build_mesh, grid_mesh, ring_mesh, BoundaryEdge, TriMesh};
pub use theta::theta0;
pub use tubular::{tubular_frame, TubularFrame};
