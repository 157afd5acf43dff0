//! Divider sets of plane curves.
//!
//! The Divider of a curve is the locus of centers of supremum contact disks:
//! for every curve point and every normal side, the largest disk tangent
//! there that meets the curve in that single point. This crate computes it
//! together with the supporting quantities:
//!
//! * [`foot`]: stationary points of the distance from a query point,
//! * [`evolute`]: osculating centers, vertices and evolute cusps,
//! * [`lclt`]: curvature of locally convex type and the set where it is
//!   positive,
//! * [`divider`]: contact disks, Newton-polished Divider points and traces,
//! * [`lattice`]: a discrete Divider on bitmaps under the three metrics,
//! * [`export`]: CSV, SVG and plain PNM writers.

pub mod curve;
pub mod divider;
pub mod error;
pub mod evolute;
pub mod export;
pub mod foot;
pub mod geometry;
pub mod lattice;
pub mod lclt;
pub mod numeric;

pub use curve::{parse_preset, standard_presets, ParametricCurve, Shape};
pub use divider::{
    contact_radius, divider_trace, divider_validate, newton_polish, ContactDisk, DividerConfig,
    DividerKind, DividerPoint, DividerTrace, Side, ValidationReport,
};
pub use error::{Error, Result};
pub use evolute::{evolute_point, find_cusps, osculating_contact_order, ContactOrder, CuspKind, EvoluteCusp};
pub use foot::{all_feet, foot_refine, Foot, FootKind, FootSet};
pub use geometry::{metric_distance, MetricKind, Point2, Vec2, Window};
pub use lattice::{discrete_divider, distance_transform, Bitmap, DistanceField, LatticeParams};
pub use lclt::{disconnection_radius_oracle, lclt_curvature, pi_set_raster, LcltResult, Raster};

/// Default number of samples used to scan distance and curvature profiles.
pub const DEFAULT_N_SCAN: usize = 2048;
