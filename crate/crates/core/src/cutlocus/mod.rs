//! Distances, minimal geodesics, cut loci, geodesic loops, the cut-decay radius and the
//! perimeter minimizer over a cut locus.

mod cut;
mod decay;
mod distance;
mod field;
mod loops;
mod perimeter;

pub use cut::{cut_locus, cut_locus_csv, cut_time, CutKind, CutLocusSample, CutOptions};
pub use decay::{cut_decay_radius, DecayOptions, DecayResult};
pub use distance::{
    distance, meridian_hit, minimal_geodesics, Connection, Connections, DistanceError, DistanceOptions, MeridianHit,
};
pub use field::{dijkstra_oracle, shooting_field, DistanceField, FieldMethod, GridSpec, Ring};
pub use loops::{direct_injectivity, injectivity_radius, shortest_loop, Injectivity, LoopResult};
pub use perimeter::{
    minimize_perimeter, nearest_cut_point, NearestCut, PerimeterCase, PerimeterError, PerimeterOptions, PerimeterResult,
};
