//! Rasterized design region, admissible designs and Hausdorff distances.

pub mod distance;
pub mod extend;
pub mod grid;
pub mod io;
pub mod mask;
pub mod topology;

pub use distance::{complementary_hausdorff, directed_hausdorff, hausdorff_distance};
pub use extend::{extend_by_zero, mask_norms_sq};
pub use grid::{Block, GridSpec};
pub use mask::DomainMask;
pub use topology::{
    admissibility, count_active_components, count_complement_components, is_admissible,
    AdmissibleClass,
};
