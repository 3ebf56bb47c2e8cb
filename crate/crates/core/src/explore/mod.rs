//! Sampling of the image `m(X)` and of the variety points `K_{Q,Y}`, and the
//! comparison between the two.

pub mod compiled;
pub mod domain;
pub mod gap;
pub mod image;
pub mod variety;

pub use domain::{sample_domain, DomainDescription};
pub use gap::{compare_clouds, exclude_point, gap_analysis, gap_report, surjectivity_check, GapOptions, GapReport, GapVerdict, SpuriousPoint, SurjectivityReport};
pub use image::{image_cloud, image_points, PointCloud};
pub use variety::{base_box, sample_variety, VarietyOptions};
