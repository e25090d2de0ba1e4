//! Random instance generation, stitching and dataset files.

mod dataset;
mod gen;
mod stitch;

pub use dataset::{export_dataset, gen_dataset, import_dataset, label_instance, DatasetRecord, HEURISTIC_REFERENCE};
pub use gen::{gen_instance, gen_instance_indexed, GenParams};
pub use stitch::{gen_stitched, stitch};
