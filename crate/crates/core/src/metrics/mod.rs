//! Reference loss and evaluation metrics for segmentation.

mod hausdorff;
mod loss;
mod overlap;

pub use hausdorff::{class_boundary, hd95, nearest_rank, squared_distance_transform};
pub use loss::{dice_ce_loss, PredictionMap, LOG_FLOOR};
pub use overlap::{dice_coefficient, jaccard};
