//! Hard and soft superpixel mixing for semantic-segmentation augmentation.
//!
//! A pair of images is split into superpixels. Randomly selected superpixels
//! of the second image are pasted onto the first (hard mix, labels copied
//! as-is), and every superpixel of the combined partition is then blended
//! with a saliency-derived weight (soft mix, labels blended identically).
//!
//! ```
//! use hsmix_core::{hsmix_pair, one_hot, AugConfig, ImageTensor, PairRng};
//!
//! let x1 = ImageTensor::from_fn(32, 32, 3, |r, _, _| r as f64 / 31.0)?;
//! let x2 = ImageTensor::from_fn(32, 32, 3, |_, c, _| c as f64 / 31.0)?;
//! let y1 = one_hot(32, 32, &vec![0; 1024], 2)?;
//! let y2 = one_hot(32, 32, &vec![1; 1024], 2)?;
//! let cfg = AugConfig { l_min: 8, l_max: 16, ..AugConfig::default() };
//! let out = hsmix_pair(&x1, &x2, &y1, &y2, &cfg, &PairRng::new(7, 0))?;
//! assert!(out.hard.mask.is_hard());
//! # Ok::<(), hsmix_core::Error>(())
//! ```

pub mod error;
pub mod metrics;
pub mod mixer;
pub mod pipeline;
pub mod rng;
pub mod saliency;
pub mod superpixel;
pub mod types;

pub use error::{Error, Result};
pub use mixer::{
    hard_mask, hard_mix, hsmix_pair, hsmix_pair_with, mixed_grid, sample_selection, soft_mask,
    soft_mix, superpixel_lambda, Diagnostics, LambdaSummary, LambdaVector, MixedPair, PairOutput,
    SelectionMode, SelectionSet,
};
pub use rng::{PairRng, Purpose};
pub use saliency::{fine_grained_saliency, relative_saliency};
pub use superpixel::{compute_superpixels, square_grid};
pub use types::{
    argmax_decode, minmax_normalize, one_hot, AugConfig, ClassMap, GridStrategy, ImageTensor,
    LambdaStrategy, MaskKind, MixMask, Modality, SaliencyMap, SuperpixelGrid,
};
