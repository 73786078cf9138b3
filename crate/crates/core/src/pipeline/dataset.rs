//! Dataset discovery and loading.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use image::{ColorType, DynamicImage, ImageReader};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::{one_hot, ClassMap, ImageTensor};

/// One image with its class-id mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DatasetEntry {
    pub id: String,
    pub image: PathBuf,
    pub mask: PathBuf,
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

/// A file that was skipped during scanning, and why.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanIssue {
    pub path: PathBuf,
    pub message: String,
}

/// Validated, lexicographically sorted image/mask pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetIndex {
    pub entries: Vec<DatasetEntry>,
    /// At least 2; one more than the largest class id seen.
    pub num_classes: usize,
    /// 3 if any image is colour, else 1. Grayscale images are replicated on load.
    pub channels: usize,
    pub issues: Vec<ScanIssue>,
}

impl DatasetIndex {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Widens the class count, e.g. when some classes are absent from the masks.
    pub fn with_num_classes(mut self, num_classes: usize) -> Result<Self> {
        if num_classes < self.num_classes {
            return Err(Error::Config(format!(
                "masks use {} classes but only {num_classes} were requested",
                self.num_classes
            )));
        }
        self.num_classes = num_classes;
        Ok(self)
    }
}

fn png_stems(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if !is_png || !path.is_file() {
            continue;
        }
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            out.insert(stem.to_owned(), path);
        }
    }
    Ok(out)
}

fn decode(path: &Path) -> Result<DynamicImage> {
    ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|source| Error::Image {
            path: path.to_owned(),
            source,
        })
}

fn channels_of(color: ColorType) -> usize {
    match color {
        ColorType::L8 | ColorType::L16 | ColorType::La8 | ColorType::La16 => 1,
        _ => 3,
    }
}

/// Reads an 8-bit class-id mask.
pub fn load_mask_ids(path: &Path) -> Result<(usize, usize, Vec<u32>)> {
    let img = decode(path)?;
    if img.color() != ColorType::L8 {
        return Err(Error::Dataset {
            path: path.to_owned(),
            message: format!("mask must be 8-bit single-channel, found {:?}", img.color()),
        });
    }
    let gray = img.to_luma8();
    let (w, h) = gray.dimensions();
    Ok((
        h as usize,
        w as usize,
        gray.into_raw().into_iter().map(u32::from).collect(),
    ))
}

/// Reads an image as `channels` channels in `[0, 1]` (alpha is dropped).
pub fn load_image(path: &Path, channels: usize) -> Result<ImageTensor> {
    let img = decode(path)?;
    let native = channels_of(img.color());
    let (w, h) = (img.width() as usize, img.height() as usize);
    let tensor = if native == 1 {
        ImageTensor::from_u8(h, w, 1, img.to_luma8().as_raw())?
    } else {
        ImageTensor::from_u8(h, w, 3, img.to_rgb8().as_raw())?
    };
    tensor
        .expand_channels(channels)
        .map_err(|e| Error::Dataset {
            path: path.to_owned(),
            message: e.to_string(),
        })
}

/// Loads one entry as image tensor and one-hot class map.
pub fn load_entry(index: &DatasetIndex, entry: &DatasetEntry) -> Result<(ImageTensor, ClassMap)> {
    let image = load_image(&entry.image, index.channels)?;
    let (h, w, ids) = load_mask_ids(&entry.mask)?;
    let mask = one_hot(h, w, &ids, index.num_classes).map_err(|e| Error::Dataset {
        path: entry.mask.clone(),
        message: e.to_string(),
    })?;
    Ok((image, mask))
}

/// Matches `*.png` files in both directories by file stem.
///
/// Per-file problems (no partner, undecodable, size mismatch) are collected
/// in [`DatasetIndex::issues`] and do not affect other entries.
pub fn scan_dataset(images_dir: &Path, masks_dir: &Path) -> Result<DatasetIndex> {
    let images = png_stems(images_dir)?;
    let masks = png_stems(masks_dir)?;
    let mut entries = Vec::new();
    let mut issues = Vec::new();
    let mut max_id = 0u32;
    let mut any_color = false;

    for (stem, image_path) in &images {
        let Some(mask_path) = masks.get(stem) else {
            issues.push(ScanIssue {
                path: image_path.clone(),
                message: "no mask with the same file stem".into(),
            });
            continue;
        };
        let header = ImageReader::open(image_path)
            .and_then(|r| r.with_guessed_format())
            .map_err(|e| e.to_string())
            .and_then(|r| r.into_decoder().map_err(|e| e.to_string()))
            .map(|d| {
                use image::ImageDecoder;
                (d.dimensions(), d.color_type())
            });
        let ((iw, ih), color) = match header {
            Ok(h) => h,
            Err(message) => {
                issues.push(ScanIssue {
                    path: image_path.clone(),
                    message: format!("cannot decode image: {message}"),
                });
                continue;
            }
        };
        let (mh, mw, ids) = match load_mask_ids(mask_path) {
            Ok(m) => m,
            Err(e) => {
                issues.push(ScanIssue {
                    path: mask_path.clone(),
                    message: e.to_string(),
                });
                continue;
            }
        };
        if (mh, mw) != (ih as usize, iw as usize) {
            issues.push(ScanIssue {
                path: mask_path.clone(),
                message: format!("mask is {mh}x{mw} but image is {ih}x{iw}"),
            });
            continue;
        }
        let channels = channels_of(color);
        any_color |= channels == 3;
        max_id = max_id.max(ids.iter().copied().max().unwrap_or(0));
        entries.push(DatasetEntry {
            id: stem.clone(),
            image: image_path.clone(),
            mask: mask_path.clone(),
            height: ih as usize,
            width: iw as usize,
            channels,
        });
    }
    for (stem, mask_path) in &masks {
        if !images.contains_key(stem) {
            issues.push(ScanIssue {
                path: mask_path.clone(),
                message: "no image with the same file stem".into(),
            });
        }
    }
    for issue in &issues {
        log::warn!("skipping {}: {}", issue.path.display(), issue.message);
    }
    Ok(DatasetIndex {
        entries,
        num_classes: (max_id as usize + 1).max(2),
        channels: if any_color { 3 } else { 1 },
        issues,
    })
}
