//! PNG encoding of augmented samples.

use std::path::Path;

use image::{ExtendedColorType, ImageBuffer, Luma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{ClassMap, ImageTensor};

/// Full scale of a 16-bit soft-mask channel.
pub const SOFT_SCALE: f64 = 65535.0;

fn image_err(path: &Path, source: image::ImageError) -> Error {
    Error::Image {
        path: path.to_owned(),
        source,
    }
}

/// 8-bit PNG, grayscale or RGB by channel count.
pub fn write_image(path: &Path, image: &ImageTensor) -> Result<()> {
    let color = match image.channels() {
        1 => ExtendedColorType::L8,
        3 => ExtendedColorType::Rgb8,
        c => return Err(Error::Domain(format!("cannot encode {c} channels as PNG"))),
    };
    let (h, w) = image.shape();
    image::save_buffer(path, &image.to_u8(), w as u32, h as u32, color)
        .map_err(|e| image_err(path, e))
}

/// 8-bit grayscale PNG holding one class id per pixel.
pub fn write_class_ids(path: &Path, height: usize, width: usize, ids: &[u32]) -> Result<()> {
    let bytes = ids
        .iter()
        .map(|&id| {
            u8::try_from(id).map_err(|_| Error::Domain(format!("class id {id} exceeds 255")))
        })
        .collect::<Result<Vec<u8>>>()?;
    image::save_buffer(
        path,
        &bytes,
        width as u32,
        height as u32,
        ExtendedColorType::L8,
    )
    .map_err(|e| image_err(path, e))
}

/// Sidecar describing the per-class channel files of a soft mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoftMaskSidecar {
    pub height: usize,
    pub width: usize,
    pub num_classes: usize,
    /// Stored sample is `round(65535 * p)`.
    pub scale: u32,
    /// Channel file names relative to the sidecar, in class order.
    pub channels: Vec<String>,
}

/// Quantizes one probability to a 16-bit sample.
pub fn quantize(p: f64) -> u16 {
    (p.clamp(0.0, 1.0) * SOFT_SCALE).round() as u16
}

/// Writes `{stem}_c{n}.png` per class plus `{stem}.json` into `dir`.
///
/// Returns the file names written, sidecar last.
pub fn write_soft_mask(dir: &Path, stem: &str, mask: &ClassMap) -> Result<Vec<String>> {
    let (h, w) = mask.shape();
    let mut names = Vec::with_capacity(mask.num_classes() + 1);
    for class in 0..mask.num_classes() {
        let name = format!("{stem}_c{class}.png");
        let path = dir.join(&name);
        let samples: Vec<u16> = mask.channel(class).into_iter().map(quantize).collect();
        let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
            ImageBuffer::from_raw(w as u32, h as u32, samples)
                .ok_or_else(|| Error::Internal("soft channel buffer size".into()))?;
        buf.save(&path).map_err(|e| image_err(&path, e))?;
        names.push(name);
    }
    let sidecar = SoftMaskSidecar {
        height: h,
        width: w,
        num_classes: mask.num_classes(),
        scale: SOFT_SCALE as u32,
        channels: names.clone(),
    };
    let name = format!("{stem}.json");
    let path = dir.join(&name);
    let text = serde_json::to_string_pretty(&sidecar)?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    names.push(name);
    Ok(names)
}

/// Reads a soft mask back as raw per-pixel, per-class probabilities.
///
/// Quantization means the rows need not sum to exactly one, so this returns
/// plain samples rather than a [`ClassMap`].
pub fn read_soft_mask(sidecar_path: &Path) -> Result<(SoftMaskSidecar, Vec<f64>)> {
    let text = std::fs::read_to_string(sidecar_path).map_err(|e| Error::io(sidecar_path, e))?;
    let sidecar: SoftMaskSidecar = serde_json::from_str(&text)?;
    let dir = sidecar_path.parent().unwrap_or(Path::new("."));
    let n = sidecar.num_classes;
    let mut data = vec![0.0; sidecar.height * sidecar.width * n];
    for (class, name) in sidecar.channels.iter().enumerate() {
        let path = dir.join(name);
        let img = image::open(&path)
            .map_err(|e| image_err(&path, e))?
            .to_luma16();
        if img.dimensions() != (sidecar.width as u32, sidecar.height as u32) {
            return Err(Error::dims(
                format!("{}x{}", sidecar.height, sidecar.width),
                format!("{}x{}", img.height(), img.width()),
            ));
        }
        for (i, &v) in img.as_raw().iter().enumerate() {
            data[i * n + class] = f64::from(v) / f64::from(sidecar.scale);
        }
    }
    Ok((sidecar, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantize_endpoints() {
        assert_eq!(quantize(0.0), 0);
        assert_eq!(quantize(1.0), 65535);
        assert_eq!(quantize(0.5), 32768);
    }

    #[test]
    fn soft_mask_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let data = vec![0.25, 0.75, 1.0, 0.0, 0.1, 0.9, 0.333, 0.667];
        let mask = ClassMap::new(2, 2, 2, data.clone()).unwrap();
        let names = write_soft_mask(dir.path(), "m", &mask).unwrap();
        assert_eq!(names, ["m_c0.png", "m_c1.png", "m.json"]);
        let (meta, back) = read_soft_mask(&dir.path().join("m.json")).unwrap();
        assert_eq!(meta.num_classes, 2);
        for (a, b) in data.iter().zip(&back) {
            assert!((a - b).abs() <= 0.5 / SOFT_SCALE + 1e-15);
        }
    }

    #[test]
    fn class_ids_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ids.png");
        let ids = [0, 1, 2, 3, 2, 1];
        write_class_ids(&path, 2, 3, &ids).unwrap();
        let back = image::open(&path).unwrap().to_luma8();
        assert_eq!(back.dimensions(), (3, 2));
        assert_eq!(back.as_raw(), &[0, 1, 2, 3, 2, 1]);
        assert!(write_class_ids(&path, 1, 1, &[256]).is_err());
    }
}
