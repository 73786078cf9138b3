//! Hard and soft mixing of an image/mask pair.
//!
//! Hard mixing pastes a Bernoulli-selected subset of the second image's
//! superpixels onto the first image. Soft mixing reuses the same hard mask to
//! build a mixed superpixel grid, averages the relative saliency of the second
//! image over each mixed superpixel, and blends both images (and their class
//! maps) with those per-superpixel coefficients.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{PairRng, Purpose};
use crate::saliency::{fine_grained_saliency, relative_saliency};
use crate::superpixel::{compute_superpixels, square_grid};
use crate::types::{
    AugConfig, ClassMap, GridStrategy, ImageTensor, LambdaStrategy, MaskKind, MixMask, SaliencyMap,
    SuperpixelGrid,
};

fn shape_str(shape: (usize, usize)) -> String {
    format!("{}x{}", shape.0, shape.1)
}

fn same_shape(expected: (usize, usize), actual: (usize, usize)) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::dims(shape_str(expected), shape_str(actual)))
    }
}

fn check_inputs(x1: &ImageTensor, x2: &ImageTensor, y1: &ClassMap, y2: &ClassMap) -> Result<()> {
    let shape = x1.shape();
    same_shape(shape, x2.shape())?;
    same_shape(shape, y1.shape())?;
    same_shape(shape, y2.shape())?;
    if x1.channels() != x2.channels() {
        return Err(Error::dims(
            format!("{} channels", x1.channels()),
            x2.channels(),
        ));
    }
    if y1.num_classes() != y2.num_classes() {
        return Err(Error::dims(
            format!("{} classes", y1.num_classes()),
            y2.num_classes(),
        ));
    }
    Ok(())
}

/// Superpixels of the second image chosen for pasting.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionSet {
    selected: Vec<u32>,
    num_labels: usize,
    p: f64,
}

impl SelectionSet {
    /// An explicit selection, mostly useful in tests.
    pub fn from_labels(num_labels: usize, mut labels: Vec<u32>, p: f64) -> Result<Self> {
        labels.sort_unstable();
        labels.dedup();
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= num_labels) {
            return Err(Error::Domain(format!(
                "selected label {bad} not below {num_labels}"
            )));
        }
        Ok(Self {
            selected: labels,
            num_labels,
            p,
        })
    }

    /// Selected labels in ascending order.
    pub fn labels(&self) -> &[u32] {
        &self.selected
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn contains(&self, label: u32) -> bool {
        self.selected.binary_search(&label).is_ok()
    }
}

/// Draws one Bernoulli(`p`) trial per label of `grid2`, in ascending label
/// order, one uniform draw per label. `p = 0` and `p = 1` give the empty and
/// full selections.
pub fn sample_selection<R: Rng + ?Sized>(
    grid2: &SuperpixelGrid,
    p: f64,
    rng: &mut R,
) -> Result<SelectionSet> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "selection probability {p} outside [0, 1]"
        )));
    }
    let selected = (0..grid2.num_labels() as u32)
        .filter(|_| rng.random::<f64>() < p)
        .collect();
    Ok(SelectionSet {
        selected,
        num_labels: grid2.num_labels(),
        p,
    })
}

/// Binary mask: 1 on pixels whose `grid2` label is selected.
pub fn hard_mask(grid2: &SuperpixelGrid, sel: &SelectionSet) -> Result<MixMask> {
    if sel.num_labels() != grid2.num_labels() {
        return Err(Error::Contract(format!(
            "selection drawn over {} labels applied to a grid with {}",
            sel.num_labels(),
            grid2.num_labels()
        )));
    }
    let mut chosen = vec![false; grid2.num_labels()];
    for &l in sel.labels() {
        chosen[l as usize] = true;
    }
    let data = grid2
        .labels()
        .iter()
        .map(|&l| if chosen[l as usize] { 1.0 } else { 0.0 })
        .collect();
    MixMask::new(grid2.height(), grid2.width(), data, MaskKind::Hard)
}

/// A mixed image with its class map.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedPair {
    pub image: ImageTensor,
    pub mask: ClassMap,
}

/// Cut-and-paste: every pixel is copied verbatim from the first input where
/// the mask is 0 and from the second where it is 1.
pub fn hard_mix(
    x1: &ImageTensor,
    x2: &ImageTensor,
    y1: &ClassMap,
    y2: &ClassMap,
    mh: &MixMask,
) -> Result<MixedPair> {
    check_inputs(x1, x2, y1, y2)?;
    same_shape(x1.shape(), mh.shape())?;
    if mh.kind() != MaskKind::Hard {
        return Err(Error::Contract("hard mixing needs a hard mask".into()));
    }
    let pick = |a: &[f64], b: &[f64], stride: usize| -> Vec<f64> {
        a.chunks_exact(stride)
            .zip(b.chunks_exact(stride))
            .zip(mh.data())
            .flat_map(|((pa, pb), &m)| if m == 1.0 { pb } else { pa }.iter().copied())
            .collect()
    };
    let (h, w) = x1.shape();
    let image = ImageTensor::new(
        h,
        w,
        x1.channels(),
        pick(x1.data(), x2.data(), x1.channels()),
    )?;
    let mask = ClassMap::new(
        h,
        w,
        y1.num_classes(),
        pick(y1.data(), y2.data(), y1.num_classes()),
    )?;
    Ok(MixedPair { image, mask })
}

/// Superpixel grid of the hard-mixed image: `sp1` labels outside the mask,
/// `sp2` labels (offset by `sp1.num_labels()`) inside it, compacted in
/// ascending order. Regions clipped by the mask may be disconnected.
pub fn mixed_grid(
    sp1: &SuperpixelGrid,
    sp2: &SuperpixelGrid,
    mh: &MixMask,
) -> Result<SuperpixelGrid> {
    same_shape(sp1.shape(), sp2.shape())?;
    same_shape(sp1.shape(), mh.shape())?;
    if mh.kind() != MaskKind::Hard {
        return Err(Error::Contract("the mixed grid needs a hard mask".into()));
    }
    let offset = sp1.num_labels() as u32;
    let raw: Vec<u32> = sp1
        .labels()
        .iter()
        .zip(sp2.labels())
        .zip(mh.data())
        .map(|((&a, &b), &m)| if m == 1.0 { b + offset } else { a })
        .collect();
    SuperpixelGrid::from_raw(sp1.height(), sp1.width(), &raw)
}

/// Soft mixing coefficient per superpixel of the mixed grid.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaVector(Vec<f64>);

impl LambdaVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("lambda {v} outside [0, 1]")));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(min, max, mean)` over superpixels.
    pub fn summary(&self) -> LambdaSummary {
        let n = self.0.len().max(1) as f64;
        LambdaSummary {
            min: self.0.iter().copied().fold(f64::INFINITY, f64::min),
            max: self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: self.0.iter().sum::<f64>() / n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LambdaSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Mean of `sa21` over each superpixel of `spm`.
pub fn superpixel_lambda(spm: &SuperpixelGrid, sa21: &SaliencyMap) -> Result<LambdaVector> {
    same_shape(spm.shape(), sa21.shape())?;
    let mut sums = vec![0.0; spm.num_labels()];
    let mut counts = vec![0usize; spm.num_labels()];
    for (&l, &v) in spm.labels().iter().zip(sa21.data()) {
        sums[l as usize] += v;
        counts[l as usize] += 1;
    }
    let values = sums
        .iter()
        .zip(&counts)
        .enumerate()
        .map(|(k, (&s, &n))| {
            if n == 0 {
                Err(Error::Internal(format!("superpixel {k} is empty")))
            } else {
                Ok((s / n as f64).clamp(0.0, 1.0))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    LambdaVector::new(values)
}

/// Paints each superpixel of `spm` with its coefficient.
pub fn soft_mask(spm: &SuperpixelGrid, lambdas: &LambdaVector) -> Result<MixMask> {
    if lambdas.len() != spm.num_labels() {
        return Err(Error::dims(
            format!("{} lambdas", spm.num_labels()),
            lambdas.len(),
        ));
    }
    let data = spm
        .labels()
        .iter()
        .map(|&l| lambdas.values()[l as usize])
        .collect();
    MixMask::new(spm.height(), spm.width(), data, MaskKind::Soft)
}

/// `(1 - m) * a + m * b`, clamped to the interval spanned by `a` and `b`.
#[inline]
fn blend(a: f64, b: f64, m: f64) -> f64 {
    ((1.0 - m) * a + m * b).clamp(a.min(b), a.max(b))
}

/// Pointwise convex combination of both images and both class maps.
pub fn soft_mix(
    x1: &ImageTensor,
    x2: &ImageTensor,
    y1: &ClassMap,
    y2: &ClassMap,
    ms: &MixMask,
) -> Result<MixedPair> {
    check_inputs(x1, x2, y1, y2)?;
    same_shape(x1.shape(), ms.shape())?;
    let mix = |a: &[f64], b: &[f64], stride: usize| -> Vec<f64> {
        a.chunks_exact(stride)
            .zip(b.chunks_exact(stride))
            .zip(ms.data())
            .flat_map(|((pa, pb), &m)| pa.iter().zip(pb).map(move |(&u, &v)| blend(u, v, m)))
            .collect()
    };
    let (h, w) = x1.shape();
    let image = ImageTensor::new(
        h,
        w,
        x1.channels(),
        mix(x1.data(), x2.data(), x1.channels()),
    )?;
    let mask = ClassMap::new(
        h,
        w,
        y1.num_classes(),
        mix(y1.data(), y2.data(), y1.num_classes()),
    )?;
    Ok(MixedPair { image, mask })
}

/// How superpixels of the second image are selected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionMode {
    /// Independent Bernoulli(`p`) trials.
    Bernoulli,
    /// Select every superpixel.
    All,
    /// Select nothing.
    Nothing,
}

/// Intermediate products of one pair, kept for inspection and overlays.
#[derive(Clone, Debug)]
pub struct Diagnostics {
    /// Requested superpixel counts (`k * k` for the square grid).
    pub l1: usize,
    pub l2: usize,
    pub sp1: SuperpixelGrid,
    pub sp2: SuperpixelGrid,
    pub spm: SuperpixelGrid,
    pub sa1: SaliencyMap,
    pub sa2: SaliencyMap,
    pub sa21: SaliencyMap,
    pub sa12: SaliencyMap,
    pub selection: SelectionSet,
    pub mh: MixMask,
    pub ms: MixMask,
    pub lambdas: LambdaVector,
}

/// Both augmented samples of a pair.
#[derive(Clone, Debug)]
pub struct PairOutput {
    pub hard: MixedPair,
    pub soft: MixedPair,
    pub diagnostics: Diagnostics,
}

fn build_grid(
    image: &ImageTensor,
    cfg: &AugConfig,
    rng: &PairRng,
    purpose: Purpose,
) -> Result<(usize, SuperpixelGrid)> {
    let (h, w) = image.shape();
    match cfg.grid_strategy {
        GridStrategy::Superpixel => {
            let l = rng.stream(purpose).random_range(cfg.l_min..=cfg.l_max);
            Ok((
                l,
                compute_superpixels(image, l, cfg.compactness, cfg.slic_iters)?,
            ))
        }
        GridStrategy::Square(k) => Ok((k * k, square_grid(h, w, k)?)),
    }
}

/// Full hard and soft mixing of one pair with Bernoulli selection.
pub fn hsmix_pair(
    x1: &ImageTensor,
    x2: &ImageTensor,
    y1: &ClassMap,
    y2: &ClassMap,
    cfg: &AugConfig,
    rng: &PairRng,
) -> Result<PairOutput> {
    hsmix_pair_with(x1, x2, y1, y2, cfg, rng, SelectionMode::Bernoulli)
}

/// [`hsmix_pair`] with an explicit selection mode.
pub fn hsmix_pair_with(
    x1: &ImageTensor,
    x2: &ImageTensor,
    y1: &ClassMap,
    y2: &ClassMap,
    cfg: &AugConfig,
    rng: &PairRng,
    mode: SelectionMode,
) -> Result<PairOutput> {
    check_inputs(x1, x2, y1, y2)?;
    let (h, w) = x1.shape();
    cfg.validate_for(h, w)?;

    let (l1, sp1) = build_grid(x1, cfg, rng, Purpose::CountFirst)?;
    let (l2, sp2) = build_grid(x2, cfg, rng, Purpose::CountSecond)?;

    let p = match mode {
        SelectionMode::Bernoulli => cfg.p,
        SelectionMode::All => 1.0,
        SelectionMode::Nothing => 0.0,
    };
    let selection = sample_selection(&sp2, p, &mut rng.stream(Purpose::Selection))?;
    let mh = hard_mask(&sp2, &selection)?;
    let hard = hard_mix(x1, x2, y1, y2, &mh)?;

    let sa1 = fine_grained_saliency(x1);
    let sa2 = fine_grained_saliency(x2);
    let sa21 = relative_saliency(&sa1, &sa2, cfg.epsilon)?;
    let sa12 = sa21.complement();
    let spm = mixed_grid(&sp1, &sp2, &mh)?;
    let lambdas = match cfg.lambda_strategy {
        LambdaStrategy::Saliency => superpixel_lambda(&spm, &sa21)?,
        LambdaStrategy::Random => {
            let lambda: f64 = rng.stream(Purpose::Lambda).random();
            LambdaVector::new(vec![lambda; spm.num_labels()])?
        }
    };
    let ms = soft_mask(&spm, &lambdas)?;
    let soft = soft_mix(x1, x2, y1, y2, &ms)?;

    Ok(PairOutput {
        hard,
        soft,
        diagnostics: Diagnostics {
            l1,
            l2,
            sp1,
            sp2,
            spm,
            sa1,
            sa2,
            sa21,
            sa12,
            selection,
            mh,
            ms,
            lambdas,
        },
    })
}
