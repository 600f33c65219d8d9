//! Exclusion-radius fields: the desired local node spacing as a function of
//! position.
//!
//! Every field declares a strictly positive lower bound `r_min` and an upper
//! bound `r_max`. Generators size their background lattice from `r_min`, and
//! the node-count bound needs `r_min > 0`.

mod pgm;

pub use pgm::{parse_pgm, read_pgm, write_pgm, GrayImage};

use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::geometry::{BoundingBox, Point};

pub trait RadiusField: Send + Sync {
    /// Raw radius at `p`. Use [`evaluate`] when the value must be checked.
    fn radius(&self, p: &Point) -> f64;
    fn r_min(&self) -> f64;
    fn r_max(&self) -> f64;
    fn describe(&self) -> String;

    fn is_uniform(&self) -> bool {
        self.r_min() == self.r_max()
    }
}

/// Radius at `p`, rejecting non-finite or non-positive values.
pub fn evaluate(field: &dyn RadiusField, p: &Point) -> Result<f64> {
    let r = field.radius(p);
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::MalformedField(format!("{} gives {r} at {:?}", field.describe(), p.coords)));
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantField {
    r: f64,
}

impl ConstantField {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid(format!("constant radius must be positive, got {r}")));
        }
        Ok(Self { r })
    }
}

impl RadiusField for ConstantField {
    fn radius(&self, _: &Point) -> f64 {
        self.r
    }
    fn r_min(&self) -> f64 {
        self.r
    }
    fn r_max(&self) -> f64 {
        self.r
    }
    fn describe(&self) -> String {
        format!("const:{}", self.r)
    }
}

/// `r(R) = c * exp(eps * R^2)` with `R` the distance to the origin.
///
/// Bounds are taken over the ball of radius `reach` around the origin, which
/// should cover the generation domain.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialExpField {
    c: f64,
    eps: f64,
    reach: f64,
}

impl RadialExpField {
    pub fn new(c: f64, eps: f64, reach: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) || !eps.is_finite() || !(reach >= 0.0) {
            return Err(invalid("radialexp needs c > 0, finite eps, reach >= 0"));
        }
        let f = Self { c, eps, reach };
        if !f.r_max().is_finite() {
            return Err(invalid("radialexp overflows over the requested reach"));
        }
        Ok(f)
    }

    /// Reach set to the farthest corner of `bbox`.
    pub fn over_box(c: f64, eps: f64, bbox: &BoundingBox) -> Result<Self> {
        let mut far = 0.0f64;
        for a in 0..bbox.dim() {
            far += bbox.lo[a].abs().max(bbox.hi[a].abs()).powi(2);
        }
        Self::new(c, eps, far.sqrt())
    }

    fn at(&self, big_r: f64) -> f64 {
        self.c * (self.eps * big_r * big_r).exp()
    }
}

impl RadiusField for RadialExpField {
    fn radius(&self, p: &Point) -> f64 {
        self.at(p.norm())
    }
    fn r_min(&self) -> f64 {
        self.at(0.0).min(self.at(self.reach))
    }
    fn r_max(&self) -> f64 {
        self.at(0.0).max(self.at(self.reach))
    }
    fn describe(&self) -> String {
        format!("radialexp:{},{}", self.c, self.eps)
    }
}

/// Radius driven by a grayscale raster laid over a 2-D extent. Dark pixels
/// map to `r_min` (dense nodes), white pixels to `r_max`.
///
/// Intensity is interpolated bilinearly between pixel centers and clamped to
/// the nearest edge pixel outside the raster. Only the first two coordinates
/// of a point are used.
#[derive(Clone, Debug)]
pub struct ImageField {
    image: GrayImage,
    extent: BoundingBox,
    r_min: f64,
    r_max: f64,
}

impl ImageField {
    pub fn new(image: GrayImage, extent: BoundingBox, r_min: f64, r_max: f64) -> Result<Self> {
        if !(r_min > 0.0) {
            return Err(invalid(format!("image field needs r_min > 0, got {r_min}")));
        }
        if !(r_max > r_min && r_max.is_finite()) {
            return Err(invalid("image field needs r_max > r_min"));
        }
        if image.width() == 0 || image.height() == 0 {
            return Err(invalid("empty raster"));
        }
        if extent.dim() != 2 {
            return Err(invalid("image extent must be 2-D"));
        }
        Ok(Self { image, extent, r_min, r_max })
    }

    pub fn extent(&self) -> &BoundingBox {
        &self.extent
    }

    /// Intensity in `[0, 255]` at `p`.
    pub fn intensity(&self, p: &Point) -> f64 {
        let (w, h) = (self.image.width(), self.image.height());
        // continuous pixel coordinates; row 0 is the top edge of the extent
        let u = (p[0] - self.extent.lo[0]) / self.extent.extent(0) * w as f64 - 0.5;
        let v = (self.extent.hi[1] - p[1]) / self.extent.extent(1) * h as f64 - 0.5;
        let u = u.clamp(0.0, (w - 1) as f64);
        let v = v.clamp(0.0, (h - 1) as f64);
        let (c0, r0) = (u.floor() as usize, v.floor() as usize);
        let (c1, r1) = ((c0 + 1).min(w - 1), (r0 + 1).min(h - 1));
        let (fu, fv) = (u - c0 as f64, v - r0 as f64);
        let px = |r: usize, c: usize| self.image.get(r, c) as f64;
        let top = px(r0, c0) * (1.0 - fu) + px(r0, c1) * fu;
        let bottom = px(r1, c0) * (1.0 - fu) + px(r1, c1) * fu;
        top * (1.0 - fv) + bottom * fv
    }
}

impl RadiusField for ImageField {
    fn radius(&self, p: &Point) -> f64 {
        self.r_min + self.intensity(p) / 255.0 * (self.r_max - self.r_min)
    }
    fn r_min(&self) -> f64 {
        self.r_min
    }
    fn r_max(&self) -> f64 {
        self.r_max
    }
    fn describe(&self) -> String {
        format!("image:{}x{},{},{}", self.image.width(), self.image.height(), self.r_min, self.r_max)
    }
}

/// Convenience constructor matching the image-to-field operation.
pub fn image_to_field(image: GrayImage, extent: BoundingBox, r_min: f64, r_max: f64) -> Result<ImageField> {
    ImageField::new(image, extent, r_min, r_max)
}

/// Arbitrary closure with caller-declared bounds.
pub struct FnField<F> {
    f: F,
    r_min: f64,
    r_max: f64,
    label: String,
}

impl<F: Fn(&Point) -> f64 + Send + Sync> FnField<F> {
    pub fn new(f: F, r_min: f64, r_max: f64, label: impl Into<String>) -> Result<Self> {
        if !(r_min > 0.0 && r_max >= r_min) {
            return Err(invalid("FnField needs 0 < r_min <= r_max"));
        }
        Ok(Self { f, r_min, r_max, label: label.into() })
    }
}

impl<F: Fn(&Point) -> f64 + Send + Sync> RadiusField for FnField<F> {
    fn radius(&self, p: &Point) -> f64 {
        (self.f)(p)
    }
    fn r_min(&self) -> f64 {
        self.r_min
    }
    fn r_max(&self) -> f64 {
        self.r_max
    }
    fn describe(&self) -> String {
        self.label.clone()
    }
}

/// Textual field description used on the command line: `const:R`,
/// `radialexp:C,EPS` or `image:FILE,RMIN,RMAX`.
#[derive(Clone, Debug, PartialEq)]
pub enum RadiusSpec {
    Constant(f64),
    RadialExp { c: f64, eps: f64 },
    Image { path: PathBuf, r_min: f64, r_max: f64 },
}

impl FromStr for RadiusSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').ok_or_else(|| invalid(format!("radius spec {s:?} lacks a kind")))?;
        let nums = |args: &str, n: usize| -> Result<Vec<f64>> {
            let v: Vec<f64> = args
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| invalid(format!("bad number {t:?} in {s:?}"))))
                .collect::<Result<_>>()?;
            if v.len() != n {
                return Err(invalid(format!("{kind} takes {n} numbers, got {}", v.len())));
            }
            Ok(v)
        };
        match kind {
            "const" => Ok(Self::Constant(nums(args, 1)?[0])),
            "radialexp" => {
                let v = nums(args, 2)?;
                Ok(Self::RadialExp { c: v[0], eps: v[1] })
            }
            "image" => {
                let (path, rest) = args.split_once(',').ok_or_else(|| invalid("image takes FILE,RMIN,RMAX"))?;
                let v = nums(rest, 2)?;
                Ok(Self::Image { path: PathBuf::from(path), r_min: v[0], r_max: v[1] })
            }
            _ => Err(invalid(format!("unknown radius kind {kind:?}"))),
        }
    }
}

impl RadiusSpec {
    /// Builds the field for use over `region`: the reach of a radial field is
    /// the region's farthest corner and an image covers the region's first
    /// two axes.
    pub fn build(&self, region: &BoundingBox) -> Result<Box<dyn RadiusField>> {
        Ok(match self {
            Self::Constant(r) => Box::new(ConstantField::new(*r)?),
            Self::RadialExp { c, eps } => Box::new(RadialExpField::over_box(*c, *eps, region)?),
            Self::Image { path, r_min, r_max } => {
                let extent = BoundingBox::new(&[region.lo[0], region.lo[1]], &[region.hi[0], region.hi[1]])?;
                Box::new(ImageField::new(read_pgm(path)?, extent, *r_min, *r_max)?)
            }
        })
    }
}
