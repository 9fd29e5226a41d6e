//! Parametric scatterer shapes, scenes and contrast rasterization.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid2D};
use crate::medium::MediumParams;
use crate::real::{czero, lit, to_f64, Point, Real};

/// Largest admissible contrast magnitude.
pub const MAX_CONTRAST: f64 = 10.0;

/// Shape gallery. Bounded shapes live inside one period cell; the sinusoid
/// band is `2pi`-periodic in `x1` and fills the whole cell horizontally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape<T> {
    /// `rotation` is the angle (radians) of the first semi-axis from the `x1` axis.
    Ellipse {
        center: Point<T>,
        semi_axes: [T; 2],
        rotation: T,
    },
    /// The curve `(cos t + 0.65 cos 2t - 0.65, 1.5 sin t)` scaled by `scale` and moved to `center`.
    Kite { center: Point<T>, scale: T },
    /// Union of a horizontal `arm_length x arm_width` bar and its vertical twin.
    Cross {
        center: Point<T>,
        arm_length: T,
        arm_width: T,
    },
    /// `|x2 - amplitude sin(x1 + phase)| < half_thickness`.
    SinusoidBand {
        amplitude: T,
        half_thickness: T,
        phase: T,
    },
}

/// Axis-aligned bounding box `[[x1_lo, x1_hi], [x2_lo, x2_hi]]`.
pub type BoundingBox<T> = [[T; 2]; 2];

/// Leftmost point of the unit kite, `-(1.3 + 1/5.2)`.
const KITE_X_MIN: f64 = -1.3 - 1.0 / 5.2;

impl<T: Real> Shape<T> {
    pub fn ellipse(center: Point<T>) -> Self {
        Shape::Ellipse {
            center,
            semi_axes: [lit(0.6), lit(0.3)],
            rotation: T::zero(),
        }
    }

    /// Standard kite scaled to height 1.2.
    pub fn kite(center: Point<T>) -> Self {
        Shape::Kite {
            center,
            scale: lit(0.4),
        }
    }

    pub fn cross(center: Point<T>) -> Self {
        Shape::Cross {
            center,
            arm_length: lit(1.2),
            arm_width: lit(0.3),
        }
    }

    pub fn sinusoid() -> Self {
        Shape::SinusoidBand {
            amplitude: lit(0.5),
            half_thickness: lit(0.15),
            phase: T::zero(),
        }
    }

    pub fn disc(center: Point<T>, radius: T) -> Self {
        Shape::Ellipse {
            center,
            semi_axes: [radius, radius],
            rotation: T::zero(),
        }
    }

    /// Open-set membership.
    pub fn contains(&self, p: Point<T>) -> bool {
        match *self {
            Shape::Ellipse {
                center,
                semi_axes,
                rotation,
            } => {
                let (s, c) = rotation.sin_cos();
                let d1 = p[0] - center[0];
                let d2 = p[1] - center[1];
                let u1 = (d1 * c + d2 * s) / semi_axes[0];
                let u2 = (-d1 * s + d2 * c) / semi_axes[1];
                u1 * u1 + u2 * u2 < T::one()
            }
            Shape::Kite { center, scale } => {
                // each horizontal line meets the kite curve exactly twice:
                // sin t = v gives x = +-sqrt(1 - v^2) - 1.3 v^2
                let u1 = (p[0] - center[0]) / scale;
                let v = (p[1] - center[1]) / (scale * lit(1.5));
                if v.abs() >= T::one() {
                    return false;
                }
                let w = (T::one() - v * v).sqrt();
                let shift = lit::<T>(1.3) * v * v;
                u1 > -w - shift && u1 < w - shift
            }
            Shape::Cross {
                center,
                arm_length,
                arm_width,
            } => {
                let d1 = (p[0] - center[0]).abs();
                let d2 = (p[1] - center[1]).abs();
                let half_l = arm_length / lit(2.0);
                let half_w = arm_width / lit(2.0);
                (d1 < half_l && d2 < half_w) || (d1 < half_w && d2 < half_l)
            }
            Shape::SinusoidBand {
                amplitude,
                half_thickness,
                phase,
            } => (p[1] - amplitude * (p[0] + phase).sin()).abs() < half_thickness,
        }
    }

    pub fn bounding_box(&self) -> BoundingBox<T> {
        match *self {
            Shape::Ellipse {
                center,
                semi_axes,
                rotation,
            } => {
                let (s, c) = rotation.sin_cos();
                let [a, b] = semi_axes;
                let w1 = (a * a * c * c + b * b * s * s).sqrt();
                let w2 = (a * a * s * s + b * b * c * c).sqrt();
                [
                    [center[0] - w1, center[0] + w1],
                    [center[1] - w2, center[1] + w2],
                ]
            }
            Shape::Kite { center, scale } => [
                [center[0] + scale * lit(KITE_X_MIN), center[0] + scale],
                [center[1] - scale * lit(1.5), center[1] + scale * lit(1.5)],
            ],
            Shape::Cross {
                center,
                arm_length,
                arm_width,
            } => {
                let half = arm_length.max(arm_width) / lit(2.0);
                [
                    [center[0] - half, center[0] + half],
                    [center[1] - half, center[1] + half],
                ]
            }
            Shape::SinusoidBand {
                amplitude,
                half_thickness,
                ..
            } => {
                let top = amplitude.abs() + half_thickness;
                [[-T::PI(), T::PI()], [-top, top]]
            }
        }
    }

    /// Boundary polygon of a kite with `n` vertices (`None` for other shapes).
    pub fn kite_polygon(&self, n: usize) -> Option<Vec<Point<T>>> {
        let Shape::Kite { center, scale } = *self else {
            return None;
        };
        Some(
            (0..n)
                .map(|i| {
                    let t = T::TAU() * crate::real::from_usize::<T>(i) / crate::real::from_usize(n);
                    let x = t.cos() + lit::<T>(0.65) * (t + t).cos() - lit(0.65);
                    let y = lit::<T>(1.5) * t.sin();
                    [center[0] + scale * x, center[1] + scale * y]
                })
                .collect(),
        )
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Validation {
                    message: format!("{name} must be positive, got {v}"),
                    cause: None,
                })
            }
        };
        match *self {
            Shape::Ellipse { semi_axes, .. } => {
                positive("ellipse semi-axis", semi_axes[0])?;
                positive("ellipse semi-axis", semi_axes[1])
            }
            Shape::Kite { scale, .. } => positive("kite scale", scale),
            Shape::Cross {
                arm_length,
                arm_width,
                ..
            } => {
                positive("cross arm length", arm_length)?;
                positive("cross arm width", arm_width)
            }
            Shape::SinusoidBand { half_thickness, .. } => {
                positive("sinusoid half-thickness", half_thickness)
            }
        }
    }
}

/// Scatterers with their contrasts `q = n - 1` in a given medium.
/// Overlapping supports add their contrasts.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene<T> {
    pub params: MediumParams<T>,
    pub shapes: Vec<(Shape<T>, Complex<T>)>,
}

impl<T: Real> Scene<T> {
    pub fn new(params: MediumParams<T>, shapes: Vec<(Shape<T>, Complex<T>)>) -> Result<Self> {
        let h = params.h();
        for (i, (shape, q)) in shapes.iter().enumerate() {
            shape.validate()?;
            if !(q.norm() <= lit(MAX_CONTRAST)) {
                return Err(Error::Validation {
                    message: format!("shape {i}: contrast |q| = {} exceeds {MAX_CONTRAST}", q.norm()),
                    cause: None,
                });
            }
            let [b1, b2] = shape.bounding_box();
            let bounded = !matches!(shape, Shape::SinusoidBand { .. });
            if bounded && (b1[0] <= -T::PI() || b1[1] >= T::PI()) {
                return Err(Error::Validation {
                    message: format!(
                        "shape {i} spans x1 in [{}, {}], outside the period cell (-pi, pi)",
                        b1[0], b1[1]
                    ),
                    cause: None,
                });
            }
            if b2[0] <= -h || b2[1] >= h {
                return Err(Error::Validation {
                    message: format!(
                        "shape {i} spans x2 in [{}, {}], outside the slab |x2| < h = {h}",
                        b2[0], b2[1]
                    ),
                    cause: None,
                });
            }
        }
        Ok(Self { params, shapes })
    }

    pub fn empty(params: MediumParams<T>) -> Self {
        Self {
            params,
            shapes: Vec::new(),
        }
    }

    pub fn contrast_at(&self, p: Point<T>) -> Complex<T> {
        self.shapes
            .iter()
            .filter(|(s, _)| s.contains(p))
            .fold(czero(), |acc, (_, q)| acc + q)
    }

    pub fn rasterize(&self, grid: &Grid2D<T>) -> ComplexField<T> {
        ComplexField::from_fn(*grid, |p| self.contrast_at(p))
    }

    /// `sup |x2|` over all supports (from bounding boxes).
    pub fn support_height(&self) -> T {
        self.shapes.iter().fold(T::zero(), |acc, (s, _)| {
            let [_, b2] = s.bounding_box();
            acc.max(b2[0].abs()).max(b2[1].abs())
        })
    }

    pub fn is_lossless(&self) -> bool {
        self.shapes.iter().all(|(_, q)| q.im == T::zero())
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    /// Same shapes with every contrast multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            params: self.params,
            shapes: self.shapes.iter().map(|&(s, q)| (s, q * factor)).collect(),
        }
    }
}

impl<T: Real> std::fmt::Display for Shape<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Shape::Ellipse { center, semi_axes, rotation } => write!(
                f,
                "ellipse at ({}, {}) semi-axes ({}, {}) rot {}",
                to_f64(center[0]),
                to_f64(center[1]),
                to_f64(semi_axes[0]),
                to_f64(semi_axes[1]),
                to_f64(*rotation)
            ),
            Shape::Kite { center, scale } => write!(
                f,
                "kite at ({}, {}) scale {}",
                to_f64(center[0]),
                to_f64(center[1]),
                to_f64(*scale)
            ),
            Shape::Cross { center, arm_length, arm_width } => write!(
                f,
                "cross at ({}, {}) arms {} x {}",
                to_f64(center[0]),
                to_f64(center[1]),
                to_f64(*arm_length),
                to_f64(*arm_width)
            ),
            Shape::SinusoidBand { amplitude, half_thickness, phase } => write!(
                f,
                "sinusoid band amp {} half-thickness {} phase {}",
                to_f64(*amplitude),
                to_f64(*half_thickness),
                to_f64(*phase)
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn params() -> MediumParams<f64> {
        MediumParams::new(2.0 * PI, 0.0, 1.0, 2.0).unwrap()
    }

    fn point_in_polygon(poly: &[Point<f64>], p: Point<f64>) -> bool {
        let mut inside = false;
        let n = poly.len();
        for i in 0..n {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    #[test]
    fn empty_scene_has_zero_contrast() {
        let s = Scene::empty(params());
        assert_eq!(s.contrast_at([0.1, 0.2]), Complex::new(0.0, 0.0));
        let g = Grid2D::period_cell(2.0, 16, 16).unwrap();
        assert!(s.rasterize(&g).values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn ellipse_membership() {
        let e = Shape::Ellipse {
            center: [0.0, 0.0],
            semi_axes: [0.5, 0.3],
            rotation: 0.0,
        };
        let s = Scene::new(params(), vec![(e, Complex::new(1.0, 0.0))]).unwrap();
        assert_eq!(s.contrast_at([0.0, 0.0]), Complex::new(1.0, 0.0));
        assert_eq!(s.contrast_at([0.6, 0.0]), Complex::new(0.0, 0.0));
    }

    #[test]
    fn rotated_ellipse_bounding_box_is_tight() {
        let e = Shape::Ellipse {
            center: [0.2, -0.1],
            semi_axes: [0.6, 0.2],
            rotation: 0.7,
        };
        let [b1, b2] = e.bounding_box();
        let mut seen = [[f64::MAX, f64::MIN], [f64::MAX, f64::MIN]];
        for i in 0..20000 {
            let t = 2.0 * PI * i as f64 / 20000.0;
            let (s, c) = 0.7f64.sin_cos();
            let (u, v) = (0.6 * t.cos(), 0.2 * t.sin());
            let p = [0.2 + u * c - v * s, -0.1 + u * s + v * c];
            for a in 0..2 {
                seen[a][0] = seen[a][0].min(p[a]);
                seen[a][1] = seen[a][1].max(p[a]);
            }
        }
        for a in 0..2 {
            let b = [b1, b2][a];
            assert!((b[0] - seen[a][0]).abs() < 1e-6 && (b[1] - seen[a][1]).abs() < 1e-6);
        }
    }

    #[test]
    fn kite_membership_matches_polygon_oracle() {
        let kite = Shape::Kite {
            center: [0.3, -0.1],
            scale: 0.4,
        };
        let poly = kite.kite_polygon(10_000).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut disagreements = 0;
        for _ in 0..1000 {
            let p = [rng.gen_range(-0.4..1.0), rng.gen_range(-0.8..0.6)];
            if kite.contains(p) != point_in_polygon(&poly, p) {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn kite_curve_is_simple() {
        let poly = Shape::<f64>::kite([0.0, 0.0]).kite_polygon(10_000).unwrap();
        // segments are checked against all others in a sweep over x2-bands
        let n = poly.len();
        let seg = |i: usize| (poly[i], poly[(i + 1) % n]);
        let cross = |a: Point<f64>, b: Point<f64>, c: Point<f64>| {
            (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            let (a, b) = seg(i);
            let (c, d) = seg(j);
            a[1].min(b[1]).partial_cmp(&c[1].min(d[1])).unwrap()
        });
        for (oi, &i) in order.iter().enumerate() {
            let (a, b) = seg(i);
            let top = a[1].max(b[1]);
            for &j in &order[oi + 1..] {
                let (c, d) = seg(j);
                if c[1].min(d[1]) > top {
                    break;
                }
                if j == (i + 1) % n || i == (j + 1) % n {
                    continue;
                }
                let d1 = cross(a, b, c);
                let d2 = cross(a, b, d);
                let d3 = cross(c, d, a);
                let d4 = cross(c, d, b);
                let proper = d1 * d2 < 0.0 && d3 * d4 < 0.0;
                assert!(!proper, "segments {i} and {j} intersect");
            }
        }
    }

    #[test]
    fn kite_bounding_box_encloses_curve() {
        let kite = Shape::<f64>::kite([0.0, 0.0]);
        let [b1, b2] = kite.bounding_box();
        let poly = kite.kite_polygon(10_000).unwrap();
        let min_x = poly.iter().map(|p| p[0]).fold(f64::MAX, f64::min);
        assert!((min_x - b1[0]).abs() < 1e-6);
        assert!((b2[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn cross_and_band_membership() {
        let c = Shape::<f64>::cross([0.0, 0.0]);
        assert!(c.contains([0.55, 0.0]));
        assert!(c.contains([0.0, -0.55]));
        assert!(!c.contains([0.3, 0.3]));
        let b = Shape::<f64>::sinusoid();
        assert!(b.contains([PI / 2.0, 0.5]));
        assert!(!b.contains([PI / 2.0, 0.0]));
        assert!(b.contains([-PI / 2.0, -0.4]));
    }

    #[test]
    fn overlapping_contrasts_add() {
        let s = Scene::new(
            params(),
            vec![
                (Shape::disc([0.0, 0.0], 0.3), Complex::new(1.0, 0.0)),
                (Shape::disc([0.1, 0.0], 0.3), Complex::new(0.5, 0.25)),
            ],
        )
        .unwrap();
        assert_eq!(s.contrast_at([0.05, 0.0]), Complex::new(1.5, 0.25));
        assert!(!s.is_lossless());
    }

    #[test]
    fn shapes_must_stay_inside_slab() {
        let too_tall = Shape::Ellipse {
            center: [0.0, 0.0],
            semi_axes: [0.3, 1.2],
            rotation: 0.0,
        };
        assert!(matches!(
            Scene::new(params(), vec![(too_tall, Complex::new(1.0, 0.0))]),
            Err(Error::Validation { .. })
        ));
        let over_seam = Shape::disc([3.0, 0.0], 0.3);
        assert!(Scene::new(params(), vec![(over_seam, Complex::new(1.0, 0.0))]).is_err());
        let strong = Shape::disc([0.0, 0.0], 0.3);
        assert!(Scene::new(params(), vec![(strong, Complex::new(11.0, 0.0))]).is_err());
    }

    #[test]
    fn default_gallery_fits_and_probe_grid_agrees() {
        let gallery = [
            Shape::ellipse([0.0, 0.0]),
            Shape::kite([0.0, 0.0]),
            Shape::cross([0.0, 0.0]),
            Shape::sinusoid(),
        ];
        let probe = Grid2D::period_cell(1.0, 512, 512).unwrap();
        for shape in gallery {
            let scene = Scene::new(params(), vec![(shape, Complex::new(1.0, 0.0))]).unwrap();
            let raster = scene.rasterize(&probe);
            let mut top: f64 = 0.0;
            for (idx, v) in raster.values.iter().enumerate() {
                if v.norm() > 0.0 {
                    top = top.max(probe.point(idx)[1].abs());
                }
            }
            assert!(top > 0.0 && top < 1.0, "{shape}: probe height {top}");
            assert!(top <= scene.support_height() + 1e-12);
        }
    }

    #[test]
    fn disc_raster_area() {
        let s = Scene::new(params(), vec![(Shape::disc([0.0, 0.0], 0.5), Complex::new(1.0, 0.0))])
            .unwrap();
        let frac = |n: usize| {
            let g = Grid2D::period_cell(2.0, n, n).unwrap();
            let r = s.rasterize(&g);
            r.values.iter().filter(|v| v.norm() > 0.0).count() as f64 / g.len() as f64
        };
        let exact = PI * 0.25 / (2.0 * PI * 4.0);
        let f128 = frac(128);
        assert!((f128 - exact).abs() / exact < 0.15);
        let errors: Vec<f64> = [64, 128, 256, 512].iter().map(|&n| (frac(n) - exact).abs()).collect();
        // area error shrinks under refinement
        assert!(errors[3] < errors[0]);
        assert!(errors[3] < 0.02 * exact);
    }
}
