//! Uniform cell-centred grids and complex fields sampled on them.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{from_usize, lit, Point, Real};

/// Uniform cell-centred grid over `[x1_min, x1_max] x [x2_min, x2_max]`.
///
/// Node `(i1, i2)` sits at `x1_min + (i1 + 1/2) d1`, `x2_min + (i2 + 1/2) d2`,
/// so no node lies on the boundary of the box. Flat storage is x2-major:
/// `index = i2 * n1 + i1`, i.e. each row of constant `x2` is contiguous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D<T> {
    pub x1_min: T,
    pub x1_max: T,
    pub x2_min: T,
    pub x2_max: T,
    pub n1: usize,
    pub n2: usize,
}

impl<T: Real> Grid2D<T> {
    pub fn new(x1_min: T, x1_max: T, x2_min: T, x2_max: T, n1: usize, n2: usize) -> Result<Self> {
        if !(x1_min < x1_max) || !(x2_min < x2_max) {
            return Err(Error::BadGeometry("grid bounds must be increasing".into()));
        }
        if n1 < 2 || n2 < 2 {
            return Err(Error::BadGeometry(format!(
                "grid needs at least 2 points per axis, got {n1}x{n2}"
            )));
        }
        Ok(Self {
            x1_min,
            x1_max,
            x2_min,
            x2_max,
            n1,
            n2,
        })
    }

    /// Grid spanning one period `(-pi, pi)` in `x1` and `(-half_height, half_height)` in `x2`.
    pub fn period_cell(half_height: T, n1: usize, n2: usize) -> Result<Self> {
        Self::new(-T::PI(), T::PI(), -half_height, half_height, n1, n2)
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn d1(&self) -> T {
        (self.x1_max - self.x1_min) / from_usize(self.n1)
    }

    pub fn d2(&self) -> T {
        (self.x2_max - self.x2_min) / from_usize(self.n2)
    }

    pub fn cell_area(&self) -> T {
        self.d1() * self.d2()
    }

    pub fn x1(&self, i1: usize) -> T {
        self.x1_min + (from_usize::<T>(i1) + lit(0.5)) * self.d1()
    }

    pub fn x2(&self, i2: usize) -> T {
        self.x2_min + (from_usize::<T>(i2) + lit(0.5)) * self.d2()
    }

    pub fn index(&self, i1: usize, i2: usize) -> usize {
        debug_assert!(i1 < self.n1 && i2 < self.n2);
        i2 * self.n1 + i1
    }

    pub fn indices(&self, index: usize) -> (usize, usize) {
        (index % self.n1, index / self.n1)
    }

    pub fn point(&self, index: usize) -> Point<T> {
        let (i1, i2) = self.indices(index);
        [self.x1(i1), self.x2(i2)]
    }

    /// Cell containing `p`, if `p` lies inside the box.
    pub fn locate(&self, p: Point<T>) -> Option<(usize, usize)> {
        let f1 = (p[0] - self.x1_min) / self.d1();
        let f2 = (p[1] - self.x2_min) / self.d2();
        if f1 < T::zero() || f2 < T::zero() {
            return None;
        }
        let i1 = f1.floor().to_usize()?;
        let i2 = f2.floor().to_usize()?;
        (i1 < self.n1 && i2 < self.n2).then_some((i1, i2))
    }

    pub fn points(&self) -> impl Iterator<Item = Point<T>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }
}

/// Complex samples on a [`Grid2D`], x2-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField<T> {
    pub grid: Grid2D<T>,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> ComplexField<T> {
    pub fn new(grid: Grid2D<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::BadGeometry(format!(
                "field has {} values for a {}x{} grid",
                values.len(),
                grid.n1,
                grid.n2
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid2D<T>) -> Self {
        Self {
            grid,
            values: vec![Complex::new(T::zero(), T::zero()); grid.len()],
        }
    }

    pub fn from_fn(grid: Grid2D<T>, mut f: impl FnMut(Point<T>) -> Complex<T>) -> Self {
        let values = grid.points().map(&mut f).collect();
        Self { grid, values }
    }

    pub fn at(&self, i1: usize, i2: usize) -> Complex<T> {
        self.values[self.grid.index(i1, i2)]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Euclidean norm of the samples.
    pub fn norm(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, v| acc + v.norm_sqr())
            .sqrt()
    }
}
