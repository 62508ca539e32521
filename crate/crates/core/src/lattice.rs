//! Square lattices, piecewise-constant fields and forward-difference operators.
//!
//! Cell `(i, j)` is the half-open square `l·(i + o₁, j + o₂) + [0, l)²`, where
//! `o` is the grid origin in lattice units. Fields store values on an index
//! rectangle; under [`Boundary::Open`] every operator shrinks that rectangle
//! to the cells where its stencil is defined, under [`Boundary::Periodic`]
//! indices wrap and fields always cover the whole grid. [`Boundary::PeriodicY`]
//! is open in `x` and periodic in `y`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    Open,
    /// Open in `x`, periodic in `y`.
    PeriodicY,
}

impl Boundary {
    pub fn periodic_x(self) -> bool {
        self == Boundary::Periodic
    }
    pub fn periodic_y(self) -> bool {
        matches!(self, Boundary::Periodic | Boundary::PeriodicY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    /// Axis from the 1-based index used in formulas.
    pub fn from_index(k: usize) -> Result<Axis> {
        match k {
            1 => Ok(Axis::X),
            2 => Ok(Axis::Y),
            _ => Err(Error::Domain(format!("axis must be 1 or 2, got {k}"))),
        }
    }

    fn unit(self) -> (isize, isize) {
        match self {
            Axis::X => (1, 0),
            Axis::Y => (0, 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    spacing: f64,
    nx: usize,
    ny: usize,
    boundary: Boundary,
    origin: [i64; 2],
}

impl Grid {
    pub fn new(spacing: f64, nx: usize, ny: usize, boundary: Boundary) -> Result<Grid> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Parameter(format!("spacing must be positive, got {spacing}")));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::Dimension(format!("grid must be at least 2x2, got {nx}x{ny}")));
        }
        Ok(Grid {
            spacing,
            nx,
            ny,
            boundary,
            origin: [0, 0],
        })
    }

    /// Shifts the lattice so that cell `(0, 0)` sits at lattice index `origin`.
    pub fn with_origin(mut self, origin: [i64; 2]) -> Grid {
        self.origin = origin;
        self
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }
    pub fn origin(&self) -> [i64; 2] {
        self.origin
    }
    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn full_rect(&self) -> IndexRect {
        IndexRect::new(0, self.nx, 0, self.ny)
    }

    /// Lower-left corner of cell `(i, j)`.
    pub fn corner(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.spacing * (i as i64 + self.origin[0]) as f64,
            self.spacing * (j as i64 + self.origin[1]) as f64,
        ]
    }

    /// Rectangle of cells `c` in `base` such that `c + d` lies in `base` for
    /// every offset `d` in `reach`. Periodic directions do not shrink.
    pub fn valid_rect(&self, base: IndexRect, reach: Reach) -> IndexRect {
        let b = self.boundary;
        let (rx, ry) = (!b.periodic_x() as usize, !b.periodic_y() as usize);
        base.shrink(Reach::new(reach.left * rx, reach.right * rx, reach.down * ry, reach.up * ry))
    }

    /// Rectangles a field may live on: periodic directions span the grid.
    fn admissible(&self, rect: &IndexRect) -> bool {
        let full = self.full_rect();
        (!self.boundary.periodic_x() || (rect.i0 == 0 && rect.i1 == full.i1))
            && (!self.boundary.periodic_y() || (rect.j0 == 0 && rect.j1 == full.j1))
    }

    /// Wraps periodic directions; `None` for negative open indices.
    fn wrap(&self, i: isize, j: isize) -> Option<(usize, usize)> {
        let i = if self.boundary.periodic_x() {
            i.rem_euclid(self.nx as isize)
        } else {
            i
        };
        let j = if self.boundary.periodic_y() {
            j.rem_euclid(self.ny as isize)
        } else {
            j
        };
        (i >= 0 && j >= 0).then_some((i as usize, j as usize))
    }
}

/// Stencil reach: how far a stencil looks in each direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Reach {
    pub left: usize,
    pub right: usize,
    pub down: usize,
    pub up: usize,
}

impl Reach {
    pub const fn new(left: usize, right: usize, down: usize, up: usize) -> Reach {
        Reach {
            left,
            right,
            down,
            up,
        }
    }
}

/// Half-open index rectangle `[i0, i1) × [j0, j1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRect {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

impl IndexRect {
    pub fn new(i0: usize, i1: usize, j0: usize, j1: usize) -> IndexRect {
        let i1 = i1.max(i0);
        let j1 = j1.max(j0);
        IndexRect { i0, i1, j0, j1 }
    }

    pub fn width(&self) -> usize {
        self.i1 - self.i0
    }
    pub fn height(&self) -> usize {
        self.j1 - self.j0
    }
    pub fn len(&self) -> usize {
        self.width() * self.height()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        (self.i0..self.i1).contains(&i) && (self.j0..self.j1).contains(&j)
    }

    pub fn contains_rect(&self, other: &IndexRect) -> bool {
        other.is_empty()
            || (other.i0 >= self.i0 && other.i1 <= self.i1 && other.j0 >= self.j0 && other.j1 <= self.j1)
    }

    pub fn intersect(&self, other: &IndexRect) -> IndexRect {
        IndexRect::new(
            self.i0.max(other.i0),
            self.i1.min(other.i1),
            self.j0.max(other.j0),
            self.j1.min(other.j1),
        )
    }

    pub fn shrink(&self, r: Reach) -> IndexRect {
        IndexRect::new(
            self.i0 + r.left,
            self.i1.saturating_sub(r.right),
            self.j0 + r.down,
            self.j1.saturating_sub(r.up),
        )
    }

    /// Linear position of `(i, j)` in row-major order (rows are constant `j`).
    fn offset(&self, i: usize, j: usize) -> usize {
        (j - self.j0) * self.width() + (i - self.i0)
    }

    fn cell(&self, k: usize) -> (usize, usize) {
        let w = self.width();
        (self.i0 + k % w, self.j0 + k / w)
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.j0..self.j1).flat_map(move |j| (self.i0..self.i1).map(move |i| (i, j)))
    }
}

/// Per-cell value type of a field.
pub trait CellValue: Copy + Send + Sync + std::fmt::Debug + PartialEq {
    fn is_finite(&self) -> bool;
    /// `a·x + b·y`
    fn lin(a: f64, x: Self, b: f64, y: Self) -> Self;
}

impl CellValue for f64 {
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn lin(a: f64, x: f64, b: f64, y: f64) -> f64 {
        a * x + b * y
    }
}

impl CellValue for [f64; 2] {
    fn is_finite(&self) -> bool {
        self[0].is_finite() && self[1].is_finite()
    }
    fn lin(a: f64, x: [f64; 2], b: f64, y: [f64; 2]) -> [f64; 2] {
        [a * x[0] + b * y[0], a * x[1] + b * y[1]]
    }
}

/// Piecewise-constant field on an index rectangle of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: Grid,
    rect: IndexRect,
    values: Vec<T>,
}

pub type ScalarField = Field<f64>;
pub type VectorField = Field<[f64; 2]>;

impl<T: CellValue> Field<T> {
    /// Field over the whole grid from row-major values.
    pub fn from_values(grid: Grid, values: Vec<T>) -> Result<Field<T>> {
        Field::from_rect_values(grid, grid.full_rect(), values)
    }

    pub fn from_rect_values(grid: Grid, rect: IndexRect, values: Vec<T>) -> Result<Field<T>> {
        if !grid.full_rect().contains_rect(&rect) {
            return Err(Error::Dimension("rectangle exceeds the grid".into()));
        }
        if !grid.admissible(&rect) {
            return Err(Error::Dimension("periodic fields must span every periodic direction".into()));
        }
        if values.len() != rect.len() {
            return Err(Error::Dimension(format!(
                "expected {} values, got {}",
                rect.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            let (i, j) = rect.cell(k);
            return Err(Error::InvalidField(format!("non-finite value at cell ({i}, {j})")));
        }
        Ok(Field { grid, rect, values })
    }

    /// Tabulates `f` over the whole grid.
    pub fn tabulate<F>(grid: Grid, f: F) -> Result<Field<T>>
    where
        F: Fn(usize, usize) -> T + Sync + Send,
    {
        let field = Field::build(grid, grid.full_rect(), f);
        field.check_finite()?;
        Ok(field)
    }

    /// Tabulates `f` over `rect` in parallel. Callers guarantee finiteness.
    pub(crate) fn build<F>(grid: Grid, rect: IndexRect, f: F) -> Field<T>
    where
        F: Fn(usize, usize) -> T + Sync + Send,
    {
        let values = (0..rect.len())
            .into_par_iter()
            .map(|k| {
                let (i, j) = rect.cell(k);
                f(i, j)
            })
            .collect();
        Field { grid, rect, values }
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(k) => {
                let (i, j) = self.rect.cell(k);
                Err(Error::InvalidField(format!("non-finite value at cell ({i}, {j})")))
            }
            None => Ok(()),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Index rectangle on which the field is defined.
    pub fn rect(&self) -> IndexRect {
        self.rect
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Value at an absolute cell index; wraps on periodic grids, `None`
    /// outside the defined rectangle otherwise.
    pub fn get(&self, i: isize, j: isize) -> Option<T> {
        let (i, j) = self.grid.wrap(i, j)?;
        self.rect
            .contains(i, j)
            .then(|| self.values[self.rect.offset(i, j)])
    }

    /// Value at `(i + di, j + dj)`; the caller guarantees it is defined.
    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize, di: isize, dj: isize) -> T {
        let (ii, jj) = match self.grid.boundary {
            Boundary::Open => ((i as isize + di) as usize, (j as isize + dj) as usize),
            _ => self.grid.wrap(i as isize + di, j as isize + dj).expect("index defined"),
        };
        self.values[self.rect.offset(ii, jj)]
    }

    /// Cells and values in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), T)> + '_ {
        self.rect.cells().zip(self.values.iter().copied())
    }

    pub fn map<U: CellValue, F: Fn(T) -> U + Sync>(&self, f: F) -> Field<U> {
        Field {
            grid: self.grid,
            rect: self.rect,
            values: self.values.par_iter().map(|&v| f(v)).collect(),
        }
    }

    /// Restriction to a sub-rectangle spanning every periodic direction.
    pub fn restrict(&self, rect: IndexRect) -> Result<Field<T>> {
        if !self.grid.admissible(&rect) {
            return Err(Error::Unsupported("restriction across a periodic direction".into()));
        }
        if !self.rect.contains_rect(&rect) {
            return Err(Error::Domain("restriction outside the defined rectangle".into()));
        }
        Ok(Field::build(self.grid, rect, |i, j| self.at(i, j, 0, 0)))
    }

    /// `a·self + b·other` on the common rectangle.
    pub fn combine(&self, a: f64, other: &Field<T>, b: f64) -> Result<Field<T>> {
        same_grid(&self.grid, &other.grid)?;
        let rect = self.rect.intersect(&other.rect);
        Ok(Field::build(self.grid, rect, |i, j| {
            T::lin(a, self.at(i, j, 0, 0), b, other.at(i, j, 0, 0))
        }))
    }

    /// Applies a stencil reaching `reach` cells around each output cell.
    pub(crate) fn stencil<U, F>(&self, reach: Reach, f: F) -> Field<U>
    where
        U: CellValue,
        F: Fn(&dyn Fn(isize, isize) -> T) -> U + Sync,
    {
        let rect = self.grid.valid_rect(self.rect, reach);
        Field::build(self.grid, rect, |i, j| f(&|di, dj| self.at(i, j, di, dj)))
    }
}

impl VectorField {
    pub fn component(&self, k: usize) -> ScalarField {
        self.map(move |v| v[k])
    }

    pub fn from_components(a: &ScalarField, b: &ScalarField) -> Result<VectorField> {
        same_grid(&a.grid, &b.grid)?;
        let rect = a.rect.intersect(&b.rect);
        Ok(Field::build(a.grid, rect, |i, j| [a.at(i, j, 0, 0), b.at(i, j, 0, 0)]))
    }
}

pub(crate) fn same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

fn nonempty<T: CellValue>(f: Field<T>, what: &str) -> Result<Field<T>> {
    if f.rect.is_empty() {
        Err(Error::Dimension(format!("{what}: valid index set is empty")))
    } else {
        Ok(f)
    }
}

/// Forward difference quotient `(v(· + e_k) − v)/l`.
pub fn dpartial<T: CellValue>(v: &Field<T>, axis: Axis) -> Result<Field<T>> {
    let inv = 1.0 / v.grid.spacing;
    let (di, dj) = axis.unit();
    let reach = Reach::new(0, di as usize, 0, dj as usize);
    nonempty(
        v.stencil(reach, |at| T::lin(inv, at(di, dj), -inv, at(0, 0))),
        "dpartial",
    )
}

/// Discrete gradient `(∂₁v, ∂₂v)`.
pub fn grad_d(v: &ScalarField) -> Result<VectorField> {
    let inv = 1.0 / v.grid.spacing;
    nonempty(
        v.stencil(Reach::new(0, 1, 0, 1), |at| {
            let c = at(0, 0);
            [(at(1, 0) - c) * inv, (at(0, 1) - c) * inv]
        }),
        "grad_d",
    )
}

/// Discrete divergence `∂₁v₁ + ∂₂v₂`.
pub fn div_d(v: &VectorField) -> Result<ScalarField> {
    let inv = 1.0 / v.grid.spacing;
    nonempty(
        v.stencil(Reach::new(0, 1, 0, 1), |at| {
            let c = at(0, 0);
            (at(1, 0)[0] - c[0]) * inv + (at(0, 1)[1] - c[1]) * inv
        }),
        "div_d",
    )
}

/// Discrete curl `∂₁v₂ − ∂₂v₁`.
pub fn curl_d(v: &VectorField) -> Result<ScalarField> {
    let inv = 1.0 / v.grid.spacing;
    nonempty(
        v.stencil(Reach::new(0, 1, 0, 1), |at| {
            let c = at(0, 0);
            (at(1, 0)[1] - c[1]) * inv - (at(0, 1)[0] - c[0]) * inv
        }),
        "curl_d",
    )
}

/// Shifted Laplacian `∂₁₁φ(i−1, j) + ∂₂₂φ(i, j−1)`, the five-point stencil.
pub fn laplace_shifted(phi: &ScalarField) -> Result<ScalarField> {
    let inv2 = 1.0 / (phi.grid.spacing * phi.grid.spacing);
    nonempty(
        phi.stencil(Reach::new(1, 1, 1, 1), |at| {
            let c = at(0, 0);
            ((at(1, 0) - 2.0 * c + at(-1, 0)) + (at(0, 1) - 2.0 * c + at(0, -1))) * inv2
        }),
        "laplace_shifted",
    )
}

/// Componentwise linear blend `I v(x)` inside the cell containing `x`.
///
/// Cells are half-open, so a point on a cell edge belongs to the cell on its
/// upper/right side.
pub fn interpolate_i(v: &VectorField, x: [f64; 2]) -> Result<[f64; 2]> {
    let g = v.grid;
    let l = g.spacing;
    let s = [x[0] / l - g.origin[0] as f64, x[1] / l - g.origin[1] as f64];
    if !(s[0].is_finite() && s[1].is_finite()) {
        return Err(Error::Domain("non-finite point".into()));
    }
    let ci = s[0].floor();
    let cj = s[1].floor();
    let y = [s[0] - ci, s[1] - cj];
    let (ci, cj) = (ci as isize, cj as isize);
    let fetch = |di: isize, dj: isize| {
        v.get(ci + di, cj + dj)
            .ok_or_else(|| Error::Domain(format!("point {x:?} outside the field extent")))
    };
    let c = fetch(0, 0)?;
    let right = if y[0] > 0.0 { fetch(1, 0)?[0] } else { c[0] };
    let up = if y[1] > 0.0 { fetch(0, 1)?[1] } else { c[1] };
    Ok([
        (1.0 - y[0]) * c[0] + y[0] * right,
        (1.0 - y[1]) * c[1] + y[1] * up,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open(n: usize) -> Grid {
        Grid::new(0.1, n, n, Boundary::Open).unwrap()
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(Grid::new(0.1, 1, 4, Boundary::Open).is_err());
        assert!(Grid::new(0.0, 4, 4, Boundary::Open).is_err());
        assert!(Grid::new(-1.0, 4, 4, Boundary::Periodic).is_err());
    }

    #[test]
    fn ramp_has_unit_slope() {
        let g = open(6);
        let l = g.spacing();
        let v = ScalarField::tabulate(g, |i, _| i as f64 * l).unwrap();
        let d = dpartial(&v, Axis::X).unwrap();
        assert_eq!(d.rect(), IndexRect::new(0, 5, 0, 6));
        for (_, x) in d.iter() {
            assert!((x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_has_zero_derivative() {
        let g = Grid::new(0.3, 5, 4, Boundary::Periodic).unwrap();
        let v = ScalarField::tabulate(g, |_, _| 2.5).unwrap();
        for axis in [Axis::X, Axis::Y] {
            assert!(dpartial(&v, axis).unwrap().values().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn square_ramp_difference() {
        let g = open(7);
        let l = g.spacing();
        let v = ScalarField::tabulate(g, |i, _| (i * i) as f64 * l * l).unwrap();
        let d = dpartial(&v, Axis::X).unwrap();
        for ((i, _), x) in d.iter() {
            let expect = (2 * i + 1) as f64 * l;
            assert!((x - expect).abs() < 1e-12, "{x} vs {expect}");
        }
    }

    #[test]
    fn affine_and_roof_gradients() {
        let g = open(8);
        let l = g.spacing();
        let v = ScalarField::tabulate(g, |i, j| (i + j) as f64 * l).unwrap();
        for (_, d) in grad_d(&v).unwrap().iter() {
            assert!((d[0] - 1.0).abs() < 1e-12 && (d[1] - 1.0).abs() < 1e-12);
        }
        let roof = ScalarField::tabulate(g, |_, j| (j as f64 - 4.0).abs() * l).unwrap();
        for ((_, j), d) in grad_d(&roof).unwrap().iter() {
            let expect = if j >= 4 { 1.0 } else { -1.0 };
            assert!((d[1] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn div_and_curl_of_linear_fields() {
        let g = open(5);
        let l = g.spacing();
        let radial = VectorField::tabulate(g, |i, j| [i as f64 * l, j as f64 * l]).unwrap();
        assert!(div_d(&radial).unwrap().values().iter().all(|x| (x - 2.0).abs() < 1e-12));
        let rot = VectorField::tabulate(g, |i, j| [-(j as f64) * l, i as f64 * l]).unwrap();
        assert!(curl_d(&rot).unwrap().values().iter().all(|x| (x - 2.0).abs() < 1e-12));
    }

    #[test]
    fn curl_of_gradient_is_bitwise_zero() {
        let g = Grid::new(0.25, 9, 7, Boundary::Periodic).unwrap();
        let phi = ScalarField::tabulate(g, |i, j| ((i * 7 + j * 3) % 11) as f64).unwrap();
        let c = curl_d(&grad_d(&phi).unwrap()).unwrap();
        assert!(c.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn shifted_laplacian_examples() {
        let g = open(9);
        let l = g.spacing();
        let q = ScalarField::tabulate(g, |i, j| ((i * i + j * j) as f64) * l * l / 2.0).unwrap();
        let lap = laplace_shifted(&q).unwrap();
        assert_eq!(lap.rect(), IndexRect::new(1, 8, 1, 8));
        assert!(lap.values().iter().all(|x| (x - 2.0).abs() < 1e-10));
        let h = ScalarField::tabulate(g, |i, j| (i * j) as f64 * l * l).unwrap();
        assert!(laplace_shifted(&h).unwrap().values().iter().all(|x| x.abs() < 1e-10));
        let a = ScalarField::tabulate(g, |i, j| 3.0 * i as f64 - j as f64).unwrap();
        assert!(laplace_shifted(&a).unwrap().values().iter().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn interpolation_examples() {
        let g = open(6);
        let l = g.spacing();
        let v = VectorField::tabulate(g, |i, j| [i as f64 * l, (i + 2 * j) as f64]).unwrap();
        let at_corner = interpolate_i(&v, [2.0 * l, 3.0 * l]).unwrap();
        assert_eq!(at_corner, v.get(2, 3).unwrap());
        let centre = interpolate_i(&v, [2.5 * l, 3.5 * l]).unwrap();
        assert!((centre[0] - (2.0 * l + l / 2.0)).abs() < 1e-12);
        let c = VectorField::tabulate(g, |_, _| [0.3, -0.7]).unwrap();
        let got = interpolate_i(&c, [0.123, 0.377]).unwrap();
        assert!((got[0] - 0.3).abs() < 1e-15 && (got[1] + 0.7).abs() < 1e-15);
        assert!(interpolate_i(&v, [-0.01, 0.2]).is_err());
        assert!(interpolate_i(&v, [5.5 * l, 0.2]).is_err());
    }

    #[test]
    fn periodic_interpolation_wraps() {
        let g = Grid::new(0.5, 4, 4, Boundary::Periodic).unwrap();
        let v = VectorField::tabulate(g, |i, _| [i as f64, 0.0]).unwrap();
        let got = interpolate_i(&v, [3.5 * 0.5, 0.0]).unwrap();
        assert!((got[0] - 1.5).abs() < 1e-15);
        assert!(interpolate_i(&v, [-0.25, 0.0]).is_ok());
    }

    #[test]
    fn cross_grid_rejected() {
        let a = ScalarField::tabulate(open(4), |_, _| 1.0).unwrap();
        let b = ScalarField::tabulate(open(5), |_, _| 1.0).unwrap();
        assert_eq!(a.combine(1.0, &b, 1.0), Err(Error::GridMismatch));
    }

    #[test]
    fn non_finite_rejected() {
        let g = open(3);
        let mut vals = vec![0.0; 9];
        vals[4] = f64::NAN;
        assert!(matches!(ScalarField::from_values(g, vals), Err(Error::InvalidField(_))));
    }
}
