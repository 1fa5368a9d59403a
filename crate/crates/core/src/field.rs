//! D-dimensional grid fields and tensor-product spline evaluation.
//!
//! A point is located by [`grid_coordinates`] (cell index plus fraction per
//! axis), the per-axis basis values `gamma[j][i] = beta[i](frac_j)` are
//! computed once, and the `q^D` node values around the cell are accumulated
//! in one row-major pass:
//!
//! ```text
//! f_hat = sum_{i_1..i_D} f(cell + i) * gamma[0][i_1] * ... * gamma[D-1][i_D]
//! ```
//!
//! Node values are read straight from the field storage through per-axis
//! offset tables, so periodic wrapping costs one `rem_euclid` per axis and
//! node, not per term.

use smallvec::SmallVec;

use crate::basis::{AlphaFamily, BetaFamily, Limits, SplineKind};
use crate::error::{Error, Result};

/// Per-axis scratch sized for three axes at `q = 12` without spilling.
type AxisBuf<T> = SmallVec<[T; 36]>;
type IndexBuf = SmallVec<[usize; 8]>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Indices wrap modulo the extent of each axis.
    #[default]
    Periodic,
    /// Any stencil node outside the grid is an error.
    Strict,
}

/// Scalar samples on the nodes `(k_1 h_1, ..., k_D h_D)`, row-major with the
/// last axis contiguous.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    dims: Vec<usize>,
    h: Vec<f64>,
    data: Vec<f64>,
    boundary: Boundary,
    strides: Vec<usize>,
}

impl GridField {
    pub fn new(dims: Vec<usize>, h: Vec<f64>, data: Vec<f64>, boundary: Boundary) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidField("a field needs at least one axis".into()));
        }
        if dims.len() != h.len() {
            return Err(Error::InvalidField(format!(
                "{} extents but {} grid constants",
                dims.len(),
                h.len()
            )));
        }
        if let Some(bad) = h.iter().find(|&&v| !(v.is_finite() && v > 0.0)) {
            return Err(Error::InvalidField(format!("grid constant {bad} is not positive")));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidField("zero-length axis".into()));
        }
        let expected = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidField("field size overflows".into()))?;
        if data.len() != expected {
            return Err(Error::InvalidField(format!(
                "expected {expected} samples, got {}",
                data.len()
            )));
        }
        let mut strides = vec![1; dims.len()];
        for j in (0..dims.len() - 1).rev() {
            strides[j] = strides[j + 1] * dims[j + 1];
        }
        Ok(Self {
            dims,
            h,
            data,
            boundary,
            strides,
        })
    }

    /// Samples `f` at every node position.
    pub fn from_fn(
        dims: Vec<usize>,
        h: Vec<f64>,
        boundary: Boundary,
        mut f: impl FnMut(&[f64]) -> f64,
    ) -> Result<Self> {
        let total: usize = dims.iter().product();
        let mut data = Vec::with_capacity(total);
        let mut idx = vec![0usize; dims.len()];
        let mut pos = vec![0.0; dims.len()];
        for _ in 0..total {
            for j in 0..dims.len() {
                pos[j] = idx[j] as f64 * h[j];
            }
            data.push(f(&pos));
            for j in (0..dims.len()).rev() {
                idx[j] += 1;
                if idx[j] < dims[j] {
                    break;
                }
                idx[j] = 0;
            }
        }
        Self::new(dims, h, data, boundary)
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Value at an in-range node index.
    pub fn value(&self, index: &[usize]) -> f64 {
        let off: usize = index.iter().zip(&self.strides).map(|(i, s)| i * s).sum();
        self.data[off]
    }

    pub fn grid_coordinates(&self, point: &[f64]) -> Result<CellCoordinates> {
        if point.len() != self.ndim() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, field has {} axes",
                point.len(),
                self.ndim()
            )));
        }
        grid_coordinates(point, &self.h)
    }

    /// Storage index of node `first + t` along `axis`, for `t` in `0..count`.
    fn axis_nodes(&self, axis: usize, first: i64, count: usize, out: &mut AxisBuf<usize>) -> Result<()> {
        let extent = self.dims[axis] as i64;
        let last = first + count as i64 - 1;
        let stride = self.strides[axis];
        match self.boundary {
            Boundary::Periodic => {
                for t in 0..count as i64 {
                    out.push((first + t).rem_euclid(extent) as usize * stride);
                }
            }
            Boundary::Strict => {
                if first < 0 || last >= extent {
                    return Err(Error::OutOfDomain {
                        axis,
                        first,
                        last,
                        extent: self.dims[axis],
                    });
                }
                for t in 0..count as i64 {
                    out.push((first + t) as usize * stride);
                }
            }
        }
        Ok(())
    }

    /// Copies the `(2g + 2)^D` node values around `cell` into a patch whose
    /// offset `(0, ..., 0)` is the cell's lower corner.
    pub fn gather_local(&self, cell: &[i64], g: usize) -> Result<LocalPatch> {
        if cell.len() != self.ndim() {
            return Err(Error::DimensionMismatch(format!(
                "cell has {} indices, field has {} axes",
                cell.len(),
                self.ndim()
            )));
        }
        let q = 2 * g + 2;
        let mut offsets = AxisBuf::new();
        for (axis, &c) in cell.iter().enumerate() {
            self.axis_nodes(axis, c - g as i64, q, &mut offsets)?;
        }
        let ndim = self.ndim();
        let total = q.pow(ndim as u32);
        let mut values = Vec::with_capacity(total);
        let mut idx: IndexBuf = smallvec::smallvec![0; ndim];
        for _ in 0..total {
            let off: usize = (0..ndim).map(|j| offsets[j * q + idx[j]]).sum();
            values.push(self.data[off]);
            for j in (0..ndim).rev() {
                idx[j] += 1;
                if idx[j] < q {
                    break;
                }
                idx[j] = 0;
            }
        }
        Ok(LocalPatch { q, ndim, values })
    }
}

/// Location of a point relative to the grid: `x_j = (cell_j + frac_j) h_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellCoordinates {
    pub cell: Vec<i64>,
    pub frac: Vec<f64>,
}

/// Splits each coordinate into `floor(x_j / h_j)` and the remaining fraction
/// in `[0, 1)`. A fraction that rounds up to 1 moves to the next cell.
pub fn grid_coordinates(point: &[f64], h: &[f64]) -> Result<CellCoordinates> {
    if point.len() != h.len() {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates, grid has {} axes",
            point.len(),
            h.len()
        )));
    }
    let mut cell = Vec::with_capacity(point.len());
    let mut frac = Vec::with_capacity(point.len());
    for (&x, &hj) in point.iter().zip(h) {
        let (c, f) = split_coordinate(x, hj)?;
        cell.push(c);
        frac.push(f);
    }
    Ok(CellCoordinates { cell, frac })
}

#[inline]
fn split_coordinate(x: f64, h: f64) -> Result<(i64, f64)> {
    let scaled = x / h;
    if !scaled.is_finite() || scaled.abs() >= i64::MAX as f64 {
        return Err(Error::InvalidPoint(format!("coordinate {x} cannot be located on the grid")));
    }
    let floor = scaled.floor();
    let frac = scaled - floor;
    if frac >= 1.0 {
        Ok((floor as i64 + 1, 0.0))
    } else {
        Ok((floor as i64, frac))
    }
}

/// Node values around one cell, row-major over offsets `-g ..= g + 1` per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalPatch {
    q: usize,
    ndim: usize,
    values: Vec<f64>,
}

impl LocalPatch {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn ndim(&self) -> usize {
        self.ndim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at node offsets relative to the cell's lower corner.
    pub fn value(&self, offsets: &[i64]) -> Option<f64> {
        let g = (self.q as i64 - 2) / 2;
        let mut flat = 0usize;
        for &o in offsets {
            let i = o + g;
            if i < 0 || i >= self.q as i64 {
                return None;
            }
            flat = flat * self.q + i as usize;
        }
        (offsets.len() == self.ndim).then(|| self.values[flat])
    }
}

/// Accumulation kernel selection. Both paths perform the same floating-point
/// operations in the same order, so their results are bitwise identical.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KernelPath {
    /// Unrolled `q = 4` kernel for one to three axes, generic otherwise.
    #[default]
    Auto,
    Generic,
}

/// Sums `data[sum_j offsets[j][i_j]] * prod_j weights[j][i_j]` over
/// `i_j in ranges[j]`, last axis innermost. The weight product is formed left
/// to right.
fn accumulate_generic(
    data: &[f64],
    q: usize,
    offsets: &[usize],
    weights: &[f64],
    ranges: &[(usize, usize)],
) -> f64 {
    let ndim = ranges.len();
    if ranges.iter().any(|&(lo, hi)| lo >= hi) {
        return 0.0;
    }
    let mut idx: IndexBuf = ranges.iter().map(|r| r.0).collect();
    let mut acc = 0.0;
    loop {
        let mut w = weights[idx[0]];
        let mut off = offsets[idx[0]];
        for j in 1..ndim {
            w *= weights[j * q + idx[j]];
            off += offsets[j * q + idx[j]];
        }
        acc += data[off] * w;

        let mut j = ndim;
        loop {
            if j == 0 {
                return acc;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < ranges[j].1 {
                break;
            }
            idx[j] = ranges[j].0;
        }
    }
}

#[inline(always)]
fn row4(data: &[f64], base: usize, w: f64, o: &[usize], g: &[f64], acc: &mut f64) {
    *acc += data[base + o[0]] * (w * g[0]);
    *acc += data[base + o[1]] * (w * g[1]);
    *acc += data[base + o[2]] * (w * g[2]);
    *acc += data[base + o[3]] * (w * g[3]);
}

/// Unrolled `q = 4` kernel; `None` when the dimension is not covered.
fn accumulate_q4(data: &[f64], ndim: usize, offsets: &[usize], weights: &[f64]) -> Option<f64> {
    let mut acc = 0.0;
    match ndim {
        1 => {
            acc += data[offsets[0]] * weights[0];
            acc += data[offsets[1]] * weights[1];
            acc += data[offsets[2]] * weights[2];
            acc += data[offsets[3]] * weights[3];
        }
        2 => {
            let (o0, o1) = (&offsets[0..4], &offsets[4..8]);
            let (g0, g1) = (&weights[0..4], &weights[4..8]);
            for a in 0..4 {
                row4(data, o0[a], g0[a], o1, g1, &mut acc);
            }
        }
        3 => {
            let (o0, o1, o2) = (&offsets[0..4], &offsets[4..8], &offsets[8..12]);
            let (g0, g1, g2) = (&weights[0..4], &weights[4..8], &weights[8..12]);
            for a in 0..4 {
                for b in 0..4 {
                    row4(data, o0[a] + o1[b], g0[a] * g1[b], o2, g2, &mut acc);
                }
            }
        }
        _ => return None,
    }
    Some(acc)
}

/// Grid-spline evaluator for one kind `(n, q)`.
#[derive(Clone, Debug)]
pub struct GridSpline {
    family: BetaFamily,
}

struct Prepared {
    offsets: AxisBuf<usize>,
    weights: AxisBuf<f64>,
    scale: f64,
}

impl GridSpline {
    pub fn new(kind: SplineKind) -> Result<Self> {
        Ok(Self {
            family: BetaFamily::derive(kind)?,
        })
    }

    pub fn from_family(family: BetaFamily) -> Self {
        Self { family }
    }

    pub fn family(&self) -> &BetaFamily {
        &self.family
    }

    pub fn kind(&self) -> SplineKind {
        self.family.kind()
    }

    pub fn q(&self) -> usize {
        self.family.q()
    }

    fn prepare(&self, field: &GridField, cell: &[i64], frac: &[f64], orders: &[usize]) -> Result<Prepared> {
        let ndim = field.ndim();
        if cell.len() != ndim || frac.len() != ndim || orders.len() != ndim {
            return Err(Error::DimensionMismatch(format!(
                "field has {ndim} axes, got {} cell indices, {} fractions, {} derivative orders",
                cell.len(),
                frac.len(),
                orders.len()
            )));
        }
        let q = self.q();
        let g = self.family.g() as i64;
        let mut offsets = AxisBuf::new();
        let mut weights: AxisBuf<f64> = smallvec::smallvec![0.0; ndim * q];
        let mut scale = 1.0;
        for j in 0..ndim {
            field.axis_nodes(j, cell[j] - g, q, &mut offsets)?;
            self.family
                .eval_into(orders[j], frac[j], &mut weights[j * q..(j + 1) * q])?;
            if orders[j] > 0 {
                scale *= field.h[j].powi(-(orders[j] as i32));
            }
        }
        Ok(Prepared {
            offsets,
            weights,
            scale,
        })
    }

    fn accumulate(&self, field: &GridField, prep: &Prepared, path: KernelPath) -> f64 {
        let q = self.q();
        let ndim = field.ndim();
        let specialized = match path {
            KernelPath::Auto if q == 4 => accumulate_q4(&field.data, ndim, &prep.offsets, &prep.weights),
            _ => None,
        };
        specialized.unwrap_or_else(|| {
            let ranges: SmallVec<[(usize, usize); 8]> = smallvec::smallvec![(0, q); ndim];
            accumulate_generic(&field.data, q, &prep.offsets, &prep.weights, &ranges)
        })
    }

    pub fn evaluate(&self, field: &GridField, point: &[f64]) -> Result<f64> {
        self.evaluate_with(field, point, KernelPath::Auto)
    }

    pub fn evaluate_with(&self, field: &GridField, point: &[f64], path: KernelPath) -> Result<f64> {
        let coords = field.grid_coordinates(point)?;
        let orders: IndexBuf = smallvec::smallvec![0; field.ndim()];
        let prep = self.prepare(field, &coords.cell, &coords.frac, &orders)?;
        Ok(self.accumulate(field, &prep, path))
    }

    /// Mixed partial derivative `prod_j (d/dx_j)^orders[j]` in physical units.
    pub fn evaluate_derivative(&self, field: &GridField, point: &[f64], orders: &[usize]) -> Result<f64> {
        let coords = field.grid_coordinates(point)?;
        self.evaluate_in_cell(field, &coords.cell, &coords.frac, orders)
    }

    /// Evaluates the piece belonging to `cell` at `frac`. `frac` may be any
    /// value, including 1, which gives the left-hand limit at the next node.
    pub fn evaluate_in_cell(&self, field: &GridField, cell: &[i64], frac: &[f64], orders: &[usize]) -> Result<f64> {
        let prep = self.prepare(field, cell, frac, orders)?;
        Ok(self.accumulate(field, &prep, KernelPath::Auto) * prep.scale)
    }

    /// Spline formula on an already gathered patch.
    pub fn evaluate_patch(&self, patch: &LocalPatch, frac: &[f64]) -> Result<f64> {
        let q = self.q();
        if patch.q != q || frac.len() != patch.ndim {
            return Err(Error::DimensionMismatch(format!(
                "patch is {}^{} for a q = {q} spline with {} fractions",
                patch.q,
                patch.ndim,
                frac.len()
            )));
        }
        let ndim = patch.ndim;
        let mut offsets = AxisBuf::new();
        let mut weights: AxisBuf<f64> = smallvec::smallvec![0.0; ndim * q];
        for j in 0..ndim {
            let stride = q.pow((ndim - 1 - j) as u32);
            offsets.extend((0..q).map(|i| i * stride));
            self.family.eval_into(0, frac[j], &mut weights[j * q..(j + 1) * q])?;
        }
        let ranges: SmallVec<[(usize, usize); 8]> = smallvec::smallvec![(0, q); ndim];
        Ok(accumulate_generic(&patch.values, q, &offsets, &weights, &ranges))
    }

    /// Splits the stencil sum along `split_axis` into terms whose (unwrapped)
    /// node index is below `split_index` and the rest. The two parts add up
    /// to [`GridSpline::evaluate`].
    pub fn partitioned_evaluate(
        &self,
        field: &GridField,
        point: &[f64],
        split_axis: usize,
        split_index: i64,
    ) -> Result<(f64, f64)> {
        let ndim = field.ndim();
        if split_axis >= ndim {
            return Err(Error::DimensionMismatch(format!(
                "split axis {split_axis} out of range for {ndim} axes"
            )));
        }
        let coords = field.grid_coordinates(point)?;
        let orders: IndexBuf = smallvec::smallvec![0; ndim];
        let prep = self.prepare(field, &coords.cell, &coords.frac, &orders)?;
        let q = self.q();
        let first = coords.cell[split_axis] - self.family.g() as i64;
        let cut = (split_index - first).clamp(0, q as i64) as usize;
        let mut ranges: SmallVec<[(usize, usize); 8]> = smallvec::smallvec![(0, q); ndim];
        ranges[split_axis] = (0, cut);
        let low = accumulate_generic(&field.data, q, &prep.offsets, &prep.weights, &ranges);
        ranges[split_axis] = (cut, q);
        let high = accumulate_generic(&field.data, q, &prep.offsets, &prep.weights, &ranges);
        Ok((low, high))
    }
}

/// Derives the basis for `kind` and evaluates once.
pub fn evaluate(field: &GridField, point: &[f64], kind: SplineKind) -> Result<f64> {
    GridSpline::new(kind)?.evaluate(field, point)
}

pub fn evaluate_derivative(field: &GridField, point: &[f64], kind: SplineKind, orders: &[usize]) -> Result<f64> {
    GridSpline::new(kind)?.evaluate_derivative(field, point, orders)
}

pub fn partitioned_evaluate(
    field: &GridField,
    point: &[f64],
    kind: SplineKind,
    split_axis: usize,
    split_index: i64,
) -> Result<(f64, f64)> {
    GridSpline::new(kind)?.partitioned_evaluate(field, point, split_axis, split_index)
}

/// Tensor-product Hermite spline on the unit cell `[0, 1]^D`.
#[derive(Clone, Debug)]
pub struct HermiteSpline {
    alpha: AlphaFamily,
}

impl HermiteSpline {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_limits(n, &Limits::default())
    }

    pub fn with_limits(n: usize, limits: &Limits) -> Result<Self> {
        Ok(Self {
            alpha: AlphaFamily::derive_with_limits(n, limits)?,
        })
    }

    pub fn alpha(&self) -> &AlphaFamily {
        &self.alpha
    }

    /// Evaluates `sum_l sum_corner provider(corner, l) prod_j alpha[corner_j][l_j](x_j)`.
    ///
    /// `provider(corner, orders)` must return the mixed derivative
    /// `prod_j (d/dx_j)^orders[j] f` at the corner with coordinates in
    /// `{0, 1}`, in unit-cell units. It is called exactly `2^D (m + 1)^D`
    /// times.
    pub fn evaluate(&self, mut provider: impl FnMut(&[usize], &[usize]) -> f64, point: &[f64]) -> f64 {
        let ndim = point.len();
        let m = self.alpha.m();
        let per_axis = 2 * (m + 1);
        // basis[j][node * (m + 1) + l] = alpha[node][l](x_j)
        let basis: Vec<f64> = point
            .iter()
            .flat_map(|&x| {
                (0..2).flat_map(move |node| (0..=m).map(move |l| (node, l, x)))
            })
            .map(|(node, l, x)| self.alpha.eval(node, l, x))
            .collect();
        let mut corner: IndexBuf = smallvec::smallvec![0; ndim];
        let mut orders: IndexBuf = smallvec::smallvec![0; ndim];
        let mut acc = 0.0;
        let total = per_axis.pow(ndim as u32);
        // Odometer over (corner_j, l_j) pairs, axis by axis.
        let mut digit: IndexBuf = smallvec::smallvec![0; ndim];
        for _ in 0..total {
            let mut w = 1.0;
            for j in 0..ndim {
                corner[j] = digit[j] / (m + 1);
                orders[j] = digit[j] % (m + 1);
                w *= basis[j * per_axis + digit[j]];
            }
            acc += provider(&corner, &orders) * w;
            for j in (0..ndim).rev() {
                digit[j] += 1;
                if digit[j] < per_axis {
                    break;
                }
                digit[j] = 0;
            }
        }
        acc
    }
}

pub fn evaluate_hermite(provider: impl FnMut(&[usize], &[usize]) -> f64, point: &[f64], n: usize) -> Result<f64> {
    Ok(HermiteSpline::new(n)?.evaluate(provider, point))
}
