//! Finite metric spaces: point storage, built-in metrics, precomputed
//! distance matrices and the Hausdorff distance.
//!
//! A [`PointCloud`] is an immutable N-by-D coordinate table with optional
//! named attribute columns. A [`Metric`] evaluates distances either from
//! coordinates (euclidean, manhattan, chebyshev) or from a validated
//! precomputed matrix. Balls are closed throughout the crate: a point `x`
//! is covered by a center `c` at radius `eps` iff `d(x, c) <= eps`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::scalar::Scalar;

/// Absolute tolerance for the symmetry check on precomputed matrices.
pub const MATRIX_SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("point cloud must contain at least one point")]
    EmptyCloud,
    #[error("row {row} has {found} coordinates, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("non-finite coordinate at row {row}, column {col}")]
    NonFiniteCoordinate { row: usize, col: usize },
    #[error("attribute `{name}` has length {found}, expected {expected}")]
    AttributeLength {
        name: String,
        found: usize,
        expected: usize,
    },
    #[error("non-finite value in attribute `{name}` at row {row}")]
    NonFiniteAttribute { name: String, row: usize },
    #[error("point index {index} out of range for cloud of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("coordinate dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("point cloud carries ids only; this operation requires coordinates")]
    NoCoordinates,
    #[error("precomputed metric cannot be evaluated on raw coordinates")]
    PrecomputedOnCoordinates,
    #[error("hausdorff distance is undefined for a precomputed metric over two clouds")]
    HausdorffPrecomputed,
    #[error("distance matrix covers {expected} points but the cloud has {found}")]
    MatrixSizeMismatch { expected: usize, found: usize },
    #[error("distance matrix is not square: row {row} has {cols} columns, expected {expected}")]
    MatrixNotSquare {
        row: usize,
        cols: usize,
        expected: usize,
    },
    #[error("distance matrix is asymmetric at ({i},{j}): {a} vs {b}")]
    MatrixAsymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("distance matrix has nonzero diagonal at ({i},{i}): {value}")]
    MatrixNonzeroDiagonal { i: usize, value: f64 },
    #[error("distance matrix has negative entry at ({i},{j}): {value}")]
    MatrixNegativeEntry { i: usize, j: usize, value: f64 },
    #[error("distance matrix has non-finite entry at ({i},{j})")]
    MatrixNonFinite { i: usize, j: usize },
}

/// Immutable point cloud: `n` points in `dim` coordinates plus optional
/// named attribute columns of length `n`.
///
/// Point ids are the 0-based row indices. A cloud built from a distance
/// matrix carries ids only (`dim() == 0`); coordinate-requiring operations
/// reject it with [`MetricError::NoCoordinates`].
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    coords: Vec<T>, // row-major, n * dim entries
    n: usize,
    dim: usize,
    attributes: BTreeMap<String, Vec<T>>,
}

impl<T: Scalar> PointCloud<T> {
    /// Builds a cloud from coordinate rows. All rows must have the same
    /// nonzero length and every entry must be finite.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, MetricError> {
        if rows.is_empty() {
            return Err(MetricError::EmptyCloud);
        }
        let dim = rows[0].len();
        if dim == 0 {
            return Err(MetricError::RaggedRow {
                row: 0,
                found: 0,
                expected: 1,
            });
        }
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(MetricError::RaggedRow {
                    row,
                    found: r.len(),
                    expected: dim,
                });
            }
            for (col, &v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(MetricError::NonFiniteCoordinate { row, col });
                }
                coords.push(v);
            }
        }
        Ok(Self {
            coords,
            n: rows.len(),
            dim,
            attributes: BTreeMap::new(),
        })
    }

    /// Builds a cloud from a flat row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<T>) -> Result<Self, MetricError> {
        if dim == 0 || coords.is_empty() {
            return Err(MetricError::EmptyCloud);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(MetricError::RaggedRow {
                row: coords.len() / dim,
                found: coords.len() % dim,
                expected: dim,
            });
        }
        for (k, &v) in coords.iter().enumerate() {
            if !v.is_finite() {
                return Err(MetricError::NonFiniteCoordinate {
                    row: k / dim,
                    col: k % dim,
                });
            }
        }
        Ok(Self {
            n: coords.len() / dim,
            coords,
            dim,
            attributes: BTreeMap::new(),
        })
    }

    /// A cloud of `n` points without coordinates, identified only by index.
    /// Used together with [`Metric::Precomputed`].
    pub fn ids_only(n: usize) -> Result<Self, MetricError> {
        if n == 0 {
            return Err(MetricError::EmptyCloud);
        }
        Ok(Self {
            coords: Vec::new(),
            n,
            dim: 0,
            attributes: BTreeMap::new(),
        })
    }

    /// Attaches a named attribute column; the column length must equal the
    /// number of points and every value must be finite.
    pub fn with_attribute(
        mut self,
        name: impl Into<String>,
        values: Vec<T>,
    ) -> Result<Self, MetricError> {
        let name = name.into();
        if values.len() != self.n {
            return Err(MetricError::AttributeLength {
                name,
                found: values.len(),
                expected: self.n,
            });
        }
        if let Some(row) = values.iter().position(|v| !v.is_finite()) {
            return Err(MetricError::NonFiniteAttribute { name, row });
        }
        self.attributes.insert(name, values);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_coords(&self) -> bool {
        self.dim > 0
    }

    /// Coordinate row of point `i`. Empty slice for an ids-only cloud.
    pub fn row(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn attribute(&self, name: &str) -> Option<&[T]> {
        self.attributes.get(name).map(|v| v.as_slice())
    }

    pub fn attribute_names(&self) -> impl Iterator<Item = &str> {
        self.attributes.keys().map(|s| s.as_str())
    }

    fn check_index(&self, index: usize) -> Result<(), MetricError> {
        if index >= self.n {
            return Err(MetricError::IndexOutOfRange {
                index,
                len: self.n,
            });
        }
        Ok(())
    }
}

/// Validated symmetric distance matrix with zero diagonal and nonnegative
/// entries. Off-diagonal pairs may differ by at most
/// [`MATRIX_SYMMETRY_TOLERANCE`] on input; the upper-triangle entry is
/// mirrored so lookups are exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<T> {
    n: usize,
    entries: Vec<T>, // row-major, n * n
}

impl<T: Scalar> DistanceMatrix<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self, MetricError> {
        let n = rows.len();
        if n == 0 {
            return Err(MetricError::EmptyCloud);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::MatrixNotSquare {
                    row,
                    cols: r.len(),
                    expected: n,
                });
            }
        }
        let tol = T::from_f64(MATRIX_SYMMETRY_TOLERANCE).unwrap_or_else(T::zero);
        let mut entries = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let v = rows[i][j];
                if !v.is_finite() {
                    return Err(MetricError::MatrixNonFinite { i, j });
                }
                if i == j && v != T::zero() {
                    return Err(MetricError::MatrixNonzeroDiagonal {
                        i,
                        value: v.as_f64(),
                    });
                }
                if v < T::zero() {
                    return Err(MetricError::MatrixNegativeEntry {
                        i,
                        j,
                        value: v.as_f64(),
                    });
                }
                if j > i {
                    let w = rows[j][i];
                    if (v - w).abs() > tol {
                        return Err(MetricError::MatrixAsymmetric {
                            i,
                            j,
                            a: v.as_f64(),
                            b: w.as_f64(),
                        });
                    }
                    entries[i * n + j] = v;
                    entries[j * n + i] = v;
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.n + j]
    }
}

/// Distance function over a [`PointCloud`].
#[derive(Debug, Clone, PartialEq)]
pub enum Metric<T> {
    Euclidean,
    Manhattan,
    Chebyshev,
    Precomputed(DistanceMatrix<T>),
}

#[inline]
fn euclidean<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        acc = acc + d * d;
    }
    acc.sqrt()
}

#[inline]
fn manhattan<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc = acc + (x - y).abs();
    }
    acc
}

#[inline]
fn chebyshev<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc = acc.max((x - y).abs());
    }
    acc
}

impl<T: Scalar> Metric<T> {
    /// Stable lowercase name used in exports and CLI flags.
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Manhattan => "manhattan",
            Metric::Chebyshev => "chebyshev",
            Metric::Precomputed(_) => "precomputed",
        }
    }

    /// Distance between points `i` and `j` of `cloud`.
    pub fn distance(&self, cloud: &PointCloud<T>, i: usize, j: usize) -> Result<T, MetricError> {
        cloud.check_index(i)?;
        cloud.check_index(j)?;
        let eval = self.evaluator(cloud)?;
        Ok(eval.d(i, j))
    }

    /// Distance between two raw coordinate vectors. Rejected for
    /// [`Metric::Precomputed`], which is only defined on indices.
    pub fn distance_coords(&self, a: &[T], b: &[T]) -> Result<T, MetricError> {
        if a.len() != b.len() {
            return Err(MetricError::DimensionMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        match self {
            Metric::Euclidean => Ok(euclidean(a, b)),
            Metric::Manhattan => Ok(manhattan(a, b)),
            Metric::Chebyshev => Ok(chebyshev(a, b)),
            Metric::Precomputed(_) => Err(MetricError::PrecomputedOnCoordinates),
        }
    }

    /// Validates the metric/cloud pairing once and returns a cheap indexed
    /// distance evaluator for inner loops.
    pub fn evaluator<'a>(
        &'a self,
        cloud: &'a PointCloud<T>,
    ) -> Result<DistanceEval<'a, T>, MetricError> {
        match self {
            Metric::Precomputed(m) => {
                if m.len() != cloud.len() {
                    return Err(MetricError::MatrixSizeMismatch {
                        expected: m.len(),
                        found: cloud.len(),
                    });
                }
            }
            _ => {
                if !cloud.has_coords() {
                    return Err(MetricError::NoCoordinates);
                }
            }
        }
        Ok(DistanceEval {
            metric: self,
            cloud,
        })
    }
}

/// Indexed distance evaluator bound to one metric/cloud pair.
#[derive(Clone, Copy)]
pub struct DistanceEval<'a, T> {
    metric: &'a Metric<T>,
    cloud: &'a PointCloud<T>,
}

impl<'a, T: Scalar> DistanceEval<'a, T> {
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> T {
        match self.metric {
            Metric::Euclidean => euclidean(self.cloud.row(i), self.cloud.row(j)),
            Metric::Manhattan => manhattan(self.cloud.row(i), self.cloud.row(j)),
            Metric::Chebyshev => chebyshev(self.cloud.row(i), self.cloud.row(j)),
            Metric::Precomputed(m) => m.get(i, j),
        }
    }

    pub fn len(&self) -> usize {
        self.cloud.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }
}

/// Hausdorff distance between two clouds under a coordinate metric:
/// `max { sup_x inf_y d(x,y), sup_y inf_x d(x,y) }`.
pub fn hausdorff_distance<T: Scalar>(
    x: &PointCloud<T>,
    y: &PointCloud<T>,
    metric: &Metric<T>,
) -> Result<T, MetricError> {
    if matches!(metric, Metric::Precomputed(_)) {
        return Err(MetricError::HausdorffPrecomputed);
    }
    if !x.has_coords() || !y.has_coords() {
        return Err(MetricError::NoCoordinates);
    }
    if x.dim() != y.dim() {
        return Err(MetricError::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    let directed = |from: &PointCloud<T>, to: &PointCloud<T>| -> T {
        (0..from.len())
            .into_par_iter()
            .map(|i| {
                let mut best = T::infinity();
                for j in 0..to.len() {
                    let d = match metric {
                        Metric::Euclidean => euclidean(from.row(i), to.row(j)),
                        Metric::Manhattan => manhattan(from.row(i), to.row(j)),
                        Metric::Chebyshev => chebyshev(from.row(i), to.row(j)),
                        Metric::Precomputed(_) => unreachable!(),
                    };
                    if d < best {
                        best = d;
                    }
                }
                best
            })
            .reduce(T::zero, T::max)
    };
    Ok(directed(x, y).max(directed(y, x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cloud1d(xs: &[f64]) -> PointCloud<f64> {
        PointCloud::from_rows(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    #[test]
    fn euclidean_pythagorean_triple() {
        let m = Metric::Euclidean;
        assert_eq!(m.distance_coords(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
    }

    #[test]
    fn identity_distance_is_zero() {
        let c = PointCloud::from_rows(vec![vec![1.5, -2.0], vec![0.0, 0.0]]).unwrap();
        for m in [Metric::Euclidean, Metric::Manhattan, Metric::Chebyshev] {
            assert_eq!(m.distance(&c, 0, 0).unwrap(), 0.0);
        }
    }

    #[test]
    fn manhattan_coordinate_sum() {
        let m = Metric::Manhattan;
        assert_eq!(m.distance_coords(&[0.0, 0.0], &[1.0, 2.0]).unwrap(), 3.0);
    }

    #[test]
    fn chebyshev_max_coordinate() {
        let m = Metric::Chebyshev;
        assert_eq!(m.distance_coords(&[0.0, 0.0], &[1.0, -2.0]).unwrap(), 2.0);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let m = Metric::<f64>::Euclidean;
        assert!(matches!(
            m.distance_coords(&[0.0], &[0.0, 1.0]),
            Err(MetricError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn index_out_of_range_rejected() {
        let c = cloud1d(&[0.0, 1.0]);
        assert!(matches!(
            Metric::Euclidean.distance(&c, 0, 2),
            Err(MetricError::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn precomputed_rejects_raw_coordinates() {
        let m = Metric::Precomputed(
            DistanceMatrix::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        );
        assert!(matches!(
            m.distance_coords(&[0.0], &[1.0]),
            Err(MetricError::PrecomputedOnCoordinates)
        ));
    }

    #[test]
    fn precomputed_lookup_and_size_check() {
        let m = Metric::Precomputed(
            DistanceMatrix::new(vec![vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap(),
        );
        let ids = PointCloud::<f64>::ids_only(2).unwrap();
        assert_eq!(m.distance(&ids, 0, 1).unwrap(), 2.0);
        let wrong = PointCloud::<f64>::ids_only(3).unwrap();
        assert!(matches!(
            m.distance(&wrong, 0, 1),
            Err(MetricError::MatrixSizeMismatch { .. })
        ));
    }

    #[test]
    fn matrix_validation_errors() {
        assert!(matches!(
            DistanceMatrix::new(vec![vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(MetricError::MatrixAsymmetric { .. })
        ));
        assert!(matches!(
            DistanceMatrix::new(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]),
            Err(MetricError::MatrixNegativeEntry { .. })
        ));
        assert!(matches!(
            DistanceMatrix::new(vec![vec![1.0, 1.0], vec![1.0, 0.0]]),
            Err(MetricError::MatrixNonzeroDiagonal { .. })
        ));
        assert!(matches!(
            DistanceMatrix::new(vec![vec![0.0, 1.0]]),
            Err(MetricError::MatrixNotSquare { .. })
        ));
    }

    #[test]
    fn matrix_symmetrized_within_tolerance() {
        let a = 1.0;
        let b = 1.0 + 4e-13;
        let m = DistanceMatrix::new(vec![vec![0.0, a], vec![b, 0.0]]).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
    }

    #[test]
    fn hausdorff_trivial_cases() {
        let x = cloud1d(&[0.0, 1.0, 2.0]);
        assert_eq!(hausdorff_distance(&x, &x, &Metric::Euclidean).unwrap(), 0.0);
        let a = cloud1d(&[0.0]);
        let b = cloud1d(&[3.0]);
        assert_eq!(hausdorff_distance(&a, &b, &Metric::Euclidean).unwrap(), 3.0);
    }

    #[test]
    fn hausdorff_asymmetric_support() {
        // sup over {0,10} of nearest in {0} is 10; brute force over all pairs.
        let a = cloud1d(&[0.0, 10.0]);
        let b = cloud1d(&[0.0]);
        assert_eq!(
            hausdorff_distance(&a, &b, &Metric::Euclidean).unwrap(),
            10.0
        );
    }

    #[test]
    fn hausdorff_rejects_precomputed() {
        let m = Metric::Precomputed(
            DistanceMatrix::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        );
        let a = cloud1d(&[0.0]);
        assert!(matches!(
            hausdorff_distance(&a, &a, &m),
            Err(MetricError::HausdorffPrecomputed)
        ));
    }

    #[test]
    fn attribute_validation() {
        let c = cloud1d(&[0.0, 1.0]);
        assert!(c.clone().with_attribute("a", vec![1.0]).is_err());
        assert!(c.clone().with_attribute("a", vec![1.0, f64::NAN]).is_err());
        let c = c.with_attribute("a", vec![1.0, 2.0]).unwrap();
        assert_eq!(c.attribute("a").unwrap(), &[1.0, 2.0]);
    }

    #[test]
    fn non_finite_coordinates_rejected() {
        assert!(matches!(
            PointCloud::from_rows(vec![vec![0.0], vec![f64::INFINITY]]),
            Err(MetricError::NonFiniteCoordinate { row: 1, col: 0 })
        ));
    }

    fn point_strategy() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-100.0..100.0f64, 3)
    }

    proptest! {
        #[test]
        fn triangle_inequality(a in point_strategy(), b in point_strategy(), c in point_strategy()) {
            for m in [Metric::Euclidean, Metric::Manhattan, Metric::Chebyshev] {
                let ab = m.distance_coords(&a, &b).unwrap();
                let bc = m.distance_coords(&b, &c).unwrap();
                let ac = m.distance_coords(&a, &c).unwrap();
                prop_assert!(ac <= ab + bc + 1e-9);
            }
        }

        #[test]
        fn hausdorff_symmetric(
            xs in proptest::collection::vec(point_strategy(), 1..20),
            ys in proptest::collection::vec(point_strategy(), 1..20),
        ) {
            let x = PointCloud::from_rows(xs).unwrap();
            let y = PointCloud::from_rows(ys).unwrap();
            let d1 = hausdorff_distance(&x, &y, &Metric::Euclidean).unwrap();
            let d2 = hausdorff_distance(&y, &x, &Metric::Euclidean).unwrap();
            prop_assert_eq!(d1, d2);
            prop_assert!(d1 >= 0.0);
        }
    }
}
