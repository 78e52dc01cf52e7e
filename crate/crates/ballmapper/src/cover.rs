//! Ball-center selection and cover vectors.
//!
//! A [`CoverVector`] records, for every point of the cloud, the sorted list
//! of center point-indices whose closed balls of radius `epsilon` contain
//! it. Centers are selected by one of three strategies:
//!
//! * [`greedy_epsilon_net`] walks the points in index order and opens a new
//!   ball at the first uncovered point until everything is covered;
//! * [`maxmin_epsilon_net`] repeatedly picks the point farthest from the
//!   current center set (farthest-point sampling), optionally truncated at
//!   a fixed number of centers;
//! * [`kmeans_centers`] runs Lloyd iterations, snaps the centroids to data
//!   points and derives the radius from the worst assignment distance.
//!
//! [`recover`] recomputes the cover lists for a fixed center set at a new
//! radius, which is the inner step of the multi-scale construction.

use rayon::prelude::*;
use thiserror::Error;

use crate::metric::{DistanceEval, Metric, MetricError, PointCloud};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum CoverError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("max_centers must be at least 1")]
    ZeroMaxCenters,
    #[error("k must satisfy 1 <= k <= {n}, got {k}")]
    InvalidK { k: usize, n: usize },
    #[error("k-means center selection requires the euclidean metric")]
    KMeansNonEuclidean,
    #[error("kmeans_max_iters must be at least 1")]
    ZeroMaxIters,
    #[error("center list is empty")]
    NoCenters,
    #[error("duplicate center index {0}")]
    DuplicateCenter(usize),
    #[error(
        "point {point} is uncovered at epsilon {epsilon}: nearest center {center} is at distance {distance}"
    )]
    Uncovered {
        point: usize,
        epsilon: f64,
        center: usize,
        distance: f64,
    },
}

/// Per-point lists of covering ball centers at a fixed radius.
///
/// Invariants, guaranteed by every constructor in this module: each list is
/// nonempty (total coverage), sorted, duplicate-free, and only names centers
/// within `epsilon` of the point.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverVector<T> {
    epsilon: T,
    centers: Vec<usize>,
    covers: Vec<Vec<usize>>,
}

impl<T: Scalar> CoverVector<T> {
    /// Radius actually used to compute the cover lists.
    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    /// Center point-indices in selection order.
    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    /// Number of points in the underlying cloud.
    pub fn len(&self) -> usize {
        self.covers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.covers.is_empty()
    }

    /// Sorted center point-indices covering point `x`.
    pub fn cover_of(&self, x: usize) -> &[usize] {
        &self.covers[x]
    }

    pub fn covers(&self) -> &[Vec<usize>] {
        &self.covers
    }
}

/// Center-selection strategy and its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum NetParams<T> {
    Greedy {
        epsilon: T,
    },
    MaxMin {
        epsilon: T,
        max_centers: Option<usize>,
    },
    KMeans {
        k: usize,
        seed: u64,
        max_iters: usize,
    },
}

impl<T: Scalar> NetParams<T> {
    /// Requested radius, when the strategy has one (k-means derives it).
    pub fn epsilon(&self) -> Option<T> {
        match self {
            NetParams::Greedy { epsilon } | NetParams::MaxMin { epsilon, .. } => Some(*epsilon),
            NetParams::KMeans { .. } => None,
        }
    }
}

/// Runs the strategy described by `params`.
pub fn build_cover<T: Scalar>(
    cloud: &PointCloud<T>,
    metric: &Metric<T>,
    params: &NetParams<T>,
) -> Result<CoverVector<T>, CoverError> {
    match *params {
        NetParams::Greedy { epsilon } => greedy_epsilon_net(cloud, metric, epsilon),
        NetParams::MaxMin {
            epsilon,
            max_centers,
        } => maxmin_epsilon_net(cloud, metric, epsilon, max_centers),
        NetParams::KMeans {
            k,
            seed,
            max_iters,
        } => kmeans_centers(cloud, metric, k, seed, max_iters),
    }
}

fn check_epsilon<T: Scalar>(epsilon: T) -> Result<(), CoverError> {
    if epsilon <= T::zero() || !epsilon.is_finite() {
        return Err(CoverError::NonPositiveEpsilon(epsilon.as_f64()));
    }
    Ok(())
}

/// Cover lists for a fixed center set at a fixed radius, parallel over points.
fn cover_lists<T: Scalar>(eval: &DistanceEval<'_, T>, centers: &[usize], epsilon: T) -> Vec<Vec<usize>> {
    let mut sorted = centers.to_vec();
    sorted.sort_unstable();
    (0..eval.len())
        .into_par_iter()
        .map(|x| {
            sorted
                .iter()
                .copied()
                .filter(|&c| eval.d(x, c) <= epsilon)
                .collect()
        })
        .collect()
}

/// Greedy epsilon-net: scan points in index order, opening a ball at every
/// point not yet covered. Deterministic for a fixed input order.
pub fn greedy_epsilon_net<T: Scalar>(
    cloud: &PointCloud<T>,
    metric: &Metric<T>,
    epsilon: T,
) -> Result<CoverVector<T>, CoverError> {
    check_epsilon(epsilon)?;
    let eval = metric.evaluator(cloud)?;
    let n = cloud.len();
    let mut covered = vec![false; n];
    let mut covers: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut centers = Vec::new();
    for p in 0..n {
        if covered[p] {
            continue;
        }
        centers.push(p);
        // Mark the whole ball, not just uncovered points: covered points may
        // gain an extra center. Successive centers have increasing index,
        // so pushing keeps each list sorted.
        let hits: Vec<usize> = (0..n)
            .into_par_iter()
            .filter(|&x| eval.d(x, p) <= epsilon)
            .collect();
        for x in hits {
            covers[x].push(p);
            covered[x] = true;
        }
    }
    Ok(CoverVector {
        epsilon,
        centers,
        covers,
    })
}

/// Max-min (farthest-point) epsilon-net.
///
/// The first center is point 0; every subsequent center is the point
/// farthest from the current center set, ties broken by lowest index.
/// Selection stops once the farthest distance drops to `epsilon` or below
/// (that point is not added, so distinct centers stay more than `epsilon`
/// apart), or once `max_centers` centers have been chosen. On early
/// truncation the cover is computed at `max(epsilon, farthest distance)` so
/// total coverage still holds; the reported epsilon is the radius used.
pub fn maxmin_epsilon_net<T: Scalar>(
    cloud: &PointCloud<T>,
    metric: &Metric<T>,
    epsilon: T,
    max_centers: Option<usize>,
) -> Result<CoverVector<T>, CoverError> {
    check_epsilon(epsilon)?;
    if max_centers == Some(0) {
        return Err(CoverError::ZeroMaxCenters);
    }
    let eval = metric.evaluator(cloud)?;
    let n = cloud.len();
    let mut centers = vec![0usize];
    let mut dist_to_set: Vec<T> = (0..n).into_par_iter().map(|x| eval.d(x, 0)).collect();
    let mut truncated = false;
    loop {
        let (far, far_dist) = farthest(&dist_to_set);
        if far_dist <= epsilon {
            break;
        }
        if let Some(cap) = max_centers {
            if centers.len() >= cap {
                truncated = true;
                break;
            }
        }
        centers.push(far);
        dist_to_set
            .par_iter_mut()
            .enumerate()
            .for_each(|(x, d)| *d = (*d).min(eval.d(x, far)));
    }
    let radius = if truncated {
        let (_, far_dist) = farthest(&dist_to_set);
        epsilon.max(far_dist)
    } else {
        epsilon
    };
    let covers = cover_lists(&eval, &centers, radius);
    Ok(CoverVector {
        epsilon: radius,
        centers,
        covers,
    })
}

/// Largest entry with ties broken by lowest index.
fn farthest<T: Scalar>(dist: &[T]) -> (usize, T) {
    let mut best = 0;
    let mut best_d = dist[0];
    for (i, &d) in dist.iter().enumerate().skip(1) {
        if d > best_d {
            best = i;
            best_d = d;
        }
    }
    (best, best_d)
}

/// K-means-based center selection (euclidean only).
///
/// Lloyd iterations start from farthest-point seeding at a seeded random
/// index; final centroids are snapped to the nearest data point (ties by
/// lowest index) so centers lie in the cloud, and the radius is the largest
/// distance from any point to its nearest snapped center.
pub fn kmeans_centers<T: Scalar>(
    cloud: &PointCloud<T>,
    metric: &Metric<T>,
    k: usize,
    seed: u64,
    max_iters: usize,
) -> Result<CoverVector<T>, CoverError> {
    if !matches!(metric, Metric::Euclidean) {
        return Err(CoverError::KMeansNonEuclidean);
    }
    let eval = metric.evaluator(cloud)?;
    let n = cloud.len();
    if k == 0 || k > n {
        return Err(CoverError::InvalidK { k, n });
    }
    if max_iters == 0 {
        return Err(CoverError::ZeroMaxIters);
    }
    let dim = cloud.dim();

    // Farthest-point seeding from a seeded start index.
    let start = {
        use rand_core::{RngCore, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (rng.next_u64() % n as u64) as usize
    };
    let mut seed_points = vec![start];
    let mut dist_to_set: Vec<T> = (0..n).map(|x| eval.d(x, start)).collect();
    while seed_points.len() < k {
        let (far, _) = farthest(&dist_to_set);
        seed_points.push(far);
        for (x, d) in dist_to_set.iter_mut().enumerate() {
            *d = d.min(eval.d(x, far));
        }
    }
    let mut centroids: Vec<Vec<T>> = seed_points
        .iter()
        .map(|&p| cloud.row(p).to_vec())
        .collect();

    // Lloyd iterations; an emptied cluster keeps its previous centroid.
    let mut assignment = vec![0usize; n];
    for _ in 0..max_iters {
        let next: Vec<usize> = (0..n)
            .map(|x| nearest_centroid(cloud.row(x), &centroids))
            .collect();
        let unchanged = next == assignment;
        assignment = next;
        let mut sums = vec![vec![T::zero(); dim]; k];
        let mut counts = vec![0usize; k];
        for (x, &c) in assignment.iter().enumerate() {
            counts[c] += 1;
            for (s, &v) in sums[c].iter_mut().zip(cloud.row(x)) {
                *s = *s + v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let inv = T::one() / T::from_count(counts[c]);
                for (dst, &s) in centroids[c].iter_mut().zip(&sums[c]) {
                    *dst = s * inv;
                }
            }
        }
        if unchanged {
            break;
        }
    }

    // Snap centroids to data points; drop collisions, keeping first.
    let mut centers = Vec::with_capacity(k);
    for centroid in &centroids {
        let snapped = nearest_point(cloud, centroid);
        if !centers.contains(&snapped) {
            centers.push(snapped);
        }
    }

    let radius = (0..n)
        .into_par_iter()
        .map(|x| {
            centers
                .iter()
                .map(|&c| eval.d(x, c))
                .fold(T::infinity(), T::min)
        })
        .reduce(T::zero, T::max);
    let covers = cover_lists(&eval, &centers, radius);
    Ok(CoverVector {
        epsilon: radius,
        centers,
        covers,
    })
}

fn nearest_centroid<T: Scalar>(point: &[T], centroids: &[Vec<T>]) -> usize {
    let mut best = 0;
    let mut best_d = T::infinity();
    for (c, centroid) in centroids.iter().enumerate() {
        let mut acc = T::zero();
        for (&a, &b) in point.iter().zip(centroid) {
            let d = a - b;
            acc = acc + d * d;
        }
        if acc < best_d {
            best = c;
            best_d = acc;
        }
    }
    best
}

fn nearest_point<T: Scalar>(cloud: &PointCloud<T>, target: &[T]) -> usize {
    let mut best = 0;
    let mut best_d = T::infinity();
    for x in 0..cloud.len() {
        let mut acc = T::zero();
        for (&a, &b) in cloud.row(x).iter().zip(target) {
            let d = a - b;
            acc = acc + d * d;
        }
        if acc < best_d {
            best = x;
            best_d = acc;
        }
    }
    best
}

/// Recomputes cover lists for a fixed center set at a new radius. The
/// center list is preserved verbatim; fails if any point ends up uncovered,
/// reporting that point and its distance to the nearest center.
pub fn recover<T: Scalar>(
    cloud: &PointCloud<T>,
    metric: &Metric<T>,
    centers: &[usize],
    epsilon: T,
) -> Result<CoverVector<T>, CoverError> {
    check_epsilon(epsilon)?;
    if centers.is_empty() {
        return Err(CoverError::NoCenters);
    }
    for (pos, &c) in centers.iter().enumerate() {
        if c >= cloud.len() {
            return Err(MetricError::IndexOutOfRange {
                index: c,
                len: cloud.len(),
            }
            .into());
        }
        if centers[..pos].contains(&c) {
            return Err(CoverError::DuplicateCenter(c));
        }
    }
    let eval = metric.evaluator(cloud)?;
    let covers = cover_lists(&eval, centers, epsilon);
    if let Some(point) = covers.iter().position(|l| l.is_empty()) {
        let (center, distance) = centers
            .iter()
            .map(|&c| (c, eval.d(point, c)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)))
            .unwrap();
        return Err(CoverError::Uncovered {
            point,
            epsilon: epsilon.as_f64(),
            center,
            distance: distance.as_f64(),
        });
    }
    Ok(CoverVector {
        epsilon,
        centers: centers.to_vec(),
        covers,
    })
}
