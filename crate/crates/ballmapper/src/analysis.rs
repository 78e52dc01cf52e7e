//! Degree-based diagnostics: dimension sweeps, plateau summaries, the
//! Hausdorff trust band, and a quantile rule for picking a denoising
//! threshold.
//!
//! The average vertex degree of a ball-mapper graph over a range of radii
//! is a cheap proxy that grows with intrinsic dimension — an upper-bound
//! indicator, not a dimension estimate. [`dimension_sweep`] runs that
//! experiment over repetitions with derived seeds; [`plateau_degree`]
//! condenses a sweep's flat region to one comparable number.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cover::NetParams;
use crate::datasets::{DatasetError, GeneratorSpec};
use crate::graph::BmGraph;
use crate::metric::{Metric, PointCloud};
use crate::multiscale::{multiscale_bm, MultiscaleError};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Multiscale(#[from] MultiscaleError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("plateau needs at least 3 radii, got {0}")]
    TooFewRadii(usize),
    #[error("repetitions must be at least 1")]
    ZeroRepetitions,
    #[error("quantile must lie in [0, 1], got {0}")]
    QuantileOutOfRange(f64),
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("delta must be nonnegative, got {0}")]
    NegativeDelta(f64),
}

/// Quantile used by the CLI when no explicit denoising threshold is given.
pub const DEFAULT_DENSITY_QUANTILE: f64 = 0.25;

/// Mean neighbor count over all vertices: 2E / V.
pub fn average_degree<T: Scalar>(graph: &BmGraph<T>) -> Result<f64, AnalysisError> {
    if graph.vertex_count() == 0 {
        return Err(AnalysisError::EmptyGraph);
    }
    Ok(2.0 * graph.edge_count() as f64 / graph.vertex_count() as f64)
}

/// Average-degree curves over a radius ladder, one row per repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSweep {
    radii: Vec<f64>,
    mean_degree: Vec<f64>,
    per_repetition: Vec<Vec<f64>>,
    interior_mean_degree: Option<Vec<Option<f64>>>,
}

impl DegreeSweep {
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Per-radius mean over repetitions.
    pub fn mean_degree(&self) -> &[f64] {
        &self.mean_degree
    }

    /// Raw per-repetition curves, indexed [repetition][radius index].
    pub fn per_repetition(&self) -> &[Vec<f64>] {
        &self.per_repetition
    }

    pub fn repetitions(&self) -> usize {
        self.per_repetition.len()
    }

    /// Mean degree restricted to interior vertices (margin 2ε from every
    /// face); outer `Option` is `None` for non-cube sources, inner entries
    /// are `None` at radii where no vertex qualified in any repetition.
    pub fn interior_mean_degree(&self) -> Option<&[Option<f64>]> {
        self.interior_mean_degree.as_deref()
    }
}

/// What a sweep repetition runs on: one fixed cloud reused every time, or a
/// generator re-sampled with a derived seed per repetition.
#[derive(Debug, Clone)]
pub enum SweepSource<'a> {
    Fixed(&'a PointCloud<f64>),
    Generator(GeneratorSpec),
}

/// Runs `repetitions` experiments: sample (or reuse) a cloud, build a net
/// at `radii[0]`, rebuild at every radius, record the average degree.
/// Repetition `i` uses seed `seed + i` for its sample, so whole sweeps are
/// reproducible. Cube sources additionally get interior-only averages.
pub fn dimension_sweep(
    source: &SweepSource<'_>,
    metric: &Metric<f64>,
    radii: &[f64],
    repetitions: usize,
    seed: u64,
    net: &NetParams<f64>,
) -> Result<DegreeSweep, AnalysisError> {
    if repetitions == 0 {
        return Err(AnalysisError::ZeroRepetitions);
    }
    let cube_side = match source {
        SweepSource::Generator(GeneratorSpec::Cube { side, .. }) => Some(*side),
        _ => None,
    };
    let mut per_repetition = Vec::with_capacity(repetitions);
    let mut interior_sum = vec![0.0f64; radii.len()];
    let mut interior_count = vec![0usize; radii.len()];
    let mut generated;
    for rep in 0..repetitions {
        let cloud: &PointCloud<f64> = match source {
            SweepSource::Fixed(cloud) => cloud,
            SweepSource::Generator(spec) => {
                generated = spec.with_seed(seed.wrapping_add(rep as u64)).generate()?;
                &generated
            }
        };
        let ms = multiscale_bm(cloud, metric, radii, net)?;
        let curve = ms
            .graphs()
            .iter()
            .map(average_degree)
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(side) = cube_side {
            for (i, graph) in ms.graphs().iter().enumerate() {
                let regions =
                    mean_degree_by_region(graph, cloud, side, 2.0 * radii[i]);
                if let Some(mean) = regions.interior {
                    interior_sum[i] += mean;
                    interior_count[i] += 1;
                }
            }
        }
        per_repetition.push(curve);
    }
    let mean_degree = (0..radii.len())
        .map(|i| {
            per_repetition.iter().map(|c| c[i]).sum::<f64>() / repetitions as f64
        })
        .collect();
    let interior_mean_degree = cube_side.map(|_| {
        interior_sum
            .iter()
            .zip(&interior_count)
            .map(|(&s, &c)| (c > 0).then(|| s / c as f64))
            .collect()
    });
    Ok(DegreeSweep {
        radii: radii.to_vec(),
        mean_degree,
        per_repetition,
        interior_mean_degree,
    })
}

/// Flat-region summary of a sweep: the median of `mean_degree` over the
/// middle third of the radii list (indices `n/3 .. ceil(2n/3)`), dodging
/// the too-small-radius spike and the too-large-radius collapse.
pub fn plateau_degree(sweep: &DegreeSweep) -> Result<f64, AnalysisError> {
    let n = sweep.radii.len();
    if n < 3 {
        return Err(AnalysisError::TooFewRadii(n));
    }
    let lo = n / 3;
    let hi = (2 * n).div_ceil(3);
    let mut band: Vec<f64> = sweep.mean_degree[lo..hi].to_vec();
    band.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = band.len();
    Ok(if m % 2 == 1 {
        band[m / 2]
    } else {
        (band[m / 2 - 1] + band[m / 2]) / 2.0
    })
}

/// Radius interval within which graph features are trustworthy when the
/// sample is δ-close (Hausdorff) to the true space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustBand<T> {
    pub lower: T,
    pub upper: T,
}

/// Band (ε, 3ε + 2δ): features persisting across it reflect the underlying
/// space rather than sampling artifacts.
pub fn trust_band<T: Scalar>(epsilon: T, delta: T) -> Result<TrustBand<T>, AnalysisError> {
    if epsilon <= T::zero() || !epsilon.is_finite() {
        return Err(AnalysisError::NonPositiveEpsilon(epsilon.as_f64()));
    }
    if delta < T::zero() || !delta.is_finite() {
        return Err(AnalysisError::NegativeDelta(delta.as_f64()));
    }
    let three = T::from_count(3);
    let two = T::from_count(2);
    Ok(TrustBand {
        lower: epsilon,
        upper: three * epsilon + two * delta,
    })
}

/// Vertex-size quantile (linearly interpolated, then floored) as a
/// suggested `n_min` for density filtering.
pub fn suggest_density_threshold<T: Scalar>(
    graph: &BmGraph<T>,
    quantile: f64,
) -> Result<usize, AnalysisError> {
    if graph.vertex_count() == 0 {
        return Err(AnalysisError::EmptyGraph);
    }
    if !(0.0..=1.0).contains(&quantile) || quantile.is_nan() {
        return Err(AnalysisError::QuantileOutOfRange(quantile));
    }
    let mut sizes: Vec<usize> = graph.vertices().iter().map(|v| v.size()).collect();
    sizes.sort_unstable();
    let position = quantile * (sizes.len() - 1) as f64;
    let lo = position.floor() as usize;
    let hi = position.ceil() as usize;
    let value = sizes[lo] as f64 + (position - lo as f64) * (sizes[hi] as f64 - sizes[lo] as f64);
    Ok(value.floor() as usize)
}

/// Position of a point inside `[0, side]^d` relative to a face margin:
/// interior points clear every face, corner points crowd a face in every
/// coordinate, everything else hugs some face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CubeRegion {
    Interior,
    Boundary,
    Corner,
}

pub fn cube_region<T: Scalar>(point: &[T], side: T, margin: T) -> CubeRegion {
    let near_face = |&v: &T| v.min(side - v) < margin;
    if point.iter().all(near_face) {
        CubeRegion::Corner
    } else if point.iter().any(near_face) {
        CubeRegion::Boundary
    } else {
        CubeRegion::Interior
    }
}

/// Mean vertex degree split by the region of each vertex's center; `None`
/// when no vertex falls in a region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionDegrees {
    pub interior: Option<f64>,
    pub boundary: Option<f64>,
    pub corner: Option<f64>,
}

pub fn mean_degree_by_region<T: Scalar>(
    graph: &BmGraph<T>,
    cloud: &PointCloud<T>,
    side: T,
    margin: T,
) -> RegionDegrees {
    let degrees = graph.degrees();
    let mut sums: BTreeMap<CubeRegion, (f64, usize)> = BTreeMap::new();
    for vertex in graph.vertices() {
        let region = cube_region(cloud.row(vertex.center), side, margin);
        let entry = sums.entry(region).or_insert((0.0, 0));
        entry.0 += degrees[vertex.id] as f64;
        entry.1 += 1;
    }
    let mean = |r: CubeRegion| sums.get(&r).map(|&(s, c)| s / c as f64);
    RegionDegrees {
        interior: mean(CubeRegion::Interior),
        boundary: mean(CubeRegion::Boundary),
        corner: mean(CubeRegion::Corner),
    }
}
