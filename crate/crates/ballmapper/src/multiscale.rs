//! Multi-scale construction: one center set, a ladder of radii.
//!
//! Centers are chosen once at the smallest radius; every further radius
//! reuses them, so the per-radius graphs share a vertex set and their edge
//! sets grow monotonically. [`check_inclusions`] audits that monotonicity,
//! and [`interleaving_h0_check`] compares component counts against
//! single-linkage clustering at matched cutoffs — the component-level shadow
//! of the cover inclusions that justify reading features off a ball-mapper
//! graph.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::cover::{build_cover, recover, CoverError, NetParams};
use crate::graph::{build_bm_graph, connected_components, BmGraph};
use crate::metric::{Metric, MetricError, PointCloud};
use crate::scalar::Scalar;
use crate::union_find::UnionFind;

#[derive(Debug, Error)]
pub enum MultiscaleError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("radii list is empty")]
    EmptyRadii,
    #[error("radius {0} is not positive and finite")]
    BadRadius(f64),
    #[error("radii must be nondecreasing, but radii[{index}] drops below its predecessor")]
    UnsortedRadii { index: usize },
    #[error(
        "net epsilon {net_epsilon} must equal the first radius {first_radius}; \
         centers are chosen at the smallest scale"
    )]
    EpsilonMismatch {
        net_epsilon: f64,
        first_radius: f64,
    },
}

/// Graphs over one center set at each radius of a nondecreasing ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiScaleBm<T> {
    centers: Vec<usize>,
    radii: Vec<T>,
    graphs: Vec<BmGraph<T>>,
}

impl<T: Scalar> MultiScaleBm<T> {
    /// Center point-indices shared by every level.
    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    pub fn graphs(&self) -> &[BmGraph<T>] {
        &self.graphs
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

fn validate_radii<T: Scalar>(radii: &[T]) -> Result<(), MultiscaleError> {
    if radii.is_empty() {
        return Err(MultiscaleError::EmptyRadii);
    }
    for (i, &r) in radii.iter().enumerate() {
        if r <= T::zero() || !r.is_finite() {
            return Err(MultiscaleError::BadRadius(r.as_f64()));
        }
        if i > 0 && r < radii[i - 1] {
            return Err(MultiscaleError::UnsortedRadii { index: i });
        }
    }
    Ok(())
}

/// Chooses centers at `radii[0]` via `net`, then rebuilds the cover and
/// graph at every radius of the ladder.
///
/// For the radius-driven strategies the net's epsilon must equal the first
/// radius. The k-means strategy derives its own radius; if that exceeds
/// `radii[0]` some point is uncovered at the first level and the build
/// fails with a diagnostic naming it.
pub fn multiscale_bm<T: Scalar>(
    cloud: &PointCloud<T>,
    metric: &Metric<T>,
    radii: &[T],
    net: &NetParams<T>,
) -> Result<MultiScaleBm<T>, MultiscaleError> {
    validate_radii(radii)?;
    if let Some(eps) = net.epsilon() {
        if eps != radii[0] {
            return Err(MultiscaleError::EpsilonMismatch {
                net_epsilon: eps.as_f64(),
                first_radius: radii[0].as_f64(),
            });
        }
    }
    let base = build_cover(cloud, metric, net)?;
    let centers = base.centers().to_vec();
    let mut graphs = Vec::with_capacity(radii.len());
    for &r in radii {
        let cover = recover(cloud, metric, &centers, r)?;
        graphs.push(build_bm_graph(&cover));
    }
    Ok(MultiScaleBm {
        centers,
        radii: radii.to_vec(),
        graphs,
    })
}

/// Components of the graph joining every pair of points at distance at most
/// `cutoff`; labels are canonicalized to the smallest point index.
pub fn single_linkage_components<T: Scalar>(
    cloud: &PointCloud<T>,
    metric: &Metric<T>,
    cutoff: T,
) -> Result<(usize, Vec<usize>), MultiscaleError> {
    let eval = metric.evaluator(cloud)?;
    let n = cloud.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if eval.d(i, j) <= cutoff {
                uf.union(i, j);
            }
        }
    }
    Ok((uf.components(), uf.labels()))
}

/// A breach of the multi-scale nesting guarantees, located at the first
/// radius index involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InclusionViolation {
    VertexSetMismatch {
        radius_index: usize,
    },
    MissingEdge {
        radius_index: usize,
        u: usize,
        v: usize,
    },
    WeightDecreased {
        radius_index: usize,
        u: usize,
        v: usize,
        before: usize,
        after: usize,
    },
    ComponentsIncreased {
        radius_index: usize,
        before: usize,
        after: usize,
    },
}

impl fmt::Display for InclusionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InclusionViolation::VertexSetMismatch { radius_index } => write!(
                f,
                "vertex set at radius index {} differs from index {}",
                radius_index + 1,
                radius_index
            ),
            InclusionViolation::MissingEdge { radius_index, u, v } => write!(
                f,
                "edge ({u}, {v}) present at radius index {radius_index} is missing at index {}",
                radius_index + 1
            ),
            InclusionViolation::WeightDecreased {
                radius_index,
                u,
                v,
                before,
                after,
            } => write!(
                f,
                "edge ({u}, {v}) weight drops from {before} to {after} between radius indices \
                 {radius_index} and {}",
                radius_index + 1
            ),
            InclusionViolation::ComponentsIncreased {
                radius_index,
                before,
                after,
            } => write!(
                f,
                "component count rises from {before} to {after} between radius indices \
                 {radius_index} and {}",
                radius_index + 1
            ),
        }
    }
}

/// Outcome of [`check_inclusions`]: empty means every nesting invariant held.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionReport {
    violations: Vec<InclusionViolation>,
}

impl InclusionReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[InclusionViolation] {
        &self.violations
    }

    pub fn first(&self) -> Option<&InclusionViolation> {
        self.violations.first()
    }
}

/// Audits a multi-scale build: identical vertex sets, nested edges,
/// nondecreasing weights, nonincreasing component counts across adjacent
/// radii. A correctly constructed [`MultiScaleBm`] always passes; the check
/// exists to validate deserialized or hand-assembled inputs.
pub fn check_inclusions<T: Scalar>(ms: &MultiScaleBm<T>) -> InclusionReport {
    let mut violations = Vec::new();
    for i in 0..ms.graphs.len().saturating_sub(1) {
        let (a, b) = (&ms.graphs[i], &ms.graphs[i + 1]);
        let same_vertices = a.vertex_count() == b.vertex_count()
            && a.vertices()
                .iter()
                .zip(b.vertices())
                .all(|(x, y)| x.center == y.center);
        if !same_vertices {
            violations.push(InclusionViolation::VertexSetMismatch { radius_index: i });
            continue;
        }
        let wider: BTreeMap<(usize, usize), usize> =
            b.edges().iter().map(|e| ((e.u, e.v), e.weight)).collect();
        for e in a.edges() {
            match wider.get(&(e.u, e.v)) {
                None => violations.push(InclusionViolation::MissingEdge {
                    radius_index: i,
                    u: e.u,
                    v: e.v,
                }),
                Some(&w) if w < e.weight => {
                    violations.push(InclusionViolation::WeightDecreased {
                        radius_index: i,
                        u: e.u,
                        v: e.v,
                        before: e.weight,
                        after: w,
                    })
                }
                Some(_) => {}
            }
        }
        let before = connected_components(a).0;
        let after = connected_components(b).0;
        if after > before {
            violations.push(InclusionViolation::ComponentsIncreased {
                radius_index: i,
                before,
                after,
            });
        }
    }
    InclusionReport { violations }
}

/// Component counts of the ball-mapper graphs at radii ε and 2ε alongside
/// single-linkage clusterings at the same cutoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct InterleavingReport<T> {
    pub epsilon: T,
    pub bm_at_eps: usize,
    pub bm_at_two_eps: usize,
    pub sl_at_eps: usize,
    pub sl_at_two_eps: usize,
}

impl<T: Scalar> InterleavingReport<T> {
    /// Single linkage at 2ε cannot have more components than the graph at ε.
    pub fn lower_ok(&self) -> bool {
        self.sl_at_two_eps <= self.bm_at_eps
    }

    /// The graph at 2ε cannot have more components than single linkage at ε.
    pub fn upper_ok(&self) -> bool {
        self.bm_at_two_eps <= self.sl_at_eps
    }

    pub fn pass(&self) -> bool {
        self.lower_ok() && self.upper_ok()
    }
}

/// Sandwiches the graph's component counts between single-linkage counts at
/// ε and 2ε. Fails up front if `centers` is not an ε-net (some point
/// uncovered at radius ε).
pub fn interleaving_h0_check<T: Scalar>(
    cloud: &PointCloud<T>,
    metric: &Metric<T>,
    centers: &[usize],
    epsilon: T,
) -> Result<InterleavingReport<T>, MultiscaleError> {
    let two = T::from_count(2) * epsilon;
    let at_eps = build_bm_graph(&recover(cloud, metric, centers, epsilon)?);
    let at_two = build_bm_graph(&recover(cloud, metric, centers, two)?);
    let (sl_eps, _) = single_linkage_components(cloud, metric, epsilon)?;
    let (sl_two, _) = single_linkage_components(cloud, metric, two)?;
    Ok(InterleavingReport {
        epsilon,
        bm_at_eps: connected_components(&at_eps).0,
        bm_at_two_eps: connected_components(&at_two).0,
        sl_at_eps: sl_eps,
        sl_at_two_eps: sl_two,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::greedy_epsilon_net;
    use crate::graph::Edge;

    fn line() -> PointCloud<f64> {
        PointCloud::from_rows(vec![vec![0.0], vec![0.5], vec![1.0], vec![1.5], vec![2.0]])
            .unwrap()
    }

    fn uniform_square(n: usize, side: f64, seed: u64) -> PointCloud<f64> {
        use rand_core::{RngCore, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let rows = (0..n).map(|_| vec![unit() * side, unit() * side]).collect();
        PointCloud::from_rows(rows).unwrap()
    }

    #[test]
    fn ladder_grows_path_into_triangle() {
        let ms = multiscale_bm(
            &line(),
            &Metric::Euclidean,
            &[0.6, 1.2],
            &NetParams::Greedy { epsilon: 0.6 },
        )
        .unwrap();
        assert_eq!(ms.centers(), &[0, 2, 4]);
        let small = &ms.graphs()[0];
        assert_eq!(small.edges(), &[
            Edge { u: 0, v: 1, weight: 1 },
            Edge { u: 1, v: 2, weight: 1 },
        ]);
        // At 1.2 the middle ball swallows both ends' witnesses: a triangle.
        let large = &ms.graphs()[1];
        assert_eq!(large.edges(), &[
            Edge { u: 0, v: 1, weight: 3 },
            Edge { u: 0, v: 2, weight: 1 },
            Edge { u: 1, v: 2, weight: 3 },
        ]);
        assert!(check_inclusions(&ms).pass());
        let components: Vec<usize> = ms
            .graphs()
            .iter()
            .map(|g| connected_components(g).0)
            .collect();
        assert_eq!(components, vec![1, 1]);
    }

    #[test]
    fn constant_ladder_repeats_the_graph() {
        let ms = multiscale_bm(
            &line(),
            &Metric::Euclidean,
            &[0.6, 0.6, 0.6],
            &NetParams::Greedy { epsilon: 0.6 },
        )
        .unwrap();
        assert_eq!(ms.graphs()[0], ms.graphs()[1]);
        assert_eq!(ms.graphs()[1], ms.graphs()[2]);
    }

    #[test]
    fn single_radius_reduces_to_plain_build() {
        let direct = build_bm_graph(&greedy_epsilon_net(&line(), &Metric::Euclidean, 0.6).unwrap());
        let ms = multiscale_bm(
            &line(),
            &Metric::Euclidean,
            &[0.6],
            &NetParams::Greedy { epsilon: 0.6 },
        )
        .unwrap();
        assert_eq!(ms.graphs().len(), 1);
        assert_eq!(&ms.graphs()[0], &direct);
    }

    #[test]
    fn rejects_bad_ladders() {
        let net = NetParams::Greedy { epsilon: 0.6 };
        assert!(matches!(
            multiscale_bm(&line(), &Metric::Euclidean, &[], &net),
            Err(MultiscaleError::EmptyRadii)
        ));
        assert!(matches!(
            multiscale_bm(&line(), &Metric::Euclidean, &[0.6, 0.5], &net),
            Err(MultiscaleError::UnsortedRadii { index: 1 })
        ));
        assert!(matches!(
            multiscale_bm(&line(), &Metric::Euclidean, &[0.5, 0.6], &net),
            Err(MultiscaleError::EpsilonMismatch { .. })
        ));
        assert!(matches!(
            multiscale_bm(&line(), &Metric::Euclidean, &[-1.0, 0.6], &net),
            Err(MultiscaleError::BadRadius(_))
        ));
    }

    #[test]
    fn single_linkage_hand_cases() {
        let x = PointCloud::from_rows(vec![vec![0.0], vec![0.5], vec![1.0], vec![5.0]]).unwrap();
        let (count, labels) = single_linkage_components(&x, &Metric::Euclidean, 0.6).unwrap();
        assert_eq!(count, 2);
        assert_eq!(labels, vec![0, 0, 0, 3]);
        // Cutoff at the diameter joins everything.
        let (one, _) = single_linkage_components(&x, &Metric::Euclidean, 5.0).unwrap();
        assert_eq!(one, 1);
        // Cutoff below the closest pair separates everything.
        let (all, labels) = single_linkage_components(&x, &Metric::Euclidean, 0.4).unwrap();
        assert_eq!(all, 4);
        assert_eq!(labels, vec![0, 1, 2, 3]);
    }

    #[test]
    fn corrupted_ladder_is_reported() {
        let ms = multiscale_bm(
            &line(),
            &Metric::Euclidean,
            &[0.6, 1.2],
            &NetParams::Greedy { epsilon: 0.6 },
        )
        .unwrap();
        // Rebuild the widest graph with its last edge dropped: the path
        // edge (1, 2) from the narrow level now has no successor.
        let broken = {
            let last = &ms.graphs()[1];
            let mut edges = last.edges().to_vec();
            edges.remove(
                edges
                    .iter()
                    .position(|e| (e.u, e.v) == (1, 2))
                    .expect("edge (1,2) exists at the wide level"),
            );
            BmGraph::from_parts(
                last.epsilon(),
                last.n_points(),
                last.partial_cover(),
                last.vertices().to_vec(),
                edges,
            )
        };
        let corrupted = MultiScaleBm {
            centers: ms.centers().to_vec(),
            radii: ms.radii().to_vec(),
            graphs: vec![ms.graphs()[0].clone(), broken],
        };
        let report = check_inclusions(&corrupted);
        assert!(!report.pass());
        assert_eq!(
            report.first(),
            Some(&InclusionViolation::MissingEdge {
                radius_index: 0,
                u: 1,
                v: 2
            })
        );
        assert!(report.first().unwrap().to_string().contains("(1, 2)"));
    }

    #[test]
    fn interleaving_tight_on_one_cluster() {
        // Epsilon beyond the diameter: every count is 1 and both bounds are
        // tight.
        let report =
            interleaving_h0_check(&line(), &Metric::Euclidean, &[0], 2.5).unwrap();
        assert_eq!(
            (report.bm_at_eps, report.bm_at_two_eps, report.sl_at_eps, report.sl_at_two_eps),
            (1, 1, 1, 1)
        );
        assert!(report.pass());
    }

    #[test]
    fn interleaving_sees_two_far_clusters() {
        let cloud = PointCloud::from_rows(vec![
            vec![0.0],
            vec![0.4],
            vec![100.0],
            vec![100.4],
        ])
        .unwrap();
        let report =
            interleaving_h0_check(&cloud, &Metric::Euclidean, &[0, 2], 0.5).unwrap();
        assert_eq!(
            (report.bm_at_eps, report.bm_at_two_eps, report.sl_at_eps, report.sl_at_two_eps),
            (2, 2, 2, 2)
        );
        assert!(report.pass());
    }

    #[test]
    fn interleaving_on_seeded_square() {
        let cloud = uniform_square(200, 10.0, 424242);
        let net = greedy_epsilon_net(&cloud, &Metric::Euclidean, 1.0).unwrap();
        let report =
            interleaving_h0_check(&cloud, &Metric::Euclidean, net.centers(), 1.0).unwrap();
        assert!(report.lower_ok(), "{report:?}");
        assert!(report.upper_ok(), "{report:?}");
    }

    #[test]
    fn interleaving_rejects_non_net_centers() {
        // Center 0 alone does not cover the line at radius 0.7.
        let err = interleaving_h0_check(&line(), &Metric::Euclidean, &[0], 0.7).unwrap_err();
        assert!(matches!(
            err,
            MultiscaleError::Cover(CoverError::Uncovered { point: 2, .. })
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn cloud_strategy(max_n: usize) -> impl Strategy<Value = PointCloud<f64>> {
            (1usize..=max_n, 1usize..=3).prop_flat_map(|(n, dim)| {
                proptest::collection::vec(
                    proptest::collection::vec(-5.0f64..5.0, dim),
                    n,
                )
                .prop_map(|rows| PointCloud::from_rows(rows).unwrap())
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn ladders_nest(
                cloud in cloud_strategy(90),
                epsilon in 0.2f64..2.0,
                growth in proptest::collection::vec(1.0f64..2.0, 1..4),
            ) {
                let mut radii = vec![epsilon];
                for g in growth {
                    radii.push(radii.last().unwrap() * g);
                }
                let ms = multiscale_bm(
                    &cloud,
                    &Metric::Euclidean,
                    &radii,
                    &NetParams::MaxMin { epsilon, max_centers: None },
                )
                .unwrap();
                prop_assert!(check_inclusions(&ms).pass());
                // Components are nonincreasing along the ladder.
                let counts: Vec<usize> = ms
                    .graphs()
                    .iter()
                    .map(|g| connected_components(g).0)
                    .collect();
                for w in counts.windows(2) {
                    prop_assert!(w[1] <= w[0]);
                }
            }

            #[test]
            fn sandwich_holds_on_random_clouds(
                cloud in cloud_strategy(120),
                epsilon in 0.3f64..3.0,
            ) {
                let net = greedy_epsilon_net(&cloud, &Metric::Euclidean, epsilon).unwrap();
                let report = interleaving_h0_check(
                    &cloud,
                    &Metric::Euclidean,
                    net.centers(),
                    epsilon,
                )
                .unwrap();
                prop_assert!(report.lower_ok(), "{:?}", report);
                prop_assert!(report.upper_ok(), "{:?}", report);
            }

            #[test]
            fn manhattan_ladders_nest_too(
                cloud in cloud_strategy(60),
                epsilon in 0.2f64..2.0,
            ) {
                let radii = [epsilon, epsilon * 1.7, epsilon * 3.1];
                let ms = multiscale_bm(
                    &cloud,
                    &Metric::Manhattan,
                    &radii,
                    &NetParams::Greedy { epsilon },
                )
                .unwrap();
                prop_assert!(check_inclusions(&ms).pass());
            }
        }
    }
}
