//! Ball mapper: topology-flavored summaries of finite metric spaces.
//!
//! The pipeline is: pick ball centers forming an ε-net ([`cover`]), record
//! which balls cover each point, join balls that share points into a graph
//! ([`graph`]), optionally sweep the radius with the centers fixed
//! ([`multiscale`]), and read structure off the result — components,
//! cycles, degree-based dimension proxies, density filtering
//! ([`analysis`]). [`datasets`] provides seeded generators for the standard
//! test shapes, [`io`] the file formats, and the `ballmapper` binary wires
//! everything into a CLI.
//!
//! Core algorithms are generic over the floating-point scalar via
//! [`scalar::Scalar`]; the crate-root aliases fix `f64`, which is what the
//! file formats and the CLI use throughout.
//!
//! ```
//! use ballmapper::{build_cover, build_bm_graph, Metric, NetParams, PointCloud};
//!
//! let cloud = PointCloud::from_rows(vec![
//!     vec![0.0], vec![0.5], vec![1.0], vec![1.5], vec![2.0],
//! ])?;
//! let cover = build_cover(&cloud, &Metric::Euclidean, &NetParams::Greedy { epsilon: 0.6 })?;
//! let graph = build_bm_graph(&cover);
//! assert_eq!(graph.vertex_count(), 3);
//! assert_eq!(graph.edge_count(), 2);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod analysis;
pub mod cover;
pub mod datasets;
pub mod graph;
pub mod io;
pub mod metric;
pub mod multiscale;
pub mod scalar;

mod union_find;

/// Scalar type used by the datasets, file formats, and CLI.
pub type Real = f64;

pub type PointCloud = metric::PointCloud<Real>;
pub type DistanceMatrix = metric::DistanceMatrix<Real>;
pub type Metric = metric::Metric<Real>;
pub type CoverVector = cover::CoverVector<Real>;
pub type NetParams = cover::NetParams<Real>;
pub type BmGraph = graph::BmGraph<Real>;
pub type VertexColoring = graph::VertexColoring<Real>;
pub type MultiScaleBm = multiscale::MultiScaleBm<Real>;
pub type InterleavingReport = multiscale::InterleavingReport<Real>;
pub type TrustBand = analysis::TrustBand<Real>;

pub use analysis::{
    average_degree, cube_region, dimension_sweep, mean_degree_by_region, plateau_degree,
    suggest_density_threshold, trust_band, AnalysisError, CubeRegion, DegreeSweep, RegionDegrees,
    SweepSource, DEFAULT_DENSITY_QUANTILE,
};
pub use cover::{
    build_cover, greedy_epsilon_net, kmeans_centers, maxmin_epsilon_net, recover, CoverError,
};
pub use datasets::{
    load_grayscale_dir, load_iris, sample_circle, sample_cube, sample_torus, window,
    x_shape_with_noise, y_junction, DatasetError, GeneratorSpec,
};
pub use graph::{
    build_bm_graph, build_nerve, connected_components, cycle_rank, filter_low_density,
    vertex_coloring, Aggregator, Edge, GraphError, NerveComplex, Vertex,
};
pub use io::{
    coloring_key, read_distance_matrix_csv, read_graph_json, read_points_csv, write_dot,
    write_graph_json, write_html, write_sweep_csv, EdgeDoc, GraphDocument, IoError, VertexDoc,
    COLOR_RAMP, GRAPH_FORMAT_VERSION,
};
pub use metric::{hausdorff_distance, MetricError, MATRIX_SYMMETRY_TOLERANCE};
pub use multiscale::{
    check_inclusions, interleaving_h0_check, multiscale_bm, single_linkage_components,
    InclusionReport, InclusionViolation, MultiscaleError,
};
pub use scalar::Scalar;
