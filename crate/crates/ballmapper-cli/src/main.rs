//! `ballmapper` — build ball mapper graphs from point clouds on the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (unreadable/invalid
//! input, radius too small for the data, ...), 3 internal invariant failure.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ballmapper::analysis::{
    dimension_sweep, plateau_degree, suggest_density_threshold, AnalysisError, SweepSource,
    DEFAULT_DENSITY_QUANTILE,
};
use ballmapper::cover::{build_cover, CoverError};
use ballmapper::datasets::{load_iris, DatasetError, GeneratorSpec};
use ballmapper::graph::{
    build_bm_graph, build_nerve, connected_components, cycle_rank, filter_low_density,
    vertex_coloring, Aggregator, GraphError,
};
use ballmapper::io::{
    coloring_key, read_distance_matrix_csv, read_points_csv, write_dot, write_graph_json,
    write_html, write_sweep_csv, GraphDocument, IoError,
};
use ballmapper::metric::MetricError;
use ballmapper::multiscale::{check_inclusions, multiscale_bm, MultiscaleError};
use ballmapper::{BmGraph, Metric, NetParams, PointCloud, VertexColoring};

// ---------------------------------------------------------------------------
// errors

enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<CoverError> for CliError {
    fn from(e: CoverError) -> Self {
        match e {
            // Radius/data interaction: the arguments were consistent, the
            // data just did not fit under them.
            CoverError::Uncovered { .. } => CliError::Data(e.to_string()),
            CoverError::Metric(m) => m.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::InvalidMaxDim(_) | GraphError::UnknownAggregator(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<MultiscaleError> for CliError {
    fn from(e: MultiscaleError) -> Self {
        match e {
            MultiscaleError::Cover(c) => c.into(),
            MultiscaleError::Metric(m) => m.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Multiscale(m) => m.into(),
            AnalysisError::Dataset(d) => d.into(),
            AnalysisError::EmptyGraph => CliError::Data(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            // Bad values inside a --gen spec are caller mistakes.
            DatasetError::InvalidParam(_)
            | DatasetError::BadSpecSyntax(_)
            | DatasetError::UnknownKind(_)
            | DatasetError::MissingParam { .. }
            | DatasetError::UnknownParam { .. }
            | DatasetError::BadParam { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Data(e.to_string())
    }
}

// ---------------------------------------------------------------------------
// argument surface

#[derive(Parser)]
#[command(name = "ballmapper", version, about = "Ball mapper graphs for point clouds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build one ball mapper graph and export it.
    Build(BuildArgs),
    /// Build a ladder of graphs on shared centers at growing radii.
    Multiscale(MultiscaleArgs),
    /// Sweep radii over generated clouds and report degree plateaus.
    Dimension(DimensionArgs),
    /// Build a graph, drop low-density vertices, export the rest.
    Denoise(DenoiseArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Numeric CSV of points, one row per point.
    #[arg(long)]
    input: Option<PathBuf>,
    /// CSV holding a symmetric distance matrix instead of coordinates.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Iris-format CSV: four features plus a species label column.
    #[arg(long)]
    iris: Option<PathBuf>,
    /// Synthetic cloud spec, e.g. "cube:n=500,d=3,seed=7".
    #[arg(long)]
    gen: Option<String>,
}

#[derive(Args)]
struct CsvArgs {
    /// Treat the first row of --input as column names.
    #[arg(long)]
    header: bool,
    /// Field delimiter for --input.
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Column (name, or 0-based index without --header) to keep as a point
    /// attribute instead of a coordinate. Repeatable.
    #[arg(long = "attr")]
    attrs: Vec<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MetricKind {
    Euclidean,
    Manhattan,
    Chebyshev,
    Precomputed,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum NetKind {
    Greedy,
    Maxmin,
    Kmeans,
}

#[derive(Args)]
struct NetArgs {
    /// Cover construction: greedy scan, max-min landmarks, or k-means snap.
    #[arg(long, value_enum, default_value_t = NetKind::Greedy)]
    net: NetKind,
    /// Ball radius (greedy/maxmin nets).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Number of centers (kmeans net).
    #[arg(long)]
    k: Option<usize>,
    /// Seed for the kmeans net's random start; `dimension` also derives its
    /// per-repetition generator seeds from this value.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop the maxmin net after this many centers.
    #[arg(long)]
    max_centers: Option<usize>,
    /// Lloyd iteration cap for the kmeans net.
    #[arg(long, default_value_t = 100)]
    kmeans_iters: usize,
}

#[derive(Args)]
struct ExportArgs {
    /// Write the graph as JSON.
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Write the graph as Graphviz DOT.
    #[arg(long)]
    out_dot: Option<PathBuf>,
    /// Write the graph as a self-contained HTML page.
    #[arg(long)]
    out_html: Option<PathBuf>,
    /// Include per-vertex covered point lists in JSON output.
    #[arg(long)]
    covered: bool,
}

#[derive(Args)]
struct CommonArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    csv: CsvArgs,
    /// Distance to use between points.
    #[arg(long, value_enum)]
    metric: Option<MetricKind>,
    #[command(flatten)]
    net: NetArgs,
    /// Color vertices by a point attribute: "name" or "name:min|mean|max".
    #[arg(long)]
    color: Option<String>,
    #[command(flatten)]
    export: ExportArgs,
    /// Cap the rayon worker pool (0 = one thread per core).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Also build the nerve up to this dimension and print simplex counts.
    #[arg(long)]
    max_dim: Option<usize>,
    /// Abort if any point sits in more than this many balls (nerve only).
    #[arg(long, default_value_t = 20)]
    cover_guard: usize,
    /// Drop vertices covering fewer than this many points.
    #[arg(long, conflicts_with = "denoise_quantile")]
    denoise_min: Option<usize>,
    /// Drop vertices below this size quantile in [0, 1].
    #[arg(long)]
    denoise_quantile: Option<f64>,
}

#[derive(Args)]
struct MultiscaleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Strictly increasing radii; the net is built at the first one.
    #[arg(long, value_delimiter = ',', required = true)]
    radii: Vec<f64>,
}

#[derive(Args)]
struct DimensionArgs {
    /// Synthetic cloud spec used for every repetition.
    #[arg(long)]
    gen: String,
    /// Cube dimensions to sweep, overriding the generator's d. Comma-separated.
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    /// Radii to sweep, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    radii: Vec<f64>,
    /// Independent clouds to average per radius.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[command(flatten)]
    net: NetArgs,
    /// Distance to use between points.
    #[arg(long, value_enum)]
    metric: Option<MetricKind>,
    /// Write the sweep table as CSV (per-dimension suffix when sweeping several).
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Cap the rayon worker pool (0 = one thread per core).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct DenoiseArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Drop vertices covering fewer than this many points.
    #[arg(long, conflicts_with = "denoise_quantile")]
    denoise_min: Option<usize>,
    /// Drop vertices below this size quantile in [0, 1] (default 0.25).
    #[arg(long)]
    denoise_quantile: Option<f64>,
}

// ---------------------------------------------------------------------------
// input loading

fn plain_metric(kind: MetricKind) -> Result<Metric, CliError> {
    match kind {
        MetricKind::Euclidean => Ok(Metric::Euclidean),
        MetricKind::Manhattan => Ok(Metric::Manhattan),
        MetricKind::Chebyshev => Ok(Metric::Chebyshev),
        MetricKind::Precomputed => Err(usage("--metric precomputed needs a --matrix input")),
    }
}

fn load_source(
    source: &SourceArgs,
    csv: &CsvArgs,
    metric: Option<MetricKind>,
) -> Result<(PointCloud, Metric), CliError> {
    let at = |path: &Path| {
        let path = path.display().to_string();
        move |e: CliError| CliError::Data(format!("{path}: {e}"))
    };
    if let Some(path) = &source.matrix {
        if !matches!(metric, None | Some(MetricKind::Precomputed)) {
            return Err(usage("--matrix already fixes the metric; drop --metric"));
        }
        let (metric, cloud) =
            read_distance_matrix_csv(path).map_err(CliError::from).map_err(at(path))?;
        return Ok((cloud, metric));
    }
    let metric = plain_metric(metric.unwrap_or(MetricKind::Euclidean))?;
    let cloud = if let Some(path) = &source.input {
        let delimiter = u8::try_from(u32::from(csv.delimiter))
            .map_err(|_| usage("--delimiter must be a single ASCII character"))?;
        read_points_csv(path, delimiter, csv.header, &csv.attrs)
            .map_err(CliError::from)
            .map_err(at(path))?
    } else if let Some(path) = &source.iris {
        load_iris(path).map_err(CliError::from).map_err(at(path))?
    } else if let Some(spec) = &source.gen {
        let spec: GeneratorSpec = spec.parse()?;
        spec.generate()?
    } else {
        unreachable!("clap enforces one source");
    };
    Ok((cloud, metric))
}

fn net_params(net: &NetArgs, default_epsilon: Option<f64>) -> Result<NetParams, CliError> {
    let epsilon = |flag: &str| -> Result<f64, CliError> {
        net.epsilon
            .or(default_epsilon)
            .ok_or_else(|| usage(format!("--net {flag} needs --epsilon")))
    };
    match net.net {
        NetKind::Greedy => Ok(NetParams::Greedy {
            epsilon: epsilon("greedy")?,
        }),
        NetKind::Maxmin => Ok(NetParams::MaxMin {
            epsilon: epsilon("maxmin")?,
            max_centers: net.max_centers,
        }),
        NetKind::Kmeans => Ok(NetParams::KMeans {
            k: net.k.ok_or_else(|| usage("--net kmeans needs --k"))?,
            seed: net.seed,
            max_iters: net.kmeans_iters,
        }),
    }
}

fn parse_color(spec: &str) -> Result<(String, Aggregator), CliError> {
    match spec.split_once(':') {
        None => Ok((spec.to_string(), Aggregator::Mean)),
        Some((name, agg)) => {
            let agg = agg
                .parse::<Aggregator>()
                .map_err(|e| usage(e.to_string()))?;
            Ok((name.to_string(), agg))
        }
    }
}

fn colorings(
    color: &Option<String>,
    cloud: &PointCloud,
    graph: &BmGraph,
) -> Result<Vec<VertexColoring>, CliError> {
    let Some(spec) = color else {
        return Ok(Vec::new());
    };
    let (name, agg) = parse_color(spec)?;
    let values = cloud.attribute(&name).ok_or_else(|| {
        let known: Vec<&str> = cloud.attribute_names().collect();
        CliError::Data(format!(
            "no attribute named {name:?} in the input (known: {known:?})"
        ))
    })?;
    Ok(vec![vertex_coloring(graph, &name, values, agg)?])
}

fn init_threads(threads: usize) -> Result<(), CliError> {
    if threads == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))
}

// ---------------------------------------------------------------------------
// shared output helpers

fn summary_line(graph: &BmGraph) -> String {
    let (cc, _) = connected_components(graph);
    format!(
        "V={} E={} CC={} cycle_rank={}",
        graph.vertex_count(),
        graph.edge_count(),
        cc,
        cycle_rank(graph)
    )
}

fn export_graph(
    graph: &BmGraph,
    metric: &Metric,
    colorings: &[VertexColoring],
    include_covered: bool,
    json: Option<&Path>,
    dot: Option<&Path>,
    html: Option<&Path>,
) -> Result<(), CliError> {
    let doc = GraphDocument::from_graph(graph, metric.name(), colorings, include_covered);
    let key = colorings.first().map(coloring_key);
    if let Some(path) = json {
        write_graph_json(&doc, path)?;
    }
    if let Some(path) = dot {
        write_dot(&doc, key.as_deref(), path)?;
    }
    if let Some(path) = html {
        write_html(&doc, key.as_deref(), path)?;
    }
    Ok(())
}

/// "out.json" -> "out_3.json"; extensionless paths get a bare "_3" suffix.
fn indexed_path(path: &Path, index: usize) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{index}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{index}"),
    };
    path.with_file_name(name)
}

fn resolve_denoise_threshold(
    graph: &BmGraph,
    denoise_min: Option<usize>,
    denoise_quantile: Option<f64>,
) -> Result<usize, CliError> {
    match denoise_min {
        Some(n) => Ok(n),
        None => {
            let q = denoise_quantile.unwrap_or(DEFAULT_DENSITY_QUANTILE);
            Ok(suggest_density_threshold(graph, q)?)
        }
    }
}

// ---------------------------------------------------------------------------
// subcommands

fn cmd_build(args: &BuildArgs) -> Result<(), CliError> {
    init_threads(args.common.threads)?;
    let (cloud, metric) = load_source(&args.common.source, &args.common.csv, args.common.metric)?;
    let params = net_params(&args.common.net, None)?;
    let cover = build_cover(&cloud, &metric, &params)?;
    let mut graph = build_bm_graph(&cover);

    if let Some(max_dim) = args.max_dim {
        let nerve = build_nerve(&cover, max_dim, args.cover_guard)?;
        let counts = nerve.counts_by_dim();
        let parts: Vec<String> = counts
            .iter()
            .enumerate()
            .map(|(d, c)| format!("dim{d}={c}"))
            .collect();
        println!("nerve: {}", parts.join(" "));
    }

    if args.denoise_min.is_some() || args.denoise_quantile.is_some() {
        let n_min = resolve_denoise_threshold(&graph, args.denoise_min, args.denoise_quantile)?;
        let before = graph.vertex_count();
        graph = filter_low_density(&graph, n_min);
        println!(
            "removed {} vertices (n_min={n_min})",
            before - graph.vertex_count()
        );
    }

    let colorings = colorings(&args.common.color, &cloud, &graph)?;
    export_graph(
        &graph,
        &metric,
        &colorings,
        args.common.export.covered,
        args.common.export.out_json.as_deref(),
        args.common.export.out_dot.as_deref(),
        args.common.export.out_html.as_deref(),
    )?;
    println!("{}", summary_line(&graph));
    Ok(())
}

fn cmd_multiscale(args: &MultiscaleArgs) -> Result<(), CliError> {
    init_threads(args.common.threads)?;
    let (cloud, metric) = load_source(&args.common.source, &args.common.csv, args.common.metric)?;
    let params = net_params(&args.common.net, args.radii.first().copied())?;
    let ladder = multiscale_bm(&cloud, &metric, &args.radii, &params)?;

    for (i, graph) in ladder.graphs().iter().enumerate() {
        let colorings = colorings(&args.common.color, &cloud, graph)?;
        let json = args.common.export.out_json.as_ref().map(|p| indexed_path(p, i));
        let dot = args.common.export.out_dot.as_ref().map(|p| indexed_path(p, i));
        let html = args.common.export.out_html.as_ref().map(|p| indexed_path(p, i));
        export_graph(
            graph,
            &metric,
            &colorings,
            args.common.export.covered,
            json.as_deref(),
            dot.as_deref(),
            html.as_deref(),
        )?;
        println!("radius={} {}", ladder.radii()[i], summary_line(graph));
    }

    let report = check_inclusions(&ladder);
    if report.pass() {
        println!("inclusions: pass");
        Ok(())
    } else {
        println!("inclusions: FAIL");
        for violation in report.violations() {
            eprintln!("{violation}");
        }
        Err(CliError::Internal(format!(
            "ladder violates nesting: {}",
            report.first().expect("non-empty violations")
        )))
    }
}

fn cmd_dimension(args: &DimensionArgs) -> Result<(), CliError> {
    init_threads(args.threads)?;
    let base: GeneratorSpec = args.gen.parse()?;
    let metric = plain_metric(args.metric.unwrap_or(MetricKind::Euclidean))?;
    let params = net_params(&args.net, args.radii.first().copied())?;

    let specs: Vec<(Option<usize>, GeneratorSpec)> = if args.dims.is_empty() {
        vec![(None, base)]
    } else {
        args.dims
            .iter()
            .map(|&d| match base {
                GeneratorSpec::Cube { n, side, seed, .. } => {
                    Ok((Some(d), GeneratorSpec::Cube { n, d, side, seed }))
                }
                _ => Err(usage("--dims only applies to cube generators")),
            })
            .collect::<Result<_, _>>()?
    };

    let many = specs.len() > 1;
    for (i, (dim, spec)) in specs.iter().enumerate() {
        let source = SweepSource::Generator(spec.clone());
        let sweep = dimension_sweep(
            &source,
            &metric,
            &args.radii,
            args.reps,
            args.net.seed,
            &params,
        )?;
        let plateau = plateau_degree(&sweep)?;
        match dim {
            Some(d) => println!("d={d} plateau={plateau}"),
            None => println!("plateau={plateau}"),
        }
        if let Some(path) = &args.out_csv {
            let path = if many {
                indexed_path(path, i)
            } else {
                path.clone()
            };
            write_sweep_csv(&sweep, path)?;
        }
    }
    Ok(())
}

fn cmd_denoise(args: &DenoiseArgs) -> Result<(), CliError> {
    init_threads(args.common.threads)?;
    if let Some(q) = args.denoise_quantile {
        if !(0.0..=1.0).contains(&q) {
            return Err(usage(format!(
                "--denoise-quantile must lie in [0, 1], got {q}"
            )));
        }
    }
    let (cloud, metric) = load_source(&args.common.source, &args.common.csv, args.common.metric)?;
    let params = net_params(&args.common.net, None)?;
    let cover = build_cover(&cloud, &metric, &params)?;
    let graph = build_bm_graph(&cover);

    let n_min = resolve_denoise_threshold(&graph, args.denoise_min, args.denoise_quantile)?;
    let filtered = filter_low_density(&graph, n_min);
    println!(
        "removed {} vertices (n_min={n_min})",
        graph.vertex_count() - filtered.vertex_count()
    );

    let colorings = colorings(&args.common.color, &cloud, &filtered)?;
    export_graph(
        &filtered,
        &metric,
        &colorings,
        args.common.export.covered,
        args.common.export.out_json.as_deref(),
        args.common.export.out_dot.as_deref(),
        args.common.export.out_html.as_deref(),
    )?;
    println!("{}", summary_line(&filtered));
    Ok(())
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.cmd {
        Cmd::Build(args) => cmd_build(args),
        Cmd::Multiscale(args) => cmd_multiscale(args),
        Cmd::Dimension(args) => cmd_dimension(args),
        Cmd::Denoise(args) => cmd_denoise(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}
