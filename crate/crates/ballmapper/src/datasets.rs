//! Seeded synthetic point clouds and bundled real data.
//!
//! Every generator is a pure function of its parameters: the PRNG is
//! ChaCha8 keyed by the caller's seed, and floating-point draws divide the
//! top 53 bits of each 64-bit output by 2^53, so identical calls produce
//! identical bytes on every platform. Draw order per point is documented on
//! each generator; changing it is a breaking change.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::metric::{MetricError, PointCloud};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("invalid generator parameters: {0}")]
    InvalidParam(String),
    #[error("row {row} has {found} columns, expected {expected}")]
    ColumnCount {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("row {row}, column {col}: cannot parse {value:?} as a number")]
    BadNumber {
        row: usize,
        col: usize,
        value: String,
    },
    #[error("row {row}: unknown class label {label:?}")]
    UnknownLabel { row: usize, label: String },
    #[error("generator spec must look like kind:key=value,... got {0:?}")]
    BadSpecSyntax(String),
    #[error("unknown generator kind {0:?}; expected cube, torus, circle, y_junction, window, or x_noise")]
    UnknownKind(String),
    #[error("generator {kind}: missing required parameter {name}")]
    MissingParam {
        kind: &'static str,
        name: &'static str,
    },
    #[error("generator {kind}: unknown parameter {name:?}")]
    UnknownParam { kind: &'static str, name: String },
    #[error("generator parameter {name} has invalid value {value:?}")]
    BadParam { name: String, value: String },
    #[error("image file {path} has {found} bytes, expected {expected}")]
    ImageSize {
        path: String,
        found: usize,
        expected: usize,
    },
    #[error("directory {0} contains no regular files")]
    EmptyDirectory(String),
}

/// Seeded draw helper; all generators consume randomness through it.
struct Draws(ChaCha8Rng);

impl Draws {
    fn new(seed: u64) -> Self {
        Draws(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in [0, 1) with 53 explicit mantissa bits.
    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform in [0, 2π).
    fn angle(&mut self) -> f64 {
        2.0 * PI * self.unit()
    }

    /// Uniform choice among `k` alternatives (k is tiny here; the modulo
    /// bias of ~k/2^64 is far below anything observable).
    fn pick(&mut self, k: u64) -> u64 {
        self.0.next_u64() % k
    }
}

fn ensure(cond: bool, msg: &str) -> Result<(), DatasetError> {
    if cond {
        Ok(())
    } else {
        Err(DatasetError::InvalidParam(msg.to_string()))
    }
}

/// `n` points i.i.d. uniform over `[0, side]^d`. Draws: d coordinates per
/// point, in coordinate order.
pub fn sample_cube(n: usize, d: usize, side: f64, seed: u64) -> Result<PointCloud<f64>, DatasetError> {
    ensure(n >= 1, "n must be at least 1")?;
    ensure(d >= 1, "d must be at least 1")?;
    ensure(side > 0.0 && side.is_finite(), "side must be positive")?;
    let mut draws = Draws::new(seed);
    let mut coords = Vec::with_capacity(n * d);
    for _ in 0..n * d {
        coords.push(draws.unit() * side);
    }
    Ok(PointCloud::from_flat(d, coords)?)
}

/// `n` points on the torus of major radius `major` and tube radius `minor`
/// embedded in R³. Draws per point: the two angles u, v.
pub fn sample_torus(
    n: usize,
    major: f64,
    minor: f64,
    seed: u64,
) -> Result<PointCloud<f64>, DatasetError> {
    ensure(n >= 1, "n must be at least 1")?;
    ensure(
        major > minor && minor > 0.0 && major.is_finite(),
        "torus radii must satisfy major > minor > 0",
    )?;
    let mut draws = Draws::new(seed);
    let mut coords = Vec::with_capacity(n * 3);
    for _ in 0..n {
        let u = draws.angle();
        let v = draws.angle();
        let ring = major + minor * v.cos();
        coords.push(ring * u.cos());
        coords.push(ring * u.sin());
        coords.push(minor * v.sin());
    }
    Ok(PointCloud::from_flat(3, coords)?)
}

/// `n` points on a circle of the given radius in the x-y plane of
/// `ambient_dim`-dimensional space (remaining coordinates zero). Draws per
/// point: one angle.
pub fn sample_circle(
    n: usize,
    radius: f64,
    ambient_dim: usize,
    seed: u64,
) -> Result<PointCloud<f64>, DatasetError> {
    ensure(n >= 1, "n must be at least 1")?;
    ensure(radius > 0.0 && radius.is_finite(), "radius must be positive")?;
    ensure(ambient_dim >= 2, "ambient dimension must be at least 2")?;
    let mut draws = Draws::new(seed);
    let mut coords = Vec::with_capacity(n * ambient_dim);
    for _ in 0..n {
        let theta = draws.angle();
        coords.push(radius * theta.cos());
        coords.push(radius * theta.sin());
        coords.extend(std::iter::repeat_n(0.0, ambient_dim - 2));
    }
    Ok(PointCloud::from_flat(ambient_dim, coords)?)
}

/// `n` points on three arms meeting at the origin 120° apart (pointing up,
/// down-left, down-right), sampled uniformly along the arms with jitter of
/// ±arm_length/100 per coordinate. Draws per point: arm choice, arc
/// position, two jitter offsets.
pub fn y_junction(n: usize, arm_length: f64, seed: u64) -> Result<PointCloud<f64>, DatasetError> {
    ensure(n >= 1, "n must be at least 1")?;
    ensure(
        arm_length > 0.0 && arm_length.is_finite(),
        "arm length must be positive",
    )?;
    let mut draws = Draws::new(seed);
    let jitter = arm_length / 100.0;
    let arms: [(f64, f64); 3] = [
        ((PI / 2.0).cos(), (PI / 2.0).sin()),
        ((PI / 2.0 + 2.0 * PI / 3.0).cos(), (PI / 2.0 + 2.0 * PI / 3.0).sin()),
        ((PI / 2.0 + 4.0 * PI / 3.0).cos(), (PI / 2.0 + 4.0 * PI / 3.0).sin()),
    ];
    let mut coords = Vec::with_capacity(n * 2);
    for _ in 0..n {
        let (dx, dy) = arms[draws.pick(3) as usize];
        let t = draws.unit() * arm_length;
        let jx = draws.range(-jitter, jitter);
        let jy = draws.range(-jitter, jitter);
        coords.push(dx * t + jx);
        coords.push(dy * t + jy);
    }
    Ok(PointCloud::from_flat(2, coords)?)
}

/// `n` points uniform on the square annulus `[-outer, outer]²` minus the
/// open square `(-inner, inner)²`, by rejection. Draws per point: pairs of
/// coordinates until one lands outside the hole.
pub fn window(n: usize, outer: f64, inner: f64, seed: u64) -> Result<PointCloud<f64>, DatasetError> {
    ensure(n >= 1, "n must be at least 1")?;
    ensure(
        outer > inner && inner > 0.0 && outer.is_finite(),
        "window requires outer > inner > 0",
    )?;
    let mut draws = Draws::new(seed);
    let mut coords = Vec::with_capacity(n * 2);
    for _ in 0..n {
        loop {
            let x = draws.range(-outer, outer);
            let y = draws.range(-outer, outer);
            if x.abs().max(y.abs()) >= inner {
                coords.push(x);
                coords.push(y);
                break;
            }
        }
    }
    Ok(PointCloud::from_flat(2, coords)?)
}

/// An X of two diagonal segments across `[-box_half, box_half]²` with
/// `n_signal` points, plus `round(n_signal · noise_pct)` uniform noise
/// points over the same square. Signal points come first; the `signal`
/// attribute is 1 for them and 0 for noise. Draws per signal point:
/// diagonal choice, position; per noise point: two coordinates.
pub fn x_shape_with_noise(
    n_signal: usize,
    noise_pct: f64,
    box_half: f64,
    seed: u64,
) -> Result<PointCloud<f64>, DatasetError> {
    ensure(n_signal >= 1, "n must be at least 1")?;
    ensure(
        noise_pct >= 0.0 && noise_pct.is_finite(),
        "noise_pct must be nonnegative",
    )?;
    ensure(
        box_half > 0.0 && box_half.is_finite(),
        "box half-width must be positive",
    )?;
    let n_noise = (n_signal as f64 * noise_pct).round() as usize;
    let mut draws = Draws::new(seed);
    let mut coords = Vec::with_capacity((n_signal + n_noise) * 2);
    for _ in 0..n_signal {
        let flip = draws.pick(2) == 1;
        let t = draws.range(-box_half, box_half);
        coords.push(t);
        coords.push(if flip { -t } else { t });
    }
    for _ in 0..n_noise {
        let x = draws.range(-box_half, box_half);
        let y = draws.range(-box_half, box_half);
        coords.push(x);
        coords.push(y);
    }
    let mut label = vec![1.0; n_signal];
    label.extend(std::iter::repeat_n(0.0, n_noise));
    Ok(PointCloud::from_flat(2, coords)?.with_attribute("signal", label)?)
}

/// A generator invocation, parseable from `kind:key=value,...` strings.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Cube { n: usize, d: usize, side: f64, seed: u64 },
    Torus { n: usize, major: f64, minor: f64, seed: u64 },
    Circle { n: usize, radius: f64, ambient: usize, seed: u64 },
    YJunction { n: usize, arm: f64, seed: u64 },
    Window { n: usize, outer: f64, inner: f64, seed: u64 },
    XNoise { n: usize, noise_pct: f64, box_half: f64, seed: u64 },
}

impl GeneratorSpec {
    pub fn seed(&self) -> u64 {
        match *self {
            GeneratorSpec::Cube { seed, .. }
            | GeneratorSpec::Torus { seed, .. }
            | GeneratorSpec::Circle { seed, .. }
            | GeneratorSpec::YJunction { seed, .. }
            | GeneratorSpec::Window { seed, .. }
            | GeneratorSpec::XNoise { seed, .. } => seed,
        }
    }

    /// The same generator with its seed replaced; repetition harnesses use
    /// this to derive per-run seeds.
    pub fn with_seed(&self, seed: u64) -> GeneratorSpec {
        let mut spec = self.clone();
        match &mut spec {
            GeneratorSpec::Cube { seed: s, .. }
            | GeneratorSpec::Torus { seed: s, .. }
            | GeneratorSpec::Circle { seed: s, .. }
            | GeneratorSpec::YJunction { seed: s, .. }
            | GeneratorSpec::Window { seed: s, .. }
            | GeneratorSpec::XNoise { seed: s, .. } => *s = seed,
        }
        spec
    }

    pub fn generate(&self) -> Result<PointCloud<f64>, DatasetError> {
        match *self {
            GeneratorSpec::Cube { n, d, side, seed } => sample_cube(n, d, side, seed),
            GeneratorSpec::Torus { n, major, minor, seed } => sample_torus(n, major, minor, seed),
            GeneratorSpec::Circle { n, radius, ambient, seed } => {
                sample_circle(n, radius, ambient, seed)
            }
            GeneratorSpec::YJunction { n, arm, seed } => y_junction(n, arm, seed),
            GeneratorSpec::Window { n, outer, inner, seed } => window(n, outer, inner, seed),
            GeneratorSpec::XNoise { n, noise_pct, box_half, seed } => {
                x_shape_with_noise(n, noise_pct, box_half, seed)
            }
        }
    }
}

/// Key-value bag for spec parsing; tracks unconsumed keys so typos fail
/// loudly instead of silently using a default.
struct Params {
    kind: &'static str,
    map: BTreeMap<String, String>,
}

impl Params {
    fn parse<V: FromStr>(&mut self, name: &'static str) -> Result<Option<V>, DatasetError> {
        match self.map.remove(name) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| DatasetError::BadParam {
                name: name.to_string(),
                value: raw,
            }),
        }
    }

    fn require<V: FromStr>(&mut self, name: &'static str) -> Result<V, DatasetError> {
        self.parse(name)?.ok_or(DatasetError::MissingParam {
            kind: self.kind,
            name,
        })
    }

    fn or_default<V: FromStr>(&mut self, name: &'static str, default: V) -> Result<V, DatasetError> {
        Ok(self.parse(name)?.unwrap_or(default))
    }

    fn finish(self) -> Result<(), DatasetError> {
        match self.map.into_keys().next() {
            None => Ok(()),
            Some(name) => Err(DatasetError::UnknownParam {
                kind: self.kind,
                name,
            }),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = DatasetError;

    /// Examples: `cube:n=5000,d=3,side=10,seed=7`,
    /// `circle:n=500,radius=1,ambient=3,seed=1`,
    /// `x_noise:n=400,noise=1.0,box=10,seed=2`. The seed is always
    /// required; geometry parameters default to the documented values.
    fn from_str(s: &str) -> Result<Self, DatasetError> {
        let (kind_raw, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), r),
            None => (s.trim(), ""),
        };
        let kind: &'static str = match kind_raw {
            "cube" => "cube",
            "torus" => "torus",
            "circle" => "circle",
            "y_junction" => "y_junction",
            "window" => "window",
            "x_noise" => "x_noise",
            other => return Err(DatasetError::UnknownKind(other.to_string())),
        };
        let mut map = BTreeMap::new();
        for piece in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = piece
                .split_once('=')
                .ok_or_else(|| DatasetError::BadSpecSyntax(s.to_string()))?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        let mut p = Params { kind, map };
        let spec = match kind {
            "cube" => GeneratorSpec::Cube {
                n: p.require("n")?,
                d: p.or_default("d", 2)?,
                side: p.or_default("side", 10.0)?,
                seed: p.require("seed")?,
            },
            "torus" => GeneratorSpec::Torus {
                n: p.require("n")?,
                major: p.or_default("major", 2.0)?,
                minor: p.or_default("minor", 1.0)?,
                seed: p.require("seed")?,
            },
            "circle" => GeneratorSpec::Circle {
                n: p.require("n")?,
                radius: p.or_default("radius", 1.0)?,
                ambient: p.or_default("ambient", 2)?,
                seed: p.require("seed")?,
            },
            "y_junction" => GeneratorSpec::YJunction {
                n: p.require("n")?,
                arm: p.or_default("arm", 10.0)?,
                seed: p.require("seed")?,
            },
            "window" => GeneratorSpec::Window {
                n: p.require("n")?,
                outer: p.or_default("outer", 10.0)?,
                inner: p.or_default("inner", 5.0)?,
                seed: p.require("seed")?,
            },
            "x_noise" => GeneratorSpec::XNoise {
                n: p.require("n")?,
                noise_pct: p.or_default("noise", 1.0)?,
                box_half: p.or_default("box", 10.0)?,
                seed: p.require("seed")?,
            },
            _ => unreachable!("kind validated above"),
        };
        p.finish()?;
        Ok(spec)
    }
}

/// Reads the bundled Iris table: four numeric features plus a class label,
/// exposed as three disjoint 0/1 attribute columns (setosa, versicolor,
/// virginica).
pub fn load_iris(path: impl AsRef<Path>) -> Result<PointCloud<f64>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;
    let mut rows = Vec::new();
    let mut one_hot: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 5 {
            return Err(DatasetError::ColumnCount {
                row,
                found: record.len(),
                expected: 5,
            });
        }
        let mut coords = Vec::with_capacity(4);
        for col in 0..4 {
            let cell = &record[col];
            let value: f64 = cell.parse().map_err(|_| DatasetError::BadNumber {
                row,
                col,
                value: cell.to_string(),
            })?;
            coords.push(value);
        }
        let label = &record[4];
        let class = match label.trim_start_matches("Iris-") {
            "setosa" => 0,
            "versicolor" => 1,
            "virginica" => 2,
            _ => {
                return Err(DatasetError::UnknownLabel {
                    row,
                    label: label.to_string(),
                })
            }
        };
        for (i, column) in one_hot.iter_mut().enumerate() {
            column.push(if i == class { 1.0 } else { 0.0 });
        }
        rows.push(coords);
    }
    let [setosa, versicolor, virginica] = one_hot;
    Ok(PointCloud::from_rows(rows)?
        .with_attribute("setosa", setosa)?
        .with_attribute("versicolor", versicolor)?
        .with_attribute("virginica", virginica)?)
}

/// Loads every regular file of a directory as a raw 8-bit grayscale raster
/// of exactly `width × height` bytes, flattened row-major to one point per
/// image with coordinates in [0, 255]. Files are taken in filename order.
pub fn load_grayscale_dir(
    dir: impl AsRef<Path>,
    width: usize,
    height: usize,
) -> Result<PointCloud<f64>, DatasetError> {
    ensure(width >= 1 && height >= 1, "image dimensions must be positive")?;
    let dir = dir.as_ref();
    let mut files: Vec<_> = std::fs::read_dir(dir)?
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|e| e.path().is_file())
        .map(|e| e.path())
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(DatasetError::EmptyDirectory(dir.display().to_string()));
    }
    let expected = width * height;
    let mut rows = Vec::with_capacity(files.len());
    for path in files {
        let bytes = std::fs::read(&path)?;
        if bytes.len() != expected {
            return Err(DatasetError::ImageSize {
                path: path.display().to_string(),
                found: bytes.len(),
                expected,
            });
        }
        rows.push(bytes.into_iter().map(f64::from).collect());
    }
    Ok(PointCloud::from_rows(rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iris_path() -> std::path::PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/iris.csv")
    }

    #[test]
    fn cube_range_determinism_and_moments() {
        let a = sample_cube(10_000, 2, 10.0, 99).unwrap();
        let b = sample_cube(10_000, 2, 10.0, 99).unwrap();
        assert_eq!(a, b, "same seed must reproduce bytes");
        let c = sample_cube(10_000, 2, 10.0, 100).unwrap();
        assert_ne!(a, c, "different seed must differ");
        for x in 0..a.len() {
            for &v in a.row(x) {
                assert!((0.0..=10.0).contains(&v));
            }
        }
        // Uniform[0,10]: mean 5 (3σ ≈ 0.087), variance 100/12 (3σ ≈ 0.23).
        for col in 0..2 {
            let values: Vec<f64> = (0..a.len()).map(|x| a.row(x)[col]).collect();
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            assert!((mean - 5.0).abs() < 0.1, "mean {mean}");
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                / (values.len() - 1) as f64;
            assert!((var - 100.0 / 12.0).abs() < 0.25, "variance {var}");
        }
    }

    #[test]
    fn torus_points_sit_on_the_tube() {
        let cloud = sample_torus(2000, 2.0, 1.0, 5).unwrap();
        for x in 0..cloud.len() {
            let p = cloud.row(x);
            let ring = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let tube = ((ring - 2.0).powi(2) + p[2] * p[2]).sqrt();
            assert!((tube - 1.0).abs() < 1e-9, "point {x} off tube: {tube}");
        }
        assert!(sample_torus(10, 1.0, 2.0, 0).is_err(), "major must exceed minor");
    }

    #[test]
    fn torus_angle_is_uniform_by_chi_square() {
        let cloud = sample_torus(10_000, 2.0, 1.0, 12).unwrap();
        let mut bins = [0usize; 8];
        for x in 0..cloud.len() {
            let p = cloud.row(x);
            let u = p[1].atan2(p[0]).rem_euclid(2.0 * PI);
            bins[((u / (2.0 * PI) * 8.0) as usize).min(7)] += 1;
        }
        let expected = cloud.len() as f64 / 8.0;
        let chi2: f64 = bins
            .iter()
            .map(|&b| (b as f64 - expected).powi(2) / expected)
            .sum();
        // 7 degrees of freedom; 20.3 is the 0.5% tail. Seeded, so stable.
        assert!(chi2 < 20.0, "chi-square {chi2}, bins {bins:?}");
    }

    #[test]
    fn circle_radius_and_padding() {
        let cloud = sample_circle(500, 1.0, 3, 4).unwrap();
        assert_eq!(cloud.dim(), 3);
        for x in 0..cloud.len() {
            let p = cloud.row(x);
            let norm = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((norm - 1.0).abs() < 1e-9);
            assert_eq!(p[2], 0.0);
        }
        let mut bins = [0usize; 8];
        for x in 0..cloud.len() {
            let p = cloud.row(x);
            let t = p[1].atan2(p[0]).rem_euclid(2.0 * PI);
            bins[((t / (2.0 * PI) * 8.0) as usize).min(7)] += 1;
        }
        let expected = cloud.len() as f64 / 8.0;
        let chi2: f64 = bins
            .iter()
            .map(|&b| (b as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 20.0, "chi-square {chi2}");
    }

    #[test]
    fn y_junction_points_hug_the_arms() {
        let arm = 10.0;
        let cloud = y_junction(600, arm, 9).unwrap();
        let jitter = arm / 100.0;
        let arms = [
            PI / 2.0,
            PI / 2.0 + 2.0 * PI / 3.0,
            PI / 2.0 + 4.0 * PI / 3.0,
        ];
        for x in 0..cloud.len() {
            let p = cloud.row(x);
            // Distance to the nearest arm segment is at most the jitter
            // box diagonal.
            let dist = arms
                .iter()
                .map(|a| {
                    let (dx, dy) = (a.cos(), a.sin());
                    let t = (p[0] * dx + p[1] * dy).clamp(0.0, arm);
                    ((p[0] - t * dx).powi(2) + (p[1] - t * dy).powi(2)).sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            assert!(dist <= jitter * 2f64.sqrt() + 1e-12, "point {x}: {dist}");
        }
    }

    #[test]
    fn window_avoids_the_hole() {
        let cloud = window(2000, 10.0, 5.0, 13).unwrap();
        for x in 0..cloud.len() {
            let p = cloud.row(x);
            assert!(p[0].abs() <= 10.0 && p[1].abs() <= 10.0);
            assert!(p[0].abs().max(p[1].abs()) >= 5.0, "point {x} inside hole");
        }
        assert!(window(10, 5.0, 5.0, 0).is_err());
    }

    #[test]
    fn x_noise_counts_and_labels() {
        let cloud = x_shape_with_noise(400, 1.0, 10.0, 21).unwrap();
        assert_eq!(cloud.len(), 800);
        let signal = cloud.attribute("signal").unwrap();
        assert_eq!(signal.iter().sum::<f64>(), 400.0);
        for (x, &sig) in signal.iter().enumerate() {
            let p = cloud.row(x);
            if sig == 1.0 {
                assert!(
                    (p[0].abs() - p[1].abs()).abs() < 1e-12,
                    "signal point {x} off the diagonals"
                );
            }
        }
        // Half noise rounds to the nearest count.
        assert_eq!(x_shape_with_noise(10, 0.5, 1.0, 0).unwrap().len(), 15);
        assert_eq!(x_shape_with_noise(10, 0.0, 1.0, 0).unwrap().len(), 10);
    }

    #[test]
    fn spec_parsing_round_trip_and_errors() {
        let spec: GeneratorSpec = "cube:n=5000,d=3,side=10,seed=7".parse().unwrap();
        assert_eq!(
            spec,
            GeneratorSpec::Cube { n: 5000, d: 3, side: 10.0, seed: 7 }
        );
        let with_defaults: GeneratorSpec = "torus:n=1300,seed=3".parse().unwrap();
        assert_eq!(
            with_defaults,
            GeneratorSpec::Torus { n: 1300, major: 2.0, minor: 1.0, seed: 3 }
        );
        assert_eq!(
            "circle:n=500,radius=1,ambient=3,seed=1"
                .parse::<GeneratorSpec>()
                .unwrap()
                .generate()
                .unwrap()
                .dim(),
            3
        );
        assert!(matches!(
            "sphere:n=10,seed=0".parse::<GeneratorSpec>(),
            Err(DatasetError::UnknownKind(_))
        ));
        assert!(matches!(
            "cube:n=10".parse::<GeneratorSpec>(),
            Err(DatasetError::MissingParam { name: "seed", .. })
        ));
        assert!(matches!(
            "cube:n=10,seed=1,sides=4".parse::<GeneratorSpec>(),
            Err(DatasetError::UnknownParam { .. })
        ));
        assert!(matches!(
            "cube:n=ten,seed=1".parse::<GeneratorSpec>(),
            Err(DatasetError::BadParam { .. })
        ));
        assert!(matches!(
            "cube:n,seed=1".parse::<GeneratorSpec>(),
            Err(DatasetError::BadSpecSyntax(_))
        ));
    }

    #[test]
    fn iris_shape_and_one_hot() {
        let iris = load_iris(iris_path()).unwrap();
        assert_eq!(iris.len(), 150);
        assert_eq!(iris.dim(), 4);
        let s = iris.attribute("setosa").unwrap();
        let ve = iris.attribute("versicolor").unwrap();
        let vi = iris.attribute("virginica").unwrap();
        assert_eq!(s.iter().sum::<f64>(), 50.0);
        assert_eq!(ve.iter().sum::<f64>(), 50.0);
        assert_eq!(vi.iter().sum::<f64>(), 50.0);
        for x in 0..150 {
            assert_eq!(s[x] + ve[x] + vi[x], 1.0, "row {x} not one-hot");
        }
    }

    #[test]
    fn iris_loader_rejects_malformed_rows() {
        let dir = tempfile::tempdir().unwrap();
        let bad_cols = dir.path().join("cols.csv");
        std::fs::write(&bad_cols, "1.0,2.0,3.0,Iris-setosa\n").unwrap();
        assert!(matches!(
            load_iris(&bad_cols),
            Err(DatasetError::ColumnCount { row: 0, found: 4, expected: 5 })
        ));
        let bad_cell = dir.path().join("cell.csv");
        std::fs::write(&bad_cell, "1.0,2.0,3.0,4.0,Iris-setosa\n1.0,tall,3.0,4.0,Iris-setosa\n")
            .unwrap();
        assert!(matches!(
            load_iris(&bad_cell),
            Err(DatasetError::BadNumber { row: 1, col: 1, .. })
        ));
        let bad_label = dir.path().join("label.csv");
        std::fs::write(&bad_label, "1.0,2.0,3.0,4.0,Iris-gigantea\n").unwrap();
        assert!(matches!(
            load_iris(&bad_label),
            Err(DatasetError::UnknownLabel { row: 0, .. })
        ));
    }

    #[test]
    fn grayscale_dir_flattens_in_filename_order() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("b.raw"), [10u8, 20, 30, 40]).unwrap();
        std::fs::write(dir.path().join("a.raw"), [1u8, 2, 3, 4]).unwrap();
        let cloud = load_grayscale_dir(dir.path(), 2, 2).unwrap();
        assert_eq!(cloud.len(), 2);
        assert_eq!(cloud.dim(), 4);
        assert_eq!(cloud.row(0), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(cloud.row(1), &[10.0, 20.0, 30.0, 40.0]);

        std::fs::write(dir.path().join("c.raw"), [9u8; 3]).unwrap();
        assert!(matches!(
            load_grayscale_dir(dir.path(), 2, 2),
            Err(DatasetError::ImageSize { found: 3, expected: 4, .. })
        ));

        let empty = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_grayscale_dir(empty.path(), 2, 2),
            Err(DatasetError::EmptyDirectory(_))
        ));
    }
}
