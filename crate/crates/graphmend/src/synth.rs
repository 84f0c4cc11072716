//! Reproducible synthetic time-varying graph signals, sampling masks and
//! noise.
//!
//! The generator follows the random-walk construction: vertices drawn
//! uniformly in a square, a kNN graph with inverse-square-distance weights,
//! and a signal that starts from a standard normal snapshot and evolves by
//! `x_t = x_{t-1} + L^{-1/2} f_t` with `f_t` rescaled to a fixed norm
//! `kappa`, so consecutive snapshots differ by a graph-smooth increment.
//! Repeating the block forwards and backwards yields the low-rank variant:
//! at most `time_steps` distinct columns regardless of the final width.
//!
//! Everything is driven by explicit seeds. A single seed value may safely
//! be shared between the mask and the noise of one trial: each consumer
//! draws from its own dedicated RNG stream.

use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    build_knn_graph, laplacian, pseudo_inverse_sqrt, EdgeWeighting, LaplacianKind, LaplacianSpec,
    SpatialGraph,
};

// Distinct ChaCha streams so one trial seed can drive every randomized
// stage without correlation.
const COORDS_STREAM: u64 = 0;
const SIGNAL_STREAM: u64 = 1;
const MASK_STREAM: u64 = 2;
const NOISE_STREAM: u64 = 3;

/// Additive measurement noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseSpec {
    #[default]
    None,
    Gaussian {
        std: f64,
    },
    Laplace {
        scale: f64,
    },
}

impl NoiseSpec {
    /// The scalar parameter reported in result tables: the standard
    /// deviation for Gaussian noise, the scale for Laplace, zero for none.
    pub fn parameter(&self) -> f64 {
        match self {
            NoiseSpec::None => 0.0,
            NoiseSpec::Gaussian { std } => *std,
            NoiseSpec::Laplace { scale } => *scale,
        }
    }
}

impl std::str::FromStr for NoiseSpec {
    type Err = Error;

    /// Accepts `none`, `gaussian:0.1`, `laplace:0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "none" {
            return Ok(NoiseSpec::None);
        }
        let (kind, value) = lower.split_once(':').ok_or_else(|| {
            Error::InvalidParameter(format!("noise spec '{s}' is not kind:value"))
        })?;
        let value: f64 = value
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad noise parameter in '{s}'")))?;
        if value < 0.0 {
            return Err(Error::InvalidParameter(
                "noise parameter must be nonnegative".into(),
            ));
        }
        match kind {
            "gaussian" => Ok(NoiseSpec::Gaussian { std: value }),
            "laplace" => Ok(NoiseSpec::Laplace { scale: value }),
            _ => Err(Error::InvalidParameter(format!(
                "unknown noise kind '{kind}'"
            ))),
        }
    }
}

/// Parameters of the synthetic construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    /// Vertex count.
    pub nodes: usize,
    /// Length of the base random-walk block.
    pub time_steps: usize,
    /// Exact norm of each innovation `f_t`.
    pub kappa: f64,
    /// Neighbours in the kNN construction.
    pub knn_k: usize,
    /// Side length of the square the vertices are drawn from.
    pub area: f64,
    /// Palindromic repetitions of the base block; `0` emits the plain
    /// block itself.
    pub repeats: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            nodes: 100,
            time_steps: 10,
            kappa: 1.0,
            knn_k: 5,
            area: 100.0,
            repeats: 10,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    /// Width of the generated matrix.
    pub fn width(&self) -> usize {
        if self.repeats == 0 {
            self.time_steps
        } else {
            2 * self.time_steps * self.repeats
        }
    }
}

/// Draws the vertex coordinates of the spec's square uniformly at random.
pub fn generate_coords(spec: &SyntheticSpec) -> DMatrix<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    rng.set_stream(COORDS_STREAM);
    DMatrix::from_fn(spec.nodes, 2, |_, _| rng.random::<f64>() * spec.area)
}

pub(crate) fn rescale_to_norm(v: &mut DVector<f64>, target: f64) {
    let norm = v.norm();
    if norm > 0.0 {
        *v *= target / norm;
    }
}

/// Generates the signal matrix on a prebuilt graph.
///
/// The diffusion operator is the pseudo-inverse square root of the graph's
/// combinatorial Laplacian, independent of whatever Laplacian a downstream
/// solver uses.
pub fn generate_signal(spec: &SyntheticSpec, graph: &SpatialGraph) -> Result<DMatrix<f64>> {
    if spec.kappa < 0.0 {
        return Err(Error::InvalidParameter(
            "temporal smoothness kappa must be nonnegative".into(),
        ));
    }
    if spec.time_steps == 0 {
        return Err(Error::InvalidParameter(
            "need at least one time step".into(),
        ));
    }
    let n = graph.n();
    let l = laplacian(graph, &LaplacianSpec::plain(LaplacianKind::Combinatorial));
    let diffuse = pseudo_inverse_sqrt(&l)?;

    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    rng.set_stream(SIGNAL_STREAM);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");

    let mut block: Vec<DVector<f64>> = Vec::with_capacity(spec.time_steps);
    block.push(DVector::from_fn(n, |_, _| normal.sample(&mut rng)));
    for _ in 1..spec.time_steps {
        let mut innovation = DVector::from_fn(n, |_, _| normal.sample(&mut rng));
        rescale_to_norm(&mut innovation, spec.kappa);
        let prev = block.last().expect("nonempty block");
        block.push(prev + &diffuse * innovation);
    }

    let columns: Vec<DVector<f64>> = if spec.repeats == 0 {
        block.clone()
    } else {
        let mut cols = Vec::with_capacity(spec.width());
        for _ in 0..spec.repeats {
            cols.extend(block.iter().cloned());
            cols.extend(block.iter().rev().cloned());
        }
        cols
    };
    Ok(DMatrix::from_columns(&columns))
}

/// Coordinates, graph and signal in one call.
pub fn synthesize(spec: &SyntheticSpec) -> Result<(SpatialGraph, DMatrix<f64>)> {
    let coords = generate_coords(spec);
    let graph = build_knn_graph(&coords, spec.knn_k, EdgeWeighting::InverseSquareDistance)?;
    let signal = generate_signal(spec, &graph)?;
    Ok((graph, signal))
}

/// Uniformly random binary mask with exactly `floor(rate * n * m)` ones.
pub fn sample_mask(n: usize, m: usize, rate: f64, seed: u64) -> Result<DMatrix<f64>> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidRate(rate));
    }
    let total = n * m;
    // Guard the floor against representation error in products like
    // 0.3 * 15000 landing a hair under the integer they denote.
    let count = ((rate * total as f64) + 1e-9).floor() as usize;
    let count = count.min(total);

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(MASK_STREAM);
    let mut indices: Vec<usize> = (0..total).collect();
    for i in 0..count {
        let j = i + rng.random_range(0..(total - i));
        indices.swap(i, j);
    }
    let mut mask = DMatrix::<f64>::zeros(n, m);
    for &idx in &indices[..count] {
        mask[(idx % n, idx / n)] = 1.0;
    }
    Ok(mask)
}

/// Adds i.i.d. noise to every entry of `x`.
pub fn add_noise(x: &DMatrix<f64>, noise: &NoiseSpec, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(NOISE_STREAM);
    match noise {
        NoiseSpec::None => x.clone(),
        NoiseSpec::Gaussian { std } if *std == 0.0 => x.clone(),
        NoiseSpec::Gaussian { std } => {
            let normal = Normal::new(0.0, *std).expect("gaussian noise spec");
            x.map(|v| v + normal.sample(&mut rng))
        }
        NoiseSpec::Laplace { scale } if *scale == 0.0 => x.clone(),
        NoiseSpec::Laplace { scale } => x.map(|v| {
            // inverse CDF of the Laplace distribution
            let u: f64 = rng.random::<f64>() - 0.5;
            v - scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
        }),
    }
}
