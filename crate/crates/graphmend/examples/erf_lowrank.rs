//! The ERF norm, its adaptive weights, and weighted singular value
//! thresholding.
//!
//! ```sh
//! cargo run --example erf_lowrank
//! ```

use graphmend::lowrank::{
    erf_norm, erf_weights, nuclear_norm, weighted_svt, SingularSpectrum,
};
use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn main() -> graphmend::Result<()> {
    // A rank-2 matrix plus noise.
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let u = DMatrix::from_fn(8, 2, |_, _| rng.random::<f64>() - 0.5);
    let v = DMatrix::from_fn(2, 6, |_, _| rng.random::<f64>() - 0.5);
    let noise = DMatrix::from_fn(8, 6, |_, _| (rng.random::<f64>() - 0.5) * 0.05);
    let x = &u * &v * 4.0 + noise;

    let sigma = SingularSpectrum::values_of(&x);
    println!("singular values: {:.4}", sigma.transpose());

    // Small filter parameters saturate on the large singular values: the
    // ERF norm counts them less than the nuclear norm does.
    for s in [0.1, 1.0, 1e3] {
        println!(
            "erf norm (sigma = {s:>6}): {:.4}   nuclear norm: {:.4}",
            erf_norm(&x, s)?,
            nuclear_norm(&x)
        );
    }

    // The linearization weights are non-decreasing for a sorted spectrum:
    // strong components are barely penalized, weak ones strongly.
    let weights = erf_weights(&sigma, 1.0)?;
    println!("adaptive weights (sigma = 1): {:.4}", weights.0.transpose());

    // Weighted singular value thresholding keeps the leading structure and
    // suppresses the noise floor.
    let thresholds = weights.scaled(0.5);
    let denoised = weighted_svt(&x, &thresholds)?;
    println!(
        "after weighted SVT: rank cutoff visible in {:.4}",
        SingularSpectrum::values_of(&denoised).transpose()
    );

    // Uniform thresholds recover the plain nuclear proximal step.
    let uniform = weighted_svt(&x, &DVector::from_element(6, 0.5))?;
    println!(
        "uniform SVT singular values: {:.4}",
        SingularSpectrum::values_of(&uniform).transpose()
    );
    Ok(())
}
