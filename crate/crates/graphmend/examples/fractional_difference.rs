//! Fractional-order temporal differences and their stencils.
//!
//! ```sh
//! cargo run --example fractional_difference
//! ```

use graphmend::temporal::{build_difference_matrix, gl_coefficients, temporal_laplacian};
use nalgebra::DMatrix;

fn main() -> graphmend::Result<()> {
    // Integer orders recover the classical stencils.
    println!("order 1.0: {:?}", gl_coefficients(1.0, 3)?);
    println!("order 2.0: {:?}", gl_coefficients(2.0, 3)?);
    // Fractional orders interpolate between them.
    for theta in [1.2, 1.5, 1.8] {
        println!("order {theta}: {:?}", gl_coefficients(theta, 3)?);
    }

    // The difference matrix acts on the time axis by right-multiplication.
    let diff = build_difference_matrix(8, 1.8, 3)?;
    let ramp = DMatrix::from_fn(1, 8, |_, j| j as f64);
    let out = &ramp * diff.matrix();
    println!("fractional difference of a ramp: {:.4}", out);

    // A constant signal is annihilated except at the trailing boundary,
    // where the zero boundary condition truncates the stencil.
    let constant = DMatrix::from_element(1, 8, 1.0);
    let first_order = build_difference_matrix(8, 1.0, 1)?;
    println!(
        "first-order difference of a constant: {:.2}",
        &constant * first_order.matrix()
    );

    // tau-th order temporal Laplacian, the Gram matrix D D^T.
    let lt = temporal_laplacian(6, 1)?;
    println!("temporal Laplacian (tau = 1):{:.1}", lt);
    Ok(())
}
