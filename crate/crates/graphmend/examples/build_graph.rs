//! Build a kNN spatial graph and inspect its Laplacian operators.
//!
//! ```sh
//! cargo run --example build_graph
//! ```

use graphmend::graph::{
    build_knn_graph, laplacian, pseudo_inverse_sqrt, sobolev_powers, EdgeWeighting,
    LaplacianKind, LaplacianSpec,
};
use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn main() -> graphmend::Result<()> {
    // 100 sensors scattered uniformly in a 100 x 100 area, linked to their
    // five nearest neighbours with inverse-square-distance weights.
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let coords = DMatrix::from_fn(100, 2, |_, _| rng.random::<f64>() * 100.0);
    let graph = build_knn_graph(&coords, 5, EdgeWeighting::InverseSquareDistance)?;

    let degrees = graph.degree();
    let edges = graph.adjacency().iter().filter(|&&w| w > 0.0).count() / 2;
    println!("graph: {} vertices, {} edges", graph.n(), edges);
    println!(
        "weighted degree range: [{:.4}, {:.4}]",
        degrees.min(),
        degrees.max()
    );

    let combinatorial = laplacian(&graph, &LaplacianSpec::plain(LaplacianKind::Combinatorial));
    let normalized = laplacian(
        &graph,
        &LaplacianSpec::plain(LaplacianKind::SymmetricNormalized),
    );
    let ones = nalgebra::DVector::from_element(graph.n(), 1.0);
    println!(
        "combinatorial row sums ~ 0: max |L 1| = {:.2e}",
        (&combinatorial * &ones).amax()
    );
    println!(
        "normalized Laplacian diagonal: first entries {:.3}, {:.3}, {:.3}",
        normalized[(0, 0)],
        normalized[(1, 1)],
        normalized[(2, 2)]
    );

    // The positive-definite power (L + 0.1 I)^3 and its half power drive
    // the high-order spatial smoothing in the recovery models.
    let (full, half) = sobolev_powers(&combinatorial, 0.1, 3.0)?;
    println!(
        "sobolev power check: ||H H - F|| / ||F|| = {:.2e}",
        (&half * &half - &full).norm() / full.norm()
    );

    // The pseudo-inverse square root is the diffusion operator used by the
    // synthetic signal generator.
    let diffuse = pseudo_inverse_sqrt(&combinatorial)?;
    let plp = &diffuse * &combinatorial * &diffuse;
    println!(
        "pseudo-inverse sqrt: P L P acts as the projection off the constant vector, \
         ||P L P 1|| = {:.2e}",
        (&plp * &ones).norm()
    );
    Ok(())
}
