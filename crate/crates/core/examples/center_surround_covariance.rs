//! Builds the difference-of-Gaussians covariance over the 5×5 receptive
//! field and shows how the centre pixel correlates with its neighbours.

use synaptogen::numerics::{cholesky, frobenius_relative_error};
use synaptogen::synapse_gen::{build_center_surround_cov, CenterSurroundParams, FIELD_SIZE};

fn main() -> synaptogen::Result<()> {
    let params = CenterSurroundParams::default();
    println!(
        "sigma_c = {}, sigma_s = {}, k = {:.4} (bound {:.4}), epsilon = {:e}",
        params.sigma_c,
        params.sigma_s,
        params.k,
        params.k_bound(),
        params.epsilon
    );
    let cov = build_center_surround_cov(FIELD_SIZE, &params)?;

    let centre = (FIELD_SIZE * FIELD_SIZE) / 2;
    println!("\ncovariance of the centre pixel with every position:");
    for y in 0..FIELD_SIZE {
        let row: Vec<String> =
            (0..FIELD_SIZE).map(|x| format!("{:>8.4}", cov.get(centre, y * FIELD_SIZE + x))).collect();
        println!("{}", row.join(""));
    }

    let l = cholesky(&cov)?;
    println!("\nCholesky reconstruction error: {:e}", frobenius_relative_error(&l.reconstruct(), cov.entries()));
    Ok(())
}
