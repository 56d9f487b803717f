//! Draws weights from each synapse distribution and prints their moments.
//!
//! ```text
//! cargo run --example sample_distributions -- [n] [seed]
//! ```

use synaptogen::synapse_gen::{generate_kernel_bank, kernel_stats, SynapseDistribution};

fn main() -> synaptogen::Result<()> {
    let mut args = std::env::args().skip(1);
    let kernels: usize = args.next().map_or(4096, |s| s.parse().expect("kernel count"));
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed"));

    println!("{:<16} {:>10} {:>10} {:>10} {:>10}", "distribution", "mean", "variance", "min", "max");
    for dist in [SynapseDistribution::Normal, SynapseDistribution::lognormal(), SynapseDistribution::center_surround()]
    {
        let bank = generate_kernel_bank(&dist, kernels, 1, seed)?;
        let s = kernel_stats(&bank);
        println!("{:<16} {:>10.5} {:>10.5} {:>10.5} {:>10.5}", dist.name(), s.mean, s.variance, s.min, s.max);
    }
    println!("\nlog-normal analytic mean: {:.5}", (-0.702f64 + 0.9355 / 2.0).exp());
    Ok(())
}
