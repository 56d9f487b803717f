//! Samples a 64-kernel bank and writes each 5×5 slice as a PGM image, plus a
//! stats.csv summary.
//!
//! ```text
//! cargo run --example kernel_bank_export -- center-surround /tmp/kernels
//! ```

use std::path::PathBuf;

use synaptogen::config::{ArmKind, Settings};
use synaptogen::synapse_gen::{export_kernels_pgm, generate_kernel_bank, kernel_stats, write_stats_csv};

fn main() -> synaptogen::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind: ArmKind = args.next().as_deref().unwrap_or("lognormal").parse().expect("distribution name");
    let out = args.next().map_or_else(|| PathBuf::from("kernels"), PathBuf::from);

    let dist = Settings::default().distribution(kind).expect("a sampled distribution");
    let bank = generate_kernel_bank(&dist, 64, 1, 0)?;
    let files = export_kernels_pgm(&bank, &out)?;
    write_stats_csv(&[(dist.name().to_string(), kernel_stats(&bank))], out.join("stats.csv"))?;
    println!("wrote {} images and stats.csv to {}", files.len(), out.display());
    Ok(())
}
