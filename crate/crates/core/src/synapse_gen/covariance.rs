use crate::error::{Error, Result};
use crate::numerics::CovarianceMatrix;
use crate::synapse_gen::CenterSurroundParams;

/// `K(d) = exp(−d²/2σ_c²) − k·exp(−d²/2σ_s²)`, taking the squared distance.
pub fn dog_covariance(dist2: f64, sigma_c: f64, sigma_s: f64, k: f64) -> f64 {
    (-dist2 / (2.0 * sigma_c * sigma_c)).exp() - k * (-dist2 / (2.0 * sigma_s * sigma_s)).exp()
}

/// Un-jittered difference-of-Gaussians matrix over a `field_size ×
/// field_size` grid, points enumerated row-major.
///
/// Entries are computed from the integer squared distance, so pairs at equal
/// distance get bit-identical values.
pub fn center_surround_kernel_matrix(field_size: usize, sigma_c: f64, sigma_s: f64, k: f64) -> Vec<f64> {
    let n = field_size * field_size;
    let mut entries = vec![0.0; n * n];
    for a in 0..n {
        let (ya, xa) = ((a / field_size) as i64, (a % field_size) as i64);
        for b in 0..n {
            let (yb, xb) = ((b / field_size) as i64, (b % field_size) as i64);
            let d2 = (ya - yb).pow(2) + (xa - xb).pow(2);
            entries[a * n + b] = dog_covariance(d2 as f64, sigma_c, sigma_s, k);
        }
    }
    entries
}

/// `Σ_jk = K(‖p_j − p_k‖) + ε·[j = k]` over the receptive-field grid.
pub fn build_center_surround_cov(field_size: usize, params: &CenterSurroundParams) -> Result<CovarianceMatrix> {
    params.validate()?;
    if field_size == 0 {
        return Err(Error::invalid("center_surround_cov", "field size must be positive"));
    }
    let n = field_size * field_size;
    let mut entries = center_surround_kernel_matrix(field_size, params.sigma_c, params.sigma_s, params.k);
    for i in 0..n {
        entries[i * n + i] += params.epsilon;
    }
    CovarianceMatrix::new(n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_is_one_minus_k_plus_epsilon() {
        let p = CenterSurroundParams::default();
        let cov = build_center_surround_cov(5, &p).unwrap();
        for i in 0..25 {
            assert_eq!(cov.get(i, i), 1.0 - p.k + p.epsilon);
        }
    }

    #[test]
    fn pure_squared_exponential_neighbour() {
        let m = center_surround_kernel_matrix(5, 1.0, 2.5, 0.0);
        assert!((m[1] - (-0.5f64).exp()).abs() < 1e-15);
        assert!((m[1] - 0.6065).abs() < 1e-4);
    }

    #[test]
    fn equal_distances_equal_entries() {
        let m = center_surround_kernel_matrix(5, 1.0, 2.5, 0.144);
        // (0,0)-(0,1), (2,2)-(3,2), (4,4)-(4,3) are all at distance 1
        let pairs = [(0, 1), (12, 17), (24, 23)];
        for &(a, b) in &pairs {
            assert_eq!(m[a * 25 + b].to_bits(), m[1].to_bits());
        }
        // (0,0)-(1,2) vs (3,3)-(1,4): both squared distance 5
        assert_eq!(m[7].to_bits(), m[18 * 25 + 9].to_bits());
    }

    #[test]
    fn rejects_k_above_bound() {
        let p = CenterSurroundParams { k: 0.2, ..Default::default() };
        assert!(build_center_surround_cov(5, &p).is_err());
    }
}
