use crate::error::{Error, Result};
use crate::math::{Matrix, Rng};

/// Glorot/Xavier uniform initialization for a `fan_out × fan_in` weight.
///
/// Entries are i.i.d. uniform in `[-a, a]` with `a = sqrt(6 / (fan_in + fan_out))`.
pub fn init_glorot_uniform(fan_in: usize, fan_out: usize, rng: &mut Rng) -> Result<Matrix> {
    if fan_in == 0 || fan_out == 0 {
        return Err(Error::invalid(format!(
            "glorot init needs nonzero fans, got fan_in={fan_in} fan_out={fan_out}"
        )));
    }
    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
    init_uniform(fan_out, fan_in, bound, rng)
}

/// `rows × cols` matrix with entries uniform in `[-bound, bound)`.
pub fn init_uniform(rows: usize, cols: usize, bound: f64, rng: &mut Rng) -> Result<Matrix> {
    let data = (0..rows * cols).map(|_| rng.uniform(-bound, bound)).collect();
    Matrix::from_vec(rows, cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_for_square_three() {
        let w = init_glorot_uniform(3, 3, &mut Rng::new(0)).unwrap();
        assert_eq!(w.shape(), (3, 3));
        assert!(w.as_slice().iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn deterministic_given_seed() {
        let a = init_glorot_uniform(4, 6, &mut Rng::new(99)).unwrap();
        let b = init_glorot_uniform(4, 6, &mut Rng::new(99)).unwrap();
        assert_eq!(
            a.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn sample_mean_is_near_zero() {
        // 1 × 100000 weight: bound sqrt(6/100001), so scale draws back to [-1, 1].
        let w = init_glorot_uniform(100_000, 1, &mut Rng::new(2024)).unwrap();
        let bound = (6.0f64 / 100_001.0).sqrt();
        let mean = w.as_slice().iter().map(|v| v / bound).sum::<f64>() / 100_000.0;
        assert!(mean.abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn zero_fan_rejected() {
        assert!(init_glorot_uniform(0, 3, &mut Rng::new(0)).is_err());
        assert!(init_glorot_uniform(3, 0, &mut Rng::new(0)).is_err());
    }
}
