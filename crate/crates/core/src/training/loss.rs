use crate::error::{Error, Result};
use crate::math::Matrix;

/// Masked mean absolute error and its gradient with respect to `pred`.
///
/// The loss averages over valid entries only. The gradient is
/// `sign(pred - target) / valid_count` on valid entries, with the sign of an
/// exact tie taken as 0, and 0 on masked entries.
pub fn mae_loss(pred: &Matrix, target: &Matrix, mask: &[bool]) -> Result<(f64, Matrix)> {
    if pred.shape() != target.shape() {
        return Err(Error::ShapeMismatch {
            op: "mae_loss",
            left: pred.shape(),
            right: target.shape(),
        });
    }
    if mask.len() != pred.len() {
        return Err(Error::invalid(format!(
            "mask has {} entries for a {:?} prediction",
            mask.len(),
            pred.shape()
        )));
    }
    let count = mask.iter().filter(|&&m| m).count();
    if count == 0 {
        return Err(Error::EmptyInput("loss mask has no valid entries".into()));
    }
    let scale = 1.0 / count as f64;
    let mut grad = Matrix::zeros(pred.rows(), pred.cols());
    let mut total = 0.0;
    for (((g, &p), &t), &m) in grad
        .as_mut_slice()
        .iter_mut()
        .zip(pred.as_slice())
        .zip(target.as_slice())
        .zip(mask)
    {
        if !m {
            continue;
        }
        let e = p - t;
        total += e.abs();
        *g = if e > 0.0 {
            scale
        } else if e < 0.0 {
            -scale
        } else {
            0.0
        };
    }
    Ok((total * scale, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{finite_diff_grad, Rng};
    use proptest::prelude::*;

    fn row(v: &[f64]) -> Matrix {
        Matrix::row_vector(v)
    }

    #[test]
    fn perfect_prediction() {
        let x = row(&[1.0, -2.0, 3.0]);
        let (loss, grad) = mae_loss(&x, &x, &[true; 3]).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grad.as_slice().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn hand_example() {
        let (loss, grad) = mae_loss(&row(&[0.0, 4.0]), &row(&[2.0, 2.0]), &[true, true]).unwrap();
        assert_eq!(loss, 2.0);
        assert_eq!(grad.as_slice(), [-0.5, 0.5]);
        let (loss, grad) = mae_loss(&row(&[0.0, 4.0]), &row(&[2.0, 2.0]), &[true, false]).unwrap();
        assert_eq!(loss, 2.0);
        assert_eq!(grad.as_slice(), [-1.0, 0.0]);
    }

    #[test]
    fn errors() {
        assert!(mae_loss(&row(&[1.0]), &row(&[1.0]), &[false]).is_err());
        assert!(mae_loss(&row(&[1.0]), &row(&[1.0, 2.0]), &[true]).is_err());
        assert!(mae_loss(&row(&[1.0]), &row(&[1.0]), &[true, true]).is_err());
    }

    proptest! {
        #[test]
        fn nonnegative_and_zero_only_at_match(seed in any::<u64>(), n in 1usize..20) {
            let mut rng = Rng::new(seed);
            let p: Vec<f64> = (0..n).map(|_| rng.uniform(-5.0, 5.0)).collect();
            let t: Vec<f64> = (0..n).map(|_| rng.uniform(-5.0, 5.0)).collect();
            let (loss, _) = mae_loss(&row(&p), &row(&t), &vec![true; n]).unwrap();
            prop_assert!(loss > 0.0);
            let (loss, _) = mae_loss(&row(&p), &row(&p), &vec![true; n]).unwrap();
            prop_assert_eq!(loss, 0.0);
        }

        #[test]
        fn gradient_matches_finite_differences(seed in any::<u64>(), n in 1usize..12) {
            let mut rng = Rng::new(seed);
            let t: Vec<f64> = (0..n).map(|_| rng.uniform(-5.0, 5.0)).collect();
            let mut p: Vec<f64> = t.iter().map(|v| {
                let d = rng.uniform(1e-3, 2.0);
                if rng.next_f64() < 0.5 { v - d } else { v + d }
            }).collect();
            let mask: Vec<bool> = (0..n).map(|k| k == 0 || rng.next_f64() < 0.7).collect();
            let target = row(&t);
            let (_, grad) = mae_loss(&row(&p), &target, &mask).unwrap();
            let numeric = finite_diff_grad(|w| mae_loss(&row(w), &target, &mask).unwrap().0, &mut p, 1e-7).unwrap();
            for (a, b) in grad.as_slice().iter().zip(&numeric) {
                prop_assert!((a - b).abs() < 1e-6, "{a} vs {b}");
            }
        }
    }
}
