use crate::error::{Error, Result};
use crate::numerics::Tensor;

/// Flat source index of the maximum chosen for every output cell of a
/// [`maxpool_forward`] call, together with the input shape it indexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoolIndices {
    pub input_shape: Vec<usize>,
    pub indices: Vec<usize>,
}

/// Max-pooling over `size × size` windows moved by `stride` on a `[C, H, W]`
/// input. Ties go to the first element in row-major scan order.
pub fn maxpool_forward(input: &Tensor, size: usize, stride: usize) -> Result<(Tensor, PoolIndices)> {
    const OP: &str = "maxpool";
    input.expect_rank(OP, 3)?;
    if size == 0 || stride == 0 {
        return Err(Error::invalid(OP, "size and stride must be positive"));
    }
    let (c, h, w) = (input.shape()[0], input.shape()[1], input.shape()[2]);
    let fits = |n: usize| n >= size && (n - size).is_multiple_of(stride) && n.is_multiple_of(stride);
    if !fits(h) || !fits(w) {
        return Err(Error::invalid(
            OP,
            format!("input {:?} is not divisible into {size}x{size} windows with stride {stride}", input.shape()),
        ));
    }
    let (oh, ow) = ((h - size) / stride + 1, (w - size) / stride + 1);
    let x = input.data();
    let mut out = Vec::with_capacity(c * oh * ow);
    let mut indices = Vec::with_capacity(c * oh * ow);
    for ch in 0..c {
        let base = ch * h * w;
        for oy in 0..oh {
            for ox in 0..ow {
                let mut best = base + oy * stride * w + ox * stride;
                for dy in 0..size {
                    let row = base + (oy * stride + dy) * w + ox * stride;
                    for idx in row..row + size {
                        if x[idx] > x[best] {
                            best = idx;
                        }
                    }
                }
                out.push(x[best]);
                indices.push(best);
            }
        }
    }
    Ok((Tensor::new(vec![c, oh, ow], out)?, PoolIndices { input_shape: input.shape().to_vec(), indices }))
}

/// Scatters `grad_out` onto the recorded argmax positions.
pub fn maxpool_backward(indices: &PoolIndices, grad_out: &Tensor) -> Result<Tensor> {
    const OP: &str = "maxpool_backward";
    if grad_out.len() != indices.indices.len() {
        return Err(Error::shape(
            OP,
            format!("{} gradient cells", indices.indices.len()),
            format!("grad_out {:?}", grad_out.shape()),
        ));
    }
    let mut grad = Tensor::zeros(&indices.input_shape);
    let n = grad.len();
    let dst = grad.data_mut();
    for (&idx, &g) in indices.indices.iter().zip(grad_out.data()) {
        if idx >= n {
            return Err(Error::invalid(OP, format!("argmax index {idx} out of range for {n} inputs")));
        }
        dst[idx] += g;
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_max() {
        let x = Tensor::new(vec![1, 2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let (y, idx) = maxpool_forward(&x, 2, 2).unwrap();
        assert_eq!(y.shape(), &[1, 1, 1]);
        assert_eq!(y.data(), &[4.0]);
        assert_eq!(idx.indices, vec![3]);
    }

    #[test]
    fn ties_pick_first_in_window() {
        let x = Tensor::filled(&[2, 4, 4], 1.5);
        let (y, idx) = maxpool_forward(&x, 2, 2).unwrap();
        assert!(y.data().iter().all(|&v| v == 1.5));
        assert_eq!(idx.indices, vec![0, 2, 8, 10, 16, 18, 24, 26]);
    }

    #[test]
    fn rejects_non_divisible() {
        assert!(maxpool_forward(&Tensor::zeros(&[1, 5, 4]), 2, 2).is_err());
        assert!(maxpool_forward(&Tensor::zeros(&[1, 16, 18]), 4, 4).is_err());
    }

    #[test]
    fn backward_routes_to_argmax() {
        let x = Tensor::new(vec![1, 2, 2], vec![1.0, 7.0, 3.0, 4.0]).unwrap();
        let (_, idx) = maxpool_forward(&x, 2, 2).unwrap();
        let g = maxpool_backward(&idx, &Tensor::filled(&[1, 1, 1], 1.0)).unwrap();
        assert_eq!(g.data(), &[0.0, 1.0, 0.0, 0.0]);
        let zero = maxpool_backward(&idx, &Tensor::zeros(&[1, 1, 1])).unwrap();
        assert!(zero.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn backward_rejects_corrupted_indices() {
        let idx = PoolIndices { input_shape: vec![1, 2, 2], indices: vec![4] };
        assert!(maxpool_backward(&idx, &Tensor::zeros(&[1, 1, 1])).is_err());
    }
}
