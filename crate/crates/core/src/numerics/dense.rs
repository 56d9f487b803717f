use crate::error::{Error, Result};
use crate::numerics::Tensor;

#[derive(Clone, Debug)]
pub struct DenseGrads {
    pub weights: Tensor,
    pub bias: Tensor,
    pub input: Tensor,
}

fn check(op: &'static str, x: &Tensor, weights: &Tensor) -> Result<(usize, usize)> {
    weights.expect_rank(op, 2)?;
    let (n_out, n_in) = (weights.shape()[0], weights.shape()[1]);
    if x.len() != n_in {
        return Err(Error::shape(
            op,
            format!("input of length {n_in} for weights {:?}", weights.shape()),
            format!("input {:?}", x.shape()),
        ));
    }
    Ok((n_out, n_in))
}

/// `y = W·x + b` with `W` of shape `[n_out, n_in]`. `x` may have any shape
/// holding `n_in` elements; it is read flat.
pub fn dense_forward(x: &Tensor, weights: &Tensor, bias: &Tensor) -> Result<Tensor> {
    let (n_out, n_in) = check("dense", x, weights)?;
    if bias.len() != n_out {
        return Err(Error::shape("dense", format!("bias of length {n_out}"), format!("bias {:?}", bias.shape())));
    }
    let xs = x.data();
    let y = weights
        .data()
        .chunks_exact(n_in)
        .zip(bias.data())
        .map(|(row, b)| b + row.iter().zip(xs).map(|(w, x)| w * x).sum::<f64>())
        .collect();
    Ok(Tensor::from_vec(y))
}

/// `grad_W = grad_y ⊗ x`, `grad_b = grad_y`, `grad_x = Wᵀ·grad_y`. The input
/// gradient has the shape of `x`.
pub fn dense_backward(x: &Tensor, weights: &Tensor, grad_y: &Tensor) -> Result<DenseGrads> {
    let (n_out, n_in) = check("dense_backward", x, weights)?;
    if grad_y.len() != n_out {
        return Err(Error::shape(
            "dense_backward",
            format!("grad_y of length {n_out}"),
            format!("grad_y {:?}", grad_y.shape()),
        ));
    }
    let xs = x.data();
    let mut grad_w = Vec::with_capacity(n_out * n_in);
    let mut grad_x = vec![0.0; n_in];
    for (row, &g) in weights.data().chunks_exact(n_in).zip(grad_y.data()) {
        grad_w.extend(xs.iter().map(|x| g * x));
        for (gx, w) in grad_x.iter_mut().zip(row) {
            *gx += w * g;
        }
    }
    Ok(DenseGrads {
        weights: Tensor::new(vec![n_out, n_in], grad_w)?,
        bias: Tensor::from_vec(grad_y.data().to_vec()),
        input: Tensor::new(x.shape().to_vec(), grad_x)?,
    })
}
