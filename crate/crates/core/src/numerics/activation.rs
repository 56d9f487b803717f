use crate::error::{Error, Result};
use crate::numerics::Tensor;

pub fn relu(input: &Tensor) -> Tensor {
    let mut out = input.clone();
    out.data_mut().iter_mut().for_each(|v| *v = v.max(0.0));
    out
}

/// Passes `grad_out` where `input > 0`; the subgradient at zero is taken as 0.
pub fn relu_backward(input: &Tensor, grad_out: &Tensor) -> Result<Tensor> {
    if input.shape() != grad_out.shape() {
        return Err(Error::shape(
            "relu_backward",
            format!("grad_out {:?}", input.shape()),
            format!("grad_out {:?}", grad_out.shape()),
        ));
    }
    let data = input.data().iter().zip(grad_out.data()).map(|(&x, &g)| if x > 0.0 { g } else { 0.0 }).collect();
    Tensor::new(input.shape().to_vec(), data)
}
