use crate::error::{Error, Result};
use crate::numerics::Tensor;

/// Spatial extent of every convolution kernel.
pub const KERNEL_SIZE: usize = 5;

/// Gradients of `Σ grad_out ⊙ conv2d_forward(..)`.
#[derive(Clone, Debug)]
pub struct ConvGrads {
    pub kernels: Tensor,
    pub biases: Tensor,
    /// `None` when requested from [`conv2d_backward_params`].
    pub input: Option<Tensor>,
}

struct Geometry {
    channels: usize,
    height: usize,
    width: usize,
    kernels: usize,
    out_height: usize,
    out_width: usize,
    pad: usize,
}

impl Geometry {
    fn check(input: &Tensor, kernels: &Tensor, pad: usize) -> Result<Self> {
        const OP: &str = "conv2d";
        input.expect_rank(OP, 3)?;
        kernels.expect_rank(OP, 4)?;
        let (c, h, w) = (input.shape()[0], input.shape()[1], input.shape()[2]);
        let ks = kernels.shape();
        if ks[1] != c || ks[2] != KERNEL_SIZE || ks[3] != KERNEL_SIZE {
            return Err(Error::shape(
                OP,
                format!("kernels [K, {c}, {KERNEL_SIZE}, {KERNEL_SIZE}] for input {:?}", input.shape()),
                format!("kernels {ks:?}"),
            ));
        }
        if h + 2 * pad < KERNEL_SIZE || w + 2 * pad < KERNEL_SIZE {
            return Err(Error::shape(
                OP,
                format!("padded input at least {KERNEL_SIZE}x{KERNEL_SIZE}"),
                format!("input {:?} with pad {pad}", input.shape()),
            ));
        }
        Ok(Geometry {
            channels: c,
            height: h,
            width: w,
            kernels: ks[0],
            out_height: h + 2 * pad + 1 - KERNEL_SIZE,
            out_width: w + 2 * pad + 1 - KERNEL_SIZE,
            pad,
        })
    }

    /// Output row range whose source row `oy + dy - pad` lies inside the input.
    fn rows(&self, dy: usize) -> std::ops::Range<usize> {
        let lo = self.pad.saturating_sub(dy);
        let hi = (self.height + self.pad).saturating_sub(dy).min(self.out_height);
        lo..hi.max(lo)
    }

    fn cols(&self, dx: usize) -> std::ops::Range<usize> {
        let lo = self.pad.saturating_sub(dx);
        let hi = (self.width + self.pad).saturating_sub(dx).min(self.out_width);
        lo..hi.max(lo)
    }

    /// Iterates `(out_row, in_row, out_cols, in_col_start)` for one kernel tap.
    fn taps(&self, dy: usize, dx: usize) -> impl Iterator<Item = (usize, usize, std::ops::Range<usize>, usize)> + '_ {
        let cols = self.cols(dx);
        let in_x0 = cols.start + dx - self.pad;
        self.rows(dy).map(move |oy| (oy, oy + dy - self.pad, cols.clone(), in_x0))
    }
}

/// Cross-correlation of a `[C, H, W]` input with `[K, C, 5, 5]` kernels and
/// zero padding `pad` on every side; `pad = 2` keeps the spatial size.
///
/// `out[k, y, x] = bias[k] + Σ input[c, y+dy−pad, x+dx−pad] · kernels[k, c, dy, dx]`.
pub fn conv2d_forward(input: &Tensor, kernels: &Tensor, biases: &Tensor, pad: usize) -> Result<Tensor> {
    let g = Geometry::check(input, kernels, pad)?;
    if biases.shape() != [g.kernels] {
        return Err(Error::shape("conv2d", format!("biases [{}]", g.kernels), format!("biases {:?}", biases.shape())));
    }
    let plane = g.out_height * g.out_width;
    let mut out = vec![0.0; g.kernels * plane];
    let x = input.data();
    let w = kernels.data();

    for (k, out_k) in out.chunks_exact_mut(plane).enumerate() {
        out_k.fill(biases.data()[k]);
        for c in 0..g.channels {
            let in_c = &x[c * g.height * g.width..(c + 1) * g.height * g.width];
            for dy in 0..KERNEL_SIZE {
                for dx in 0..KERNEL_SIZE {
                    let weight = w[((k * g.channels + c) * KERNEL_SIZE + dy) * KERNEL_SIZE + dx];
                    for (oy, iy, cols, ix0) in g.taps(dy, dx) {
                        let dst = &mut out_k[oy * g.out_width + cols.start..oy * g.out_width + cols.end];
                        let src = &in_c[iy * g.width + ix0..iy * g.width + ix0 + cols.len()];
                        for (d, s) in dst.iter_mut().zip(src) {
                            *d += weight * s;
                        }
                    }
                }
            }
        }
    }
    Tensor::new(vec![g.kernels, g.out_height, g.out_width], out)
}

/// Gradients with respect to kernels, biases and input.
pub fn conv2d_backward(input: &Tensor, kernels: &Tensor, grad_out: &Tensor) -> Result<ConvGrads> {
    backward(input, kernels, grad_out, true)
}

/// Like [`conv2d_backward`] but skips the input gradient, which a first layer
/// never needs.
pub fn conv2d_backward_params(input: &Tensor, kernels: &Tensor, grad_out: &Tensor) -> Result<ConvGrads> {
    backward(input, kernels, grad_out, false)
}

fn backward(input: &Tensor, kernels: &Tensor, grad_out: &Tensor, with_input: bool) -> Result<ConvGrads> {
    // The padding is implied by the output size.
    grad_out.expect_rank("conv2d_backward", 3)?;
    let (h, go_h) = (input.shape().get(1).copied().unwrap_or(0), grad_out.shape()[1]);
    let pad2 = (go_h + KERNEL_SIZE).checked_sub(1 + h).filter(|p| p % 2 == 0);
    let pad = match pad2 {
        Some(p) => p / 2,
        None => {
            return Err(Error::shape(
                "conv2d_backward",
                format!("grad_out consistent with input {:?}", input.shape()),
                format!("grad_out {:?}", grad_out.shape()),
            ))
        }
    };
    let g = Geometry::check(input, kernels, pad)?;
    if grad_out.shape() != [g.kernels, g.out_height, g.out_width] {
        return Err(Error::shape(
            "conv2d_backward",
            format!("grad_out [{}, {}, {}]", g.kernels, g.out_height, g.out_width),
            format!("grad_out {:?}", grad_out.shape()),
        ));
    }

    let plane = g.out_height * g.out_width;
    let in_plane = g.height * g.width;
    let x = input.data();
    let w = kernels.data();
    let mut grad_w = vec![0.0; w.len()];
    let mut grad_b = vec![0.0; g.kernels];
    let mut grad_x = if with_input { vec![0.0; x.len()] } else { Vec::new() };

    for (k, go_k) in grad_out.data().chunks_exact(plane).enumerate() {
        grad_b[k] = go_k.iter().sum();
        for c in 0..g.channels {
            let in_c = &x[c * in_plane..(c + 1) * in_plane];
            for dy in 0..KERNEL_SIZE {
                for dx in 0..KERNEL_SIZE {
                    let widx = ((k * g.channels + c) * KERNEL_SIZE + dy) * KERNEL_SIZE + dx;
                    let mut acc = 0.0;
                    for (oy, iy, cols, ix0) in g.taps(dy, dx) {
                        let go = &go_k[oy * g.out_width + cols.start..oy * g.out_width + cols.end];
                        let src = &in_c[iy * g.width + ix0..iy * g.width + ix0 + cols.len()];
                        acc += go.iter().zip(src).map(|(a, b)| a * b).sum::<f64>();
                        if with_input {
                            let weight = w[widx];
                            let dst = &mut grad_x[c * in_plane + iy * g.width + ix0..][..cols.len()];
                            for (d, gv) in dst.iter_mut().zip(go) {
                                *d += weight * gv;
                            }
                        }
                    }
                    grad_w[widx] = acc;
                }
            }
        }
    }

    Ok(ConvGrads {
        kernels: Tensor::new(kernels.shape().to_vec(), grad_w)?,
        biases: Tensor::new(vec![g.kernels], grad_b)?,
        input: if with_input { Some(Tensor::new(input.shape().to_vec(), grad_x)?) } else { None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones_center_is_25() {
        let input = Tensor::filled(&[1, 5, 5], 1.0);
        let kernels = Tensor::filled(&[1, 1, 5, 5], 1.0);
        let out = conv2d_forward(&input, &kernels, &Tensor::zeros(&[1]), 2).unwrap();
        assert_eq!(out.shape(), &[1, 5, 5]);
        assert_eq!(out.data()[12], 25.0);
        // corner sees a 3x3 patch of the input
        assert_eq!(out.data()[0], 9.0);
    }

    #[test]
    fn zero_input_gives_bias_only() {
        let input = Tensor::zeros(&[2, 6, 6]);
        let kernels = Tensor::filled(&[3, 2, 5, 5], 0.7);
        let out = conv2d_forward(&input, &kernels, &Tensor::zeros(&[3]), 2).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn channel_mismatch_names_both_shapes() {
        let input = Tensor::zeros(&[3, 8, 8]);
        let kernels = Tensor::zeros(&[4, 1, 5, 5]);
        let msg = conv2d_forward(&input, &kernels, &Tensor::zeros(&[4]), 2).unwrap_err().to_string();
        assert!(msg.contains("[3, 8, 8]") && msg.contains("[4, 1, 5, 5]"), "{msg}");
    }

    #[test]
    fn wrong_grad_out_rejected() {
        let input = Tensor::zeros(&[1, 8, 8]);
        let kernels = Tensor::zeros(&[2, 1, 5, 5]);
        assert!(conv2d_backward(&input, &kernels, &Tensor::zeros(&[3, 8, 8])).is_err());
        assert!(conv2d_backward(&input, &kernels, &Tensor::zeros(&[2, 7, 8])).is_err());
    }

    #[test]
    fn zero_grad_out_gives_zero_grads() {
        let input = Tensor::filled(&[1, 6, 6], 0.3);
        let kernels = Tensor::filled(&[2, 1, 5, 5], -1.2);
        let g = conv2d_backward(&input, &kernels, &Tensor::zeros(&[2, 6, 6])).unwrap();
        assert!(g.kernels.data().iter().all(|&v| v == 0.0));
        assert!(g.biases.data().iter().all(|&v| v == 0.0));
        assert!(g.input.unwrap().data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_pixel_grad_is_input_patch() {
        // A unit gradient at output (y, x) makes grad_kernels the 5x5 input
        // patch centred there.
        let data: Vec<f64> = (0..64).map(|i| i as f64 * 0.1 - 2.0).collect();
        let input = Tensor::new(vec![1, 8, 8], data.clone()).unwrap();
        let kernels = Tensor::zeros(&[1, 1, 5, 5]);
        let mut go = Tensor::zeros(&[1, 8, 8]);
        go.data_mut()[4 * 8 + 3] = 1.0;
        let g = conv2d_backward(&input, &kernels, &go).unwrap();
        for dy in 0..5 {
            for dx in 0..5 {
                let expected = data[(4 + dy - 2) * 8 + (3 + dx - 2)];
                assert_eq!(g.kernels.data()[dy * 5 + dx], expected);
            }
        }
        assert_eq!(g.biases.data()[0], 1.0);
    }
}
