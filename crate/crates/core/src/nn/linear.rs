use ndarray::{Array1, Array2, ArrayView2, Axis, IxDyn};
use rand_chacha::ChaCha8Rng;

use super::param::{Param, ParamVisitor, Parametrized};
use super::fan_in_uniform;

/// Affine layer `y = x W^T + b` over row-batched inputs.
#[derive(Debug, Clone)]
pub struct Linear {
    /// Weight, shape (out, in).
    pub w: Param,
    /// Bias, shape (out,).
    pub b: Param,
    pub in_dim: usize,
    pub out_dim: usize,
}

impl Linear {
    pub fn new(name: &str, in_dim: usize, out_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let w = Param::from_vec(
            format!("{name}.w"),
            &[out_dim, in_dim],
            fan_in_uniform(rng, in_dim, out_dim * in_dim),
        );
        let b = Param::from_vec(
            format!("{name}.b"),
            &[out_dim],
            fan_in_uniform(rng, in_dim, out_dim),
        );
        Linear {
            w,
            b,
            in_dim,
            out_dim,
        }
    }

    pub fn zeros(name: &str, in_dim: usize, out_dim: usize) -> Self {
        Linear {
            w: Param::new(format!("{name}.w"), ndarray::ArrayD::zeros(IxDyn(&[out_dim, in_dim]))),
            b: Param::new(format!("{name}.b"), ndarray::ArrayD::zeros(IxDyn(&[out_dim]))),
            in_dim,
            out_dim,
        }
    }

    /// Forward over a batch of rows: (B, in) -> (B, out).
    pub fn forward(&self, x: &ArrayView2<f64>) -> Array2<f64> {
        debug_assert_eq!(x.ncols(), self.in_dim);
        let mut y = x.dot(&self.w.value2().t());
        let b = self
            .b
            .value
            .view()
            .into_dimensionality::<ndarray::Ix1>()
            .unwrap();
        y += &b;
        y
    }

    /// Backward: accumulates dW += dY^T X and db += sum(dY), returns dX.
    pub fn backward(&mut self, x: &ArrayView2<f64>, dy: &ArrayView2<f64>) -> Array2<f64> {
        debug_assert_eq!(dy.ncols(), self.out_dim);
        debug_assert_eq!(x.nrows(), dy.nrows());
        let dw = dy.t().dot(x);
        self.w.grad2_mut().scaled_add(1.0, &dw);
        let db = dy.sum_axis(Axis(0));
        let mut bg = self
            .b
            .grad
            .view_mut()
            .into_dimensionality::<ndarray::Ix1>()
            .unwrap();
        bg.scaled_add(1.0, &db);
        dy.dot(&self.w.value2())
    }

    /// Backward when the input gradient is not needed (first layer).
    pub fn backward_params_only(&mut self, x: &ArrayView2<f64>, dy: &ArrayView2<f64>) {
        let dw = dy.t().dot(x);
        self.w.grad2_mut().scaled_add(1.0, &dw);
        let db = dy.sum_axis(Axis(0));
        let mut bg = self
            .b
            .grad
            .view_mut()
            .into_dimensionality::<ndarray::Ix1>()
            .unwrap();
        bg.scaled_add(1.0, &db);
    }

    pub fn bias(&self) -> Array1<f64> {
        self.b
            .value
            .view()
            .into_dimensionality::<ndarray::Ix1>()
            .unwrap()
            .to_owned()
    }
}

impl Parametrized for Linear {
    fn visit_params(&mut self, f: &mut ParamVisitor) {
        f(&mut self.w);
        f(&mut self.b);
    }
}
