use ndarray::{Array2, ArrayView2};
use rand_chacha::ChaCha8Rng;

use super::linear::Linear;
use super::param::{ParamVisitor, Parametrized};
use super::{relu_backward, relu_inplace};

/// Fully connected stack with ReLU between layers and a linear final layer.
///
/// The embedding reduction heads are `3072 -> 768 -> 256 -> 128 -> out`; the
/// label expander is a single `3 -> 4` layer (no activation).
#[derive(Debug, Clone)]
pub struct Mlp {
    pub layers: Vec<Linear>,
}

/// Per-layer tensors captured during a cached forward pass, needed by
/// `backward`: the input to each layer and each hidden pre-activation.
#[derive(Debug)]
pub struct MlpCache {
    inputs: Vec<Array2<f64>>,
    preacts: Vec<Array2<f64>>,
}

impl Mlp {
    pub fn new(name: &str, widths: &[usize], rng: &mut ChaCha8Rng) -> Self {
        assert!(widths.len() >= 2, "need at least one layer");
        let layers = widths
            .windows(2)
            .enumerate()
            .map(|(i, w)| Linear::new(&format!("{name}.fc{i}"), w[0], w[1], rng))
            .collect();
        Mlp { layers }
    }

    /// The 4-layer reduction head compressing one 3072-dim embedding.
    pub fn reduction_head(name: &str, out_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        Mlp::new(name, &[3072, 768, 256, 128, out_dim], rng)
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim
    }

    /// Forward over a batch of rows without retaining activations.
    pub fn forward(&self, x: &ArrayView2<f64>) -> Array2<f64> {
        let last = self.layers.len() - 1;
        let mut h = self.layers[0].forward(x);
        for (i, layer) in self.layers.iter().enumerate().skip(1) {
            let _ = i;
            relu_inplace(&mut h);
            h = layer.forward(&h.view());
        }
        if last == 0 {
            // single-layer stack: nothing to do, h is already the output
        }
        h
    }

    /// Forward retaining what `backward` needs.
    pub fn forward_cached(&self, x: &ArrayView2<f64>) -> (Array2<f64>, MlpCache) {
        let mut inputs = vec![x.to_owned()];
        let mut preacts = Vec::new();
        let last = self.layers.len() - 1;
        let mut h = x.to_owned();
        for (i, layer) in self.layers.iter().enumerate() {
            let z = layer.forward(&h.view());
            if i < last {
                preacts.push(z.clone());
                let mut a = z;
                relu_inplace(&mut a);
                inputs.push(a.clone());
                h = a;
            } else {
                h = z;
            }
        }
        (h, MlpCache { inputs, preacts })
    }

    /// Backward from dOut; accumulates parameter grads, returns dIn.
    pub fn backward(&mut self, cache: &MlpCache, d_out: &ArrayView2<f64>) -> Array2<f64> {
        let last = self.layers.len() - 1;
        let mut grad = d_out.to_owned();
        for i in (0..=last).rev() {
            let x = &cache.inputs[i];
            let dx = self.layers[i].backward(&x.view(), &grad.view());
            grad = dx;
            if i > 0 {
                relu_backward(&mut grad, &cache.preacts[i - 1]);
            }
        }
        grad
    }
}

impl Parametrized for Mlp {
    fn visit_params(&mut self, f: &mut ParamVisitor) {
        for layer in &mut self.layers {
            layer.visit_params(f);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::SeedableRng;

    #[test]
    fn zero_weights_pass_final_bias_through() {
        // All weights and hidden biases zero, final bias b: output = b.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut mlp = Mlp::new("t", &[6, 5, 4, 3, 2], &mut rng);
        for layer in &mut mlp.layers {
            layer.w.value.fill(0.0);
            layer.b.value.fill(0.0);
        }
        let lastb = [0.7, -1.3];
        let n = mlp.layers.len();
        for (i, v) in lastb.iter().enumerate() {
            mlp.layers[n - 1].b.value[[i]] = *v;
        }
        let x = Array2::from_elem((3, 6), 2.5);
        let y = mlp.forward(&x.view());
        for row in y.rows() {
            assert_eq!(row[0], 0.7);
            assert_eq!(row[1], -1.3);
        }
    }

    #[test]
    fn reduction_head_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let head = Mlp::reduction_head("acc", 48, &mut rng);
        assert_eq!(head.in_dim(), 3072);
        assert_eq!(head.out_dim(), 48);
        let widths: Vec<(usize, usize)> = head
            .layers
            .iter()
            .map(|l| (l.in_dim, l.out_dim))
            .collect();
        assert_eq!(widths, vec![(3072, 768), (768, 256), (256, 128), (128, 48)]);
    }

    #[test]
    fn cached_and_plain_forward_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mlp = Mlp::new("t", &[7, 6, 5], &mut rng);
        let x = Array2::from_shape_fn((4, 7), |(i, j)| (i * 7 + j) as f64 * 0.1 - 1.0);
        let a = mlp.forward(&x.view());
        let (b, _) = mlp.forward_cached(&x.view());
        assert_eq!(a, b);
    }
}
