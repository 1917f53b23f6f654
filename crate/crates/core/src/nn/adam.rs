use super::param::{Param, Parametrized};

/// Adaptive moment estimation over a module's parameters.
///
/// Moment buffers are laid out by parameter visitation order, which is
/// stable, so optimizer state stays aligned across steps.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    moments: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Adam {
    pub fn new(lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            moments: Vec::new(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One update over every parameter of `module` using its accumulated
    /// gradients. Gradients are not cleared here.
    pub fn step(&mut self, module: &mut dyn Parametrized) {
        self.step += 1;
        let t = self.step as i32;
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
        let bc1 = 1.0 - b1.powi(t);
        let bc2 = 1.0 - b2.powi(t);

        let mut idx = 0;
        let moments = &mut self.moments;
        module.visit_params(&mut |p: &mut Param| {
            if moments.len() <= idx {
                moments.push((vec![0.0; p.len()], vec![0.0; p.len()]));
            }
            let (m, v) = &mut moments[idx];
            assert_eq!(m.len(), p.len(), "optimizer state misaligned at {}", p.name());
            idx += 1;
            let grad = p.grad.as_slice().expect("grad not contiguous");
            let value = p.value.as_slice_mut().expect("param not contiguous");
            for i in 0..value.len() {
                let g = grad[i];
                m[i] = b1 * m[i] + (1.0 - b1) * g;
                v[i] = b2 * v[i] + (1.0 - b2) * g * g;
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                value[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        });
    }
}
