use ndarray::{ArrayD, ArrayView2, ArrayViewMut2, IxDyn};

/// One trainable tensor with its accumulated gradient.
#[derive(Debug, Clone)]
pub struct Param {
    name: String,
    pub value: ArrayD<f64>,
    pub grad: ArrayD<f64>,
}

impl Param {
    pub fn new(name: impl Into<String>, value: ArrayD<f64>) -> Self {
        let grad = ArrayD::zeros(value.raw_dim());
        Param {
            name: name.into(),
            value,
            grad,
        }
    }

    pub fn from_vec(name: impl Into<String>, shape: &[usize], data: Vec<f64>) -> Self {
        let value = ArrayD::from_shape_vec(IxDyn(shape), data).expect("shape/data mismatch");
        Param::new(name, value)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape(&self) -> &[usize] {
        self.value.shape()
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(0.0);
    }

    /// 2-D view of the value; panics if the param is not 2-D.
    pub fn value2(&self) -> ArrayView2<'_, f64> {
        self.value
            .view()
            .into_dimensionality()
            .expect("param is not 2-D")
    }

    pub fn grad2_mut(&mut self) -> ArrayViewMut2<'_, f64> {
        self.grad
            .view_mut()
            .into_dimensionality()
            .expect("param is not 2-D")
    }
}

/// Visitor over every parameter of a module, in a stable order.
///
/// The order must be deterministic across runs: the optimizer state and the
/// checkpoint payload are both laid out by visitation order.
pub type ParamVisitor<'a> = dyn FnMut(&mut Param) + 'a;

pub trait Parametrized {
    fn visit_params(&mut self, f: &mut ParamVisitor);

    fn zero_grads(&mut self) {
        self.visit_params(&mut |p| p.zero_grad());
    }

    fn param_count(&mut self) -> usize {
        let mut n = 0;
        self.visit_params(&mut |p| n += p.len());
        n
    }

    /// Snapshot of all parameter values, by visitation order.
    fn snapshot(&mut self) -> Vec<ArrayD<f64>> {
        let mut out = Vec::new();
        self.visit_params(&mut |p| out.push(p.value.clone()));
        out
    }

    fn restore(&mut self, snapshot: &[ArrayD<f64>]) {
        let mut i = 0;
        self.visit_params(&mut |p| {
            p.value.assign(&snapshot[i]);
            i += 1;
        });
        assert_eq!(i, snapshot.len(), "snapshot length mismatch");
    }
}
