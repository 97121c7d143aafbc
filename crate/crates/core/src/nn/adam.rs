use super::scalar::Scalar;
use super::tensor::Tensor;
use crate::error::{shape_err, Result};

/// Adam optimizer state for an ordered list of parameter tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T = f64> {
    pub step: u64,
    pub first_moment: Vec<Tensor<T>>,
    pub second_moment: Vec<Tensor<T>>,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl<T: Scalar> AdamState<T> {
    pub fn new<'a>(params: impl IntoIterator<Item = &'a Tensor<T>>, lr: f64) -> Self {
        let zeros: Vec<Tensor<T>> = params
            .into_iter()
            .map(|p| Tensor::zeros(p.shape()))
            .collect();
        Self {
            step: 0,
            first_moment: zeros.clone(),
            second_moment: zeros,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    /// One bias-corrected Adam update of `params` in place. Hyperparameters
    /// and bias corrections are computed in `f64`.
    pub fn step<'a, 'b>(
        &mut self,
        params: impl IntoIterator<Item = &'a mut Tensor<T>>,
        grads: impl IntoIterator<Item = &'b Tensor<T>>,
    ) -> Result<()> {
        let params: Vec<&mut Tensor<T>> = params.into_iter().collect();
        let grads: Vec<&Tensor<T>> = grads.into_iter().collect();
        if params.len() != self.first_moment.len() || grads.len() != params.len() {
            return shape_err(format!(
                "Adam state tracks {} tensors, got {} parameters and {} gradients",
                self.first_moment.len(),
                params.len(),
                grads.len()
            ));
        }
        for ((p, g), m) in params.iter().zip(&grads).zip(&self.first_moment) {
            if p.shape() != g.shape() || p.shape() != m.shape() {
                return shape_err(format!(
                    "parameter {:?} vs gradient {:?}",
                    p.shape(),
                    g.shape()
                ));
            }
        }
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let (b1, b2) = (T::of_f64(self.beta1), T::of_f64(self.beta2));
        let (ib1, ib2) = (T::of_f64(1.0 - self.beta1), T::of_f64(1.0 - self.beta2));
        let (c1, c2) = (T::of_f64(c1), T::of_f64(c2));
        let (lr, eps) = (T::of_f64(self.lr), T::of_f64(self.epsilon));
        for (((p, g), m), v) in params
            .into_iter()
            .zip(grads)
            .zip(self.first_moment.iter_mut())
            .zip(self.second_moment.iter_mut())
        {
            for (((w, &gi), mi), vi) in p
                .data_mut()
                .iter_mut()
                .zip(g.data())
                .zip(m.data_mut())
                .zip(v.data_mut())
            {
                *mi = b1 * *mi + ib1 * gi;
                *vi = b2 * *vi + ib2 * gi * gi;
                let m_hat = *mi / c1;
                let v_hat = *vi / c2;
                *w -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}
