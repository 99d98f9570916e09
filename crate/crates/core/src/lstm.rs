//! A single LSTM layer with explicit forward caches and backpropagation.
//!
//! Gate rows are stacked as `[input; forget; candidate; output]`, each
//! `hidden` rows tall, over the concatenated `[x; h_prev]` column.

use crate::linalg::{self, sigmoid, Matrix};
use crate::rng::Rng64;

#[derive(Debug, Clone, PartialEq)]
pub struct LstmWeights {
    pub input: usize,
    pub hidden: usize,
    pub w: Matrix,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LstmState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden: usize) -> Self {
        LstmState {
            h: vec![0.0; hidden],
            c: vec![0.0; hidden],
        }
    }
}

/// Everything the backward pass needs from one forward step.
#[derive(Debug, Clone)]
pub struct StepCache {
    z: Vec<f64>,
    gates: Vec<f64>,
    c_prev: Vec<f64>,
    tanh_c: Vec<f64>,
}

impl LstmWeights {
    pub fn init(input: usize, hidden: usize, rng: &mut Rng64) -> Self {
        LstmWeights {
            input,
            hidden,
            w: Matrix::uniform(4 * hidden, input + hidden, rng),
            b: linalg::uniform_vec(4 * hidden, rng),
        }
    }

    pub fn zeros_like(&self) -> Self {
        LstmWeights {
            input: self.input,
            hidden: self.hidden,
            w: self.w.zeros_like(),
            b: vec![0.0; self.b.len()],
        }
    }

    pub fn step(&self, x: &[f64], prev: &LstmState) -> (LstmState, StepCache) {
        let h = self.hidden;
        let mut z = Vec::with_capacity(self.input + h);
        z.extend_from_slice(x);
        z.extend_from_slice(&prev.h);
        let mut gates = self.w.matvec(&z);
        linalg::add_assign(&mut gates, &self.b);
        for k in 0..h {
            gates[k] = sigmoid(gates[k]);
            gates[h + k] = sigmoid(gates[h + k]);
            gates[2 * h + k] = gates[2 * h + k].tanh();
            gates[3 * h + k] = sigmoid(gates[3 * h + k]);
        }
        let mut c = vec![0.0; h];
        let mut tanh_c = vec![0.0; h];
        let mut hn = vec![0.0; h];
        for k in 0..h {
            c[k] = gates[h + k] * prev.c[k] + gates[k] * gates[2 * h + k];
            tanh_c[k] = c[k].tanh();
            hn[k] = gates[3 * h + k] * tanh_c[k];
        }
        let cache = StepCache {
            z,
            gates,
            c_prev: prev.c.clone(),
            tanh_c,
        };
        (LstmState { h: hn, c }, cache)
    }

    /// Backpropagates one step. `dh` and `dc` are the loss gradients flowing
    /// into this step's outputs; accumulates into `grad` and returns
    /// `(dx, dh_prev, dc_prev)`.
    pub fn backward(
        &self,
        cache: &StepCache,
        dh: &[f64],
        dc: &[f64],
        grad: &mut LstmWeights,
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let h = self.hidden;
        let g = &cache.gates;
        let mut da = vec![0.0; 4 * h];
        let mut dc_prev = vec![0.0; h];
        for k in 0..h {
            let (i, f, cand, o) = (g[k], g[h + k], g[2 * h + k], g[3 * h + k]);
            let tc = cache.tanh_c[k];
            let dct = dc[k] + dh[k] * o * (1.0 - tc * tc);
            da[k] = dct * cand * i * (1.0 - i);
            da[h + k] = dct * cache.c_prev[k] * f * (1.0 - f);
            da[2 * h + k] = dct * i * (1.0 - cand * cand);
            da[3 * h + k] = dh[k] * tc * o * (1.0 - o);
            dc_prev[k] = dct * f;
        }
        grad.w.outer_acc(&da, &cache.z);
        linalg::add_assign(&mut grad.b, &da);
        let mut dz = vec![0.0; self.input + h];
        self.w.matvec_t_acc(&da, &mut dz);
        let dh_prev = dz.split_off(self.input);
        (dz, dh_prev, dc_prev)
    }
}
