use std::collections::VecDeque;

pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(n: usize, lr: f64, beta1: f64, beta2: f64, eps: f64) -> Self {
        Self {
            lr,
            beta1,
            beta2,
            eps,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    pub fn step(&mut self, x: &mut [f64], g: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for k in 0..x.len() {
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g[k];
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * g[k] * g[k];
            let m_hat = self.m[k] / c1;
            let v_hat = self.v[k] / c2;
            x[k] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

/// Limited-memory BFGS with a backtracking Armijo line search.
pub struct Lbfgs {
    memory: usize,
    max_steps: usize,
    history: VecDeque<(Vec<f64>, Vec<f64>, f64)>,
}

const ARMIJO: f64 = 1e-4;

impl Lbfgs {
    pub fn new(memory: usize, line_search_max_steps: usize) -> Self {
        Self {
            memory,
            max_steps: line_search_max_steps,
            history: VecDeque::with_capacity(memory),
        }
    }

    /// One iteration from (x, f, g). `eval` writes the gradient at its first
    /// argument into the second and returns the loss. Returns the new loss;
    /// x and g are updated in place. A failed line search leaves x unchanged
    /// and drops the curvature history.
    pub fn step(
        &mut self,
        x: &mut [f64],
        f: f64,
        g: &mut [f64],
        mut eval: impl FnMut(&[f64], &mut [f64]) -> f64,
    ) -> f64 {
        if g.iter().all(|v| *v == 0.0) {
            return f;
        }
        let mut d = self.direction(g);
        let mut slope = dot(g, &d);
        if !(slope < 0.0) {
            self.history.clear();
            d = g.iter().map(|v| -v).collect();
            slope = dot(g, &d);
        }

        let mut x_new = vec![0.0; x.len()];
        let mut g_new = vec![0.0; x.len()];
        let mut t = 1.0;
        for _ in 0..self.max_steps {
            for k in 0..x.len() {
                x_new[k] = x[k] + t * d[k];
            }
            let f_new = eval(&x_new, &mut g_new);
            if f_new.is_finite() && f_new <= f + ARMIJO * t * slope {
                let s: Vec<f64> = x_new.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = g_new.iter().zip(g.iter()).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 1e-10 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
                    if self.history.len() == self.memory {
                        self.history.pop_front();
                    }
                    self.history.push_back((s, y, 1.0 / sy));
                } else {
                    // Armijo alone does not guarantee positive curvature
                    self.history.clear();
                }
                x.copy_from_slice(&x_new);
                g.copy_from_slice(&g_new);
                return f_new;
            }
            t *= 0.5;
        }
        self.history.clear();
        f
    }

    /// -H g by the two-loop recursion.
    fn direction(&self, g: &[f64]) -> Vec<f64> {
        let mut q = g.to_vec();
        let mut alphas = Vec::with_capacity(self.history.len());
        for (s, y, rho) in self.history.iter().rev() {
            let alpha = rho * dot(s, &q);
            for (qk, yk) in q.iter_mut().zip(y) {
                *qk -= alpha * yk;
            }
            alphas.push(alpha);
        }
        if let Some((s, y, _)) = self.history.back() {
            let scale = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|v| *v *= scale);
        }
        for ((s, y, rho), alpha) in self.history.iter().zip(alphas.iter().rev()) {
            let beta = rho * dot(y, &q);
            for (qk, sk) in q.iter_mut().zip(s) {
                *qk += (alpha - beta) * sk;
            }
        }
        q.iter_mut().for_each(|v| *v = -*v);
        q
    }
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}
