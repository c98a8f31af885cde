//! L1/L2-regularized logistic regression via proximal gradient (FISTA).
//!
//! Features are standardized internally (stored means and scales travel
//! with the model), the intercept is unpenalized, and the objective is
//! `penalty(w) + C * sum_i logloss_i` on the standardized design.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

use super::tree::FeatureView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Penalty {
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRegParams {
    pub c: f64,
    pub penalty: Penalty,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams {
            c: 1.0,
            penalty: Penalty::L2,
            max_iter: 1000,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression<F> {
    pub params: LogRegParams,
    weights: Vec<F>,
    intercept: F,
    means: Vec<F>,
    scales: Vec<F>,
}

fn sigmoid<F: Real>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// log(1 + e^z) without overflow.
fn log1p_exp<F: Real>(z: F) -> F {
    if z > F::zero() {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl<F: Real> LogisticRegression<F> {
    /// Directly assemble a model (tests, zero-weight baselines).
    pub fn with_parameters(
        params: LogRegParams,
        weights: Vec<F>,
        intercept: F,
        means: Vec<F>,
        scales: Vec<F>,
    ) -> Self {
        LogisticRegression {
            params,
            weights,
            intercept,
            means,
            scales,
        }
    }

    pub fn fit<V: FeatureView<F>>(view: &V, targets: &[F], params: LogRegParams) -> Self {
        let n = targets.len();
        let d = view.width();
        assert!(n > 0, "cannot fit on zero rows");

        // standardization statistics
        let mut means = vec![F::zero(); d];
        for i in 0..n {
            for (c, m) in means.iter_mut().enumerate() {
                *m += view.feature(i, c);
            }
        }
        for m in means.iter_mut() {
            *m /= F::of_usize(n);
        }
        let mut scales = vec![F::zero(); d];
        for i in 0..n {
            for c in 0..d {
                let v = view.feature(i, c) - means[c];
                scales[c] += v * v;
            }
        }
        for s in scales.iter_mut() {
            *s = (*s / F::of_usize(n)).sqrt();
            if *s <= F::of_f64(1e-12) {
                *s = F::one();
            }
        }
        let x = |i: usize, c: usize| (view.feature(i, c) - means[c]) / scales[c];

        let c_weight = F::of_f64(params.c);
        let l2 = params.penalty == Penalty::L2;

        // smooth objective and gradient; L2 folds into the smooth part
        let smooth = |w: &[F], b: F| -> F {
            let mut total = F::zero();
            for i in 0..n {
                let mut z = b;
                for (c, wc) in w.iter().enumerate() {
                    z += *wc * x(i, c);
                }
                total += log1p_exp(z) - targets[i] * z;
            }
            let mut obj = c_weight * total;
            if l2 {
                obj += F::of_f64(0.5) * w.iter().map(|&v| v * v).sum::<F>();
            }
            obj
        };
        let grad = |w: &[F], b: F, gw: &mut [F], gb: &mut F| {
            for g in gw.iter_mut() {
                *g = F::zero();
            }
            *gb = F::zero();
            for i in 0..n {
                let mut z = b;
                for (c, wc) in w.iter().enumerate() {
                    z += *wc * x(i, c);
                }
                let r = sigmoid(z) - targets[i];
                for (c, g) in gw.iter_mut().enumerate() {
                    *g += r * x(i, c);
                }
                *gb += r;
            }
            for g in gw.iter_mut() {
                *g *= c_weight;
            }
            *gb *= c_weight;
            if l2 {
                for (g, wc) in gw.iter_mut().zip(w) {
                    *g += *wc;
                }
            }
        };
        let l1_norm = |w: &[F]| -> F {
            if l2 {
                F::zero()
            } else {
                w.iter().map(|v| v.abs()).sum()
            }
        };

        // FISTA with backtracking
        let mut w = vec![F::zero(); d];
        let mut b = F::zero();
        let mut yw = w.clone();
        let mut yb = b;
        let mut t_momentum = F::one();
        let mut step = F::one();
        let mut gw = vec![F::zero(); d];
        let mut gb = F::zero();
        let mut obj_prev = smooth(&w, b) + l1_norm(&w);

        for _ in 0..params.max_iter {
            grad(&yw, yb, &mut gw, &mut gb);
            let fy = smooth(&yw, yb);

            // backtrack until the quadratic upper bound holds
            let (mut new_w, mut new_b);
            loop {
                new_w = yw
                    .iter()
                    .zip(&gw)
                    .map(|(&wi, &gi)| {
                        let v = wi - step * gi;
                        if l2 {
                            v
                        } else {
                            // soft threshold for the l1 prox
                            let thr = step;
                            if v > thr {
                                v - thr
                            } else if v < -thr {
                                v + thr
                            } else {
                                F::zero()
                            }
                        }
                    })
                    .collect::<Vec<F>>();
                new_b = yb - step * gb;
                let f_new = smooth(&new_w, new_b);
                let mut quad = fy;
                let mut dist_sq = F::zero();
                for ((nw, yw_i), g) in new_w.iter().zip(&yw).zip(&gw) {
                    let dv = *nw - *yw_i;
                    quad += *g * dv;
                    dist_sq += dv * dv;
                }
                let db = new_b - yb;
                quad += gb * db;
                dist_sq += db * db;
                quad += dist_sq / (F::of_f64(2.0) * step);
                if f_new <= quad + F::of_f64(1e-12) * quad.abs().max(F::one()) {
                    break;
                }
                step *= F::of_f64(0.5);
                if step < F::of_f64(1e-18) {
                    break;
                }
            }

            let t_next = (F::one() + (F::one() + F::of_f64(4.0) * t_momentum * t_momentum).sqrt())
                / F::of_f64(2.0);
            let mix = (t_momentum - F::one()) / t_next;
            for c in 0..d {
                yw[c] = new_w[c] + mix * (new_w[c] - w[c]);
            }
            yb = new_b + mix * (new_b - b);
            t_momentum = t_next;
            w = new_w;
            b = new_b;

            let obj = smooth(&w, b) + l1_norm(&w);
            if (obj_prev - obj).abs() <= F::of_f64(params.tol) * obj.abs().max(F::one()) {
                break;
            }
            obj_prev = obj;
        }

        LogisticRegression {
            params,
            weights: w,
            intercept: b,
            means,
            scales,
        }
    }

    /// Objective value at the fitted parameters (convergence tests).
    pub fn objective<V: FeatureView<F>>(&self, view: &V, targets: &[F]) -> F {
        let n = targets.len();
        let mut total = F::zero();
        for i in 0..n {
            let z = self.decision_from_view(view, i);
            total += log1p_exp(z) - targets[i] * z;
        }
        let mut obj = F::of_f64(self.params.c) * total;
        obj += match self.params.penalty {
            Penalty::L2 => F::of_f64(0.5) * self.weights.iter().map(|&v| v * v).sum::<F>(),
            Penalty::L1 => self.weights.iter().map(|v| v.abs()).sum::<F>(),
        };
        obj
    }

    fn decision_from_view<V: FeatureView<F>>(&self, view: &V, i: usize) -> F {
        let mut z = self.intercept;
        for (c, w) in self.weights.iter().enumerate() {
            z += *w * (view.feature(i, c) - self.means[c]) / self.scales[c];
        }
        z
    }

    pub fn predict_row(&self, row: &[F]) -> F {
        let mut z = self.intercept;
        for (c, w) in self.weights.iter().enumerate() {
            z += *w * (row[c] - self.means[c]) / self.scales[c];
        }
        sigmoid(z)
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }
}
