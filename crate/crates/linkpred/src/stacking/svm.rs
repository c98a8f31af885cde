//! RBF-kernel support vector classifier trained with SMO, with a logistic
//! calibration layer mapping decision values into [0, 1].

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

use super::tree::FeatureView;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    /// KKT violation tolerance.
    pub tol: f64,
    /// Updates allowed before training stops regardless of convergence.
    pub max_updates: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            tol: 1e-3,
            max_updates: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel<F> {
    pub params: SvmParams,
    /// Support rows (raw feature space).
    support: Vec<Vec<F>>,
    /// `alpha_i * y_i` per support row.
    coef: Vec<F>,
    bias: F,
    gamma: F,
    platt_a: F,
    platt_b: F,
}

fn rbf<F: Real>(gamma: F, a: &[F], b: &[F]) -> F {
    let mut d = F::zero();
    for (x, y) in a.iter().zip(b) {
        let v = *x - *y;
        d += v * v;
    }
    (-gamma * d).exp()
}

/// `gamma = 1 / (d * var(X))` over all matrix entries ("scale").
fn gamma_scale<F: Real, V: FeatureView<F>>(view: &V, n: usize) -> F {
    let d = view.width();
    let count = F::of_usize(n * d);
    let mut mean = F::zero();
    for i in 0..n {
        for c in 0..d {
            mean += view.feature(i, c);
        }
    }
    mean /= count;
    let mut var = F::zero();
    for i in 0..n {
        for c in 0..d {
            let v = view.feature(i, c) - mean;
            var += v * v;
        }
    }
    var /= count;
    if var <= F::of_f64(1e-12) {
        F::one() / F::of_usize(d)
    } else {
        F::one() / (F::of_usize(d) * var)
    }
}

impl<F: Real> SvmModel<F> {
    pub fn fit<V: FeatureView<F>>(view: &V, targets: &[F], params: SvmParams) -> Self {
        let n = targets.len();
        assert!(n > 1, "SVM needs at least two rows");
        let d = view.width();
        let gamma = gamma_scale(view, n);
        let rows: Vec<Vec<F>> = (0..n)
            .map(|i| (0..d).map(|c| view.feature(i, c)).collect())
            .collect();
        let y: Vec<F> = targets
            .iter()
            .map(|&t| if t > F::of_f64(0.5) { F::one() } else { -F::one() })
            .collect();
        let c = F::of_f64(params.c);
        let tol = F::of_f64(params.tol);

        let mut alpha = vec![F::zero(); n];
        let mut bias = F::zero();
        // u_k = sum_l alpha_l y_l K(l, k), maintained incrementally
        let mut u = vec![F::zero(); n];
        let mut updates = 0usize;
        let mut passes_without_change = 0usize;

        while passes_without_change < 1 && updates < params.max_updates {
            let mut changed = 0usize;
            for i in 0..n {
                let e_i = u[i] + bias - y[i];
                let viol = (y[i] * e_i < -tol && alpha[i] < c)
                    || (y[i] * e_i > tol && alpha[i] > F::zero());
                if !viol {
                    continue;
                }
                // second index: maximal |E_i - E_j|, first maximum wins
                let mut j = usize::MAX;
                let mut best_gap = F::neg_infinity();
                for cand in 0..n {
                    if cand == i {
                        continue;
                    }
                    let gap = (e_i - (u[cand] + bias - y[cand])).abs();
                    if gap > best_gap {
                        best_gap = gap;
                        j = cand;
                    }
                }
                if j == usize::MAX {
                    continue;
                }
                let e_j = u[j] + bias - y[j];

                let (lo, hi) = if y[i] == y[j] {
                    ((alpha[i] + alpha[j] - c).max(F::zero()), (alpha[i] + alpha[j]).min(c))
                } else {
                    ((alpha[j] - alpha[i]).max(F::zero()), (c + alpha[j] - alpha[i]).min(c))
                };
                if lo >= hi {
                    continue;
                }
                let k_ii = F::one();
                let k_jj = F::one();
                let k_ij = rbf(gamma, &rows[i], &rows[j]);
                let eta = F::of_f64(2.0) * k_ij - k_ii - k_jj;
                if eta >= F::zero() {
                    continue;
                }
                let mut a_j = alpha[j] - y[j] * (e_i - e_j) / eta;
                a_j = a_j.min(hi).max(lo);
                if (a_j - alpha[j]).abs() < F::of_f64(1e-7) {
                    continue;
                }
                let a_i = alpha[i] + y[i] * y[j] * (alpha[j] - a_j);

                let delta_i = (a_i - alpha[i]) * y[i];
                let delta_j = (a_j - alpha[j]) * y[j];

                // bias via the standard b1/b2 rule
                let b1 = bias - e_i - delta_i * k_ii - delta_j * k_ij;
                let b2 = bias - e_j - delta_i * k_ij - delta_j * k_jj;
                let new_bias = if a_i > F::zero() && a_i < c {
                    b1
                } else if a_j > F::zero() && a_j < c {
                    b2
                } else {
                    (b1 + b2) / F::of_f64(2.0)
                };

                alpha[i] = a_i;
                alpha[j] = a_j;
                bias = new_bias;
                for k in 0..n {
                    u[k] += delta_i * rbf(gamma, &rows[i], &rows[k])
                        + delta_j * rbf(gamma, &rows[j], &rows[k]);
                }
                changed += 1;
                updates += 1;
                if updates >= params.max_updates {
                    break;
                }
            }
            if changed == 0 {
                passes_without_change += 1;
            } else {
                passes_without_change = 0;
            }
        }

        // training decision values for the calibration fit
        let decisions: Vec<F> = (0..n).map(|k| u[k] + bias).collect();
        let (platt_a, platt_b) = platt_fit(&decisions, &y);

        let mut support = Vec::new();
        let mut coef = Vec::new();
        for i in 0..n {
            if alpha[i] > F::of_f64(1e-12) {
                support.push(rows[i].clone());
                coef.push(alpha[i] * y[i]);
            }
        }
        SvmModel {
            params,
            support,
            coef,
            bias,
            gamma,
            platt_a,
            platt_b,
        }
    }

    /// Raw decision value.
    pub fn decision(&self, row: &[F]) -> F {
        let mut s = self.bias;
        for (sv, &a) in self.support.iter().zip(&self.coef) {
            s += a * rbf(self.gamma, sv, row);
        }
        s
    }

    /// Calibrated probability.
    pub fn predict_row(&self, row: &[F]) -> F {
        let f = self.decision(row);
        let z = self.platt_a * f + self.platt_b;
        if z >= F::zero() {
            (-z).exp() / (F::one() + (-z).exp())
        } else {
            F::one() / (F::one() + z.exp())
        }
    }

    pub fn n_support(&self) -> usize {
        self.support.len()
    }
}

/// Platt scaling: fit `P(y=1|f) = 1/(1+exp(A f + B))` by Newton's method
/// with the usual regularized targets.
fn platt_fit<F: Real>(decisions: &[F], y: &[F]) -> (F, F) {
    let n = decisions.len();
    let prior1 = y.iter().filter(|&&v| v > F::zero()).count();
    let prior0 = n - prior1;
    let hi = F::of_usize(prior1 + 1) / F::of_usize(prior1 + 2);
    let lo = F::one() / F::of_usize(prior0 + 2);
    let targets: Vec<F> = y
        .iter()
        .map(|&v| if v > F::zero() { hi } else { lo })
        .collect();

    let mut a = F::zero();
    let mut b = (F::of_usize(prior0 + 1) / F::of_usize(prior1 + 1)).ln();
    let min_step = F::of_f64(1e-10);
    let sigma = F::of_f64(1e-12);

    let fval = |a: F, b: F| -> F {
        let mut v = F::zero();
        for (f, t) in decisions.iter().zip(&targets) {
            let z = *f * a + b;
            if z >= F::zero() {
                v += *t * z + (-z).exp().ln_1p();
            } else {
                v += (*t - F::one()) * z + z.exp().ln_1p();
            }
        }
        v
    };

    let mut best = fval(a, b);
    for _ in 0..100 {
        let mut h11 = sigma;
        let mut h22 = sigma;
        let mut h21 = F::zero();
        let mut g1 = F::zero();
        let mut g2 = F::zero();
        for (f, t) in decisions.iter().zip(&targets) {
            let z = *f * a + b;
            let (p, q) = if z >= F::zero() {
                let e = (-z).exp();
                (e / (F::one() + e), F::one() / (F::one() + e))
            } else {
                let e = z.exp();
                (F::one() / (F::one() + e), e / (F::one() + e))
            };
            let d2 = p * q;
            h11 += *f * *f * d2;
            h22 += d2;
            h21 += *f * d2;
            let d1 = *t - p;
            g1 += *f * d1;
            g2 += d1;
        }
        if g1.abs() < F::of_f64(1e-5) && g2.abs() < F::of_f64(1e-5) {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;

        let mut step = F::one();
        let mut improved = false;
        while step >= min_step {
            let na = a + step * da;
            let nb = b + step * db;
            let nv = fval(na, nb);
            if nv < best + F::of_f64(1e-4) * step * gd {
                a = na;
                b = nb;
                best = nv;
                improved = true;
                break;
            }
            step /= F::of_f64(2.0);
        }
        if !improved {
            break;
        }
    }
    (a, b)
}
