//! Minimal graph neural link predictors.
//!
//! Two architectures over learnable node embeddings (no external node
//! features): symmetric-normalized convolution with self-loops, and mean
//! aggregation over the closed neighborhood. Edge scores come from an MLP
//! on the elementwise product of endpoint embeddings, trained with BCE
//! loss, Adam, and global gradient-norm clipping. Backward passes are
//! hand-derived layer by layer and checked against finite differences.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::eval;
use crate::graph::Graph;
use crate::linalg::Mat;
use crate::rng::{self, derive_seed};
use crate::scalar::Real;
use crate::split::NestedSplit;

/// Numerical floor inside the BCE logs.
pub const BCE_EPSILON: f64 = 1e-15;

/// Serialized checkpoint tag.
pub const GNN_SCHEMA_VERSION: &str = "linkpred.gnn/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GnnArchitecture {
    Gcn,
    Sage,
}

impl GnnArchitecture {
    pub fn name(&self) -> &'static str {
        match self {
            GnnArchitecture::Gcn => "GCN",
            GnnArchitecture::Sage => "SAGE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "GCN" => Some(GnnArchitecture::Gcn),
            "SAGE" => Some(GnnArchitecture::Sage),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnnConfig {
    pub architecture: GnnArchitecture,
    pub num_layers: usize,
    pub hidden_channels: usize,
    pub dropout: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Global L2 gradient clip threshold.
    pub clip_threshold: f64,
    /// Early-stopping patience on validation AUC, when validation is given.
    pub patience: usize,
    pub seed: u64,
}

impl GnnConfig {
    pub fn new(
        architecture: GnnArchitecture,
        num_layers: usize,
        hidden_channels: usize,
        seed: u64,
    ) -> Self {
        GnnConfig {
            architecture,
            num_layers,
            hidden_channels,
            dropout: 0.5,
            learning_rate: 0.005,
            epochs: 200,
            clip_threshold: 1.0,
            patience: 20,
            seed,
        }
    }
}

/// Learnable parameters: initial embeddings, per-layer weights, MLP head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnnModel<F> {
    pub config: GnnConfig,
    pub embeddings: Mat<F>,
    pub conv_weights: Vec<Mat<F>>,
    pub mlp_w1: Mat<F>,
    pub mlp_b1: Vec<F>,
    pub mlp_w2: Vec<F>,
    pub mlp_b2: F,
}

/// Per-epoch training diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub loss: f64,
    pub val_auc: Option<f64>,
}

/// Optional knobs for [`train_gnn`].
#[derive(Default)]
pub struct TrainOptions<'a> {
    /// Validation positives/negatives for early stopping and per-epoch AUC.
    pub validation: Option<(&'a [(usize, usize)], &'a [(usize, usize)])>,
    /// Reuse these negatives every epoch instead of resampling (tests).
    pub fixed_negatives: Option<&'a [(usize, usize)]>,
    /// Start from these embeddings instead of fresh initialization (tests).
    pub initial_embeddings: Option<Mat<f64>>,
}

/// Embeddings drawn i.i.d. from `Uniform(-1/sqrt(k), 1/sqrt(k))`.
pub fn init_embeddings<F: Real>(n: usize, k: usize, seed: u64) -> Mat<F> {
    assert!(n >= 1 && k >= 1);
    let bound = 1.0 / (k as f64).sqrt();
    let mut rng = rng::rng_from_seed(seed);
    let mut m = Mat::zeros(n, k);
    for r in 0..n {
        for c in 0..k {
            let u = rng::uniform_f64(&mut rng);
            m.set(r, c, F::of_f64(-bound + u * 2.0 * bound));
        }
    }
    m
}

/// Sparse propagation operator, one weighted row per node.
#[derive(Debug, Clone)]
pub struct Propagator<F> {
    rows: Vec<Vec<(usize, F)>>,
    /// Transposed rows for the backward pass.
    rows_t: Vec<Vec<(usize, F)>>,
}

impl<F: Real> Propagator<F> {
    /// `D~^{-1/2} (A+I) D~^{-1/2}`: symmetric normalization with self-loops.
    pub fn gcn(graph: &Graph) -> Self {
        let n = graph.node_count();
        let inv_sqrt: Vec<F> = (0..n)
            .map(|v| F::one() / F::of_usize(graph.degree(v) + 1).sqrt())
            .collect();
        let mut rows = vec![Vec::new(); n];
        for v in 0..n {
            rows[v].push((v, inv_sqrt[v] * inv_sqrt[v]));
            for &u in graph.neighbors(v) {
                rows[v].push((u, inv_sqrt[v] * inv_sqrt[u]));
            }
            rows[v].sort_by_key(|&(u, _)| u);
        }
        // symmetric operator: transpose equals itself
        Propagator {
            rows_t: rows.clone(),
            rows,
        }
    }

    /// Row-stochastic mean over the closed neighborhood `{v} u N(v)`.
    pub fn sage_mean(graph: &Graph) -> Self {
        let n = graph.node_count();
        let mut rows = vec![Vec::new(); n];
        for v in 0..n {
            let w = F::one() / F::of_usize(graph.degree(v) + 1);
            rows[v].push((v, w));
            for &u in graph.neighbors(v) {
                rows[v].push((u, w));
            }
            rows[v].sort_by_key(|&(u, _)| u);
        }
        let mut rows_t = vec![Vec::new(); n];
        for (v, row) in rows.iter().enumerate() {
            for &(u, w) in row {
                rows_t[u].push((v, w));
            }
        }
        for r in rows_t.iter_mut() {
            r.sort_by_key(|&(u, _)| u);
        }
        Propagator { rows, rows_t }
    }

    pub fn for_config(graph: &Graph, arch: GnnArchitecture) -> Self {
        match arch {
            GnnArchitecture::Gcn => Propagator::gcn(graph),
            GnnArchitecture::Sage => Propagator::sage_mean(graph),
        }
    }

    pub fn apply(&self, h: &Mat<F>) -> Mat<F> {
        Self::apply_rows(&self.rows, h)
    }

    pub fn apply_transpose(&self, h: &Mat<F>) -> Mat<F> {
        Self::apply_rows(&self.rows_t, h)
    }

    fn apply_rows(rows: &[Vec<(usize, F)>], h: &Mat<F>) -> Mat<F> {
        let mut out = Mat::zeros(h.rows(), h.cols());
        for (v, row) in rows.iter().enumerate() {
            for &(u, w) in row {
                let src = h.row(u).to_vec();
                let dst = out.row_mut(v);
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
        out
    }

    /// Dense form of the operator (spectral checks in tests).
    pub fn to_dense(&self) -> Mat<F> {
        let n = self.rows.len();
        let mut m = Mat::zeros(n, n);
        for (v, row) in self.rows.iter().enumerate() {
            for &(u, w) in row {
                m.set(v, u, w);
            }
        }
        m
    }
}

/// One propagation layer: `sigma(P H W)` with optional ReLU.
pub fn conv_layer<F: Real>(prop: &Propagator<F>, h: &Mat<F>, w: &Mat<F>, relu: bool) -> Mat<F> {
    let mut out = prop.apply(h).matmul(w);
    if relu {
        for v in out.data_mut() {
            if *v < F::zero() {
                *v = F::zero();
            }
        }
    }
    out
}

/// GCN layer on a graph (operator built on the fly).
pub fn gcn_layer<F: Real>(graph: &Graph, h: &Mat<F>, w: &Mat<F>, relu: bool) -> Mat<F> {
    conv_layer(&Propagator::gcn(graph), h, w, relu)
}

/// Mean-aggregation layer on a graph.
pub fn sage_layer<F: Real>(graph: &Graph, h: &Mat<F>, w: &Mat<F>, relu: bool) -> Mat<F> {
    conv_layer(&Propagator::sage_mean(graph), h, w, relu)
}

fn sigmoid<F: Real>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// BCE with the epsilon guard: mean over positives of `-log(y+eps)` plus
/// mean over negatives of `-log(1-y+eps)`.
pub fn bce_loss<F: Real>(pos_scores: &[F], neg_scores: &[F]) -> Result<F> {
    if pos_scores.is_empty() || neg_scores.is_empty() {
        return Err(Error::InvalidArgument(
            "BCE needs nonempty positive and negative score sets".into(),
        ));
    }
    let eps = F::of_f64(BCE_EPSILON);
    let pos: F =
        pos_scores.iter().map(|&p| -(p + eps).ln()).sum::<F>() / F::of_usize(pos_scores.len());
    let neg: F = neg_scores
        .iter()
        .map(|&p| -(F::one() - p + eps).ln())
        .sum::<F>()
        / F::of_usize(neg_scores.len());
    Ok(pos + neg)
}

struct ForwardCache<F> {
    /// Propagated inputs `P H` per layer.
    propagated: Vec<Mat<F>>,
    /// Pre-activation outputs per layer.
    pre_activation: Vec<Mat<F>>,
    /// Dropout keep masks (already scaled) per non-final layer, if any.
    dropout_masks: Vec<Option<Mat<F>>>,
    /// Final embeddings.
    output: Mat<F>,
}

impl<F: Real> GnnModel<F> {
    /// Fresh model with seeded initialization.
    pub fn init(n: usize, config: GnnConfig) -> Self {
        let k = config.hidden_channels;
        let embeddings = init_embeddings(n, k, derive_seed(config.seed, 1));
        // weight matrices use the same uniform fan-based scheme
        let conv_weights = (0..config.num_layers)
            .map(|l| init_embeddings(k, k, derive_seed(config.seed, 2 + l as u64)))
            .collect();
        let mlp_w1 = init_embeddings(k, k, derive_seed(config.seed, 100));
        let mlp_b1 = vec![F::zero(); k];
        let mlp_w2_m: Mat<F> = init_embeddings(1, k, derive_seed(config.seed, 101));
        let mlp_w2 = mlp_w2_m.row(0).to_vec();
        GnnModel {
            config,
            embeddings,
            conv_weights,
            mlp_w1,
            mlp_b1,
            mlp_w2,
            mlp_b2: F::zero(),
        }
    }

    fn forward(
        &self,
        prop: &Propagator<F>,
        dropout_rng: Option<&mut rand_chacha::ChaCha8Rng>,
    ) -> ForwardCache<F> {
        let layers = self.conv_weights.len();
        let mut propagated = Vec::with_capacity(layers);
        let mut pre_activation = Vec::with_capacity(layers);
        let mut dropout_masks = Vec::with_capacity(layers);
        let mut h = self.embeddings.clone();
        let mut rng = dropout_rng;
        for (l, w) in self.conv_weights.iter().enumerate() {
            let ph = prop.apply(&h);
            let pre = ph.matmul(w);
            propagated.push(ph);
            let last = l + 1 == layers;
            let mut out = pre.clone();
            pre_activation.push(pre);
            if !last {
                for v in out.data_mut() {
                    if *v < F::zero() {
                        *v = F::zero();
                    }
                }
                // inverted dropout after the activation, training only
                let mask = match (&mut rng, self.config.dropout > 0.0) {
                    (Some(r), true) => {
                        let keep = 1.0 - self.config.dropout;
                        let scale = F::of_f64(1.0 / keep);
                        let mut m = Mat::zeros(out.rows(), out.cols());
                        for row in 0..out.rows() {
                            for col in 0..out.cols() {
                                if rng::uniform_f64(r) < keep {
                                    m.set(row, col, scale);
                                }
                            }
                        }
                        for (o, &s) in out.data_mut().iter_mut().zip(m.data()) {
                            *o *= s;
                        }
                        Some(m)
                    }
                    _ => None,
                };
                dropout_masks.push(mask);
            } else {
                dropout_masks.push(None);
            }
            h = out;
        }
        ForwardCache {
            propagated,
            pre_activation,
            dropout_masks,
            output: h,
        }
    }

    /// Final node embeddings (inference path, no dropout).
    pub fn embed(&self, graph: &Graph) -> Mat<F> {
        let prop = Propagator::for_config(graph, self.config.architecture);
        self.forward(&prop, None).output
    }

    /// Scores for node pairs from final embeddings.
    pub fn score_with_embeddings(&self, emb: &Mat<F>, pairs: &[(usize, usize)]) -> Vec<F> {
        pairs
            .iter()
            .map(|&(i, j)| {
                let (logit, _, _) = self.head_forward(emb.row(i), emb.row(j));
                sigmoid(logit)
            })
            .collect()
    }

    /// Convenience: embed then score.
    pub fn score_pairs(&self, graph: &Graph, pairs: &[(usize, usize)]) -> Vec<F> {
        let emb = self.embed(graph);
        self.score_with_embeddings(&emb, pairs)
    }

    /// MLP head on `h_i (.) h_j`; returns (logit, hidden post-relu, product).
    fn head_forward(&self, hi: &[F], hj: &[F]) -> (F, Vec<F>, Vec<F>) {
        let k = hi.len();
        let z: Vec<F> = hi.iter().zip(hj).map(|(&a, &b)| a * b).collect();
        let mut hidden = vec![F::zero(); k];
        for r in 0..k {
            let mut s = self.mlp_b1[r];
            let wrow = self.mlp_w1.row(r);
            for (c, &zc) in z.iter().enumerate() {
                s += wrow[c] * zc;
            }
            hidden[r] = if s > F::zero() { s } else { F::zero() };
        }
        let mut logit = self.mlp_b2;
        for (c, &h) in hidden.iter().enumerate() {
            logit += self.mlp_w2[c] * h;
        }
        (logit, hidden, z)
    }

    /// Flattened view of all parameters, fixed order.
    pub fn flat_params(&self) -> Vec<F> {
        let mut out = Vec::new();
        out.extend_from_slice(self.embeddings.data());
        for w in &self.conv_weights {
            out.extend_from_slice(w.data());
        }
        out.extend_from_slice(self.mlp_w1.data());
        out.extend_from_slice(&self.mlp_b1);
        out.extend_from_slice(&self.mlp_w2);
        out.push(self.mlp_b2);
        out
    }

    /// Write back a flattened parameter vector.
    pub fn set_flat_params(&mut self, flat: &[F]) {
        let mut at = 0usize;
        let ne = self.embeddings.data().len();
        self.embeddings.data_mut().copy_from_slice(&flat[at..at + ne]);
        at += ne;
        for w in &mut self.conv_weights {
            let n = w.data().len();
            w.data_mut().copy_from_slice(&flat[at..at + n]);
            at += n;
        }
        let n1 = self.mlp_w1.data().len();
        self.mlp_w1.data_mut().copy_from_slice(&flat[at..at + n1]);
        at += n1;
        let nb = self.mlp_b1.len();
        self.mlp_b1.copy_from_slice(&flat[at..at + nb]);
        at += nb;
        let n2 = self.mlp_w2.len();
        self.mlp_w2.copy_from_slice(&flat[at..at + n2]);
        at += n2;
        self.mlp_b2 = flat[at];
    }

    /// Checkpoint container with config and seed.
    pub fn to_json(&self) -> Result<String> {
        let wrapper = serde_json::json!({
            "schema": GNN_SCHEMA_VERSION,
            "model": self,
        });
        Ok(serde_json::to_string(&wrapper)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        if v.get("schema").and_then(|s| s.as_str()) != Some(GNN_SCHEMA_VERSION) {
            return Err(Error::Format("unsupported gnn container".into()));
        }
        Ok(serde_json::from_value(
            v.get("model")
                .cloned()
                .ok_or_else(|| Error::Format("missing model body".into()))?,
        )?)
    }

    pub fn digest(&self) -> Result<String> {
        let mut hasher = Sha256::new();
        hasher.update(self.to_json()?.as_bytes());
        Ok(format!("{:x}", hasher.finalize()))
    }
}

/// Gradients in the same layout as the parameters.
pub struct Gradients<F> {
    pub embeddings: Mat<F>,
    pub conv_weights: Vec<Mat<F>>,
    pub mlp_w1: Mat<F>,
    pub mlp_b1: Vec<F>,
    pub mlp_w2: Vec<F>,
    pub mlp_b2: F,
}

impl<F: Real> Gradients<F> {
    fn zeros_like(model: &GnnModel<F>) -> Self {
        Gradients {
            embeddings: Mat::zeros(model.embeddings.rows(), model.embeddings.cols()),
            conv_weights: model
                .conv_weights
                .iter()
                .map(|w| Mat::zeros(w.rows(), w.cols()))
                .collect(),
            mlp_w1: Mat::zeros(model.mlp_w1.rows(), model.mlp_w1.cols()),
            mlp_b1: vec![F::zero(); model.mlp_b1.len()],
            mlp_w2: vec![F::zero(); model.mlp_w2.len()],
            mlp_b2: F::zero(),
        }
    }

    pub fn flatten(&self) -> Vec<F> {
        let mut out = Vec::new();
        out.extend_from_slice(self.embeddings.data());
        for w in &self.conv_weights {
            out.extend_from_slice(w.data());
        }
        out.extend_from_slice(self.mlp_w1.data());
        out.extend_from_slice(&self.mlp_b1);
        out.extend_from_slice(&self.mlp_w2);
        out.push(self.mlp_b2);
        out
    }

    fn global_norm(&self) -> F {
        self.flatten().iter().map(|&g| g * g).sum::<F>().sqrt()
    }

    fn scale(&mut self, s: F) {
        for v in self.embeddings.data_mut() {
            *v *= s;
        }
        for w in &mut self.conv_weights {
            for v in w.data_mut() {
                *v *= s;
            }
        }
        for v in self.mlp_w1.data_mut() {
            *v *= s;
        }
        for v in &mut self.mlp_b1 {
            *v *= s;
        }
        for v in &mut self.mlp_w2 {
            *v *= s;
        }
        self.mlp_b2 *= s;
    }
}

/// Loss and full analytic gradients for one batch of positive and negative
/// pairs, dropout controlled by `dropout_rng`.
pub fn loss_and_gradients<F: Real>(
    model: &GnnModel<F>,
    prop: &Propagator<F>,
    pos: &[(usize, usize)],
    neg: &[(usize, usize)],
    mut dropout_rng: Option<&mut rand_chacha::ChaCha8Rng>,
) -> Result<(F, Gradients<F>)> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::InvalidArgument(
            "training needs nonempty positive and negative pair sets".into(),
        ));
    }
    let cache = model.forward(prop, dropout_rng.as_deref_mut());
    let emb = &cache.output;
    let k = model.config.hidden_channels;
    let eps = F::of_f64(BCE_EPSILON);

    let mut grads = Gradients::zeros_like(model);
    let mut d_output = Mat::zeros(emb.rows(), emb.cols());
    let mut total_loss = F::zero();

    for (pairs, positive) in [(pos, true), (neg, false)] {
        let weight = F::one() / F::of_usize(pairs.len());
        for &(i, j) in pairs {
            let (logit, hidden, z) = model.head_forward(emb.row(i), emb.row(j));
            let p = sigmoid(logit);
            let q = p * (F::one() - p);
            let d_logit = if positive {
                total_loss += -(p + eps).ln() * weight;
                -q / (p + eps) * weight
            } else {
                total_loss += -(F::one() - p + eps).ln() * weight;
                q / (F::one() - p + eps) * weight
            };

            grads.mlp_b2 += d_logit;
            let mut d_hidden = vec![F::zero(); k];
            for c in 0..k {
                grads.mlp_w2[c] += d_logit * hidden[c];
                d_hidden[c] = d_logit * model.mlp_w2[c];
            }
            // relu gate of the hidden layer
            let mut d_z = vec![F::zero(); k];
            for r in 0..k {
                if hidden[r] > F::zero() {
                    let d_pre = d_hidden[r];
                    grads.mlp_b1[r] += d_pre;
                    let wrow = model.mlp_w1.row(r).to_vec();
                    let grow = grads.mlp_w1.row_mut(r);
                    for c in 0..k {
                        grow[c] += d_pre * z[c];
                        d_z[c] += d_pre * wrow[c];
                    }
                }
            }
            // z = h_i (.) h_j
            let hi = emb.row(i).to_vec();
            let hj = emb.row(j).to_vec();
            {
                let di = d_output.row_mut(i);
                for c in 0..k {
                    di[c] += d_z[c] * hj[c];
                }
            }
            {
                let dj = d_output.row_mut(j);
                for c in 0..k {
                    dj[c] += d_z[c] * hi[c];
                }
            }
        }
    }

    // back through the conv stack
    let layers = model.conv_weights.len();
    let mut d_h = d_output;
    for l in (0..layers).rev() {
        let last = l + 1 == layers;
        let mut d_pre = d_h;
        if !last {
            if let Some(mask) = &cache.dropout_masks[l] {
                for (g, &m) in d_pre.data_mut().iter_mut().zip(mask.data()) {
                    *g *= m;
                }
            }
            for (g, &a) in d_pre
                .data_mut()
                .iter_mut()
                .zip(cache.pre_activation[l].data())
            {
                if a <= F::zero() {
                    *g = F::zero();
                }
            }
        }
        // pre = (P H) W
        grads.conv_weights[l] = cache.propagated[l].transpose_matmul(&d_pre);
        let d_ph = d_pre.matmul(&model.conv_weights[l].transpose());
        d_h = prop.apply_transpose(&d_ph);
    }
    grads.embeddings = d_h;

    if !total_loss.is_finite() {
        return Err(Error::NonFinite(format!("loss {total_loss:?}")));
    }
    Ok((total_loss, grads))
}

/// Scale gradients so the global L2 norm is at most `threshold`.
/// `threshold = 0` zeroes every gradient.
pub fn clip_gradients<F: Real>(grads: &mut Gradients<F>, threshold: f64) {
    let t = F::of_f64(threshold);
    let norm = grads.global_norm();
    if norm > t {
        let scale = if norm > F::zero() { t / norm } else { F::zero() };
        grads.scale(scale);
    }
}

struct Adam<F> {
    m: Vec<F>,
    v: Vec<F>,
    t: usize,
}

impl<F: Real> Adam<F> {
    fn new(dim: usize) -> Self {
        Adam {
            m: vec![F::zero(); dim],
            v: vec![F::zero(); dim],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [F], grads: &[F], lr: f64) {
        self.t += 1;
        let b1 = F::of_f64(0.9);
        let b2 = F::of_f64(0.999);
        let eps = F::of_f64(1e-8);
        let lr = F::of_f64(lr);
        let bc1 = F::one() - F::of_f64(0.9f64.powi(self.t as i32));
        let bc2 = F::one() - F::of_f64(0.999f64.powi(self.t as i32));
        for ((p, &g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = b1 * *m + (F::one() - b1) * g;
            *v = b2 * *v + (F::one() - b2) * g * g;
            let mhat = *m / bc1;
            let vhat = *v / bc2;
            *p -= lr * mhat / (vhat.sqrt() + eps);
        }
    }
}

/// Train on the edges of `graph` as positives, with fresh 1:1 uniform
/// negative samples each epoch (unless fixed negatives are supplied).
pub fn train_gnn(
    graph: &Graph,
    config: GnnConfig,
    options: &TrainOptions,
) -> Result<(GnnModel<f64>, Vec<EpochStats>)> {
    if graph.edge_count() == 0 {
        return Err(Error::InvalidArgument(
            "graph has no edges to train on".into(),
        ));
    }
    let prop = Propagator::for_config(graph, config.architecture);
    let mut model = GnnModel::<f64>::init(graph.node_count(), config);
    if let Some(h0) = &options.initial_embeddings {
        model.embeddings = h0.clone();
    }
    let positives: Vec<(usize, usize)> = graph.edges().to_vec();
    let mut adam = Adam::new(model.flat_params().len());
    let mut stats = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, GnnModel<f64>, usize)> = None;

    for epoch in 0..config.epochs {
        let sampled;
        let negatives: &[(usize, usize)] = match options.fixed_negatives {
            Some(n) => n,
            None => {
                sampled = crate::split::sample_negatives(
                    graph,
                    positives.len(),
                    derive_seed(config.seed, 10_000 + epoch as u64),
                )?;
                &sampled.pairs
            }
        };
        let mut dropout_rng = rng::rng_from_seed(derive_seed(config.seed, 20_000 + epoch as u64));
        let (loss, mut grads) = loss_and_gradients(
            &model,
            &prop,
            &positives,
            negatives,
            if config.dropout > 0.0 {
                Some(&mut dropout_rng)
            } else {
                None
            },
        )?;
        clip_gradients(&mut grads, config.clip_threshold);
        let mut flat = model.flat_params();
        adam.step(&mut flat, &grads.flatten(), config.learning_rate);
        model.set_flat_params(&flat);

        let val_auc = match options.validation {
            Some((vp, vn)) => {
                let emb = model.forward(&prop, None).output;
                let ps = model.score_with_embeddings(&emb, vp);
                let ns = model.score_with_embeddings(&emb, vn);
                Some(eval::auc(&ps, &ns)?.as_f64())
            }
            None => None,
        };
        stats.push(EpochStats {
            epoch,
            loss,
            val_auc,
        });

        if let Some(auc) = val_auc {
            let improved = best.as_ref().map(|(b, _, _)| auc > *b).unwrap_or(true);
            if improved {
                best = Some((auc, model.clone(), epoch));
            } else if let Some((_, _, best_epoch)) = &best {
                if epoch - best_epoch >= config.patience {
                    break;
                }
            }
        }
    }

    if let Some((_, best_model, _)) = best {
        model = best_model;
    }
    Ok((model, stats))
}

/// Inner-validation report for one tuning cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneCell {
    pub num_layers: usize,
    pub hidden_channels: usize,
    pub val_auc: f64,
}

/// Grid over `(num_layers, hidden_channels)` per the tuning protocol:
/// train on the inner training graph, score the inner holdout against
/// sampled non-edges, pick the argmax cell (first cell wins ties).
pub fn tune_gnn(
    split: &NestedSplit,
    architecture: GnnArchitecture,
    num_layers_grid: &[usize],
    hidden_grid: &[usize],
    epochs: usize,
    neg_cap: usize,
    seed: u64,
) -> Result<(GnnConfig, Vec<TuneCell>)> {
    let g_inner = split.training_graph();
    let val_pos = split.inner_positives();
    if val_pos.is_empty() {
        return Err(Error::Degenerate("inner split held out no edges".into()));
    }
    let val_neg = crate::split::sample_negatives_excluding(
        split.observed_graph(),
        neg_cap.max(val_pos.len()),
        derive_seed(seed, 31),
        val_pos,
    )?;

    // training negatives overlapping evaluation negatives bias the inner
    // AUC slightly; report the epoch-0 overlap for the record
    let first_epoch_negs = crate::split::sample_negatives(
        g_inner,
        g_inner.edge_count().max(1),
        derive_seed(derive_seed(seed, 57), 10_000),
    )?;
    let eval_set: std::collections::HashSet<(usize, usize)> =
        val_neg.pairs.iter().copied().collect();
    let overlap = first_epoch_negs
        .pairs
        .iter()
        .filter(|p| eval_set.contains(p))
        .count();
    log::debug!(
        "tune {}: {} of {} first-epoch training negatives overlap evaluation negatives",
        architecture.name(),
        overlap,
        first_epoch_negs.pairs.len()
    );

    let mut cells = Vec::new();
    for &layers in num_layers_grid {
        for &hidden in hidden_grid {
            let mut config = GnnConfig::new(architecture, layers, hidden, derive_seed(seed, 57));
            config.epochs = epochs;
            let options = TrainOptions {
                validation: Some((val_pos, &val_neg.pairs)),
                ..TrainOptions::default()
            };
            let (model, _) = train_gnn(g_inner, config, &options)?;
            let ps = model.score_pairs(g_inner, val_pos);
            let ns = model.score_pairs(g_inner, &val_neg.pairs);
            let auc = eval::auc(&ps, &ns)?.as_f64();
            cells.push(TuneCell {
                num_layers: layers,
                hidden_channels: hidden,
                val_auc: auc,
            });
        }
    }

    let mut best = 0usize;
    for (i, c) in cells.iter().enumerate() {
        if c.val_auc > cells[best].val_auc + 1e-15 {
            best = i;
        }
    }
    let chosen = GnnConfig {
        epochs,
        ..GnnConfig::new(
            architecture,
            cells[best].num_layers,
            cells[best].hidden_channels,
            seed,
        )
    };
    Ok((chosen, cells))
}
