//! Compact LSTM classifier: embedding → single LSTM layer → dropout →
//! softmax head, with hand-written forward, backpropagation through time,
//! and Adam. All arithmetic is in f64 and every training run is
//! deterministic under its seed.
//!
//! Sequences are right-padded; the classifier reads the hidden state at the
//! last real token (`true_len`), so padding never influences the output.
//! Gate blocks are ordered input, forget, cell candidate, output within
//! every 4h-sized tensor.

use crate::corpus::Sentiment;
use crate::error::{Error, Result};
use crate::features::PaddedSeq;
use crate::rng::Rng;

/// All trainable tensors. Matrices are row-major: `e` is vocab_size×d,
/// `w` 4h×d, `u` 4h×h, `w_out` c×h.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub vocab_size: usize,
    pub d: usize,
    pub h: usize,
    pub c: usize,
    pub e: Vec<f64>,
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub b_g: Vec<f64>,
    pub w_out: Vec<f64>,
    pub b_out: Vec<f64>,
}

/// Trainable scalar count: V·d + 4(h·d + h² + h) + (h·C + C).
pub fn param_count(vocab_size: usize, d: usize, h: usize, c: usize) -> usize {
    vocab_size * d + 4 * (h * d + h * h + h) + (h * c + c)
}

impl LstmParams {
    pub fn zeros(vocab_size: usize, d: usize, h: usize, c: usize) -> LstmParams {
        LstmParams {
            vocab_size,
            d,
            h,
            c,
            e: vec![0.0; vocab_size * d],
            w: vec![0.0; 4 * h * d],
            u: vec![0.0; 4 * h * h],
            b_g: vec![0.0; 4 * h],
            w_out: vec![0.0; c * h],
            b_out: vec![0.0; c],
        }
    }

    /// Seeded initialization: embeddings uniform(−0.1, 0.1), gate and head
    /// weights uniform(−1/√h, 1/√h), biases zero except the forget-gate
    /// block at +1.
    pub fn init(vocab_size: usize, d: usize, h: usize, c: usize, rng: &mut Rng) -> LstmParams {
        let mut p = LstmParams::zeros(vocab_size, d, h, c);
        for e in &mut p.e {
            *e = rng.uniform(-0.1, 0.1);
        }
        let bound = 1.0 / (h as f64).sqrt();
        for w in &mut p.w {
            *w = rng.uniform(-bound, bound);
        }
        for u in &mut p.u {
            *u = rng.uniform(-bound, bound);
        }
        for w in &mut p.w_out {
            *w = rng.uniform(-bound, bound);
        }
        for bf in &mut p.b_g[h..2 * h] {
            *bf = 1.0;
        }
        p
    }

    /// Number of scalars actually stored; equals [`param_count`] by
    /// construction.
    pub fn stored_scalars(&self) -> usize {
        self.e.len()
            + self.w.len()
            + self.u.len()
            + self.b_g.len()
            + self.w_out.len()
            + self.b_out.len()
    }
}

/// Forward mode: inference is mask-free; training applies the given
/// inverted-dropout mask (entries 0 or 1/(1−p)) to the final hidden vector.
#[derive(Debug, Clone, Copy)]
pub enum Mode<'a> {
    Infer,
    Train { mask: &'a [f64] },
}

/// Everything backward needs, recorded during a forward pass.
#[derive(Debug, Clone)]
pub struct Cache {
    ids: Vec<usize>,
    /// Post-activation gates per step, flat 4h in i,f,g,o order.
    gates: Vec<Vec<f64>>,
    /// Cell states per step.
    cs: Vec<Vec<f64>>,
    /// tanh(c_t) per step.
    tc: Vec<Vec<f64>>,
    /// Hidden states per step.
    hs: Vec<Vec<f64>>,
    /// Effective dropout mask (all ones in infer mode).
    mask: Vec<f64>,
    /// Final hidden vector after dropout.
    h_drop: Vec<f64>,
    probs: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Runs the cell over the real tokens of `seq` and classifies from the
/// hidden state at `true_len`. Padding positions are never visited.
pub fn forward(seq: &PaddedSeq, p: &LstmParams, mode: Mode) -> Result<(Vec<f64>, Cache)> {
    if seq.true_len == 0 {
        return Err(Error::EmptySequence);
    }
    let (d, h) = (p.d, p.h);
    let ids = &seq.ids[..seq.true_len];
    let mut gates = Vec::with_capacity(ids.len());
    let mut cs = Vec::with_capacity(ids.len());
    let mut tc = Vec::with_capacity(ids.len());
    let mut hs = Vec::with_capacity(ids.len());

    let mut h_prev = vec![0.0; h];
    let mut c_prev = vec![0.0; h];
    for &id in ids {
        assert!(id < p.vocab_size, "token id {id} out of vocabulary");
        let x = &p.e[id * d..(id + 1) * d];
        let mut z = p.b_g.clone();
        for (r, zr) in z.iter_mut().enumerate() {
            let wrow = &p.w[r * d..(r + 1) * d];
            let urow = &p.u[r * h..(r + 1) * h];
            let mut acc = 0.0;
            for (wk, xk) in wrow.iter().zip(x) {
                acc += wk * xk;
            }
            for (uk, hk) in urow.iter().zip(&h_prev) {
                acc += uk * hk;
            }
            *zr += acc;
        }
        let mut gate = vec![0.0; 4 * h];
        let mut cell = vec![0.0; h];
        let mut tanh_c = vec![0.0; h];
        let mut hidden = vec![0.0; h];
        for j in 0..h {
            let i_ = sigmoid(z[j]);
            let f_ = sigmoid(z[h + j]);
            let g_ = z[2 * h + j].tanh();
            let o_ = sigmoid(z[3 * h + j]);
            gate[j] = i_;
            gate[h + j] = f_;
            gate[2 * h + j] = g_;
            gate[3 * h + j] = o_;
            cell[j] = f_ * c_prev[j] + i_ * g_;
            tanh_c[j] = cell[j].tanh();
            hidden[j] = o_ * tanh_c[j];
        }
        gates.push(gate);
        cs.push(cell.clone());
        tc.push(tanh_c);
        hs.push(hidden.clone());
        c_prev = cell;
        h_prev = hidden;
    }

    let mask: Vec<f64> = match mode {
        Mode::Infer => vec![1.0; h],
        Mode::Train { mask } => {
            assert_eq!(mask.len(), h, "dropout mask must have length h");
            mask.to_vec()
        }
    };
    let h_drop: Vec<f64> = h_prev.iter().zip(&mask).map(|(a, m)| a * m).collect();

    let mut logits = p.b_out.clone();
    for (ci, l) in logits.iter_mut().enumerate() {
        let row = &p.w_out[ci * h..(ci + 1) * h];
        for (wk, hk) in row.iter().zip(&h_drop) {
            *l += wk * hk;
        }
    }
    let probs = softmax(&logits);

    let cache = Cache {
        ids: ids.to_vec(),
        gates,
        cs,
        tc,
        hs,
        mask,
        h_drop,
        probs: probs.clone(),
    };
    Ok((probs, cache))
}

/// −ln P(label), with probabilities clamped at 1e-12 before the log.
pub fn cross_entropy(probs: &[f64], label: usize) -> f64 {
    -probs[label].max(1e-12).ln()
}

/// Parameter gradients, same shapes as [`LstmParams`].
#[derive(Debug, Clone)]
pub struct Gradients {
    pub e: Vec<f64>,
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub b_g: Vec<f64>,
    pub w_out: Vec<f64>,
    pub b_out: Vec<f64>,
}

impl Gradients {
    pub fn zeros(p: &LstmParams) -> Gradients {
        Gradients {
            e: vec![0.0; p.e.len()],
            w: vec![0.0; p.w.len()],
            u: vec![0.0; p.u.len()],
            b_g: vec![0.0; p.b_g.len()],
            w_out: vec![0.0; p.w_out.len()],
            b_out: vec![0.0; p.b_out.len()],
        }
    }

    fn scale(&mut self, s: f64) {
        for field in [
            &mut self.e,
            &mut self.w,
            &mut self.u,
            &mut self.b_g,
            &mut self.w_out,
            &mut self.b_out,
        ] {
            for g in field.iter_mut() {
                *g *= s;
            }
        }
    }

    fn global_norm(&self) -> f64 {
        let mut sq = 0.0;
        for field in [
            &self.e,
            &self.w,
            &self.u,
            &self.b_g,
            &self.w_out,
            &self.b_out,
        ] {
            for g in field.iter() {
                sq += g * g;
            }
        }
        sq.sqrt()
    }
}

/// Exact gradients of `cross_entropy ∘ forward` for one sequence,
/// accumulated into `grads` (callers batch by summing then scaling).
pub fn backward_into(cache: &Cache, p: &LstmParams, label: usize, grads: &mut Gradients) {
    let (d, h, c) = (p.d, p.h, p.c);
    let tl = cache.ids.len();

    let mut dlogits = cache.probs.clone();
    dlogits[label] -= 1.0;
    for ci in 0..c {
        grads.b_out[ci] += dlogits[ci];
        for j in 0..h {
            grads.w_out[ci * h + j] += dlogits[ci] * cache.h_drop[j];
        }
    }
    let mut dh = vec![0.0; h];
    for j in 0..h {
        let mut acc = 0.0;
        for ci in 0..c {
            acc += dlogits[ci] * p.w_out[ci * h + j];
        }
        dh[j] = acc * cache.mask[j];
    }

    let mut dc = vec![0.0; h];
    let mut dz = vec![0.0; 4 * h];
    let zero = vec![0.0; h];
    for t in (0..tl).rev() {
        let gate = &cache.gates[t];
        let tanh_c = &cache.tc[t];
        let c_prev = if t == 0 { &zero } else { &cache.cs[t - 1] };
        let h_prev = if t == 0 { &zero } else { &cache.hs[t - 1] };

        for j in 0..h {
            let i_ = gate[j];
            let f_ = gate[h + j];
            let g_ = gate[2 * h + j];
            let o_ = gate[3 * h + j];
            let d_o = dh[j] * tanh_c[j];
            dc[j] += dh[j] * o_ * (1.0 - tanh_c[j] * tanh_c[j]);
            dz[j] = dc[j] * g_ * i_ * (1.0 - i_);
            dz[h + j] = dc[j] * c_prev[j] * f_ * (1.0 - f_);
            dz[2 * h + j] = dc[j] * i_ * (1.0 - g_ * g_);
            dz[3 * h + j] = d_o * o_ * (1.0 - o_);
        }

        let id = cache.ids[t];
        let x = &p.e[id * d..(id + 1) * d];
        for r in 0..4 * h {
            let dzr = dz[r];
            grads.b_g[r] += dzr;
            if dzr != 0.0 {
                let wrow = &mut grads.w[r * d..(r + 1) * d];
                for (gk, xk) in wrow.iter_mut().zip(x) {
                    *gk += dzr * xk;
                }
                let urow = &mut grads.u[r * h..(r + 1) * h];
                for (gk, hk) in urow.iter_mut().zip(h_prev) {
                    *gk += dzr * hk;
                }
            }
        }

        let erow = &mut grads.e[id * d..(id + 1) * d];
        for (k, ek) in erow.iter_mut().enumerate() {
            let mut acc = 0.0;
            for r in 0..4 * h {
                acc += p.w[r * d + k] * dz[r];
            }
            *ek += acc;
        }
        let mut dh_prev = vec![0.0; h];
        for (k, dhk) in dh_prev.iter_mut().enumerate() {
            let mut acc = 0.0;
            for r in 0..4 * h {
                acc += p.u[r * h + k] * dz[r];
            }
            *dhk = acc;
        }
        for j in 0..h {
            dc[j] *= gate[h + j];
        }
        dh = dh_prev;
    }
}

/// Allocating wrapper around [`backward_into`].
pub fn backward(cache: &Cache, p: &LstmParams, label: usize) -> Gradients {
    let mut g = Gradients::zeros(p);
    backward_into(cache, p, label, &mut g);
    g
}

/// First/second moment estimates for every parameter, in the canonical
/// field order e, w, u, b_g, w_out, b_out.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(p: &LstmParams) -> AdamState {
        let n = p.stored_scalars();
        AdamState {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }
}

/// One bias-corrected Adam update over all parameters.
pub fn adam_step(
    p: &mut LstmParams,
    g: &Gradients,
    s: &mut AdamState,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
) {
    s.t += 1;
    let bc1 = 1.0 - beta1.powi(s.t as i32);
    let bc2 = 1.0 - beta2.powi(s.t as i32);
    let mut off = 0;
    let params: [&mut Vec<f64>; 6] = [
        &mut p.e,
        &mut p.w,
        &mut p.u,
        &mut p.b_g,
        &mut p.w_out,
        &mut p.b_out,
    ];
    let grads: [&Vec<f64>; 6] = [&g.e, &g.w, &g.u, &g.b_g, &g.w_out, &g.b_out];
    for (pf, gf) in params.into_iter().zip(grads) {
        for (pj, gj) in pf.iter_mut().zip(gf) {
            let m = &mut s.m[off];
            let v = &mut s.v[off];
            *m = beta1 * *m + (1.0 - beta1) * gj;
            *v = beta2 * *v + (1.0 - beta2) * gj * gj;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *pj -= lr * m_hat / (v_hat.sqrt() + eps);
            off += 1;
        }
    }
}

/// Training settings per the reference configuration: Adam(0.9, 0.999,
/// 1e-8), lr 0.001, batch 32, 20 epochs, dropout 0.3.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub lr: f64,
    pub batch: usize,
    pub epochs: usize,
    pub dropout: f64,
    pub seed: u64,
    /// Optional global-norm gradient clipping threshold.
    pub clip: Option<f64>,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            lr: 0.001,
            batch: 32,
            epochs: 20,
            dropout: 0.3,
            seed: 42,
            clip: None,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One epoch of the loss/accuracy curves.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub train_acc: f64,
    pub val_acc: f64,
}

impl EpochLog {
    pub const CSV_HEADER: &'static str = "epoch,train_loss,val_loss,train_acc,val_acc";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.6},{:.6},{:.6},{:.6}",
            self.epoch, self.train_loss, self.val_loss, self.train_acc, self.val_acc
        )
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate().skip(1) {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

fn evaluate(set: &[(PaddedSeq, Sentiment)], p: &LstmParams) -> (f64, f64) {
    if set.is_empty() {
        return (0.0, 0.0);
    }
    let mut loss = 0.0;
    let mut correct = 0usize;
    for (seq, label) in set {
        let (probs, _) = forward(seq, p, Mode::Infer).expect("non-empty sequence");
        loss += cross_entropy(&probs, label.index());
        if argmax(&probs) == label.index() {
            correct += 1;
        }
    }
    (loss / set.len() as f64, correct as f64 / set.len() as f64)
}

/// Trains with seeded per-epoch shuffling and one dropout mask per
/// mini-batch; the last partial batch is trained, not dropped. Training
/// loss/accuracy are measured on the pre-update forward passes of each
/// batch. Every sequence must have `true_len ≥ 1` (callers filter empties).
pub fn train(
    train_set: &[(PaddedSeq, Sentiment)],
    val_set: &[(PaddedSeq, Sentiment)],
    mut params: LstmParams,
    cfg: &TrainConfig,
) -> Result<(LstmParams, Vec<EpochLog>)> {
    if train_set.is_empty() {
        return Err(Error::EmptyTrainSet);
    }
    for (seq, _) in train_set.iter().chain(val_set) {
        if seq.true_len == 0 {
            return Err(Error::EmptySequence);
        }
    }

    let h = params.h;
    let mut rng = Rng::new(cfg.seed);
    let mut adam = AdamState::new(&params);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut logs = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        rng.shuffle(&mut order);
        let mut loss_sum = 0.0;
        let mut correct = 0usize;
        for chunk in order.chunks(cfg.batch) {
            let mask: Vec<f64> = (0..h)
                .map(|_| {
                    if cfg.dropout > 0.0 && rng.next_f64() < cfg.dropout {
                        0.0
                    } else if cfg.dropout > 0.0 {
                        1.0 / (1.0 - cfg.dropout)
                    } else {
                        1.0
                    }
                })
                .collect();
            let mut grads = Gradients::zeros(&params);
            for &i in chunk {
                let (seq, label) = &train_set[i];
                let (probs, cache) = forward(seq, &params, Mode::Train { mask: &mask })?;
                loss_sum += cross_entropy(&probs, label.index());
                if argmax(&probs) == label.index() {
                    correct += 1;
                }
                backward_into(&cache, &params, label.index(), &mut grads);
            }
            grads.scale(1.0 / chunk.len() as f64);
            if let Some(threshold) = cfg.clip {
                let norm = grads.global_norm();
                if norm > threshold {
                    grads.scale(threshold / norm);
                }
            }
            adam_step(
                &mut params,
                &grads,
                &mut adam,
                cfg.lr,
                cfg.beta1,
                cfg.beta2,
                cfg.eps,
            );
        }
        let n = train_set.len() as f64;
        let (val_loss, val_acc) = evaluate(val_set, &params);
        logs.push(EpochLog {
            epoch,
            train_loss: loss_sum / n,
            val_loss,
            train_acc: correct as f64 / n,
            val_acc,
        });
    }
    Ok((params, logs))
}
