//! Flooding-schedule message-passing decoders: sum-product (BP) and
//! self-corrected min-sum (SCMS).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SparseBinaryMatrix;

/// Magnitude limit on variable-to-check messages entering the tanh rule.
const TANH_CLIP: f64 = 30.0;
const C2V_CLIP: f64 = 60.0;

pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    #[default]
    Bp,
    Scms,
}

impl std::str::FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bp" => Ok(DecoderKind::Bp),
            "scms" => Ok(DecoderKind::Scms),
            _ => Err(Error::Config(format!("unknown decoder {s:?} (bp | scms)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub hard_bits: Vec<u8>,
    /// Zero syndrome with no undecided (zero) posterior.
    pub converged: bool,
    pub iterations_used: usize,
    pub final_llrs: Vec<f64>,
}

/// Reusable decoder: edge structure and message buffers are allocated once
/// and reused across frames. Clone one per worker thread.
#[derive(Clone, Debug)]
pub struct Decoder {
    kind: DecoderKind,
    max_iter: usize,
    early_stop: bool,
    n_vars: usize,
    // edges are numbered check by check
    check_start: Vec<usize>,
    edge_var: Vec<usize>,
    var_start: Vec<usize>,
    var_edges: Vec<usize>,
    c2v: Vec<f64>,
    v2c: Vec<f64>,
    scratch: Vec<f64>,
}

impl Decoder {
    pub fn new(h: &SparseBinaryMatrix, kind: DecoderKind, max_iter: usize) -> Self {
        let mut check_start = Vec::with_capacity(h.n_rows() + 1);
        let mut edge_var = Vec::with_capacity(h.n_edges());
        check_start.push(0);
        for row in h.rows() {
            edge_var.extend_from_slice(row);
            check_start.push(edge_var.len());
        }
        let mut var_start = vec![0; h.n_cols() + 1];
        for &v in &edge_var {
            var_start[v + 1] += 1;
        }
        for v in 0..h.n_cols() {
            var_start[v + 1] += var_start[v];
        }
        let mut fill = var_start.clone();
        let mut var_edges = vec![0; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v]] = e;
            fill[v] += 1;
        }
        let max_deg = h.rows().iter().map(Vec::len).max().unwrap_or(0);
        Decoder {
            kind,
            max_iter: max_iter.max(1),
            early_stop: true,
            n_vars: h.n_cols(),
            check_start,
            edge_var,
            var_start,
            var_edges,
            c2v: vec![0.0; h.n_edges()],
            v2c: vec![0.0; h.n_edges()],
            scratch: vec![0.0; 2 * max_deg + 2],
        }
    }

    /// With early stopping off, all `max_iter` iterations run even after the
    /// syndrome clears.
    pub fn with_early_stop(mut self, on: bool) -> Self {
        self.early_stop = on;
        self
    }

    pub fn kind(&self) -> DecoderKind {
        self.kind
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }

    fn n_checks(&self) -> usize {
        self.check_start.len() - 1
    }

    fn satisfied(&self, post: &[f64]) -> bool {
        if post.contains(&0.0) {
            return false;
        }
        (0..self.n_checks()).all(|c| {
            self.edge_var[self.check_start[c]..self.check_start[c + 1]]
                .iter()
                .filter(|&&v| post[v] < 0.0)
                .count()
                % 2
                == 0
        })
    }

    pub fn decode(&mut self, llr: &[f64]) -> Result<DecodeResult> {
        if llr.len() != self.n_vars {
            return Err(Error::Config(format!(
                "{} LLRs for a code of length {}",
                llr.len(),
                self.n_vars
            )));
        }
        let mut post = llr.to_vec();
        let mut iterations = 0;
        let mut converged = self.satisfied(&post);
        if !converged || !self.early_stop {
            for (e, &v) in self.edge_var.iter().enumerate() {
                self.v2c[e] = llr[v];
            }
            for it in 1..=self.max_iter {
                iterations = it;
                match self.kind {
                    DecoderKind::Bp => self.check_update_bp(),
                    DecoderKind::Scms => self.check_update_min_sum(),
                }
                self.variable_update(llr, &mut post);
                converged = self.satisfied(&post);
                if converged && self.early_stop {
                    break;
                }
            }
        }
        let hard_bits = post.iter().map(|&p| u8::from(p < 0.0)).collect();
        Ok(DecodeResult {
            hard_bits,
            converged,
            iterations_used: iterations,
            final_llrs: post,
        })
    }

    fn check_update_bp(&mut self) {
        for c in 0..self.n_checks() {
            let (s, e) = (self.check_start[c], self.check_start[c + 1]);
            let d = e - s;
            let (t, pre) = self.scratch.split_at_mut(d);
            for (k, ti) in t.iter_mut().enumerate() {
                *ti = (0.5 * self.v2c[s + k].clamp(-TANH_CLIP, TANH_CLIP)).tanh();
            }
            // pre[k] = product of t[0..k]; the suffix product is accumulated
            // on the way back
            pre[0] = 1.0;
            for k in 0..d {
                pre[k + 1] = pre[k] * t[k];
            }
            let mut suffix = 1.0;
            for k in (0..d).rev() {
                let p = pre[k] * suffix;
                // std's atanh is not exactly odd; keep the rule sign-symmetric
                self.c2v[s + k] = (2.0 * p.abs().atanh()).min(C2V_CLIP).copysign(p);
                suffix *= t[k];
            }
        }
    }

    fn check_update_min_sum(&mut self) {
        for c in 0..self.n_checks() {
            let (s, e) = (self.check_start[c], self.check_start[c + 1]);
            let mut negative = false;
            let (mut min1, mut min2, mut arg) = (f64::INFINITY, f64::INFINITY, s);
            for k in s..e {
                let m = self.v2c[k];
                negative ^= m < 0.0;
                let a = m.abs();
                if a < min1 {
                    min2 = min1;
                    min1 = a;
                    arg = k;
                } else if a < min2 {
                    min2 = a;
                }
            }
            for k in s..e {
                let mag = if k == arg { min2 } else { min1 };
                let neg = negative ^ (self.v2c[k] < 0.0);
                self.c2v[k] = if neg { -mag } else { mag };
            }
        }
    }

    fn variable_update(&mut self, llr: &[f64], post: &mut [f64]) {
        let scms = self.kind == DecoderKind::Scms;
        for v in 0..self.n_vars {
            let edges = &self.var_edges[self.var_start[v]..self.var_start[v + 1]];
            let total = llr[v] + edges.iter().map(|&e| self.c2v[e]).sum::<f64>();
            post[v] = total;
            for &e in edges {
                let new = total - self.c2v[e];
                let old = self.v2c[e];
                self.v2c[e] = if scms && new * old < 0.0 { 0.0 } else { new };
            }
        }
    }
}

/// One-shot sum-product decoding.
pub fn decode_bp(h: &SparseBinaryMatrix, llr: &[f64], max_iter: usize) -> Result<DecodeResult> {
    Decoder::new(h, DecoderKind::Bp, max_iter).decode(llr)
}

/// One-shot self-corrected min-sum decoding.
pub fn decode_scms(h: &SparseBinaryMatrix, llr: &[f64], max_iter: usize) -> Result<DecodeResult> {
    Decoder::new(h, DecoderKind::Scms, max_iter).decode(llr)
}
