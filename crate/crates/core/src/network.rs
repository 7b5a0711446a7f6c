//! Layered networks whose binary weights are read off the codebook.
//!
//! The single-label network has one weight matrix `W1` (`n × 2^k`, column `j`
//! = codeword `j`) and an argmax readout. The multi-label network adds a
//! scaled-softmax activation on those `2^k` neurons and a second matrix `W2`
//! (`2^k × k`, row `j` = message `j`) followed by a threshold at one half.
//! Biases are identically zero and are not stored.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{CodewordStream, GeneratorMatrix};
use crate::scalar::Real;

/// Storage order of a [`BinaryMatrix`]; each lane is one packed column or row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Each lane is a column of at most 64 rows.
    ColumnMajor,
    /// Each lane is a row of at most 64 columns.
    RowMajor,
}

/// Dense 0/1 matrix with one dimension packed into `u64` lanes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    layout: Layout,
    lanes: Vec<u64>,
}

impl BinaryMatrix {
    pub fn from_columns(rows: usize, columns: Vec<u64>) -> Self {
        assert!(rows <= 64);
        Self { rows, cols: columns.len(), layout: Layout::ColumnMajor, lanes: columns }
    }

    pub fn from_rows(cols: usize, rows: Vec<u64>) -> Self {
        assert!(cols <= 64);
        Self { rows: rows.len(), cols, layout: Layout::RowMajor, lanes: rows }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn lanes(&self) -> &[u64] {
        &self.lanes
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols);
        match self.layout {
            Layout::ColumnMajor => (self.lanes[j] >> i) & 1 == 1,
            Layout::RowMajor => (self.lanes[i] >> j) & 1 == 1,
        }
    }

    /// Number of nonzero entries, i.e. edges of the layer.
    pub fn nonzeros(&self) -> u64 {
        self.lanes.iter().map(|l| u64::from(l.count_ones())).sum()
    }
}

/// How the softmax scale is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum AlphaMode<S> {
    /// `α = 2 / σ²` for the σ supplied at decode time.
    Matched,
    /// Frozen `α`, independent of the operating point.
    Fixed { alpha: S },
}

impl<S: Real> AlphaMode<S> {
    /// Fixed mode with `α` computed for a given Eb/N0 and rate.
    pub fn fixed_at(ebn0_db: f64, rate: f64) -> Result<Self> {
        let sigma: S = crate::channel::ebn0_to_sigma(ebn0_db, rate)?;
        Ok(AlphaMode::Fixed { alpha: S::lit(2.0) / (sigma * sigma) })
    }

    pub fn resolve(&self, sigma: S) -> Result<S> {
        match *self {
            AlphaMode::Fixed { alpha } => Ok(alpha),
            AlphaMode::Matched if sigma < S::zero() || sigma.is_nan() => {
                Err(Error::InvalidSigma(sigma.as_f64()))
            }
            AlphaMode::Matched => Ok(S::lit(2.0) / (sigma * sigma)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation<S> {
    Identity,
    ScaledSoftmax(AlphaMode<S>),
}

/// Decision stage after the last layer (not a layer itself: it has no weights).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    /// Index of the largest output, lowest index on ties.
    Argmax,
    /// Bit `i` is 1 iff output `i` exceeds one half.
    HalfThreshold,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeCount {
    pub per_layer: Vec<u64>,
    pub total: u64,
}

/// Serializable summary used by `net describe`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetDescription<S> {
    pub code: String,
    pub layer_sizes: Vec<usize>,
    pub edges_per_layer: Vec<u64>,
    pub total_edges: u64,
    pub binary_weights: bool,
    pub alpha_mode: Option<AlphaMode<S>>,
}

/// Output of the single-label network.
#[derive(Debug, Clone, PartialEq)]
pub struct SlnnOutput<S> {
    pub scores: Vec<S>,
    /// Winning output neuron, `j - 1`.
    pub argmax_index: u64,
}

/// Output of the multi-label network.
#[derive(Debug, Clone, PartialEq)]
pub struct MlnnOutput<S> {
    /// `P(b_i = 1 | r)` for `i = 1..k`.
    pub posteriors: Vec<S>,
    /// `P(b_i = 0 | r)`, accumulated separately over the complementary rows.
    pub complements: Vec<S>,
    /// Thresholded bits as a canonical message index.
    pub index: u64,
}

/// Byte-sliced lookup tables: `table[c][v]` is the sum of `r_i` over the set
/// bits of byte value `v` placed at byte `c`, so `r · w` for a packed column
/// `w` costs one lookup per byte.
#[derive(Debug, Clone)]
struct ByteTables<S> {
    tables: Vec<[S; 256]>,
}

impl<S: Real> ByteTables<S> {
    fn new(r: &[S]) -> Self {
        let chunks = r.len().div_ceil(8);
        let mut tables = vec![[S::zero(); 256]; chunks];
        for (c, table) in tables.iter_mut().enumerate() {
            let base = 8 * c;
            for v in 1usize..256 {
                let low = v.trailing_zeros() as usize;
                let x = r.get(base + low).copied().unwrap_or_else(S::zero);
                table[v] = table[v & (v - 1)] + x;
            }
        }
        Self { tables }
    }

    #[inline]
    fn dot(&self, word: u64) -> S {
        let mut acc = S::zero();
        for (c, t) in self.tables.iter().enumerate() {
            acc += t[((word >> (8 * c)) & 0xff) as usize];
        }
        acc
    }
}

/// Accumulates nonnegative weights per `k`-bit label so that per-bit sums can
/// be formed afterwards from `2^8 + 2^(k-8)` bins instead of `k` adds per term.
#[derive(Debug, Clone)]
pub(crate) struct LabelBins<S> {
    k: usize,
    lo_bits: usize,
    lo: Vec<S>,
    hi: Vec<S>,
}

impl<S: Real> LabelBins<S> {
    pub(crate) fn new(k: usize) -> Self {
        let lo_bits = k.min(8);
        Self { k, lo_bits, lo: vec![S::zero(); 1 << lo_bits], hi: vec![S::zero(); 1 << (k - lo_bits)] }
    }

    #[inline]
    pub(crate) fn add(&mut self, label: u64, w: S) {
        self.lo[(label & ((1 << self.lo_bits) - 1)) as usize] += w;
        self.hi[(label >> self.lo_bits) as usize] += w;
    }

    pub(crate) fn scale(&mut self, f: S) {
        self.lo.iter_mut().chain(self.hi.iter_mut()).for_each(|x| *x *= f);
    }

    pub(crate) fn total(&self) -> S {
        self.lo.iter().copied().sum()
    }

    /// `(ones, zeros)` sums for label bit `p` (LSB = 0).
    pub(crate) fn split(&self, p: usize) -> (S, S) {
        let (bins, bit) = if p < self.lo_bits { (&self.lo, p) } else { (&self.hi, p - self.lo_bits) };
        let mut ones = S::zero();
        let mut zeros = S::zero();
        for (v, &x) in bins.iter().enumerate() {
            if (v >> bit) & 1 == 1 {
                ones += x;
            } else {
                zeros += x;
            }
        }
        (ones, zeros)
    }

    /// Per message bit `b_1..b_k`: `(ones, zeros)`.
    pub(crate) fn per_message_bit(&self) -> Vec<(S, S)> {
        (0..self.k).map(|i| self.split(self.k - 1 - i)).collect()
    }
}

/// A network with binary, codebook-defined weights.
#[derive(Debug, Clone)]
pub struct LayeredNet<S> {
    code_name: String,
    k: usize,
    layer_sizes: Vec<usize>,
    weights: Vec<BinaryMatrix>,
    activations: Vec<Activation<S>>,
    readout: Readout,
}

impl<S: Real> LayeredNet<S> {
    /// Single-label network `n - 2^k`: `W1` columns are the codewords in
    /// canonical order; no hidden layer.
    pub fn build_slnn(stream: CodewordStream<'_>) -> Self {
        let code = stream.code();
        let w1 = BinaryMatrix::from_columns(code.n(), stream.map(|(_, cw)| cw).collect());
        Self {
            code_name: code.name().to_string(),
            k: code.k(),
            layer_sizes: vec![code.n(), 1 << code.k()],
            weights: vec![w1],
            activations: vec![Activation::Identity],
            readout: Readout::Argmax,
        }
    }

    /// Multi-label network `n - 2^k - k`: `W1` as in [`Self::build_slnn`], scaled
    /// softmax on the `2^k` neurons, `W2` rows are the messages paired with
    /// the columns of `W1`, then a one-half threshold.
    pub fn build_mlnn(stream: CodewordStream<'_>, alpha: AlphaMode<S>) -> Self {
        let code = stream.code();
        let k = code.k();
        // lane bit i of row j is message bit b_(i+1) of index j
        let (messages, codewords): (Vec<u64>, Vec<u64>) =
            stream.map(|(j, cw)| (j.reverse_bits() >> (64 - k), cw)).unzip();
        Self {
            code_name: code.name().to_string(),
            k: code.k(),
            layer_sizes: vec![code.n(), 1 << code.k(), code.k()],
            weights: vec![
                BinaryMatrix::from_columns(code.n(), codewords),
                BinaryMatrix::from_rows(code.k(), messages),
            ],
            activations: vec![Activation::ScaledSoftmax(alpha), Activation::Identity],
            readout: Readout::HalfThreshold,
        }
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn weights(&self) -> &[BinaryMatrix] {
        &self.weights
    }

    pub fn activations(&self) -> &[Activation<S>] {
        &self.activations
    }

    pub fn readout(&self) -> Readout {
        self.readout
    }

    pub fn n(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha_mode(&self) -> Option<AlphaMode<S>> {
        self.activations.iter().find_map(|a| match a {
            Activation::ScaledSoftmax(mode) => Some(*mode),
            Activation::Identity => None,
        })
    }

    pub fn edge_count(&self) -> EdgeCount {
        let per_layer: Vec<u64> = self.weights.iter().map(BinaryMatrix::nonzeros).collect();
        let total = per_layer.iter().sum();
        EdgeCount { per_layer, total }
    }

    pub fn describe(&self) -> NetDescription<S> {
        let edges = self.edge_count();
        NetDescription {
            code: self.code_name.clone(),
            layer_sizes: self.layer_sizes.clone(),
            edges_per_layer: edges.per_layer,
            total_edges: edges.total,
            binary_weights: true,
            alpha_mode: self.alpha_mode(),
        }
    }

    fn check_input(&self, r: &[S]) -> Result<()> {
        if r.len() == self.n() {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: self.n(), got: r.len() })
        }
    }

    fn columns(&self) -> &[u64] {
        self.weights[0].lanes()
    }

    /// First-layer pre-activations `r · W1`.
    pub fn first_layer(&self, r: &[S]) -> Result<Vec<S>> {
        self.check_input(r)?;
        let tables = ByteTables::new(r);
        Ok(self.columns().iter().map(|&w| tables.dot(w)).collect())
    }

    fn argmax_streamed(&self, tables: &ByteTables<S>) -> (u64, S) {
        let mut best = (0u64, S::neg_infinity());
        for (j, &w) in self.columns().iter().enumerate() {
            let s = tables.dot(w);
            if s > best.1 {
                best = (j as u64, s);
            }
        }
        best
    }

    /// `scores = r · W1`, argmax with ties to the lowest index.
    pub fn forward_slnn(&self, r: &[S]) -> Result<SlnnOutput<S>> {
        let scores = self.first_layer(r)?;
        let mut argmax_index = 0;
        for (j, &s) in scores.iter().enumerate() {
            if s > scores[argmax_index] {
                argmax_index = j;
            }
        }
        Ok(SlnnOutput { scores, argmax_index: argmax_index as u64 })
    }

    /// Argmax of `r · W1` without keeping the score vector.
    pub fn slnn_decide(&self, r: &[S]) -> Result<(u64, S)> {
        self.check_input(r)?;
        Ok(self.argmax_streamed(&ByteTables::new(r)))
    }

    /// Scaled-softmax hidden activations, materialized (test and inspection use).
    pub fn hidden_activations(&self, r: &[S], sigma: S) -> Result<Vec<S>> {
        let alpha = self.alpha(sigma)?;
        let scores = self.first_layer(r)?;
        let max = scores.iter().copied().fold(S::neg_infinity(), S::max);
        let mut h: Vec<S> = if alpha.is_infinite() {
            scores.iter().map(|&s| if s == max { S::one() } else { S::zero() }).collect()
        } else {
            scores.iter().map(|&s| (alpha * (s - max)).exp()).collect()
        };
        let total: S = h.iter().copied().sum();
        h.iter_mut().for_each(|x| *x /= total);
        Ok(h)
    }

    fn alpha(&self, sigma: S) -> Result<S> {
        self.alpha_mode()
            .ok_or_else(|| Error::InvalidConfig("network has no softmax layer".into()))?
            .resolve(sigma)
    }

    /// Multi-label forward pass. The `2^k` hidden activations are streamed in
    /// two passes (running maximum, then `exp(α (s - max))` accumulated
    /// against the rows of `W2`) and never stored.
    pub fn forward_mlnn(&self, r: &[S], sigma: S) -> Result<MlnnOutput<S>> {
        if self.weights.len() != 2 {
            return Err(Error::InvalidConfig("not a multi-label network".into()));
        }
        self.check_input(r)?;
        let alpha = self.alpha(sigma)?;
        let tables = ByteTables::new(r);
        let (_, max) = self.argmax_streamed(&tables);
        let mut bins = LabelBins::new(self.k);
        let labels = self.weights[1].lanes();
        for (&w, &label) in self.columns().iter().zip(labels) {
            let s = tables.dot(w);
            let h = if alpha.is_infinite() {
                if s == max { S::one() } else { S::zero() }
            } else {
                (alpha * (s - max)).exp()
            };
            bins.add(label, h);
        }
        let total = bins.total();
        let mut posteriors = Vec::with_capacity(self.k);
        let mut complements = Vec::with_capacity(self.k);
        let mut index = 0u64;
        for i in 0..self.k {
            let (ones, zeros) = bins.split(i);
            let p = ones / total;
            if p > S::lit(0.5) {
                index |= 1 << (self.k - 1 - i);
            }
            posteriors.push(p);
            complements.push(zeros / total);
        }
        Ok(MlnnOutput { posteriors, complements, index })
    }
}

/// Single-label network for a code.
pub fn build_slnn<S: Real>(code: &GeneratorMatrix) -> LayeredNet<S> {
    LayeredNet::build_slnn(code.stream())
}

/// Multi-label network for a code.
pub fn build_mlnn<S: Real>(code: &GeneratorMatrix, alpha: AlphaMode<S>) -> LayeredNet<S> {
    LayeredNet::build_mlnn(code.stream(), alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::bpsk_word;
    use crate::gf2::{hamming_7_4, polar_16_8};

    #[test]
    fn hamming_slnn_shape_and_edges() {
        let net: LayeredNet<f64> = build_slnn(&hamming_7_4());
        assert_eq!(net.layer_sizes(), &[7, 16]);
        assert_eq!(net.edge_count().total, 56);
        // all-zero codeword neuron is unconnected
        let w1 = &net.weights()[0];
        assert!((0..7).all(|i| !w1.get(i, 0)));
    }

    #[test]
    fn hamming_mlnn_edges() {
        let net: LayeredNet<f64> = build_mlnn(&hamming_7_4(), AlphaMode::Matched);
        assert_eq!(net.layer_sizes(), &[7, 16, 4]);
        assert_eq!(net.edge_count().per_layer, vec![56, 32]);
        assert_eq!(net.edge_count().total, 88);
        // W2 row j is message j, MSB-first
        let w2 = &net.weights()[1];
        assert!(w2.get(8, 0) && !w2.get(8, 3));
    }

    #[test]
    fn polar_edges() {
        let code = polar_16_8(0.0);
        assert_eq!(build_slnn::<f32>(&code).edge_count().total, 2048);
        assert_eq!(build_mlnn::<f32>(&code, AlphaMode::Matched).edge_count().total, 3072);
    }

    #[test]
    fn noise_free_inputs_select_their_column() {
        let code = hamming_7_4();
        let net: LayeredNet<f64> = build_slnn(&code);
        for (j, cw) in code.stream() {
            let r: Vec<f64> = bpsk_word::<f64>(cw, 7).into_iter().map(|x| 10.0 * x).collect();
            assert_eq!(net.forward_slnn(&r).unwrap().argmax_index, j);
        }
    }

    #[test]
    fn zero_input_ties_to_first_neuron() {
        let net: LayeredNet<f64> = build_slnn(&hamming_7_4());
        let out = net.forward_slnn(&[0.0; 7]).unwrap();
        assert!(out.scores.iter().all(|&s| s == 0.0));
        assert_eq!(out.argmax_index, 0);
        assert_eq!(net.slnn_decide(&[0.0; 7]).unwrap().0, 0);
    }

    #[test]
    fn wrong_input_length() {
        let net: LayeredNet<f64> = build_slnn(&hamming_7_4());
        assert!(matches!(net.forward_slnn(&[0.0; 6]), Err(Error::LengthMismatch { .. })));
        assert!(net.forward_mlnn(&[0.0; 7], 1.0).is_err());
    }

    #[test]
    fn hidden_layer_is_a_distribution() {
        let net: LayeredNet<f64> = build_mlnn(&hamming_7_4(), AlphaMode::Matched);
        let r = [0.3, -1.2, 0.8, 0.1, -0.4, 2.0, -0.9];
        let h = net.hidden_activations(&r, 0.7).unwrap();
        assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_free_mlnn_recovers_messages() {
        let code = hamming_7_4();
        let net: LayeredNet<f64> = build_mlnn(&code, AlphaMode::Matched);
        for (j, cw) in code.stream() {
            let r = bpsk_word::<f64>(cw, 7);
            assert_eq!(net.forward_mlnn(&r, 0.1).unwrap().index, j);
            // σ = 0: limit of a one-hot hidden layer
            assert_eq!(net.forward_mlnn(&r, 0.0).unwrap().index, j);
        }
    }

    #[test]
    fn label_bins_split() {
        let mut bins = LabelBins::<f64>::new(10);
        for label in 0..1024u64 {
            bins.add(label, label as f64);
        }
        let per_bit = bins.per_message_bit();
        for (i, &(ones, zeros)) in per_bit.iter().enumerate() {
            let p = 9 - i;
            let want: f64 = (0..1024u64).filter(|l| (l >> p) & 1 == 1).map(|l| l as f64).sum();
            assert_eq!(ones, want);
            assert_eq!(ones + zeros, bins.total());
        }
    }

    #[test]
    fn alpha_modes() {
        let m: AlphaMode<f64> = AlphaMode::Matched;
        assert_eq!(m.resolve(0.5).unwrap(), 8.0);
        assert!(m.resolve(-1.0).is_err());
        let f = AlphaMode::<f64>::fixed_at(0.0, 0.5).unwrap();
        assert!(matches!(f, AlphaMode::Fixed { alpha } if (alpha - 2.0).abs() < 1e-12));
        assert_eq!(f.resolve(123.0).unwrap(), f.resolve(0.1).unwrap());
    }
}
