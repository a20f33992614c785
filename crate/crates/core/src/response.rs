//! Response-function enumeration and the 0/1 matrices built from it.
//!
//! The latent variable acts as a selector of a pair of response functions
//! (g: Z→X, h: X→Y). Distributions compatible with the model are exactly
//! the images A·q of stochastic vectors q over the n^l·m^n pairs, where A
//! is the column-stochastic 0/1 matrix with one column per pair. The
//! distinct columns of A are the extreme points of the compatible set.

use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::HashMap;

use crate::caps::Caps;
use crate::dims::Dims;
use crate::dist::CondDist;
use crate::error::{Error, Result};
use crate::rational::{format_rat, Rat};

/// A pair of total response functions, 1-based values.
/// `g[k-1]` is g(z_k) ∈ 1..=n and `h[i-1]` is h(x_i) ∈ 1..=m.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResponsePair {
    pub g: Vec<usize>,
    pub h: Vec<usize>,
}

impl ResponsePair {
    pub fn label(&self) -> String {
        let g: Vec<String> = self.g.iter().map(|v| v.to_string()).collect();
        let h: Vec<String> = self.h.iter().map(|v| v.to_string()).collect();
        format!("g=({}),h=({})", g.join(","), h.join(","))
    }
}

/// A 0/1 matrix stored sparsely: per column, the sorted list of row
/// positions holding a 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMatrix {
    pub rows: usize,
    pub col_support: Vec<Vec<u32>>,
}

impl BinaryMatrix {
    pub fn cols(&self) -> usize {
        self.col_support.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> bool {
        self.col_support[col].binary_search(&(row as u32)).is_ok()
    }

    /// Transposed view: per row, the sorted column positions holding a 1.
    pub fn row_support(&self) -> Vec<Vec<u32>> {
        let mut rows = vec![Vec::new(); self.rows];
        for (c, support) in self.col_support.iter().enumerate() {
            for &r in support {
                rows[r as usize].push(c as u32);
            }
        }
        rows
    }

    /// Plain-text 0/1 grid with row and column labels, for debugging.
    pub fn grid_string(&self, row_labels: &[String], col_labels: &[String]) -> String {
        let width = row_labels.iter().map(|s| s.len()).max().unwrap_or(0);
        let mut out = String::new();
        out.push_str(&" ".repeat(width + 1));
        out.push_str(&col_labels.join(" "));
        out.push('\n');
        for (r, label) in row_labels.iter().enumerate() {
            out.push_str(&format!("{label:>width$} "));
            let cells: Vec<String> = (0..self.cols())
                .map(|c| {
                    let bit = if self.entry(r, c) { "1" } else { "0" };
                    format!("{bit:^w$}", w = col_labels[c].len())
                })
                .collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

/// One instrumental-inequality row: fixes x_i and, for each y_j, the z
/// value whose conditional enters the sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PearlRow {
    pub x: usize,
    /// `z_choice[j-1]` is the z-index paired with y_j.
    pub z_choice: Vec<usize>,
}

impl PearlRow {
    pub fn label(&self) -> String {
        let terms: Vec<String> = self
            .z_choice
            .iter()
            .enumerate()
            .map(|(j0, k)| format!("P(x{},y{}|z{})", self.x, j0 + 1, k))
            .collect();
        terms.join(" + ")
    }
}

/// The inequality-row matrix: one row per (x value, Y→Z assignment),
/// n·l^m rows by m·n·l columns, each row holding exactly m ones.
#[derive(Clone, Debug)]
pub struct PearlMatrix {
    pub dims: Dims,
    pub matrix: BinaryMatrix,
    pub rows: Vec<PearlRow>,
}

/// The response-pair matrix: m·n·l rows by n^l·m^n columns, one column per
/// pair in lexicographic (g major, h minor) order, each column holding
/// exactly l ones and summing to 1 within every z-block.
#[derive(Clone, Debug)]
pub struct ResponseMatrix {
    pub dims: Dims,
    pub matrix: BinaryMatrix,
    pub pairs: Vec<ResponsePair>,
}

/// Odometer over `width` digits, each in 1..=radix, most significant digit
/// first, least significant fastest. Yields tuples in lexicographic order.
fn enumerate_maps(width: usize, radix: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (radix as u128).pow(width as u32);
    (0..total).map(move |rank| {
        let mut digits = vec![1; width];
        let mut rest = rank;
        for d in (0..width).rev() {
            digits[d] = (rest % radix as u128) as usize + 1;
            rest /= radix as u128;
        }
        digits
    })
}

/// All response pairs in column order.
pub fn enumerate_pairs(dims: Dims, caps: &Caps) -> Result<Vec<ResponsePair>> {
    let count = Caps::admit("response pairs", &dims.pair_count(), caps.pairs)?;
    let mut pairs = Vec::with_capacity(count);
    for g in enumerate_maps(dims.l, dims.n) {
        for h in enumerate_maps(dims.n, dims.m) {
            pairs.push(ResponsePair { g: g.clone(), h });
        }
    }
    debug_assert_eq!(pairs.len(), count);
    Ok(pairs)
}

fn column_support(dims: Dims, pair: &ResponsePair) -> Vec<u32> {
    let mut support: Vec<u32> = (1..=dims.l)
        .map(|k| {
            let x = pair.g[k - 1];
            let y = pair.h[x - 1];
            dims.index(x, y, k).expect("pair values in range") as u32
        })
        .collect();
    support.sort_unstable();
    support
}

/// Build the response-pair matrix.
pub fn response_matrix(dims: Dims, caps: &Caps) -> Result<ResponseMatrix> {
    let pairs = enumerate_pairs(dims, caps)?;
    let col_support = pairs.iter().map(|p| column_support(dims, p)).collect();
    Ok(ResponseMatrix {
        dims,
        matrix: BinaryMatrix {
            rows: dims.dim_f(),
            col_support,
        },
        pairs,
    })
}

/// Build the inequality-row matrix.
pub fn pearl_matrix(dims: Dims, caps: &Caps) -> Result<PearlMatrix> {
    let row_count = Caps::admit("inequality rows", &dims.pearl_row_count(), caps.rows)?;
    let mut rows = Vec::with_capacity(row_count);
    let mut row_supports = Vec::with_capacity(row_count);
    for i in 1..=dims.n {
        for z_choice in enumerate_maps(dims.m, dims.l) {
            let mut support: Vec<u32> = z_choice
                .iter()
                .enumerate()
                .map(|(j0, &k)| dims.index(i, j0 + 1, k).expect("in range") as u32)
                .collect();
            support.sort_unstable();
            row_supports.push(support);
            rows.push(PearlRow { x: i, z_choice });
        }
    }
    // Stored column-sparse like every other matrix; transpose the rows.
    let mut col_support = vec![Vec::new(); dims.dim_f()];
    for (r, support) in row_supports.iter().enumerate() {
        for &c in support {
            col_support[c as usize].push(r as u32);
        }
    }
    Ok(PearlMatrix {
        dims,
        matrix: BinaryMatrix {
            rows: row_count,
            col_support,
        },
        rows,
    })
}

fn sorted_intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut ia, mut ib, mut count) = (0, 0, 0);
    while ia < a.len() && ib < b.len() {
        match a[ia].cmp(&b[ib]) {
            std::cmp::Ordering::Less => ia += 1,
            std::cmp::Ordering::Greater => ib += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                ia += 1;
                ib += 1;
            }
        }
    }
    count
}

/// Product of the inequality-row matrix and the response-pair matrix.
///
/// No inequality row can hit the same response pair twice (the terms of a
/// row share no response pair), so the product must itself be 0/1-valued;
/// any larger entry is reported as an internal error.
pub fn composed_matrix(pearl: &PearlMatrix, response: &ResponseMatrix) -> Result<BinaryMatrix> {
    if pearl.dims != response.dims {
        return Err(Error::Shape(format!(
            "matrix dims differ: {} vs {}",
            pearl.dims, response.dims
        )));
    }
    let pearl_rows = pearl.matrix.row_support();
    let mut col_support = Vec::with_capacity(response.matrix.cols());
    for (c, col) in response.matrix.col_support.iter().enumerate() {
        let mut support = Vec::new();
        for (r, row) in pearl_rows.iter().enumerate() {
            // `row` holds flat coordinates; `col` likewise.
            match sorted_intersection_size(row, col) {
                0 => {}
                1 => support.push(r as u32),
                k => {
                    return Err(Error::Internal(format!(
                        "composed matrix entry ({r},{c}) = {k}, expected 0 or 1"
                    )))
                }
            }
        }
        col_support.push(support);
    }
    Ok(BinaryMatrix {
        rows: pearl.matrix.rows,
        col_support,
    })
}

/// One distinct column of the response matrix: a vertex of the compatible
/// polytope, tagged with the first response pair that produces it.
#[derive(Clone, Debug)]
pub struct BVertex {
    pub support: Vec<u32>,
    pub pair_index: usize,
}

impl BVertex {
    pub fn to_dist(&self, dims: Dims) -> CondDist {
        let mut values = vec![Rat::zero(); dims.dim_f()];
        for &r in &self.support {
            values[r as usize] = num_traits::One::one();
        }
        CondDist::new(dims, values).expect("support indices are in range")
    }

    pub fn to_vec(&self, dims: Dims) -> Vec<Rat> {
        self.to_dist(dims).values().to_vec()
    }
}

/// Key of the closed-form column-equality rule: two pairs share a column
/// iff they have the same g and their h agree on the image of g.
fn canonical_key(dims: Dims, pair: &ResponsePair) -> (Vec<usize>, Vec<usize>) {
    let mut masked_h = vec![0; dims.n];
    for &x in &pair.g {
        masked_h[x - 1] = pair.h[x - 1];
    }
    (pair.g.clone(), masked_h)
}

/// Distinct columns of the response matrix, in first-occurrence order.
///
/// Deduplication is by raw column equality; the closed-form rule is
/// evaluated alongside and must induce the same partition.
pub fn dedup_columns(response: &ResponseMatrix) -> Result<Vec<BVertex>> {
    let dims = response.dims;
    let mut by_support: HashMap<&[u32], usize> = HashMap::new();
    let mut by_key: HashMap<(Vec<usize>, Vec<usize>), usize> = HashMap::new();
    let mut vertices = Vec::new();
    for (c, support) in response.matrix.col_support.iter().enumerate() {
        let key = canonical_key(dims, &response.pairs[c]);
        let raw = by_support.get(support.as_slice()).copied();
        let ruled = by_key.get(&key).copied();
        match (raw, ruled) {
            (None, None) => {
                by_support.insert(support.as_slice(), vertices.len());
                by_key.insert(key, vertices.len());
                vertices.push(BVertex {
                    support: support.clone(),
                    pair_index: c,
                });
            }
            (Some(a), Some(b)) if a == b => {}
            (raw, ruled) => {
                return Err(Error::Internal(format!(
                    "column {c}: raw equality gives class {raw:?}, \
                     closed-form rule gives {ruled:?}"
                )))
            }
        }
    }
    Ok(vertices)
}

/// A distribution over response pairs: the latent weight vector q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResponseDist {
    dims: Dims,
    q: Vec<Rat>,
}

impl ResponseDist {
    /// Construct and check: entries nonnegative, total exactly 1, length
    /// equal to the pair count.
    pub fn new(dims: Dims, q: Vec<Rat>) -> Result<ResponseDist> {
        let expected = dims.pair_count();
        if BigUint::from(q.len()) != expected {
            return Err(Error::Shape(format!(
                "response distribution has length {}, dims {dims} require {expected}",
                q.len()
            )));
        }
        let mut sum = Rat::zero();
        for (idx, w) in q.iter().enumerate() {
            if w < &Rat::zero() {
                return Err(Error::Range(format!(
                    "response weight {idx} is negative: {}",
                    format_rat(w)
                )));
            }
            sum += w;
        }
        if !sum.is_integer() || sum != num_traits::One::one() {
            return Err(Error::Range(format!(
                "response weights sum to {}, expected exactly 1",
                format_rat(&sum)
            )));
        }
        Ok(ResponseDist { dims, q })
    }

    /// Point mass on a single response pair.
    pub fn point_mass(dims: Dims, pair_index: usize, caps: &Caps) -> Result<ResponseDist> {
        let count = Caps::admit("response pairs", &dims.pair_count(), caps.pairs)?;
        if pair_index >= count {
            return Err(Error::Range(format!(
                "pair index {pair_index} outside 0..{count}"
            )));
        }
        let mut q = vec![Rat::zero(); count];
        q[pair_index] = num_traits::One::one();
        Ok(ResponseDist { dims, q })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn weights(&self) -> &[Rat] {
        &self.q
    }
}

/// The model-sampling oracle: push a response distribution through the
/// response matrix and return the resulting conditional distribution.
/// Every output is compatible with the model by construction.
pub fn sample_compatible(response: &ResponseMatrix, q: &ResponseDist) -> Result<CondDist> {
    if q.dims() != response.dims {
        return Err(Error::Shape(format!(
            "response distribution over {} fed to matrix over {}",
            q.dims(),
            response.dims
        )));
    }
    let mut values = vec![Rat::zero(); response.dims.dim_f()];
    for (c, w) in q.weights().iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        for &r in &response.matrix.col_support[c] {
            values[r as usize] += w;
        }
    }
    let dist = CondDist::new(response.dims, values)?;
    debug_assert!(dist.validate().is_ok());
    Ok(dist)
}

/// Canonical coordinate labels in flat order, for grid rendering.
pub fn coordinate_labels(dims: Dims) -> Vec<String> {
    (0..dims.dim_f()).map(|off| dims.coord_label(off)).collect()
}

/// Vertex list as a JSON array of rational-string vectors.
pub fn vertices_to_json(dims: Dims, vertices: &[BVertex]) -> String {
    let rows: Vec<Vec<String>> = vertices
        .iter()
        .map(|v| v.to_vec(dims).iter().map(format_rat).collect())
        .collect();
    serde_json::to_string(&rows).expect("serializing strings cannot fail")
}
