//! Closed-form extreme-point counts and the compatibility ratio.
//!
//! The number of distinct response-matrix columns has a closed form driven
//! by finite differences of x^l at 0 (which count surjections Z→X onto a
//! fixed image). Everything here is arbitrary-precision integer
//! arithmetic; the counts overflow 64 bits quickly.

use num_traits::{One, Signed, Zero};

use crate::caps::Caps;
use crate::dims::Dims;
use crate::error::{Error, Result};
use crate::rational::{Int, Rat};

pub fn binomial(n: u64, k: u64) -> Int {
    if k > n {
        return Int::zero();
    }
    let mut acc = Int::one();
    for t in 0..k.min(n - k) {
        acc = acc * Int::from(n - t) / Int::from(t + 1);
    }
    acc
}

fn int_pow(base: u64, exp: u32) -> Int {
    Int::from(base).pow(exp)
}

/// (Δᵏ xˡ)(0): the k-th finite difference of x^l evaluated at 0.
///
/// Computed two ways — the alternating binomial sum and the recursive
/// difference table — which must agree. Equals l! when k = l and 0 when
/// k > l, and counts surjections from an l-set onto a k-set.
pub fn finite_difference(k: u32, l: u32) -> Int {
    // Alternating sum: Σ_j C(k,j) (−1)^{k−j} j^l, with 0^0 = 1.
    let mut sum = Int::zero();
    for j in 0..=k {
        let term = binomial(k as u64, j as u64)
            * if j == 0 && l == 0 {
                Int::one()
            } else {
                int_pow(j as u64, l)
            };
        if (k - j) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    // Difference table: row 0 is x^l at x = 0..k, each row differences the
    // previous; the head of row k is the value.
    let mut row: Vec<Int> = (0..=k)
        .map(|x| {
            if x == 0 && l == 0 {
                Int::one()
            } else {
                int_pow(x as u64, l)
            }
        })
        .collect();
    for _ in 0..k {
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    let table = row.into_iter().next().expect("table row never empty");
    assert_eq!(sum, table, "finite-difference routes disagree for k={k}, l={l}");
    sum
}

/// Number of maps g: Z→X whose image has exactly k elements,
/// C(n,k)·(Δᵏ xˡ)(0).
pub fn count_g_k(n: usize, l: usize, k: usize) -> Result<Int> {
    if k < 1 || k > n {
        return Err(Error::Range(format!("image size {k} outside 1..={n}")));
    }
    Ok(binomial(n as u64, k as u64) * finite_difference(k as u32, l as u32))
}

/// Number of extreme points of the compatible set: distinct columns of the
/// response matrix, Σ_k C(n,k)·m^k·(Δᵏ xˡ)(0).
///
/// The alternating double-sum form and the finite-difference form are both
/// evaluated and must agree, as must the image-size decomposition.
pub fn count_extreme_b(dims: Dims) -> Int {
    let (l, m, n) = (dims.l as u32, dims.m as u64, dims.n as u64);
    let mut delta_form = Int::zero();
    let mut by_image_size = Int::zero();
    for k in 1..=n {
        delta_form += binomial(n, k) * int_pow(m, k as u32) * finite_difference(k as u32, l);
        by_image_size += int_pow(m, k as u32)
            * count_g_k(dims.n, dims.l, k as usize).expect("k in range");
    }
    let mut alternating = Int::zero();
    for k in 1..=n {
        let mut inner = Int::zero();
        for j in 0..=k {
            let term = binomial(k, j)
                * if j == 0 && l == 0 {
                    Int::one()
                } else {
                    int_pow(j, l)
                };
            if j % 2 == 0 {
                inner += term;
            } else {
                inner -= term;
            }
        }
        let outer = binomial(n, k) * int_pow(m, k as u32) * inner;
        if k % 2 == 0 {
            alternating += outer;
        } else {
            alternating -= outer;
        }
    }
    assert_eq!(delta_form, alternating, "count routes disagree for {dims}");
    assert_eq!(delta_form, by_image_size, "count routes disagree for {dims}");
    delta_form
}

/// Number of extreme points of the ambient set of all conditional
/// distributions: a product of l simplices over n·m points, so (n·m)^l.
pub fn count_extreme_f(dims: Dims) -> Int {
    int_pow((dims.n * dims.m) as u64, dims.l as u32)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremeCounts {
    pub ext_b: Int,
    pub ext_f: Int,
    pub ratio: Rat,
}

/// Both counts and their exact ratio R = ext_B / ext_F ∈ (0, 1].
pub fn extreme_counts(dims: Dims) -> ExtremeCounts {
    let ext_b = count_extreme_b(dims);
    let ext_f = count_extreme_f(dims);
    let ratio = Rat::new(ext_b.clone(), ext_f.clone());
    assert!(ext_b.is_positive() && ext_b <= ext_f);
    ExtremeCounts { ext_b, ext_f, ratio }
}

pub fn ratio(dims: Dims) -> Rat {
    extreme_counts(dims).ratio
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrendAxis {
    N,
    L,
    M,
}

impl std::fmt::Display for TrendAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrendAxis::N => write!(f, "n"),
            TrendAxis::L => write!(f, "l"),
            TrendAxis::M => write!(f, "m"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trend {
    StrictlyIncreasing,
    StrictlyDecreasing,
    Constant,
    Mixed,
}

impl std::fmt::Display for Trend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Trend::StrictlyIncreasing => write!(f, "strictly increasing"),
            Trend::StrictlyDecreasing => write!(f, "strictly decreasing"),
            Trend::Constant => write!(f, "constant"),
            Trend::Mixed => write!(f, "mixed"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrendPoint {
    pub value: usize,
    pub counts: ExtremeCounts,
}

#[derive(Clone, Debug)]
pub struct TrendReport {
    pub axis: TrendAxis,
    /// Dims template; the axis component is replaced per point.
    pub base: Dims,
    pub points: Vec<TrendPoint>,
    pub observed: Trend,
    /// Direction the limit behaviour predicts, when it predicts one:
    /// growing n drives R up toward 1, growing l drives it down toward 0,
    /// and growing m drives it down exactly when n < l.
    pub expected: Option<Trend>,
    pub consistent: Option<bool>,
}

fn observe(values: &[Rat]) -> Trend {
    let increasing = values.windows(2).all(|w| w[0] < w[1]);
    let decreasing = values.windows(2).all(|w| w[0] > w[1]);
    let constant = values.windows(2).all(|w| w[0] == w[1]);
    if constant {
        Trend::Constant
    } else if increasing {
        Trend::StrictlyIncreasing
    } else if decreasing {
        Trend::StrictlyDecreasing
    } else {
        Trend::Mixed
    }
}

/// Exact R values along one axis with the other two domain sizes fixed,
/// plus the observed monotone trend.
pub fn trend_report(
    axis: TrendAxis,
    base: Dims,
    range: &[usize],
    caps: &Caps,
) -> Result<TrendReport> {
    if range.is_empty() || !range.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Range(
            "trend range must be nonempty and strictly increasing".into(),
        ));
    }
    let mut points = Vec::with_capacity(range.len());
    for &v in range {
        let dims = match axis {
            TrendAxis::N => Dims::new(base.l, base.m, v)?,
            TrendAxis::L => Dims::new(v, base.m, base.n)?,
            TrendAxis::M => Dims::new(base.l, v, base.n)?,
        };
        // Closed-form counts, so the guard is on digit size, not on any
        // enumeration: the largest count has about l·log2(n·m) bits.
        let digit_cost = (dims.l as u64).saturating_mul((dims.n * dims.m) as u64);
        if digit_cost > caps.pairs {
            return Err(Error::Capacity {
                what: "trend point",
                needed: digit_cost.to_string(),
                cap: caps.pairs,
            });
        }
        points.push(TrendPoint {
            value: v,
            counts: extreme_counts(dims),
        });
    }
    let ratios: Vec<Rat> = points.iter().map(|p| p.counts.ratio.clone()).collect();
    let observed = observe(&ratios);
    let expected = match axis {
        TrendAxis::N => Some(Trend::StrictlyIncreasing),
        TrendAxis::L => Some(Trend::StrictlyDecreasing),
        TrendAxis::M => {
            if base.n < base.l {
                Some(Trend::StrictlyDecreasing)
            } else {
                None
            }
        }
    };
    let consistent = expected.map(|e| e == observed);
    Ok(TrendReport {
        axis,
        base,
        points,
        observed,
        expected,
        consistent,
    })
}

impl TrendReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis,value,ext_b,ext_f,r\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.axis,
                p.value,
                p.counts.ext_b,
                p.counts.ext_f,
                crate::rational::format_rat(&p.counts.ratio)
            ));
        }
        out
    }
}
