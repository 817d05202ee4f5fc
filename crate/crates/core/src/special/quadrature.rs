//! Quadrature rules: Gauss–Chebyshev (first kind) and adaptive Gauss–Kronrod.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Gauss–Chebyshev nodes on (-1, 1) with the `sqrt(1 - x^2)` factor folded
/// into the weights, so that `sum(w_i f(x_i))` approximates `∫_{-1}^{1} f`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Folded weights `(π/n) sqrt(1 - x_i^2)`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// The plain Chebyshev weight `π/n`, exact for `∫ p(x)/sqrt(1-x^2)` with
    /// polynomial `p` of degree below `2n`.
    pub fn chebyshev_weight(&self) -> f64 {
        PI / self.order() as f64
    }

    /// `∫_{-1}^{1} f(x) dx` using the folded weights, with compensated
    /// summation.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = NeumaierSum::default();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(x));
        }
        acc.value()
    }
}

/// Gauss–Chebyshev rule of the given order: `x_i = cos((2i-1)π/(2n))`.
pub fn gcq_rule(order: usize) -> Result<QuadratureRule> {
    if order < 1 {
        return Err(Error::domain("quadrature order must be at least 1"));
    }
    let n = order as f64;
    let (nodes, weights) = (1..=order)
        .map(|i| {
            let theta = (2 * i - 1) as f64 * PI / (2.0 * n);
            (theta.cos(), PI / n * theta.sin())
        })
        .unzip();
    Ok(QuadratureRule { nodes, weights })
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * KRONROD_WEIGHTS[7];
    let mut gauss = fc * GAUSS_WEIGHTS[3];
    for j in 0..7 {
        let dx = half * KRONROD_NODES[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += KRONROD_WEIGHTS[j] * pair;
        if j % 2 == 1 {
            gauss += GAUSS_WEIGHTS[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// A subinterval awaiting refinement, ordered by its error estimate.
struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err).is_eq()
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// Stops when the summed error estimate is below
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    const MAX_INTERVALS: usize = 20_000;
    if a == b {
        return Ok(0.0);
    }
    let (value, err) = gk15(&mut f, a, b);
    let mut heap = std::collections::BinaryHeap::new();
    heap.push(Piece { lo: a, hi: b, value, err });
    let mut total = value;
    let mut total_err = err;
    loop {
        if !total.is_finite() {
            return Err(Error::numerical("adaptive quadrature produced a non-finite value"));
        }
        if total_err <= abs_tol.max(rel_tol * total.abs()) || heap.len() >= MAX_INTERVALS {
            // Re-sum to shed the drift of the running updates.
            let mut sum = NeumaierSum::default();
            let mut err = 0.0;
            for p in heap.iter() {
                sum.add(p.value);
                err += p.err;
            }
            let total = sum.value();
            if err <= abs_tol.max(rel_tol * total.abs()) {
                return Ok(total);
            }
            if heap.len() >= MAX_INTERVALS {
                return Err(Error::numerical(format!(
                    "adaptive quadrature did not reach tolerance (estimate {total}, error {err})"
                )));
            }
            total_err = err;
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        let (v1, e1) = gk15(&mut f, worst.lo, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.hi);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Piece { lo: worst.lo, hi: mid, value: v1, err: e1 });
        heap.push(Piece { lo: mid, hi: worst.hi, value: v2, err: e2 });
    }
}
