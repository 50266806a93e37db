//! Vector-valued composite quadrature with interval doubling.
//!
//! Trapezoid sums are refined by halving the step (reusing every previous
//! sample) and accelerated with one Richardson step, i.e. composite Simpson.
//! Refinement stops once successive Simpson estimates agree to `abs_tol` in
//! every component.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub initial_intervals: usize,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-8, initial_intervals: 512, max_intervals: 1 << 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<const K: usize> {
    pub values: [f64; K],
    /// Largest component change between the last two refinements.
    pub error_bound: f64,
    pub intervals: usize,
}

/// Integrates `f` over `[a, b]`. `f` may fail at a point; the first failure aborts.
pub fn integrate<const K: usize, F>(mut f: F, a: f64, b: f64, opts: QuadratureOptions) -> Result<Integral<K>>
where
    F: FnMut(f64) -> Result<[f64; K]>,
{
    if !(a.is_finite() && b.is_finite() && b > a) || opts.initial_intervals == 0 {
        return Err(Error::InvalidParameter(format!("bad quadrature interval [{a}, {b}]")));
    }
    let mut n = opts.initial_intervals;
    let mut h = (b - a) / n as f64;

    let mut sum = [0.0; K];
    let fa = f(a)?;
    let fb = f(b)?;
    for k in 0..K {
        sum[k] = 0.5 * (fa[k] + fb[k]);
    }
    for i in 1..n {
        add(&mut sum, &f(a + i as f64 * h)?);
    }
    let mut trap = scaled(&sum, h);
    let mut simpson: Option<[f64; K]> = None;

    loop {
        if 2 * n > opts.max_intervals {
            let (component, error_bound) = simpson.map(|s| worst(&s, &trap)).unwrap_or((0, f64::INFINITY));
            return Err(Error::Quadrature { component, estimate: simpson.unwrap_or(trap)[component], error_bound });
        }
        // midpoints of the current intervals
        for i in 0..n {
            add(&mut sum, &f(a + (i as f64 + 0.5) * h)?);
        }
        n *= 2;
        h *= 0.5;
        let refined = scaled(&sum, h);
        let mut next = [0.0; K];
        for k in 0..K {
            next[k] = (4.0 * refined[k] - trap[k]) / 3.0;
        }
        if let Some(prev) = simpson {
            let (_, err) = worst(&next, &prev);
            if err <= opts.abs_tol {
                return Ok(Integral { values: next, error_bound: err, intervals: n });
            }
        }
        simpson = Some(next);
        trap = refined;
    }
}

fn add<const K: usize>(acc: &mut [f64; K], v: &[f64; K]) {
    for k in 0..K {
        acc[k] += v[k];
    }
}

fn scaled<const K: usize>(v: &[f64; K], s: f64) -> [f64; K] {
    let mut out = *v;
    out.iter_mut().for_each(|x| *x *= s);
    out
}

fn worst<const K: usize>(a: &[f64; K], b: &[f64; K]) -> (usize, f64) {
    (0..K)
        .map(|k| (k, (a[k] - b[k]).abs()))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 || cur.1.is_nan() { cur } else { best })
}
