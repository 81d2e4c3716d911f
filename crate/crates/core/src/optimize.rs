//! One-dimensional search helpers.

use crate::math;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of a one-dimensional maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum<T> {
    pub x: f64,
    pub value: f64,
    pub payload: T,
}

/// Golden-section maximization of `f` on `[lo, hi]` until the bracket is
/// narrower than `tol`. `f` returns the objective and a payload that is
/// carried along with the best point. The endpoints are evaluated too, so a
/// maximum sitting on the boundary is found.
pub fn golden_section_max<T>(mut f: impl FnMut(f64) -> (f64, T), lo: f64, hi: f64, tol: f64) -> Maximum<T> {
    let mut best = {
        let (value, payload) = f(lo);
        Maximum { x: lo, value, payload }
    };
    let consider = |x: f64, v: f64, p: T, best: &mut Maximum<T>| {
        if v > best.value {
            *best = Maximum { x, value: v, payload: p };
        }
    };
    if hi <= lo {
        return best;
    }
    let (v, p) = f(hi);
    consider(hi, v, p, &mut best);

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, pc) = f(c);
    let (mut fd, pd) = f(d);
    consider(c, fc, pc, &mut best);
    consider(d, fd, pd, &mut best);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            let (v, p) = f(c);
            fc = v;
            consider(c, v, p, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            let (v, p) = f(d);
            fd = v;
            consider(d, v, p, &mut best);
        }
    }
    best
}

/// Bisection on a monotone predicate over `[lo, hi]`, where `holds(hi)` is
/// true and `holds(lo)` false. Returns the midpoint of the final bracket
/// once it is narrower than `tol` or after `max_iter` halvings.
pub fn bisect_predicate(mut holds: impl FnMut(f64) -> bool, lo: f64, hi: f64, tol: f64, max_iter: usize) -> f64 {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..max_iter {
        if math::abs(b - a) < tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if holds(mid) {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}
