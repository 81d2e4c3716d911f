//! Binned measurement model and correlation functions.
//!
//! Photon counting reports `+1` when `n ≤ n0`; homodyne detection reports
//! `+1` when `|x| > x0`. With the quadrature `x = (a + a†)/2` the number-state
//! wavefunctions are `⟨x|n⟩ = (2/π)^{1/4} e^{−x²} h_n(√2 x)` where
//! `h_n = H_n / √(2ⁿ n!)`, and the inner bin `|x| ≤ x0` has matrix elements
//!
//! ```text
//! Q_nm(x0) = √(2/π) ∫_{−x0}^{x0} e^{−2x²} h_n(√2x) h_m(√2x) dx .
//! ```
//!
//! The `±1` observables are therefore `I − 2Q` for homodyne detection and
//! `diag(±1)` for photon counting.

use alloc::vec;
use alloc::vec::Vec;

use crate::channels::{FactorizedDensity, TwoModeDensity};
use crate::linalg::Matrix;
use crate::quadrature::{self, GaussLegendre};
use crate::{math, Error, Result};

/// Widest panel used when integrating over `[0, x0]`.
const PANEL_WIDTH: f64 = 0.5;

/// Measurement thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub n0: usize,
    pub x0: f64,
}

impl Thresholds {
    pub fn new(n0: usize, x0: f64) -> Result<Self> {
        if !(x0 >= 0.0) || !x0.is_finite() {
            return Err(Error::Domain("x0 must be finite and non-negative"));
        }
        Ok(Self { n0, x0 })
    }
}

/// Normalized Hermite functions `h_0(y) … h_nmax(y)` via
/// `h_{n+1} = √(2/(n+1)) y h_n − √(n/(n+1)) h_{n−1}`.
pub fn normalized_hermite(nmax: usize, y: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if nmax == 0 {
        return;
    }
    out[1] = core::f64::consts::SQRT_2 * y;
    for n in 1..nmax {
        let nf = n as f64;
        out[n + 1] = math::sqrt(2.0 / (nf + 1.0)) * y * out[n] - math::sqrt(nf / (nf + 1.0)) * out[n - 1];
    }
}

/// Matrix of inner-bin overlaps `Q_nm(x0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    pub q: Matrix,
    pub x0: f64,
}

impl QTable {
    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    /// Homodyne `±1` observable `I − 2Q`.
    pub fn x_observable(&self) -> Matrix {
        let d = self.dim();
        Matrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { 0.0 } - 2.0 * self.q[(i, j)])
    }
}

/// Photon-counting `±1` observable: `+1` on `n ≤ n0`, `−1` above.
pub fn n_observable(dim: usize, n0: usize) -> Matrix {
    Matrix::from_fn(dim, dim, |i, j| match (i == j, i <= n0) {
        (true, true) => 1.0,
        (true, false) => -1.0,
        _ => 0.0,
    })
}

/// Reusable quadrature for building [`QTable`]s at one cutoff.
#[derive(Debug, Clone)]
pub struct QTableBuilder {
    nmax: usize,
    rule: GaussLegendre,
}

impl QTableBuilder {
    pub fn new(nmax: usize) -> Self {
        Self { nmax, rule: GaussLegendre::new(2 * nmax + 16) }
    }

    pub fn table(&self, x0: f64) -> QTable {
        let d = self.nmax + 1;
        let mut q = Matrix::zeros(d, d);
        if x0 > 0.0 {
            let mut h = vec![0.0; d];
            // Even integrand (n + m even): integrate over [0, x0] and double.
            let pref = 2.0 * math::sqrt(2.0 / core::f64::consts::PI);
            for (a, b) in quadrature::panels(0.0, x0, PANEL_WIDTH) {
                for (x, w) in self.rule.mapped(a, b) {
                    normalized_hermite(self.nmax, core::f64::consts::SQRT_2 * x, &mut h);
                    let g = pref * w * math::exp(-2.0 * x * x);
                    for n in 0..d {
                        let gn = g * h[n];
                        for m in (n..d).step_by(2) {
                            q[(n, m)] += gn * h[m];
                        }
                    }
                }
            }
            for n in 0..d {
                for m in (n + 2..d).step_by(2) {
                    q[(m, n)] = q[(n, m)];
                }
            }
        }
        QTable { q, x0 }
    }
}

/// Single overlap `Q_nm(x0)`.
pub fn q_overlap(n: usize, m: usize, x0: f64) -> f64 {
    if (n + m) % 2 == 1 || x0 <= 0.0 {
        return 0.0;
    }
    let top = n.max(m);
    let rule = GaussLegendre::new(n + m + 16);
    let mut h = vec![0.0; top + 1];
    let pref = 2.0 * math::sqrt(2.0 / core::f64::consts::PI);
    let mut acc = 0.0;
    for (a, b) in quadrature::panels(0.0, x0, PANEL_WIDTH) {
        for (x, w) in rule.mapped(a, b) {
            normalized_hermite(top, core::f64::consts::SQRT_2 * x, &mut h);
            acc += pref * w * math::exp(-2.0 * x * x) * h[n] * h[m];
        }
    }
    acc
}

/// Batch form of [`q_overlap`] over `0..=nmax`.
pub fn q_table(nmax: usize, x0: f64) -> QTable {
    QTableBuilder::new(nmax).table(x0)
}

fn check_dims(rho: &TwoModeDensity, q: &QTable) {
    assert_eq!(rho.dim(), q.dim(), "density and Q table cutoffs differ");
}

/// `E_XX = 1 + 4 Σ ρ_{mm'|nn'} [Q_nm Q_n'm' − ½ Q_nm δ_m'n' − ½ δ_mn Q_n'm']`
pub fn corr_xx(rho: &TwoModeDensity, q: &QTable) -> f64 {
    check_dims(rho, q);
    let d = rho.dim();
    let q = &q.q;
    let mut acc = 0.0;
    for m in 0..d {
        for n in 0..d {
            let qa = q[(n, m)];
            let da = if m == n { 1.0 } else { 0.0 };
            if qa == 0.0 && da == 0.0 {
                continue;
            }
            for mb in 0..d {
                for nb in 0..d {
                    let r = rho.get(m, mb, n, nb);
                    if r == 0.0 {
                        continue;
                    }
                    let qb = q[(nb, mb)];
                    let db = if mb == nb { 1.0 } else { 0.0 };
                    acc += r * (qa * qb - 0.5 * qa * db - 0.5 * da * qb);
                }
            }
        }
    }
    1.0 + 4.0 * acc
}

/// `E_XN = 2 Σ_{mn} [Σ_{m'≤n0} ρ_{mm'|nm'}(δ_mn − Q_nm) + Σ_{m'>n0} ρ_{mm'|nm'} Q_nm] − 1`,
/// homodyne on mode A, counting on mode B.
pub fn corr_xn(rho: &TwoModeDensity, q: &QTable, n0: usize) -> f64 {
    check_dims(rho, q);
    let d = rho.dim();
    let q = &q.q;
    let mut acc = 0.0;
    for m in 0..d {
        for n in 0..d {
            let qa = q[(n, m)];
            let da = if m == n { 1.0 } else { 0.0 };
            for mb in 0..d {
                let r = rho.get(m, mb, n, mb);
                acc += if mb <= n0 { r * (da - qa) } else { r * qa };
            }
        }
    }
    2.0 * acc - 1.0
}

/// Counting on mode A, homodyne on mode B: `E_XN` of the mode-swapped state.
pub fn corr_nx(rho: &TwoModeDensity, q: &QTable, n0: usize) -> f64 {
    corr_xn(&rho.swap_modes(), q, n0)
}

/// `E_NN = 1 − 2 Σ_{m≤n0<m'} ρ_{mm'|mm'} − 2 Σ_{m'≤n0<m} ρ_{mm'|mm'}`
pub fn corr_nn(rho: &TwoModeDensity, n0: usize) -> f64 {
    let d = rho.dim();
    let mut mixed = 0.0;
    for m in 0..d {
        for mb in 0..d {
            if (m <= n0) != (mb <= n0) {
                mixed += rho.population(m, mb);
            }
        }
    }
    1.0 - 2.0 * mixed
}

/// Correlations of a factorized density, `Σ w tr(A O_A) tr(B O_B)`, with the
/// single-mode traces shared across thresholds.
#[derive(Debug, Clone)]
pub struct FactorTraces {
    weights: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl FactorTraces {
    pub fn new(rho: &FactorizedDensity, obs_a: &Matrix, obs_b: &Matrix) -> Self {
        Self {
            weights: rho.terms.iter().map(|t| t.weight).collect(),
            a: rho.terms.iter().map(|t| t.a.trace_product(obs_a)).collect(),
            b: rho.terms.iter().map(|t| t.b.trace_product(obs_b)).collect(),
        }
    }

    pub fn value(&self) -> f64 {
        self.weights.iter().zip(&self.a).zip(&self.b).map(|((w, a), b)| w * a * b).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockspace::{amplified_noon, FockCutoff, Gain};

    fn erf_overlap(x0: f64) -> f64 {
        libm::erf(core::f64::consts::SQRT_2 * x0)
    }

    #[test]
    fn gaussian_bin_matches_erf() {
        for x0 in [0.1, 0.465, 1.0, 2.0, 8.0] {
            assert!((q_overlap(0, 0, x0) - erf_overlap(x0)).abs() < 1e-12, "x0 = {x0}");
        }
        assert!((q_overlap(0, 0, 0.465) - 0.6476).abs() < 1e-4);
    }

    #[test]
    fn trivial_zeros() {
        assert_eq!(q_overlap(0, 1, 0.7), 0.0);
        assert_eq!(q_overlap(4, 6, 0.0), 0.0);
        let t = q_table(10, 0.0);
        assert!(t.q.as_slice().iter().all(|&v| v == 0.0));
        let t = q_table(10, 0.9);
        assert_eq!(t.q[(3, 6)], 0.0);
    }

    #[test]
    fn table_agrees_with_single_overlaps() {
        let t = q_table(20, 1.3);
        for n in 0..=20 {
            for m in 0..=20 {
                assert!((t.q[(n, m)] - q_overlap(n, m, 1.3)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wide_bin_is_identity() {
        let t = q_table(20, 8.0);
        assert!(t.q.max_abs_diff(&Matrix::identity(21)) < 1e-8);
    }

    #[test]
    fn hermite_functions_at_zero() {
        let mut h = [0.0; 5];
        normalized_hermite(4, 0.0, &mut h);
        // H_2(0) = −2, H_4(0) = 12
        assert!((h[2] + 2.0 / 8f64.sqrt()).abs() < 1e-15);
        assert!((h[4] - 12.0 / (16.0 * 24.0f64).sqrt()).abs() < 1e-15);
        assert_eq!(h[1], 0.0);
    }

    #[test]
    fn vacuum_correlations() {
        let d = 6;
        let vac = TwoModeDensity::vacuum(d);
        let q = q_table(d - 1, 0.0);
        assert!((corr_xx(&vac, &q) - 1.0).abs() < 1e-15);
        assert!((corr_xn(&vac, &q, 0) - 1.0).abs() < 1e-15);
        assert!((corr_nx(&vac, &q, 0) - 1.0).abs() < 1e-15);
        for n0 in 0..d {
            assert!((corr_nn(&vac, n0) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn unamplified_noon_counting_is_anticorrelated() {
        let c = FockCutoff::new(10).unwrap();
        let rho = TwoModeDensity::from_pure(&amplified_noon(Gain::zero(), c).unwrap());
        assert!((corr_nn(&rho, 0) + 1.0).abs() < 1e-12);
        assert!((corr_nn(&rho, 10) - 1.0).abs() < 1e-12);
        let wide = q_table(10, 8.0);
        assert!((corr_xx(&rho, &wide) - 1.0).abs() < 1e-8);
        assert!((corr_xn(&rho, &wide, 10) + 1.0).abs() < 1e-8);
    }
}
