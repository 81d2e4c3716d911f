//! Brute-force reference paths: dense correlation operators on the full
//! two-mode space, the Kraus form of photon loss, and adaptive quadrature of
//! the bin overlaps from unnormalized Hermite polynomials. Costs grow as
//! `O(dim⁴..dim⁶)`, so these only run at small cutoffs.

use crate::channels::{binomial_pmf, TwoModeDensity};
use crate::fockspace::FockCutoff;
use crate::linalg::Matrix;
use crate::measurement::{n_observable, q_table, Thresholds};
use crate::{math, Error, Result};

/// Largest cutoff accepted by [`damp_via_kraus`].
pub const KRAUS_NMAX_LIMIT: usize = 12;

/// Largest photon number accepted by [`q_overlap_reference`].
pub const REFERENCE_OVERLAP_LIMIT: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationKind {
    XX,
    XN,
    NX,
    NN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    A,
    B,
}

/// Operator on the product basis `|m⟩_A |m'⟩_B`, row index `m·dim + m'`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub matrix: Matrix,
}

impl DenseOperator {
    pub fn kron(a: &Matrix, b: &Matrix) -> Self {
        let (da, db) = (a.rows(), b.rows());
        let matrix = Matrix::from_fn(da * db, da * db, |i, j| a[(i / db, j / db)] * b[(i % db, j % db)]);
        Self { matrix }
    }

    /// `tr(ρ O)`
    pub fn expectation(&self, rho: &TwoModeDensity) -> f64 {
        rho.to_matrix().trace_product(&self.matrix)
    }
}

fn single_mode_x(thresholds: Thresholds, cutoff: FockCutoff) -> Matrix {
    let q = q_table(cutoff.nmax(), thresholds.x0).q;
    let d = cutoff.dim();
    Matrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { 0.0 } - 2.0 * q[(i, j)])
}

/// `[Π⁺ − Π⁻]_A ⊗ [Π⁺ − Π⁻]_B` assembled densely.
pub fn build_correlation_operator(kind: CorrelationKind, thresholds: Thresholds, cutoff: FockCutoff) -> DenseOperator {
    let x = single_mode_x(thresholds, cutoff);
    let n = n_observable(cutoff.dim(), thresholds.n0);
    match kind {
        CorrelationKind::XX => DenseOperator::kron(&x, &x),
        CorrelationKind::XN => DenseOperator::kron(&x, &n),
        CorrelationKind::NX => DenseOperator::kron(&n, &x),
        CorrelationKind::NN => DenseOperator::kron(&n, &n),
    }
}

/// `B = E_XX + E_XN + E_NX − E_NN` as one dense operator.
pub fn bell_operator(thresholds: Thresholds, cutoff: FockCutoff) -> DenseOperator {
    use CorrelationKind::*;
    let mut m = build_correlation_operator(XX, thresholds, cutoff).matrix;
    m.add_scaled(&build_correlation_operator(XN, thresholds, cutoff).matrix, 1.0);
    m.add_scaled(&build_correlation_operator(NX, thresholds, cutoff).matrix, 1.0);
    m.add_scaled(&build_correlation_operator(NN, thresholds, cutoff).matrix, -1.0);
    DenseOperator { matrix: m }
}

/// Single-mode Kraus operators `K_k = Σ_n √B(k|λ,n) |n−k⟩⟨n|`.
pub fn kraus_operators(lambda: f64, dim: usize) -> Result<alloc::vec::Vec<Matrix>> {
    (0..dim)
        .map(|k| {
            let mut kk = Matrix::zeros(dim, dim);
            for n in k..dim {
                kk[(n - k, n)] = math::sqrt(binomial_pmf(k, lambda, n)?);
            }
            Ok(kk)
        })
        .collect()
}

/// `Σ_k K_k ρ K_kᵀ` on one mode.
pub fn damp_via_kraus(rho: &TwoModeDensity, lambda: f64, mode: Mode) -> Result<TwoModeDensity> {
    let d = rho.dim();
    if d - 1 > KRAUS_NMAX_LIMIT {
        return Err(Error::CutoffGuard { nmax: d - 1, limit: KRAUS_NMAX_LIMIT });
    }
    let id = Matrix::identity(d);
    let r = rho.to_matrix();
    let mut out = Matrix::zeros(d * d, d * d);
    for k in kraus_operators(lambda, d)? {
        let full = match mode {
            Mode::A => DenseOperator::kron(&k, &id).matrix,
            Mode::B => DenseOperator::kron(&id, &k).matrix,
        };
        out.add_scaled(&full.matmul(&r).matmul(&full.transpose()), 1.0);
    }
    Ok(TwoModeDensity::from_matrix(&out))
}

/// Physicists' Hermite polynomials `H_0(y) … H_n(y)`.
fn hermite_physicists(n: usize, y: f64) -> alloc::vec::Vec<f64> {
    let mut h = alloc::vec![0.0; n + 1];
    h[0] = 1.0;
    if n > 0 {
        h[1] = 2.0 * y;
    }
    for k in 1..n {
        h[k + 1] = 2.0 * y * h[k] - 2.0 * k as f64 * h[k - 1];
    }
    h
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || math::abs(delta) <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `Q_nm(x0)` by adaptive Simpson quadrature of the defining integral with
/// unnormalized Hermite polynomials.
pub fn q_overlap_reference(n: usize, m: usize, x0: f64) -> Result<f64> {
    if n.max(m) > REFERENCE_OVERLAP_LIMIT {
        return Err(Error::CutoffGuard { nmax: n.max(m), limit: REFERENCE_OVERLAP_LIMIT });
    }
    if (n + m) % 2 == 1 || x0 <= 0.0 {
        return Ok(0.0);
    }
    let ln_norm = 0.5
        * ((n + m) as f64 * core::f64::consts::LN_2 + math::ln_factorial(n) + math::ln_factorial(m));
    let norm = math::exp(-ln_norm) * math::sqrt(2.0 / core::f64::consts::PI);
    let top = n.max(m);
    let f = |x: f64| {
        let h = hermite_physicists(top, core::f64::consts::SQRT_2 * x);
        norm * math::exp(-2.0 * x * x) * h[n] * h[m]
    };
    // Integrate over panels of width 0.25 on [−x0, x0].
    let panels = math::ceil(2.0 * x0 / 0.25).max(1.0) as usize;
    let h = 2.0 * x0 / panels as f64;
    let mut acc = 0.0;
    for i in 0..panels {
        let a = -x0 + h * i as f64;
        let b = a + h;
        let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        acc += adaptive_simpson(&f, a, b, fa, fm, fb, whole, 1e-14, 40);
    }
    Ok(acc)
}
