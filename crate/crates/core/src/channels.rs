//! Photon loss modelled as amplitude damping, applied either to a dense
//! two-mode density tensor or, much faster, factor by factor to a density
//! written as a short sum of single-mode tensor products.

use alloc::vec;
use alloc::vec::Vec;

use crate::fockspace::{self, FockCutoff, Gain, SingleModeCoeffs, SqueezeMatrix, TwoModePureState};
use crate::linalg::Matrix;
use crate::{math, Error, Result};

/// Largest tolerated trace drift before renormalizing a state that went
/// through a truncated squeeze.
const MAX_TRACE_DRIFT: f64 = 1e-6;

/// Real two-mode density tensor `ρ_{mm'|nn'} = ⟨m, m'| ρ |n, n'⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeDensity {
    dim: usize,
    data: Vec<f64>,
}

impl TwoModeDensity {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn offset(&self, m: usize, mb: usize, n: usize, nb: usize) -> usize {
        ((m * self.dim + mb) * self.dim + n) * self.dim + nb
    }

    /// `ρ_{m m'|n n'}`
    #[inline]
    pub fn get(&self, m: usize, mb: usize, n: usize, nb: usize) -> f64 {
        self.data[self.offset(m, mb, n, nb)]
    }

    #[inline]
    pub fn set(&mut self, m: usize, mb: usize, n: usize, nb: usize, v: f64) {
        let i = self.offset(m, mb, n, nb);
        self.data[i] = v;
    }

    #[inline]
    pub fn add(&mut self, m: usize, mb: usize, n: usize, nb: usize, v: f64) {
        let i = self.offset(m, mb, n, nb);
        self.data[i] += v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `|ψ⟩⟨ψ|`
    pub fn from_pure(state: &TwoModePureState) -> Self {
        let d = state.dim();
        let c = state.c.as_slice();
        let mut out = Self::zeros(d);
        for (i, &a) in c.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let row = &mut out.data[i * d * d..(i + 1) * d * d];
            for (r, &b) in row.iter_mut().zip(c) {
                *r = a * b;
            }
        }
        out
    }

    /// Row-major `d² × d²` matrix over the product basis `|m⟩|m'⟩`.
    pub fn to_matrix(&self) -> Matrix {
        let n = self.dim * self.dim;
        Matrix::from_fn(n, n, |i, j| self.data[i * n + j])
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        let n = m.rows();
        let dim = (0..=n).find(|d| d * d == n).expect("matrix side must be a square");
        Self { dim, data: m.as_slice().to_vec() }
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim;
        (0..d).flat_map(|m| (0..d).map(move |mb| (m, mb))).map(|(m, mb)| self.get(m, mb, m, mb)).sum()
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    /// Largest `|ρ_{mm'|nn'} − ρ_{nn'|mm'}|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim * self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max(math::abs(self.data[i * n + j] - self.data[j * n + i]));
            }
        }
        worst
    }

    /// Exchange the roles of modes A and B.
    pub fn swap_modes(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for m in 0..d {
            for mb in 0..d {
                for n in 0..d {
                    for nb in 0..d {
                        out.set(mb, m, nb, n, self.get(m, mb, n, nb));
                    }
                }
            }
        }
        out
    }

    /// Diagonal entry `ρ_{mm'|mm'}`, the joint photon-number distribution.
    pub fn population(&self, m: usize, mb: usize) -> f64 {
        self.get(m, mb, m, mb)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| math::abs(a - b)).fold(0.0, f64::max)
    }

    /// Vacuum projector `|0,0⟩⟨0,0|`.
    pub fn vacuum(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        out.set(0, 0, 0, 0, 1.0);
        out
    }
}

/// Channel transmittance and detector efficiencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParams {
    pub t: f64,
    pub eta_n: f64,
    pub eta_x: f64,
}

impl LossParams {
    pub fn new(t: f64, eta_n: f64, eta_x: f64) -> Result<Self> {
        for v in [t, eta_n, eta_x] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain("transmittance and efficiencies must lie in [0, 1]"));
            }
        }
        Ok(Self { t, eta_n, eta_x })
    }

    pub const fn lossless() -> Self {
        Self { t: 1.0, eta_n: 1.0, eta_x: 1.0 }
    }
}

impl Default for LossParams {
    fn default() -> Self {
        Self::lossless()
    }
}

/// Measurement an observer performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasurementKind {
    /// Photon counting against `n0`.
    N,
    /// Homodyne detection against `x0`.
    X,
}

/// Loss probabilities `(λ_A, λ_B)` with detector inefficiency folded into
/// the transmission channel: `λ = 1 − t·η` for the chosen measurement.
pub fn loss_for_measurement(loss: LossParams, side_a: MeasurementKind, side_b: MeasurementKind) -> (f64, f64) {
    let lambda = |kind| match kind {
        MeasurementKind::N => 1.0 - loss.t * loss.eta_n,
        MeasurementKind::X => 1.0 - loss.t * loss.eta_x,
    };
    (lambda(side_a), lambda(side_b))
}

/// `C(n,k) p^k (1−p)^{n−k}`, evaluated in log space.
pub fn binomial_pmf(k: usize, p: f64, n: usize) -> Result<f64> {
    if k > n {
        return Err(Error::Domain("binomial: k exceeds n"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain("binomial: p outside [0, 1]"));
    }
    Ok(binomial_unchecked(k, p, n))
}

fn binomial_unchecked(k: usize, p: f64, n: usize) -> f64 {
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln_choose = math::ln_factorial(n) - math::ln_factorial(k) - math::ln_factorial(n - k);
    math::exp(ln_choose + k as f64 * math::ln(p) + (n - k) as f64 * math::ln(1.0 - p))
}

/// `√B(k|λ,n)` for `k ≤ n < dim`, indexed `[n][k]`.
pub(crate) fn sqrt_binomial_table(lambda: f64, dim: usize) -> Matrix {
    Matrix::from_fn(dim, dim, |n, k| if k <= n { math::sqrt(binomial_unchecked(k, lambda, n)) } else { 0.0 })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain("loss probability must lie in [0, 1]"));
    }
    Ok(())
}

/// Damps a single-mode operator `M`:
/// `M'_{mn} = Σ_k M_{k+m,k+n} √(B(k|λ,k+m) B(k|λ,k+n))`.
pub(crate) fn damp_single_mode(op: &Matrix, table: &Matrix) -> Matrix {
    let d = op.rows();
    let mut out = Matrix::zeros(d, d);
    for m in 0..d {
        for n in 0..d {
            let kmax = d - m.max(n);
            let mut acc = 0.0;
            for k in 0..kmax {
                let v = op[(k + m, k + n)];
                if v != 0.0 {
                    acc += v * table[(k + m, k)] * table[(k + n, k)];
                }
            }
            out[(m, n)] = acc;
        }
    }
    out
}

/// Dense two-mode amplitude damping. Costs `O(dim⁶)`; use the product-form
/// path for anything but small cutoffs.
pub fn amplitude_damp(rho: &TwoModeDensity, lambda_a: f64, lambda_b: f64) -> Result<TwoModeDensity> {
    check_lambda(lambda_a)?;
    check_lambda(lambda_b)?;
    let d = rho.dim();
    let ta = sqrt_binomial_table(lambda_a, d);
    let tb = sqrt_binomial_table(lambda_b, d);
    let mut out = TwoModeDensity::zeros(d);
    for m in 0..d {
        for n in 0..d {
            let ka_max = d - m.max(n);
            for mb in 0..d {
                for nb in 0..d {
                    let kb_max = d - mb.max(nb);
                    let mut acc = 0.0;
                    for k in 0..ka_max {
                        let fa = ta[(k + m, k)] * ta[(k + n, k)];
                        if fa == 0.0 {
                            continue;
                        }
                        for kb in 0..kb_max {
                            let v = rho.get(k + m, kb + mb, k + n, kb + nb);
                            if v != 0.0 {
                                acc += v * fa * tb[(kb + mb, kb)] * tb[(kb + nb, kb)];
                            }
                        }
                    }
                    out.set(m, mb, n, nb, acc);
                }
            }
        }
    }
    Ok(out)
}

/// `Σ_i w_i |uA_i⟩⟨vA_i| ⊗ |uB_i⟩⟨vB_i|`
#[derive(Debug, Clone, PartialEq)]
pub struct ProductFormDensity {
    pub terms: Vec<ProductTerm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub weight: f64,
    pub u_a: SingleModeCoeffs,
    pub v_a: SingleModeCoeffs,
    pub u_b: SingleModeCoeffs,
    pub v_b: SingleModeCoeffs,
}

impl ProductFormDensity {
    /// `|Ψ2⟩⟨Ψ2|` as four terms built from `{Φ0, Φ2}` in each mode.
    pub fn amplified_noon(gain: Gain, cutoff: FockCutoff) -> Result<Self> {
        let phi0 = fockspace::squeezed_vacuum_coeffs(gain, cutoff)?;
        let phi2 = fockspace::squeezed_two_photon_coeffs(gain, cutoff)?;
        // Same renormalization as the dense construction.
        let norm = fockspace::amplified_noon(gain, cutoff)?.norm_deficit;
        let w = 0.5 / (1.0 - norm);
        // |Ψ⟩ ∝ Φ2⊗Φ0 + Φ0⊗Φ2
        let kets = [(&phi2, &phi0), (&phi0, &phi2)];
        let mut terms = Vec::with_capacity(4);
        for (ua, ub) in kets {
            for (va, vb) in kets {
                terms.push(ProductTerm {
                    weight: w,
                    u_a: ua.clone(),
                    v_a: va.clone(),
                    u_b: ub.clone(),
                    v_b: vb.clone(),
                });
            }
        }
        Ok(Self { terms })
    }

    /// Product form of `|ψ⟩⟨ψ|` read off the nonzero amplitudes of `ψ`;
    /// intended for states with small support such as the bare N00N state.
    pub fn from_sparse_pure(state: &TwoModePureState) -> Self {
        let d = state.dim();
        let support: Vec<(usize, usize, f64)> = (0..d)
            .flat_map(|m| (0..d).map(move |mb| (m, mb)))
            .filter_map(|(m, mb)| {
                let a = state.c[(m, mb)];
                (a != 0.0).then_some((m, mb, a))
            })
            .collect();
        let mut terms = Vec::with_capacity(support.len() * support.len());
        for &(m, mb, a) in &support {
            for &(n, nb, b) in &support {
                terms.push(ProductTerm {
                    weight: a * b,
                    u_a: SingleModeCoeffs::basis(d, m),
                    v_a: SingleModeCoeffs::basis(d, n),
                    u_b: SingleModeCoeffs::basis(d, mb),
                    v_b: SingleModeCoeffs::basis(d, nb),
                });
            }
        }
        Self { terms }
    }

    pub fn dim(&self) -> usize {
        self.terms.first().map_or(0, |t| t.u_a.c.len())
    }

    /// Factorized form with each `|u⟩⟨v|` written out as a matrix.
    pub fn to_factorized(&self) -> FactorizedDensity {
        FactorizedDensity {
            terms: self
                .terms
                .iter()
                .map(|t| FactorTerm {
                    weight: t.weight,
                    a: Matrix::outer(&t.u_a.c, &t.v_a.c),
                    b: Matrix::outer(&t.u_b.c, &t.v_b.c),
                })
                .collect(),
        }
    }

    pub fn expand(&self) -> TwoModeDensity {
        self.to_factorized().expand()
    }
}

/// `Σ_i w_i A_i ⊗ B_i` with dense single-mode factors.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizedDensity {
    pub terms: Vec<FactorTerm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorTerm {
    pub weight: f64,
    pub a: Matrix,
    pub b: Matrix,
}

impl FactorizedDensity {
    pub fn dim(&self) -> usize {
        self.terms.first().map_or(0, |t| t.a.rows())
    }

    pub fn trace(&self) -> f64 {
        self.terms.iter().map(|t| t.weight * t.a.trace() * t.b.trace()).sum()
    }

    /// `Σ w tr(A O_A) tr(B O_B)`
    pub fn expectation(&self, obs_a: &Matrix, obs_b: &Matrix) -> f64 {
        self.terms
            .iter()
            .map(|t| t.weight * t.a.trace_product(obs_a) * t.b.trace_product(obs_b))
            .sum()
    }

    /// Applies independent amplitude damping to each mode, term by term.
    pub fn damp(&self, lambda_a: f64, lambda_b: f64) -> Result<Self> {
        check_lambda(lambda_a)?;
        check_lambda(lambda_b)?;
        let d = self.dim();
        let ta = sqrt_binomial_table(lambda_a, d);
        let tb = sqrt_binomial_table(lambda_b, d);
        Ok(Self {
            terms: self
                .terms
                .iter()
                .map(|t| FactorTerm {
                    weight: t.weight,
                    a: if lambda_a == 0.0 { t.a.clone() } else { damp_single_mode(&t.a, &ta) },
                    b: if lambda_b == 0.0 { t.b.clone() } else { damp_single_mode(&t.b, &tb) },
                })
                .collect(),
        })
    }

    pub fn scale(&mut self, s: f64) {
        self.terms.iter_mut().for_each(|t| t.weight *= s);
    }

    pub fn expand(&self) -> TwoModeDensity {
        let d = self.dim();
        let mut out = TwoModeDensity::zeros(d);
        for t in &self.terms {
            for m in 0..d {
                for n in 0..d {
                    let a = t.weight * t.a[(m, n)];
                    if a == 0.0 {
                        continue;
                    }
                    for mb in 0..d {
                        for nb in 0..d {
                            out.add(m, mb, n, nb, a * t.b[(mb, nb)]);
                        }
                    }
                }
            }
        }
        out
    }
}

/// Fast path for damping a product-form density. Matches
/// [`amplitude_damp`] on the expanded tensor.
pub fn damp_product_form(state: &ProductFormDensity, lambda_a: f64, lambda_b: f64) -> Result<TwoModeDensity> {
    Ok(state.to_factorized().damp(lambda_a, lambda_b)?.expand())
}

/// Loss before amplification: damp the bare N00N state with `λ = 1 − t` on
/// both arms, then squeeze each mode. Returned in factorized form.
pub fn damp_then_amplify_factorized(
    noon: &TwoModePureState,
    t: f64,
    squeeze: &SqueezeMatrix,
) -> Result<FactorizedDensity> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain("transmittance must lie in [0, 1]"));
    }
    let damped = ProductFormDensity::from_sparse_pure(noon).to_factorized().damp(1.0 - t, 1.0 - t)?;
    let mut out = FactorizedDensity {
        terms: damped
            .terms
            .iter()
            .map(|term| {
                Ok(FactorTerm {
                    weight: term.weight,
                    a: squeeze.conjugate(&term.a)?,
                    b: squeeze.conjugate(&term.b)?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let tr = out.trace();
    if math::abs(tr - 1.0) > MAX_TRACE_DRIFT {
        return Err(Error::InsufficientCutoff { nmax: squeeze.s.rows() - 1, deficit: 1.0 - tr });
    }
    out.scale(1.0 / tr);
    Ok(out)
}

/// Dense form of [`damp_then_amplify_factorized`].
pub fn damp_then_amplify(noon: &TwoModePureState, t: f64, gain: Gain, cutoff: FockCutoff) -> Result<TwoModeDensity> {
    let squeeze = fockspace::squeeze_matrix(gain, cutoff)?;
    Ok(damp_then_amplify_factorized(noon, t, &squeeze)?.expand())
}
