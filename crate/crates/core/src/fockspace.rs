//! Squeezed number states, the amplified two-photon N00N state and the
//! truncated single-mode squeeze operator `S(ζ) = exp[½(ζ a² − ζ a†²)]`.
//!
//! All amplitudes are real: the gain is restricted to `ζ ≥ 0` and the N00N
//! phase to zero.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::{math, Error, Result, MAX_NORM_DEFICIT};

/// Parametric gain `ζ ≥ 0` with `μ = cosh ζ`, `ν = sinh ζ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gain {
    zeta: f64,
    mu: f64,
    nu: f64,
}

impl Gain {
    pub fn new(zeta: f64) -> Result<Self> {
        if !(zeta >= 0.0) || !zeta.is_finite() {
            return Err(Error::Domain("gain must be finite and non-negative"));
        }
        Ok(Self { zeta, mu: math::cosh(zeta), nu: math::sinh(zeta) })
    }

    pub fn zero() -> Self {
        Self { zeta: 0.0, mu: 1.0, nu: 0.0 }
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Closed-form mean photon number of the amplified N00N state, `2 + 6 sinh²ζ`.
    pub fn mean_total_photons_closed_form(&self) -> f64 {
        2.0 + 6.0 * self.nu * self.nu
    }
}

/// Largest photon number kept per mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockCutoff(usize);

impl FockCutoff {
    pub fn new(nmax: usize) -> Result<Self> {
        if nmax < 2 {
            return Err(Error::Domain("cutoff must keep at least two photons per mode"));
        }
        Ok(Self(nmax))
    }

    pub fn nmax(&self) -> usize {
        self.0
    }

    /// Number of basis states per mode, `nmax + 1`.
    pub fn dim(&self) -> usize {
        self.0 + 1
    }
}

impl Default for FockCutoff {
    fn default() -> Self {
        Self(crate::DEFAULT_NMAX)
    }
}

/// Single-mode amplitudes on `|0⟩ … |nmax⟩`, as produced by the truncated
/// series (not renormalized).
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeCoeffs {
    pub c: Vec<f64>,
    /// `1 − Σ c²`
    pub norm_deficit: f64,
}

impl SingleModeCoeffs {
    fn from_amplitudes(c: Vec<f64>) -> Self {
        let norm: f64 = c.iter().map(|x| x * x).sum();
        Self { c, norm_deficit: 1.0 - norm }
    }

    pub fn basis(dim: usize, n: usize) -> Self {
        let mut c = vec![0.0; dim];
        c[n] = 1.0;
        Self { c, norm_deficit: 0.0 }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum()
    }

    fn check_deficit(&self) -> Result<()> {
        if math::abs(self.norm_deficit) >= MAX_NORM_DEFICIT {
            return Err(Error::InsufficientCutoff {
                nmax: self.c.len() - 1,
                deficit: self.norm_deficit,
            });
        }
        Ok(())
    }
}

/// Even-index amplitudes `(1/√μ) (−ν/2μ)^k √((2k)!)/k!` for `2k ≤ nmax`,
/// without the gain-dependent prefactor.
fn even_series(gain: &Gain, cutoff: FockCutoff) -> Vec<f64> {
    let ratio = -gain.nu / (2.0 * gain.mu);
    let mut out = vec![0.0; cutoff.dim()];
    let mut term = 1.0;
    out[0] = term;
    let mut k = 1;
    while 2 * k <= cutoff.nmax() {
        // √((2k)!)/k! grows by √(2k(2k−1))/k per step.
        let kf = k as f64;
        term *= ratio * math::sqrt(2.0 * kf * (2.0 * kf - 1.0)) / kf;
        out[2 * k] = term;
        k += 1;
    }
    out
}

/// `S(ζ)|0⟩` truncated at `cutoff`.
pub fn squeezed_vacuum_coeffs(gain: Gain, cutoff: FockCutoff) -> Result<SingleModeCoeffs> {
    let pref = 1.0 / math::sqrt(gain.mu);
    let c = even_series(&gain, cutoff).into_iter().map(|t| pref * t).collect();
    let out = SingleModeCoeffs::from_amplitudes(c);
    out.check_deficit()?;
    Ok(out)
}

/// `S(ζ)|2⟩` truncated at `cutoff`. At `ζ = 0` the series is a 0/0 form and
/// the limit `|2⟩` is returned directly.
pub fn squeezed_two_photon_coeffs(gain: Gain, cutoff: FockCutoff) -> Result<SingleModeCoeffs> {
    if gain.zeta == 0.0 {
        return Ok(SingleModeCoeffs::basis(cutoff.dim(), 2));
    }
    let (mu, nu) = (gain.mu, gain.nu);
    let pref = 1.0 / math::sqrt(2.0 * mu * mu * mu);
    let c = even_series(&gain, cutoff)
        .into_iter()
        .enumerate()
        .map(|(n, t)| {
            if n % 2 == 1 {
                return 0.0;
            }
            let k = (n / 2) as f64;
            pref * t * (nu - 2.0 * k / nu)
        })
        .collect();
    let out = SingleModeCoeffs::from_amplitudes(c);
    out.check_deficit()?;
    Ok(out)
}

/// Two-mode pure state `Σ c[m][m'] |m⟩_A |m'⟩_B`, renormalized after
/// truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModePureState {
    /// Row `m` (mode A), column `m'` (mode B).
    pub c: Matrix,
    /// Norm lost to truncation before renormalization.
    pub norm_deficit: f64,
}

impl TwoModePureState {
    pub fn dim(&self) -> usize {
        self.c.rows()
    }

    pub fn amplitude(&self, m: usize, m_b: usize) -> f64 {
        self.c[(m, m_b)]
    }

    /// Bare two-photon N00N state `(|2,0⟩ + |0,2⟩)/√2`.
    pub fn bare_noon(cutoff: FockCutoff) -> Self {
        let mut c = Matrix::zeros(cutoff.dim(), cutoff.dim());
        c[(2, 0)] = core::f64::consts::FRAC_1_SQRT_2;
        c[(0, 2)] = core::f64::consts::FRAC_1_SQRT_2;
        Self { c, norm_deficit: 0.0 }
    }
}

/// `S_A(ζ) S_B(ζ) (|2,0⟩ + |0,2⟩)/√2 = (|Φ2⟩|Φ0⟩ + |Φ0⟩|Φ2⟩)/√2`.
pub fn amplified_noon(gain: Gain, cutoff: FockCutoff) -> Result<TwoModePureState> {
    let phi0 = squeezed_vacuum_coeffs(gain, cutoff)?;
    let phi2 = squeezed_two_photon_coeffs(gain, cutoff)?;
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut c = Matrix::from_fn(cutoff.dim(), cutoff.dim(), |m, mb| {
        s * (phi2.c[m] * phi0.c[mb] + phi0.c[m] * phi2.c[mb])
    });
    let norm: f64 = c.as_slice().iter().map(|x| x * x).sum();
    let deficit = 1.0 - norm;
    if math::abs(deficit) >= MAX_NORM_DEFICIT {
        return Err(Error::InsufficientCutoff { nmax: cutoff.nmax(), deficit });
    }
    c.scale(1.0 / math::sqrt(norm));
    Ok(TwoModePureState { c, norm_deficit: deficit })
}

/// `⟨n_A + n_B⟩` of a normalized two-mode pure state.
pub fn mean_total_photons(state: &TwoModePureState) -> f64 {
    let d = state.dim();
    let mut acc = 0.0;
    for m in 0..d {
        for mb in 0..d {
            let a = state.c[(m, mb)];
            acc += (m + mb) as f64 * a * a;
        }
    }
    acc
}

/// Truncated `⟨m|S(ζ)|n⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezeMatrix {
    pub s: Matrix,
    /// Columns `0..=interior_block` are trusted.
    pub interior_block: usize,
}

/// Column leakage out of the kept rows above which a column is no longer
/// trusted; the same budget as for the truncated series.
const SQUEEZE_LEAKAGE_TOL: f64 = MAX_NORM_DEFICIT;

/// Builds `S(ζ)` by exponentiating the generator at a working cutoff of
/// `2·nmax + 2` and keeping the top-left `(nmax+1)²` block.
pub fn squeeze_matrix(gain: Gain, cutoff: FockCutoff) -> Result<SqueezeMatrix> {
    let dim = cutoff.dim();
    let work = 2 * cutoff.nmax() + 3;
    // G = (ζ/2)(a² − a†²); ⟨m|a²|n⟩ = √(n(n−1)) for m = n − 2.
    let half = 0.5 * gain.zeta;
    let generator = Matrix::from_fn(work, work, |m, n| {
        if m + 2 == n {
            half * math::sqrt((n * (n - 1)) as f64)
        } else if n + 2 == m {
            -half * math::sqrt((m * (m - 1)) as f64)
        } else {
            0.0
        }
    });
    let full = generator.expm();

    let mut trusted = None;
    for n in 0..dim {
        let kept: f64 = (0..dim).map(|m| full[(m, n)] * full[(m, n)]).sum();
        if math::abs(1.0 - kept) > SQUEEZE_LEAKAGE_TOL {
            break;
        }
        trusted = Some(n);
    }
    let Some(interior_block) = trusted else {
        return Err(Error::UntrustedSqueezeBlock { trusted: 0, required: 0 });
    };
    // Parity is exact; clear round-off on the odd sublattice.
    let s = Matrix::from_fn(dim, dim, |m, n| if (m + n) % 2 == 1 { 0.0 } else { full[(m, n)] });
    Ok(SqueezeMatrix { s, interior_block })
}

impl SqueezeMatrix {
    pub fn require_trusted(&self, n: usize) -> Result<()> {
        if n > self.interior_block {
            return Err(Error::UntrustedSqueezeBlock { trusted: self.interior_block, required: n });
        }
        Ok(())
    }

    /// `S M Sᵀ` for a single-mode operator `M` whose support lies in the
    /// trusted block.
    pub fn conjugate(&self, op: &Matrix) -> Result<Matrix> {
        let dim = self.s.rows();
        let mut support = 0;
        for i in 0..dim {
            for j in 0..dim {
                if op[(i, j)] != 0.0 {
                    support = support.max(i).max(j);
                }
            }
        }
        self.require_trusted(support)?;
        let block = support + 1;
        let s_cols = Matrix::from_fn(dim, block, |i, j| self.s[(i, j)]);
        let inner = op.block(block, block);
        Ok(s_cols.matmul(&inner).matmul(&s_cols.transpose()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cutoff(n: usize) -> FockCutoff {
        FockCutoff::new(n).unwrap()
    }

    #[test]
    fn gain_rejects_negative_and_nan() {
        assert!(Gain::new(-0.1).is_err());
        assert!(Gain::new(f64::NAN).is_err());
        let g = Gain::new(0.4).unwrap();
        assert!((g.mu() * g.mu() - g.nu() * g.nu() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cutoff_below_two_rejected() {
        assert!(FockCutoff::new(1).is_err());
        assert!(FockCutoff::new(2).is_ok());
    }

    #[test]
    fn vacuum_at_zero_gain() {
        let v = squeezed_vacuum_coeffs(Gain::zero(), cutoff(10)).unwrap();
        assert_eq!(v.c[0], 1.0);
        assert!(v.c[1..].iter().all(|&x| x == 0.0));
        assert_eq!(v.norm_deficit, 0.0);
    }

    #[test]
    fn vacuum_series_second_coefficient() {
        // Direct evaluation of the n = 1 term.
        let z: f64 = 0.189;
        let (mu, nu) = (z.cosh(), z.sinh());
        let expected = (1.0 / mu.sqrt()) * (-nu / (2.0 * mu)) * 2f64.sqrt();
        let v = squeezed_vacuum_coeffs(Gain::new(z).unwrap(), cutoff(40)).unwrap();
        assert!((v.c[2] - expected).abs() < 1e-15);
        assert!((v.c[2] + 0.1309).abs() < 5e-5);
    }

    #[test]
    fn vacuum_norm_at_moderate_gain() {
        let v = squeezed_vacuum_coeffs(Gain::new(0.3).unwrap(), cutoff(40)).unwrap();
        assert!((v.norm_sqr() - 1.0).abs() < 1e-10);
        assert!(v.c.iter().skip(1).step_by(2).all(|&x| x == 0.0));
    }

    #[test]
    fn small_cutoff_is_rejected() {
        let err = squeezed_vacuum_coeffs(Gain::new(1.5).unwrap(), cutoff(4)).unwrap_err();
        assert!(matches!(err, Error::InsufficientCutoff { .. }));
    }

    #[test]
    fn two_photon_limit_and_series() {
        let s = squeezed_two_photon_coeffs(Gain::zero(), cutoff(8)).unwrap();
        assert_eq!(s.c, {
            let mut v = vec![0.0; 9];
            v[2] = 1.0;
            v
        });
        let z: f64 = 0.5;
        let g = Gain::new(z).unwrap();
        let s = squeezed_two_photon_coeffs(g, cutoff(40)).unwrap();
        let expected = z.sinh() / (2.0 * z.cosh().powi(3)).sqrt();
        assert!((s.c[0] - expected).abs() < 1e-15);
        let s = squeezed_two_photon_coeffs(Gain::new(0.189).unwrap(), cutoff(40)).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn noon_at_zero_gain() {
        let st = amplified_noon(Gain::zero(), cutoff(6)).unwrap();
        let r = core::f64::consts::FRAC_1_SQRT_2;
        for m in 0..7 {
            for mb in 0..7 {
                let want = if (m, mb) == (2, 0) || (m, mb) == (0, 2) { r } else { 0.0 };
                assert!((st.c[(m, mb)] - want).abs() < 1e-15);
            }
        }
        assert!((mean_total_photons(&st) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn noon_symmetry_and_parity() {
        let st = amplified_noon(Gain::new(0.45).unwrap(), cutoff(30)).unwrap();
        for m in 0..31 {
            for mb in 0..31 {
                assert_eq!(st.c[(m, mb)], st.c[(mb, m)]);
                if m % 2 == 1 || mb % 2 == 1 {
                    assert_eq!(st.c[(m, mb)], 0.0);
                }
            }
        }
    }

    #[test]
    fn mean_photons_landmarks() {
        let n = |z| mean_total_photons(&amplified_noon(Gain::new(z).unwrap(), cutoff(40)).unwrap());
        assert!((n(0.189) - 2.22).abs() < 0.01);
        assert!((n(0.557) - 4.06).abs() < 0.01);
    }

    #[test]
    fn squeeze_matrix_identity_at_zero() {
        let s = squeeze_matrix(Gain::zero(), cutoff(8)).unwrap();
        assert!(s.s.max_abs_diff(&Matrix::identity(9)) < 1e-15);
        assert_eq!(s.interior_block, 8);
    }

    #[test]
    fn squeeze_matrix_columns_match_series() {
        let g = Gain::new(0.3).unwrap();
        let c = cutoff(30);
        let s = squeeze_matrix(g, c).unwrap();
        let v = squeezed_vacuum_coeffs(g, c).unwrap();
        let t = squeezed_two_photon_coeffs(g, c).unwrap();
        for m in 0..=30 {
            assert!((s.s[(m, 0)] - v.c[m]).abs() < 1e-8, "col 0 row {m}");
            assert!((s.s[(m, 2)] - t.c[m]).abs() < 1e-8, "col 2 row {m}");
        }
        let b = s.interior_block + 1;
        let blk = s.s.block(31, b);
        let gram = blk.transpose().matmul(&blk);
        assert!(gram.max_abs_diff(&Matrix::identity(b)) < 1e-6);
    }
}
