//! CHSH value `B = E_XX + E_XN + E_NX − E_NN` for the amplified N00N state
//! under loss, and the searches built on it: thresholds at fixed gain, gain,
//! and the loss boundaries where the violation disappears.
//!
//! All evaluations go through [`BellEvaluator`], which owns the quadrature
//! tables for the `x0` search grid so they are built once per cutoff.

use alloc::vec::Vec;

use crate::channels::{self, FactorizedDensity, LossParams, MeasurementKind, ProductFormDensity};
use crate::fockspace::{self, FockCutoff, Gain, TwoModePureState};
use crate::linalg::Matrix;
use crate::measurement::{n_observable, FactorTraces, QTable, QTableBuilder, Thresholds};
use crate::optimize::{bisect_predicate, golden_section_max};
use crate::{math, Error, Result};

/// Local-realistic bound on `B`.
pub const CLASSICAL_BOUND: f64 = 2.0;

/// Tolerance on `e_xn = e_nx` for swap-symmetric configurations.
const SWAP_SYMMETRY_TOL: f64 = 1e-9;

/// How the parametric gain is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GainMode {
    /// No amplification, the bare two-photon N00N state.
    FixedZero,
    /// Gain maximizing `B` at each loss setting.
    Optimized,
}

/// Where the amplifier sits relative to the lossy channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scenario {
    /// Amplify at the source, then transmit and detect.
    #[default]
    AmplifyAtSource,
    /// Transmit the bare N00N state, then amplify at each receiver before
    /// detection.
    AmplifyAtReceivers,
}

/// Knobs of the threshold, gain and boundary searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchPolicy {
    /// Photon-count thresholds `0..=n0_max` are scanned exhaustively.
    pub n0_max: usize,
    pub x0_lo: f64,
    pub x0_hi: f64,
    pub x0_step: f64,
    /// Golden-section tolerance on `x0` after the grid scan.
    pub x0_tol: f64,
    pub zeta_lo: f64,
    pub zeta_hi: f64,
    /// Coarse gain grid spacing before golden-section refinement.
    pub zeta_scan_step: f64,
    pub zeta_tol: f64,
    /// Absolute tolerance of boundary bisections.
    pub bisect_tol: f64,
    pub bisect_max_iter: usize,
}

impl Default for SearchPolicy {
    fn default() -> Self {
        Self {
            n0_max: 4,
            x0_lo: 0.01,
            x0_hi: 3.0,
            x0_step: 0.01,
            x0_tol: 1e-5,
            zeta_lo: 0.0,
            zeta_hi: 0.6,
            zeta_scan_step: 0.05,
            zeta_tol: 1e-4,
            bisect_tol: 1e-3,
            bisect_max_iter: 40,
        }
    }
}

impl SearchPolicy {
    fn x0_grid(&self) -> Vec<f64> {
        let count = math::round((self.x0_hi - self.x0_lo) / self.x0_step) as usize;
        (0..=count).map(|i| self.x0_lo + self.x0_step * i as f64).collect()
    }
}

/// Parameters a [`BellResult`] was computed at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellSettings {
    pub zeta: f64,
    pub n0: usize,
    pub x0: f64,
    pub loss: LossParams,
}

/// CHSH value with its four correlation components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellResult {
    pub b_value: f64,
    pub e_xx: f64,
    pub e_xn: f64,
    pub e_nx: f64,
    pub e_nn: f64,
    pub settings: BellSettings,
}

impl BellResult {
    fn from_components(e_xx: f64, e_xn: f64, e_nx: f64, e_nn: f64, settings: BellSettings) -> Self {
        Self { b_value: e_xx + e_xn + e_nx - e_nn, e_xx, e_xn, e_nx, e_nn, settings }
    }

    /// `E_XX + 2 E_XN − E_NN`, equal to `b_value` when the configuration is
    /// symmetric under exchanging the observers.
    pub fn symmetric_form(&self) -> f64 {
        self.e_xx + 2.0 * self.e_xn - self.e_nn
    }

    pub fn violates(&self) -> bool {
        self.b_value > CLASSICAL_BOUND
    }
}

/// One point of a gain sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub zeta: f64,
    pub n_tot_mean: f64,
    pub best: BellResult,
}

impl SweepPoint {
    pub fn b_opt(&self) -> f64 {
        self.best.b_value
    }

    pub fn n0_opt(&self) -> usize {
        self.best.settings.n0
    }

    pub fn x0_opt(&self) -> f64 {
        self.best.settings.x0
    }
}

/// Optimized `B` along a strictly increasing gain grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSeries {
    pub points: Vec<SweepPoint>,
}

/// `η_N` below which the violation is lost, at one transmittance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub t: f64,
    /// `None` when there is no violation even with perfect counting detectors.
    pub eta_n_min: Option<f64>,
}

/// Violation boundary in the `(t, η_N)` plane at fixed homodyne efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub points: Vec<BoundaryPoint>,
    pub eta_x: f64,
    pub gain_mode: GainMode,
}

/// The four lossy states entering the correlations, one per measurement pair.
#[derive(Debug, Clone)]
pub struct CorrelationStates {
    pub xx: FactorizedDensity,
    pub xn: FactorizedDensity,
    pub nx: FactorizedDensity,
    pub nn: FactorizedDensity,
    pub gain: Gain,
    pub loss: LossParams,
}

impl CorrelationStates {
    fn pairs() -> [(MeasurementKind, MeasurementKind); 4] {
        use MeasurementKind::*;
        [(X, X), (X, N), (N, X), (N, N)]
    }

    /// Amplified N00N state with detection losses folded into the channels.
    pub fn amplify_at_source(gain: Gain, loss: LossParams, cutoff: FockCutoff) -> Result<Self> {
        let base = ProductFormDensity::amplified_noon(gain, cutoff)?.to_factorized();
        let [xx, xn, nx, nn] = Self::pairs().map(|(a, b)| {
            let (la, lb) = channels::loss_for_measurement(loss, a, b);
            base.damp(la, lb)
        });
        Ok(Self { xx: xx?, xn: xn?, nx: nx?, nn: nn?, gain, loss })
    }

    /// Bare N00N state sent through the channels, amplified at the receivers,
    /// then detected with the given efficiencies.
    pub fn amplify_at_receivers(gain: Gain, loss: LossParams, cutoff: FockCutoff) -> Result<Self> {
        let squeeze = fockspace::squeeze_matrix(gain, cutoff)?;
        let received =
            channels::damp_then_amplify_factorized(&TwoModePureState::bare_noon(cutoff), loss.t, &squeeze)?;
        let detector_loss = |kind| match kind {
            MeasurementKind::N => 1.0 - loss.eta_n,
            MeasurementKind::X => 1.0 - loss.eta_x,
        };
        let [xx, xn, nx, nn] = Self::pairs().map(|(a, b)| received.damp(detector_loss(a), detector_loss(b)));
        Ok(Self { xx: xx?, xn: xn?, nx: nx?, nn: nn?, gain, loss })
    }

    pub fn build(scenario: Scenario, gain: Gain, loss: LossParams, cutoff: FockCutoff) -> Result<Self> {
        match scenario {
            Scenario::AmplifyAtSource => Self::amplify_at_source(gain, loss, cutoff),
            Scenario::AmplifyAtReceivers => Self::amplify_at_receivers(gain, loss, cutoff),
        }
    }

    /// Correlations at one threshold pair.
    pub fn evaluate(&self, q: &QTable, n0: usize) -> BellResult {
        let x = q.x_observable();
        let n = n_observable(q.dim(), n0);
        let e_xx = self.xx.expectation(&x, &x);
        let e_xn = self.xn.expectation(&x, &n);
        let e_nx = self.nx.expectation(&n, &x);
        let e_nn = self.nn.expectation(&n, &n);
        let settings = BellSettings { zeta: self.gain.zeta(), n0, x0: q.x0, loss: self.loss };
        BellResult::from_components(e_xx, e_xn, e_nx, e_nn, settings)
    }
}

/// Per-`x0` traces reused across every `n0`.
struct XTraces {
    xx: f64,
    xn_a: FactorTracesHalf,
    nx_b: FactorTracesHalf,
}

/// Traces of one side of a factorized density against an observable.
struct FactorTracesHalf(Vec<f64>);

fn side_traces(rho: &FactorizedDensity, obs: &Matrix, side_a: bool) -> FactorTracesHalf {
    FactorTracesHalf(
        rho.terms
            .iter()
            .map(|t| if side_a { t.a.trace_product(obs) } else { t.b.trace_product(obs) })
            .collect(),
    )
}

fn combine(rho: &FactorizedDensity, a: &FactorTracesHalf, b: &FactorTracesHalf) -> f64 {
    rho.terms.iter().zip(&a.0).zip(&b.0).map(|((t, x), y)| t.weight * x * y).sum()
}

/// Evaluation context for one cutoff and search policy.
#[derive(Debug, Clone)]
pub struct BellEvaluator {
    cutoff: FockCutoff,
    policy: SearchPolicy,
    builder: QTableBuilder,
    grid: Vec<QTable>,
}

impl BellEvaluator {
    pub fn new(cutoff: FockCutoff, policy: SearchPolicy) -> Result<Self> {
        if !(policy.x0_lo > 0.0 && policy.x0_hi > policy.x0_lo && policy.x0_step > 0.0) {
            return Err(Error::Domain("x0 search range must be a non-empty subset of (0, inf)"));
        }
        if !(policy.zeta_lo >= 0.0 && policy.zeta_hi >= policy.zeta_lo) {
            return Err(Error::Domain("gain search range must satisfy 0 <= lo <= hi"));
        }
        let builder = QTableBuilder::new(cutoff.nmax());
        let grid = policy.x0_grid().into_iter().map(|x0| builder.table(x0)).collect();
        Ok(Self { cutoff, policy, builder, grid })
    }

    pub fn with_default_policy(cutoff: FockCutoff) -> Result<Self> {
        Self::new(cutoff, SearchPolicy::default())
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn policy(&self) -> &SearchPolicy {
        &self.policy
    }

    pub fn q_table(&self, x0: f64) -> QTable {
        self.builder.table(x0)
    }

    /// `B` at fixed gain, thresholds and losses.
    pub fn bell_value(&self, scenario: Scenario, gain: Gain, thresholds: Thresholds, loss: LossParams) -> Result<BellResult> {
        if thresholds.n0 > self.cutoff.nmax() {
            return Err(Error::Domain("n0 exceeds the Fock cutoff"));
        }
        let states = CorrelationStates::build(scenario, gain, loss, self.cutoff)?;
        let result = states.evaluate(&self.builder.table(thresholds.x0), thresholds.n0);
        debug_assert!(
            scenario != Scenario::AmplifyAtSource || math::abs(result.e_xn - result.e_nx) < SWAP_SYMMETRY_TOL,
            "swap symmetry broken: {} vs {}",
            result.e_xn,
            result.e_nx
        );
        Ok(result)
    }

    /// Maximizes `B` over `n0 ∈ 0..=n0_max` and `x0` at fixed gain.
    ///
    /// `x0` is scanned on the policy grid for every `n0`; the best grid cell
    /// overall is then refined by golden section over its two neighbours.
    pub fn optimize_thresholds(&self, scenario: Scenario, gain: Gain, loss: LossParams) -> Result<BellResult> {
        let states = CorrelationStates::build(scenario, gain, loss, self.cutoff)?;
        Ok(self.optimize_prepared(&states))
    }

    fn optimize_prepared(&self, states: &CorrelationStates) -> BellResult {
        let d = self.cutoff.dim();
        let n0_max = self.policy.n0_max.min(self.cutoff.nmax());
        let n_obs: Vec<Matrix> = (0..=n0_max).map(|n0| n_observable(d, n0)).collect();
        let nn: Vec<f64> = n_obs.iter().map(|n| states.nn.expectation(n, n)).collect();
        let xn_b: Vec<FactorTracesHalf> = n_obs.iter().map(|n| side_traces(&states.xn, n, false)).collect();
        let nx_a: Vec<FactorTracesHalf> = n_obs.iter().map(|n| side_traces(&states.nx, n, true)).collect();

        let x_traces = |q: &QTable| {
            let x = q.x_observable();
            XTraces {
                xx: FactorTraces::new(&states.xx, &x, &x).value(),
                xn_a: side_traces(&states.xn, &x, true),
                nx_b: side_traces(&states.nx, &x, false),
            }
        };
        let value = |xt: &XTraces, n0: usize| {
            xt.xx + combine(&states.xn, &xt.xn_a, &xn_b[n0]) + combine(&states.nx, &nx_a[n0], &xt.nx_b) - nn[n0]
        };

        let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
        for (i, q) in self.grid.iter().enumerate() {
            let xt = x_traces(q);
            for n0 in 0..=n0_max {
                let v = value(&xt, n0);
                if v > best.0 {
                    best = (v, n0, i);
                }
            }
        }
        let (_, n0, i) = best;
        let lo = self.grid[i.saturating_sub(1)].x0;
        let hi = self.grid[(i + 1).min(self.grid.len() - 1)].x0;
        let refined = golden_section_max(
            |x0| {
                let xt = x_traces(&self.builder.table(x0));
                (value(&xt, n0), ())
            },
            lo,
            hi,
            self.policy.x0_tol,
        );
        states.evaluate(&self.builder.table(refined.x), n0)
    }

    /// Maximizes `B` over the gain as well: a coarse scan of the policy's
    /// gain range followed by golden section around the best scan point.
    pub fn optimize_gain(&self, scenario: Scenario, loss: LossParams) -> Result<BellResult> {
        let p = &self.policy;
        let eval = |zeta: f64| -> Result<BellResult> { self.optimize_thresholds(scenario, Gain::new(zeta)?, loss) };
        let steps = math::ceil((p.zeta_hi - p.zeta_lo) / p.zeta_scan_step).max(1.0) as usize;
        let scan: Vec<f64> =
            (0..=steps).map(|i| (p.zeta_lo + p.zeta_scan_step * i as f64).min(p.zeta_hi)).collect();
        let mut best: Option<(usize, BellResult)> = None;
        for (i, &z) in scan.iter().enumerate() {
            let r = eval(z)?;
            if best.as_ref().is_none_or(|(_, b)| r.b_value > b.b_value) {
                best = Some((i, r));
            }
        }
        let (i, coarse) = best.expect("scan is never empty");
        let lo = scan[i.saturating_sub(1)];
        let hi = scan[(i + 1).min(scan.len() - 1)];
        let mut failure = None;
        let refined = golden_section_max(
            |z| match eval(z) {
                Ok(r) => (r.b_value, Some(r)),
                Err(e) => {
                    failure = Some(e);
                    (f64::NEG_INFINITY, None)
                }
            },
            lo,
            hi,
            p.zeta_tol,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(match refined.payload {
            Some(r) if r.b_value >= coarse.b_value => r,
            _ => coarse,
        })
    }

    /// Best `B` for the given gain mode.
    pub fn best_bell(&self, scenario: Scenario, mode: GainMode, loss: LossParams) -> Result<BellResult> {
        match mode {
            GainMode::FixedZero => self.optimize_thresholds(scenario, Gain::zero(), loss),
            GainMode::Optimized => self.optimize_gain(scenario, loss),
        }
    }

    /// Threshold-optimized `B` at each gain of a strictly increasing grid.
    pub fn sweep_gain(&self, zeta_grid: &[f64], loss: LossParams) -> Result<SweepSeries> {
        check_increasing(zeta_grid)?;
        let points = zeta_grid.iter().map(|&z| self.sweep_point(z, loss)).collect::<Result<Vec<_>>>()?;
        Ok(SweepSeries { points })
    }

    /// One point of [`Self::sweep_gain`].
    pub fn sweep_point(&self, zeta: f64, loss: LossParams) -> Result<SweepPoint> {
        let gain = Gain::new(zeta)?;
        let n_tot_mean = fockspace::mean_total_photons(&fockspace::amplified_noon(gain, self.cutoff)?);
        let best = self.optimize_thresholds(Scenario::AmplifyAtSource, gain, loss)?;
        Ok(SweepPoint { zeta, n_tot_mean, best })
    }

    /// Largest gain in `[from, zeta_hi]` that still violates the bound,
    /// located by bisection. `from` must be a violating gain; if the bound is
    /// still violated at `zeta_hi`, `zeta_hi` is returned.
    pub fn max_violating_gain(&self, from: f64, loss: LossParams) -> Result<f64> {
        let violates = |z: f64| -> Result<bool> {
            Ok(self.optimize_thresholds(Scenario::AmplifyAtSource, Gain::new(z)?, loss)?.violates())
        };
        if !violates(from)? {
            return Err(Error::NoViolation);
        }
        if violates(self.policy.zeta_hi)? {
            return Ok(self.policy.zeta_hi);
        }
        self.bisect(|z| violates(z).map(|v| !v), from, self.policy.zeta_hi)
    }

    /// Lowest counting-detector efficiency that still violates the bound.
    pub fn min_detector_efficiency(&self, scenario: Scenario, mode: GainMode, t: f64, eta_x: f64) -> Result<f64> {
        let violates = |eta_n: f64| -> Result<bool> {
            Ok(self.best_bell(scenario, mode, LossParams::new(t, eta_n, eta_x)?)?.violates())
        };
        self.boundary(violates)
    }

    /// Lowest transmittance that still violates the bound.
    pub fn min_transmittance(&self, scenario: Scenario, mode: GainMode, eta_n: f64, eta_x: f64) -> Result<f64> {
        let violates = |t: f64| -> Result<bool> {
            Ok(self.best_bell(scenario, mode, LossParams::new(t, eta_n, eta_x)?)?.violates())
        };
        self.boundary(violates)
    }

    /// Minimal `η_N` along a transmittance grid.
    pub fn violation_boundary(&self, t_grid: &[f64], eta_x: f64, mode: GainMode) -> Result<BoundaryCurve> {
        let points = t_grid
            .iter()
            .map(|&t| self.boundary_point(t, eta_x, mode))
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundaryCurve { points, eta_x, gain_mode: mode })
    }

    /// One point of [`Self::violation_boundary`].
    pub fn boundary_point(&self, t: f64, eta_x: f64, mode: GainMode) -> Result<BoundaryPoint> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Domain("transmittance grid must lie in (0, 1]"));
        }
        match self.min_detector_efficiency(Scenario::AmplifyAtSource, mode, t, eta_x) {
            Ok(eta) => Ok(BoundaryPoint { t, eta_n_min: Some(eta) }),
            Err(Error::NoViolation) => Ok(BoundaryPoint { t, eta_n_min: None }),
            Err(e) => Err(e),
        }
    }

    /// Bisection of a monotone violation predicate on `[0, 1]`.
    fn boundary(&self, violates: impl Fn(f64) -> Result<bool>) -> Result<f64> {
        if !violates(1.0)? {
            return Err(Error::NoViolation);
        }
        if violates(0.0)? {
            return Ok(0.0);
        }
        self.bisect(violates, 0.0, 1.0)
    }

    fn bisect(&self, holds: impl Fn(f64) -> Result<bool>, lo: f64, hi: f64) -> Result<f64> {
        let mut failure = None;
        let x = bisect_predicate(
            |x| match holds(x) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    true
                }
            },
            lo,
            hi,
            self.policy.bisect_tol,
            self.policy.bisect_max_iter,
        );
        match failure {
            Some(e) => Err(e),
            None => Ok(x),
        }
    }
}

fn check_increasing(grid: &[f64]) -> Result<()> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("gain grid must be strictly increasing"));
    }
    Ok(())
}

/// `B` at one setting, building a throwaway evaluator context.
pub fn bell_value(gain: Gain, thresholds: Thresholds, loss: LossParams, cutoff: FockCutoff) -> Result<BellResult> {
    let builder = QTableBuilder::new(cutoff.nmax());
    if thresholds.n0 > cutoff.nmax() {
        return Err(Error::Domain("n0 exceeds the Fock cutoff"));
    }
    let states = CorrelationStates::amplify_at_source(gain, loss, cutoff)?;
    Ok(states.evaluate(&builder.table(thresholds.x0), thresholds.n0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evaluator(n: usize) -> BellEvaluator {
        BellEvaluator::with_default_policy(FockCutoff::new(n).unwrap()).unwrap()
    }

    #[test]
    fn components_sum_to_b() {
        let r = bell_value(
            Gain::new(0.2).unwrap(),
            Thresholds::new(0, 0.5).unwrap(),
            LossParams::new(0.9, 0.8, 0.95).unwrap(),
            FockCutoff::new(20).unwrap(),
        )
        .unwrap();
        assert!((r.b_value - (r.e_xx + r.e_xn + r.e_nx - r.e_nn)).abs() < 1e-12);
        assert!((r.e_xn - r.e_nx).abs() < 1e-9);
        assert!((r.symmetric_form() - r.b_value).abs() < 1e-9);
    }

    #[test]
    fn total_loss_is_local() {
        let r = bell_value(
            Gain::new(0.3).unwrap(),
            Thresholds::new(0, 0.4).unwrap(),
            LossParams::new(0.0, 1.0, 1.0).unwrap(),
            FockCutoff::new(24).unwrap(),
        )
        .unwrap();
        assert!((r.e_nn - 1.0).abs() < 1e-12);
        // Vacuum: E_XX = (1 − 2 Q00)², E_XN = 1 − 2 Q00.
        let q00 = libm::erf(core::f64::consts::SQRT_2 * 0.4);
        assert!((r.e_xx - (1.0 - 2.0 * q00).powi(2)).abs() < 1e-12);
        assert!((r.e_xn - (1.0 - 2.0 * q00)).abs() < 1e-12);
        assert!(r.b_value <= 2.0);
    }

    #[test]
    fn zero_gain_optimum() {
        let ev = evaluator(12);
        let r = ev.optimize_thresholds(Scenario::AmplifyAtSource, Gain::zero(), LossParams::lossless()).unwrap();
        assert_eq!(r.settings.n0, 0);
        assert!((r.b_value - 2.250).abs() < 0.005);
    }

    #[test]
    fn unsorted_grid_rejected() {
        let ev = evaluator(6);
        assert!(ev.sweep_gain(&[0.2, 0.1], LossParams::lossless()).is_err());
        assert!(ev.sweep_gain(&[0.1, 0.1], LossParams::lossless()).is_err());
    }

    #[test]
    fn dead_homodyne_arm_has_no_violation() {
        let ev = evaluator(10);
        let err = ev.min_detector_efficiency(Scenario::AmplifyAtSource, GainMode::FixedZero, 1.0, 0.0);
        assert_eq!(err, Err(Error::NoViolation));
    }

    #[test]
    fn bad_policy_rejected() {
        let p = SearchPolicy { x0_lo: 0.0, ..SearchPolicy::default() };
        assert!(BellEvaluator::new(FockCutoff::new(6).unwrap(), p).is_err());
    }
}
