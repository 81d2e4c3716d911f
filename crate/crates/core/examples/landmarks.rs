//! Prints the headline numbers: optimized CHSH values and loss thresholds.

use std::time::Instant;

use hybrid_chsh_core::{BellEvaluator, FockCutoff, Gain, GainMode, LossParams, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let nmax = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(40);
    let start = Instant::now();
    let ev = BellEvaluator::with_default_policy(FockCutoff::new(nmax)?)?;
    println!("evaluator ready in {:?}", start.elapsed());
    let lossless = LossParams::lossless();
    let src = Scenario::AmplifyAtSource;

    let zero = ev.optimize_thresholds(src, Gain::zero(), lossless)?;
    println!("zeta=0: {zero:?}  ({:?})", start.elapsed());
    let best = ev.optimize_gain(src, lossless)?;
    println!("optimized: {best:?}  ({:?})", start.elapsed());
    let edge = ev.max_violating_gain(best.settings.zeta, lossless)?;
    println!("max violating gain {edge:.5}  ({:?})", start.elapsed());

    for (name, mode) in [("optimized", GainMode::Optimized), ("zeta=0", GainMode::FixedZero)] {
        let eta = ev.min_detector_efficiency(src, mode, 1.0, 1.0)?;
        println!("{name}: eta_n_min {eta:.5}  ({:?})", start.elapsed());
        let t = ev.min_transmittance(src, mode, 1.0, 1.0)?;
        println!("{name}: t_min {t:.5}  ({:?})", start.elapsed());
    }
    let t = ev.min_transmittance(Scenario::AmplifyAtReceivers, GainMode::Optimized, 1.0, 1.0)?;
    println!("amplify at receivers: t_min {t:.5}  ({:?})", start.elapsed());
    let cur = ev.optimize_gain(src, LossParams::new(0.95, 0.79, 0.90)?)?;
    println!("t=0.95 eta_n=0.79 eta_x=0.90: {cur:?}");
    let t = ev.min_transmittance(src, GainMode::Optimized, 0.79, 0.90)?;
    println!("current technology t_min {t:.5}  ({:?})", start.elapsed());
    Ok(())
}
