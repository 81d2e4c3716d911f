#![allow(dead_code)]

use hybrid_chsh_core::TwoModeDensity;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random real density `Σ p_i |v_i⟩⟨v_i|` of the given rank.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> TwoModeDensity {
    let n = dim * dim;
    let weights: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = TwoModeDensity::zeros(dim);
    for w in weights {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm: f64 = v.iter().map(|x| x * x).sum();
        let s = w / total / norm;
        for i in 0..n {
            for j in 0..n {
                let (m, mb) = (i / dim, i % dim);
                let (k, kb) = (j / dim, j % dim);
                rho.add(m, mb, k, kb, s * v[i] * v[j]);
            }
        }
    }
    rho
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi sweeps.
pub fn min_eigenvalue(rho: &TwoModeDensity) -> f64 {
    let n = rho.dim() * rho.dim();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| rho.to_matrix().row(i).to_vec()).collect();
    for _ in 0..60 {
        let off: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).fold(f64::INFINITY, f64::min)
}
