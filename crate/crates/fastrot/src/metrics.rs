//! Evaluation measures and experiment harnesses: the approximation-error
//! surface ||D|| over (τ₁, τ₂) grids, and the RMS of off-diagonal norms
//! across randomized trials versus sweep count.

use crate::fixedpoint::OverflowCounter;
use crate::matrix::FixedMatrix;
use crate::oracle;
use crate::sweep::{
    self, diagonalizing_rotation_f64, fast_matrix_f64, AlgorithmVariant, Arithmetic,
    DecomposeConfig,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Matrix-shape coordinates. `tau2_inv` stores 1/τ₂ so symmetric matrices
/// sit at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauPoint {
    pub tau1: f64,
    pub tau2_inv: f64,
}

/// Frobenius norm of the off-diagonal part, accumulated in exact integers.
pub fn off_diag_norm(m: &FixedMatrix) -> f64 {
    let n = m.rows();
    let mut sum: u128 = 0;
    for i in 0..n {
        for j in 0..m.cols() {
            if i != j {
                let r = m.raw(i, j) as i128;
                sum += (r * r) as u128;
            }
        }
    }
    (sum as f64).sqrt() * m.format().ulp()
}

/// Off-diagonal norm ratio after/before one rotation application.
/// The input must have a nonzero off-diagonal norm.
pub fn approx_error(before: &FixedMatrix, after: &FixedMatrix) -> f64 {
    let b = off_diag_norm(before);
    assert!(b > 0.0, "approx_error needs a nonzero starting off-diagonal");
    off_diag_norm(after) / b
}

/// Shape coordinates of a 2x2 block; `None` when a denominator makes them
/// non-finite (such points are excluded from grids rather than thrown).
pub fn tau_of(m: &FixedMatrix) -> Option<TauPoint> {
    assert!(m.rows() == 2 && m.cols() == 2);
    let (a, b, c, d) = (
        m.raw(0, 0) as f64,
        m.raw(0, 1) as f64,
        m.raw(1, 0) as f64,
        m.raw(1, 1) as f64,
    );
    if b + c == 0.0 || d + a == 0.0 {
        return None;
    }
    Some(TauPoint {
        tau1: (d - a) / (b + c),
        tau2_inv: (b - c) / (d + a),
    })
}

/// Grid layout for the ||D|| surface. Points sit at cell midpoints, so the
/// degenerate τ = 0 line is never sampled exactly.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub tau1_min: f64,
    pub tau1_max: f64,
    pub tau1_points: usize,
    pub tau2_inv_min: f64,
    pub tau2_inv_max: f64,
    pub tau2_inv_points: usize,
}

impl GridSpec {
    /// The 1-D symmetric slice: tau2_inv pinned to zero.
    pub fn symmetric(tau1_min: f64, tau1_max: f64, points: usize) -> Self {
        Self {
            tau1_min,
            tau1_max,
            tau1_points: points,
            tau2_inv_min: 0.0,
            tau2_inv_max: 0.0,
            tau2_inv_points: 1,
        }
    }

    fn axis(min: f64, max: f64, points: usize, i: usize) -> f64 {
        if points == 1 {
            (min + max) / 2.0
        } else {
            min + (i as f64 + 0.5) * (max - min) / points as f64
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GridRow {
    pub tau1: f64,
    pub tau2_inv: f64,
    /// ||D|| at this point; `None` when the synthesized block degenerates.
    pub d: Option<f64>,
}

/// Builds a 2x2 block realizing the requested shape coordinates:
/// a = 1−τ₁, d = 1+τ₁, b = 1+τ₂⁻¹, c = 1−τ₂⁻¹, rescaled by a power of two
/// into the upper half of the input range.
fn synthesize(p: TauPoint) -> [f64; 4] {
    let vals = [
        1.0 - p.tau1,
        1.0 + p.tau2_inv,
        1.0 - p.tau2_inv,
        1.0 + p.tau1,
    ];
    let max = vals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let scale = (2.0f64).powi((3.0 / max).log2().floor() as i32);
    [
        vals[0] * scale,
        vals[1] * scale,
        vals[2] * scale,
        vals[3] * scale,
    ]
}

fn mat2_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn off2(m: [[f64; 2]; 2]) -> f64 {
    (m[0][1] * m[0][1] + m[1][0] * m[1][0]).sqrt()
}

/// One iteration of the chosen variant on a quantized block, applied with
/// exact coefficient values so the surface measures angle selection, not
/// datapath truncation. Returns ||D||.
fn one_iteration_d(block: &FixedMatrix, cfg: &DecomposeConfig) -> Option<f64> {
    let vals = block.to_values();
    let m0 = [[vals[0], vals[1]], [vals[2], vals[3]]];
    let before = off2(m0);
    if before == 0.0 {
        return None;
    }
    let mut ev = OverflowCounter::new();
    let after = match cfg.variant {
        AlgorithmVariant::NsvdExact => {
            let (th, bt) = oracle::exact_fhsvd(m0);
            let rt = [[th.cos, -th.sin], [th.sin, th.cos]];
            let rb = [[bt.cos, bt.sin], [-bt.sin, bt.cos]];
            mat2_mul(mat2_mul(rt, m0), rb)
        }
        AlgorithmVariant::Erfhsvd | AlgorithmVariant::Erfhsvd2 => {
            let kind = if cfg.variant == AlgorithmVariant::Erfhsvd {
                crate::angles::DirectKind::Erfhsvd
            } else {
                crate::angles::DirectKind::Erfhsvd2
            };
            let pair = crate::angles::direct_rotations(block, kind, &mut ev);
            let rt = fast_matrix_f64(&pair.theta, true);
            let rb = fast_matrix_f64(&pair.big_theta, false);
            mat2_mul(mat2_mul(rt, m0), rb)
        }
        AlgorithmVariant::Frnsvd | AlgorithmVariant::Ernsvd => {
            let mode = cfg.variant.boundary_mode();
            let rho = crate::angles::symmetrizing_rotation(block, mode, &mut ev);
            let b1 = mat2_mul(fast_matrix_f64(&rho, false), m0);
            // identity symmetrizer keeps the diagonalizer on the exact
            // integer path; otherwise classify the rotated values
            let phi = if rho.zero_tangent() && !rho.swap() {
                crate::angles::diagonalizing_rotation(block, mode, &mut ev)
            } else {
                diagonalizing_rotation_f64(b1[0][0], b1[0][1], b1[1][0], b1[1][1], mode)
            };
            mat2_mul(
                mat2_mul(fast_matrix_f64(&phi, true), b1),
                fast_matrix_f64(&phi, false),
            )
        }
    };
    Some(off2(after) / before)
}

/// ||D|| over the grid for one variant. Synthesized blocks are quantized to
/// the input format before angle selection.
pub fn grid_sweep(spec: &GridSpec, cfg: &DecomposeConfig) -> Vec<GridRow> {
    let mut rows = Vec::with_capacity(spec.tau1_points * spec.tau2_inv_points);
    for i2 in 0..spec.tau2_inv_points {
        let t2 = GridSpec::axis(spec.tau2_inv_min, spec.tau2_inv_max, spec.tau2_inv_points, i2);
        for i1 in 0..spec.tau1_points {
            let t1 = GridSpec::axis(spec.tau1_min, spec.tau1_max, spec.tau1_points, i1);
            let vals = synthesize(TauPoint {
                tau1: t1,
                tau2_inv: t2,
            });
            let mut ev = OverflowCounter::new();
            let block = FixedMatrix::quantize(2, 2, &vals, cfg.input_format, &mut ev);
            let d = if ev.count() > 0 {
                None
            } else {
                one_iteration_d(&block, cfg)
            };
            rows.push(GridRow {
                tau1: t1,
                tau2_inv: t2,
                d,
            });
        }
    }
    rows
}

/// Per-sweep RMS (across trials) of the off-diagonal Frobenius norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCurve {
    pub sweeps: Vec<u32>,
    pub rms_odn: Vec<f64>,
}

impl ConvergenceCurve {
    /// First sweep index where the curve drops to `ratio` of its start,
    /// if it ever does.
    pub fn sweeps_to_ratio(&self, ratio: f64) -> Option<u32> {
        let target = self.rms_odn[0] * ratio;
        self.rms_odn
            .iter()
            .position(|&v| v <= target)
            .map(|i| self.sweeps[i])
    }
}

/// RMS across per-trial traces at each sweep index.
pub fn rms_curve(traces: &[Vec<f64>]) -> ConvergenceCurve {
    assert!(!traces.is_empty());
    let len = traces[0].len();
    assert!(traces.iter().all(|t| t.len() == len));
    let rms_odn = (0..len)
        .map(|k| {
            let sum: f64 = traces.iter().map(|t| t[k] * t[k]).sum();
            (sum / traces.len() as f64).sqrt()
        })
        .collect();
    ConvergenceCurve {
        sweeps: (0..len as u32).collect(),
        rms_odn,
    }
}

/// Draws `n*n` standard-normal values from the stream.
pub fn sample_normal_matrix(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n * n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Convergence-speed experiment: `trials` standard-normal matrices from one
/// seeded stream, each run for the full sweep budget (no early exit), RMS
/// of the off-diagonal norms per sweep.
///
/// Fixed-point runs quantize each matrix to the input format first; float
/// runs consume the raw samples (the unquantized reference).
pub fn rms_odn_experiment(
    n: usize,
    trials: u32,
    sweeps: u32,
    seed: u64,
    cfg: &DecomposeConfig,
) -> ConvergenceCurve {
    assert!(trials >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut run_cfg = cfg.clone();
    run_cfg.max_sweeps = sweeps;
    let mut traces = Vec::with_capacity(trials as usize);
    for _ in 0..trials {
        let vals = sample_normal_matrix(&mut rng, n);
        let trace = if run_cfg.arithmetic == Arithmetic::Float
            || run_cfg.variant == AlgorithmVariant::NsvdExact
        {
            sweep::off_diagonal_trace_f64(&vals, n, &run_cfg)
        } else {
            let mut ev = OverflowCounter::new();
            let a = FixedMatrix::quantize(n, n, &vals, run_cfg.input_format, &mut ev);
            let (trace, _) = sweep::off_diagonal_trace(&a, &run_cfg);
            trace
        };
        traces.push(trace);
    }
    rms_curve(&traces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::FixedFormat;

    fn fmt() -> FixedFormat {
        FixedFormat::new(16, 12)
    }

    #[test]
    fn off_diag_norm_examples() {
        let m = FixedMatrix::from2x2([7 << 12, 3 << 12, 4 << 12, -2 << 12], fmt());
        assert_eq!(off_diag_norm(&m), 5.0);
        let diag = FixedMatrix::from2x2([1 << 12, 0, 0, 2 << 12], fmt());
        assert_eq!(off_diag_norm(&diag), 0.0);
    }

    #[test]
    fn off_diag_norm_matches_double_loop_oracle() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 70;
        let raws: Vec<i64> = (0..n * n).map(|_| rng.gen_range(-(1 << 14)..(1 << 14))).collect();
        let m = FixedMatrix::from_raws(n, n, raws.clone(), fmt());
        let mut sum = 0u128;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let r = raws[i * n + j] as i128;
                    sum += (r * r) as u128;
                }
            }
        }
        let want = (sum as f64).sqrt() * fmt().ulp();
        assert_eq!(off_diag_norm(&m), want);
    }

    #[test]
    fn approx_error_examples() {
        let before = FixedMatrix::from2x2([1 << 12, 1 << 10, 1 << 10, 1 << 12], fmt());
        let diag = FixedMatrix::from2x2([1 << 12, 0, 0, 1 << 12], fmt());
        assert_eq!(approx_error(&before, &diag), 0.0);
        assert_eq!(approx_error(&before, &before), 1.0);
    }

    #[test]
    fn tau_examples() {
        let one = 1i64 << 12;
        // symmetric: tau2_inv = 0
        let m = FixedMatrix::from2x2([one, 3 * one, 3 * one, 2 * one], fmt());
        let t = tau_of(&m).unwrap();
        assert_eq!(t.tau2_inv, 0.0);
        assert!((t.tau1 - 1.0 / 6.0).abs() < 1e-12);

        let m = FixedMatrix::from2x2([one, one, one, one], fmt());
        let t = tau_of(&m).unwrap();
        assert_eq!((t.tau1, t.tau2_inv), (0.0, 0.0));

        // [[1,3],[1,2]]: tau1 = 1/4, tau2 = (d+a)/(b−c) = 3/2
        let m = FixedMatrix::from2x2([one, 3 * one, one, 2 * one], fmt());
        let t = tau_of(&m).unwrap();
        assert_eq!(t.tau1, 0.25);
        assert!((t.tau2_inv - 2.0 / 3.0).abs() < 1e-12);

        // degenerate denominator is flagged
        let m = FixedMatrix::from2x2([one, one, -one, 2 * one], fmt());
        assert!(tau_of(&m).is_none());
    }

    #[test]
    fn synthesize_realizes_requested_point() {
        for &(t1, t2i) in &[(0.3, 0.0), (-2.5, 0.7), (7.9, -4.2)] {
            let v = synthesize(TauPoint {
                tau1: t1,
                tau2_inv: t2i,
            });
            let (a, b, c, d) = (v[0], v[1], v[2], v[3]);
            assert!(((d - a) / (b + c) - t1).abs() < 1e-12);
            assert!(((b - c) / (d + a) - t2i).abs() < 1e-12);
            let max = v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            assert!(max < 8.0, "stays inside the 16-bit input range");
        }
    }

    #[test]
    fn exact_variant_grid_is_flat_zero() {
        let spec = GridSpec::symmetric(-5.0, 5.0, 50);
        let cfg = DecomposeConfig {
            variant: AlgorithmVariant::NsvdExact,
            ..DecomposeConfig::default()
        };
        for row in grid_sweep(&spec, &cfg) {
            let d = row.d.expect("grid point degenerate");
            assert!(d < 1e-12, "||D|| = {d} at tau1 = {}", row.tau1);
        }
    }

    #[test]
    fn symmetric_grid_respects_error_bound() {
        let spec = GridSpec::symmetric(-8.0, 8.0, 400);
        let cfg = DecomposeConfig {
            variant: AlgorithmVariant::Frnsvd,
            ..DecomposeConfig::default()
        };
        let bound = 7.0 / 12.0 + (2.0f64).powi(-12);
        for row in grid_sweep(&spec, &cfg) {
            let d = row.d.expect("grid point degenerate");
            assert!(d <= bound, "||D|| = {d} at tau1 = {}", row.tau1);
        }
    }

    #[test]
    fn rms_curve_of_flat_traces() {
        let traces = vec![vec![0.0; 5], vec![0.0; 5]];
        let curve = rms_curve(&traces);
        assert_eq!(curve.sweeps, vec![0, 1, 2, 3, 4]);
        assert!(curve.rms_odn.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn experiment_is_deterministic() {
        let cfg = DecomposeConfig::default();
        let a = rms_odn_experiment(6, 3, 4, 42, &cfg);
        let b = rms_odn_experiment(6, 3, 4, 42, &cfg);
        assert_eq!(a, b);
        let c = rms_odn_experiment(6, 3, 4, 43, &cfg);
        assert_ne!(a, c);
    }
}
