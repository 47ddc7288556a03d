//! Full decompositions: the 2x2 kernel iterated to convergence, the
//! round-robin sweep schedule for n x n, and result normalization.
//!
//! One decomposition is strictly sequential (pair order is part of the
//! bit-exact contract); independent decompositions are free to run in
//! parallel. Left rotations are applied before right rotations within a
//! pair, and rounds run in schedule order.

use crate::angles::{
    diagonalizing_rotation_raw, direct_rotations_raw, symmetrizing_rotation_raw, BoundaryMode,
    DirectKind, FastRotation, RotationPair,
};
use crate::fixedpoint::{FixedFormat, OverflowCounter, Sign};
use crate::matrix::FixedMatrix;
use crate::oracle;
use crate::rotate::{entry_table, rotate_element, ScaleConfig};

/// Which rotation estimator drives the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmVariant {
    /// Exact oracle rotations (always floating point).
    NsvdExact,
    /// Symmetrize + diagonalize, full boundary conditions.
    Frnsvd,
    /// Symmetrize + diagonalize, relaxed boundaries, symmetrizer floor 2.
    Ernsvd,
    /// Direct estimator with the over/underestimate flags.
    Erfhsvd,
    /// Direct estimator without the flags.
    Erfhsvd2,
}

impl AlgorithmVariant {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "nsvd" => Self::NsvdExact,
            "frnsvd" => Self::Frnsvd,
            "ernsvd" => Self::Ernsvd,
            "erfhsvd" => Self::Erfhsvd,
            "erfhsvd2" => Self::Erfhsvd2,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::NsvdExact => "nsvd",
            Self::Frnsvd => "frnsvd",
            Self::Ernsvd => "ernsvd",
            Self::Erfhsvd => "erfhsvd",
            Self::Erfhsvd2 => "erfhsvd2",
        }
    }

    /// Boundary family of the symmetrize/diagonalize variants.
    pub fn boundary_mode(&self) -> BoundaryMode {
        match self {
            Self::Frnsvd => BoundaryMode::Full,
            _ => BoundaryMode::Relaxed,
        }
    }
}

/// Number representation the engine runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arithmetic {
    Fixed,
    Float,
}

#[derive(Debug, Clone)]
pub struct DecomposeConfig {
    pub variant: AlgorithmVariant,
    pub arithmetic: Arithmetic,
    pub input_format: FixedFormat,
    pub internal_format: FixedFormat,
    pub scale: ScaleConfig,
    pub max_sweeps: u32,
    /// Relative off-diagonal ratio for early exit; zero disables it.
    pub tol: f64,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        Self {
            variant: AlgorithmVariant::Erfhsvd,
            arithmetic: Arithmetic::Fixed,
            input_format: FixedFormat::new(16, 12),
            internal_format: FixedFormat::new(32, 24),
            scale: ScaleConfig::default(),
            max_sweeps: 16,
            tol: (2.0f64).powi(-16),
        }
    }
}

/// Decomposition output. `trace[k]` is the off-diagonal Frobenius norm
/// after sweep `k` (index 0 is the starting norm).
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: FixedMatrix,
    pub sigma: FixedMatrix,
    pub v: FixedMatrix,
    pub sweeps_used: u32,
    pub trace: Vec<f64>,
    pub overflow_events: u64,
    pub converged: bool,
    pub rotations_applied: u64,
}

/// One full sweep: n−1 rounds of n/2 pairwise-disjoint index pairs that
/// together cover every unordered pair exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSchedule {
    n: usize,
    rounds: Vec<Vec<(usize, usize)>>,
}

impl SweepSchedule {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> &[Vec<(usize, usize)>] {
        &self.rounds
    }
}

/// Round-robin tournament order (0-based indices).
///
/// Slot zero stays fixed; the remaining slots advance one step around a
/// ring that snakes up the odd positions and back down the even ones,
/// reproducing the processing order of the 8x8 reference listing.
pub fn schedule(n: usize) -> SweepSchedule {
    assert!(n >= 2 && n % 2 == 0, "schedule requires even n >= 2");
    let m = n - 1;
    let ring: Vec<usize> = if m == 1 {
        vec![0]
    } else {
        // up the odd positions, across the top, back down the even ones
        let mut r = vec![0];
        r.extend((1..=m - 2).step_by(2));
        r.push(m - 1);
        let mut e = m as i64 - 3;
        while e >= 2 {
            r.push(e as usize);
            e -= 2;
        }
        r
    };
    let mut rest: Vec<usize> = (1..n).collect();
    let mut rounds = Vec::with_capacity(m);
    for _ in 0..m {
        let mut slots = Vec::with_capacity(n);
        slots.push(0);
        slots.extend(&rest);
        let pairs = (0..n / 2).map(|i| (slots[2 * i], slots[2 * i + 1])).collect();
        rounds.push(pairs);
        let old = rest.clone();
        for i in 0..ring.len() {
            rest[ring[(i + 1) % ring.len()]] = old[ring[i]];
        }
    }
    SweepSchedule { n, rounds }
}

// ── fixed-point engine ──────────────────────────────────────────────

fn is_noop(rot: &FastRotation) -> bool {
    rot.zero_tangent() && !rot.swap()
}

/// Rows p, q of `m` get the rotation from the left (optionally transposed).
fn rotate_rows(
    m: &mut FixedMatrix,
    p: usize,
    q: usize,
    rot: &FastRotation,
    transpose: bool,
    cfg: ScaleConfig,
    events: &mut OverflowCounter,
) {
    let fmt = m.format();
    let t = entry_table(rot, transpose);
    let n = m.cols();
    for j in 0..n {
        let xp = m.raw(p, j);
        let xq = m.raw(q, j);
        m.set_raw(p, j, rotate_element(xp, xq, &t[0], rot, cfg, fmt, events));
        m.set_raw(q, j, rotate_element(xp, xq, &t[1], rot, cfg, fmt, events));
    }
}

/// Columns p, q of `m` get the rotation from the right (optionally
/// transposed).
fn rotate_cols(
    m: &mut FixedMatrix,
    p: usize,
    q: usize,
    rot: &FastRotation,
    transpose: bool,
    cfg: ScaleConfig,
    events: &mut OverflowCounter,
) {
    let fmt = m.format();
    let t = entry_table(rot, transpose);
    let n = m.rows();
    for i in 0..n {
        let xp = m.raw(i, p);
        let xq = m.raw(i, q);
        let col_p = [t[0][0], t[1][0]];
        let col_q = [t[0][1], t[1][1]];
        m.set_raw(i, p, rotate_element(xp, xq, &col_p, rot, cfg, fmt, events));
        m.set_raw(i, q, rotate_element(xp, xq, &col_q, rot, cfg, fmt, events));
    }
}

struct FixedEngine {
    sigma: FixedMatrix,
    u: FixedMatrix,
    v: FixedMatrix,
    events: OverflowCounter,
    rotations: u64,
    factors: bool,
}

impl FixedEngine {
    fn new(a: FixedMatrix, factors: bool) -> Self {
        let n = a.rows();
        let fmt = a.format();
        let eye = if factors { n } else { 1 };
        Self {
            sigma: a,
            u: FixedMatrix::identity(eye, fmt),
            v: FixedMatrix::identity(eye, fmt),
            events: OverflowCounter::new(),
            rotations: 0,
            factors,
        }
    }

    fn block(&self, p: usize, q: usize) -> [i64; 4] {
        [
            self.sigma.raw(p, p),
            self.sigma.raw(p, q),
            self.sigma.raw(q, p),
            self.sigma.raw(q, q),
        ]
    }

    fn apply_pair(&mut self, p: usize, q: usize, cfg: &DecomposeConfig) {
        let fmt = self.sigma.format();
        let scale = cfg.scale;
        match cfg.variant {
            AlgorithmVariant::Erfhsvd | AlgorithmVariant::Erfhsvd2 => {
                let kind = if cfg.variant == AlgorithmVariant::Erfhsvd {
                    DirectKind::Erfhsvd
                } else {
                    DirectKind::Erfhsvd2
                };
                let [a, b, c, d] = self.block(p, q);
                let pair = direct_rotations_raw(a, b, c, d, fmt, kind, &mut self.events);
                if !is_noop(&pair.theta) {
                    rotate_rows(&mut self.sigma, p, q, &pair.theta, true, scale, &mut self.events);
                    if self.factors {
                        rotate_cols(&mut self.u, p, q, &pair.theta, false, scale, &mut self.events);
                    }
                    self.rotations += 2;
                }
                if !is_noop(&pair.big_theta) {
                    rotate_cols(&mut self.sigma, p, q, &pair.big_theta, false, scale, &mut self.events);
                    if self.factors {
                        rotate_cols(&mut self.v, p, q, &pair.big_theta, false, scale, &mut self.events);
                    }
                    self.rotations += 2;
                }
            }
            AlgorithmVariant::Frnsvd | AlgorithmVariant::Ernsvd => {
                let mode = if cfg.variant == AlgorithmVariant::Frnsvd {
                    BoundaryMode::Full
                } else {
                    BoundaryMode::Relaxed
                };
                let [a, b, c, d] = self.block(p, q);
                let rho = symmetrizing_rotation_raw(a, b, c, d, fmt, mode, &mut self.events);
                if !is_noop(&rho) {
                    rotate_rows(&mut self.sigma, p, q, &rho, false, scale, &mut self.events);
                    if self.factors {
                        rotate_cols(&mut self.u, p, q, &rho, true, scale, &mut self.events);
                    }
                    self.rotations += 2;
                }
                let [a, b, c, d] = self.block(p, q);
                let phi = diagonalizing_rotation_raw(a, b, c, d, fmt, mode, &mut self.events);
                if !is_noop(&phi) {
                    rotate_rows(&mut self.sigma, p, q, &phi, true, scale, &mut self.events);
                    rotate_cols(&mut self.sigma, p, q, &phi, false, scale, &mut self.events);
                    if self.factors {
                        rotate_cols(&mut self.u, p, q, &phi, false, scale, &mut self.events);
                        rotate_cols(&mut self.v, p, q, &phi, false, scale, &mut self.events);
                    }
                    self.rotations += 4;
                }
            }
            AlgorithmVariant::NsvdExact => unreachable!("exact rotations run in the float engine"),
        }
    }
}

// ── float engine (oracle rotations and unquantized fast rotations) ──

/// Floating-point decomposition result.
#[derive(Debug, Clone)]
pub struct FloatSvdResult {
    pub u: Vec<f64>,
    pub sigma: Vec<f64>,
    pub v: Vec<f64>,
    pub n: usize,
    pub sweeps_used: u32,
    pub trace: Vec<f64>,
    pub converged: bool,
    pub rotations_applied: u64,
}

fn exp2_f64(x: f64) -> (i32, bool) {
    if x == 0.0 {
        (0, false)
    } else {
        let b = x.abs();
        if b.is_subnormal() {
            (b.log2().floor() as i32, true)
        } else {
            (((b.to_bits() >> 52) & 0x7ff) as i32 - 1023, true)
        }
    }
}

fn pow2(e: i32) -> f64 {
    (2.0f64).powi(e)
}

/// Float mirror of the exact-integer classifier.
pub(crate) fn classify_f64(n: f64, d: f64, mode: BoundaryMode) -> (i32, bool) {
    let k = (exp2_f64(d).0 - exp2_f64(n).0).max(0);
    let (hi, lo) = match mode {
        BoundaryMode::Relaxed => (pow2(k + 1) * n, pow2(k) * n),
        BoundaryMode::Full => (
            (pow2(k + 1) - pow2(-k)) * n,
            (pow2(k) - pow2(-k + 1)) * n,
        ),
    };
    if 1.5 * d > hi {
        (k + 1, true)
    } else if 1.5 * d < lo {
        (k - 1, false)
    } else if d < pow2(k) * n {
        (k, true)
    } else {
        (k, false)
    }
}

pub(crate) fn symmetrizing_rotation_f64(a: f64, b: f64, c: f64, d: f64, mode: BoundaryMode) -> FastRotation {
    let num = b - c;
    let den = d + a;
    if num == 0.0 {
        return FastRotation::identity(false);
    }
    if den == 0.0 {
        return FastRotation::identity(true);
    }
    let (lt, _) = classify_f64(num.abs(), den.abs(), mode);
    let floor = if mode == BoundaryMode::Full { 1 } else { 2 };
    let l = (lt + 1).max(floor) as u32;
    let s = if (num > 0.0) == (den > 0.0) {
        Sign::Minus
    } else {
        Sign::Plus
    };
    FastRotation::shifted(l, s, false)
}

pub(crate) fn diagonalizing_rotation_f64(a: f64, b: f64, c: f64, d: f64, mode: BoundaryMode) -> FastRotation {
    let num = b + c;
    let den = d - a;
    if num == 0.0 {
        return FastRotation::identity(false);
    }
    if den == 0.0 {
        return FastRotation::identity(true);
    }
    let (lt, _) = classify_f64(num.abs(), den.abs(), mode);
    let l = (lt + 2).max(1) as u32;
    let s = if (num >= 0.0) == (den >= 0.0) {
        Sign::Plus
    } else {
        Sign::Minus
    };
    let swap = num >= 0.0;
    FastRotation::shifted(l, s, swap)
}

pub(crate) fn direct_rotations_f64(a: f64, b: f64, c: f64, d: f64, kind: DirectKind) -> RotationPair {
    let n1 = c + b;
    let d1 = 2.0 * (d - a);
    let n2 = c - b;
    let d2 = 2.0 * (d + a);
    let sn1 = Sign::of(if n1 >= 0.0 { 1 } else { -1 });
    let sd1 = Sign::of(if d1 >= 0.0 { 1 } else { -1 });
    let sn2 = Sign::of(if n2 >= 0.0 { 1 } else { -1 });
    let sd2 = Sign::of(if d2 >= 0.0 { 1 } else { -1 });
    let n1_zero = n1 == 0.0;
    let n2_zero = n2 == 0.0;
    let swap = !sd1.is_negative();

    if n1_zero && n2_zero {
        let id = FastRotation::identity(swap);
        return RotationPair {
            theta: id,
            big_theta: id,
        };
    }
    let classify = |num: f64, den: f64| -> (i64, bool) {
        if num == 0.0 {
            return (0, false);
        }
        let (lt, flag) = classify_f64(num.abs(), den.abs(), BoundaryMode::Relaxed);
        ((lt as i64 + 1).max(2), flag)
    };
    let (l_alpha, fb) = classify(n1, d1);
    let (l_beta, fs) = classify(n2, d2);
    let bb = match kind {
        DirectKind::Erfhsvd => (fb && fs) as i64,
        DirectKind::Erfhsvd2 => 0,
    };
    let diff = l_beta - l_alpha;
    let (mut l_big, mut l_small) = if n2_zero {
        (l_alpha, l_alpha)
    } else if n1_zero {
        (l_beta, l_beta)
    } else if diff == -1 {
        (l_beta - bb, l_alpha)
    } else if diff == 1 {
        (l_alpha - bb, l_beta)
    } else if diff == 0 {
        (l_beta - 1, 0)
    } else {
        (l_alpha.min(l_beta), l_alpha.min(l_beta))
    };
    let p1 = sd1 * sn1;
    let p2 = sd2 * sn2;
    let (mut s_big, mut s_small) = if n2_zero {
        (p1, p1)
    } else if n1_zero {
        (p2, p2.flip())
    } else {
        (p1, p1 * Sign::of(diff))
    };
    if p1 != p2 && !n1_zero && !n2_zero {
        std::mem::swap(&mut l_big, &mut l_small);
        std::mem::swap(&mut s_big, &mut s_small);
    }
    let build = |l: i64, s: Sign| {
        if l == 0 {
            FastRotation::identity(swap)
        } else {
            FastRotation::shifted(l as u32, s, swap)
        }
    };
    RotationPair {
        theta: build(l_small, s_small),
        big_theta: build(l_big, s_big),
    }
}

/// 2x2 rotation matrix of a fast rotation in f64 (exact scale factor).
pub(crate) fn fast_matrix_f64(rot: &FastRotation, transpose: bool) -> [[f64; 2]; 2] {
    let (c, s) = if rot.zero_tangent() {
        (1.0, 0.0)
    } else {
        let t = pow2(-(rot.l() as i32));
        let den = 1.0 + t * t;
        ((1.0 - t * t) / den, rot.s().value() as f64 * 2.0 * t / den)
    };
    let m = if !rot.swap() {
        [[c, s], [-s, c]]
    } else if rot.zero_tangent() {
        [[0.0, 1.0], [-1.0, 0.0]]
    } else {
        [[s, c], [c, -s]]
    };
    if transpose {
        [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
    } else {
        m
    }
}

fn rotate_rows_f64(m: &mut [f64], n: usize, p: usize, q: usize, r: [[f64; 2]; 2]) {
    for j in 0..n {
        let xp = m[p * n + j];
        let xq = m[q * n + j];
        m[p * n + j] = r[0][0] * xp + r[0][1] * xq;
        m[q * n + j] = r[1][0] * xp + r[1][1] * xq;
    }
}

fn rotate_cols_f64(m: &mut [f64], n: usize, p: usize, q: usize, r: [[f64; 2]; 2]) {
    for i in 0..n {
        let xp = m[i * n + p];
        let xq = m[i * n + q];
        m[i * n + p] = r[0][0] * xp + r[1][0] * xq;
        m[i * n + q] = r[0][1] * xp + r[1][1] * xq;
    }
}

fn off_diag_norm_f64(m: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[i * n + j] * m[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Floating-point decomposition with the same sweep structure as the
/// fixed-point engine; used for the exact-rotation variant and for
/// unquantized fast-rotation reference curves.
pub fn decompose_f64(a: &[f64], n: usize, cfg: &DecomposeConfig) -> FloatSvdResult {
    run_f64(a, n, cfg, true)
}

/// Off-diagonal norm per sweep without factor tracking or early exit.
pub fn off_diagonal_trace_f64(a: &[f64], n: usize, cfg: &DecomposeConfig) -> Vec<f64> {
    let mut c = cfg.clone();
    c.tol = 0.0;
    run_f64(a, n, &c, false).trace
}

fn run_f64(a: &[f64], n: usize, cfg: &DecomposeConfig, factors: bool) -> FloatSvdResult {
    assert_eq!(a.len(), n * n);
    let padded = n + (n % 2);
    let mut sigma = vec![0.0; padded * padded];
    for i in 0..n {
        for j in 0..n {
            sigma[i * padded + j] = a[i * n + j];
        }
    }
    let mut u = vec![0.0; padded * padded];
    let mut v = vec![0.0; padded * padded];
    for i in 0..padded {
        u[i * padded + i] = 1.0;
        v[i * padded + i] = 1.0;
    }
    let sched = schedule(padded.max(2));
    let mut trace = vec![off_diag_norm_f64(&sigma, padded)];
    let mut converged = trace[0] == 0.0;
    let mut sweeps_used = 0;
    let mut rotations = 0u64;
    for _sweep in 0..cfg.max_sweeps {
        if converged {
            break;
        }
        for round in sched.rounds() {
            for &(p, q) in round {
                if p >= n || q >= n {
                    continue; // bye against the padding index
                }
                let block = [
                    [sigma[p * padded + p], sigma[p * padded + q]],
                    [sigma[q * padded + p], sigma[q * padded + q]],
                ];
                match cfg.variant {
                    AlgorithmVariant::NsvdExact => {
                        let (th, bt) = oracle::exact_fhsvd(block);
                        oracle::apply_left_t(&mut sigma, padded, p, q, &th);
                        oracle::apply_right(&mut sigma, padded, p, q, &bt);
                        if factors {
                            oracle::apply_right(&mut u, padded, p, q, &th);
                            oracle::apply_right(&mut v, padded, p, q, &bt);
                        }
                        rotations += 4;
                    }
                    AlgorithmVariant::Erfhsvd | AlgorithmVariant::Erfhsvd2 => {
                        let kind = if cfg.variant == AlgorithmVariant::Erfhsvd {
                            DirectKind::Erfhsvd
                        } else {
                            DirectKind::Erfhsvd2
                        };
                        let pair = direct_rotations_f64(
                            block[0][0], block[0][1], block[1][0], block[1][1], kind,
                        );
                        if !is_noop(&pair.theta) {
                            rotate_rows_f64(&mut sigma, padded, p, q, fast_matrix_f64(&pair.theta, true));
                            if factors {
                                rotate_cols_f64(&mut u, padded, p, q, fast_matrix_f64(&pair.theta, false));
                            }
                            rotations += 2;
                        }
                        if !is_noop(&pair.big_theta) {
                            rotate_cols_f64(&mut sigma, padded, p, q, fast_matrix_f64(&pair.big_theta, false));
                            if factors {
                                rotate_cols_f64(&mut v, padded, p, q, fast_matrix_f64(&pair.big_theta, false));
                            }
                            rotations += 2;
                        }
                    }
                    AlgorithmVariant::Frnsvd | AlgorithmVariant::Ernsvd => {
                        let mode = if cfg.variant == AlgorithmVariant::Frnsvd {
                            BoundaryMode::Full
                        } else {
                            BoundaryMode::Relaxed
                        };
                        let rho = symmetrizing_rotation_f64(
                            block[0][0], block[0][1], block[1][0], block[1][1], mode,
                        );
                        if !is_noop(&rho) {
                            rotate_rows_f64(&mut sigma, padded, p, q, fast_matrix_f64(&rho, false));
                            if factors {
                                rotate_cols_f64(&mut u, padded, p, q, fast_matrix_f64(&rho, true));
                            }
                            rotations += 2;
                        }
                        let phi = diagonalizing_rotation_f64(
                            sigma[p * padded + p],
                            sigma[p * padded + q],
                            sigma[q * padded + p],
                            sigma[q * padded + q],
                            mode,
                        );
                        if !is_noop(&phi) {
                            rotate_rows_f64(&mut sigma, padded, p, q, fast_matrix_f64(&phi, true));
                            rotate_cols_f64(&mut sigma, padded, p, q, fast_matrix_f64(&phi, false));
                            if factors {
                                rotate_cols_f64(&mut u, padded, p, q, fast_matrix_f64(&phi, false));
                                rotate_cols_f64(&mut v, padded, p, q, fast_matrix_f64(&phi, false));
                            }
                            rotations += 4;
                        }
                    }
                }
            }
        }
        sweeps_used += 1;
        let odn = off_diag_norm_f64(&sigma, padded);
        trace.push(odn);
        if cfg.tol > 0.0 && odn <= cfg.tol * trace[0] {
            converged = true;
        }
    }
    if !factors {
        return FloatSvdResult {
            u,
            sigma,
            v,
            n,
            sweeps_used,
            trace,
            converged,
            rotations_applied: rotations,
        };
    }
    // normalize: signs into U, sort descending
    let mut diag: Vec<f64> = (0..padded).map(|i| sigma[i * padded + i]).collect();
    for j in 0..padded {
        if diag[j] < 0.0 {
            diag[j] = -diag[j];
            for i in 0..padded {
                u[i * padded + j] = -u[i * padded + j];
                sigma[j * padded + i] = -sigma[j * padded + i];
            }
        }
    }
    let mut order: Vec<usize> = (0..padded).collect();
    order.sort_by(|&x, &y| diag[y].partial_cmp(&diag[x]).unwrap());
    let gather = |m: &[f64], cols_only: bool| -> Vec<f64> {
        let mut out = vec![0.0; padded * padded];
        for i in 0..padded {
            let src_row = if cols_only { i } else { order[i] };
            for j in 0..padded {
                out[i * padded + j] = m[src_row * padded + order[j]];
            }
        }
        out
    };
    let sigma = gather(&sigma, false);
    let u = gather(&u, true);
    let v = gather(&v, true);
    // strip padding (its row/column never interacted)
    let strip = |m: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            out[i * n..(i + 1) * n].copy_from_slice(&m[i * padded..i * padded + n]);
        }
        out
    };
    FloatSvdResult {
        u: strip(&u),
        sigma: strip(&sigma),
        v: strip(&v),
        n,
        sweeps_used,
        trace,
        converged: converged || off_diag_norm_f64(&sigma, padded) == 0.0,
        rotations_applied: rotations,
    }
}

// ── public fixed-point entry points ─────────────────────────────────

/// Decompose a square matrix. Odd sizes are padded with a zero row and
/// column; schedule pairs that touch the padding index are byes, so the
/// padding never mixes with real data and is stripped afterwards.
pub fn decompose(a: &FixedMatrix, cfg: &DecomposeConfig) -> SvdResult {
    assert_eq!(a.rows(), a.cols(), "decompose expects a square matrix");
    let n = a.rows();
    assert!(n >= 1);

    if cfg.arithmetic == Arithmetic::Float || cfg.variant == AlgorithmVariant::NsvdExact {
        let values = a.to_values();
        let f = decompose_f64(&values, n, cfg);
        return float_to_fixed_result(f, cfg);
    }

    let padded = n + (n % 2);
    let fmt = cfg.internal_format;
    let wide = a.widen(fmt);
    let mut sigma = FixedMatrix::zeros(padded, padded, fmt);
    for i in 0..n {
        for j in 0..n {
            sigma.set_raw(i, j, wide.raw(i, j));
        }
    }
    let mut engine = FixedEngine::new(sigma, true);
    let sched = schedule(padded.max(2));
    let mut trace = vec![crate::metrics::off_diag_norm(&engine.sigma)];
    let mut converged = trace[0] == 0.0;
    let mut sweeps_used = 0;
    for _ in 0..cfg.max_sweeps {
        if converged {
            break;
        }
        for round in sched.rounds() {
            for &(p, q) in round {
                if p >= n || q >= n {
                    continue;
                }
                engine.apply_pair(p, q, cfg);
            }
        }
        sweeps_used += 1;
        let odn = crate::metrics::off_diag_norm(&engine.sigma);
        trace.push(odn);
        if cfg.tol > 0.0 && odn <= cfg.tol * trace[0] {
            converged = true;
        }
    }
    let result = SvdResult {
        u: engine.u,
        sigma: engine.sigma,
        v: engine.v,
        sweeps_used,
        trace,
        overflow_events: engine.events.count(),
        converged,
        rotations_applied: engine.rotations,
    };
    strip_padding(normalize(result), n)
}

/// Fixed-point off-diagonal norm per sweep without factor tracking or
/// early exit. Returns the trace and the overflow-event count.
pub fn off_diagonal_trace(a: &FixedMatrix, cfg: &DecomposeConfig) -> (Vec<f64>, u64) {
    assert_eq!(a.rows(), a.cols());
    let n = a.rows();
    if cfg.arithmetic == Arithmetic::Float || cfg.variant == AlgorithmVariant::NsvdExact {
        return (off_diagonal_trace_f64(&a.to_values(), n, cfg), 0);
    }
    let padded = n + (n % 2);
    let fmt = cfg.internal_format;
    let wide = a.widen(fmt);
    let mut sigma = FixedMatrix::zeros(padded, padded, fmt);
    for i in 0..n {
        for j in 0..n {
            sigma.set_raw(i, j, wide.raw(i, j));
        }
    }
    let mut engine = FixedEngine::new(sigma, false);
    let sched = schedule(padded.max(2));
    let mut trace = vec![crate::metrics::off_diag_norm(&engine.sigma)];
    for _ in 0..cfg.max_sweeps {
        for round in sched.rounds() {
            for &(p, q) in round {
                if p >= n || q >= n {
                    continue;
                }
                engine.apply_pair(p, q, cfg);
            }
        }
        trace.push(crate::metrics::off_diag_norm(&engine.sigma));
    }
    (trace, engine.events.count())
}

/// The 2x2 kernel: one pair per sweep, iterated to the same convergence
/// criterion.
pub fn decompose2x2(a: &FixedMatrix, cfg: &DecomposeConfig) -> SvdResult {
    assert!(a.rows() == 2 && a.cols() == 2);
    decompose(a, cfg)
}

/// Sign/sort normalization: every diagonal entry of Σ non-negative and
/// non-increasing, signs absorbed into U columns, order into U and V
/// columns. `U·Σ·Vᵀ` is unchanged.
pub fn normalize(result: SvdResult) -> SvdResult {
    let mut r = result;
    let n = r.sigma.rows();
    let mut events = OverflowCounter::new();
    let mut diag: Vec<i64> = (0..n).map(|i| r.sigma.raw(i, i)).collect();
    for j in 0..n {
        if diag[j] < 0 {
            diag[j] = crate::fixedpoint::sat_neg(diag[j], r.sigma.format(), &mut events);
            for i in 0..n {
                let s = r.sigma.raw(j, i);
                let neg = crate::fixedpoint::sat_neg(s, r.sigma.format(), &mut events);
                r.sigma.set_raw(j, i, neg);
                let w = r.u.raw(i, j);
                let negw = crate::fixedpoint::sat_neg(w, r.u.format(), &mut events);
                r.u.set_raw(i, j, negw);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| std::cmp::Reverse(r.sigma.raw(j, j)));
    let fmt = r.sigma.format();
    let gather_cols = |m: &FixedMatrix| {
        let mut out = FixedMatrix::zeros(n, n, fmt);
        for i in 0..n {
            for (jn, &jo) in order.iter().enumerate() {
                out.set_raw(i, jn, m.raw(i, jo));
            }
        }
        out
    };
    r.u = gather_cols(&r.u);
    r.v = gather_cols(&r.v);
    let mut sigma = FixedMatrix::zeros(n, n, fmt);
    for (ino, &io) in order.iter().enumerate() {
        for (jn, &jo) in order.iter().enumerate() {
            sigma.set_raw(ino, jn, r.sigma.raw(io, jo));
        }
    }
    r.sigma = sigma;
    r.overflow_events += events.count();
    r
}

fn strip_padding(mut r: SvdResult, n: usize) -> SvdResult {
    if r.sigma.rows() == n {
        return r;
    }
    let fmt = r.sigma.format();
    let padded = r.sigma.rows();
    debug_assert_eq!(padded, n + 1);
    let shrink = |m: &FixedMatrix| {
        let mut out = FixedMatrix::zeros(n, n, fmt);
        for i in 0..n {
            for j in 0..n {
                out.set_raw(i, j, m.raw(i, j));
            }
        }
        out
    };
    r.u = shrink(&r.u);
    r.sigma = shrink(&r.sigma);
    r.v = shrink(&r.v);
    r
}

fn float_to_fixed_result(f: FloatSvdResult, cfg: &DecomposeConfig) -> SvdResult {
    let fmt = cfg.internal_format;
    let n = f.n;
    let mut events = OverflowCounter::new();
    SvdResult {
        u: FixedMatrix::quantize(n, n, &f.u, fmt, &mut events),
        sigma: FixedMatrix::quantize(n, n, &f.sigma, fmt, &mut events),
        v: FixedMatrix::quantize(n, n, &f.v, fmt, &mut events),
        sweeps_used: f.sweeps_used,
        trace: f.trace,
        overflow_events: events.count(),
        converged: f.converged,
        rotations_applied: f.rotations_applied,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_matches_reference_listing() {
        // the 8x8 processing order, 1-based in the listing
        let want: [[(usize, usize); 4]; 7] = [
            [(1, 2), (3, 4), (5, 6), (7, 8)],
            [(1, 4), (2, 6), (3, 8), (5, 7)],
            [(1, 6), (4, 8), (2, 7), (3, 5)],
            [(1, 8), (6, 7), (4, 5), (2, 3)],
            [(1, 7), (8, 5), (6, 3), (4, 2)],
            [(1, 5), (7, 3), (8, 2), (6, 4)],
            [(1, 3), (5, 2), (7, 4), (8, 6)],
        ];
        let got = schedule(8);
        for (round, expect) in got.rounds().iter().zip(want.iter()) {
            let expect0: Vec<(usize, usize)> =
                expect.iter().map(|&(p, q)| (p - 1, q - 1)).collect();
            assert_eq!(round, &expect0);
        }
    }

    #[test]
    fn schedule_small_sizes() {
        let s = schedule(2);
        assert_eq!(s.rounds(), &[vec![(0, 1)]]);
        let s = schedule(4);
        assert_eq!(s.rounds().len(), 3);
        let mut seen = std::collections::HashSet::new();
        for round in s.rounds() {
            assert_eq!(round.len(), 2);
            for &(p, q) in round {
                assert!(seen.insert((p.min(q), p.max(q))));
            }
        }
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn schedule_covers_all_pairs_up_to_64() {
        for n in (2..=64).step_by(2) {
            let s = schedule(n);
            assert_eq!(s.rounds().len(), n - 1);
            let mut seen = std::collections::HashSet::new();
            for round in s.rounds() {
                assert_eq!(round.len(), n / 2);
                let mut used = vec![false; n];
                for &(p, q) in round {
                    assert!(p < n && q < n && p != q);
                    assert!(!used[p] && !used[q], "round not disjoint at n={n}");
                    used[p] = true;
                    used[q] = true;
                    assert!(seen.insert((p.min(q), p.max(q))));
                }
            }
            assert_eq!(seen.len(), n * (n - 1) / 2, "coverage at n={n}");
        }
    }

    #[test]
    #[should_panic(expected = "even")]
    fn schedule_rejects_odd() {
        let _ = schedule(5);
    }

    fn cfg(variant: AlgorithmVariant) -> DecomposeConfig {
        DecomposeConfig {
            variant,
            max_sweeps: 40,
            ..DecomposeConfig::default()
        }
    }

    fn quantized(values: &[f64], n: usize) -> FixedMatrix {
        let mut ev = OverflowCounter::new();
        let m = FixedMatrix::quantize(n, n, values, FixedFormat::new(16, 12), &mut ev);
        assert_eq!(ev.count(), 0);
        m
    }

    #[test]
    fn kernel_diagonal_is_fixed_point() {
        let a = quantized(&[3.0, 0.0, 0.0, 2.0], 2);
        let r = decompose2x2(&a, &cfg(AlgorithmVariant::Erfhsvd));
        assert!(r.converged);
        assert_eq!(r.sigma.value(0, 0), 3.0);
        assert_eq!(r.sigma.value(1, 1), 2.0);
        assert_eq!(r.u.value(0, 0), 1.0);
        assert_eq!(r.v.value(1, 1), 1.0);
        assert_eq!(r.trace[0], 0.0);
        assert_eq!(r.overflow_events, 0);
    }

    #[test]
    fn kernel_rank_one() {
        let a = quantized(&[1.0, 1.0, 1.0, 1.0], 2);
        let r = decompose2x2(&a, &cfg(AlgorithmVariant::Erfhsvd));
        assert!(r.converged);
        assert!((r.sigma.value(0, 0) - 2.0).abs() < 1e-3);
        assert!(r.sigma.value(1, 1).abs() < 1e-3);
    }

    #[test]
    fn kernel_shear_matches_oracle() {
        let a = quantized(&[1.0, 2.0, 0.0, 1.0], 2);
        for variant in [
            AlgorithmVariant::Erfhsvd,
            AlgorithmVariant::Erfhsvd2,
            AlgorithmVariant::Frnsvd,
            AlgorithmVariant::Ernsvd,
        ] {
            let r = decompose2x2(&a, &cfg(variant));
            assert!(r.converged, "{variant:?} did not converge");
            let sqrt2 = std::f64::consts::SQRT_2;
            assert!(
                (r.sigma.value(0, 0) - (sqrt2 + 1.0)).abs() < 1e-3,
                "{variant:?}: sigma1 = {}",
                r.sigma.value(0, 0)
            );
            assert!((r.sigma.value(1, 1) - (sqrt2 - 1.0)).abs() < 1e-3);
            assert_eq!(r.overflow_events, 0);
        }
    }

    #[test]
    fn identity_4x4_untouched() {
        let mut vals = vec![0.0; 16];
        for i in 0..4 {
            vals[i * 4 + i] = 1.0;
        }
        let a = quantized(&vals, 4);
        let r = decompose(&a, &cfg(AlgorithmVariant::Erfhsvd));
        assert!(r.converged);
        assert!(r.trace.iter().all(|&x| x == 0.0));
        for i in 0..4 {
            assert_eq!(r.sigma.value(i, i), 1.0);
            assert_eq!(r.u.value(i, i), 1.0);
            assert_eq!(r.v.value(i, i), 1.0);
        }
    }

    #[test]
    fn shuffled_diagonal_sorts() {
        let mut vals = vec![0.0; 16];
        for (i, d) in [1.0, -4.0, 2.0, 3.0].into_iter().enumerate() {
            vals[i * 4 + i] = d;
        }
        let a = quantized(&vals, 4);
        let r = decompose(&a, &cfg(AlgorithmVariant::Erfhsvd));
        assert!(r.converged);
        let got: Vec<f64> = (0..4).map(|i| r.sigma.value(i, i)).collect();
        assert_eq!(got, vec![4.0, 3.0, 2.0, 1.0]);
        // recombination still matches the input
        let n = 4;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += r.u.value(i, k) * r.sigma.value(k, k) * r.v.value(j, k);
                }
                assert!((s - vals[i * n + j]).abs() < 1e-4, "recon ({i},{j})");
            }
        }
    }

    #[test]
    fn odd_size_padding() {
        let mut vals = vec![0.0; 9];
        for (i, d) in [1.0, 4.0, 2.0].into_iter().enumerate() {
            vals[i * 3 + i] = d;
        }
        let a = quantized(&vals, 3);
        let r = decompose(&a, &cfg(AlgorithmVariant::Erfhsvd));
        let got: Vec<f64> = (0..3).map(|i| r.sigma.value(i, i)).collect();
        assert_eq!(got, vec![4.0, 2.0, 1.0]);
        assert_eq!(r.sigma.rows(), 3);
    }

    #[test]
    fn random_4x4_all_variants_match_oracle() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for trial in 0..20 {
            let vals: Vec<f64> = (0..16).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let a = quantized(&vals, 4);
            let want = oracle::brute_svd(&a.to_values(), 4);
            for variant in [
                AlgorithmVariant::NsvdExact,
                AlgorithmVariant::Erfhsvd,
                AlgorithmVariant::Erfhsvd2,
                AlgorithmVariant::Frnsvd,
                AlgorithmVariant::Ernsvd,
            ] {
                let r = decompose(&a, &cfg(variant));
                assert!(r.converged, "trial {trial} {variant:?}");
                for k in 0..4 {
                    assert!(
                        (r.sigma.value(k, k) - want.sigma[k]).abs() < 2e-3,
                        "trial {trial} {variant:?} sigma[{k}]: {} vs {}",
                        r.sigma.value(k, k),
                        want.sigma[k]
                    );
                }
            }
        }
    }

    #[test]
    fn float_engine_unquantized_erfhsvd2_descends() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 8;
        let vals: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut c = cfg(AlgorithmVariant::Erfhsvd2);
        c.arithmetic = Arithmetic::Float;
        c.max_sweeps = 30;
        c.tol = 0.0;
        let r = decompose_f64(&vals, n, &c);
        assert!(r.trace.last().unwrap() / r.trace[0] < 1e-10);
    }
}
