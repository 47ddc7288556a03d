//! Bit-accurate application of fast rotations: the shift-add multiply
//! circuit, the staged scaling circuit, and single/double 2x2 Givens
//! applications.
//!
//! The multiply circuit produces the unscaled coefficient products
//! `(1 − t²)·x` and `±2t·x`; the common factor `1/(1 + t²)` is applied by
//! [`scale`] once per rotation output. All shifts truncate, all adds
//! saturate.

use crate::angles::{FastRotation, RotationPair};
use crate::fixedpoint::{sar, sat_add, sat_neg, FixedFormat, FixedWord, OverflowCounter};
use crate::matrix::FixedMatrix;
use num_rational::Ratio;

/// Staged scaling-circuit configuration.
///
/// `stages` counts the accumulate-shift adders, the initial subtraction
/// included; four reproduces the full 32-bit coefficients. Rows whose
/// circuit has fewer adders use all of them. `bypass` skips scaling
/// entirely (rotations then grow the result by `1 + t²` per application).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaleConfig {
    pub stages: u32,
    pub bypass: bool,
}

impl ScaleConfig {
    pub fn new(stages: u32) -> Self {
        assert!((1..=4).contains(&stages), "stages must be in 1..=4");
        Self {
            stages,
            bypass: false,
        }
    }

    pub fn bypass() -> Self {
        Self {
            stages: 4,
            bypass: true,
        }
    }
}

impl Default for ScaleConfig {
    fn default() -> Self {
        Self::new(4)
    }
}

/// Exact rotation-matrix coefficients `c = (1−t²)/(1+t²)`, `s = 2St/(1+t²)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCoeffs {
    pub c: Ratio<i128>,
    pub s: Ratio<i128>,
}

/// Exact coefficients for a fast rotation (the swap flag does not change
/// the pair, only the matrix layout).
pub fn coefficients(rot: &FastRotation) -> RationalCoeffs {
    if rot.zero_tangent() {
        return RationalCoeffs {
            c: Ratio::from_integer(1),
            s: Ratio::from_integer(0),
        };
    }
    let l = rot.l();
    assert!(l <= 62, "shift exponent too large for exact coefficients");
    let four_l = 1i128 << (2 * l);
    RationalCoeffs {
        c: Ratio::new(four_l - 1, four_l + 1),
        s: Ratio::new(rot.s().value() as i128 * (1i128 << (l + 1)), four_l + 1),
    }
}

/// Which coefficient a multiply block applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplyMode {
    Sin,
    Cos,
}

/// Which side of the matrix product a single rotation lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The multiply circuit over a raw word.
///
/// Cos: `x − (x >> 2l)`, the `1 − t²` factor. Sin: `s · (x >> (l−1))`, the
/// `2t` factor realized as one shift. With a zero tangent the sin path
/// outputs zero and the cos path passes `x` through. Negative products are
/// complement-and-increment on the shifted value.
pub(crate) fn multiply_raw(
    x: i64,
    rot: &FastRotation,
    mode: MultiplyMode,
    fmt: FixedFormat,
    events: &mut OverflowCounter,
) -> i64 {
    if rot.zero_tangent() {
        return match mode {
            MultiplyMode::Cos => x,
            MultiplyMode::Sin => 0,
        };
    }
    let l = rot.l();
    match mode {
        MultiplyMode::Cos => sat_add(x, -sar(x, 2 * l), fmt, events),
        MultiplyMode::Sin => {
            let shifted = sar(x, l - 1);
            if rot.s().is_negative() {
                sat_neg(shifted, fmt, events)
            } else {
                shifted
            }
        }
    }
}

pub fn multiply(
    x: FixedWord,
    rot: &FastRotation,
    mode: MultiplyMode,
    events: &mut OverflowCounter,
) -> FixedWord {
    FixedWord::new(multiply_raw(x.raw(), rot, mode, x.format(), events), x.format())
}

/// The staged scaling circuit: multiplies by `λ = 1/(1 + 2^-2l)` using the
/// accumulate-shift form of the coefficient table, truncated to
/// `cfg.stages` adders.
///
/// Stage one is the subtraction `G − G >> 2l`; later stages add back
/// `>> 4l, >> 8l, ...` while the shift stays inside the word. The l = 3 row
/// taps the stage-one value for its last term, exactly as wired. Once
/// `2l >= word_bits` the coefficient rounds to one and the input passes
/// through.
pub(crate) fn scale_raw(
    x: i64,
    l: u32,
    cfg: ScaleConfig,
    fmt: FixedFormat,
    events: &mut OverflowCounter,
) -> i64 {
    if cfg.bypass || 2 * l >= fmt.word_bits {
        return x;
    }
    let g1 = sat_add(x, -sar(x, 2 * l), fmt, events);
    if cfg.stages < 2 {
        return g1;
    }
    let mut acc = g1;
    let mut stage = 2;
    let mut shift = 4 * l;
    while stage <= cfg.stages && shift < fmt.word_bits {
        let tap = if l == 3 && shift == 24 { g1 } else { acc };
        acc = sat_add(acc, sar(tap, shift), fmt, events);
        stage += 1;
        shift *= 2;
    }
    acc
}

pub fn scale(x: FixedWord, l: u32, cfg: ScaleConfig, events: &mut OverflowCounter) -> FixedWord {
    FixedWord::new(scale_raw(x.raw(), l, cfg, x.format(), events), x.format())
}

/// One entry of a rotation matrix: which multiply mode feeds it and whether
/// the product is negated afterwards.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Entry {
    pub mode: MultiplyMode,
    pub negate: bool,
}

const fn e(mode: MultiplyMode, negate: bool) -> Entry {
    Entry { mode, negate }
}

/// Rotation-matrix layout as multiply-block assignments.
///
/// Standard form is `[c s; −s c]`. The swapped form exchanges the sin/cos
/// roles: `[s c; c −s]` for a live tangent, and the exact quarter turn
/// `[0 1; −1 0]` when the tangent is zero (both degenerate printed forms
/// have that same two-sided effect).
pub(crate) fn entry_table(rot: &FastRotation, transpose: bool) -> [[Entry; 2]; 2] {
    use MultiplyMode::{Cos, Sin};
    let base: [[Entry; 2]; 2] = if !rot.swap() {
        // [c s; −s c]
        [[e(Cos, false), e(Sin, false)], [e(Sin, true), e(Cos, false)]]
    } else if rot.zero_tangent() {
        // quarter turn [0 1; −1 0]: sin path is the zero, cos path the one
        [[e(Sin, false), e(Cos, false)], [e(Cos, true), e(Sin, false)]]
    } else {
        // [s c; c −s]
        [[e(Sin, false), e(Cos, false)], [e(Cos, false), e(Sin, true)]]
    };
    if !transpose {
        base
    } else {
        [[base[0][0], base[1][0]], [base[0][1], base[1][1]]]
    }
}

/// `out = entry(x0) + entry(x1)`, scaled: one rotated element.
#[inline]
pub(crate) fn rotate_element(
    x0: i64,
    x1: i64,
    row: &[Entry; 2],
    rot: &FastRotation,
    cfg: ScaleConfig,
    fmt: FixedFormat,
    events: &mut OverflowCounter,
) -> i64 {
    let mut p0 = multiply_raw(x0, rot, row[0].mode, fmt, events);
    if row[0].negate {
        p0 = sat_neg(p0, fmt, events);
    }
    let mut p1 = multiply_raw(x1, rot, row[1].mode, fmt, events);
    if row[1].negate {
        p1 = sat_neg(p1, fmt, events);
    }
    let sum = sat_add(p0, p1, fmt, events);
    if rot.zero_tangent() {
        sum
    } else {
        scale_raw(sum, rot.l(), cfg, fmt, events)
    }
}

fn apply2(
    m: &FixedMatrix,
    rot: &FastRotation,
    side: Side,
    transpose: bool,
    cfg: ScaleConfig,
    events: &mut OverflowCounter,
) -> FixedMatrix {
    assert!(m.rows() == 2 && m.cols() == 2);
    let fmt = m.format();
    let t = entry_table(rot, transpose);
    let mut out = FixedMatrix::zeros(2, 2, fmt);
    match side {
        Side::Left => {
            // out[i][j] = R[i][0]·m[0][j] + R[i][1]·m[1][j]
            for i in 0..2 {
                for j in 0..2 {
                    let v = rotate_element(m.raw(0, j), m.raw(1, j), &t[i], rot, cfg, fmt, events);
                    out.set_raw(i, j, v);
                }
            }
        }
        Side::Right => {
            // out[i][j] = m[i][0]·R[0][j] + m[i][1]·R[1][j]
            for i in 0..2 {
                for j in 0..2 {
                    let col = [t[0][j], t[1][j]];
                    let v = rotate_element(m.raw(i, 0), m.raw(i, 1), &col, rot, cfg, fmt, events);
                    out.set_raw(i, j, v);
                }
            }
        }
    }
    out
}

/// Applies one fast rotation: `R·M` on the left, `M·Rᵀ` on the right.
pub fn apply_single_rotation(
    m: &FixedMatrix,
    rot: &FastRotation,
    side: Side,
    cfg: ScaleConfig,
    events: &mut OverflowCounter,
) -> FixedMatrix {
    match side {
        Side::Left => apply2(m, rot, Side::Left, false, cfg, events),
        Side::Right => apply2(m, rot, Side::Right, true, cfg, events),
    }
}

/// Applies the double rotation `R_thetaᵀ · M · R_Theta` as two chained
/// single applications with intermediate truncation, rows first.
pub fn apply_double_rotation(
    m: &FixedMatrix,
    pair: &RotationPair,
    cfg: ScaleConfig,
    events: &mut OverflowCounter,
) -> FixedMatrix {
    let left = apply2(m, &pair.theta, Side::Left, true, cfg, events);
    apply2(&left, &pair.big_theta, Side::Right, false, cfg, events)
}
