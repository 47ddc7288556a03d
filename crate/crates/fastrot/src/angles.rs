//! Fast-rotation angle selection: the symmetrizing rotation, the
//! diagonalizing rotation for (near-)symmetric input, and the direct
//! estimator that produces the vertical/horizontal pair for a general 2x2
//! block.
//!
//! A fast rotation is restricted to `tan x = ±2^-l`, so picking an angle
//! means picking a shift exponent, a sign, and two flags. All boundary
//! comparisons here are exact over wide integers; ties fall to the default
//! case of each case statement.

use crate::fixedpoint::{sat_add, FixedFormat, FixedWord, OverflowCounter, Sign};
use crate::matrix::FixedMatrix;
use std::cmp::Ordering;

/// One approximated rotation: `tan x = s · 2^-l`, applied as a double
/// rotation so the scale factor stays rational.
///
/// `zero_tangent` marks the `l = 0 → t = 0` convention (identity
/// coefficients); `swap` selects the sin/cos-exchanged matrix form used for
/// normalization. `zero_tangent` together with `swap` decodes to the exact
/// quarter turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FastRotation {
    l: u32,
    s: Sign,
    zero_tangent: bool,
    swap: bool,
}

impl FastRotation {
    pub fn shifted(l: u32, s: Sign, swap: bool) -> Self {
        assert!(l >= 1, "a non-identity fast rotation needs l >= 1");
        Self {
            l,
            s,
            zero_tangent: false,
            swap,
        }
    }

    pub fn identity(swap: bool) -> Self {
        Self {
            l: 0,
            s: Sign::Plus,
            zero_tangent: true,
            swap,
        }
    }

    #[inline]
    pub fn l(&self) -> u32 {
        self.l
    }

    #[inline]
    pub fn s(&self) -> Sign {
        self.s
    }

    #[inline]
    pub fn zero_tangent(&self) -> bool {
        self.zero_tangent
    }

    #[inline]
    pub fn swap(&self) -> bool {
        self.swap
    }

    /// `(l, s, zero_tangent, swap)` for golden-trace assertions.
    pub fn tuple(&self) -> (u32, i64, bool, bool) {
        (self.l, self.s.value(), self.zero_tangent, self.swap)
    }
}

/// The vertical (`theta`, left side) and horizontal (`big_theta`, right
/// side) rotations produced by the direct estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotationPair {
    pub theta: FastRotation,
    pub big_theta: FastRotation,
}

/// Boundary-condition family for the symmetrizing/diagonalizing estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Exact-coefficient comparisons.
    Full,
    /// Power-of-two comparisons (one adder and one shifter fewer).
    Relaxed,
}

/// Direct-estimator flavor: with or without the over/underestimate flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectKind {
    Erfhsvd,
    Erfhsvd2,
}

/// Per-channel initial values: signs, magnitudes, and the exponent gap.
#[derive(Debug, Clone, Copy)]
pub struct AngleInputs {
    pub s_n: Sign,
    pub s_d: Sign,
    pub n: FixedWord,
    pub d: FixedWord,
    pub k: i32,
    pub n_zero: bool,
    pub d_zero: bool,
}

impl AngleInputs {
    /// Build a channel from a numerator and denominator word. `double_den`
    /// realizes the half-angle `<< 1` on the denominator magnitude.
    pub fn new(num: FixedWord, den: FixedWord, double_den: bool, events: &mut OverflowCounter) -> Self {
        let format = num.format();
        assert!(
            format.word_bits <= 60,
            "angle classification is exact for word widths up to 60 bits"
        );
        let s_n = num.sign();
        let s_d = den.sign();
        let n = num.abs_val(events);
        let mut d = den.abs_val(events);
        if double_den {
            d = FixedWord::saturating_new(d.raw() << 1, format, events);
        }
        let (en, nv) = n.exp2();
        let (ed, dv) = d.exp2();
        // The exponent-gap subtractors flag negative results, which clamp
        // to zero: tangents above one classify like tangent one. Without
        // the clamp the case boundaries collapse for K <= -2 and the
        // diagonalizer over-rotates past the 7/12 error bound.
        Self {
            s_n,
            s_d,
            n,
            d,
            k: (ed as i32 - en as i32).max(0),
            n_zero: !nv,
            d_zero: !dv,
        }
    }
}

/// Compares `a` against `b · 2^shift` exactly.
fn cmp_shifted(a: u128, b: u128, shift: i32) -> Ordering {
    if shift >= 0 {
        a.cmp(&(b.checked_shl(shift as u32).expect("comparison overflow")))
    } else {
        a.checked_shl((-shift) as u32)
            .expect("comparison overflow")
            .cmp(&b)
    }
}

/// The case statement of the angle estimators: returns the classified shift
/// `l_temp` (one of K+1, K−1, K) and the flag `B` marking the cases where
/// the fast angle underestimates the true one.
///
/// `Relaxed` uses the power-of-two boundaries; `Full` the exact-coefficient
/// ones. Comparisons are strict and exact; ties land in the default case.
pub fn classify_exponent(inp: &AngleInputs, mode: BoundaryMode) -> (i32, bool) {
    assert!(!inp.n_zero, "classification requires N > 0");
    let n = inp.n.raw() as u128;
    let d = inp.d.raw() as u128;
    let k = inp.k;
    match mode {
        BoundaryMode::Relaxed => {
            // 1.5·D > 2^(K+1)·N  <=>  3·D > 2^(K+2)·N
            if cmp_shifted(3 * d, n, k + 2) == Ordering::Greater {
                (k + 1, true)
            } else if cmp_shifted(3 * d, n, k + 1) == Ordering::Less {
                (k - 1, false)
            } else if cmp_shifted(d, n, k) == Ordering::Less {
                (k, true)
            } else {
                (k, false)
            }
        }
        BoundaryMode::Full => {
            debug_assert!(!inp.d_zero, "full-mode boundaries assume D > 0");
            // 1.5·D > (2^(K+1) − 2^(−K))·N; the coefficient is negative for
            // K <= −1, so the case always fires there.
            let c1 = if k <= -1 {
                true
            } else {
                // scaled by 2^(K+1): 3·D·2^K > (2^(2K+2) − 2)·N
                let lhs = (3 * d).checked_shl(k as u32).expect("overflow");
                let rhs = ((1u128 << (2 * k as u32 + 2)) - 2) * n;
                lhs > rhs
            };
            if c1 {
                return (k + 1, true);
            }
            // 1.5·D < (2^K − 2^(−K+1))·N; non-positive coefficient for K <= 0.
            let c2 = if k <= 0 {
                false
            } else {
                // scaled by 2^K: 3·D·2^(K−1) < (2^(2K) − 2)·N
                let lhs = (3 * d).checked_shl(k as u32 - 1).expect("overflow");
                let rhs = ((1u128 << (2 * k as u32)) - 2) * n;
                lhs < rhs
            };
            if c2 {
                (k - 1, false)
            } else if cmp_shifted(d, n, k) == Ordering::Less {
                (k, true)
            } else {
                (k, false)
            }
        }
    }
}

fn block(a: &FixedMatrix) -> ([i64; 4], FixedFormat) {
    assert!(a.rows() == 2 && a.cols() == 2, "expected a 2x2 block");
    ([a.raw(0, 0), a.raw(0, 1), a.raw(1, 0), a.raw(1, 1)], a.format())
}

/// Symmetrizing fast rotation: applied on the left, it shrinks `|b − c|`.
///
/// `N = 0` (already symmetric) returns the identity; `D = 0` returns the
/// exact quarter turn. The relaxed mode floors the shift at two.
pub fn symmetrizing_rotation(
    a: &FixedMatrix,
    mode: BoundaryMode,
    events: &mut OverflowCounter,
) -> FastRotation {
    let ([aa, ab, ac, ad], fmt) = block(a);
    symmetrizing_rotation_raw(aa, ab, ac, ad, fmt, mode, events)
}

pub(crate) fn symmetrizing_rotation_raw(
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    fmt: FixedFormat,
    mode: BoundaryMode,
    events: &mut OverflowCounter,
) -> FastRotation {
    let num = FixedWord::new(sat_add(b, -c, fmt, events), fmt);
    let den = FixedWord::new(sat_add(d, a, fmt, events), fmt);
    let inp = AngleInputs::new(num, den, false, events);
    if inp.n_zero {
        return FastRotation::identity(false);
    }
    if inp.d_zero {
        return FastRotation::identity(true);
    }
    let (l_temp, _) = classify_exponent(&inp, mode);
    let floor = match mode {
        BoundaryMode::Full => 1,
        BoundaryMode::Relaxed => 2,
    };
    let l = (l_temp + 1).max(floor) as u32;
    // R·A is symmetric for tan(rho) = (c−b)/(d+a); the sin sign follows the
    // corrected orientation, not the printed S_N·S_D.
    let s = (inp.s_n * inp.s_d).flip();
    FastRotation::shifted(l, s, false)
}

/// Diagonalizing fast rotation for a symmetric block, applied two-sided.
///
/// Only the symmetric part (`b + c`, `d − a`) is read, so the residual
/// asymmetry left by a fast symmetrizing rotation is ignored. The shift
/// gains +2: one for the half angle, one for the double rotation.
pub fn diagonalizing_rotation(
    b: &FixedMatrix,
    mode: BoundaryMode,
    events: &mut OverflowCounter,
) -> FastRotation {
    let ([ba, bb, bc, bd], fmt) = block(b);
    diagonalizing_rotation_raw(ba, bb, bc, bd, fmt, mode, events)
}

pub(crate) fn diagonalizing_rotation_raw(
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    fmt: FixedFormat,
    mode: BoundaryMode,
    events: &mut OverflowCounter,
) -> FastRotation {
    let num = FixedWord::new(sat_add(b, c, fmt, events), fmt);
    let den = FixedWord::new(sat_add(d, -a, fmt, events), fmt);
    let inp = AngleInputs::new(num, den, false, events);
    if inp.n_zero {
        return FastRotation::identity(false);
    }
    if inp.d_zero {
        // (0, S_N): a quarter-turn exchange; no shrink of the off-diagonal
        // is representable at this point.
        return FastRotation::identity(true);
    }
    let (l_temp, _) = classify_exponent(&inp, mode);
    let l = (l_temp + 2).max(1) as u32;
    let s = inp.s_n * inp.s_d;
    let swap = !inp.s_n.is_negative();
    FastRotation::shifted(l, s, swap)
}

/// Direct fast-rotation estimate of the vertical/horizontal pair.
///
/// `Erfhsvd` keeps the over/underestimate flags `B`/`b`; `Erfhsvd2` drops
/// them (they read as zero), which is the only difference between the two.
pub fn direct_rotations(
    a: &FixedMatrix,
    kind: DirectKind,
    events: &mut OverflowCounter,
) -> RotationPair {
    let ([aa, ab, ac, ad], fmt) = block(a);
    direct_rotations_raw(aa, ab, ac, ad, fmt, kind, events)
}

pub(crate) fn direct_rotations_raw(
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    fmt: FixedFormat,
    kind: DirectKind,
    events: &mut OverflowCounter,
) -> RotationPair {
    // Step 1: both channels. The beta channel reads c−b over d+a.
    let ch1 = AngleInputs::new(
        FixedWord::new(sat_add(c, b, fmt, events), fmt),
        FixedWord::new(sat_add(d, -a, fmt, events), fmt),
        true,
        events,
    );
    let ch2 = AngleInputs::new(
        FixedWord::new(sat_add(c, -b, fmt, events), fmt),
        FixedWord::new(sat_add(d, a, fmt, events), fmt),
        true,
        events,
    );

    // Step 6 keys both matrix forms on the sign of d−a.
    let swap = !ch1.s_d.is_negative();

    if ch1.n_zero && ch2.n_zero {
        // Diagonal block: both angles vanish; only the normalizing swap may act.
        let id = FastRotation::identity(swap);
        return RotationPair {
            theta: id,
            big_theta: id,
        };
    }

    // Step 2: classify each live channel; the flags only matter for ERFHSVD.
    let classify = |ch: &AngleInputs| -> (i64, bool) {
        if ch.n_zero {
            return (0, false); // unused; the case statement never reads it
        }
        let (lt, flag) = classify_exponent(ch, BoundaryMode::Relaxed);
        ((lt as i64 + 1).max(2), flag)
    };
    let (l_alpha, flag_big) = classify(&ch1);
    let (l_beta, flag_small) = classify(&ch2);
    let bb = match kind {
        DirectKind::Erfhsvd => (flag_big && flag_small) as i64,
        DirectKind::Erfhsvd2 => 0,
    };

    // Step 3: combine into the sum channel (horizontal when the two
    // tangent sign products agree) and the difference channel.
    let diff = l_beta - l_alpha;
    let (mut l_big, mut l_small) = if ch2.n_zero {
        (l_alpha, l_alpha)
    } else if ch1.n_zero {
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
    let p1 = ch1.s_d * ch1.s_n;
    let p2 = ch2.s_d * ch2.s_n;

    // Step 4: the sum channel carries the alpha sign; the difference
    // channel compares the two magnitudes through the shift gap.
    let (mut s_big, mut s_small) = if ch2.n_zero {
        (p1, p1)
    } else if ch1.n_zero {
        (p2, p2.flip())
    } else {
        (p1, p1 * Sign::of(diff)) // Sign(0) = +1
    };

    // Opposite tangent signs make the difference the larger angle: the
    // roles of the two channels exchange, shifts and signs together.
    if p1 != p2 && !ch1.n_zero && !ch2.n_zero {
        std::mem::swap(&mut l_big, &mut l_small);
        std::mem::swap(&mut s_big, &mut s_small);
    }

    let build = |l: i64, s: Sign| -> FastRotation {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::FixedFormat;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn fmt() -> FixedFormat {
        FixedFormat::new(32, 24)
    }

    fn word(raw: i64) -> FixedWord {
        FixedWord::new(raw, fmt())
    }

    fn inputs(n: i64, d: i64) -> AngleInputs {
        let mut ev = OverflowCounter::new();
        AngleInputs::new(word(n), word(d), false, &mut ev)
    }

    fn m2(raws: [i64; 4]) -> FixedMatrix {
        FixedMatrix::from2x2(raws, fmt())
    }

    #[test]
    fn classify_relaxed_examples() {
        assert_eq!(
            classify_exponent(&inputs(1000, 1000), BoundaryMode::Relaxed),
            (0, false)
        );
        assert_eq!(
            classify_exponent(&inputs(4, 20), BoundaryMode::Relaxed),
            (2, false)
        );
    }

    #[test]
    fn classify_full_example() {
        assert_eq!(
            classify_exponent(&inputs(2, 2), BoundaryMode::Full),
            (1, true)
        );
    }

    /// Exact-rational re-statement of both case statements.
    fn classify_oracle(n: i64, d: i64, mode: BoundaryMode) -> i32 {
        let k = (crate::fixedpoint::exp2_raw(d).0 as i32 - crate::fixedpoint::exp2_raw(n).0 as i32).max(0);
        let big = |x: i64| BigRational::from_integer(BigInt::from(x));
        let pow2 = |e: i32| {
            if e >= 0 {
                BigRational::from_integer(BigInt::from(1) << e as usize)
            } else {
                BigRational::new(BigInt::from(1), BigInt::from(1) << (-e) as usize)
            }
        };
        let lhs = big(3) / big(2) * big(d);
        let (hi, lo) = match mode {
            BoundaryMode::Relaxed => (pow2(k + 1) * big(n), pow2(k) * big(n)),
            BoundaryMode::Full => (
                (pow2(k + 1) - pow2(-k)) * big(n),
                (pow2(k) - pow2(-k + 1)) * big(n),
            ),
        };
        if lhs > hi {
            k + 1
        } else if lhs < lo {
            k - 1
        } else {
            k
        }
    }

    proptest! {
        #[test]
        fn classifier_matches_rational_oracle(
            n in 1i64..(1 << 30),
            d in 1i64..(1 << 30),
            full in proptest::bool::ANY,
        ) {
            let mode = if full { BoundaryMode::Full } else { BoundaryMode::Relaxed };
            let (lt, _) = classify_exponent(&inputs(n, d), mode);
            prop_assert_eq!(lt, classify_oracle(n, d, mode));
        }

        /// Scaling every input by a common power of two never changes the
        /// selected rotation.
        #[test]
        fn shift_invariance(
            a in -(1i64 << 16)..(1 << 16),
            b in -(1i64 << 16)..(1 << 16),
            c in -(1i64 << 16)..(1 << 16),
            d in -(1i64 << 16)..(1 << 16),
            sh in 0u32..8,
        ) {
            let mut ev = OverflowCounter::new();
            let base = direct_rotations(&m2([a, b, c, d]), DirectKind::Erfhsvd, &mut ev);
            let scaled = direct_rotations(
                &m2([a << sh, b << sh, c << sh, d << sh]),
                DirectKind::Erfhsvd,
                &mut ev,
            );
            prop_assert_eq!(base, scaled);
            prop_assert_eq!(ev.count(), 0);
        }

        /// Any non-identity rotation satisfies l >= 1, i.e. |tan| <= 1/2.
        #[test]
        fn angle_magnitude_bound(
            a in -(1i64 << 20)..(1 << 20),
            b in -(1i64 << 20)..(1 << 20),
            c in -(1i64 << 20)..(1 << 20),
            d in -(1i64 << 20)..(1 << 20),
        ) {
            let mut ev = OverflowCounter::new();
            let pair = direct_rotations(&m2([a, b, c, d]), DirectKind::Erfhsvd, &mut ev);
            for rot in [pair.theta, pair.big_theta] {
                if !rot.zero_tangent() {
                    prop_assert!(rot.l() >= 1);
                }
            }
            let rho = symmetrizing_rotation(&m2([a, b, c, d]), BoundaryMode::Full, &mut ev);
            if !rho.zero_tangent() {
                prop_assert!(rho.l() >= 1);
            }
            let rho_rel = symmetrizing_rotation(&m2([a, b, c, d]), BoundaryMode::Relaxed, &mut ev);
            if !rho_rel.zero_tangent() {
                prop_assert!(rho_rel.l() >= 2);
            }
        }

        /// The symmetrizing rotation strictly shrinks |b − c| (exact
        /// rational application) unless the block is already symmetric.
        #[test]
        fn symmetrization_contract(
            a in -(1i64 << 14)..(1 << 14),
            b in -(1i64 << 14)..(1 << 14),
            c in -(1i64 << 14)..(1 << 14),
            d in -(1i64 << 14)..(1 << 14),
        ) {
            prop_assume!(b != c);
            let mut ev = OverflowCounter::new();
            let rot = symmetrizing_rotation(&m2([a, b, c, d]), BoundaryMode::Full, &mut ev);
            let big = |x: i64| BigRational::from_integer(BigInt::from(x));
            let (cc, ss) = if rot.zero_tangent() {
                if rot.swap() {
                    (big(0), big(1))
                } else {
                    (big(1), big(0))
                }
            } else {
                let t = BigRational::new(BigInt::from(1), BigInt::from(1) << rot.l() as usize);
                let den = big(1) + &t * &t;
                (
                    (big(1) - &t * &t) / den.clone(),
                    big(2) * big(rot.s().value()) * &t / den,
                )
            };
            // asymmetry of R·A: c·(b−c) + s·(d+a)
            let after = &cc * (big(b) - big(c)) + &ss * (big(d) + big(a));
            let before = big(b) - big(c);
            prop_assert!(after.abs() < before.abs(),
                "asymmetry grew: {} -> {}", before, after);
        }

        /// ERFHSVD2 differs from ERFHSVD only where the B&b flags bite; on
        /// symmetric inputs they agree exactly.
        #[test]
        fn erfhsvd2_flag_relationship(
            a in -(1i64 << 16)..(1 << 16),
            b in -(1i64 << 16)..(1 << 16),
            c in -(1i64 << 16)..(1 << 16),
            d in -(1i64 << 16)..(1 << 16),
        ) {
            let mut ev = OverflowCounter::new();
            let m = m2([a, b, c, d]);
            let v1 = direct_rotations(&m, DirectKind::Erfhsvd, &mut ev);
            let v2 = direct_rotations(&m, DirectKind::Erfhsvd2, &mut ev);
            if v1 != v2 {
                // the only permitted divergence is the B&b shift correction
                let ls1 = [v1.theta.l(), v1.big_theta.l()];
                let ls2 = [v2.theta.l(), v2.big_theta.l()];
                let mut diffs = 0;
                for i in 0..2 {
                    if ls1[i] != ls2[i] {
                        prop_assert_eq!(ls1[i] + 1, ls2[i]);
                        diffs += 1;
                    }
                }
                prop_assert_eq!(diffs, 1);
            }
            let sym = m2([a, b, b, d]);
            prop_assert_eq!(
                direct_rotations(&sym, DirectKind::Erfhsvd, &mut ev),
                direct_rotations(&sym, DirectKind::Erfhsvd2, &mut ev)
            );
        }
    }

    #[test]
    fn symmetrizing_special_cases() {
        let mut ev = OverflowCounter::new();
        let one = 1 << 24;
        // identity matrix: already symmetric
        let rot = symmetrizing_rotation(&m2([one, 0, 0, one]), BoundaryMode::Full, &mut ev);
        assert!(rot.zero_tangent() && !rot.swap());
        // d = −a with b != c: D = 0, quarter turn
        let rot = symmetrizing_rotation(&m2([one, 5 << 20, 3 << 20, -one]), BoundaryMode::Full, &mut ev);
        assert!(rot.zero_tangent() && rot.swap());
    }

    #[test]
    fn symmetrizing_example_shifts() {
        // [[1,2],[0,1]]: N = D = 2, classified l = 1, doubled to 2
        let mut ev = OverflowCounter::new();
        let one = 1 << 24;
        let rot = symmetrizing_rotation(&m2([one, 2 * one, 0, one]), BoundaryMode::Full, &mut ev);
        assert_eq!(rot.l(), 2);
        assert!(!rot.swap());
        // corrected orientation: s must oppose S_N·S_D = +1
        assert_eq!(rot.s(), Sign::Minus);
    }

    #[test]
    fn diagonalizing_special_cases() {
        let mut ev = OverflowCounter::new();
        let one = 1 << 24;
        // already diagonal
        let rot = diagonalizing_rotation(&m2([3 * one, 0, 0, one]), BoundaryMode::Full, &mut ev);
        assert!(rot.zero_tangent() && !rot.swap());
        // a = d, q != 0: the D = 0 exchange
        let rot = diagonalizing_rotation(&m2([one, one, one, one]), BoundaryMode::Full, &mut ev);
        assert!(rot.zero_tangent() && rot.swap());
    }

    #[test]
    fn diagonalizing_example_shifts() {
        // [[0,1],[1,3]]: N = 2, D = 3, K = 0, full mode fires case 1
        let mut ev = OverflowCounter::new();
        let one = 1 << 24;
        let rot = diagonalizing_rotation(&m2([0, one, one, 3 * one]), BoundaryMode::Full, &mut ev);
        assert_eq!(rot.l(), 3);
        assert_eq!(rot.s(), Sign::Plus);
        assert!(rot.swap()); // S_N >= 0
    }

    #[test]
    fn direct_diagonal_is_fixed_point() {
        let mut ev = OverflowCounter::new();
        let one = 1 << 24;
        // descending diagonal: pure identity on both sides
        let pair = direct_rotations(&m2([3 * one, 0, 0, 2 * one]), DirectKind::Erfhsvd, &mut ev);
        assert!(pair.theta.zero_tangent() && !pair.theta.swap());
        assert!(pair.big_theta.zero_tangent() && !pair.big_theta.swap());
        // ascending diagonal: identity coefficients, normalizing swap
        let pair = direct_rotations(&m2([2 * one, 0, 0, 3 * one]), DirectKind::Erfhsvd, &mut ev);
        assert!(pair.theta.zero_tangent() && pair.theta.swap());
    }

    #[test]
    fn direct_symmetric_collapses_to_two_sided() {
        let mut ev = OverflowCounter::new();
        let one = 1 << 24;
        let pair = direct_rotations(&m2([0, one, one, 3 * one]), DirectKind::Erfhsvd, &mut ev);
        assert_eq!(pair.theta, pair.big_theta);
    }

    /// Golden Step 1–4 trace for [[1,2],[0,1]], frozen from the exact
    /// wide-integer walk of every case statement.
    #[test]
    fn direct_golden_trace() {
        let mut ev = OverflowCounter::new();
        let one = 1 << 24;
        let pair = direct_rotations(&m2([one, 2 * one, 0, one]), DirectKind::Erfhsvd, &mut ev);
        // channel walk: K1 = −1 → l_alpha = 2; K2 = 1 → l_beta = 2;
        // diff 0 → (l_beta−1, 0); sign products differ → exchanged;
        // S = +1, Sign(0) = +1; S_D1 = +1 → swapped forms.
        assert_eq!(pair.theta.tuple(), (1, 1, false, true));
        assert_eq!(pair.big_theta.tuple(), (0, 1, true, true));
        assert_eq!(ev.count(), 0);
    }
}
