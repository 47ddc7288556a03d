//! Two's-complement word-level primitives: sign, priority encoder, absolute
//! value, and barrel shifts, with the exact truncation/saturation semantics of
//! the hardware they model.
//!
//! Rounding is always truncation (arithmetic right shift); overflow saturates
//! and bumps an [`OverflowCounter`] instead of wrapping. A run that matters is
//! expected to finish with the counter at zero, and the acceptance suite
//! asserts exactly that.

use std::fmt;

/// Word layout: total width and the number of fraction bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedFormat {
    pub word_bits: u32,
    pub frac_bits: u32,
}

impl FixedFormat {
    pub fn new(word_bits: u32, frac_bits: u32) -> Self {
        assert!(
            (2..=64).contains(&word_bits),
            "word_bits {word_bits} out of range 2..=64"
        );
        assert!(
            frac_bits < word_bits,
            "frac_bits {frac_bits} must be < word_bits {word_bits}"
        );
        Self {
            word_bits,
            frac_bits,
        }
    }

    #[inline]
    pub fn max_raw(self) -> i64 {
        if self.word_bits == 64 {
            i64::MAX
        } else {
            (1i64 << (self.word_bits - 1)) - 1
        }
    }

    #[inline]
    pub fn min_raw(self) -> i64 {
        if self.word_bits == 64 {
            i64::MIN
        } else {
            -(1i64 << (self.word_bits - 1))
        }
    }

    #[inline]
    pub fn contains(self, raw: i64) -> bool {
        raw >= self.min_raw() && raw <= self.max_raw()
    }

    /// Value of one least-significant bit.
    #[inline]
    pub fn ulp(self) -> f64 {
        (2.0f64).powi(-(self.frac_bits as i32))
    }
}

/// Saturation event counter threaded through every op that can overflow.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OverflowCounter {
    events: u64,
}

impl OverflowCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn record(&mut self) {
        self.events += 1;
    }

    #[inline]
    pub fn count(&self) -> u64 {
        self.events
    }

    #[inline]
    pub fn absorb(&mut self, other: OverflowCounter) {
        self.events += other.events;
    }
}

/// Sign in the MSB sense: zero counts as positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn of(raw: i64) -> Self {
        if raw >= 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    #[inline]
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    #[inline]
    pub fn is_negative(self) -> bool {
        matches!(self, Sign::Minus)
    }

    #[inline]
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    #[inline]
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Shift direction for [`FixedWord::shift`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDir {
    Left,
    RightArithmetic,
}

/// A two's-complement fixed-point scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedWord {
    raw: i64,
    format: FixedFormat,
}

impl FixedWord {
    /// In-range constructor; a violation is a programming error.
    pub fn new(raw: i64, format: FixedFormat) -> Self {
        assert!(
            format.contains(raw),
            "raw {raw} outside {}-bit two's-complement range",
            format.word_bits
        );
        Self { raw, format }
    }

    pub fn zero(format: FixedFormat) -> Self {
        Self { raw: 0, format }
    }

    pub fn one(format: FixedFormat) -> Self {
        Self::new(1i64 << format.frac_bits, format)
    }

    /// Clamp into range, recording a saturation event if needed.
    pub fn saturating_new(raw: i64, format: FixedFormat, events: &mut OverflowCounter) -> Self {
        if format.contains(raw) {
            Self { raw, format }
        } else {
            events.record();
            Self {
                raw: if raw > 0 {
                    format.max_raw()
                } else {
                    format.min_raw()
                },
                format,
            }
        }
    }

    /// Quantize a real value (round to nearest, ties away from zero).
    pub fn quantize(value: f64, format: FixedFormat, events: &mut OverflowCounter) -> Self {
        let scaled = value * (2.0f64).powi(format.frac_bits as i32);
        let rounded = scaled.round();
        if rounded > format.max_raw() as f64 || rounded < format.min_raw() as f64 {
            events.record();
            let raw = if rounded > 0.0 {
                format.max_raw()
            } else {
                format.min_raw()
            };
            return Self { raw, format };
        }
        Self {
            raw: rounded as i64,
            format,
        }
    }

    #[inline]
    pub fn raw(self) -> i64 {
        self.raw
    }

    #[inline]
    pub fn format(self) -> FixedFormat {
        self.format
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.raw as f64 * self.format.ulp()
    }

    /// Re-home into a wider format, preserving the value exactly.
    pub fn widen(self, to: FixedFormat) -> Self {
        assert!(to.frac_bits >= self.format.frac_bits);
        let shift = to.frac_bits - self.format.frac_bits;
        let raw = (self.raw as i128) << shift;
        assert!(
            raw >= to.min_raw() as i128 && raw <= to.max_raw() as i128,
            "widen target format cannot hold the value"
        );
        Self {
            raw: raw as i64,
            format: to,
        }
    }

    /// MSB test: +1 for raw >= 0, −1 otherwise.
    #[inline]
    pub fn sign(self) -> Sign {
        Sign::of(self.raw)
    }

    /// Priority encoder: `(floor(log2 |raw|), valid)`, with `(0, false)` for
    /// zero. Operates on the integer raw value; callers apply the fraction
    /// interpretation, which cancels out of every exponent difference.
    #[inline]
    pub fn exp2(self) -> (u32, bool) {
        exp2_raw(self.raw)
    }

    /// Absolute value. The most-negative word saturates to max positive and
    /// records an event (two's-complement asymmetry).
    pub fn abs_val(self, events: &mut OverflowCounter) -> Self {
        if self.raw >= 0 {
            self
        } else if self.raw == self.format.min_raw() {
            events.record();
            Self {
                raw: self.format.max_raw(),
                format: self.format,
            }
        } else {
            Self {
                raw: -self.raw,
                format: self.format,
            }
        }
    }

    /// Barrel shift. Right shifts are arithmetic (truncate toward −∞); left
    /// shifts saturate on overflow. `k` must be below the word width.
    pub fn shift(self, k: u32, dir: ShiftDir, events: &mut OverflowCounter) -> Self {
        assert!(k < self.format.word_bits, "shift amount {k} out of range");
        match dir {
            ShiftDir::RightArithmetic => Self {
                raw: sar(self.raw, k),
                format: self.format,
            },
            ShiftDir::Left => {
                let wide = (self.raw as i128) << k;
                if wide > self.format.max_raw() as i128 || wide < self.format.min_raw() as i128 {
                    events.record();
                    Self {
                        raw: if wide > 0 {
                            self.format.max_raw()
                        } else {
                            self.format.min_raw()
                        },
                        format: self.format,
                    }
                } else {
                    Self {
                        raw: wide as i64,
                        format: self.format,
                    }
                }
            }
        }
    }

    pub fn add(self, rhs: FixedWord, events: &mut OverflowCounter) -> Self {
        assert_eq!(self.format, rhs.format, "format mismatch");
        Self::saturating_new(self.raw + rhs.raw, self.format, events)
    }

    pub fn sub(self, rhs: FixedWord, events: &mut OverflowCounter) -> Self {
        assert_eq!(self.format, rhs.format, "format mismatch");
        Self::saturating_new(self.raw - rhs.raw, self.format, events)
    }

    /// Complement-and-increment negation; the most-negative word saturates.
    pub fn neg(self, events: &mut OverflowCounter) -> Self {
        if self.raw == self.format.min_raw() {
            events.record();
            Self {
                raw: self.format.max_raw(),
                format: self.format,
            }
        } else {
            Self {
                raw: -self.raw,
                format: self.format,
            }
        }
    }
}

impl fmt::Display for FixedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::io::format_fixed(self.raw, self.format))
    }
}

/// `(floor(log2 |x|), valid)` over a raw integer; `(0, false)` for zero.
#[inline]
pub fn exp2_raw(raw: i64) -> (u32, bool) {
    if raw == 0 {
        (0, false)
    } else {
        (raw.unsigned_abs().ilog2(), true)
    }
}

/// Arithmetic shift right: floor division by 2^k. Amounts at or beyond the
/// i64 width saturate to the sign fill.
#[inline]
pub fn sar(raw: i64, k: u32) -> i64 {
    raw >> k.min(63)
}

/// Saturating add over raws within `format`.
#[inline]
pub fn sat_add(a: i64, b: i64, format: FixedFormat, events: &mut OverflowCounter) -> i64 {
    let r = a + b; // operands are in range, so i64 cannot wrap
    if format.contains(r) {
        r
    } else {
        events.record();
        if r > 0 {
            format.max_raw()
        } else {
            format.min_raw()
        }
    }
}

/// Saturating negation over raws within `format`.
#[inline]
pub fn sat_neg(a: i64, format: FixedFormat, events: &mut OverflowCounter) -> i64 {
    if a == format.min_raw() {
        events.record();
        format.max_raw()
    } else {
        -a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fmt16() -> FixedFormat {
        FixedFormat::new(16, 12)
    }

    #[test]
    fn sign_follows_msb() {
        let f = fmt16();
        assert_eq!(FixedWord::new(0, f).sign(), Sign::Plus);
        assert_eq!(FixedWord::new(7, f).sign(), Sign::Plus);
        assert_eq!(FixedWord::new(-3, f).sign(), Sign::Minus);
    }

    #[test]
    fn exp2_cases() {
        let f = fmt16();
        assert_eq!(FixedWord::new(0, f).exp2(), (0, false));
        assert_eq!(FixedWord::new(1, f).exp2(), (0, true));
        assert_eq!(FixedWord::new(-12, f).exp2(), (3, true));
    }

    #[test]
    fn abs_val_saturates_most_negative() {
        let f = fmt16();
        let mut ev = OverflowCounter::new();
        assert_eq!(FixedWord::new(-5, f).abs_val(&mut ev).raw(), 5);
        assert_eq!(FixedWord::new(5, f).abs_val(&mut ev).raw(), 5);
        assert_eq!(ev.count(), 0);
        let most_neg = FixedWord::new(f.min_raw(), f);
        assert_eq!(most_neg.abs_val(&mut ev).raw(), f.max_raw());
        assert_eq!(ev.count(), 1);
    }

    #[test]
    fn shift_semantics() {
        let f = fmt16();
        let mut ev = OverflowCounter::new();
        let r = FixedWord::new(-7, f).shift(1, ShiftDir::RightArithmetic, &mut ev);
        assert_eq!(r.raw(), -4);
        let l = FixedWord::new(6, f).shift(2, ShiftDir::Left, &mut ev);
        assert_eq!(l.raw(), 24);
        assert_eq!(ev.count(), 0);
        let big = FixedWord::new(1 << (f.word_bits - 2), f).shift(2, ShiftDir::Left, &mut ev);
        assert_eq!(big.raw(), f.max_raw());
        assert_eq!(ev.count(), 1);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn shift_amount_contract() {
        let f = fmt16();
        let mut ev = OverflowCounter::new();
        let _ = FixedWord::new(1, f).shift(16, ShiftDir::Left, &mut ev);
    }

    #[test]
    fn widen_preserves_value() {
        let f = fmt16();
        let wide = FixedFormat::new(32, 24);
        let x = FixedWord::new(-1234, f);
        let y = x.widen(wide);
        assert_eq!(x.value(), y.value());
    }

    proptest! {
        #[test]
        fn exp2_brackets_magnitude(raw in -(1i64 << 30)..(1i64 << 30)) {
            prop_assume!(raw != 0);
            let (e, v) = exp2_raw(raw);
            prop_assert!(v);
            let mag = raw.unsigned_abs();
            prop_assert!(mag >= 1 << e);
            prop_assert!((mag >> e) >> 1 == 0); // mag < 2^(e+1)
        }

        #[test]
        fn sar_is_floor_division(raw in i64::MIN / 2..i64::MAX / 2, k in 0u32..32) {
            let expect = (raw as i128).div_euclid(1i128 << k);
            prop_assert_eq!(sar(raw, k) as i128, expect);
        }

        #[test]
        fn abs_idempotent(raw in -(1i64 << 14)..(1i64 << 14)) {
            let f = fmt16();
            let mut ev = OverflowCounter::new();
            let x = FixedWord::new(raw, f);
            let a = x.abs_val(&mut ev);
            prop_assert_eq!(a.abs_val(&mut ev), a);
            if x.sign() == Sign::Plus {
                prop_assert_eq!(a, x);
            }
        }
    }
}
