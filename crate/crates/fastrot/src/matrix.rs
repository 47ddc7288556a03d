//! Dense row-major matrix of fixed-point words sharing one format.

use crate::fixedpoint::{FixedFormat, FixedWord, OverflowCounter};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedMatrix {
    rows: usize,
    cols: usize,
    format: FixedFormat,
    data: Vec<i64>,
}

impl FixedMatrix {
    pub fn zeros(rows: usize, cols: usize, format: FixedFormat) -> Self {
        Self {
            rows,
            cols,
            format,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, format: FixedFormat) -> Self {
        let mut m = Self::zeros(n, n, format);
        let one = 1i64 << format.frac_bits;
        for i in 0..n {
            m.data[i * n + i] = one;
        }
        m
    }

    /// Quantize a real-valued matrix into `format`.
    pub fn quantize(
        rows: usize,
        cols: usize,
        values: &[f64],
        format: FixedFormat,
        events: &mut OverflowCounter,
    ) -> Self {
        assert_eq!(values.len(), rows * cols);
        let data = values
            .iter()
            .map(|&v| FixedWord::quantize(v, format, events).raw())
            .collect();
        Self {
            rows,
            cols,
            format,
            data,
        }
    }

    pub fn from_raws(rows: usize, cols: usize, raws: Vec<i64>, format: FixedFormat) -> Self {
        assert_eq!(raws.len(), rows * cols);
        for &r in &raws {
            assert!(format.contains(r));
        }
        Self {
            rows,
            cols,
            format,
            data: raws,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn format(&self) -> FixedFormat {
        self.format
    }

    #[inline]
    pub fn raw(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set_raw(&mut self, i: usize, j: usize, raw: i64) {
        debug_assert!(self.format.contains(raw));
        self.data[i * self.cols + j] = raw;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FixedWord {
        FixedWord::new(self.raw(i, j), self.format)
    }

    pub fn set(&mut self, i: usize, j: usize, w: FixedWord) {
        assert_eq!(w.format(), self.format);
        self.set_raw(i, j, w.raw());
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.raw(i, j) as f64 * self.format.ulp()
    }

    pub fn to_values(&self) -> Vec<f64> {
        self.data
            .iter()
            .map(|&r| r as f64 * self.format.ulp())
            .collect()
    }

    /// Re-home every entry into a wider format, preserving values exactly.
    pub fn widen(&self, to: FixedFormat) -> Self {
        let shift = to
            .frac_bits
            .checked_sub(self.format.frac_bits)
            .expect("widen must not drop fraction bits");
        let data = self
            .data
            .iter()
            .map(|&r| {
                let wide = (r as i128) << shift;
                assert!(wide >= to.min_raw() as i128 && wide <= to.max_raw() as i128);
                wide as i64
            })
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            format: to,
            data,
        }
    }

    /// 2x2 convenience constructor.
    pub fn from2x2(raws: [i64; 4], format: FixedFormat) -> Self {
        Self::from_raws(2, 2, raws.to_vec(), format)
    }

    /// Frobenius norm over exact integer squares, reported as a real value.
    pub fn frobenius_norm(&self) -> f64 {
        let sum: u128 = self
            .data
            .iter()
            .map(|&r| (r as i128 * r as i128) as u128)
            .sum();
        (sum as f64).sqrt() * self.format.ulp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_diagonal() {
        let f = FixedFormat::new(32, 24);
        let m = FixedMatrix::identity(3, f);
        assert_eq!(m.value(0, 0), 1.0);
        assert_eq!(m.value(1, 0), 0.0);
    }

    #[test]
    fn quantize_round_trips_exact_values() {
        let f = FixedFormat::new(16, 12);
        let mut ev = OverflowCounter::new();
        let m = FixedMatrix::quantize(1, 2, &[0.25, -1.5], f, &mut ev);
        assert_eq!(m.value(0, 0), 0.25);
        assert_eq!(m.value(0, 1), -1.5);
        assert_eq!(ev.count(), 0);
    }
}
