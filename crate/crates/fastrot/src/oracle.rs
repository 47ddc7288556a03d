//! Floating-point reference implementations: exact symmetrizing and
//! direct (vertical/horizontal) rotations for a 2x2 block, and a
//! brute-force two-sided Jacobi SVD for small matrices. These are the
//! independent route every fixed-point result is checked against; speed is
//! a non-goal.

/// An exact rotation angle with its cosine/sine pair.
#[derive(Debug, Clone, Copy)]
pub struct ExactRotation {
    pub angle: f64,
    pub cos: f64,
    pub sin: f64,
}

impl ExactRotation {
    pub fn from_angle(angle: f64) -> Self {
        Self {
            angle,
            cos: angle.cos(),
            sin: angle.sin(),
        }
    }

    pub fn identity() -> Self {
        Self {
            angle: 0.0,
            cos: 1.0,
            sin: 0.0,
        }
    }
}

/// Half of the principal-branch `arctan(num/den)`, with a zero numerator
/// mapping to a zero angle and a zero denominator to ±π/4.
///
/// The principal branch keeps every intermediate angle within ±π/4, so a
/// nearly-diagonal block always produces a nearly-zero angle; the obtuse
/// `atan2` branch would turn numerical dust into quarter turns.
fn half_angle(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        0.25 * std::f64::consts::PI * num.signum()
    } else {
        0.5 * (num / den).atan()
    }
}

/// The rotation that symmetrizes a block from the left: `R·A` has equal
/// off-diagonal entries (within rounding).
pub fn exact_symmetrize(a: [[f64; 2]; 2]) -> ExactRotation {
    let num = a[1][0] - a[0][1]; // c − b
    let den = a[1][1] + a[0][0]; // d + a
    if num == 0.0 && den == 0.0 {
        return ExactRotation::identity();
    }
    ExactRotation::from_angle(if num == 0.0 { 0.0 } else { num.atan2(den) })
}

fn rot_mat(r: &ExactRotation) -> [[f64; 2]; 2] {
    [[r.cos, r.sin], [-r.sin, r.cos]]
}

fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn transpose(a: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Exact vertical/horizontal rotation pair: `R_thetaᵀ · A · R_Theta` is
/// diagonal with `d1 >= d2`.
pub fn exact_fhsvd(a: [[f64; 2]; 2]) -> (ExactRotation, ExactRotation) {
    let alpha = half_angle(a[1][0] + a[0][1], a[1][1] - a[0][0]);
    let beta = half_angle(a[1][0] - a[0][1], a[1][1] + a[0][0]);
    let mut theta = wrap_quarter(alpha - beta);
    let mut big_theta = wrap_quarter(alpha + beta);
    // enforce d1 >= d2 by composing a quarter turn on both sides
    let d = |th: f64, bt: f64| {
        let r = mat_mul(
            mat_mul(transpose(rot_mat(&ExactRotation::from_angle(th))), a),
            rot_mat(&ExactRotation::from_angle(bt)),
        );
        (r[0][0], r[1][1])
    };
    let (d1, d2) = d(theta, big_theta);
    if d1 < d2 {
        theta = wrap_quarter(theta + std::f64::consts::FRAC_PI_2);
        big_theta = wrap_quarter(big_theta + std::f64::consts::FRAC_PI_2);
    }
    (
        ExactRotation::from_angle(theta),
        ExactRotation::from_angle(big_theta),
    )
}

/// Dense column-major-free helper for the brute-force path.
#[derive(Debug, Clone)]
pub struct FloatSvd {
    pub u: Vec<f64>,
    pub sigma: Vec<f64>,
    pub v: Vec<f64>,
    pub n: usize,
}

impl FloatSvd {
    pub fn reconstruction_error(&self, a: &[f64]) -> f64 {
        let n = self.n;
        let mut err = 0.0f64;
        let mut norm = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.u[i * n + k] * self.sigma[k] * self.v[j * n + k];
                }
                err += (s - a[i * n + j]) * (s - a[i * n + j]);
                norm += a[i * n + j] * a[i * n + j];
            }
        }
        (err / norm.max(f64::MIN_POSITIVE)).sqrt()
    }
}

fn off_diag_sq(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s
}

/// Brute-force SVD by cyclic two-sided Jacobi with exact rotations,
/// iterated until the off-diagonal ratio drops below 1e-14.
pub fn brute_svd(a_in: &[f64], n: usize) -> FloatSvd {
    assert!(n >= 1 && n <= 8, "brute-force oracle is sized for n <= 8");
    assert_eq!(a_in.len(), n * n);
    let mut a = a_in.to_vec();
    let mut u = vec![0.0; n * n];
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        u[i * n + i] = 1.0;
        v[i * n + i] = 1.0;
    }
    let initial = off_diag_sq(&a, n).sqrt();
    if initial > 0.0 {
        let mut converged = false;
        for _ in 0..60 {
            for p in 0..n {
                for q in (p + 1)..n {
                    let block = [[a[p * n + p], a[p * n + q]], [a[q * n + p], a[q * n + q]]];
                    let (th, bt) = exact_fhsvd(block);
                    apply_left_t(&mut a, n, p, q, &th);
                    apply_right(&mut a, n, p, q, &bt);
                    apply_right(&mut u, n, p, q, &th);
                    apply_right(&mut v, n, p, q, &bt);
                }
            }
            if off_diag_sq(&a, n).sqrt() <= 1e-14 * initial {
                converged = true;
                break;
            }
        }
        assert!(
            converged,
            "brute-force Jacobi failed to converge; off-diagonal ratio {}",
            off_diag_sq(&a, n).sqrt() / initial
        );
    }
    // signs into U, then sort descending
    let mut sigma: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    for j in 0..n {
        if sigma[j] < 0.0 {
            sigma[j] = -sigma[j];
            for i in 0..n {
                u[i * n + j] = -u[i * n + j];
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sigma[y].partial_cmp(&sigma[x]).unwrap());
    let sigma_sorted: Vec<f64> = order.iter().map(|&k| sigma[k]).collect();
    let permute = |m: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for (jn, &jo) in order.iter().enumerate() {
                out[i * n + jn] = m[i * n + jo];
            }
        }
        out
    };
    FloatSvd {
        u: permute(&u),
        sigma: sigma_sorted,
        v: permute(&v),
        n,
    }
}

/// Rows p, q of `a` get `Rᵀ` from the left.
pub(crate) fn apply_left_t(a: &mut [f64], n: usize, p: usize, q: usize, r: &ExactRotation) {
    for j in 0..n {
        let xp = a[p * n + j];
        let xq = a[q * n + j];
        a[p * n + j] = r.cos * xp - r.sin * xq;
        a[q * n + j] = r.sin * xp + r.cos * xq;
    }
}

/// Columns p, q of `a` get `R` from the right.
pub(crate) fn apply_right(a: &mut [f64], n: usize, p: usize, q: usize, r: &ExactRotation) {
    for i in 0..n {
        let xp = a[i * n + p];
        let xq = a[i * n + q];
        a[i * n + p] = r.cos * xp - r.sin * xq;
        a[i * n + q] = r.sin * xp + r.cos * xq;
    }
}
