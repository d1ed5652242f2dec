//! Independent high-accuracy oracle for the all-time maximum of a
//! commensurate three-point walk, via the bulk-service queue construction.
//!
//! When the support is a multiple of |mu| (a = -s|mu|, b = m|mu|), the
//! normalized walk is an integer-valued bulk-service queue whose stationary
//! pgf is a finite product over the s-1 zeros of `z^s - E[z^A]` inside the
//! unit disk. Differentiating the log-pgf at w = 1 gives exact cumulants,
//! which serve as a cross-check for the contour integration.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::steady_state::{contour_cumulant, ContourConfig};
use crate::extremal::worst_case_three_point;
use crate::ambiguity::AmbiguitySet;

/// A normalized bulk-service instance with increment support {-s, -1, m}.
#[derive(Debug, Clone, PartialEq)]
pub struct BulkServiceInstance {
    /// Downward span: a = -s |mu|, s >= 2.
    pub s: usize,
    /// Upward span: b = m |mu|, m >= 1.
    pub m_big: usize,
    /// The |mu| normalization factor.
    pub beta_scale: f64,
    /// MAD of the normalized increment.
    pub d: f64,
    /// Probabilities (p_a, p_mu, p_b) of A on {0, s-1, s+m}.
    pub p_a: f64,
    pub p_mu: f64,
    pub p_b: f64,
}

impl BulkServiceInstance {
    /// Ascending coefficients of z^s - E[z^A] = -p_a - p_mu z^{s-1} + z^s - p_b z^{m+s}.
    fn polynomial(&self) -> Vec<f64> {
        let mut coeffs = vec![0.0; self.m_big + self.s + 1];
        coeffs[0] = -self.p_a;
        coeffs[self.s - 1] -= self.p_mu;
        coeffs[self.s] += 1.0;
        coeffs[self.m_big + self.s] -= self.p_b;
        coeffs
    }

    /// The unique real zero r0 > 1 of z^s - E[z^A], the radius of convergence
    /// of the stationary pgf. Diagnostic only.
    pub fn decay_radius(&self) -> Option<f64> {
        if self.p_b <= 0.0 {
            return None;
        }
        let f = |z: f64| {
            z.powi(self.s as i32)
                - self.p_a
                - self.p_mu * z.powi(self.s as i32 - 1)
                - self.p_b * z.powi((self.m_big + self.s) as i32)
        };
        let mut lo = 1.0;
        let mut hi = 2.0;
        while f(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > 1e12 {
                return None;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Normalizes a commensurate three-point ambiguity description into a
/// bulk-service instance.
pub fn from_three_point(a: f64, mu: f64, b: f64, d: f64) -> Result<BulkServiceInstance> {
    if !(mu < 0.0) {
        return Err(Error::BadParameter(format!("oracle needs mu < 0, got {mu}")));
    }
    let beta_scale = -mu;
    let s_real = -a / beta_scale;
    let m_real = b / beta_scale;
    let s = s_real.round();
    let m = m_real.round();
    if (s_real - s).abs() > 1e-9 || (m_real - m).abs() > 1e-9 {
        return Err(Error::NotCommensurate(format!(
            "a/mu = {s_real}, b/|mu| = {m_real} are not integers"
        )));
    }
    if s < 2.0 || m < 1.0 {
        return Err(Error::NotCommensurate(format!(
            "need a = -s|mu| with s >= 2 and b = m|mu| with m >= 1, got s={s}, m={m}"
        )));
    }
    let (s, m_big) = (s as usize, m as usize);
    let d_norm = d / beta_scale;
    let p_a = d_norm / (2.0 * (s as f64 - 1.0));
    let p_b = d_norm / (2.0 * (m_big as f64 + 1.0));
    let p_mu = 1.0 - p_a - p_b;
    if p_a < 0.0 || p_b < 0.0 || p_mu < -1e-12 {
        return Err(Error::BadParameter(format!(
            "MAD {d} infeasible on normalized support: probs ({p_a}, {p_mu}, {p_b})"
        )));
    }
    Ok(BulkServiceInstance { s, m_big, beta_scale, d: d_norm, p_a, p_mu: p_mu.max(0.0), p_b })
}

/// The s-1 zeros of z^s - E[z^A] inside the open unit disk.
///
/// The root at z = 1 is removed by explicit deflation; the remaining roots
/// come from companion-matrix eigenvalues and are polished by Newton steps.
pub fn unit_disk_roots(inst: &BulkServiceInstance) -> Result<Vec<Complex64>> {
    let coeffs = inst.polynomial();
    // Deflate the known root z = 1 (A has mean s-1 so P(1) = 0).
    let deflated = deflate_at_one(&coeffs);
    let roots = polynomial_roots(&deflated)?;
    let polished: Vec<Complex64> =
        roots.into_iter().map(|z| newton_polish(&deflated, z)).collect();
    let inside: Vec<Complex64> =
        polished.into_iter().filter(|z| z.norm() < 1.0 - 1e-9).collect();
    if inside.len() != inst.s - 1 {
        return Err(Error::RootCountMismatch { expected: inst.s - 1, found: inside.len() });
    }
    Ok(inside)
}

/// Synthetic division of an ascending-coefficient polynomial by (z - 1).
fn deflate_at_one(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len() - 1;
    let mut quotient = vec![0.0; n];
    // Descending synthetic division with root 1.
    let mut carry = coeffs[n];
    for k in (0..n).rev() {
        quotient[k] = carry;
        carry = coeffs[k] + carry;
    }
    debug_assert!(carry.abs() < 1e-9, "remainder {carry} deflating at z=1");
    quotient
}

/// All roots of an ascending-coefficient real polynomial via the companion
/// matrix of its monic normalization.
fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|v| *v == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    let comp = DMatrix::<f64>::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eigen = comp.complex_eigenvalues();
    Ok(eigen.iter().map(|e| Complex64::new(e.re, e.im)).collect())
}

fn poly_eval(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    // Horner for value and derivative.
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dv = dv * z + v;
        v = v * z + c;
    }
    (v, dv)
}

fn newton_polish(coeffs: &[f64], mut z: Complex64) -> Complex64 {
    for _ in 0..8 {
        let (v, dv) = poly_eval(coeffs, z);
        if dv.norm() == 0.0 {
            break;
        }
        let step = v / dv;
        z -= step;
        if step.norm() < 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Truncated power series in theta with complex coefficients, degree <= 3.
#[derive(Clone, Copy)]
struct Series([Complex64; 4]);

impl Series {
    fn constant(c: Complex64) -> Self {
        Series([c, Complex64::default(), Complex64::default(), Complex64::default()])
    }

    fn mul(&self, other: &Series) -> Series {
        let mut out = [Complex64::default(); 4];
        for i in 0..4 {
            for j in 0..4 - i {
                out[i + j] += self.0[i] * other.0[j];
            }
        }
        Series(out)
    }

    /// log of a series with nonzero constant term (principal branch).
    fn log(&self) -> Series {
        let a0 = self.0[0];
        let x = Series([
            Complex64::default(),
            self.0[1] / a0,
            self.0[2] / a0,
            self.0[3] / a0,
        ]);
        // log(1 + x) = x - x^2/2 + x^3/3 for x with zero constant term.
        let x2 = x.mul(&x);
        let x3 = x2.mul(&x);
        let mut out = [Complex64::default(); 4];
        out[0] = a0.ln();
        for k in 1..4 {
            out[k] = x.0[k] - x2.0[k] / 2.0 + x3.0[k] / 3.0;
        }
        Series(out)
    }
}

/// Series of w = e^theta around theta = 0.
fn exp_theta_series() -> Series {
    Series([
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(1.0 / 6.0, 0.0),
    ])
}

/// m-th cumulant of M (in original units) from the finite product formula,
/// m in {1, 2, 3}.
pub fn waiting_pgf_cumulants(inst: &BulkServiceInstance, m_order: u32) -> Result<f64> {
    if !(1..=3).contains(&m_order) {
        return Err(Error::BadParameter(format!("cumulant order {m_order} not in 1..=3")));
    }
    let roots = unit_disk_roots(inst)?;
    let w = exp_theta_series();
    // Powers of w up to the quotient degree.
    let quotient = deflate_at_one(&inst.polynomial());
    let deg = quotient.len() - 1;
    let mut w_pows = Vec::with_capacity(deg + 1);
    w_pows.push(Series::constant(Complex64::new(1.0, 0.0)));
    for k in 1..=deg {
        w_pows.push(w_pows[k - 1].mul(&w));
    }
    // log E[w^M] = -log Q(w) + sum_k [log(w - z_k) - log(1 - z_k)], where
    // Q(w) = (w^s - A(w))/(w - 1); the (w-1)/(w^s - A(w)) factor is 1/Q
    // extended by continuity at w = 1 (Q(1) = 1 since E[A] = s-1).
    let mut q_series = Series::constant(Complex64::default());
    for (k, &c) in quotient.iter().enumerate() {
        for i in 0..4 {
            q_series.0[i] += c * w_pows[k].0[i];
        }
    }
    let mut h = q_series.log();
    for i in 0..4 {
        h.0[i] = -h.0[i];
    }
    for z in &roots {
        let mut shifted = w;
        shifted.0[0] -= z;
        let term = shifted.log();
        let base = (Complex64::new(1.0, 0.0) - z).ln();
        h.0[0] += term.0[0] - base;
        for i in 1..4 {
            h.0[i] += term.0[i];
        }
    }
    // Conjugate root pairs make the series real; the residual imaginary part
    // is numerical noise.
    let factorial = [1.0, 1.0, 2.0, 6.0];
    let normalized = factorial[m_order as usize] * h.0[m_order as usize].re;
    Ok(inst.beta_scale.powi(m_order as i32) * normalized)
}

/// Discrepancy report between the lattice oracle and the contour integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheck {
    pub oracle: f64,
    pub contour: f64,
    pub abs_diff: f64,
}

/// Runs both pipelines on a commensurate instance and reports the gap.
pub fn cross_check(a: f64, mu: f64, b: f64, d: f64, m_order: u32) -> Result<CrossCheck> {
    let set = AmbiguitySet::new(a, mu, b, d)?;
    let contour = if d == 0.0 {
        0.0
    } else {
        let dist = worst_case_three_point(&set)?;
        contour_cumulant(&dist, m_order, &ContourConfig::default())?
    };
    let oracle = if d == 0.0 {
        0.0
    } else {
        waiting_pgf_cumulants(&from_three_point(a, mu, b, d)?, m_order)?
    };
    Ok(CrossCheck { oracle, contour, abs_diff: (oracle - contour).abs() })
}
