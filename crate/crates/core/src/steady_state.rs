//! Steady-state cumulant bounds via Pollaczek-type contour integrals.
//!
//! For a negative-drift walk with increment mgf `phi`, the m-th cumulant of
//! the all-time maximum is
//!
//! ```text
//! c_m(M) = (-1)^m/(2 pi i)  \int_C  log(1 - phi(-u)) / u^{m+1}  du
//! ```
//!
//! with `C` a vertical line strictly between the singularities at `u = 0` and
//! `u = -theta*` (the Cramér root). We integrate along `u = -c + it`,
//! exploiting conjugate symmetry to fold onto `t >= 0`.
//!
//! For finite-support increments `phi(-u)` does not decay as `|t|` grows, so
//! plain truncation converges only like `T^{-m}`. The integrand's
//! non-oscillating (mean) component is therefore estimated on the fly and its
//! tail integrated in closed form; the remaining purely oscillatory part
//! decays one order faster, which makes moderate truncation heights
//! sufficient.

use num_complex::Complex64;

use crate::ambiguity::{AmbiguitySet, QueueSpec};
use crate::error::{Error, Result};
use crate::extremal::{best_case_two_point, worst_case_three_point, DiscreteDistribution};

/// Placement and tolerance knobs for the contour integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourConfig {
    /// Contour abscissa as a fraction of the Cramér root, in (0,1).
    pub offset_fraction: f64,
    /// Stop once successive tail-corrected estimates agree to this tolerance
    /// (relative for values above 1).
    pub tail_tol: f64,
    /// Absolute quadrature tolerance per truncation block.
    pub quad_tol: f64,
    /// Hard cap on the truncation height |Im u|.
    pub max_height: f64,
}

impl Default for ContourConfig {
    fn default() -> Self {
        Self { offset_fraction: 0.5, tail_tol: 1e-9, quad_tol: 1e-9, max_height: 1e6 }
    }
}

impl ContourConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.offset_fraction > 0.0 && self.offset_fraction < 1.0) {
            return Err(Error::BadParameter(format!(
                "offset_fraction must lie in (0,1), got {}",
                self.offset_fraction
            )));
        }
        if self.tail_tol <= 0.0 || self.quad_tol <= 0.0 || self.max_height <= 0.0 {
            return Err(Error::BadParameter("contour tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// A computed cumulant bound with the configuration that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantBound {
    /// Cumulant order (1 = mean, 2 = variance, 3 = third central moment).
    pub m: u32,
    pub value: f64,
    pub direction: crate::transient::Direction,
    pub contour: ContourConfig,
}

/// Moment generating function E[e^{sX}] of a finite-support law at complex s.
pub fn mgf(dist: &DiscreteDistribution, s: Complex64) -> Complex64 {
    dist.points()
        .iter()
        .zip(dist.probs())
        .map(|(&x, &p)| p * (s * x).exp())
        .sum()
}

/// The positive solution theta* of E[e^{theta X}] = 1 for a negative-drift
/// walk; the nearest singularity constraining contour placement.
///
/// Returns `f64::INFINITY` when the walk has no positive support point (the
/// mgf then stays below 1 for all theta > 0 and M is identically 0).
pub fn cramer_root(dist: &DiscreteDistribution) -> Result<f64> {
    let mean = dist.mean();
    if mean >= 0.0 {
        return Err(Error::NoPositiveDrift { mean });
    }
    if dist.max_point() <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let phi = |theta: f64| -> f64 {
        dist.points()
            .iter()
            .zip(dist.probs())
            .map(|(&x, &p)| p * (theta * x).min(700.0).exp())
            .sum::<f64>()
    };
    // phi(0) = 1 with negative slope; phi grows past 1 again at theta*.
    let mut hi = 1.0 / dist.max_point();
    while phi(hi) <= 1.0 {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::QuadratureFailure(
                "Cramér root search did not bracket a solution".into(),
            ));
        }
    }
    let mut lo = hi / 2.0;
    while phi(lo) > 1.0 {
        lo /= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo) <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

// Gauss 7 / Kronrod 15 abscissae and weights (positive half; QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_6,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod 15 panel for three complex integrands sharing nodes.
/// Returns the three Kronrod values, the error estimate of the first, and
/// the L1 mass of the first (its roundoff noise floor).
fn gk15_triple<F>(f: &F, a: f64, b: f64) -> ([Complex64; 3], f64, f64)
where
    F: Fn(f64) -> [Complex64; 3],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = [Complex64::new(0.0, 0.0); 3];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut l1 = 0.0;
    for (j, (&x, &wk)) in XGK.iter().zip(&WGK).enumerate() {
        let lo = f(center - half * x);
        let sum = if x == 0.0 {
            lo
        } else {
            let hi = f(center + half * x);
            l1 += wk * hi[0].norm();
            [lo[0] + hi[0], lo[1] + hi[1], lo[2] + hi[2]]
        };
        l1 += wk * lo[0].norm();
        for (k, s) in kron.iter_mut().zip(&sum) {
            *k += wk * s;
        }
        // Odd Kronrod indices are the embedded Gauss nodes.
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum[0];
        }
    }
    for k in &mut kron {
        *k *= half;
    }
    gauss *= half;
    (kron, (kron[0] - gauss).norm(), l1 * half)
}

/// Adaptive GK15 over [a, b]; subdivision is driven by the first component.
/// Panels whose error estimate sits at the roundoff floor of the integrand
/// (relative to its L1 mass) are accepted: no refinement can beat that.
fn adaptive_triple<F>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<[Complex64; 3]>
where
    F: Fn(f64) -> [Complex64; 3],
{
    let (vals, err, l1) = gk15_triple(f, a, b);
    let floor = 1e-14 * l1;
    if err <= tol.max(floor) || depth >= 48 {
        if depth >= 48 && err > (tol * 1e3).max(floor) {
            return Err(Error::QuadratureFailure(format!(
                "panel [{a}, {b}] did not converge (err {err:.3e} > tol {tol:.3e})"
            )));
        }
        return Ok(vals);
    }
    let mid = 0.5 * (a + b);
    let l = adaptive_triple(f, a, mid, 0.5 * tol, depth + 1)?;
    let r = adaptive_triple(f, mid, b, 0.5 * tol, depth + 1)?;
    Ok([l[0] + r[0], l[1] + r[1], l[2] + r[2]])
}

/// A slowly oscillating term `amp * exp(-i omega t)` of log(1 - phi(c - it)),
/// peeled off before numerical truncation.
#[derive(Debug, Clone, Copy)]
struct SlowMode {
    omega: f64,
    amp: f64,
}

/// First- and second-order oscillatory components of log(1 - phi) whose
/// frequency magnitude falls below `cut`: log(1 - phi) = -phi - phi^2/2 - ...
/// contributes amplitude -a_j at x_j and -a_i a_j at x_i + x_j.
fn slow_modes(points: &[f64], amps: &[f64], cut: f64) -> Vec<SlowMode> {
    let mut raw: Vec<SlowMode> = Vec::new();
    for (i, (&xi, &ai)) in points.iter().zip(amps).enumerate() {
        if xi.abs() < cut {
            raw.push(SlowMode { omega: xi, amp: -ai });
        }
        for (&xj, &aj) in points.iter().zip(amps).skip(i) {
            let omega = xi + xj;
            if omega.abs() < cut {
                let amp = if xi == xj && ai == aj { -0.5 * ai * ai } else { -ai * aj };
                raw.push(SlowMode { omega, amp });
            }
        }
    }
    // Merge coincident frequencies (exact cancellations are common on
    // symmetric supports).
    raw.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    let mut merged: Vec<SlowMode> = Vec::new();
    for mode in raw {
        match merged.last_mut() {
            Some(last) if (mode.omega - last.omega).abs() < 1e-12 => last.amp += mode.amp,
            _ => merged.push(mode),
        }
    }
    merged.retain(|m| m.amp.abs() > 1e-16);
    merged
}

/// Exact value of `int_0^inf exp(-i omega t) (-c + it)^{-mi} dt` (mi >= 2).
///
/// A short head is integrated on the real axis; the remainder is rotated
/// into the half-plane where the exponential decays (Jordan's lemma; the
/// only singularity u = 0 sits outside the swept sector).
fn mode_line_integral(omega: f64, c: f64, mi: i32) -> Result<Complex64> {
    debug_assert!(mi >= 2);
    let g = |t: Complex64| (Complex64::new(-c, 0.0) + Complex64::new(0.0, 1.0) * t).powi(-mi);
    if omega.abs() < 1e-13 {
        // Pure DC: closed form -i (-c)^{-(mi-1)} / (mi-1).
        return Ok(Complex64::new(0.0, -1.0) * Complex64::new(-c, 0.0).powi(-(mi - 1))
            / (mi - 1) as f64);
    }
    let t_r = c.max(1.0);
    let head = adaptive_triple(
        &|t: f64| {
            let e = Complex64::new(0.0, -omega * t).exp();
            [e * g(Complex64::new(t, 0.0)), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]
        },
        0.0,
        t_r,
        1e-13,
        0,
    )?[0];
    // Rotate t = t_r - i s r with s = sign(omega): exp(-i omega t) becomes
    // exp(-i omega t_r) exp(-|omega| r).
    let s = omega.signum();
    let rotated = |r: f64| -> Complex64 {
        let t = Complex64::new(t_r, -s * r);
        Complex64::new(0.0, -s) * (Complex64::new(0.0, -omega) * t).exp() * g(t)
    };
    // Dyadic segments until both the exponential and power decay make the
    // remainder negligible.
    let mut tail = Complex64::new(0.0, 0.0);
    let mut lo = 0.0f64;
    let mut hi = t_r;
    loop {
        let seg = adaptive_triple(
            &|r: f64| [rotated(r), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
            lo,
            hi,
            1e-14,
            0,
        )?[0];
        tail += seg;
        let bound = (-omega.abs() * hi).exp() * (hi.max(t_r)).powi(-(mi - 1)) / (mi - 1) as f64;
        if bound < 1e-15 || hi > 1e15 {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    Ok(head + tail)
}

/// Evaluates `(-1)^m/pi * Re \int_0^inf log(1 - phi(c - it)) / (-c + it)^{m+1} dt`
/// with DC-corrected truncation, for the increment law `dist`.
pub fn contour_cumulant(dist: &DiscreteDistribution, m: u32, cfg: &ContourConfig) -> Result<f64> {
    cfg.validate()?;
    if m == 0 {
        return Err(Error::BadParameter("cumulant order must be >= 1".into()));
    }
    let mean = dist.mean();
    if mean >= 0.0 {
        return Err(Error::NoPositiveDrift { mean });
    }
    if dist.max_point() <= 0.0 {
        // All partial sums stay nonpositive: M = 0 almost surely.
        return Ok(0.0);
    }
    let theta_star = cramer_root(dist)?;
    let c = cfg.offset_fraction * theta_star;

    let points: Vec<f64> = dist.points().to_vec();
    // Precompute the constant moduli p_j e^{c x_j} once.
    let amps: Vec<f64> = dist
        .points()
        .iter()
        .zip(dist.probs())
        .map(|(&x, &p)| p * (c * x).exp())
        .collect();
    let mi = m as i32;
    let x_max = dist.points().iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let osc_period = 2.0 * std::f64::consts::PI / x_max;

    // Frequencies slower than this are peeled off and integrated exactly;
    // the rest average out within a truncation window.
    let omega_cut = 0.02 * x_max;
    let modes = slow_modes(&points, &amps, omega_cut);
    let mut mode_constant = Complex64::new(0.0, 0.0);
    for mode in &modes {
        mode_constant += mode.amp * mode_line_integral(mode.omega, c, mi + 1)?;
    }

    // Residual log-transform after removing the slow modes: every surviving
    // oscillation completes many periods per truncation window.
    //
    // 1 - phi(c - it) is formed as -sum_j p_j (e^{(c-it)x_j} - 1): near the
    // Cramer singularity 1 - phi is tiny and the naive difference would lose
    // most of its digits to cancellation against the leading 1.
    let expm1_amps: Vec<f64> =
        dist.points().iter().zip(dist.probs()).map(|(&x, &p)| p * (c * x).exp_m1()).collect();
    let psi = |t: f64| -> Complex64 {
        let mut one_minus_phi = Complex64::new(0.0, 0.0);
        for ((&x, &em), &a) in points.iter().zip(&expm1_amps).zip(&amps) {
            let (sin, cos) = (t * x).sin_cos();
            let half = (0.5 * t * x).sin();
            // p_j e^{(c-it)x_j} - p_j, with p_j = a_j - em_j.
            one_minus_phi -= Complex64::new(em * cos - 2.0 * (a - em) * half * half, -a * sin);
        }
        let mut out = one_minus_phi.ln();
        for mode in &modes {
            out -= mode.amp * Complex64::new(0.0, -mode.omega * t).exp();
        }
        out
    };
    let g = |t: f64| Complex64::new(-c, t).powi(-(mi + 1));

    let m_factorial: f64 = (1..=m).map(|k| k as f64).product();
    let scale = if m % 2 == 0 { m_factorial } else { -m_factorial } / std::f64::consts::PI;
    let tail_factor = |t_end: f64| -> Complex64 {
        // \int_T^inf (-c + it)^{-(m+1)} dt = -i (-c + iT)^{-m} / m.
        Complex64::new(0.0, -1.0) * Complex64::new(-c, t_end).powi(-mi) / m as f64
    };

    // Truncation checkpoints double from here.
    let mut t_check = (64.0 * osc_period).max(8.0 * c.min(1e3)).max(64.0 / omega_cut.max(1e-3));
    let zero = Complex64::new(0.0, 0.0);
    let mut int_main =
        adaptive_triple(&|t: f64| [psi(t) * g(t), zero, zero], 0.0, t_check, 0.25 * cfg.quad_tol, 0)?[0];
    let mut prev_corrected: Option<f64> = None;

    loop {
        let t = t_check;
        // Smooth cos^2 taper on the window [t, 2t]: cuts the truncation error
        // of every surviving oscillation to second order, while the windowed
        // mean of psi catches whatever slow residue is left (integrated
        // against the exact tail of g).
        let w = |s: f64| 0.5 * (1.0 + (std::f64::consts::PI * (s - t) / t).cos());
        let window = adaptive_triple(
            &|s: f64| {
                let ps = psi(s);
                let gs = g(s);
                let ws = w(s);
                [ps * gs, ps * gs * ws, ps * ws]
            },
            t,
            2.0 * t,
            0.25 * cfg.quad_tol,
            0,
        )?;
        let g_tapered =
            adaptive_triple(&|s: f64| [g(s) * w(s), zero, zero], t, 2.0 * t, 1e-14, 0)?[0];
        // Windowed mean of psi (the taper integrates to t/2).
        let dc = window[2] / (0.5 * t);
        let corrected = scale
            * (int_main + window[1] + dc * (tail_factor(t) - g_tapered) + mode_constant).re;
        if let Some(prev) = prev_corrected {
            let tol = cfg.tail_tol * corrected.abs().max(1.0);
            if (corrected - prev).abs() <= tol {
                return Ok(corrected);
            }
        }
        prev_corrected = Some(corrected);
        int_main += window[0];
        t_check *= 2.0;
        if t_check > cfg.max_height {
            return Err(Error::QuadratureFailure(format!(
                "tail tolerance unmet at max_height {}",
                cfg.max_height
            )));
        }
    }
}

/// Tight upper bound on c_m(M) for the walk with increments in `set`.
pub fn cumulant_upper(set: &AmbiguitySet, m: u32, cfg: &ContourConfig) -> Result<CumulantBound> {
    let dist = worst_case_three_point(set)?;
    let value = contour_cumulant(&dist, m, cfg)?;
    Ok(CumulantBound { m, value, direction: crate::transient::Direction::Upper, contour: *cfg })
}

/// Tight lower bound on c_m(M) from the best-case two-point law (requires
/// beta in the set).
pub fn cumulant_lower(set: &AmbiguitySet, m: u32, cfg: &ContourConfig) -> Result<CumulantBound> {
    let dist = best_case_two_point(set)?;
    let value = contour_cumulant(&dist, m, cfg)?;
    Ok(CumulantBound { m, value, direction: crate::transient::Direction::Lower, contour: *cfg })
}

/// Tight upper bound on c_m(W) for the GI/G/1 queue: the contour integrand
/// uses phi_V(-u) phi_U(u), evaluated through the 9-point law of V_(3) - U_(3).
pub fn gg1_cumulant_upper(spec: &QueueSpec, m: u32, cfg: &ContourConfig) -> Result<CumulantBound> {
    spec.require_stable()?;
    let service = worst_case_three_point(&spec.service)?;
    let arrival = worst_case_three_point(&spec.arrival)?;
    let increment = service.difference(&arrival);
    let value = contour_cumulant(&increment, m, cfg)?;
    Ok(CumulantBound { m, value, direction: crate::transient::Direction::Upper, contour: *cfg })
}

/// Tight lower bound on c_m(W): best-case two-point laws for both the service
/// and interarrival sets (betas required on both).
pub fn gg1_cumulant_lower(spec: &QueueSpec, m: u32, cfg: &ContourConfig) -> Result<CumulantBound> {
    spec.require_stable()?;
    let service = best_case_two_point(&spec.service)?;
    let arrival = best_case_two_point(&spec.arrival)?;
    let increment = service.difference(&arrival);
    let value = contour_cumulant(&increment, m, cfg)?;
    Ok(CumulantBound { m, value, direction: crate::transient::Direction::Lower, contour: *cfg })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::AmbiguitySet;
    use approx::assert_relative_eq;

    #[test]
    fn mgf_examples() {
        let pm = DiscreteDistribution::point_mass(2.5);
        let s = Complex64::new(0.3, -0.7);
        let expect = (s * 2.5).exp();
        assert!((mgf(&pm, s) - expect).norm() < 1e-14);

        let sym = DiscreteDistribution::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert_relative_eq!(mgf(&sym, Complex64::new(0.8, 0.0)).re, 0.8f64.cosh());
        assert_relative_eq!(mgf(&sym, Complex64::new(0.0, 0.0)).re, 1.0);
    }

    #[test]
    fn cramer_root_examples() {
        let dist = DiscreteDistribution::new(vec![-1.0, 1.0], vec![0.75, 0.25]).unwrap();
        assert_relative_eq!(cramer_root(&dist).unwrap(), 3.0f64.ln(), max_relative = 1e-11);

        let pm = DiscreteDistribution::point_mass(-1.0);
        assert!(cramer_root(&pm).unwrap().is_infinite());

        let dist =
            DiscreteDistribution::new(vec![-2.0, 0.0, 2.0], vec![0.5, 1.0 / 3.0, 1.0 / 6.0])
                .unwrap();
        let theta = cramer_root(&dist).unwrap();
        let phi = 0.5 * (-2.0 * theta).exp() + 1.0 / 3.0 + (2.0 * theta).exp() / 6.0;
        assert_relative_eq!(phi, 1.0, epsilon = 1e-10);

        let pos = DiscreteDistribution::new(vec![-1.0, 1.0], vec![0.25, 0.75]).unwrap();
        assert!(matches!(cramer_root(&pos).unwrap_err(), Error::NoPositiveDrift { .. }));
    }

    #[test]
    fn simple_walk_mean_maximum() {
        // Up with prob 1/4, down with prob 3/4: M is geometric with ratio
        // 1/3, so E[M] = 0.5, Var[M] = (1/3)/(1-1/3)^2 = 0.75.
        let dist = DiscreteDistribution::new(vec![-1.0, 1.0], vec![0.75, 0.25]).unwrap();
        let cfg = ContourConfig::default();
        let mean = contour_cumulant(&dist, 1, &cfg).unwrap();
        assert_relative_eq!(mean, 0.5, epsilon = 1e-8);
        let var = contour_cumulant(&dist, 2, &cfg).unwrap();
        assert_relative_eq!(var, 0.75, epsilon = 1e-8);
    }

    #[test]
    fn negative_point_mass_gives_zero() {
        let set = AmbiguitySet::new(-3.0, -1.0, -0.5, 0.2).unwrap();
        let cfg = ContourConfig::default();
        for m in 1..=3 {
            assert_eq!(cumulant_upper(&set, m, &cfg).unwrap().value, 0.0);
        }
    }

    #[test]
    fn contour_invariance() {
        let set = AmbiguitySet::new(-2.0, -1.0, 2.0, 1.0).unwrap();
        let mut values = Vec::new();
        for frac in [0.25, 0.5, 0.75] {
            let cfg = ContourConfig { offset_fraction: frac, ..Default::default() };
            values.push(cumulant_upper(&set, 1, &cfg).unwrap().value);
        }
        for w in values.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-8, "{values:?}");
        }
    }

    #[test]
    fn lower_at_most_upper() {
        let set = AmbiguitySet::with_beta(-2.0, -0.5, 2.0, 0.8, 0.4).unwrap();
        let cfg = ContourConfig::default();
        for m in 1..=2 {
            let up = cumulant_upper(&set, m, &cfg).unwrap().value;
            let lo = cumulant_lower(&set, m, &cfg).unwrap().value;
            assert!(lo <= up + 1e-9, "m={m}: lo={lo} up={up}");
            assert!(lo >= -1e-9);
        }
    }

    #[test]
    fn spitzer_series_approaches_contour_from_below() {
        // For the +-1 walk E[(S_k^+)] is exactly computable via binomials.
        let dist = DiscreteDistribution::new(vec![-1.0, 1.0], vec![0.75, 0.25]).unwrap();
        let cfg = ContourConfig::default();
        let target = contour_cumulant(&dist, 1, &cfg).unwrap();
        let series = crate::transient::upper_bound_spitzer(&dist, 220).unwrap();
        assert!(series <= target + 1e-9);
        assert_relative_eq!(series, target, epsilon = 1e-6);
    }

    #[test]
    fn gg1_dd1_is_zero() {
        let arrival = AmbiguitySet::new(0.5, 1.0, 1.5, 0.0).unwrap();
        let service = AmbiguitySet::new(0.0, 0.5, 1.0, 0.0).unwrap();
        let spec = QueueSpec::new(arrival, service).unwrap();
        let cfg = ContourConfig::default();
        assert_eq!(gg1_cumulant_upper(&spec, 1, &cfg).unwrap().value, 0.0);
    }

    #[test]
    fn gg1_table_row_rho_half() {
        // Known tabulated tight value at rho = 0.5 (scale factor 1 there).
        let arrival = AmbiguitySet::new(0.0, 1.0, 10.0, 1.0).unwrap();
        let service = AmbiguitySet::new(0.0, 0.5, 10.0, 0.1).unwrap();
        let spec = QueueSpec::new(arrival, service).unwrap();
        let cfg = ContourConfig::default();
        let val = gg1_cumulant_upper(&spec, 1, &cfg).unwrap().value;
        assert_relative_eq!(val, 2.03141, epsilon = 5e-5);
    }

    #[test]
    fn transient_increases_to_steady_state() {
        let arrival = AmbiguitySet::new(0.0, 1.0, 10.0, 1.0).unwrap();
        let service = AmbiguitySet::new(0.0, 0.5, 10.0, 0.1).unwrap();
        let spec = QueueSpec::new(arrival, service).unwrap();
        let cfg = ContourConfig::default();
        let steady = gg1_cumulant_upper(&spec, 1, &cfg).unwrap().value;
        let mut prev = 0.0;
        for n in [10, 30, 60] {
            let v = crate::transient::gg1_transient_upper(&spec, n).unwrap();
            assert!(v >= prev - 1e-12);
            assert!(v <= steady + 1e-9, "n={n}: transient {v} exceeds steady {steady}");
            prev = v;
        }
    }
}
