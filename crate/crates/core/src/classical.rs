//! Classical two-moment waiting-time bounds (Kingman, Daley, Chen–Whitt)
//! for comparison against the MAD-based tight bounds, plus the
//! mean–variance bracketing and heavy-traffic limit checks.

use crate::ambiguity::{variance_bracket_to_mad, AmbiguitySet};
use crate::error::{Error, Result};
use crate::extremal::heavy_tail_family;
use crate::simulate::{simulate_max, SimConfig, SimEstimate};
use crate::steady_state::{contour_cumulant, cumulant_upper, ContourConfig};
use crate::transient::upper_bound_spitzer;

/// First two moments of the interarrival time U and service time V.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MomentSpec {
    pub mean_u: f64,
    pub var_u: f64,
    pub mean_v: f64,
    pub var_v: f64,
}

impl MomentSpec {
    pub fn new(mean_u: f64, var_u: f64, mean_v: f64, var_v: f64) -> Result<Self> {
        if var_u < 0.0 || var_v < 0.0 {
            return Err(Error::BadParameter(format!(
                "variances must be nonnegative, got ({var_u}, {var_v})"
            )));
        }
        if mean_u <= 0.0 {
            return Err(Error::BadParameter(format!("mean interarrival {mean_u} must be > 0")));
        }
        Ok(MomentSpec { mean_u, var_u, mean_v, var_v })
    }

    /// Derives the moments from a pair of ambiguity sets: means carried over,
    /// variances those of the worst-case three-point laws, d(b-a)/2.
    pub fn from_ambiguity(arrival: &AmbiguitySet, service: &AmbiguitySet) -> Result<Self> {
        MomentSpec::new(
            arrival.mu,
            arrival.d * (arrival.b - arrival.a) / 2.0,
            service.mu,
            service.d * (service.b - service.a) / 2.0,
        )
    }

    pub fn rho(&self) -> f64 {
        self.mean_v / self.mean_u
    }

    fn require_stable(&self) -> Result<f64> {
        let rho = self.rho();
        if rho >= 1.0 {
            return Err(Error::Unstable { rho });
        }
        Ok(rho)
    }
}

/// Kingman's upper bound (sigma_V^2 + sigma_U^2) / (2 (E[U] - E[V])).
pub fn kingman(spec: &MomentSpec) -> Result<f64> {
    spec.require_stable()?;
    Ok((spec.var_v + spec.var_u) / (2.0 * (spec.mean_u - spec.mean_v)))
}

/// Daley's refinement (sigma_V^2 + rho(2-rho) sigma_U^2) / (2 (E[U] - E[V])).
pub fn daley(spec: &MomentSpec) -> Result<f64> {
    let rho = spec.require_stable()?;
    Ok((spec.var_v + rho * (2.0 - rho) * spec.var_u) / (2.0 * (spec.mean_u - spec.mean_v)))
}

/// Solves the fixed point delta = exp(-(1-delta)/rho) on (0, 1) by
/// safeguarded Newton with a bisection fallback, to 1e-14.
pub fn chen_whitt_delta(rho: f64) -> Result<f64> {
    if !(0.0 < rho && rho < 1.0) {
        return Err(Error::Unstable { rho });
    }
    let f = |delta: f64| delta - (-(1.0 - delta) / rho).exp();
    let fprime = |delta: f64| 1.0 - (-(1.0 - delta) / rho).exp() / rho;
    // f(0) < 0 and f(1-) > 0 bracket the root.
    let (mut lo, mut hi) = (1e-16, 1.0 - 1e-16);
    let mut x = 0.5;
    for _ in 0..200 {
        let fx = f(x);
        if fx.abs() < 1e-15 {
            break;
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let dfx = fprime(x);
        let newton = x - fx / dfx;
        x = if dfx.abs() > 1e-300 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(x)
}

/// Chen and Whitt's refinement based on the two-point conjecture:
/// (sigma_V^2 + kappa sigma_U^2) / (2 (E[U] - E[V])) with
/// kappa = 2 rho (1 - rho) / (1 - delta).
pub fn chen_whitt(spec: &MomentSpec) -> Result<f64> {
    let rho = spec.require_stable()?;
    if rho <= 0.0 {
        return Err(Error::Unstable { rho });
    }
    let delta = chen_whitt_delta(rho)?;
    let kappa = 2.0 * rho * (1.0 - rho) / (1.0 - delta);
    Ok((spec.var_v + kappa * spec.var_u) / (2.0 * (spec.mean_u - spec.mean_v)))
}

/// Evaluation horizon for the bracketing bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    Transient(usize),
    Steady,
}

/// Envelope that brackets the (unknown) tight mean-variance bound between
/// the mean-MAD tight bounds at d_min = 2 sigma^2/(b-a) and d_max = sigma.
///
/// Returned as (lower_env, upper_env); `m` is the cumulant order for the
/// steady-state horizon.
pub fn mad_bracket_bound(
    mu: f64,
    sigma: f64,
    a: f64,
    b: f64,
    horizon: Horizon,
    m: u32,
) -> Result<(f64, f64)> {
    let (d_min, d_max) = variance_bracket_to_mad(mu, sigma, a, b)?;
    // Variance feasibility allows sigma beyond the MAD cap near the support
    // edges; every admissible MAD still sits below the cap, so the upper
    // envelope clamps there.
    let cap = 2.0 * (b - mu) * (mu - a) / (b - a);
    let evaluate = |d: f64| -> Result<f64> {
        let set = AmbiguitySet::new(a, mu, b, d)?;
        match horizon {
            Horizon::Transient(n) => {
                upper_bound_spitzer(&crate::extremal::worst_case_three_point(&set)?, n)
            }
            Horizon::Steady => Ok(cumulant_upper(&set, m, &ContourConfig::default())?.value),
        }
    };
    Ok((evaluate(d_min)?, evaluate(d_max.min(cap))?))
}

/// One row of the heavy-traffic convergence report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitCheckRow {
    pub xi: f64,
    /// Simulated E[M_n] at the probing horizon.
    pub simulated: SimEstimate,
    /// Exact E[M] from the contour integral for this family member.
    pub exact: f64,
    /// |exact - sigma^2/(-2 mu)|.
    pub gap: f64,
}

/// Report of E[M] approaching the heavy-traffic limit sigma^2/(-2 mu) along
/// the heavy-tail family.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCheckReport {
    pub target: f64,
    pub rows: Vec<LimitCheckRow>,
}

/// For each xi, computes E[M] of the heavy-tail family member exactly and by
/// simulation, reporting the gap to the limit sigma^2/(-2 mu).
pub fn heavy_traffic_limit_check(
    mu: f64,
    sigma: f64,
    a: f64,
    xi_list: &[f64],
    cfg: &SimConfig,
) -> Result<LimitCheckReport> {
    if !(mu < 0.0) {
        return Err(Error::NoPositiveDrift { mean: mu });
    }
    let target = sigma * sigma / (-2.0 * mu);
    let mut rows = Vec::with_capacity(xi_list.len());
    for &xi in xi_list {
        let dist = heavy_tail_family(mu, sigma, a, xi)?;
        let exact = contour_cumulant(&dist, 1, &ContourConfig::default())?;
        let simulated = simulate_max(&dist, cfg.horizon, cfg)?;
        rows.push(LimitCheckRow { xi, simulated, exact, gap: (exact - target).abs() });
    }
    Ok(LimitCheckReport { target, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table_spec(rho: f64) -> MomentSpec {
        // Arrival set (0,10) mu=1 d=1, service set (0,10) mu=rho d=0.1:
        // variances d(b-a)/2 = 5 and 0.5.
        MomentSpec::new(1.0, 5.0, rho, 0.5).unwrap()
    }

    #[test]
    fn kingman_examples() {
        assert_relative_eq!(kingman(&table_spec(0.5)).unwrap(), 5.5, epsilon = 1e-12);
        assert_relative_eq!(kingman(&table_spec(0.8)).unwrap(), 13.75, epsilon = 1e-12);
        let zero = MomentSpec::new(1.0, 0.0, 0.5, 0.0).unwrap();
        assert_eq!(kingman(&zero).unwrap(), 0.0);
        assert!(matches!(kingman(&table_spec(1.0)).unwrap_err(), Error::Unstable { .. }));
    }

    #[test]
    fn daley_examples() {
        assert_relative_eq!(daley(&table_spec(0.5)).unwrap(), 4.25, epsilon = 1e-12);
        assert_relative_eq!(daley(&table_spec(0.8)).unwrap(), 13.25, epsilon = 1e-12);
        let zero = MomentSpec::new(1.0, 0.0, 0.5, 0.0).unwrap();
        assert_eq!(daley(&zero).unwrap(), 0.0);
    }

    #[test]
    fn chen_whitt_examples() {
        let v = chen_whitt(&table_spec(0.5)).unwrap();
        assert_relative_eq!(v, 3.63750, epsilon = 5e-6);
        assert_relative_eq!(chen_whitt_delta(0.5).unwrap(), 0.20319, epsilon = 5e-6);
        let v = chen_whitt(&table_spec(0.9)).unwrap();
        assert_relative_eq!(v, 25.80400, epsilon = 1e-4);
    }

    #[test]
    fn delta_fixed_point_residual() {
        for i in 1..100 {
            let rho = i as f64 / 100.0;
            let delta = chen_whitt_delta(rho).unwrap();
            let residual = (delta - (-(1.0 - delta) / rho).exp()).abs();
            assert!(residual < 1e-13, "rho={rho}: residual {residual}");
        }
    }

    #[test]
    fn chen_whitt_continuous_at_small_rho() {
        // delta -> 0 so kappa -> 2 rho (1-rho).
        let rho = 1e-3;
        let delta = chen_whitt_delta(rho).unwrap();
        assert!(delta < 1e-12);
        let spec = MomentSpec::new(1.0, 5.0, rho, 0.5).unwrap();
        let expected =
            (0.5 + 2.0 * rho * (1.0 - rho) * 5.0) / (2.0 * (1.0 - rho));
        assert_relative_eq!(chen_whitt(&spec).unwrap(), expected, max_relative = 1e-10);
    }

    #[test]
    fn classical_ordering() {
        for rho in [0.1, 0.5, 0.8, 0.9, 0.99] {
            let spec = table_spec(rho);
            let cw = chen_whitt(&spec).unwrap();
            let da = daley(&spec).unwrap();
            let ki = kingman(&spec).unwrap();
            assert!(cw <= da + 1e-12 && da <= ki + 1e-12, "rho={rho}: {cw} {da} {ki}");
        }
    }

    #[test]
    fn chen_whitt_approaches_kingman_in_heavy_traffic() {
        let spec = table_spec(0.99);
        let ratio = chen_whitt(&spec).unwrap() / kingman(&spec).unwrap();
        assert!(ratio > 0.99, "ratio {ratio}");
        assert_relative_eq!(chen_whitt(&spec).unwrap(), 2.76091 * 0.99 / 0.01, epsilon = 5e-3);
        assert_relative_eq!(kingman(&spec).unwrap(), 2.77778 * 0.99 / 0.01, epsilon = 5e-3);
    }

    #[test]
    fn bracket_orders_and_collapses() {
        let (lo, hi) = mad_bracket_bound(-1.0, 1.0, -2.0, 2.0, Horizon::Steady, 1).unwrap();
        assert!(lo <= hi, "{lo} vs {hi}");
        let (lo_t, hi_t) =
            mad_bracket_bound(-1.0, 1.0, -2.0, 2.0, Horizon::Transient(10), 1).unwrap();
        assert!(lo_t <= hi_t);
        // sigma = (b-a)/2 collapses the bracket.
        let (lo, hi) = mad_bracket_bound(0.0, 2.0, -2.0, 2.0, Horizon::Transient(5), 1).unwrap();
        assert_relative_eq!(lo, hi, max_relative = 1e-12);
    }

    #[test]
    fn heavy_traffic_target_value() {
        let cfg = SimConfig { replications: 4_000, horizon: 600, seed: 5, batch_count: 8 };
        let report = heavy_traffic_limit_check(-1.0, 1.0, -3.0, &[4.0, 8.0], &cfg).unwrap();
        assert_relative_eq!(report.target, 0.5);
        for row in &report.rows {
            assert!(
                (row.simulated.mean - row.exact).abs() <= 4.0 * row.simulated.std_error.max(1e-3),
                "{row:?}"
            );
        }
        assert!(report.rows[1].gap <= report.rows[0].gap + 1e-9);
    }
}
