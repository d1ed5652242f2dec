//! CSV builders for the reference tables. Every table is computed live from
//! the library; the '#' header lines record the inputs and solver defaults so
//! a rerun with the same flags is byte-identical.

use madqueue::ambiguity::{mad_of_family, range_from_rule, AmbiguitySet, Family, QueueSpec};
use madqueue::classical::{chen_whitt, daley, kingman, MomentSpec};
use madqueue::error::{Error, Result};
use madqueue::estimate::{mape_experiment, MapeConfig, RangeMode};
use madqueue::simulate::UniformSampler;
use madqueue::steady_state::{cumulant_upper, gg1_cumulant_upper, ContourConfig};

fn fmt(v: f64, precision: usize) -> String {
    format!("{v:.precision$}")
}

fn contour_line(cfg: &ContourConfig) -> String {
    format!(
        "# contour: offset_fraction={} tail_tol={:e} quad_tol={:e} max_height={:e}",
        cfg.offset_fraction, cfg.tail_tol, cfg.quad_tol, cfg.max_height
    )
}

/// Steady-state mean bound for the M/M/1 increment when the true support is
/// replaced by the rule range mean +- k MAD, against the exact rho^2/(1-rho).
pub fn trunc_table(precision: usize) -> Result<String> {
    const RHOS: [f64; 7] = [0.1, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99];
    const KS: [f64; 6] = [1.5, 1.75, 2.0, 2.25, 2.5, 3.0];
    let cfg = ContourConfig::default();
    let mut out = String::new();
    out.push_str("# table: trunc\n");
    out.push_str("# increment: exponential service rate 1/rho minus exponential interarrival rate 1\n");
    out.push_str("# range rule: a = mu - k d, b = mu + k d\n");
    out.push_str(&contour_line(&cfg));
    out.push('\n');
    out.push_str("rho");
    for k in KS {
        out.push_str(&format!(",k={k}"));
    }
    out.push_str(",exact\n");
    for rho in RHOS {
        let mu = rho - 1.0;
        let d = mad_of_family(Family::Mm1Increment { rho })?;
        out.push_str(&fmt(rho, 2));
        for k in KS {
            let (a, b) = range_from_rule(mu, d, k)?;
            let set = AmbiguitySet::new(a, mu, b, d)?;
            let bound = cumulant_upper(&set, 1, &cfg)?.value;
            out.push(',');
            out.push_str(&fmt(bound, precision));
        }
        out.push(',');
        out.push_str(&fmt(rho * rho / (1.0 - rho), precision));
        out.push('\n');
    }
    Ok(out)
}

/// Tight mean bound versus the classical moment bounds across the traffic
/// grid. With `cov = None` the dispersions are fixed (d_U = 1, d_V = 0.1);
/// otherwise they are set so U and V have the given squared coefficients of
/// variation under the worst-case laws. `scaled` reports (1-rho) E[W] / rho.
pub fn main_grid_table(cov: Option<(f64, f64)>, scaled: bool, precision: usize) -> Result<String> {
    const RHOS: [f64; 8] = [0.1, 0.2, 0.5, 0.7, 0.8, 0.9, 0.95, 0.99];
    const B: f64 = 10.0;
    let cfg = ContourConfig::default();
    let mut out = String::new();
    match cov {
        None => out.push_str(&format!(
            "# table: {}\n# sets: arrival [0,10] mu=1 d=1; service [0,10] mu=rho d=0.1\n",
            if scaled { "gg1_main" } else { "ec_unscaled" }
        )),
        Some((cu2, cv2)) => out.push_str(&format!(
            "# table: ec_cov_grid cu2={cu2} cv2={cv2} scaled={scaled}\n\
             # sets: arrival [0,10] mu=1 d=2*cu2/10; service [0,10] mu=rho d=2*rho^2*cv2/10\n"
        )),
    }
    out.push_str(&format!(
        "# value: {}\n",
        if scaled { "(1-rho) E[W] / rho" } else { "E[W]" }
    ));
    out.push_str(&contour_line(&cfg));
    out.push('\n');
    out.push_str("rho,tight,chen_whitt,daley,kingman\n");
    for rho in RHOS {
        let (d_u, d_v) = match cov {
            None => (1.0, 0.1),
            Some((cu2, cv2)) => (2.0 * cu2 / B, 2.0 * rho * rho * cv2 / B),
        };
        let arrival = AmbiguitySet::new(0.0, 1.0, B, d_u)?;
        let service = AmbiguitySet::new(0.0, rho, B, d_v)?;
        let spec = QueueSpec::new(arrival, service)?;
        let tight = gg1_cumulant_upper(&spec, 1, &cfg)?.value;
        let moments = MomentSpec::from_ambiguity(&arrival, &service)?;
        let scale = if scaled { (1.0 - rho) / rho } else { 1.0 };
        out.push_str(&fmt(rho, 2));
        for v in [tight, chen_whitt(&moments)?, daley(&moments)?, kingman(&moments)?] {
            out.push(',');
            out.push_str(&fmt(scale * v, precision));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Mean absolute percentage error of the estimated bounds against the bounds
/// of the true sets, for uniform arrivals U(0,10) and services
/// U(0,service_max), as a function of the per-stream sample size.
pub fn mape_table(
    sizes: &[usize],
    paths: usize,
    seed: u64,
    service_max: f64,
    precision: usize,
) -> Result<String> {
    if !(service_max > 0.0 && service_max < 10.0) {
        return Err(Error::BadParameter(format!(
            "service_max must lie in (0, 10) for a stable queue, got {service_max}"
        )));
    }
    let arrival_true = AmbiguitySet::with_beta(0.0, 5.0, 10.0, 2.5, 0.5)?;
    let service_true = AmbiguitySet::with_beta(
        0.0,
        service_max / 2.0,
        service_max,
        service_max / 4.0,
        0.5,
    )?;
    let true_spec = QueueSpec::new(arrival_true, service_true)?;
    let cfg = MapeConfig {
        sample_sizes: sizes.to_vec(),
        paths,
        seed,
        range_mode_arrival: RangeMode::Explicit(0.0, 10.0),
        range_mode_service: RangeMode::Explicit(0.0, service_max),
        contour: MapeConfig::experiment_contour(),
    };
    let rows = mape_experiment(
        &UniformSampler { a: 0.0, b: 10.0 },
        &UniformSampler { a: 0.0, b: service_max },
        &true_spec,
        &cfg,
    )?;
    let mut out = String::new();
    out.push_str(&format!(
        "# table: mape paths={paths} seed={seed} arrivals=U(0,10) services=U(0,{service_max})\n"
    ));
    out.push_str(&contour_line(&cfg.contour));
    out.push('\n');
    out.push_str("n,upper_mape,lower_mape,redraws\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.n,
            fmt(row.upper_mape, precision),
            fmt(row.lower_mape, precision),
            row.redraws
        ));
    }
    Ok(out)
}
