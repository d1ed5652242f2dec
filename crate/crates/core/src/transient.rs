//! Tight transient bounds on the expected random-walk maximum E[M_n] and the
//! GI/G/1 waiting time E[W_n].
//!
//! The workhorse is Spitzer's identity E[M_n] = sum_{k<=n} E[S_k^+]/k, which
//! turns the 3^n enumeration into an O(n^3) multinomial sum. The enumeration
//! itself is kept as an independent oracle for small n.

use crate::ambiguity::{ln_gamma, QueueSpec};
use crate::error::{Error, Result};
use crate::extremal::{worst_case_three_point, DiscreteDistribution};

/// Hard cap for the 3^n enumeration.
pub const ENUMERATION_MAX_N: usize = 12;

/// Default cap for the O(n^5) GI/G/1 transient sum.
pub const GG1_DEFAULT_MAX_N: usize = 60;

/// A computed transient bound with its metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientBound {
    pub n: usize,
    pub value: f64,
    pub direction: Direction,
    pub terms_evaluated: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Upper,
    Lower,
}

fn ln_factorials(n: usize) -> Vec<f64> {
    (0..=n).map(|k| ln_gamma(k as f64 + 1.0)).collect()
}

/// Exact E[max{0, S_1, ..., S_n}] by enumerating all |support|^n increment
/// sequences. Exponential cost; guarded by [`ENUMERATION_MAX_N`].
pub fn upper_bound_enumeration(dist: &DiscreteDistribution, n: usize) -> Result<f64> {
    if n > ENUMERATION_MAX_N {
        return Err(Error::HorizonTooLarge { n, cap: ENUMERATION_MAX_N });
    }
    fn recurse(
        points: &[f64],
        probs: &[f64],
        depth: usize,
        partial_sum: f64,
        running_max: f64,
        weight: f64,
    ) -> f64 {
        if depth == 0 {
            return weight * running_max;
        }
        let mut acc = 0.0;
        for (x, p) in points.iter().zip(probs) {
            if *p == 0.0 {
                continue;
            }
            let s = partial_sum + x;
            acc += recurse(points, probs, depth - 1, s, running_max.max(s), weight * p);
        }
        acc
    }
    Ok(recurse(dist.points(), dist.probs(), n, 0.0, 0.0, 1.0))
}

/// Spitzer sum over compositions of k into the support atoms:
/// sum_{k<=n} (1/k) E[(S_k)^+], with S_k multinomial over the given points.
///
/// Weights are accumulated in log space; compositions are visited in
/// lexicographic order so the result is scheduling-independent.
fn spitzer_sum(points: &[f64], probs: &[f64], n: usize) -> f64 {
    let lnf = ln_factorials(n);
    let ln_p: Vec<f64> = probs.iter().map(|p| p.ln()).collect();
    let mut total = 0.0;
    for k in 1..=n {
        let mut e_plus = 0.0;
        for (counts, value) in Compositions::new(k, points) {
            let contrib = value.max(0.0);
            if contrib == 0.0 {
                continue;
            }
            let mut lw = lnf[k];
            let mut skip = false;
            for (i, &ki) in counts.iter().enumerate() {
                if ki > 0 {
                    if probs[i] == 0.0 {
                        skip = true;
                        break;
                    }
                    lw += ki as f64 * ln_p[i] - lnf[ki];
                }
            }
            if !skip {
                e_plus += contrib * lw.exp();
            }
        }
        total += e_plus / k as f64;
    }
    total
}

/// Lexicographic iterator over compositions (k_1, ..., k_p) of k, yielding
/// each composition together with the weighted sum k_1 x_1 + ... + k_p x_p.
struct Compositions<'a> {
    k: usize,
    points: &'a [f64],
    counts: Vec<usize>,
    done: bool,
}

impl<'a> Compositions<'a> {
    fn new(k: usize, points: &'a [f64]) -> Self {
        let p = points.len();
        let mut counts = vec![0; p];
        counts[p - 1] = k;
        // Start from (k, 0, ..., 0) by reversing below; simplest is to set the
        // first slot and keep a running remainder instead.
        counts.fill(0);
        counts[0] = k;
        Self { k, points, counts, done: false }
    }
}

impl Iterator for Compositions<'_> {
    type Item = (Vec<usize>, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let value: f64 =
            self.counts.iter().zip(self.points).map(|(&c, &x)| c as f64 * x).sum();
        let item = (self.counts.clone(), value);
        // Advance: decrement the leftmost positive slot that still has slots
        // to its right, push the remainder into the next slot.
        let p = self.counts.len();
        let mut advanced = false;
        for i in (0..p - 1).rev() {
            if self.counts[i] > 0 {
                self.counts[i] -= 1;
                let tail: usize = self.counts[i + 1..].iter().sum();
                self.counts[i + 1] = tail + 1;
                for c in &mut self.counts[i + 2..] {
                    *c = 0;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.done = true;
        }
        debug_assert!(self.counts.iter().sum::<usize>() == self.k || self.done);
        Some(item)
    }
}

/// Tight upper bound on E[M_n] via the multinomial Spitzer sum (O(n^3) terms
/// for a three-point law).
pub fn upper_bound_spitzer(dist: &DiscreteDistribution, n: usize) -> Result<f64> {
    if dist.len() > 3 {
        return Err(Error::BadParameter(format!(
            "Spitzer upper bound expects at most 3 support points, got {}",
            dist.len()
        )));
    }
    if n == 0 {
        return Ok(0.0);
    }
    Ok(spitzer_sum(dist.points(), dist.probs(), n))
}

/// Tight lower bound on E[M_n] from the best-case two-point law (O(n^2) terms).
pub fn lower_bound_spitzer(dist: &DiscreteDistribution, n: usize) -> Result<f64> {
    if dist.len() > 2 {
        return Err(Error::BadParameter(format!(
            "Spitzer lower bound expects at most 2 support points, got {}",
            dist.len()
        )));
    }
    if n == 0 {
        return Ok(0.0);
    }
    Ok(spitzer_sum(dist.points(), dist.probs(), n))
}

/// Tight upper bound on the transient GI/G/1 waiting time E[W_n], summing over
/// pairs of multinomial compositions for the extremal service and interarrival
/// laws (O(n^5) terms).
pub fn gg1_transient_upper(spec: &QueueSpec, n: usize) -> Result<f64> {
    gg1_transient_upper_capped(spec, n, GG1_DEFAULT_MAX_N)
}

/// As [`gg1_transient_upper`] with an explicit horizon cap.
pub fn gg1_transient_upper_capped(spec: &QueueSpec, n: usize, cap: usize) -> Result<f64> {
    if n > cap {
        return Err(Error::HorizonTooLarge { n, cap });
    }
    let service = worst_case_three_point(&spec.service)?;
    let arrival = worst_case_three_point(&spec.arrival)?;
    let lnf = ln_factorials(n);
    let ln_weights = |points: &[f64], probs: &[f64], k: usize| -> Vec<(f64, f64)> {
        let ln_p: Vec<f64> = probs.iter().map(|p| p.ln()).collect();
        let mut out = Vec::new();
        'outer: for (counts, value) in Compositions::new(k, points) {
            let mut lw = lnf[k];
            for (i, &ki) in counts.iter().enumerate() {
                if ki > 0 {
                    if probs[i] == 0.0 {
                        continue 'outer;
                    }
                    lw += ki as f64 * ln_p[i] - lnf[ki];
                }
            }
            out.push((value, lw.exp()));
        }
        out
    };
    let mut total = 0.0;
    for k in 1..=n {
        // The arrival-side compositions are enumerated once per k and reused
        // across all service-side compositions.
        let arr = ln_weights(arrival.points(), arrival.probs(), k);
        let srv = ln_weights(service.points(), service.probs(), k);
        let mut e_plus = 0.0;
        for &(s_val, s_w) in &srv {
            let mut inner = 0.0;
            for &(t_val, t_w) in &arr {
                let diff = s_val - t_val;
                if diff > 0.0 {
                    inner += diff * t_w;
                }
            }
            e_plus += s_w * inner;
        }
        total += e_plus / k as f64;
    }
    Ok(total)
}

/// Limit of the tight upper bound as the support's upper end grows without
/// bound: `n d/2` plus a binomial Spitzer sum over the two remaining atoms.
pub fn infinite_range_limit(a: f64, mu: f64, d: f64, n: usize) -> Result<f64> {
    if !(mu > a) {
        return Err(Error::BadParameter(format!("need mu > a, got mu={mu}, a={a}")));
    }
    if d < 0.0 {
        return Err(Error::BadParameter(format!("negative MAD {d}")));
    }
    let p1 = d / (2.0 * (mu - a));
    if p1 > 1.0 + 1e-12 {
        return Err(Error::BadParameter(format!(
            "d={d} infeasible on the half line: d/(2(mu-a))={p1} > 1"
        )));
    }
    let p2 = (1.0 - p1).max(0.0);
    let base = if p2 == 0.0 {
        spitzer_sum(&[a], &[1.0], n)
    } else if p1 == 0.0 {
        spitzer_sum(&[mu], &[1.0], n)
    } else {
        spitzer_sum(&[a, mu], &[p1, p2], n)
    };
    Ok(n as f64 * d / 2.0 + base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::AmbiguitySet;
    use crate::extremal::best_case_two_point;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn symmetric_three_point() -> DiscreteDistribution {
        DiscreteDistribution::new(vec![-2.0, 0.0, 2.0], vec![0.25, 0.5, 0.25]).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        let dist = symmetric_three_point();
        assert_relative_eq!(upper_bound_enumeration(&dist, 1).unwrap(), 0.5);
        assert_relative_eq!(upper_bound_enumeration(&dist, 2).unwrap(), 0.875);
        let pm = DiscreteDistribution::point_mass(-0.3);
        assert_eq!(upper_bound_enumeration(&pm, 8).unwrap(), 0.0);
        assert!(upper_bound_enumeration(&dist, 13).is_err());
    }

    #[test]
    fn spitzer_upper_examples() {
        let dist = symmetric_three_point();
        assert_relative_eq!(upper_bound_spitzer(&dist, 1).unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(upper_bound_spitzer(&dist, 2).unwrap(), 0.875, epsilon = 1e-12);
        let pm = DiscreteDistribution::point_mass(-1.0);
        assert_eq!(upper_bound_spitzer(&pm, 100).unwrap(), 0.0);
    }

    #[test]
    fn spitzer_lower_examples() {
        let set = AmbiguitySet::with_beta(-2.0, 0.0, 2.0, 1.0, 0.5).unwrap();
        let two = best_case_two_point(&set).unwrap();
        assert_eq!(two.points(), &[-1.0, 1.0]);
        assert_relative_eq!(lower_bound_spitzer(&two, 1).unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(lower_bound_spitzer(&two, 2).unwrap(), 0.75, epsilon = 1e-12);
        let pm = DiscreteDistribution::point_mass(-1.0);
        assert_eq!(lower_bound_spitzer(&pm, 40).unwrap(), 0.0);
    }

    #[test]
    fn spitzer_matches_enumeration() {
        for (a, mu, b, d) in [(-2.0, 0.0, 2.0, 1.0), (-1.0, -0.2, 3.0, 0.5), (0.0, 1.0, 10.0, 1.0)]
        {
            let set = AmbiguitySet::new(a, mu, b, d).unwrap();
            let dist = worst_case_three_point(&set).unwrap();
            for n in 1..=8 {
                let enumerated = upper_bound_enumeration(&dist, n).unwrap();
                let spitzer = upper_bound_spitzer(&dist, n).unwrap();
                assert_relative_eq!(enumerated, spitzer, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn monotone_in_n_and_d() {
        let mut prev = 0.0;
        let set = AmbiguitySet::new(-2.0, -0.5, 2.0, 0.8).unwrap();
        let dist = worst_case_three_point(&set).unwrap();
        for n in 1..=30 {
            let v = upper_bound_spitzer(&dist, n).unwrap();
            assert!(v >= prev - 1e-14);
            prev = v;
        }
        let mut prev = 0.0;
        for i in 1..=10 {
            let d = 0.12 * i as f64;
            let set = AmbiguitySet::new(-2.0, -0.5, 2.0, d).unwrap();
            let dist = worst_case_three_point(&set).unwrap();
            let v = upper_bound_spitzer(&dist, 15).unwrap();
            assert!(v >= prev - 1e-12, "d={d}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn gg1_transient_examples() {
        // D/D/1 never waits.
        let arrival = AmbiguitySet::new(0.0, 1.0, 2.0, 0.0).unwrap();
        let service = AmbiguitySet::new(0.0, 0.5, 2.0, 0.0).unwrap();
        let spec = QueueSpec::new(arrival, service).unwrap();
        assert_eq!(gg1_transient_upper(&spec, 20).unwrap(), 0.0);

        // n = 1 equals E[(V-U)^+] over the 3x3 product law.
        let arrival = AmbiguitySet::new(0.0, 1.0, 10.0, 1.0).unwrap();
        let service = AmbiguitySet::new(0.0, 0.5, 10.0, 0.1).unwrap();
        let spec = QueueSpec::new(arrival, service).unwrap();
        let v3 = worst_case_three_point(&service).unwrap();
        let u3 = worst_case_three_point(&arrival).unwrap();
        let mut expect = 0.0;
        for (v, pv) in v3.points().iter().zip(v3.probs()) {
            for (u, pu) in u3.points().iter().zip(u3.probs()) {
                expect += (v - u).max(0.0) * pv * pu;
            }
        }
        assert_relative_eq!(gg1_transient_upper(&spec, 1).unwrap(), expect, epsilon = 1e-12);

        // Monotone in n.
        let mut prev = 0.0;
        for n in 1..=25 {
            let v = gg1_transient_upper(&spec, n).unwrap();
            assert!(v >= prev - 1e-12);
            prev = v;
        }
        assert!(gg1_transient_upper(&spec, 61).is_err());
    }

    #[test]
    fn gg1_matches_single_increment_walk() {
        // With joint information collapsed into one increment set for V - U,
        // the single-walk bound can only be looser (or equal).
        let arrival = AmbiguitySet::new(0.0, 1.0, 4.0, 0.8).unwrap();
        let service = AmbiguitySet::new(0.0, 0.6, 4.0, 0.5).unwrap();
        let spec = QueueSpec::new(arrival, service).unwrap();
        let joint = gg1_transient_upper(&spec, 10).unwrap();
        // Increment ambiguity set: supp [aV-bU, bV-aU], mean muV-muU, MAD of
        // the worst-case increment law.
        let x = worst_case_three_point(&service)
            .unwrap()
            .difference(&worst_case_three_point(&arrival).unwrap());
        let inc_set = AmbiguitySet::new(
            service.a - arrival.b,
            service.mu - arrival.mu,
            service.b - arrival.a,
            x.mad(),
        )
        .unwrap();
        let inc = worst_case_three_point(&inc_set).unwrap();
        let single = upper_bound_spitzer(&inc, 10).unwrap();
        assert!(single >= joint - 1e-10, "single={single} joint={joint}");
    }

    #[test]
    fn infinite_range_examples() {
        assert_relative_eq!(infinite_range_limit(-2.0, -1.0, 1.0, 1).unwrap(), 0.5);
        assert_relative_eq!(infinite_range_limit(-2.0, -1.0, 1.0, 3).unwrap(), 1.5);
    }

    #[test]
    fn infinite_range_is_large_b_limit() {
        let (a, mu, d) = (-2.0, -1.0, 1.0);
        for n in 1..=5 {
            let limit = infinite_range_limit(a, mu, d, n).unwrap();
            let set = AmbiguitySet::new(a, mu, 1e6, d).unwrap();
            let dist = worst_case_three_point(&set).unwrap();
            let finite = upper_bound_spitzer(&dist, n).unwrap();
            assert_relative_eq!(limit, finite, epsilon = 1e-3);
        }
    }

    proptest! {
        #[test]
        fn prop_spitzer_equals_enumeration(
            mu in -1.0f64..1.0,
            half_lo in 0.1f64..3.0,
            half_hi in 0.1f64..3.0,
            frac in 0.05f64..0.95,
            n in 1usize..6,
        ) {
            let a = mu - half_lo;
            let b = mu + half_hi;
            let d = frac * 2.0 * (b - mu) * (mu - a) / (b - a);
            let set = AmbiguitySet::new(a, mu, b, d).unwrap();
            let dist = worst_case_three_point(&set).unwrap();
            let e = upper_bound_enumeration(&dist, n).unwrap();
            let s = upper_bound_spitzer(&dist, n).unwrap();
            prop_assert!((e - s).abs() < 1e-10, "e={e} s={s}");
        }
    }
}
