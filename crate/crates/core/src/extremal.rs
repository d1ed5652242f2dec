//! Extremal discrete distributions for mean-MAD ambiguity sets.
//!
//! The worst case (largest expectation of a convex function) is attained by a
//! three-point law on `{a, mu, b}`; the best case, once `beta = P(X >= mu)` is
//! also known, by a two-point law straddling the mean.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbiguitySet;
use crate::error::{Error, Result};

const PROB_TOL: f64 = 1e-12;

/// A finite-support distribution with strictly increasing support points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    points: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    /// Builds a distribution, sorting and merging duplicate points and
    /// dropping zero-probability atoms.
    pub fn new(points: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if points.len() != probs.len() || points.is_empty() {
            return Err(Error::BadParameter(
                "points and probs must be nonempty and of equal length".into(),
            ));
        }
        let mut pairs: Vec<(f64, f64)> = points.into_iter().zip(probs).collect();
        if pairs.iter().any(|(x, p)| !x.is_finite() || !p.is_finite() || *p < -PROB_TOL) {
            return Err(Error::BadParameter("non-finite point or negative probability".into()));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points = Vec::with_capacity(pairs.len());
        let mut probs: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, p) in pairs {
            if p <= PROB_TOL && p >= -PROB_TOL {
                continue;
            }
            match points.last() {
                Some(&last) if (x - last as f64).abs() <= PROB_TOL => {
                    *probs.last_mut().unwrap() += p;
                }
                _ => {
                    points.push(x);
                    probs.push(p.max(0.0));
                }
            }
        }
        if points.is_empty() {
            return Err(Error::BadParameter("all probabilities vanish".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::BadParameter(format!("probabilities sum to {total}, not 1")));
        }
        // Renormalize away the residual rounding.
        for p in &mut probs {
            *p /= total;
        }
        Ok(Self { points, probs })
    }

    /// Point mass at `x`.
    pub fn point_mass(x: f64) -> Self {
        Self { points: vec![x], probs: vec![1.0] }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.points.iter().zip(&self.probs).map(|(x, p)| x * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.points.iter().zip(&self.probs).map(|(x, p)| (x - m).powi(2) * p).sum()
    }

    /// Mean absolute deviation about the mean.
    pub fn mad(&self) -> f64 {
        let m = self.mean();
        self.points.iter().zip(&self.probs).map(|(x, p)| (x - m).abs() * p).sum()
    }

    /// P(X >= mean), ties at the mean counted.
    pub fn beta(&self) -> f64 {
        let m = self.mean();
        self.points
            .iter()
            .zip(&self.probs)
            .filter(|(x, _)| **x >= m - PROB_TOL)
            .map(|(_, p)| p)
            .sum()
    }

    /// Largest support point.
    pub fn max_point(&self) -> f64 {
        *self.points.last().unwrap()
    }

    /// Draws one sample by inverse transform over the finite support.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (x, p) in self.points.iter().zip(&self.probs) {
            acc += p;
            if u <= acc {
                return *x;
            }
        }
        *self.points.last().unwrap()
    }

    /// Distribution of `V - U` for independent V ~ self, U ~ other.
    pub fn difference(&self, other: &DiscreteDistribution) -> DiscreteDistribution {
        let mut points = Vec::with_capacity(self.len() * other.len());
        let mut probs = Vec::with_capacity(self.len() * other.len());
        for (v, pv) in self.points.iter().zip(&self.probs) {
            for (u, pu) in other.points.iter().zip(&other.probs) {
                points.push(v - u);
                probs.push(pv * pu);
            }
        }
        DiscreteDistribution::new(points, probs).expect("product law is always valid")
    }
}

/// Worst-case three-point distribution on `{a, mu, b}`.
///
/// The returned law reproduces `(mu, d)` exactly and has variance
/// `d(b-a)/2`, the maximal variance in the ambiguity set. A degenerate set
/// (d = 0) yields a point mass at `mu`.
pub fn worst_case_three_point(set: &AmbiguitySet) -> Result<DiscreteDistribution> {
    let set = set.validated()?;
    if set.is_degenerate() {
        return Ok(DiscreteDistribution::point_mass(set.mu));
    }
    let p1 = set.d / (2.0 * (set.mu - set.a));
    let p3 = set.d / (2.0 * (set.b - set.mu));
    let mut p2 = 1.0 - p1 - p3;
    // Boundary-feasible d can push p2 to a tiny negative value.
    if p2 < 0.0 && p2 > -PROB_TOL {
        p2 = 0.0;
    }
    DiscreteDistribution::new(vec![set.a, set.mu, set.b], vec![p1, p2, p3])
}

/// Best-case two-point distribution on `{mu - d/(2(1-beta)), mu + d/(2 beta)}`
/// with probabilities `{1-beta, beta}`.
pub fn best_case_two_point(set: &AmbiguitySet) -> Result<DiscreteDistribution> {
    let set = set.validated()?;
    if set.is_degenerate() {
        return Ok(DiscreteDistribution::point_mass(set.mu));
    }
    let beta = set.beta.ok_or_else(|| {
        Error::BadParameter("best-case two-point distribution requires beta".into())
    })?;
    if beta <= 0.0 || beta >= 1.0 {
        let (lo, hi) = set.beta_bracket();
        return Err(Error::InfeasibleBeta { beta, lo, hi });
    }
    let v1 = set.mu + set.d / (2.0 * beta);
    let v2 = set.mu - set.d / (2.0 * (1.0 - beta));
    DiscreteDistribution::new(vec![v2, v1], vec![1.0 - beta, beta])
}

/// Three-point family on `{a, mu, a + xi(mu-a)}` with mean `mu` and variance
/// `sigma^2` for every admissible `xi > 1`. Letting `xi` grow probes
/// heavy-tailed members of the mean-variance ambiguity set.
pub fn heavy_tail_family(mu: f64, sigma: f64, a: f64, xi: f64) -> Result<DiscreteDistribution> {
    if !(mu > a) {
        return Err(Error::BadParameter(format!("need mu > a, got mu={mu}, a={a}")));
    }
    if !(xi > 1.0) {
        return Err(Error::BadParameter(format!("need xi > 1, got {xi}")));
    }
    let gap2 = (mu - a) * (mu - a);
    let p1 = sigma * sigma / (gap2 * xi);
    let p3 = sigma * sigma / (gap2 * xi * (xi - 1.0));
    let p2 = 1.0 - p1 - p3;
    if !(0.0..=1.0 + PROB_TOL).contains(&p1)
        || !(0.0..=1.0 + PROB_TOL).contains(&p3)
        || p2 < -PROB_TOL
    {
        return Err(Error::BadParameter(format!(
            "xi={xi} gives probabilities ({p1}, {p2}, {p3}) outside [0,1]"
        )));
    }
    let b = a + xi * (mu - a);
    DiscreteDistribution::new(vec![a, mu, b], vec![p1, p2, p3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn three_point_example() {
        let set = AmbiguitySet::new(0.0, 1.0, 10.0, 1.0).unwrap();
        let dist = worst_case_three_point(&set).unwrap();
        assert_eq!(dist.points(), &[0.0, 1.0, 10.0]);
        assert_relative_eq!(dist.probs()[0], 0.5, max_relative = 1e-12);
        assert_relative_eq!(dist.probs()[1], 4.0 / 9.0, max_relative = 1e-12);
        assert_relative_eq!(dist.probs()[2], 1.0 / 18.0, max_relative = 1e-12);
    }

    #[test]
    fn three_point_symmetric() {
        let set = AmbiguitySet::new(-2.0, 0.0, 2.0, 1.0).unwrap();
        let dist = worst_case_three_point(&set).unwrap();
        assert_eq!(dist.points(), &[-2.0, 0.0, 2.0]);
        assert_eq!(dist.probs(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn three_point_degenerate() {
        let set = AmbiguitySet::new(0.0, 1.0, 10.0, 0.0).unwrap();
        let dist = worst_case_three_point(&set).unwrap();
        assert_eq!(dist.points(), &[1.0]);
        assert_eq!(dist.probs(), &[1.0]);
    }

    #[test]
    fn three_point_moments_exact() {
        for (a, mu, b, d) in [
            (0.0, 1.0, 10.0, 1.0),
            (-2.0, -1.0, 2.0, 0.7),
            (-3.0, -0.4, 0.9, 0.3),
            (0.0, 1.0, 10.0, 1.8), // boundary-feasible d
        ] {
            let set = AmbiguitySet::new(a, mu, b, d).unwrap();
            let dist = worst_case_three_point(&set).unwrap();
            assert_relative_eq!(dist.mean(), mu, epsilon = 1e-12);
            assert_relative_eq!(dist.mad(), d, epsilon = 1e-12);
            assert_relative_eq!(dist.variance(), d * (b - a) / 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_point_examples() {
        let set = AmbiguitySet::with_beta(-2.0, 0.0, 2.0, 1.0, 0.5).unwrap();
        let dist = best_case_two_point(&set).unwrap();
        assert_eq!(dist.points(), &[-1.0, 1.0]);
        assert_eq!(dist.probs(), &[0.5, 0.5]);

        // Fig. 3 parameterization with b = 3: mu = -1, d = 2, beta = 1/2.
        let set = AmbiguitySet::with_beta(-5.0, -1.0, 3.0, 2.0, 0.5).unwrap();
        let dist = best_case_two_point(&set).unwrap();
        assert_eq!(dist.points(), &[-3.0, 1.0]);
        assert_eq!(dist.probs(), &[0.5, 0.5]);

        let set = AmbiguitySet::with_beta(0.0, 5.0, 10.0, 0.0, 0.5).unwrap();
        let dist = best_case_two_point(&set).unwrap();
        assert_eq!(dist.points(), &[5.0]);
    }

    #[test]
    fn two_point_moments_and_membership() {
        for (a, mu, b, d, beta) in
            [(0.0, 1.0, 10.0, 1.0, 0.3), (-2.0, -1.0, 2.0, 0.5, 0.5), (0.0, 2.0, 5.0, 1.2, 0.4)]
        {
            let set = AmbiguitySet::with_beta(a, mu, b, d, beta).unwrap();
            let dist = best_case_two_point(&set).unwrap();
            assert_relative_eq!(dist.mean(), mu, epsilon = 1e-12);
            assert_relative_eq!(dist.mad(), d, epsilon = 1e-12);
            assert_relative_eq!(dist.beta(), beta, epsilon = 1e-12);
            // Support stays inside [a, b] for feasible beta.
            assert!(dist.points()[0] >= a - 1e-12);
            assert!(dist.max_point() <= b + 1e-12);
        }
    }

    #[test]
    fn two_point_rejects_boundary_beta_with_dispersion() {
        let set = AmbiguitySet { a: -2.0, b: 2.0, mu: 0.0, d: 1.0, beta: Some(1.0) };
        assert!(best_case_two_point(&set).is_err());
    }

    #[test]
    fn heavy_tail_examples() {
        let dist = heavy_tail_family(-1.0, 1.0, -2.0, 2.0).unwrap();
        assert_eq!(dist.points(), &[-2.0, 0.0]);
        assert_eq!(dist.probs(), &[0.5, 0.5]);

        let dist = heavy_tail_family(-1.0, 1.0, -2.0, 4.0).unwrap();
        assert_eq!(dist.points(), &[-2.0, -1.0, 2.0]);
        assert_relative_eq!(dist.probs()[0], 0.25, max_relative = 1e-12);
        assert_relative_eq!(dist.probs()[1], 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(dist.probs()[2], 1.0 / 12.0, max_relative = 1e-12);
    }

    #[test]
    fn heavy_tail_moments_xi_invariant() {
        for xi in [1.5, 2.0, 4.0, 16.0, 128.0] {
            let dist = heavy_tail_family(-1.0, 1.0, -3.0, xi).unwrap();
            assert_relative_eq!(dist.mean(), -1.0, epsilon = 1e-10);
            assert_relative_eq!(dist.variance(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn heavy_tail_rejects_bad_probabilities() {
        // sigma too large for the gap at this xi.
        assert!(heavy_tail_family(-1.0, 3.0, -2.0, 2.0).is_err());
    }

    #[test]
    fn difference_product_law() {
        let v = DiscreteDistribution::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let u = DiscreteDistribution::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let x = v.difference(&u);
        assert_eq!(x.points(), &[-1.0, 0.0, 1.0]);
        assert_eq!(x.probs(), &[0.25, 0.5, 0.25]);
        assert_relative_eq!(x.mean(), 0.0);
    }
}
