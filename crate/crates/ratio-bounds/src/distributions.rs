//! Log-domain mass and density evaluators for the discrete and continuous
//! families the ratio and divergence layers compare. Off-support points
//! report negative infinity; supports are explicit so integrators and
//! exhaustive scans know where to look.

use crate::error::{domain, Result};
use crate::kahan::CompensatedSum;
use crate::specfun::{lgamma, log_normal_cdf, normal_cdf, reg_inc_beta, reg_lower_gamma};

const LOG_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_405_62;

/// Lattice distributions on the nonnegative integers.
#[derive(Debug, Clone, PartialEq)]
pub enum DiscreteFamily {
    /// Marked draws without replacement: population N, marked L, sample n.
    Hypergeometric { population: u64, marked: u64, draws: u64 },
    Binomial { trials: u64, success_prob: f64 },
    Poisson { mean: f64 },
    /// Sum of independent Bernoulli(p_i); masses come from an O(n^2)
    /// linear-domain convolution.
    PoissonBinomial { probs: Vec<f64> },
}

impl DiscreteFamily {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Hypergeometric { population, marked, draws } => {
                if *population == 0 {
                    return Err(domain("hypergeometric population must be positive"));
                }
                if marked > population || draws > population {
                    return Err(domain(format!(
                        "hypergeometric needs marked <= N and draws <= N, got N = {population}, L = {marked}, n = {draws}"
                    )));
                }
                Ok(())
            }
            Self::Binomial { trials, success_prob } => {
                if *trials == 0 {
                    return Err(domain("binomial needs at least one trial"));
                }
                if !(success_prob.is_finite() && *success_prob > 0.0 && *success_prob < 1.0) {
                    return Err(domain(format!(
                        "binomial success probability must lie in (0,1), got {success_prob}"
                    )));
                }
                Ok(())
            }
            Self::Poisson { mean } => {
                if !(mean.is_finite() && *mean > 0.0) {
                    return Err(domain(format!("poisson mean must be positive, got {mean}")));
                }
                Ok(())
            }
            Self::PoissonBinomial { probs } => {
                if probs.is_empty() {
                    return Err(domain("poisson-binomial needs at least one component"));
                }
                for &p in probs {
                    if !(p.is_finite() && (0.0..1.0).contains(&p)) {
                        return Err(domain(format!(
                            "poisson-binomial components must lie in [0,1), got {p}"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Natural log of the point mass at k; negative infinity off support.
    pub fn log_mass(&self, k: u64) -> f64 {
        match self {
            Self::Hypergeometric { population, marked, draws } => {
                let (big_n, l, n) = (*population, *marked, *draws);
                let lo = (n + l).saturating_sub(big_n);
                if k < lo || k > n.min(l) {
                    return f64::NEG_INFINITY;
                }
                log_choose(l, k) + log_choose(big_n - l, n - k) - log_choose(big_n, n)
            }
            Self::Binomial { trials, success_prob } => {
                let (n, p) = (*trials, *success_prob);
                if k > n {
                    return f64::NEG_INFINITY;
                }
                log_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()
            }
            Self::Poisson { mean } => {
                -mean + k as f64 * mean.ln() - lgamma(k as f64 + 1.0)
            }
            Self::PoissonBinomial { probs } => {
                let table = self.mass_table(probs.len() as u64);
                match table.get(k as usize) {
                    Some(&m) if m > 0.0 => m.ln(),
                    _ => f64::NEG_INFINITY,
                }
            }
        }
    }

    /// Masses at 0..=end in the linear domain. For the Poisson-binomial this
    /// runs the convolution once, so sweeps should prefer it over repeated
    /// `log_mass` calls.
    pub fn mass_table(&self, end: u64) -> Vec<f64> {
        match self {
            Self::PoissonBinomial { probs } => {
                let n = probs.len();
                let mut f = vec![0.0f64; n + 1];
                f[0] = 1.0;
                for (i, &p) in probs.iter().enumerate() {
                    let q = 1.0 - p;
                    for k in (1..=i + 1).rev() {
                        f[k] = f[k] * q + f[k - 1] * p;
                    }
                    f[0] *= q;
                }
                f.resize(end as usize + 1, 0.0);
                f
            }
            _ => (0..=end).map(|k| self.log_mass(k).exp()).collect(),
        }
    }

    /// Log masses at 0..=end. The Poisson-binomial runs its convolution once
    /// and takes logs, so masses under the linear-domain floor report as
    /// absent support.
    pub fn log_masses(&self, end: u64) -> Vec<f64> {
        match self {
            Self::PoissonBinomial { .. } => self
                .mass_table(end)
                .into_iter()
                .map(|m| if m > 0.0 { m.ln() } else { f64::NEG_INFINITY })
                .collect(),
            _ => (0..=end).map(|k| self.log_mass(k)).collect(),
        }
    }

    /// Upper end of the exact support, if bounded.
    pub fn support_end(&self) -> Option<u64> {
        match self {
            Self::Hypergeometric { marked, draws, .. } => Some((*draws).min(*marked)),
            Self::Binomial { trials, .. } => Some(*trials),
            Self::Poisson { .. } => None,
            Self::PoissonBinomial { probs } => Some(probs.len() as u64),
        }
    }

    /// Smallest K with mass beyond K below `tail_tol`, certified by a
    /// geometric domination of the Poisson tail.
    pub fn effective_support_end(&self, tail_tol: f64) -> u64 {
        match self {
            Self::Poisson { mean } => {
                let mut k = (mean + 10.0 * mean.sqrt() + 30.0).ceil() as u64;
                loop {
                    // tail(k) <= pmf(k+1) / (1 - mean/(k+2)) since mass ratios
                    // beyond k+1 are all below mean/(k+2) < 1
                    let ratio = mean / (k + 2) as f64;
                    let bound = self.log_mass(k + 1).exp() / (1.0 - ratio);
                    if bound < tail_tol {
                        return k;
                    }
                    k += (k / 4).max(16);
                }
            }
            _ => self.support_end().unwrap(),
        }
    }

    /// P(X <= k).
    pub fn cdf(&self, k: u64) -> f64 {
        match self {
            Self::Poisson { mean } => {
                // right tail of the gamma integral
                1.0 - reg_lower_gamma(k as f64 + 1.0, *mean).unwrap_or(1.0)
            }
            _ => {
                let mut s = CompensatedSum::new();
                let end = k.min(self.support_end().unwrap_or(k));
                for j in 0..=end {
                    s.add(self.log_mass(j).exp());
                }
                s.value().clamp(0.0, 1.0)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Hypergeometric { population, marked, draws } => {
                *draws as f64 * *marked as f64 / *population as f64
            }
            Self::Binomial { trials, success_prob } => *trials as f64 * success_prob,
            Self::Poisson { mean } => *mean,
            Self::PoissonBinomial { probs } => probs.iter().sum(),
        }
    }
}

fn log_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    lgamma(n as f64 + 1.0) - lgamma(k as f64 + 1.0) - lgamma((n - k) as f64 + 1.0)
}

/// How the normal-extremes family centers and scales the running maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Centering {
    /// b_n solves 2π b^2 exp(b^2) = n^2 (safeguarded Newton), a_n = 1/b_n.
    Equation,
    /// Explicit two-term expansion
    /// b_n = (2 ln n)^{1/2} - (ln ln n + ln 4π) / (2 (2 ln n)^{1/2}).
    Asymptotic,
}

/// Densities on the real line (or an interval of it).
#[derive(Debug, Clone, PartialEq)]
pub enum ContinuousFamily {
    /// Beta(shape1, shape2) viewed on (0,1), zero elsewhere on (0,∞).
    Beta { shape1: f64, shape2: f64 },
    /// Gamma(shape, rate) on (0,∞).
    Gamma { shape: f64, rate: f64 },
    StandardNormal,
    StudentT { df: f64 },
    /// First coordinate of a uniform point on the sphere of the given radius
    /// in `dim` dimensions; support (-radius, radius).
    SphereCoord { dim: u64, radius: f64 },
    /// Affinely normalized maximum of `count` iid standard normals.
    NormalMax { count: u64, centering: Centering },
    Gumbel,
}

impl ContinuousFamily {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Beta { shape1, shape2 } => {
                if !(shape1.is_finite() && *shape1 > 0.0 && shape2.is_finite() && *shape2 > 0.0) {
                    return Err(domain(format!(
                        "beta shapes must be positive, got ({shape1}, {shape2})"
                    )));
                }
                Ok(())
            }
            Self::Gamma { shape, rate } => {
                if !(shape.is_finite() && *shape > 0.0 && rate.is_finite() && *rate > 0.0) {
                    return Err(domain(format!(
                        "gamma parameters must be positive, got shape {shape}, rate {rate}"
                    )));
                }
                Ok(())
            }
            Self::StandardNormal | Self::Gumbel => Ok(()),
            Self::StudentT { df } => {
                if !(df.is_finite() && *df > 0.0) {
                    return Err(domain(format!("student df must be positive, got {df}")));
                }
                Ok(())
            }
            Self::SphereCoord { dim, radius } => {
                if *dim < 2 {
                    return Err(domain("sphere coordinate needs dimension >= 2"));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(domain(format!("sphere radius must be positive, got {radius}")));
                }
                Ok(())
            }
            Self::NormalMax { count, .. } => {
                if *count < 2 {
                    return Err(domain("normal max needs at least two variables"));
                }
                Ok(())
            }
        }
    }

    /// Open support interval; endpoints may be infinite.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Beta { .. } | Self::Gamma { .. } => (0.0, f64::INFINITY),
            Self::SphereCoord { radius, .. } => (-radius, *radius),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Natural log of the density; negative infinity off support (boundary
    /// points of open supports included).
    pub fn log_density(&self, x: f64) -> f64 {
        match self {
            Self::Beta { shape1, shape2 } => {
                let (a, b) = (*shape1, *shape2);
                if x <= 0.0 || x >= 1.0 {
                    return f64::NEG_INFINITY;
                }
                lgamma(a + b) - lgamma(a) - lgamma(b)
                    + (a - 1.0) * x.ln()
                    + (b - 1.0) * (-x).ln_1p()
            }
            Self::Gamma { shape, rate } => {
                let (a, c) = (*shape, *rate);
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                a * c.ln() - lgamma(a) + (a - 1.0) * x.ln() - c * x
            }
            Self::StandardNormal => -0.5 * x * x - LOG_SQRT_2PI,
            Self::StudentT { df } => {
                let r = *df;
                lgamma(0.5 * (r + 1.0))
                    - lgamma(0.5 * r)
                    - 0.5 * (r * std::f64::consts::PI).ln()
                    - 0.5 * (r + 1.0) * (x * x / r).ln_1p()
            }
            Self::SphereCoord { dim, radius } => {
                let (n, r) = (*dim as f64, *radius);
                let u = x / r;
                if u <= -1.0 || u >= 1.0 {
                    return f64::NEG_INFINITY;
                }
                // log B(1/2, (n-1)/2) with the unit-interval density
                // (1-u^2)^{(n-3)/2}
                let log_b = lgamma(0.5) + lgamma(0.5 * (n - 1.0)) - lgamma(0.5 * n);
                0.5 * (n - 3.0) * (-u * u).ln_1p() - log_b - r.ln()
            }
            Self::NormalMax { count, centering } => {
                let n = *count as f64;
                let (a, b) = norming_constants(*count, *centering)
                    .expect("validated count");
                let z = a * x + b;
                (n - 1.0) * log_normal_cdf(z) + (n * a).ln() - 0.5 * z * z - LOG_SQRT_2PI
            }
            Self::Gumbel => -x - (-x).exp(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Beta { shape1, shape2 } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    reg_inc_beta(*shape1, *shape2, x).expect("validated shapes")
                }
            }
            Self::Gamma { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    reg_lower_gamma(*shape, rate * x).expect("validated parameters")
                }
            }
            Self::StandardNormal => normal_cdf(x),
            Self::StudentT { df } => {
                let r = *df;
                if x == 0.0 {
                    return 0.5;
                }
                let tail = 0.5
                    * reg_inc_beta(0.5 * r, 0.5, r / (r + x * x))
                        .expect("validated df");
                if x > 0.0 {
                    1.0 - tail
                } else {
                    tail
                }
            }
            Self::SphereCoord { dim, radius } => {
                let u = x / radius;
                if u <= -1.0 {
                    0.0
                } else if u >= 1.0 {
                    1.0
                } else {
                    let half = 0.5 * (*dim as f64 - 1.0);
                    reg_inc_beta(half, half, 0.5 * (1.0 + u)).expect("validated dim")
                }
            }
            Self::NormalMax { count, centering } => {
                let (a, b) = norming_constants(*count, *centering).expect("validated count");
                (*count as f64 * log_normal_cdf(a * x + b)).exp()
            }
            Self::Gumbel => (-(-x).exp()).exp(),
        }
    }

    /// Quantile by bisection on the CDF; used to pick integration windows.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) || p == 0.0 {
            return Err(domain(format!("quantile level must lie in (0,1), got {p}")));
        }
        let (slo, shi) = self.support();
        let mut lo = if slo.is_finite() { slo } else { -1.0 };
        let mut hi = if shi.is_finite() { shi } else { 1.0 };
        if !slo.is_finite() {
            while self.cdf(lo) > p {
                lo = lo * 2.0 - 1.0;
                if lo < -1e12 {
                    break;
                }
            }
        }
        if !shi.is_finite() {
            while self.cdf(hi) < p {
                hi = hi * 2.0 + 1.0;
                if hi > 1e12 {
                    break;
                }
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo) <= 1e-13 * (1.0 + mid.abs()) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Norming constants (a_n, b_n) for the normal-extremes family.
pub fn norming_constants(count: u64, centering: Centering) -> Result<(f64, f64)> {
    if count < 2 {
        return Err(domain("norming constants need count >= 2"));
    }
    let n = count as f64;
    let b = match centering {
        Centering::Equation => {
            // monotone residual psi(b) = b^2 + 2 ln b + ln 2π - 2 ln n
            let target = 2.0 * n.ln() - 2.0 * LOG_SQRT_2PI;
            let psi = |b: f64| b * b + 2.0 * b.ln() - target;
            let mut lo: f64 = 1e-8;
            let mut hi: f64 = (2.0 * n.ln()).sqrt().max(1.0) + 2.0;
            let mut b = (2.0 * n.ln()).sqrt().max(0.5);
            for _ in 0..200 {
                let f = psi(b);
                if f > 0.0 {
                    hi = b;
                } else {
                    lo = b;
                }
                if f.abs() < 1e-14 {
                    break;
                }
                let step = f / (2.0 * b + 2.0 / b);
                let next = b - step;
                b = if next > lo && next < hi {
                    next
                } else {
                    0.5 * (lo + hi)
                };
            }
            b
        }
        Centering::Asymptotic => {
            let s = (2.0 * n.ln()).sqrt();
            s - 0.5 * (n.ln().ln() + (4.0 * std::f64::consts::PI).ln()) / s
        }
    };
    Ok((1.0 / b, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypergeometric_masses() {
        let h = DiscreteFamily::Hypergeometric { population: 5, marked: 2, draws: 2 };
        h.validate().unwrap();
        assert!((h.log_mass(0).exp() - 0.3).abs() < 1e-14);
        assert!((h.log_mass(1).exp() - 0.6).abs() < 1e-14);
        assert!((h.log_mass(2).exp() - 0.1).abs() < 1e-14);
        assert_eq!(h.log_mass(3), f64::NEG_INFINITY);
        // forced successes when draws exceed the unmarked pool
        let forced = DiscreteFamily::Hypergeometric { population: 6, marked: 4, draws: 5 };
        assert_eq!(forced.log_mass(2), f64::NEG_INFINITY);
        assert!(forced.log_mass(3).is_finite());
    }

    #[test]
    fn binomial_and_poisson_masses() {
        let b = DiscreteFamily::Binomial { trials: 2, success_prob: 0.5 };
        assert!((b.log_mass(1) - 0.5f64.ln()).abs() < 1e-15);
        let p = DiscreteFamily::Poisson { mean: 0.1 };
        assert!((p.log_mass(0) + 0.1).abs() < 1e-15);
    }

    #[test]
    fn poisson_binomial_matches_binomial_for_equal_probs() {
        let n = 100usize;
        let p = 0.3;
        let pb = DiscreteFamily::PoissonBinomial { probs: vec![p; n] };
        let b = DiscreteFamily::Binomial { trials: n as u64, success_prob: p };
        let table = pb.mass_table(n as u64);
        for k in 0..=n {
            let want = b.log_mass(k as u64).exp();
            assert!(
                (table[k] - want).abs() < 1e-12 * want.max(1e-30) + 1e-250,
                "k = {k}: {} vs {want}",
                table[k]
            );
        }
    }

    #[test]
    fn mass_normalization() {
        let families = [
            DiscreteFamily::Hypergeometric { population: 60, marked: 23, draws: 17 },
            DiscreteFamily::Binomial { trials: 50, success_prob: 0.37 },
            DiscreteFamily::PoissonBinomial {
                probs: (0..1000).map(|i| 0.3 + 0.2 * (i as f64 / 1000.0)).collect(),
            },
        ];
        for f in &families {
            let end = f.support_end().unwrap();
            let mut s = CompensatedSum::new();
            for m in f.mass_table(end) {
                s.add(m);
            }
            assert!((s.value() - 1.0).abs() < 1e-12, "{f:?}");
        }
        let p = DiscreteFamily::Poisson { mean: 42.0 };
        let end = p.effective_support_end(1e-16);
        let mut s = CompensatedSum::new();
        for k in 0..=end {
            s.add(p.log_mass(k).exp());
        }
        assert!((s.value() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn poisson_cdf_matches_partial_sums() {
        let p = DiscreteFamily::Poisson { mean: 4.2 };
        let mut acc = 0.0;
        for k in 0..=15u64 {
            acc += p.log_mass(k).exp();
            assert!((p.cdf(k) - acc).abs() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn student_cdf_closed_forms() {
        let cauchy = ContinuousFamily::StudentT { df: 1.0 };
        for &x in &[-3.0f64, -0.5, 0.0, 1.2, 8.0] {
            let want = 0.5 + x.atan() / std::f64::consts::PI;
            assert!((cauchy.cdf(x) - want).abs() < 1e-13, "x = {x}");
        }
        let t2 = ContinuousFamily::StudentT { df: 2.0 };
        for &x in &[-2.0f64, 0.3, 5.0] {
            let want = 0.5 + 0.5 * x / (2.0 + x * x).sqrt();
            assert!((t2.cdf(x) - want).abs() < 1e-13, "x = {x}");
        }
        // density at zero for the Cauchy is 1/pi
        let at0 = cauchy.log_density(0.0).exp();
        assert!((at0 - std::f64::consts::FRAC_1_PI).abs() < 1e-14);
    }

    #[test]
    fn sphere_coordinate_in_three_dimensions_is_uniform() {
        // Archimedes: the first coordinate is uniform on (-r, r)
        let s = ContinuousFamily::SphereCoord { dim: 3, radius: 2.0 };
        for &x in &[-1.9, -0.3, 0.0, 1.5] {
            assert!((s.log_density(x).exp() - 0.25).abs() < 1e-13);
            assert!((s.cdf(x) - (x + 2.0) / 4.0).abs() < 1e-12);
        }
        assert_eq!(s.log_density(2.1), f64::NEG_INFINITY);
    }

    #[test]
    fn norming_constants_solve_the_defining_equation() {
        for n in [2u64, 10, 100, 10_000] {
            let (a, b) = norming_constants(n, Centering::Equation).unwrap();
            assert!((a * b - 1.0).abs() < 1e-14);
            let residual = 2.0 * std::f64::consts::PI * b * b * (b * b).exp()
                / (n as f64 * n as f64)
                - 1.0;
            assert!(residual.abs() < 1e-12, "n = {n}: relative residual {residual:e}");
        }
        // the asymptotic centering approaches the exact one
        let (_, b_eq) = norming_constants(10_000, Centering::Equation).unwrap();
        let (_, b_as) = norming_constants(10_000, Centering::Asymptotic).unwrap();
        assert!((b_eq - b_as).abs() < 0.05);
    }

    #[test]
    fn normal_max_cdf_is_a_power_of_phi() {
        let f = ContinuousFamily::NormalMax { count: 2, centering: Centering::Equation };
        let (a, b) = norming_constants(2, Centering::Equation).unwrap();
        for &x in &[-1.0, 0.0, 2.0] {
            let want = normal_cdf(a * x + b).powi(2);
            assert!((f.cdf(x) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn gumbel_values() {
        let g = ContinuousFamily::Gumbel;
        assert!((g.cdf(0.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((g.log_density(0.0) - (-1.0)).abs() < 1e-15);
    }

    #[test]
    fn quantile_inverts_cdf() {
        let cases = [
            ContinuousFamily::Beta { shape1: 2.0, shape2: 5.0 },
            ContinuousFamily::Gamma { shape: 1.5, rate: 3.0 },
            ContinuousFamily::StandardNormal,
            ContinuousFamily::Gumbel,
        ];
        for f in &cases {
            for &p in &[0.01, 0.3, 0.97] {
                let q = f.quantile(p).unwrap();
                assert!((f.cdf(q) - p).abs() < 1e-9, "{f:?} at {p}");
            }
        }
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(DiscreteFamily::Hypergeometric { population: 5, marked: 6, draws: 2 }
            .validate()
            .is_err());
        assert!(DiscreteFamily::Binomial { trials: 3, success_prob: 1.0 }
            .validate()
            .is_err());
        assert!(DiscreteFamily::Poisson { mean: 0.0 }.validate().is_err());
        assert!(ContinuousFamily::Beta { shape1: 0.0, shape2: 1.0 }.validate().is_err());
        assert!(ContinuousFamily::SphereCoord { dim: 1, radius: 1.0 }.validate().is_err());
        assert!(ContinuousFamily::NormalMax { count: 1, centering: Centering::Equation }
            .validate()
            .is_err());
    }
}
