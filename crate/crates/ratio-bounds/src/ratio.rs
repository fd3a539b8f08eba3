//! Extreme density ratios between distribution pairs. Each routine reports
//! the log of the essential supremum of dQ/dP together with where it is
//! attained, either from a closed form, an exhaustive lattice scan, or a
//! grid-plus-golden-section search.

use crate::distributions::{ContinuousFamily, DiscreteFamily};
use crate::error::{domain, Result};
use crate::kahan::CompensatedSum;
use crate::specfun::half_step_increment;

/// Where the density ratio attains its supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Argmax {
    /// Lattice point.
    Index(u64),
    /// Real point; may be a support endpoint approached in the limit.
    Point(f64),
    /// Both +x and -x attain the supremum.
    SymmetricPair(f64),
    /// Every outcome with distinct components attains it.
    AnyDistinctTuple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Exhaustive,
    ContinuousSearch,
}

/// A finite extreme ratio and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport {
    pub log_rho: f64,
    pub argmax: Argmax,
    pub method: Method,
}

impl RatioReport {
    pub fn rho(&self) -> f64 {
        self.log_rho.exp()
    }

    /// Largest t with Q = (1-t) P' + t R: equals 1 - 1/rho.
    pub fn mixture_index(&self) -> f64 {
        -(-self.log_rho).exp_m1()
    }
}

/// Outcome of a ratio computation that may detect an infinite supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioOutcome {
    Bounded(RatioReport),
    /// The ratio exceeds any bound; `witness` is a point demonstrating a
    /// ratio of at least `log_ratio_at_witness` (possibly infinite).
    Unbounded { witness: f64, log_ratio_at_witness: f64 },
}

impl RatioOutcome {
    pub fn bounded(&self) -> Option<&RatioReport> {
        match self {
            Self::Bounded(r) => Some(r),
            Self::Unbounded { .. } => None,
        }
    }
}

/// Ordered draws without replacement versus with replacement from a
/// population of size N: log rho = -sum_{j<n} ln(1 - j/N), attained at every
/// injective outcome.
pub fn rho_sampling(population: u64, draws: u64) -> Result<RatioReport> {
    if population == 0 || draws == 0 || draws > population {
        return Err(domain(format!(
            "sampling ratio needs 1 <= draws <= population, got n = {draws}, N = {population}"
        )));
    }
    let big_n = population as f64;
    let mut s = CompensatedSum::new();
    for j in 1..draws {
        s.add(-(-(j as f64) / big_n).ln_1p());
    }
    Ok(RatioReport {
        log_rho: s.value(),
        argmax: Argmax::AnyDistinctTuple,
        method: Method::ClosedForm,
    })
}

/// Two-sided bracket for the sampling log-ratio:
/// n(n-1)/2N <= log rho <= -(n/2) ln(1 - (n-1)/N), with equality on the
/// right at n = 2.
pub fn sampling_log_rho_bracket(population: u64, draws: u64) -> (f64, f64) {
    let (big_n, n) = (population as f64, draws as f64);
    let lower = n * (n - 1.0) / (2.0 * big_n);
    let upper = -(n / 2.0) * (-(n - 1.0) / big_n).ln_1p();
    (lower, upper)
}

fn hyp_support(population: u64, marked: u64, draws: u64) -> (u64, u64) {
    let lo = (draws + marked).saturating_sub(population);
    (lo, draws.min(marked))
}

// log of [hyp mass / bin mass] at k through falling-factorial products:
// sum_{i<k} ln(1-i/L) + sum_{i<n-k} ln(1-i/(N-L)) - sum_{i<n} ln(1-i/N).
// This route shares nothing with the lgamma-based mass evaluators.
fn hyp_bin_log_ratio(population: u64, marked: u64, draws: u64, k: u64) -> f64 {
    let mut s = CompensatedSum::new();
    for i in 1..k {
        s.add((-(i as f64) / marked as f64).ln_1p());
    }
    for i in 1..(draws - k) {
        s.add((-(i as f64) / (population - marked) as f64).ln_1p());
    }
    for i in 1..draws {
        s.add(-(-(i as f64) / population as f64).ln_1p());
    }
    s.value()
}

/// Marked-count of a without-replacement sample versus the matching binomial:
/// Q = Hypergeometric(N, L, n), P = Binomial(n, L/N). The ratio peaks at
/// k* = ceil((n-1) L / N), with ties resolved to the smaller index.
pub fn rho_hyp_bin(population: u64, marked: u64, draws: u64) -> Result<RatioReport> {
    if population == 0 || draws == 0 || draws > population || marked > population {
        return Err(domain(format!(
            "hypergeometric-binomial ratio needs 1 <= n <= N and L <= N, got N = {population}, L = {marked}, n = {draws}"
        )));
    }
    if marked == 0 || marked == population {
        // both laws are the same point mass
        let k = if marked == 0 { 0 } else { draws };
        return Ok(RatioReport {
            log_rho: 0.0,
            argmax: Argmax::Index(k),
            method: Method::ClosedForm,
        });
    }
    // integer ceiling of (n-1) L / N; the product fits u128
    let num = (draws as u128 - 1) * marked as u128;
    let k_star = num.div_ceil(population as u128) as u64;
    let (lo, hi) = hyp_support(population, marked, draws);
    debug_assert!((lo..=hi).contains(&k_star), "peak {k_star} outside support [{lo}, {hi}]");
    let k_star = k_star.clamp(lo, hi);
    Ok(RatioReport {
        log_rho: hyp_bin_log_ratio(population, marked, draws, k_star),
        argmax: Argmax::Index(k_star),
        method: Method::ClosedForm,
    })
}

/// log of [Binomial(n,p) mass / Poisson(np) mass] at k, negative infinity
/// for k > n.
pub fn lambda_bin_poiss(trials: u64, success_prob: f64, k: u64) -> f64 {
    let (n, p) = (trials as f64, success_prob);
    if k > trials {
        return f64::NEG_INFINITY;
    }
    let mut s = CompensatedSum::new();
    for i in 1..k {
        s.add((-(i as f64) / n).ln_1p());
    }
    s.add(n * p);
    s.add((n - k as f64) * (-p).ln_1p());
    s.value()
}

fn check_bin_poiss(trials: u64, success_prob: f64) -> Result<()> {
    if trials == 0 || !(success_prob.is_finite() && success_prob > 0.0 && success_prob < 1.0) {
        return Err(domain(format!(
            "binomial-poisson ratio needs n >= 1 and p in (0,1), got n = {trials}, p = {success_prob}"
        )));
    }
    Ok(())
}

/// Binomial(n, p) versus Poisson(np); the ratio peaks at k* = ceil(np),
/// ties resolved to the smaller index.
pub fn rho_bin_poiss(trials: u64, success_prob: f64) -> Result<RatioReport> {
    check_bin_poiss(trials, success_prob)?;
    // smallest integer k with np <= k; the rounded product can land on an
    // integer spuriously, so settle the comparison with an exact fma residual
    let n = trials as f64;
    let mut k = (n * success_prob).ceil();
    while n.mul_add(success_prob, -k) > 0.0 {
        k += 1.0;
    }
    while k >= 1.0 && n.mul_add(success_prob, -(k - 1.0)) <= 0.0 {
        k -= 1.0;
    }
    let k_star = (k as u64).min(trials);
    Ok(RatioReport {
        log_rho: lambda_bin_poiss(trials, success_prob, k_star),
        argmax: Argmax::Index(k_star),
        method: Method::ClosedForm,
    })
}

/// log rho for Binomial(n,p) versus Poisson(np) as a function of n.
pub fn capital_lambda(trials: u64, success_prob: f64) -> Result<f64> {
    rho_bin_poiss(trials, success_prob).map(|r| r.log_rho)
}

/// Supremum of `capital_lambda` over all n, attained at some n <= 1/(1-p);
/// returns (value, maximizing n). Cost grows like p/(1-p)^2, so p very close
/// to 1 is rejected.
pub fn capital_lambda_sup(success_prob: f64) -> Result<(f64, u64)> {
    let p = success_prob;
    if !(p.is_finite() && p > 0.0 && p < 1.0) {
        return Err(domain(format!("need p in (0,1), got {p}")));
    }
    let n_max = (1.0 / (1.0 - p)).ceil() as u64;
    scan_capital_lambda(p, n_max)
}

/// Diagnostic scan of `capital_lambda` out to factor/(1-p); reports the
/// maximum seen and where. Useful for checking that extending the range
/// beyond 1/(1-p) does not raise the supremum.
pub fn capital_lambda_scan(success_prob: f64, factor: f64) -> Result<(f64, u64)> {
    let p = success_prob;
    if !(p.is_finite() && p > 0.0 && p < 1.0) || !(factor >= 1.0) {
        return Err(domain("need p in (0,1) and factor >= 1"));
    }
    let n_max = (factor / (1.0 - p)).ceil() as u64;
    scan_capital_lambda(p, n_max)
}

fn scan_capital_lambda(p: f64, n_max: u64) -> Result<(f64, u64)> {
    // each Lambda_n costs O(np) terms
    if (n_max as f64).powi(2) * p > 5e9 {
        return Err(domain(format!(
            "scan over n <= {n_max} at p = {p} is too expensive"
        )));
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_n = 1;
    for n in 1..=n_max.max(1) {
        let v = capital_lambda(n, p)?;
        if v > best {
            best = v;
            best_n = n;
        }
    }
    Ok((best, best_n))
}

/// Upper bound on log rho for a Poisson-binomial count against the Poisson
/// with the same mean: -ln(1 - max_i p_i).
pub fn log_rho_upper_poisson_binomial(probs: &[f64]) -> Result<f64> {
    DiscreteFamily::PoissonBinomial { probs: probs.to_vec() }.validate()?;
    let p_max = probs.iter().cloned().fold(0.0f64, f64::max);
    Ok(-(-p_max).ln_1p())
}

/// Multinomial cell counts against independent Poissons with matching means
/// reduce exactly to Binomial(n, p+) versus Poisson(n p+) where p+ is the
/// total cell probability, which may be below 1 for a partial table.
pub fn rho_multinomial_poisson(trials: u64, cell_probs: &[f64]) -> Result<RatioReport> {
    if cell_probs.is_empty() {
        return Err(domain("need at least one cell"));
    }
    for &p in cell_probs {
        if !(p.is_finite() && p >= 0.0) {
            return Err(domain(format!("cell probabilities must be nonnegative, got {p}")));
        }
    }
    let mut s = CompensatedSum::new();
    for &p in cell_probs {
        s.add(p);
    }
    let p_plus = s.value();
    if !(p_plus > 0.0 && p_plus < 1.0) {
        return Err(domain(format!(
            "total cell probability must lie in (0,1), got {p_plus}"
        )));
    }
    rho_bin_poiss(trials, p_plus)
}

fn check_beta_gamma(a: f64, b: f64, c: f64) -> Result<()> {
    if !(a.is_finite() && a > 0.0 && c.is_finite() && c > 0.0) {
        return Err(domain(format!(
            "beta-gamma ratio needs positive shape and rate, got a = {a}, c = {c}"
        )));
    }
    if !(b.is_finite() && b >= 1.0) {
        return Err(domain(format!(
            "beta-gamma ratio is unbounded for b < 1, got b = {b}"
        )));
    }
    Ok(())
}

/// Beta(a, b) versus Gamma(a, rate c) on (0, infinity), requiring b >= 1.
/// For c <= b-1 the ratio decreases from x = 0; otherwise it peaks at
/// x* = (c - b + 1)/c, which lands on the endpoint 1 when b = 1.
pub fn rho_beta_gamma(a: f64, b: f64, c: f64) -> Result<RatioReport> {
    check_beta_gamma(a, b, c)?;
    let lg = |x: f64| crate::specfun::lgamma(x);
    if c <= b - 1.0 {
        return Ok(RatioReport {
            log_rho: lg(a + b) - lg(b) - a * c.ln(),
            argmax: Argmax::Point(0.0),
            method: Method::ClosedForm,
        });
    }
    // (b-1) ln(b-1) extends continuously to 0 at b = 1
    let entropy = if b > 1.0 { (b - 1.0) * (b - 1.0).ln() } else { 0.0 };
    let log_rho = lg(a + b) - lg(b) - (a + b - 1.0) * c.ln() + entropy + c - b + 1.0;
    Ok(RatioReport {
        log_rho,
        argmax: Argmax::Point((c - b + 1.0) / c),
        method: Method::ClosedForm,
    })
}

/// The rate minimizing the beta-gamma ratio bound for given shapes.
pub fn beta_gamma_optimal_rate(a: f64, b: f64) -> f64 {
    a + b - 1.0
}

/// Standard normal versus Student t with r degrees of freedom; the ratio
/// peaks at x = +/-1 and stays within (exp(1/(2(r+1))), exp(1/(2r))) for
/// r >= 2.
pub fn rho_normal_student(df: f64) -> Result<RatioReport> {
    if !(df.is_finite() && df > 0.0) {
        return Err(domain(format!("need positive degrees of freedom, got {df}")));
    }
    let r = df;
    let log_rho = -half_step_increment(0.5 * r)? - 0.5 + 0.5 * (r + 1.0) * (1.0 / r).ln_1p();
    Ok(RatioReport {
        log_rho,
        argmax: Argmax::SymmetricPair(1.0),
        method: Method::ClosedForm,
    })
}

/// Bracket for the normal-student log-ratio, valid for r >= 2.
pub fn normal_student_bracket(df: f64) -> (f64, f64) {
    (0.5 / (df + 1.0), 0.5 / df)
}

/// Student t versus standard normal: the heavier t tails make the ratio
/// unbounded; the witness is a point where it already exceeds e^30.
pub fn rho_student_normal(df: f64) -> Result<RatioOutcome> {
    if !(df.is_finite() && df > 0.0) {
        return Err(domain(format!("need positive degrees of freedom, got {df}")));
    }
    let t = ContinuousFamily::StudentT { df };
    let n = ContinuousFamily::StandardNormal;
    let mut x = df.sqrt().max(1.0);
    loop {
        let g = t.log_density(x) - n.log_density(x);
        if g > 30.0 {
            return Ok(RatioOutcome::Unbounded { witness: x, log_ratio_at_witness: g });
        }
        x *= 2.0;
    }
}

/// Exhaustive lattice scan of log q(k) - log p(k) for k = 0..=end. Reports
/// an unbounded outcome at the first k carrying Q-mass but no P-mass.
pub fn rho_discrete_exhaustive(
    q: &DiscreteFamily,
    p: &DiscreteFamily,
    end: u64,
) -> Result<RatioOutcome> {
    q.validate()?;
    p.validate()?;
    let lq = q.log_masses(end);
    let lp = p.log_masses(end);
    let mut best = f64::NEG_INFINITY;
    let mut best_k = 0u64;
    for k in 0..=end as usize {
        if lq[k] == f64::NEG_INFINITY {
            continue;
        }
        if lp[k] == f64::NEG_INFINITY {
            return Ok(RatioOutcome::Unbounded {
                witness: k as f64,
                log_ratio_at_witness: f64::INFINITY,
            });
        }
        let g = lq[k] - lp[k];
        if g > best {
            best = g;
            best_k = k as u64;
        }
    }
    if best == f64::NEG_INFINITY {
        return Err(domain("no common support on the scanned range"));
    }
    Ok(RatioOutcome::Bounded(RatioReport {
        log_rho: best,
        argmax: Argmax::Index(best_k),
        method: Method::Exhaustive,
    }))
}

const SEARCH_GRID: usize = 16_384;
const MAX_EXTEND_ROUNDS: usize = 30;
const UNBOUNDED_GROWTH: f64 = 400.0;

fn score(q: &ContinuousFamily, p: &ContinuousFamily, x: f64) -> f64 {
    let lq = q.log_density(x);
    if lq == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    lq - p.log_density(x)
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if b - a < 1e-15 * (1.0 + a.abs() + b.abs()) {
            break;
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Locate the supremum of log q - log p by a midpoint grid over the window
/// (intersected with the support of q), golden-section refinement around the
/// best cell, window doubling toward infinite support ends, and geometric
/// probing toward finite ones. Reports an unbounded outcome when the ratio
/// keeps climbing toward a boundary.
pub fn rho_continuous_search(
    q: &ContinuousFamily,
    p: &ContinuousFamily,
    window: (f64, f64),
) -> Result<RatioOutcome> {
    q.validate()?;
    p.validate()?;
    let (qlo, qhi) = q.support();
    let mut lo = window.0.max(qlo);
    let mut hi = window.1.min(qhi);
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(domain(format!(
            "search window must be finite and ordered after support clipping, got [{lo}, {hi}]"
        )));
    }
    let eval = |x: f64| score(q, p, x);

    let mut round_one_best = f64::NEG_INFINITY;
    let mut rounds = 0;
    let (best_i, grid_best, h) = loop {
        rounds += 1;
        let h = (hi - lo) / SEARCH_GRID as f64;
        let mut best_i = 0usize;
        let mut best_g = f64::NEG_INFINITY;
        for i in 0..SEARCH_GRID {
            let x = lo + (i as f64 + 0.5) * h;
            let v = eval(x);
            if v == f64::INFINITY {
                return Ok(RatioOutcome::Unbounded {
                    witness: x,
                    log_ratio_at_witness: f64::INFINITY,
                });
            }
            if v > best_g {
                best_g = v;
                best_i = i;
            }
        }
        if best_g == f64::NEG_INFINITY {
            return Err(domain("ratio carries no mass on the search window"));
        }
        if round_one_best == f64::NEG_INFINITY {
            round_one_best = best_g;
        }
        if best_g - round_one_best > UNBOUNDED_GROWTH {
            let x = lo + (best_i as f64 + 0.5) * h;
            return Ok(RatioOutcome::Unbounded { witness: x, log_ratio_at_witness: best_g });
        }
        let at_right = best_i + 1 == SEARCH_GRID;
        let at_left = best_i == 0;
        if at_right && qhi == f64::INFINITY && rounds < MAX_EXTEND_ROUNDS {
            hi += hi - lo;
            continue;
        }
        if at_left && qlo == f64::NEG_INFINITY && rounds < MAX_EXTEND_ROUNDS {
            lo -= hi - lo;
            continue;
        }
        if rounds >= MAX_EXTEND_ROUNDS {
            return Err(domain(
                "no interior maximum located; the ratio may approach its supremum only at infinity",
            ));
        }
        break (best_i, best_g, h);
    };

    let center = lo + (best_i as f64 + 0.5) * h;
    let (x_ref, g_ref) = golden_max(&eval, (center - 1.5 * h).max(lo), (center + 1.5 * h).min(hi), 160);
    let mut best_x = x_ref;
    let mut best_g = g_ref.max(grid_best);

    // probe geometrically toward a finite endpoint the best cell touches
    for (edge, is_left) in [(lo, true), (hi, false)] {
        let near = if is_left {
            best_i == 0 && edge == qlo
        } else {
            best_i + 1 == SEARCH_GRID && edge == qhi
        };
        if !near || !edge.is_finite() {
            continue;
        }
        let mut gap = (center - edge).abs();
        let mut flat = 0;
        let mut prev = f64::NEG_INFINITY;
        for _ in 0..220 {
            gap *= 0.5;
            let x = if is_left { edge + gap } else { edge - gap };
            if x == edge {
                break;
            }
            let v = eval(x);
            if v == f64::INFINITY || v > round_one_best + UNBOUNDED_GROWTH {
                return Ok(RatioOutcome::Unbounded { witness: x, log_ratio_at_witness: v });
            }
            if v > best_g {
                best_g = v;
                best_x = edge;
            }
            if (v - prev).abs() <= 1e-13 * (1.0 + v.abs()) {
                flat += 1;
                if flat >= 3 {
                    break;
                }
            } else {
                flat = 0;
            }
            prev = v;
        }
    }

    Ok(RatioOutcome::Bounded(RatioReport {
        log_rho: best_g,
        argmax: Argmax::Point(best_x),
        method: Method::ContinuousSearch,
    }))
}
