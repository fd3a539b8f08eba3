//! Direct divergence estimators: total variation, Kullback-Leibler,
//! squared Hellinger, and chi-squared distances between distribution pairs,
//! computed from mass tables or adaptive quadrature rather than from ratio
//! bounds, so the two routes can be compared.

use crate::distributions::{Centering, ContinuousFamily, DiscreteFamily};
use crate::error::{domain, Error, Result};
use crate::kahan::CompensatedSum;
use crate::quadrature::{integrate, DEFAULT_PANEL_BUDGET};

/// Divergences of Q from P. `kl` and `chi_sq` are infinite when Q puts mass
/// where P has none. `abs_error` is a numerical accounting estimate (tail
/// truncation plus the mismatch between the two signed halves of the total
/// variation), not a certified bound.
#[derive(Debug, Clone, Copy)]
pub struct DivergenceSet {
    pub tv: f64,
    pub kl: f64,
    pub hellinger_sq: f64,
    pub chi_sq: f64,
    pub abs_error: f64,
    /// Q-mass of the region where Q's density exceeds P's.
    pub q_mass_above: f64,
}

fn accumulate(lq: &[f64], lp: &[f64], tail_tol: f64) -> DivergenceSet {
    let mut plus = CompensatedSum::new();
    let mut minus = CompensatedSum::new();
    let mut kl = CompensatedSum::new();
    let mut h2 = CompensatedSum::new();
    let mut chi = CompensatedSum::new();
    let mut above = CompensatedSum::new();
    let mut hole = false;
    for (&a, &b) in lq.iter().zip(lp) {
        let qk = a.exp();
        let pk = b.exp();
        if a > f64::NEG_INFINITY && b == f64::NEG_INFINITY {
            hole = true;
        }
        let d = qk - pk;
        if d >= 0.0 {
            plus.add(d);
            if a > f64::NEG_INFINITY {
                above.add(qk);
            }
        } else {
            minus.add(-d);
        }
        if a > f64::NEG_INFINITY && b > f64::NEG_INFINITY {
            kl.add(qk * (a - b));
        }
        let root_diff = (0.5 * a).exp() - (0.5 * b).exp();
        h2.add(0.5 * root_diff * root_diff);
        if b > f64::NEG_INFINITY {
            let rel = (a - b).exp_m1();
            chi.add(pk * rel * rel);
        }
    }
    let gap = (plus.value() - minus.value()).abs();
    DivergenceSet {
        tv: 0.5 * (plus.value() + minus.value()),
        kl: if hole { f64::INFINITY } else { kl.value() },
        hellinger_sq: h2.value(),
        chi_sq: if hole { f64::INFINITY } else { chi.value() },
        abs_error: gap.max(2.0 * tail_tol),
        q_mass_above: above.value(),
    }
}

/// Divergences between two lattice distributions, scanned over
/// 0..=max(effective support ends). Tail mass beyond the scan is below
/// `tail_tol` per family and is folded into `abs_error`.
pub fn divergences_discrete(
    q: &DiscreteFamily,
    p: &DiscreteFamily,
    tail_tol: f64,
) -> Result<DivergenceSet> {
    q.validate()?;
    p.validate()?;
    if !(tail_tol > 0.0) {
        return Err(domain("tail tolerance must be positive"));
    }
    let end = q.effective_support_end(tail_tol).max(p.effective_support_end(tail_tol));
    let lq = q.log_masses(end);
    let lp = p.log_masses(end);
    Ok(accumulate(&lq, &lp, tail_tol))
}

/// Divergences between two explicitly listed mass vectors of equal length.
/// Both must sum to 1 within 1e-9.
pub fn divergences_from_masses(q: &[f64], p: &[f64]) -> Result<DivergenceSet> {
    if q.len() != p.len() || q.is_empty() {
        return Err(domain("mass vectors must share a positive length"));
    }
    for v in [q, p] {
        let mut s = CompensatedSum::new();
        for &m in v {
            if !(m.is_finite() && m >= 0.0) {
                return Err(domain(format!("masses must be nonnegative, got {m}")));
            }
            s.add(m);
        }
        if (s.value() - 1.0).abs() > 1e-9 {
            return Err(domain(format!("masses sum to {}, expected 1", s.value())));
        }
    }
    let to_log = |v: &[f64]| -> Vec<f64> {
        v.iter().map(|&m| if m > 0.0 { m.ln() } else { f64::NEG_INFINITY }).collect()
    };
    Ok(accumulate(&to_log(q), &to_log(p), 0.0))
}

const CROSS_GRID: usize = 4096;
const MAX_CROSSINGS: usize = 64;

fn sign_of(lq: f64, lp: f64) -> i8 {
    if lq == f64::NEG_INFINITY && lp == f64::NEG_INFINITY {
        0
    } else if lq > lp {
        1
    } else if lq < lp {
        -1
    } else {
        0
    }
}

fn pick_domain(q: &ContinuousFamily, p: &ContinuousFamily, tail: f64) -> Result<(f64, f64)> {
    let (qlo, qhi) = q.support();
    let (plo, phi) = p.support();
    let lo = match (qlo.is_finite(), plo.is_finite()) {
        (true, true) => qlo.min(plo),
        _ => q.quantile(tail)?.min(p.quantile(tail)?),
    };
    let hi = match (qhi.is_finite(), phi.is_finite()) {
        (true, true) => qhi.max(phi),
        _ => {
            let qh = if qhi.is_finite() { qhi } else { q.quantile(1.0 - tail)? };
            let ph = if phi.is_finite() { phi } else { p.quantile(1.0 - tail)? };
            qh.max(ph)
        }
    };
    if !(hi > lo) {
        return Err(domain("degenerate integration domain"));
    }
    Ok((lo, hi))
}

/// Divergences between two densities by adaptive quadrature. The domain is
/// cut where the densities cross so the two signed halves of the total
/// variation integral are computed separately; their mismatch feeds
/// `abs_error` together with the neglected tail mass (below tol/8 per
/// family and side).
pub fn divergences_continuous(
    q: &ContinuousFamily,
    p: &ContinuousFamily,
    tol: f64,
) -> Result<DivergenceSet> {
    q.validate()?;
    p.validate()?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(domain("tolerance must be positive"));
    }
    let tail = tol / 8.0;
    let (lo, hi) = pick_domain(q, p, tail)?;

    // locate density crossings and any region where Q has mass but P does not
    let h = (hi - lo) / CROSS_GRID as f64;
    let mut hole = false;
    let mut crossings = Vec::new();
    let mut prev_x = lo + 0.5 * h;
    let mut prev_sign = {
        let s = sign_of(q.log_density(prev_x), p.log_density(prev_x));
        if q.log_density(prev_x) > f64::NEG_INFINITY && p.log_density(prev_x) == f64::NEG_INFINITY
        {
            hole = true;
        }
        s
    };
    for i in 1..CROSS_GRID {
        let x = lo + (i as f64 + 0.5) * h;
        let (a, b) = (q.log_density(x), p.log_density(x));
        if a > f64::NEG_INFINITY && b == f64::NEG_INFINITY {
            hole = true;
        }
        let s = sign_of(a, b);
        if s != 0 && prev_sign != 0 && s != prev_sign {
            // bisect the sign change
            let (mut xa, mut xb) = (prev_x, x);
            for _ in 0..100 {
                let mid = 0.5 * (xa + xb);
                let ms = sign_of(q.log_density(mid), p.log_density(mid));
                if ms == prev_sign || ms == 0 {
                    xa = mid;
                } else {
                    xb = mid;
                }
            }
            crossings.push(0.5 * (xa + xb));
            if crossings.len() > MAX_CROSSINGS {
                return Err(Error::CrossingIsolation(format!(
                    "more than {MAX_CROSSINGS} density crossings on [{lo}, {hi}]"
                )));
            }
        }
        if s != 0 {
            prev_sign = s;
            prev_x = x;
        }
    }

    let mut cuts = vec![lo];
    cuts.extend_from_slice(&crossings);
    cuts.push(hi);
    let nseg = cuts.len() - 1;
    let seg_tol = tol / (4.0 * nseg as f64);

    let density_diff = |x: f64| q.log_density(x).exp() - p.log_density(x).exp();
    let q_density = |x: f64| q.log_density(x).exp();

    let mut plus = 0.0;
    let mut minus = 0.0;
    let mut above = 0.0;
    let mut quad_err = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let s = sign_of(q.log_density(mid), p.log_density(mid));
        let part = integrate(density_diff, a, b, seg_tol, DEFAULT_PANEL_BUDGET)?;
        quad_err += part.abs_error;
        if s >= 0 {
            plus += part.value.max(0.0);
            let qm = integrate(q_density, a, b, seg_tol, DEFAULT_PANEL_BUDGET)?;
            above += qm.value;
            quad_err += qm.abs_error;
        } else {
            minus += (-part.value).max(0.0);
        }
    }

    let kl = if hole {
        f64::INFINITY
    } else {
        let integrand = |x: f64| {
            let a = q.log_density(x);
            if a == f64::NEG_INFINITY {
                0.0
            } else {
                a.exp() * (a - p.log_density(x))
            }
        };
        let part = integrate(integrand, lo, hi, tol / 4.0, DEFAULT_PANEL_BUDGET)?;
        quad_err += part.abs_error;
        part.value
    };

    let h2 = {
        let integrand = |x: f64| {
            let r = (0.5 * q.log_density(x)).exp() - (0.5 * p.log_density(x)).exp();
            0.5 * r * r
        };
        let part = integrate(integrand, lo, hi, tol / 4.0, DEFAULT_PANEL_BUDGET)?;
        quad_err += part.abs_error;
        part.value
    };

    let chi = if hole {
        f64::INFINITY
    } else {
        let integrand = |x: f64| {
            let b = p.log_density(x);
            if b == f64::NEG_INFINITY {
                return 0.0;
            }
            let rel = (q.log_density(x) - b).exp_m1();
            b.exp() * rel * rel
        };
        let part = integrate(integrand, lo, hi, tol / 4.0, DEFAULT_PANEL_BUDGET)?;
        quad_err += part.abs_error;
        part.value
    };

    let gap = (plus - minus).abs();
    Ok(DivergenceSet {
        tv: 0.5 * (plus + minus),
        kl,
        hellinger_sq: h2,
        chi_sq: chi,
        abs_error: gap.max(0.5 * tol) + quad_err,
        q_mass_above: above,
    })
}

/// One row of the normal-extremes convergence table.
#[derive(Debug, Clone, Copy)]
pub struct ExtremeRow {
    pub count: u64,
    /// sup over x of |F_n(x) - G(x)| for the affinely normalized maximum
    /// F_n and the Gumbel limit G.
    pub sup_gap: f64,
    /// sup_gap times ln(count); the classical rate makes this order one.
    pub scaled_gap: f64,
    pub tv: f64,
    /// Peak of log(q/p) over the left window [-10, -5], where the
    /// normalized-maximum density q dwarfs the Gumbel density p.
    pub left_peak_log_q_over_p: f64,
    /// Peak of log(p/q) over the right window [5, 10], where the heavier
    /// Gumbel tail dominates.
    pub right_peak_log_p_over_q: f64,
}

const SUP_GRID: usize = 200_000;
const SUP_RANGE: (f64, f64) = (-5.0, 15.0);

/// Kolmogorov and total-variation gaps between the normalized normal
/// maximum and its Gumbel limit, with log-ratio peaks in the two tail
/// windows demonstrating that neither density dominates the other.
pub fn extremes_convergence_table(
    counts: &[u64],
    centering: Centering,
    tol: f64,
) -> Result<Vec<ExtremeRow>> {
    let gumbel = ContinuousFamily::Gumbel;
    let mut rows = Vec::with_capacity(counts.len());
    for &n in counts {
        let fam = ContinuousFamily::NormalMax { count: n, centering };
        fam.validate()?;
        let gap = |x: f64| (fam.cdf(x) - gumbel.cdf(x)).abs();

        let (lo, hi) = SUP_RANGE;
        let h = (hi - lo) / SUP_GRID as f64;
        let mut best = 0.0f64;
        let mut best_i = 0usize;
        for i in 0..=SUP_GRID {
            let g = gap(lo + i as f64 * h);
            if g > best {
                best = g;
                best_i = i;
            }
        }
        // parabolic refinement through the best point and its neighbors
        if best_i > 0 && best_i < SUP_GRID {
            let x0 = lo + best_i as f64 * h;
            let (gm, g0, gp) = (gap(x0 - h), best, gap(x0 + h));
            let denom = gm - 2.0 * g0 + gp;
            if denom < 0.0 {
                let shift = 0.5 * h * (gm - gp) / denom;
                best = best.max(gap(x0 + shift));
            }
        }

        let div = divergences_continuous(&fam, &gumbel, tol)?;

        let window_peak = |a: f64, b: f64, flip: bool| {
            let m = 20_000usize;
            let step = (b - a) / m as f64;
            let mut peak = f64::NEG_INFINITY;
            for i in 0..=m {
                let x = a + i as f64 * step;
                let d = fam.log_density(x) - gumbel.log_density(x);
                let v = if flip { -d } else { d };
                if v > peak {
                    peak = v;
                }
            }
            peak
        };

        rows.push(ExtremeRow {
            count: n,
            sup_gap: best,
            scaled_gap: best * (n as f64).ln(),
            tv: div.tv,
            left_peak_log_q_over_p: window_peak(-10.0, -5.0, false),
            right_peak_log_p_over_q: window_peak(5.0, 10.0, true),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::bounds_sampling;
    use crate::specfun::{normal_cdf, reg_inc_beta};

    #[test]
    fn forced_draw_pair_has_known_divergences() {
        // Hypergeometric(2,1,2) is a point mass at 1; Binomial(2,1/2) is
        // (1/4, 1/2, 1/4)
        let q = DiscreteFamily::Hypergeometric { population: 2, marked: 1, draws: 2 };
        let p = DiscreteFamily::Binomial { trials: 2, success_prob: 0.5 };
        let d = divergences_discrete(&q, &p, 1e-14).unwrap();
        assert!((d.tv - 0.5).abs() < 1e-12);
        assert!((d.kl - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((d.chi_sq - 1.0).abs() < 1e-12);
        assert!((d.hellinger_sq - (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
        assert!((d.q_mass_above - 1.0).abs() < 1e-12);
    }

    // every ordered tuple with distinct entries carries q = 1/[N]_n versus
    // p = 1/N^n, so brute enumeration over all N^n tuples checks the
    // closed-form collision total variation
    #[test]
    fn sampling_tv_matches_brute_enumeration() {
        for &(big_n, n) in &[(5u64, 3u64), (7, 4), (6, 6), (9, 2)] {
            let falling: f64 = (0..n).map(|j| (big_n - j) as f64).product();
            let total = (big_n as f64).powi(n as i32);
            let q_tuple = 1.0 / falling;
            let p_tuple = 1.0 / total;

            let mut distinct = 0u64;
            let mut tuple = vec![0u64; n as usize];
            let mut tv = 0.0;
            loop {
                let mut mask: u16 = 0;
                let mut inject = true;
                for &t in &tuple {
                    if mask & (1 << t) != 0 {
                        inject = false;
                        break;
                    }
                    mask |= 1 << t;
                }
                if inject {
                    distinct += 1;
                    tv += 0.5 * (q_tuple - p_tuple).abs();
                } else {
                    tv += 0.5 * p_tuple;
                }
                // odometer over {0..N-1}^n
                let mut pos = 0usize;
                loop {
                    if pos == tuple.len() {
                        break;
                    }
                    tuple[pos] += 1;
                    if tuple[pos] < big_n {
                        break;
                    }
                    tuple[pos] = 0;
                    pos += 1;
                }
                if pos == tuple.len() {
                    break;
                }
            }
            assert_eq!(distinct as f64, falling, "N = {big_n}, n = {n}");
            let set = bounds_sampling(big_n, n).unwrap();
            assert!(
                (tv - set.exact_tv.unwrap()).abs() < 1e-12,
                "N = {big_n}, n = {n}: {tv} vs {}",
                set.exact_tv.unwrap()
            );
        }
    }

    #[test]
    fn multinomial_tv_equals_total_count_tv() {
        // the observed-cell section of a multinomial against independent
        // poissons collapses to the total count comparison
        let n = 6u64;
        let cells = [0.2f64, 0.1];
        let p_plus: f64 = cells.iter().sum();
        let lam: Vec<f64> = cells.iter().map(|c| c * n as f64).collect();
        let cap = 30u64;

        let log_fact = |k: u64| crate::specfun::lgamma(k as f64 + 1.0);
        let mut tv = 0.0;
        for k1 in 0..=cap {
            for k2 in 0..=cap {
                let total = k1 + k2;
                let mult = if total <= n {
                    let rest = n - total;
                    (log_fact(n) - log_fact(k1) - log_fact(k2) - log_fact(rest)
                        + k1 as f64 * cells[0].ln()
                        + k2 as f64 * cells[1].ln()
                        + rest as f64 * (1.0 - p_plus).ln())
                    .exp()
                } else {
                    0.0
                };
                let pois = (-lam[0] + k1 as f64 * lam[0].ln() - log_fact(k1)
                    - lam[1]
                    + k2 as f64 * lam[1].ln()
                    - log_fact(k2))
                .exp();
                tv += 0.5 * (mult - pois).abs();
            }
        }

        let q = DiscreteFamily::Binomial { trials: n, success_prob: p_plus };
        let p = DiscreteFamily::Poisson { mean: n as f64 * p_plus };
        let d = divergences_discrete(&q, &p, 1e-15).unwrap();
        assert!((tv - d.tv).abs() < 1e-10, "{tv} vs {}", d.tv);
    }

    #[test]
    fn normal_versus_student_tv_matches_cdf_route() {
        // the normal density exceeds the t one exactly on (-c, c) for a
        // single c > 1 (the log ratio rises to its peak at 1 and then falls
        // through zero), so the total variation is 2 (Phi(c) - F_5(c))
        let q = ContinuousFamily::StandardNormal;
        let p = ContinuousFamily::StudentT { df: 5.0 };
        let d = divergences_continuous(&q, &p, 1e-11).unwrap();
        let log_gap = |x: f64| q.log_density(x) - p.log_density(x);
        let (mut a, mut b) = (1.0f64, 3.0f64);
        assert!(log_gap(a) > 0.0 && log_gap(b) < 0.0);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if log_gap(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let c = 0.5 * (a + b);
        let t5_at_c = 1.0 - 0.5 * reg_inc_beta(2.5, 0.5, 5.0 / (5.0 + c * c)).unwrap();
        let want = 2.0 * (normal_cdf(c) - t5_at_c);
        assert!((d.tv - want).abs() < 1e-9, "{} vs {want}", d.tv);
        assert!(d.tv < 0.5 / 5.0);
        // Q-mass above: the region |x| < c under the normal law
        let want_mass = 2.0 * normal_cdf(c) - 1.0;
        assert!((d.q_mass_above - want_mass).abs() < 1e-8);
    }

    #[test]
    fn beta_gamma_tv_matches_cdf_route() {
        let q = ContinuousFamily::Beta { shape1: 2.0, shape2: 2.0 };
        let p = ContinuousFamily::Gamma { shape: 2.0, rate: 4.0 };
        let d = divergences_continuous(&q, &p, 1e-11).unwrap();
        // independent route: total variation as the sum of CDF gaps at the
        // density crossings
        let diff = |x: f64| q.log_density(x).exp() - p.log_density(x).exp();
        let mut edges = vec![0.0f64];
        let mut prev = 0.001;
        let mut prev_sign = diff(prev) > 0.0;
        let mut x = prev;
        while x < 3.0 {
            x += 1e-4;
            let s = diff(x) > 0.0;
            if s != prev_sign {
                let (mut a, mut b) = (prev, x);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if (diff(m) > 0.0) == prev_sign {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                edges.push(0.5 * (a + b));
                prev_sign = s;
            }
            prev = x;
        }
        edges.push(30.0);
        let mut want = 0.0;
        for w in edges.windows(2) {
            want += 0.5 * ((q.cdf(w[1]) - q.cdf(w[0])) - (p.cdf(w[1]) - p.cdf(w[0]))).abs();
        }
        assert!((d.tv - want).abs() < 1e-8, "{} vs {want}", d.tv);
    }

    #[test]
    fn two_point_construction_attains_all_transfer_bounds() {
        for &rho in &[1.5f64, 2.0, 10.0] {
            let inv = 1.0 / rho;
            let q = [1.0, 0.0];
            let p = [inv, 1.0 - inv];
            let d = divergences_from_masses(&q, &p).unwrap();
            assert!((d.tv - (1.0 - inv)).abs() < 1e-12, "rho = {rho}");
            assert!((d.kl - rho.ln()).abs() < 1e-12, "rho = {rho}");
            assert!((d.hellinger_sq - (1.0 - inv.sqrt())).abs() < 1e-12, "rho = {rho}");
            assert!((d.chi_sq - (rho - 1.0)).abs() < 1e-12, "rho = {rho}");
            assert!((d.q_mass_above - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn hole_in_support_reports_infinite_divergences() {
        let q = [0.5, 0.5];
        let p = [1.0, 0.0];
        let d = divergences_from_masses(&q, &p).unwrap();
        assert!(d.kl.is_infinite());
        assert!(d.chi_sq.is_infinite());
        assert!((d.tv - 0.5).abs() < 1e-12);
    }

    #[test]
    fn extremes_table_smoke() {
        let rows = extremes_convergence_table(&[100], Centering::Equation, 1e-9).unwrap();
        let r = &rows[0];
        assert!(r.sup_gap > 0.0 && r.sup_gap < 0.1);
        // the densities cross once in the region carrying mass, so the set
        // where the normalized maximum exceeds the Gumbel density is a half
        // line and the two distances coincide up to the truncated tails
        assert!(r.tv >= r.sup_gap - 1e-8);
        assert!((r.tv - r.sup_gap).abs() < 1e-6);
        assert!(r.left_peak_log_q_over_p > 1000.0);
        assert!(r.right_peak_log_p_over_q > (1e3f64).ln());
    }
}
