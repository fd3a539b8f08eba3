//! Error-bound catalogues for each distribution pair. A `BoundSet` couples
//! the exact extreme-ratio value (when a closed form exists) with named
//! upper and lower estimates, including published rates from other authors
//! for comparison. Entries carry validity predicates instead of panicking,
//! so a caller can tabulate a full parameter sweep and filter later.

use crate::error::{domain, Result};
use crate::ratio::{
    rho_beta_gamma, rho_bin_poiss, rho_hyp_bin, rho_normal_student, rho_sampling, Argmax,
};
use crate::specfun::log_falling_factorial;

/// Which scalar a bound constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    LogRho,
    TotalVariation,
    KullbackLeibler,
    HellingerSquared,
    ChiSquared,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::LogRho => "log_rho",
            Self::TotalVariation => "tv",
            Self::KullbackLeibler => "kl",
            Self::HellingerSquared => "hellinger_sq",
            Self::ChiSquared => "chi_sq",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

/// One named estimate. `comparator` marks rates taken from the literature
/// rather than derived from the ratio machinery here.
#[derive(Debug, Clone)]
pub struct BoundEntry {
    pub name: &'static str,
    pub quantity: Quantity,
    pub side: Side,
    pub value: f64,
    pub valid: bool,
    pub comparator: bool,
    pub citation: Option<&'static str>,
}

fn native(name: &'static str, quantity: Quantity, side: Side, value: f64, valid: bool) -> BoundEntry {
    BoundEntry { name, quantity, side, value, valid, comparator: false, citation: None }
}

fn cited(
    name: &'static str,
    quantity: Quantity,
    side: Side,
    value: f64,
    valid: bool,
    citation: &'static str,
) -> BoundEntry {
    BoundEntry { name, quantity, side, value, valid, comparator: true, citation: Some(citation) }
}

#[derive(Debug, Clone)]
pub struct BoundSet {
    pub description: String,
    pub exact_log_rho: Option<f64>,
    pub exact_tv: Option<f64>,
    pub entries: Vec<BoundEntry>,
}

impl BoundSet {
    pub fn valid_entries(&self, quantity: Quantity) -> impl Iterator<Item = &BoundEntry> {
        self.entries.iter().filter(move |e| e.valid && e.quantity == quantity)
    }
}

/// Numerically stable 1 - sqrt(1 - u) for u in [0, 1].
fn one_minus_sqrt_one_minus(u: f64) -> f64 {
    u / (1.0 + (1.0 - u).sqrt())
}

/// Transfer bounds on the classical divergences implied by log rho and,
/// when available, the Q-mass of the region where Q exceeds P.
pub fn divergence_bounds_from_rho(log_rho: f64, q_mass_above: Option<f64>) -> Vec<BoundEntry> {
    let w = q_mass_above.unwrap_or(1.0);
    vec![
        native(
            "mixture_tv_upper",
            Quantity::TotalVariation,
            Side::Upper,
            w * -(-log_rho).exp_m1(),
            log_rho >= 0.0,
        ),
        native(
            "mixture_kl_upper",
            Quantity::KullbackLeibler,
            Side::Upper,
            w * log_rho,
            log_rho >= 0.0,
        ),
        native(
            "mixture_hellinger_upper",
            Quantity::HellingerSquared,
            Side::Upper,
            -(-0.5 * log_rho).exp_m1(),
            log_rho >= 0.0,
        ),
        native(
            "mixture_chi_sq_upper",
            Quantity::ChiSquared,
            Side::Upper,
            log_rho.exp_m1(),
            log_rho >= 0.0,
        ),
    ]
}

/// Ordered samples with and without replacement. The total variation is the
/// collision probability, known exactly, and equals 1 - 1/rho because the
/// ratio takes only the values 0 and rho.
pub fn bounds_sampling(population: u64, draws: u64) -> Result<BoundSet> {
    let report = rho_sampling(population, draws)?;
    let (big_n, n) = (population as f64, draws as f64);
    let tv = report.mixture_index();
    let entries = vec![
        native(
            "pairwise_quadratic_lower",
            Quantity::LogRho,
            Side::Lower,
            n * (n - 1.0) / (2.0 * big_n),
            true,
        ),
        native(
            "half_power_upper",
            Quantity::LogRho,
            Side::Upper,
            -(n / 2.0) * (-(n - 1.0) / big_n).ln_1p(),
            true,
        ),
        cited(
            "collision_union_rate",
            Quantity::TotalVariation,
            Side::Upper,
            n * (n - 1.0) / (2.0 * big_n),
            true,
            "Freedman (1977)",
        ),
    ];
    Ok(BoundSet {
        description: format!(
            "{draws} ordered draws from a {population}-element population, without versus with replacement"
        ),
        exact_log_rho: Some(report.log_rho),
        exact_tv: Some(tv),
        entries,
    })
}

/// Marked-count distributions: Hypergeometric(N, L, n) against
/// Binomial(n, L/N).
pub fn bounds_hyp_bin(population: u64, marked: u64, draws: u64) -> Result<BoundSet> {
    let report = rho_hyp_bin(population, marked, draws)?;
    let (big_n, l, n) = (population as f64, marked as f64, draws as f64);
    let p = l / big_n;

    // Q-mass of outcomes that are neither all-marked nor all-unmarked
    let lf_n = log_falling_factorial(big_n, draws);
    let all_marked = log_falling_factorial(l, draws);
    let none_marked = log_falling_factorial(big_n - l, draws);
    let middle_mass = 1.0
        - (all_marked.log_value - lf_n.log_value).exp()
        - (none_marked.log_value - lf_n.log_value).exp();
    let per_draw = -(-1.0 / big_n).ln_1p();

    let entries = vec![
        native(
            "per_draw_power_upper",
            Quantity::LogRho,
            Side::Upper,
            (n - 1.0) * per_draw,
            true,
        ),
        native(
            "single_factor_upper",
            Quantity::LogRho,
            Side::Upper,
            -(-(n - 1.0) / big_n).ln_1p(),
            2 * (draws.saturating_sub(1)) <= population,
        ),
        native(
            "mass_weighted_tv_upper",
            Quantity::TotalVariation,
            Side::Upper,
            middle_mass * -((n - 1.0) * (-1.0 / big_n).ln_1p()).exp_m1(),
            true,
        ),
        native(
            "mass_weighted_linear_tv_upper",
            Quantity::TotalVariation,
            Side::Upper,
            middle_mass * (n - 1.0) / big_n,
            true,
        ),
        cited(
            "exchangeable_pair_rate",
            Quantity::TotalVariation,
            Side::Upper,
            2.0 * n / big_n,
            true,
            "Diaconis and Freedman (1980)",
        ),
        cited(
            "monotone_coupling_rate",
            Quantity::TotalVariation,
            Side::Upper,
            (n / (n + 1.0))
                * (1.0 - p.powf(n + 1.0) - (1.0 - p).powf(n + 1.0))
                * (n - 1.0)
                / (big_n - 1.0),
            draws <= marked.min(population - marked),
            "Ehm (1991)",
        ),
        cited(
            "stein_exchangeable_rate",
            Quantity::TotalVariation,
            Side::Upper,
            (n - 1.0) / (big_n - 1.0),
            population >= 2,
            "Holmes (2004)",
        ),
    ];
    Ok(BoundSet {
        description: format!(
            "marked count of {draws} draws from {population} with {marked} marked: without replacement versus binomial"
        ),
        exact_log_rho: Some(report.log_rho),
        exact_tv: None,
        entries,
    })
}

/// Binomial(n, p) against Poisson(np).
pub fn bounds_bin_poiss(trials: u64, success_prob: f64) -> Result<BoundSet> {
    let report = rho_bin_poiss(trials, success_prob)?;
    let Argmax::Index(k_star) = report.argmax else {
        unreachable!("lattice peak");
    };
    let (n, p, k) = (trials as f64, success_prob, k_star as f64);
    let half_log = -0.5 * (-p).ln_1p();
    let main = -(k - 1.0) / (12.0 * n * (n - k + 1.0));
    let hit_mass = -(n * (-p).ln_1p()).exp_m1();

    let entries = vec![
        native("full_log_upper", Quantity::LogRho, Side::Upper, -(-p).ln_1p(), true),
        native(
            "half_log_upper",
            Quantity::LogRho,
            Side::Upper,
            -0.5 * (-k / n).ln_1p(),
            k_star < trials,
        ),
        native(
            "refined_lower",
            Quantity::LogRho,
            Side::Lower,
            half_log + main - 1.0 / (12.0 * (n - k) * (n - k + 1.0)),
            k_star < trials,
        ),
        native(
            "refined_upper",
            Quantity::LogRho,
            Side::Upper,
            half_log + main + 1.0 / (8.0 * (n - k) + 6.0),
            true,
        ),
        native(
            "mass_weighted_p_tv_upper",
            Quantity::TotalVariation,
            Side::Upper,
            hit_mass * p,
            true,
        ),
        native(
            "mass_weighted_sqrt_tv_upper",
            Quantity::TotalVariation,
            Side::Upper,
            hit_mass * one_minus_sqrt_one_minus(k / n),
            true,
        ),
        cited(
            "coupling_rate",
            Quantity::TotalVariation,
            Side::Upper,
            n * p * -(-p).exp_m1(),
            true,
            "Hodges and Le Cam (1960)",
        ),
        cited(
            "single_parameter_rate",
            Quantity::TotalVariation,
            Side::Upper,
            p,
            true,
            "Reiss (1993)",
        ),
        cited(
            "stein_chen_rate",
            Quantity::TotalVariation,
            Side::Upper,
            -(-n * p).exp_m1() * p,
            true,
            "Barbour and Hall (1984)",
        ),
    ];
    Ok(BoundSet {
        description: format!(
            "binomial with {trials} trials at success probability {success_prob} versus the mean-matched poisson"
        ),
        exact_log_rho: Some(report.log_rho),
        exact_tv: None,
        entries,
    })
}

/// The two canonical gamma rates for comparing Beta(a, b) with Gamma(a, c):
/// matching the sum of shapes, c = a + b, gives ratio excess
/// delta = (a+1)/(a+b); matching the mode normalization, c = a + b - 1,
/// gives the smaller delta = a/(a+b-1) whenever b > 1.
pub fn beta_gamma_deltas(a: f64, b: f64) -> (f64, f64) {
    ((a + 1.0) / (a + b), a / (a + b - 1.0))
}

fn matches(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-9 * (1.0 + y.abs())
}

/// Beta(a, b) against Gamma(a, rate c); requires b >= 1. The square-root
/// bounds apply at the two canonical rates.
pub fn bounds_beta_gamma(a: f64, b: f64, c: f64) -> Result<BoundSet> {
    let report = rho_beta_gamma(a, b, c)?;
    let (delta_sum, delta_mode) = beta_gamma_deltas(a, b);
    let delta = if matches(c, a + b) {
        Some(delta_sum)
    } else if matches(c, a + b - 1.0) {
        Some(delta_mode)
    } else {
        None
    };

    let mut entries = Vec::new();
    if let Some(d) = delta {
        let ok = d < 1.0;
        entries.push(native(
            "sqrt_complement_log_upper",
            Quantity::LogRho,
            Side::Upper,
            -0.5 * (-d).ln_1p(),
            ok,
        ));
        entries.push(native(
            "sqrt_complement_tv_upper",
            Quantity::TotalVariation,
            Side::Upper,
            one_minus_sqrt_one_minus(d),
            ok,
        ));
        entries.push(native(
            "linearized_tv_upper",
            Quantity::TotalVariation,
            Side::Upper,
            d / (2.0 - d),
            ok,
        ));
    }
    entries.push(native(
        "unit_shape_series_upper",
        Quantity::LogRho,
        Side::Upper,
        0.5 / b + 0.25 / (b * b),
        a == 1.0 && b >= 2.0 && matches(c, b),
    ));
    Ok(BoundSet {
        description: format!("beta({a}, {b}) versus gamma({a}) with rate {c}"),
        exact_log_rho: Some(report.log_rho),
        exact_tv: None,
        entries,
    })
}

/// Which sphere radius the coordinate comparison uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereScaling {
    /// Radius sqrt(n): ratio excess (k+2)/n.
    SqrtN,
    /// Radius sqrt(n-2): ratio excess k/(n-2), smaller for every k.
    SqrtNMinusTwo,
}

/// First k coordinates of a uniform point on the scaled sphere in R^n
/// against k independent standard normals. Reduces exactly to the
/// beta-gamma comparison with shapes (k/2, (n-k)/2).
pub fn bounds_levy_poincare(dim: u64, lead: u64, scaling: SphereScaling) -> Result<BoundSet> {
    if lead == 0 || lead + 2 > dim {
        return Err(domain(format!(
            "coordinate comparison needs 1 <= k <= n - 2, got k = {lead}, n = {dim}"
        )));
    }
    let (n, k) = (dim as f64, lead as f64);
    let c = match scaling {
        SphereScaling::SqrtN => 0.5 * n,
        SphereScaling::SqrtNMinusTwo => 0.5 * (n - 2.0),
    };
    let mut set = bounds_beta_gamma(0.5 * k, 0.5 * (n - k), c)?;
    set.description = format!(
        "first {lead} coordinates of a uniform point on the {} sphere in R^{dim} versus standard normals",
        match scaling {
            SphereScaling::SqrtN => "radius-sqrt(n)",
            SphereScaling::SqrtNMinusTwo => "radius-sqrt(n-2)",
        }
    );
    set.entries.push(cited(
        "projection_rate",
        Quantity::TotalVariation,
        Side::Upper,
        (k + 3.0) / (n - k - 3.0),
        lead + 4 <= dim,
        "Diaconis and Freedman (1987)",
    ));
    Ok(set)
}

/// Rate choice for comparing leading Dirichlet components with independent
/// gammas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateChoice {
    /// Rate equal to the total concentration.
    MatchTotal,
    /// Rate equal to the total concentration minus one.
    MatchTotalMinusOne,
}

/// First `lead` components of a Dirichlet vector against independent
/// Gamma(alpha_i, c) variables. Reduces exactly to the beta-gamma comparison
/// with shapes (s, t - s), s the leading concentration mass and t the total.
pub fn bounds_dirichlet(concentrations: &[f64], lead: usize, rate: RateChoice) -> Result<BoundSet> {
    if lead == 0 || lead >= concentrations.len() {
        return Err(domain(format!(
            "need 1 <= lead < {} components",
            concentrations.len()
        )));
    }
    for &a in concentrations {
        if !(a.is_finite() && a > 0.0) {
            return Err(domain(format!("concentrations must be positive, got {a}")));
        }
    }
    let s: f64 = concentrations[..lead].iter().sum();
    let t: f64 = concentrations.iter().sum();
    let c = match rate {
        RateChoice::MatchTotal => t,
        RateChoice::MatchTotalMinusOne => t - 1.0,
    };
    let mut set = bounds_beta_gamma(s, t - s, c)?;
    set.description = format!(
        "first {lead} of {} dirichlet components (mass {s} of {t}) versus independent gammas with rate {c}",
        concentrations.len()
    );
    Ok(set)
}

/// The k-th uniform spacing statistic scaled by n against its limiting
/// gamma law: Beta(k, n-k+1) versus Gamma(k, rate n).
pub fn bounds_spacings(sample_size: u64, order: u64) -> Result<BoundSet> {
    if order == 0 || order > sample_size {
        return Err(domain(format!(
            "spacing order must lie in 1..=n, got k = {order}, n = {sample_size}"
        )));
    }
    let (n, k) = (sample_size as f64, order as f64);
    let mut set = bounds_beta_gamma(k, n - k + 1.0, n)?;
    set.description = format!(
        "order-{order} uniform spacing statistic from {sample_size} points versus its gamma limit"
    );
    set.entries.push(cited(
        "spacing_count_rate",
        Quantity::TotalVariation,
        Side::Upper,
        2.0 * (-2.0f64).exp() / n + (-2.0f64).exp() / (n * n),
        order == 1,
        "Hall and Wellner (1979)",
    ));
    Ok(set)
}

/// Standard normal against Student t with r degrees of freedom.
pub fn bounds_student(df: f64) -> Result<BoundSet> {
    let report = rho_normal_student(df)?;
    let r = df;
    // 0.5 sqrt((7 + 5 sqrt 2) / (pi e^(1 + sqrt 2))), about 0.3165
    let sqrt2 = std::f64::consts::SQRT_2;
    let pinelis = 0.5
        * ((7.0 + 5.0 * sqrt2) / (std::f64::consts::PI * (1.0 + sqrt2).exp())).sqrt();
    let entries = vec![
        native("reciprocal_lower", Quantity::LogRho, Side::Lower, 0.5 / (r + 1.0), r >= 2.0),
        native("reciprocal_upper", Quantity::LogRho, Side::Upper, 0.5 / r, r >= 2.0),
        native(
            "half_reciprocal_tv_upper",
            Quantity::TotalVariation,
            Side::Upper,
            0.5 / r,
            true,
        ),
        cited(
            "sharp_constant_rate",
            Quantity::TotalVariation,
            Side::Upper,
            pinelis / r,
            r >= 4.0,
            "Pinelis (2015)",
        ),
    ];
    Ok(BoundSet {
        description: format!("standard normal versus student t with {df} degrees of freedom"),
        exact_log_rho: Some(report.log_rho),
        exact_tv: None,
        entries,
    })
}
