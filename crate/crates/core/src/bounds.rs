//! Closed-form probabilistic root bounds for Gaussian random polynomials.
//!
//! Every bound follows the same pattern: a deterministic Cauchy bound `V`
//! dominates the largest root modulus, so `P(max|ξ| ≤ c) ≥ P(V ≤ c)`, and
//! the law of `V` is known in closed form. For the monic ensemble the
//! Vieta product also gives `max|ξ| ≥ |a₀|^{1/n}`, which turns into an
//! upper probability.
//!
//! The lower probabilities are `F(c-1)ⁿ` with `F` the CDF of `|a_j|`
//! (monic) or `|a_j/a_n|` (general). They are evaluated as
//! `exp(n · ln1p(-(1 - F)))` so that `n` in the hundreds of thousands keeps
//! full precision.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{
    abs_cauchy_ratio_sf, abs_normal_cdf, abs_normal_sf, erfcinv, Probability,
};

/// Which random polynomial ensemble a statement is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    /// `aₙ = 1`, `a₀ … aₙ₋₁` i.i.d. `N(0, 1)`.
    MonicNormal,
    /// `a₀ … aₙ` i.i.d. `N(0, 1)`.
    GeneralNormal,
}

impl EnsembleKind {
    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::MonicNormal => "monic",
            EnsembleKind::GeneralNormal => "general",
        }
    }
}

/// Which closed-form result produced a probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Monic Cauchy bound with `|N(0,1)|` coefficients.
    MonicCauchyLower,
    /// Vieta product `max|ξ| ≥ |a₀|^{1/n}`.
    MonicVietaUpper,
    /// General Cauchy bound with standard Cauchy coefficient ratios.
    GeneralCauchyLower,
}

/// A radius together with the probability guarantees that hold for it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub radius: f64,
    pub degree: u64,
    pub ensemble: EnsembleKind,
    pub p_lower: Probability,
    pub lower_provenance: Provenance,
    pub p_upper: Option<Probability>,
    pub upper_provenance: Option<Provenance>,
}

fn check_degree(n: u64) -> Result<()> {
    if n < 1 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    Ok(())
}

fn check_open_probability(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("probability {p} must lie strictly between 0 and 1")));
    }
    Ok(())
}

fn check_radius(c: f64) -> Result<()> {
    if c.is_nan() {
        return Err(Error::Domain("radius is NaN".into()));
    }
    Ok(())
}

/// `1 - p^{1/n}` computed without cancellation for `p` near 1.
fn nth_root_complement(p: f64, n: u64) -> f64 {
    let log_p = if p > 0.5 { (p - 1.0).ln_1p() } else { p.ln() };
    -(log_p / n as f64).exp_m1()
}

/// `(1 - tail)ⁿ` for `tail ∈ [0, 1]`.
fn pow_from_tail(tail: f64, n: u64) -> f64 {
    if tail >= 1.0 {
        return 0.0;
    }
    (n as f64 * (-tail).ln_1p()).exp()
}

/// Lower bound on `P(all roots in |z| ≤ c)` for the monic ensemble:
/// `erf((c-1)/√2)ⁿ`, zero for `c ≤ 1`.
pub fn monic_lower_prob(c: f64, n: u64) -> Result<Probability> {
    check_degree(n)?;
    check_radius(c)?;
    if c <= 1.0 {
        return Ok(Probability::ZERO);
    }
    Ok(Probability::saturating(pow_from_tail(abs_normal_sf(c - 1.0), n)))
}

/// Smallest radius whose monic lower probability is `p`:
/// `√2 · erfinv(p^{1/n}) + 1`.
pub fn monic_bound_for_prob(p: f64, n: u64) -> Result<f64> {
    check_degree(n)?;
    check_open_probability(p)?;
    Ok(SQRT_2 * erfcinv(nth_root_complement(p, n))? + 1.0)
}

/// Upper bound on `P(all roots in |z| ≤ c)` for the monic ensemble:
/// `erf(cⁿ/√2)`.
pub fn monic_upper_prob(c: f64, n: u64) -> Result<Probability> {
    check_degree(n)?;
    check_radius(c)?;
    if c < 0.0 {
        return Err(Error::Domain(format!("radius {c} must be non-negative")));
    }
    if c == 0.0 {
        return Ok(Probability::ZERO);
    }
    // erf(x) rounds to 1 in double precision well before x = 7
    let log_arg = n as f64 * c.ln() - SQRT_2.ln();
    if log_arg > 7.0f64.ln() {
        return Ok(Probability::ONE);
    }
    Ok(abs_normal_cdf(SQRT_2 * log_arg.exp()))
}

/// Lower bound on `P(all roots in |z| ≤ c)` for the general ensemble:
/// `((2/π) atan(c-1))ⁿ`, zero for `c ≤ 1`.
pub fn general_lower_prob(c: f64, n: u64) -> Result<Probability> {
    check_degree(n)?;
    check_radius(c)?;
    if c <= 1.0 {
        return Ok(Probability::ZERO);
    }
    Ok(Probability::saturating(pow_from_tail(abs_cauchy_ratio_sf(c - 1.0), n)))
}

/// Smallest radius whose general lower probability is `p`:
/// `1 + tan((π/2) p^{1/n})`.
pub fn general_bound_for_prob(p: f64, n: u64) -> Result<f64> {
    check_degree(n)?;
    check_open_probability(p)?;
    let tail = nth_root_complement(p, n);
    let root = 1.0 - tail;
    let t = if root > 1.0 - 1e-8 {
        // tan(π/2 · (1 - q)) = cot(π/2 · q), away from the pole
        (FRAC_PI_2 * tail).tan().recip()
    } else {
        (FRAC_PI_2 * root).tan()
    };
    Ok(1.0 + t)
}

/// Bundles the closed-form guarantees for radius `c`.
pub fn certificate(c: f64, n: u64, ensemble: EnsembleKind) -> Result<BoundCertificate> {
    let cert = match ensemble {
        EnsembleKind::MonicNormal => BoundCertificate {
            radius: c,
            degree: n,
            ensemble,
            p_lower: monic_lower_prob(c, n)?,
            lower_provenance: Provenance::MonicCauchyLower,
            p_upper: Some(monic_upper_prob(c, n)?),
            upper_provenance: Some(Provenance::MonicVietaUpper),
        },
        EnsembleKind::GeneralNormal => BoundCertificate {
            radius: c,
            degree: n,
            ensemble,
            p_lower: general_lower_prob(c, n)?,
            lower_provenance: Provenance::GeneralCauchyLower,
            p_upper: None,
            upper_provenance: None,
        },
    };
    debug_assert!(cert.p_upper.is_none_or(|u| cert.p_lower <= u));
    Ok(cert)
}

/// Radius for probability `p` in the given ensemble.
pub fn bound_for_prob(p: f64, n: u64, ensemble: EnsembleKind) -> Result<f64> {
    match ensemble {
        EnsembleKind::MonicNormal => monic_bound_for_prob(p, n),
        EnsembleKind::GeneralNormal => general_bound_for_prob(p, n),
    }
}

/// Lower probability for radius `c` in the given ensemble.
pub fn lower_prob(c: f64, n: u64, ensemble: EnsembleKind) -> Result<Probability> {
    match ensemble {
        EnsembleKind::MonicNormal => monic_lower_prob(c, n),
        EnsembleKind::GeneralNormal => general_lower_prob(c, n),
    }
}
