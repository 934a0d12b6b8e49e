//! Expected number of real zeros of a degree-`n` polynomial with i.i.d.
//! standard normal coefficients.
//!
//! The integral form is
//!
//! ```text
//! E N_n = (4/π) ∫₀¹ sqrt( 1/(1-t²)² - (n+1)² t^{2n} / (1-t^{2n+2})² ) dt.
//! ```
//!
//! Both terms of the radicand blow up like `1/(1-t)²` at `t = 1` while
//! their difference tends to `n(n+2)/12`. With `t = e^{-h}` the radicand is
//!
//! ```text
//! e^{2h}/4 · [ 1/sinh²h - (n+1)²/sinh²((n+1)h) ]
//!   = e^{2h}/4 · [ φ(h) - (n+1)² φ((n+1)h) ],   φ(x) = 1/sinh²x - 1/x²,
//! ```
//!
//! where the `1/x²` poles cancel exactly. `φ` is smooth with
//! `φ(0) = -1/3`, so the integrand is evaluated without cancellation all the
//! way to the endpoint, and `t^{2n}` never has to be formed.

use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_2_PI, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::montecarlo;

/// Constant term of the large-`n` expansion.
pub const ASYMPTOTIC_CONSTANT: f64 = 0.6257358072;
/// `C` in the `C/n²` remainder bound reported by [`kac_asymptotic`].
/// `n²·|integral - asymptotic|` rises monotonically to 0.5575 over
/// `n ∈ [50, 200]`; rounded up.
pub const ASYMPTOTIC_REMAINDER: f64 = 0.6;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_DEGREE: u64 = 1_000_000;
/// Width of the endpoint panel `[1-δ, 1]` in the initial partition.
pub const ENDPOINT_PANEL: f64 = 1e-3;
const MAX_SUBDIVISIONS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KacMethod {
    Integral,
    Asymptotic,
    MonteCarlo,
}

impl KacMethod {
    pub fn name(self) -> &'static str {
        match self {
            KacMethod::Integral => "integral",
            KacMethod::Asymptotic => "asymptotic",
            KacMethod::MonteCarlo => "mc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KacEstimate {
    pub degree: u64,
    pub value: f64,
    pub method: KacMethod,
    /// Quadrature error estimate, the `C/n²` remainder bound, or the Monte
    /// Carlo standard error, depending on `method`.
    pub error_indicator: f64,
}

/// `1/sinh²x - 1/x²` for `x ≥ 0`.
fn phi(x: f64) -> f64 {
    if x < 0.1 {
        let x2 = x * x;
        // -1/3 + x²/15 - 2x⁴/189 + x⁶/675 - 2x⁸/10395
        -1.0 / 3.0 + x2 * (1.0 / 15.0 + x2 * (-2.0 / 189.0 + x2 * (1.0 / 675.0 - x2 * 2.0 / 10395.0)))
    } else {
        let s = x.sinh();
        1.0 / (s * s) - 1.0 / (x * x)
    }
}

/// The Kac radicand `1/(1-t²)² - (n+1)² t^{2n}/(1-t^{2n+2})²` on `[0, 1]`.
pub fn kac_radicand(n: u64, t: f64) -> f64 {
    let m = (n + 1) as f64;
    if t <= (-1.0f64).exp() {
        // far from t = 1 the two terms never nearly cancel
        let a = 1.0 / (1.0 - t * t);
        let tn = if t == 0.0 { 0.0 } else { (n as f64 * t.ln()).exp() };
        let b = m * tn / (-(2.0 * m * t.ln()).exp_m1());
        return (a - b) * (a + b);
    }
    let h = -(t - 1.0).ln_1p();
    (2.0 * h).exp() * 0.25 * (phi(h) - m * m * phi(m * h))
}

/// Limit of the radicand at `t = 1`.
pub fn endpoint_radicand(n: u64) -> f64 {
    let n = n as f64;
    n * (n + 2.0) / 12.0
}

fn integrand(n: u64, t: f64) -> f64 {
    kac_radicand(n, t).max(0.0).sqrt()
}

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
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// 15-point Kronrod rule with embedded 7-point Gauss error estimate.
fn gauss_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Globally adaptive Gauss–Kronrod over the given initial breakpoints.
/// Returns `(integral, error estimate)`.
fn integrate(f: impl Fn(f64) -> f64, breaks: &[f64], tol: f64) -> Result<(f64, f64)> {
    let mut heap: BinaryHeap<Panel> = breaks
        .windows(2)
        .map(|w| gauss_kronrod(&f, w[0], w[1]))
        .collect();
    let mut subdivisions = 0;
    loop {
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= tol {
            let mut panels = heap.into_vec();
            panels.sort_by(|x, y| x.a.total_cmp(&y.a));
            return Ok((panels.iter().map(|p| p.value).sum(), error));
        }
        if subdivisions >= MAX_SUBDIVISIONS {
            return Err(Error::Quadrature {
                tol,
                achieved: error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("non-empty partition");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // panel at machine resolution; nothing left to refine
            return Err(Error::Quadrature {
                tol,
                achieved: error,
                subdivisions,
            });
        }
        heap.push(gauss_kronrod(&f, worst.a, mid));
        heap.push(gauss_kronrod(&f, mid, worst.b));
        subdivisions += 1;
    }
}

/// Expected real-zero count by adaptive quadrature, to absolute tolerance `tol`.
pub fn kac_integral(n: u64, tol: f64) -> Result<KacEstimate> {
    if !(1..=MAX_DEGREE).contains(&n) {
        return Err(Error::Domain(format!("degree {n} outside 1..={MAX_DEGREE}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let scale = 4.0 / PI;
    let (value, error) = integrate(
        |t| integrand(n, t),
        &[0.0, 1.0 - ENDPOINT_PANEL, 1.0],
        tol / scale,
    )?;
    Ok(KacEstimate {
        degree: n,
        value: scale * value,
        method: KacMethod::Integral,
        error_indicator: scale * error,
    })
}

/// `(2/π) ln n + 0.6257358072 + 2/(nπ)`.
pub fn kac_asymptotic(n: u64) -> Result<KacEstimate> {
    if n < 1 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    let nf = n as f64;
    Ok(KacEstimate {
        degree: n,
        value: FRAC_2_PI * nf.ln() + ASYMPTOTIC_CONSTANT + 2.0 / (nf * PI),
        method: KacMethod::Asymptotic,
        error_indicator: ASYMPTOTIC_REMAINDER / (nf * nf),
    })
}

/// Mean real-root count over `trials` general-ensemble draws.
pub fn mc_real_roots(n: u64, trials: usize, seed: u64) -> Result<KacEstimate> {
    if n < 1 || trials < 1 {
        return Err(Error::Domain("degree and trials must be at least 1".into()));
    }
    let (counts, _failures) = montecarlo::real_root_counts(n as usize, trials, seed)?;
    let values: Vec<f64> = counts.into_iter().map(|c| c as f64).collect();
    let (value, se) = montecarlo::stats::mean_and_se(&values);
    Ok(KacEstimate {
        degree: n,
        value,
        method: KacMethod::MonteCarlo,
        error_indicator: se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Radicand as the variance of K with P(K = k) ∝ t^{2k}, k = 0..n,
    /// divided by t². Independent of the closed form.
    fn radicand_by_variance(n: u64, t: f64) -> f64 {
        let w: Vec<f64> = (0..=n).map(|k| t.powi(2 * k as i32)).collect();
        let total: f64 = w.iter().sum();
        let mean: f64 = w.iter().enumerate().map(|(k, x)| k as f64 * x).sum::<f64>() / total;
        let var: f64 = w
            .iter()
            .enumerate()
            .map(|(k, x)| (k as f64 - mean).powi(2) * x)
            .sum::<f64>()
            / total;
        var / (t * t)
    }

    /// Composite Simpson on the variance form; test oracle.
    fn integral_by_simpson(n: u64, panels: usize) -> f64 {
        let h = 1.0 / panels as f64;
        let f = |t: f64| {
            if t == 0.0 {
                1.0
            } else {
                radicand_by_variance(n, t).sqrt()
            }
        };
        let mut s = f(0.0) + f(1.0);
        for k in 1..panels {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(k as f64 * h);
        }
        4.0 / PI * s * h / 3.0
    }

    #[test]
    fn radicand_matches_variance_form() {
        for n in [1u64, 2, 5, 10, 50] {
            for t in [0.05, 0.3, 0.36, 0.37, 0.6, 0.9, 0.99, 0.999, 1.0 - 1e-6] {
                let a = kac_radicand(n, t);
                let b = radicand_by_variance(n, t);
                assert!(((a - b) / b).abs() < 1e-10, "n={n} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn endpoint_limit_from_series() {
        for n in [1u64, 2, 3, 10, 100] {
            let series = radicand_by_variance(n, 1.0 - 1e-9);
            assert!((series - endpoint_radicand(n)).abs() < 1e-5 * endpoint_radicand(n));
            assert!((kac_radicand(n, 1.0) - endpoint_radicand(n)).abs() < 1e-12 * endpoint_radicand(n));
        }
        // n = 1: density of a standard Cauchy root at 1 is 1/(2π), i.e. sqrt = 1/2
        assert!((endpoint_radicand(1).sqrt() - 0.5).abs() < 1e-15);
        assert!((integrand(1, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn n1_integrand_is_lorentzian() {
        for t in [0.0, 0.1, 0.5, 0.9, 0.9999] {
            assert!((integrand(1, t) - 1.0 / (1.0 + t * t)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn integral_n1_is_one() {
        let est = kac_integral(1, DEFAULT_TOL).unwrap();
        assert!((est.value - 1.0).abs() < 1e-8);
        assert_eq!(est.method, KacMethod::Integral);
    }

    #[test]
    fn integral_matches_simpson_oracle() {
        for n in [2u64, 5, 10] {
            let q = kac_integral(n, 1e-10).unwrap().value;
            let s = integral_by_simpson(n, 20_000);
            assert!((q - s).abs() < 1e-7, "n={n}: {q} vs {s}");
        }
    }

    #[test]
    fn integral_increasing_in_degree() {
        let v: Vec<f64> = (1..=30).map(|n| kac_integral(n, 1e-10).unwrap().value).collect();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn integral_handles_huge_degree() {
        let est = kac_integral(1_000_000, DEFAULT_TOL).unwrap();
        let asym = kac_asymptotic(1_000_000).unwrap();
        assert!((est.value - asym.value).abs() < 1e-6, "{} vs {}", est.value, asym.value);
    }

    #[test]
    fn asymptotic_substitution() {
        assert!((kac_asymptotic(1).unwrap().value - (0.6257358072 + 2.0 / PI)).abs() < 1e-15);
        let want = 2.0 / PI * 100f64.ln() + 0.6257358072 + 2.0 / (100.0 * PI);
        assert!((kac_asymptotic(100).unwrap().value - want).abs() < 1e-15);
    }

    #[test]
    fn asymptotic_gap_shrinks() {
        let gaps: Vec<f64> = [10u64, 20, 40, 80, 160]
            .iter()
            .map(|&n| (kac_integral(n, 1e-12).unwrap().value - kac_asymptotic(n).unwrap().value).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    }

    #[test]
    fn asymptotic_remainder_calibration_holds() {
        for n in (50..=200).step_by(10) {
            let i = kac_integral(n, 1e-12).unwrap().value;
            let a = kac_asymptotic(n).unwrap();
            assert!((i - a.value).abs() <= a.error_indicator, "n={n}");
        }
        let i = kac_integral(200, 1e-12).unwrap().value;
        let a = kac_asymptotic(200).unwrap();
        assert!((i - a.value).abs() <= ASYMPTOTIC_REMAINDER / 200.0 / 200.0);
    }

    #[test]
    fn domain_errors() {
        assert!(kac_integral(0, 1e-8).is_err());
        assert!(kac_integral(5, 0.0).is_err());
        assert!(kac_integral(MAX_DEGREE + 1, 1e-8).is_err());
        assert!(kac_asymptotic(0).is_err());
        assert!(mc_real_roots(3, 0, 1).is_err());
    }

    #[test]
    fn mc_linear_is_exact() {
        let est = mc_real_roots(1, 500, 99).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.error_indicator, 0.0);
    }

    #[test]
    fn mc_quadratic_matches_integral() {
        let mc = mc_real_roots(2, 1_000_000, 2).unwrap();
        let exact = kac_integral(2, 1e-10).unwrap().value;
        assert!((mc.value - exact).abs() <= 3.0 * mc.error_indicator, "{} vs {exact}", mc.value);
    }

    #[test]
    fn mc_degree_ten_matches_integral() {
        let mc = mc_real_roots(10, 100_000, 10).unwrap();
        let exact = kac_integral(10, 1e-10).unwrap().value;
        assert!((mc.value - exact).abs() <= 3.0 * mc.error_indicator, "{} vs {exact}", mc.value);
    }
}
