//! Real polynomials, the Cauchy root bounds, and an Aberth–Ehrlich solver
//! for all complex roots.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default convergence tolerance for [`find_roots`].
pub const DEFAULT_TOL: f64 = 1e-12;
/// Iteration cap of the Aberth–Ehrlich iteration.
pub const MAX_ITERATIONS: usize = 500;
/// Angular offset of the initial guesses, breaks conjugate symmetry.
pub const DEFAULT_ANGLE_OFFSET: f64 = 0.4;
/// A root `r` counts as real when `|Im r| ≤ REAL_ROOT_TOL * (1 + |r|)`.
pub const REAL_ROOT_TOL: f64 = 1e-8;

/// A real polynomial `a₀ + a₁z + … + aₙzⁿ` with `n ≥ 1` and `aₙ ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coefficients: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from coefficients in ascending degree order.
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::Domain("polynomial degree must be at least 1".into()));
        }
        if coefficients.iter().any(|a| !a.is_finite()) {
            return Err(Error::Domain("polynomial coefficients must be finite".into()));
        }
        if *coefficients.last().unwrap() == 0.0 {
            return Err(Error::Domain("leading coefficient must be nonzero".into()));
        }
        Ok(Polynomial { coefficients })
    }

    /// Builds `(z - r₁)(z - r₂)…` from real roots.
    pub fn from_real_roots(roots: &[f64]) -> Result<Self> {
        let mut c = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= r * a;
            }
            c = next;
        }
        Polynomial::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn leading(&self) -> f64 {
        self.coefficients[self.degree()]
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1.0
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients.iter().fold(0.0, |m: f64, a| m.max(a.abs()))
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// Returns the same polynomial multiplied by `alpha ≠ 0`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Polynomial::new(self.coefficients.iter().map(|a| a * alpha).collect())
    }

    /// `1 + max_{j<n} |a_j|` for a monic polynomial.
    pub fn cauchy_bound_monic(&self) -> Result<f64> {
        if !self.is_monic() {
            return Err(Error::Domain(format!(
                "monic Cauchy bound needs leading coefficient 1, got {}",
                self.leading()
            )));
        }
        Ok(1.0 + self.coefficients[..self.degree()].iter().fold(0.0, |m: f64, a| m.max(a.abs())))
    }

    /// `1 + max_{i<n} |a_i / a_n|`; valid for every polynomial.
    pub fn cauchy_bound_general(&self) -> f64 {
        let lead = self.leading().abs();
        1.0 + self.coefficients[..self.degree()]
            .iter()
            .fold(0.0, |m: f64, a| m.max(a.abs() / lead))
    }
}

/// All roots of a polynomial, with multiplicity.
#[derive(Debug, Clone)]
pub struct RootSet {
    roots: Vec<Complex64>,
    /// `max_r |P(r)| / (max|a_i| (1+|r|)ⁿ)` over the returned roots.
    pub residual_scale: f64,
    pub iterations: usize,
}

impl RootSet {
    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn into_roots(self) -> Vec<Complex64> {
        self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Largest root modulus. Zero for an empty set.
    pub fn max_modulus(&self) -> f64 {
        self.roots.iter().fold(0.0, |m: f64, r| m.max(r.norm()))
    }

    pub fn real_count(&self) -> usize {
        self.roots.iter().filter(|r| is_real(**r)).count()
    }

    /// Number of roots with `|r| < 1` and with `|r| > 1`.
    pub fn unit_disk_split(&self) -> (usize, usize) {
        let inside = self.roots.iter().filter(|r| r.norm() < 1.0).count();
        let outside = self.roots.iter().filter(|r| r.norm() > 1.0).count();
        (inside, outside)
    }

    /// `Σ ln|rᵢ|`, the log of the product of root moduli.
    pub fn log_modulus_product(&self) -> f64 {
        self.roots.iter().map(|r| r.norm().ln()).sum()
    }
}

pub fn is_real(r: Complex64) -> bool {
    r.im.abs() <= REAL_ROOT_TOL * (1.0 + r.norm())
}

/// Aberth–Ehrlich solver configuration.
#[derive(Debug, Clone, Copy)]
pub struct RootFinder {
    pub tol: f64,
    pub max_iterations: usize,
    pub angle_offset: f64,
}

impl Default for RootFinder {
    fn default() -> Self {
        RootFinder {
            tol: DEFAULT_TOL,
            max_iterations: MAX_ITERATIONS,
            angle_offset: DEFAULT_ANGLE_OFFSET,
        }
    }
}

/// Finds all roots with the default solver settings and tolerance `tol`.
pub fn find_roots(p: &Polynomial, tol: f64) -> Result<RootSet> {
    RootFinder {
        tol,
        ..RootFinder::default()
    }
    .solve(p)
}

/// Value of `p(z)/p'(z)`, `|p(z)|`, and the Horner rounding bound at `z`,
/// for monic `c`. Points outside the unit disk go through the reversed
/// polynomial so that `zⁿ` never has to be formed.
struct Evaluation {
    ratio: Complex64,
    /// `ln |p(z)|`
    log_abs: f64,
    /// `ln Σ|c_i||z|^i`
    log_magnitude: f64,
}

fn evaluate(c: &[f64], z: Complex64) -> Evaluation {
    let n = c.len() - 1;
    let az = z.norm();
    if az <= 1.0 {
        let mut p = Complex64::new(c[n], 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        let mut mag = c[n].abs();
        for &a in c[..n].iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
            mag = mag * az + a.abs();
        }
        Evaluation {
            ratio: p / dp,
            log_abs: p.norm().ln(),
            log_magnitude: mag.ln(),
        }
    } else {
        // p(z) = zⁿ q(w), w = 1/z, q(w) = Σ c_i w^{n-i}
        let w = z.inv();
        let aw = 1.0 / az;
        let mut q = Complex64::new(c[0], 0.0);
        let mut dq = Complex64::new(0.0, 0.0);
        let mut mag = c[0].abs();
        for &a in &c[1..] {
            dq = dq * w + q;
            q = q * w + a;
            mag = mag * aw + a.abs();
        }
        let log_z = n as f64 * az.ln();
        Evaluation {
            ratio: z * q / (q * n as f64 - w * dq),
            log_abs: q.norm().ln() + log_z,
            log_magnitude: mag.ln() + log_z,
        }
    }
}

impl RootFinder {
    pub fn solve(&self, p: &Polynomial) -> Result<RootSet> {
        if !(self.tol > 0.0) {
            return Err(Error::Domain(format!("root finder tolerance {} must be positive", self.tol)));
        }
        let lead = p.leading();
        let c_all: Vec<f64> = p.coefficients().iter().map(|a| a / lead).collect();

        // exact zero roots factor out
        let zeros = c_all.iter().take_while(|&&a| a == 0.0).count();
        let c = &c_all[zeros..];
        let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
        let mut iterations = 0;

        match c.len() - 1 {
            0 => {}
            1 => roots.push(Complex64::new(-c[0], 0.0)),
            _ => {
                let (found, its) = self.aberth(c)?;
                iterations = its;
                roots.extend(found);
            }
        }

        let residual_scale = residual_scale(p, &roots);
        if !(residual_scale <= self.tol) {
            return Err(Error::NoConvergence { iterations });
        }
        Ok(RootSet {
            roots,
            residual_scale,
            iterations,
        })
    }

    fn aberth(&self, c: &[f64]) -> Result<(Vec<Complex64>, usize)> {
        let n = c.len() - 1;
        let mut z = initial_guesses(c, self.angle_offset);
        let mut done = vec![false; n];
        let rounding = 4.0 * (n as f64) * f64::EPSILON;
        let log_rounding = rounding.ln();

        for iteration in 1..=self.max_iterations {
            let mut pending = false;
            for k in 0..n {
                if done[k] {
                    continue;
                }
                let zk = z[k];
                let ev = evaluate(c, zk);
                if ev.log_abs == f64::NEG_INFINITY {
                    done[k] = true;
                    continue;
                }
                let repulsion: Complex64 = z
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &zj)| (zk - zj).inv())
                    .sum();
                let step = ev.ratio / (1.0 - ev.ratio * repulsion);
                let next = zk - step;
                if !(next.re.is_finite() && next.im.is_finite()) {
                    return Err(Error::NoConvergence { iterations: iteration });
                }
                z[k] = next;
                if step.norm() <= self.tol * (1.0 + next.norm())
                    || ev.log_abs <= log_rounding + ev.log_magnitude
                {
                    done[k] = true;
                } else {
                    pending = true;
                }
            }
            if !pending {
                return Ok((z, iteration));
            }
        }
        Err(Error::NoConvergence {
            iterations: self.max_iterations,
        })
    }
}

/// Starting points from the Newton polygon: the upper convex hull of
/// `(i, ln|cᵢ|)` splits the roots into groups whose moduli are estimated by
/// the hull slopes. Each group is spread over its own circle.
fn initial_guesses(c: &[f64], offset: f64) -> Vec<Complex64> {
    let n = c.len() - 1;
    let pts: Vec<(f64, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != 0.0)
        .map(|(i, a)| (i as f64, a.abs().ln()))
        .collect();
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut z = Vec::with_capacity(n);
    for seg in hull.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let m = (hi.0 - lo.0) as usize;
        let radius = ((lo.1 - hi.1) / m as f64).exp();
        let shift = TAU * lo.0 / n as f64 + offset;
        z.extend((0..m).map(|k| Complex64::from_polar(radius, TAU * k as f64 / m as f64 + shift)));
    }
    z
}

/// `max_r |P(r)| / (max|a_i| (1+|r|)ⁿ)`, evaluated in log space.
fn residual_scale(p: &Polynomial, roots: &[Complex64]) -> f64 {
    let lead = p.leading();
    let c: Vec<f64> = p.coefficients().iter().map(|a| a / lead).collect();
    let n = p.degree() as f64;
    let log_max = c.iter().fold(0.0, |m: f64, a| m.max(a.abs())).ln();
    roots
        .iter()
        .map(|&r| {
            let ev = evaluate(&c, r);
            (ev.log_abs - log_max - n * (1.0 + r.norm()).ln()).exp()
        })
        .fold(0.0, f64::max)
}
