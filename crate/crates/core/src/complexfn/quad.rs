use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C64 = Complex64;

const GL_ORDER: usize = 20;
const MAX_DEPTH: usize = 14;
const V_LIMIT: f64 = 1.0e5;

fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static NODES: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = GL_ORDER;
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        for i in 0..n {
            let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, t);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
                let dt = p1 / dp;
                t -= dt;
                if dt.abs() < 1e-16 {
                    break;
                }
            }
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            x[i] = t;
            w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
        (x, w)
    })
}

/// Vertical integration line Re(w) = abscissa, truncated at |Im w - center| <= v_max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineContour {
    pub abscissa: f64,
    pub v_max: f64,
    pub target_abs_tol: f64,
    /// Imaginary part around which the panels are laid out.
    #[serde(default)]
    pub center: f64,
}

impl LineContour {
    pub fn new(abscissa: f64, v_max: f64, target_abs_tol: f64) -> Self {
        LineContour {
            abscissa,
            v_max,
            target_abs_tol,
            center: 0.0,
        }
    }

    pub fn centered(mut self, center: f64) -> Self {
        self.center = center;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    /// Truncation height finally used.
    pub v_max: f64,
}

fn panel<F>(f: &F, a: f64, b: f64) -> Result<C64>
where
    F: Fn(f64) -> Result<C64>,
{
    let (x, w) = gauss_legendre();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = C64::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(w.iter()) {
        acc += f(mid + half * xi)? * *wi;
    }
    Ok(acc * half)
}

fn adaptive<F>(f: &F, a: f64, b: f64, whole: C64, tol: f64, depth: usize) -> Result<(C64, f64)>
where
    F: Fn(f64) -> Result<C64>,
{
    let m = 0.5 * (a + b);
    let left = panel(f, a, m)?;
    let right = panel(f, m, b)?;
    let refined = left + right;
    let err = (refined - whole).norm();
    if err <= tol || depth >= MAX_DEPTH {
        return Ok((refined, err));
    }
    let (l, el) = adaptive(f, a, m, left, tol / 2.0, depth + 1)?;
    let (r, er) = adaptive(f, m, b, right, tol / 2.0, depth + 1)?;
    Ok((l + r, el + er))
}

fn integrate_segment<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<(C64, f64)>
where
    F: Fn(f64) -> Result<C64>,
{
    // split into panels of width at most 2 before adapting
    let pieces = ((b - a) / 2.0).ceil().max(1.0) as usize;
    let h = (b - a) / pieces as f64;
    let mut acc = C64::new(0.0, 0.0);
    let mut err = 0.0;
    for k in 0..pieces {
        let lo = a + k as f64 * h;
        let hi = lo + h;
        let whole = panel(f, lo, hi)?;
        let (v, e) = adaptive(f, lo, hi, whole, tol / pieces as f64, 0)?;
        acc += v;
        err += e;
    }
    Ok((acc, err))
}

/// (1/2 pi i) times the integral of `integrand` along the contour.
///
/// The truncation height is doubled until the two outermost panels contribute
/// less than a tenth of the target tolerance.
pub fn line_integral<F>(integrand: F, contour: &LineContour) -> Result<QuadResult>
where
    F: Fn(C64) -> Result<C64>,
{
    if !(contour.v_max > 0.0 && contour.target_abs_tol > 0.0) {
        return Err(Error::Domain(
            "line contour needs v_max > 0 and target_abs_tol > 0".into(),
        ));
    }
    let c = contour.abscissa;
    let v0 = contour.center;
    let tol = contour.target_abs_tol;
    // dw = i dv, so (1/2 pi i) dw = dv / (2 pi)
    let g = |v: f64| -> Result<C64> { Ok(integrand(C64::new(c, v))? / (2.0 * PI)) };
    let mut vmax = contour.v_max;
    let (mut total, mut err) = integrate_segment(&g, v0 - vmax, v0 + vmax, tol / 4.0)?;
    loop {
        let lo = integrate_segment(&g, v0 - 2.0 * vmax, v0 - vmax, tol / 8.0)?;
        let hi = integrate_segment(&g, v0 + vmax, v0 + 2.0 * vmax, tol / 8.0)?;
        total += lo.0 + hi.0;
        err += lo.1 + hi.1;
        let outer = lo.0.norm() + hi.0.norm();
        vmax *= 2.0;
        if outer < tol / 10.0 {
            return Ok(QuadResult {
                value: total,
                error: err + outer,
                v_max: vmax,
            });
        }
        if vmax > V_LIMIT {
            return Err(Error::NonConvergence(format!(
                "line integral on Re(w) = {c}: tail contribution {outer:.3e} at |v| = {vmax} exceeds tolerance {tol:.1e}"
            )));
        }
    }
}

/// Plain Gauss-Legendre integral of g over [a, b] with adaptive refinement.
pub fn integrate_real<F>(g: F, a: f64, b: f64, tol: f64) -> Result<(C64, f64)>
where
    F: Fn(f64) -> Result<C64>,
{
    integrate_segment(&g, a, b, tol)
}
