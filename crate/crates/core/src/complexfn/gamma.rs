use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

type C64 = Complex64;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Exact values of B_0 .. B_20 (convention B_1 = -1/2).
const BERNOULLI_SMALL: [(f64, f64); 21] = [
    (1.0, 1.0),
    (-1.0, 2.0),
    (1.0, 6.0),
    (0.0, 1.0),
    (-1.0, 30.0),
    (0.0, 1.0),
    (1.0, 42.0),
    (0.0, 1.0),
    (-1.0, 30.0),
    (0.0, 1.0),
    (5.0, 66.0),
    (0.0, 1.0),
    (-691.0, 2730.0),
    (0.0, 1.0),
    (7.0, 6.0),
    (0.0, 1.0),
    (-3617.0, 510.0),
    (0.0, 1.0),
    (43867.0, 798.0),
    (0.0, 1.0),
    (-174611.0, 330.0),
];

const BERNOULLI_MAX: usize = 80;

fn bernoulli_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut b = vec![0.0; BERNOULLI_MAX + 1];
        for (n, (p, q)) in BERNOULLI_SMALL.iter().enumerate() {
            b[n] = p / q;
        }
        // B_{2k} = (-1)^{k+1} 2 (2k)! zeta(2k) / (2 pi)^{2k}
        for n in (22..=BERNOULLI_MAX).step_by(2) {
            let zeta: f64 = (1..200).map(|m| (m as f64).powi(-(n as i32))).sum();
            let mut log_fact = 0.0;
            for j in 2..=n {
                log_fact += (j as f64).ln();
            }
            let mag = (2.0f64.ln() + log_fact - n as f64 * (2.0 * PI).ln()).exp() * zeta;
            b[n] = if (n / 2) % 2 == 1 { mag } else { -mag };
        }
        b
    })
}

/// Bernoulli number B_n for n <= 80.
pub fn bernoulli(n: usize) -> f64 {
    assert!(n <= BERNOULLI_MAX, "bernoulli index {n} out of table range");
    bernoulli_table()[n]
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    let mut c = 1.0;
    for j in 0..k {
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    c
}

/// Bernoulli polynomial B_n(a).
pub fn bernoulli_poly(n: usize, a: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    let mut pow = C64::new(1.0, 0.0);
    // sum over k from n down to 0 of C(n,k) B_k a^{n-k}
    for k in (0..=n).rev() {
        acc += pow * (binomial_f64(n, k) * bernoulli(k));
        pow *= a;
    }
    acc
}

pub(crate) fn finite(z: C64, what: &str) -> Result<C64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Domain(format!("{what} produced a non-finite value")))
    }
}

fn nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Stirling remainder series for log Gamma at |z| >= 10 and Re z >= 0.
fn stirling(z: C64) -> C64 {
    let mut acc = (z - 0.5) * z.ln() - z + LN_SQRT_2PI;
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut p = inv;
    for k in 1..=12 {
        let n = 2 * k;
        acc += p * (bernoulli(n) / ((n * (n - 1)) as f64));
        p *= inv2;
    }
    acc
}

/// Principal branch of log Gamma(z).
pub fn log_gamma(z: C64) -> Result<C64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain("log_gamma of a non-finite argument".into()));
    }
    if nonpositive_integer(z) {
        return Err(Error::Pole(format!("Gamma has a pole at z = {}", z.re)));
    }
    let mut shift = 0usize;
    if z.re < 10.0 {
        let need = (10.0 - z.re).ceil();
        if z.norm() < 10.0 || z.re < 0.0 {
            shift = need.max(0.0) as usize;
        }
    }
    if shift == 0 {
        return finite(stirling(z), "log_gamma");
    }
    let mut correction = C64::new(0.0, 0.0);
    for k in 0..shift {
        let w = z + k as f64;
        // on the negative real axis take the limit from the upper half-plane
        let l = if w.im == 0.0 && w.re < 0.0 {
            C64::new((-w.re).ln(), PI)
        } else {
            w.ln()
        };
        correction += l;
    }
    let mut v = stirling(z + shift as f64) - correction;
    if z.im == 0.0 && z.re > 0.0 {
        v.im = 0.0;
    }
    finite(v, "log_gamma")
}

/// Gamma(z) via exp(log Gamma).
pub fn gamma(z: C64) -> Result<C64> {
    Ok(log_gamma(z)?.exp())
}

/// Reciprocal Gamma, zero at the non-positive integers.
pub fn rgamma(z: C64) -> Result<C64> {
    if nonpositive_integer(z) {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok((-log_gamma(z)?).exp())
}

/// log Gamma(x+a) - [(x+a-1/2) log x - x + log sqrt(2 pi)], for Re x > 0.
pub fn stirling_remainder(a: C64, x: C64) -> Result<C64> {
    if x.norm() >= 14.0 && (x + a).re > 0.0 {
        let inv = 1.0 / x;
        let mut p = inv;
        let mut acc = C64::new(0.0, 0.0);
        // odd and even terms can differ in size, so the divergence test
        // compares consecutive pairs
        let mut prev = 0.0;
        let mut last_pair = f64::INFINITY;
        for n in 1..=40usize {
            let term = p * bernoulli_poly(n + 1, a) * (if n % 2 == 1 { 1.0 } else { -1.0 })
                / ((n * (n + 1)) as f64);
            let m = term.norm();
            let pair = m + prev;
            if n > 4 && pair > last_pair {
                break;
            }
            acc += term;
            if pair < 1e-18 * acc.norm().max(1e-300) {
                break;
            }
            last_pair = pair;
            prev = m;
            p *= inv;
        }
        return Ok(acc);
    }
    let main = (x + a - 0.5) * x.ln() - x + LN_SQRT_2PI;
    Ok(log_gamma(x + a)? - main)
}

/// Derivative Gamma^{(m)}(z) by central differences with Richardson refinement.
pub fn gamma_derivative(z: C64, m: usize) -> Result<C64> {
    if m == 0 {
        return gamma(z);
    }
    let stencil = |h: f64| -> Result<C64> {
        match m {
            1 => Ok((gamma(z + h)? - gamma(z - h)?) / (2.0 * h)),
            2 => Ok((gamma(z + h)? - gamma(z)? * 2.0 + gamma(z - h)?) / (h * h)),
            3 => Ok((gamma(z + 2.0 * h)? - gamma(z + h)? * 2.0 + gamma(z - h)? * 2.0
                - gamma(z - 2.0 * h)?)
                / (2.0 * h * h * h)),
            _ => Err(Error::Domain(format!(
                "Gamma derivative of order {m} is not supported"
            ))),
        }
    };
    let h = if m == 1 { 1e-4 } else { 1e-3 };
    let d1 = stencil(h)?;
    let d2 = stencil(h / 2.0)?;
    Ok((d2 * 4.0 - d1) / 3.0)
}

/// Logarithm with argument in [0, pi], defined on the closed upper half-plane.
pub fn upper_log(z: C64) -> Result<C64> {
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::Domain("upper_log(0)".into()));
    }
    if z.im < -1e-12 * r {
        return Err(Error::Domain(format!(
            "upper_log argument {z} lies in the lower half-plane"
        )));
    }
    let mut arg = z.im.atan2(z.re);
    if arg < 0.0 {
        arg = if z.re < 0.0 { PI } else { 0.0 };
    }
    Ok(C64::new(r.ln(), arg))
}

/// Generalized binomial coefficient rho (rho-1) ... (rho-r+1) / r!.
pub fn gen_binomial(rho: C64, r: usize) -> C64 {
    let mut c = C64::new(1.0, 0.0);
    for j in 0..r {
        c = c * (rho - j as f64) / (j + 1) as f64;
    }
    c
}

/// Q_R(z, rho) = (1+z)^rho - sum_{r<=R} C(rho, r) z^r.
pub fn binom_remainder(z: C64, rho: C64, big_r: usize) -> Result<C64> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("|z| = {} must be < 1", z.norm())));
    }
    let full = (rho * upper_log(C64::new(1.0, 0.0) + z)?).exp();
    let mut partial = C64::new(0.0, 0.0);
    let mut c = C64::new(1.0, 0.0);
    let mut zp = C64::new(1.0, 0.0);
    for r in 0..=big_r {
        partial += c * zp;
        c = c * (rho - r as f64) / (r + 1) as f64;
        zp *= z;
    }
    finite(full - partial, "binom_remainder")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn log_gamma_examples() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-14);
        assert!((log_gamma(c(4.0, 0.0)).unwrap() - c(6.0f64.ln(), 0.0)).norm() < 1e-14);
        assert!((log_gamma(c(0.5, 0.0)).unwrap().re - 0.572_364_942_924_700_1).abs() < 1e-14);
        assert!(matches!(log_gamma(c(-2.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(log_gamma(c(0.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn log_gamma_reflection_values() {
        // Gamma(1/2 + i) |.|^2 = pi / cosh(pi)
        let g = gamma(c(0.5, 1.0)).unwrap();
        assert!((g.norm_sqr() - PI / PI.cosh()).abs() < 1e-14);
        // Gamma(-1/2) = -2 sqrt(pi)
        let g = gamma(c(-0.5, 0.0)).unwrap();
        assert!((g - c(-2.0 * PI.sqrt(), 0.0)).norm() < 1e-13);
        // |Gamma(it)|^2 = pi / (t sinh(pi t))
        let t = 30.0;
        let g = gamma(c(0.0, t)).unwrap();
        assert!((g.norm_sqr() / (PI / (t * (PI * t).sinh())) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn principal_branch_is_continuous_across_real_axis() {
        let a = log_gamma(c(-3.5, 1e-9)).unwrap();
        let b = log_gamma(c(-3.5, 0.0)).unwrap();
        assert!((a - b).norm() < 1e-6);
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(1), -0.5);
        assert!((bernoulli(22) - 854513.0 / 138.0).abs() < 1e-9);
        assert!((bernoulli_poly(2, c(0.5, 0.0)).re + 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn stirling_remainder_matches_direct() {
        for &(a, x) in &[(c(0.25, 0.0), c(20.0, 15.0)), (c(0.0, 0.3), c(10.0, -30.0))] {
            let s = stirling_remainder(a, x).unwrap();
            let direct = log_gamma(x + a).unwrap() - ((x + a - 0.5) * x.ln() - x + LN_SQRT_2PI);
            assert!((s - direct).norm() < 1e-12, "{s} vs {direct}");
        }
    }

    #[test]
    fn upper_log_examples() {
        assert!(upper_log(c(1.0, 0.0)).unwrap().norm() < 1e-16);
        assert!((upper_log(c(-1.0, 0.0)).unwrap() - c(0.0, PI)).norm() < 1e-15);
        assert!((upper_log(c(-2.0, 0.0)).unwrap() - c(2.0f64.ln(), PI)).norm() < 1e-15);
        assert!(upper_log(c(0.0, -1.0)).is_err());
        assert!(upper_log(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn gen_binomial_examples() {
        assert_eq!(gen_binomial(c(3.7, 1.0), 0), c(1.0, 0.0));
        assert!(gen_binomial(c(2.0, 0.0), 3).norm() < 1e-16);
        assert!((gen_binomial(c(0.0, 1.0), 2) - c(-0.5, -0.5)).norm() < 1e-16);
    }

    #[test]
    fn binom_remainder_examples() {
        assert!(binom_remainder(c(0.0, 0.0), c(3.0, 1.0), 2).unwrap().norm() < 1e-16);
        assert!(
            (binom_remainder(c(0.0, 0.5), c(2.0, 0.0), 0).unwrap() - c(-0.25, 1.0)).norm() < 1e-15
        );
        assert!(binom_remainder(c(0.0, 0.3), c(2.0, 0.0), 2).unwrap().norm() < 1e-15);
        assert!(binom_remainder(c(0.0, 1.0), c(2.0, 0.0), 2).is_err());
    }

    #[test]
    fn gamma_derivative_at_one() {
        // Gamma'(1) = -euler_gamma
        let g1 = gamma_derivative(c(1.0, 0.0), 1).unwrap();
        assert!((g1.re + 0.577_215_664_901_532_9).abs() < 1e-8);
        // Gamma''(1) = gamma^2 + pi^2/6
        let g2 = gamma_derivative(c(1.0, 0.0), 2).unwrap();
        let e = 0.577_215_664_901_532_9f64;
        assert!((g2.re - (e * e + PI * PI / 6.0)).abs() < 1e-6);
    }
}
