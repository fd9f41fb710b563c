//! Continuation oracles built from Euler-Maclaurin summation.
use num_complex::Complex64;

use super::provider::{character_values, CoefficientProvider};
use crate::complexfn::gamma::{bernoulli, finite};
use crate::error::{Error, Result};

type C64 = Complex64;

const EM_TERMS: usize = 8;

/// Hurwitz zeta(s, a) for a > 0 and s != 1.
pub fn hurwitz_zeta(s: C64, a: f64) -> Result<C64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("Hurwitz parameter a = {a} must be > 0")));
    }
    if (s - 1.0).norm() == 0.0 {
        return Err(Error::Pole("zeta(s, a) has a pole at s = 1".into()));
    }
    let n = (2.0 * s.norm() + 20.0).ceil() as usize;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        acc += (-s * (k as f64 + a).ln()).exp();
    }
    let x = n as f64 + a;
    let lx = x.ln();
    let xs = (-s * lx).exp();
    acc += xs * x / (s - 1.0) + xs * 0.5;
    // B_{2k}/(2k)! s(s+1)...(s+2k-2) x^{-s-2k+1}
    let mut rising = s;
    let mut xp = xs / x;
    let mut fact = 2.0;
    for k in 1..=EM_TERMS {
        acc += rising * xp * (bernoulli(2 * k) / fact);
        rising *= (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
        xp /= x * x;
        fact *= ((2 * k + 1) * (2 * k + 2)) as f64;
    }
    finite(acc, "hurwitz_zeta")
}

pub fn zeta(s: C64) -> Result<C64> {
    hurwitz_zeta(s, 1.0)
}

/// L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q).
pub fn dirichlet_l(s: C64, modulus: u64, index: u64) -> Result<C64> {
    let vals = character_values(modulus, index)?;
    if modulus == 1 {
        return zeta(s);
    }
    let q = modulus as f64;
    let mut acc = C64::new(0.0, 0.0);
    for (a, v) in vals.iter().enumerate().skip(1) {
        if v.norm() > 0.0 {
            acc += v * hurwitz_zeta(s, a as f64 / q)?;
        }
    }
    finite(acc * (-s * q.ln()).exp(), "dirichlet_l")
}

/// Exact finite sum for finitely supported coefficients.
fn finite_sum(p: &CoefficientProvider, s: C64, support: usize) -> Result<C64> {
    let t = p.table(support)?;
    let mut acc = C64::new(0.0, 0.0);
    for n in 1..=support {
        let a = t.get(n);
        if a.norm() != 0.0 {
            acc += a * (-s * (n as f64).ln()).exp();
        }
    }
    finite(acc, "Dirichlet polynomial")
}

/// Continuation oracle for F(s); fails for providers without one.
pub fn oracle_value(p: &CoefficientProvider, s: C64) -> Result<C64> {
    match p {
        CoefficientProvider::Zeta {} => zeta(s),
        CoefficientProvider::Dirichlet { modulus, index } => dirichlet_l(s, *modulus, *index),
        CoefficientProvider::Product { factors } => {
            let mut acc = C64::new(1.0, 0.0);
            for f in factors {
                acc *= oracle_value(f, s)?;
            }
            Ok(acc)
        }
        CoefficientProvider::Shifted { theta, base } => oracle_value(base, s - C64::new(0.0, *theta)),
        CoefficientProvider::List { .. } => Err(Error::NoOracle(p.kind_name().into())),
    }
}

/// F(s): the oracle when available, otherwise the exact finite Dirichlet sum.
pub fn series_value(p: &CoefficientProvider, s: C64) -> Result<C64> {
    if p.has_oracle() {
        return oracle_value(p, s);
    }
    match p.support() {
        Some(n) => finite_sum(p, s, n),
        None => Err(Error::NoOracle(p.kind_name().into())),
    }
}

/// conj(F(conj s)).
pub fn conj_series_value(p: &CoefficientProvider, s: C64) -> Result<C64> {
    Ok(series_value(p, s.conj())?.conj())
}
