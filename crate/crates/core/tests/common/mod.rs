#![allow(dead_code)]
use num_complex::Complex64;
use twistlab::catalog::catalog_descriptor;
use twistlab::compat::{is_compatible, CompatibleSystem};
use twistlab::selberg::{CoefficientProvider, GammaFactorTerm, LFunctionDescriptor, PolarPart};

pub type C64 = Complex64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cat(name: &str) -> LFunctionDescriptor {
    catalog_descriptor(name).unwrap()
}

/// Q^s Gamma(lambda s + mu) with placeholder list coefficients.
pub fn single_factor(lambda: f64, mu: C64, q: f64) -> LFunctionDescriptor {
    LFunctionDescriptor::new(
        "single",
        c(1.0, 0.0),
        q,
        vec![GammaFactorTerm::new(lambda, mu)],
        PolarPart::entire(),
        CoefficientProvider::List {
            values: vec![c(1.0, 0.0), c(0.5, 0.0)],
        },
    )
    .unwrap()
}

/// zeta(s - i tau) written as a descriptor with theta_F = -tau.
pub fn shifted_zeta(tau: f64) -> LFunctionDescriptor {
    LFunctionDescriptor::new(
        "zeta-shift",
        C64::from_polar(1.0, -tau * std::f64::consts::PI.ln()),
        std::f64::consts::PI.powf(-0.5),
        vec![GammaFactorTerm::new(0.5, c(0.0, -tau / 2.0))],
        PolarPart::entire(),
        CoefficientProvider::Shifted {
            theta: tau,
            base: Box::new(CoefficientProvider::Zeta {}),
        },
    )
    .unwrap()
}

pub fn sys(n: &[i64]) -> CompatibleSystem {
    CompatibleSystem::new(n.to_vec()).unwrap()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every (n_0, nu) with U = {n_0 + j + 2N nu_j}, nu_j >= 0, found by trying all assignments.
pub fn all_decompositions(s: &CompatibleSystem) -> Vec<(i64, Vec<i64>)> {
    let u = s.union();
    let m = 2 * s.n_big as i64;
    let lo = *u.iter().min().unwrap();
    let hi = *u.iter().max().unwrap();
    let perms = permutations(u.len());
    let mut found = Vec::new();
    for n0 in (lo - 4 * m)..=hi {
        for p in &perms {
            let mut nu = Vec::with_capacity(u.len());
            for (j, &idx) in p.iter().enumerate() {
                let rest = u[idx] - n0 - j as i64;
                if rest < 0 || rest % m != 0 {
                    break;
                }
                nu.push(rest / m);
            }
            if nu.len() == u.len() && !found.contains(&(n0, nu.clone())) {
                found.push((n0, nu));
            }
        }
    }
    found
}

pub fn small_systems() -> Vec<CompatibleSystem> {
    let mut out = Vec::new();
    for a in 0..=8 {
        out.push(sys(&[a]));
        for b in 0..=8 {
            out.push(sys(&[a, b]));
        }
    }
    out.into_iter().filter(is_compatible).collect()
}
