use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C64 = Complex64;

/// Source of the Dirichlet coefficients a(n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CoefficientProvider {
    Zeta {},
    Dirichlet { modulus: u64, index: u64 },
    Product { factors: Vec<CoefficientProvider> },
    List { values: Vec<C64> },
    /// a(n) n^{i theta} for a base provider.
    Shifted {
        theta: f64,
        base: Box<CoefficientProvider>,
    },
}

/// Coefficient table a(1..=horizon); slot 0 is unused and zero.
#[derive(Debug, Clone)]
pub enum CoeffTable {
    Ones(usize),
    Real(Arc<Vec<f64>>),
    Complex(Arc<Vec<C64>>),
}

impl CoeffTable {
    pub fn horizon(&self) -> usize {
        match self {
            CoeffTable::Ones(n) => *n,
            CoeffTable::Real(v) => v.len() - 1,
            CoeffTable::Complex(v) => v.len() - 1,
        }
    }

    #[inline]
    pub fn get(&self, n: usize) -> C64 {
        match self {
            CoeffTable::Ones(h) => {
                if n >= 1 && n <= *h {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            CoeffTable::Real(v) => C64::new(v.get(n).copied().unwrap_or(0.0), 0.0),
            CoeffTable::Complex(v) => v.get(n).copied().unwrap_or(C64::new(0.0, 0.0)),
        }
    }

    pub fn is_real(&self) -> bool {
        !matches!(self, CoeffTable::Complex(_))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// (Z/qZ)^* is cyclic for q = 1, 2, 4, p^k, 2p^k with p an odd prime.
pub fn has_primitive_root(q: u64) -> bool {
    if q == 1 || q == 2 || q == 4 {
        return true;
    }
    let f = factorize(q);
    match f.as_slice() {
        [(p, _)] => *p != 2,
        [(2, 1), (p, _)] => *p != 2,
        _ => false,
    }
}

fn primitive_root(q: u64) -> u64 {
    if q <= 2 {
        return 1;
    }
    let phi = euler_phi(q);
    let primes: Vec<u64> = factorize(phi).iter().map(|&(p, _)| p).collect();
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        b %= q;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % q;
            }
            b = b * b % q;
            e >>= 1;
        }
        r
    };
    (2..q)
        .find(|&g| gcd(g, q) == 1 && primes.iter().all(|&p| pow(g, phi / p) != 1))
        .expect("cyclic group has a generator")
}

/// Values chi(0..q) of the character chi_j(g^a) = e(j a / phi(q)), g the least primitive root.
pub fn character_values(modulus: u64, index: u64) -> Result<Vec<C64>> {
    if modulus == 0 {
        return Err(Error::Validation("character modulus must be >= 1".into()));
    }
    if !has_primitive_root(modulus) {
        return Err(Error::Validation(format!(
            "modulus {modulus}: only cyclic unit groups (1, 2, 4, p^k, 2p^k) are supported"
        )));
    }
    let phi = euler_phi(modulus);
    if index >= phi {
        return Err(Error::Validation(format!(
            "character index {index} out of range 0..{phi} for modulus {modulus}"
        )));
    }
    let mut vals = vec![C64::new(0.0, 0.0); modulus as usize];
    if modulus == 1 {
        vals[0] = C64::new(1.0, 0.0);
        return Ok(vals);
    }
    let g = primitive_root(modulus);
    let mut x = 1u64;
    for a in 0..phi {
        let k = (index * a) % phi;
        let v = if 4 * k == phi {
            C64::new(0.0, 1.0)
        } else if 2 * k == phi {
            C64::new(-1.0, 0.0)
        } else if 4 * k == 3 * phi {
            C64::new(0.0, -1.0)
        } else if k == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::from_polar(1.0, 2.0 * PI * k as f64 / phi as f64)
        };
        vals[x as usize] = v;
        x = x * g % modulus;
    }
    Ok(vals)
}

fn cache() -> &'static Mutex<HashMap<String, CoeffTable>> {
    static CACHE: OnceLock<Mutex<HashMap<String, CoeffTable>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn convolve(a: &CoeffTable, b: &CoeffTable, n: usize) -> CoeffTable {
    if a.is_real() && b.is_real() {
        let ra: Vec<f64> = (0..=n).map(|i| a.get(i).re).collect();
        let rb: Vec<f64> = (0..=n).map(|i| b.get(i).re).collect();
        let mut out = vec![0.0; n + 1];
        for i in 1..=n {
            if ra[i] == 0.0 {
                continue;
            }
            let mut m = i;
            let mut j = 1;
            while m <= n {
                out[m] += ra[i] * rb[j];
                j += 1;
                m += i;
            }
        }
        CoeffTable::Real(Arc::new(out))
    } else {
        let ca: Vec<C64> = (0..=n).map(|i| a.get(i)).collect();
        let cb: Vec<C64> = (0..=n).map(|i| b.get(i)).collect();
        let mut out = vec![C64::new(0.0, 0.0); n + 1];
        for i in 1..=n {
            if ca[i] == C64::new(0.0, 0.0) {
                continue;
            }
            let mut m = i;
            let mut j = 1;
            while m <= n {
                out[m] += ca[i] * cb[j];
                j += 1;
                m += i;
            }
        }
        CoeffTable::Complex(Arc::new(out))
    }
}

impl CoefficientProvider {
    pub fn kind_name(&self) -> &'static str {
        match self {
            CoefficientProvider::Zeta {} => "zeta",
            CoefficientProvider::Dirichlet { .. } => "dirichlet",
            CoefficientProvider::Product { .. } => "product",
            CoefficientProvider::List { .. } => "list",
            CoefficientProvider::Shifted { .. } => "shifted",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CoefficientProvider::Zeta {} => Ok(()),
            CoefficientProvider::Dirichlet { modulus, index } => {
                character_values(*modulus, *index).map(|_| ())
            }
            CoefficientProvider::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::Validation("product provider needs factors".into()));
                }
                factors.iter().try_for_each(|f| f.validate())
            }
            CoefficientProvider::List { values } => {
                if values.is_empty() {
                    return Err(Error::Validation("list provider needs values".into()));
                }
                if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                    return Err(Error::Validation("list provider has non-finite values".into()));
                }
                Ok(())
            }
            CoefficientProvider::Shifted { theta, base } => {
                if !theta.is_finite() {
                    return Err(Error::Validation("shift theta must be finite".into()));
                }
                base.validate()
            }
        }
    }

    /// Whether an analytic continuation oracle exists.
    pub fn has_oracle(&self) -> bool {
        match self {
            CoefficientProvider::Zeta {} | CoefficientProvider::Dirichlet { .. } => true,
            CoefficientProvider::Product { factors } => factors.iter().all(|f| f.has_oracle()),
            CoefficientProvider::List { .. } => false,
            CoefficientProvider::Shifted { base, .. } => base.has_oracle(),
        }
    }

    /// Largest n with a(n) possibly nonzero, when finite.
    pub fn support(&self) -> Option<usize> {
        match self {
            CoefficientProvider::Zeta {} | CoefficientProvider::Dirichlet { .. } => None,
            CoefficientProvider::Product { factors } => factors
                .iter()
                .map(|f| f.support())
                .try_fold(1usize, |acc, s| s.map(|s| acc.saturating_mul(s))),
            CoefficientProvider::List { values } => Some(values.len()),
            CoefficientProvider::Shifted { base, .. } => base.support(),
        }
    }

    /// Number of zeta-like factors: |a(n)| is bounded by the (r)-fold divisor function.
    pub fn divisor_rank(&self) -> usize {
        match self {
            CoefficientProvider::Zeta {} | CoefficientProvider::Dirichlet { .. } => 1,
            CoefficientProvider::Product { factors } => {
                factors.iter().map(|f| f.divisor_rank()).sum()
            }
            CoefficientProvider::List { .. } => 0,
            CoefficientProvider::Shifted { base, .. } => base.divisor_rank(),
        }
    }

    /// max |a(n)| over a finite support (1 for the unbounded kinds).
    pub fn sup_abs(&self) -> f64 {
        match self {
            CoefficientProvider::List { values } => {
                values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
            CoefficientProvider::Product { factors } => {
                factors.iter().map(|f| f.sup_abs()).product()
            }
            CoefficientProvider::Shifted { base, .. } => base.sup_abs(),
            _ => 1.0,
        }
    }

    fn key(&self) -> String {
        serde_json::to_string(self).expect("provider serializes")
    }

    fn build(&self, n: usize) -> Result<CoeffTable> {
        Ok(match self {
            CoefficientProvider::Zeta {} => CoeffTable::Ones(n),
            CoefficientProvider::Dirichlet { modulus, index } => {
                let vals = character_values(*modulus, *index)?;
                let q = *modulus as usize;
                if vals.iter().all(|v| v.im == 0.0) {
                    let mut t = vec![0.0; n + 1];
                    for (i, slot) in t.iter_mut().enumerate().skip(1) {
                        *slot = vals[i % q].re;
                    }
                    CoeffTable::Real(Arc::new(t))
                } else {
                    let mut t = vec![C64::new(0.0, 0.0); n + 1];
                    for (i, slot) in t.iter_mut().enumerate().skip(1) {
                        *slot = vals[i % q];
                    }
                    CoeffTable::Complex(Arc::new(t))
                }
            }
            CoefficientProvider::Product { factors } => {
                let mut acc = factors[0].table(n)?;
                for f in &factors[1..] {
                    acc = convolve(&acc, &f.table(n)?, n);
                }
                acc
            }
            CoefficientProvider::List { values } => {
                if values.iter().all(|v| v.im == 0.0) {
                    let mut t = vec![0.0; n + 1];
                    for (i, v) in values.iter().enumerate().take(n) {
                        t[i + 1] = v.re;
                    }
                    CoeffTable::Real(Arc::new(t))
                } else {
                    let mut t = vec![C64::new(0.0, 0.0); n + 1];
                    for (i, v) in values.iter().enumerate().take(n) {
                        t[i + 1] = *v;
                    }
                    CoeffTable::Complex(Arc::new(t))
                }
            }
            CoefficientProvider::Shifted { theta, base } => {
                let b = base.table(n)?;
                let mut t = vec![C64::new(0.0, 0.0); n + 1];
                for (i, slot) in t.iter_mut().enumerate().skip(1) {
                    *slot = b.get(i) * C64::from_polar(1.0, theta * (i as f64).ln());
                }
                CoeffTable::Complex(Arc::new(t))
            }
        })
    }

    /// Coefficients a(1..=n), cached process-wide and reused for smaller requests.
    pub fn table(&self, n: usize) -> Result<CoeffTable> {
        if let CoefficientProvider::Zeta {} = self {
            return Ok(CoeffTable::Ones(n));
        }
        let key = self.key();
        if let Some(t) = cache().lock().expect("cache lock").get(&key) {
            if t.horizon() >= n {
                return Ok(t.clone());
            }
        }
        let t = self.build(n)?;
        cache()
            .lock()
            .expect("cache lock")
            .insert(key, t.clone());
        Ok(t)
    }

    /// Single coefficient a(n).
    pub fn coefficient(&self, n: usize) -> Result<C64> {
        if n == 0 {
            return Ok(C64::new(0.0, 0.0));
        }
        Ok(match self {
            CoefficientProvider::Zeta {} => C64::new(1.0, 0.0),
            CoefficientProvider::Dirichlet { modulus, index } => {
                character_values(*modulus, *index)?[n % *modulus as usize]
            }
            CoefficientProvider::List { values } => {
                values.get(n - 1).copied().unwrap_or(C64::new(0.0, 0.0))
            }
            CoefficientProvider::Shifted { theta, base } => {
                base.coefficient(n)? * C64::from_polar(1.0, theta * (n as f64).ln())
            }
            CoefficientProvider::Product { .. } => self.table(n)?.get(n),
        })
    }
}
