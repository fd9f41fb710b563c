use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    AscendingPower,
    InversePower,
    InverseFactorial,
}

impl SeriesKind {
    fn name(self) -> &'static str {
        match self {
            SeriesKind::AscendingPower => "ascending-power",
            SeriesKind::InversePower => "inverse-power",
            SeriesKind::InverseFactorial => "inverse-factorial",
        }
    }
}

/// Coefficients indexed m = 1..M; the constant term is never stored.
///
/// For the inverse-factorial kind entry l is the coefficient of
/// 1/((z-1)(z-2)...(z-l)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    pub kind: SeriesKind,
    pub coefficients: Vec<C64>,
}

impl TruncatedSeries {
    pub fn new(kind: SeriesKind, coefficients: Vec<C64>) -> Self {
        TruncatedSeries { kind, coefficients }
    }

    pub fn zero(kind: SeriesKind, m: usize) -> Self {
        TruncatedSeries {
            kind,
            coefficients: vec![C64::new(0.0, 0.0); m],
        }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    /// Coefficient of index m (1-based); zero beyond the truncation.
    pub fn coeff(&self, m: usize) -> C64 {
        if m == 0 || m > self.coefficients.len() {
            C64::new(0.0, 0.0)
        } else {
            self.coefficients[m - 1]
        }
    }

    fn expect(&self, kind: SeriesKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::KindMismatch {
                expected: kind.name().into(),
                found: self.kind.name().into(),
            })
        }
    }

    /// Sum of the stored terms at z (constant term excluded).
    pub fn eval(&self, z: C64) -> C64 {
        match self.kind {
            SeriesKind::AscendingPower => {
                let mut acc = C64::new(0.0, 0.0);
                for c in self.coefficients.iter().rev() {
                    acc = (acc + c) * z;
                }
                acc
            }
            SeriesKind::InversePower => {
                let x = 1.0 / z;
                let mut acc = C64::new(0.0, 0.0);
                for c in self.coefficients.iter().rev() {
                    acc = (acc + c) * x;
                }
                acc
            }
            SeriesKind::InverseFactorial => {
                let mut acc = C64::new(0.0, 0.0);
                let mut basis = C64::new(1.0, 0.0);
                for (i, c) in self.coefficients.iter().enumerate() {
                    basis /= z - (i + 1) as f64;
                    acc += c * basis;
                }
                acc
            }
        }
    }
}

/// exp of an inverse-power series without constant term; the constant 1 is implicit.
pub fn series_exp(s: &TruncatedSeries) -> Result<TruncatedSeries> {
    s.expect(SeriesKind::InversePower)?;
    let m = s.order();
    let mut g = vec![C64::new(0.0, 0.0); m + 1];
    g[0] = C64::new(1.0, 0.0);
    for n in 1..=m {
        let mut acc = C64::new(0.0, 0.0);
        for k in 1..=n {
            acc += s.coeff(k) * g[n - k] * k as f64;
        }
        g[n] = acc / n as f64;
    }
    Ok(TruncatedSeries::new(SeriesKind::InversePower, g[1..].to_vec()))
}

/// Stirling numbers of the second kind S(n, k) for 0 <= k <= n <= m.
pub fn stirling2_table(m: usize) -> Vec<Vec<f64>> {
    let mut s = vec![vec![0.0; m + 1]; m + 1];
    s[0][0] = 1.0;
    for n in 1..=m {
        for k in 1..=n {
            s[n][k] = k as f64 * s[n - 1][k] + s[n - 1][k - 1];
        }
    }
    s
}

/// Convert an inverse-power series into inverse-factorial form.
///
/// Uses 1/((z-1)...(z-l)) = sum_{m>=l} S(m,l) z^{-m}; the result agrees with
/// the input through order z^{-M}.
pub fn to_inverse_factorial(s: &TruncatedSeries) -> Result<TruncatedSeries> {
    s.expect(SeriesKind::InversePower)?;
    let m = s.order();
    let st = stirling2_table(m);
    let mut d = vec![C64::new(0.0, 0.0); m];
    for l in 1..=m {
        let mut v = s.coeff(l);
        for lp in 1..l {
            v -= d[lp - 1] * st[l][lp];
        }
        d[l - 1] = v;
    }
    Ok(TruncatedSeries::new(SeriesKind::InverseFactorial, d))
}

/// Re-expand an inverse-factorial series into inverse powers through its order.
pub fn inverse_factorial_to_powers(s: &TruncatedSeries) -> Result<TruncatedSeries> {
    s.expect(SeriesKind::InverseFactorial)?;
    let m = s.order();
    let st = stirling2_table(m);
    let mut c = vec![C64::new(0.0, 0.0); m];
    for (mm, slot) in c.iter_mut().enumerate() {
        let mm = mm + 1;
        for l in 1..=mm {
            *slot += s.coeff(l) * st[mm][l];
        }
    }
    Ok(TruncatedSeries::new(SeriesKind::InversePower, c))
}
