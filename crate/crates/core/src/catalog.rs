//! Built-in descriptors.
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::selberg::{CoefficientProvider, GammaFactorTerm, LFunctionDescriptor, PolarPart};

type C64 = Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub const CATALOG: [&str; 6] = [
    "zeta",
    "dirichlet-4-odd",
    "zeta-squared",
    "zeta-times-dirichlet",
    "halfint-model",
    "theta-shift-demo",
];

pub fn catalog() -> Vec<&'static str> {
    CATALOG.to_vec()
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn zeta_provider() -> CoefficientProvider {
    CoefficientProvider::Zeta {}
}

fn chi4_provider() -> CoefficientProvider {
    CoefficientProvider::Dirichlet {
        modulus: 4,
        index: 1,
    }
}

/// r_3(n) n^{-1/4}: normalized sum-of-three-squares counts, n <= 400.
fn halfint_coefficients() -> Vec<C64> {
    let n_max = 400i64;
    let mut r3 = vec![0u32; n_max as usize + 1];
    let b = (n_max as f64).sqrt() as i64 + 1;
    for x in -b..=b {
        for y in -b..=b {
            for z in -b..=b {
                let n = x * x + y * y + z * z;
                if n >= 1 && n <= n_max {
                    r3[n as usize] += 1;
                }
            }
        }
    }
    (1..=n_max as usize)
        .map(|n| re(r3[n] as f64 * (n as f64).powf(-0.25)))
        .collect()
}

fn theta_demo_coefficients() -> Vec<C64> {
    (1..=128)
        .map(|n: i32| re(if n % 2 == 1 { 1.0 } else { -1.0 }))
        .collect()
}

/// Descriptor for a catalog name.
pub fn catalog_descriptor(name: &str) -> Result<LFunctionDescriptor> {
    let half = |mu: f64| GammaFactorTerm::new(0.5, re(mu));
    match name {
        "zeta" => LFunctionDescriptor::new(
            "zeta",
            re(1.0),
            PI.powf(-0.5),
            vec![half(0.0)],
            PolarPart::new(vec![re(1.0)]),
            zeta_provider(),
        ),
        "dirichlet-4-odd" => LFunctionDescriptor::new(
            "dirichlet-4-odd",
            re(1.0),
            2.0 / PI.sqrt(),
            vec![half(0.5)],
            PolarPart::entire(),
            chi4_provider(),
        ),
        "zeta-squared" => LFunctionDescriptor::new(
            "zeta-squared",
            re(1.0),
            1.0 / PI,
            vec![half(0.0), half(0.0)],
            PolarPart::new(vec![re(2.0 * EULER_GAMMA), re(1.0)]),
            CoefficientProvider::Product {
                factors: vec![zeta_provider(), zeta_provider()],
            },
        ),
        "zeta-times-dirichlet" => LFunctionDescriptor::new(
            "zeta-times-dirichlet",
            re(1.0),
            2.0 / PI,
            vec![half(0.0), half(0.5)],
            PolarPart::new(vec![re(PI / 4.0)]),
            CoefficientProvider::Product {
                factors: vec![zeta_provider(), chi4_provider()],
            },
        ),
        "halfint-model" => LFunctionDescriptor::new(
            "halfint-model",
            re(1.0),
            1.0 / PI,
            vec![GammaFactorTerm::new(1.0, re(0.25))],
            PolarPart::entire(),
            CoefficientProvider::List {
                values: halfint_coefficients(),
            },
        ),
        "theta-shift-demo" => LFunctionDescriptor::new(
            "theta-shift-demo",
            re(1.0),
            1.0,
            vec![GammaFactorTerm::new(0.5, C64::new(0.0, 1.0))],
            PolarPart::entire(),
            CoefficientProvider::List {
                values: theta_demo_coefficients(),
            },
        ),
        other => Err(Error::Validation(format!(
            "unknown catalog descriptor '{other}' (known: {})",
            CATALOG.join(", ")
        ))),
    }
}

/// A catalog name or a path to a descriptor JSON file.
pub fn load_descriptor(name_or_path: &str) -> Result<LFunctionDescriptor> {
    if CATALOG.contains(&name_or_path) {
        return catalog_descriptor(name_or_path);
    }
    let path = std::path::Path::new(name_or_path);
    if path.exists() {
        return LFunctionDescriptor::from_path(path);
    }
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(name_or_path);
    let alias = match stem {
        "halfint" => "halfint-model",
        "zeta2" | "zeta_squared" => "zeta-squared",
        "chi4" | "dirichlet4" => "dirichlet-4-odd",
        "theta" | "theta_shift" => "theta-shift-demo",
        s => s,
    };
    if CATALOG.contains(&alias) {
        return catalog_descriptor(alias);
    }
    Err(Error::Validation(format!(
        "descriptor '{name_or_path}' is neither a catalog name nor a readable file"
    )))
}
