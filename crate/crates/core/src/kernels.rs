//! Reproducing-kernel families on the disk and their Gram matrices.
//!
//! Every family is written `k(λ, z)` with the conjugate-linear slot first:
//! with `w = conj(f(λ)) f(z)` and `d = 1 - conj(λ) z`,
//!
//! | family                 | k(λ, z)                          |
//! |------------------------|----------------------------------|
//! | `szego`                | 1 / d                            |
//! | `bergman`              | 1 / d²                           |
//! | `schur_defect`         | (1 - w) / d                      |
//! | `schur_defect_squared` | ((1 - w) / d)²                   |
//! | `sb_defect`            | (1 - 2w + conj(f(λ))² f(z)²) / d² |
//! | `sb1_lower`            | (2w - w²) / d²                   |
//! | `sb1_upper`            | 1/d² - sb1_lower                 |
//! | `k_space`              | (w - 1) / d                      |
//! | `l_space`              | (2 - w) / d                      |
//! | `h_space`              | (1 - w) / d   (symbol b)         |
//! | `hb_space`             | (1 - w)² / d²                    |
//! | `sub_bergman`          | (1 - w) / d²                     |
//! | `hb_times_oneminus`    | d · hb_space                     |

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermit::HermitianMatrix;
use crate::points::PointSet;
use crate::symbol::{DiskPoint, Symbol};

/// Slack allowed on sampled modulus assertions.
pub const FLAG_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    Szego,
    Bergman,
    SchurDefect,
    SchurDefectSquared,
    SbDefect,
    Sb1Lower,
    Sb1Upper,
    KSpace,
    LSpace,
    HSpace,
    HbSpace,
    SubBergman,
    HbTimesOneminus,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 13] = [
        KernelFamily::Szego,
        KernelFamily::Bergman,
        KernelFamily::SchurDefect,
        KernelFamily::SchurDefectSquared,
        KernelFamily::SbDefect,
        KernelFamily::Sb1Lower,
        KernelFamily::Sb1Upper,
        KernelFamily::KSpace,
        KernelFamily::LSpace,
        KernelFamily::HSpace,
        KernelFamily::HbSpace,
        KernelFamily::SubBergman,
        KernelFamily::HbTimesOneminus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Szego => "szego",
            KernelFamily::Bergman => "bergman",
            KernelFamily::SchurDefect => "schur_defect",
            KernelFamily::SchurDefectSquared => "schur_defect_squared",
            KernelFamily::SbDefect => "sb_defect",
            KernelFamily::Sb1Lower => "sb1_lower",
            KernelFamily::Sb1Upper => "sb1_upper",
            KernelFamily::KSpace => "k_space",
            KernelFamily::LSpace => "l_space",
            KernelFamily::HSpace => "h_space",
            KernelFamily::HbSpace => "hb_space",
            KernelFamily::SubBergman => "sub_bergman",
            KernelFamily::HbTimesOneminus => "hb_times_oneminus",
        }
    }

    pub fn needs_symbol(self) -> bool {
        !matches!(self, KernelFamily::Szego | KernelFamily::Bergman)
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelFamily::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown kernel family '{s}'")))
    }
}

/// Sampled modulus assertion attached to a kernel family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeFlag {
    pub requirement: &'static str,
    pub inf_modulus: f64,
    pub sup_modulus: f64,
    pub ok: bool,
}

impl RangeFlag {
    /// The assertion a family needs of its symbol, if any.
    pub fn check(family: KernelFamily, symbol: &Symbol) -> Option<RangeFlag> {
        let inf = symbol.inf_modulus();
        let sup = symbol.sup_modulus();
        let (requirement, ok) = match family {
            KernelFamily::KSpace => ("|phi| > 1", inf >= 1.0 - FLAG_MARGIN),
            KernelFamily::LSpace => (
                "1 < |phi| < sqrt(2)",
                inf >= 1.0 - FLAG_MARGIN && sup <= std::f64::consts::SQRT_2 + FLAG_MARGIN,
            ),
            KernelFamily::HSpace => ("|b| <= 1", sup <= 1.0 + FLAG_MARGIN),
            _ => return None,
        };
        Some(RangeFlag {
            requirement,
            inf_modulus: inf,
            sup_modulus: sup,
            ok,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    symbol: Option<Symbol>,
    flag: Option<RangeFlag>,
}

impl KernelSpec {
    /// Builds a spec, rejecting missing/extra symbols and failed range flags.
    pub fn new(family: KernelFamily, symbol: Option<Symbol>) -> Result<Self> {
        let spec = Self::unchecked(family, symbol)?;
        if let Some(flag) = &spec.flag {
            if !flag.ok {
                return Err(Error::RangeFlag {
                    family: family.name().to_string(),
                    detail: format!(
                        "requires {}; sampled |phi| in [{:.6}, {:.6}]",
                        flag.requirement, flag.inf_modulus, flag.sup_modulus
                    ),
                });
            }
        }
        Ok(spec)
    }

    /// Like [`KernelSpec::new`] but records a failed range flag instead of rejecting it.
    pub fn unchecked(family: KernelFamily, symbol: Option<Symbol>) -> Result<Self> {
        match (&symbol, family.needs_symbol()) {
            (None, true) => {
                return Err(Error::Incompatible(format!("{family} requires a symbol")));
            }
            (Some(_), false) => {
                return Err(Error::Incompatible(format!("{family} takes no symbol")));
            }
            _ => {}
        }
        let flag = symbol.as_ref().and_then(|s| RangeFlag::check(family, s));
        Ok(KernelSpec { family, symbol, flag })
    }

    pub fn szego() -> Self {
        KernelSpec {
            family: KernelFamily::Szego,
            symbol: None,
            flag: None,
        }
    }

    pub fn bergman() -> Self {
        KernelSpec {
            family: KernelFamily::Bergman,
            symbol: None,
            flag: None,
        }
    }

    pub fn with_symbol(family: KernelFamily, symbol: &Symbol) -> Result<Self> {
        Self::new(family, Some(symbol.clone()))
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn symbol(&self) -> Option<&Symbol> {
        self.symbol.as_ref()
    }

    pub fn flag(&self) -> Option<&RangeFlag> {
        self.flag.as_ref()
    }

    fn symbol_value(&self, z: C64) -> C64 {
        self.symbol.as_ref().map_or(C64::new(0.0, 0.0), |s| s.value(z))
    }

    /// Kernel from precomputed symbol values `f(λ)`, `f(z)`.
    pub(crate) fn value_with(&self, lam: C64, z: C64, f_lam: C64, f_z: C64) -> C64 {
        let one = C64::new(1.0, 0.0);
        let d = one - lam.conj() * z;
        let w = f_lam.conj() * f_z;
        match self.family {
            KernelFamily::Szego => one / d,
            KernelFamily::Bergman => one / (d * d),
            KernelFamily::SchurDefect | KernelFamily::HSpace => (one - w) / d,
            KernelFamily::SchurDefectSquared => {
                let s = (one - w) / d;
                s * s
            }
            KernelFamily::SbDefect => {
                (one - 2.0 * w + f_lam.conj() * f_lam.conj() * f_z * f_z) / (d * d)
            }
            KernelFamily::Sb1Lower => (2.0 * w - w * w) / (d * d),
            KernelFamily::Sb1Upper => (one - (2.0 * w - w * w)) / (d * d),
            KernelFamily::KSpace => (w - one) / d,
            KernelFamily::LSpace => (2.0 - w) / d,
            KernelFamily::HbSpace => (one - w) * (one - w) / (d * d),
            KernelFamily::SubBergman => (one - w) / (d * d),
            KernelFamily::HbTimesOneminus => d * ((one - w) * (one - w) / (d * d)),
        }
    }
}

/// k(λ, z) for the given family.
pub fn kernel_value(spec: &KernelSpec, lam: DiskPoint, z: DiskPoint) -> C64 {
    let (l, zz) = (lam.value(), z.value());
    spec.value_with(l, zz, spec.symbol_value(l), spec.symbol_value(zz))
}

/// Gram matrix `G[i][j] = k(p_i, p_j)`, Hermitian by construction.
pub fn gram(spec: &KernelSpec, pts: &PointSet) -> HermitianMatrix {
    let z = pts.values();
    let f: Vec<C64> = z.iter().map(|&p| spec.symbol_value(p)).collect();
    HermitianMatrix::from_fn_symmetrized(z.len(), |i, j| spec.value_with(z[i], z[j], f[i], f[j]))
}

/// max over point pairs of |k_a + k_b - k_target|.
pub fn kernel_sum_residual(a: &KernelSpec, b: &KernelSpec, target: &KernelSpec, pts: &PointSet) -> f64 {
    let mut worst: f64 = 0.0;
    for &lam in pts.points() {
        for &z in pts.points() {
            let r = kernel_value(a, lam, z) + kernel_value(b, lam, z) - kernel_value(target, lam, z);
            worst = worst.max(r.norm());
        }
    }
    worst
}
