use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// The six built-in small-jump intensity profiles plus a user supplied one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `s^{-β} ln(2/s)^2`
    RvLog2,
    /// `s^{-β}`
    Power,
    /// `ln(2/s)`
    Log,
    /// `1`
    Const,
    /// `ln(2/s)^{-1}`
    InvLog,
    /// `ln(2/s)^{-2}`; the only family with a finite jump measure.
    InvLog2,
    Custom,
}

impl Family {
    pub const BUILTIN: [Family; 6] = [
        Family::RvLog2,
        Family::Power,
        Family::Log,
        Family::Const,
        Family::InvLog,
        Family::InvLog2,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Family::RvLog2 => "rv-log2",
            Family::Power => "power",
            Family::Log => "log",
            Family::Const => "const",
            Family::InvLog => "invlog",
            Family::InvLog2 => "invlog2",
            Family::Custom => "custom",
        }
    }

    /// Row number in the usual table of examples (1..=6), `None` for custom.
    pub fn row(self) -> Option<usize> {
        Family::BUILTIN.iter().position(|f| *f == self).map(|i| i + 1)
    }

    pub fn uses_beta(self) -> bool {
        matches!(self, Family::RvLog2 | Family::Power)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::BUILTIN
            .iter()
            .copied()
            .find(|f| f.id() == s)
            .ok_or_else(|| {
                Error::config(
                    "ell",
                    format!("unknown family `{s}` (expected rv-log2, power, log, const, invlog or invlog2)"),
                )
            })
    }
}

type EllFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A positive function ℓ on (0, 1), regularly varying at zero with index `-alpha`.
#[derive(Clone)]
pub struct ScaleFunction {
    family: Family,
    beta: f64,
    alpha: f64,
    custom: Option<EllFn>,
    custom_limit_at_zero: Option<f64>,
}

impl fmt::Debug for ScaleFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScaleFunction")
            .field("family", &self.family)
            .field("beta", &self.beta)
            .field("alpha", &self.alpha)
            .finish()
    }
}

fn check_beta(beta: f64) -> Result<f64> {
    if beta > 0.0 && beta < 2.0 {
        Ok(beta)
    } else {
        Err(Error::domain("beta", beta, "(0, 2)"))
    }
}

impl ScaleFunction {
    fn slowly_varying(family: Family) -> Self {
        ScaleFunction {
            family,
            beta: 0.0,
            alpha: 0.0,
            custom: None,
            custom_limit_at_zero: None,
        }
    }

    pub fn rv_log2(beta: f64) -> Result<Self> {
        let beta = check_beta(beta)?;
        Ok(ScaleFunction {
            family: Family::RvLog2,
            beta,
            alpha: beta,
            custom: None,
            custom_limit_at_zero: None,
        })
    }

    pub fn power(beta: f64) -> Result<Self> {
        let beta = check_beta(beta)?;
        Ok(ScaleFunction {
            family: Family::Power,
            beta,
            alpha: beta,
            custom: None,
            custom_limit_at_zero: None,
        })
    }

    pub fn log() -> Self {
        Self::slowly_varying(Family::Log)
    }

    pub fn constant() -> Self {
        Self::slowly_varying(Family::Const)
    }

    pub fn inv_log() -> Self {
        Self::slowly_varying(Family::InvLog)
    }

    pub fn inv_log2() -> Self {
        Self::slowly_varying(Family::InvLog2)
    }

    /// A user supplied ℓ with its declared regular-variation index `-alpha`.
    ///
    /// The index is trusted, not estimated. `limit_at_zero` is the finite value
    /// of `L(0+)` when the jump measure is finite, `None` otherwise.
    pub fn custom<F>(alpha: f64, limit_at_zero: Option<f64>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(0.0..2.0).contains(&alpha) {
            return Err(Error::domain("alpha", alpha, "[0, 2)"));
        }
        Ok(ScaleFunction {
            family: Family::Custom,
            beta: 0.0,
            alpha,
            custom: Some(Arc::new(f)),
            custom_limit_at_zero: limit_at_zero,
        })
    }

    /// Builds a built-in family from its string id; `beta` is required by
    /// `rv-log2` and `power` and ignored otherwise.
    pub fn from_id(id: &str, beta: Option<f64>) -> Result<Self> {
        let family: Family = id.parse()?;
        Self::builtin(family, beta)
    }

    pub fn builtin(family: Family, beta: Option<f64>) -> Result<Self> {
        let need_beta = || beta.ok_or_else(|| Error::config("beta", format!("family `{family}` requires beta")));
        match family {
            Family::RvLog2 => Self::rv_log2(need_beta()?),
            Family::Power => Self::power(need_beta()?),
            Family::Log => Ok(Self::log()),
            Family::Const => Ok(Self::constant()),
            Family::InvLog => Ok(Self::inv_log()),
            Family::InvLog2 => Ok(Self::inv_log2()),
            Family::Custom => Err(Error::config("ell", "custom families cannot be built from an id")),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Negated regular-variation index.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// ℓ(s) without domain checking.
    #[inline]
    pub(crate) fn value(&self, s: f64) -> f64 {
        match self.family {
            Family::RvLog2 => {
                let l = (2.0 / s).ln();
                s.powf(-self.beta) * l * l
            }
            Family::Power => s.powf(-self.beta),
            Family::Log => (2.0 / s).ln(),
            Family::Const => 1.0,
            Family::InvLog => 1.0 / (2.0 / s).ln(),
            Family::InvLog2 => {
                let l = (2.0 / s).ln();
                1.0 / (l * l)
            }
            Family::Custom => (self.custom.as_ref().expect("custom family carries a function"))(s),
        }
    }

    /// `lim_{r→0+} L(r)` when finite.
    pub fn limit_at_zero(&self) -> Option<f64> {
        match self.family {
            Family::InvLog2 => Some(1.0 / std::f64::consts::LN_2),
            Family::Custom => self.custom_limit_at_zero,
            _ => None,
        }
    }
}
