//! Shape constraints and their reduction to a canonical form by sign flips.

use core::fmt;
use core::str::FromStr;

use crate::error::Error;
use crate::geometry::HullKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Curvature {
    Quasiconvex,
    Quasiconcave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Monotonicity {
    Decreasing,
    Increasing,
    None,
}

impl Monotonicity {
    pub fn flipped(self) -> Self {
        match self {
            Self::Decreasing => Self::Increasing,
            Self::Increasing => Self::Decreasing,
            Self::None => Self::None,
        }
    }
}

/// Curvature × monotonicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShapeSpec {
    pub curvature: Curvature,
    pub monotonicity: Monotonicity,
}

/// Sign flips that take a shape to `(quasiconvex, decreasing)` or
/// `(quasiconvex, none)`.
///
/// Negating the responses swaps quasiconvex with quasiconcave and reverses
/// the direction of monotonicity; negating the covariates reverses the
/// direction of monotonicity only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canonical {
    pub shape: ShapeSpec,
    pub y_sign: f64,
    pub x_sign: f64,
}

impl ShapeSpec {
    pub const fn new(curvature: Curvature, monotonicity: Monotonicity) -> Self {
        Self { curvature, monotonicity }
    }

    pub const QUASICONVEX_DECREASING: Self = Self::new(Curvature::Quasiconvex, Monotonicity::Decreasing);
    pub const QUASICONVEX_INCREASING: Self = Self::new(Curvature::Quasiconvex, Monotonicity::Increasing);
    pub const QUASICONVEX: Self = Self::new(Curvature::Quasiconvex, Monotonicity::None);
    pub const QUASICONCAVE_INCREASING: Self = Self::new(Curvature::Quasiconcave, Monotonicity::Increasing);
    pub const QUASICONCAVE_DECREASING: Self = Self::new(Curvature::Quasiconcave, Monotonicity::Decreasing);
    pub const QUASICONCAVE: Self = Self::new(Curvature::Quasiconcave, Monotonicity::None);

    /// All six combinations.
    pub const ALL: [Self; 6] = [
        Self::QUASICONVEX_DECREASING,
        Self::QUASICONVEX_INCREASING,
        Self::QUASICONVEX,
        Self::QUASICONCAVE_INCREASING,
        Self::QUASICONCAVE_DECREASING,
        Self::QUASICONCAVE,
    ];

    pub fn is_canonical(self) -> bool {
        self.curvature == Curvature::Quasiconvex && self.monotonicity != Monotonicity::Increasing
    }

    pub fn canonical(self) -> Canonical {
        let (y_sign, mono) = match self.curvature {
            Curvature::Quasiconvex => (1.0, self.monotonicity),
            Curvature::Quasiconcave => (-1.0, self.monotonicity.flipped()),
        };
        let (x_sign, mono) = match mono {
            Monotonicity::Increasing => (-1.0, Monotonicity::Decreasing),
            m => (1.0, m),
        };
        Canonical {
            shape: Self::new(Curvature::Quasiconvex, mono),
            y_sign,
            x_sign,
        }
    }

    /// Hull whose membership decides level-set constraints for the
    /// quasiconvex version of this shape's monotonicity.
    pub fn hull_kind(self) -> HullKind {
        match self.monotonicity {
            Monotonicity::Decreasing => HullKind::Upper,
            Monotonicity::Increasing => HullKind::Lower,
            Monotonicity::None => HullKind::Plain,
        }
    }
}

impl fmt::Display for Curvature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Quasiconvex => "quasiconvex",
            Self::Quasiconcave => "quasiconcave",
        })
    }
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Decreasing => "decreasing",
            Self::Increasing => "increasing",
            Self::None => "none",
        })
    }
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.curvature, self.monotonicity)
    }
}

/// Accepts `curvature-monotonicity` or a bare curvature (no monotonicity).
impl FromStr for ShapeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (c, m) = s.split_once('-').unwrap_or((s, "none"));
        Ok(Self::new(c.parse()?, m.parse()?))
    }
}

impl FromStr for Curvature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "quasiconvex" => Ok(Self::Quasiconvex),
            "quasiconcave" => Ok(Self::Quasiconcave),
            _ => Err(Error::InvalidParams("curvature must be quasiconvex or quasiconcave".into())),
        }
    }
}

impl FromStr for Monotonicity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "decreasing" => Ok(Self::Decreasing),
            "increasing" => Ok(Self::Increasing),
            "none" => Ok(Self::None),
            _ => Err(Error::InvalidParams(
                "monotonicity must be decreasing, increasing or none".into(),
            )),
        }
    }
}
