//! Generators for the example curves.

mod koch;
mod hilbert;
mod positive_area;
mod sierpinski;

pub use hilbert::{hilbert, hilbert_centers, hilbert_d2xy};
pub use koch::{koch, koch_standing};
pub use positive_area::{limit_area, positive_area_curve, stage_areas, LimitArea, PositiveArea, SquareFamily};
pub use sierpinski::{half_sierpinski, half_sierpinski_standing, sierpinski_arrowhead};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::Polyline;

/// Largest vertex count a generator will produce.
pub const MAX_VERTICES: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FractalKind {
    Koch,
    Hilbert,
    Arrowhead,
    HalfSierpinski,
    PositiveArea,
}

impl FractalKind {
    pub fn name(self) -> &'static str {
        match self {
            FractalKind::Koch => "koch",
            FractalKind::Hilbert => "hilbert",
            FractalKind::Arrowhead => "arrowhead",
            FractalKind::HalfSierpinski => "half-sierpinski",
            FractalKind::PositiveArea => "positive-area",
        }
    }

    /// Vertex count at `level`, saturating.
    pub fn vertex_count(self, level: u32) -> u64 {
        let pow = |b: u64| b.checked_pow(level).unwrap_or(u64::MAX);
        match self {
            FractalKind::Koch | FractalKind::Hilbert | FractalKind::PositiveArea => pow(4).saturating_add(1),
            FractalKind::Arrowhead => pow(3).saturating_add(1),
            FractalKind::HalfSierpinski => pow(3).div_ceil(2).saturating_add(1),
        }
    }

    /// Highest level within [`MAX_VERTICES`].
    pub fn max_level(self) -> u32 {
        (0..64).take_while(|&l| self.vertex_count(l) <= MAX_VERTICES).last().unwrap_or(0)
    }
}

impl std::str::FromStr for FractalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "koch" => FractalKind::Koch,
            "hilbert" => FractalKind::Hilbert,
            "arrowhead" => FractalKind::Arrowhead,
            "half-sierpinski" | "half_sierpinski" => FractalKind::HalfSierpinski,
            "positive-area" | "positive_area" => FractalKind::PositiveArea,
            other => return Err(invalid(format!("unknown fractal kind '{other}'"))),
        })
    }
}

/// Kind, level and (for the positive-area curve) the corridor parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractalSpec {
    pub kind: FractalKind,
    pub level: u32,
    pub epsilons: Option<Vec<f64>>,
}

impl FractalSpec {
    pub fn new(kind: FractalKind, level: u32) -> Self {
        Self { kind, level, epsilons: None }
    }

    pub fn generate(&self) -> Result<Polyline> {
        match self.kind {
            FractalKind::Koch => koch(self.level),
            FractalKind::Hilbert => hilbert(self.level),
            FractalKind::Arrowhead => sierpinski_arrowhead(self.level),
            FractalKind::HalfSierpinski => half_sierpinski(self.level),
            FractalKind::PositiveArea => {
                let eps = self.epsilons.clone().unwrap_or_else(|| vec![0.0; self.level as usize]);
                positive_area_curve(self.level, &eps).map(|p| p.curve)
            }
        }
    }
}

pub(crate) fn check_level(kind: FractalKind, level: u32) -> Result<()> {
    let cap = kind.max_level();
    if level > cap {
        return Err(Error::LevelCap { kind: kind.name(), level, cap });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_follow_vertex_budget() {
        assert_eq!(FractalKind::Koch.max_level(), 10);
        assert_eq!(FractalKind::Arrowhead.max_level(), 13);
        assert!(matches!(koch(11), Err(Error::LevelCap { .. })));
        assert!(matches!(sierpinski_arrowhead(40), Err(Error::LevelCap { .. })));
    }

    #[test]
    fn every_generator_is_simple_and_anchored() {
        for kind in [
            FractalKind::Koch,
            FractalKind::Hilbert,
            FractalKind::Arrowhead,
            FractalKind::HalfSierpinski,
            FractalKind::PositiveArea,
        ] {
            let low = if kind == FractalKind::Hilbert || kind == FractalKind::PositiveArea { 1 } else { 0 };
            for level in low..=5 {
                let c = FractalSpec::new(kind, level).generate().unwrap();
                assert_eq!(c.vertices[0].im, 0.0, "{kind:?} {level}");
                assert!(c.min_im() >= 0.0, "{kind:?} {level}");
                assert!(c.is_simple(), "{kind:?} level {level} self-intersects");
                assert_eq!(c.len() as u64, kind.vertex_count(level), "{kind:?} {level}");
            }
        }
    }

    #[test]
    fn kind_names_parse() {
        for kind in [FractalKind::Koch, FractalKind::HalfSierpinski, FractalKind::PositiveArea] {
            assert_eq!(kind.name().parse::<FractalKind>().unwrap(), kind);
        }
        assert!("dragon".parse::<FractalKind>().is_err());
    }
}
