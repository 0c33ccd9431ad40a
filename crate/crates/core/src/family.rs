//! Parameterized function sequences (k -> u_k) with declared limits and
//! epi-convergence status, used by the convergence lab.
//!
//! The built-in registry is data-driven: families are described by the
//! same JSON that users can supply to extend it, so new families need no
//! recompilation.

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::func::ConvexFunction;
use crate::linalg::Matrix;
use serde::{Deserialize, Serialize};

/// Built-in family definitions shipped with the crate.
pub const BUILTIN_FAMILIES_JSON: &str = include_str!("builtin_families.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceFamily {
    pub name: String,
    #[serde(flatten)]
    pub kind: FamilyKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyKind {
    /// u_k = u for every k.
    Constant { function: ConvexFunction },
    /// u_k = I_{(1 - 1/k) B^n} + t, limit I_{B^n} + t.
    ShrinkingBallIndicator { dim: usize, offset: f64 },
    /// u_j = I_K + 1/j, limit I_K.
    VerticalShift { body: ConvexBody },
    /// u_k = n_{1 + 1/k} = |x| / (1 + 1/k), limit n_1 = |x|.
    Cone { dim: usize },
    /// u_k = |x|^2 + 1/k, limit |x|^2 (super-coercive members and limit).
    QuadraticShift { dim: usize },
    /// u_k = (x - k)^2: escapes to the horizon, no epi-limit in the class.
    TranslatingBump {},
}

impl SequenceFamily {
    /// The k-th member, k >= 1.
    pub fn member(&self, k: u64) -> Result<ConvexFunction> {
        if k == 0 {
            return Err(Error::InvalidConfig("family index starts at 1".into()));
        }
        let kf = k as f64;
        match &self.kind {
            FamilyKind::Constant { function } => Ok(function.clone()),
            FamilyKind::ShrinkingBallIndicator { dim, offset } => ConvexFunction::indicator(
                ConvexBody::ball(vec![0.0; *dim], (1.0 - 1.0 / kf).max(0.0))?,
                *offset,
            ),
            FamilyKind::VerticalShift { body } => ConvexFunction::indicator(body.clone(), 1.0 / kf),
            FamilyKind::Cone { dim } => ConvexFunction::norm_cone(*dim, 1.0 + 1.0 / kf),
            FamilyKind::QuadraticShift { dim } => {
                ConvexFunction::quadratic(Matrix::identity(*dim), vec![0.0; *dim], 1.0 / kf)
            }
            FamilyKind::TranslatingBump {} => {
                ConvexFunction::quadratic(Matrix::identity(1), vec![-2.0 * kf], kf * kf)
            }
        }
    }

    /// Declared epi-limit; `None` when the family has no limit in the class.
    pub fn limit(&self) -> Result<Option<ConvexFunction>> {
        let f = match &self.kind {
            FamilyKind::Constant { function } => Some(function.clone()),
            FamilyKind::ShrinkingBallIndicator { dim, offset } => Some(ConvexFunction::indicator(
                ConvexBody::ball(vec![0.0; *dim], 1.0)?,
                *offset,
            )?),
            FamilyKind::VerticalShift { body } => {
                Some(ConvexFunction::indicator(body.clone(), 0.0)?)
            }
            FamilyKind::Cone { dim } => Some(ConvexFunction::norm_cone(*dim, 1.0)?),
            FamilyKind::QuadraticShift { dim } => Some(ConvexFunction::quadratic(
                Matrix::identity(*dim),
                vec![0.0; *dim],
                0.0,
            )?),
            FamilyKind::TranslatingBump {} => None,
        };
        Ok(f)
    }

    /// Whether the family is declared epi-convergent to its limit.
    pub fn epi_convergent(&self) -> bool {
        !matches!(self.kind, FamilyKind::TranslatingBump {})
    }

    /// Whether members and limit are super-coercive (so the conjugate
    /// sup-norm metric must converge along the family as well).
    pub fn super_coercive(&self) -> bool {
        match &self.kind {
            FamilyKind::Constant { function } => {
                matches!(
                    crate::transform::classify_coercivity(function),
                    Ok(crate::transform::Coercivity::SuperCoercive)
                )
            }
            FamilyKind::ShrinkingBallIndicator { .. } | FamilyKind::VerticalShift { .. } => true,
            FamilyKind::Cone { .. } => false,
            FamilyKind::QuadraticShift { .. } => true,
            FamilyKind::TranslatingBump {} => true,
        }
    }

    /// Index ceiling large enough for every applicable metric to fall
    /// below 1e-3 along the family (analytic fast paths keep this cheap).
    pub fn default_k_max(&self) -> u64 {
        match &self.kind {
            FamilyKind::Constant { .. } => 64,
            FamilyKind::ShrinkingBallIndicator { .. } => 8_000_000,
            FamilyKind::VerticalShift { .. } => 40_000,
            FamilyKind::Cone { .. } => 4096,
            FamilyKind::QuadraticShift { .. } => 40_000,
            FamilyKind::TranslatingBump {} => 64,
        }
    }
}

/// Logarithmically spaced index schedule from 1 to `k_max`, deduplicated
/// and always containing the three final indices.
pub fn log_schedule(k_max: u64, points: usize) -> Vec<u64> {
    let mut ks: Vec<u64> = Vec::new();
    let p = points.max(4);
    for i in 0..p {
        let x = (k_max as f64).powf(i as f64 / (p - 1) as f64);
        ks.push(x.round().max(1.0) as u64);
    }
    if k_max >= 3 {
        ks.extend_from_slice(&[k_max - 2, k_max - 1, k_max]);
    }
    ks.sort_unstable();
    ks.dedup();
    ks
}

#[derive(Debug, Clone, Default)]
pub struct FamilyRegistry {
    families: Vec<SequenceFamily>,
}

impl FamilyRegistry {
    pub fn builtin() -> Self {
        let families: Vec<SequenceFamily> =
            serde_json::from_str(BUILTIN_FAMILIES_JSON).expect("builtin family JSON is valid");
        Self { families }
    }

    pub fn merge_json(&mut self, json: &str) -> Result<()> {
        let extra: Vec<SequenceFamily> = serde_json::from_str(json)?;
        for f in extra {
            self.families.retain(|g| g.name != f.name);
            self.families.push(f);
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&SequenceFamily> {
        self.families
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| Error::UnknownFamily(name.to_string()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.families.iter().map(|f| f.name.as_str()).collect()
    }
}

/// The k-th member of a named family from the registry.
pub fn make_sequence(registry: &FamilyRegistry, family: &str, k: u64) -> Result<ConvexFunction> {
    registry.get(family)?.member(k)
}
