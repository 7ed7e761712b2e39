use std::fmt;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BoundsError;
use crate::quadric::{isotropic_subspace, SubspaceMode, SurfaceError, SEARCH_BUDGET};
use crate::spectral::{GridFunction, Side, SurfaceData};

/// Test functions for the averaging battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Point mass at the origin.
    Delta,
    /// Indicator of a d/2-dimensional subspace inside S.
    Subspace,
    /// Indicator of a uniformly random set of the given size.
    RandomSet { size: usize },
    /// `sum_k 2^{-k} 1_{E_k}` over disjoint random sets `E_0, ..., E_{levels-1}`.
    DyadicRandom { levels: u32 },
    /// Indicator of the zero level set of the form, i.e. of S itself.
    Sublevel,
}

impl Family {
    pub fn label(self) -> String {
        match self {
            Family::Delta => "delta".into(),
            Family::Subspace => "subspace".into(),
            Family::RandomSet { size } => format!("random-{size}"),
            Family::DyadicRandom { levels } => format!("dyadic-{levels}"),
            Family::Sublevel => "sublevel".into(),
        }
    }

    pub fn is_random(self) -> bool {
        matches!(self, Family::RandomSet { .. } | Family::DyadicRandom { .. })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn extremizer_family(
    family: Family,
    data: &SurfaceData,
    seed: u64,
) -> Result<GridFunction, BoundsError> {
    let field = Arc::clone(data.surface.field());
    let d = data.d();
    let len = data.indicator.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match family {
        Family::Delta => Ok(GridFunction::delta(field, d, Side::SpaceDx)),
        Family::Subspace => {
            if d % 2 == 1 || !data.surface.is_hyperbolic()? {
                return Err(BoundsError::NotHyperbolic);
            }
            let h = match isotropic_subspace(&data.surface, SubspaceMode::Construct) {
                Ok(h) => h,
                Err(SurfaceError::NoConstructivePattern) if (len as u64) <= SEARCH_BUDGET => {
                    isotropic_subspace(&data.surface, SubspaceMode::Search)?
                }
                Err(e) => return Err(e.into()),
            };
            let h = h.ok_or(BoundsError::NotHyperbolic)?;
            Ok(h.indicator(&field, d))
        }
        Family::RandomSet { size } => {
            if size == 0 {
                return Err(BoundsError::EmptySet);
            }
            if size > len {
                return Err(BoundsError::SetTooLarge { size, len });
            }
            Ok(GridFunction::indicator(field, d, Side::SpaceDx, sample(&mut rng, len, size)))
        }
        Family::DyadicRandom { levels } => {
            if levels == 0 {
                return Err(BoundsError::EmptySet);
            }
            let order = sample(&mut rng, len, len).into_vec();
            let mut values = vec![0.0; len];
            let mut start = 0;
            for k in 0..levels {
                let cap = (len >> (k + 1)).max(1);
                let size = rng.gen_range(1..=cap).min(len - start);
                let level = 0.5f64.powi(k as i32);
                for &i in &order[start..start + size] {
                    values[i] = level;
                }
                start += size;
                if start == len {
                    break;
                }
            }
            Ok(GridFunction::from_real(field, d, Side::SpaceDx, values)?)
        }
        Family::Sublevel => Ok(data.indicator.clone()),
    }
}
