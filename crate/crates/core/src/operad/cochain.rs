//! Cochains of the variational complex loaded from JSON.
//!
//! Only edgeless (`W*`) inputs are accepted: a class (degree −1), a
//! superderivation given on generators (degree 0), or an odd bracket-type
//! cochain `(−1)^{p(a)}[a∗b]` given by a table on generator pairs (degree 1).
//! All are extended to products by the Leibniz rule.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{star_master, OperadElement, StarElement};
use crate::error::{Error, Result};
use crate::hmodule::AlgebraElement;
use crate::parse::{parse_element, parse_pseudo};
use crate::pseudoalg::{BracketConfig, PseudoAlgebra};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CochainConfig {
    pub degree: i32,
    /// Degree −1: the representative vector.
    #[serde(default)]
    pub value: Option<String>,
    /// Degree 0: generator name ↦ image.
    #[serde(default)]
    pub images: BTreeMap<String, String>,
    /// Degree 1: bracket entries, completed by skewsymmetry.
    #[serde(default)]
    pub table: Vec<BracketConfig>,
}

impl CochainConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse { col: e.column(), msg: format!("line {}: {e}", e.line()) })
    }

    /// The cochain over the module of `pa`, using its central constants.
    pub fn build(&self, pa: &PseudoAlgebra) -> Result<StarElement> {
        let module = Arc::clone(pa.module());
        let central = pa.central();
        match self.degree {
            -1 => {
                let src = self.value.as_deref().ok_or_else(|| Error::Validation("degree −1 needs `value`".into()))?;
                let v = parse_element(&module, src, central)?;
                Ok(StarElement::from_operad(&OperadElement::class(module, &v)?))
            }
            0 => {
                let mut images = vec![AlgebraElement::zero(); module.generator_count()];
                let mut odd: Option<bool> = None;
                for (name, src) in &self.images {
                    let g = module.generator(name).ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
                    let v = parse_element(&module, src, central)?;
                    if !v.is_zero() {
                        let p = module
                            .parity(&v)
                            .ok_or_else(|| Error::Validation(format!("image of `{name}` is not homogeneous")))?;
                        let shift = p ^ module.gen_odd(g);
                        if odd.is_some_and(|o| o != shift) {
                            return Err(Error::Validation("images disagree on the parity of the derivation".into()));
                        }
                        odd = Some(shift);
                    }
                    images[g] = v;
                }
                let d = OperadElement::derivation(module, odd.unwrap_or(false), images)?;
                Ok(StarElement::from_operad(&d))
            }
            1 => {
                let mut table = BTreeMap::new();
                for br in &self.table {
                    let a = module.generator(&br.a).ok_or_else(|| Error::UnknownSymbol(br.a.clone()))?;
                    let b = module.generator(&br.b).ok_or_else(|| Error::UnknownSymbol(br.b.clone()))?;
                    table.insert((a, b), parse_pseudo(&module, &br.value, central, Some(2))?);
                }
                let br = Arc::new(PseudoAlgebra::new("cochain", Arc::clone(&module), table, central.clone())?);
                Ok(star_master(module, br.bracket_fn()))
            }
            d => Err(Error::Unsupported(format!("cochains of degree {d}"))),
        }
    }
}
