//! Continuous crystals: paths, the elementary crystals `B_alpha`, and tensor products.
//!
//! `epsilon` and `phi` may be `-inf` (an element some root operator cannot move). Tensor
//! products follow the limits of the finite rule in that case, see [`CrystalElem::e`].

use crate::coxeter::Realization;
use crate::error::{Error, Result};
use crate::plpath::PlPath;
use crate::transforms::{eps_phi, littelmann_e};

#[derive(Clone, Debug, PartialEq)]
pub enum CrystalElem {
    Path(PlPath),
    /// The point `b_alpha(t)` of `B_alpha`, `t <= 0`.
    Elementary {
        root: usize,
        t: f64,
    },
    Tensor(Box<CrystalElem>, Box<CrystalElem>),
}

pub fn tensor(a: CrystalElem, b: CrystalElem) -> CrystalElem {
    CrystalElem::Tensor(Box::new(a), Box::new(b))
}

/// `phi(b1) - epsilon(b2)`, with `-inf - (-inf)` read as 0.
fn sigma(phi1: f64, eps2: f64) -> f64 {
    if phi1 == f64::NEG_INFINITY && eps2 == f64::NEG_INFINITY {
        0.0
    } else {
        phi1 - eps2
    }
}

impl CrystalElem {
    pub fn wt(&self, r: &Realization) -> Vec<f64> {
        match self {
            CrystalElem::Path(p) => p.endpoint().to_vec(),
            CrystalElem::Elementary { root, t } => {
                r.simple_root(*root).iter().map(|a| a * t).collect()
            }
            CrystalElem::Tensor(a, b) => a.wt(r).iter().zip(b.wt(r)).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn eps(&self, r: &Realization, s: usize) -> f64 {
        match self {
            CrystalElem::Path(p) => eps_phi(r, s, p).0,
            CrystalElem::Elementary { root, t } => {
                if *root == s {
                    -t
                } else {
                    f64::NEG_INFINITY
                }
            }
            CrystalElem::Tensor(a, b) => {
                let shifted = b.eps(r, s) - r.pair(s, &a.wt(r));
                a.eps(r, s).max(shifted)
            }
        }
    }

    pub fn phi(&self, r: &Realization, s: usize) -> f64 {
        match self {
            CrystalElem::Path(p) => eps_phi(r, s, p).1,
            CrystalElem::Elementary { root, t } => {
                if *root == s {
                    *t
                } else {
                    f64::NEG_INFINITY
                }
            }
            CrystalElem::Tensor(a, b) => {
                let shifted = a.phi(r, s) + r.pair(s, &b.wt(r));
                b.phi(r, s).max(shifted)
            }
        }
    }

    /// Root operator `e_alpha^x`; `None` is the ghost element.
    ///
    /// On `b1 (x) b2` the move splits as `x1 = max(x + sigma, 0) - max(sigma, 0)` on the left
    /// factor and `x2 = min(x + sigma, 0) - min(sigma, 0)` on the right, `sigma = phi1 - eps2`.
    /// When `sigma` is infinite the whole move goes to one factor.
    pub fn e(&self, r: &Realization, s: usize, x: f64) -> Result<Option<CrystalElem>> {
        r.check_generator(s)?;
        match self {
            CrystalElem::Path(p) => Ok(littelmann_e(r, s, x, p)?.map(CrystalElem::Path)),
            CrystalElem::Elementary { root, t } => {
                if x == 0.0 {
                    return Ok(Some(self.clone()));
                }
                if *root != s || t + x > 0.0 {
                    return Ok(None);
                }
                Ok(Some(CrystalElem::Elementary {
                    root: *root,
                    t: t + x,
                }))
            }
            CrystalElem::Tensor(a, b) => {
                let sg = sigma(a.phi(r, s), b.eps(r, s));
                let (x1, x2) = if sg == f64::INFINITY {
                    (x, 0.0)
                } else if sg == f64::NEG_INFINITY {
                    (0.0, x)
                } else {
                    (
                        (x + sg).max(0.0) - sg.max(0.0),
                        (x + sg).min(0.0) - sg.min(0.0),
                    )
                };
                let (Some(a2), Some(b2)) = (a.e(r, s, x1)?, b.e(r, s, x2)?) else {
                    return Ok(None);
                };
                Ok(Some(tensor(a2, b2)))
            }
        }
    }

    /// The embedding of a tensor product of paths into paths: `eta1 (x) eta2 -> eta1 * eta2`.
    pub fn theta(&self) -> Result<PlPath> {
        match self {
            CrystalElem::Path(p) => Ok(p.clone()),
            CrystalElem::Tensor(a, b) => a.theta()?.concat_star(&b.theta()?),
            CrystalElem::Elementary { .. } => Err(Error::Unsupported(
                "elementary crystals have no path model".into(),
            )),
        }
    }
}
