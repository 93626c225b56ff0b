//! The Weyl group action on paths, Schützenberger involutions, and the commutor of
//! tensor products built from them.

use crate::coxeter::Realization;
use crate::error::{Error, Result};
use crate::plpath::PlPath;
use crate::stringparam::string_data;
use crate::transforms::{eps_phi, littelmann_e};

fn no_ghost(p: Option<PlPath>, what: &str) -> Result<PlPath> {
    p.ok_or_else(|| Error::Numerical(format!("{what}: parameter left the admissible range")))
}

/// Simple reflection acting on a path: `S_alpha eta = E_alpha^{-alpha^vee(eta(T))} eta`.
pub fn w_action(r: &Realization, s: usize, eta: &PlPath) -> Result<PlPath> {
    r.check_generator(s)?;
    let x = -r.pair(s, eta.endpoint());
    no_ghost(littelmann_e(r, s, x, eta)?, "reflection")
}

/// `S_w = S_{s_1} ... S_{s_k}`, the last letter acting first. Any word is allowed.
pub fn w_action_word(r: &Realization, w: &[usize], eta: &PlPath) -> Result<PlPath> {
    let mut p = eta.clone();
    for &s in w.iter().rev() {
        p = w_action(r, s, &p)?;
    }
    Ok(p)
}

/// `-w0 kappa(eta)`: reverse the increments and apply `-w0` pointwise.
pub fn schutz_raw(r: &Realization, eta: &PlPath) -> Result<PlPath> {
    r.check_dim(eta.endpoint())?;
    let w0 = r.longest_word();
    Ok(eta
        .kappa()
        .map_linear(|p| r.act_word(w0, p).into_iter().map(|v| -v).collect()))
}

/// Involution of the highest paths: `pi -> P_{w0}(-w0 kappa(pi))`.
pub fn schutz_highest(r: &Realization, pi: &PlPath) -> Result<PlPath> {
    crate::transforms::pitman_w0(r, &schutz_raw(r, pi)?)
}

/// Schützenberger involution of `B(pi)`, defined through string coordinates:
/// starting from the lowest path `S_{w0} pi`, apply `E_{s'_1}^{x_1}` first, then
/// `E_{s'_2}^{x_2}`, and so on, where `s'` is the letter opposite to `s` under `-w0`.
pub fn schutz_tilde(r: &Realization, eta: &PlPath) -> Result<PlPath> {
    let w = r.longest_word().clone();
    let (x, pi) = string_data(r, &w, eta)?;
    let mut cur = w_action_word(r, &w, &pi)?;
    for (&s, &xk) in w.iter().zip(&x) {
        let s = r.opposite(s);
        cur = no_ghost(
            littelmann_e(r, s, snap_to_range(r, s, xk, &cur), &cur)?,
            "Schützenberger involution",
        )?;
    }
    Ok(cur)
}

/// String coordinates are admissible parameters by construction; after a long chain of
/// operators they can land a few ulps outside the range. Pull such values back in.
fn snap_to_range(r: &Realization, s: usize, x: f64, eta: &PlPath) -> f64 {
    let (eps, phi) = eps_phi(r, s, eta);
    let slack = SNAP_TOL * (1.0 + eps.abs().max(phi.abs()));
    if x > eps && x <= eps + slack {
        eps
    } else if x < -phi && x >= -phi - slack {
        -phi
    } else {
        x
    }
}

const SNAP_TOL: f64 = 1e-9;

/// Commutor on pairs of paths: `(eta1, eta2) -> S~(S~eta2 * S~eta1)`.
pub fn commutor(r: &Realization, eta1: &PlPath, eta2: &PlPath) -> Result<PlPath> {
    let a = schutz_tilde(r, eta2)?;
    let b = schutz_tilde(r, eta1)?;
    schutz_tilde(r, &a.concat_star(&b)?)
}

/// The commutor read on a concatenated path `eta1 * eta2`.
pub fn tau(r: &Realization, zeta: &PlPath) -> Result<PlPath> {
    let (a, b) = zeta.split_star();
    commutor(r, &a, &b)
}

/// Both sides of the hexagon relation for three paths of equal duration `T`:
/// `tau(tau(a*b) * c)` and `S~(S~(tau(b*c)) * S~a)`, the latter reparametrized by the PL
/// time change with knots `0, T/2, 3T/4, T -> 0, T/4, T/2, T`. Returns their sup distance.
pub fn hexagon_defect(r: &Realization, a: &PlPath, b: &PlPath, c: &PlPath) -> Result<f64> {
    let t = a.duration();
    let bc = tau(r, &b.concat_star(c)?)?;
    let lhs = schutz_tilde(r, &schutz_tilde(r, &bc)?.concat_star(&schutz_tilde(r, a)?)?)?;
    let ab = tau(r, &a.concat_star(b)?)?;
    let rhs = tau(r, &ab.concat_star(c)?)?;
    let lhs = lhs.compose_time(&[0.0, t / 2.0, 0.75 * t, t], &[0.0, t / 4.0, t / 2.0, t])?;
    Ok(lhs.sup_distance(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_moves_endpoint() {
        let r = Realization::from_label("A2").unwrap();
        let eta = PlPath::straight(&r.from_pairings(&[1.0, 0.5]).unwrap(), 1.0);
        let s = w_action(&r, 0, &eta).unwrap();
        let want = r.reflect(0, eta.endpoint());
        for (a, b) in s.endpoint().iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
