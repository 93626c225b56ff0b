//! Path operators: Pitman reflections, Littelmann root operators and the `H` operators
//! used to rebuild a path from its string coordinates.

use std::f64::consts::PI;

use crate::coxeter::Realization;
use crate::error::{Error, Result};
use crate::plpath::{PlPath, ScalarPl};

/// Absolute tolerance (scaled by the size of the path) for range checks on root operators.
pub const GHOST_TOL: f64 = 1e-12;

fn scale_of(g: &ScalarPl) -> f64 {
    g.vals.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// `P_alpha eta = eta - inf_{s<=t} alpha^vee(eta(s)) alpha`.
pub fn pitman(r: &Realization, s: usize, eta: &PlPath) -> Result<PlPath> {
    r.check_generator(s)?;
    r.check_dim(eta.endpoint())?;
    let g = eta.pair(r.simple_coroot(s));
    Ok(eta.sub_scaled(&g.prefix_min(), r.simple_root(s)))
}

/// `P_w = P_{s_1} ... P_{s_q}` for a reduced word; the last letter acts first.
pub fn pitman_word(r: &Realization, w: &[usize], eta: &PlPath) -> Result<PlPath> {
    r.check_reduced(w)?;
    let mut p = eta.clone();
    for &s in w.iter().rev() {
        p = pitman(r, s, &p)?;
    }
    Ok(p)
}

/// `P_{w0}` using the default reduced word.
pub fn pitman_w0(r: &Realization, eta: &PlPath) -> Result<PlPath> {
    pitman_word(r, r.longest_word(), eta)
}

/// `(epsilon_alpha, phi_alpha)` of a path.
pub fn eps_phi(r: &Realization, s: usize, eta: &PlPath) -> (f64, f64) {
    let g = eta.pair(r.simple_coroot(s));
    let m = g.min();
    (-m, g.last() - m)
}

/// Littelmann operator `E_alpha^x`. Returns `None` (the ghost) when `x` lies outside
/// `[-phi_alpha, epsilon_alpha]`.
pub fn littelmann_e(r: &Realization, s: usize, x: f64, eta: &PlPath) -> Result<Option<PlPath>> {
    r.check_generator(s)?;
    r.check_dim(eta.endpoint())?;
    if !x.is_finite() {
        return Err(Error::OutOfRange(format!("non-finite parameter {x}")));
    }
    let g = eta.pair(r.simple_coroot(s));
    let m = g.min();
    let (eps, phi) = (-m, g.last() - m);
    let tol = GHOST_TOL * scale_of(&g).max(x.abs());
    if x > eps + tol || x < -phi - tol {
        return Ok(None);
    }
    let x = x.clamp(-phi, eps);
    let c = if x <= 0.0 {
        g.suffix_min().add_const(-m).min_const(-x)
    } else {
        g.prefix_min().add_const(-x - m).min_const(0.0)
    };
    Ok(Some(eta.sub_scaled(&c, r.simple_root(s))))
}

/// `H_alpha^x pi = pi - min(x, inf_{s>=t} alpha^vee(pi(s))) alpha` for an alpha-dominant `pi`
/// and `0 <= x <= alpha^vee(pi(T))`.
pub fn h_operator(r: &Realization, s: usize, x: f64, pi: &PlPath) -> Result<PlPath> {
    r.check_generator(s)?;
    r.check_dim(pi.endpoint())?;
    let g = pi.pair(r.simple_coroot(s));
    let tol = 1e-9 * scale_of(&g);
    let m = g.min();
    if m < -tol {
        return Err(Error::NotDominant(m));
    }
    if x < -tol || x > g.last() + tol {
        return Err(Error::OutOfRange(format!(
            "H parameter {x} outside [0, {}]",
            g.last()
        )));
    }
    let x = x.clamp(0.0, g.last().max(0.0));
    let c = g.suffix_min().min_const(x);
    Ok(pi.sub_scaled(&c, r.simple_root(s)))
}

/// Coefficient polynomials `T_k(rho)` of the dihedral product formula:
/// `T_0 = 1`, `T_1 = 2 rho`, `T_{k+1} = 2 rho T_k - T_{k-1}`.
pub fn chebyshev_weights(rho: f64, n: usize) -> Vec<f64> {
    let mut t = vec![1.0, 2.0 * rho];
    while t.len() < n {
        let k = t.len();
        t.push(2.0 * rho * t[k - 1] - t[k - 2]);
    }
    t.truncate(n);
    t
}

/// `t -> inf over t >= s_0 >= ... >= s_{k-1} >= 0 of sum_i w_i z_i(s_i)`, by dynamic programming.
fn chain_inf(weights: &[f64], z: &[&ScalarPl]) -> ScalarPl {
    let k = weights.len();
    let mut g = z[k - 1].scale(weights[k - 1]).prefix_min();
    for i in (0..k - 1).rev() {
        g = z[i].scale(weights[i]).add(&g).prefix_min();
    }
    g
}

/// Closed formula for the alternating product `P_a P_b P_a ...` with `n` factors
/// (the rightmost applied first), valid whenever `rho >= cos(pi/n)`.
///
/// `a`, `b` are generator indices; the roots are first rescaled so that
/// `a^vee(b) = b^vee(a)`.
pub fn dihedral_product_formula(
    r: &Realization,
    a: usize,
    b: usize,
    n: usize,
    pi: &PlPath,
) -> Result<PlPath> {
    r.check_generator(a)?;
    r.check_generator(b)?;
    r.check_dim(pi.endpoint())?;
    if n == 0 {
        return Ok(pi.clone());
    }
    let ab = r.pair(a, r.simple_root(b));
    let ba = r.pair(b, r.simple_root(a));
    // rescale alpha -> t alpha, beta -> beta / t so the pairings become symmetric
    let t = if ab == 0.0 || ba == 0.0 {
        1.0
    } else {
        (ab / ba).powf(0.25)
    };
    let rho = -0.5 * ab / (t * t);
    let bound = (PI / n as f64).cos();
    if rho < bound - 1e-12 {
        return Err(Error::BadCosineBound { rho, n, bound });
    }
    let root_a: Vec<f64> = r.simple_root(a).iter().map(|x| x * t).collect();
    let root_b: Vec<f64> = r.simple_root(b).iter().map(|x| x / t).collect();
    let co_a: Vec<f64> = r.simple_coroot(a).iter().map(|x| x / t).collect();
    let co_b: Vec<f64> = r.simple_coroot(b).iter().map(|x| x * t).collect();
    let z_even = pi.pair(&co_a);
    let z_odd = pi.pair(&co_b);
    let w = chebyshev_weights(rho, n);
    let z: Vec<&ScalarPl> = (0..n)
        .map(|i| if i % 2 == 0 { &z_even } else { &z_odd })
        .collect();
    let ca = chain_inf(&w, &z);
    let mut out = pi.sub_scaled(&ca, &root_a);
    if n >= 2 {
        let cb = chain_inf(&w[..n - 1], &z[1..]);
        out = out.sub_scaled(&cb, &root_b);
    }
    Ok(out)
}
