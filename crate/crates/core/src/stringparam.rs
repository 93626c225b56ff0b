//! String coordinates of paths relative to a reduced word of the longest element,
//! string polytopes and cones, and transition maps between words.

use std::f64::consts::PI;

use crate::coxeter::{GroupSpec, Realization};
use crate::error::{Error, Result};
use crate::plpath::PlPath;
use crate::transforms::{h_operator, pitman};

/// Boundary tolerance for polytope membership, relative to the size of the data.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// String coordinates `x_1..x_q` of `eta` together with its highest path `P_{w0} eta`.
pub fn string_data(r: &Realization, word: &[usize], eta: &PlPath) -> Result<(Vec<f64>, PlPath)> {
    r.check_longest(word)?;
    r.check_dim(eta.endpoint())?;
    let q = word.len();
    let mut x = vec![0.0; q];
    let mut cur = eta.clone();
    for k in (0..q).rev() {
        let s = word[k];
        let g = cur.pair(r.simple_coroot(s));
        x[k] = (-g.min()).max(0.0);
        cur = pitman(r, s, &cur)?;
    }
    Ok((x, cur))
}

pub fn string_coords(r: &Realization, word: &[usize], eta: &PlPath) -> Result<Vec<f64>> {
    Ok(string_data(r, word, eta)?.0)
}

fn scale_of(lambda: &[f64], x: &[f64]) -> f64 {
    lambda.iter().chain(x).fold(1.0f64, |m, v| m.max(v.abs()))
}

/// Rebuild the path with highest path `pi` and string coordinates `x`:
/// `H_{s_q}^{x_q} ... H_{s_1}^{x_1} pi`.
pub fn inverse_string(r: &Realization, word: &[usize], pi: &PlPath, x: &[f64]) -> Result<PlPath> {
    r.check_longest(word)?;
    r.check_dim(pi.endpoint())?;
    if x.len() != word.len() {
        return Err(Error::DimMismatch {
            expected: word.len(),
            got: x.len(),
        });
    }
    let tol = MEMBERSHIP_TOL * scale_of(pi.endpoint(), x).max(pi.sup_norm());
    let margin = (0..pi.num_breakpoints())
        .map(|k| r.chamber_margin(pi.point(k)))
        .fold(f64::INFINITY, f64::min);
    if margin < -tol {
        return Err(Error::NotDominant(margin));
    }
    let mut cur = pi.clone();
    for (k, (&s, &xk)) in word.iter().zip(x).enumerate() {
        cur = h_operator(r, s, xk, &cur).map_err(|e| match e {
            Error::NotDominant(m) => Error::NotInPolytope(format!(
                "cone condition fails at step {} (margin {m:.3e})",
                k + 1
            )),
            Error::OutOfRange(msg) => Error::NotInPolytope(format!("step {}: {msg}", k + 1)),
            other => other,
        })?;
    }
    Ok(cur)
}

/// Upper bound on `x_k` given `x_1..x_{k-1}`: `alpha_{s_k}^vee(lambda - sum_{j<k} x_j alpha_{s_j})`.
pub fn ladder_bound(r: &Realization, word: &[usize], lambda: &[f64], x: &[f64], k: usize) -> f64 {
    let s = word[k];
    let mut b = r.pair(s, lambda);
    for j in 0..k {
        b -= x[j] * r.gram(s, word[j]);
    }
    b
}

/// Smallest slack of the ladder inequalities `0 <= x_k <= ladder_bound(k)`.
pub fn ladder_margin(r: &Realization, word: &[usize], lambda: &[f64], x: &[f64]) -> f64 {
    (0..word.len())
        .map(|k| x[k].min(ladder_bound(r, word, lambda, x, k) - x[k]))
        .fold(f64::INFINITY, f64::min)
}

/// `pi - min(x, suffix inf) alpha` without validity checks; used to probe the cone.
fn h_unchecked(r: &Realization, s: usize, x: f64, pi: &PlPath) -> PlPath {
    let g = pi.pair(r.simple_coroot(s));
    pi.sub_scaled(&g.suffix_min().min_const(x), r.simple_root(s))
}

/// Signed distance-like margin for membership in the string cone: non-negative iff
/// `x` belongs to the cone (up to rounding).
///
/// The H-chain is run on a straight path to a weight deep inside the chamber, so only the
/// cone inequalities can fail; the margin is the smallest dominance defect met along the way.
pub fn cone_margin(r: &Realization, word: &[usize], x: &[f64]) -> Result<f64> {
    r.check_longest(word)?;
    if x.len() != word.len() {
        return Err(Error::DimMismatch {
            expected: word.len(),
            got: x.len(),
        });
    }
    let big = 10.0 * (1.0 + 2.0 * x.iter().map(|v| v.abs()).sum::<f64>());
    let lambda = r.from_pairings(&vec![big; r.rank()])?;
    let mut cur = PlPath::straight(&lambda, 1.0);
    let mut margin = x.iter().copied().fold(f64::INFINITY, f64::min);
    for (&s, &xk) in word.iter().zip(x) {
        margin = margin.min(cur.pair(r.simple_coroot(s)).min());
        cur = h_unchecked(r, s, xk, &cur);
    }
    Ok(margin)
}

pub fn in_cone(r: &Realization, word: &[usize], x: &[f64]) -> Result<bool> {
    let tol = MEMBERSHIP_TOL * scale_of(&[], x);
    Ok(cone_margin(r, word, x)? >= -tol)
}

/// Membership in the string polytope `M^lambda`: the H-chain on the straight path to
/// `lambda` must be valid.
pub fn in_polytope(r: &Realization, word: &[usize], lambda: &[f64], x: &[f64]) -> Result<bool> {
    let tol = MEMBERSHIP_TOL * scale_of(lambda, x);
    if ladder_margin(r, word, lambda, x) < -tol {
        return Ok(false);
    }
    match inverse_string(r, word, &PlPath::straight(lambda, 1.0), x) {
        Ok(_) => Ok(true),
        Err(Error::NotInPolytope(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Transition map between the string coordinates for two reduced words, at highest weight `lambda`.
pub fn transition(
    r: &Realization,
    from: &[usize],
    to: &[usize],
    lambda: &[f64],
    x: &[f64],
) -> Result<Vec<f64>> {
    r.check_longest(to)?;
    let eta = inverse_string(r, from, &PlPath::straight(lambda, 1.0), x)?;
    string_coords(r, to, &eta)
}

/// `a_n = sin(n pi/m) / sin(pi/m)`.
pub fn dihedral_a(m: u32, n: i64) -> f64 {
    let th = PI / m as f64;
    (n as f64 * th).sin() / th.sin()
}

/// `c_n` with `c_{-1} = 0`, `c_0 = 1`, `c_{n+1} = c_1 c_n - c_{n-1}`, `c_1 = 2 cos(pi/m)`.
fn dihedral_c(m: u32, upto: usize) -> Vec<f64> {
    // index shifted by one: v[k + 1] = c_k
    let c1 = 2.0 * (PI / m as f64).cos();
    let mut v = vec![0.0, 1.0];
    while v.len() < upto + 2 {
        let k = v.len();
        v.push(c1 * v[k - 1] - v[k - 2]);
    }
    v
}

/// Closed-form transition in `I(m)`, `2 <= m <= 6`, from the word starting with the first
/// generator to the word starting with the second. `x` is 1-based in the formulas below.
pub fn transition_closed_dihedral(m: u32, x: &[f64]) -> Result<Vec<f64>> {
    if !(2..=6).contains(&m) {
        return Err(Error::Unsupported(format!(
            "closed-form transition for I({m}); use the path oracle"
        )));
    }
    closed_dihedral(m, x, false)
}

/// Conjectured closed-form transition for `I(7)`.
pub fn transition_conjecture_m7(x: &[f64]) -> Result<Vec<f64>> {
    closed_dihedral(7, x, true)
}

fn closed_dihedral(m: u32, x: &[f64], allow7: bool) -> Result<Vec<f64>> {
    let mm = m as usize;
    if x.len() != mm {
        return Err(Error::DimMismatch {
            expected: mm,
            got: x.len(),
        });
    }
    if m == 2 {
        return Ok(vec![x[1], x[0]]);
    }
    if m == 7 && !allow7 {
        return Err(Error::Unsupported("I(7)".into()));
    }
    let cv = dihedral_c(m, mm + 1);
    let c = |k: i64| cv[(k + 1) as usize];
    let xs = |k: usize| x[k - 1];
    let u = (0..=(mm as i64 - 3))
        .map(|k| c(k) * xs(k as usize + 1) - c(k - 1) * xs(k as usize + 2))
        .fold(f64::NEG_INFINITY, f64::max);
    let v = (1..=(mm as i64 - 2))
        .map(|k| c(k) * xs(k as usize + 2) - c(k + 1) * xs(k as usize + 1))
        .fold(f64::INFINITY, f64::min);
    let mut y = vec![f64::NAN; mm];
    y[mm - 1] = (xs(mm - 1) - c(1) * xs(mm)).max(u);
    y[mm - 2] = xs(mm) + (xs(mm - 2) - c(2) * xs(mm)).max(c(1) * u);
    y[1] = xs(1) + (xs(3) - c(2) * xs(1)).min(c(1) * v);
    y[0] = (xs(2) - c(1) * xs(1)).min(v);
    let odd_x: f64 = (1..=mm).step_by(2).map(xs).sum();
    let even_x: f64 = (2..=mm).step_by(2).map(xs).sum();
    match m {
        3 | 4 => {}
        5 => y[2] = even_x - y[0] - y[4],
        6 => {
            y[2] = even_x - y[0] - y[4];
            y[3] = odd_x - y[1] - y[5];
        }
        7 => {
            let w = (c(2) * u).min(xs(4) - c(2) * v).min(
                (xs(6) - c(1) * xs(5) + xs(4) + c(2) * u).max(c(1) * xs(3) - xs(2) - c(2) * v),
            );
            let y57 = xs(6) + (c(2) * xs(1)).max(xs(4) - c(3) * xs(7)).max(w);
            y[4] = y57 - y[6];
            y[2] = even_x - y[0] - y[4] - y[6];
            y[3] = odd_x - y[1] - y[5];
        }
        _ => unreachable!(),
    }
    Ok(y)
}

/// The cone of `I(m)` for the alternating word: `x >= 0` and `x_{k+1}/a_{k+1} >= x_k/a_k`.
pub fn dihedral_cone_margin(m: u32, x: &[f64]) -> f64 {
    let mut margin = x.iter().copied().fold(f64::INFINITY, f64::min);
    for k in 1..x.len().saturating_sub(1) {
        let (ak, ak1) = (dihedral_a(m, k as i64), dihedral_a(m, k as i64 + 1));
        margin = margin.min(x[k] / ak1 - x[k - 1] / ak);
    }
    margin
}

/// Both sides of the dihedral min identity at step `p` (1-based): the minimum of
/// `alpha_{p+1}^vee` along `H_{s_p}^{x_p} ... H_{s_1}^{x_1} pi`, and
/// `min(a_2 x_p - a_1 x_{p-1}, ..., a_p x_2 - a_{p-1} x_1, a_{p+1} x_1, 0)`.
pub fn dihedral_min_identity(
    r: &Realization,
    pi: &PlPath,
    x: &[f64],
    p: usize,
) -> Result<(f64, f64)> {
    let m = match r.spec() {
        GroupSpec::I { m } => *m,
        _ if r.rank() == 2 => r.coxeter_entry(0, 1),
        _ => {
            return Err(Error::Unsupported(
                "min identity needs a rank-2 group".into(),
            ))
        }
    };
    if p == 0 || p >= m as usize || x.len() < p {
        return Err(Error::OutOfRange(format!("step {p} for I({m})")));
    }
    let letter = |k: usize| (k - 1) % 2;
    let mut cur = pi.clone();
    for k in 1..=p {
        cur = h_operator(r, letter(k), x[k - 1], &cur)?;
    }
    let lhs = cur.pair(r.simple_coroot(letter(p + 1))).min();
    let a = |n: usize| dihedral_a(m, n as i64);
    let mut rhs = (a(p + 1) * x[0]).min(0.0);
    for j in 1..p {
        // a_{j+1} x_{p-j+1} - a_j x_{p-j}
        rhs = rhs.min(a(j + 1) * x[p - j] - a(j) * x[p - j - 1]);
    }
    Ok((lhs, rhs))
}

/// Position of each letter of the standard `A_n` word in the Gelfand-Tsetlin array:
/// letter `s_j` in block `k` becomes entry `(i, j)` with `i = k + 1 - j` (1-based).
pub fn gt_positions(n: usize) -> Vec<(usize, usize)> {
    let mut out = vec![];
    for k in 1..=n {
        for j in (1..=k).rev() {
            out.push((k + 1 - j, j));
        }
    }
    out
}

/// Cone of the standard `A_n` word in Gelfand-Tsetlin form: each row increases,
/// starting from a non-negative entry.
pub fn gt_cone_margin(n: usize, x: &[f64]) -> f64 {
    let pos = gt_positions(n);
    let mut margin = f64::INFINITY;
    for (p, &(i, j)) in pos.iter().enumerate() {
        if j == 1 {
            margin = margin.min(x[p]);
        }
        if let Some(p2) = pos.iter().position(|&(i2, j2)| i2 == i && j2 == j + 1) {
            margin = margin.min(x[p2] - x[p]);
        }
    }
    margin
}

/// Lusztig-type coordinates: `y_i = alpha_{s_i}^vee(lambda - sum_{j<i} x_j alpha_{s_j}) - x_i`.
pub fn lusztig_coords(r: &Realization, word: &[usize], lambda: &[f64], x: &[f64]) -> Vec<f64> {
    (0..word.len())
        .map(|k| ladder_bound(r, word, lambda, x, k) - x[k])
        .collect()
}

/// Inverse of [`lusztig_coords`]: `x_i = beta_i^vee(lambda - sum_{j<i} y_j beta_j) - y_i` with
/// `beta_i = s_1 ... s_{i-1} alpha_{s_i}`.
pub fn from_lusztig_coords(r: &Realization, word: &[usize], lambda: &[f64], y: &[f64]) -> Vec<f64> {
    let betas: Vec<Vec<f64>> = (0..word.len())
        .map(|k| r.act_word(&word[..k], r.simple_root(word[k])))
        .collect();
    let mut acc = lambda.to_vec();
    let mut x = vec![0.0; word.len()];
    for k in 0..word.len() {
        let b = &betas[k];
        x[k] = crate::coxeter::dot(b, &acc) - y[k];
        for (a, bi) in acc.iter_mut().zip(b) {
            *a -= y[k] * bi;
        }
    }
    x
}

/// Crystal operator `e_alpha^t` on string coordinates at highest weight `lambda`.
///
/// When the word ends with `s`, the move only changes the last coordinate: `x_q -> x_q - t`.
/// Otherwise coordinates are moved to a word ending with `s` and back. `None` is the ghost.
pub fn crystal_on_coords(
    r: &Realization,
    word: &[usize],
    lambda: &[f64],
    x: &[f64],
    s: usize,
    t: f64,
) -> Result<Option<Vec<f64>>> {
    r.check_generator(s)?;
    if !in_polytope(r, word, lambda, x)? {
        return Err(Error::NotInPolytope("input coordinates".into()));
    }
    let end = r.word_ending_with(s);
    let direct = word.last() == Some(&s);
    let mut y = if direct {
        x.to_vec()
    } else {
        transition(r, word, &end, lambda, x)?
    };
    let w = if direct { word.to_vec() } else { end };
    let q = y.len();
    y[q - 1] -= t;
    if !in_polytope(r, &w, lambda, &y)? {
        return Ok(None);
    }
    y[q - 1] = y[q - 1].clamp(0.0, ladder_bound(r, &w, lambda, &y, q - 1).max(0.0));
    if direct {
        Ok(Some(y))
    } else {
        Ok(Some(transition(r, &w, word, lambda, &y)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_formulas_from_dihedral_family() {
        let x = [0.3, 1.1, 0.5];
        let y = transition_closed_dihedral(3, &x).unwrap();
        let y1 = (x[1] - x[0]).min(x[2]);
        let y2 = x[0] + x[2];
        let y3 = x[0].max(x[1] - x[2]);
        assert!((y[0] - y1).abs() < 1e-12, "{y:?}");
        assert!((y[1] - y2).abs() < 1e-12, "{y:?}");
        assert!((y[2] - y3).abs() < 1e-12, "{y:?}");
    }

    #[test]
    fn gt_positions_a2() {
        assert_eq!(gt_positions(2), vec![(1, 1), (1, 2), (2, 1)]);
    }

    #[test]
    fn a2_cone_point_outside() {
        let r = Realization::from_label("A2").unwrap();
        let w = r.longest_word().clone();
        let m = cone_margin(&r, &w, &[2.0, 1.0, 0.0]).unwrap();
        assert!((m + 1.0).abs() < 1e-9, "{m}");
        assert!(in_cone(&r, &w, &[1.0, 2.0, 0.5]).unwrap());
    }
}
