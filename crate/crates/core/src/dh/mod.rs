//! Duistermaat-Heckman measures: the normalizing constant `k`, polytope volumes,
//! Laplace transforms, generalized Bessel functions and the product formula, plus
//! Monte Carlo checks of all of these.

pub mod brownian;
pub mod polytope;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::coxeter::{dot, Realization};
use crate::error::{Error, Result};
use crate::plpath::PlPath;
use crate::stringparam::inverse_string;
use crate::transforms::eps_phi;

pub use polytope::{
    batch_mean_se, rejection_sample, rejection_volume, sample_polytope, stream_rng, HitAndRun,
    StringPolytope,
};

/// `h(x) = prod over positive roots of beta^vee(x)`.
pub fn h_poly(r: &Realization, x: &[f64]) -> f64 {
    r.root_product(x)
}

/// Gauss-Hermite rule for the standard normal weight, by Golub-Welsch.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        j[(k - 1, k)] = b;
        j[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Gauss-Legendre rule on `[-1, 1]`, by Golub-Welsch.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let b = kf / (4.0 * kf * kf - 1.0).sqrt();
        j[(k - 1, k)] = b;
        j[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// `k = E[h(X)^2] / |W|` for a standard Gaussian `X` on `V`, so that the chamber integral
/// `int_C h^2 e^{-|x|^2/2} dx / (2 pi)^{n/2}` equals `k`.
///
/// Computed exactly (up to rounding) with a tensor Gauss-Hermite rule: `h^2` has degree
/// `2q`, so `q + 1` nodes per axis suffice.
pub fn compute_k(r: &Realization) -> f64 {
    let n = r.rank();
    let q = r.num_positive_roots();
    let (nodes, weights) = gauss_hermite(q + 1);
    let m = nodes.len();
    let total: usize = m.pow(n as u32);
    let sum: f64 = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut acc = 0.0;
            let inner = total / m;
            let mut x = vec![0.0; n];
            for idx in 0..inner {
                let mut rem = idx;
                let mut w = weights[first];
                x[0] = nodes[first];
                for c in 1..n {
                    let k = rem % m;
                    rem /= m;
                    x[c] = nodes[k];
                    w *= weights[k];
                }
                let h = r.root_product(&x);
                acc += w * h * h;
            }
            acc
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    sum / r.order() as f64
}

/// Volume of the string polytope `M^lambda`: `h(lambda) / k`.
pub fn polytope_volume(r: &Realization, lambda: &[f64], k: f64) -> f64 {
    h_poly(r, lambda) / k
}

/// `sum over W of det(w) e^{<z, w lambda>}`.
pub fn alternating_sum(r: &Realization, lambda: &[f64], z: &[f64]) -> f64 {
    r.elements()
        .iter()
        .map(|g| g.sign * dot(z, &g.apply(lambda)).exp())
        .sum()
}

/// Laplace transform of the DH measure: `sum_W det(w) e^{<z, w lambda>} / h(z)`.
pub fn laplace_closed_form(r: &Realization, lambda: &[f64], z: &[f64]) -> Result<f64> {
    let hz = h_poly(r, z);
    if hz.abs() <= 1e-8 {
        return Err(Error::OutOfRange(format!("h(z) = {hz:.3e} is singular")));
    }
    Ok(alternating_sum(r, lambda, z) / hz)
}

/// `J_lambda(z) = k sum_W det(w) e^{<z, w lambda>} / (h(z) h(lambda))`.
pub fn bessel_j(r: &Realization, lambda: &[f64], z: &[f64], k: f64) -> Result<f64> {
    let d = h_poly(r, z) * h_poly(r, lambda);
    if d.abs() <= 1e-10 {
        return Err(Error::OutOfRange(format!(
            "h(z) h(lambda) = {d:.3e} is singular"
        )));
    }
    Ok(k * alternating_sum(r, lambda, z) / d)
}

/// `h(v) J_v(z)`, regular in `v`.
pub fn h_times_bessel(r: &Realization, v: &[f64], z: &[f64], k: f64) -> Result<f64> {
    let hz = h_poly(r, z);
    if hz.abs() <= 1e-10 {
        return Err(Error::OutOfRange(format!("h(z) = {hz:.3e} is singular")));
    }
    Ok(k * alternating_sum(r, v, z) / hz)
}

/// Samples of the DH measure (normalized): string polytope points pushed to weights.
pub fn dh_sample(poly: &StringPolytope<'_>, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let cfg = HitAndRun::for_dim(poly.dim());
    Ok(sample_polytope(poly, n, seed, cfg)?
        .iter()
        .map(|x| poly.weight(x))
        .collect())
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct LaplaceReport {
    pub mc: f64,
    pub se: f64,
    pub closed_form: f64,
    pub z_score: f64,
}

/// Monte Carlo Laplace transform `vol * mean(e^{<z, v>})` against the closed form.
pub fn laplace_check(
    poly: &StringPolytope<'_>,
    z: &[f64],
    n: usize,
    seed: u64,
    k: f64,
) -> Result<LaplaceReport> {
    let r = poly.realization();
    let closed_form = laplace_closed_form(r, poly.lambda(), z)?;
    let vol = polytope_volume(r, poly.lambda(), k);
    let weights = dh_sample(poly, n, seed)?;
    let vals: Vec<f64> = weights.iter().map(|v| dot(z, v).exp()).collect();
    let (mean, se) = batch_mean_se(&vals, 64);
    let (mc, se) = (vol * mean, vol * se);
    Ok(LaplaceReport {
        mc,
        se,
        closed_form,
        z_score: (mc - closed_form) / se,
    })
}

/// The DH density of `A_1` at weight `u` (Lebesgue on the line `V`): uniform on `[-|l|, |l|]`.
fn a1_density(lambda: f64, u: f64) -> f64 {
    if u.abs() <= lambda.abs() {
        1.0 / (2.0 * lambda.abs())
    } else {
        0.0
    }
}

/// `A_1` density of `f_{lambda,mu}` at `v > 0`: `h(mu)^{-1} sum_w h(w v) f_lambda(w v - mu)`.
pub fn a1_product_density(r: &Realization, lambda: f64, mu: f64, v: f64) -> f64 {
    let hm = h_poly(r, &[mu]);
    let mut s = 0.0;
    for wv in [v, -v] {
        s += h_poly(r, &[wv]) * a1_density(lambda, wv - mu);
    }
    s / hm
}

/// `A_1` product formula, both sides: `J_lambda(z) J_mu(z)` and
/// `int_C J_v(z) f_{lambda,mu}(v) dv` by Gauss-Legendre on the support.
pub fn product_formula_a1(
    r: &Realization,
    lambda: f64,
    mu: f64,
    z: f64,
    k: f64,
) -> Result<(f64, f64)> {
    if r.rank() != 1 {
        return Err(Error::Unsupported(
            "exact product formula only for rank one".into(),
        ));
    }
    let lhs = bessel_j(r, &[lambda], &[z], k)? * bessel_j(r, &[mu], &[z], k)?;
    let (lo, hi) = ((lambda - mu).abs(), lambda + mu);
    let (nodes, weights) = gauss_legendre(64);
    let pieces = 16;
    let mut rhs = 0.0;
    for p in 0..pieces {
        let a = lo + (hi - lo) * p as f64 / pieces as f64;
        let b = lo + (hi - lo) * (p + 1) as f64 / pieces as f64;
        for (t, w) in nodes.iter().zip(&weights) {
            let v = 0.5 * (a + b) + 0.5 * (b - a) * t;
            rhs += 0.5
                * (b - a)
                * w
                * bessel_j(r, &[v], &[z], k)?
                * a1_product_density(r, lambda, mu, v);
        }
    }
    Ok((lhs, rhs))
}

/// For a string point `x` of `M^mu`: the path `eta` it parametrizes and whether
/// `lambda + eta` stays in the chamber (the Littlewood-Richardson condition
/// `epsilon_alpha(eta) <= alpha^vee(lambda)` for every simple root).
pub fn lr_condition(
    r: &Realization,
    word: &[usize],
    lambda: &[f64],
    mu: &[f64],
    x: &[f64],
) -> Result<(PlPath, bool)> {
    let eta = inverse_string(r, word, &PlPath::straight(mu, 1.0), x)?;
    let ok = (0..r.rank()).all(|s| eps_phi(r, s, &eta).0 <= r.pair(s, lambda) + 1e-12);
    Ok((eta, ok))
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ProductFormulaReport {
    /// `J_lambda(z) J_mu(z)`.
    pub product: f64,
    /// Monte Carlo estimate of `int J_v(z) gamma(dv)` with `gamma` normalized by `vol(M^mu)`.
    pub integral: f64,
    pub se: f64,
    pub z_score: f64,
    /// Total mass of `gamma` with that normalization (should be 1).
    pub gamma_mass: f64,
    pub gamma_mass_se: f64,
    /// Total mass of `(h / h(lambda))` times the uniform probability on `M^{lambda,mu}`.
    pub gamma_mass_conditional: f64,
    pub gamma_mass_conditional_se: f64,
    /// Fraction of `M^mu` satisfying the Littlewood-Richardson condition.
    pub acceptance: f64,
}

/// Monte Carlo product formula. Points are uniform on `M^mu`; the indicator of the
/// Littlewood-Richardson condition selects `M^{lambda,mu}`, and `v = lambda + eta(T)`.
pub fn product_formula_mc(
    r: &Realization,
    word: &[usize],
    lambda: &[f64],
    mu: &[f64],
    z: &[f64],
    n: usize,
    seed: u64,
    k: f64,
) -> Result<ProductFormulaReport> {
    let poly = StringPolytope::new(r, word, mu)?;
    let pts = sample_polytope(&poly, n, seed, HitAndRun::for_dim(poly.dim()))?;
    let hl = h_poly(r, lambda);
    let rows: Vec<Result<(f64, f64, f64)>> = pts
        .par_iter()
        .map(|x| {
            let (eta, ok) = lr_condition(r, word, lambda, mu, x)?;
            if !ok {
                return Ok((0.0, 0.0, 0.0));
            }
            let v: Vec<f64> = lambda
                .iter()
                .zip(eta.endpoint())
                .map(|(a, b)| a + b)
                .collect();
            Ok((1.0, h_poly(r, &v) / hl, h_times_bessel(r, &v, z, k)? / hl))
        })
        .collect();
    let rows: Vec<(f64, f64, f64)> = rows.into_iter().collect::<Result<_>>()?;
    let ind: Vec<f64> = rows.iter().map(|t| t.0).collect();
    let mass: Vec<f64> = rows.iter().map(|t| t.1).collect();
    let integ: Vec<f64> = rows.iter().map(|t| t.2).collect();
    let (acc, acc_se) = batch_mean_se(&ind, 64);
    let (m, m_se) = batch_mean_se(&mass, 64);
    let (i, i_se) = batch_mean_se(&integ, 64);
    let product = bessel_j(r, lambda, z, k)? * bessel_j(r, mu, z, k)?;
    let cond = m / acc;
    let cond_se = cond * ((m_se / m).powi(2) + (acc_se / acc).powi(2)).sqrt();
    Ok(ProductFormulaReport {
        product,
        integral: i,
        se: i_se,
        z_score: (i - product) / i_se,
        gamma_mass: m,
        gamma_mass_se: m_se,
        gamma_mass_conditional: cond,
        gamma_mass_conditional_se: cond_se,
        acceptance: acc,
    })
}

/// Uniform points of `M^{lambda,mu}` (rejection from hit-and-run samples of `M^mu`),
/// returned with their weights `v = lambda + mu - sum x_j alpha_j`.
pub fn lr_sample(
    r: &Realization,
    word: &[usize],
    lambda: &[f64],
    mu: &[f64],
    n: usize,
    seed: u64,
) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let poly = StringPolytope::new(r, word, mu)?;
    let cfg = HitAndRun::for_dim(poly.dim());
    let mut out = vec![];
    let mut round = 0u64;
    while out.len() < n {
        let pts = sample_polytope(
            &poly,
            n.max(256),
            seed.wrapping_add(round.wrapping_mul(0x9E37_79B9)),
            cfg,
        )?;
        for x in pts {
            let (eta, ok) = lr_condition(r, word, lambda, mu, &x)?;
            if ok && out.len() < n {
                let v: Vec<f64> = lambda
                    .iter()
                    .zip(eta.endpoint())
                    .map(|(a, b)| a + b)
                    .collect();
                out.push((x, v));
            }
        }
        round += 1;
        if round > 64 && out.is_empty() {
            return Err(Error::NotInPolytope(
                "Littlewood-Richardson polytope looks empty".into(),
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u64) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn k_matches_degree_product() {
        // k = prod (d_j - 1)! over the degrees of the basic invariants
        for (label, degrees) in [
            ("A1", vec![2u64]),
            ("A2", vec![2, 3]),
            ("A3", vec![2, 3, 4]),
            ("B2", vec![2, 4]),
            ("B3", vec![2, 4, 6]),
            ("I5", vec![2, 5]),
            ("H3", vec![2, 6, 10]),
        ] {
            let r = Realization::from_label(label).unwrap();
            let want: f64 = degrees.iter().map(|d| factorial(d - 1)).product();
            let got = compute_k(&r);
            assert!((got / want - 1.0).abs() < 1e-10, "{label}: {got} vs {want}");
        }
    }

    #[test]
    fn a2_volume_by_hand() {
        let r = Realization::from_label("A2").unwrap();
        let lam = r.from_pairings(&[1.0, 1.0]).unwrap();
        assert!((h_poly(&r, &lam) - 2.0).abs() < 1e-12);
        assert!((polytope_volume(&r, &lam, compute_k(&r)) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn a1_product_formula_exact() {
        let r = Realization::from_label("A1").unwrap();
        let k = compute_k(&r);
        for (l, m, z) in [(1.0, 0.7, 0.9), (0.5, 2.0, -1.3), (1.5, 1.5, 0.2)] {
            let (lhs, rhs) = product_formula_a1(&r, l, m, z, k).unwrap();
            assert!((lhs - rhs).abs() < 1e-6, "{lhs} {rhs}");
        }
    }

    #[test]
    fn gauss_rules() {
        let (x, w) = gauss_hermite(5);
        let m4: f64 = x.iter().zip(&w).map(|(a, b)| a.powi(4) * b).sum();
        assert!((m4 - 3.0).abs() < 1e-12);
        let (x, w) = gauss_legendre(8);
        let i: f64 = x.iter().zip(&w).map(|(a, b)| a.powi(6) * b).sum();
        assert!((i - 2.0 / 7.0).abs() < 1e-13);
    }
}
