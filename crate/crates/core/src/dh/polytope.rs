//! Uniform sampling on string polytopes by hit-and-run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::coxeter::{GroupSpec, Realization};
use crate::error::{Error, Result};
use crate::plpath::PlPath;
use crate::stringparam::{
    dihedral_a, gt_positions, in_polytope, ladder_bound, string_coords, MEMBERSHIP_TOL,
};
use crate::transforms::{eps_phi, littelmann_e};

/// A deterministic random stream for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Linear inequalities `a . x <= b`.
#[derive(Clone, Debug)]
struct Halfspaces {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

/// The string polytope `M^lambda` for a reduced word, with a membership oracle, exact
/// chords when an explicit description is available, and a bounding box.
#[derive(Clone, Debug)]
pub struct StringPolytope<'a> {
    r: &'a Realization,
    word: Vec<usize>,
    lambda: Vec<f64>,
    explicit: Option<Halfspaces>,
    upper: Vec<f64>,
}

impl<'a> StringPolytope<'a> {
    pub fn new(r: &'a Realization, word: &[usize], lambda: &[f64]) -> Result<StringPolytope<'a>> {
        r.check_longest(word)?;
        r.check_dim(lambda)?;
        let margin = r.chamber_margin(lambda);
        if margin <= 0.0 {
            return Err(Error::NotDominant(margin));
        }
        let q = word.len();
        let mut rows = vec![];
        let mut rhs = vec![];
        for k in 0..q {
            let mut lo = vec![0.0; q];
            lo[k] = -1.0;
            rows.push(lo);
            rhs.push(0.0);
            let mut hi = vec![0.0; q];
            hi[k] = 1.0;
            for j in 0..k {
                hi[j] = r.gram(word[k], word[j]);
            }
            rows.push(hi);
            rhs.push(r.pair(word[k], lambda));
        }
        let cone = explicit_cone(r, word);
        let explicit = cone.map(|c| {
            for row in c {
                rows.push(row);
                rhs.push(0.0);
            }
            Halfspaces { rows, rhs }
        });
        // box from the ladder: negative couplings let x_k grow with earlier coordinates
        let mut upper = vec![0.0; q];
        for k in 0..q {
            let mut u = r.pair(word[k], lambda);
            for j in 0..k {
                u += (-r.gram(word[k], word[j])).max(0.0) * upper[j];
            }
            upper[k] = u;
        }
        Ok(StringPolytope {
            r,
            word: word.to_vec(),
            lambda: lambda.to_vec(),
            explicit,
            upper,
        })
    }

    pub fn dim(&self) -> usize {
        self.word.len()
    }
    pub fn word(&self) -> &[usize] {
        &self.word
    }
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }
    pub fn realization(&self) -> &Realization {
        self.r
    }
    /// Upper corner of the bounding box `[0, upper]`.
    pub fn box_upper(&self) -> &[f64] {
        &self.upper
    }
    pub fn has_explicit_description(&self) -> bool {
        self.explicit.is_some()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = MEMBERSHIP_TOL
            * self
                .lambda
                .iter()
                .chain(x)
                .fold(1.0f64, |m, v| m.max(v.abs()));
        match &self.explicit {
            Some(h) => h.rows.iter().zip(&h.rhs).all(|(a, b)| dot(a, x) <= b + tol),
            None => {
                (0..x.len()).all(|k| {
                    x[k] >= -tol
                        && x[k] <= ladder_bound(self.r, &self.word, &self.lambda, x, k) + tol
                }) && in_polytope(self.r, &self.word, &self.lambda, x).unwrap_or(false)
            }
        }
    }

    /// Parameter interval `[lo, hi]` of the chord `{x + t d}` through an interior point.
    pub fn chord(&self, x: &[f64], d: &[f64]) -> (f64, f64) {
        match &self.explicit {
            Some(h) => {
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for (a, b) in h.rows.iter().zip(&h.rhs) {
                    let ad = dot(a, d);
                    let slack = b - dot(a, x);
                    if ad > 1e-300 {
                        hi = hi.min(slack / ad);
                    } else if ad < -1e-300 {
                        lo = lo.max(slack / ad);
                    }
                }
                (lo.min(0.0), hi.max(0.0))
            }
            None => {
                // the box bounds the chord; bisection on the membership oracle inside it
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for k in 0..x.len() {
                    if d[k] > 0.0 {
                        hi = hi.min((self.upper[k] - x[k]) / d[k]);
                        lo = lo.max(-x[k] / d[k]);
                    } else if d[k] < 0.0 {
                        hi = hi.min(-x[k] / d[k]);
                        lo = lo.max((self.upper[k] - x[k]) / d[k]);
                    }
                }
                (self.bisect(x, d, lo), self.bisect(x, d, hi))
            }
        }
    }

    fn bisect(&self, x: &[f64], d: &[f64], far: f64) -> f64 {
        let at = |t: f64| -> Vec<f64> { x.iter().zip(d).map(|(a, b)| a + t * b).collect() };
        if self.contains(&at(far)) {
            return far;
        }
        let (mut inside, mut outside) = (0.0, far);
        for _ in 0..48 {
            let mid = 0.5 * (inside + outside);
            if self.contains(&at(mid)) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    }

    /// An interior point: the average of string coordinates of random walks in `B(pi)`.
    pub fn interior_point<R: Rng>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let q = self.dim();
        let n = self.r.rank();
        let mut acc = vec![0.0; q];
        let count = 2 * q + 4;
        let mut eta = PlPath::straight(&self.lambda, 1.0);
        for _ in 0..count {
            for _ in 0..3 * q {
                let s = rng.gen_range(0..n);
                let (eps, phi) = eps_phi(self.r, s, &eta);
                let x = rng.gen_range(-phi..=eps);
                if let Some(p) = littelmann_e(self.r, s, x, &eta)? {
                    eta = p;
                }
            }
            let x = string_coords(self.r, &self.word, &eta)?;
            for (a, v) in acc.iter_mut().zip(&x) {
                *a += v / count as f64;
            }
        }
        if !self.contains(&acc) {
            return Err(Error::Numerical("no feasible interior start found".into()));
        }
        Ok(acc)
    }

    /// `lambda - sum_k x_k alpha_{s_k}`.
    pub fn weight(&self, x: &[f64]) -> Vec<f64> {
        let mut v = self.lambda.clone();
        let s = self.r.combine_roots(x, &self.word);
        for (a, b) in v.iter_mut().zip(s) {
            *a -= b;
        }
        v
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Explicit cone inequalities `row . x <= 0` when known: rank one, rank two (alternating
/// words), and the standard word of `A_n`.
fn explicit_cone(r: &Realization, word: &[usize]) -> Option<Vec<Vec<f64>>> {
    let q = word.len();
    if r.rank() == 1 {
        return Some(vec![]);
    }
    if r.rank() == 2 {
        let m = r.coxeter_entry(0, 1);
        let mut rows = vec![];
        for k in 1..q.saturating_sub(1) {
            // x_k / a_k - x_{k+1} / a_{k+1} <= 0  (1-based k)
            let mut row = vec![0.0; q];
            row[k - 1] = 1.0 / dihedral_a(m, k as i64);
            row[k] = -1.0 / dihedral_a(m, k as i64 + 1);
            rows.push(row);
        }
        return Some(rows);
    }
    if let GroupSpec::A { n } = r.spec() {
        if word == r.longest_word().as_slice() {
            let pos = gt_positions(*n);
            let mut rows = vec![];
            for (p, &(i, j)) in pos.iter().enumerate() {
                if let Some(p2) = pos.iter().position(|&(i2, j2)| i2 == i && j2 == j + 1) {
                    let mut row = vec![0.0; q];
                    row[p] = 1.0;
                    row[p2] = -1.0;
                    rows.push(row);
                }
            }
            return Some(rows);
        }
    }
    None
}

/// Hit-and-run settings.
#[derive(Clone, Copy, Debug)]
pub struct HitAndRun {
    pub burn_in: usize,
    pub thin: usize,
    pub chains: usize,
}

impl HitAndRun {
    /// Burn-in `10 q`, thinning 5, eight independent chains.
    pub fn for_dim(q: usize) -> HitAndRun {
        HitAndRun {
            burn_in: 10 * q,
            thin: 5,
            chains: 8,
        }
    }
}

/// `n` approximately uniform points of the polytope. Chains run in parallel on
/// independent streams of `seed`; the output order does not depend on the thread count.
pub fn sample_polytope(
    poly: &StringPolytope<'_>,
    n: usize,
    seed: u64,
    cfg: HitAndRun,
) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::OutOfRange("sample count must be at least 1".into()));
    }
    let chains = cfg.chains.max(1).min(n);
    let per: Vec<usize> = (0..chains)
        .map(|c| n / chains + usize::from(c < n % chains))
        .collect();
    let out: Vec<Result<Vec<Vec<f64>>>> = per
        .par_iter()
        .enumerate()
        .map(|(c, &count)| run_chain(poly, count, stream_rng(seed, c as u64), cfg))
        .collect();
    let mut all = Vec::with_capacity(n);
    for chunk in out {
        all.extend(chunk?);
    }
    Ok(all)
}

fn run_chain(
    poly: &StringPolytope<'_>,
    count: usize,
    mut rng: ChaCha8Rng,
    cfg: HitAndRun,
) -> Result<Vec<Vec<f64>>> {
    let q = poly.dim();
    let mut x = poly.interior_point(&mut rng)?;
    let mut out = Vec::with_capacity(count);
    let total = cfg.burn_in + count * cfg.thin;
    for step in 0..total {
        let mut d: Vec<f64> = (0..q).map(|_| rng.sample(StandardNormal)).collect();
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        d.iter_mut().for_each(|v| *v /= norm);
        let (lo, hi) = poly.chord(&x, &d);
        let t = if hi > lo { rng.gen_range(lo..=hi) } else { 0.0 };
        let cand: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
        if poly.contains(&cand) {
            x = cand;
        }
        if step >= cfg.burn_in && (step - cfg.burn_in + 1) % cfg.thin == 0 {
            out.push(x.clone());
        }
    }
    Ok(out)
}

/// Volume of the polytope by rejection from its bounding box, with standard error.
pub fn rejection_volume(poly: &StringPolytope<'_>, n: usize, seed: u64) -> (f64, f64) {
    let box_vol: f64 = poly.box_upper().iter().product();
    let chunks = 64usize;
    let hits: Vec<usize> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, 1000 + c as u64);
            let count = n / chunks + usize::from(c < n % chunks);
            let mut hit = 0;
            let mut x = vec![0.0; poly.dim()];
            for _ in 0..count {
                for (k, xi) in x.iter_mut().enumerate() {
                    *xi = rng.gen_range(0.0..poly.box_upper()[k]);
                }
                if poly.contains(&x) {
                    hit += 1;
                }
            }
            hit
        })
        .collect();
    let p = hits.iter().sum::<usize>() as f64 / n as f64;
    (box_vol * p, box_vol * (p * (1.0 - p) / n as f64).sqrt())
}

/// Uniform points of the polytope by rejection from the box (test oracle).
pub fn rejection_sample(poly: &StringPolytope<'_>, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = stream_rng(seed, 7);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x: Vec<f64> = poly
            .box_upper()
            .iter()
            .map(|u| rng.gen_range(0.0..*u))
            .collect();
        if poly.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Mean and batch-means standard error of a scalar statistic over chain output.
///
/// `values` are in sampler order (chains concatenated); batches never straddle chains
/// when `chains` divides the length.
pub fn batch_mean_se(values: &[f64], batches: usize) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let b = batches.clamp(2, n.max(2));
    let size = n / b;
    if size == 0 {
        return (mean, f64::NAN);
    }
    let means: Vec<f64> = (0..b)
        .map(|k| values[k * size..(k + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let mm = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|m| (m - mm).powi(2)).sum::<f64>() / (b - 1) as f64;
    (mean, (var / b as f64).sqrt())
}
