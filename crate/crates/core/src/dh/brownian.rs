//! Brownian paths as fine PL interpolations, and the statistics that compare Pitman
//! transforms of them with their predicted laws.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erf;

use super::polytope::{sample_polytope, stream_rng, HitAndRun, StringPolytope};
use crate::coxeter::{dot, Realization};
use crate::error::{Error, Result};
use crate::plpath::{PlPath, ScalarPl};
use crate::stringparam::{lusztig_coords, string_data};
use crate::transforms::pitman;

/// Gaussian random walk with `steps` increments of variance `T/steps` per coordinate plus
/// drift. Returns the times and the flat list of points.
fn random_walk<R: Rng>(
    rng: &mut R,
    dim: usize,
    t_end: f64,
    steps: usize,
    drift: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    if steps == 0 {
        return Err(Error::OutOfRange("steps must be at least 1".into()));
    }
    if drift.len() != dim {
        return Err(Error::DimMismatch {
            expected: dim,
            got: drift.len(),
        });
    }
    let dt = t_end / steps as f64;
    let sd = dt.sqrt();
    let times: Vec<f64> = (0..=steps)
        .map(|k| if k == steps { t_end } else { k as f64 * dt })
        .collect();
    let mut pts = vec![0.0; dim * (steps + 1)];
    for k in 1..=steps {
        for c in 0..dim {
            let z: f64 = rng.sample(StandardNormal);
            pts[k * dim + c] = pts[(k - 1) * dim + c] + sd * z + drift[c] * dt;
        }
    }
    Ok((times, pts))
}

/// Gaussian random walk with `steps` increments of variance `T/steps` per coordinate plus
/// drift, linearly interpolated. Deterministic in `(seed, stream)`.
pub fn brownian_path(
    dim: usize,
    t_end: f64,
    steps: usize,
    drift: &[f64],
    seed: u64,
    stream: u64,
) -> Result<PlPath> {
    let (times, pts) = random_walk(&mut stream_rng(seed, stream), dim, t_end, steps, drift)?;
    PlPath::from_flat(dim, times, pts)
}

/// Insert the Brownian bridge midpoint into cell `i` (between samples `i` and `i + 1`).
/// Drift does not change the bridge law.
fn bisect_cell<R: Rng>(
    rng: &mut R,
    dim: usize,
    times: &mut Vec<f64>,
    pts: &mut Vec<f64>,
    i: usize,
) {
    let (t0, t1) = (times[i], times[i + 1]);
    let sd = (0.25 * (t1 - t0)).sqrt();
    let mid: Vec<f64> = (0..dim)
        .map(|c| {
            let z: f64 = rng.sample(StandardNormal);
            0.5 * (pts[i * dim + c] + pts[(i + 1) * dim + c]) + sd * z
        })
        .collect();
    times.insert(i + 1, 0.5 * (t0 + t1));
    pts.splice((i + 1) * dim..(i + 1) * dim, mid);
}

/// Time of the first minimum of `g` over `[0, t]`.
fn argmin_until(g: &ScalarPl, t: f64) -> f64 {
    let mut best = (f64::INFINITY, 0.0);
    for (&s, &v) in g.times.iter().zip(&g.vals) {
        if s > t + 1e-12 {
            break;
        }
        if v < best.0 {
            best = (v, s);
        }
    }
    best.1
}

/// One-dimensional Brownian path with the exact minimum of the Brownian bridge on each
/// step inserted at the step midpoint, so that running minima have the exact law.
pub fn brownian_path_with_minima(
    t_end: f64,
    steps: usize,
    seed: u64,
    stream: u64,
) -> Result<PlPath> {
    let mut rng = stream_rng(seed, stream);
    let dt = t_end / steps as f64;
    let sd = dt.sqrt();
    let mut times = vec![0.0];
    let mut pts = vec![0.0];
    let mut a = 0.0;
    for k in 1..=steps {
        let z: f64 = rng.sample(StandardNormal);
        let b = a + sd * z;
        let u: f64 = 1.0 - rng.gen::<f64>();
        let m = 0.5 * (a + b - ((a - b) * (a - b) - 2.0 * dt * u.ln()).sqrt());
        times.push((k as f64 - 0.5) * dt);
        pts.push(m);
        times.push(if k == steps { t_end } else { k as f64 * dt });
        pts.push(b);
        a = b;
    }
    PlPath::from_flat(1, times, pts)
}

/// Asymptotic Kolmogorov-Smirnov p-value (with the usual small-sample correction).
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lam = (sn + 0.12 + 0.11 / sn) * d;
    if lam < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for j in 1..200 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lam * lam).exp();
        s += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// KS statistic of a sample against a continuous CDF.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct KsReport {
    pub n: usize,
    pub d: f64,
    pub p_value: f64,
}

/// CDF of `|B|` for a standard 3-dimensional Gaussian scaled by `sqrt(T)`.
pub fn chi3_cdf(u: f64, t: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let x = u / t.sqrt();
    erf(x / std::f64::consts::SQRT_2)
        - (2.0 / std::f64::consts::PI).sqrt() * x * (-x * x / 2.0).exp()
}

/// `A_1`: the endpoint `P eta(T)` of a Brownian motion has density proportional to
/// `h(l)^2 e^{-l^2/2T}` on the half-line. KS test against that law.
pub fn a1_endpoint_law(trials: usize, steps: usize, t_end: f64, seed: u64) -> Result<KsReport> {
    let r = Realization::from_label("A1")?;
    let ends: Vec<Result<f64>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let eta = brownian_path_with_minima(t_end, steps, seed, k as u64)?;
            Ok(pitman(&r, 0, &eta)?.endpoint()[0])
        })
        .collect();
    let ends: Vec<f64> = ends.into_iter().collect::<Result<_>>()?;
    let d = ks_statistic(&ends, |u| chi3_cdf(u, t_end));
    Ok(KsReport {
        n: trials,
        d,
        p_value: ks_pvalue(d, trials),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaCoordReport {
    /// `beta_i^vee(mu)`.
    pub beta_pairing: f64,
    /// Maximum likelihood rate `1 / mean`.
    pub rate: f64,
    pub ks_rate_2beta: KsReport,
    pub ks_rate_beta: KsReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaReport {
    pub window: f64,
    pub steps: usize,
    pub coords: Vec<OmegaCoordReport>,
    /// Largest absolute pairwise sample correlation between coordinates.
    pub max_abs_correlation: f64,
    /// Largest pairwise bias-corrected squared distance correlation (about 0 under
    /// independence), on at most [`DCOR_SAMPLES`] rows.
    pub max_distance_correlation: f64,
}

/// Rows used for the distance correlation, which is quadratic in the sample size.
pub const DCOR_SAMPLES: usize = 4000;

/// Window length `S` with `exp(-2 min_i beta_i^vee(mu) S / 3) = 1e-6`. The past window has
/// to cover the time the reflected chain needs to forget its start, which is several
/// times the scale of the `omega` tails themselves.
pub fn omega_window(r: &Realization, mu: &[f64]) -> f64 {
    let w = r.longest_word();
    let min_rate = (0..w.len())
        .map(|k| dot(&r.act_word(&w[..k], r.simple_root(w[k])), mu))
        .fold(f64::INFINITY, f64::min);
    3.0 * (1e6f64).ln() / (2.0 * min_rate)
}

/// The stationary statistics `omega_i` of a two-sided Brownian motion with drift `mu`,
/// approximated on a finite past window: for the window path `gamma`, `eta = w0 gamma`,
/// and `omega` are the Lusztig coordinates of `eta`.
///
/// The walk is refined where it matters. Infima of a walk sampled every `dt` miss the
/// Brownian ones by order `sqrt(dt)`, and only infima feed the output: the infimum of each
/// stage of the chain of Pitman transforms, and the running infima of earlier stages at
/// the times where later ones are attained. For each of those, every cell where a
/// Brownian bridge could dip below the current infimum with probability above `1e-4` is
/// bisected with an exact bridge midpoint, [`OMEGA_REFINE_LEVELS`] times over.
pub fn omega_samples(
    r: &Realization,
    mu: &[f64],
    trials: usize,
    steps: usize,
    seed: u64,
) -> Result<(f64, Vec<Vec<f64>>)> {
    r.check_dim(mu)?;
    if r.chamber_margin(mu) <= 0.0 {
        return Err(Error::NotDominant(r.chamber_margin(mu)));
    }
    let s_win = omega_window(r, mu);
    let rows: Vec<Result<Vec<f64>>> = (0..trials)
        .into_par_iter()
        .map(|k| omega_one(r, mu, s_win, steps, seed, k as u64))
        .collect();
    Ok((s_win, rows.into_iter().collect::<Result<_>>()?))
}

/// Bisection rounds around the minimizers in [`omega_samples`].
pub const OMEGA_REFINE_LEVELS: usize = 12;

/// A bridge of variance `2` per unit time with ends `a, b` above `m` over a cell of length
/// `h` goes below `m` with probability `exp(-(a - m)(b - m) / h)`; cells where this exceeds
/// `1e-4` are refined.
const BRIDGE_LOG_ODDS: f64 = 9.210_340_371_976_184;

fn omega_one(
    r: &Realization,
    mu: &[f64],
    s_win: f64,
    steps: usize,
    seed: u64,
    stream: u64,
) -> Result<Vec<f64>> {
    let w = r.longest_word();
    let dim = r.rank();
    let mut rng = stream_rng(seed, stream);
    let (mut times, mut pts) = random_walk(&mut rng, dim, s_win, steps, mu)?;
    for level in 0..=OMEGA_REFINE_LEVELS {
        let gamma = PlPath::from_flat(dim, times.clone(), pts.clone())?;
        let eta = gamma.map_linear(|p| r.act_word(w, p));
        let mut x = vec![0.0; w.len()];
        let mut stages = Vec::with_capacity(w.len());
        let mut cur = eta;
        for k in (0..w.len()).rev() {
            let g = cur.pair(r.simple_coroot(w[k]));
            x[k] = (-g.min()).max(0.0);
            cur = pitman(r, w[k], &cur)?;
            stages.push(g);
        }
        if level == OMEGA_REFINE_LEVELS {
            return Ok(lusztig_coords(r, w, cur.endpoint(), &x));
        }
        let grid_vals: Vec<Vec<f64>> = stages.iter().map(|g| g.eval_sorted(&times)).collect();
        // (stage, t): the infimum of that stage over [0, t] is an input. Stages are in
        // chain order, and stage k at time t depends on the running infima of stages < k.
        let mut work: Vec<(usize, f64)> = (0..stages.len()).map(|k| (k, s_win)).collect();
        let mut cells: Vec<usize> = vec![];
        let mut n = 0;
        while n < work.len() {
            let (k, t) = work[n];
            n += 1;
            let vals = &grid_vals[k];
            let last = times.partition_point(|&u| u <= t + 1e-12).max(1) - 1;
            let m = vals[..=last].iter().copied().fold(f64::INFINITY, f64::min);
            for c in 0..last {
                let h = times[c + 1] - times[c];
                if (vals[c] - m) * (vals[c + 1] - m) < BRIDGE_LOG_ODDS * h {
                    cells.push(c);
                }
            }
            let s = argmin_until(&stages[k], t);
            for j in 0..k {
                if !work.iter().any(|&(i, u)| i == j && (u - s).abs() < 1e-12) {
                    work.push((j, s));
                }
            }
        }
        cells.sort_unstable();
        cells.dedup();
        for &c in cells.iter().rev() {
            bisect_cell(&mut rng, dim, &mut times, &mut pts, c);
        }
    }
    unreachable!()
}

pub fn omega_stats(
    r: &Realization,
    mu: &[f64],
    trials: usize,
    steps: usize,
    seed: u64,
) -> Result<OmegaReport> {
    let (window, rows) = omega_samples(r, mu, trials, steps, seed)?;
    let w = r.longest_word();
    let q = w.len();
    let mut coords = vec![];
    for i in 0..q {
        let beta = r.act_word(&w[..i], r.simple_root(w[i]));
        let bp = dot(&beta, mu);
        let col: Vec<f64> = rows.iter().map(|y| y[i]).collect();
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        let ks = |rate: f64| {
            let d = ks_statistic(&col, |u| {
                if u <= 0.0 {
                    0.0
                } else {
                    1.0 - (-rate * u).exp()
                }
            });
            KsReport {
                n: col.len(),
                d,
                p_value: ks_pvalue(d, col.len()),
            }
        };
        coords.push(OmegaCoordReport {
            beta_pairing: bp,
            rate: 1.0 / mean,
            ks_rate_2beta: ks(2.0 * bp),
            ks_rate_beta: ks(bp),
        });
    }
    let mut max_corr: f64 = 0.0;
    let mut max_dcor: f64 = 0.0;
    let sub = &rows[..rows.len().min(DCOR_SAMPLES)];
    for i in 0..q {
        for j in i + 1..q {
            max_corr = max_corr.max(correlation(&rows, i, j).abs());
            let a: Vec<f64> = sub.iter().map(|r| r[i]).collect();
            let b: Vec<f64> = sub.iter().map(|r| r[j]).collect();
            max_dcor = max_dcor.max(distance_correlation_sq(&a, &b));
        }
    }
    Ok(OmegaReport {
        window,
        steps,
        coords,
        max_abs_correlation: max_corr,
        max_distance_correlation: max_dcor,
    })
}

/// U-centred distance matrix entries are `|x_i - x_j| - r_i - r_j + g` off the diagonal.
struct UCentred<'a> {
    x: &'a [f64],
    r: Vec<f64>,
    g: f64,
}

impl<'a> UCentred<'a> {
    fn new(x: &'a [f64]) -> Self {
        let n = x.len() as f64;
        let rows: Vec<f64> = x
            .iter()
            .map(|a| x.iter().map(|b| (a - b).abs()).sum())
            .collect();
        let total: f64 = rows.iter().sum();
        UCentred {
            x,
            r: rows.iter().map(|v| v / (n - 2.0)).collect(),
            g: total / ((n - 1.0) * (n - 2.0)),
        }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        (self.x[i] - self.x[j]).abs() - self.r[i] - self.r[j] + self.g
    }
}

fn u_product(a: &UCentred, b: &UCentred) -> f64 {
    let n = a.x.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.at(i, j) * b.at(i, j);
            }
        }
    }
    s / (n as f64 * (n as f64 - 3.0))
}

/// Bias-corrected squared distance correlation of two samples (Székely-Rizzo U-statistic).
pub fn distance_correlation_sq(x: &[f64], y: &[f64]) -> f64 {
    if x.len() < 4 || x.len() != y.len() {
        return f64::NAN;
    }
    let (a, b) = (UCentred::new(x), UCentred::new(y));
    let denom = (u_product(&a, &a) * u_product(&b, &b)).sqrt();
    if denom <= 0.0 {
        return 0.0;
    }
    u_product(&a, &b) / denom
}

fn correlation(rows: &[Vec<f64>], i: usize, j: usize) -> f64 {
    let n = rows.len() as f64;
    let mi = rows.iter().map(|r| r[i]).sum::<f64>() / n;
    let mj = rows.iter().map(|r| r[j]).sum::<f64>() / n;
    let (mut c, mut vi, mut vj) = (0.0, 0.0, 0.0);
    for r in rows {
        c += (r[i] - mi) * (r[j] - mj);
        vi += (r[i] - mi).powi(2);
        vj += (r[j] - mj).powi(2);
    }
    c / (vi * vj).sqrt()
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionalBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// Worst `|z|` over coordinates for first moments.
    pub z_first: f64,
    /// Worst `|z|` over coordinates for second moments.
    pub z_second: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionalReport {
    pub trials: usize,
    pub steps: usize,
    pub bins: Vec<ConditionalBin>,
    pub max_abs_z: f64,
}

/// `A_2`: conditionally on the endpoint `lambda = P_{w0} eta(T)` of a Brownian motion,
/// string coordinates are uniform on `M^lambda`.
///
/// Coordinates are scaled by `s = alpha_1^vee(lambda) + alpha_2^vee(lambda)` and binned by
/// `theta = alpha_1^vee(lambda) / s`; per-bin moments are compared to the moments of the
/// uniform law on the scaled polytope, tabulated on a grid of `theta` by hit-and-run.
pub fn a2_conditional_uniformity(
    trials: usize,
    steps: usize,
    nbins: usize,
    grid_samples: usize,
    seed: u64,
) -> Result<ConditionalReport> {
    let r = Realization::from_label("A2")?;
    let w = r.longest_word().clone();
    let rows: Vec<Result<(f64, Vec<f64>)>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let eta = brownian_path(2, 1.0, steps, &[0.0, 0.0], seed, k as u64)?;
            let (x, pi) = string_data(&r, &w, &eta)?;
            let p = r.pairings(pi.endpoint());
            let s = p[0] + p[1];
            Ok((p[0] / s, x.iter().map(|v| v / s).collect()))
        })
        .collect();
    let rows: Vec<(f64, Vec<f64>)> = rows.into_iter().collect::<Result<_>>()?;

    // moment table on a theta grid
    let grid: Vec<f64> = (0..=40).map(|k| 0.01 + 0.98 * k as f64 / 40.0).collect();
    let table: Vec<Result<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)>> = grid
        .par_iter()
        .enumerate()
        .map(|(g, &th)| {
            let lam = r.from_pairings(&[th, 1.0 - th])?;
            let poly = StringPolytope::new(&r, &w, &lam)?;
            let pts = sample_polytope(&poly, grid_samples, seed ^ 0xA5A5, HitAndRun::for_dim(3))
                .map_err(|e| Error::Numerical(format!("grid point {g}: {e}")))?;
            let mut m1 = vec![];
            let mut m2 = vec![];
            let mut s1 = vec![];
            let mut s2 = vec![];
            for c in 0..3 {
                let a: Vec<f64> = pts.iter().map(|x| x[c]).collect();
                let b: Vec<f64> = pts.iter().map(|x| x[c] * x[c]).collect();
                let (ma, sa) = super::polytope::batch_mean_se(&a, 32);
                let (mb, sb) = super::polytope::batch_mean_se(&b, 32);
                m1.push(ma);
                m2.push(mb);
                s1.push(sa);
                s2.push(sb);
            }
            Ok((m1, m2, s1, s2))
        })
        .collect();
    let table: Vec<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> =
        table.into_iter().collect::<Result<_>>()?;
    let interp =
        |th: f64, pick: &dyn Fn(&(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)) -> f64| -> f64 {
            let th = th.clamp(grid[0], *grid.last().unwrap());
            let pos = grid.partition_point(|&g| g <= th).clamp(1, grid.len() - 1);
            let (g0, g1) = (grid[pos - 1], grid[pos]);
            let u = (th - g0) / (g1 - g0);
            (1.0 - u) * pick(&table[pos - 1]) + u * pick(&table[pos])
        };

    let mut bins = vec![];
    let mut worst: f64 = 0.0;
    for b in 0..nbins {
        let (lo, hi) = (b as f64 / nbins as f64, (b + 1) as f64 / nbins as f64);
        let members: Vec<&(f64, Vec<f64>)> = rows
            .iter()
            .filter(|(th, _)| *th >= lo && *th < hi)
            .collect();
        let n = members.len();
        if n < 50 {
            continue;
        }
        let (mut z1, mut z2): (f64, f64) = (0.0, 0.0);
        for c in 0..3 {
            for (order, zmax) in [(1, &mut z1), (2, &mut z2)] {
                let diffs: Vec<f64> = members
                    .iter()
                    .map(|(th, u)| {
                        let pred = if order == 1 {
                            interp(*th, &|t| t.0[c])
                        } else {
                            interp(*th, &|t| t.1[c])
                        };
                        u[c].powi(order) - pred
                    })
                    .collect();
                let pred_se = members
                    .iter()
                    .map(|(th, _)| {
                        if order == 1 {
                            interp(*th, &|t| t.2[c])
                        } else {
                            interp(*th, &|t| t.3[c])
                        }
                    })
                    .sum::<f64>()
                    / n as f64;
                let mean = diffs.iter().sum::<f64>() / n as f64;
                let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                let se = (var / n as f64 + pred_se * pred_se).sqrt();
                *zmax = zmax.max((mean / se).abs());
            }
        }
        worst = worst.max(z1).max(z2);
        bins.push(ConditionalBin {
            lo,
            hi,
            count: n,
            z_first: z1,
            z_second: z2,
        });
    }
    Ok(ConditionalReport {
        trials,
        steps,
        bins,
        max_abs_z: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn distance_correlation_detects_dependence() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..500).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = (0..500).map(|_| rng.sample(StandardNormal)).collect();
        assert!(distance_correlation_sq(&x, &y).abs() < 0.02);
        let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
        assert!(distance_correlation_sq(&x, &sq) > 0.1);
        assert!((distance_correlation_sq(&x, &x) - 1.0).abs() < 1e-9);
    }
}
