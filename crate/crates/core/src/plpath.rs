//! Piecewise-linear paths in `V` and scalar PL functions on `[0, T]`.
//!
//! A path is stored as its breakpoint times plus one flat buffer of point coordinates.
//! Paths are kept canonical: consecutive collinear segments are merged on construction,
//! so two equal paths compare equal breakpoint for breakpoint.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for treating two breakpoint times as the same.
const TIME_TOL: f64 = 1e-12;
/// Relative tolerance on velocities for merging collinear segments.
const MERGE_TOL: f64 = 1e-12;

/// A continuous piecewise-linear path with `p(0) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PathJson", into = "PathJson")]
pub struct PlPath {
    dim: usize,
    times: Vec<f64>,
    pts: Vec<f64>,
}

/// Wire format for paths: `{"times": [...], "points": [[...], ...]}`.
#[derive(Serialize, Deserialize)]
struct PathJson {
    times: Vec<f64>,
    points: Vec<Vec<f64>>,
}

impl TryFrom<PathJson> for PlPath {
    type Error = Error;
    fn try_from(j: PathJson) -> Result<PlPath> {
        PlPath::new(j.times, j.points)
    }
}

impl From<PlPath> for PathJson {
    fn from(p: PlPath) -> PathJson {
        PathJson {
            points: p.points(),
            times: p.times,
        }
    }
}

/// A scalar piecewise-linear function on `[0, T]`, no normalization at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarPl {
    pub times: Vec<f64>,
    pub vals: Vec<f64>,
}

fn same_time(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= TIME_TOL * scale.max(1.0)
}

/// Union of two sorted time grids, identifying times closer than the tolerance.
fn merge_grids(a: &[f64], b: &[f64]) -> Vec<f64> {
    let scale = a.last().copied().unwrap_or(1.0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let t = if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        match out.last() {
            Some(&last) if same_time(last, t, scale) => {}
            _ => out.push(t),
        }
    }
    out
}

/// Linear interpolation of `(times, vals)` at sorted query times, by a single sweep.
fn interp_sorted(times: &[f64], vals: &[f64], stride: usize, query: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(query.len() * stride);
    let mut k = 0;
    for &t in query {
        while k + 2 < times.len() && times[k + 1] <= t {
            k += 1;
        }
        let (t0, t1) = (times[k], times[k + 1]);
        let u = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        for c in 0..stride {
            let a = vals[k * stride + c];
            let b = vals[(k + 1) * stride + c];
            out.push(if u == 1.0 { b } else { a + u * (b - a) });
        }
    }
    out
}

impl PlPath {
    /// Build a path from breakpoints. Times must start at 0 and increase strictly,
    /// the first point must be the origin.
    pub fn new(times: Vec<f64>, points: Vec<Vec<f64>>) -> Result<PlPath> {
        if points.len() != times.len() {
            return Err(Error::BadPath(format!(
                "{} times but {} points",
                times.len(),
                points.len()
            )));
        }
        let dim = points.first().map(|p| p.len()).unwrap_or(0);
        let flat: Vec<f64> = points.iter().flat_map(|p| p.iter().copied()).collect();
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        PlPath::from_flat(dim, times, flat)
    }

    pub fn from_flat(dim: usize, times: Vec<f64>, pts: Vec<f64>) -> Result<PlPath> {
        if dim == 0 {
            return Err(Error::BadPath("zero-dimensional path".into()));
        }
        if times.len() < 2 {
            return Err(Error::BadPath(
                "a path needs at least two breakpoints".into(),
            ));
        }
        if pts.len() != dim * times.len() {
            return Err(Error::DimMismatch {
                expected: dim * times.len(),
                got: pts.len(),
            });
        }
        if times[0] != 0.0 {
            return Err(Error::BadPath("path must start at time 0".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::BadPath("times must be strictly increasing".into()));
        }
        if times.iter().chain(&pts).any(|x| !x.is_finite()) {
            return Err(Error::BadPath("non-finite value".into()));
        }
        let scale = pts.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if pts[..dim].iter().any(|x| x.abs() > 1e-12 * scale) {
            return Err(Error::BadPath("path must start at the origin".into()));
        }
        let mut p = PlPath { dim, times, pts };
        p.pts[..dim].iter_mut().for_each(|x| *x = 0.0);
        p.merge_collinear();
        Ok(p)
    }

    /// Straight path `t -> t * v / T` on `[0, T]`.
    pub fn straight(v: &[f64], t_end: f64) -> PlPath {
        let mut pts = vec![0.0; v.len()];
        pts.extend_from_slice(v);
        PlPath {
            dim: v.len(),
            times: vec![0.0, t_end],
            pts,
        }
    }

    fn merge_collinear(&mut self) {
        let d = self.dim;
        let n = self.times.len();
        let mut keep_t: Vec<f64> = Vec::with_capacity(n);
        let mut keep_p: Vec<f64> = Vec::with_capacity(n * d);
        for k in 0..n {
            let t = self.times[k];
            let p = &self.pts[k * d..(k + 1) * d];
            let m = keep_t.len();
            if m >= 2 {
                let (ta, tb) = (keep_t[m - 2], keep_t[m - 1]);
                let pa = &keep_p[(m - 2) * d..(m - 1) * d];
                let pb = &keep_p[(m - 1) * d..m * d];
                let mut vmax = 0.0f64;
                let mut diff = 0.0f64;
                for c in 0..d {
                    let v1 = (pb[c] - pa[c]) / (tb - ta);
                    let v2 = (p[c] - pb[c]) / (t - tb);
                    vmax = vmax.max(v1.abs()).max(v2.abs());
                    diff = diff.max((v1 - v2).abs());
                }
                if diff <= MERGE_TOL * vmax.max(1.0) {
                    keep_t.pop();
                    keep_p.truncate((m - 1) * d);
                }
            }
            keep_t.push(t);
            keep_p.extend_from_slice(p);
        }
        self.times = keep_t;
        self.pts = keep_p;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn num_breakpoints(&self) -> usize {
        self.times.len()
    }
    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap()
    }
    pub fn point(&self, k: usize) -> &[f64] {
        &self.pts[k * self.dim..(k + 1) * self.dim]
    }
    pub fn points(&self) -> Vec<Vec<f64>> {
        self.pts.chunks(self.dim).map(|c| c.to_vec()).collect()
    }
    pub fn endpoint(&self) -> &[f64] {
        self.point(self.times.len() - 1)
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        interp_sorted(
            &self.times,
            &self.pts,
            self.dim,
            &[t.clamp(0.0, self.duration())],
        )
    }

    /// Values at sorted times within `[0, T]`, flattened.
    pub fn eval_sorted(&self, query: &[f64]) -> Vec<f64> {
        interp_sorted(&self.times, &self.pts, self.dim, query)
    }

    /// The scalar function `t -> <f, p(t)>`.
    pub fn pair(&self, f: &[f64]) -> ScalarPl {
        let vals = self
            .pts
            .chunks(self.dim)
            .map(|p| p.iter().zip(f).map(|(a, b)| a * b).sum())
            .collect();
        ScalarPl {
            times: self.times.clone(),
            vals,
        }
    }

    /// `p(t) - c(t) v`, on the union of both grids.
    pub fn sub_scaled(&self, c: &ScalarPl, v: &[f64]) -> PlPath {
        let grid = merge_grids(&self.times, &c.times);
        let mut pts = self.eval_sorted(&grid);
        let cv = c.eval_sorted(&grid);
        for (k, ck) in cv.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                pts[k * self.dim + j] -= ck * vj;
            }
        }
        let mut out = PlPath {
            dim: self.dim,
            times: grid,
            pts,
        };
        out.pts[..self.dim].iter_mut().for_each(|x| *x = 0.0);
        out.merge_collinear();
        out
    }

    /// Apply a linear map (row-major `dim x dim`) pointwise.
    pub fn map_linear(&self, m: impl Fn(&[f64]) -> Vec<f64>) -> PlPath {
        let pts = self.pts.chunks(self.dim).flat_map(m).collect();
        let mut out = PlPath {
            dim: self.dim,
            times: self.times.clone(),
            pts,
        };
        out.merge_collinear();
        out
    }

    /// Concatenation: `p1` on `[0, T1]`, then `p1(T1) + p2(t - T1)`.
    pub fn concat(&self, other: &PlPath) -> Result<PlPath> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let t1 = self.duration();
        let e = self.endpoint().to_vec();
        let mut times = self.times.clone();
        let mut pts = self.pts.clone();
        for k in 1..other.times.len() {
            times.push(t1 + other.times[k]);
            pts.extend(other.point(k).iter().zip(&e).map(|(a, b)| a + b));
        }
        let mut out = PlPath {
            dim: self.dim,
            times,
            pts,
        };
        out.merge_collinear();
        Ok(out)
    }

    /// Two paths on `[0, T]` joined and then run at double speed, so the result lives on `[0, T]`.
    pub fn concat_star(&self, other: &PlPath) -> Result<PlPath> {
        let (a, b) = (self.duration(), other.duration());
        if !same_time(a, b, a) {
            return Err(Error::BadPath(format!(
                "concat_star needs equal durations, got {a} and {b}"
            )));
        }
        Ok(self.concat(other)?.scale_time(0.5))
    }

    /// Inverse of [`PlPath::concat_star`].
    pub fn split_star(&self) -> (PlPath, PlPath) {
        let t = self.duration();
        let h = t / 2.0;
        let grid = merge_grids(&self.times, &[h]);
        let pts = self.eval_sorted(&grid);
        let d = self.dim;
        let mid = grid.iter().position(|&s| same_time(s, h, t)).unwrap();
        let mid_pt: Vec<f64> = pts[mid * d..(mid + 1) * d].to_vec();
        let first_t: Vec<f64> = grid[..=mid].iter().map(|s| s * 2.0).collect();
        let first_p = pts[..(mid + 1) * d].to_vec();
        let mut second_t: Vec<f64> = grid[mid..].iter().map(|s| (s - h) * 2.0).collect();
        second_t[0] = 0.0;
        let second_p: Vec<f64> = pts[mid * d..]
            .chunks(d)
            .flat_map(|p| {
                p.iter()
                    .zip(&mid_pt)
                    .map(|(a, b)| a - b)
                    .collect::<Vec<_>>()
            })
            .collect();
        let mk = |times: Vec<f64>, pts: Vec<f64>| {
            let mut times = times;
            *times.last_mut().unwrap() = t;
            let mut p = PlPath { dim: d, times, pts };
            p.merge_collinear();
            p
        };
        (mk(first_t, first_p), mk(second_t, second_p))
    }

    /// Time-reversed increments: `t -> p(T - t) - p(T)`.
    pub fn kappa(&self) -> PlPath {
        let t = self.duration();
        let e = self.endpoint().to_vec();
        let n = self.times.len();
        let times: Vec<f64> = (0..n)
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    t - self.times[n - 1 - k]
                }
            })
            .collect();
        let mut pts = Vec::with_capacity(self.pts.len());
        for k in (0..n).rev() {
            pts.extend(self.point(k).iter().zip(&e).map(|(a, b)| a - b));
        }
        let mut out = PlPath {
            dim: self.dim,
            times,
            pts,
        };
        *out.times.last_mut().unwrap() = t;
        out.pts[..self.dim].iter_mut().for_each(|x| *x = 0.0);
        out
    }

    /// Multiply the path values by `c`.
    pub fn scale(&self, c: f64) -> PlPath {
        PlPath {
            dim: self.dim,
            times: self.times.clone(),
            pts: self.pts.iter().map(|x| x * c).collect(),
        }
    }

    /// Reparametrize time by a constant factor.
    pub fn scale_time(&self, c: f64) -> PlPath {
        PlPath {
            dim: self.dim,
            times: self.times.iter().map(|t| t * c).collect(),
            pts: self.pts.clone(),
        }
    }

    /// `t -> p(h(t))` for an increasing PL bijection `h` of `[0, T]` given by knots.
    pub fn compose_time(&self, knots_in: &[f64], knots_out: &[f64]) -> Result<PlPath> {
        if knots_in.len() != knots_out.len() || knots_in.len() < 2 {
            return Err(Error::BadPath(
                "time change needs matching knot lists".into(),
            ));
        }
        // times in the new parametrization: knots plus preimages of old breakpoints
        let h = ScalarPl {
            times: knots_in.to_vec(),
            vals: knots_out.to_vec(),
        };
        let hinv = ScalarPl {
            times: knots_out.to_vec(),
            vals: knots_in.to_vec(),
        };
        let pre = hinv.eval_sorted(&self.times);
        let grid = merge_grids(knots_in, &pre);
        let targets: Vec<f64> = h
            .eval_sorted(&grid)
            .iter()
            .map(|t| t.clamp(0.0, self.duration()))
            .collect();
        let pts = self.eval_sorted(&targets);
        PlPath::from_flat(self.dim, grid, pts)
    }

    /// Sup-norm distance, evaluated on the union of both breakpoint grids.
    pub fn sup_distance(&self, other: &PlPath) -> f64 {
        let grid = merge_grids(&self.times, &other.times);
        let a = self.eval_sorted(&grid);
        let b = other.eval_sorted(&grid);
        a.iter().zip(&b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    /// Largest absolute coordinate along the path.
    pub fn sup_norm(&self) -> f64 {
        self.pts.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl ScalarPl {
    pub fn new(times: Vec<f64>, vals: Vec<f64>) -> ScalarPl {
        ScalarPl { times, vals }
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn min(&self) -> f64 {
        self.vals.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn last(&self) -> f64 {
        *self.vals.last().unwrap()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_sorted(&[t.clamp(0.0, self.duration())])[0]
    }

    pub fn eval_sorted(&self, query: &[f64]) -> Vec<f64> {
        interp_sorted(&self.times, &self.vals, 1, query)
    }

    /// `t -> inf_{s <= t} f(s)`, exact: crossing points are inserted as breakpoints.
    pub fn prefix_min(&self) -> ScalarPl {
        let scale = self.duration();
        let mut times = Vec::with_capacity(self.times.len() + 4);
        let mut vals = Vec::with_capacity(self.times.len() + 4);
        let mut m = self.vals[0];
        times.push(self.times[0]);
        vals.push(m);
        for k in 1..self.times.len() {
            let (ta, tb) = (self.times[k - 1], self.times[k]);
            let (ga, gb) = (self.vals[k - 1], self.vals[k]);
            if gb >= m {
                times.push(tb);
                vals.push(m);
                continue;
            }
            if ga > m {
                let tc = ta + (m - ga) / (gb - ga) * (tb - ta);
                if !same_time(tc, ta, scale) && !same_time(tc, tb, scale) {
                    times.push(tc);
                    vals.push(m);
                }
            }
            times.push(tb);
            vals.push(gb);
            m = gb;
        }
        ScalarPl { times, vals }
    }

    fn reversed(&self) -> ScalarPl {
        let t = self.duration();
        let times = self.times.iter().rev().map(|s| t - s).collect();
        let vals = self.vals.iter().rev().copied().collect();
        ScalarPl { times, vals }
    }

    /// `t -> inf_{s >= t} f(s)`.
    pub fn suffix_min(&self) -> ScalarPl {
        let mut r = self.reversed().prefix_min().reversed();
        r.times[0] = 0.0;
        *r.times.last_mut().unwrap() = self.duration();
        r
    }

    /// Pointwise `min(f, c)` with crossings inserted.
    pub fn min_const(&self, c: f64) -> ScalarPl {
        self.clip(c, true)
    }

    /// Pointwise `max(f, c)` with crossings inserted.
    pub fn max_const(&self, c: f64) -> ScalarPl {
        self.clip(c, false)
    }

    fn clip(&self, c: f64, upper: bool) -> ScalarPl {
        let scale = self.duration();
        let f = |v: f64| if upper { v.min(c) } else { v.max(c) };
        let mut times = vec![self.times[0]];
        let mut vals = vec![f(self.vals[0])];
        for k in 1..self.times.len() {
            let (ta, tb) = (self.times[k - 1], self.times[k]);
            let (ga, gb) = (self.vals[k - 1], self.vals[k]);
            if (ga - c) * (gb - c) < 0.0 {
                let tc = ta + (c - ga) / (gb - ga) * (tb - ta);
                if !same_time(tc, ta, scale) && !same_time(tc, tb, scale) {
                    times.push(tc);
                    vals.push(c);
                }
            }
            times.push(tb);
            vals.push(f(gb));
        }
        ScalarPl { times, vals }
    }

    pub fn add_const(&self, c: f64) -> ScalarPl {
        ScalarPl {
            times: self.times.clone(),
            vals: self.vals.iter().map(|v| v + c).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> ScalarPl {
        ScalarPl {
            times: self.times.clone(),
            vals: self.vals.iter().map(|v| v * c).collect(),
        }
    }

    /// Pointwise sum on the union of both grids.
    pub fn add(&self, other: &ScalarPl) -> ScalarPl {
        let grid = merge_grids(&self.times, &other.times);
        let a = self.eval_sorted(&grid);
        let b = other.eval_sorted(&grid);
        ScalarPl {
            vals: a.iter().zip(&b).map(|(x, y)| x + y).collect(),
            times: grid,
        }
    }
}

/// A random PL path on `[0, 1]` with Gaussian increments, for tests and self-checks.
pub fn random_path<R: Rng>(rng: &mut R, dim: usize, breakpoints: usize, step: f64) -> PlPath {
    let n = breakpoints.max(2);
    let mut times: Vec<f64> = (0..n - 2).map(|_| rng.gen_range(0.0..1.0)).collect();
    times.push(0.0);
    times.push(1.0);
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    let mut pts = vec![0.0; dim];
    for k in 1..times.len() {
        for c in 0..dim {
            let z: f64 = rng.sample(StandardNormal);
            let prev = pts[(k - 1) * dim + c];
            pts.push(prev + step * z);
        }
    }
    PlPath::from_flat(dim, times, pts).expect("random path is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar(t: &[f64], v: &[f64]) -> ScalarPl {
        ScalarPl::new(t.to_vec(), v.to_vec())
    }

    #[test]
    fn prefix_min_inserts_crossing() {
        // 0 -> 2 -> -2: min stays 0 until the crossing at t = 2
        let f = scalar(&[0.0, 1.0, 3.0], &[0.0, 2.0, -2.0]);
        let m = f.prefix_min();
        assert_eq!(m.times, vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(m.vals, vec![0.0, 0.0, 0.0, -2.0]);
    }

    #[test]
    fn prefix_min_tie_not_inserted() {
        let f = scalar(&[0.0, 1.0, 2.0], &[0.0, -1.0, -1.0]);
        let m = f.prefix_min();
        assert_eq!(m.times, vec![0.0, 1.0, 2.0]);
        assert_eq!(m.vals, vec![0.0, -1.0, -1.0]);
    }

    #[test]
    fn suffix_min_basic() {
        let f = scalar(&[0.0, 1.0, 3.0], &[0.0, 2.0, -2.0]);
        let m = f.suffix_min();
        assert_eq!(m.vals.last(), Some(&-2.0));
        assert!((m.eval(0.0) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn collinear_merge() {
        let p = PlPath::new(vec![0.0, 1.0, 2.0], vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(p.num_breakpoints(), 2);
    }

    #[test]
    fn rejects_bad_paths() {
        assert!(PlPath::new(vec![0.0, 1.0], vec![vec![1.0], vec![2.0]]).is_err());
        assert!(PlPath::new(vec![0.0, 0.0], vec![vec![0.0], vec![2.0]]).is_err());
        assert!(PlPath::new(vec![0.5, 1.0], vec![vec![0.0], vec![2.0]]).is_err());
        assert!(PlPath::new(vec![0.0], vec![vec![0.0]]).is_err());
    }

    #[test]
    fn star_split_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_path(&mut rng, 2, 6, 1.0);
        let b = random_path(&mut rng, 2, 5, 1.0);
        let c = a.concat_star(&b).unwrap();
        let (a2, b2) = c.split_star();
        assert!(a.sup_distance(&a2) < 1e-12);
        assert!(b.sup_distance(&b2) < 1e-12);
    }

    #[test]
    fn kappa_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_path(&mut rng, 3, 7, 1.0);
        assert!(a.kappa().kappa().sup_distance(&a) < 1e-12);
    }

    #[test]
    fn json_roundtrip() {
        let p = PlPath::new(
            vec![0.0, 1.0, 2.0, 3.0],
            vec![vec![0.0], vec![1.0], vec![2.0], vec![0.0]],
        )
        .unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let q: PlPath = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert_eq!(q.num_breakpoints(), 3);
    }
}
