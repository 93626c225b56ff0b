//! Finite Coxeter groups in their essential realization.
//!
//! Every simple root is normalized to squared length 2, so a root and its coroot are
//! the same vector and `coroot(x) = <root, x>`. Coordinates on `V` are Euclidean, taken
//! from the Cholesky factor of the Gram matrix `G(s,t) = -2 cos(pi/m(s,t))`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A word in the generators, 0-based. Words act right to left: the last letter is applied first.
pub type Word = Vec<usize>;

const ROOT_TOL: f64 = 1e-8;

/// How a group was specified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum GroupSpec {
    A {
        n: usize,
    },
    B {
        n: usize,
    },
    I {
        m: u32,
    },
    H3,
    H4,
    /// Explicit Coxeter matrix; an entry of 0 stands for infinity.
    Matrix {
        m: Vec<Vec<u32>>,
    },
}

impl GroupSpec {
    /// Parse a short label such as `A2`, `B3`, `I5`, `H3`, `H4`, or a JSON object.
    pub fn parse(s: &str) -> Result<GroupSpec> {
        let s = s.trim();
        if s.starts_with('{') {
            return Ok(serde_json::from_str(s)?);
        }
        let bad = || Error::BadSpec(format!("unrecognized group label {s:?}"));
        let (head, tail) = s.split_at(1.min(s.len()));
        match (head, tail) {
            ("H", "3") => Ok(GroupSpec::H3),
            ("H", "4") => Ok(GroupSpec::H4),
            ("A", t) => Ok(GroupSpec::A {
                n: t.parse().map_err(|_| bad())?,
            }),
            ("B", t) => Ok(GroupSpec::B {
                n: t.parse().map_err(|_| bad())?,
            }),
            ("I", t) => Ok(GroupSpec::I {
                m: t.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }

    fn coxeter_matrix(&self) -> Result<Vec<Vec<u32>>> {
        let chain = |n: usize, last: u32| {
            let mut m = vec![vec![2u32; n]; n];
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = 1;
            }
            for i in 0..n.saturating_sub(1) {
                let w = if i + 2 == n { last } else { 3 };
                m[i][i + 1] = w;
                m[i + 1][i] = w;
            }
            m
        };
        Ok(match self {
            GroupSpec::A { n } => {
                if *n == 0 {
                    return Err(Error::BadSpec("A_n needs n >= 1".into()));
                }
                chain(*n, 3)
            }
            GroupSpec::B { n } => {
                if *n < 2 {
                    return Err(Error::BadSpec("B_n needs n >= 2".into()));
                }
                chain(*n, 4)
            }
            GroupSpec::I { m } => {
                if *m < 2 {
                    return Err(Error::BadSpec("I(m) needs m >= 2".into()));
                }
                vec![vec![1, *m], vec![*m, 1]]
            }
            GroupSpec::H3 => vec![vec![1, 5, 2], vec![5, 1, 3], vec![2, 3, 1]],
            GroupSpec::H4 => vec![
                vec![1, 5, 2, 2],
                vec![5, 1, 3, 2],
                vec![2, 3, 1, 3],
                vec![2, 2, 3, 1],
            ],
            GroupSpec::Matrix { m } => m.clone(),
        })
    }
}

/// One element of the finite group, as a matrix on `V` with its determinant sign.
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub matrix: Vec<f64>,
    pub sign: f64,
}

/// A finite Coxeter group with its root system.
#[derive(Debug)]
pub struct Realization {
    spec: GroupSpec,
    rank: usize,
    coxeter: Vec<Vec<u32>>,
    gram: DMatrix<f64>,
    roots: Vec<Vec<f64>>,
    positive: Vec<Vec<f64>>,
    rho_check: Vec<f64>,
    longest: Word,
    starting: Vec<Word>,
    opposite: Vec<usize>,
    elements: OnceLock<Vec<GroupElement>>,
}

impl Clone for Realization {
    fn clone(&self) -> Self {
        Realization {
            spec: self.spec.clone(),
            rank: self.rank,
            coxeter: self.coxeter.clone(),
            gram: self.gram.clone(),
            roots: self.roots.clone(),
            positive: self.positive.clone(),
            rho_check: self.rho_check.clone(),
            longest: self.longest.clone(),
            starting: self.starting.clone(),
            opposite: self.opposite.clone(),
            elements: OnceLock::new(),
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

impl Realization {
    pub fn new(spec: GroupSpec) -> Result<Realization> {
        let coxeter = spec.coxeter_matrix()?;
        let n = coxeter.len();
        if n == 0 {
            return Err(Error::BadSpec("empty Coxeter matrix".into()));
        }
        for (i, row) in coxeter.iter().enumerate() {
            if row.len() != n {
                return Err(Error::BadSpec("Coxeter matrix is not square".into()));
            }
            for (j, &m) in row.iter().enumerate() {
                if m != coxeter[j][i] {
                    return Err(Error::BadSpec("Coxeter matrix is not symmetric".into()));
                }
                if i == j && m != 1 {
                    return Err(Error::BadSpec("diagonal entries must be 1".into()));
                }
                if i != j && m == 0 {
                    return Err(Error::InfiniteGroup(f64::NEG_INFINITY));
                }
                if i != j && m < 2 {
                    return Err(Error::BadSpec(format!("off-diagonal entry {m} < 2")));
                }
            }
        }
        let gram = DMatrix::from_fn(n, n, |i, j| match coxeter[i][j] {
            1 => 2.0,
            2 => 0.0,
            m => -2.0 * (PI / m as f64).cos(),
        });
        let lowest = SymmetricEigen::new(&gram / 2.0).eigenvalues.min();
        if lowest <= 1e-10 {
            return Err(Error::InfiniteGroup(lowest));
        }
        let chol = gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Numerical("Cholesky factorization failed".into()))?;
        let l = chol.l();
        let simple: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| l[(i, j)]).collect())
            .collect();

        let coef = gram
            .clone()
            .lu()
            .solve(&DVector::from_element(n, 1.0))
            .ok_or_else(|| Error::Numerical("singular Gram matrix".into()))?;
        let mut rho_check = vec![0.0; n];
        for (t, a) in simple.iter().enumerate() {
            for k in 0..n {
                rho_check[k] += coef[t] * a[k];
            }
        }

        let mut r = Realization {
            spec,
            rank: n,
            coxeter,
            gram,
            roots: simple,
            positive: vec![],
            rho_check,
            longest: vec![],
            starting: vec![],
            opposite: vec![],
            elements: OnceLock::new(),
        };
        r.positive = r.orbit_positive_roots();
        r.longest = r.default_longest()?;
        r.starting = (0..n).map(|s| r.greedy_longest(vec![s])).collect();
        let w0 = r.longest.clone();
        r.opposite = (0..n)
            .map(|s| {
                let v: Vec<f64> = r.act_word(&w0, &r.roots[s]).iter().map(|x| -x).collect();
                (0..n)
                    .find(|&t| close(&v, &r.roots[t], ROOT_TOL))
                    .ok_or_else(|| Error::Numerical("-w0 does not permute simple roots".into()))
            })
            .collect::<Result<_>>()?;
        Ok(r)
    }

    pub fn from_label(s: &str) -> Result<Realization> {
        Realization::new(GroupSpec::parse(s)?)
    }

    fn orbit_positive_roots(&self) -> Vec<Vec<f64>> {
        let mut all: Vec<Vec<f64>> = self.roots.clone();
        let mut frontier = all.clone();
        while !frontier.is_empty() {
            let mut next = vec![];
            for r in &frontier {
                for s in 0..self.rank {
                    let img = self.reflect(s, r);
                    if !all.iter().any(|a| close(a, &img, ROOT_TOL)) {
                        all.push(img.clone());
                        next.push(img);
                    }
                }
            }
            frontier = next;
        }
        all.into_iter()
            .filter(|b| dot(b, &self.rho_check) > 0.0)
            .collect()
    }

    fn default_longest(&self) -> Result<Word> {
        let n = self.rank;
        let w: Word = match &self.spec {
            GroupSpec::A { .. } => (0..n).flat_map(|k| (0..=k).rev()).collect(),
            GroupSpec::B { n } => (0..*n).cycle().take(n * n).collect(),
            GroupSpec::I { m } => (0..*m as usize).map(|k| k % 2).collect(),
            GroupSpec::H3 => (0..3).cycle().take(15).collect(),
            GroupSpec::H4 => (0..4).cycle().take(60).collect(),
            GroupSpec::Matrix { .. } => self.greedy_longest(vec![]),
        };
        if w.len() != self.positive.len() || !self.is_reduced(&w) {
            return Err(Error::Numerical(format!(
                "built-in longest word {w:?} is not reduced"
            )));
        }
        Ok(w)
    }

    /// Extend `prefix` to a reduced word of the longest element, always appending the
    /// smallest generator that keeps the word reduced.
    fn greedy_longest(&self, mut w: Word) -> Word {
        loop {
            let next =
                (0..self.rank).find(|&s| self.is_positive(&self.act_word(&w, &self.roots[s])));
            match next {
                Some(s) => w.push(s),
                None => return w,
            }
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn coxeter_matrix(&self) -> &[Vec<u32>] {
        &self.coxeter
    }
    pub fn coxeter_entry(&self, s: usize, t: usize) -> u32 {
        self.coxeter[s][t]
    }
    pub fn gram(&self, s: usize, t: usize) -> f64 {
        self.gram[(s, t)]
    }
    pub fn simple_root(&self, s: usize) -> &[f64] {
        &self.roots[s]
    }
    /// Simple coroot as a vector: `coroot(s)(x) = <simple_coroot(s), x>`.
    pub fn simple_coroot(&self, s: usize) -> &[f64] {
        &self.roots[s]
    }
    pub fn positive_roots(&self) -> &[Vec<f64>] {
        &self.positive
    }
    pub fn num_positive_roots(&self) -> usize {
        self.positive.len()
    }
    /// The vector on which every simple coroot takes the value 1.
    pub fn rho_check(&self) -> &[f64] {
        &self.rho_check
    }
    pub fn longest_word(&self) -> &Word {
        &self.longest
    }
    /// Lexicographically smallest reduced word of `w0` whose first letter is `s`.
    pub fn word_starting_with(&self, s: usize) -> &Word {
        &self.starting[s]
    }
    /// A reduced word of `w0` whose last letter is `s`.
    pub fn word_ending_with(&self, s: usize) -> Word {
        self.starting[s].iter().rev().copied().collect()
    }
    /// The involution `s -> s'` with `alpha_{s'} = -w0 alpha_s`.
    pub fn opposite(&self, s: usize) -> usize {
        self.opposite[s]
    }

    pub fn check_generator(&self, s: usize) -> Result<()> {
        if s < self.rank {
            Ok(())
        } else {
            Err(Error::BadGenerator(s))
        }
    }

    pub fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() == self.rank {
            Ok(())
        } else {
            Err(Error::DimMismatch {
                expected: self.rank,
                got: v.len(),
            })
        }
    }

    /// `alpha_s^vee(x)`.
    pub fn pair(&self, s: usize, x: &[f64]) -> f64 {
        dot(&self.roots[s], x)
    }

    pub fn reflect(&self, s: usize, x: &[f64]) -> Vec<f64> {
        let c = self.pair(s, x);
        x.iter()
            .zip(&self.roots[s])
            .map(|(xi, ai)| xi - c * ai)
            .collect()
    }

    /// Apply a word to a vector, last letter first.
    pub fn act_word(&self, w: &[usize], x: &[f64]) -> Vec<f64> {
        let mut v = x.to_vec();
        for &s in w.iter().rev() {
            v = self.reflect(s, &v);
        }
        v
    }

    pub fn is_positive(&self, v: &[f64]) -> bool {
        dot(v, &self.rho_check) > 0.0
    }

    /// Length of the group element a word represents (number of inverted positive roots).
    pub fn length(&self, w: &[usize]) -> usize {
        self.positive
            .iter()
            .filter(|b| !self.is_positive(&self.act_word(w, b)))
            .count()
    }

    pub fn is_reduced(&self, w: &[usize]) -> bool {
        w.iter().all(|&s| s < self.rank) && self.length(w) == w.len()
    }

    pub fn check_reduced(&self, w: &[usize]) -> Result<()> {
        for &s in w {
            self.check_generator(s)?;
        }
        if self.is_reduced(w) {
            Ok(())
        } else {
            Err(Error::NotReduced(w.to_vec()))
        }
    }

    /// Checks that `w` is a reduced decomposition of the longest element.
    pub fn check_longest(&self, w: &[usize]) -> Result<()> {
        self.check_reduced(w)?;
        if w.len() == self.positive.len() {
            Ok(())
        } else {
            Err(Error::NotLongest(w.to_vec()))
        }
    }

    /// The vector `lambda` with `alpha_s^vee(lambda) = p[s]`.
    pub fn from_pairings(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(p)?;
        let c = self
            .gram
            .clone()
            .lu()
            .solve(&DVector::from_column_slice(p))
            .ok_or_else(|| Error::Numerical("singular Gram matrix".into()))?;
        let mut out = vec![0.0; self.rank];
        for (t, a) in self.roots.iter().enumerate() {
            for k in 0..self.rank {
                out[k] += c[t] * a[k];
            }
        }
        Ok(out)
    }

    pub fn pairings(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rank).map(|s| self.pair(s, x)).collect()
    }

    /// `sum_s c[s] alpha_s`.
    pub fn combine_roots(&self, c: &[f64], letters: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; self.rank];
        for (&ci, &s) in c.iter().zip(letters) {
            for k in 0..self.rank {
                out[k] += ci * self.roots[s][k];
            }
        }
        out
    }

    /// Smallest value of a simple coroot on `x`; non-negative iff `x` lies in the closed chamber.
    pub fn chamber_margin(&self, x: &[f64]) -> f64 {
        (0..self.rank)
            .map(|s| self.pair(s, x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Product of all positive coroots evaluated at `x`.
    pub fn root_product(&self, x: &[f64]) -> f64 {
        self.positive.iter().map(|b| dot(b, x)).product()
    }

    /// All group elements, enumerated once and cached.
    pub fn elements(&self) -> &[GroupElement] {
        self.elements.get_or_init(|| self.enumerate_elements())
    }

    fn enumerate_elements(&self) -> Vec<GroupElement> {
        let n = self.rank;
        let probe: Vec<f64> = self.rho_check.clone();
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        let mut seen: Vec<Vec<f64>> = vec![probe.clone()];
        let mut out = vec![GroupElement {
            matrix: id,
            sign: 1.0,
        }];
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut next = vec![];
            for &idx in &frontier {
                for s in 0..n {
                    let g = &out[idx].matrix;
                    // new = reflection_s * g, column by column
                    let mut m = vec![0.0; n * n];
                    for col in 0..n {
                        let c: Vec<f64> = (0..n).map(|row| g[row * n + col]).collect();
                        let img = self.reflect(s, &c);
                        for row in 0..n {
                            m[row * n + col] = img[row];
                        }
                    }
                    let img: Vec<f64> = (0..n)
                        .map(|row| (0..n).map(|k| m[row * n + k] * probe[k]).sum())
                        .collect();
                    if !seen.iter().any(|p| close(p, &img, 1e-7)) {
                        seen.push(img);
                        out.push(GroupElement {
                            matrix: m,
                            sign: -out[idx].sign,
                        });
                        next.push(out.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        out
    }

    pub fn order(&self) -> usize {
        self.elements().len()
    }
}

impl GroupElement {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|r| (0..n).map(|k| self.matrix[r * n + k] * x[k]).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_counts_and_orders() {
        for (label, npos, order) in [
            ("A1", 1, 2),
            ("A2", 3, 6),
            ("A3", 6, 24),
            ("B2", 4, 8),
            ("B3", 9, 48),
            ("I5", 5, 10),
            ("I7", 7, 14),
            ("H3", 15, 120),
        ] {
            let r = Realization::from_label(label).unwrap();
            assert_eq!(r.num_positive_roots(), npos, "{label}");
            assert_eq!(r.order(), order, "{label}");
            assert!(r.is_reduced(r.longest_word()));
        }
    }

    #[test]
    fn h4_longest_word() {
        let r = Realization::from_label("H4").unwrap();
        assert_eq!(r.num_positive_roots(), 60);
        assert_eq!(r.longest_word().len(), 60);
    }

    #[test]
    fn infinite_rejected() {
        let spec = GroupSpec::Matrix {
            m: vec![vec![1, 3, 3], vec![3, 1, 3], vec![3, 3, 1]],
        };
        assert!(matches!(
            Realization::new(spec),
            Err(Error::InfiniteGroup(_))
        ));
        let spec = GroupSpec::Matrix {
            m: vec![vec![1, 0], vec![0, 1]],
        };
        assert!(matches!(
            Realization::new(spec),
            Err(Error::InfiniteGroup(_))
        ));
    }

    #[test]
    fn matrix_spec_matches_family() {
        let a = Realization::new(GroupSpec::Matrix {
            m: vec![vec![1, 3], vec![3, 1]],
        })
        .unwrap();
        assert_eq!(a.num_positive_roots(), 3);
        assert!(a.is_reduced(a.longest_word()));
    }

    #[test]
    fn opposite_involution() {
        let a2 = Realization::from_label("A2").unwrap();
        assert_eq!((a2.opposite(0), a2.opposite(1)), (1, 0));
        let b2 = Realization::from_label("B2").unwrap();
        assert_eq!((b2.opposite(0), b2.opposite(1)), (0, 1));
        let i5 = Realization::from_label("I5").unwrap();
        assert_eq!((i5.opposite(0), i5.opposite(1)), (1, 0));
    }

    #[test]
    fn end_words() {
        let r = Realization::from_label("A3").unwrap();
        for s in 0..3 {
            let w = r.word_ending_with(s);
            assert_eq!(*w.last().unwrap(), s);
            r.check_longest(&w).unwrap();
        }
    }
}
