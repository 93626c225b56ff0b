//! Tropicalization of subtraction-free rational expressions, and the SL2
//! Sturm-Liouville lifts of the rank-one Pitman and Littelmann operators.
//!
//! All `eps -> 0` limits are computed in the log domain. On PL inputs the integrals of
//! `exp(-c a(s) / eps)` are evaluated cell by cell in closed form, so the only error left
//! is the Laplace error of the limit itself.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::coxeter::Realization;
use crate::error::{Error, Result};
use crate::plpath::{PlPath, ScalarPl};
use crate::stringparam::{string_coords, transition_closed_dihedral};
use crate::transforms::{h_operator, pitman};

// ---------------------------------------------------------------------------
// Expressions

/// Subtraction-free rational expression over named variables.
#[derive(Clone, Debug, PartialEq)]
pub enum SfExpr {
    Var(String),
    /// Positive constant.
    Const(f64),
    Add(Box<SfExpr>, Box<SfExpr>),
    Mul(Box<SfExpr>, Box<SfExpr>),
    Div(Box<SfExpr>, Box<SfExpr>),
}

/// Max-plus expression: the image of an [`SfExpr`] under tropicalization.
#[derive(Clone, Debug, PartialEq)]
pub enum MaxPlusExpr {
    Zero,
    Var(String),
    Max(Box<MaxPlusExpr>, Box<MaxPlusExpr>),
    Add(Box<MaxPlusExpr>, Box<MaxPlusExpr>),
    Sub(Box<MaxPlusExpr>, Box<MaxPlusExpr>),
    Neg(Box<MaxPlusExpr>),
}

impl SfExpr {
    pub fn parse(s: &str) -> Result<SfExpr> {
        let toks = tokenize(s)?;
        let mut p = Parser {
            toks: &toks,
            pos: 0,
        };
        let e = p.sum()?;
        if p.pos != toks.len() {
            return Err(Error::Parse(format!(
                "unexpected {:?} in expression",
                toks[p.pos]
            )));
        }
        Ok(e)
    }

    /// Variable names in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        fn go(e: &SfExpr, out: &mut Vec<String>) {
            match e {
                SfExpr::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                SfExpr::Const(_) => {}
                SfExpr::Add(a, b) | SfExpr::Mul(a, b) | SfExpr::Div(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        let mut out = vec![];
        go(self, &mut out);
        out
    }

    pub fn eval(&self, vals: &BTreeMap<String, f64>) -> Result<f64> {
        Ok(match self {
            SfExpr::Var(v) => *vals
                .get(v)
                .ok_or_else(|| Error::OutOfRange(format!("no value for {v}")))?,
            SfExpr::Const(c) => *c,
            SfExpr::Add(a, b) => a.eval(vals)? + b.eval(vals)?,
            SfExpr::Mul(a, b) => a.eval(vals)? * b.eval(vals)?,
            SfExpr::Div(a, b) => a.eval(vals)? / b.eval(vals)?,
        })
    }

    /// `log F` given `log` of each variable, with log-sum-exp for sums.
    pub fn eval_log(&self, logs: &BTreeMap<String, f64>) -> Result<f64> {
        Ok(match self {
            SfExpr::Var(v) => *logs
                .get(v)
                .ok_or_else(|| Error::OutOfRange(format!("no value for {v}")))?,
            SfExpr::Const(c) => c.ln(),
            SfExpr::Add(a, b) => log_add(a.eval_log(logs)?, b.eval_log(logs)?),
            SfExpr::Mul(a, b) => a.eval_log(logs)? + b.eval_log(logs)?,
            SfExpr::Div(a, b) => a.eval_log(logs)? - b.eval_log(logs)?,
        })
    }

    /// Bound `C` with `|eps log F(e^{x/eps}) - F_trop(x)| <= C eps`: `log 2` per sum and
    /// `|log c|` per constant.
    pub fn trop_error_constant(&self) -> f64 {
        match self {
            SfExpr::Var(_) => 0.0,
            SfExpr::Const(c) => c.ln().abs(),
            SfExpr::Add(a, b) => {
                std::f64::consts::LN_2 + a.trop_error_constant() + b.trop_error_constant()
            }
            SfExpr::Mul(a, b) | SfExpr::Div(a, b) => {
                a.trop_error_constant() + b.trop_error_constant()
            }
        }
    }
}

/// `+ -> max`, `* -> +`, `/ -> -`, constants `-> 0`.
pub fn tropicalize(e: &SfExpr) -> MaxPlusExpr {
    use MaxPlusExpr as M;
    match e {
        SfExpr::Var(v) => M::Var(v.clone()),
        SfExpr::Const(_) => M::Zero,
        SfExpr::Add(a, b) => match (tropicalize(a), tropicalize(b)) {
            (M::Zero, M::Zero) => M::Zero,
            (x, y) => M::Max(Box::new(x), Box::new(y)),
        },
        SfExpr::Mul(a, b) => match (tropicalize(a), tropicalize(b)) {
            (M::Zero, y) => y,
            (x, M::Zero) => x,
            (x, y) => M::Add(Box::new(x), Box::new(y)),
        },
        SfExpr::Div(a, b) => match (tropicalize(a), tropicalize(b)) {
            (x, M::Zero) => x,
            (M::Zero, M::Neg(y)) => *y,
            (M::Zero, y) => M::Neg(Box::new(y)),
            (x, y) => M::Sub(Box::new(x), Box::new(y)),
        },
    }
}

impl MaxPlusExpr {
    pub fn eval(&self, vals: &BTreeMap<String, f64>) -> Result<f64> {
        Ok(match self {
            MaxPlusExpr::Zero => 0.0,
            MaxPlusExpr::Var(v) => *vals
                .get(v)
                .ok_or_else(|| Error::OutOfRange(format!("no value for {v}")))?,
            MaxPlusExpr::Max(a, b) => a.eval(vals)?.max(b.eval(vals)?),
            MaxPlusExpr::Add(a, b) => a.eval(vals)? + b.eval(vals)?,
            MaxPlusExpr::Sub(a, b) => a.eval(vals)? - b.eval(vals)?,
            MaxPlusExpr::Neg(a) => -a.eval(vals)?,
        })
    }

    fn prec(&self) -> u8 {
        match self {
            MaxPlusExpr::Max(..) => 1,
            MaxPlusExpr::Add(..) | MaxPlusExpr::Sub(..) => 2,
            MaxPlusExpr::Neg(..) => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for MaxPlusExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &MaxPlusExpr, min: u8| {
            if e.prec() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            MaxPlusExpr::Zero => write!(f, "0"),
            MaxPlusExpr::Var(v) => write!(f, "{v}"),
            MaxPlusExpr::Max(a, b) => {
                wrap(
                    f,
                    a,
                    if matches!(**a, MaxPlusExpr::Max(..)) {
                        1
                    } else {
                        4
                    },
                )?;
                write!(f, " ∨ ")?;
                wrap(
                    f,
                    b,
                    if matches!(**b, MaxPlusExpr::Max(..)) {
                        1
                    } else {
                        4
                    },
                )
            }
            MaxPlusExpr::Add(a, b) => {
                wrap(f, a, 2)?;
                write!(f, " + ")?;
                wrap(f, b, 2)
            }
            MaxPlusExpr::Sub(a, b) => {
                wrap(f, a, 2)?;
                write!(f, " − ")?;
                wrap(f, b, 3)
            }
            MaxPlusExpr::Neg(a) => {
                write!(f, "−")?;
                wrap(f, a, 4)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = vec![];
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if "+*/()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            let txt: String = cs[st..i].iter().collect();
            let v: f64 = txt
                .parse()
                .map_err(|_| Error::Parse(format!("bad number {txt}")))?;
            if v <= 0.0 {
                return Err(Error::Parse(format!(
                    "constants must be positive, got {txt}"
                )));
            }
            out.push(Tok::Num(v));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if c == '-' {
            return Err(Error::Parse(
                "subtraction is not allowed in a subtraction-free expression".into(),
            ));
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<SfExpr> {
        let mut e = self.product()?;
        while self.peek_op() == Some('+') {
            self.pos += 1;
            e = SfExpr::Add(Box::new(e), Box::new(self.product()?));
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<SfExpr> {
        let mut e = self.atom()?;
        loop {
            match self.peek_op() {
                Some('*') => {
                    self.pos += 1;
                    e = SfExpr::Mul(Box::new(e), Box::new(self.atom()?));
                }
                Some('/') => {
                    self.pos += 1;
                    e = SfExpr::Div(Box::new(e), Box::new(self.atom()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn atom(&mut self) -> Result<SfExpr> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        match t {
            Tok::Num(v) => Ok(SfExpr::Const(v)),
            Tok::Ident(v) => Ok(SfExpr::Var(v)),
            Tok::Op('(') => {
                let e = self.sum()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Tok::Op(c) => Err(Error::Parse(format!("unexpected {c:?}"))),
        }
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `|eps log F(e^{x/eps}) - F_trop(x)|` for each `eps`.
pub fn numeric_trop_limit(e: &SfExpr, x: &BTreeMap<String, f64>, eps: &[f64]) -> Result<Vec<f64>> {
    let target = tropicalize(e).eval(x)?;
    eps.iter()
        .map(|&ep| {
            let logs: BTreeMap<String, f64> = x.iter().map(|(k, v)| (k.clone(), v / ep)).collect();
            Ok((ep * e.eval_log(&logs)? - target).abs())
        })
        .collect()
}

// ---------------------------------------------------------------------------
// The A2 double Bruhat cell

/// The three transition maps between the two factorization coordinates of the A2 cell.
pub const A2_TRANSITION_EXPRS: [&str; 3] = ["u3 + u2/u1", "u1*u3", "u1*u2/(u2 + u1*u3)"];

fn check_positive(v: &[f64], what: &str) -> Result<()> {
    match v.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
        Some(x) => Err(Error::OutOfRange(format!(
            "{what} must be positive, got {x}"
        ))),
        None => Ok(()),
    }
}

pub fn a2_bruhat_transition(u: [f64; 3]) -> Result<[f64; 3]> {
    check_positive(&u, "cell coordinates")?;
    let [u1, u2, u3] = u;
    Ok([u3 + u2 / u1, u1 * u3, u1 * u2 / (u2 + u1 * u3)])
}

/// The lower triangular matrix written in the coordinates `(t1,t2,t3)` of the second word.
pub fn a2_cell_matrix_t(t: [f64; 3]) -> [[f64; 3]; 3] {
    let [t1, t2, t3] = t;
    [
        [t2, 0.0, 0.0],
        [t1, t1 * t3 / t2, 0.0],
        [1.0, t3 / t2 + 1.0 / t1, 1.0 / (t1 * t3)],
    ]
}

/// The same matrix in the coordinates `(u1,u2,u3)` of the first word.
pub fn a2_cell_matrix_u(u: [f64; 3]) -> [[f64; 3]; 3] {
    let [u1, u2, u3] = u;
    [
        [u1 * u3, 0.0, 0.0],
        [u3 + u2 / u1, u2 / (u1 * u3), 0.0],
        [1.0, 1.0 / u3, 1.0 / u2],
    ]
}

/// Largest entrywise relative difference of the two matrices at `u`.
pub fn a2_bruhat_defect(u: [f64; 3]) -> Result<f64> {
    let t = a2_bruhat_transition(u)?;
    let (a, b) = (a2_cell_matrix_t(t), a2_cell_matrix_u(u));
    let mut d: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            d = d.max((a[i][j] - b[i][j]).abs() / b[i][j].abs().max(1.0));
        }
    }
    Ok(d)
}

/// Tropicalized transition maps evaluated at string coordinates `x` of `A2`.
///
/// Cell coordinates are matched to string coordinates in reverse order, `u_k <-> x_{4-k}`
/// and `t_k <-> y_{4-k}`, because words here act from the right.
pub fn a2_trop_transition(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != 3 {
        return Err(Error::DimMismatch {
            expected: 3,
            got: x.len(),
        });
    }
    let vals: BTreeMap<String, f64> = (1..=3).map(|k| (format!("u{k}"), x[3 - k])).collect();
    let mut y = vec![0.0; 3];
    for (k, src) in A2_TRANSITION_EXPRS.iter().enumerate() {
        y[2 - k] = tropicalize(&SfExpr::parse(src)?).eval(&vals)?;
    }
    Ok(y)
}

/// Largest difference between the tropicalized cell transition and the piecewise-linear
/// string transition over the given points.
pub fn a2_trop_vs_transition(points: &[Vec<f64>]) -> Result<f64> {
    let mut d: f64 = 0.0;
    for x in points {
        let a = a2_trop_transition(x)?;
        let b = transition_closed_dihedral(3, x)?;
        for (p, q) in a.iter().zip(&b) {
            d = d.max((p - q).abs());
        }
    }
    Ok(d)
}

// ---------------------------------------------------------------------------
// Sturm-Liouville lifts on sampled functions

fn check_grid(times: &[f64], vals: &[f64]) -> Result<()> {
    if times.len() != vals.len() || times.len() < 2 {
        return Err(Error::BadPath(
            "need at least two samples with matching times".into(),
        ));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::BadPath("sample times must increase strictly".into()));
    }
    Ok(())
}

/// `int` of `1/f^2` over one cell, exact for `f` linear on the cell.
fn cell_inv_sq(h: f64, a: f64, b: f64) -> f64 {
    h / (a * b)
}

/// `int_0^{t_k} f^{-2}` at every sample. Needs `f > 0`.
fn cumulative_inv_sq(times: &[f64], f: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    for k in 1..f.len() {
        out[k] = out[k - 1] + cell_inv_sq(times[k] - times[k - 1], f[k - 1], f[k]);
    }
    out
}

/// `T phi(t) = phi(t) int_0^t phi^{-2}` on samples of a positive function.
///
/// Cells are integrated exactly for the linear interpolant, which is second order on
/// smooth inputs and stays accurate when `phi` is small.
pub fn sl2_t(times: &[f64], phi: &[f64]) -> Result<Vec<f64>> {
    check_grid(times, phi)?;
    check_positive(phi, "phi")?;
    let c = cumulative_inv_sq(times, phi);
    Ok(phi.iter().zip(&c).map(|(p, i)| p * i).collect())
}

/// `E_{u,v} phi = u phi + v phi int_0^t phi^{-2}`.
pub fn sl2_e(times: &[f64], phi: &[f64], u: f64, v: f64) -> Result<Vec<f64>> {
    check_grid(times, phi)?;
    check_positive(phi, "phi")?;
    let c = cumulative_inv_sq(times, phi);
    Ok(phi.iter().zip(&c).map(|(p, i)| u * p + v * p * i).collect())
}

/// `int_0^T phi^{-2}`, the parameter that selects `phi` inside its `T`-fiber.
pub fn sl2_xi(times: &[f64], phi: &[f64]) -> Result<f64> {
    check_grid(times, phi)?;
    check_positive(phi, "phi")?;
    Ok(*cumulative_inv_sq(times, phi).last().unwrap())
}

/// The element `phi_xi(t) = psi(t) (1/xi + int_t^T psi^{-2})` of the fiber of `T` over `psi`.
///
/// `psi(0) = 0` is allowed: on the first cell `psi` is linear through the origin, and
/// `psi(t) int_t^{t_1} psi^{-2}` tends to `t_1 / psi(t_1)`, which is used at `t = 0`.
pub fn sl2_inverse_family(times: &[f64], psi: &[f64], xi: f64) -> Result<Vec<f64>> {
    check_grid(times, psi)?;
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::OutOfRange(format!("xi must be positive, got {xi}")));
    }
    let start = usize::from(psi[0] == 0.0);
    check_positive(&psi[start..], "psi")?;
    let n = psi.len();
    let mut tail = vec![0.0; n];
    for k in (start..n - 1).rev() {
        tail[k] = tail[k + 1] + cell_inv_sq(times[k + 1] - times[k], psi[k], psi[k + 1]);
    }
    let mut out: Vec<f64> = (0..n).map(|k| psi[k] * (1.0 / xi + tail[k])).collect();
    if start == 1 {
        out[0] = (times[1] - times[0]) / psi[1];
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Log-domain limits on PL functions

/// `log int` of `exp(-c a)` over one cell where `a` is linear from `a0` to `a1`.
fn log_cell_exp(h: f64, a0: f64, a1: f64, c: f64) -> f64 {
    let d = c * (a1 - a0);
    let shape = if d.abs() < 1e-12 {
        -0.5 * d
    } else if d > 0.0 {
        (-(-d).exp_m1() / d).ln()
    } else {
        -d + (d.exp_m1() / d).ln()
    };
    h.ln() - c * a0 + shape
}

/// Refine `a` so that every query time is a breakpoint. Returns the grid, values of `a` on
/// it, and the index of each query.
fn refine(a: &ScalarPl, query: &[f64]) -> Result<(Vec<f64>, Vec<f64>, Vec<usize>)> {
    let t_end = a.duration();
    if query.iter().any(|&t| !(0.0..=t_end).contains(&t)) {
        return Err(Error::OutOfRange(format!(
            "evaluation times must lie in [0, {t_end}]"
        )));
    }
    let mut grid: Vec<f64> = a.times.iter().chain(query).copied().collect();
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
    grid.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    let vals = a.eval_sorted(&grid);
    let idx = query
        .iter()
        .map(|&t| grid.partition_point(|&g| g < t - 1e-14))
        .collect();
    Ok((grid, vals, idx))
}

/// `log int_0^{t_k} exp(-c a)` at every grid point (`-inf` at 0).
fn log_cumulative(grid: &[f64], vals: &[f64], c: f64) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY; grid.len()];
    for k in 1..grid.len() {
        out[k] = log_add(
            out[k - 1],
            log_cell_exp(grid[k] - grid[k - 1], vals[k - 1], vals[k], c),
        );
    }
    out
}

/// `log int_{t_k}^T exp(-c a)` at every grid point (`-inf` at `T`).
fn log_tail(grid: &[f64], vals: &[f64], c: f64) -> Vec<f64> {
    let n = grid.len();
    let mut out = vec![f64::NEG_INFINITY; n];
    for k in (0..n - 1).rev() {
        out[k] = log_add(
            out[k + 1],
            log_cell_exp(grid[k + 1] - grid[k], vals[k], vals[k + 1], c),
        );
    }
    out
}

/// `eps log T(e^{a/eps})` at the query times (which must be positive).
pub fn log_sl2_t(a: &ScalarPl, query: &[f64], eps: f64) -> Result<Vec<f64>> {
    if query.iter().any(|&t| t <= 0.0) {
        return Err(Error::OutOfRange("T phi vanishes at t = 0".into()));
    }
    let (grid, vals, idx) = refine(a, query)?;
    let cum = log_cumulative(&grid, &vals, 2.0 / eps);
    Ok(idx.iter().map(|&k| vals[k] + eps * cum[k]).collect())
}

/// `eps log phi_xi` for `psi = e^{a/eps}` and `xi = e^{x/eps}`:
/// `a(t) + eps log(e^{-x/eps} + int_t^T e^{-2a/eps})`.
pub fn log_inverse_family(a: &ScalarPl, x: f64, query: &[f64], eps: f64) -> Result<Vec<f64>> {
    let (grid, vals, idx) = refine(a, query)?;
    let tail = log_tail(&grid, &vals, 2.0 / eps);
    Ok(idx
        .iter()
        .map(|&k| vals[k] + eps * log_add(-x / eps, tail[k]))
        .collect())
}

/// `eps log int_0^T e^{-a/eps}`: the lift of the string coordinate read off `a`.
pub fn log_string_lift(a: &ScalarPl, eps: f64) -> f64 {
    let grid = a.times.clone();
    let cum = log_cumulative(&grid, &a.vals, 1.0 / eps);
    eps * cum[grid.len() - 1]
}

// ---------------------------------------------------------------------------
// Residual reports

#[derive(Clone, Debug, Serialize)]
pub struct ResidualRow {
    pub eps: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub what: String,
    pub rows: Vec<ResidualRow>,
}

impl ResidualReport {
    /// `residual(eps) / residual(eps / 2)` for consecutive rows that halve `eps`.
    pub fn halving_ratios(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .filter(|w| (w[0].eps / w[1].eps - 2.0).abs() < 1e-9)
            .map(|w| w[0].residual / w[1].residual)
            .collect()
    }

    /// Every halving ratio lies in `[2/f, 2f]`.
    pub fn halves_within(&self, f: f64) -> bool {
        let r = self.halving_ratios();
        !r.is_empty() && r.iter().all(|x| *x >= 2.0 / f && *x <= 2.0 * f)
    }

    pub fn last_residual(&self) -> f64 {
        self.rows.last().map(|r| r.residual).unwrap_or(f64::NAN)
    }
}

/// `0.064, 0.032, ..., 0.001`.
pub fn halving_eps() -> Vec<f64> {
    (0..7).map(|k| 0.064 / f64::from(1u32 << k)).collect()
}

/// Evaluation times `T k / n` for `k = 1..=n`.
fn sample_times(t_end: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| t_end * k as f64 / n as f64).collect()
}

fn rank_one(r: &Realization) -> Result<()> {
    if r.rank() != 1 {
        return Err(Error::Unsupported(format!(
            "rank {} (the SL2 lift needs rank 1)",
            r.rank()
        )));
    }
    Ok(())
}

/// Sup residual of `eps log T(e^{a/eps})` against the Pitman transform, `a = alpha^vee(eta)`.
pub fn pitman_lift_residuals(
    r: &Realization,
    eta: &PlPath,
    eps: &[f64],
    n_eval: usize,
) -> Result<ResidualReport> {
    rank_one(r)?;
    let a = eta.pair(r.simple_coroot(0));
    let query = sample_times(a.duration(), n_eval);
    let target = pitman(r, 0, eta)?
        .pair(r.simple_coroot(0))
        .eval_sorted(&query);
    let rows = eps
        .iter()
        .map(|&ep| {
            let got = log_sl2_t(&a, &query, ep)?;
            Ok(ResidualRow {
                eps: ep,
                residual: sup_diff(&got, &target),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ResidualReport {
        what: "sl2 T vs Pitman".into(),
        rows,
    })
}

/// Sup residual of `eps log phi_xi`, `xi = e^{x/eps}`, against `H^{x/2}` applied to a
/// highest path `pi`. The factor 2 comes from `alpha^vee(alpha) = 2`: the lift subtracts
/// `x ∧ 2 inf a` from `a = alpha^vee(pi)`.
pub fn h_lift_residuals(
    r: &Realization,
    pi: &PlPath,
    x: f64,
    eps: &[f64],
    n_eval: usize,
) -> Result<ResidualReport> {
    rank_one(r)?;
    let a = pi.pair(r.simple_coroot(0));
    let query: Vec<f64> = std::iter::once(0.0)
        .chain(sample_times(a.duration(), n_eval))
        .collect();
    let target = h_operator(r, 0, x / 2.0, pi)?
        .pair(r.simple_coroot(0))
        .eval_sorted(&query);
    let rows = eps
        .iter()
        .map(|&ep| {
            let got = log_inverse_family(&a, x, &query, ep)?;
            Ok(ResidualRow {
                eps: ep,
                residual: sup_diff(&got, &target),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ResidualReport {
        what: "inverse family vs H".into(),
        rows,
    })
}

/// `eps log u(a/eps)` for the first factor of the cell decomposition, against the string
/// coordinate of the simple reflection `s`: `u = int_0^T e^{-alpha_s(a)}`. Rank 1 and 2 only.
pub fn string_lift_residuals(
    r: &Realization,
    s: usize,
    eta: &PlPath,
    eps: &[f64],
) -> Result<ResidualReport> {
    if r.rank() > 2 {
        return Err(Error::Unsupported(format!(
            "rank {} (the string lift is checked in rank <= 2)",
            r.rank()
        )));
    }
    r.check_generator(s)?;
    let word = r.word_ending_with(s);
    let x = *string_coords(r, &word, eta)?.last().unwrap();
    let a = eta.pair(r.simple_coroot(s));
    let rows = eps
        .iter()
        .map(|&ep| ResidualRow {
            eps: ep,
            residual: (log_string_lift(&a, ep) - x).abs(),
        })
        .collect();
    Ok(ResidualReport {
        what: format!("string lift, letter {}", s + 1),
        rows,
    })
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Rank-one paths used for the residual checks, with coroot values given at integer times.
pub fn standard_test_paths(r: &Realization) -> Result<Vec<PlPath>> {
    rank_one(r)?;
    let root = r.simple_root(0).to_vec();
    let mk = |vals: &[f64]| -> Result<PlPath> {
        let times: Vec<f64> = (0..vals.len()).map(|k| k as f64).collect();
        let pts = vals
            .iter()
            .map(|v| root.iter().map(|c| c * v / 2.0).collect())
            .collect();
        PlPath::new(times, pts)
    };
    Ok(vec![
        mk(&[0.0, 2.0, -2.0, 0.0])?,
        mk(&[0.0, -1.0, 1.5, 0.5, 3.0])?,
        mk(&[0.0, 1.0, -0.5, 2.0])?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let e = SfExpr::parse("t1+2*t2/t3").unwrap();
        assert_eq!(tropicalize(&e).to_string(), "t1 ∨ (t2 − t3)");
        let e = SfExpr::parse("1/(t1*t2 + 3*t3*t4)").unwrap();
        assert_eq!(tropicalize(&e).to_string(), "−((t1 + t2) ∨ (t3 + t4))");
        assert!(SfExpr::parse("t1 - t2").is_err());
        assert!(SfExpr::parse("(t1").is_err());
    }

    #[test]
    fn log_cell_matches_direct() {
        for (a0, a1) in [(0.0f64, 1.0f64), (1.0, -2.0), (0.3, 0.3)] {
            let c: f64 = 1.7;
            let h = 0.5;
            let want = if a0 == a1 {
                h * (-c * a0).exp()
            } else {
                ((-c * a0).exp() - (-c * a1).exp()) / (c * (a1 - a0)) * h
            };
            assert!((log_cell_exp(h, a0, a1, c) - want.ln()).abs() < 1e-12);
        }
    }
}
