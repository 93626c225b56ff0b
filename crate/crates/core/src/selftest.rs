//! Built-in verification suite: one seeded, deterministic report per criterion.
//!
//! Every check records the measured value next to its threshold. A few checks are
//! marked `allowed_to_fail`: they record a stated target the implementation does not
//! reach (or a conjecture), and never make the suite fail. Reports carry no timings so
//! two runs with the same seed serialize to identical bytes.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coxeter::Realization;
use crate::crystal::{tensor, CrystalElem};
use crate::dh::brownian::{a1_endpoint_law, a2_conditional_uniformity, omega_stats};
use crate::dh::{
    compute_k, laplace_check, polytope_volume, product_formula_a1, product_formula_mc,
    rejection_volume, sample_polytope, stream_rng, HitAndRun, StringPolytope,
};
use crate::error::{Error, Result};
use crate::involutions::{hexagon_defect, schutz_raw, schutz_tilde, tau, w_action_word};
use crate::plpath::{random_path, PlPath};
use crate::stringparam::{
    dihedral_cone_margin, inverse_string, string_data, transition, transition_closed_dihedral,
    transition_conjecture_m7,
};
use crate::transforms::{dihedral_product_formula, eps_phi, littelmann_e, pitman_w0, pitman_word};
use crate::troplift::{
    a2_bruhat_defect, a2_trop_vs_transition, h_lift_residuals, halving_eps, pitman_lift_residuals,
    standard_test_paths,
};

/// Identifier of the last criterion.
pub const LAST_CRITERION: u32 = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Reduced sample sizes; minutes become seconds.
    Quick,
    /// The sample sizes the thresholds were set for.
    Full,
}

impl Mode {
    fn pick<T>(self, full: T, quick: T) -> T {
        match self {
            Mode::Full => full,
            Mode::Quick => quick,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Compare {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub compare: Compare,
    pub threshold: f64,
    pub passed: bool,
    pub allowed_to_fail: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Check {
        let passed = value <= threshold;
        Check {
            name: name.into(),
            value,
            compare: Compare::AtMost,
            threshold,
            passed,
            allowed_to_fail: false,
            note: None,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Check {
        let passed = value >= threshold;
        Check {
            name: name.into(),
            value,
            compare: Compare::AtLeast,
            threshold,
            passed,
            allowed_to_fail: false,
            note: None,
        }
    }

    fn known(mut self, note: &str) -> Check {
        self.allowed_to_fail = true;
        self.note = Some(note.to_string());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// Only checks marked `allowed_to_fail` failed.
    KnownFail,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: String,
    pub checks: Vec<Check>,
}

impl CriterionReport {
    pub fn status(&self) -> Status {
        if self.checks.iter().any(|c| !c.passed && !c.allowed_to_fail) {
            Status::Fail
        } else if self.checks.iter().any(|c| !c.passed) {
            Status::KnownFail
        } else {
            Status::Pass
        }
    }

    /// Failed checks, for one-line summaries.
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfTestReport {
    pub schema: u32,
    pub mode: Mode,
    pub seed: u64,
    pub criteria: Vec<CriterionReport>,
}

impl SelfTestReport {
    /// True when no check outside the allowed list failed.
    pub fn ok(&self) -> bool {
        self.criteria.iter().all(|c| c.status() != Status::Fail)
    }
}

pub fn criterion_title(id: u32) -> &'static str {
    match id {
        1 => "braid relations for Pitman products",
        2 => "dihedral closed form for Pitman products",
        3 => "string coordinates round trip",
        4 => "closed-form transition maps",
        5 => "dihedral string cones",
        6 => "crystal axioms and tensor products",
        7 => "Schützenberger involutions and commutor",
        8 => "braid relations for the Weyl group action on paths",
        9 => "Duistermaat-Heckman volumes",
        10 => "Laplace transform of the Duistermaat-Heckman measure",
        11 => "Brownian motion statistics",
        12 => "product formula for generalized Bessel functions",
        13 => "tropicalization and geometric lifting",
        14 => "determinism of the quick suite",
        _ => "unknown",
    }
}

/// Runs one criterion.
pub fn run_criterion(id: u32, mode: Mode, seed: u64) -> Result<CriterionReport> {
    let seed = seed.wrapping_add(u64::from(id).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let checks = match id {
        1 => braid_pitman(mode, seed)?,
        2 => dihedral_formula(mode, seed)?,
        3 => round_trip(mode, seed)?,
        4 => transitions(mode, seed)?,
        5 => cones(mode, seed)?,
        6 => crystal_suite(mode, seed)?,
        7 => involution_suite(mode, seed)?,
        8 => w_action_braids(mode, seed)?,
        9 => volumes(mode, seed)?,
        10 => laplace(mode, seed)?,
        11 => brownian(mode, seed)?,
        12 => product_formula(mode, seed)?,
        13 => tropical(mode)?,
        14 => determinism(seed)?,
        _ => return Err(Error::OutOfRange(format!("no criterion {id}"))),
    };
    Ok(CriterionReport {
        id,
        title: criterion_title(id).to_string(),
        checks,
    })
}

/// Runs the listed criteria (all of them when `ids` is empty), in order.
pub fn run(mode: Mode, seed: u64, ids: &[u32]) -> Result<SelfTestReport> {
    let all: Vec<u32> = (1..=LAST_CRITERION).collect();
    let ids = if ids.is_empty() { &all[..] } else { ids };
    let criteria = ids
        .iter()
        .map(|&id| run_criterion(id, mode, seed))
        .collect::<Result<_>>()?;
    Ok(SelfTestReport {
        schema: 1,
        mode,
        seed,
        criteria,
    })
}

fn group(label: &str) -> Result<Realization> {
    Realization::from_label(label)
}

fn rpath(rng: &mut ChaCha8Rng, dim: usize, max_breaks: usize) -> PlPath {
    let n = rng.gen_range(1..=max_breaks);
    random_path(rng, dim, n, 1.0)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn alternating(a: usize, b: usize, n: usize) -> Vec<usize> {
    (0..n).map(|i| if i % 2 == 0 { a } else { b }).collect()
}

fn braid_pitman(mode: Mode, seed: u64) -> Result<Vec<Check>> {
    let n = mode.pick(200, 20);
    let mut checks = vec![];
    for (g, label) in ["A2", "B2", "I5", "I6", "I7", "H3"].iter().enumerate() {
        let r = group(label)?;
        let w1 = r.word_starting_with(0).clone();
        let w2 = r.word_starting_with(r.rank() - 1).clone();
        let mut rng = stream_rng(seed, g as u64);
        let mut worst = 0.0f64;
        for _ in 0..n {
            let eta = rpath(&mut rng, r.rank(), 8);
            let a = pitman_word(&r, &w1, &eta)?;
            let b = pitman_word(&r, &w2, &eta)?;
            worst = worst.max(a.sup_distance(&b));
        }
        checks.push(Check::at_most(format!("{label} sup distance"), worst, 1e-9));
    }
    Ok(checks)
}

fn dihedral_formula(mode: Mode, seed: u64) -> Result<Vec<Check>> {
    let n = mode.pick(100, 10);
    let mut checks = vec![];
    for (g, label) in ["A2", "I5"].iter().enumerate() {
        let r = group(label)?;
        let m = r.coxeter_entry(0, 1) as usize;
        let mut rng = stream_rng(seed, g as u64);
        let mut worst = 0.0f64;
        for _ in 0..n {
            let eta = rpath(&mut rng, 2, 8);
            for len in 1..=m {
                for a in 0..2 {
                    let want = pitman_word(&r, &alternating(a, 1 - a, len), &eta)?;
                    let got = dihedral_product_formula(&r, a, 1 - a, len, &eta)?;
                    worst = worst.max(got.sup_distance(&want));
                }
            }
        }
        checks.push(Check::at_most(
            format!("{label} formula vs composition"),
            worst,
            1e-9,
        ));
    }
    Ok(checks)
}

/// A dominant weight with random pairings in `[0.5, 2]`.
fn random_dominant(r: &Realization, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let p: Vec<f64> = (0..r.rank()).map(|_| rng.gen_range(0.5..2.0)).collect();
    r.from_pairings(&p)
}

fn round_trip(mode: Mode, seed: u64) -> Result<Vec<Check>> {
    let n = mode.pick(500, 50);
    let weights = 5;
    let mut checks = vec![];
    for (g, label) in ["A2", "I5", "H3"].iter().enumerate() {
        let r = group(label)?;
        let w = r.longest_word().clone();
        let mut rng = stream_rng(seed, g as u64);
        let mut worst = 0.0f64;
        for _ in 0..n {
            let eta = rpath(&mut rng, r.rank(), 8);
            let (x, pi) = string_data(&r, &w, &eta)?;
            worst = worst.max(inverse_string(&r, &w, &pi, &x)?.sup_distance(&eta));
        }
        checks.push(Check::at_most(
            format!("{label} paths -> coordinates -> paths"),
            worst,
            1e-9,
        ));

        let mut worst = 0.0f64;
        for k in 0..weights {
            let lambda = random_dominant(&r, &mut rng)?;
            let pi = PlPath::straight(&lambda, 1.0);
            let poly = StringPolytope::new(&r, &w, &lambda)?;
            let pts = sample_polytope(
                &poly,
                n / weights,
                seed.wrapping_add(100 + 10 * g as u64 + k as u64),
                HitAndRun::for_dim(w.len()),
            )?;
            for x in pts {
                let eta = inverse_string(&r, &w, &pi, &x)?;
                let (y, top) = string_data(&r, &w, &eta)?;
                worst = worst.max(max_abs_diff(&x, &y)).max(top.sup_distance(&pi));
            }
        }
        checks.push(Check::at_most(
            format!("{label} coordinates -> paths -> coordinates"),
            worst,
            1e-9,
        ));
    }
    Ok(checks)
}

/// The dihedral realization used for `I(m)`; `m = 3` is `A_2`.
fn dihedral(m: u32) -> Result<Realization> {
    group(&if m == 3 {
        "A2".to_string()
    } else {
        format!("I{m}")
    })
}

/// String coordinates of random paths for the longest word starting with 0, and the
/// coordinates for the other reduced word computed by the path oracle.
fn transition_pairs(
    r: &Realization,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let i = r.word_starting_with(0).clone();
    let j: Vec<usize> = i.iter().map(|s| 1 - s).collect();
    (0..n)
        .map(|_| {
            let eta = rpath(rng, 2, 8);
            let (x, pi) = string_data(r, &i, &eta)?;
            let y = transition(r, &i, &j, pi.endpoint(), &x)?;
            Ok((x, y))
        })
        .collect()
}

fn transitions(mode: Mode, seed: u64) -> Result<Vec<Check>> {
    let n = mode.pick(1000, 100);
    let mut checks = vec![];
    for m in 3..=7u32 {
        let r = dihedral(m)?;
        let mut rng = stream_rng(seed, u64::from(m));
        let mut worst = 0.0f64;
        for (x, y) in transition_pairs(&r, n, &mut rng)? {
            let closed = if m == 7 {
                transition_conjecture_m7(&x)?
            } else {
                transition_closed_dihedral(m, &x)?
            };
            worst = worst.max(max_abs_diff(&closed, &y));
        }
        let name = if m == 3 {
            "A2 closed form vs oracle".to_string()
        } else {
            format!("I{m} closed form vs oracle")
        };
        let c = Check::at_most(name, worst, 1e-9);
        checks.push(if m == 7 {
            c.known("conjectural formula, reported only")
        } else {
            c
        });
    }
    Ok(checks)
}

fn cones(mode: Mode, seed: u64) -> Result<Vec<Check>> {
    let n = mode.pick(1000, 100);
    let weights = 4;
    let mut checks = vec![];
    for m in 3..=6u32 {
        let r = dihedral(m)?;
        let w = r.word_starting_with(0).clone();
        let mut rng = stream_rng(seed, u64::from(m));
        let mut worst = f64::INFINITY;
        for _ in 0..n {
            let eta = rpath(&mut rng, 2, 8);
            let (x, _) = string_data(&r, &w, &eta)?;
            let scale = x.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            worst = worst.min(dihedral_cone_margin(m, &x) / scale);
        }
        checks.push(Check::at_least(
            format!("I{m} cone margin of path coordinates"),
            worst,
            -1e-9,
        ));

        let mut worst = 0.0f64;
        let mut outside = 0usize;
        for k in 0..weights {
            let lambda = random_dominant(&r, &mut rng)?;
            let pi = PlPath::straight(&lambda, 1.0);
            let poly = StringPolytope::new(&r, &w, &lambda)?;
            let pts = sample_polytope(
                &poly,
                n / weights,
                seed.wrapping_add(100 * u64::from(m) + k as u64),
                HitAndRun::for_dim(w.len()),
            )?;
            for x in pts {
                outside += usize::from(dihedral_cone_margin(m, &x) < 0.0);
                let eta = inverse_string(&r, &w, &pi, &x)?;
                let (y, _) = string_data(&r, &w, &eta)?;
                worst = worst.max(max_abs_diff(&x, &y));
            }
        }
        checks.push(Check::at_most(
            format!("I{m} cone points outside the inequalities"),
            outside as f64,
            0.0,
        ));
        checks.push(Check::at_most(
            format!("I{m} cone points lift and re-extract"),
            worst,
            1e-9,
        ));
    }
    Ok(checks)
}

fn random_elem(r: &Realization, rng: &mut ChaCha8Rng, depth: usize) -> CrystalElem {
    match rng.gen_range(0..if depth == 0 { 2 } else { 3 }) {
        0 => CrystalElem::Path(rpath(rng, r.rank(), 5)),
        1 => CrystalElem::Elementary {
            root: rng.gen_range(0..r.rank()),
            t: -rng.gen_range(0.0..2.0),
        },
        _ => tensor(
            random_elem(r, rng, depth - 1),
            random_elem(r, rng, depth - 1),
        ),
    }
}

fn crystal_suite(mode: Mode, seed: u64) -> Result<Vec<Check>> {
    let n = mode.pick(1000, 100);
    let groups = ["A2", "B2", "I5", "A3"];
    let mut rng = stream_rng(seed, 0);
    // worst residual of the weight/eps/phi identities and count of structural violations
    let (mut worst, mut broken) = (0.0f64, 0usize);
    for k in 0..n {
        let r = group(groups[k % groups.len()])?;
        let b = random_elem(&r, &mut rng, 2);
        let s = rng.gen_range(0..r.rank());
        let (eps, phi) = (b.eps(&r, s), b.phi(&r, s));
        let wt = b.wt(&r);
        if eps.is_finite() {
            worst = worst.max((phi - eps - r.pair(s, &wt)).abs());
        } else if phi != f64::NEG_INFINITY {
            broken += 1;
        }
        broken += usize::from(b.e(&r, s, 0.0)?.as_ref() != Some(&b));
        let x = rng.gen_range(-2.0..2.0);
        if let Some(c) = b.e(&r, s, x)? {
            let want: Vec<f64> = wt
                .iter()
                .zip(r.simple_root(s))
                .map(|(w, a)| w + x * a)
                .collect();
            worst = worst.max(max_abs_diff(&c.wt(&r), &want));
            worst = worst.max((c.eps(&r, s) - (eps - x)).abs());
            worst = worst.max((c.phi(&r, s) - (phi + x)).abs());
            let y = rng.gen_range(-1.0..1.0);
            match (c.e(&r, s, y)?, b.e(&r, s, x + y)?) {
                (Some(p), Some(q)) => {
                    worst = worst.max(max_abs_diff(&p.wt(&r), &q.wt(&r)));
                    worst = worst.max((p.eps(&r, s) - q.eps(&r, s)).abs());
                }
                (None, None) => {}
                _ => broken += 1,
            }
        }
    }
    let mut checks = vec![
        Check::at_most("axiom residual", worst, 1e-9),
        Check::at_most("axiom violations", broken as f64, 0.0),
    ];

    let (mut worst, mut ghost_mismatch) = (0.0f64, 0usize);
    for k in 0..n {
        let r = group(groups[k % groups.len()])?;
        let a = rpath(&mut rng, r.rank(), 5);
        let b = rpath(&mut rng, r.rank(), 5);
        let t = tensor(CrystalElem::Path(a), CrystalElem::Path(b));
        let s = rng.gen_range(0..r.rank());
        let x = rng.gen_range(-3.0..3.0);
        let joined = t.theta()?;
        worst = worst.max((t.eps(&r, s) - eps_phi(&r, s, &joined).0).abs());
        match (t.e(&r, s, x)?, littelmann_e(&r, s, x, &joined)?) {
            (Some(l), Some(p)) => worst = worst.max(l.theta()?.sup_distance(&p)),
            (None, None) => {}
            _ => ghost_mismatch += 1,
        }
    }
    checks.push(Check::at_most(
        "tensor-to-concatenation residual",
        worst,
        1e-9,
    ));
    checks.push(Check::at_most(
        "ghost disagreements",
        ghost_mismatch as f64,
        0.0,
    ));
    Ok(checks)
}

fn involution_suite(mode: Mode, seed: u64) -> Result<Vec<Check>> {
    let n = mode.pick(500, 50);
    let groups = ["A2", "B2", "I5", "A3", "H3"];
    let mut rng = stream_rng(seed, 0);
    let (mut endpoint, mut invol, mut intertwine) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..n {
        let r = group(groups[k % groups.len()])?;
        let eta = rpath(&mut rng, r.rank(), 5);
        let top = pitman_w0(&r, &eta)?;
        let flipped = pitman_w0(&r, &schutz_raw(&r, &eta)?)?;
        endpoint = endpoint.max(max_abs_diff(flipped.endpoint(), top.endpoint()));
        let s_eta = schutz_tilde(&r, &eta)?;
        invol = invol.max(schutz_tilde(&r, &s_eta)?.sup_distance(&eta));
        let s = rng.gen_range(0..r.rank());
        let (eps, phi) = eps_phi(&r, s, &eta);
        let x = rng.gen_range(-phi..=eps);
        let moved = littelmann_e(&r, s, x, &eta)?
            .ok_or_else(|| Error::Numerical("ghost inside the admissible range".into()))?;
        let rhs = littelmann_e(&r, r.opposite(s), -x, &s_eta)?
            .ok_or_else(|| Error::Numerical("ghost inside the admissible range".into()))?;
        intertwine = intertwine.max(schutz_tilde(&r, &moved)?.sup_distance(&rhs));
    }
    let (mut tau_err, mut hex) = (0.0f64, 0.0f64);
    let pair_groups = ["A2", "B2", "I5"];
    for k in 0..n {
        let r = group(pair_groups[k % pair_groups.len()])?;
        let a = random_path(&mut rng, 2, 4, 1.0);
        let b = random_path(&mut rng, 2, 4, 1.0);
        let c = random_path(&mut rng, 2, 4, 1.0);
        let ab = a.concat_star(&b)?;
        tau_err = tau_err.max(tau(&r, &tau(&r, &ab)?)?.sup_distance(&ab));
        hex = hex.max(hexagon_defect(&r, &a, &b, &c)?);
    }
    Ok(vec![
        Check::at_most(
            "endpoint of the highest path under -w0 kappa",
            endpoint,
            1e-9,
        ),
        Check::at_most("involution", invol, 1e-9),
        Check::at_most("intertwining with crystal operators", intertwine, 1e-9),
        Check::at_most("commutor involution", tau_err, 1e-9),
        Check::at_most("hexagon", hex, 1e-9),
    ])
}

fn w_action_braids(mode: Mode, seed: u64) -> Result<Vec<Check>> {
    let n = mode.pick(200, 20);
    let mut checks = vec![];
    for m in 2..=7u32 {
        let r = group(&format!("I{m}"))?;
        let mut rng = stream_rng(seed, u64::from(m));
        let mut worst = 0.0f64;
        for _ in 0..n {
            let eta = rpath(&mut rng, 2, 8);
            let a = w_action_word(&r, &alternating(0, 1, m as usize), &eta)?;
            let b = w_action_word(&r, &alternating(1, 0, m as usize), &eta)?;
            worst = worst.max(a.sup_distance(&b));
        }
        checks.push(Check::at_most(format!("I{m} sup distance"), worst, 1e-9));
    }
    Ok(checks)
}

fn volumes(mode: Mode, seed: u64) -> Result<Vec<Check>> {
    let a1 = group("A1")?;
    let k1 = compute_k(&a1);
    let lambda = a1.from_pairings(&[1.7])?;
    let poly = StringPolytope::new(&a1, a1.longest_word(), &lambda)?;
    let box_vol: f64 = poly.box_upper().iter().product();
    let mut checks = vec![
        Check::at_most("A1 |k - 1|", (k1 - 1.0).abs(), 1e-12),
        Check::at_most(
            "A1 |h(lambda)/k - pairing|",
            (polytope_volume(&a1, &lambda, k1) - 1.7).abs(),
            1e-12,
        ),
        Check::at_most(
            "A1 |polytope length - pairing|",
            (box_vol - 1.7).abs(),
            1e-12,
        ),
    ];
    let a2 = group("A2")?;
    let k2 = compute_k(&a2);
    let lambda = a2.from_pairings(&[1.0, 1.5])?;
    let poly = StringPolytope::new(&a2, a2.longest_word(), &lambda)?;
    let (mc, _) = rejection_volume(&poly, mode.pick(1_000_000, 100_000), seed);
    let exact = polytope_volume(&a2, &lambda, k2);
    let tol = mode.pick(0.01, 0.03);
    checks.push(Check::at_most(
        "A2 relative volume error",
        (mc / exact - 1.0).abs(),
        tol,
    ));
    Ok(checks)
}

fn laplace(mode: Mode, seed: u64) -> Result<Vec<Check>> {
    let n = mode.pick(1_000_000, 50_000);
    let cases: [(&str, &[f64]); 3] = [("A1", &[1.3]), ("A2", &[1.0, 1.5]), ("I5", &[1.2, 0.8])];
    let mut checks = vec![];
    for (g, (label, pairings)) in cases.iter().enumerate() {
        let r = group(label)?;
        let k = compute_k(&r);
        let lambda = r.from_pairings(pairings)?;
        let poly = StringPolytope::new(&r, r.longest_word(), &lambda)?;
        let mut rng = stream_rng(seed, g as u64);
        for j in 0..5u64 {
            let z: Vec<f64> = (0..r.rank()).map(|_| rng.gen_range(-0.8..0.8)).collect();
            let rep = laplace_check(&poly, &z, n, seed.wrapping_add(10 * g as u64 + j), k)?;
            checks.push(Check::at_most(
                format!("{label} z-score at z{}", j + 1),
                rep.z_score.abs(),
                3.0,
            ));
        }
    }
    Ok(checks)
}

fn brownian(mode: Mode, seed: u64) -> Result<Vec<Check>> {
    let mut checks = vec![];
    let ks = a1_endpoint_law(mode.pick(10_000, 1_000), mode.pick(1_000, 200), 1.0, seed)?;
    checks.push(Check::at_least(
        "A1 endpoint law KS p-value",
        ks.p_value,
        1e-3,
    ));

    let trials = mode.pick(10_000, 1_000);
    let rate_tol = mode.pick(0.05, 0.15);
    for (g, label, pairings) in [(1u64, "A1", &[1.0][..]), (2, "A2", &[1.0, 1.5][..])] {
        let r = group(label)?;
        let mu = r.from_pairings(pairings)?;
        let rep = omega_stats(&r, &mu, trials, 500, seed.wrapping_add(g))?;
        for (i, c) in rep.coords.iter().enumerate() {
            let lit = format!("{label} omega_{} ", i + 1);
            let note = "rate is beta(mu), not 2 beta(mu), under the normalization used here";
            checks.push(
                Check::at_least(
                    format!("{lit}KS p-value vs rate 2 beta"),
                    c.ks_rate_2beta.p_value,
                    1e-3,
                )
                .known(note),
            );
            checks.push(
                Check::at_most(
                    format!("{lit}|rate / 2 beta - 1|"),
                    (c.rate / (2.0 * c.beta_pairing) - 1.0).abs(),
                    0.05,
                )
                .known(note),
            );
            checks.push(Check::at_least(
                format!("{lit}KS p-value vs rate beta"),
                c.ks_rate_beta.p_value,
                1e-3,
            ));
            checks.push(Check::at_most(
                format!("{lit}|rate / beta - 1|"),
                (c.rate / c.beta_pairing - 1.0).abs(),
                rate_tol,
            ));
        }
        if rep.coords.len() > 1 {
            checks.push(Check::at_most(
                format!("{label} omega distance correlation"),
                rep.max_distance_correlation,
                0.005,
            ));
        }
    }

    let cond = a2_conditional_uniformity(
        mode.pick(20_000, 2_000),
        mode.pick(10_000, 1_000),
        mode.pick(8, 4),
        mode.pick(100_000, 20_000),
        seed.wrapping_add(9),
    )?;
    checks.push(Check::at_most(
        "A2 conditional moments max |z|",
        cond.max_abs_z,
        4.0,
    ));
    Ok(checks)
}

fn product_formula(mode: Mode, seed: u64) -> Result<Vec<Check>> {
    let a1 = group("A1")?;
    let k1 = compute_k(&a1);
    let mut worst = 0.0f64;
    for (l, m, z) in [(1.0, 0.4, 0.7), (2.0, 1.5, -1.2), (0.5, 3.0, 2.0)] {
        let (lhs, rhs) = product_formula_a1(&a1, l, m, z, k1)?;
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    let mut checks = vec![Check::at_most(
        "A1 product formula relative error",
        worst,
        1e-6,
    )];

    let a2 = group("A2")?;
    let k2 = compute_k(&a2);
    let lambda = a2.from_pairings(&[0.6, 0.5])?;
    let mu = a2.from_pairings(&[0.8, 1.3])?;
    let z = [0.4, -0.3];
    let rep = product_formula_mc(
        &a2,
        a2.longest_word(),
        &lambda,
        &mu,
        &z,
        mode.pick(400_000, 40_000),
        seed,
        k2,
    )?;
    checks.push(Check::at_most(
        "A2 product formula |z-score|",
        rep.z_score.abs(),
        3.0,
    ));
    checks.push(Check::at_most(
        "A2 |mass - 1| / SE",
        (rep.gamma_mass - 1.0).abs() / rep.gamma_mass_se,
        3.0,
    ));
    checks.push(
        Check::at_most(
            "A2 |conditional mass - 1| / SE",
            (rep.gamma_mass_conditional - 1.0).abs() / rep.gamma_mass_conditional_se,
            3.0,
        )
        .known("normalizing by the Littlewood-Richardson polytope alone does not give mass 1"),
    );
    Ok(checks)
}

fn tropical(mode: Mode) -> Result<Vec<Check>> {
    let r = group("A1")?;
    let eps = halving_eps();
    let n_eval = mode.pick(200, 50);
    // worst halving ratio, as a factor away from 2
    let off = |ratios: Vec<f64>| {
        ratios
            .iter()
            .map(|q| (q / 2.0).max(2.0 / q))
            .fold(1.0f64, f64::max)
    };
    let (mut p_off, mut p_last, mut h_off, mut h_last) = (1.0f64, 0.0f64, 1.0f64, 0.0f64);
    for eta in standard_test_paths(&r)? {
        let rep = pitman_lift_residuals(&r, &eta, &eps, n_eval)?;
        p_off = p_off.max(off(rep.halving_ratios()));
        p_last = p_last.max(rep.last_residual());
        let pi = pitman_w0(&r, &eta)?;
        let top = pi.pair(r.simple_coroot(0)).last();
        for frac in [0.3, 0.8] {
            let rep = h_lift_residuals(&r, &pi, 2.0 * frac * top, &eps, n_eval)?;
            h_off = h_off.max(off(rep.halving_ratios()));
            h_last = h_last.max(rep.last_residual());
        }
    }
    let mut checks = vec![
        Check::at_most("Pitman lift halving ratio factor", p_off, 1.5),
        Check::at_most("Pitman lift residual at smallest eps", p_last, 5e-2),
        Check::at_most("H lift halving ratio factor", h_off, 1.5),
        Check::at_most("H lift residual at smallest eps", h_last, 5e-2),
    ];

    let n = mode.pick(1000, 100);
    let mut rng = stream_rng(13, 0);
    let mut defect = 0.0f64;
    for _ in 0..n {
        let u = [
            rng.gen_range(0.05..20.0),
            rng.gen_range(0.05..20.0),
            rng.gen_range(0.05..20.0),
        ];
        defect = defect.max(a2_bruhat_defect(u)?);
    }
    checks.push(Check::at_most(
        "A2 Bruhat cell matrix identity",
        defect,
        1e-12,
    ));
    let mut pts = vec![];
    while pts.len() < n {
        let x: Vec<f64> = (0..3).map(|_| f64::from(rng.gen_range(0..40u32))).collect();
        if dihedral_cone_margin(3, &x) >= 0.0 {
            pts.push(x);
        }
    }
    checks.push(Check::at_most(
        "tropicalized transition vs closed form",
        a2_trop_vs_transition(&pts)?,
        1e-12,
    ));
    Ok(checks)
}

fn determinism(seed: u64) -> Result<Vec<Check>> {
    let ids: Vec<u32> = (1..LAST_CRITERION).collect();
    let a = serde_json::to_vec(&run(Mode::Quick, seed, &ids)?)?;
    let b = serde_json::to_vec(&run(Mode::Quick, seed, &ids)?)?;
    Ok(vec![Check::at_most(
        "bytes differing between two quick runs",
        if a == b { 0.0 } else { 1.0 },
        0.0,
    )])
}
