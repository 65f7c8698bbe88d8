//! Toledo invariant of a two-generator representation from a fixed line of
//! the commutator.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bergmann::{bergmann_beta_margin, BetaTolerances, IsotropicLine};
use crate::error::{Error, Result};
use crate::form::{check_group_membership, GroupElement, IndefiniteForm, Tolerances};
use crate::interval::{closure_samples, IntervalChart};
use crate::pingpong::random_group_element;
use crate::shilov::{null_vector, sorted_eigenvalues};

pub const FIXED_TOL: f64 = 1e-8;

/// Images `A = rho(a)`, `B = rho(b)` of the free generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeGroupRep {
    #[serde(rename = "A")]
    pub a: GroupElement<f64>,
    #[serde(rename = "B")]
    pub b: GroupElement<f64>,
}

impl FreeGroupRep {
    pub fn new(a: GroupElement<f64>, b: GroupElement<f64>) -> Result<Self> {
        if a.form() != b.form() {
            return Err(Error::DegenerateInput("generators act on different forms".into()));
        }
        let tol = Tolerances::default();
        let a = check_group_membership(a.form(), a.matrix().clone(), &tol)?;
        let b = check_group_membership(b.form(), b.matrix().clone(), &tol)?;
        Ok(FreeGroupRep { a, b })
    }

    pub fn form(&self) -> &IndefiniteForm {
        self.a.form()
    }

    /// `rho(a b a^-1 b^-1) = A B A^-1 B^-1`.
    pub fn commutator(&self) -> GroupElement<f64> {
        self.a.compose(&self.b).compose(&self.a.inverse()).compose(&self.b.inverse())
    }

    /// `rho(b a b^-1 a^-1)`, the inverse of [`FreeGroupRep::commutator`].
    pub fn commutator_inverse(&self) -> GroupElement<f64> {
        self.b.compose(&self.a).compose(&self.b.inverse()).compose(&self.a.inverse())
    }

    /// Factors of `bab^-1a^-1`, rightmost first, for applying the word one
    /// generator at a time. The product matrix is badly conditioned once the
    /// generators are large.
    pub fn commutator_inverse_word(&self) -> [GroupElement<f64>; 4] {
        [self.a.inverse(), self.b.inverse(), self.a.clone(), self.b.clone()]
    }

    pub fn conjugate_by(&self, k: &GroupElement<f64>) -> FreeGroupRep {
        FreeGroupRep { a: self.a.conjugate_by(k), b: self.b.conjugate_by(k) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedLineMethod {
    Identity,
    Eigenline,
    Iteration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedLine {
    pub line: IsotropicLine,
    pub method: FixedLineMethod,
    /// Word whose matrix was searched. Its fixed lines are those of
    /// `aba^-1b^-1`, which is its inverse.
    pub commutator: String,
    pub displacement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToledoResult {
    pub line: IsotropicLine,
    pub beta1: i8,
    pub beta2: i8,
    pub i_rho: i8,
    pub degenerate: bool,
    pub method: Option<FixedLineMethod>,
}

fn apply_word(word: &[GroupElement<f64>], l: &IsotropicLine) -> Result<IsotropicLine> {
    word.iter().try_fold(l.clone(), |acc, g| acc.transform(g))
}

fn line_displacement(word: &[GroupElement<f64>], l: &IsotropicLine) -> Result<f64> {
    Ok(apply_word(word, l)?.distance(l))
}

fn in_closed_interval(y: &IsotropicLine, z: &IsotropicLine, w: &IsotropicLine, tol: &BetaTolerances) -> bool {
    if w.distance(y) < 1e-9 || w.distance(z) < 1e-9 {
        return true;
    }
    matches!(bergmann_beta_margin(y, w, z, tol), Ok(b) if b.value == 2)
}

/// Isotropic real eigenlines of `c` whose eigenvector residual is small.
pub fn isotropic_eigenlines(c: &GroupElement<f64>, tol: f64) -> Vec<IsotropicLine> {
    let d = c.form().dim();
    let m = c.matrix();
    let scale = m.norm().max(1.0);
    let mut out: Vec<IsotropicLine> = Vec::new();
    let iso = Tolerances { iso_tol: 1e-7, ..Tolerances::default() };
    for (re, im) in sorted_eigenvalues(m).unwrap_or_default() {
        if im.abs() > 1e-9 * re.abs().max(1.0) {
            continue;
        }
        let shifted = m - DMatrix::identity(d, d) * re;
        let (v, _) = null_vector(&shifted);
        if (&shifted * &v).norm() > tol * scale {
            continue;
        }
        if let Ok(l) = IsotropicLine::new(*c.form(), v, &iso) {
            if !out.iter().any(|o| o.distance(&l) < 1e-9) {
                out.push(l);
            }
        }
    }
    out
}

/// A line of `cl(I_{y,z})` fixed (within `tol`) by the commutator. The
/// search runs on `bab^-1a^-1`, which maps the closed interval into itself
/// for a ping-pong pair; its fixed lines coincide with those of
/// `aba^-1b^-1`.
pub fn commutator_fixed_line(
    rep: &FreeGroupRep,
    y: &IsotropicLine,
    z: &IsotropicLine,
    tol: f64,
    max_iter: usize,
) -> Result<FixedLine> {
    let c = rep.commutator_inverse();
    let name = "bab^-1a^-1".to_string();
    let chart = IntervalChart::new(y, z)?;
    let d = rep.form().dim();
    let btol = BetaTolerances::default();
    if (c.matrix() - DMatrix::<f64>::identity(d, d)).norm() <= tol {
        let line = chart.unchart(&DVector::zeros(chart.dim()))?;
        return Ok(FixedLine { line, method: FixedLineMethod::Identity, commutator: name, displacement: 0.0 });
    }

    let word = rep.commutator_inverse_word();
    let (_, samples) = closure_samples(&chart, 256)?;
    for s in &samples {
        let w = apply_word(&word, s)?;
        if !in_closed_interval(y, z, &w, &btol) {
            return Err(Error::NotSelfMapping);
        }
    }

    // Eigenlines of the product matrix are accurate only up to its
    // conditioning, so each candidate start is polished by iterating the
    // word; the chart origin is the last start.
    let mut starts: Vec<(IsotropicLine, FixedLineMethod)> = isotropic_eigenlines(&c, 1e-6)
        .into_iter()
        .filter(|l| in_closed_interval(y, z, l, &btol))
        .map(|l| (l, FixedLineMethod::Eigenline))
        .collect();
    starts.push((chart.unchart(&DVector::zeros(chart.dim()))?, FixedLineMethod::Iteration));
    for (start, method) in starts {
        let mut l = start;
        let mut pos = match chart.chart(&l) {
            Ok(p) => p,
            Err(_) => continue,
        };
        for _ in 0..max_iter {
            let next = apply_word(&word, &l)?;
            let Ok(npos) = chart.chart(&next) else { break };
            let step = (&npos - &pos).norm();
            l = next;
            pos = npos;
            if step < tol {
                let displacement = line_displacement(&word, &l)?;
                return Ok(FixedLine { line: l, method, commutator: name, displacement });
            }
        }
    }
    Err(Error::NoFixedLineFound { max_iter })
}

fn beta_or_degenerate(
    x: &IsotropicLine,
    y: &IsotropicLine,
    z: &IsotropicLine,
    allow_degenerate: bool,
    degenerate: &mut bool,
) -> Result<i8> {
    match bergmann_beta_margin(x, y, z, &BetaTolerances::default()) {
        Ok(b) => Ok(b.value),
        Err(Error::NotPairwiseOpposite(..)) if allow_degenerate => {
            *degenerate = true;
            Ok(0)
        }
        Err(e) => Err(e),
    }
}

/// `2 i = beta(l, A^-1 l, A^-1 B^-1 l) + beta(A^-1 B^-1 l, B^-1 l, l)` for a
/// line `l` fixed by the commutator. With `allow_degenerate`, triples that
/// are not pairwise opposite score zero and set the `degenerate` flag.
pub fn toledo_invariant(rep: &FreeGroupRep, l: &IsotropicLine, allow_degenerate: bool) -> Result<ToledoResult> {
    toledo_invariant_tol(rep, l, allow_degenerate, FIXED_TOL)
}

/// [`toledo_invariant`] with the fixed-line displacement bound `fixed_tol`.
pub fn toledo_invariant_tol(
    rep: &FreeGroupRep,
    l: &IsotropicLine,
    allow_degenerate: bool,
    fixed_tol: f64,
) -> Result<ToledoResult> {
    let disp = line_displacement(&rep.commutator_inverse_word(), l)?;
    if disp > fixed_tol {
        return Err(Error::DegenerateInput(format!("line is not fixed by the commutator (displacement {disp:e})")));
    }
    let ai = rep.a.inverse();
    let bi = rep.b.inverse();
    let l1 = l.transform(&ai)?;
    let l2 = l.transform(&ai.compose(&bi))?;
    let l3 = l.transform(&bi)?;
    let mut degenerate = false;
    let beta1 = beta_or_degenerate(l, &l1, &l2, allow_degenerate, &mut degenerate)?;
    let beta2 = beta_or_degenerate(&l2, &l3, l, allow_degenerate, &mut degenerate)?;
    Ok(ToledoResult { line: l.clone(), beta1, beta2, i_rho: (beta1 + beta2) / 2, degenerate, method: None })
}

/// Fixed-line search followed by [`toledo_invariant`].
pub fn compute_toledo(
    rep: &FreeGroupRep,
    y: &IsotropicLine,
    z: &IsotropicLine,
    fixed_tol: f64,
    max_iter: usize,
    allow_degenerate: bool,
) -> Result<(FixedLine, ToledoResult)> {
    let fixed = commutator_fixed_line(rep, y, z, fixed_tol, max_iter)?;
    let mut result = toledo_invariant_tol(rep, &fixed.line, allow_degenerate, fixed_tol)?;
    result.method = Some(fixed.method);
    Ok((fixed, result))
}

pub fn milnor_wood_check(result: &ToledoResult) -> bool {
    result.i_rho.abs() <= 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MilnorWoodReport {
    pub q: usize,
    pub trials: usize,
    pub evaluated: usize,
    /// Representations whose commutator has no isotropic real eigenline.
    pub no_fixed_line: usize,
    pub inconclusive: usize,
    pub violations: usize,
}

/// Random two-generator representations (products of `factors` elementary
/// boosts and rotations). For each one the invariant is evaluated at the
/// first isotropic real eigenline of the commutator that is fixed within
/// [`FIXED_TOL`], with degenerate triples scored zero.
pub fn milnor_wood_monte_carlo(q: usize, trials: usize, factors: usize, seed: u64) -> Result<MilnorWoodReport> {
    let form = IndefiniteForm::real(2, q)?;
    #[derive(Clone, Copy)]
    enum Outcome {
        Value(bool),
        NoLine,
        Inconclusive,
    }
    let outcomes: Vec<Outcome> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let a = random_group_element(&form, &mut rng, factors, 1.0);
            let b = random_group_element(&form, &mut rng, factors, 1.0);
            let Ok(rep) = FreeGroupRep::new(a, b) else { return Outcome::Inconclusive };
            let mut saw_error = false;
            for l in isotropic_eigenlines(&rep.commutator(), 1e-6) {
                match toledo_invariant(&rep, &l, true) {
                    Ok(r) => return Outcome::Value(milnor_wood_check(&r)),
                    Err(Error::DegenerateInput(_)) => {}
                    Err(_) => saw_error = true,
                }
            }
            if saw_error {
                Outcome::Inconclusive
            } else {
                Outcome::NoLine
            }
        })
        .collect();
    let mut r = MilnorWoodReport { q, trials, evaluated: 0, no_fixed_line: 0, inconclusive: 0, violations: 0 };
    for o in outcomes {
        match o {
            Outcome::Value(ok) => {
                r.evaluated += 1;
                r.violations += usize::from(!ok);
            }
            Outcome::NoLine => r.no_fixed_line += 1,
            Outcome::Inconclusive => r.inconclusive += 1,
        }
    }
    Ok(r)
}
