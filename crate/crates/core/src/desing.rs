//! Normal-form analysis for a singular curve {z_1 = z_2 = 0} in dimension
//! three: transverse eigenvalue data, case classification, branch curves
//! in the exceptional divisor, eigenvalue bookkeeping after a blow-up,
//! the fiber-type obstruction pattern, and the resolution driver.

use crate::blowup::{recenter_on_branch, strict_transform, BlowupError, BranchData};
use crate::field::{classify_center, CenterLocal, Classification, FieldError, VectorField};
use crate::poly::{rat, MultiPoly, Rat};
use crate::unipoly::{rat_sqrt, UniPoly};
use num::Zero;
use thiserror::Error;

/// Split of a three-variable field singular along {z_1 = z_2 = 0} into
/// the part linear in (z_1, z_2) — six coefficient polynomials in z_3 —
/// and a remainder of order at least two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveLocalData {
    pub p10: UniPoly,
    pub p11: UniPoly,
    pub p20: UniPoly,
    pub p21: UniPoly,
    pub p30: UniPoly,
    pub p31: UniPoly,
    pub higher: Vec<MultiPoly>,
}

/// Trace, determinant and discriminant of the transverse linear part,
/// with the exact square root of the discriminant when it exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenData {
    pub trace: UniPoly,
    pub det: UniPoly,
    pub delta: UniPoly,
    pub delta_sqrt: Option<UniPoly>,
}

/// The three transverse cases: both eigenvalues nonzero (with a flag for
/// a constant positive rational eigenvalue ratio), exactly one nonzero,
/// or both identically zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseTag {
    CaseI { resonant: bool },
    CaseII,
    CaseIII,
}

/// A branch curve in the exceptional divisor of the first chart, or the
/// origin curve {v_1 = v_2 = 0} of the second chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Branch3 {
    Chart1(BranchData),
    Chart2Origin,
}

#[derive(Debug, Error)]
pub enum DesingError {
    #[error("curve analysis requires exactly three variables")]
    NotThreeVariables,
    #[error("the field is not singular along the curve {{z1 = z2 = 0}}")]
    NotSingularAlongCurve,
    #[error("branch not expressible by a polynomial: delta = {delta}, denominator = {denominator}")]
    UnsupportedBranch { delta: String, denominator: String },
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("no continuing branch found at step {0}")]
    NoContinuingBranch(usize),
    #[error(transparent)]
    Blowup(#[from] BlowupError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Split the field into its (z_1, z_2)-linear coefficients and the order
/// >= 2 remainder; the reconstruction identity is asserted.
pub fn extract_curve_data(f: &VectorField) -> Result<CurveLocalData, DesingError> {
    if f.n != 3 {
        return Err(DesingError::NotThreeVariables);
    }
    let mut linear = Vec::with_capacity(3);
    let mut higher = Vec::with_capacity(3);
    for p in &f.components {
        let c1 = p.coeff_of_var_power(0, 1).coeff_of_var_power(1, 0);
        let c2 = p.coeff_of_var_power(0, 0).coeff_of_var_power(1, 1);
        let pi0 = UniPoly::from_multi(&c1, 2).expect("coefficient depends only on z3");
        let pi1 = UniPoly::from_multi(&c2, 2).expect("coefficient depends only on z3");
        let lin = &(&MultiPoly::var(3, 0) * &pi0.to_multi(3, 2))
            + &(&MultiPoly::var(3, 1) * &pi1.to_multi(3, 2));
        let rest = p - &lin;
        if rest.vanish_order(2).map_or(false, |o| o < 2) {
            return Err(DesingError::NotSingularAlongCurve);
        }
        assert_eq!(&(&lin + &rest), p, "split reconstruction");
        linear.push((pi0, pi1));
        higher.push(rest);
    }
    let (p10, p11) = linear[0].clone();
    let (p20, p21) = linear[1].clone();
    let (p30, p31) = linear[2].clone();
    Ok(CurveLocalData {
        p10,
        p11,
        p20,
        p21,
        p30,
        p31,
        higher,
    })
}

/// Trace, determinant and discriminant of the transverse 2x2 block.
pub fn eigen_data(cd: &CurveLocalData) -> EigenData {
    let trace = &cd.p10 + &cd.p21;
    let det = &(&cd.p10 * &cd.p21) - &(&cd.p11 * &cd.p20);
    let diff = &cd.p10 - &cd.p21;
    let delta = &(&diff * &diff) + &(&cd.p11 * &cd.p20).scale(&rat(4));
    assert_eq!(
        delta,
        &(&trace * &trace) - &det.scale(&rat(4)),
        "discriminant identity"
    );
    let delta_sqrt = delta.sqrt_exact();
    EigenData {
        trace,
        det,
        delta,
        delta_sqrt,
    }
}

/// If the eigenvalue ratio q is a constant rational, return it. The
/// ratio is constant exactly when trace^2 is a constant multiple c of
/// det; then q satisfies (1+q)^2/q = c.
pub fn constant_ratio(e: &EigenData) -> Option<Rat> {
    let c = (&e.trace * &e.trace).constant_multiple_of(&e.det)?;
    // q^2 + (2-c)q + 1 = 0.
    let b = rat(2) - &c;
    let disc = &b * &b - rat(4);
    let s = rat_sqrt(&disc)?;
    // Both roots are inverse to each other; their sign agrees.
    Some((&c - rat(2) + s) / rat(2))
}

/// Classify the transverse case; in the first case, flag a constant
/// eigenvalue ratio lying in Q_+ (which includes every integer
/// resonance lambda_1 = n lambda_2, exactly).
pub fn case_classify3(e: &EigenData) -> CaseTag {
    if e.det.is_zero() {
        if e.trace.is_zero() {
            CaseTag::CaseIII
        } else {
            CaseTag::CaseII
        }
    } else {
        let resonant = constant_ratio(e).map_or(false, |q| q > Rat::zero());
        CaseTag::CaseI { resonant }
    }
}

/// The Seidenberg-type stopping test: some eigenvalue not identically
/// zero and the generic eigenvalue ratio outside Q_+.
pub fn elementary_ratio_test(e: &EigenData) -> bool {
    match case_classify3(e) {
        CaseTag::CaseI { resonant } => !resonant,
        CaseTag::CaseII => true,
        CaseTag::CaseIII => false,
    }
}

/// Branch curves inside the exceptional divisor: roots in u_2 of
/// p20 + u_2(p21 - p10) - u_2^2 p11 over Q[z_3].
pub fn branch_curves3(cd: &CurveLocalData, e: &EigenData) -> Result<Vec<Branch3>, DesingError> {
    if cd.p11.is_zero() {
        let mut out = Vec::new();
        let denom = &cd.p21 - &cd.p10;
        if !denom.is_zero() {
            match cd.p20.scale(&rat(-1)).exact_div(&denom) {
                Some(psi) => out.push(Branch3::Chart1(BranchData { psi: vec![psi] })),
                None => {
                    return Err(DesingError::UnsupportedBranch {
                        delta: e.delta.display_with("z3"),
                        denominator: denom.display_with("z3"),
                    })
                }
            }
        } else if cd.p20.is_zero() {
            // Degenerate linear part: the origin itself is a branch.
            out.push(Branch3::Chart1(BranchData {
                psi: vec![UniPoly::zero()],
            }));
        }
        out.push(Branch3::Chart2Origin);
        return Ok(out);
    }
    let sqrt = e
        .delta_sqrt
        .clone()
        .ok_or_else(|| DesingError::UnsupportedBranch {
            delta: e.delta.display_with("z3"),
            denominator: cd.p11.scale(&rat(2)).display_with("z3"),
        })?;
    let two_p11 = cd.p11.scale(&rat(2));
    let mut out = Vec::new();
    for sign in [-1i64, 1] {
        let numerator = &(&cd.p21 - &cd.p10) + &sqrt.scale(&rat(sign));
        match numerator.exact_div(&two_p11) {
            Some(psi) => out.push(Branch3::Chart1(BranchData { psi: vec![psi] })),
            None => {
                return Err(DesingError::UnsupportedBranch {
                    delta: e.delta.display_with("z3"),
                    denominator: two_p11.display_with("z3"),
                })
            }
        }
    }
    Ok(out)
}

/// Predicted transverse eigenvalue pair along a branch after one blow-up:
/// for a first-chart branch u_2 = psi, the pair is (lambda, trace -
/// 2*lambda) with lambda = p10 + psi*p11; for the second-chart origin
/// (p11 = 0), it is (p21, p10 - p21).
pub fn post_blowup_eigen(
    cd: &CurveLocalData,
    branch: &Branch3,
) -> Result<(UniPoly, UniPoly), DesingError> {
    let trace = &cd.p10 + &cd.p21;
    match branch {
        Branch3::Chart1(b) => {
            let lambda = &cd.p10 + &(&b.psi[0] * &cd.p11);
            let second = &trace - &lambda.scale(&rat(2));
            Ok((lambda, second))
        }
        Branch3::Chart2Origin => {
            if !cd.p11.is_zero() {
                return Err(DesingError::HypothesisNotMet(
                    "second-chart origin branch needs p11 = 0".into(),
                ));
            }
            Ok((cd.p21.clone(), &cd.p10 - &cd.p21))
        }
    }
}

/// The fiber-type obstruction pattern: p10, p11, p21 identically zero,
/// p20 affine of degree one, and its root not a root of p31 — then
/// point-fiber blow-ups never reach an elementary component.
pub fn detect_ss_obstruction(cd: &CurveLocalData) -> bool {
    if !(cd.p10.is_zero() && cd.p11.is_zero() && cd.p21.is_zero()) {
        return false;
    }
    if cd.p20.degree() != Some(1) {
        return false;
    }
    let root = -cd.p20.coeff(0) / cd.p20.coeff(1);
    !cd.p31.eval(&root).is_zero()
}

/// One recorded step of a resolution run.
#[derive(Clone, Debug)]
pub struct ResolutionStep {
    pub chart_path: String,
    pub classification: Classification,
    pub case: CaseTag,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    ElementaryReached(usize),
    ObstructionSS,
    BudgetExceeded,
}

#[derive(Clone, Debug)]
pub struct ResolutionTrace {
    pub steps: Vec<ResolutionStep>,
    pub outcome: Outcome,
}

/// Advance one blow-up along a curve homeomorphic to the base: prefer
/// the first-chart origin when it stays singular, then a polynomial
/// first-chart branch with recentering, then the second-chart origin.
fn advance(cur: &VectorField, cd: &CurveLocalData, step: usize) -> Result<(VectorField, String), DesingError> {
    let c = CenterLocal::new(2);
    let e = eigen_data(cd);
    let chart1 = strict_transform(cur, &c, 1)?;
    if crate::field::assert_singular_along(&chart1.strict, &c)
        && !chart1.strict.components[..2].iter().all(|p| p.is_zero())
    {
        return Ok((chart1.strict, "chart 1, origin".into()));
    }
    let mut note = String::new();
    match branch_curves3(cd, &e) {
        Ok(branches) => {
            for b in &branches {
                match b {
                    Branch3::Chart1(bd) => {
                        match recenter_on_branch(&chart1.strict, bd) {
                            Ok(g) => {
                                return Ok((
                                    g,
                                    format!(
                                        "chart 1, branch u2 = {}",
                                        bd.psi[0].display_with("u3")
                                    ),
                                ))
                            }
                            Err(BlowupError::BranchNotSingular { .. }) => continue,
                            Err(err) => return Err(err.into()),
                        }
                    }
                    Branch3::Chart2Origin => {}
                }
            }
        }
        Err(DesingError::UnsupportedBranch { delta, denominator }) => {
            note = format!("unsupported branch (delta = {delta}, denominator = {denominator}); ");
        }
        Err(err) => return Err(err),
    }
    let chart2 = strict_transform(cur, &c, 2)?;
    if crate::field::assert_singular_along(&chart2.strict, &c)
        && !chart2.strict.components[..2].iter().all(|p| p.is_zero())
    {
        return Ok((chart2.strict, format!("{note}chart 2, origin")));
    }
    Err(DesingError::NoContinuingBranch(step))
}

/// Iterate blow-ups along curves homeomorphic to {z_1 = z_2 = 0} until
/// the Seidenberg stopping test certifies an elementary curve, the
/// fiber-type obstruction fires, or the budget runs out.
pub fn resolve_curve(f: &VectorField, budget: usize) -> Result<ResolutionTrace, DesingError> {
    let c = CenterLocal::new(2);
    let mut cur = f.clone();
    let mut steps = Vec::new();
    for step in 0..=budget {
        let cd = extract_curve_data(&cur)?;
        let e = eigen_data(&cd);
        let case = case_classify3(&e);
        let classification = classify_center(&cur, &c)?;
        let elementary = elementary_ratio_test(&e);
        let obstructed = case == CaseTag::CaseIII && detect_ss_obstruction(&cd);
        steps.push(ResolutionStep {
            chart_path: cur.chart_label.clone(),
            classification,
            case: case.clone(),
            note: String::new(),
        });
        if elementary {
            return Ok(ResolutionTrace {
                steps,
                outcome: Outcome::ElementaryReached(step),
            });
        }
        if obstructed {
            return Ok(ResolutionTrace {
                steps,
                outcome: Outcome::ObstructionSS,
            });
        }
        if step == budget {
            break;
        }
        let (next, note) = advance(&cur, &cd, step)?;
        steps.last_mut().expect("step recorded").note = note;
        cur = next;
    }
    Ok(ResolutionTrace {
        steps,
        outcome: Outcome::BudgetExceeded,
    })
}
