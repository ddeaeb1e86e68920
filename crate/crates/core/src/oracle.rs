//! Brute-force cross-checks: local Milnor numbers at isolated points by
//! truncated-quotient linear algebra, and the order-prescribed
//! deformation builder for fields singular along a coordinate center.

use crate::field::{
    assert_singular_along, classify_center, is_special, CenterLocal, FieldError, VectorField,
};
use crate::poly::{ratio, Monomial, MultiPoly, PolyError, Rat};
use num::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

/// Result of a stabilized truncated-quotient dimension count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacaulayReport {
    pub mu: u64,
    pub stabilized_at: u32,
    pub certificate: bool,
}

/// A one-parameter deformation F + t Y with prescribed vanishing orders
/// of Y along the center.
#[derive(Clone, Debug)]
pub struct DeformationSpec {
    pub base: VectorField,
    pub perturbation: VectorField,
    pub targets: Vec<u32>,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("components must vanish at the origin")]
    NotAtOrigin,
    #[error("dimension not stabilized by degree {max_degree}; partial dimension {partial}")]
    NotStabilized { max_degree: u32, partial: u64 },
    #[error("non-isolated singularity: dimension grows linearly through degree {degree}")]
    NotIsolated { degree: u32 },
    #[error("no admissible perturbation after {tried} seeds; failing check: {failed}")]
    SeedExhausted { tried: u32, failed: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl DeformationSpec {
    /// The deformed field at a given parameter value t.
    pub fn deformed(&self, t: &Rat) -> VectorField {
        let comps = self
            .base
            .components
            .iter()
            .zip(&self.perturbation.components)
            .map(|(p, y)| p + &y.scale(t))
            .collect();
        VectorField::new(
            self.base.n,
            comps,
            self.base.projective_degree,
            format!("{} deformed", self.base.chart_label),
        )
    }
}

/// All monomials in `n` variables of total degree exactly `deg`.
pub fn monomials_of_degree(n: usize, deg: u32) -> Vec<Monomial> {
    fn rec(exps: &mut Vec<u16>, rem: u32, pos: usize, n: usize, out: &mut Vec<Monomial>) {
        if pos == n - 1 {
            exps.push(rem as u16);
            out.push(Monomial(exps.clone()));
            exps.pop();
            return;
        }
        for e in 0..=rem {
            exps.push(e as u16);
            rec(exps, rem - e, pos + 1, n, out);
            exps.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), deg, 0, n, &mut out);
    out
}

fn count_monomials_up_to(n: usize, deg: u32) -> u64 {
    // C(n + deg, n).
    let mut num: u64 = 1;
    let mut den: u64 = 1;
    for i in 1..=n as u64 {
        num *= deg as u64 + i;
        den *= i;
    }
    num / den
}

/// Sparse row echelon keyed by the graded-lex lowest monomial of each row.
struct Echelon {
    pivots: BTreeMap<Monomial, BTreeMap<Monomial, Rat>>,
}

impl Echelon {
    fn new() -> Self {
        Echelon {
            pivots: BTreeMap::new(),
        }
    }

    fn insert(&mut self, mut row: BTreeMap<Monomial, Rat>) {
        loop {
            let Some((m, c)) = row.first_key_value() else {
                return;
            };
            let (m, c) = (m.clone(), c.clone());
            let Some(pivot) = self.pivots.get(&m) else {
                let inv = c.recip();
                let mut norm = BTreeMap::new();
                for (k, v) in row {
                    norm.insert(k, v * &inv);
                }
                self.pivots.insert(m, norm);
                return;
            };
            for (k, v) in pivot.clone() {
                let entry = row.entry(k).or_insert_with(Rat::zero);
                *entry -= &c * &v;
                if entry.is_zero() {
                    // Keep rows sparse; the pivot entry always cancels.
                }
            }
            row.retain(|_, v| !v.is_zero());
        }
    }
}

fn truncated_product(p: &MultiPoly, m: &Monomial, max_deg: u32) -> BTreeMap<Monomial, Rat> {
    let mut row = BTreeMap::new();
    for (mm, c) in p.terms() {
        let prod = mm.mul(m);
        if prod.total_degree() <= max_deg {
            row.insert(prod, c.clone());
        }
    }
    row
}

/// Dimension of the local quotient algebra at the origin by truncation:
/// at each degree D, eliminate all multiples of the components truncated
/// to degree D and count the surviving standard monomials. Stabilization
/// requires the count to repeat and every degree-D monomial to reduce
/// into the ideal's span.
pub fn local_milnor(components: &[MultiPoly], max_degree: u32) -> Result<MacaulayReport, OracleError> {
    let n = components[0].num_vars();
    assert!(components.len() == n, "square system expected");
    for p in components {
        if !p.coeff(&vec![0u16; n]).is_zero() {
            return Err(OracleError::NotAtOrigin);
        }
    }
    let mut dims: Vec<u64> = vec![1]; // Degree 0: only the constant survives.
    for degree in 1..=max_degree {
        let mut ech = Echelon::new();
        for p in components {
            let Some(order) = p.terms().map(|(m, _)| m.total_degree()).min() else {
                continue;
            };
            if order > degree {
                continue;
            }
            for d in 0..=(degree - order) {
                for m in monomials_of_degree(n, d) {
                    ech.insert(truncated_product(p, &m, degree));
                }
            }
        }
        let dim = count_monomials_up_to(n, degree) - ech.pivots.len() as u64;
        let certificate = monomials_of_degree(n, degree)
            .into_iter()
            .all(|m| ech.pivots.contains_key(&m));
        let prev = *dims.last().expect("seeded with degree zero");
        dims.push(dim);
        if dim == prev && certificate {
            return Ok(MacaulayReport {
                mu: dim,
                stabilized_at: degree,
                certificate,
            });
        }
        let k = dims.len();
        if k >= 4 {
            let d1 = dims[k - 1] - dims[k - 2];
            let d2 = dims[k - 2] - dims[k - 3];
            let d3 = dims[k - 3] - dims[k - 4];
            if d1 > 0 && d1 == d2 && d2 == d3 {
                return Err(OracleError::NotIsolated { degree });
            }
        }
    }
    Err(OracleError::NotStabilized {
        max_degree,
        partial: *dims.last().expect("at least degree zero"),
    })
}

/// Random-coefficient polynomial of vanishing order exactly `q` along
/// the first-d-coordinate center: every degree-q monomial in z_1..z_d
/// with a nonzero rational coefficient.
fn order_exact_poly(n: usize, d: usize, q: u32, rng: &mut ChaCha8Rng) -> MultiPoly {
    let mut out = MultiPoly::zero(n);
    for m in monomials_of_degree(d, q) {
        let mut exps = vec![0u16; n];
        exps[..d].copy_from_slice(&m.0);
        let num = rng.gen_range(1..=4i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let den = rng.gen_range(1..=3i64);
        out.add_term(Monomial(exps), ratio(num, den));
    }
    out
}

/// Build a one-parameter deformation F + t Y whose perturbation has
/// vanishing orders 1 + l on the first block and l on the rest, where l
/// is the kernel order of the center. The construction is certified:
/// exact orders, preserved degree bound, and — when the second-block
/// targets are positive — specialness of the deformed field,
/// checked at two parameter values (the deformed coefficients are affine
/// in t, so vanishing at two values is identical vanishing and
/// non-vanishing at one value is generic non-vanishing).
pub fn build_deformation(
    f: &VectorField,
    c: &CenterLocal,
    seed: u64,
) -> Result<DeformationSpec, OracleError> {
    let cls = classify_center(f, c)?;
    let ell = cls.ell_kernel;
    let targets: Vec<u32> = (0..f.n)
        .map(|i| if i < c.d { 1 + ell } else { ell })
        .collect();
    let deg_bound = f
        .components
        .iter()
        .filter_map(|p| p.total_degree())
        .max()
        .expect("nonzero field");
    let mut failed = String::new();
    const TRIES: u32 = 32;
    'seeds: for attempt in 0..TRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let comps: Vec<MultiPoly> = targets
            .iter()
            .map(|&q| order_exact_poly(f.n, c.d, q, &mut rng))
            .collect();
        for (y, &q) in comps.iter().zip(&targets) {
            if y.vanish_order(c.d) != Some(q) {
                failed = format!("exact vanishing order {q}");
                continue 'seeds;
            }
            if y.total_degree().map_or(false, |dy| dy > deg_bound) {
                failed = "degree preservation".into();
                continue 'seeds;
            }
        }
        let spec = DeformationSpec {
            base: f.clone(),
            perturbation: VectorField::new(f.n, comps, f.projective_degree, "perturbation"),
            targets: targets.clone(),
            seed: seed.wrapping_add(attempt as u64),
        };
        if ell > 0 {
            let special_at_two = [1i64, 2].iter().all(|&t| {
                let ft = spec.deformed(&ratio(t, 1));
                assert_singular_along(&ft, c) && is_special(&ft, c).unwrap_or(false)
            });
            if !special_at_two {
                failed = "specialness of the deformed field".into();
                continue 'seeds;
            }
        } else {
            // Zero second-block targets: the perturbation has constant
            // second-block terms, so the center must leave the singular
            // set while staying invariant.
            let ft = spec.deformed(&ratio(1, 1));
            let tangent = ft.components[..c.d]
                .iter()
                .all(|p| p.vanish_order(c.d).map_or(true, |o| o >= 1));
            if !tangent || assert_singular_along(&ft, c) {
                failed = "invariance of the order-one center".into();
                continue 'seeds;
            }
        }
        return Ok(spec);
    }
    Err(OracleError::SeedExhausted {
        tried: TRIES,
        failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn polys(n: usize, comps: &[&str]) -> Vec<MultiPoly> {
        comps
            .iter()
            .map(|s| MultiPoly::parse(s, n).unwrap())
            .collect()
    }

    fn mu(n: usize, comps: &[&str], max_degree: u32) -> u64 {
        let r = local_milnor(&polys(n, comps), max_degree).unwrap();
        assert!(r.certificate);
        r.mu
    }

    #[test]
    fn nondegenerate_point() {
        assert_eq!(mu(3, &["z1", "z2", "z3"], 4), 1);
    }

    #[test]
    fn squares_of_coordinates() {
        assert_eq!(mu(3, &["z1^2", "z2^2", "z3^2"], 8), 8);
    }

    #[test]
    fn staircase_instances() {
        assert_eq!(mu(3, &["z1^3", "z2^2", "z3^2"], 10), 12);
        assert_eq!(mu(3, &["z1^2+z2^2", "z2^3", "z3^2"], 10), 12);
        assert_eq!(mu(3, &["z1^2-z2^3", "z2^2-z1^3", "z3"], 10), 4);
        assert_eq!(mu(3, &["z1*z2", "z1^2+z2^2", "z3^2"], 10), 8);
        assert_eq!(mu(3, &["z1^2+z2^3", "z2^2", "z3"], 10), 4);
    }

    #[test]
    fn monomial_product_rule_up_to_degree_six() {
        for a in 1u32..=3 {
            for b in 1u32..=3 {
                for c in 1u32..=3 {
                    if a + b + c > 6 {
                        continue;
                    }
                    let comps = [
                        format!("z1^{a}"),
                        format!("z2^{b}"),
                        format!("z3^{c}"),
                    ];
                    let refs: Vec<&str> = comps.iter().map(|s| s.as_str()).collect();
                    assert_eq!(mu(3, &refs, a + b + c + 2), (a * b * c) as u64);
                }
            }
        }
    }

    #[test]
    fn curve_singularity_detected() {
        assert!(matches!(
            local_milnor(&polys(3, &["z1^2", "z1*z2", "z2^2"]), 10),
            Err(OracleError::NotIsolated { .. })
        ));
    }

    #[test]
    fn stabilization_budget_reported() {
        assert!(matches!(
            local_milnor(&polys(3, &["z1^2", "z2^2", "z3^2"]), 2),
            Err(OracleError::NotStabilized { max_degree: 2, .. })
        ));
    }

    #[test]
    fn origin_precondition() {
        assert!(matches!(
            local_milnor(&polys(3, &["z1+1", "z2", "z3"]), 4),
            Err(OracleError::NotAtOrigin)
        ));
    }

    fn vf(n: usize, comps: &[&str]) -> VectorField {
        VectorField::parse(n, comps, 3, "test").unwrap()
    }

    #[test]
    fn deformation_of_dicritical_field_drops_order() {
        // Degree-three dicritical field: quadratic part tangent to the
        // radial field on the first block.
        let f = vf(
            3,
            &["z1^2+z1*z2+z1^3", "z1*z2+z2^2+z2^3", "z3*z1^2+z2^2"],
        );
        let c = CenterLocal::new(2);
        let cls = classify_center(&f, &c).unwrap();
        assert!(cls.dicritical);
        assert_eq!((cls.ell, cls.ell_kernel), (2, 1));
        let spec = build_deformation(&f, &c, 0).unwrap();
        assert_eq!(spec.targets, vec![2, 2, 1]);
        let ft = spec.deformed(&rat(1));
        let cls_t = classify_center(&ft, &c).unwrap();
        assert_eq!(cls_t.ell, 1);
        assert!(!cls_t.dicritical);
        assert!(is_special(&ft, &c).unwrap());
    }

    #[test]
    fn deformation_is_special_when_multiplicity_at_least_two() {
        let f = vf(3, &["z1^2", "z2^2", "z1*z2+z1^3"]);
        let c = CenterLocal::new(2);
        let cls = classify_center(&f, &c).unwrap();
        assert!(cls.m_min >= 2);
        let spec = build_deformation(&f, &c, 7).unwrap();
        for t in [rat(1), rat(3), ratio(-1, 2)] {
            let ft = spec.deformed(&t);
            assert!(assert_singular_along(&ft, &c));
            assert!(is_special(&ft, &c).unwrap());
        }
    }

    #[test]
    fn deformation_of_order_one_center_makes_it_invariant() {
        // Multiplicity-one center: the perturbation has constant
        // second-block terms, so the center leaves the singular set but
        // stays invariant.
        let f = vf(3, &["z1^2", "-2*z1*z2+z1*z3", "-3*z1+z2-5*z1*z3"]);
        let c = CenterLocal::new(2);
        let spec = build_deformation(&f, &c, 0).unwrap();
        assert_eq!(spec.targets, vec![1, 1, 0]);
        let ft = spec.deformed(&rat(1));
        assert!(!assert_singular_along(&ft, &c));
        for p in &ft.components[..2] {
            assert!(p.vanish_order(2).map_or(true, |o| o >= 1));
        }
    }

    #[test]
    fn deformation_keeps_nondicritical_order() {
        let f = vf(3, &["z1^2", "z2^2", "z1"]);
        let c = CenterLocal::new(2);
        let cls = classify_center(&f, &c).unwrap();
        assert!(!cls.dicritical);
        assert_eq!(cls.ell, 1);
        let spec = build_deformation(&f, &c, 0).unwrap();
        let cls_t = classify_center(&spec.deformed(&rat(1)), &c).unwrap();
        assert_eq!(cls_t.ell, 1);
    }

    #[test]
    fn deformation_preserves_degree_bound() {
        let f = vf(3, &["z1^2+z1*z2+z1^3", "z1*z2+z2^2+z2^3", "z3*z1^2+z2^2"]);
        let c = CenterLocal::new(2);
        let spec = build_deformation(&f, &c, 0).unwrap();
        let bound = f
            .components
            .iter()
            .filter_map(|p| p.total_degree())
            .max()
            .unwrap();
        let ft = spec.deformed(&rat(1));
        let bound_t = ft
            .components
            .iter()
            .filter_map(|p| p.total_degree())
            .max()
            .unwrap();
        assert!(bound_t <= bound);
    }
}
