//! Chart-local vector fields and the classification of a coordinate-
//! subspace singular center: multiplicities, linear normalization,
//! dicriticality, type I/II/III, orders of annulment, and elementarity.

use crate::linalg::QMatrix;
use crate::poly::{rat, MultiPoly, PolyError, Rat};
use num::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// A polynomial vector field X = sum P_i d/dz_i on an affine chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub n: usize,
    pub components: Vec<MultiPoly>,
    pub projective_degree: u32,
    pub chart_label: String,
}

/// The singular center {z_1 = ... = z_d = 0} of codimension d.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CenterLocal {
    pub d: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeTag {
    TypeI,
    TypeII,
    TypeIII,
    Dicritical,
}

/// Classification data of a center: block multiplicities, dicriticality,
/// type, order of annulment on the exceptional divisor, and the order
/// fed to the kernel invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub m_prime: u32,
    pub m_min: u32,
    pub dicritical: bool,
    pub type_tag: TypeTag,
    pub ell: u32,
    pub ell_kernel: u32,
}

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("degenerate field: {context}")]
    DegenerateField { context: String },
    #[error("no admissible linear change after {tried} seeds; failing check: {failed}")]
    SeedExhausted { tried: u32, failed: String },
    #[error("the field is not singular along the center")]
    NotSingularAlongCenter,
    #[error("chart index {chart} out of range 1..={d}")]
    ChartOutOfRange { chart: usize, d: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl VectorField {
    pub fn new(
        n: usize,
        components: Vec<MultiPoly>,
        projective_degree: u32,
        chart_label: impl Into<String>,
    ) -> Self {
        assert_eq!(components.len(), n);
        assert!(components.iter().all(|p| p.num_vars() == n));
        assert!(
            components.iter().any(|p| !p.is_zero()),
            "all components vanish identically"
        );
        VectorField {
            n,
            components,
            projective_degree,
            chart_label: chart_label.into(),
        }
    }

    /// Parse components from strings; convenience for tests and the CLI.
    pub fn parse(
        n: usize,
        components: &[&str],
        projective_degree: u32,
        chart_label: &str,
    ) -> Result<Self, PolyError> {
        let comps = components
            .iter()
            .map(|s| MultiPoly::parse(s, n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VectorField::new(n, comps, projective_degree, chart_label))
    }
}

impl CenterLocal {
    pub fn new(d: usize) -> Self {
        assert!(d >= 2, "centers have codimension at least 2");
        CenterLocal { d }
    }
}

/// True iff every component vanishes on the center, i.e. the center sits
/// inside the singular set of the field.
pub fn assert_singular_along(f: &VectorField, c: &CenterLocal) -> bool {
    assert!(c.d <= f.n);
    f.components
        .iter()
        .all(|p| p.vanish_order(c.d).map_or(true, |o| o >= 1))
}

/// Per-component vanishing orders along the center, with the block minima
/// m_prime (first d components) and m_min (all components).
pub fn multiplicities(
    f: &VectorField,
    c: &CenterLocal,
) -> Result<(u32, u32, Vec<Option<u32>>), FieldError> {
    let orders: Vec<Option<u32>> = f
        .components
        .iter()
        .map(|p| p.vanish_order(c.d))
        .collect();
    let m_prime = orders[..c.d]
        .iter()
        .flatten()
        .min()
        .copied()
        .ok_or_else(|| FieldError::DegenerateField {
            context: "the first d components all vanish identically".into(),
        })?;
    let m_min = orders
        .iter()
        .flatten()
        .min()
        .copied()
        .expect("some component is nonzero");
    Ok((m_prime, m_min, orders))
}

/// Linear forms z_i = sum_j m[i][j] w_j as polynomial images.
fn linear_images(m: &QMatrix) -> Vec<MultiPoly> {
    let n = m.n;
    (0..n)
        .map(|i| {
            let mut p = MultiPoly::zero(n);
            for (j, coeff) in m.rows[i].iter().enumerate() {
                if !coeff.is_zero() {
                    p = &p + &MultiPoly::var(n, j).scale(coeff);
                }
            }
            p
        })
        .collect()
}

/// Apply the invertible linear change w = A z to the field: the new
/// components are (A P)(A^{-1} w). Preserves the center when A is block
/// lower-triangular with respect to the split at d.
fn apply_linear(f: &VectorField, a: &QMatrix, a_inv: &QMatrix) -> Result<VectorField, FieldError> {
    let images = linear_images(a_inv);
    let composed: Vec<MultiPoly> = f
        .components
        .iter()
        .map(|p| p.substitute(&images))
        .collect::<Result<_, _>>()?;
    let components = (0..f.n)
        .map(|i| {
            let mut acc = MultiPoly::zero(f.n);
            for (j, pj) in composed.iter().enumerate() {
                if !a.rows[i][j].is_zero() {
                    acc = &acc + &pj.scale(&a.rows[i][j]);
                }
            }
            acc
        })
        .collect();
    Ok(VectorField {
        n: f.n,
        components,
        projective_degree: f.projective_degree,
        chart_label: f.chart_label.clone(),
    })
}

/// Draw a random block lower-triangular matrix with small rational entries.
fn random_block_matrix(n: usize, d: usize, rng: &mut ChaCha8Rng) -> QMatrix {
    let mut rows = vec![vec![Rat::zero(); n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        let cols = if i < d { d } else { n };
        for (_j, slot) in row.iter_mut().enumerate().take(cols) {
            *slot = rat(rng.gen_range(-4i64..=4));
        }
    }
    QMatrix::from_rows(rows)
}

/// Find a center-preserving linear change after which the first d
/// components all have order m_prime and the rest all have order m_min,
/// certified by recomputing the orders. The identity is tried first.
pub fn normalize_linear(
    f: &VectorField,
    c: &CenterLocal,
    seed: u64,
) -> Result<VectorField, FieldError> {
    let (m_prime, m_min, _) = multiplicities(f, c)?;
    let target_ok = |g: &VectorField| {
        g.components.iter().enumerate().all(|(i, p)| {
            let want = if i < c.d { m_prime } else { m_min };
            p.vanish_order(c.d) == Some(want)
        })
    };
    if target_ok(f) {
        return Ok(f.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_failure = String::new();
    for _ in 0..32 {
        let a = random_block_matrix(f.n, c.d, &mut rng);
        let a_inv = match a.inverse() {
            Some(inv) => inv,
            None => {
                last_failure = "singular candidate matrix".into();
                continue;
            }
        };
        let g = apply_linear(f, &a, &a_inv)?;
        if target_ok(&g) {
            // A center-preserving change cannot move the block minima.
            let (mp2, mm2, _) = multiplicities(&g, c)?;
            assert_eq!((mp2, mm2), (m_prime, m_min));
            return Ok(g);
        }
        last_failure = format!(
            "orders {:?} instead of ({m_prime} x{}, {m_min} x{})",
            g.components
                .iter()
                .map(|p| p.vanish_order(c.d))
                .collect::<Vec<_>>(),
            c.d,
            f.n - c.d
        );
    }
    Err(FieldError::SeedExhausted {
        tried: 32,
        failed: last_failure,
    })
}

/// The d x d Jacobian block [dP_i/dz_j] restricted to the center, so the
/// entries are polynomials in z_{d+1}..z_n only.
pub fn jacobian_block(f: &VectorField, c: &CenterLocal) -> Vec<Vec<MultiPoly>> {
    let zeroed: Vec<usize> = (0..c.d).collect();
    (0..c.d)
        .map(|i| {
            (0..c.d)
                .map(|j| f.components[i].derivative(j).restrict_zero(&zeroed))
                .collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementaryVerdict {
    Elementary,
    NonElementary,
}

/// Characteristic-polynomial coefficients c_1..c_d of a polynomial matrix
/// (sums of principal minors, signs dropped since only vanishing matters).
fn principal_minor_sums(m: &[Vec<MultiPoly>]) -> Vec<MultiPoly> {
    let d = m.len();
    let n = m[0][0].num_vars();
    (1..=d)
        .map(|k| {
            let mut acc = MultiPoly::zero(n);
            for subset in subsets(d, k) {
                acc = &acc + &minor_det(m, &subset);
            }
            acc
        })
        .collect()
}

fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    rec(0, d, k, &mut cur, &mut out);
    out
}

/// Determinant of the principal submatrix on the given rows/columns, by
/// cofactor expansion (d is tiny).
fn minor_det(m: &[Vec<MultiPoly>], idx: &[usize]) -> MultiPoly {
    let n = m[0][0].num_vars();
    if idx.is_empty() {
        return MultiPoly::one(n);
    }
    let mut acc = MultiPoly::zero(n);
    let rest: Vec<usize> = idx[1..].to_vec();
    for (pos, &col) in idx.iter().enumerate() {
        let sub_cols: Vec<usize> = idx.iter().copied().filter(|&c| c != col).collect();
        let sub = minor_det_rows(m, &rest, &sub_cols);
        let term = &m[idx[0]][col] * &sub;
        if pos % 2 == 0 {
            acc = &acc + &term;
        } else {
            acc = &acc - &term;
        }
    }
    acc
}

fn minor_det_rows(m: &[Vec<MultiPoly>], rows: &[usize], cols: &[usize]) -> MultiPoly {
    let n = m[0][0].num_vars();
    if rows.is_empty() {
        return MultiPoly::one(n);
    }
    let mut acc = MultiPoly::zero(n);
    let rest: Vec<usize> = rows[1..].to_vec();
    for (pos, &col) in cols.iter().enumerate() {
        let sub_cols: Vec<usize> = cols.iter().copied().filter(|&c| c != col).collect();
        let term = &m[rows[0]][col] * &minor_det_rows(m, &rest, &sub_cols);
        if pos % 2 == 0 {
            acc = &acc + &term;
        } else {
            acc = &acc - &term;
        }
    }
    acc
}

/// Elementary iff the transverse linear part has a not-identically-zero
/// eigenvalue: some characteristic coefficient of the Jacobian block is
/// nonzero along the center.
pub fn is_elementary(f: &VectorField, c: &CenterLocal) -> ElementaryVerdict {
    let block = jacobian_block(f, c);
    if principal_minor_sums(&block).iter().any(|p| !p.is_zero()) {
        ElementaryVerdict::Elementary
    } else {
        ElementaryVerdict::NonElementary
    }
}

/// Leading parts in the first blow-up chart: Q_i = (P_i(sigma_1(u)) /
/// u_1^{m_prime}) restricted to u_1 = 0, for the first-block components.
fn chart1_leading_parts(
    f: &VectorField,
    c: &CenterLocal,
    m_prime: u32,
) -> Result<Vec<MultiPoly>, FieldError> {
    let n = f.n;
    let sigma: Vec<MultiPoly> = (0..n)
        .map(|i| {
            if i == 0 {
                MultiPoly::var(n, 0)
            } else if i < c.d {
                &MultiPoly::var(n, 0) * &MultiPoly::var(n, i)
            } else {
                MultiPoly::var(n, i)
            }
        })
        .collect();
    let mut out = Vec::with_capacity(c.d);
    for p in &f.components[..c.d] {
        let pulled = p.substitute(&sigma)?;
        let led = pulled.divide_monomial_power(0, m_prime)?.restrict_zero(&[0]);
        out.push(led);
    }
    Ok(out)
}

/// Specialness certificate: type I and every transverse leading-part
/// difference G_j = Q_j - u_j Q_1 not identically zero, where Q_i is the
/// first-chart leading part of component i at its own vanishing order.
pub fn is_special(f: &VectorField, c: &CenterLocal) -> Result<bool, FieldError> {
    let cls = classify_center(f, c)?;
    if cls.type_tag != TypeTag::TypeI {
        return Ok(false);
    }
    let n = f.n;
    let sigma: Vec<MultiPoly> = (0..n)
        .map(|i| {
            if i == 0 {
                MultiPoly::var(n, 0)
            } else if i < c.d {
                &MultiPoly::var(n, 0) * &MultiPoly::var(n, i)
            } else {
                MultiPoly::var(n, i)
            }
        })
        .collect();
    let mut leading = Vec::with_capacity(c.d);
    for p in &f.components[..c.d] {
        let pulled = p.substitute(&sigma)?;
        let order = match pulled.vanish_order_var(0) {
            Some(o) => o,
            None => return Ok(false),
        };
        leading.push(pulled.divide_monomial_power(0, order)?.restrict_zero(&[0]));
    }
    Ok((1..c.d).all(|j| {
        let g = &leading[j] - &(&MultiPoly::var(n, j) * &leading[0]);
        !g.is_zero()
    }))
}

/// Classify a normalized singular center: type tag, dicriticality, order
/// of annulment, and the order passed to the kernel invariant.
pub fn classify_center(f: &VectorField, c: &CenterLocal) -> Result<Classification, FieldError> {
    if !assert_singular_along(f, c) {
        return Err(FieldError::NotSingularAlongCenter);
    }
    let (m_prime, m_min, _) = multiplicities(f, c)?;
    let (type_tag, dicritical) = if m_min + 1 < m_prime {
        (TypeTag::TypeII, false)
    } else if m_min + 1 == m_prime {
        (TypeTag::TypeI, false)
    } else {
        let q = chart1_leading_parts(f, c, m_prime)?;
        let all_tangent = (1..c.d).all(|i| {
            let g = &q[i] - &(&MultiPoly::var(f.n, i) * &q[0]);
            g.is_zero()
        });
        if all_tangent {
            (TypeTag::Dicritical, true)
        } else {
            (TypeTag::TypeIII, false)
        }
    };
    let ell = if dicritical {
        m_prime
    } else {
        (m_prime - 1).min(m_min)
    };
    let ell_kernel = if dicritical { ell - 1 } else { ell };
    let cls = Classification {
        m_prime,
        m_min,
        dicritical,
        type_tag,
        ell,
        ell_kernel,
    };
    debug_assert!(cls.m_min <= cls.m_prime);
    Ok(cls)
}
