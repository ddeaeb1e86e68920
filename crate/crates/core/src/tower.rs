//! Blow-up tower ledger for a smooth curve W in P^n: exact Chern-integral
//! recursions along the tower, the singularity counts on each exceptional
//! divisor and on the total space, the Milnor numbers along the tower,
//! and the maximum-blow-up bound from the integrality argument.

use crate::poly::Rat;
use num::{BigInt, One, ToPrimitive, Zero};
use thiserror::Error;

/// State of a tower over a curve: ambient dimension, foliation degree,
/// curve degree, Euler characteristic, Lambda_0 = (n+1)deg - chi, and the
/// orders of annulment ell_1..ell_j collected so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerState {
    pub n: usize,
    pub k: i128,
    pub deg_w: i128,
    pub chi: i128,
    pub lambda0: i128,
    pub ells: Vec<i128>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TowerError {
    #[error("tower index {j} out of range (length {len})")]
    IndexOutOfRange { j: usize, len: usize },
    #[error("non-integer result in {context}: {value}")]
    NonIntegerResult { context: String, value: String },
    #[error("lambda0 = 0: the divisibility bound degenerates")]
    ZeroLambda,
    #[error("the literal-ell_j variant needs j >= 1")]
    LiteralVariantAtBase,
    #[error("inconsistent tower data: lambda0 != (n+1)deg - chi")]
    BadLambda,
}

/// Which reading of the ambiguous exponent factor in the Milnor formula
/// along the tower to use. `EllNext` is the default (the only reading
/// consistent with the base case j = 0); `LiteralEllJ` follows the
/// theorem display verbatim for comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EllVariant {
    EllNext,
    LiteralEllJ,
}

/// Exact Chern integrals at level j of a tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernIntegrals {
    /// Integral of zeta_j^(n-1) over E_j: (-1)^n Lambda0/(n-1)^(j-1).
    pub zeta_top: Rat,
    /// Integral of E_j over W_j: Lambda0/(n-1)^j.
    pub e_on_w: Rat,
    /// Integral of c1(T_M_j) over W_j: chi + Lambda0/(n-1)^j.
    pub c1_tm: Rat,
    /// Integral of c1(T*_F_j) over W_j:
    /// (k-1)deg - Lambda0 sum_{i<=j} ell_i/(n-1)^i.
    pub c1_tf_star: Rat,
}

fn big(v: i128) -> Rat {
    Rat::from(BigInt::from(v))
}

/// (base)^e as an exact rational, allowing negative exponents.
fn rpow(base: i128, e: i64) -> Rat {
    let b = big(base);
    if e >= 0 {
        let mut acc = Rat::one();
        for _ in 0..e {
            acc *= &b;
        }
        acc
    } else {
        Rat::one() / rpow(base, -e)
    }
}

fn to_integer(v: &Rat, context: &str) -> Result<i128, TowerError> {
    if !v.is_integer() {
        return Err(TowerError::NonIntegerResult {
            context: context.to_string(),
            value: v.to_string(),
        });
    }
    Ok(v.to_integer().to_i128().expect("value fits i128"))
}

impl TowerState {
    pub fn new(
        n: usize,
        k: i128,
        deg_w: i128,
        chi: i128,
        ells: Vec<i128>,
    ) -> Result<Self, TowerError> {
        let lambda0 = (n as i128 + 1) * deg_w - chi;
        Ok(TowerState {
            n,
            k,
            deg_w,
            chi,
            lambda0,
            ells,
        })
    }

    /// sum_{i=1}^{j} ell_i/(n-1)^i (empty ranges vanish).
    fn ell_correction(&self, j: usize) -> Rat {
        let mut acc = Rat::zero();
        for (i, &ell) in self.ells.iter().enumerate().take(j) {
            acc += big(ell) * rpow(self.n as i128 - 1, -(i as i64 + 1));
        }
        acc
    }
}

/// Exact Chern integrals at level j, computed from the closed forms and
/// re-derived through the step recursions, which must agree.
pub fn chern_integrals(t: &TowerState, j: usize) -> Result<ChernIntegrals, TowerError> {
    if j > t.ells.len() {
        return Err(TowerError::IndexOutOfRange {
            j,
            len: t.ells.len(),
        });
    }
    let n = t.n as i128;
    let sign = if t.n % 2 == 1 { -Rat::one() } else { Rat::one() };
    let closed = ChernIntegrals {
        zeta_top: sign * big(t.lambda0) * rpow(n - 1, -(j as i64 - 1)),
        e_on_w: big(t.lambda0) * rpow(n - 1, -(j as i64)),
        c1_tm: big(t.chi) + big(t.lambda0) * rpow(n - 1, -(j as i64)),
        c1_tf_star: big(t.k - 1) * big(t.deg_w) - big(t.lambda0) * t.ell_correction(j),
    };
    // Step recursion: c1(N_j) = c1(N_{j-1}) - (n-2) E_j with E_j picked up
    // from the previous normal degree divided by chi(P^(n-2)) = n-1, and
    // c1(T*_F) losing ell_j E_j per step.
    let mut normal = big(t.lambda0);
    let mut e_on_w = big(t.lambda0) * rpow(n - 1, 0); // level-0 placeholder
    let mut tf = big(t.k - 1) * big(t.deg_w);
    for step in 0..j {
        e_on_w = &normal / big(n - 1);
        normal = &normal - &(big(n - 2) * &e_on_w);
        tf = &tf - &(big(t.ells[step]) * &e_on_w);
    }
    if j > 0 {
        assert_eq!(e_on_w, closed.e_on_w, "divisor self-intersection recursion");
    }
    assert_eq!(&big(t.chi) + &normal, closed.c1_tm, "tangent recursion");
    assert_eq!(tf, closed.c1_tf_star, "cotangent-along-leaves recursion");
    Ok(closed)
}

/// Count of singularities of F_j on the exceptional divisor E_j.
pub fn n_on_divisor(t: &TowerState, j: usize) -> Result<i128, TowerError> {
    if j < 1 || j > t.ells.len() {
        return Err(TowerError::IndexOutOfRange {
            j,
            len: t.ells.len(),
        });
    }
    let n = t.n as i128;
    let ell = t.ells[j - 1];
    let geom: i128 = (0..=(t.n - 2) as u32).map(|i| (ell + 1).pow(i)).sum();
    let value = big(t.chi) * big(geom)
        - big(ell) * big((1 + ell).pow((t.n - 2) as u32)) * big(t.lambda0)
            * rpow(n - 1, -(j as i64 - 1))
        + big(n - 1)
            * big((ell + 1).pow((t.n - 2) as u32))
            * (big(t.k - 1) * big(t.deg_w) - big(t.lambda0) * t.ell_correction(j - 1));
    to_integer(&value, "n_on_divisor")
}

/// The per-step increment eta_m of the total singularity count.
pub fn eta(t: &TowerState, m: usize) -> Result<i128, TowerError> {
    if m < 1 || m > t.ells.len() {
        return Err(TowerError::IndexOutOfRange {
            j: m,
            len: t.ells.len(),
        });
    }
    let n = t.n as i128;
    let ell = t.ells[m - 1];
    let geom: i128 = (0..=(t.n - 2) as u32).map(|i| (1 + ell).pow(i)).sum();
    let pow_n2 = big((1 + ell).pow((t.n - 2) as u32));
    let value = big(t.chi) * (big(geom) - big((1 + ell).pow((t.n - 1) as u32)))
        + &pow_n2 * big(ell * ell - ell) * big(t.lambda0) * rpow(n - 1, -(m as i64 - 1))
        - &pow_n2
            * big(n * ell - n + 2)
            * (big(t.k - 1) * big(t.deg_w) - big(t.lambda0) * t.ell_correction(m - 1));
    to_integer(&value, "eta")
}

/// Total singularity count of F_j on M_j: sum k^i plus the eta increments.
pub fn n_total(t: &TowerState, j: usize) -> Result<i128, TowerError> {
    let mut acc = crate::nu::power_sum(t.k, t.n);
    for m in 1..=j {
        acc += eta(t, m)?;
    }
    Ok(acc)
}

/// Milnor number of F_j along W_j, given the next order of annulment and
/// the embedded-point count at level j.
pub fn mu_along(
    t: &TowerState,
    j: usize,
    ell_next: i128,
    n_embedded: i128,
    variant: EllVariant,
) -> Result<i128, TowerError> {
    let n = t.n as i128;
    let third_base = match variant {
        EllVariant::EllNext => 1 + ell_next,
        EllVariant::LiteralEllJ => {
            if j == 0 {
                return Err(TowerError::LiteralVariantAtBase);
            }
            1 + t.ells[j - 1]
        }
    };
    let value = big(t.chi) * big((1 + ell_next).pow((t.n - 1) as u32))
        - big(ell_next * ell_next)
            * big((1 + ell_next).pow((t.n - 2) as u32))
            * big(t.lambda0)
            * rpow(n - 1, -(j as i64))
        + big(n * ell_next + 1)
            * big(third_base.pow((t.n - 2) as u32))
            * (big(t.k - 1) * big(t.deg_w) - big(t.lambda0) * t.ell_correction(j))
        + big(n_embedded);
    to_integer(&value, "mu_along")
}

/// Milnor number after the next blow-up, from the level-j value: the delta
/// is exactly eta_{j+1}, so the tower must already know ell_{j+1}.
pub fn mu_next(t: &TowerState, j: usize, mu_j: i128) -> Result<i128, TowerError> {
    if j + 1 > t.ells.len() {
        return Err(TowerError::IndexOutOfRange {
            j: j + 1,
            len: t.ells.len(),
        });
    }
    let n = t.n as i128;
    let ell = t.ells[j];
    let geom: i128 = (0..=(t.n - 2) as u32).map(|i| (1 + ell).pow(i)).sum();
    let pow_n2 = big((1 + ell).pow((t.n - 2) as u32));
    let delta = big(t.chi) * (big(geom) - big((1 + ell).pow((t.n - 1) as u32)))
        + big(ell * ell - ell) * &pow_n2 * big(t.lambda0) * rpow(n - 1, -(j as i64))
        - big(n * ell - n + 2)
            * &pow_n2
            * (big(t.k - 1) * big(t.deg_w) - big(t.lambda0) * t.ell_correction(j));
    let value = big(mu_j) + delta;
    to_integer(&value, "mu_next")
}

/// Maximum number of blow-ups bound: the sum over ell = 1..ell1 of the
/// floor of log base (n-1) of ell(1+ell)^(n-2)(1+2ell)|Lambda0|^p, where
/// p = 1 by the derivation (p = 2 reproduces the displayed corollary).
pub fn blowup_bound(
    n: usize,
    lambda0: i128,
    ell1: i128,
    lambda_squared: bool,
) -> Result<u64, TowerError> {
    if lambda0 == 0 {
        return Err(TowerError::ZeroLambda);
    }
    assert!(ell1 >= 1 && n >= 3);
    let lam = if lambda_squared {
        lambda0 * lambda0
    } else {
        lambda0.abs()
    };
    let mut total = 0u64;
    for ell in 1..=ell1 {
        let v = ell * (1 + ell).pow((n - 2) as u32) * (1 + 2 * ell) * lam;
        total += floor_log(n as i128 - 1, v);
    }
    Ok(total)
}

/// Largest e with base^e <= v (v >= 1).
fn floor_log(base: i128, v: i128) -> u64 {
    assert!(base >= 2 && v >= 1);
    let mut e = 0u64;
    let mut p = base;
    while p <= v {
        e += 1;
        p *= base;
    }
    e
}

/// The integrality sequence a_j whose eventual failure limits the length
/// of a tower: a_j = (ell_{j+1}+1)^(n-2) Lambda0 (ell_{j+1}^2/(n-1)^j +
/// (n ell_{j+1}+1) sum_{i<=j} ell_i/(n-1)^i).
pub fn integrality_term(t: &TowerState, j: usize) -> Result<Rat, TowerError> {
    if j >= t.ells.len() {
        return Err(TowerError::IndexOutOfRange {
            j,
            len: t.ells.len(),
        });
    }
    let n = t.n as i128;
    let ell = t.ells[j];
    Ok(big((ell + 1).pow((t.n - 2) as u32))
        * big(t.lambda0)
        * (big(ell * ell) * rpow(n - 1, -(j as i64))
            + big(n * ell + 1) * t.ell_correction(j)))
}

/// First level j >= 1 at which a constant-ell tower loses integrality of
/// a_j, searched up to `max_j`; `None` if integrality never breaks there.
pub fn integrality_break(
    n: usize,
    lambda0: i128,
    ell: i128,
    max_j: usize,
) -> Option<usize> {
    let t = TowerState {
        n,
        k: 2,
        deg_w: 1,
        chi: (n as i128 + 1) - lambda0,
        lambda0,
        ells: vec![ell; max_j + 1],
    };
    (1..=max_j).find(|&j| !integrality_term(&t, j).unwrap().is_integer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chern::{chern_coeffs, CIData};
    use crate::nu::{nu, FamilyTag, NuInput};

    fn line_p3(k: i128, ells: Vec<i128>) -> TowerState {
        TowerState::new(3, k, 1, 2, ells).unwrap()
    }

    #[test]
    fn chern_integrals_line() {
        let t = line_p3(3, vec![1]);
        let c = chern_integrals(&t, 1).unwrap();
        assert_eq!(c.e_on_w, big(1));
        assert_eq!(c.zeta_top, big(-2));
        let base = chern_integrals(&t, 0).unwrap();
        // chi + Lambda0 = (n+1)deg at the base.
        assert_eq!(base.c1_tm, big(4));
    }

    #[test]
    fn zero_ells_leave_cotangent_constant() {
        let t = line_p3(5, vec![0, 0, 0]);
        for j in 0..=3 {
            let c = chern_integrals(&t, j).unwrap();
            assert_eq!(c.c1_tf_star, big(4));
        }
    }

    #[test]
    fn four_m_minus_eight_family() {
        for m in 6..=12i128 {
            let t = line_p3(m, vec![2, 1]);
            assert_eq!(n_on_divisor(&t, 2).unwrap(), 4 * m - 8);
        }
    }

    #[test]
    fn divisor_count_matches_kernel_at_level_one() {
        let t = line_p3(3, vec![1]);
        assert_eq!(n_on_divisor(&t, 1).unwrap(), 10);
        let inp = NuInput {
            k: 3,
            ell: 1,
            ci: CIData::new(3, 2, vec![1, 1]).unwrap(),
        };
        assert_eq!(n_on_divisor(&t, 1).unwrap(), -nu(FamilyTag::Psi, &inp));
    }

    #[test]
    fn zero_ell_divisor_count_collapses() {
        let t = line_p3(4, vec![0]);
        let n = 3i128;
        assert_eq!(
            n_on_divisor(&t, 1).unwrap(),
            t.chi * (n - 1) + (n - 1) * (t.k - 1) * t.deg_w
        );
    }

    #[test]
    fn totals_match_blowup_counts() {
        let t = line_p3(3, vec![1]);
        assert_eq!(eta(&t, 1).unwrap(), -10);
        assert_eq!(n_total(&t, 1).unwrap(), 30);
    }

    #[test]
    fn mu_along_base_case() {
        let t = line_p3(3, vec![1]);
        assert_eq!(mu_along(&t, 0, 1, 12, EllVariant::EllNext).unwrap(), 32);
    }

    #[test]
    fn mu_along_level_one() {
        // Degree-4 foliation along a line, ells = (1,1), no embedded points.
        let t = line_p3(4, vec![1, 1]);
        assert_eq!(mu_along(&t, 1, 1, 0, EllVariant::EllNext).unwrap(), 22);
    }

    #[test]
    fn literal_variant_needs_positive_level() {
        let t = line_p3(4, vec![1, 1]);
        assert!(matches!(
            mu_along(&t, 0, 1, 0, EllVariant::LiteralEllJ),
            Err(TowerError::LiteralVariantAtBase)
        ));
        // At j >= 1 with equal consecutive ells the two variants agree.
        assert_eq!(
            mu_along(&t, 1, 1, 0, EllVariant::LiteralEllJ).unwrap(),
            mu_along(&t, 1, 1, 0, EllVariant::EllNext).unwrap()
        );
    }

    #[test]
    fn mu_next_is_eta_step() {
        let t = line_p3(3, vec![1]);
        let mu0 = mu_along(&t, 0, 1, 12, EllVariant::EllNext).unwrap();
        assert_eq!(mu_next(&t, 0, mu0).unwrap(), 22);
        // Consistency with the count differences.
        assert_eq!(
            mu_next(&t, 0, mu0).unwrap() - mu0,
            n_total(&t, 1).unwrap() - n_total(&t, 0).unwrap()
        );
    }

    #[test]
    fn blowup_bound_values() {
        assert_eq!(blowup_bound(3, 2, 1, false).unwrap(), 3);
        // Second term: floor(log2(2*3*5*2)) = floor(log2 60) = 5.
        assert_eq!(blowup_bound(3, 2, 2, false).unwrap(), 8);
        assert!(matches!(
            blowup_bound(3, 0, 1, false),
            Err(TowerError::ZeroLambda)
        ));
        // The squared variant is monotonically larger.
        assert!(blowup_bound(3, 2, 1, true).unwrap() >= 3);
    }

    #[test]
    fn integrality_breaks_within_bound() {
        for lambda0 in [2i128, 30] {
            let bound = blowup_bound(3, lambda0, 1, false).unwrap() as usize;
            let break_at = integrality_break(3, lambda0, 1, bound + 2)
                .expect("integrality must fail for a constant tower");
            assert!(break_at <= bound + 1, "lambda0={lambda0}: {break_at} vs bound {bound}");
        }
    }

    #[test]
    fn chern_package_feeds_tower() {
        let ci = CIData::new(3, 2, vec![2, 3]).unwrap();
        let cc = chern_coeffs(&ci);
        let t = TowerState::new(3, 2, cc.deg_w, cc.chi.unwrap(), vec![1, 1]).unwrap();
        assert_eq!(t.lambda0, cc.lambda0.unwrap());
        // Identity eta_1 = nu(Theta).
        let inp = NuInput { k: 2, ell: 1, ci };
        assert_eq!(eta(&t, 1).unwrap(), nu(FamilyTag::Theta, &inp));
    }
}
