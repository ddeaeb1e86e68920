//! The Van den Essen-type kernel nu(F, W, phi) and its consequences:
//! Milnor-number identities, blow-up singularity counts on the divisor
//! and on the whole transformed space, and two independent oracles
//! (a binomial triple sum and a curve-case closed form) that must agree
//! with the kernel evaluation.

use crate::chern::{chern_coeffs, complete_symmetric, CIData};
use crate::poly::{rat, Rat};
use crate::unipoly::UniPoly;
use num::{BigInt, One, ToPrimitive, Zero};
use thiserror::Error;

fn big(v: i128) -> Rat {
    Rat::from(BigInt::from(v))
}

/// Which of the three kernel polynomial families to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyTag {
    Phi,
    Psi,
    Theta,
}

/// One member of a kernel family: the univariate polynomial indexed by
/// a = (a1, a2) inside ambient data (n, d).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelFamily {
    pub tag: FamilyTag,
    pub a1: usize,
    pub a2: usize,
    pub n: usize,
    pub d: usize,
}

/// Inputs of a kernel evaluation: foliation degree, the kernel ell
/// (already adjusted for dicriticality), and the complete intersection.
#[derive(Clone, Debug)]
pub struct NuInput {
    pub k: i128,
    pub ell: i128,
    pub ci: CIData,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NuError {
    #[error("family index out of range: a1={a1} > d={d} or a2={a2} > n-d={nd}")]
    IndexOutOfRange {
        a1: usize,
        a2: usize,
        d: usize,
        nd: usize,
    },
    #[error("curve formula needs d = n-1 (got n={n}, d={d})")]
    DimensionMismatch { n: usize, d: usize },
}

/// Binomial coefficient, taken to be 0 when p < q or q < 0.
pub fn binomial(p: i64, q: i64) -> i128 {
    if q < 0 || p < q {
        return 0;
    }
    let mut acc: i128 = 1;
    for i in 0..q {
        acc = acc * (p - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// Sum of k^i for i = 0..=n.
pub fn power_sum(k: i128, n: usize) -> i128 {
    (0..=n as u32).map(|i| k.pow(i)).sum()
}

/// The expanded kernel polynomial.
///
/// Phi_a(x)  = x^(n-d-a2) (1+x)^(d-a1);
/// Psi_a(x)  = ((1+x)^(d-a1) - 1) x^(n-d-a2-1), realized by binomial
/// expansion so the formal x^-1 at a2 = n-d cancels before it appears;
/// Theta = Phi - Psi.
pub fn kernel_poly(f: &KernelFamily) -> Result<UniPoly, NuError> {
    let KernelFamily { tag, a1, a2, n, d } = *f;
    let nd = n - d;
    if a1 > d || a2 > nd {
        return Err(NuError::IndexOutOfRange { a1, a2, d, nd });
    }
    let phi = || {
        let one_plus_x = UniPoly::from_coeffs(vec![Rat::one(), Rat::one()]);
        &UniPoly::monomial(nd - a2, Rat::one()) * &one_plus_x.pow((d - a1) as u32)
    };
    let psi = || {
        // sum_{i=1}^{d-a1} C(d-a1, i) x^(i - 1 + n - d - a2)
        let mut acc = UniPoly::zero();
        for i in 1..=(d - a1) {
            let c = binomial((d - a1) as i64, i as i64);
            acc = &acc + &UniPoly::monomial(i - 1 + nd - a2, rat(c as i64));
        }
        acc
    };
    Ok(match tag {
        FamilyTag::Phi => phi(),
        FamilyTag::Psi => psi(),
        FamilyTag::Theta => &phi() - &psi(),
    })
}

/// The kernel nu(F, W, family): minus deg(W) times the alternating double
/// sum of Taylor coefficients of the family at ell, weighted by powers of
/// (k-1), the sigma/tau Chern coefficients and complete symmetric functions.
pub fn nu(tag: FamilyTag, inp: &NuInput) -> i128 {
    let cc = chern_coeffs(&inp.ci);
    let n = inp.ci.n;
    let d = inp.ci.d;
    let nd = n - d;
    let ell = rat(inp.ell as i64);
    let mut total = Rat::zero();
    for total_a in 0..=nd {
        for a1 in 0..=total_a.min(d) {
            let a2 = total_a - a1;
            let f = KernelFamily { tag, a1, a2, n, d };
            let shifted = kernel_poly(&f).expect("indices in range").shift(&ell);
            for m in 0..=(nd - total_a) {
                let delta = nd - total_a - m;
                let sign = if delta % 2 == 1 { -1i64 } else { 1 };
                let weight = rat(sign)
                    * shifted.coeff(m)
                    * big((inp.k - 1).pow(m as u32))
                    * big(cc.sigma[a1])
                    * big(cc.tau[a2])
                    * big(complete_symmetric(delta, &inp.ci.degrees));
                total += weight;
            }
        }
    }
    let value = -big(cc.deg_w) * total;
    assert!(value.is_integer(), "kernel sum must be an integer");
    value.to_integer().to_i128().expect("kernel value fits i128")
}

/// Independent second implementation of nu(Theta) via the binomial triple
/// sum with Gamma_a^j = C(d-a1, j-|a|-1) - C(d-a1, j-|a|).
///
/// This is the form in which the count N(F1, M1) - sum k^i arises before
/// the Taylor identities collapse it to the kernel; evaluating it literally
/// provides an oracle that must agree with `nu(Theta, ..)` everywhere.
pub fn nu_gamma_oracle(inp: &NuInput) -> i128 {
    let cc = chern_coeffs(&inp.ci);
    let n = inp.ci.n;
    let d = inp.ci.d;
    let nd = n - d;
    let mut total: i128 = 0;
    for total_a in 0..=nd {
        for a1 in 0..=total_a.min(d) {
            let a2 = total_a - a1;
            for j in total_a..=n {
                let gamma = binomial((d - a1) as i64, j as i64 - total_a as i64 - 1)
                    - binomial((d - a1) as i64, (j - total_a) as i64);
                if gamma == 0 {
                    continue;
                }
                for m in 0..=(nd - total_a) {
                    let choose = binomial((n - j) as i64, m as i64);
                    if choose == 0 {
                        continue;
                    }
                    let delta = nd - total_a - m;
                    let sign: i128 = if delta % 2 == 1 { -1 } else { 1 };
                    let ell_pow = inp.ell.pow((n - j - m) as u32);
                    total += sign
                        * choose
                        * gamma
                        * ell_pow
                        * (inp.k - 1).pow(m as u32)
                        * cc.sigma[a1]
                        * cc.tau[a2]
                        * complete_symmetric(delta, &inp.ci.degrees);
                }
            }
        }
    }
    cc.deg_w * total
}

/// The three Milnor-number statements tied to one blow-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MilnorReport {
    /// Sum of the Milnor numbers of the isolated singular points away
    /// from W (known only when the embedded-point count N is known).
    pub sum_isolated_mu: Option<i128>,
    /// -nu(Phi): valid lower bound for mu(F, W).
    pub mu_lower_bound: i128,
    /// mu(F, W) = -nu(Phi) + N when N is known.
    pub mu: Option<i128>,
    /// nu(Theta): the change of mu under one blow-up.
    pub mu_after_blowup_delta: i128,
}

/// Evaluate the blow-up Milnor identities for the given data.
pub fn theorem_milnor(inp: &NuInput, n_embedded: Option<i128>) -> MilnorReport {
    let nu_phi = nu(FamilyTag::Phi, inp);
    let nu_theta = nu(FamilyTag::Theta, inp);
    let k_sum = power_sum(inp.k, inp.ci.n);
    MilnorReport {
        sum_isolated_mu: n_embedded.map(|nn| k_sum + nu_phi - nn),
        mu_lower_bound: -nu_phi,
        mu: n_embedded.map(|nn| -nu_phi + nn),
        mu_after_blowup_delta: nu_theta,
    }
}

/// Singularity counts after one blow-up of a special center:
/// on the exceptional divisor and on the whole blown-up space.
pub fn special_counts(inp: &NuInput) -> (i128, i128) {
    let n_e1 = -nu(FamilyTag::Psi, inp);
    let n_m1 = power_sum(inp.k, inp.ci.n) + nu(FamilyTag::Theta, inp);
    (n_e1, n_m1)
}

/// Curve-case closed form for the blow-up delta nu(Theta): requires a
/// curve center (d = n-1). Must agree with `nu(Theta, ..)`.
pub fn curve_remark_formula(k: i128, ell: i128, ci: &CIData) -> Result<i128, NuError> {
    if ci.d != ci.n - 1 {
        return Err(NuError::DimensionMismatch { n: ci.n, d: ci.d });
    }
    let cc = chern_coeffs(ci);
    let n = ci.n as i128;
    let chi = cc.chi.expect("curve case has chi");
    let deg = cc.deg_w;
    let geom: i128 = (0..=(ci.n - 3) as u32).map(|j| (1 + ell).pow(j)).sum();
    let value = chi * (geom - ell * ell * (1 + ell).pow((ci.n - 2) as u32))
        + (1 + ell).pow((ci.n - 2) as u32)
            * deg
            * ((n - n * ell - 2) * (k - 1) + (n + 1) * (ell * ell - ell));
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degree3_line() -> NuInput {
        NuInput {
            k: 3,
            ell: 1,
            ci: CIData::new(3, 2, vec![1, 1]).unwrap(),
        }
    }

    #[test]
    fn kernel_poly_expansions() {
        let phi = kernel_poly(&KernelFamily {
            tag: FamilyTag::Phi,
            a1: 0,
            a2: 0,
            n: 3,
            d: 2,
        })
        .unwrap();
        // x(1+x)^2 = x^3 + 2x^2 + x
        assert_eq!(
            phi,
            UniPoly::from_coeffs(vec![rat(0), rat(1), rat(2), rat(1)])
        );
        let psi = kernel_poly(&KernelFamily {
            tag: FamilyTag::Psi,
            a1: 0,
            a2: 1,
            n: 3,
            d: 2,
        })
        .unwrap();
        // ((1+x)^2 - 1)/x = x + 2
        assert_eq!(psi, UniPoly::from_coeffs(vec![rat(2), rat(1)]));
        // Theta = Phi - Psi against the independent expansion of
        // phi(x) + x^(n-d-a2-1)(1 - (1+x)^(d-a1)).
        let theta = kernel_poly(&KernelFamily {
            tag: FamilyTag::Theta,
            a1: 0,
            a2: 0,
            n: 3,
            d: 2,
        })
        .unwrap();
        // x(1+x)^2 + (1 - (1+x)^2) = x^3 + 2x^2 + x - 2x - x^2 = x^3 + x^2 - x
        assert_eq!(
            theta,
            UniPoly::from_coeffs(vec![rat(0), rat(-1), rat(1), rat(1)])
        );
    }

    #[test]
    fn index_out_of_range() {
        assert!(kernel_poly(&KernelFamily {
            tag: FamilyTag::Phi,
            a1: 3,
            a2: 0,
            n: 3,
            d: 2,
        })
        .is_err());
    }

    #[test]
    fn nu_values_for_degree3_line() {
        let inp = degree3_line();
        assert_eq!(nu(FamilyTag::Psi, &inp), -10);
        assert_eq!(nu(FamilyTag::Phi, &inp), -20);
        assert_eq!(nu(FamilyTag::Theta, &inp), -10);
    }

    #[test]
    fn theta_is_phi_minus_psi() {
        for n in 3..=5usize {
            for d in 2..n {
                for k in 1..=4i128 {
                    for ell in 0..=3i128 {
                        let inp = NuInput {
                            k,
                            ell,
                            ci: CIData::new(n, d, vec![2; d]).unwrap(),
                        };
                        assert_eq!(
                            nu(FamilyTag::Theta, &inp),
                            nu(FamilyTag::Phi, &inp) - nu(FamilyTag::Psi, &inp)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn gamma_oracle_matches_theta() {
        let inp = degree3_line();
        assert_eq!(nu_gamma_oracle(&inp), -10);
        // Boundary ell = 0 and a higher-dimensional instance.
        for (n, d, k, ell, ks) in [
            (3usize, 2usize, 3i128, 0i128, vec![1i128, 1]),
            (4, 2, 2, 1, vec![1, 2]),
            (5, 3, 4, 2, vec![2, 1, 3]),
        ] {
            let inp = NuInput {
                k,
                ell,
                ci: CIData::new(n, d, ks).unwrap(),
            };
            assert_eq!(nu_gamma_oracle(&inp), nu(FamilyTag::Theta, &inp));
        }
    }

    #[test]
    fn milnor_report_for_degree3_line() {
        let inp = degree3_line();
        let with_n = theorem_milnor(&inp, Some(12));
        assert_eq!(with_n.mu, Some(32));
        assert_eq!(with_n.sum_isolated_mu, Some(40 - 20 - 12));
        let without = theorem_milnor(&inp, None);
        assert_eq!(without.mu_lower_bound, 20);
        assert_eq!(without.mu, None);
        assert_eq!(without.mu_after_blowup_delta, -10);
    }

    #[test]
    fn special_counts_for_degree3_line() {
        assert_eq!(special_counts(&degree3_line()), (10, 30));
    }

    #[test]
    fn special_counts_low_degree() {
        let inp = NuInput {
            k: 1,
            ell: 0,
            ci: CIData::new(3, 2, vec![1, 1]).unwrap(),
        };
        let (_, n_m1) = special_counts(&inp);
        assert_eq!(n_m1, 4 + nu(FamilyTag::Theta, &inp));
        assert_eq!(nu_gamma_oracle(&inp), nu(FamilyTag::Theta, &inp));
    }

    #[test]
    fn curve_formula_matches_theta() {
        let inp = degree3_line();
        assert_eq!(curve_remark_formula(3, 1, &inp.ci).unwrap(), -10);
        for (n, k, ell, ks) in [
            (3usize, 5i128, 0i128, vec![1i128, 1]),
            (4, 2, 1, vec![1, 1, 1]),
            (3, 2, 2, vec![2, 3]),
        ] {
            let ci = CIData::new(n, n - 1, ks).unwrap();
            let inp = NuInput { k, ell, ci };
            assert_eq!(
                curve_remark_formula(k, ell, &inp.ci).unwrap(),
                nu(FamilyTag::Theta, &inp),
                "n={n} k={k} ell={ell}"
            );
        }
        assert!(curve_remark_formula(2, 0, &CIData::new(4, 2, vec![1, 1]).unwrap()).is_err());
    }

    #[test]
    fn point_case_matches_closed_form() {
        // d = n: the double sum has a single term and nu(Theta) equals
        // -(theta_0 closed form) = -((1+l)^n - sum_{j<n} (1+l)^j).
        for ell in 0..=3i128 {
            let inp = NuInput {
                k: 2,
                ell,
                ci: CIData::new(3, 3, vec![1, 1, 1]).unwrap(),
            };
            let closed = (1 + ell).pow(3) - (0..3u32).map(|j| (1 + ell).pow(j)).sum::<i128>();
            assert_eq!(nu(FamilyTag::Theta, &inp), -closed);
        }
    }

    #[test]
    fn lower_bound_nonnegative_on_reference_inputs() {
        for (k, ell) in [(3i128, 1i128), (4, 1), (4, 0)] {
            let inp = NuInput {
                k,
                ell,
                ci: CIData::new(3, 2, vec![1, 1]).unwrap(),
            };
            assert!(-nu(FamilyTag::Phi, &inp) >= 0);
        }
    }
}
