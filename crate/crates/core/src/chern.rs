//! Symmetric-function and Chern-coefficient calculator for complete
//! intersections W = Z(f_1,...,f_d) in P^n.
//!
//! Produces the sigma (normal bundle) and tau (tangent bundle of W)
//! coefficient lists, deg(W), and in the curve case the Euler
//! characteristic chi and the tower invariant Lambda_0.

use thiserror::Error;

/// A complete intersection: ambient dimension, codimension and the
/// degrees of its defining equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CIData {
    pub n: usize,
    pub d: usize,
    pub degrees: Vec<i128>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChernError {
    #[error("invalid complete intersection: need 2 <= d <= n and degrees >= 1 (got n={n}, d={d})")]
    InvalidData { n: usize, d: usize },
}

impl CIData {
    pub fn new(n: usize, d: usize, degrees: Vec<i128>) -> Result<Self, ChernError> {
        if d < 2 || d > n || degrees.len() != d || degrees.iter().any(|&k| k < 1) {
            return Err(ChernError::InvalidData { n, d });
        }
        Ok(CIData { n, d, degrees })
    }
}

/// Chern-coefficient package of a complete intersection.
///
/// `sigma[i]` is the elementary symmetric function e_i of the degrees
/// (Chern coefficients of the normal bundle); `tau[i]` are the Chern
/// coefficients of the tangent bundle of W itself, defined through the
/// series (1+h)^(n+1) / prod(1+k_j h) truncated mod h^(n-d+1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernCoeffs {
    pub sigma: Vec<i128>,
    pub tau: Vec<i128>,
    pub deg_w: i128,
    /// Euler characteristic; only defined in the curve case d = n-1.
    pub chi: Option<i128>,
    /// (n+1)deg(W) - chi(W); only defined in the curve case.
    pub lambda0: Option<i128>,
}

/// Complete symmetric function h_delta(k_1..k_d): the sum of all degree-
/// delta monomials in the given values. delta = 0 gives 1.
pub fn complete_symmetric(delta: usize, ks: &[i128]) -> i128 {
    // h_delta(k_1..k_j) = sum_i k_j^i * h_{delta-i}(k_1..k_{j-1})
    let mut h: Vec<i128> = vec![0; delta + 1];
    h[0] = 1;
    for &k in ks {
        let mut pow = 1i128;
        let mut next = vec![0i128; delta + 1];
        for i in 0..=delta {
            for target in i..=delta {
                next[target] += pow * h[target - i];
            }
            if i < delta {
                pow = pow.checked_mul(k).expect("overflow in complete_symmetric");
            }
        }
        // The inner double loop accumulates sum_i pow(k,i)*h[target-i].
        h = next;
    }
    h[delta]
}

/// Elementary symmetric functions e_0..e_d of the given values.
pub fn elementary_symmetric(ks: &[i128]) -> Vec<i128> {
    let mut e = vec![0i128; ks.len() + 1];
    e[0] = 1;
    for (count, &k) in ks.iter().enumerate() {
        for i in (1..=count + 1).rev() {
            e[i] += k * e[i - 1];
        }
    }
    e
}

/// Coefficients of (1+h)^p truncated to `len` terms.
fn binomial_series(p: usize, len: usize) -> Vec<i128> {
    let mut out = vec![0i128; len];
    let mut c: i128 = 1;
    for (i, slot) in out.iter_mut().enumerate() {
        if i <= p {
            *slot = c;
            c = c * (p as i128 - i as i128) / (i as i128 + 1);
        }
    }
    out
}

/// Multiply two truncated integer series, keeping `len` terms.
fn series_mul(a: &[i128], b: &[i128], len: usize) -> Vec<i128> {
    let mut out = vec![0i128; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Invert a truncated series with unit constant term.
fn series_inverse(a: &[i128], len: usize) -> Vec<i128> {
    assert_eq!(a[0], 1);
    let mut inv = vec![0i128; len];
    inv[0] = 1;
    for i in 1..len {
        let mut acc = 0i128;
        for j in 1..=i {
            acc += a.get(j).copied().unwrap_or(0) * inv[i - j];
        }
        inv[i] = -acc;
    }
    inv
}

/// Compute the full Chern package; all the invariants of the output are
/// asserted before returning.
pub fn chern_coeffs(ci: &CIData) -> ChernCoeffs {
    let CIData { n, d, degrees } = ci;
    let sigma = elementary_symmetric(degrees);
    let tau_len = n - d + 1;
    let ambient = binomial_series(n + 1, tau_len);
    let normal: Vec<i128> = sigma.iter().copied().take(tau_len).collect();
    let mut normal_padded = normal.clone();
    normal_padded.resize(tau_len, 0);
    let tau = series_mul(&ambient, &series_inverse(&normal_padded, tau_len), tau_len);

    let deg_w: i128 = degrees.iter().product();
    let (chi, lambda0) = if *d == n - 1 {
        let chi = tau[1] * deg_w;
        (Some(chi), Some((*n as i128 + 1) * deg_w - chi))
    } else {
        (None, None)
    };

    // Whitney product identity: tau * sigma = (1+h)^(n+1) mod h^(n-d+1).
    let product = series_mul(&tau, &normal_padded, tau_len);
    assert_eq!(product, ambient, "Whitney identity violated");
    // Newton-type check: sum sigma_i = prod(1 + k_j).
    let total: i128 = sigma.iter().sum();
    let expected: i128 = degrees.iter().map(|k| k + 1).product();
    assert_eq!(total, expected);

    ChernCoeffs {
        sigma,
        tau,
        deg_w,
        chi,
        lambda0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_symmetric_examples() {
        assert_eq!(complete_symmetric(2, &[1, 1]), 3);
        assert_eq!(complete_symmetric(0, &[7, 9]), 1);
        assert_eq!(complete_symmetric(2, &[2, 3]), 19); // 4 + 6 + 9
    }

    #[test]
    fn complete_symmetric_recursion_matches_enumeration() {
        // Direct enumeration over multi-indices, up to delta = 6, d = 4.
        let ks = [2i128, 3, 1, 4];
        for delta in 0..=6usize {
            let mut total = 0i128;
            let mut idx = vec![0usize; ks.len()];
            loop {
                if idx.iter().sum::<usize>() == delta {
                    total += ks
                        .iter()
                        .zip(&idx)
                        .map(|(&k, &e)| k.pow(e as u32))
                        .product::<i128>();
                }
                // Odometer over 0..=delta per slot.
                let mut j = 0;
                loop {
                    if j == idx.len() {
                        break;
                    }
                    idx[j] += 1;
                    if idx[j] > delta {
                        idx[j] = 0;
                        j += 1;
                    } else {
                        break;
                    }
                }
                if j == idx.len() {
                    break;
                }
            }
            assert_eq!(complete_symmetric(delta, &ks), total, "delta={delta}");
        }
    }

    #[test]
    fn line_in_p3() {
        let ci = CIData::new(3, 2, vec![1, 1]).unwrap();
        let c = chern_coeffs(&ci);
        assert_eq!(c.sigma, vec![1, 2, 1]);
        assert_eq!(c.tau, vec![1, 2]);
        assert_eq!(c.deg_w, 1);
        assert_eq!(c.chi, Some(2));
        assert_eq!(c.lambda0, Some(2));
    }

    #[test]
    fn line_in_p4_codim3() {
        let ci = CIData::new(4, 3, vec![1, 1, 1]).unwrap();
        let c = chern_coeffs(&ci);
        assert_eq!(c.sigma, vec![1, 3, 3, 1]);
        assert_eq!(c.tau, vec![1, 2]);
        assert_eq!(c.deg_w, 1);
        assert_eq!(c.chi, Some(2));
        assert_eq!(c.lambda0, Some(5 - 2));
    }

    #[test]
    fn curve_of_degrees_2_3_in_p3() {
        let ci = CIData::new(3, 2, vec![2, 3]).unwrap();
        let c = chern_coeffs(&ci);
        assert_eq!(c.deg_w, 6);
        assert_eq!(c.tau[1], 4 - 5); // n+1 - sum(k_j)
        assert_eq!(c.chi, Some(-6));
        assert_eq!(c.lambda0, Some(24 + 6));
    }

    #[test]
    fn point_case_has_trivial_tau() {
        let ci = CIData::new(3, 3, vec![1, 1, 1]).unwrap();
        let c = chern_coeffs(&ci);
        assert_eq!(c.tau, vec![1]);
        assert_eq!(c.chi, None);
    }

    #[test]
    fn invalid_data_rejected() {
        assert!(CIData::new(3, 1, vec![1]).is_err());
        assert!(CIData::new(3, 4, vec![1, 1, 1, 1]).is_err());
        assert!(CIData::new(3, 2, vec![0, 1]).is_err());
    }
}
