//! Property-based checks: polynomial ring axioms, the blow-up pullback
//! identity, seed-invariance of classification, and tower bookkeeping.

use foliations::blowup::pullback_identity_holds;
use foliations::field::{classify_center, normalize_linear, CenterLocal, VectorField};
use foliations::nu::power_sum;
use foliations::poly::{ratio, Monomial, MultiPoly};
use foliations::tower::{eta, n_total, TowerState};
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Small random polynomial in `n` variables driven by a seed.
fn poly_from_seed(seed: u64, n: usize, force_center: Option<usize>) -> MultiPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = MultiPoly::zero(n);
    for _ in 0..rng.gen_range(1..=5) {
        let mut exps: Vec<u16> = (0..n).map(|_| rng.gen_range(0..=2u16)).collect();
        if let Some(d) = force_center {
            exps[rng.gen_range(0..d)] += 1;
        }
        let c = ratio(
            rng.gen_range(-6..=6i64),
            rng.gen_range(1..=4i64),
        );
        p.add_term(Monomial(exps), c);
    }
    p
}

fn field_from_seed(seed: u64, n: usize, d: usize) -> VectorField {
    let comps = (0..n)
        .map(|i| {
            let p = poly_from_seed(seed.wrapping_mul(31).wrapping_add(i as u64), n, Some(d));
            if p.is_zero() {
                MultiPoly::var(n, 0)
            } else {
                p
            }
        })
        .collect();
    VectorField::new(n, comps, 3, "prop")
}

proptest! {
    #[test]
    fn ring_axioms(sa in any::<u64>(), sb in any::<u64>(), sc in any::<u64>()) {
        let a = poly_from_seed(sa, 3, None);
        let b = poly_from_seed(sb, 3, None);
        let c = poly_from_seed(sc, 3, None);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a - &a, MultiPoly::zero(3));
        prop_assert_eq!(&a * &MultiPoly::one(3), a.clone());
    }

    #[test]
    fn pullback_identity(seed in any::<u64>(), n in 3usize..=4) {
        let d = 2 + (seed as usize % (n - 1));
        let f = field_from_seed(seed, n, d);
        let c = CenterLocal::new(d);
        for chart in 1..=d {
            prop_assert!(pullback_identity_holds(&f, &c, chart));
        }
    }

    #[test]
    fn classification_is_seed_invariant(seed in any::<u64>()) {
        let f = field_from_seed(seed, 3, 2);
        let c = CenterLocal::new(2);
        let runs: Vec<_> = [0u64, 1, 99]
            .iter()
            .map(|&s| {
                normalize_linear(&f, &c, s)
                    .and_then(|g| classify_center(&g, &c))
                    .ok()
            })
            .collect();
        prop_assert_eq!(runs[0], runs[1]);
        prop_assert_eq!(runs[1], runs[2]);
    }

    #[test]
    fn tower_total_is_base_plus_etas(
        k in 1i128..=5,
        deg in 1i128..=3,
        r in 1i128..=3,
        ells in proptest::collection::vec(0i128..=3, 1..=4),
    ) {
        // chi chosen so all divisions by (n-1)^j stay exact.
        let n = 3usize;
        let len = ells.len();
        let chi = 4 * deg - (1i128 << (len + 1)) * r;
        let t = TowerState::new(n, k, deg, chi, ells).unwrap();
        let mut acc = power_sum(k, n);
        for j in 1..=len {
            acc += eta(&t, j).unwrap();
            prop_assert_eq!(n_total(&t, j).unwrap(), acc);
        }
    }
}
