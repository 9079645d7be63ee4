use autinv::cli::{parse_element, Kind, Session, SessionConfig};
use autinv::diffop::DiffOpRing;
use autinv::multipoly::invert_poly_aut;
use autinv::random::{self, random_diffop, random_poly, random_weyl};
use autinv::weyl::WeylRing;
use autinv::PrimeChar;
use num_bigint::BigUint;
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

fn big_binom(b: u64, a: u64) -> BigUint {
    (0..a).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(b - i) / BigUint::from(i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn lucas_matches_big_integers(p in prime(), b in 0u64..200, a in 0u64..200) {
        let pc = PrimeChar::new(p).unwrap();
        let want = if a > b { 0 } else { (big_binom(b, a) % BigUint::from(p)).to_u64_digits().first().copied().unwrap_or(0) };
        prop_assert_eq!(pc.binom(b, a), want);
    }

    #[test]
    fn factorial_inverse(p in prime(), j in 0u64..7) {
        let pc = PrimeChar::new(p).unwrap();
        match pc.factorial_inv(j) {
            Ok(f) => {
                let fact = (1..=j).fold(1, |acc, i| pc.mul(acc, i % p));
                prop_assert_eq!(pc.mul(f, fact), 1);
            }
            Err(_) => prop_assert!(j >= p),
        }
    }

    #[test]
    fn poly_ring_laws(p in prime(), seed in any::<u64>()) {
        let pc = PrimeChar::new(p).unwrap();
        let mut rng = random::rng(seed);
        let [a, b, c] = [0; 3].map(|_| random_poly(&mut rng, pc, 2, 4, 4));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn diffop_associative(p in prime(), seed in any::<u64>(), truncated in any::<bool>()) {
        let pc = PrimeChar::new(p).unwrap();
        let ring = DiffOpRing::new(pc, 2, 1, truncated.then(|| vec![2, 1])).unwrap();
        let mut rng = random::rng(seed);
        let [a, b, c] = [0; 3].map(|_| random_diffop(&mut rng, &ring, 3, 4, 3));
        prop_assert_eq!(ring.mul(&ring.mul(&a, &b), &c), ring.mul(&a, &ring.mul(&b, &c)));
    }

    #[test]
    fn weyl_associative(p in prime(), seed in any::<u64>()) {
        let pc = PrimeChar::new(p).unwrap();
        let ring = WeylRing::new(pc, 2, 1);
        let mut rng = random::rng(seed);
        let [a, b, c] = [0; 3].map(|_| random_weyl(&mut rng, &ring, 3, 3));
        prop_assert_eq!(ring.mul(&ring.mul(&a, &b), &c), ring.mul(&a, &ring.mul(&b, &c)));
    }

    #[test]
    fn render_parse_round_trip(kind_ix in 0usize..6, p in prime(), seed in any::<u64>()) {
        let kind = [Kind::Poly, Kind::Series, Kind::DiffOp, Kind::DiffOpPoly, Kind::Weyl, Kind::WeylPoly][kind_ix];
        let m = usize::from(matches!(kind, Kind::DiffOpPoly | Kind::WeylPoly));
        let mut cfg = SessionConfig::new(kind, p, 2, m).unwrap();
        match kind {
            Kind::Series => cfg = cfg.with_degree_bound(6),
            Kind::DiffOp | Kind::DiffOpPoly => cfg = cfg.with_kmax(2),
            _ => {}
        }
        let session = Session::from_config(&cfg).unwrap();
        let mut rng = random::rng(seed);
        let e = random::random_element(&mut rng, &session);
        let text = session.render(&e);
        let back = parse_element(&text, &session).unwrap();
        prop_assert_eq!(session.render(&back), text);
    }

    #[test]
    fn triangular_inverse(p in prime(), n in 1usize..4, seed in any::<u64>()) {
        let pc = PrimeChar::new(p).unwrap();
        let mut rng = random::rng(seed);
        let sigma = random::random_triangular(&mut rng, pc, n, 3);
        let tau = invert_poly_aut(&sigma).unwrap();
        prop_assert!(sigma.compose(&tau).unwrap().is_identity());
        prop_assert!(invert_poly_aut(&tau).unwrap() == sigma);
    }
}
