use maslov_core::instances::{rng_from_seed, suite_instance};
use maslov_core::maslov::{compute_k, compute_t, expected_dim_t, reindex, reverse};
use maslov_core::sheaf::h1_with_cup;
use maslov_core::weil::{heis_mul, HeisenbergElement};
use maslov_core::witt::{
    anisotropic_kernel, class_of_diagonal, gamma, gamma_of_diagonal, witt_add, witt_neg,
    AdditiveCharacter, WittClass,
};
use maslov_core::{Field, Matrix, PrimeField, Rationals, Subspace, SymplecticSpace};
use proptest::prelude::*;

const PRIMES: [u32; 5] = [3, 5, 7, 11, 13];

fn prime() -> impl Strategy<Value = PrimeField> {
    prop::sample::select(PRIMES.to_vec()).prop_map(|p| PrimeField::new(p).unwrap())
}

fn matrix(f: PrimeField, rows: usize, cols: usize) -> impl Strategy<Value = Matrix<PrimeField>> {
    prop::collection::vec(any::<i64>(), rows * cols)
        .prop_map(move |v| Matrix::from_i64(&f, rows, cols, &v))
}

fn field_and_matrix() -> impl Strategy<Value = (PrimeField, Matrix<PrimeField>)> {
    (prime(), 1..6usize, 1..7usize).prop_flat_map(|(f, r, c)| (Just(f), matrix(f, r, c)))
}

fn nonzero_diagonal() -> impl Strategy<Value = (PrimeField, Vec<i64>)> {
    prime().prop_flat_map(|f| {
        let p = f.p() as i64;
        (Just(f), prop::collection::vec(1..p, 1..5))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rref_is_idempotent_and_rank_nullity_holds((_f, m) in field_and_matrix()) {
        let r = m.rref();
        prop_assert_eq!(r.rref(), r.clone());
        prop_assert_eq!(m.rank() + m.kernel_basis().rows(), m.cols());
        let k = m.kernel_basis();
        prop_assert!(m.dot(&k.transpose()).is_zero());
    }

    #[test]
    fn subspace_dimensions_obey_the_modular_law(
        (f, a, b) in prime().prop_flat_map(|f| (Just(f), matrix(f, 3, 5), matrix(f, 2, 5)))
    ) {
        let (a, b) = (Subspace::row_space(&a), Subspace::row_space(&b));
        let s = a.sum(&b).unwrap();
        let i = a.intersect(&b).unwrap();
        prop_assert_eq!(s.dim() + i.dim(), a.dim() + b.dim());
        prop_assert!(s.contains_subspace(&a).unwrap() && a.contains_subspace(&i).unwrap());
        let _ = f;
    }

    #[test]
    fn random_lagrangians_are_lagrangian(f in prime(), m in 1..4usize, seed in any::<u64>()) {
        let space = SymplecticSpace::new(&f, m);
        let mut rng = rng_from_seed(seed);
        let g = space.random_symplectic(&mut rng);
        prop_assert!(space.is_symplectic_matrix(&g));
        prop_assert!(space.is_lagrangian(&space.random_lagrangian(&mut rng)));
    }

    #[test]
    fn radical_and_dimension_over_prime_fields(f in prime(), seed in any::<u64>(), index in 0..64usize) {
        let t = suite_instance(&f, seed, index, 3, 3, 6);
        let k = compute_k(&t).unwrap();
        prop_assert!(k.radical() == k.image_boundary());
        prop_assert_eq!(compute_t(&t).unwrap().dim() as isize, expected_dim_t(&t));
    }

    #[test]
    fn dihedral_action_over_the_rationals(seed in any::<u64>(), index in 0..64usize) {
        let t = suite_instance(&Rationals, seed, index, 2, 3, 5);
        for r in 1..t.n() {
            prop_assert!(reindex(&t, r).unwrap().preserves());
        }
        prop_assert!(reverse(&t).unwrap().negates());
    }

    #[test]
    fn cup_product_is_minus_q(f in prime(), seed in any::<u64>(), index in 0..64usize) {
        let t = suite_instance(&f, seed, index, 2, 3, 5);
        let r = h1_with_cup(&t).unwrap();
        prop_assert!(r.matches_minus_q());
    }

    #[test]
    fn form_plus_its_negative_is_witt_zero((f, d) in nonzero_diagonal()) {
        let a: Vec<_> = d.iter().map(|&x| f.from_i64(x)).collect();
        let neg: Vec<_> = d.iter().map(|&x| f.from_i64(-x)).collect();
        let both: Vec<_> = a.iter().chain(&neg).cloned().collect();
        prop_assert!(class_of_diagonal(&f, both).is_zero());
        let c = class_of_diagonal(&f, a);
        prop_assert_eq!(witt_add(&c, &witt_neg(&c)).unwrap(), WittClass::zero(f.p()));
        prop_assert!(c.aniso_rank <= 2);
    }

    #[test]
    fn witt_addition_matches_orthogonal_sum((f, d) in nonzero_diagonal(), split in 0..5usize) {
        let e: Vec<_> = d.iter().map(|&x| f.from_i64(x)).collect();
        let k = split.min(e.len());
        let whole = class_of_diagonal(&f, e.clone());
        let parts = witt_add(&class_of_diagonal(&f, e[..k].to_vec()), &class_of_diagonal(&f, e[k..].to_vec())).unwrap();
        prop_assert_eq!(whole, parts);
        let g = Matrix::diagonal(&f, &e);
        prop_assert_eq!(anisotropic_kernel(&f, &g), whole);
    }

    #[test]
    fn gamma_is_a_unitary_character((f, d) in nonzero_diagonal(), twist in 1..100i64) {
        prop_assume!(twist % f.p() as i64 != 0);
        let psi = AdditiveCharacter::with_twist(&f, twist).unwrap();
        let e: Vec<_> = d.iter().map(|&x| f.from_i64(x)).collect();
        let g = gamma_of_diagonal(&e, &psi);
        prop_assert!((g.norm() - 1.0).abs() < 1e-9);
        let prod = e.iter().fold(num_one(), |acc, x| acc * gamma_of_diagonal(std::slice::from_ref(x), &psi));
        prop_assert!((g - prod).norm() < 1e-9);
        let hyp = Matrix::diagonal(&f, &e).direct_sum(&Matrix::from_i64(&f, 2, 2, &[0, 1, 1, 0]));
        prop_assert!((gamma(&hyp, &psi) - g).norm() < 1e-9);
    }

    #[test]
    fn heisenberg_multiplication_is_associative(f in prime(), m in 1..3usize, seed in any::<u64>()) {
        let space = SymplecticSpace::new(&f, m);
        let mut rng = rng_from_seed(seed);
        let (a, b, c) = (
            HeisenbergElement::random(&space, &mut rng),
            HeisenbergElement::random(&space, &mut rng),
            HeisenbergElement::random(&space, &mut rng),
        );
        let left = heis_mul(&space, &heis_mul(&space, &a, &b), &c);
        let right = heis_mul(&space, &a, &heis_mul(&space, &b, &c));
        prop_assert_eq!(left, right);
    }
}

fn num_one() -> maslov_core::weil::Complex64 {
    maslov_core::weil::Complex64::new(1.0, 0.0)
}
