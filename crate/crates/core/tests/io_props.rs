use proptest::prelude::*;
use toeplitz_core::io::{
    exact_matrix_csv, float_matrix_csv, parse_exact_matrix_csv, parse_float_matrix_csv,
    parse_vector_csv, vector_csv,
};
use toeplitz_core::numeric::{CMatrix, ExactComplex, ExactMatrix, C64};

fn finite() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO
}

proptest! {
    #[test]
    fn float_csv_round_trips_bitwise(
        (r, c, v) in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), prop::collection::vec((finite(), finite()), r * c))
        }),
    ) {
        let m = CMatrix::from_fn(r, c, |i, j| C64::new(v[i * c + j].0, v[i * c + j].1));
        let back = parse_float_matrix_csv(&float_matrix_csv(&m)).unwrap();
        for (a, b) in m.iter().zip(back.iter()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn exact_csv_round_trips(
        (r, c, v) in (1usize..4, 1usize..4).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), prop::collection::vec((-50i64..50, 1i64..40, -50i64..50, 1i64..40), r * c))
        }),
    ) {
        let m = ExactMatrix::from_fn(r, c, |i, j| {
            let (a, b, p, q) = v[i * c + j];
            ExactComplex::from_ratio(a, b) + ExactComplex::i() * ExactComplex::from_ratio(p, q)
        });
        prop_assert_eq!(parse_exact_matrix_csv(&exact_matrix_csv(&m)).unwrap(), m);
    }

    #[test]
    fn vector_csv_round_trips(v in prop::collection::vec(finite(), 0..20)) {
        let back = parse_vector_csv(&vector_csv("value", &v)).unwrap();
        prop_assert_eq!(back.len(), v.len());
        for (a, b) in v.iter().zip(&back) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
