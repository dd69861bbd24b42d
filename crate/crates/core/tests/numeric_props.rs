use proptest::prelude::*;
use toeplitz_core::numeric::{
    exact_rank, gauss_legendre, numerical_rank, singular_values, CMatrix, ExactComplex,
    ExactMatrix, C64,
};

fn cmatrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols).prop_map(move |v| {
        CMatrix::from_fn(rows, cols, |i, j| {
            C64::new(v[i * cols + j].0, v[i * cols + j].1)
        })
    })
}

fn permuted(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(rows[i], cols[j])])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn singular_values_ignore_permutations(
        m in cmatrix(6, 5),
        rows in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(),
        cols in Just((0..5).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        let a = singular_values(&m).unwrap();
        let b = singular_values(&permuted(&m, &rows, &cols)).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12 * a[0].max(1e-300), "{} vs {}", x, y);
        }
    }

    /// Integer low-rank products, where exact and float ranks must agree.
    #[test]
    fn exact_rank_matches_numerical_rank(
        r in 0usize..5,
        left in prop::collection::vec((-4i64..5, -4i64..5), 6 * 4),
        right in prop::collection::vec((-4i64..5, -4i64..5), 4 * 6),
    ) {
        let l = ExactMatrix::from_fn(6, r, |i, j| ExactComplex::from_gaussian(left[i * 4 + j].0, left[i * 4 + j].1));
        let rt = ExactMatrix::from_fn(r, 6, |i, j| ExactComplex::from_gaussian(right[i * 6 + j].0, right[i * 6 + j].1));
        let m = ExactMatrix::from_fn(6, 6, |i, j| {
            (0..r).fold(ExactComplex::zero(), |acc, k| acc + l.get(i, k) * rt.get(k, j))
        });
        let exact = exact_rank(&m);
        prop_assert!(exact <= r);
        let f = m.to_float();
        let s = singular_values(&f).unwrap();
        prop_assume!(exact == 0 || s[exact - 1] / s[0] > 1e-6);
        prop_assert_eq!(numerical_rank(&f, 1e-10).unwrap(), exact);
    }
}

#[test]
fn gauss_legendre_integrates_powers_once_degree_allows() {
    for n in 1..=30usize {
        let rule = gauss_legendre(n, [0.0, 1.0]).unwrap();
        for l in 0..(2 * n) as i32 {
            let got = rule.integrate(|r: f64| r.powi(l));
            let want = 1.0 / f64::from(l + 1);
            assert!((got - want).abs() < 1e-13, "n={n} l={l}: {got} vs {want}");
        }
    }
}
