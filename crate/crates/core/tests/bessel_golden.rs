use walklab_core::special::{bessel_k, ln_bessel_k};

const FIXTURE: &str = include_str!("fixtures/bessel_k.txt");

fn golden() -> Vec<(f64, f64, f64)> {
    FIXTURE
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let v: Vec<f64> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect()
}

#[test]
fn matches_high_precision_table() {
    let mut worst = (0.0, 0.0, 0.0);
    for (order, x, ln_k) in golden() {
        // an absolute error in ln K is a relative error in K
        let err = (ln_bessel_k(order, x).unwrap() - ln_k).abs();
        if err > worst.2 {
            worst = (order, x, err);
        }
    }
    assert!(worst.2 < 1e-10, "worst case K_{}({}): {:e}", worst.0, worst.1, worst.2);
}

#[test]
fn representable_values_agree_with_log_form() {
    for (order, x, ln_k) in golden() {
        if ln_k < 700.0 {
            let k = bessel_k(order, x).unwrap();
            assert!((k / ln_k.exp() - 1.0).abs() < 1e-10);
        } else {
            assert!(bessel_k(order, x).is_err());
        }
    }
}
