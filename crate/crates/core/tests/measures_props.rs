use infowell_core::dirichlet::asymptotic_bk;
use infowell_core::exact::{int, ratio, BigRational, PiPolynomial};
use infowell_core::measures::*;
use infowell_core::oracle::quad_entropic_moment;
use infowell_core::precision::rational_to_f64;
use infowell_core::{Error, WellState};

fn st(n: u32, a: BigRational) -> WellState {
    WellState::new(n, a).unwrap()
}

fn f(v: MeasureValue) -> f64 {
    v.decimal.to_f64()
}

fn scales() -> [BigRational; 3] {
    [ratio(1, 2), int(1), int(2)]
}

#[test]
fn definitions_are_consistent() {
    for n in 1..=10 {
        for k in 2..=8 {
            for a in scales() {
                let s = st(n, a);
                let r = f(momentum_renyi_entropy(&s, k, 20).unwrap());
                let l = f(momentum_renyi_length(&s, k, 20).unwrap());
                assert!((r.exp() - l).abs() <= 1e-12 * l, "n={n} k={k}");
                let w = momentum_entropic_moment(&s, k, 20).unwrap().exact_part.unwrap();
                let t = momentum_tsallis_entropy(&s, k, 20).unwrap().exact_part.unwrap();
                assert_eq!(&t.scale(&int(k as i64 - 1)) + &w, PiPolynomial::one());
                // R = ln W / (1 - k)
                let lw = f(momentum_entropic_moment(&s, k, 20).unwrap()).ln();
                assert!((r - lw / (1.0 - k as f64)).abs() <= 1e-12 * r.abs().max(1.0));

                let pr = f(position_renyi_entropy(&s, k, 20).unwrap());
                let pl = f(position_renyi_length(&s, k, 20).unwrap());
                assert!((pr.exp() - pl).abs() <= 1e-12 * pl);
            }
        }
    }
}

#[test]
fn renyi_decreases_with_order() {
    for n in 1..=10 {
        let s = WellState::unit(n).unwrap();
        let r: Vec<f64> = (2..=10).map(|k| f(momentum_renyi_entropy(&s, k, 20).unwrap())).collect();
        assert!(r.windows(2).all(|w| w[0] >= w[1]), "n={n} {r:?}");
    }
}

#[test]
fn scale_covariance() {
    for n in 1..=5 {
        for k in 2..=5 {
            let base = st(n, int(1));
            let r1 = f(momentum_renyi_entropy(&base, k, 20).unwrap());
            let l1 = f(momentum_renyi_length(&base, k, 20).unwrap());
            for (a, af) in [(ratio(1, 2), 0.5f64), (int(2), 2.0), (int(10), 10.0)] {
                let s = st(n, a);
                let r = f(momentum_renyi_entropy(&s, k, 20).unwrap());
                assert!((r + af.ln() - r1).abs() <= 1e-12 * r1.abs().max(1.0));
                let l = f(momentum_renyi_length(&s, k, 20).unwrap());
                assert!((l * af - l1).abs() <= 1e-12 * l1);
            }
        }
    }
}

#[test]
fn sum_and_product_do_not_depend_on_a() {
    for n in 1..=5 {
        for k in 2..=4 {
            let s1 = st(n, int(1));
            let sum1 = uncertainty_sum(&s1, k, k, 25).unwrap().decimal.to_rational();
            let prod1 = uncertainty_product(&s1, k, k, 25).unwrap().decimal.to_rational();
            for a in [ratio(1, 2), int(2), int(10)] {
                let s = st(n, a);
                let sum = uncertainty_sum(&s, k, k, 25).unwrap().decimal.to_rational();
                let prod = uncertainty_product(&s, k, k, 25).unwrap().decimal.to_rational();
                assert!(rational_to_f64(&(&sum - &sum1)).abs() <= 1e-12);
                assert!(rational_to_f64(&(&prod - &prod1)).abs() <= 1e-12 * rational_to_f64(&prod1));
            }
        }
    }
}

#[test]
fn sum_matches_its_parts_and_product_its_lengths() {
    for n in 1..=4 {
        for (k, l) in [(2, 2), (2, 3), (4, 2), (3, 5)] {
            for a in scales() {
                let s = st(n, a);
                let sum = f(uncertainty_sum(&s, k, l, 20).unwrap());
                let parts = f(position_renyi_entropy(&s, k, 20).unwrap()) + f(momentum_renyi_entropy(&s, l, 20).unwrap());
                assert!((sum - parts).abs() <= 1e-12 * sum.abs());
                let prod = f(uncertainty_product(&s, k, l, 20).unwrap());
                let lens = f(position_renyi_length(&s, k, 20).unwrap()) * f(momentum_renyi_length(&s, l, 20).unwrap());
                assert!((prod - lens).abs() <= 1e-12 * prod);
            }
        }
    }
}

#[test]
fn quotient_power_law_in_a() {
    for (k, l) in [(2, 2), (3, 3), (2, 4), (4, 3)] {
        let q1 = f(uncertainty_quotient(&st(2, int(1)), k, l, 20).unwrap());
        for af in [0.5f64, 2.0, 10.0] {
            let a = BigRational::from_float(af).unwrap();
            let q = f(uncertainty_quotient(&st(2, a), k, l, 20).unwrap());
            let expo = (1.0 - k as f64) / (2.0 * k as f64) - (l as f64 - 1.0) / (2.0 * l as f64);
            assert!((q / q1 - af.powf(expo)).abs() < 1e-12, "k={k} l={l} a={af}");
        }
    }
}

#[test]
fn order_errors() {
    let s = WellState::unit(1).unwrap();
    for e in [
        momentum_renyi_entropy(&s, 1, 10).unwrap_err(),
        momentum_renyi_length(&s, 1, 10).unwrap_err(),
        momentum_tsallis_entropy(&s, 0, 10).unwrap_err(),
        position_renyi_entropy(&s, 1, 10).unwrap_err(),
        position_tsallis_entropy(&s, 1, 10).unwrap_err(),
        position_renyi_length(&s, 1, 10).unwrap_err(),
        uncertainty_sum(&s, 2, 1, 10).unwrap_err(),
    ] {
        assert!(matches!(e, Error::Order { min: 2, .. }), "{e:?}");
    }
    assert_eq!(f(momentum_entropic_moment(&s, 1, 10).unwrap()), 1.0);
}

#[test]
fn normalization_exact_for_many_states() {
    for n in 1..=20 {
        for a in scales() {
            let w = momentum_entropic_moment(&st(n, a), 1, 10).unwrap();
            assert_eq!(w.exact_part.unwrap(), PiPolynomial::one());
        }
    }
}

#[test]
fn moments_approach_large_n_limit() {
    // W_3[γ_n] → b_3 / (2³ π²) at a = 1
    let b3 = rational_to_f64(&asymptotic_bk(3).unwrap());
    let limit = b3 / (8.0 * std::f64::consts::PI.powi(2));
    let gaps: Vec<f64> = [4, 10, 50, 100]
        .iter()
        .map(|&n| (f(momentum_entropic_moment(&WellState::unit(n).unwrap(), 3, 20).unwrap()) - limit).abs())
        .collect();
    assert!(gaps.windows(2).all(|w| w[0] > w[1]), "{gaps:?}");
    assert!(gaps[3] < 1e-3 * limit);
}

#[test]
fn momentum_moments_match_quadrature() {
    for (n, a) in [(1, ratio(1, 2)), (2, int(3)), (5, ratio(7, 3))] {
        for k in 1..=4 {
            let s = st(n, a.clone());
            let exact = f(momentum_entropic_moment(&s, k, 20).unwrap());
            let q = quad_entropic_moment(&s, k, 1e-10 * exact).unwrap();
            assert!((q.value_f64() - exact).abs() <= 1e-8 * exact, "n={n} k={k}");
        }
    }
}

#[test]
fn worked_values() {
    let s = WellState::unit(1).unwrap();
    let t2 = f(momentum_tsallis_entropy(&s, 2, 20).unwrap());
    assert!((t2 - 0.813_267_868_522_404_4).abs() < 1e-15);
    let l3 = f(position_renyi_length(&s, 3, 20).unwrap());
    assert!((l3 - 1.264_911_064_067_351_7).abs() < 1e-15);
    let r3 = f(position_renyi_entropy(&s, 3, 20).unwrap());
    assert!((r3 - 0.235_001_814_622_867_8).abs() < 1e-15);
}
