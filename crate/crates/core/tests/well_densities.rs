use infowell_core::exact::{int, ratio, BigRational};
use infowell_core::oracle::{quad_entropic_moment, quad_position_moment};
use infowell_core::well::*;

fn states() -> Vec<WellState> {
    let mut v = Vec::new();
    for n in [1, 2, 3, 7] {
        for a in [ratio(1, 2), int(1), ratio(5, 2)] {
            v.push(WellState::new(n, a).unwrap());
        }
    }
    v
}

#[test]
fn densities_are_normalized() {
    for s in states() {
        let pos = quad_position_moment(&s, 1, 1e-10).unwrap();
        assert!((pos.value_f64() - 1.0).abs() < 1e-8, "n={} a={}", s.n(), s.a());
        let mom = quad_entropic_moment(&s, 1, 1e-10).unwrap();
        assert!((mom.value_f64() - 1.0).abs() < 1e-8, "n={} a={}", s.n(), s.a());
    }
}

#[test]
fn densities_are_nonnegative_and_even() {
    for s in states() {
        let a = s.a_f64();
        for x in sample_grid(-1.2 * a, 1.2 * a, 10_000) {
            let r = position_density(&s, x);
            assert!(r >= 0.0);
            assert!((r - position_density(&s, -x)).abs() <= 1e-12 * r.max(1e-300) + 1e-15);
        }
        let n = s.n() as f64;
        let c = std::f64::consts::PI * n / 2.0;
        for p in sample_grid(-60.0 / a, 60.0 / a, 10_000) {
            let g = momentum_density(&s, p);
            assert!(g >= 0.0 && g.is_finite());
            // near the zeros of sin² compare against the envelope, not g
            let t = a * p;
            let envelope = a * c * n / ((t * t - c * c).powi(2) + 1e-30);
            assert!((g - momentum_density(&s, -p)).abs() <= 1e-12 * (g + envelope.min(1.0)));
        }
    }
}

#[test]
fn energy_scaling() {
    let e = |n, a: BigRational| energy(&WellState::new(n, a).unwrap());
    assert_eq!(e(3, int(1)), e(1, int(1)).scale(&int(9)));
    assert_eq!(e(2, int(4)), e(2, int(1)).scale(&ratio(1, 16)));
}
