use std::f64::consts::PI;

use ddgeo::angle::parse_angle;
use ddgeo::config::SweepSpec;
use ddgeo::output::{csv_string, parse_csv};
use ddgeo::sweep::SweepRow;
use proptest::prelude::*;

fn row() -> impl Strategy<Value = SweepRow> {
    (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0).prop_map(|(epsilon, p, u)| SweepRow {
        epsilon,
        fidelity_protected: p,
        fidelity_unprotected: u,
        converged: true,
    })
}

proptest! {
    #[test]
    fn csv_round_trips(rows in prop::collection::vec(row(), 1..20)) {
        let back = parse_csv(&csv_string(&rows)).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in back.iter().zip(&rows) {
            prop_assert!((a.epsilon - b.epsilon).abs() < 1e-15);
            prop_assert!((a.fidelity_protected - b.fidelity_protected).abs() < 1e-15);
            prop_assert!((a.fidelity_unprotected - b.fidelity_unprotected).abs() < 1e-15);
        }
    }

    #[test]
    fn rational_multiples_of_pi_parse(num in -12i32..12, den in 1i32..12) {
        let text = format!("{num}pi/{den}");
        let v = parse_angle(&text).unwrap();
        prop_assert!((v - num as f64 * PI / den as f64).abs() < 1e-12, "{} -> {}", text, v);
    }

    #[test]
    fn decimals_parse_as_themselves(x in -10.0f64..10.0) {
        prop_assert_eq!(parse_angle(&format!("{x}")).unwrap(), x);
    }

    #[test]
    fn sweep_grid_is_ascending_and_closed(lo in 0.0f64..0.5, span in 1e-3f64..1.0, points in 2usize..60) {
        let s = SweepSpec { epsilon_min: lo, epsilon_max: lo + span, points };
        let e = s.epsilons();
        prop_assert_eq!(e.len(), points);
        prop_assert_eq!(e[0], lo);
        prop_assert_eq!(e[points - 1], lo + span);
        prop_assert!(e.windows(2).all(|w| w[1] > w[0]));
    }
}
