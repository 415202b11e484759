//! dB / dBm conversions.

pub fn dbm_to_watts(value_dbm: f64) -> f64 {
    10f64.powf((value_dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn db_to_linear(value_db: f64) -> f64 {
    10f64.powf(value_db / 10.0)
}

pub fn linear_to_db(value: f64) -> f64 {
    10.0 * value.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dbm_reference_points() {
        assert_eq!(dbm_to_watts(30.0), 1.0);
        assert!((dbm_to_watts(0.0) - 1e-3).abs() < 1e-18);
        assert!((dbm_to_watts(50.0) - 100.0).abs() < 1e-12);
    }

    #[test]
    fn db_reference_points() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        let expected = 10f64.powf(-10.5);
        assert!((db_to_linear(-105.0) - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn minus_infinity_db_is_zero() {
        assert_eq!(db_to_linear(f64::NEG_INFINITY), 0.0);
        assert_eq!(linear_to_db(0.0), f64::NEG_INFINITY);
    }

    proptest! {
        #[test]
        fn dbm_round_trip(x in -200.0f64..200.0) {
            prop_assert!((watts_to_dbm(dbm_to_watts(x)) - x).abs() <= 1e-12);
        }

        #[test]
        fn db_round_trip(x in -200.0f64..200.0) {
            prop_assert!((linear_to_db(db_to_linear(x)) - x).abs() <= 1e-12);
        }
    }
}
