//! Exact arithmetic kernel: rationals, interval unions, integer 2×2
//! determinants, certified brackets and zeta constants.

pub mod certified;
mod interval;
mod mat2;
mod rat;
mod zeta;

pub use certified::Bracket;
pub use interval::{interval_union_length, Interval, IntervalSet};
pub use mat2::Mat2;
pub use rat::{nearest_int_distance, Rat};
pub use zeta::{zeta, ZetaConst};

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat() -> impl Strategy<Value = Rat> {
        (any::<i64>(), 1u64..u64::MAX).prop_map(|(n, d)| Rat::new(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn distance_is_periodic_and_even(x in rat(), n in -1_000_000i64..1_000_000) {
            let d = nearest_int_distance(&x);
            prop_assert_eq!(&d, &nearest_int_distance(&(&x + &Rat::from(n))));
            prop_assert_eq!(&d, &nearest_int_distance(&-&x));
            prop_assert!(!d.is_negative() && d <= Rat::new(1, 2));
        }
    }
}
