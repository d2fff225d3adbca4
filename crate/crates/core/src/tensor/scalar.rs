use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num};
use ordered_float::OrderedFloat;

/// Values usable as tensor entries and matrix coefficients. Exact results
/// need an exact field such as [`Rational`].
pub trait Scalar:
    Num + Clone + Ord + Hash + Debug + Display + FromPrimitive + Neg<Output = Self>
{
    fn from_count(c: usize) -> Self {
        Self::from_usize(c).expect("counts fit every scalar type")
    }
}

impl<T> Scalar for T where
    T: Num + Clone + Ord + Hash + Debug + Display + FromPrimitive + Neg<Output = T>
{
}

pub type Rational = BigRational;
pub type Float = OrderedFloat<f64>;
pub type Float32 = OrderedFloat<f32>;

pub fn rational(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

/// Serde adapters writing scalars through `Display` and reading them back
/// with `FromStr`, so exact values survive as text such as `-3/7`.
pub(crate) mod as_text {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T: FromStr, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| D::Error::custom(format!("invalid scalar `{s}`")))
    }

    pub mod seq {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, T: FromStr, D: Deserializer<'de>>(d: D) -> Result<Vec<T>, D::Error> {
            Vec::<String>::deserialize(d)?
                .into_iter()
                .map(|s| s.parse().map_err(|_| D::Error::custom(format!("invalid scalar `{s}`"))))
                .collect()
        }
    }
}
