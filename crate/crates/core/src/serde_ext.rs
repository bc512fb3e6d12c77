//! Serde helpers.

/// `Option<f64>` where infinities are written as the strings `"inf"` and
/// `"-inf"`, since JSON has no literal for them.
pub mod opt_f64_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(x) if *x == f64::INFINITY => s.serialize_str("inf"),
            Some(x) if *x == f64::NEG_INFINITY => s.serialize_str("-inf"),
            Some(x) if x.is_nan() => s.serialize_none(),
            Some(x) => s.serialize_f64(*x),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(None),
            Some(Repr::Num(x)) => Ok(Some(x)),
            Some(Repr::Text(t)) => match t.as_str() {
                "inf" | "+inf" | "infinity" => Ok(Some(f64::INFINITY)),
                "-inf" | "-infinity" => Ok(Some(f64::NEG_INFINITY)),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}
