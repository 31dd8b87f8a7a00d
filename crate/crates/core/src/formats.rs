//! JSON encodings of fans, divisors and exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fan::{build_fan, Fan, ToricDivisor};

pub const FAN_FORMAT: &str = "toricfan-v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    pub format: String,
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

impl FanFile {
    pub fn from_fan(f: &Fan) -> Self {
        FanFile {
            format: FAN_FORMAT.to_string(),
            dim: f.dim(),
            rays: f.rays().to_vec(),
            max_cones: f.max_cones().to_vec(),
        }
    }

    pub fn to_fan(&self) -> Result<Fan> {
        if self.format != FAN_FORMAT {
            return Err(Error::Parse(format!(
                "field \"format\" is {:?}, expected {FAN_FORMAT:?}",
                self.format
            )));
        }
        build_fan(self.dim, self.rays.clone(), self.max_cones.clone())
    }
}

pub fn fan_to_json(f: &Fan) -> String {
    serde_json::to_string(&FanFile::from_fan(f)).expect("fan serializes")
}

pub fn fan_from_json(s: &str) -> Result<Fan> {
    let file: FanFile = serde_json::from_str(s).map_err(|e| Error::Parse(format!("fan: {e}")))?;
    file.to_fan()
}

pub fn divisor_to_json(d: &ToricDivisor) -> String {
    serde_json::to_string(d).expect("divisor serializes")
}

pub fn divisor_from_json(s: &str) -> Result<ToricDivisor> {
    serde_json::from_str(s).map_err(|e| Error::Parse(format!("divisor: {e}")))
}

pub fn degree_from_json(s: &str) -> Result<Vec<i64>> {
    serde_json::from_str(s).map_err(|e| Error::Parse(format!("degree: {e}")))
}

/// Always `"p/q"`, with `q = 1` for integers.
pub fn rat_to_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `"p/q"` or `"p"`.
pub fn rat_from_string(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("{s:?} is not a rational"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p: BigInt = p.trim().parse().map_err(|_| bad())?;
    let q: BigInt = q.trim().parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(Error::Parse(format!("{s:?} has zero denominator")));
    }
    Ok(BigRational::new(p, q))
}

pub fn rats_to_strings(v: &[BigRational]) -> Vec<String> {
    v.iter().map(rat_to_string).collect()
}

pub fn rats_from_strings(v: &[String]) -> Result<Vec<BigRational>> {
    v.iter().map(|s| rat_from_string(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::example_fan;

    #[test]
    fn fan_round_trip() {
        let e = example_fan();
        let s = fan_to_json(&e);
        assert!(s.starts_with("{\"format\":\"toricfan-v1\",\"dim\":3,\"rays\":"));
        assert_eq!(fan_from_json(&s).unwrap(), e);
    }

    #[test]
    fn fan_schema_errors() {
        let short =
            r#"{"format":"toricfan-v1","dim":3,"rays":[[1,0,0],[0,1]],"max_cones":[[0,1]]}"#;
        assert!(matches!(fan_from_json(short), Err(Error::InvalidFan(m)) if m.contains("ray 1")));
        let unsorted = r#"{"format":"toricfan-v1","dim":1,"rays":[[1],[-1]],"max_cones":[[1,0]]}"#;
        assert!(
            matches!(fan_from_json(unsorted), Err(Error::InvalidFan(m)) if m.contains("[1, 0]"))
        );
        let extra = r#"{"format":"toricfan-v1","dim":1,"rays":[[1]],"max_cones":[[0]],"x":1}"#;
        assert!(matches!(fan_from_json(extra), Err(Error::Parse(_))));
        let version = r#"{"format":"toricfan-v2","dim":1,"rays":[[1]],"max_cones":[[0]]}"#;
        assert!(matches!(fan_from_json(version), Err(Error::Parse(_))));
    }

    #[test]
    fn rationals() {
        let x = rat_from_string("-6/4").unwrap();
        assert_eq!(rat_to_string(&x), "-3/2");
        assert_eq!(rat_to_string(&rat_from_string("5").unwrap()), "5/1");
        assert!(rat_from_string("1/0").is_err());
        assert!(rat_from_string("a").is_err());
    }

    #[test]
    fn divisor_round_trip() {
        let d = ToricDivisor::new(vec![1, 0, -2]);
        assert_eq!(divisor_to_json(&d), "{\"coeffs\":[1,0,-2]}");
        assert_eq!(divisor_from_json(&divisor_to_json(&d)).unwrap(), d);
        assert!(divisor_from_json("{\"coeffs\":[1],\"k\":0}").is_err());
    }
}
