//! Text formats read by the command line and the fuzz targets.

use std::fmt::Write as _;

use crate::curve::Curve;
use crate::jets::JetPair;
use crate::wn::EndpointTuple;
use crate::{Error, Result};

/// A `curve/1` document.
pub fn parse_curve_json(s: &str) -> Result<Curve> {
    Curve::from_json(s)
}

/// `{"left": [...], "right": [...]}`; a missing side is the zero jet.
pub fn parse_jets_json(s: &str) -> Result<JetPair> {
    Ok(serde_json::from_str(s)?)
}

/// A JSON list `[b0, …, bn]`.
pub fn parse_tuple_json(s: &str) -> Result<EndpointTuple> {
    Ok(serde_json::from_str(s)?)
}

/// Comma separated decimals such as `0, 0.25,1e-3`.
pub fn parse_number_list(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Err(Error::Parse("empty number list".into()));
    }
    s.split(',')
        .map(|item| {
            let item = item.trim();
            let x: f64 = item
                .parse()
                .map_err(|_| Error::Parse(format!("not a number: {item:?}")))?;
            if !x.is_finite() {
                return Err(Error::Parse(format!("not finite: {item:?}")));
            }
            Ok(x)
        })
        .collect()
}

/// `x,f,df` rows on `points` evenly spaced points of the domain.
pub fn samples_csv(curve: &Curve, points: usize) -> Result<String> {
    if points < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 points, got {points}"
        )));
    }
    let [lo, hi] = curve.domain();
    let mut out = String::from("x,f,df\n");
    for i in 0..points {
        let x = if i + 1 == points {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (points - 1) as f64
        };
        let f = curve.eval(x)?;
        let df = curve.deriv(x)?;
        writeln!(out, "{x},{f},{df}").expect("writing to a String");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_lists() {
        assert_eq!(
            parse_number_list("0, 0.25,1e-3").unwrap(),
            vec![0.0, 0.25, 1e-3]
        );
        assert!(parse_number_list("").is_err());
        assert!(parse_number_list("1,,2").is_err());
        assert!(parse_number_list("nan").is_err());
        assert!(parse_number_list("inf").is_err());
    }

    #[test]
    fn jets_and_tuples() {
        let j = parse_jets_json(r#"{"left": [1.0], "right": [0, 0, 5]}"#).unwrap();
        assert_eq!(j.left.values, vec![1.0]);
        assert_eq!(parse_jets_json("{}").unwrap(), JetPair::default());
        assert!(parse_jets_json(r#"{"left": [-1.0]}"#).is_err());
        assert_eq!(parse_tuple_json("[1, 3, 5]").unwrap().n(), 2);
        assert!(parse_tuple_json("[]").is_err());
        assert!(parse_tuple_json(r#"{"b": 1}"#).is_err());
    }

    #[test]
    fn csv_rows() {
        let c = Curve::identity([0.0, 1.0]).unwrap();
        let s = samples_csv(&c, 3).unwrap();
        assert_eq!(s, "x,f,df\n0,0,1\n0.5,0.5,1\n1,1,1\n");
    }
}
