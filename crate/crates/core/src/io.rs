//! Coefficient files: CSV with header `k,l,c` and one row per phase-space point.
//!
//! `c` may be a decimal or a fraction `p/q`; when every entry is an integer
//! or a fraction the exact values are kept as well.

use std::io::{Read, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::phase_space::PhasePoint;
use crate::simplex::SimplexState;

/// Tolerance for the simplex invariants of a coefficient file.
pub const FILE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub state: SimplexState,
    pub exact: Option<[BigRational; 9]>,
}

fn parse_exact(s: &str) -> Option<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

fn parse_value(s: &str) -> Result<(f64, Option<BigRational>)> {
    if let Some(q) = parse_exact(s) {
        let v = q.to_f64().ok_or_else(|| Error::Parse(format!("{s:?} is out of range")))?;
        return Ok((v, Some(q)));
    }
    if s.contains('/') {
        return Err(Error::Parse(format!("bad fraction {s:?}")));
    }
    let v: f64 = s.parse().map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
    Ok((v, None))
}

pub fn read_coefficients<R: Read>(r: R) -> Result<Coefficients> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["k", "l", "c"] {
        return Err(Error::Parse(format!("header must be \"k,l,c\", got {:?}", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut vals: [Option<(f64, Option<BigRational>)>; 9] = Default::default();
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        rows += 1;
        let int = |i: usize| -> Result<i64> {
            let v: i64 = rec[i].parse().map_err(|_| Error::Parse(format!("not an integer: {:?}", &rec[i])))?;
            if !(0..3).contains(&v) {
                return Err(Error::Parse(format!("coordinate {v} outside 0..=2")));
            }
            Ok(v)
        };
        let x = PhasePoint::new(int(0)?, int(1)?);
        if vals[x.index()].is_some() {
            return Err(Error::Parse(format!("point {x} listed twice")));
        }
        vals[x.index()] = Some(parse_value(&rec[2])?);
    }
    if rows != 9 {
        return Err(Error::Parse(format!("expected 9 rows, found {rows}")));
    }
    let vals: Vec<(f64, Option<BigRational>)> = vals.into_iter().map(|v| v.expect("nine distinct points")).collect();
    let c: [f64; 9] = std::array::from_fn(|i| vals[i].0);
    let state = SimplexState::with_tolerance(c, FILE_TOL)?;
    let exact = if vals.iter().all(|v| v.1.is_some()) {
        let e: Vec<BigRational> = vals.into_iter().map(|v| v.1.expect("checked")).collect();
        Some(e.try_into().expect("nine entries"))
    } else {
        None
    };
    Ok(Coefficients { state, exact })
}

pub fn read_coefficients_file(path: &std::path::Path) -> Result<Coefficients> {
    let f = std::fs::File::open(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    read_coefficients(f)
}

/// Writes `k,l,c` with 17 significant digits.
pub fn write_coefficients<W: Write>(s: &SimplexState, mut w: W) -> std::io::Result<()> {
    writeln!(w, "k,l,c")?;
    for x in PhasePoint::all() {
        writeln!(w, "{},{},{:.16e}", x.k, x.l, s.at(x))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = SimplexState::new([0.05, 0.2, 0.1, 0.15, 0.0, 0.1, 0.1, 0.25, 0.05]).unwrap();
        let mut buf = Vec::new();
        write_coefficients(&s, &mut buf).unwrap();
        let back = read_coefficients(buf.as_slice()).unwrap();
        assert_eq!(back.state, s);
        assert!(back.exact.is_none());
    }

    #[test]
    fn fractions_are_exact() {
        let mut text = String::from("k,l,c\n");
        for x in PhasePoint::all() {
            text.push_str(&format!("{},{},1/9\n", x.k, x.l));
        }
        let c = read_coefficients(text.as_bytes()).unwrap();
        let e = c.exact.unwrap();
        assert!(e.iter().all(|q| *q == BigRational::new(1.into(), 9.into())));
        assert!((c.state.coeffs()[4] - 1.0 / 9.0).abs() < 1e-17);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(read_coefficients("a,b,c\n".as_bytes()).is_err());
        assert!(read_coefficients("k,l,c\n0,0,1\n".as_bytes()).is_err());
        let mut dup = String::from("k,l,c\n");
        for _ in 0..9 {
            dup.push_str("0,0,1/9\n");
        }
        assert!(read_coefficients(dup.as_bytes()).is_err());
        let mut neg = String::from("k,l,c\n");
        for x in PhasePoint::all() {
            let v = if x.index() == 0 { "-1/9" } else { "5/36" };
            neg.push_str(&format!("{},{},{v}\n", x.k, x.l));
        }
        assert!(matches!(read_coefficients(neg.as_bytes()), Err(Error::InvalidState(_))));
        let mut badfrac = String::from("k,l,c\n");
        for x in PhasePoint::all() {
            badfrac.push_str(&format!("{},{},1/0\n", x.k, x.l));
        }
        assert!(read_coefficients(badfrac.as_bytes()).is_err());
    }
}
