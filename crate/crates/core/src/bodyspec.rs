//! Text form of a body: `ball`, `ellipsoid:a1,a2[,a3]`, `pball:p`,
//! `poly:h:c0,c1,...,ch`.
//!
//! For `poly`, coefficient `c_i` multiplies `x^(h−i)·y^i`, so `x⁴ + y⁴` is
//! `poly:4:1,0,0,0,1`.

use crate::error::{Error, Result};
use crate::geometry::StarBody;

fn parse_err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

/// Comma-separated reals starting at byte `offset` of the full text.
fn parse_list(s: &str, offset: usize) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut pos = offset;
    for tok in s.split(',') {
        let trimmed = tok.trim();
        let v: f64 = trimmed
            .parse()
            .map_err(|_| parse_err(pos, format!("expected a number, found {trimmed:?}")))?;
        if !v.is_finite() {
            return Err(parse_err(pos, format!("number must be finite, found {trimmed:?}")));
        }
        out.push(v);
        pos += tok.len() + 1;
    }
    Ok(out)
}

/// Parses a body for dimension `k`. Ellipsoids take their dimension from the
/// axis count, which must agree with `k`.
pub fn parse_body_spec(text: &str, k: usize) -> Result<StarBody> {
    let text = text.trim();
    let (head, rest) = match text.find(':') {
        Some(i) => (&text[..i], Some((&text[i + 1..], i + 1))),
        None => (text, None),
    };
    let wrap = |pos: usize, e: Error| match e {
        Error::InvalidBody(m) => parse_err(pos, m),
        other => other,
    };
    match (head, rest) {
        ("ball", None) => StarBody::ball(k).map_err(|e| wrap(0, e)),
        ("ellipsoid", Some((args, at))) => {
            let axes = parse_list(args, at)?;
            if axes.len() != k {
                return Err(parse_err(
                    at,
                    format!("ellipsoid has {} semi-axes but k = {k}", axes.len()),
                ));
            }
            StarBody::ellipsoid(&axes).map_err(|e| wrap(at, e))
        }
        ("pball", Some((arg, at))) => {
            let p: u32 = arg
                .trim()
                .parse()
                .ok()
                .filter(|p| *p >= 2 && p % 2 == 0)
                .ok_or_else(|| {
                    parse_err(at, format!("p must be an even integer >= 2, found {arg:?}"))
                })?;
            StarBody::pnorm_ball(p, k).map_err(|e| wrap(at, e))
        }
        ("poly", Some((args, at))) => {
            if k != 2 {
                return Err(parse_err(0, format!("poly bodies are planar, but k = {k}")));
            }
            let (deg, coeffs, cat) = match args.find(':') {
                Some(i) => (&args[..i], &args[i + 1..], at + i + 1),
                None => return Err(parse_err(at, "expected poly:h:c0,...,ch")),
            };
            let h: u32 = deg
                .trim()
                .parse()
                .ok()
                .filter(|h| *h >= 2 && h % 2 == 0)
                .ok_or_else(|| {
                    parse_err(at, format!("degree must be an even integer >= 2, found {deg:?}"))
                })?;
            let c = parse_list(coeffs, cat)?;
            StarBody::polynomial(h, &c).map_err(|e| wrap(cat, e))
        }
        ("ball", Some((_, at))) => Err(parse_err(at - 1, "ball takes no arguments")),
        ("ellipsoid" | "pball" | "poly", None) => {
            Err(parse_err(head.len(), format!("{head} needs ':' and arguments")))
        }
        _ => Err(parse_err(
            0,
            format!("unknown body {head:?}; expected ball, ellipsoid, pball or poly"),
        )),
    }
}
