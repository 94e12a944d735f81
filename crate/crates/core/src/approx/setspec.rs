//! Parametrized sets `X = closure φ(D) ∪ {p_1, …, p_m}` with declared
//! algebraic-locus metadata, and their text format.
//!
//! ```text
//! # graph of x^2
//! name = parabola
//! arity = 1
//! domain = [0, 1]
//! map = x ; x^2
//! locus = empty
//! ```
//!
//! `point = a ; b` lines add isolated points, `ambient = n` fixes the
//! dimension when there is no map, and `locus = system: g1 ; g2` lines
//! each declare one component of the algebraic locus as a polynomial
//! system (repeat the line for more components).

use std::fmt::Write as _;

use rug::{Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{parse_with_arity, Domain, Expr};
use crate::multipoly::MultiPoly;

#[derive(Clone, Debug, PartialEq)]
pub enum Locus {
    Empty,
    Unknown,
    /// Components, each the common zero set of a polynomial system in the
    /// ambient coordinates.
    Systems(Vec<Vec<Expr>>),
}

impl Locus {
    pub fn label(&self) -> &'static str {
        match self {
            Locus::Empty => "empty",
            Locus::Unknown => "unknown",
            Locus::Systems(_) => "system",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SetSpec {
    pub name: String,
    pub ambient: usize,
    pub arity: usize,
    pub domain: Option<Domain>,
    pub phi: Vec<Expr>,
    pub points: Vec<Vec<Rational>>,
    pub locus: Locus,
}

impl SetSpec {
    /// The empty subset of `R^n`.
    pub fn empty(n: usize) -> Self {
        SetSpec {
            name: "empty".into(),
            ambient: n,
            arity: 0,
            domain: None,
            phi: Vec::new(),
            points: Vec::new(),
            locus: Locus::Empty,
        }
    }

    pub fn from_map(name: &str, phi: Vec<Expr>, domain: Domain) -> Result<Self> {
        let s = SetSpec {
            name: name.into(),
            ambient: phi.len(),
            arity: domain.dim(),
            domain: Some(domain),
            phi,
            points: Vec::new(),
            locus: Locus::Unknown,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_points(mut self, points: Vec<Vec<Rational>>) -> Result<Self> {
        self.points.extend(points);
        self.validate()?;
        Ok(self)
    }

    pub fn with_locus(mut self, locus: Locus) -> Result<Self> {
        self.locus = locus;
        self.validate()?;
        Ok(self)
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty() && self.points.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(d) = &self.domain {
            if d.dim() != self.arity {
                return Err(Error::Invalid(format!(
                    "domain has dimension {}, arity is {}",
                    d.dim(),
                    self.arity
                )));
            }
            if self.phi.len() != self.ambient {
                return Err(Error::Invalid(format!(
                    "map has {} coordinates, ambient dimension is {}",
                    self.phi.len(),
                    self.ambient
                )));
            }
            if let Some(f) = self.phi.iter().find(|f| f.arity() > self.arity) {
                return Err(Error::Arity {
                    name: f.to_string(),
                    arity: self.arity,
                });
            }
            // The set is the closure of the image, so the map only has to
            // be defined in the interior; probe the centre.
            for f in &self.phi {
                f.eval_point(&d.mid(), 64)?;
            }
        } else if !self.phi.is_empty() {
            return Err(Error::Invalid("map given without a domain".into()));
        }
        if let Some(p) = self.points.iter().find(|p| p.len() != self.ambient) {
            return Err(Error::Invalid(format!(
                "point of dimension {} in ambient dimension {}",
                p.len(),
                self.ambient
            )));
        }
        if let Locus::Systems(sys) = &self.locus {
            for g in sys.iter().flatten() {
                if g.arity() > self.ambient {
                    return Err(Error::Arity {
                        name: g.to_string(),
                        arity: self.ambient,
                    });
                }
                if g.to_polynomial(self.ambient).is_none() {
                    return Err(Error::Invalid(format!("locus equation {g} is not a polynomial")));
                }
            }
        }
        Ok(())
    }

    /// Locus components as integer polynomial systems.
    pub fn locus_polynomials(&self) -> Vec<Vec<MultiPoly>> {
        match &self.locus {
            Locus::Systems(sys) => sys
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|g| g.to_polynomial(self.ambient).expect("validated polynomial"))
                        .collect()
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut name = String::from("unnamed");
        let mut ambient = None;
        let mut arity = None;
        let mut domain = None;
        let mut map_src: Option<(usize, String)> = None;
        let mut points = Vec::new();
        let mut locus = None;
        let mut systems: Vec<(usize, String)> = Vec::new();
        for (i, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = i + 1;
            let (key, val) = line.split_once('=').ok_or_else(|| Error::Syntax {
                line: lineno,
                column: 1,
                message: "expected `key = value`".into(),
            })?;
            let val = val.trim();
            let bad = |m: String| Error::Syntax {
                line: lineno,
                column: 1,
                message: m,
            };
            match key.trim() {
                "name" => name = val.to_string(),
                "ambient" => ambient = Some(val.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                "arity" => arity = Some(val.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                "domain" => domain = Some(parse_box(val).map_err(|e| bad(e.to_string()))?),
                "map" => map_src = Some((lineno, val.to_string())),
                "point" => points.push(
                    val.split(';')
                        .map(|t| parse_rational(t.trim()))
                        .collect::<Result<Vec<_>>>()
                        .map_err(|e| bad(e.to_string()))?,
                ),
                "locus" => {
                    if let Some(rest) = val.strip_prefix("system:") {
                        systems.push((lineno, rest.trim().to_string()));
                    } else {
                        locus = Some(match val {
                            "empty" => Locus::Empty,
                            "unknown" => Locus::Unknown,
                            other => return Err(bad(format!("unknown locus status `{other}`"))),
                        });
                    }
                }
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        let arity = arity.or_else(|| domain.as_ref().map(Domain::dim)).unwrap_or(0);
        let phi = match &map_src {
            Some((l, s)) => s
                .split(';')
                .map(|t| parse_with_arity(t.trim(), arity).map_err(|e| relocate(e, *l)))
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let ambient = ambient
            .or((!phi.is_empty()).then_some(phi.len()))
            .or(points.first().map(Vec::len))
            .unwrap_or(0);
        if !systems.is_empty() && locus.is_some() {
            return Err(Error::Invalid("locus declared both as a status and as systems".into()));
        }
        let locus = if systems.is_empty() {
            locus.unwrap_or(Locus::Unknown)
        } else {
            Locus::Systems(
                systems
                    .iter()
                    .map(|(l, s)| {
                        s.split(';')
                            .map(|t| parse_with_arity(t.trim(), ambient).map_err(|e| relocate(e, *l)))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?,
            )
        };
        let spec = SetSpec {
            name,
            ambient,
            arity,
            domain,
            phi,
            points,
            locus,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "ambient = {}", self.ambient);
        if let Some(d) = &self.domain {
            let _ = writeln!(s, "arity = {}", self.arity);
            let _ = writeln!(s, "domain = {d}");
            let m: Vec<String> = self.phi.iter().map(Expr::to_string).collect();
            let _ = writeln!(s, "map = {}", m.join(" ; "));
        }
        for p in &self.points {
            let v: Vec<String> = p.iter().map(Rational::to_string).collect();
            let _ = writeln!(s, "point = {}", v.join(" ; "));
        }
        match &self.locus {
            Locus::Systems(sys) => {
                for c in sys {
                    let v: Vec<String> = c.iter().map(Expr::to_string).collect();
                    let _ = writeln!(s, "locus = system: {}", v.join(" ; "));
                }
            }
            l => {
                let _ = writeln!(s, "locus = {}", l.label());
            }
        }
        s
    }
}

fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Syntax { column, message, .. } => Error::Syntax { line, column, message },
        other => other,
    }
}

/// Parses `-3/4`, `7`, `0.125` or `1e-3` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Invalid(format!("`{s}` is not a rational number"));
    let s = s.trim();
    if let Ok(q) = s.parse::<Rational>() {
        return Ok(q);
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() || !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: Integer = format!("{ip}{fp}").parse().map_err(|_| bad())?;
    let scale = exp - fp.len() as i32;
    let mut q = Rational::from(digits);
    if scale >= 0 {
        q *= Integer::from(Integer::u_pow_u(10, scale as u32));
    } else {
        q /= Integer::from(Integer::u_pow_u(10, (-scale) as u32));
    }
    Ok(if neg { -q } else { q })
}

/// Parses `[a, b] x [c, d] x …`.
pub fn parse_box(s: &str) -> Result<Domain> {
    let mut pairs = Vec::new();
    for part in s.split(" x ") {
        let inner = part
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Invalid(format!("`{part}` is not an interval [a, b]")))?;
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| Error::Invalid(format!("`{part}` is not an interval [a, b]")))?;
        pairs.push((parse_rational(a)?, parse_rational(b)?));
    }
    Domain::from_pairs(&pairs)
}

#[derive(Serialize)]
struct SpecSummary<'a> {
    name: &'a str,
    ambient: usize,
    arity: usize,
    domain: Option<String>,
    map: Vec<String>,
    points: Vec<Vec<String>>,
    locus: &'a str,
}

impl Serialize for SetSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecSummary {
            name: &self.name,
            ambient: self.ambient,
            arity: self.arity,
            domain: self.domain.as_ref().map(Domain::to_string),
            map: self.phi.iter().map(Expr::to_string).collect(),
            points: self
                .points
                .iter()
                .map(|p| p.iter().map(Rational::to_string).collect())
                .collect(),
            locus: self.locus.label(),
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let src = "# parabola\nname = parabola\narity = 1\ndomain = [0, 1]\nmap = x ; x^2\nlocus = system: y - x^2\n";
        let s = SetSpec::parse(src).unwrap();
        assert_eq!(s.ambient, 2);
        assert_eq!(s.locus_polynomials().len(), 1);
        let t = SetSpec::parse(&s.to_text()).unwrap();
        assert_eq!(s, t);
        let p = SetSpec::parse("ambient = 2\npoint = 1/2 ; -0.25\nlocus = empty").unwrap();
        assert_eq!(p.points, vec![vec![Rational::from((1, 2)), Rational::from((-1, 4))]]);
        assert!(SetSpec::parse("map = x\n").is_err());
        assert!(matches!(
            SetSpec::parse("domain = [0,1]\nmap = y").unwrap_err(),
            Error::Arity { .. }
        ));
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1e-3").unwrap(), Rational::from((1, 1000)));
        assert_eq!(parse_rational("-2.5").unwrap(), Rational::from((-5, 2)));
        assert_eq!(parse_rational("3/6").unwrap(), Rational::from((1, 2)));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational(".").is_err());
    }
}
