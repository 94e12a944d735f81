//! Parameter grids: `100`, `10,20,40`, `10..100`, `10..100:10`,
//! `8..128:x2` and `primes:50..200`.

use dioph_core::rootsum::primes_in;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub values: Vec<u64>,
    pub primes: bool,
}

fn num(s: &str) -> Result<u64, String> {
    s.trim().parse::<u64>().map_err(|_| format!("`{s}` is not a nonnegative integer"))
}

fn range(s: &str) -> Result<Vec<u64>, String> {
    let Some((a, rest)) = s.split_once("..") else {
        return Ok(vec![num(s)?]);
    };
    let (b, step) = match rest.split_once(':') {
        Some((b, st)) => (b, Some(st.trim())),
        None => (rest, None),
    };
    let (a, b) = (num(a)?, num(b)?);
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    match step {
        None => Ok((a..=b).collect()),
        Some(st) if st.starts_with('x') => {
            let f = num(&st[1..])?;
            if f < 2 || a == 0 {
                return Err(format!("bad geometric range `{s}`"));
            }
            let mut out = Vec::new();
            let mut v = a;
            while v <= b {
                out.push(v);
                v = v.checked_mul(f).ok_or("grid overflow")?;
            }
            Ok(out)
        }
        Some(st) => {
            let d = num(st)?;
            if d == 0 {
                return Err("zero step".into());
            }
            Ok((a..=b).step_by(d as usize).collect())
        }
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let s = s.trim();
    if let Some(r) = s.strip_prefix("primes:") {
        let (a, b) = r.split_once("..").ok_or_else(|| format!("expected primes:A..B, got `{s}`"))?;
        let values = primes_in(num(a)?, num(b)?);
        return Ok(Grid { values, primes: true });
    }
    let mut values = Vec::new();
    for part in s.split(',') {
        values.extend(range(part)?);
    }
    if values.is_empty() {
        return Err("empty grid".into());
    }
    Ok(Grid { values, primes: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_grid("100").unwrap().values, vec![100]);
        assert_eq!(parse_grid("10..13").unwrap().values, vec![10, 11, 12, 13]);
        assert_eq!(parse_grid("10..40:10").unwrap().values, vec![10, 20, 30, 40]);
        assert_eq!(parse_grid("8..64:x2").unwrap().values, vec![8, 16, 32, 64]);
        assert_eq!(parse_grid("5,7..8").unwrap().values, vec![5, 7, 8]);
        let p = parse_grid("primes:10..30").unwrap();
        assert!(p.primes);
        assert_eq!(p.values, vec![11, 13, 17, 19, 23, 29]);
        assert!(parse_grid("9..3").is_err());
    }
}
