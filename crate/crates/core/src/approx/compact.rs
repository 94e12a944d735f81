//! The coordinatewise map `x ↦ x/(1+x)` from `(−1, ∞)^n` onto
//! `(−∞, 1)^n`, and its inverse `y ↦ y/(1−y)`.

use rug::Rational;

use crate::error::{Error, Result};

pub fn compactify(x: &[Rational]) -> Result<Vec<Rational>> {
    x.iter()
        .map(|v| {
            if *v <= -1 {
                return Err(Error::DomainViolation(format!("coordinate {v} ≤ −1")));
            }
            let d = Rational::from(v + 1u32);
            Ok(Rational::from(v / &d))
        })
        .collect()
}

pub fn decompactify(y: &[Rational]) -> Result<Vec<Rational>> {
    y.iter()
        .map(|v| {
            if *v >= 1 {
                return Err(Error::DomainViolation(format!("coordinate {v} ≥ 1")));
            }
            let d = Rational::from(1u32 - v);
            Ok(Rational::from(v / &d))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::height_rational;

    #[test]
    fn examples() {
        assert_eq!(compactify(&[Rational::new()]).unwrap(), vec![Rational::new()]);
        let h = compactify(&[Rational::from(1)]).unwrap();
        assert_eq!(h, vec![Rational::from((1, 2))]);
        assert_eq!(height_rational(&h[0]).as_integer().unwrap(), 2);
        assert!(compactify(&[Rational::from(-1)]).is_err());
        assert!(decompactify(&[Rational::from(1)]).is_err());
        let x = vec![Rational::from((-1, 3)), Rational::from((7, 2))];
        assert_eq!(decompactify(&compactify(&x).unwrap()).unwrap(), x);
    }
}
