//! Integer-coefficient polynomials in one variable `k` and reduced rational
//! functions built from them. All central-charge arithmetic runs through this
//! module; no floating point anywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Polynomial with BigInt coefficients, ascending order, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly(pub Vec<BigInt>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: i64) -> Self {
        Poly::from_coeffs(vec![BigInt::from(c)])
    }

    /// The monomial a*k + b.
    pub fn linear(a: i64, b: i64) -> Self {
        Poly::from_coeffs(vec![BigInt::from(b), BigInt::from(a)])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map(|c| c.is_zero()) == Some(true) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.0.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            out[i] += c;
        }
        Poly::from_coeffs(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        Poly::from_coeffs(self.0.iter().map(|x| x * c).collect())
    }

    /// Content: gcd of coefficients, sign chosen so the leading coefficient
    /// of self/content is positive.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.0 {
            g = g.gcd(c);
        }
        if g.is_zero() {
            return BigInt::one();
        }
        if self.leading().is_negative() {
            g = -g;
        }
        g
    }

    pub fn primitive(&self) -> Poly {
        let c = self.content();
        Poly(self.0.iter().map(|x| x / &c).collect())
    }

    /// Exact division; panics if not divisible (internal use only).
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.pseudo_div(d);
        assert!(r.is_zero(), "polynomial division not exact");
        q
    }

    /// Divide with rational arithmetic, returning (quotient, remainder) where
    /// both are scaled back to primitive integer polys times rational factors
    /// being dropped. Suited only for exactness checks and gcd.
    fn pseudo_div(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero());
        let mut rem: Vec<BigRational> = self
            .0
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let dd: Vec<BigRational> = d
            .0
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let mut quo = vec![BigRational::zero(); rem.len().saturating_sub(dd.len()) + 1];
        while rem.len() >= dd.len() && rem.iter().any(|c| !c.is_zero()) {
            while rem.last().map(|c| c.is_zero()) == Some(true) {
                rem.pop();
            }
            if rem.len() < dd.len() {
                break;
            }
            let shift = rem.len() - dd.len();
            let f = rem.last().unwrap() / dd.last().unwrap();
            quo[shift] = f.clone();
            for (i, c) in dd.iter().enumerate() {
                let sub = &f * c;
                rem[shift + i] -= sub;
            }
            rem.pop();
        }
        (rat_poly_to_int(&quo), rat_poly_to_int(&rem))
    }

    /// Primitive gcd via rational euclidean algorithm.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.primitive();
        }
        if other.is_zero() {
            return self.primitive();
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.pseudo_div(&b);
            a = b;
            b = r.primitive();
        }
        a.primitive()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// All rational roots, via the rational-root theorem on the primitive
    /// part (complete for the degrees that occur here).
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let mut p = self.primitive();
        if p.is_zero() {
            return Vec::new();
        }
        // strip k^m factors: root k=0
        let mut roots = Vec::new();
        let mut shift = 0usize;
        while p.0.first().map(|c| c.is_zero()) == Some(true) {
            p.0.remove(0);
            shift += 1;
        }
        if shift > 0 {
            roots.push(BigRational::zero());
        }
        if p.0.len() <= 1 {
            return roots;
        }
        let a0 = p.0.first().unwrap().abs();
        let an = p.leading().abs();
        let num_divs = divisors(&a0);
        let den_divs = divisors(&an);
        for nu in &num_divs {
            for de in &den_divs {
                for sign in [1i64, -1] {
                    let cand = BigRational::new(nu * BigInt::from(sign), de.clone());
                    if p.eval(&cand).is_zero() && !roots.contains(&cand) {
                        roots.push(cand);
                    }
                }
            }
        }
        roots.sort();
        roots
    }
}

fn rat_poly_to_int(coeffs: &[BigRational]) -> Poly {
    let mut denom = BigInt::one();
    for c in coeffs {
        denom = denom.lcm(c.denom());
    }
    Poly::from_coeffs(
        coeffs
            .iter()
            .map(|c| c.numer() * (&denom / c.denom()))
            .collect(),
    )
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    // n is small in practice (products of dims); trial division suffices.
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let q = &n / &d;
            if q != d {
                out.push(q);
            }
        }
        d += 1;
    }
    out.sort();
    out
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            let show_coeff = mag != BigInt::one() || i == 0;
            if show_coeff {
                write!(f, "{}", mag)?;
            }
            match i {
                0 => {}
                1 => {
                    if show_coeff {
                        write!(f, "*k")?;
                    } else {
                        write!(f, "k")?;
                    }
                }
                _ => {
                    if show_coeff {
                        write!(f, "*k^{}", i)?;
                    } else {
                        write!(f, "k^{}", i)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Reduced ratio of integer polynomials: gcd(num, den) = 1 and the leading
/// coefficient of the denominator is positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFn {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFn {
    pub fn zero() -> Self {
        RationalFn {
            num: Poly::zero(),
            den: Poly::constant(1),
        }
    }

    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RationalFn::zero();
        }
        let g = num.gcd(&den);
        let mut num = num.div_exact(&g);
        let mut den = den.div_exact(&g);
        // normalize contents: make den primitive with positive leading coeff,
        // pushing the leftover rational scalar into num exactly when possible;
        // keep integer coefficients by cross-scaling.
        let cn = num.content();
        let cd = den.content();
        let g2 = cn.gcd(&cd) * if den.leading().is_negative() { -1 } else { 1 };
        num = Poly(num.0.iter().map(|x| x / &g2).collect());
        den = Poly(den.0.iter().map(|x| x / &g2).collect());
        RationalFn { num, den }
    }

    pub fn from_rat(q: &BigRational) -> Self {
        RationalFn::new(
            Poly::from_coeffs(vec![q.numer().clone()]),
            Poly::from_coeffs(vec![q.denom().clone()]),
        )
    }

    pub fn add(&self, other: &RationalFn) -> RationalFn {
        RationalFn::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &RationalFn) -> RationalFn {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul_rat(&self, q: &BigRational) -> RationalFn {
        RationalFn::new(
            self.num.scale(q.numer()),
            self.den.scale(q.denom()),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Structural equality after reduction is used for identity checks; this
    /// cross-multiplied form is kept for reporting differences.
    pub fn equivalent(&self, other: &RationalFn) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::constant(1) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Product of linear factors (k + a_i), convenient for fixture denominators.
pub fn linear_product(terms: &[(i64, i64)]) -> Poly {
    let mut p = Poly::constant(1);
    for &(a, b) in terms {
        p = p.mul(&Poly::linear(a, b));
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_cancels_common_factors() {
        // (k^2-1)/(k+1) = k-1
        let f = RationalFn::new(
            Poly::from_coeffs(vec![(-1).into(), 0.into(), 1.into()]),
            Poly::linear(1, 1),
        );
        assert_eq!(f.num, Poly::linear(1, -1));
        assert_eq!(f.den, Poly::constant(1));
    }

    #[test]
    fn rational_roots_finds_half_integers() {
        // 2k^2 + 3k - 5 = (2k+5)(k-1)
        let p = Poly::from_coeffs(vec![(-5).into(), 3.into(), 2.into()]);
        let roots = p.rational_roots();
        assert_eq!(
            roots,
            vec![
                BigRational::new((-5).into(), 2.into()),
                BigRational::from_integer(1.into())
            ]
        );
    }

    #[test]
    fn display_is_readable() {
        let p = Poly::from_coeffs(vec![(-1).into(), 0.into(), 2.into()]);
        assert_eq!(p.to_string(), "2*k^2 - 1");
    }
}
