//! Univariate polynomials over GF(2) as bitsets, lowest degree first.

use std::fmt;

/// A polynomial in Z2[x]; bit `i` of the backing words is the coefficient
/// of `x^i`. Canonical form keeps no trailing zero words.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct UPoly2 {
    words: Vec<u64>,
}

impl UPoly2 {
    pub fn zero() -> UPoly2 {
        UPoly2::default()
    }

    pub fn one() -> UPoly2 {
        UPoly2 { words: vec![1] }
    }

    pub fn x() -> UPoly2 {
        UPoly2 { words: vec![2] }
    }

    /// The monomial `x^k`.
    pub fn monomial(k: usize) -> UPoly2 {
        let mut words = vec![0u64; k / 64 + 1];
        words[k / 64] = 1 << (k % 64);
        UPoly2 { words }
    }

    pub fn from_exponents(exps: &[usize]) -> UPoly2 {
        let mut p = UPoly2::zero();
        for &e in exps {
            p = p.add(&UPoly2::monomial(e));
        }
        p
    }

    fn trim(mut self) -> UPoly2 {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words == [1]
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let last = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + (63 - last.leading_zeros() as usize))
    }

    pub fn coeff(&self, k: usize) -> bool {
        self.words
            .get(k / 64)
            .map_or(false, |w| w >> (k % 64) & 1 == 1)
    }

    pub fn add(&self, other: &UPoly2) -> UPoly2 {
        let n = self.words.len().max(other.words.len());
        let mut words = vec![0u64; n];
        for (i, w) in words.iter_mut().enumerate() {
            *w = self.words.get(i).copied().unwrap_or(0) ^ other.words.get(i).copied().unwrap_or(0);
        }
        UPoly2 { words }.trim()
    }

    pub fn mul(&self, other: &UPoly2) -> UPoly2 {
        if self.is_zero() || other.is_zero() {
            return UPoly2::zero();
        }
        let n = self.words.len() + other.words.len();
        let mut words = vec![0u64; n];
        for (i, &a) in self.words.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for bit in 0..64 {
                if a >> bit & 1 == 0 {
                    continue;
                }
                for (j, &b) in other.words.iter().enumerate() {
                    if b == 0 {
                        continue;
                    }
                    words[i + j] ^= b << bit;
                    if bit > 0 {
                        words[i + j + 1] ^= b >> (64 - bit);
                    }
                }
            }
        }
        UPoly2 { words }.trim()
    }

    /// Quotient and remainder of carryless long division. Panics on a zero
    /// divisor.
    pub fn divrem(&self, divisor: &UPoly2) -> (UPoly2, UPoly2) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let mut rem = self.clone();
        let mut quot = UPoly2::zero();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let shift = rd - dd;
            quot = quot.add(&UPoly2::monomial(shift));
            rem = rem.add(&divisor.mul(&UPoly2::monomial(shift)));
        }
        (quot, rem)
    }

    pub fn rem(&self, divisor: &UPoly2) -> UPoly2 {
        self.divrem(divisor).1
    }

    pub fn divides(&self, other: &UPoly2) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.rem(self).is_zero()
    }
}

/// Euclidean greatest common divisor; over GF(2) the result is
/// automatically monic. `gcd(f, 0) = f` and `gcd(0, 0) = 0`.
pub fn upoly_gcd(f: &UPoly2, g: &UPoly2) -> UPoly2 {
    let mut a = f.clone();
    let mut b = g.clone();
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    a
}

/// The continuant polynomials `Q_{-1} = 0`, `Q_0 = 1`,
/// `Q_k = x Q_{k-1} + Q_{k-2}` over GF(2); they are the entries of powers
/// of the transfer matrix `[[x, 1], [1, 0]]`.
pub fn q_poly(k: i64) -> UPoly2 {
    assert!(k >= -1, "q_poly is defined for k >= -1");
    let x = UPoly2::x();
    let (mut prev, mut cur) = (UPoly2::zero(), UPoly2::one()); // Q_{-1}, Q_0
    if k == -1 {
        return prev;
    }
    for _ in 0..k {
        let next = x.mul(&cur).add(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

impl fmt::Display for UPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(deg) = self.degree() else {
            return f.write_str("0");
        };
        let mut first = true;
        for k in 0..=deg {
            if !self.coeff(k) {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => f.write_str("1")?,
                1 => f.write_str("x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}
