//! Truncated formal series `Q[h]/(h^(N+1))` with exact rational coefficients.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parse "p/q" or "p".
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// An element of `Q[h]/(h^(N+1))`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SeriesScalar {
    coeffs: Vec<Rational>,
}

/// Result of a downward shift: the value and the highest h-power still exact.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Shifted {
    pub value: SeriesScalar,
    pub exact_through: usize,
}

impl SeriesScalar {
    pub fn zero(order: usize) -> Self {
        SeriesScalar { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c·h^k`, zero when `k > order`.
    pub fn monomial(c: Rational, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn h_power(k: usize, order: usize) -> Self {
        Self::monomial(Rational::one(), k, order)
    }

    /// Builds from coefficients; entries past `order` are dropped, missing ones are zero.
    pub fn from_coeffs(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order + 1, Rational::zero());
        SeriesScalar { coeffs }
    }

    pub fn trunc_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set_coeff(&mut self, k: usize, c: Rational) {
        if k < self.coeffs.len() {
            self.coeffs[k] = c;
        }
    }

    pub fn constant_term(&self) -> &Rational {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    /// Lowest h-power with nonzero coefficient; `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::TruncationMismatch(self.trunc_order(), other.trunc_order()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self * other)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        SeriesScalar { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Multiplication by `h^k` for `k ≥ 0`.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.coeffs.len();
        let mut out = Self::zero(n - 1);
        for i in 0..n.saturating_sub(k) {
            out.coeffs[i + k] = self.coeffs[i].clone();
        }
        out
    }

    /// Multiplies by `h^k`. Negative `k` needs the lowest `|k|` coefficients to vanish;
    /// the top `|k|` coefficients of the result are then unknown and reported as such.
    pub fn h_shift(&self, k: i64) -> Result<Shifted> {
        let n = self.trunc_order();
        if k >= 0 {
            return Ok(Shifted { value: self.shift_up(k as usize), exact_through: n });
        }
        let d = (-k) as usize;
        if let Some(v) = self.valuation() {
            if v < d {
                return Err(Error::InexactDivision(format!("{self} by h^{d}")));
            }
        }
        let mut out = Self::zero(n);
        for i in d..=n {
            out.coeffs[i - d] = self.coeffs[i].clone();
        }
        let exact_through = n.saturating_sub(d);
        Ok(Shifted { value: out, exact_through })
    }

    /// Exact division by `h^d` when the caller only needs the result modulo `h^(N+1-d)`.
    pub fn div_h(&self, d: usize) -> Result<Self> {
        Ok(self.h_shift(-(d as i64))?.value)
    }

    pub fn invert(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnit);
        }
        let n = self.trunc_order();
        let a0inv = self.coeffs[0].recip();
        let mut out = Self::zero(n);
        out.coeffs[0] = a0inv.clone();
        for k in 1..=n {
            let mut s = Rational::zero();
            for j in 1..=k {
                s += &self.coeffs[j] * &out.coeffs[k - j];
            }
            out.coeffs[k] = -s * &a0inv;
        }
        Ok(out)
    }

    /// Same value at another truncation order (drops or zero-pads high terms).
    pub fn with_order(&self, order: usize) -> Self {
        Self::from_coeffs(self.coeffs.clone(), order)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }

    pub fn from_strings(s: &[String], order: usize) -> Result<Self> {
        if s.len() > order + 1 {
            let extra = s[order + 1..].iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>()?;
            if extra.iter().any(|x| !x.is_zero()) {
                return Err(Error::Parse(format!("series exceeds truncation order {order}")));
            }
        }
        let coeffs = s.iter().take(order + 1).map(|x| parse_rational(x)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(coeffs, order))
    }
}

impl fmt::Display for SeriesScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c.clone()) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let hpart = match k {
                0 => String::new(),
                1 => "h".to_string(),
                _ => format!("h^{k}"),
            };
            if hpart.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{hpart}")?;
            } else {
                write!(f, "{}{}", format_rational(&mag), hpart)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &SeriesScalar {
    type Output = SeriesScalar;
    fn add(self, rhs: &SeriesScalar) -> SeriesScalar {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "truncation mismatch");
        SeriesScalar { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &SeriesScalar {
    type Output = SeriesScalar;
    fn sub(self, rhs: &SeriesScalar) -> SeriesScalar {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "truncation mismatch");
        SeriesScalar { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &SeriesScalar {
    type Output = SeriesScalar;
    fn mul(self, rhs: &SeriesScalar) -> SeriesScalar {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "truncation mismatch");
        let n = self.coeffs.len();
        let mut out = SeriesScalar::zero(n - 1);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        out
    }
}

impl Neg for &SeriesScalar {
    type Output = SeriesScalar;
    fn neg(self) -> SeriesScalar {
        SeriesScalar { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

impl AddAssign<&SeriesScalar> for SeriesScalar {
    fn add_assign(&mut self, rhs: &SeriesScalar) {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "truncation mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            if !b.is_zero() {
                *a += b;
            }
        }
    }
}

impl SubAssign<&SeriesScalar> for SeriesScalar {
    fn sub_assign(&mut self, rhs: &SeriesScalar) {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "truncation mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            if !b.is_zero() {
                *a -= b;
            }
        }
    }
}

/// Dense matrix over the truncated ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    order: usize,
    data: Vec<SeriesScalar>,
}

/// One diagonal entry of a Smith form: `h^k` (k = 0 is a unit) or zero.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Divisor {
    Power(usize),
    Zero,
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divisor::Power(k) => write!(f, "h^{k}"),
            Divisor::Zero => write!(f, "0"),
        }
    }
}

/// `left · m · right = diag(divisors)`, with `right_inv = right^{-1}`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub divisors: Vec<Divisor>,
    pub left: SeriesMatrix,
    pub right: SeriesMatrix,
    pub right_inv: SeriesMatrix,
}

impl SeriesMatrix {
    pub fn zeros(rows: usize, cols: usize, order: usize) -> Self {
        SeriesMatrix { rows, cols, order, data: vec![SeriesScalar::zero(order); rows * cols] }
    }

    pub fn identity(n: usize, order: usize) -> Self {
        let mut m = Self::zeros(n, n, order);
        for i in 0..n {
            m.set(i, i, SeriesScalar::one(order));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<SeriesScalar>>, order: usize) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Parse("ragged matrix".into()));
            }
            for x in row {
                if x.trunc_order() != order {
                    return Err(Error::TruncationMismatch(order, x.trunc_order()));
                }
                data.push(x);
            }
        }
        Ok(SeriesMatrix { rows: r, cols: c, order, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn trunc_order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &SeriesScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: SeriesScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &SeriesScalar) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[SeriesScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(SeriesScalar::is_zero)
    }

    pub fn mul(&self, other: &SeriesMatrix) -> Result<SeriesMatrix> {
        if self.cols != other.rows {
            return Err(Error::Parse(format!(
                "shape mismatch {}x{} · {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.order != other.order {
            return Err(Error::TruncationMismatch(self.order, other.order));
        }
        let mut out = SeriesMatrix::zeros(self.rows, other.cols, self.order);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SeriesMatrix) -> SeriesMatrix {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        SeriesMatrix { data, ..*self }
    }

    pub fn scale(&self, s: &SeriesScalar) -> SeriesMatrix {
        SeriesMatrix { data: self.data.iter().map(|a| a * s).collect(), ..*self }
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = SeriesMatrix::zeros(self.rows, self.cols + other.cols, self.order);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_dst += f · row_src
    fn row_axpy(&mut self, dst: usize, src: usize, f: &SeriesScalar) {
        for j in 0..self.cols {
            let v = f * self.get(src, j);
            if !v.is_zero() {
                self.data[dst * self.cols + j] += &v;
            }
        }
    }

    /// col_dst += f · col_src
    fn col_axpy(&mut self, dst: usize, src: usize, f: &SeriesScalar) {
        for i in 0..self.rows {
            let v = self.get(i, src) * f;
            if !v.is_zero() {
                self.data[i * self.cols + dst] += &v;
            }
        }
    }

    fn scale_row(&mut self, r: usize, f: &SeriesScalar) {
        for j in 0..self.cols {
            let v = f * self.get(r, j);
            self.set(r, j, v);
        }
    }

    /// Smith normal form over the local ring `Q[h]/(h^(N+1))`.
    ///
    /// Pivots are chosen by minimal valuation, so each pivot divides everything
    /// remaining in its row and column and the divisors come out sorted.
    pub fn smith_normal_form(&self) -> SmithForm {
        let n = self.order;
        let mut a = self.clone();
        let mut left = SeriesMatrix::identity(self.rows, n);
        let mut right = SeriesMatrix::identity(self.cols, n);
        let mut right_inv = SeriesMatrix::identity(self.cols, n);
        let mut divisors = Vec::new();
        let steps = self.rows.min(self.cols);
        for t in 0..steps {
            let mut best: Option<(usize, usize, usize)> = None;
            for i in t..a.rows {
                for j in t..a.cols {
                    if let Some(v) = a.get(i, j).valuation() {
                        if best.is_none_or(|(bv, _, _)| v < bv) {
                            best = Some((v, i, j));
                        }
                    }
                }
            }
            let Some((v, pi, pj)) = best else {
                divisors.extend(std::iter::repeat_n(Divisor::Zero, steps - t));
                break;
            };
            a.swap_rows(t, pi);
            left.swap_rows(t, pi);
            a.swap_cols(t, pj);
            right.swap_cols(t, pj);
            right_inv.swap_rows(t, pj);
            // pivot = h^v · u with u a unit; normalise the pivot to h^v.
            let u = a.get(t, t).div_h(v).expect("valuation bounds the shift");
            let uinv = u.invert().expect("unit by construction");
            a.scale_row(t, &uinv);
            left.scale_row(t, &uinv);
            for i in (t + 1)..a.rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let f = -&a.get(i, t).div_h(v).expect("pivot has minimal valuation");
                a.row_axpy(i, t, &f);
                left.row_axpy(i, t, &f);
            }
            for j in (t + 1)..a.cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let f = -&a.get(t, j).div_h(v).expect("pivot has minimal valuation");
                a.col_axpy(j, t, &f);
                right.col_axpy(j, t, &f);
                // right_inv must absorb the inverse operation: row_t -= f · row_j
                let g = -&f;
                right_inv.row_axpy(t, j, &g);
            }
            divisors.push(Divisor::Power(v));
        }
        SmithForm { divisors, left, right, right_inv }
    }
}

impl fmt::Display for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Binomial coefficient as a rational.
pub fn binomial(n: u32, k: u32) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(r)
}

pub fn factorial(n: u32) -> Rational {
    Rational::from_integer((1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[i64], n: usize) -> SeriesScalar {
        SeriesScalar::from_coeffs(c.iter().map(|&x| int(x)).collect(), n)
    }

    #[test]
    fn products_truncate() {
        assert_eq!(&s(&[1, 1], 1) * &s(&[1, -1], 1), s(&[1], 1));
        assert_eq!(&s(&[1, 1], 2) * &s(&[1, -1], 2), s(&[1, 0, -1], 2));
        let a = SeriesScalar::monomial(rat(2, 3), 1, 3);
        let b = SeriesScalar::monomial(int(3), 1, 3);
        assert_eq!(&a * &b, SeriesScalar::monomial(int(2), 2, 3));
    }

    #[test]
    fn mismatched_orders_error() {
        assert!(matches!(s(&[1], 1).checked_mul(&s(&[1], 2)), Err(Error::TruncationMismatch(1, 2))));
    }

    #[test]
    fn shifts() {
        let a = SeriesScalar::monomial(int(2), 2, 3);
        let r = a.h_shift(-1).unwrap();
        assert_eq!(r.value, SeriesScalar::monomial(int(2), 1, 3));
        assert_eq!(r.exact_through, 2);
        assert_eq!(s(&[1], 3).h_shift(2).unwrap().value, SeriesScalar::h_power(2, 3));
        assert!(matches!(s(&[1, 1], 3).h_shift(-1), Err(Error::InexactDivision(_))));
    }

    #[test]
    fn inverses() {
        assert_eq!(s(&[1, -1], 2).invert().unwrap(), s(&[1, 1, 1], 2));
        assert_eq!(s(&[2], 2).invert().unwrap(), SeriesScalar::constant(rat(1, 2), 2));
        assert_eq!(SeriesScalar::h_power(1, 2).invert(), Err(Error::NonUnit));
    }

    #[test]
    fn smith_examples() {
        let n = 4;
        let id = SeriesMatrix::identity(2, n);
        assert_eq!(id.smith_normal_form().divisors, vec![Divisor::Power(0), Divisor::Power(0)]);
        let d = SeriesMatrix::from_rows(
            vec![vec![SeriesScalar::h_power(1, n), SeriesScalar::zero(n)], vec![SeriesScalar::zero(n), SeriesScalar::one(n)]],
            n,
        )
        .unwrap();
        assert_eq!(d.smith_normal_form().divisors, vec![Divisor::Power(0), Divisor::Power(1)]);
        let m = SeriesMatrix::from_rows(
            vec![
                vec![SeriesScalar::h_power(1, n), SeriesScalar::h_power(2, n)],
                vec![SeriesScalar::zero(n), SeriesScalar::h_power(3, n)],
            ],
            n,
        )
        .unwrap();
        let f = m.smith_normal_form();
        assert_eq!(f.divisors, vec![Divisor::Power(1), Divisor::Power(3)]);
        let prod = f.left.mul(&m).unwrap().mul(&f.right).unwrap();
        let mut diag = SeriesMatrix::zeros(2, 2, n);
        diag.set(0, 0, SeriesScalar::h_power(1, n));
        diag.set(1, 1, SeriesScalar::h_power(3, n));
        assert_eq!(prod, diag);
        assert_eq!(f.right.mul(&f.right_inv).unwrap(), SeriesMatrix::identity(2, n));
    }

    #[test]
    fn display() {
        assert_eq!(s(&[1, 0, -1], 2).to_string(), "1 - h^2");
        assert_eq!(SeriesScalar::monomial(rat(-2, 3), 2, 3).to_string(), "-2/3h^2");
        assert_eq!(SeriesScalar::zero(2).to_string(), "0");
    }
}
