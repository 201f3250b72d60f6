//! Dense square max-plus matrices.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::semiring::{MaxPlus, Rational};

/// A square `n x n` matrix over the max-plus semiring, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    data: Vec<MaxPlus>,
}

/// The diagonal matrix `D = diag(d)` used in scalings `D^-1 A D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalScaling(Vec<Rational>);

impl DiagonalScaling {
    pub fn new(d: Vec<Rational>) -> Self {
        DiagonalScaling(d)
    }

    pub fn identity(n: usize) -> Self {
        DiagonalScaling(vec![Rational::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn inverse(&self) -> DiagonalScaling {
        DiagonalScaling(self.0.iter().map(|d| -d.clone()).collect())
    }
}

impl Matrix {
    /// The all-`-inf` matrix.
    pub fn zero(n: usize) -> Self {
        Matrix { n, data: vec![MaxPlus::Bottom; n * n] }
    }

    /// Unit diagonal, `-inf` elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m[(i, i)] = MaxPlus::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> MaxPlus) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<MaxPlus>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Parse("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch(n, row.len()));
            }
            data.extend(row);
        }
        Ok(Matrix { n, data })
    }

    /// Convenience constructor from integers, with `None` for `-inf`.
    pub fn from_ints(rows: &[&[Option<i64>]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|v| v.map_or(MaxPlus::Bottom, MaxPlus::int)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &MaxPlus {
        &self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[MaxPlus] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &MaxPlus)> {
        let n = self.n;
        self.data.iter().enumerate().map(move |(k, v)| ((k / n, k % n), v))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(MaxPlus::is_bottom)
    }

    fn check_dim(&self, other: &Matrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    /// Max-plus product `self ⊗ other`.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dim(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let MaxPlus::Finite(a) = self.get(i, k) else { continue };
                for j in 0..n {
                    if let MaxPlus::Finite(b) = other.get(k, j) {
                        out.data[i * n + j].oplus_assign(MaxPlus::Finite(a + b));
                    }
                }
            }
        }
        out
    }

    /// `A^t` for `t >= 1`, by binary exponentiation.
    pub fn power(&self, t: u64) -> Result<Matrix> {
        if t == 0 {
            return Err(Error::Precondition("matrix powers are defined for t >= 1".into()));
        }
        Ok(self.power_unchecked(t))
    }

    pub(crate) fn power_unchecked(&self, mut t: u64) -> Matrix {
        let mut result = Matrix::identity(self.n);
        let mut base = self.clone();
        while t > 0 {
            if t & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            t >>= 1;
            if t > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    /// Entrywise maximum.
    pub fn oplus(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dim(other)?;
        Ok(Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.oplus(b)).collect(),
        })
    }

    /// `alpha ⊗ A`.
    pub fn scalar_mul(&self, alpha: &MaxPlus) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|a| a.otimes(alpha)).collect() }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    /// Longest-walk closure `A+ = A ⊕ A^2 ⊕ ...`, valid when no cycle has
    /// positive weight.
    pub fn plus_closure(&self) -> Result<Matrix> {
        let n = self.n;
        let mut d = self.clone();
        for k in 0..n {
            for i in 0..n {
                let MaxPlus::Finite(ik) = d.get(i, k).clone() else { continue };
                for j in 0..n {
                    if let MaxPlus::Finite(kj) = d.get(k, j) {
                        let cand = MaxPlus::Finite(&ik + kj);
                        d.data[i * n + j].oplus_assign(cand);
                    }
                }
            }
            if d.get(k, k).finite().is_some_and(Rational::is_positive) {
                return Err(Error::StarDiverges);
            }
        }
        if (0..n).any(|i| d.get(i, i).finite().is_some_and(Rational::is_positive)) {
            return Err(Error::StarDiverges);
        }
        Ok(d)
    }

    /// Kleene star `I ⊕ A ⊕ ... ⊕ A^(n-1)`; rejects matrices with a
    /// positive-weight cycle.
    pub fn kleene_star(&self) -> Result<Matrix> {
        let mut d = self.plus_closure()?;
        for i in 0..self.n {
            d.data[i * self.n + i].oplus_assign(MaxPlus::one());
        }
        Ok(d)
    }

    /// The diagonal scaling `D^-1 A D`: entry `(i, j)` becomes `-d_i + a_ij + d_j`.
    pub fn scale(&self, d: &DiagonalScaling) -> Result<Matrix> {
        if d.len() != self.n {
            return Err(Error::DimensionMismatch(self.n, d.len()));
        }
        let d = d.entries();
        Ok(Matrix::from_fn(self.n, |i, j| match self.get(i, j) {
            MaxPlus::Finite(a) => MaxPlus::Finite(&(a - &d[i]) + &d[j]),
            MaxPlus::Bottom => MaxPlus::Bottom,
        }))
    }

    /// `self < other` in the entrywise order where equality is allowed only
    /// at `-inf`.
    pub fn strictly_dominated_by(&self, other: &Matrix) -> Result<bool> {
        self.check_dim(other)?;
        Ok(self.data.iter().zip(&other.data).all(|(a, b)| a.is_bottom() || a < b))
    }

    /// Relabels nodes: entry `(k, l)` of the result is `a[p[k]][p[l]]`.
    pub fn permute(&self, p: &[usize]) -> Result<Matrix> {
        check_permutation(p, self.n)?;
        Ok(Matrix::from_fn(self.n, |k, l| self.get(p[k], p[l]).clone()))
    }

    /// Keeps entries where `keep(i, j)` holds and sets the rest to `-inf`.
    pub fn masked(&self, mut keep: impl FnMut(usize, usize) -> bool) -> Matrix {
        Matrix::from_fn(self.n, |i, j| if keep(i, j) { self.get(i, j).clone() } else { MaxPlus::Bottom })
    }

    /// Support as a 0/-inf matrix.
    pub fn pattern(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| if self.get(i, j).is_finite() { MaxPlus::one() } else { MaxPlus::Bottom })
    }

    /// Renders the plain-text format: `n` on the first line, then `n` rows.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = MaxPlus;
    fn index(&self, (i, j): (usize, usize)) -> &MaxPlus {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut MaxPlus {
        &mut self.data[i * self.n + j]
    }
}

pub(crate) fn check_permutation(p: &[usize], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::InvalidNumbering(format!("expected {n} entries, got {}", p.len())));
    }
    let mut seen = vec![false; n];
    for &v in p {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::InvalidNumbering(format!("{p:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix(")?;
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, ")")
    }
}

impl FromStr for Matrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("missing dimension line".into()))?;
        let n: usize = header.parse().map_err(|_| Error::Parse(format!("bad dimension `{header}`")))?;
        if n == 0 {
            return Err(Error::Parse("dimension must be at least 1".into()));
        }
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing row {}", i + 1)))?;
            let row = line.split_whitespace().map(str::parse).collect::<Result<Vec<MaxPlus>>>()?;
            if row.len() != n {
                return Err(Error::Parse(format!("row {} has {} entries, expected {n}", i + 1, row.len())));
            }
            rows.push(row);
        }
        if let Some(extra) = lines.next() {
            return Err(Error::Parse(format!("trailing content `{extra}`")));
        }
        Matrix::from_rows(rows)
    }
}
