//! Exact rational vectors, matrices and integer lattices.

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

pub type Q = Ratio<i64>;
pub type QVec = Vec<Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn qvec(v: &[i64]) -> QVec {
    v.iter().map(|&x| q(x)).collect()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn add(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(s: Q, a: &[Q]) -> QVec {
    a.iter().map(|x| s * x).collect()
}

pub fn neg(a: &[Q]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero(a: &[Q]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn is_integral(a: &[Q]) -> bool {
    a.iter().all(|x| x.is_integer())
}

pub fn fmt_qvec(v: &[Q]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>,
}

impl fmt::Debug for QMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: &[QVec]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        QMat { rows: r, cols: c, data }
    }

    pub fn from_cols(cols: &[QVec]) -> Self {
        Self::from_rows(cols).transpose()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Q {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> QVec {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.data[k * other.cols + j];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> QVec {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Q::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == if i == j { Q::one() } else { Q::zero() }))
    }

    /// Gauss-Jordan inverse; `None` if singular.
    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| !a.get(r, c).is_zero())?;
            if p != c {
                for j in 0..n {
                    a.data.swap(c * n + j, p * n + j);
                    inv.data.swap(c * n + j, p * n + j);
                }
            }
            let piv = a.get(c, c);
            for j in 0..n {
                a.set(c, j, a.get(c, j) / piv);
                inv.set(c, j, inv.get(c, j) / piv);
            }
            for r in 0..n {
                if r != c {
                    let f = a.get(r, c);
                    if !f.is_zero() {
                        for j in 0..n {
                            let v = a.get(r, j) - f * a.get(c, j);
                            a.set(r, j, v);
                            let w = inv.get(r, j) - f * inv.get(c, j);
                            inv.set(r, j, w);
                        }
                    }
                }
            }
        }
        Some(inv)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(to_f64).collect()
    }
}

/// Symmetric bilinear form `(x|y) = x^T B y` in a fixed basis.
pub fn pair(b: &QMat, x: &[Q], y: &[Q]) -> Q {
    let by = b.mul_vec(y);
    x.iter().zip(&by).fold(Q::zero(), |acc, (u, v)| acc + u * v)
}

/// Complex pairing `(x|p)` of an exact weight with a complex point.
pub fn pair_c(bf: &[f64], n: usize, x: &[Q], p: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let xi = to_f64(&x[i]);
        if xi == 0.0 {
            continue;
        }
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..n {
            row += p[j] * bf[i * n + j];
        }
        acc += row * xi;
    }
    acc
}

fn lcm_den(v: &[Q]) -> i64 {
    v.iter().fold(1i64, |acc, x| acc.lcm(x.denom()))
}

/// Row-style Hermite normal form of an integer matrix; zero rows dropped.
pub fn hnf(mut rows: Vec<Vec<i128>>) -> Vec<Vec<i128>> {
    if rows.is_empty() {
        return rows;
    }
    let ncols = rows[0].len();
    let mut out: Vec<Vec<i128>> = Vec::new();
    let mut col = 0;
    while col < ncols && !rows.is_empty() {
        // Euclid on column `col` among the remaining rows.
        loop {
            rows.retain(|r| r.iter().any(|&x| x != 0));
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            let pv = rows[piv][col];
            for &i in &nz {
                if i != piv {
                    let f = rows[i][col].div_euclid(pv);
                    let prow = rows[piv].clone();
                    for (x, y) in rows[i].iter_mut().zip(&prow) {
                        *x -= f * y;
                    }
                }
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| rows[i][col] != 0) {
            let mut r = rows.remove(i);
            if r[col] < 0 {
                r.iter_mut().for_each(|x| *x = -*x);
            }
            out.push(r);
        }
        col += 1;
    }
    // Reduce entries above pivots.
    for i in 0..out.len() {
        let pc = out[i].iter().position(|&x| x != 0).unwrap();
        let pv = out[i][pc];
        for j in 0..i {
            let f = out[j][pc].div_euclid(pv);
            if f != 0 {
                let pr = out[i].clone();
                for (x, y) in out[j].iter_mut().zip(&pr) {
                    *x -= f * y;
                }
            }
        }
    }
    out
}

/// A lattice in Q^n given by an echelon basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub basis: Vec<QVec>,
    dim: usize,
}

impl Lattice {
    pub fn from_generators(gens: &[QVec], dim: usize) -> Lattice {
        if gens.is_empty() {
            return Lattice { basis: vec![], dim };
        }
        let d = gens.iter().fold(1i64, |acc, g| acc.lcm(&lcm_den(g)));
        let rows: Vec<Vec<i128>> = gens
            .iter()
            .map(|g| g.iter().map(|x| (x * q(d)).to_integer() as i128).collect())
            .collect();
        let h = hnf(rows);
        let basis = h
            .into_iter()
            .map(|r| r.into_iter().map(|x| Q::new(x as i64, d)).collect())
            .collect();
        Lattice { basis, dim }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Integer coordinates of `v` in the echelon basis, if `v` lies in the lattice.
    pub fn coords(&self, v: &[Q]) -> Option<Vec<i64>> {
        let mut rem = v.to_vec();
        let mut out = Vec::with_capacity(self.basis.len());
        for b in &self.basis {
            let pc = b.iter().position(|x| !x.is_zero()).unwrap();
            let c = rem[pc] / b[pc];
            if !c.is_integer() {
                return None;
            }
            let ci = c.to_integer();
            for (r, x) in rem.iter_mut().zip(b) {
                *r -= *x * q(ci);
            }
            out.push(ci);
        }
        if is_zero(&rem) {
            Some(out)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.coords(v).is_some()
    }

    pub fn combine(&self, c: &[i64]) -> QVec {
        let mut v = vec![Q::zero(); self.dim];
        for (b, &ci) in self.basis.iter().zip(c) {
            for (x, y) in v.iter_mut().zip(b) {
                *x += *y * q(ci);
            }
        }
        v
    }

    pub fn scaled(&self, k: i64) -> Lattice {
        Lattice { basis: self.basis.iter().map(|b| scale(q(k), b)).collect(), dim: self.dim }
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }
}

/// Coset representatives of `outer / inner` for full-rank lattices with `inner ⊂ outer`.
pub struct Quotient {
    outer: Lattice,
    hnf: Vec<Vec<i128>>,
}

impl Quotient {
    pub fn new(outer: &Lattice, inner: &Lattice) -> Option<Quotient> {
        let n = outer.rank();
        if inner.rank() != n {
            return None;
        }
        let mut rows = Vec::with_capacity(n);
        for b in &inner.basis {
            let c = outer.coords(b)?;
            rows.push(c.into_iter().map(|x| x as i128).collect::<Vec<_>>());
        }
        let h = hnf(rows);
        if h.len() != n || (0..n).any(|i| h[i][i] == 0) {
            return None;
        }
        Some(Quotient { outer: outer.clone(), hnf: h })
    }

    pub fn index(&self) -> usize {
        (0..self.hnf.len()).map(|i| self.hnf[i][i] as usize).product()
    }

    /// Canonical representative coordinates (outer basis) of an outer-lattice element.
    pub fn reduce_coords(&self, c: &[i64]) -> Vec<i64> {
        let mut v: Vec<i128> = c.iter().map(|&x| x as i128).collect();
        for (i, row) in self.hnf.iter().enumerate() {
            let f = v[i].div_euclid(row[i]);
            if f != 0 {
                for (x, y) in v.iter_mut().zip(row) {
                    *x -= f * y;
                }
            }
        }
        v.into_iter().map(|x| x as i64).collect()
    }

    pub fn reduce(&self, v: &[Q]) -> Option<QVec> {
        let c = self.outer.coords(v)?;
        Some(self.outer.combine(&self.reduce_coords(&c)))
    }

    pub fn representatives(&self) -> Vec<QVec> {
        let n = self.hnf.len();
        let mut reps = vec![vec![0i64; n]];
        for i in 0..n {
            let m = self.hnf[i][i] as i64;
            let mut next = Vec::with_capacity(reps.len() * m as usize);
            for r in &reps {
                for c in 0..m {
                    let mut r2 = r.clone();
                    r2[i] = c;
                    next.push(r2);
                }
            }
            reps = next;
        }
        reps.iter().map(|c| self.outer.combine(c)).collect()
    }
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = QMat::from_rows(&[qvec(&[2, -1, 0]), qvec(&[-1, 2, -1]), qvec(&[0, -1, 2])]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert_eq!(inv.get(0, 0), qf(3, 4));
    }

    #[test]
    fn hnf_and_membership() {
        let l = Lattice::from_generators(&[vec![qf(1, 2), q(0)], vec![q(0), q(1)], vec![q(1), q(1)]], 2);
        assert_eq!(l.rank(), 2);
        assert!(l.contains(&[qf(3, 2), q(-2)]));
        assert!(!l.contains(&[qf(1, 4), q(0)]));
    }

    #[test]
    fn quotient_reps() {
        let outer = Lattice::from_generators(&[qvec(&[1, 0]), qvec(&[0, 1])], 2);
        let inner = Lattice::from_generators(&[qvec(&[2, 1]), qvec(&[0, 3])], 2);
        let quo = Quotient::new(&outer, &inner).unwrap();
        assert_eq!(quo.index(), 6);
        assert_eq!(quo.representatives().len(), 6);
        let r = quo.reduce(&qvec(&[5, 7])).unwrap();
        assert!(inner.contains(&sub(&qvec(&[5, 7]), &r)));
    }
}
