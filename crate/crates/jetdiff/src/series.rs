//! Truncated power series in t with exact coefficients and explicit
//! precision tracking. Coefficients are polynomials, so symbolic
//! parameters ride along; purely numeric series just carry constants.

use num::{One, Zero};

use crate::error::Error;
use crate::poly::{int, DiffPoly, Q};

/// Known precision: either an exact polynomial (all higher coefficients
/// are genuinely zero) or coefficients known through t^N only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prec {
    Exact,
    Order(isize),
}

impl Prec {
    fn min(self, other: Prec) -> Prec {
        match (self, other) {
            (Prec::Exact, p) | (p, Prec::Exact) => p,
            (Prec::Order(a), Prec::Order(b)) => Prec::Order(a.min(b)),
        }
    }

    fn covers(self, k: usize) -> bool {
        match self {
            Prec::Exact => true,
            Prec::Order(n) => (k as isize) <= n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<DiffPoly>,
    prec: Prec,
}

impl TruncSeries {
    /// Series with coefficients known through t^n.
    pub fn new(mut coeffs: Vec<DiffPoly>, n: usize) -> Self {
        coeffs.truncate(n + 1);
        coeffs.resize(n + 1, DiffPoly::zero());
        TruncSeries {
            coeffs,
            prec: Prec::Order(n as isize),
        }
    }

    /// An exact polynomial: every coefficient beyond the list is zero.
    pub fn exact(coeffs: Vec<DiffPoly>) -> Self {
        TruncSeries {
            coeffs,
            prec: Prec::Exact,
        }
    }

    pub fn exact_rational(coeffs: Vec<Q>) -> Self {
        TruncSeries::exact(coeffs.into_iter().map(DiffPoly::constant).collect())
    }

    pub fn zero_exact() -> Self {
        TruncSeries::exact(vec![])
    }

    pub fn prec(&self) -> Prec {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.prec, Prec::Exact)
    }

    /// The t^k coefficient; errors past the known precision.
    pub fn coeff(&self, k: usize) -> Result<DiffPoly, Error> {
        if !self.prec.covers(k) {
            let have = match self.prec {
                Prec::Order(n) => n.max(0) as usize,
                Prec::Exact => unreachable!(),
            };
            return Err(Error::InsufficientPrecision { have, need: k });
        }
        Ok(self.coeffs.get(k).cloned().unwrap_or_else(DiffPoly::zero))
    }

    /// Highest index with known (possibly zero) coefficient, `None` for
    /// exact polynomials and negative-precision leftovers.
    pub fn order_bound(&self) -> Option<isize> {
        match self.prec {
            Prec::Exact => None,
            Prec::Order(n) => Some(n),
        }
    }

    pub fn add(&self, other: &TruncSeries) -> TruncSeries {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| {
                let a = self.coeffs.get(k).cloned().unwrap_or_else(DiffPoly::zero);
                let b = other.coeffs.get(k).cloned().unwrap_or_else(DiffPoly::zero);
                a.add(&b)
            })
            .collect();
        TruncSeries {
            coeffs,
            prec: self.prec.min(other.prec),
        }
        .clamp()
    }

    pub fn sub(&self, other: &TruncSeries) -> TruncSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TruncSeries {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        let prec = self.prec.min(other.prec);
        let len = match prec {
            Prec::Exact => self.coeffs.len() + other.coeffs.len(),
            Prec::Order(n) => (n.max(-1) + 1) as usize,
        };
        let mut coeffs = vec![DiffPoly::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j < len {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        TruncSeries { coeffs, prec }
    }

    pub fn scale(&self, c: &Q) -> TruncSeries {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect(),
            prec: self.prec,
        }
    }

    /// Termwise derivative; usable order drops by one.
    pub fn derivative(&self) -> TruncSeries {
        let coeffs = (1..self.coeffs.len())
            .map(|k| self.coeffs[k].scale(&int(k as i64)))
            .collect();
        let prec = match self.prec {
            Prec::Exact => Prec::Exact,
            Prec::Order(n) => Prec::Order(n - 1),
        };
        TruncSeries { coeffs, prec }
    }

    pub fn derivative_n(&self, n: usize) -> TruncSeries {
        let mut s = self.clone();
        for _ in 0..n {
            s = s.derivative();
        }
        s
    }

    /// Multiplicative inverse through t^upto. The constant term must be
    /// a nonzero rational.
    pub fn invert(&self, upto: usize) -> Result<TruncSeries, Error> {
        if !self.prec.covers(0) {
            return Err(Error::InsufficientPrecision { have: 0, need: 0 });
        }
        let c0 = self
            .coeff(0)?
            .as_constant()
            .ok_or(Error::NonUnitSeries)?;
        if c0.is_zero() {
            return Err(Error::NonUnitSeries);
        }
        let n = match self.prec {
            Prec::Exact => upto,
            Prec::Order(p) => upto.min(p.max(0) as usize),
        };
        let inv0 = Q::one() / c0;
        let mut out = vec![DiffPoly::zero(); n + 1];
        out[0] = DiffPoly::constant(inv0.clone());
        for k in 1..=n {
            // c0 * out[k] = -sum_{i=1..k} c_i out[k-i]
            let mut s = DiffPoly::zero();
            for i in 1..=k {
                let ci = self.coeffs.get(i).cloned().unwrap_or_else(DiffPoly::zero);
                s = s.add(&ci.mul(&out[k - i]));
            }
            out[k] = s.neg().scale(&inv0);
        }
        Ok(TruncSeries {
            coeffs: out,
            prec: Prec::Order(n as isize),
        })
    }

    pub fn div(&self, other: &TruncSeries, upto: usize) -> Result<TruncSeries, Error> {
        Ok(self.mul(&other.invert(upto)?))
    }

    /// Value of the k-th derivative at t = 0: k! times the t^k
    /// coefficient.
    pub fn derivative_value_at_zero(&self, k: usize) -> Result<DiffPoly, Error> {
        let mut f = Q::one();
        for i in 2..=k {
            f *= int(i as i64);
        }
        Ok(self.coeff(k)?.scale(&f))
    }

    /// True when every known coefficient is zero.
    pub fn is_zero_through_precision(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Polynomial evaluation of the stored coefficients at a point;
    /// `None` when a coefficient is not a constant rational. Only exact
    /// polynomials give a faithful function value.
    pub fn coeffs_eval_at(&self, point: &Q) -> Option<Q> {
        let mut total = Q::zero();
        let mut power = Q::one();
        for c in &self.coeffs {
            total += c.as_constant()? * &power;
            power *= point;
        }
        Some(total)
    }

    /// Number of stored coefficients: everything past this index is
    /// zero (exact) or unknown (truncated).
    pub fn coeffs_len(&self) -> usize {
        self.coeffs.len()
    }

    fn clamp(mut self) -> Self {
        if let Prec::Order(n) = self.prec {
            self.coeffs.truncate((n.max(-1) + 1) as usize);
        }
        self
    }
}

/// Determinant of a square matrix of series, by cofactor expansion.
/// Matrix sizes here are desk scale.
pub fn det_series(mat: &[Vec<TruncSeries>]) -> TruncSeries {
    let n = mat.len();
    if n == 0 {
        return TruncSeries::exact(vec![DiffPoly::one()]);
    }
    if n == 1 {
        return mat[0][0].clone();
    }
    let mut acc: Option<TruncSeries> = None;
    for (j, pivot) in mat[0].iter().enumerate() {
        let minor: Vec<Vec<TruncSeries>> = mat[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let mut term = pivot.mul(&det_series(&minor));
        if j % 2 == 1 {
            term = term.neg();
        }
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }
    acc.unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn s(vals: &[(i64, i64)], n: usize) -> TruncSeries {
        TruncSeries::new(
            vals.iter()
                .map(|&(p, q)| DiffPoly::constant(rat(p, q)))
                .collect(),
            n,
        )
    }

    #[test]
    fn mul_tracks_min_precision() {
        let a = s(&[(1, 1), (2, 1)], 5);
        let b = s(&[(3, 1), (0, 1), (1, 2)], 3);
        let p = a.mul(&b);
        assert_eq!(p.order_bound(), Some(3));
        assert_eq!(p.coeff(0).unwrap(), DiffPoly::constant(int(3)));
        assert_eq!(p.coeff(1).unwrap(), DiffPoly::constant(int(6)));
        assert!(p.coeff(4).is_err());
    }

    #[test]
    fn derivative_lowers_precision() {
        let a = s(&[(1, 1), (1, 1), (1, 2)], 2);
        let d = a.derivative();
        assert_eq!(d.order_bound(), Some(1));
        assert_eq!(d.coeff(0).unwrap(), DiffPoly::constant(int(1)));
        assert_eq!(d.coeff(1).unwrap(), DiffPoly::constant(int(1)));
        assert!(d.coeff(2).is_err());
    }

    #[test]
    fn invert_geometric() {
        // 1/(1 - t) = 1 + t + t^2 + ...
        let a = TruncSeries::exact_rational(vec![int(1), int(-1)]);
        let inv = a.invert(4).unwrap();
        for k in 0..=4 {
            assert_eq!(inv.coeff(k).unwrap(), DiffPoly::one());
        }
    }

    #[test]
    fn invert_requires_unit() {
        let a = TruncSeries::exact_rational(vec![int(0), int(1)]);
        assert!(a.invert(3).is_err());
    }

    #[test]
    fn product_with_inverse_is_one() {
        let a = TruncSeries::exact_rational(vec![int(2), rat(1, 3), int(-1), rat(5, 7)]);
        let p = a.mul(&a.invert(6).unwrap());
        assert_eq!(p.coeff(0).unwrap(), DiffPoly::one());
        for k in 1..=6 {
            assert!(p.coeff(k).unwrap().is_zero());
        }
    }

    #[test]
    fn det_series_constant_example() {
        // W(1, t, t^2) = 2
        let f: Vec<TruncSeries> = vec![
            TruncSeries::exact_rational(vec![int(1)]),
            TruncSeries::exact_rational(vec![int(0), int(1)]),
            TruncSeries::exact_rational(vec![int(0), int(0), int(1)]),
        ];
        let mat: Vec<Vec<TruncSeries>> = (0..3)
            .map(|j| f.iter().map(|u| u.derivative_n(j)).collect())
            .collect();
        let d = det_series(&mat);
        assert_eq!(d.coeff(0).unwrap(), DiffPoly::constant(int(2)));
        assert!(d.is_zero_through_precision() == false);
        for k in 1..=3 {
            assert!(d.coeff(k).unwrap().is_zero());
        }
    }
}
