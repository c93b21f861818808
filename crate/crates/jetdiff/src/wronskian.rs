//! Partitions and hook lengths, classical and generalized Wronskians,
//! Schur determinants in series coefficients, the hook-length expansion
//! of iterated Wronskian derivatives, and the Giambelli check.

use num::{BigInt, One, Zero};
use serde::Serialize;

use crate::error::Error;
use crate::linalg;
use crate::poly::{render_q, DiffPoly, Q, VarSym};
use crate::series::{det_series, TruncSeries};

/// A weakly decreasing sequence of positive parts (canonical form strips
/// zeros).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Canonicalizes: sorts descending and strips zeros.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: vec![] }
    }

    /// The column partition (1^k).
    pub fn column(k: u32) -> Self {
        Partition {
            parts: vec![1; k as usize],
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Part with index padding: zero beyond the stored parts.
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.part(0) as usize;
        let parts = (0..cols)
            .map(|c| self.parts.iter().filter(|&&p| p as usize > c).count() as u32)
            .collect();
        Partition { parts }
    }

    /// Hook lengths of every box, row by row.
    pub fn hook_lengths(&self) -> Vec<u32> {
        let conj = self.conjugate();
        let mut hooks = Vec::new();
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row as usize {
                let arm = row - 1 - j as u32;
                let leg = conj.part(j) - 1 - i as u32;
                hooks.push(arm + leg + 1);
            }
        }
        hooks
    }

    /// |λ|! / ∏ hooks: the number of standard Young tableaux of shape λ.
    pub fn syt_count(&self) -> BigInt {
        let mut num = BigInt::one();
        for i in 2..=self.weight() {
            num *= BigInt::from(i);
        }
        let mut den = BigInt::one();
        for h in self.hook_lengths() {
            den *= BigInt::from(h);
        }
        debug_assert!((&num % &den).is_zero());
        num / den
    }

    /// All partitions of weight `k` with at most `max_len` parts, in a
    /// fixed deterministic order.
    pub fn all_of_weight(k: u32, max_len: usize) -> Vec<Partition> {
        fn go(rem: u32, max_part: u32, slots: usize, acc: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition {
                    parts: acc.clone(),
                });
                return;
            }
            if slots == 0 {
                return;
            }
            for p in (1..=rem.min(max_part)).rev() {
                acc.push(p);
                go(rem - p, p, slots - 1, acc, out);
                acc.pop();
            }
        }
        let mut out = Vec::new();
        go(k, k, max_len, &mut Vec::new(), &mut out);
        out
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let inner: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", inner.join(","))
    }
}

/// Determinant of a square polynomial matrix by cofactor expansion.
pub fn det_poly(mat: &[Vec<DiffPoly>]) -> DiffPoly {
    let n = mat.len();
    if n == 0 {
        return DiffPoly::one();
    }
    if n == 1 {
        return mat[0][0].clone();
    }
    let mut acc = DiffPoly::zero();
    for (j, pivot) in mat[0].iter().enumerate() {
        if pivot.is_zero() {
            continue;
        }
        let minor: Vec<Vec<DiffPoly>> = mat[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = pivot.mul(&det_poly(&minor));
        acc = if j % 2 == 0 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    acc
}

/// A tuple of functions: either m differential indeterminates f_1..f_m
/// (the symbolic case) or concrete truncated series.
#[derive(Debug, Clone)]
pub enum FunctionTuple {
    Symbolic(usize),
    Series(Vec<TruncSeries>),
}

impl FunctionTuple {
    pub fn len(&self) -> usize {
        match self {
            FunctionTuple::Symbolic(m) => *m,
            FunctionTuple::Series(fs) => fs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Either a differential polynomial or a truncated series, depending on
/// the input representation.
#[derive(Debug, Clone)]
pub enum WronskianValue {
    Poly(DiffPoly),
    Series(TruncSeries),
}

/// Row derivative orders of the generalized Wronskian: row j uses order
/// j + λ_{m-1-j}, with λ zero-padded to m parts.
pub fn row_orders(lambda: &Partition, m: usize) -> Result<Vec<usize>, Error> {
    if lambda.len() > m {
        return Err(Error::Invalid(format!(
            "partition {lambda} has more than {m} parts"
        )));
    }
    Ok((0..m)
        .map(|j| j + lambda.part(m - 1 - j) as usize)
        .collect())
}

/// Symbolic generalized Wronskian of m differential indeterminates.
pub fn generalized_wronskian_symbolic(lambda: &Partition, m: usize) -> Result<DiffPoly, Error> {
    let orders = row_orders(lambda, m)?;
    let mat: Vec<Vec<DiffPoly>> = orders
        .iter()
        .map(|&ord| {
            (1..=m)
                .map(|i| DiffPoly::var(VarSym::jet(i as u32, ord as u32)))
                .collect()
        })
        .collect();
    Ok(det_poly(&mat))
}

pub fn wronskian_symbolic(m: usize) -> DiffPoly {
    generalized_wronskian_symbolic(&Partition::empty(), m).expect("empty partition always fits")
}

/// Generalized Wronskian of concrete series; precision is tracked and
/// the result errors on access past what the inputs support.
pub fn generalized_wronskian_series(
    lambda: &Partition,
    fs: &[TruncSeries],
) -> Result<TruncSeries, Error> {
    let m = fs.len();
    let orders = row_orders(lambda, m)?;
    let mat: Vec<Vec<TruncSeries>> = orders
        .iter()
        .map(|&ord| fs.iter().map(|f| f.derivative_n(ord)).collect())
        .collect();
    Ok(det_series(&mat))
}

pub fn wronskian_series(fs: &[TruncSeries]) -> Result<TruncSeries, Error> {
    generalized_wronskian_series(&Partition::empty(), fs)
}

/// Unified front end over both representations.
pub fn generalized_wronskian(
    lambda: &Partition,
    fs: &FunctionTuple,
) -> Result<WronskianValue, Error> {
    match fs {
        FunctionTuple::Symbolic(m) => Ok(WronskianValue::Poly(generalized_wronskian_symbolic(
            lambda, *m,
        )?)),
        FunctionTuple::Series(s) => Ok(WronskianValue::Series(generalized_wronskian_series(
            lambda, s,
        )?)),
    }
}

pub fn wronskian(fs: &FunctionTuple) -> Result<WronskianValue, Error> {
    generalized_wronskian(&Partition::empty(), fs)
}

/// Series inverse coefficients b_0..b_N of
/// 1/(1 - a_1 t + a_2 t^2 - ... + (-1)^{r+1} a_{r+1} t^{r+1}).
pub fn b_from_a(a: &[DiffPoly], n: usize) -> Vec<DiffPoly> {
    let mut b = vec![DiffPoly::one()];
    for j in 1..=n {
        let mut s = DiffPoly::zero();
        for i in 1..=j.min(a.len()) {
            let term = a[i - 1].mul(&b[j - i]);
            s = if i % 2 == 1 { s.add(&term) } else { s.sub(&term) };
        }
        b.push(s);
    }
    b
}

/// The Schur determinant det(x_{λ_{r-j}+j-i}) over 0 <= i, j <= r, where
/// r+1 is the number of parts; x_0 must be 1 and negative indices are 0.
/// Under this orientation the single-column case gives
/// Δ_{(1)}(x) = x_1 and Δ_{(1,1)}(x) = x_1^2 - x_2.
pub fn schur_delta(lambda: &Partition, x: &[DiffPoly]) -> Result<DiffPoly, Error> {
    if lambda.is_empty() {
        return Ok(DiffPoly::one());
    }
    if x.is_empty() || x[0] != DiffPoly::one() {
        return Err(Error::Invalid("x_0 must be 1".into()));
    }
    let r = lambda.len() - 1;
    let need = lambda.part(0) as usize + r;
    if x.len() <= need {
        return Err(Error::Invalid(format!(
            "need x entries through index {need}, got {}",
            x.len() - 1
        )));
    }
    let entry = |i: usize, j: usize| -> DiffPoly {
        let idx = lambda.part(r - j) as i64 + j as i64 - i as i64;
        if idx < 0 {
            DiffPoly::zero()
        } else {
            x[idx as usize].clone()
        }
    };
    let mat: Vec<Vec<DiffPoly>> = (0..=r)
        .map(|i| (0..=r).map(|j| entry(i, j)).collect())
        .collect();
    Ok(det_poly(&mat))
}

#[derive(Debug, Clone, Serialize)]
pub struct HookEntry {
    pub partition: Vec<u32>,
    pub coefficient: String,
    pub expected: String,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HookExpansionReport {
    pub m: usize,
    pub k: usize,
    pub entries: Vec<HookEntry>,
    pub all_match: bool,
}

/// Expands the k-th total derivative of the order-m classical Wronskian
/// in the basis of generalized Wronskians W_λ, |λ| = k, and compares
/// each coefficient with |λ|!/∏hooks.
pub fn hook_expansion_report(m: usize, k: usize) -> Result<HookExpansionReport, Error> {
    if m < 2 {
        return Err(Error::Invalid("need m >= 2".into()));
    }
    let mut dkw = wronskian_symbolic(m);
    for _ in 0..k {
        dkw = dkw.total_derivative();
    }
    let partitions = Partition::all_of_weight(k as u32, m);
    let basis: Vec<DiffPoly> = partitions
        .iter()
        .map(|lam| generalized_wronskian_symbolic(lam, m))
        .collect::<Result<_, _>>()?;

    // coordinates over the union of occurring monomials
    let mut monomials = std::collections::BTreeSet::new();
    for p in basis.iter().chain(std::iter::once(&dkw)) {
        for (mon, _) in p.terms() {
            monomials.insert(mon.clone());
        }
    }
    let monomials: Vec<_> = monomials.into_iter().collect();
    let rows: Vec<Vec<Q>> = monomials
        .iter()
        .map(|mon| basis.iter().map(|p| p.coeff(mon)).collect())
        .collect();
    let rhs: Vec<Q> = monomials.iter().map(|mon| dkw.coeff(mon)).collect();
    let coeffs = linalg::solve(&rows, &rhs).ok_or_else(|| {
        Error::Invalid("derivative of the Wronskian left the W_lambda span".into())
    })?;

    let mut entries = Vec::new();
    let mut all_match = true;
    for (lam, c) in partitions.iter().zip(&coeffs) {
        let expected = Q::from(lam.syt_count());
        let ok = *c == expected;
        all_match &= ok;
        entries.push(HookEntry {
            partition: lam.parts().to_vec(),
            coefficient: render_q(c),
            expected: render_q(&expected),
            matches: ok,
        });
    }
    // residual must vanish: the solve already guarantees consistency
    Ok(HookExpansionReport {
        m,
        k,
        entries,
        all_match,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GiambelliReport {
    pub lambda: Vec<u32>,
    pub expansion_point: String,
    pub w_lambda: String,
    pub w0: String,
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub delta: String,
    pub rhs: String,
    #[serde(rename = "match")]
    pub matches: bool,
    pub residual: String,
}

/// Value of the j-th derivative of a series at a rational point. Exact
/// polynomials evaluate anywhere; truncated series only at 0.
fn derivative_value(f: &TruncSeries, j: usize, point: &Q) -> Result<Q, Error> {
    if point.is_zero() {
        return f
            .derivative_value_at_zero(j)?
            .as_constant()
            .ok_or(Error::NonConstantCoefficient);
    }
    if !f.is_exact() {
        return Err(Error::Invalid(
            "nonzero expansion point requires exact polynomial input".into(),
        ));
    }
    f.derivative_n(j)
        .coeffs_eval_at(point)
        .ok_or(Error::NonConstantCoefficient)
}

/// Pointwise determinant of derivative values.
fn wronskian_value_at(
    lambda: &Partition,
    fs: &[TruncSeries],
    point: &Q,
) -> Result<Q, Error> {
    let m = fs.len();
    let orders = row_orders(lambda, m)?;
    let mat: Vec<Vec<DiffPoly>> = orders
        .iter()
        .map(|&ord| {
            fs.iter()
                .map(|f| derivative_value(f, ord, point).map(DiffPoly::constant))
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, _>>()?;
    det_poly(&mat).as_constant().ok_or(Error::NonConstantCoefficient)
}

/// Checks W_λ = Δ_λ(b) · W_0 at the expansion point, with a_k read off
/// as W_{(1^k)}/W_0 and b the series inverse of the alternating
/// generating polynomial of the a_k. The identity is exact for
/// fundamental systems of constant-coefficient equations; for other
/// inputs the report carries the residual as witness.
pub fn giambelli_report(
    lambda: &Partition,
    fs: &[TruncSeries],
    point: &Q,
) -> Result<GiambelliReport, Error> {
    let m = fs.len();
    if lambda.len() > m {
        return Err(Error::Invalid(format!(
            "partition {lambda} has more than {m} parts"
        )));
    }
    let w0 = wronskian_value_at(&Partition::empty(), fs, point)?;
    if w0.is_zero() {
        return Err(Error::VanishingWronskian);
    }
    let a: Vec<Q> = (1..=m)
        .map(|k| {
            wronskian_value_at(&Partition::column(k as u32), fs, point).map(|w| &w / &w0)
        })
        .collect::<Result<_, _>>()?;
    let a_poly: Vec<DiffPoly> = a.iter().cloned().map(DiffPoly::constant).collect();
    let need = if lambda.is_empty() {
        0
    } else {
        lambda.part(0) as usize + lambda.len() - 1
    };
    let b = b_from_a(&a_poly, need);
    let delta = schur_delta(lambda, &b)?
        .as_constant()
        .ok_or(Error::NonConstantCoefficient)?;
    let w_lambda = wronskian_value_at(lambda, fs, point)?;
    let rhs = &delta * &w0;
    let residual = &w_lambda - &rhs;
    Ok(GiambelliReport {
        lambda: lambda.parts().to_vec(),
        expansion_point: render_q(point),
        w_lambda: render_q(&w_lambda),
        w0: render_q(&w0),
        a: a.iter().map(render_q).collect(),
        b: b
            .iter()
            .map(|p| p.as_constant().map(|c| render_q(&c)).unwrap_or_else(|| p.to_string()))
            .collect(),
        delta: render_q(&delta),
        rhs: render_q(&rhs),
        matches: residual.is_zero(),
        residual: render_q(&residual),
    })
}
