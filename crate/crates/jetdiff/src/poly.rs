//! Sparse multivariate polynomials over exact rationals in jet variables
//! and parameter symbols, with the weighted grading in which the order-j
//! derivative variable carries weight j.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;

pub type Q = BigRational;

/// Shorthand for an exact rational `p/q`.
pub fn rat(p: i64, q: i64) -> Q {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Shorthand for an exact integer rational.
pub fn int(p: i64) -> Q {
    BigRational::from(BigInt::from(p))
}

/// A variable symbol. Jet variables carry a component index (1-based)
/// and a derivative order (0 means the function itself). Parameter
/// symbols are the reparametrization coefficients `a_m`, constant-matrix
/// entries `c_{i,j}` and the series variable `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarSym {
    /// ξ_i^{(j)}: derivative of order `order` of component `component`.
    Jet { component: u32, order: u32 },
    /// Reparametrization coefficient a_m.
    CoeffA(u32),
    /// Constant matrix entry c_{i,j}.
    ConstC(u32, u32),
    /// The series variable t.
    T,
}

impl VarSym {
    pub fn jet(component: u32, order: u32) -> Self {
        VarSym::Jet { component, order }
    }

    /// Weight in the jet grading: order-j jet variables weigh j, all
    /// parameter symbols weigh 0.
    pub fn weight(&self) -> u64 {
        match self {
            VarSym::Jet { order, .. } => *order as u64,
            _ => 0,
        }
    }
}

impl fmt::Display for VarSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarSym::Jet { component, order } => match order {
                0 => write!(f, "f{component}"),
                1..=3 => write!(f, "f{component}{}", "'".repeat(*order as usize)),
                _ => write!(f, "f{component}^({order})"),
            },
            VarSym::CoeffA(m) => write!(f, "a{m}"),
            VarSym::ConstC(i, j) => write!(f, "c{i}_{j}"),
            VarSym::T => write!(f, "t"),
        }
    }
}

/// A power product of variables. No zero exponents are stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: BTreeMap<VarSym, u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: VarSym) -> Self {
        Monomial::var_pow(v, 1)
    }

    pub fn var_pow(v: VarSym, e: u32) -> Self {
        let mut exps = BTreeMap::new();
        if e > 0 {
            exps.insert(v, e);
        }
        Monomial { exps }
    }

    pub fn from_pairs(pairs: &[(VarSym, u32)]) -> Self {
        let mut m = Monomial::one();
        for &(v, e) in pairs {
            if e > 0 {
                *m.exps.entry(v).or_insert(0) += e;
            }
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, v: &VarSym) -> u32 {
        self.exps.get(v).copied().unwrap_or(0)
    }

    pub fn vars(&self) -> impl Iterator<Item = (&VarSym, &u32)> {
        self.exps.iter()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (v, e) in &other.exps {
            *exps.entry(*v).or_insert(0) += e;
        }
        Monomial { exps }
    }

    /// Weighted degree: sum of exponent × variable weight.
    pub fn weighted_degree(&self) -> u64 {
        self.exps
            .iter()
            .map(|(v, e)| v.weight() * *e as u64)
            .sum()
    }

    /// Total degree (all variables weigh 1).
    pub fn total_degree(&self) -> u64 {
        self.exps.values().map(|&e| e as u64).sum()
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

// Graded lexicographic: weighted degree first, then the exponent maps
// compared pairwise in variable order. Fixed once so printed output and
// nullspace bases are reproducible.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.weighted_degree()
            .cmp(&other.weighted_degree())
            .then_with(|| {
                let a: Vec<_> = self.exps.iter().collect();
                let b: Vec<_> = other.exps.iter().collect();
                a.cmp(&b)
            })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .exps
            .iter()
            .map(|(v, e)| {
                if *e == 1 {
                    v.to_string()
                } else {
                    format!("{v}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// The weighted degree of a polynomial: either a single common weight
/// (isobaric, constants included as weight 0) or mixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightedDegree {
    Isobaric(u64),
    Mixed,
}

/// A differential polynomial: a finite map from monomials to nonzero
/// rational coefficients. The representation is canonical, so structural
/// equality is polynomial equality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Q>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        DiffPoly { terms }
    }

    pub fn var(v: VarSym) -> Self {
        DiffPoly::term(Monomial::var(v), Q::one())
    }

    pub fn term(m: Monomial, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPoly { terms }
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = DiffPoly::zero();
        for (m, c) in pairs {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The coefficient of a monomial (zero if absent).
    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    /// The constant term viewed as a value; `None` when the polynomial
    /// is not constant.
    pub fn as_constant(&self) -> Option<Q> {
        if self.terms.is_empty() {
            return Some(Q::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_one() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn add(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Q) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut out = DiffPoly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Total derivative: D(ξ_i^{(j)}) = ξ_i^{(j+1)}, D(a_m) = D(c_ij) = 0,
    /// D(t) = 1, extended by linearity and the Leibniz rule.
    pub fn total_derivative(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (v, e) in m.vars() {
                let dv = match v {
                    VarSym::Jet { component, order } => {
                        Some(DiffPoly::var(VarSym::jet(*component, order + 1)))
                    }
                    VarSym::T => Some(DiffPoly::one()),
                    _ => None,
                };
                let Some(dv) = dv else { continue };
                // drop one power of v, multiply by e * dv
                let mut reduced = Monomial::one();
                for (w, k) in m.vars() {
                    let k = if w == v { *k - 1 } else { *k };
                    if k > 0 {
                        reduced = reduced.mul(&Monomial::var_pow(*w, k));
                    }
                }
                let factor = DiffPoly::term(reduced, c * int(*e as i64));
                out = out.add(&factor.mul(&dv));
            }
        }
        out
    }

    /// Common weighted degree if isobaric (the zero polynomial and
    /// constants are isobaric of weight 0), otherwise `Mixed`.
    pub fn weighted_degree(&self) -> WeightedDegree {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return WeightedDegree::Isobaric(0);
        };
        let w = first.weighted_degree();
        for m in it {
            if m.weighted_degree() != w {
                return WeightedDegree::Mixed;
            }
        }
        WeightedDegree::Isobaric(w)
    }

    /// Largest jet derivative order occurring (`None` when no jet
    /// variable occurs).
    pub fn max_jet_order(&self) -> Option<u32> {
        self.terms
            .keys()
            .flat_map(|m| m.vars())
            .filter_map(|(v, _)| match v {
                VarSym::Jet { order, .. } => Some(*order),
                _ => None,
            })
            .max()
    }

    /// All variables occurring in the polynomial, in symbol order.
    pub fn variables(&self) -> Vec<VarSym> {
        let mut set = std::collections::BTreeSet::new();
        for m in self.terms.keys() {
            for (v, _) in m.vars() {
                set.insert(*v);
            }
        }
        set.into_iter().collect()
    }

    /// Ring-homomorphic substitution. Variables absent from the
    /// assignment map to themselves.
    pub fn substitute(&self, assignment: &BTreeMap<VarSym, DiffPoly>) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let mut prod = DiffPoly::constant(c.clone());
            for (v, e) in m.vars() {
                let image = match assignment.get(v) {
                    Some(p) => p.pow(*e),
                    None => DiffPoly::term(Monomial::var_pow(*v, *e), Q::one()),
                };
                prod = prod.mul(&image);
            }
            out = out.add(&prod);
        }
        out
    }

    /// Exact evaluation at a rational point covering every variable.
    pub fn evaluate(&self, point: &BTreeMap<VarSym, Q>) -> Result<Q, Error> {
        let mut total = Q::zero();
        for (m, c) in &self.terms {
            let mut prod = c.clone();
            for (v, e) in m.vars() {
                let val = point
                    .get(v)
                    .ok_or_else(|| Error::MissingVariable(v.to_string()))?;
                for _ in 0..*e {
                    prod *= val;
                }
            }
            total += prod;
        }
        Ok(total)
    }
}

/// Renders a rational with no leading `+`; integers drop the `/1`.
pub fn render_q(c: &Q) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // leading term first
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{}", render_q(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{}", render_q(&abs), m)?;
            }
        }
        Ok(())
    }
}
