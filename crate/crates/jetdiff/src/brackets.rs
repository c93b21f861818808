//! The invariant-operator bracket, the tower of bracket-generated
//! sections, brute-force computation of unipotent-invariant bases at a
//! fixed weighted degree, and bounded-degree membership testing against
//! a generator set.

use std::collections::BTreeSet;

use num::{One, Zero};
use serde::Serialize;

use crate::error::Error;
use crate::jet::{act_on_poly, InvarianceMode, Reparam};
use crate::linalg;
use crate::poly::{int, render_q, DiffPoly, Monomial, Q, VarSym, WeightedDegree};

fn isobaric_degree(p: &DiffPoly) -> Result<u64, Error> {
    match p.weighted_degree() {
        WeightedDegree::Isobaric(w) => Ok(w),
        WeightedDegree::Mixed => Err(Error::MixedWeight(p.to_string())),
    }
}

/// [P, Q] = deg(P)·P·DQ − deg(Q)·Q·DP with D the total derivative and
/// deg the weighted degree. Both arguments must be isobaric of nonzero
/// weight; the result is isobaric of weight deg P + deg Q + 1. This is
/// the unique normalization (up to scale) for which the reparametrization
/// anomalies of DP and DQ cancel, so brackets of invariants stay
/// invariant.
pub fn bracket(p: &DiffPoly, q: &DiffPoly) -> Result<DiffPoly, Error> {
    let dp = isobaric_degree(p)?;
    let dq = isobaric_degree(q)?;
    if dp == 0 {
        return Err(Error::ZeroDegree(p.to_string()));
    }
    if dq == 0 {
        return Err(Error::ZeroDegree(q.to_string()));
    }
    let left = p.mul(&q.total_derivative()).scale(&int(dp as i64));
    let right = q.mul(&p.total_derivative()).scale(&int(dq as i64));
    Ok(left.sub(&right))
}

/// The first-order operator value on component j: ξ_j'.
pub fn nabla(j: u32) -> DiffPoly {
    DiffPoly::var(VarSym::jet(j, 1))
}

/// One labeled component of the bracket tower.
#[derive(Debug, Clone)]
pub struct TowerComponent {
    /// Component indices applied outermost-first: [i_1, [i_2, [... ]]]
    /// ends with the base pair.
    pub indices: Vec<u32>,
    pub poly: DiffPoly,
}

impl TowerComponent {
    pub fn label(&self) -> String {
        let base = format!(
            "[\u{2207}{},\u{2207}{}]",
            self.indices[self.indices.len() - 2],
            self.indices[self.indices.len() - 1]
        );
        self.indices[..self.indices.len() - 2]
            .iter()
            .rev()
            .fold(base, |acc, i| format!("[\u{2207}{i},{acc}]"))
    }
}

/// The bracket tower through level k: level 2 holds [∇_i, ∇_j] for
/// i < j; level l > 2 holds [∇_i, c] for every component c of the
/// previous level and every i. Zero components are dropped.
pub fn qk_tower(n: usize, k: usize) -> Result<Vec<Vec<TowerComponent>>, Error> {
    if n < 2 || k < 2 {
        return Err(Error::Invalid("need n >= 2 and k >= 2".into()));
    }
    let mut levels: Vec<Vec<TowerComponent>> = Vec::new();
    let mut base = Vec::new();
    for i in 1..=n as u32 {
        for j in (i + 1)..=n as u32 {
            base.push(TowerComponent {
                indices: vec![i, j],
                poly: bracket(&nabla(i), &nabla(j))?,
            });
        }
    }
    levels.push(base);
    for _ in 3..=k {
        let prev = levels.last().unwrap();
        let mut next = Vec::new();
        for i in 1..=n as u32 {
            for c in prev {
                let poly = bracket(&nabla(i), &c.poly)?;
                if poly.is_zero() {
                    continue;
                }
                let mut indices = vec![i];
                indices.extend(&c.indices);
                next.push(TowerComponent { indices, poly });
            }
        }
        levels.push(next);
    }
    Ok(levels)
}

/// An element of the invariant space at weighted degree m: a rational
/// vector over an ordered monomial basis.
#[derive(Debug, Clone)]
pub struct GradedCandidate {
    pub n: usize,
    pub k: usize,
    pub m: u64,
    pub basis: Vec<Monomial>,
    pub coeffs: Vec<Q>,
}

impl GradedCandidate {
    pub fn to_poly(&self) -> DiffPoly {
        DiffPoly::from_terms(
            self.basis
                .iter()
                .cloned()
                .zip(self.coeffs.iter().cloned()),
        )
    }
}

fn default_monomial_limit() -> usize {
    std::env::var("JETDIFF_MAX_MONOMIALS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(5000)
}

/// All monomials of weighted degree m in the fiber variables ξ_i^{(j)},
/// 1 <= i <= n, 1 <= j <= k, in the canonical monomial order.
pub fn fiber_monomials(n: usize, k: usize, m: u64) -> Vec<Monomial> {
    // variables ordered by (component, order); weight of ξ_i^{(j)} is j
    let vars: Vec<(VarSym, u64)> = (1..=n as u32)
        .flat_map(|i| (1..=k as u32).map(move |j| (VarSym::jet(i, j), j as u64)))
        .collect();
    fn go(
        vars: &[(VarSym, u64)],
        rem: u64,
        acc: &mut Vec<(VarSym, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        if rem == 0 {
            out.push(Monomial::from_pairs(acc));
            return;
        }
        let Some(((v, w), rest)) = vars.split_first() else {
            return;
        };
        let max_e = rem / w;
        for e in (0..=max_e).rev() {
            if e > 0 {
                acc.push((*v, e as u32));
            }
            go(rest, rem - e * w, acc, out);
            if e > 0 {
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&vars, m, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Brute-force invariant basis at fixed weighted degree: enumerate the
/// degree-m fiber monomials, impose the symbolic invariance identity,
/// and solve the resulting exact linear system.
pub fn invariant_basis(
    n: usize,
    k: usize,
    m: u64,
    mode: InvarianceMode,
) -> Result<Vec<GradedCandidate>, Error> {
    if m == 0 {
        return Ok(vec![GradedCandidate {
            n,
            k,
            m,
            basis: vec![Monomial::one()],
            coeffs: vec![Q::one()],
        }]);
    }
    let monomials = fiber_monomials(n, k, m);
    let limit = default_monomial_limit();
    if monomials.len() > limit {
        return Err(Error::SizeLimit {
            needed: monomials.len(),
            limit,
        });
    }
    let phi = match mode {
        InvarianceMode::Unipotent => Reparam::unipotent_symbolic(k),
        InvarianceMode::Weighted(_) => Reparam::symbolic(k),
    };
    // residual of each candidate monomial under the defining identity
    let residuals: Vec<DiffPoly> = monomials
        .iter()
        .map(|mon| {
            let p = DiffPoly::term(mon.clone(), Q::one());
            let target = match mode {
                InvarianceMode::Unipotent => p.clone(),
                InvarianceMode::Weighted(_) => {
                    // the graded identity uses the monomial's own weight m
                    DiffPoly::term(Monomial::var_pow(VarSym::CoeffA(1), m as u32), Q::one())
                        .mul(&p)
                }
            };
            act_on_poly(&phi, &p).sub(&target)
        })
        .collect();
    // rows indexed by every mixed (a, ξ) monomial occurring anywhere
    let mut row_index = BTreeSet::new();
    for r in &residuals {
        for (mon, _) in r.terms() {
            row_index.insert(mon.clone());
        }
    }
    let rows: Vec<Vec<Q>> = row_index
        .iter()
        .map(|mon| residuals.iter().map(|r| r.coeff(mon)).collect())
        .collect();
    let basis = linalg::exact_nullspace(&rows, monomials.len());
    Ok(basis
        .into_iter()
        .map(|coeffs| GradedCandidate {
            n,
            k,
            m,
            basis: monomials.clone(),
            coeffs,
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateTerm {
    /// Exponent of each generator in the product, aligned with the
    /// generator list.
    pub exponents: Vec<u32>,
    pub coefficient: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipFailure {
    pub target_weight: u64,
    pub products_tried: usize,
    pub product_span_rank: usize,
    pub caveat: String,
}

#[derive(Debug, Clone)]
pub enum ExpressibilityOutcome {
    Member(Vec<CertificateTerm>),
    NotMember(MembershipFailure),
}

impl ExpressibilityOutcome {
    pub fn is_member(&self) -> bool {
        matches!(self, ExpressibilityOutcome::Member(_))
    }
}

/// Exponent vectors e with sum_i e_i * w_i = target.
fn weighted_exponents(weights: &[u64], target: u64) -> Vec<Vec<u32>> {
    fn go(weights: &[u64], rem: u64, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if weights.is_empty() {
            if rem == 0 {
                out.push(acc.clone());
            }
            return;
        }
        let w = weights[0];
        for e in 0..=(rem / w) {
            acc.push(e as u32);
            go(&weights[1..], rem - e * w, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(weights, target, &mut Vec::new(), &mut out);
    out
}

/// Decides whether `q` is a rational-linear combination of generator
/// products of total weight equal to the weight of `q`. A positive
/// answer carries an explicit certificate; a negative answer only rules
/// out combinations at this exact weight and refutes nothing stronger.
pub fn expressibility_check(
    q: &DiffPoly,
    generators: &[DiffPoly],
    max_weight: u64,
) -> Result<ExpressibilityOutcome, Error> {
    let w = isobaric_degree(q)?;
    if max_weight < w {
        return Err(Error::Invalid(format!(
            "max_weight {max_weight} below target weight {w}"
        )));
    }
    let weights: Vec<u64> = generators
        .iter()
        .map(|g| {
            let d = isobaric_degree(g)?;
            if d == 0 {
                return Err(Error::ZeroDegree(g.to_string()));
            }
            Ok(d)
        })
        .collect::<Result<_, _>>()?;
    let exponents = weighted_exponents(&weights, w);
    let limit = default_monomial_limit();
    if exponents.len() > limit {
        return Err(Error::SizeLimit {
            needed: exponents.len(),
            limit,
        });
    }
    let products: Vec<DiffPoly> = exponents
        .iter()
        .map(|e| {
            let mut p = DiffPoly::one();
            for (g, &exp) in generators.iter().zip(e) {
                p = p.mul(&g.pow(exp));
            }
            p
        })
        .collect();
    let mut row_index = BTreeSet::new();
    for p in products.iter().chain(std::iter::once(q)) {
        for (mon, _) in p.terms() {
            row_index.insert(mon.clone());
        }
    }
    let rows: Vec<Vec<Q>> = row_index
        .iter()
        .map(|mon| products.iter().map(|p| p.coeff(mon)).collect())
        .collect();
    let rhs: Vec<Q> = row_index.iter().map(|mon| q.coeff(mon)).collect();
    match linalg::solve(&rows, &rhs) {
        Some(x) => {
            let cert = exponents
                .iter()
                .zip(&x)
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| CertificateTerm {
                    exponents: e.clone(),
                    coefficient: render_q(c),
                })
                .collect();
            Ok(ExpressibilityOutcome::Member(cert))
        }
        None => Ok(ExpressibilityOutcome::NotMember(MembershipFailure {
            target_weight: w,
            products_tried: products.len(),
            product_span_rank: linalg::rank(&rows, products.len()),
            caveat: "a negative result only rules out rational-linear combinations of \
                     generator products at this exact weight; it does not refute \
                     algebraic dependence of any higher degree"
                .into(),
        })),
    }
}

/// Reconstructs a certificate as a polynomial for verification.
pub fn certificate_value(cert: &[CertificateTerm], generators: &[DiffPoly]) -> DiffPoly {
    let mut total = DiffPoly::zero();
    for term in cert {
        let mut p = DiffPoly::one();
        for (g, &e) in generators.iter().zip(&term.exponents) {
            p = p.mul(&g.pow(e));
        }
        let c: Q = parse_q(&term.coefficient);
        total = total.add(&p.scale(&c));
    }
    total
}

fn parse_q(s: &str) -> Q {
    match s.split_once('/') {
        Some((n, d)) => Q::new(n.parse().unwrap(), d.parse().unwrap()),
        None => Q::from(s.parse::<num::BigInt>().unwrap()),
    }
}

/// Serializable rendering of a graded candidate.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateReport {
    pub polynomial: String,
    pub coefficients: Vec<String>,
}

impl From<&GradedCandidate> for CandidateReport {
    fn from(c: &GradedCandidate) -> Self {
        CandidateReport {
            polynomial: c.to_poly().to_string(),
            coefficients: c.coeffs.iter().map(render_q).collect(),
        }
    }
}

pub fn paired_monomial_labels(c: &GradedCandidate) -> Vec<String> {
    c.basis.iter().map(|m| m.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{act_on_poly, is_invariant_at_order};
    use crate::poly::rat;

    fn xi(i: u32, j: u32) -> DiffPoly {
        DiffPoly::var(VarSym::jet(i, j))
    }

    fn wronskian_first() -> DiffPoly {
        xi(1, 1).mul(&xi(2, 2)).sub(&xi(2, 1).mul(&xi(1, 2)))
    }

    #[test]
    fn bracket_base_case() {
        let b = bracket(&nabla(1), &nabla(2)).unwrap();
        assert_eq!(b, wronskian_first());
    }

    #[test]
    fn bracket_of_equal_arguments_vanishes() {
        let p = xi(1, 1).mul(&xi(2, 1));
        assert!(bracket(&p, &p).unwrap().is_zero());
    }

    #[test]
    fn bracket_weight_additive_plus_one() {
        let w = wronskian_first();
        let b = bracket(&nabla(1), &w).unwrap();
        assert_eq!(b.weighted_degree(), WeightedDegree::Isobaric(5));
        // direct formula expansion oracle: ξ1'·D(W) − 3·W·ξ1''
        let expected = nabla(1)
            .mul(&w.total_derivative())
            .sub(&w.mul(&xi(1, 2)).scale(&int(3)));
        assert_eq!(b, expected);
        // and the result is unipotent-invariant at jet order 3
        assert!(is_invariant_at_order(&b, InvarianceMode::Unipotent, 3)
            .unwrap()
            .invariant);
    }

    #[test]
    fn bracket_rejects_zero_degree() {
        assert!(bracket(&DiffPoly::one(), &nabla(1)).is_err());
        let mixed = nabla(1).add(&xi(1, 2));
        assert!(bracket(&mixed, &nabla(1)).is_err());
    }

    #[test]
    fn tower_n2_base() {
        let tower = qk_tower(2, 2).unwrap();
        assert_eq!(tower.len(), 1);
        assert_eq!(tower[0].len(), 1);
        assert_eq!(tower[0][0].poly, wronskian_first());
        assert_eq!(tower[0][0].label(), "[\u{2207}1,\u{2207}2]");
    }

    #[test]
    fn tower_n2_k3_components_invariant() {
        let tower = qk_tower(2, 3).unwrap();
        assert_eq!(tower[1].len(), 2);
        for c in &tower[1] {
            assert!(
                is_invariant_at_order(&c.poly, InvarianceMode::Unipotent, 3)
                    .unwrap()
                    .invariant,
                "component {} not invariant",
                c.label()
            );
        }
    }

    #[test]
    fn repeated_index_base_bracket_vanishes() {
        assert!(bracket(&nabla(1), &nabla(1)).unwrap().is_zero());
    }

    #[test]
    fn first_derivative_monomials_embed_in_invariant_space() {
        // pure first-derivative monomials are pointwise fixed by the
        // unipotent action, so their weight-m span bounds the dimension
        for (n, k, m) in [(2, 2, 2u64), (2, 3, 3), (3, 2, 2)] {
            let pure = fiber_monomials(n, 1, m).len();
            let basis = invariant_basis(n, k, m, InvarianceMode::Unipotent).unwrap();
            assert!(
                basis.len() >= pure,
                "dimension {} below first-derivative count {pure} at ({n},{k},{m})",
                basis.len()
            );
            for mon in fiber_monomials(n, 1, m) {
                let p = DiffPoly::term(mon, Q::one());
                assert!(is_invariant_at_order(&p, InvarianceMode::Unipotent, k)
                    .unwrap()
                    .invariant);
            }
        }
    }

    #[test]
    fn invariant_basis_n2_k2_m1() {
        let basis = invariant_basis(2, 2, 1, InvarianceMode::Unipotent).unwrap();
        assert_eq!(basis.len(), 2);
        let polys: Vec<DiffPoly> = basis.iter().map(|c| c.to_poly()).collect();
        assert!(polys.contains(&nabla(1)));
        assert!(polys.contains(&nabla(2)));
    }

    #[test]
    fn invariant_basis_n1_k1_m3() {
        let basis = invariant_basis(1, 1, 3, InvarianceMode::Unipotent).unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0].to_poly(), nabla(1).pow(3));
    }

    #[test]
    fn invariant_basis_n2_k2_m3_dimension_five() {
        // hand computation: under a_1 = 1 the condition on
        // a·ξ1'ξ2'' + b·ξ2'ξ1'' forces a + b = 0, and ξ_i'ξ_i'' is never
        // fixed; the cubics in first derivatives always are.
        let basis = invariant_basis(2, 2, 3, InvarianceMode::Unipotent).unwrap();
        assert_eq!(basis.len(), 5);
        for c in &basis {
            let chk = is_invariant_at_order(&c.to_poly(), InvarianceMode::Unipotent, 2).unwrap();
            assert!(chk.invariant);
        }
        // the Wronskian is in the span: residual of solving for it is zero
        let w = wronskian_first();
        let polys: Vec<DiffPoly> = basis.iter().map(|c| c.to_poly()).collect();
        let mut mons = BTreeSet::new();
        for p in polys.iter().chain(std::iter::once(&w)) {
            for (m, _) in p.terms() {
                mons.insert(m.clone());
            }
        }
        let rows: Vec<Vec<Q>> = mons
            .iter()
            .map(|m| polys.iter().map(|p| p.coeff(m)).collect())
            .collect();
        let rhs: Vec<Q> = mons.iter().map(|m| w.coeff(m)).collect();
        assert!(linalg::solve(&rows, &rhs).is_some());
    }

    #[test]
    fn invariant_basis_m0_constants() {
        let basis = invariant_basis(2, 2, 0, InvarianceMode::Unipotent).unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0].to_poly(), DiffPoly::one());
    }

    #[test]
    fn weighted_basis_transforms_by_a1_power() {
        let basis = invariant_basis(2, 2, 3, InvarianceMode::Weighted(3)).unwrap();
        assert!(!basis.is_empty());
        let phi = Reparam::symbolic(2);
        for c in &basis {
            let p = c.to_poly();
            let lhs = act_on_poly(&phi, &p);
            let a1m = DiffPoly::term(Monomial::var_pow(VarSym::CoeffA(1), 3), Q::one());
            assert_eq!(lhs, a1m.mul(&p));
        }
    }

    #[test]
    fn membership_trivial_and_product() {
        let w = wronskian_first();
        let out = expressibility_check(&w, &[w.clone()], 3).unwrap();
        match out {
            ExpressibilityOutcome::Member(cert) => {
                assert_eq!(cert.len(), 1);
                assert_eq!(cert[0].exponents, vec![1]);
                assert_eq!(cert[0].coefficient, "1");
            }
            _ => panic!("expected membership"),
        }
        let gens = [nabla(1), nabla(2), w.clone()];
        let q = nabla(1).mul(&w);
        let out = expressibility_check(&q, &gens, 4).unwrap();
        assert!(out.is_member());
    }

    #[test]
    fn membership_failure_reports_caveat() {
        // ξ1'' is weight 2 but not generated by first derivatives alone
        let q = xi(1, 2);
        let out = expressibility_check(&q, &[nabla(1), nabla(2)], 2).unwrap();
        match out {
            ExpressibilityOutcome::NotMember(f) => {
                assert_eq!(f.target_weight, 2);
                assert!(!f.caveat.is_empty());
            }
            _ => panic!("expected failure"),
        }
    }

    #[test]
    fn all_five_cubic_invariants_are_generated() {
        let w = wronskian_first();
        let gens = [nabla(1), nabla(2), w];
        for c in invariant_basis(2, 2, 3, InvarianceMode::Unipotent).unwrap() {
            let q = c.to_poly();
            let out = expressibility_check(&q, &gens, 3).unwrap();
            match out {
                ExpressibilityOutcome::Member(cert) => {
                    assert_eq!(certificate_value(&cert, &gens), q);
                }
                _ => panic!("basis element {} not generated", q),
            }
        }
    }
}
