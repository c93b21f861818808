//! The k-jet fiber, the reparametrization group of truncated series
//! φ(t) = a_1 t + ... + a_k t^k, its upper-triangular matrix action on
//! normalized jets, and the invariance checker for fiber polynomials.

use std::collections::BTreeMap;

use num::One;

use crate::error::Error;
use crate::poly::{int, DiffPoly, Monomial, Q, VarSym, WeightedDegree};

/// A reparametrization a_1 t + ... + a_k t^k. Coefficients are
/// polynomials so symbolic a_m and numeric values share one type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reparam {
    coeffs: Vec<DiffPoly>, // coeffs[m-1] = a_m
}

impl Reparam {
    pub fn new(coeffs: Vec<DiffPoly>) -> Self {
        assert!(!coeffs.is_empty(), "reparametrization needs order k >= 1");
        Reparam { coeffs }
    }

    pub fn from_rationals(coeffs: Vec<Q>) -> Self {
        Reparam::new(coeffs.into_iter().map(DiffPoly::constant).collect())
    }

    /// The identity t at order k.
    pub fn identity(k: usize) -> Self {
        let mut coeffs = vec![DiffPoly::zero(); k];
        coeffs[0] = DiffPoly::one();
        Reparam::new(coeffs)
    }

    /// Fully symbolic a_1 t + ... + a_k t^k.
    pub fn symbolic(k: usize) -> Self {
        Reparam::new(
            (1..=k)
                .map(|m| DiffPoly::var(VarSym::CoeffA(m as u32)))
                .collect(),
        )
    }

    /// Symbolic unipotent element: a_1 = 1, a_2..a_k symbols.
    pub fn unipotent_symbolic(k: usize) -> Self {
        let mut coeffs = vec![DiffPoly::one()];
        coeffs.extend((2..=k).map(|m| DiffPoly::var(VarSym::CoeffA(m as u32))));
        Reparam::new(coeffs)
    }

    /// The scaling λt with symbolic λ = a_1, at order k.
    pub fn symbolic_scaling(k: usize) -> Self {
        let mut coeffs = vec![DiffPoly::zero(); k];
        coeffs[0] = DiffPoly::var(VarSym::CoeffA(1));
        Reparam::new(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, m: usize) -> &DiffPoly {
        &self.coeffs[m - 1]
    }

    pub fn is_unipotent(&self) -> bool {
        self.coeffs[0] == DiffPoly::one()
    }

    /// Truncated polynomial representation: index m holds the t^m
    /// coefficient, 0 <= m <= k.
    fn as_series(&self) -> Vec<DiffPoly> {
        let mut s = vec![DiffPoly::zero()];
        s.extend(self.coeffs.iter().cloned());
        s
    }
}

fn series_mul(a: &[DiffPoly], b: &[DiffPoly], k: usize) -> Vec<DiffPoly> {
    let mut out = vec![DiffPoly::zero(); k + 1];
    for (i, ai) in a.iter().enumerate().take(k + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(k + 1 - i) {
            out[i + j] = out[i + j].add(&ai.mul(bj));
        }
    }
    out
}

/// The k x k matrix of the reparametrization action: entry (i, j) is the
/// t^j coefficient of φ(t)^i (1-based), upper triangular with diagonal
/// a_1^i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionMatrix {
    pub k: usize,
    entries: Vec<Vec<DiffPoly>>, // entries[i-1][j-1]
}

impl ActionMatrix {
    pub fn entry(&self, i: usize, j: usize) -> &DiffPoly {
        &self.entries[i - 1][j - 1]
    }

    pub fn rows(&self) -> &[Vec<DiffPoly>] {
        &self.entries
    }

    pub fn mul(&self, other: &ActionMatrix) -> ActionMatrix {
        assert_eq!(self.k, other.k);
        let k = self.k;
        let entries = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let mut s = DiffPoly::zero();
                        for l in 0..k {
                            s = s.add(&self.entries[i][l].mul(&other.entries[l][j]));
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        ActionMatrix { k, entries }
    }
}

/// Entry (i, j) = coefficient of t^j in φ(t)^i.
pub fn action_matrix(phi: &Reparam) -> ActionMatrix {
    let k = phi.order();
    let s = phi.as_series();
    let mut power = {
        let mut one = vec![DiffPoly::zero(); k + 1];
        one[0] = DiffPoly::one();
        one
    };
    let mut entries = Vec::with_capacity(k);
    for _ in 1..=k {
        power = series_mul(&power, &s, k);
        entries.push(power[1..=k].to_vec());
    }
    ActionMatrix { k, entries }
}

/// Coefficients of φ(ψ(t)) truncated at t^k. With this convention
/// action_matrix(compose(φ, ψ)) = action_matrix(φ) · action_matrix(ψ)
/// and acting by compose(φ, ψ) equals acting by φ then by ψ.
pub fn compose_reparam(phi: &Reparam, psi: &Reparam) -> Reparam {
    assert_eq!(phi.order(), psi.order(), "orders must match");
    let k = phi.order();
    let inner = psi.as_series();
    let mut acc = vec![DiffPoly::zero(); k + 1];
    let mut power = {
        let mut one = vec![DiffPoly::zero(); k + 1];
        one[0] = DiffPoly::one();
        one
    };
    for m in 1..=k {
        power = series_mul(&power, &inner, k);
        let am = phi.coeff(m);
        for (o, p) in acc.iter_mut().zip(power.iter()) {
            *o = o.add(&am.mul(p));
        }
    }
    Reparam::new(acc[1..=k].to_vec())
}

/// A point of the k-jet fiber: entries (i, j) hold f_i^{(j)}(0) for
/// components 1..n and orders 1..k, as raw (unnormalized) derivatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Jet {
    pub n: usize,
    pub k: usize,
    entries: Vec<Vec<DiffPoly>>, // entries[i-1][j-1]
}

impl Jet {
    pub fn new(n: usize, k: usize, entries: Vec<Vec<DiffPoly>>) -> Self {
        assert_eq!(entries.len(), n);
        assert!(entries.iter().all(|row| row.len() == k));
        Jet { n, k, entries }
    }

    /// The symbolic canonical jet: entry (i, j) is the variable ξ_i^{(j)}.
    pub fn canonical(n: usize, k: usize) -> Self {
        let entries = (1..=n)
            .map(|i| {
                (1..=k)
                    .map(|j| DiffPoly::var(VarSym::jet(i as u32, j as u32)))
                    .collect()
            })
            .collect();
        Jet { n, k, entries }
    }

    pub fn from_rationals(n: usize, k: usize, values: Vec<Vec<Q>>) -> Self {
        Jet::new(
            n,
            k,
            values
                .into_iter()
                .map(|row| row.into_iter().map(DiffPoly::constant).collect())
                .collect(),
        )
    }

    pub fn entry(&self, i: usize, j: usize) -> &DiffPoly {
        &self.entries[i - 1][j - 1]
    }
}

fn factorial(n: usize) -> Q {
    let mut f = Q::one();
    for i in 2..=n {
        f *= int(i as i64);
    }
    f
}

/// The jet of f ∘ φ: the factorial-normalized row vector
/// [f'(0), f''(0)/2!, ...] is multiplied by the action matrix on the
/// right, then denormalized.
pub fn act_on_jet(phi: &Reparam, jet: &Jet) -> Jet {
    assert_eq!(phi.order(), jet.k, "orders must match");
    let mat = action_matrix(phi);
    let k = jet.k;
    let entries = (1..=jet.n)
        .map(|i| {
            (1..=k)
                .map(|j| {
                    let mut s = DiffPoly::zero();
                    for l in 1..=j {
                        let v = jet.entry(i, l).scale(&(Q::one() / factorial(l)));
                        s = s.add(&v.mul(mat.entry(l, j)));
                    }
                    s.scale(&factorial(j))
                })
                .collect()
        })
        .collect();
    Jet {
        n: jet.n,
        k,
        entries,
    }
}

/// Q(f ∘ φ): substitutes each fiber variable ξ_i^{(j)}, 1 <= j <= k, by
/// the corresponding entry of the acted canonical jet. Order-0 variables
/// are untouched (the base point is fixed).
pub fn act_on_poly(phi: &Reparam, q: &DiffPoly) -> DiffPoly {
    let k = phi.order();
    let n = q
        .variables()
        .iter()
        .filter_map(|v| match v {
            VarSym::Jet { component, .. } => Some(*component as usize),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    if n == 0 {
        return q.clone();
    }
    let acted = act_on_jet(phi, &Jet::canonical(n, k));
    let mut assignment = BTreeMap::new();
    for i in 1..=n {
        for j in 1..=k {
            assignment.insert(VarSym::jet(i as u32, j as u32), acted.entry(i, j).clone());
        }
    }
    q.substitute(&assignment)
}

/// Invariance mode: the unipotent condition (a_1 = 1) or the weighted
/// condition Q(f ∘ φ) = a_1^m Q(f).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvarianceMode {
    Unipotent,
    Weighted(u64),
}

/// Outcome of an invariance check; on failure the nonzero residual is
/// the witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvarianceCheck {
    pub invariant: bool,
    pub witness: Option<DiffPoly>,
}

/// Symbolic invariance check: the defining identity is verified as an
/// exact polynomial identity in a_1, .., a_k.
pub fn is_invariant(q: &DiffPoly, mode: InvarianceMode) -> Result<InvarianceCheck, Error> {
    is_invariant_at_order(q, mode, q.max_jet_order().unwrap_or(0) as usize)
}

/// Same check but with the jet order (hence the number of symbolic
/// reparametrization coefficients) given explicitly.
pub fn is_invariant_at_order(
    q: &DiffPoly,
    mode: InvarianceMode,
    k: usize,
) -> Result<InvarianceCheck, Error> {
    if k == 0 {
        return Ok(InvarianceCheck {
            invariant: true,
            witness: None,
        });
    }
    let residual = match mode {
        InvarianceMode::Unipotent => {
            let phi = Reparam::unipotent_symbolic(k);
            act_on_poly(&phi, q).sub(q)
        }
        InvarianceMode::Weighted(m) => {
            if let WeightedDegree::Mixed = q.weighted_degree() {
                return Err(Error::MixedWeight(q.to_string()));
            }
            let phi = Reparam::symbolic(k);
            let a1m = DiffPoly::term(
                Monomial::var_pow(VarSym::CoeffA(1), m as u32),
                Q::one(),
            );
            act_on_poly(&phi, q).sub(&a1m.mul(q))
        }
    };
    if residual.is_zero() {
        Ok(InvarianceCheck {
            invariant: true,
            witness: None,
        })
    } else {
        Ok(InvarianceCheck {
            invariant: false,
            witness: Some(residual),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn xi(i: u32, j: u32) -> DiffPoly {
        DiffPoly::var(VarSym::jet(i, j))
    }

    fn a(m: u32) -> DiffPoly {
        DiffPoly::var(VarSym::CoeffA(m))
    }

    #[test]
    fn identity_reparam_gives_identity_matrix() {
        let mat = action_matrix(&Reparam::identity(4));
        for i in 1..=4 {
            for j in 1..=4 {
                let expected = if i == j {
                    DiffPoly::one()
                } else {
                    DiffPoly::zero()
                };
                assert_eq!(*mat.entry(i, j), expected);
            }
        }
    }

    #[test]
    fn symbolic_k3_matrix_rows() {
        let mat = action_matrix(&Reparam::symbolic(3));
        assert_eq!(*mat.entry(1, 1), a(1));
        assert_eq!(*mat.entry(1, 2), a(2));
        assert_eq!(*mat.entry(1, 3), a(3));
        assert_eq!(*mat.entry(2, 1), DiffPoly::zero());
        assert_eq!(*mat.entry(2, 2), a(1).pow(2));
        assert_eq!(*mat.entry(2, 3), a(1).mul(&a(2)).scale(&int(2)));
        assert_eq!(*mat.entry(3, 3), a(1).pow(3));
        assert_eq!(*mat.entry(3, 1), DiffPoly::zero());
        assert_eq!(*mat.entry(3, 2), DiffPoly::zero());
    }

    // independent oracle: repeated truncated series multiplication,
    // written out without reusing action_matrix's internal helper
    fn series_power_oracle(phi: &Reparam, i: usize, j: usize) -> DiffPoly {
        let k = phi.order();
        // coefficients of phi^i by direct convolution, i factors
        let mut acc = vec![DiffPoly::zero(); k + 1];
        acc[0] = DiffPoly::one();
        for _ in 0..i {
            let mut next = vec![DiffPoly::zero(); k + 1];
            for p in 0..=k {
                for m in 1..=k {
                    if p + m <= k {
                        next[p + m] = next[p + m].add(&acc[p].mul(phi.coeff(m)));
                    }
                }
            }
            acc = next;
        }
        acc[j].clone()
    }

    #[test]
    fn k4_matrix_matches_series_power_oracle() {
        let phi = Reparam::symbolic(4);
        let mat = action_matrix(&phi);
        for i in 1..=4 {
            for j in 1..=4 {
                assert_eq!(*mat.entry(i, j), series_power_oracle(&phi, i, j));
            }
        }
    }

    #[test]
    fn upper_triangular_with_power_diagonal_up_to_k6() {
        for k in 1..=6 {
            let mat = action_matrix(&Reparam::symbolic(k));
            for i in 1..=k {
                assert_eq!(*mat.entry(i, i), a(1).pow(i as u32));
                for j in 1..i {
                    assert_eq!(*mat.entry(i, j), DiffPoly::zero());
                }
            }
        }
    }

    #[test]
    fn compose_with_identity() {
        let phi = Reparam::from_rationals(vec![int(1), rat(2, 3), int(-1)]);
        assert_eq!(compose_reparam(&phi, &Reparam::identity(3)), phi);
        assert_eq!(compose_reparam(&Reparam::identity(3), &phi), phi);
    }

    #[test]
    fn unipotent_composition_adds_second_coefficients() {
        // hand series composition: (t + p t^2) ∘ (t + q t^2) = t + (p+q) t^2 + O(t^3)
        let p = rat(5, 7);
        let q = rat(-2, 3);
        let phi = Reparam::from_rationals(vec![int(1), p.clone()]);
        let psi = Reparam::from_rationals(vec![int(1), q.clone()]);
        let comp = compose_reparam(&phi, &psi);
        assert_eq!(*comp.coeff(1), DiffPoly::one());
        assert_eq!(*comp.coeff(2), DiffPoly::constant(p + q));
        assert!(comp.is_unipotent());
    }

    #[test]
    fn compose_matches_matrix_product_symbolically() {
        // two independent symbolic reparametrizations at k = 3, the second
        // built from c-symbols so the coefficient sets stay disjoint
        let phi = Reparam::symbolic(3);
        let psi = Reparam::new(
            (1..=3)
                .map(|m| DiffPoly::var(VarSym::ConstC(1, m)))
                .collect(),
        );
        let lhs = action_matrix(&compose_reparam(&phi, &psi));
        let rhs = action_matrix(&phi).mul(&action_matrix(&psi));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn scaling_action_on_jet() {
        let jet = Jet::canonical(2, 3);
        let acted = act_on_jet(&Reparam::symbolic_scaling(3), &jet);
        for i in 1..=2 {
            for j in 1..=3 {
                assert_eq!(*acted.entry(i, j), a(1).pow(j as u32).mul(&xi(i as u32, j as u32)));
            }
        }
    }

    #[test]
    fn identity_fixes_jet() {
        let jet = Jet::canonical(3, 4);
        assert_eq!(act_on_jet(&Reparam::identity(4), &jet), jet);
    }

    #[test]
    fn unipotent_k2_second_derivative() {
        // chain rule oracle: (f∘φ)'' = f''·a_1^2 + 2 a_2 f', with a_1 = 1
        let jet = Jet::canonical(1, 2);
        let phi = Reparam::unipotent_symbolic(2);
        let acted = act_on_jet(&phi, &jet);
        assert_eq!(*acted.entry(1, 1), xi(1, 1));
        let expected = xi(1, 2).add(&a(2).mul(&xi(1, 1)).scale(&int(2)));
        assert_eq!(*acted.entry(1, 2), expected);
    }

    #[test]
    fn action_compatible_with_composition() {
        for k in 1..=4 {
            let phi = Reparam::symbolic(k);
            let psi = Reparam::new(
                (1..=k)
                    .map(|m| DiffPoly::var(VarSym::ConstC(2, m as u32)))
                    .collect(),
            );
            let jet = Jet::canonical(2, k);
            let once = act_on_jet(&compose_reparam(&phi, &psi), &jet);
            let twice = act_on_jet(&psi, &act_on_jet(&phi, &jet));
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn act_on_constant_poly() {
        let c = DiffPoly::constant(rat(9, 4));
        assert_eq!(act_on_poly(&Reparam::symbolic(2), &c), c);
    }

    #[test]
    fn scaling_multiplies_isobaric_by_weight_power() {
        // weight 5 example: ξ_1' (ξ_2'')^2
        let q = xi(1, 1).mul(&xi(2, 2).pow(2));
        let acted = act_on_poly(&Reparam::symbolic_scaling(2), &q);
        assert_eq!(acted, a(1).pow(5).mul(&q));
    }

    #[test]
    fn wronskian_cross_terms_cancel_under_unipotent() {
        let w = xi(1, 1).mul(&xi(2, 2)).sub(&xi(2, 1).mul(&xi(1, 2)));
        let acted = act_on_poly(&Reparam::unipotent_symbolic(2), &w);
        assert_eq!(acted, w);
    }

    #[test]
    fn first_derivative_weight_one_invariant() {
        let chk = is_invariant(&xi(1, 1), InvarianceMode::Weighted(1)).unwrap();
        assert!(chk.invariant);
    }

    #[test]
    fn second_derivative_not_unipotent_invariant() {
        let chk = is_invariant(&xi(1, 2), InvarianceMode::Unipotent).unwrap();
        assert!(!chk.invariant);
        let witness = chk.witness.unwrap();
        assert_eq!(witness, a(2).mul(&xi(1, 1)).scale(&int(2)));
    }

    #[test]
    fn wronskian_weighted_three_invariant() {
        let w = xi(1, 1).mul(&xi(2, 2)).sub(&xi(2, 1).mul(&xi(1, 2)));
        let chk = is_invariant(&w, InvarianceMode::Weighted(3)).unwrap();
        assert!(chk.invariant, "witness: {:?}", chk.witness);
    }

    #[test]
    fn weighted_mode_rejects_mixed_weight() {
        let q = xi(1, 1).add(&xi(1, 2));
        assert!(is_invariant(&q, InvarianceMode::Weighted(1)).is_err());
    }

    #[test]
    fn weighted_invariance_implies_unipotent_invariance() {
        let w = xi(1, 1).mul(&xi(2, 2)).sub(&xi(2, 1).mul(&xi(1, 2)));
        for q in [xi(1, 1), w] {
            let wd = match q.weighted_degree() {
                WeightedDegree::Isobaric(m) => m,
                _ => unreachable!(),
            };
            if is_invariant(&q, InvarianceMode::Weighted(wd)).unwrap().invariant {
                assert!(is_invariant(&q, InvarianceMode::Unipotent).unwrap().invariant);
            }
        }
    }
}
