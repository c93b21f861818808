//! Monic linear differential operators from solution tuples, series
//! solutions of the indeterminate-coefficient equation, the Wronskian
//! dependence criterion, and the constant-matrix scaling check.

use std::collections::BTreeMap;

use num::{One, Zero};
use serde::Serialize;

use crate::error::Error;
use crate::linalg;
use crate::poly::{int, DiffPoly, Q, VarSym};
use crate::series::TruncSeries;
use crate::wronskian::{
    b_from_a, det_poly, generalized_wronskian_series, wronskian_series, wronskian_symbolic,
    Partition,
};

/// A monic operator y^{(n)} + a_1 y^{(n-1)} + ... + a_n y with series
/// coefficients (constants are exact one-term series).
#[derive(Debug, Clone)]
pub struct LinearODE {
    coeffs: Vec<TruncSeries>, // coeffs[i-1] = a_i
}

impl LinearODE {
    pub fn new(coeffs: Vec<TruncSeries>) -> Self {
        LinearODE { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> &TruncSeries {
        &self.coeffs[i - 1]
    }

    pub fn coeffs(&self) -> &[TruncSeries] {
        &self.coeffs
    }

    /// The same operator in the alternating-sign convention
    /// y^{(n)} - ã_1 y^{(n-1)} + ... + (-1)^n ã_n y: ã_k = (-1)^k a_k.
    pub fn alternating_coeffs(&self) -> Vec<TruncSeries> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(idx, a)| if (idx + 1) % 2 == 1 { a.neg() } else { a.clone() })
            .collect()
    }

    /// L(y): the residual series, zero through its precision when y is a
    /// solution.
    pub fn apply(&self, y: &TruncSeries) -> TruncSeries {
        let n = self.order();
        let mut res = y.derivative_n(n);
        for (i, a) in self.coeffs.iter().enumerate() {
            res = res.add(&a.mul(&y.derivative_n(n - 1 - i)));
        }
        res
    }
}

/// Builds the monic operator annihilating the given tuple from ratios of
/// shifted Wronskians: a_i = (-1)^i W_{(1^i)}(u) / W_0(u), with the
/// coefficients computed as series through t^order.
pub fn ode_from_solutions(us: &[TruncSeries], order: usize) -> Result<LinearODE, Error> {
    let n = us.len();
    if n == 0 {
        return Err(Error::Invalid("need at least one solution".into()));
    }
    let w0 = wronskian_series(us)?;
    let w0_const = w0.coeff(0)?.as_constant().ok_or(Error::NonConstantCoefficient)?;
    if w0_const.is_zero() {
        return Err(Error::VanishingWronskian);
    }
    let coeffs = (1..=n)
        .map(|i| {
            let minor = generalized_wronskian_series(&Partition::column(i as u32), us)?;
            let ratio = minor.div(&w0, order)?;
            Ok(if i % 2 == 1 { ratio.neg() } else { ratio })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(LinearODE::new(coeffs))
}

/// The series Σ b_n t^n / n! with b the inverse coefficients of the
/// alternating generating polynomial of `a` (given in the alternating
/// convention), truncated at t^N. It solves the alternating-sign
/// equation of order a.len() when the a_k are constants.
pub fn series_solution(a: &[DiffPoly], n: usize) -> TruncSeries {
    let b = b_from_a(a, n);
    let coeffs = b
        .iter()
        .enumerate()
        .map(|(j, bj)| {
            let mut f = Q::one();
            for i in 2..=j {
                f *= int(i as i64);
            }
            bj.scale(&(Q::one() / f))
        })
        .collect();
    TruncSeries::new(coeffs, n)
}

/// Residual of the alternating-sign equation
/// ξ^{(r+1)} - a_1 ξ^{(r)} + ... + (-1)^{r+1} a_{r+1} ξ applied to a
/// series, with constant (possibly symbolic) coefficients.
pub fn alternating_residual(a: &[DiffPoly], xs: &TruncSeries) -> TruncSeries {
    let order = a.len();
    let mut res = xs.derivative_n(order);
    for (k, ak) in a.iter().enumerate() {
        let sign = if (k + 1) % 2 == 1 { -1 } else { 1 };
        let factor = TruncSeries::exact(vec![ak.scale(&int(sign))]);
        res = res.add(&factor.mul(&xs.derivative_n(order - 1 - k)));
    }
    res
}

/// Fundamental system of the alternating-sign constant-coefficient
/// equation with the delta initial conditions u_i^{(j)}(0) = δ_ij,
/// truncated at t^N. Coefficients may be symbolic.
pub fn fundamental_system(a: &[DiffPoly], n: usize) -> Vec<TruncSeries> {
    let m = a.len();
    (0..m)
        .map(|i| {
            let mut deriv = vec![DiffPoly::zero(); n + 1];
            if i <= n {
                deriv[i] = DiffPoly::one();
            }
            for j in m..=n {
                let mut s = DiffPoly::zero();
                for (k, ak) in a.iter().enumerate() {
                    let term = ak.mul(&deriv[j - 1 - k]);
                    s = if (k + 1) % 2 == 1 { s.add(&term) } else { s.sub(&term) };
                }
                deriv[j] = s;
            }
            let coeffs = deriv
                .iter()
                .enumerate()
                .map(|(j, d)| {
                    let mut f = Q::one();
                    for x in 2..=j {
                        f *= int(x as i64);
                    }
                    d.scale(&(Q::one() / f))
                })
                .collect();
            TruncSeries::new(coeffs, n)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dependence {
    Dependent,
    Independent,
}

#[derive(Debug, Clone, Serialize)]
pub struct DependenceReport {
    pub verdict: Dependence,
    pub wronskian: String,
    pub wronskian_is_zero: bool,
    pub coefficient_rank: usize,
    pub tuple_size: usize,
    pub oracle_agrees: bool,
}

/// Exact dependence test for polynomial tuples: the Wronskian vanishes
/// identically iff the tuple is linearly dependent over constants. The
/// verdict is cross-checked against the rank of the coefficient matrix.
pub fn dependence_test(fs: &[TruncSeries]) -> Result<DependenceReport, Error> {
    if fs.iter().any(|f| !f.is_exact()) {
        return Err(Error::Invalid(
            "dependence test needs exact polynomial input".into(),
        ));
    }
    let m = fs.len();
    // convert to polynomials in t
    let polys: Vec<DiffPoly> = fs
        .iter()
        .map(|f| {
            let mut p = DiffPoly::zero();
            for k in 0..f.coeffs_len() {
                let c = f.coeff(k).expect("exact series cover all indices");
                if c.as_constant().is_none() {
                    return Err(Error::NonConstantCoefficient);
                }
                p = p.add(&DiffPoly::var(VarSym::T).pow(k as u32).mul(&c));
            }
            Ok(p)
        })
        .collect::<Result<_, _>>()?;
    let mat: Vec<Vec<DiffPoly>> = (0..m)
        .map(|j| {
            polys
                .iter()
                .map(|p| {
                    let mut d = p.clone();
                    for _ in 0..j {
                        d = d.total_derivative();
                    }
                    d
                })
                .collect()
        })
        .collect();
    let w = det_poly(&mat);
    let w_zero = w.is_zero();

    // independent oracle: rank of the coefficient matrix over constants
    let max_deg = polys
        .iter()
        .flat_map(|p| p.terms().map(|(mon, _)| mon.exponent(&VarSym::T)))
        .max()
        .unwrap_or(0) as usize;
    let rows: Vec<Vec<Q>> = (0..=max_deg)
        .map(|d| {
            polys
                .iter()
                .map(|p| p.coeff(&crate::poly::Monomial::var_pow(VarSym::T, d as u32)))
                .collect()
        })
        .collect();
    let rank = linalg::rank(&rows, m);
    let dependent_by_rank = rank < m;
    let verdict = if w_zero {
        Dependence::Dependent
    } else {
        Dependence::Independent
    };
    Ok(DependenceReport {
        verdict,
        wronskian: w.to_string(),
        wronskian_is_zero: w_zero,
        coefficient_rank: rank,
        tuple_size: m,
        oracle_agrees: w_zero == dependent_by_rank,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GaloisScalingReport {
    pub m: usize,
    pub determinant: String,
    pub transformed_wronskian: String,
    pub scaled_wronskian: String,
    pub identity_holds: bool,
}

/// With a fully symbolic m×m constant matrix acting on m differential
/// indeterminates order by order, checks W(c·ξ) = det(c)·W(ξ) as an
/// exact polynomial identity.
pub fn galois_scaling_check(m: usize) -> GaloisScalingReport {
    let w = wronskian_symbolic(m);
    let sub = constant_matrix_substitution(m, m);
    let transformed = w.substitute(&sub);
    let cmat: Vec<Vec<DiffPoly>> = (1..=m)
        .map(|i| {
            (1..=m)
                .map(|l| DiffPoly::var(VarSym::ConstC(i as u32, l as u32)))
                .collect()
        })
        .collect();
    let det = det_poly(&cmat);
    let scaled = det.mul(&w);
    GaloisScalingReport {
        m,
        determinant: det.to_string(),
        transformed_wronskian: transformed.to_string(),
        scaled_wronskian: scaled.to_string(),
        identity_holds: transformed == scaled,
    }
}

/// The substitution ξ_i^{(j)} ↦ Σ_l c_{i,l} ξ_l^{(j)} for components
/// 1..m and orders 0..max_order (the action commutes with D by
/// construction).
pub fn constant_matrix_substitution(m: usize, max_order: usize) -> BTreeMap<VarSym, DiffPoly> {
    let mut sub = BTreeMap::new();
    for i in 1..=m as u32 {
        for j in 0..=max_order as u32 {
            let mut image = DiffPoly::zero();
            for l in 1..=m as u32 {
                image = image.add(
                    &DiffPoly::var(VarSym::ConstC(i, l)).mul(&DiffPoly::var(VarSym::jet(l, j))),
                );
            }
            sub.insert(VarSym::jet(i, j), image);
        }
    }
    sub
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn exact(vals: Vec<Q>) -> TruncSeries {
        TruncSeries::exact_rational(vals)
    }

    #[test]
    fn monomial_basis_gives_zero_operator() {
        let us = vec![
            exact(vec![int(1)]),
            exact(vec![int(0), int(1)]),
            exact(vec![int(0), int(0), int(1)]),
        ];
        let ode = ode_from_solutions(&us, 4).unwrap();
        assert_eq!(ode.order(), 3);
        for i in 1..=3 {
            assert!(ode.coeff(i).is_zero_through_precision());
        }
    }

    #[test]
    fn exponential_gives_y_prime_minus_y() {
        let n = 8;
        let coeffs: Vec<Q> = (0..=n)
            .map(|j| {
                let mut f = Q::one();
                for i in 2..=j {
                    f *= int(i as i64);
                }
                Q::one() / f
            })
            .collect();
        let u = TruncSeries::new(coeffs.into_iter().map(DiffPoly::constant).collect(), n);
        let ode = ode_from_solutions(&[u.clone()], 5).unwrap();
        // a_1 = -1: y' - y = 0
        for k in 0..=5 {
            let c = ode.coeff(1).coeff(k).unwrap().as_constant().unwrap();
            assert_eq!(c, if k == 0 { int(-1) } else { int(0) });
        }
        let res = ode.apply(&u);
        assert!(res.is_zero_through_precision());
    }

    #[test]
    fn cosh_sinh_pair_gives_y_double_prime_minus_y() {
        let n = 9;
        let fact = |j: usize| {
            let mut f = Q::one();
            for i in 2..=j {
                f *= int(i as i64);
            }
            f
        };
        let cosh: Vec<DiffPoly> = (0..=n)
            .map(|j| {
                if j % 2 == 0 {
                    DiffPoly::constant(Q::one() / fact(j))
                } else {
                    DiffPoly::zero()
                }
            })
            .collect();
        let sinh: Vec<DiffPoly> = (0..=n)
            .map(|j| {
                if j % 2 == 1 {
                    DiffPoly::constant(Q::one() / fact(j))
                } else {
                    DiffPoly::zero()
                }
            })
            .collect();
        let us = vec![TruncSeries::new(cosh, n), TruncSeries::new(sinh, n)];
        let ode = ode_from_solutions(&us, 4).unwrap();
        // y'' + 0·y' - 1·y = 0
        for k in 0..=4 {
            assert!(ode.coeff(1).coeff(k).unwrap().is_zero());
            let a2 = ode.coeff(2).coeff(k).unwrap().as_constant().unwrap();
            assert_eq!(a2, if k == 0 { int(-1) } else { int(0) });
        }
        for u in &us {
            assert!(ode.apply(u).is_zero_through_precision());
        }
    }

    #[test]
    fn vanishing_wronskian_is_an_error() {
        let us = vec![exact(vec![int(0), int(1)]), exact(vec![int(0), int(2)])];
        assert!(matches!(
            ode_from_solutions(&us, 3),
            Err(Error::VanishingWronskian)
        ));
    }

    #[test]
    fn trivial_series_solution() {
        // all a = 0: ξ_0 = 1 and ξ^{(r+1)} = 0
        let a = vec![DiffPoly::zero(); 3];
        let s = series_solution(&a, 8);
        assert_eq!(s.coeff(0).unwrap(), DiffPoly::one());
        for k in 1..=8 {
            assert!(s.coeff(k).unwrap().is_zero());
        }
        assert!(alternating_residual(&a, &s).is_zero_through_precision());
    }

    #[test]
    fn order_one_symbolic_exponential() {
        // r = 0: ξ_0 = Σ a_1^n t^n/n! and ξ' - a_1 ξ = 0
        let a1 = DiffPoly::var(VarSym::CoeffA(1));
        let s = series_solution(&[a1.clone()], 7);
        for j in 0..=7 {
            let mut f = Q::one();
            for i in 2..=j {
                f *= int(i as i64);
            }
            assert_eq!(s.coeff(j).unwrap(), a1.pow(j as u32).scale(&(Q::one() / f)));
        }
        assert!(alternating_residual(&[a1], &s).is_zero_through_precision());
    }

    #[test]
    fn order_three_symbolic_residual_vanishes() {
        let a: Vec<DiffPoly> = (1..=3).map(|i| DiffPoly::var(VarSym::CoeffA(i))).collect();
        let s = series_solution(&a, 10);
        let res = alternating_residual(&a, &s);
        // usable through t^7 after three derivatives
        assert_eq!(res.order_bound(), Some(7));
        assert!(res.is_zero_through_precision());
    }

    #[test]
    fn round_trip_constant_coefficients() {
        // fundamental system of a constant-coefficient equation, then
        // recover the alternating coefficients through the Wronskian form
        for a in [
            vec![DiffPoly::constant(rat(2, 3))],
            vec![DiffPoly::constant(int(1)), DiffPoly::constant(rat(-1, 2))],
            vec![
                DiffPoly::constant(rat(1, 2)),
                DiffPoly::constant(int(-2)),
                DiffPoly::constant(rat(3, 5)),
            ],
        ] {
            let n = 12;
            let us = fundamental_system(&a, n);
            let ode = ode_from_solutions(&us, 4).unwrap();
            let alt = ode.alternating_coeffs();
            for (k, ak) in a.iter().enumerate() {
                let series = &alt[k];
                assert_eq!(series.coeff(0).unwrap(), *ak);
                for j in 1..=4 {
                    assert!(series.coeff(j).unwrap().is_zero(), "a_{} not constant", k + 1);
                }
            }
            // the canonical series solution satisfies the recovered operator
            let s = series_solution(&a, n);
            assert!(ode.apply(&s).is_zero_through_precision());
        }
    }

    #[test]
    fn dependent_tuple() {
        let fs = vec![
            exact(vec![int(0), int(1)]),
            exact(vec![int(0), int(2)]),
            exact(vec![int(0), int(0), int(1)]),
        ];
        let r = dependence_test(&fs).unwrap();
        assert_eq!(r.verdict, Dependence::Dependent);
        assert!(r.wronskian_is_zero);
        assert!(r.oracle_agrees);
    }

    #[test]
    fn independent_monomials() {
        let fs = vec![
            exact(vec![int(1)]),
            exact(vec![int(0), int(1)]),
            exact(vec![int(0), int(0), int(1)]),
        ];
        let r = dependence_test(&fs).unwrap();
        assert_eq!(r.verdict, Dependence::Independent);
        assert_eq!(r.wronskian, "2");
        assert!(r.oracle_agrees);
    }

    #[test]
    fn independent_pair() {
        let fs = vec![exact(vec![int(1), int(1)]), exact(vec![int(1), int(-1)])];
        let r = dependence_test(&fs).unwrap();
        assert_eq!(r.verdict, Dependence::Independent);
        assert_eq!(r.wronskian, "-2");
        assert!(r.oracle_agrees);
    }

    #[test]
    fn galois_scaling_small_m() {
        for m in 1..=3 {
            let r = galois_scaling_check(m);
            assert!(r.identity_holds, "m = {m}");
        }
    }

    #[test]
    fn diagonal_matrix_scales_by_product() {
        // c = diag(2, 3): W scales by 6
        let w = wronskian_symbolic(2);
        let mut sub = BTreeMap::new();
        for j in 0..2u32 {
            sub.insert(
                VarSym::jet(1, j),
                DiffPoly::var(VarSym::jet(1, j)).scale(&int(2)),
            );
            sub.insert(
                VarSym::jet(2, j),
                DiffPoly::var(VarSym::jet(2, j)).scale(&int(3)),
            );
        }
        assert_eq!(w.substitute(&sub), w.scale(&int(6)));
    }

    #[test]
    fn constant_action_commutes_with_derivative() {
        for m in 2..=3 {
            // substitution covering enough orders for one differentiation
            let sub = constant_matrix_substitution(m, m + 1);
            let w = wronskian_symbolic(m);
            let lhs = w.substitute(&sub).total_derivative();
            let rhs = w.total_derivative().substitute(&sub);
            assert_eq!(lhs, rhs);
        }
    }
}
