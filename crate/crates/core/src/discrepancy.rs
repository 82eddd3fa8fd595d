//! Discrepancy coefficients of a contractible configuration.
//!
//! For exceptional curves `D_1..D_n` of a minimal resolution, the pullback
//! `f^*K = K + sum a_j D_j` is determined by adjunction: intersecting with
//! each `D_i` gives the linear system `sum_j a_j (D_i . D_j) = 2 + D_i^2`.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::WeightedDualGraph;
use crate::scalar::{denominator_lcm, ExactInt};
use crate::{Int, Rational};

/// Solved discrepancies `a_j`, aligned with the graph's vertex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscrepancyVector<T: ExactInt> {
    pub coeffs: Vec<Ratio<T>>,
    pub cartier_index: T,
    /// `8 - n + sum a_j (-2 - D_j^2)`; only meaningful when the resolution
    /// has Picard rank `n + 2`.
    pub k_bar_squared: Ratio<T>,
    /// Every `a_j < 1`. Graphs failing this are returned, not rejected.
    pub log_terminal: bool,
}

impl<T: ExactInt> DiscrepancyVector<T> {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `-(K + D#) . C` for a smooth rational curve `C` outside `D` with
    /// self-intersection `self_intersection`, meeting vertex `j` with the
    /// given multiplicities.
    pub fn anticanonical_degree(&self, self_intersection: i64, meets: &[(usize, i64)]) -> Ratio<T> {
        let minus_k = Ratio::from_integer(T::from_i64_exact(2 + self_intersection));
        meets.iter().fold(minus_k, |acc, &(j, m)| {
            acc - self.coeffs[j].clone() * Ratio::from_integer(T::from_i64_exact(m))
        })
    }
}

pub fn cartier_index<T: ExactInt>(a: &DiscrepancyVector<T>) -> T {
    denominator_lcm(&a.coeffs)
}

/// Solves the adjunction system over `Ratio<T>`.
pub fn solve_discrepancies_in<T: ExactInt>(g: &WeightedDualGraph) -> Result<DiscrepancyVector<T>> {
    let m = g
        .intersection_matrix()
        .matrix()
        .map(|&x| T::from_i128(x).expect("intersection number fits the scalar type"));
    if !m.is_negative_definite() {
        return Err(Error::NotContractible);
    }
    let rhs: Vec<T> = g.weights().iter().map(|&w| T::from_i64_exact(2 + w)).collect();
    let coeffs = m.solve(&rhs).ok_or(Error::NotContractible)?;
    let one = Ratio::<T>::one();
    let log_terminal = coeffs.iter().all(|a| *a < one);
    let cartier_index = denominator_lcm(&coeffs);
    let k_bar_squared = k_bar_squared_from(g, &coeffs);
    Ok(DiscrepancyVector {
        coeffs,
        cartier_index,
        k_bar_squared,
        log_terminal,
    })
}

pub fn solve_discrepancies(g: &WeightedDualGraph) -> Result<DiscrepancyVector<Int>> {
    solve_discrepancies_in::<Int>(g)
}

fn k_bar_squared_from<T: ExactInt>(g: &WeightedDualGraph, coeffs: &[Ratio<T>]) -> Ratio<T> {
    let n = T::from_usize(g.len()).expect("vertex count fits");
    let base = Ratio::from_integer(T::from_i64_exact(8) - n);
    g.weights().iter().zip(coeffs).fold(base, |acc, (&w, a)| {
        acc + a.clone() * Ratio::from_integer(T::from_i64_exact(-2 - w))
    })
}

/// Negative definite and every discrepancy below one.
pub fn is_log_terminal(g: &WeightedDualGraph) -> bool {
    solve_discrepancies(g).is_ok_and(|d| d.log_terminal)
}

/// `(K_X̄)^2` under the rank-two convention `rho(X) = n + 2`.
pub fn k_bar_squared(g: &WeightedDualGraph) -> Result<Rational> {
    solve_discrepancies(g).map(|d| d.k_bar_squared)
}

/// Residue of the pullback identity `M a = d`, zero for a correct solve.
pub fn adjunction_residual<T: ExactInt>(g: &WeightedDualGraph, a: &DiscrepancyVector<T>) -> Vec<Ratio<T>> {
    let m = g.intersection_matrix().matrix().map(|&x| T::from_i128(x).unwrap());
    m.mul_vec(&a.coeffs)
        .into_iter()
        .zip(g.weights())
        .map(|(lhs, w)| lhs - Ratio::from_integer(T::from_i64_exact(2 + w)))
        .collect()
}

/// True when every coefficient is positive, below one, and has exact
/// denominator three.
pub fn all_thirds<T: ExactInt>(a: &DiscrepancyVector<T>) -> bool {
    let three = T::from_i64_exact(3);
    a.coeffs
        .iter()
        .all(|q| q.is_positive() && *q.denom() == three && *q < Ratio::one())
}

/// Zero propagation: on each connected component either every
/// coefficient vanishes or none does.
pub fn zero_propagates<T: ExactInt>(g: &WeightedDualGraph, a: &DiscrepancyVector<T>) -> bool {
    g.components().iter().all(|comp| {
        let zeros = comp.iter().filter(|&&j| a.coeffs[j].is_zero()).count();
        zeros == 0 || zeros == comp.len()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(p: i128, d: i128) -> Rational {
        Ratio::new(p, d)
    }

    fn chain(w: &[i64]) -> WeightedDualGraph {
        WeightedDualGraph::chain(w)
    }

    #[test]
    fn single_vertices() {
        let d = solve_discrepancies(&chain(&[-3])).unwrap();
        assert_eq!(d.coeffs, vec![q(1, 3)]);
        assert_eq!(d.cartier_index, 3);
        let d = solve_discrepancies(&chain(&[-2])).unwrap();
        assert_eq!(d.coeffs, vec![q(0, 1)]);
        assert_eq!(cartier_index(&d), 1);
        let d = solve_discrepancies(&chain(&[-4])).unwrap();
        assert_eq!(d.coeffs, vec![q(1, 2)]);
        assert_eq!(d.cartier_index, 2);
        let d = solve_discrepancies(&chain(&[-6])).unwrap();
        assert_eq!(d.coeffs, vec![q(2, 3)]);
    }

    #[test]
    fn chain_and_fork() {
        let d = solve_discrepancies(&chain(&[-2, -5])).unwrap();
        assert_eq!(d.coeffs, vec![q(1, 3), q(2, 3)]);
        assert_eq!(d.cartier_index, 3);
        let fork = WeightedDualGraph::from_index_edges(&[-2, -2, -3, -2], &[(0, 2), (1, 2), (2, 3)]);
        let d = solve_discrepancies(&fork).unwrap();
        assert_eq!(d.coeffs, vec![q(1, 3), q(1, 3), q(2, 3), q(1, 3)]);
        assert!(all_thirds(&d));
    }

    #[test]
    fn not_contractible() {
        assert_eq!(solve_discrepancies(&chain(&[0])), Err(Error::NotContractible));
        assert!(!is_log_terminal(&chain(&[0])));
        assert!(!is_log_terminal(&chain(&[-1, -1])));
        assert!(is_log_terminal(&chain(&[-2, -5])));
    }

    #[test]
    fn two_branch_points_fail() {
        // nine -2 curves with two degree-3 vertices: indefinite
        let edges = [(0, 2), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (6, 8)];
        let g = WeightedDualGraph::from_index_edges(&[-2; 9], &edges);
        assert!(!g.intersection_matrix().is_negative_definite());
        assert!(!is_log_terminal(&g));
    }

    #[test]
    fn k_bar_squared_values() {
        let v = |n: usize| {
            let mut w = vec![-4];
            w.extend(std::iter::repeat_n(-2, n - 2));
            w.push(-4);
            chain(&w)
        };
        assert_eq!(k_bar_squared(&v(10)).unwrap(), q(2, 3));
        assert_eq!(k_bar_squared(&v(11)).unwrap(), q(-1, 3));
    }

    #[test]
    fn generic_over_bigint() {
        let d: DiscrepancyVector<BigInt> = solve_discrepancies_in(&chain(&[-2, -3, -2, -2, -4])).unwrap();
        assert_eq!(d.cartier_index, BigInt::from(3));
        assert!(adjunction_residual(&chain(&[-2, -3, -2, -2, -4]), &d)
            .iter()
            .all(|r| r.is_zero()));
    }

    #[test]
    fn attached_curve_degree() {
        let g = chain(&[-2, -5]);
        let d = solve_discrepancies(&g).unwrap();
        assert_eq!(d.anticanonical_degree(-1, &[(0, 1)]), q(2, 3));
        assert_eq!(d.anticanonical_degree(-1, &[(1, 1)]), q(1, 3));
        assert_eq!(d.anticanonical_degree(-1, &[]), q(1, 1));
    }
}
