//! Brute-force Littlewood–Richardson coefficients by polynomial expansion.
//!
//! Schur polynomials are expanded as sums of monomials over semistandard
//! tableaux, multiplied as polynomials, and the product is decomposed back
//! into Schur polynomials by repeatedly peeling off the dominant monomial.
//! Exponential in the weight; meant for `|λ| ≤ 6` cross-checks only.

use std::collections::BTreeMap;

use crate::combinatorics::Partition;

type Poly = BTreeMap<Vec<usize>, i64>;

/// `s_λ(x₁, …, x_vars)` as a monomial map.
pub fn schur_polynomial(lambda: &Partition, vars: usize) -> BTreeMap<Vec<usize>, i64> {
    let shape = lambda.parts();
    let mut poly = Poly::new();
    if shape.len() > vars {
        return poly;
    }
    let mut grid: Vec<Vec<usize>> = shape.iter().map(|&l| vec![0; l]).collect();
    let cells: Vec<(usize, usize)> = shape.iter().enumerate().flat_map(|(i, &l)| (0..l).map(move |j| (i, j))).collect();
    fill_ssyt(&cells, 0, &mut grid, vars, &mut poly);
    poly
}

fn fill_ssyt(cells: &[(usize, usize)], k: usize, grid: &mut Vec<Vec<usize>>, vars: usize, poly: &mut Poly) {
    if k == cells.len() {
        let mut exp = vec![0; vars];
        for row in grid.iter() {
            for &v in row {
                exp[v - 1] += 1;
            }
        }
        *poly.entry(exp).or_default() += 1;
        return;
    }
    let (i, j) = cells[k];
    let lo_row = if j > 0 { grid[i][j - 1] } else { 1 };
    let lo_col = if i > 0 { grid[i - 1][j] + 1 } else { 1 };
    for v in lo_row.max(lo_col)..=vars {
        grid[i][j] = v;
        fill_ssyt(cells, k + 1, grid, vars, poly);
    }
    grid[i][j] = 0;
}

fn multiply(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<usize> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_default() += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Schur expansion of a symmetric polynomial in `vars` variables.
fn schur_expand(mut poly: Poly, vars: usize) -> BTreeMap<Partition, i64> {
    let mut out = BTreeMap::new();
    // the lexicographically largest monomial of a symmetric polynomial is
    // the leading term x^λ of some s_λ in its expansion
    while let Some((exp, &c)) = poly.iter().next_back() {
        let lambda = Partition::new(exp.clone()).expect("leading exponent is a partition");
        out.insert(lambda.clone(), c);
        for (e, v) in schur_polynomial(&lambda, vars) {
            *poly.entry(e).or_default() -= c * v;
        }
        poly.retain(|_, v| *v != 0);
    }
    out
}

/// `c^λ_{μν}` by expanding `s_μ s_ν`.
pub fn lr_coeff_bruteforce(lambda: &Partition, mu: &Partition, nu: &Partition) -> u64 {
    multi_lr_bruteforce(lambda, &[mu.clone(), nu.clone()])
}

/// Coefficient of `s_target` in the product of the factors, by expansion.
pub fn multi_lr_bruteforce(target: &Partition, factors: &[Partition]) -> u64 {
    let vars = factors.iter().map(Partition::length).sum::<usize>().max(target.length()).max(1);
    let mut prod = Poly::from([(vec![0; vars], 1)]);
    for f in factors {
        prod = multiply(&prod, &schur_polynomial(f, vars));
    }
    let coeff = schur_expand(prod, vars).get(target).copied().unwrap_or(0);
    u64::try_from(coeff).expect("Schur coefficients of products are nonnegative")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn schur_polynomial_counts() {
        // s_(2,1)(x1,x2,x3) has 8 monomials counted with multiplicity
        let s = schur_polynomial(&p(&[2, 1]), 3);
        assert_eq!(s.values().sum::<i64>(), 8);
        assert_eq!(s[&vec![1, 1, 1]], 2);
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(lr_coeff_bruteforce(&p(&[2, 1]), &p(&[1]), &p(&[1, 1])), 1);
        assert_eq!(lr_coeff_bruteforce(&p(&[3]), &p(&[1]), &p(&[1, 1])), 0);
        assert_eq!(multi_lr_bruteforce(&p(&[2, 1]), &[p(&[1]), p(&[1]), p(&[1])]), 2);
        assert_eq!(multi_lr_bruteforce(&p(&[2]), &[p(&[1]), p(&[1])]), 1);
    }
}
