//! Alexander matrices from presentations, the elementary ideal, the Alexander
//! polynomial of a presented group, and the symmetrized single-variable
//! normalization for knots.

use itertools::Itertools;
use num_traits::One;
use thiserror::Error;

use crate::fpgroup::{abelianize, fox_derivative, project_group_ring, Abelianization, FpGroupError, Presentation};
use crate::laurent::{LaurentError, LaurentPoly};
use crate::linkdiag::{meridian_abelianization, wirtinger, LinkDiagram};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlexanderError {
    #[error("no associate is both involution-symmetric and 1 at t=1")]
    NotSymmetrizable,
    #[error("expected a knot diagram, got {components} components")]
    NotAKnot { components: usize },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    FpGroup(#[from] FpGroupError),
}

/// The matrix of projected Fox derivatives of relators: entry (j, i) is the
/// image of dr_j/dx_i in Z[H].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlexanderMatrix {
    rows: usize,
    cols: usize,
    num_vars: usize,
    entries: Vec<Vec<LaurentPoly>>,
}

impl AlexanderMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn entry(&self, j: usize, i: usize) -> &LaurentPoly {
        &self.entries[j][i]
    }
}

/// Build the Alexander matrix of a presentation under the given
/// abelianization (normally `abelianize(p)`).
pub fn alexander_matrix(
    p: &Presentation,
    ab: &Abelianization,
) -> Result<AlexanderMatrix, AlexanderError> {
    let n = p.rank();
    let entries: Vec<Vec<LaurentPoly>> = p
        .relators
        .iter()
        .map(|r| {
            (0..n)
                .map(|i| Ok(project_group_ring(&fox_derivative(r, i, n)?, ab)))
                .collect::<Result<_, AlexanderError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(AlexanderMatrix { rows: p.relators.len(), cols: n, num_vars: ab.free_rank, entries })
}

/// The row-wise Fox identity: sum_i entries[j][i] * (image(x_i) - 1) = 0.
pub fn row_fox_identity_holds(m: &AlexanderMatrix, ab: &Abelianization) -> bool {
    (0..m.rows).all(|j| {
        let mut acc = LaurentPoly::zero(m.num_vars);
        for i in 0..m.cols {
            let factor = ab.generator_monomial(i).sub(&LaurentPoly::one(m.num_vars));
            acc = acc.add(&m.entries[j][i].mul(&factor));
        }
        acc.is_zero()
    })
}

/// GCD of all (n-1)-minors of the Alexander matrix, in canonical form.
///
/// Conventions: n = 1 gives 1 (order-0 minors), and too few relators gives 0
/// (the elementary ideal is (0), the split-link case).
pub fn delta_from_ideal(m: &AlexanderMatrix) -> LaurentPoly {
    let n = m.cols;
    assert!(n >= 1);
    let order = n - 1;
    if order == 0 {
        return LaurentPoly::one(m.num_vars);
    }
    if m.rows < order {
        return LaurentPoly::zero(m.num_vars);
    }
    let mut gcd = LaurentPoly::zero(m.num_vars);
    for rows in (0..m.rows).combinations(order) {
        for cols in (0..n).combinations(order) {
            let minor: Vec<Vec<LaurentPoly>> = rows
                .iter()
                .map(|&j| cols.iter().map(|&i| m.entries[j][i].clone()).collect())
                .collect();
            let det = bareiss_determinant(minor);
            gcd = gcd.gcd(&det);
            if gcd.is_one() {
                return gcd;
            }
        }
    }
    gcd.canonical_form()
}

/// Fraction-free Bareiss determinant over the Laurent ring; every division is
/// exact by the previous pivot.
pub fn bareiss_determinant(mut a: Vec<Vec<LaurentPoly>>) -> LaurentPoly {
    let n = a.len();
    if n == 0 {
        panic!("empty matrix");
    }
    let num_vars = a[0][0].num_vars();
    let mut sign = false;
    let mut prev = LaurentPoly::one(num_vars);
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return LaurentPoly::zero(num_vars);
            };
            a.swap(k, r);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign {
        det.neg()
    } else {
        det
    }
}

/// Alexander polynomial of a presentation: Fox matrix under the torsion-free
/// abelianization, then the elementary-ideal GCD.
pub fn delta_of_presentation(p: &Presentation) -> Result<LaurentPoly, AlexanderError> {
    let ab = abelianize(p);
    let m = alexander_matrix(p, &ab)?;
    Ok(delta_from_ideal(&m))
}

/// The associate of a knot polynomial with D(t) = D(t^-1) and D(1) = 1.
pub fn symmetrize_knot_delta(p: &LaurentPoly) -> Result<LaurentPoly, AlexanderError> {
    if p.num_vars() != 1 {
        return Err(AlexanderError::Laurent(LaurentError::MultivariateInput(
            p.num_vars(),
        )));
    }
    let Some((lo, hi)) = p.degree_range()? else {
        return Err(AlexanderError::NotSymmetrizable);
    };
    if (lo + hi) % 2 != 0 {
        return Err(AlexanderError::NotSymmetrizable);
    }
    let shifted = p.shift(&[-(lo + hi) / 2]);
    if shifted.involution() != shifted {
        return Err(AlexanderError::NotSymmetrizable);
    }
    let at_one = shifted.eval_all_one();
    if at_one.is_one() {
        Ok(shifted)
    } else if (-&at_one).is_one() {
        Ok(shifted.neg())
    } else {
        Err(AlexanderError::NotSymmetrizable)
    }
}

/// Multivariable Alexander polynomial of a link diagram, in the meridian
/// variables t_1, …, t_n (one per component, in component order), canonical
/// up to ± monomial.
///
/// One Wirtinger relator is redundant and is dropped before taking minors,
/// which leaves the row choice forced and only the column choice free.
pub fn delta_of_diagram(d: &LinkDiagram) -> Result<LaurentPoly, AlexanderError> {
    let wd = wirtinger(d);
    let ab = meridian_abelianization(d);
    let mut p = wd.presentation;
    p.relators.pop();
    let m = alexander_matrix(&p, &ab)?;
    Ok(delta_from_ideal(&m))
}

/// Symmetrized Alexander polynomial of a one-component diagram.
pub fn knot_delta_of_diagram(d: &LinkDiagram) -> Result<LaurentPoly, AlexanderError> {
    if d.num_components() != 1 {
        return Err(AlexanderError::NotAKnot { components: d.num_components() });
    }
    symmetrize_knot_delta(&delta_of_diagram(d)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpgroup::Word;
    use crate::linkdiag::{parse_braid, parse_pd};

    fn p1(s: &str) -> LaurentPoly {
        LaurentPoly::parse(s, 1).unwrap()
    }

    fn trefoil_presentation() -> Presentation {
        // <a, b | a b a b^-1 a^-1 b^-1>
        Presentation::parse("gens: a b\nrel: a b a B A B").unwrap()
    }

    #[test]
    fn trefoil_matrix() {
        let p = trefoil_presentation();
        let ab = abelianize(&p);
        assert_eq!(ab.free_rank, 1);
        let m = alexander_matrix(&p, &ab).unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 2));
        assert!(row_fox_identity_holds(&m, &ab));
        let expect = p1("1 - t + t^2");
        assert_eq!(m.entry(0, 0).canonical_form(), expect.canonical_form());
        assert_eq!(m.entry(0, 1).canonical_form(), expect.canonical_form());
        assert_eq!(m.entry(0, 0).add(m.entry(0, 1)), LaurentPoly::zero(1));
    }

    #[test]
    fn commutator_matrix() {
        let p = Presentation::parse("gens: a b\nrel: a b A B").unwrap();
        let ab = abelianize(&p);
        let m = alexander_matrix(&p, &ab).unwrap();
        assert!(row_fox_identity_holds(&m, &ab));
        // d/da = 1 - aba^-1 -> 1 - t_b, d/db = a - 1 -> t_a - 1, in whatever
        // basis the Smith form picked.
        let ta = ab.generator_monomial(0);
        let tb = ab.generator_monomial(1);
        let one = LaurentPoly::one(2);
        assert_eq!(m.entry(0, 0), &one.sub(&tb));
        assert_eq!(m.entry(0, 1), &ta.sub(&one));
    }

    #[test]
    fn no_relator_matrix() {
        let p = Presentation::parse("gens: a").unwrap();
        let ab = abelianize(&p);
        let m = alexander_matrix(&p, &ab).unwrap();
        assert_eq!((m.rows(), m.cols()), (0, 1));
        assert_eq!(delta_from_ideal(&m), LaurentPoly::one(1));
    }

    #[test]
    fn trefoil_delta() {
        let d = delta_of_presentation(&trefoil_presentation()).unwrap();
        assert_eq!(d, p1("t^2 - t + 1").canonical_form());
    }

    #[test]
    fn symmetrize_examples() {
        assert_eq!(
            symmetrize_knot_delta(&p1("t^2 - t + 1")).unwrap(),
            p1("t - 1 + t^-1")
        );
        assert_eq!(
            symmetrize_knot_delta(&LaurentPoly::one(1)).unwrap(),
            LaurentPoly::one(1)
        );
        assert_eq!(
            symmetrize_knot_delta(&p1("t^2 - 3 t + 1")).unwrap(),
            p1("-t + 3 - t^-1")
        );
        assert!(symmetrize_knot_delta(&p1("t^2 + 1")).is_err()); // value 2 at t=1
        assert!(symmetrize_knot_delta(&p1("t - 1")).is_err()); // odd span
    }

    #[test]
    fn bareiss_matches_cofactor_oracle() {
        use num_bigint::BigInt;
        use rand::{Rng, SeedableRng};

        fn cofactor_det(a: &[Vec<LaurentPoly>]) -> LaurentPoly {
            let n = a.len();
            if n == 1 {
                return a[0][0].clone();
            }
            let mut det = LaurentPoly::zero(a[0][0].num_vars());
            for (j, top) in a[0].iter().enumerate() {
                let sub: Vec<Vec<LaurentPoly>> = (1..n)
                    .map(|i| {
                        (0..n)
                            .filter(|&k| k != j)
                            .map(|k| a[i][k].clone())
                            .collect()
                    })
                    .collect();
                let term = top.mul(&cofactor_det(&sub));
                det = if j % 2 == 0 { det.add(&term) } else { det.sub(&term) };
            }
            det
        }

        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(1..=4);
            let a: Vec<Vec<LaurentPoly>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            LaurentPoly::from_terms(
                                1,
                                (0..rng.gen_range(0..3)).map(|_| {
                                    (
                                        vec![rng.gen_range(-2i64..=2)],
                                        BigInt::from(rng.gen_range(-3i64..=3)),
                                    )
                                }),
                            )
                        })
                        .collect()
                })
                .collect();
            assert_eq!(bareiss_determinant(a.clone()), cofactor_det(&a));
        }
    }

    #[test]
    fn tietze_stability() {
        // Permuting relators, inverting, conjugating, and adding a redundant
        // relator leave delta unchanged in canonical form.
        let base = Presentation::parse("gens: a b c\nrel: a b A B\nrel: b c B C").unwrap();
        let d0 = delta_of_presentation(&base).unwrap();

        let swapped = Presentation::new(
            base.generators.clone(),
            vec![base.relators[1].clone(), base.relators[0].clone()],
        )
        .unwrap();
        assert_eq!(delta_of_presentation(&swapped).unwrap(), d0);

        let inverted = Presentation::new(
            base.generators.clone(),
            vec![base.relators[0].inverse(), base.relators[1].clone()],
        )
        .unwrap();
        assert_eq!(delta_of_presentation(&inverted).unwrap(), d0);

        let g = Word::generator(2);
        let conj = g.concat(&base.relators[0]).concat(&g.inverse());
        let conjugated =
            Presentation::new(base.generators.clone(), vec![conj, base.relators[1].clone()])
                .unwrap();
        assert_eq!(delta_of_presentation(&conjugated).unwrap(), d0);

        let redundant = base.relators[0].concat(&base.relators[1]);
        let padded = Presentation::new(
            base.generators.clone(),
            vec![base.relators[0].clone(), base.relators[1].clone(), redundant],
        )
        .unwrap();
        assert_eq!(delta_of_presentation(&padded).unwrap(), d0);
    }

    #[test]
    fn diagram_pipeline_knots() {
        let trefoil = p1("t - 1 + t^-1");
        let braid = parse_braid("1 1 1", 2).unwrap();
        assert_eq!(knot_delta_of_diagram(&braid).unwrap(), trefoil);
        let pd = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap();
        assert_eq!(knot_delta_of_diagram(&pd).unwrap(), trefoil);

        let fig8 = p1("-t + 3 - t^-1");
        let braid = parse_braid("1 -2 1 -2", 3).unwrap();
        assert_eq!(knot_delta_of_diagram(&braid).unwrap(), fig8);
        let pd = parse_pd("X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)").unwrap();
        assert_eq!(knot_delta_of_diagram(&pd).unwrap(), fig8);

        let unknot = parse_braid("", 1).unwrap();
        assert_eq!(knot_delta_of_diagram(&unknot).unwrap(), LaurentPoly::one(1));
    }

    #[test]
    fn diagram_pipeline_links() {
        let hopf = parse_pd("X(1,3,2,4) X(3,1,4,2)").unwrap();
        let delta = delta_of_diagram(&hopf).unwrap();
        assert_eq!(delta, LaurentPoly::one(2));

        let unlink = parse_braid("1 -1", 2).unwrap();
        assert!(delta_of_diagram(&unlink).unwrap().is_zero());

        assert!(matches!(
            knot_delta_of_diagram(&hopf),
            Err(AlexanderError::NotAKnot { components: 2 })
        ));
    }

    #[test]
    fn diagram_reidemeister_stability() {
        let base = knot_delta_of_diagram(&parse_braid("1 1 1", 2).unwrap()).unwrap();
        for word in ["1 1 1 1 -1", "1 -1 1 1 1", "1 1 1 -1 1", "1 1 -1 1 1"] {
            let d = parse_braid(word, 2).unwrap();
            assert_eq!(knot_delta_of_diagram(&d).unwrap(), base, "word {word}");
        }
        // The same knot as a 3-strand closure, with and without an inserted
        // cancelling pair.
        for word in ["1 2 1 2", "1 2 2 -2 1 2"] {
            let d = parse_braid(word, 3).unwrap();
            assert_eq!(knot_delta_of_diagram(&d).unwrap(), base, "word {word}");
        }
    }
}
