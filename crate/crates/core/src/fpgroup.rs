//! Words in free groups, finitely presented groups, Fox derivatives, and the
//! abelianization-modulo-torsion map with its induced group-ring projection.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::laurent::LaurentPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FpGroupError {
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("unknown generator name '{0}'")]
    UnknownGenerator(String),
    #[error("malformed presentation: {0}")]
    Parse(String),
}

/// A word in a free group: a sequence of (generator index, sign) letters.
/// The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    letters: Vec<(usize, i8)>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn generator(i: usize) -> Self {
        Word { letters: vec![(i, 1)] }
    }

    pub fn from_letters(letters: impl IntoIterator<Item = (usize, i8)>) -> Self {
        let w = Word { letters: letters.into_iter().collect() };
        assert!(w.letters.iter().all(|&(_, s)| s == 1 || s == -1));
        w
    }

    pub fn letters(&self) -> &[(usize, i8)] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|&(g, _)| g).max()
    }

    /// Free reduction: cancel adjacent inverse pairs until none remain.
    pub fn free_reduce(&self) -> Word {
        let mut stack: Vec<(usize, i8)> = Vec::with_capacity(self.letters.len());
        for &(g, s) in &self.letters {
            if let Some(&(tg, ts)) = stack.last() {
                if tg == g && ts == -s {
                    stack.pop();
                    continue;
                }
            }
            stack.push((g, s));
        }
        Word { letters: stack }
    }

    pub fn is_reduced(&self) -> bool {
        self.letters
            .windows(2)
            .all(|w| !(w[0].0 == w[1].0 && w[0].1 == -w[1].1))
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|&(g, s)| (g, -s)).collect(),
        }
    }

    /// Concatenation followed by free reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }.free_reduce()
    }

    /// Exponent sum of each generator, for a group of the given rank.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut sums = vec![0i64; rank];
        for &(g, s) in &self.letters {
            sums[g] += s as i64;
        }
        sums
    }
}

/// A finitely presented group: generator names plus relator words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self, FpGroupError> {
        let rank = generators.len();
        for r in &relators {
            if let Some(g) = r.max_generator() {
                if g >= rank {
                    return Err(FpGroupError::IndexOutOfRange { index: g, rank });
                }
            }
        }
        Ok(Presentation { generators, relators })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Text format: a `gens:` line of names followed by one `rel:` line per
    /// relator, uppercase meaning inverse. Unknown names are rejected.
    pub fn parse(text: &str) -> Result<Self, FpGroupError> {
        let mut generators: Option<Vec<String>> = None;
        let mut relators = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("gens:") {
                if generators.is_some() {
                    return Err(FpGroupError::Parse("duplicate gens: line".into()));
                }
                let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if names.iter().any(|n| *n != n.to_lowercase()) {
                    return Err(FpGroupError::Parse(
                        "generator names must be lowercase".into(),
                    ));
                }
                generators = Some(names);
            } else if let Some(rest) = line.strip_prefix("rel:") {
                let gens = generators
                    .as_ref()
                    .ok_or_else(|| FpGroupError::Parse("rel: before gens:".into()))?;
                let mut letters = Vec::new();
                for tok in rest.split_whitespace() {
                    let lower = tok.to_lowercase();
                    let idx = gens
                        .iter()
                        .position(|g| *g == lower)
                        .ok_or_else(|| FpGroupError::UnknownGenerator(tok.to_string()))?;
                    let sign = if tok == lower { 1 } else { -1 };
                    letters.push((idx, sign));
                }
                relators.push(Word::from_letters(letters).free_reduce());
            } else {
                return Err(FpGroupError::Parse(format!("unrecognized line '{line}'")));
            }
        }
        let generators =
            generators.ok_or_else(|| FpGroupError::Parse("missing gens: line".into()))?;
        Presentation::new(generators, relators)
    }
}

/// An element of the integral group ring of a free group.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupRingElement {
    terms: BTreeMap<Word, BigInt>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::empty())
    }

    pub fn from_word(w: Word) -> Self {
        let mut e = Self::zero();
        e.add_term(w.free_reduce(), BigInt::one());
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigInt)> {
        self.terms.iter()
    }

    fn add_term(&mut self, w: Word, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            // Re-borrow to remove: find key by value is awkward; retain is fine
            // at these sizes.
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        GroupRingElement {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                out.add_term(w1.concat(w2), c1 * c2);
            }
        }
        out
    }

    pub fn mul_word(&self, w: &Word) -> Self {
        self.mul(&Self::from_word(w.clone()))
    }
}

/// The Fox derivative of a word with respect to generator `i`, as an element
/// of the free-group ring. Characterized by d(x_i)/d(x_i) = 1, d(x_j)/d(x_i)
/// = 0 for j != i, and the product rule d(uv) = du + u dv.
///
/// Computed in one left-to-right pass with a running prefix; prefixes of a
/// reduced word are already reduced.
pub fn fox_derivative(w: &Word, i: usize, rank: usize) -> Result<GroupRingElement, FpGroupError> {
    if i >= rank {
        return Err(FpGroupError::IndexOutOfRange { index: i, rank });
    }
    if let Some(g) = w.max_generator() {
        if g >= rank {
            return Err(FpGroupError::IndexOutOfRange { index: g, rank });
        }
    }
    let w = w.free_reduce();
    let mut out = GroupRingElement::zero();
    let mut prefix: Vec<(usize, i8)> = Vec::with_capacity(w.letters().len());
    for &(g, s) in w.letters() {
        if g == i {
            if s == 1 {
                out.add_term(Word::from_letters(prefix.iter().copied()), BigInt::one());
            } else {
                let mut p = prefix.clone();
                p.push((g, -1));
                out.add_term(Word::from_letters(p), -BigInt::one());
            }
        }
        prefix.push((g, s));
    }
    Ok(out)
}

/// Linear extension of the Fox derivative to group-ring elements.
pub fn fox_derivative_element(
    e: &GroupRingElement,
    i: usize,
    rank: usize,
) -> Result<GroupRingElement, FpGroupError> {
    let mut out = GroupRingElement::zero();
    for (w, c) in e.terms() {
        let d = fox_derivative(w, i, rank)?;
        let mut scaled = GroupRingElement::zero();
        for (dw, dc) in d.terms() {
            scaled.add_term(dw.clone(), dc * c);
        }
        out = out.add(&scaled);
    }
    Ok(out)
}

/// The abelianization of a presented group modulo torsion: a surjection onto
/// Z^m recorded as one exponent tuple per generator, with the torsion
/// invariants kept as a diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abelianization {
    pub free_rank: usize,
    pub images: Vec<Vec<i64>>,
    pub torsion_invariants: Vec<BigInt>,
}

impl Abelianization {
    /// Image of a word in Z^m.
    pub fn project_word(&self, w: &Word) -> Vec<i64> {
        let mut out = vec![0i64; self.free_rank];
        for &(g, s) in w.letters() {
            for (o, x) in out.iter_mut().zip(&self.images[g]) {
                *o += (s as i64) * x;
            }
        }
        out
    }

    /// Image of a generator as a Laurent monomial.
    pub fn generator_monomial(&self, g: usize) -> LaurentPoly {
        LaurentPoly::monomial(self.free_rank, self.images[g].clone(), 1)
    }
}

/// H_1 of the presented group modulo torsion, via the Smith normal form of the
/// abelianized relator matrix. The basis of Z^m is whatever the unimodular
/// column transform produces; downstream canonical forms absorb the choice.
pub fn abelianize(p: &Presentation) -> Abelianization {
    let n = p.rank();
    let k = p.relators.len();
    let mut a: Vec<Vec<BigInt>> = p
        .relators
        .iter()
        .map(|r| r.exponent_sums(n).into_iter().map(BigInt::from).collect())
        .collect();
    let v = smith_normal_form(&mut a, k, n);
    let mut diag: Vec<BigInt> = (0..k.min(n)).map(|i| a[i][i].clone()).collect();
    diag.retain(|d| !d.is_zero());
    let r = diag.len();
    let free_rank = n - r;
    let images: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (r..n)
                .map(|j| {
                    i64::try_from(&v[i][j]).expect("abelianization image exceeds i64")
                })
                .collect()
        })
        .collect();
    let torsion_invariants = diag.into_iter().filter(|d| !d.is_one()).collect();
    Abelianization { free_rank, images, torsion_invariants }
}

/// Project a free-group ring element through an abelianization: each word maps
/// to the monomial of its image exponent tuple.
pub fn project_group_ring(e: &GroupRingElement, ab: &Abelianization) -> LaurentPoly {
    LaurentPoly::from_terms(
        ab.free_rank,
        e.terms().map(|(w, c)| (ab.project_word(w), c.clone())),
    )
}

/// Smith normal form over Z, in place. Returns the n-by-n unimodular column
/// transform V with A_in * V reachable by row operations from the diagonal
/// result; generator images are read off the rows of V.
fn smith_normal_form(a: &mut [Vec<BigInt>], rows: usize, cols: usize) -> Vec<Vec<BigInt>> {
    let mut v: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: smallest nonzero entry in the remaining block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero()
                    && pivot
                        .map(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                        .unwrap_or(true)
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        swap_cols(a, rows, t, pj);
        // V is stored row-major; column ops on A are mirrored as column ops
        // on V.
        for row in v.iter_mut() {
            row.swap(t, pj);
        }

        loop {
            // Clear the pivot column with row operations.
            let mut dirty = false;
            for i in 0..rows {
                if i == t || a[i][t].is_zero() {
                    continue;
                }
                let q = div_round(&a[i][t], &a[t][t]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let sub = &q * &a[t][j];
                        a[i][j] -= sub;
                    }
                }
                if !a[i][t].is_zero() {
                    // Remainder smaller than pivot: promote it.
                    a.swap(t, i);
                    dirty = true;
                }
            }
            // Clear the pivot row with column operations (mirrored on V).
            for j in 0..cols {
                if j == t || a[t][j].is_zero() {
                    continue;
                }
                let q = div_round(&a[t][j], &a[t][t]);
                if !q.is_zero() {
                    for i in 0..rows {
                        let sub = &q * &a[i][t];
                        a[i][j] -= sub;
                    }
                    for row in v.iter_mut() {
                        let sub = &q * &row[t];
                        row[j] -= sub;
                    }
                }
                if !a[t][j].is_zero() {
                    swap_cols(a, rows, t, j);
                    for row in v.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            let col_clean = (0..rows).all(|i| i == t || a[i][t].is_zero());
            let row_clean = (0..cols).all(|j| j == t || a[t][j].is_zero());
            if col_clean && row_clean && !dirty {
                break;
            }
        }

        // Divisibility fix-up: the pivot must divide the remaining block.
        let mut fixed = true;
        'outer: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&a[i][j] % &a[t][t]).is_zero() {
                    for jj in 0..cols {
                        let add = a[i][jj].clone();
                        a[t][jj] += add;
                    }
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if !fixed {
            continue; // re-run elimination at the same t
        }
        if a[t][t].is_negative() {
            for i in 0..rows {
                a[i][t] = -a[i][t].clone();
            }
            for row in v.iter_mut() {
                row[t] = -row[t].clone();
            }
        }
        t += 1;
    }
    v
}

fn swap_cols(a: &mut [Vec<BigInt>], rows: usize, j1: usize, j2: usize) {
    for row in a.iter_mut().take(rows) {
        row.swap(j1, j2);
    }
}

/// Quotient rounding toward the nearest integer, so remainders satisfy
/// |r| <= |b|/2.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut q, r) = a.div_rem(b);
    let two_r = r.abs() * BigInt::from(2);
    if two_r > b.abs() {
        if (a.is_negative()) == (b.is_negative()) {
            q += 1;
        } else {
            q -= 1;
        }
    }
    q
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for (k, &(g, s)) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            if s == 1 {
                write!(f, "x{}", g + 1)?;
            } else {
                write!(f, "x{}^-1", g + 1)?;
            }
        }
        Ok(())
    }
}
