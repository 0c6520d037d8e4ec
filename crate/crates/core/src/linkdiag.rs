//! Link diagrams from braid words and PD codes, with validation and the
//! Wirtinger presentation construction.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::fpgroup::{Abelianization, Presentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("bad braid token '{0}': expected a nonzero integer")]
    BadToken(String),
    #[error("braid generator {0} out of range for {1} strands")]
    StrandOutOfRange(i64, usize),
    #[error("malformed PD tuple: {0}")]
    MalformedTuple(String),
    #[error("edge label {0} does not appear exactly twice")]
    ArcCountMismatch(usize),
}

/// One crossing, in Wirtinger-arc terms: the over-arc, the incoming and
/// outgoing under-arcs, and the crossing sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    pub over: usize,
    pub under_in: usize,
    pub under_out: usize,
    pub sign: i8,
}

/// A combinatorial link diagram. Arcs are numbered 0..num_arcs; components
/// partition the arcs and are ordered by their smallest arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkDiagram {
    pub crossings: Vec<Crossing>,
    pub num_arcs: usize,
    pub components: Vec<Vec<usize>>,
}

impl LinkDiagram {
    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn component_of(&self, arc: usize) -> usize {
        self.components
            .iter()
            .position(|c| c.contains(&arc))
            .expect("arc in some component")
    }
}

/// Wirtinger data: one generator per arc, one relator per crossing, plus one
/// chosen meridian word per component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WirtingerData {
    pub presentation: Presentation,
    pub meridian_words: Vec<Word>,
    pub component_names: Vec<String>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Renumber arc labels to 0..m via a union-find of identifications and group
/// them into components by the component relation.
fn finalize_diagram(
    num_labels: usize,
    arc_merge: &mut UnionFind,
    raw_crossings: &[Crossing],
) -> LinkDiagram {
    let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
    for label in 0..num_labels {
        let root = arc_merge.find(label);
        let next = remap.len();
        remap.entry(root).or_insert(next);
    }
    let arc_of = |merge: &mut UnionFind, label: usize| remap[&merge.find(label)];
    let crossings: Vec<Crossing> = raw_crossings
        .iter()
        .map(|c| Crossing {
            over: arc_of(arc_merge, c.over),
            under_in: arc_of(arc_merge, c.under_in),
            under_out: arc_of(arc_merge, c.under_out),
            sign: c.sign,
        })
        .collect();
    let num_arcs = remap.len();

    // Arcs of one component are linked through undercrossings.
    let mut comp = UnionFind::new(num_arcs);
    for c in &crossings {
        comp.union(c.under_in, c.under_out);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for arc in 0..num_arcs {
        groups.entry(comp.find(arc)).or_default().push(arc);
    }
    LinkDiagram { crossings, num_arcs, components: groups.into_values().collect() }
}

/// Parse a braid word ("1 -2 1") on the given strand count and close it up.
/// Token i means the band generator on strands (|i|, |i|+1) with crossing
/// sign equal to the sign of i.
pub fn parse_braid(text: &str, strands: usize) -> Result<LinkDiagram, DiagramError> {
    if strands == 0 {
        return Err(DiagramError::StrandOutOfRange(0, 0));
    }
    let mut tokens = Vec::new();
    for tok in text.split_whitespace() {
        let v: i64 = tok
            .parse()
            .map_err(|_| DiagramError::BadToken(tok.to_string()))?;
        if v == 0 {
            return Err(DiagramError::BadToken(tok.to_string()));
        }
        if v.unsigned_abs() as usize >= strands {
            return Err(DiagramError::StrandOutOfRange(v, strands));
        }
        tokens.push(v);
    }

    // Arc labels: 0..strands are the initial strand segments, each
    // undercrossing starts a fresh one.
    let mut cur: Vec<usize> = (0..strands).collect();
    let mut next_label = strands;
    let mut crossings = Vec::new();
    for v in tokens {
        let i = (v.unsigned_abs() as usize) - 1;
        let (over, under_in) = if v > 0 { (cur[i], cur[i + 1]) } else { (cur[i + 1], cur[i]) };
        let under_out = next_label;
        next_label += 1;
        crossings.push(Crossing {
            over,
            under_in,
            under_out,
            sign: if v > 0 { 1 } else { -1 },
        });
        // Strands swap positions; the over-strand keeps its arc.
        if v > 0 {
            cur[i] = under_out;
            cur[i + 1] = over;
        } else {
            cur[i] = over;
            cur[i + 1] = under_out;
        }
    }

    // Braid closure: the final segment on each position joins the initial one.
    let mut merge = UnionFind::new(next_label);
    for (p, &label) in cur.iter().enumerate() {
        merge.union(label, p);
    }
    Ok(finalize_diagram(next_label, &mut merge, &crossings))
}

/// Parse a PD code: `X(a,b,c,d)` tuples listing edge labels counterclockwise
/// from the incoming under-edge, labels 1..2c with consecutive numbering
/// along each component (the census convention). A JSON array of 4-tuples is
/// accepted as well.
pub fn parse_pd(text: &str) -> Result<LinkDiagram, DiagramError> {
    let tuples = if text.trim_start().starts_with('[') {
        parse_pd_json(text)?
    } else {
        parse_pd_tuples(text)?
    };
    if tuples.is_empty() {
        return Err(DiagramError::MalformedTuple("empty PD code".into()));
    }
    let n_edges = 2 * tuples.len();
    let mut counts = vec![0usize; n_edges + 1];
    for t in &tuples {
        for &e in t {
            if e == 0 || e > n_edges {
                return Err(DiagramError::ArcCountMismatch(e));
            }
            counts[e] += 1;
        }
    }
    if let Some(e) = (1..=n_edges).find(|&e| counts[e] != 2) {
        return Err(DiagramError::ArcCountMismatch(e));
    }

    // Strand connectivity groups edges into components; labels are assumed
    // consecutive along each component, which fixes the orientation.
    let mut strand = UnionFind::new(n_edges + 1);
    for &[a, b, c, d] in &tuples {
        strand.union(a, c);
        strand.union(b, d);
    }
    let mut comp_edges: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in 1..=n_edges {
        comp_edges.entry(strand.find(e)).or_default().push(e);
    }
    let mut succ = vec![0usize; n_edges + 1];
    for edges in comp_edges.values() {
        for (i, &e) in edges.iter().enumerate() {
            succ[e] = edges[(i + 1) % edges.len()];
        }
    }
    let successor = |e: usize| succ[e];

    let mut crossings = Vec::new();
    for &[a, b, c, d] in &tuples {
        if successor(a) != c {
            return Err(DiagramError::MalformedTuple(format!(
                "under-strand of X({a},{b},{c},{d}) does not run {a} -> {c}"
            )));
        }
        let sign = if successor(d) == b {
            1
        } else if successor(b) == d {
            -1
        } else {
            return Err(DiagramError::MalformedTuple(format!(
                "over-strand of X({a},{b},{c},{d}) is not consecutively labeled"
            )));
        };
        crossings.push(Crossing { over: b, under_in: a, under_out: c, sign });
    }

    // Shift to 0-based edge labels before renumbering arcs; the over-strand
    // passes through unbroken, so its two edges form one Wirtinger arc.
    let shifted: Vec<Crossing> = crossings
        .iter()
        .map(|c| Crossing {
            over: c.over - 1,
            under_in: c.under_in - 1,
            under_out: c.under_out - 1,
            sign: c.sign,
        })
        .collect();
    let mut merge0 = UnionFind::new(n_edges);
    for &[_, b, _, d] in &tuples {
        merge0.union(b - 1, d - 1);
    }
    Ok(finalize_diagram(n_edges, &mut merge0, &shifted))
}

fn parse_pd_tuples(text: &str) -> Result<Vec<[usize; 4]>, DiagramError> {
    let mut tuples = Vec::new();
    for chunk in text.split('X') {
        let chunk = chunk.trim().trim_end_matches(',').trim();
        if chunk.is_empty() {
            continue;
        }
        let inner = chunk
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .or_else(|| chunk.strip_prefix('[').and_then(|s| s.strip_suffix(']')))
            .ok_or_else(|| DiagramError::MalformedTuple(chunk.to_string()))?;
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(DiagramError::MalformedTuple(chunk.to_string()));
        }
        let mut t = [0usize; 4];
        for (slot, p) in t.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| DiagramError::MalformedTuple(chunk.to_string()))?;
        }
        tuples.push(t);
    }
    Ok(tuples)
}

fn parse_pd_json(text: &str) -> Result<Vec<[usize; 4]>, DiagramError> {
    let v: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| DiagramError::MalformedTuple(e.to_string()))?;
    let arr = v
        .as_array()
        .ok_or_else(|| DiagramError::MalformedTuple("expected a JSON array".into()))?;
    arr.iter()
        .map(|t| {
            let xs = t
                .as_array()
                .filter(|a| a.len() == 4)
                .ok_or_else(|| DiagramError::MalformedTuple(t.to_string()))?;
            let mut out = [0usize; 4];
            for (slot, x) in out.iter_mut().zip(xs) {
                *slot = x
                    .as_u64()
                    .ok_or_else(|| DiagramError::MalformedTuple(t.to_string()))?
                    as usize;
            }
            Ok(out)
        })
        .collect()
}

/// The Wirtinger presentation of a diagram: generators x1..xm for the arcs,
/// and for each crossing the relator saying the outgoing under-arc is the
/// conjugate of the incoming one by the over-arc (direction set by the
/// crossing sign).
pub fn wirtinger(d: &LinkDiagram) -> WirtingerData {
    let generators: Vec<String> = (0..d.num_arcs).map(|i| format!("x{}", i + 1)).collect();
    let relators: Vec<Word> = d
        .crossings
        .iter()
        .map(|c| {
            let s = c.sign;
            Word::from_letters([
                (c.under_out, -1),
                (c.over, s),
                (c.under_in, 1),
                (c.over, -s),
            ])
            .free_reduce()
        })
        .collect();
    let presentation = Presentation::new(generators, relators).expect("indices in range");
    let meridian_words: Vec<Word> = d
        .components
        .iter()
        .map(|arcs| Word::generator(arcs[0]))
        .collect();
    let component_names = (1..=d.num_components()).map(|i| format!("c{i}")).collect();
    WirtingerData { presentation, meridian_words, component_names }
}

/// The meridian basis of H for a Wirtinger presentation: every arc of
/// component j maps to t_j. Relators are conjugation relations, so they map
/// to zero automatically; this pins the variable order to the component
/// order, unlike the basis a Smith normal form would pick.
pub fn meridian_abelianization(d: &LinkDiagram) -> Abelianization {
    let n = d.num_components();
    let images = (0..d.num_arcs)
        .map(|arc| {
            let mut e = vec![0i64; n];
            e[d.component_of(arc)] = 1;
            e
        })
        .collect();
    Abelianization { free_rank: n, images, torsion_invariants: vec![] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpgroup::abelianize;

    pub const TREFOIL_PD: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";
    pub const HOPF_PD: &str = "X(1,3,2,4) X(3,1,4,2)";
    pub const FIGURE8_PD: &str = "X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)";

    #[test]
    fn braid_examples() {
        let d = parse_braid("1 1 1", 2).unwrap();
        assert_eq!(d.crossings.len(), 3);
        assert_eq!(d.num_components(), 1);
        assert_eq!(d.num_arcs, 3);

        let d = parse_braid("1 -1", 2).unwrap();
        assert_eq!(d.crossings.len(), 2);
        assert_eq!(d.num_components(), 2);

        let d = parse_braid("", 1).unwrap();
        assert_eq!(d.crossings.len(), 0);
        assert_eq!(d.num_components(), 1);
        assert_eq!(d.num_arcs, 1);

        assert!(matches!(parse_braid("x", 2), Err(DiagramError::BadToken(_))));
        assert!(matches!(
            parse_braid("2", 2),
            Err(DiagramError::StrandOutOfRange(2, 2))
        ));
    }

    #[test]
    fn pd_examples() {
        let d = parse_pd(TREFOIL_PD).unwrap();
        assert_eq!(d.crossings.len(), 3);
        assert_eq!(d.num_components(), 1);

        let d = parse_pd(HOPF_PD).unwrap();
        assert_eq!(d.crossings.len(), 2);
        assert_eq!(d.num_components(), 2);

        assert!(matches!(
            parse_pd("X(1,2,3)"),
            Err(DiagramError::MalformedTuple(_))
        ));
        // A single kink on each of two circles is degenerate but well formed.
        let d = parse_pd("X(1,1,2,2) X(3,3,4,4)").unwrap();
        assert_eq!(d.num_components(), 2);

        // Label out of range for the crossing count.
        assert!(matches!(
            parse_pd("X(1,2,3,4) X(5,6,7,8)"),
            Err(DiagramError::ArcCountMismatch(_))
        ));
        // Under-strand labels that do not run consecutively.
        assert!(matches!(
            parse_pd("X(2,4,1,5) X(3,6,4,1) X(5,2,6,3)"),
            Err(DiagramError::MalformedTuple(_))
        ));

        let d = parse_pd("[[1,3,2,4],[3,1,4,2]]").unwrap();
        assert_eq!(d.num_components(), 2);
    }

    #[test]
    fn wirtinger_examples() {
        let d = parse_pd(TREFOIL_PD).unwrap();
        let wd = wirtinger(&d);
        assert_eq!(wd.presentation.rank(), 3);
        assert_eq!(wd.presentation.relators.len(), 3);
        let ab = abelianize(&wd.presentation);
        assert_eq!(ab.free_rank, 1);

        let d = parse_pd(HOPF_PD).unwrap();
        let wd = wirtinger(&d);
        assert_eq!(wd.presentation.rank(), 2);
        assert_eq!(wd.presentation.relators.len(), 2);
        assert_eq!(abelianize(&wd.presentation).free_rank, 2);
        assert_eq!(wd.meridian_words.len(), 2);

        let d = parse_braid("", 1).unwrap();
        let wd = wirtinger(&d);
        assert_eq!(wd.presentation.rank(), 1);
        assert!(wd.presentation.relators.is_empty());
        assert_eq!(wd.meridian_words, vec![Word::generator(0)]);
    }

    #[test]
    fn meridian_classes() {
        for text in [TREFOIL_PD, HOPF_PD, FIGURE8_PD] {
            let d = parse_pd(text).unwrap();
            let ab = meridian_abelianization(&d);
            assert_eq!(ab.free_rank, d.num_components());
            assert_eq!(abelianize(&wirtinger(&d).presentation).free_rank, d.num_components());
            for r in &wirtinger(&d).presentation.relators {
                assert!(ab.project_word(r).iter().all(|&x| x == 0));
            }
            for arc in 0..d.num_arcs {
                let mut unit = vec![0i64; ab.free_rank];
                unit[d.component_of(arc)] = 1;
                assert_eq!(ab.images[arc], unit);
            }
        }
    }
}
