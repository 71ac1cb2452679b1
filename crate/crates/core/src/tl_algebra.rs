//! The diagram algebra TL_N(β): connectivities of 2N points, their product with
//! loop counting, the trace τ and the Gram bilinear form on link states.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linkspace::LinkState;
use crate::params::SpectralParams;
use crate::scalar::Scalar;

/// A planar perfect matching of 2N points: bottom points 0..N−1 and top points N..2N−1,
/// both read left to right. Top point N+k sits above bottom point k.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Connectivity {
    n: usize,
    partner: Vec<usize>,
}

/// Position of a point when walking around the rectangle: bottom left to right, then top right to left.
fn cyclic_position(n: usize, p: usize) -> usize {
    if p < n {
        p
    } else {
        3 * n - 1 - p
    }
}

impl Connectivity {
    pub fn new(n: usize, partner: Vec<usize>) -> Result<Self> {
        if partner.len() != 2 * n {
            return invalid(format!("connectivity on {n} sites needs {} entries", 2 * n));
        }
        for (i, &j) in partner.iter().enumerate() {
            if j >= 2 * n || j == i || partner[j] != i {
                return invalid(format!("partner array is not a perfect matching at point {i}"));
            }
        }
        for i in 0..2 * n {
            let (a, b) = (cyclic_position(n, i), cyclic_position(n, partner[i]));
            let (a, b) = (a.min(b), a.max(b));
            for k in 0..2 * n {
                let (c, d) = (cyclic_position(n, k), cyclic_position(n, partner[k]));
                let inside = |x: usize| a < x && x < b;
                if inside(c) != inside(d) {
                    return invalid("connectivity is not planar");
                }
            }
        }
        Ok(Connectivity { n, partner })
    }

    pub(crate) fn from_partner_unchecked(n: usize, partner: Vec<usize>) -> Self {
        debug_assert!(Self::new(n, partner.clone()).is_ok(), "non-planar connectivity {partner:?}");
        Connectivity { n, partner }
    }

    pub fn identity(n: usize) -> Self {
        let partner = (0..2 * n).map(|p| if p < n { p + n } else { p - n }).collect();
        Connectivity { n, partner }
    }

    /// e_i (1 ≤ i ≤ N−1): joins bottom points i, i+1 and top points i, i+1 (1-indexed).
    pub fn generator(i: usize, n: usize) -> Result<Self> {
        if i < 1 || i >= n {
            return invalid(format!("generator index {i} outside 1..{}", n.saturating_sub(1)));
        }
        let mut c = Self::identity(n);
        let (b0, b1) = (i - 1, i);
        c.partner[b0] = b1;
        c.partner[b1] = b0;
        c.partner[n + b0] = n + b1;
        c.partner[n + b1] = n + b0;
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn partner(&self, p: usize) -> usize {
        self.partner[p]
    }

    pub fn partners(&self) -> &[usize] {
        &self.partner
    }

    /// Number of through-strands (bottom-to-top pairings).
    pub fn through_lines(&self) -> usize {
        (0..self.n).filter(|&b| self.partner[b] >= self.n).count()
    }

    /// Loops closed when every top point is identified with the bottom point below it.
    pub fn closure_loops(&self) -> usize {
        let n = self.n;
        let mut uf = UnionFind::new(2 * n);
        for p in 0..2 * n {
            uf.union(p, self.partner[p]);
        }
        for k in 0..n {
            uf.union(k, n + k);
        }
        uf.components()
    }

    /// Stacks `top` above `self`, returning the resulting connectivity and the number of closed loops.
    pub fn compose(&self, top: &Connectivity) -> Result<(Connectivity, usize)> {
        if self.n != top.n {
            return invalid(format!("cannot compose TL_{} with TL_{}", self.n, top.n));
        }
        Ok(compose_unchecked(self, top))
    }

    /// The text form: the partner array.
    pub fn to_json_partner(&self) -> Vec<usize> {
        self.partner.clone()
    }
}

/// Points 0..2N−1 belong to the lower diagram, 2N..4N−1 to the upper; the lower top point
/// N+k is glued to the upper bottom point 2N+k.
fn compose_unchecked(lower: &Connectivity, upper: &Connectivity) -> (Connectivity, usize) {
    let n = lower.n;
    let mut visited_mid = vec![false; n];
    let mut partner = vec![usize::MAX; 2 * n];
    // External endpoints: lower bottoms (result bottoms) and upper tops (result tops).
    let ext: Vec<(bool, usize)> = (0..n).map(|b| (false, b)).chain((n..2 * n).map(|t| (true, t))).collect();
    for &(in_upper, p) in &ext {
        let result_id = p;
        if partner[result_id] != usize::MAX {
            continue;
        }
        let (mut up, mut q) = (in_upper, p);
        let end = loop {
            let diag = if up { upper } else { lower };
            let r = diag.partner[q];
            if up && r >= n {
                break r;
            }
            if !up && r < n {
                break r;
            }
            // r is a middle point: lower top r (k = r−n) or upper bottom r (k = r)
            let k = if up { r } else { r - n };
            visited_mid[k] = true;
            up = !up;
            q = if up { k } else { n + k };
        };
        partner[result_id] = end;
        partner[end] = result_id;
    }
    // What is left of the middle row closes into loops.
    let mut uf = UnionFind::new(n);
    for k in 0..n {
        if !visited_mid[k] {
            uf.union(k, lower.partner[n + k] - n);
            uf.union(k, upper.partner[k]);
        }
    }
    let loops = (0..n).filter(|&k| !visited_mid[k] && uf.find(k) == k).count();
    (Connectivity::from_partner_unchecked(n, partner), loops)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.partner)
    }
}

/// All connectivities of TL_N, sorted (Catalan(N) of them).
pub fn enumerate_connectivities(n: usize) -> Vec<Connectivity> {
    // A planar matching of 2N points in cyclic order is a defect-free link state on 2N points.
    let mut out = Vec::new();
    for s in crate::linkspace::enumerate_link_basis(2 * n).expect("2N ≥ 2") {
        if s.defects() != 0 {
            continue;
        }
        let point = |pos: usize| if pos < n { pos } else { 3 * n - 1 - pos };
        let mut partner = vec![0; 2 * n];
        for (i, j) in s.arcs() {
            partner[point(i)] = point(j);
            partner[point(j)] = point(i);
        }
        out.push(Connectivity { n, partner });
    }
    out.sort();
    out
}

/// A finite linear combination of connectivities.
#[derive(Clone, Debug, PartialEq)]
pub struct TLElement<S: Scalar> {
    n: usize,
    terms: BTreeMap<Connectivity, S>,
}

impl<S: Scalar> TLElement<S> {
    pub fn zero(n: usize) -> Self {
        TLElement { n, terms: BTreeMap::new() }
    }

    pub fn from_connectivity(c: Connectivity, coeff: S) -> Self {
        let mut e = Self::zero(c.n);
        e.add_term(c, coeff);
        e
    }

    pub fn identity(n: usize) -> Self {
        Self::from_connectivity(Connectivity::identity(n), S::one())
    }

    pub fn generator(i: usize, n: usize) -> Result<Self> {
        Ok(Self::from_connectivity(Connectivity::generator(i, n)?, S::one()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Connectivity, S> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, c: &Connectivity) -> S {
        self.terms.get(c).cloned().unwrap_or_else(S::zero)
    }

    pub fn add_term(&mut self, c: Connectivity, coeff: S) {
        assert_eq!(c.n, self.n, "connectivity size mismatch");
        let entry = self.terms.entry(c).or_insert_with(S::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.prune();
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, v| !v.is_zero());
    }

    /// Drops terms whose modulus is at most `eps`.
    pub fn chop(&self, eps: f64) -> Self {
        TLElement { n: self.n, terms: self.terms.iter().filter(|(_, v)| v.norm() > eps).map(|(c, v)| (c.clone(), v.clone())).collect() }
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.n);
        for (c, v) in &self.terms {
            out.add_term(c.clone(), v.clone() * s.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (c, v) in &other.terms {
            out.add_term(c.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&(-S::one())))
    }

    /// The β-product: `self · other` puts `other` on top of `self`.
    pub fn mul(&self, other: &Self, beta: &S) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n);
        for (c1, v1) in &self.terms {
            for (c2, v2) in &other.terms {
                let (c, loops) = compose_unchecked(c1, c2);
                out.add_term(c, v1.clone() * v2.clone() * beta.powi(loops as i32));
            }
        }
        out
    }

    /// Largest coefficient distance to `other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let d = self.sub(other);
        d.terms.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// The part made of connectivities with exactly `d` through-lines.
    pub fn through_line_part(&self, d: usize) -> Self {
        TLElement {
            n: self.n,
            terms: self.terms.iter().filter(|(c, _)| c.through_lines() == d).map(|(c, v)| (c.clone(), v.clone())).collect(),
        }
    }
}

/// JSON form of one term.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TermJson {
    pub partner: Vec<usize>,
    pub coeff: [f64; 2],
}

pub fn tl_element_to_json<S: Scalar>(x: &TLElement<S>) -> Vec<TermJson> {
    x.terms
        .iter()
        .map(|(c, v)| {
            let z = v.to_c64();
            TermJson { partner: c.partner.clone(), coeff: [z.re, z.im] }
        })
        .collect()
}

pub fn tl_element_from_json<S: Scalar>(n: usize, terms: &[TermJson]) -> Result<TLElement<S>> {
    let mut out = TLElement::zero(n);
    for t in terms {
        let c = Connectivity::new(n, t.partner.clone())?;
        out.add_term(c, S::from_c64(num_complex::Complex64::new(t.coeff[0], t.coeff[1])));
    }
    Ok(out)
}

/// The product of two single connectivities with its loop count.
pub fn compose(c1: &Connectivity, c2: &Connectivity) -> Result<(Connectivity, usize)> {
    c1.compose(c2)
}

/// τ(x): linear extension of c ↦ β^{#(c)}.
pub fn trace_tau<S: Scalar>(x: &TLElement<S>, params: &SpectralParams) -> S {
    let beta = params.beta::<S>();
    let mut t = S::zero();
    for (c, v) in &x.terms {
        t += v.clone() * beta.powi(c.closure_loops() as i32);
    }
    t
}

/// δ(c): the number of through-strands.
pub fn delta_of(c: &Connectivity) -> usize {
    c.through_lines()
}

/// Outcome of gluing two link states point to point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GramPairing {
    /// Every defect of one state meets a defect of the other; `loops` closed loops.
    Matched { loops: usize },
    /// Two defects of the same state got joined.
    Mismatched,
}

/// Glues point i of `v` to point i of the mirror image of `w`.
pub fn gram_pairing(v: &LinkState, w: &LinkState) -> Result<GramPairing> {
    let n = v.n();
    if w.n() != n {
        return invalid(format!("Gram product of states on {} and {} points", n, w.n()));
    }
    let mut seen = vec![false; n];
    // Open paths start at defects of v; each must end at a defect of w.
    for start in 0..n {
        if !v.is_defect(start) || seen[start] {
            continue;
        }
        let mut p = start;
        let mut in_w = true; // next edge to follow is w's
        loop {
            seen[p] = true;
            let next = if in_w { w.partner(p) } else { v.partner(p) };
            match next {
                None => {
                    if in_w {
                        break; // reached a defect of w
                    } else {
                        return Ok(GramPairing::Mismatched);
                    }
                }
                Some(q) => {
                    p = q;
                    in_w = !in_w;
                }
            }
        }
    }
    if (0..n).any(|p| w.is_defect(p) && !seen[p]) {
        return Ok(GramPairing::Mismatched);
    }
    let mut loops = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        loops += 1;
        let mut p = start;
        let mut in_w = true;
        loop {
            seen[p] = true;
            let q = if in_w { w.partner(p) } else { v.partner(p) }.expect("points off open paths carry arcs in both states");
            in_w = !in_w;
            p = q;
            if p == start && in_w {
                break;
            }
        }
    }
    Ok(GramPairing::Matched { loops })
}

/// ⟨v|w⟩_G: β^{loops} when every defect meets a defect, 0 otherwise.
pub fn gram<S: Scalar>(v: &LinkState, w: &LinkState, params: &SpectralParams) -> Result<S> {
    Ok(match gram_pairing(v, w)? {
        GramPairing::Matched { loops } => params.beta::<S>().powi(loops as i32),
        GramPairing::Mismatched => S::zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkspace::{parse_link_notation, LinkState};

    #[test]
    fn e1_squared_is_beta_e1() {
        let e1 = Connectivity::generator(1, 2).unwrap();
        assert_eq!(e1.compose(&e1).unwrap(), (e1.clone(), 1));
    }

    #[test]
    fn braid_relations() {
        for n in 3..=5 {
            for i in 1..n - 1 {
                let a = Connectivity::generator(i, n).unwrap();
                let b = Connectivity::generator(i + 1, n).unwrap();
                let (ab, l1) = a.compose(&b).unwrap();
                let (aba, l2) = ab.compose(&a).unwrap();
                assert_eq!((aba, l1 + l2), (a.clone(), 0));
                let (ba, _) = b.compose(&a).unwrap();
                let (bab, l) = ba.compose(&b).unwrap();
                assert_eq!((bab, l), (b.clone(), 0));
            }
        }
        let e1 = Connectivity::generator(1, 4).unwrap();
        let e3 = Connectivity::generator(3, 4).unwrap();
        assert_eq!(e1.compose(&e3).unwrap(), e3.compose(&e1).unwrap());
    }

    #[test]
    fn catalan_many_connectivities() {
        let counts: Vec<usize> = (1..=6).map(|n| enumerate_connectivities(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 14, 42, 132]);
    }

    #[test]
    fn trace_values() {
        let p = SpectralParams::real(0.7, 0.2);
        let beta = p.beta_c64();
        let id = TLElement::<num_complex::Complex64>::identity(4);
        assert!((trace_tau(&id, &p) - beta.powi(4)).norm() < 1e-12);
        let e1 = TLElement::<num_complex::Complex64>::generator(1, 2).unwrap();
        assert!((trace_tau(&e1, &p) - beta).norm() < 1e-12);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_of(&Connectivity::identity(5)), 5);
        assert_eq!(delta_of(&Connectivity::generator(1, 2).unwrap()), 0);
    }

    #[test]
    fn gram_examples() {
        // Defects at 1,4 with arcs (2,3),(6,7),(8,9),(5,10) against defects at 1,6 with
        // arcs (2,3),(4,5),(8,9),(7,10): two loops close.
        let v = LinkState::from_arcs(10, &[(1, 2), (5, 6), (7, 8), (4, 9)]).unwrap();
        let w = LinkState::from_arcs(10, &[(1, 2), (3, 4), (7, 8), (6, 9)]).unwrap();
        assert_eq!(gram_pairing(&v, &w).unwrap(), GramPairing::Matched { loops: 2 });
        let a = parse_link_notation("1", 2).unwrap();
        let d = LinkState::all_defects(2);
        assert_eq!(gram_pairing(&a, &d).unwrap(), GramPairing::Mismatched);
        assert_eq!(gram_pairing(&d, &d).unwrap(), GramPairing::Matched { loops: 0 });
        assert_eq!(gram_pairing(&a, &a).unwrap(), GramPairing::Matched { loops: 1 });
    }

    #[test]
    fn rejects_non_planar() {
        // bottom 0 with top 3 and bottom 1 with top 2 cross for N=2
        assert!(Connectivity::new(2, vec![3, 2, 1, 0]).is_err());
        assert!(Connectivity::new(2, vec![2, 3, 0, 1]).is_ok());
    }
}
