//! Link states: non-crossing pairings of N points on a line with unpaired
//! points (defects) running off to infinity. Includes the canonical basis
//! ordering and the η, μ and half-point-label encodings.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// A link state on `n` points. `partner[i] = Some(j)` joins i and j by an arc,
/// `None` marks a defect.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinkState {
    partner: Vec<Option<usize>>,
}

impl LinkState {
    /// Builds a link state, checking involution, planarity and that no defect sits under an arc.
    pub fn new(partner: Vec<Option<usize>>) -> Result<Self> {
        let n = partner.len();
        for (i, p) in partner.iter().enumerate() {
            if let Some(j) = *p {
                if j >= n || j == i || partner[j] != Some(i) {
                    return invalid(format!("partner array is not an involution at point {i}"));
                }
            }
        }
        for (i, p) in partner.iter().enumerate() {
            if let Some(j) = *p {
                if j > i {
                    for k in i + 1..j {
                        match partner[k] {
                            None => return invalid(format!("defect {k} lies under arc ({i},{j})")),
                            Some(l) if l < i || l > j => {
                                return invalid(format!("arcs ({i},{j}) and ({k},{l}) cross"))
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        Ok(LinkState { partner })
    }

    /// The state with `n` defects and no arcs (v^n).
    pub fn all_defects(n: usize) -> Self {
        LinkState { partner: vec![None; n] }
    }

    /// Builds a state from 0-indexed arcs; the remaining points are defects.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut partner = vec![None; n];
        for &(i, j) in arcs {
            if i >= n || j >= n || i == j || partner[i].is_some() || partner[j].is_some() {
                return invalid(format!("bad arc ({i},{j}) for {n} points"));
            }
            partner[i] = Some(j);
            partner[j] = Some(i);
        }
        Self::new(partner)
    }

    pub(crate) fn from_partner_unchecked(partner: Vec<Option<usize>>) -> Self {
        debug_assert!(Self::new(partner.clone()).is_ok(), "invalid link state {partner:?}");
        LinkState { partner }
    }

    pub fn n(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, i: usize) -> Option<usize> {
        self.partner[i]
    }

    pub fn partners(&self) -> &[Option<usize>] {
        &self.partner
    }

    pub fn is_defect(&self, i: usize) -> bool {
        self.partner[i].is_none()
    }

    /// Number of defects d.
    pub fn defects(&self) -> usize {
        self.partner.iter().filter(|p| p.is_none()).count()
    }

    pub fn defect_positions(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.partner[i].is_none()).collect()
    }

    /// Arcs as (left, right) pairs, sorted by right endpoint (inner arcs before outer ones).
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .filter_map(|j| match self.partner[j] {
                Some(i) if i < j => Some((i, j)),
                _ => None,
            })
            .collect()
    }

    pub fn num_arcs(&self) -> usize {
        (self.n() - self.defects()) / 2
    }

    /// Left endpoints of the 1-bubbles (arcs joining neighbouring points), left to right.
    pub fn one_bubbles(&self) -> Vec<usize> {
        (0..self.n().saturating_sub(1)).filter(|&i| self.partner[i] == Some(i + 1)).collect()
    }

    /// Nesting depth of the arc starting at `i`: 1 for a 1-bubble, 1 + max depth of enclosed arcs otherwise.
    pub fn arc_depth(&self, i: usize) -> usize {
        let j = self.partner[i].expect("arc_depth called on a defect");
        let (i, j) = (i.min(j), i.max(j));
        let mut k = i + 1;
        let mut inner = 0;
        while k < j {
            let l = self.partner[k].expect("no defect under an arc");
            inner = inner.max(self.arc_depth(k));
            k = l + 1;
        }
        inner + 1
    }

    /// Maximal nesting depth over all arcs (0 if there are none).
    pub fn max_depth(&self) -> usize {
        self.arcs().iter().map(|&(i, _)| self.arc_depth(i)).max().unwrap_or(0)
    }

    /// Places `inner` (a state on d points) on the d defects of `self`, keeping the arcs of `self`.
    pub fn reinsert(&self, inner: &LinkState) -> LinkState {
        let pos = self.defect_positions();
        assert_eq!(pos.len(), inner.n(), "reinsert: defect count mismatch");
        let mut partner = self.partner.clone();
        for (a, &p) in pos.iter().enumerate() {
            partner[p] = inner.partner[a].map(|b| pos[b]);
        }
        LinkState::from_partner_unchecked(partner)
    }

    /// Removes the defect at the first point and shifts the rest left; `None` if point 0 is not a defect.
    pub fn shift_left(&self) -> Option<LinkState> {
        if self.n() == 0 || !self.is_defect(0) {
            return None;
        }
        let partner = self.partner[1..].iter().map(|p| p.map(|j| j - 1)).collect();
        Some(LinkState::from_partner_unchecked(partner))
    }

    /// Removes the two points of the 1-bubble starting at `i`.
    pub fn remove_bubble(&self, i: usize) -> LinkState {
        assert_eq!(self.partner[i], Some(i + 1), "remove_bubble: no 1-bubble at {i}");
        let map = |j: usize| if j > i + 1 { j - 2 } else { j };
        let partner = self
            .partner
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i && k != i + 1)
            .map(|(_, p)| p.map(map))
            .collect();
        LinkState::from_partner_unchecked(partner)
    }

    /// Replaces the arc starting at `i` by two defects (only valid for an outermost arc).
    pub fn open_arc(&self, i: usize) -> Result<LinkState> {
        let j = self.partner[i].ok_or_else(|| Error::InvalidArgument(format!("point {i} is a defect")))?;
        let mut partner = self.partner.clone();
        partner[i] = None;
        partner[j] = None;
        LinkState::new(partner)
    }

    /// Canonical in-sector key: the partner array with defects mapped to the greatest value.
    fn order_key(&self) -> Vec<usize> {
        self.partner.iter().map(|p| p.unwrap_or(usize::MAX)).collect()
    }

    /// 1-indexed half-point labels closing the arcs from inner to outer (v-notation).
    pub fn to_labels(&self) -> Vec<usize> {
        self.arcs().iter().map(|&(i, j)| (i + j + 1) / 2).collect()
    }

    /// The v-notation, e.g. `N=10; arcs=3,7`.
    pub fn to_v_notation(&self) -> String {
        let labels: Vec<String> = self.to_labels().iter().map(|l| l.to_string()).collect();
        format!("N={}; arcs={}", self.n(), labels.join(","))
    }

    /// JSON-friendly partner array with −1 for defects.
    pub fn to_signed(&self) -> Vec<i64> {
        self.partner.iter().map(|p| p.map(|j| j as i64).unwrap_or(-1)).collect()
    }

    pub fn from_signed(partner: &[i64]) -> Result<Self> {
        let p = partner
            .iter()
            .map(|&x| match x {
                -1 => Ok(None),
                x if x >= 0 => Ok(Some(x as usize)),
                x => invalid(format!("bad partner entry {x}")),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(p)
    }
}

impl PartialOrd for LinkState {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LinkState {
    /// Basis order: by increasing defect count, then lexicographic on the partner array with defects greatest.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n(), self.defects(), self.order_key()).cmp(&(other.n(), other.defects(), other.order_key()))
    }
}

impl fmt::Display for LinkState {
    /// Compact picture: `(` opens an arc, `)` closes it, `|` is a defect.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.partner.iter().enumerate() {
            let c = match p {
                None => '|',
                Some(j) if *j > i => '(',
                Some(_) => ')',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct LinkStateJson {
    n: usize,
    partner: Vec<i64>,
}

impl Serialize for LinkState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LinkStateJson { n: self.n(), partner: self.to_signed() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinkState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = LinkStateJson::deserialize(d)?;
        if j.partner.len() != j.n {
            return Err(serde::de::Error::custom("partner length differs from n"));
        }
        LinkState::from_signed(&j.partner).map_err(serde::de::Error::custom)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as usize
}

/// dim V_N^d = C(N, (N−d)/2) − C(N, (N−d)/2 − 1); zero if d and N have different parity.
pub fn sector_dim(n: usize, d: usize) -> usize {
    if d > n || (n - d) % 2 != 0 {
        return 0;
    }
    let k = (n - d) / 2;
    binomial(n, k) - if k == 0 { 0 } else { binomial(n, k - 1) }
}

/// Catalan number C_n.
pub fn catalan(n: usize) -> usize {
    binomial(2 * n, n) / (n + 1)
}

/// All link states on `n` points in canonical order.
pub fn enumerate_link_basis(n: usize) -> Result<Vec<LinkState>> {
    if n == 0 {
        return invalid("the number of points N must be at least 1");
    }
    let mut out = Vec::with_capacity(binomial(n, n / 2));
    let mut partner = vec![None; n];
    let mut stack = Vec::new();
    fill(0, n, &mut partner, &mut stack, &mut out);
    out.sort();
    Ok(out)
}

fn fill(
    i: usize,
    n: usize,
    partner: &mut Vec<Option<usize>>,
    stack: &mut Vec<usize>,
    out: &mut Vec<LinkState>,
) {
    if i == n {
        if stack.is_empty() {
            out.push(LinkState { partner: partner.clone() });
        }
        return;
    }
    if stack.len() > n - i {
        return;
    }
    // A defect is only allowed outside every arc.
    if stack.is_empty() {
        partner[i] = None;
        fill(i + 1, n, partner, stack, out);
    }
    stack.push(i);
    fill(i + 1, n, partner, stack, out);
    stack.pop();
    if let Some(j) = stack.pop() {
        partner[i] = Some(j);
        partner[j] = Some(i);
        fill(i + 1, n, partner, stack, out);
        partner[j] = None;
        partner[i] = None;
        stack.push(j);
    }
}

/// The canonical basis B_N together with an index and the defect-sector layout.
#[derive(Clone, Debug)]
pub struct LinkBasis {
    n: usize,
    states: Vec<LinkState>,
    index: HashMap<LinkState, usize>,
    sectors: Vec<usize>,
    offsets: Vec<usize>,
}

impl LinkBasis {
    pub fn new(n: usize) -> Result<Self> {
        let states = enumerate_link_basis(n)?;
        let index = states.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect();
        let mut sectors = Vec::new();
        let mut offsets = Vec::new();
        for (k, s) in states.iter().enumerate() {
            if sectors.last() != Some(&s.defects()) {
                sectors.push(s.defects());
                offsets.push(k);
            }
        }
        offsets.push(states.len());
        Ok(LinkBasis { n, states, index, sectors, offsets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[LinkState] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &LinkState {
        &self.states[k]
    }

    pub fn index_of(&self, s: &LinkState) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Defect numbers present, increasing.
    pub fn sectors(&self) -> &[usize] {
        &self.sectors
    }

    /// Start index of each sector followed by the total dimension.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Index range of sector d (empty if absent).
    pub fn sector_range(&self, d: usize) -> Range<usize> {
        match self.sectors.iter().position(|&x| x == d) {
            Some(k) => self.offsets[k]..self.offsets[k + 1],
            None => 0..0,
        }
    }

    /// Defect number of basis element k.
    pub fn defects_of(&self, k: usize) -> usize {
        self.states[k].defects()
    }
}

/// η-word: 0 for a defect, +1 where an arc opens, −1 where it closes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EtaWord(pub Vec<i8>);

pub fn eta_encode(w: &LinkState) -> EtaWord {
    EtaWord(
        (0..w.n())
            .map(|i| match w.partner(i) {
                None => 0,
                Some(j) if j > i => 1,
                Some(_) => -1,
            })
            .collect(),
    )
}

pub fn eta_decode(word: &EtaWord) -> Result<LinkState> {
    let mut partner = vec![None; word.0.len()];
    let mut stack = Vec::new();
    for (i, &s) in word.0.iter().enumerate() {
        match s {
            0 if stack.is_empty() => {}
            0 => return invalid(format!("η-word has a defect under an arc at position {i}")),
            1 => stack.push(i),
            -1 => {
                let j = stack.pop().ok_or_else(|| Error::InvalidArgument(format!("η-word prefix sum negative at {i}")))?;
                partner[i] = Some(j);
                partner[j] = Some(i);
            }
            x => return invalid(format!("η-word symbol {x} not in {{-1,0,1}}")),
        }
    }
    if !stack.is_empty() {
        return invalid("η-word has unclosed arcs");
    }
    LinkState::new(partner)
}

impl fmt::Display for EtaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0.iter().map(|&s| match s { 1 => "+", -1 => "-", _ => "0" }).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl std::str::FromStr for EtaWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('{').trim_end_matches('}');
        if t.is_empty() {
            return Ok(EtaWord(vec![]));
        }
        t.split(',')
            .map(|x| match x.trim() {
                "0" => Ok(0),
                "+" | "1" | "+1" => Ok(1),
                "-" | "-1" => Ok(-1),
                other => Err(Error::Parse(format!("bad η symbol '{other}'"))),
            })
            .collect::<Result<Vec<i8>>>()
            .map(EtaWord)
    }
}

/// One token of a μ-word: a point count, or the interior of a 2-bubble
/// (which necessarily holds `inner` adjacent 1-bubbles).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MuToken {
    Count(usize),
    Star { inner: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MuWord(pub Vec<MuToken>);

impl fmt::Display for MuWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|t| match t {
                MuToken::Count(m) => m.to_string(),
                MuToken::Star { .. } => "*".to_string(),
            })
            .collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// μ-encoding for states whose arcs are 1-bubbles and 2-bubbles; `None` for deeper nestings.
///
/// Top-level objects (1-bubbles and 2-bubbles) delimit the integer tokens: the first counts
/// points up to and including the left end of the first object, the inner ones count points
/// from the right end of one object to the left end of the next (both included), the last
/// counts points from the right end of the last object onwards. A 2-bubble additionally
/// contributes a `*` for its interior.
pub fn mu_encode(w: &LinkState) -> Option<MuWord> {
    if w.max_depth() > 2 {
        return None;
    }
    let n = w.n();
    let mut tops = Vec::new();
    let mut i = 0;
    while i < n {
        match w.partner(i) {
            None => i += 1,
            Some(j) => {
                tops.push((i, j));
                i = j + 1;
            }
        }
    }
    if tops.is_empty() {
        return Some(MuWord(vec![MuToken::Count(n)]));
    }
    let mut tokens = vec![MuToken::Count(tops[0].0 + 1)];
    for (k, &(i, j)) in tops.iter().enumerate() {
        if j > i + 1 {
            tokens.push(MuToken::Star { inner: (j - i - 1) / 2 });
        }
        let next_left = tops.get(k + 1).map(|t| t.0).unwrap_or(n - 1);
        let count = if k + 1 < tops.len() { next_left - j + 1 } else { n - j };
        tokens.push(MuToken::Count(count));
    }
    Some(MuWord(tokens))
}

pub fn mu_decode(word: &MuWord) -> Result<LinkState> {
    let toks = &word.0;
    let count = |t: &MuToken| match t {
        MuToken::Count(m) if *m >= 1 => Ok(*m),
        _ => invalid(format!("μ-word {word}: expected a positive count")),
    };
    if toks.is_empty() {
        return invalid("empty μ-word");
    }
    let first = count(&toks[0])?;
    if toks.len() == 1 {
        return Ok(LinkState::all_defects(first));
    }
    let mut partner: Vec<Option<usize>> = vec![None; first - 1];
    let mut left = first - 1; // left end of the current top-level object
    let mut k = 1;
    loop {
        let (inner, next) = match toks.get(k) {
            Some(MuToken::Star { inner }) => (*inner, k + 1),
            _ => (0, k),
        };
        let c = count(toks.get(next).ok_or_else(|| Error::InvalidArgument(format!("μ-word {word} ends early")))?)?;
        let right = left + 2 * inner + 1;
        partner.resize(right + 1, None);
        partner[left] = Some(right);
        partner[right] = Some(left);
        for b in 0..inner {
            let p = left + 1 + 2 * b;
            partner[p] = Some(p + 1);
            partner[p + 1] = Some(p);
        }
        if next + 1 == toks.len() {
            partner.resize(right + c, None);
            break;
        }
        if c < 2 {
            return invalid(format!("μ-word {word}: interior count must be at least 2"));
        }
        partner.resize(right + c - 1, None);
        left = right + c - 1;
        k = next + 1;
    }
    LinkState::new(partner)
}

/// Builds the state v^N_{n_1,...,n_k} from 1-indexed half-point labels listed from inner to outer arcs.
/// Each label n closes an arc between the nearest free point at or left of n and the nearest
/// free point at or right of n+1.
pub fn parse_link_notation(spec: &str, n: usize) -> Result<LinkState> {
    let labels: Vec<usize> = if spec.trim().is_empty() {
        vec![]
    } else {
        spec.split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad label '{}'", x.trim()))))
            .collect::<Result<_>>()?
    };
    let mut partner: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    for &lab in &labels {
        if lab < 1 || lab >= n {
            return Err(Error::Parse(format!("label {lab} outside 1..{}", n.saturating_sub(1))));
        }
        let left = (0..lab).rev().find(|&i| !used[i]);
        let right = (lab..n).find(|&i| !used[i]);
        match (left, right) {
            (Some(i), Some(j)) => {
                used[i] = true;
                used[j] = true;
                partner[i] = Some(j);
                partner[j] = Some(i);
            }
            _ => return Err(Error::Parse(format!("label {lab}: no free endpoint on one side"))),
        }
    }
    LinkState::new(partner).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses the text form `N=10; arcs=3,7`.
pub fn parse_v_notation(text: &str) -> Result<LinkState> {
    let mut n = None;
    let mut arcs = String::new();
    for part in text.split(';') {
        let part = part.trim();
        if let Some(v) = part.strip_prefix("N=") {
            n = Some(v.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad N in '{text}'")))?);
        } else if let Some(v) = part.strip_prefix("arcs=") {
            arcs = v.to_string();
        } else if !part.is_empty() {
            return Err(Error::Parse(format!("unexpected field '{part}'")));
        }
    }
    let n = n.ok_or_else(|| Error::Parse(format!("missing N= in '{text}'")))?;
    parse_link_notation(&arcs, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n4_has_six_states() {
        let b = LinkBasis::new(4).unwrap();
        assert_eq!(b.dim(), 6);
        assert_eq!(b.sector_range(0).len(), 2);
        assert_eq!(b.sector_range(2).len(), 3);
        assert_eq!(b.sector_range(4).len(), 1);
    }

    #[test]
    fn n1_single_defect() {
        let b = enumerate_link_basis(1).unwrap();
        assert_eq!(b, vec![LinkState::all_defects(1)]);
        assert!(enumerate_link_basis(0).is_err());
    }

    #[test]
    fn canonical_order_within_sector() {
        // N=4, d=2: partner arrays [1,0,⊥,⊥] < [⊥,2,1,⊥] < [⊥,⊥,3,2].
        let b = LinkBasis::new(4).unwrap();
        let r = b.sector_range(2);
        let s: Vec<String> = b.states()[r].iter().map(|s| s.to_string()).collect();
        assert_eq!(s, vec!["()||", "|()|", "||()"]);
    }

    #[test]
    fn invalid_states_rejected() {
        assert!(LinkState::from_arcs(4, &[(0, 2), (1, 3)]).is_err());
        assert!(LinkState::from_arcs(3, &[(0, 2)]).is_err());
    }

    #[test]
    fn eta_examples() {
        let w = parse_link_notation("3,7", 10).unwrap();
        assert_eq!(eta_encode(&w).0, vec![0, 0, 1, -1, 0, 0, 1, -1, 0, 0]);
        let w = parse_link_notation("2,2,7,7", 10).unwrap();
        assert_eq!(eta_encode(&w).0, vec![1, 1, -1, -1, 0, 1, 1, -1, -1, 0]);
        let w = parse_link_notation("2,6,8,7", 10).unwrap();
        assert_eq!(eta_encode(&w).0, vec![0, 1, -1, 0, 1, 1, -1, 1, -1, -1]);
        let w = parse_link_notation("3,5,4,8,5", 10).unwrap();
        assert_eq!(eta_encode(&w).0, vec![1, 1, 1, -1, 1, -1, -1, 1, -1, -1]);
        assert_eq!(w.max_depth(), 3);
        assert_eq!(eta_encode(&LinkState::all_defects(5)).0, vec![0; 5]);
    }

    #[test]
    fn mu_examples() {
        let w = parse_link_notation("3,11,13,19", 20).unwrap();
        assert_eq!(mu_encode(&w).unwrap().to_string(), "[3,8,2,6,1]");
        let w2 = parse_link_notation("3,5,4,12,12,19", 20).unwrap();
        assert_eq!(mu_encode(&w2).unwrap().to_string(), "[2,*,5,*,6,1]");
        assert_eq!(mu_decode(&mu_encode(&w2).unwrap()).unwrap(), w2);
        assert!(mu_encode(&parse_link_notation("3,5,4,8,5", 10).unwrap()).is_none());
    }

    #[test]
    fn labels_round_trip() {
        for n in 1..=9 {
            for s in enumerate_link_basis(n).unwrap() {
                let labels: Vec<String> = s.to_labels().iter().map(|l| l.to_string()).collect();
                assert_eq!(parse_link_notation(&labels.join(","), n).unwrap(), s);
                assert_eq!(parse_v_notation(&s.to_v_notation()).unwrap(), s);
            }
        }
        assert_eq!(parse_link_notation("", 3).unwrap(), LinkState::all_defects(3));
        assert!(parse_link_notation("1,1", 3).is_err());
        assert!(parse_link_notation("0", 3).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = parse_link_notation("2", 4).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"n":4,"partner":[-1,2,1,-1]}"#);
        let back: LinkState = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }
}
