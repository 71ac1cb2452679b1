//! Double-row transfer matrix D_N(λ,u), its Fourier coefficients, and the braid
//! matrix F_N(λ) computed by face expansion, by a frontier sweep, column by column
//! from pure-defect columns, and entry by entry from 8×8 and 2×2 matrix products.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::link_rep::SectorMatrix;
use crate::linkspace::{eta_encode, EtaWord, LinkBasis, LinkState, MuToken, MuWord};
use crate::matrix::Mat;
use crate::params::SpectralParams;
use crate::scalar::Scalar;
use crate::tl_algebra::{Connectivity, TLElement};

/// Largest N for which the 2^{2N} face expansion is attempted.
pub const BRUTE_MAX_N: usize = 8;
/// Largest N for which the frontier sweep is attempted.
pub const SWEEP_MAX_N: usize = 14;

/// Weights of the two tilings of a face, per row. Index 0 is the tiling joining
/// bottom–right and left–top, index 1 the tiling joining bottom–left and top–right.
#[derive(Clone, Debug)]
pub struct FaceWeights<S: Scalar> {
    pub lower: [S; 2],
    pub upper: [S; 2],
}

impl<S: Scalar> FaceWeights<S> {
    /// D_N(λ,u): lower row (sin(λ−u), sin u), upper row (sin u, sin(λ−u)).
    pub fn double_row(params: &SpectralParams) -> Self {
        let lambda = params.lambda::<S>();
        let u = params.u::<S>();
        Self::double_row_at(&lambda, &u)
    }

    pub fn double_row_at(lambda: &S, u: &S) -> Self {
        let s = u.sin();
        let t = (lambda.clone() - u.clone()).sin();
        FaceWeights { lower: [t.clone(), s.clone()], upper: [s, t] }
    }

    /// Braid boxes: lower row (−i e^{−iλ/2}, i e^{iλ/2}), upper row (i e^{iλ/2}, −i e^{−iλ/2}).
    pub fn braid(params: &SpectralParams) -> Self {
        let half = params.lambda::<S>() / S::from_f64(2.0);
        let plus = S::i() * half.exp_i();
        let minus = -(S::i() * (-half).exp_i());
        FaceWeights { lower: [minus.clone(), plus.clone()], upper: [plus, minus] }
    }
}

// Box edges.
const BOTTOM: usize = 0;
const LEFT: usize = 1;
const TOP: usize = 2;
const RIGHT: usize = 3;

/// Traces the double row with the given tilings (bit j: lower box j, bit N+j: upper box j;
/// a set bit selects tiling 1) and returns the connectivity and the number of closed loops.
pub fn trace_double_row(n: usize, states: u64) -> (Connectivity, usize) {
    let node = |row: usize, col: usize, edge: usize| (row * n + col) * 4 + edge;
    let total = 8 * n;
    // Fixed connections between box edges; usize::MAX marks an external point.
    let mut fixed = vec![usize::MAX; total];
    let mut link = |a: usize, b: usize| {
        fixed[a] = b;
        fixed[b] = a;
    };
    for j in 0..n {
        link(node(0, j, TOP), node(1, j, BOTTOM));
        if j + 1 < n {
            link(node(0, j, RIGHT), node(0, j + 1, LEFT));
            link(node(1, j, RIGHT), node(1, j + 1, LEFT));
        }
    }
    link(node(0, 0, LEFT), node(1, 0, LEFT));
    link(node(0, n - 1, RIGHT), node(1, n - 1, RIGHT));
    let inside = |x: usize| -> usize {
        let (b, e) = (x / 4, x % 4);
        let (row, col) = (b / n, b % n);
        let tiling = (states >> (row * n + col)) & 1;
        let other = match (tiling, e) {
            (0, BOTTOM) => RIGHT,
            (0, RIGHT) => BOTTOM,
            (0, LEFT) => TOP,
            (0, TOP) => LEFT,
            (_, BOTTOM) => LEFT,
            (_, LEFT) => BOTTOM,
            (_, TOP) => RIGHT,
            (_, _) => TOP,
        };
        b * 4 + other
    };
    let external = |x: usize| -> Option<usize> {
        let (b, e) = (x / 4, x % 4);
        let (row, col) = (b / n, b % n);
        match (row, e) {
            (0, BOTTOM) => Some(col),
            (1, TOP) => Some(n + col),
            _ => None,
        }
    };
    let mut seen = vec![false; total];
    let mut partner = vec![usize::MAX; 2 * n];
    for p in 0..2 * n {
        if partner[p] != usize::MAX {
            continue;
        }
        let start = if p < n { node(0, p, BOTTOM) } else { node(1, p - n, TOP) };
        let mut x = start;
        let end = loop {
            seen[x] = true;
            let y = inside(x);
            seen[y] = true;
            if let Some(q) = external(y) {
                break q;
            }
            x = fixed[y];
        };
        partner[p] = end;
        partner[end] = p;
    }
    let mut loops = 0;
    for start in 0..total {
        if seen[start] {
            continue;
        }
        loops += 1;
        let mut x = start;
        loop {
            seen[x] = true;
            let y = inside(x);
            seen[y] = true;
            x = fixed[y];
            if x == start {
                break;
            }
        }
    }
    (Connectivity::from_partner_unchecked(n, partner), loops)
}

/// Expands the 2N faces into a TL element.
pub fn build_double_row_brute<S: Scalar>(n: usize, weights: &FaceWeights<S>, beta: &S) -> Result<TLElement<S>> {
    if n == 0 {
        return invalid("N must be at least 1");
    }
    if n > BRUTE_MAX_N {
        return Err(Error::Capacity(format!("face expansion needs N ≤ {BRUTE_MAX_N}, got N = {n}")));
    }
    let mut acc: BTreeMap<Connectivity, S> = BTreeMap::new();
    for states in 0u64..(1u64 << (2 * n)) {
        let (c, loops) = trace_double_row(n, states);
        let mut w = beta.powi(loops as i32);
        for j in 0..n {
            w *= weights.lower[((states >> j) & 1) as usize].clone();
            w *= weights.upper[((states >> (n + j)) & 1) as usize].clone();
        }
        *acc.entry(c).or_insert_with(S::zero) += w;
    }
    let mut out = TLElement::zero(n);
    for (c, w) in acc {
        out.add_term(c, w);
    }
    Ok(out)
}

/// D_N(λ,u) as a TL element, by summing all 2^{2N} face configurations.
pub fn build_dn_brute<S: Scalar>(n: usize, params: &SpectralParams) -> Result<TLElement<S>> {
    build_double_row_brute(n, &FaceWeights::double_row(params), &params.beta::<S>())
}

/// F_N(λ) as a TL element, by expanding every braid box.
pub fn build_fn_direct<S: Scalar>(n: usize, params: &SpectralParams) -> Result<TLElement<S>> {
    build_double_row_brute(n, &FaceWeights::braid(params), &params.beta::<S>())
}

/// What the state on top does at the current column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TopAction {
    Defect,
    Open,
    Close,
}

/// Resolves a small graph whose nodes have degree one (kept endpoints and ends at
/// infinity) or two (interior). Returns the pairing of kept nodes (−1 for a path to
/// infinity) and the number of closed loops.
fn resolve(num_nodes: usize, edges: &[(usize, usize)], kept: &[usize], inf: &[usize]) -> (Vec<i32>, usize) {
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(2); num_nodes];
    for (e, &(a, b)) in edges.iter().enumerate() {
        adj[a].push(e);
        adj[b].push(e);
    }
    let mut kept_index = vec![-1i32; num_nodes];
    for (k, &x) in kept.iter().enumerate() {
        kept_index[x] = k as i32;
    }
    let mut is_inf = vec![false; num_nodes];
    for &x in inf {
        is_inf[x] = true;
    }
    let mut seen = vec![false; num_nodes];
    let walk = |start: usize, seen: &mut Vec<bool>| -> usize {
        seen[start] = true;
        let mut e = adj[start][0];
        let mut cur = start;
        loop {
            let (a, b) = edges[e];
            let next = if a == cur { b } else { a };
            seen[next] = true;
            if kept_index[next] >= 0 || is_inf[next] {
                return next;
            }
            let es = &adj[next];
            e = if es[0] == e { es[1] } else { es[0] };
            cur = next;
        }
    };
    let mut out = vec![i32::MIN; kept.len()];
    for (k, &x) in kept.iter().enumerate() {
        if out[k] != i32::MIN {
            continue;
        }
        let end = walk(x, &mut seen);
        if is_inf[end] {
            out[k] = -1;
        } else {
            let k2 = kept_index[end] as usize;
            out[k] = k2 as i32;
            out[k2] = k as i32;
        }
    }
    for &x in inf {
        if !seen[x] {
            walk(x, &mut seen);
        }
    }
    let mut loops = 0;
    for start in 0..num_nodes {
        if seen[start] || adj[start].is_empty() {
            continue;
        }
        loops += 1;
        let mut cur = start;
        let mut e = adj[start][0];
        loop {
            seen[cur] = true;
            let (a, b) = edges[e];
            let next = if a == cur { b } else { a };
            if next == start {
                break;
            }
            let es = &adj[next];
            e = if es[0] == e { es[1] } else { es[0] };
            cur = next;
        }
    }
    (out, loops)
}

/// Frontier after j columns: partner array over [outputs 0..j, lower cut, upper cut,
/// open arcs of the top state from innermost to outermost ... stored oldest first].
type Pattern = Vec<i32>;

fn sweep_step(pat: &Pattern, j: usize, lower: usize, upper: usize, act: TopAction) -> (Pattern, usize) {
    let s = pat.len();
    let ncross = s - j - 2;
    let (l_old, u_old) = (j, j + 1);
    let (out_j, t_mid, l_new, u_new, t_top) = (s, s + 1, s + 2, s + 3, s + 4);
    let mut num = s + 5;
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(s + 8);
    let mut inf = Vec::new();
    for (i, &p) in pat.iter().enumerate() {
        if p < 0 {
            edges.push((i, num));
            inf.push(num);
            num += 1;
        } else if (p as usize) > i {
            edges.push((i, p as usize));
        }
    }
    if lower == 0 {
        edges.push((out_j, l_new));
        edges.push((l_old, t_mid));
    } else {
        edges.push((out_j, l_old));
        edges.push((t_mid, l_new));
    }
    if upper == 0 {
        edges.push((t_mid, u_new));
        edges.push((u_old, t_top));
    } else {
        edges.push((t_mid, u_old));
        edges.push((t_top, u_new));
    }
    let mut crossings: Vec<usize> = (j + 2..s).collect();
    match act {
        TopAction::Defect => {
            edges.push((t_top, num));
            inf.push(num);
            num += 1;
        }
        TopAction::Open => crossings.push(t_top),
        TopAction::Close => {
            let c = crossings.pop().expect("closing an arc that was never opened");
            edges.push((t_top, c));
        }
    }
    let _ = ncross;
    let mut kept: Vec<usize> = (0..j).collect();
    kept.extend([out_j, l_new, u_new]);
    kept.extend(crossings);
    resolve(num, &edges, &kept, &inf)
}

fn sweep_close(pat: &Pattern, n: usize) -> (Vec<i32>, usize) {
    let s = pat.len();
    assert_eq!(s, n + 2, "open arcs left at the right edge");
    let mut num = s;
    let mut edges = Vec::new();
    let mut inf = Vec::new();
    for (i, &p) in pat.iter().enumerate() {
        if p < 0 {
            edges.push((i, num));
            inf.push(num);
            num += 1;
        } else if (p as usize) > i {
            edges.push((i, p as usize));
        }
    }
    edges.push((n, n + 1));
    let kept: Vec<usize> = (0..n).collect();
    resolve(num, &edges, &kept, &inf)
}

/// ρ(double row)·v as a list of (state, coefficient), by sweeping the columns left to right
/// and merging equal frontier patterns.
pub fn sweep_column<S: Scalar>(v: &LinkState, weights: &FaceWeights<S>, beta: &S) -> Vec<(LinkState, S)> {
    let n = v.n();
    let mut frontier: BTreeMap<Pattern, S> = BTreeMap::new();
    frontier.insert(vec![1, 0], S::one());
    let mut beta_pow: Vec<S> = vec![S::one()];
    let bp = |k: usize, beta_pow: &mut Vec<S>| -> S {
        while beta_pow.len() <= k {
            let last = beta_pow.last().unwrap().clone();
            beta_pow.push(last * beta.clone());
        }
        beta_pow[k].clone()
    };
    for j in 0..n {
        let act = match v.partner(j) {
            None => TopAction::Defect,
            Some(p) if p > j => TopAction::Open,
            Some(_) => TopAction::Close,
        };
        let mut next: BTreeMap<Pattern, S> = BTreeMap::new();
        for (pat, coeff) in &frontier {
            for lower in 0..2 {
                for upper in 0..2 {
                    let (np, loops) = sweep_step(pat, j, lower, upper, act);
                    let w = coeff.clone() * weights.lower[lower].clone() * weights.upper[upper].clone() * bp(loops, &mut beta_pow);
                    *next.entry(np).or_insert_with(S::zero) += w;
                }
            }
        }
        frontier = next;
    }
    let mut out: BTreeMap<Vec<i32>, S> = BTreeMap::new();
    for (pat, coeff) in frontier {
        let (res, loops) = sweep_close(&pat, n);
        *out.entry(res).or_insert_with(S::zero) += coeff * bp(loops, &mut beta_pow);
    }
    out.into_iter()
        .map(|(p, c)| {
            let partner = p.iter().map(|&x| if x < 0 { None } else { Some(x as usize) }).collect();
            (LinkState::from_partner_unchecked(partner), c)
        })
        .collect()
}

/// ρ of the double row with the given face weights, built column by column.
pub fn build_rho_sweep<S: Scalar>(basis: &LinkBasis, weights: &FaceWeights<S>, beta: &S) -> Result<SectorMatrix<S>> {
    let n = basis.n();
    if n > SWEEP_MAX_N {
        return Err(Error::Capacity(format!("frontier sweep needs N ≤ {SWEEP_MAX_N}, got N = {n}")));
    }
    let dim = basis.dim();
    let cols: Vec<Vec<(LinkState, S)>> = (0..dim).into_par_iter().map(|j| sweep_column(basis.state(j), weights, beta)).collect();
    let mut m = Mat::zeros(dim, dim);
    for (j, col) in cols.into_iter().enumerate() {
        for (w, c) in col {
            let i = basis.index_of(&w).expect("sweep produced a link state");
            m[(i, j)] += c;
        }
    }
    Ok(SectorMatrix::new(basis, m))
}

/// ρ(D_N(λ,u)) by the frontier sweep.
pub fn build_rho_dn_sweep<S: Scalar>(basis: &LinkBasis, params: &SpectralParams) -> Result<SectorMatrix<S>> {
    build_rho_sweep(basis, &FaceWeights::double_row(params), &params.beta::<S>())
}

/// ρ(F_N(λ)) by the frontier sweep over braid boxes.
pub fn build_rho_fn_sweep<S: Scalar>(basis: &LinkBasis, params: &SpectralParams) -> Result<SectorMatrix<S>> {
    build_rho_sweep(basis, &FaceWeights::braid(params), &params.beta::<S>())
}

/// The Fourier coefficients C_0, C_2, …, C_{2N} of ρ(D_N(λ, v+λ/2)) = ½C_0 + Σ C_{2i} cos(2iv),
/// returned as a list indexed by i.
pub fn fourier_coefficients<S: Scalar>(basis: &LinkBasis, params: &SpectralParams) -> Result<Vec<SectorMatrix<S>>> {
    let n = basis.n();
    let k_count = 2 * n + 1;
    let lambda = params.lambda::<S>();
    let beta = params.beta::<S>();
    let half = lambda.clone() / S::from_f64(2.0);
    let samples: Vec<(S, SectorMatrix<S>)> = (0..k_count)
        .map(|k| {
            let v = S::pi() * S::from_i64(k as i64) / S::from_i64(k_count as i64);
            let w = FaceWeights::double_row_at(&lambda, &(v.clone() + half.clone()));
            build_rho_sweep(basis, &w, &beta).map(|m| (v, m))
        })
        .collect::<Result<_>>()?;
    let dim = basis.dim();
    let norm = S::from_f64(2.0) / S::from_i64(k_count as i64);
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut acc = Mat::zeros(dim, dim);
        for (v, m) in &samples {
            let c = (S::from_i64(2 * i as i64) * v.clone()).cos();
            acc = &acc + &m.mat().scale(&c);
        }
        out.push(SectorMatrix::new(basis, acc.scale(&norm)));
    }
    Ok(out)
}

/// Evaluates ½C_0 + Σ C_{2i} cos(2iv).
pub fn fourier_sum<S: Scalar>(coeffs: &[SectorMatrix<S>], v: &S) -> Mat<S> {
    let mut acc = coeffs[0].mat().scale(&S::from_f64(0.5));
    for (i, c) in coeffs.iter().enumerate().skip(1) {
        acc = &acc + &c.mat().scale(&(S::from_i64(2 * i as i64) * v.clone()).cos());
    }
    acc
}

/// 2(−1)^d cos(λ(d+1)) = −2C_{d+1}: the value of ρ(F_N) on sector d.
pub fn fn_diagonal_value<S: Scalar>(d: usize, params: &SpectralParams) -> S {
    let c = (S::from_i64(d as i64 + 1) * params.lambda::<S>()).cos() * S::from_f64(2.0);
    if d % 2 == 0 {
        c
    } else {
        -c
    }
}

/// The matrices N_0, N_1, N_{−1}, G of the 8×8 transfer product.
pub struct EightByEight<S: Scalar> {
    pub n0: Mat<S>,
    pub n1: Mat<S>,
    pub nm1: Mat<S>,
    pub g: Mat<S>,
}

impl<S: Scalar> EightByEight<S> {
    pub fn new(params: &SpectralParams) -> Self {
        let e = params.q::<S>();
        let ei = S::one() / e.clone();
        let ei2 = ei.clone() * ei.clone();
        let o = S::zero;
        let l = S::one;
        let r = |v: [S; 8]| v.to_vec();
        let n0 = Mat::from_rows(vec![
            r([-e.clone(), l() - ei2.clone(), o(), o(), o(), o(), o(), o()]),
            r([o(), -ei.clone(), o(), l(), o(), o(), o(), o()]),
            r([-e.clone(), l() - ei.clone(), l(), o(), o(), o(), o(), o()]),
            r([o(), o(), o(), l(), o(), o(), o(), o()]),
            r([o(), o(), o(), o(), o(), o(), o(), o()]),
            r([o(), o(), o(), o(), o(), o(), o(), o()]),
            r([o(), o(), o(), o(), o(), o(), o(), o()]),
            r([o(), -ei.clone(), o(), o(), o(), o(), o(), o()]),
        ]);
        let n1 = Mat::from_rows(vec![
            r([o(), o(), o(), o(), l() - ei2, o(), o(), o()]),
            r([o(), o(), o(), o(), -ei.clone(), l(), o(), o()]),
            r([o(), o(), o(), o(), l() - ei.clone(), o(), o(), o()]),
            r([o(), o(), o(), o(), o(), l(), o(), o()]),
            r([o(), o(), o(), o(), o(), o(), l(), o()]),
            r([o(), o(), o(), o(), o(), o(), l(), o()]),
            r([o(), o(), o(), o(), o(), o(), o(), o()]),
            r([o(), o(), o(), o(), -ei, o(), o(), o()]),
        ]);
        let nm1 = Mat::from_rows(vec![
            r([o(), o(), o(), o(), o(), o(), o(), o()]),
            r([o(), o(), o(), o(), o(), o(), o(), o()]),
            r([o(), o(), o(), o(), o(), o(), o(), o()]),
            r([o(), o(), o(), o(), o(), o(), o(), o()]),
            r([-e.clone(), o(), l(), o(), o(), o(), o(), l()]),
            r([-e, l(), o(), o(), o(), o(), o(), l()]),
            r([o(), o(), o(), o(), l(), o(), o(), o()]),
            r([o(), o(), o(), o(), o(), o(), o(), o()]),
        ]);
        let g = Mat::from_rows(vec![
            r([params.beta::<S>(), l(), l(), o(), o(), o(), o(), l()]),
            r([l(), o(), l(), o(), o(), o(), o(), o()]),
            r([l(), l(), l(), l(), o(), o(), o(), o()]),
            r([o(), o(), l(), o(), o(), o(), o(), o()]),
            r([o(), o(), o(), o(), l(), l(), o(), o()]),
            r([o(), o(), o(), o(), l(), o(), o(), o()]),
            r([o(), o(), o(), o(), o(), o(), l(), o()]),
            r([l(), o(), o(), o(), o(), o(), o(), o()]),
        ]);
        EightByEight { n0, n1, nm1, g }
    }

    fn letter(&self, s: i8) -> &Mat<S> {
        match s {
            0 => &self.n0,
            1 => &self.n1,
            _ => &self.nm1,
        }
    }

    /// I^† (Π N_{η_k}) G I, accumulated as a row vector from the left.
    pub fn element(&self, word: &EtaWord) -> S {
        let mut row: Vec<S> = (0..8).map(|i| if i == 0 { S::one() } else { S::zero() }).collect();
        for &s in &word.0 {
            let m = self.letter(s);
            row = (0..8)
                .map(|j| {
                    let mut acc = S::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() {
                            acc += x.clone() * m[(k, j)].clone();
                        }
                    }
                    acc
                })
                .collect();
        }
        let mut acc = S::zero();
        for (k, x) in row.iter().enumerate() {
            acc += x.clone() * self.g[(k, 0)].clone();
        }
        acc
    }

    /// Largest entry of (N_1)³ and (N_{−1})³; both vanish identically.
    pub fn nilpotency_residual(&self) -> f64 {
        self.n1.pow(3).max_abs().max(self.nm1.pow(3).max_abs())
    }

    /// Largest entry of N_k G − G N_{−k}^† over k ∈ {−1, 0, 1}.
    pub fn mirror_residual(&self) -> f64 {
        [(0, 0), (1, -1), (-1, 1)]
            .iter()
            .map(|&(k, mk)| (&(self.letter(k) * &self.g) - &(&self.g * &self.letter(mk).adjoint())).max_abs())
            .fold(0.0, f64::max)
    }
}

/// ⟨w|ρ(F_r) v^r⟩ from the 8×8 product over the η-word of w.
pub fn fn_element_8x8<S: Scalar>(word: &EtaWord, params: &SpectralParams) -> Result<S> {
    let mut depth: i64 = 0;
    for &s in &word.0 {
        if !(-1..=1).contains(&s) {
            return invalid(format!("η symbol {s} not in {{-1,0,1}}"));
        }
        depth += s as i64;
        if depth < 0 {
            return invalid("η-word closes an arc that was never opened");
        }
    }
    if depth != 0 {
        return invalid("η-word leaves arcs open");
    }
    Ok(EightByEight::new(params).element(word))
}

/// W(*): the 2×2 factor for the interior of a 2-bubble.
fn star_matrix<S: Scalar>() -> [[S; 2]; 2] {
    [[S::one(), S::zero()], [S::one(), S::zero()]]
}

/// ⟨w|ρ(F_r) v^r⟩ from the 2×2 product over the μ-word of w.
pub fn fn_element_2x2<S: Scalar>(word: &MuWord, params: &SpectralParams) -> Result<S> {
    let toks = &word.0;
    let count = |t: &MuToken| match *t {
        MuToken::Count(m) => Ok(m as i64),
        MuToken::Star { .. } => invalid("misplaced * in μ-word"),
    };
    let first = count(toks.first().ok_or_else(|| Error::InvalidArgument("empty μ-word".into()))?)?;
    if toks.len() == 1 {
        // No bubble: the product degenerates to the pure-defect diagonal element.
        return Ok(fn_diagonal_value(first as usize, params));
    }
    let t = params.trig::<S>();
    let two = S::from_f64(2.0);
    let sh = t.s_half(1);
    let v = |m: i64| [two.clone() * t.s_half(2 * m), two.clone() * t.s_half(m - 1) * t.s_half(m) / sh.clone()];
    let w_mat = |m: i64| {
        [
            [t.s_half(2 * m - 1) / sh.clone(), t.s_half(m) * t.s_half(m - 2) / (sh.clone() * sh.clone())],
            [two.clone() * t.c(m - 1), t.s_half(2 * m - 3) / sh.clone()],
        ]
    };
    let star = star_matrix::<S>();
    let mut row = v(first);
    for tok in &toks[1..toks.len() - 1] {
        let m = match *tok {
            MuToken::Count(m) => w_mat(m as i64),
            MuToken::Star { .. } => star.clone(),
        };
        row = [
            row[0].clone() * m[0][0].clone() + row[1].clone() * m[1][0].clone(),
            row[0].clone() * m[0][1].clone() + row[1].clone() * m[1][1].clone(),
        ];
    }
    // G' = [[1,1],[1,0]]
    let row = [row[0].clone() + row[1].clone(), row[0].clone()];
    let last = v(count(toks.last().unwrap())?);
    Ok(row[0].clone() * last[0].clone() + row[1].clone() * last[1].clone())
}

/// ρ(F_N) assembled from pure-defect columns: arcs of a basis state pass through the
/// braid rows unchanged, so the column of v is the column of v^d on its defects, with the
/// arcs of v put back. Pure-defect columns come from the 8×8 product.
pub fn fn_column_recursive<S: Scalar>(basis: &LinkBasis, params: &SpectralParams) -> Result<SectorMatrix<S>> {
    let dim = basis.dim();
    let mut cache: HashMap<usize, Vec<(LinkState, S)>> = HashMap::new();
    let engine = EightByEight::<S>::new(params);
    let mut m = Mat::zeros(dim, dim);
    for (j, v) in basis.states().iter().enumerate() {
        let d = v.defects();
        let col = cache.entry(d).or_insert_with(|| {
            if d == 0 {
                return vec![(LinkState::from_partner_unchecked(vec![]), engine.element(&EtaWord(vec![])))];
            }
            LinkBasis::new(d)
                .expect("d ≥ 1")
                .states()
                .iter()
                .map(|w| (w.clone(), engine.element(&eta_encode(w))))
                .filter(|(_, x)| !x.is_zero())
                .collect()
        });
        for (w, x) in col.iter() {
            let target = v.reinsert(w);
            let i = basis.index_of(&target).expect("reinsertion yields a basis state");
            m[(i, j)] += x.clone();
        }
    }
    Ok(SectorMatrix::new(basis, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link_rep::rho;
    use crate::linkspace::parse_link_notation;
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn star_factor_is_idempotent() {
        let w = star_matrix::<Complex64>();
        let sq = Mat::from_rows(w.iter().map(|r| r.to_vec()).collect());
        assert_eq!(&sq * &sq, sq);
    }

    #[test]
    fn n2_coefficients() {
        let p = SpectralParams::real(0.9, 0.35);
        let d = build_dn_brute::<Complex64>(2, &p).unwrap();
        let (s, t) = (c(p.u.sin()), c((0.9f64 - 0.35).sin()));
        let beta = p.beta_c64();
        let e1 = Connectivity::generator(1, 2).unwrap();
        let id = Connectivity::identity(2);
        let ce1 = beta * 2.0 * (s.powi(3) * t + s * t.powi(3)) + (c(4.0) + beta * beta) * s * s * t * t;
        let cid = beta * (s.powi(4) + s * s * t * t + t.powi(4)) + c(2.0) * (s.powi(3) * t + s * t.powi(3));
        assert!((d.coeff(&e1) - ce1).norm() < 1e-12, "{} vs {}", d.coeff(&e1), ce1);
        assert!((d.coeff(&id) - cid).norm() < 1e-12, "{} vs {}", d.coeff(&id), cid);
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn sweep_matches_brute_small() {
        for n in 1..=5 {
            let p = SpectralParams::real(0.77, 0.21);
            let b = LinkBasis::new(n).unwrap();
            let brute = rho(&build_dn_brute::<Complex64>(n, &p).unwrap(), &b, &p).unwrap();
            let sweep = build_rho_dn_sweep::<Complex64>(&b, &p).unwrap();
            assert!(sweep.mat().rel_dev(brute.mat()) < 1e-12, "N={n}");
        }
    }

    #[test]
    fn appendix_b_example() {
        for lam in [0.3, 0.7, 1.1] {
            let p = SpectralParams::real(lam, 0.0);
            let w = parse_link_notation("2", 4).unwrap();
            let x: Complex64 = fn_element_8x8(&eta_encode(&w), &p).unwrap();
            let expect = -32.0 * lam.cos() * lam.sin().powi(2) * (lam / 2.0).sin().powi(2);
            assert!((x - c(expect)).norm() < 1e-12 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn eight_by_eight_identities() {
        let p = SpectralParams::real(0.61, 0.0);
        let e = EightByEight::<Complex64>::new(&p);
        assert!(e.nilpotency_residual() < 1e-14);
        assert!(e.mirror_residual() < 1e-14);
    }

    #[test]
    fn capacity_limits() {
        let p = SpectralParams::real(0.5, 0.1);
        assert!(matches!(build_dn_brute::<Complex64>(9, &p), Err(Error::Capacity(_))));
    }

    #[test]
    fn braid_three_ways_agree() {
        let p = SpectralParams::real(0.83, 0.0);
        for n in 1..=6 {
            let b = LinkBasis::new(n).unwrap();
            let brute = rho(&build_fn_direct::<Complex64>(n, &p).unwrap(), &b, &p).unwrap();
            let sweep = build_rho_fn_sweep::<Complex64>(&b, &p).unwrap();
            let rec = fn_column_recursive::<Complex64>(&b, &p).unwrap();
            assert!(sweep.mat().rel_dev(brute.mat()) < 1e-12, "sweep N={n}");
            assert!(rec.mat().rel_dev(brute.mat()) < 1e-12, "recursive N={n}");
        }
    }

    #[test]
    fn two_by_two_matches_eight_by_eight() {
        let p = SpectralParams::real(0.47, 0.0);
        for n in 1..=8 {
            for w in LinkBasis::new(n).unwrap().states() {
                let Some(mu) = crate::linkspace::mu_encode(w) else { continue };
                let a: Complex64 = fn_element_2x2(&mu, &p).unwrap();
                let b: Complex64 = fn_element_8x8(&eta_encode(w), &p).unwrap();
                assert!((a - b).norm() < 1e-10 * b.norm().max(1.0), "{w}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn fourier_reconstructs_and_top_mode_is_braid() {
        let p = SpectralParams::real(0.71, 0.0);
        for n in 1..=5 {
            let b = LinkBasis::new(n).unwrap();
            let coeffs = fourier_coefficients::<Complex64>(&b, &p).unwrap();
            let v = 0.377;
            let direct = build_rho_dn_sweep::<Complex64>(&b, &p.with_u(v + 0.355)).unwrap();
            assert!(fourier_sum(&coeffs, &c(v)).rel_dev(direct.mat()) < 1e-12, "N={n}");
            let f = build_rho_fn_sweep::<Complex64>(&b, &p).unwrap();
            let scaled = f.mat().scale(&c(2f64.powi(1 - 2 * n as i32)));
            assert!(coeffs[n].mat().rel_dev(&scaled) < 1e-12, "C_2N N={n}");
        }
    }
}
