//! Wenzl-Jones projectors, the arc-dressed sector projectors P^d, the closed forms and
//! recursions for the top-column coefficients P^r_w, and the singularity predicate.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::link_rep::{apply_connectivity, SectorMatrix};
use crate::linkspace::{LinkBasis, LinkState};
use crate::matrix::Mat;
use crate::params::{gcd, SpectralParams, Trig};
use crate::scalar::{Scalar, XComplex};
use crate::tl_algebra::{Connectivity, TLElement};

/// Sparse vector in the link basis.
pub type LinkVector<S> = BTreeMap<LinkState, S>;

/// The first k ≤ d with S_k = sin(kΛ) = 0, k ≥ 2; such a zero makes WJ_d undefined.
pub fn first_vanishing_sine(d: usize, params: &SpectralParams) -> Option<usize> {
    let trig = params.trig::<Complex64>();
    (2..=d).find(|&k| {
        if params.ab().is_some() && params.shift == 0.0 {
            params.half_sine_vanishes(2 * k as i64)
        } else {
            trig.s(k as i64).norm() < 1e-14
        }
    })
}

fn ensure_regular(d: usize, params: &SpectralParams) -> Result<()> {
    match first_vanishing_sine(d, params) {
        Some(k) => Err(Error::SingularParameter(format!(
            "S_{k} = sin({k}Λ) vanishes at λ = {}, so WJ_{d} is undefined",
            params.lambda
        ))),
        None => Ok(()),
    }
}

/// WJ_N as a TL element, from WJ_k = WJ_{k−1} + (S_{k−1}/S_k) WJ_{k−1} e_{k−1} WJ_{k−1}.
pub fn build_wj<S: Scalar>(n: usize, params: &SpectralParams) -> Result<TLElement<S>> {
    if n == 0 {
        return invalid("N must be at least 1");
    }
    ensure_regular(n, params)?;
    let beta = params.beta::<S>();
    let trig = params.trig::<S>();
    let mut wj = TLElement::<S>::identity(1);
    for k in 2..=n {
        // Work in TL_k, with WJ_{k−1} acting on the first k−1 sites.
        let prev = embed_into(&wj, k);
        let e = TLElement::generator(k - 1, k)?;
        let c = trig.s(k as i64 - 1) / trig.s(k as i64);
        let middle = prev.mul(&e, &beta).mul(&prev, &beta);
        wj = prev.add(&middle.scale(&c));
    }
    Ok(wj)
}

/// Extends a connectivity on k sites to n ≥ k sites by straight strands on the right.
fn embed_connectivity(c: &Connectivity, n: usize) -> Connectivity {
    let k = c.n();
    let map = |p: usize| if p < k { p } else { p - k + n };
    let mut partner = vec![0; 2 * n];
    for p in 0..2 * k {
        partner[map(p)] = map(c.partner(p));
    }
    for j in k..n {
        partner[j] = n + j;
        partner[n + j] = j;
    }
    Connectivity::from_partner_unchecked(n, partner)
}

fn embed_into<S: Scalar>(x: &TLElement<S>, n: usize) -> TLElement<S> {
    let mut out = TLElement::zero(n);
    for (c, coeff) in x.terms() {
        out.add_term(embed_connectivity(c, n), coeff.clone());
    }
    out
}

/// Applies (1 + c e) to a sparse vector.
fn apply_factor<S: Scalar>(vec: &LinkVector<S>, gen: &Connectivity, c: &S, beta: &S) -> LinkVector<S> {
    let mut out = vec.clone();
    for (w, x) in vec {
        let (w2, loops) = apply_connectivity(gen, w).expect("sizes agree");
        let add = x.clone() * c.clone() * beta.powi(loops as i32);
        *out.entry(w2).or_insert_with(S::zero) += add;
    }
    out.retain(|_, x| !x.is_zero());
    out
}

/// ρ(WJ_d) applied to a vector on d points, as the ordered product
/// WJ_d = X_2 X_3 ⋯ X_d with X_k = (1 + c_{k−1} e_{k−1}) ⋯ (1 + c_1 e_1), c_j = S_j/S_{j+1}.
pub fn apply_wj<S: Scalar>(vec: &LinkVector<S>, d: usize, params: &SpectralParams) -> Result<LinkVector<S>> {
    ensure_regular(d, params)?;
    let beta = params.beta::<S>();
    let trig = params.trig::<S>();
    let coeffs: Vec<S> = (0..d).map(|j| if j == 0 { S::zero() } else { trig.s(j as i64) / trig.s(j as i64 + 1) }).collect();
    let gens: Vec<Connectivity> = (0..d).map(|j| if j == 0 { Connectivity::identity(d) } else { Connectivity::generator(j, d).unwrap() }).collect();
    let mut out = vec.clone();
    for k in (2..=d).rev() {
        for j in 1..k {
            out = apply_factor(&out, &gens[j], &coeffs[j], &beta);
        }
    }
    Ok(out)
}

/// ρ(WJ_d) v^d: the top column of the projector, indexed by states of B_d.
pub fn wj_top_column<S: Scalar>(d: usize, params: &SpectralParams) -> Result<LinkVector<S>> {
    let mut v = LinkVector::new();
    v.insert(LinkState::all_defects(d), S::one());
    apply_wj(&v, d, params)
}

/// P^d v for a basis state v with d defects: arcs removed, WJ_d applied to the defects,
/// arcs put back.
#[derive(Clone, Debug)]
pub struct ProjectedState<S: Scalar> {
    pub source: LinkState,
    pub expansion: LinkVector<S>,
}

impl<S: Scalar> ProjectedState<S> {
    pub fn from_top_column(v: &LinkState, column: &LinkVector<S>) -> Self {
        let expansion = column.iter().map(|(w, x)| (v.reinsert(w), x.clone())).collect();
        ProjectedState { source: v.clone(), expansion }
    }

    pub fn coeff(&self, w: &LinkState) -> S {
        self.expansion.get(w).cloned().unwrap_or_else(S::zero)
    }

    /// Dense column in the given basis.
    pub fn to_dense(&self, basis: &LinkBasis) -> Vec<S> {
        let mut out = vec![S::zero(); basis.dim()];
        for (w, x) in &self.expansion {
            out[basis.index_of(w).expect("state of the basis")] += x.clone();
        }
        out
    }

    pub fn to_json(&self) -> ProjectedStateJson {
        ProjectedStateJson {
            source: self.source.to_signed(),
            expansion: self
                .expansion
                .iter()
                .map(|(w, x)| {
                    let z = x.to_c64();
                    (w.to_signed(), [z.re, z.im])
                })
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct ProjectedStateJson {
    pub source: Vec<i64>,
    pub expansion: Vec<(Vec<i64>, [f64; 2])>,
}

pub fn apply_pd<S: Scalar>(v: &LinkState, params: &SpectralParams) -> Result<ProjectedState<S>> {
    let column = wj_top_column::<S>(v.defects(), params)?;
    Ok(ProjectedState::from_top_column(v, &column))
}

/// Critical-λ limit of P^d v, taken over λ ± ε. The limit is declared to exist when the
/// linearly extrapolated one-sided values (from ε and ε/2) agree to `agree` relative.
pub fn limit_pd(v: &LinkState, params: &SpectralParams, eps: f64, agree: f64) -> Result<ProjectedState<Complex64>> {
    let at = |shift: f64| -> Result<ProjectedState<Complex64>> { apply_pd(v, &params.with_shift(params.shift + shift)) };
    let (p1, p2, m1, m2) = (at(eps)?, at(eps / 2.0)?, at(-eps)?, at(-eps / 2.0)?);
    let mut keys: Vec<LinkState> = p1.expansion.keys().chain(m1.expansion.keys()).cloned().collect();
    keys.sort();
    keys.dedup();
    let mut expansion = LinkVector::new();
    let mut worst: f64 = 0.0;
    for w in keys {
        let right = p2.coeff(&w) * 2.0 - p1.coeff(&w);
        let left = m2.coeff(&w) * 2.0 - m1.coeff(&w);
        let mid = (right + left) * 0.5;
        worst = worst.max((right - left).norm() / mid.norm().max(1.0));
        if mid.norm() > 1e-12 {
            expansion.insert(w, mid);
        }
    }
    if worst > agree {
        return Err(Error::SingularParameter(format!(
            "P^{} {} has no finite limit at λ = {} (one-sided values differ by {worst:.3e})",
            v.defects(),
            v,
            params.lambda
        )));
    }
    Ok(ProjectedState { source: v.clone(), expansion })
}

/// The basis PB_N = {P^{d(v)} v : v ∈ B_N}.
pub fn build_pb_basis<S: Scalar>(basis: &LinkBasis, params: &SpectralParams) -> Result<Vec<ProjectedState<S>>> {
    let failing: Vec<usize> = basis.sectors().iter().copied().filter(|&d| first_vanishing_sine(d, params).is_some()).collect();
    if !failing.is_empty() {
        return Err(Error::SingularParameter(format!("P^d undefined at λ = {} for sectors d = {failing:?}", params.lambda)));
    }
    let mut columns: BTreeMap<usize, LinkVector<S>> = BTreeMap::new();
    for &d in basis.sectors() {
        columns.insert(d, wj_top_column(d, params)?);
    }
    Ok(basis.states().iter().map(|v| ProjectedState::from_top_column(v, &columns[&v.defects()])).collect())
}

/// Change-of-basis matrix whose columns are the PB_N vectors.
pub fn pb_matrix<S: Scalar>(basis: &LinkBasis, pb: &[ProjectedState<S>]) -> Mat<S> {
    let mut m = Mat::zeros(basis.dim(), basis.dim());
    for (j, p) in pb.iter().enumerate() {
        m.set_column(j, &p.to_dense(basis));
    }
    m
}

/// P^{-1} A P for a sector matrix A and the PB_N change of basis P.
pub fn conjugate_by_pb<S: Scalar>(a: &SectorMatrix<S>, p: &Mat<S>) -> Result<Mat<S>> {
    let ap = a.mat() * p;
    let mut out = Mat::zeros(ap.rows(), ap.cols());
    for j in 0..ap.cols() {
        let x = p.solve(&ap.column(j)).ok_or_else(|| Error::Degenerate("PB_N change of basis is singular".into()))?;
        out.set_column(j, &x);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------------------
// Top-column coefficients P^r_w = ⟨w | P^r v^r⟩ from closed forms and recursions.

/// 4 S_{1/2} C_{r/2} C_{(r−1)/2}, the denominator of the left-shift recursion.
fn shift_denominator<S: Scalar>(t: &Trig<S>, r: i64) -> S {
    S::from_f64(4.0) * t.s_half(1) * t.c_half(r) * t.c_half(r - 1)
}

/// P^r_{1} = S_{(r−1)/2} / (2 S_{1/2} C_{r/2}).
pub fn p_first_bubble<S: Scalar>(r: usize, params: &SpectralParams) -> S {
    let t = params.trig::<S>();
    let r = r as i64;
    t.s_half(r - 1) / (S::from_f64(2.0) * t.s_half(1) * t.c_half(r))
}

/// P^r_{n} = S_{(r−n)/2} S_{n/2} / (2 S_{1/2}² C_{r/2}), a single bubble at label n.
pub fn p_single_bubble<S: Scalar>(r: usize, n: usize, params: &SpectralParams) -> S {
    let t = params.trig::<S>();
    let (r, n) = (r as i64, n as i64);
    let sh = t.s_half(1);
    t.s_half(r - n) * t.s_half(n) / (S::from_f64(2.0) * sh.clone() * sh * t.c_half(r))
}

/// The recursion P^r_{n} = P^{r−1}_{n−1} + S_{r−n}/(4 S_{1/2} C_{r/2} C_{(r−1)/2}), with P^{r−1}_{0} = 0.
pub fn p_single_bubble_recursive<S: Scalar>(r: usize, n: usize, params: &SpectralParams) -> S {
    if n == 0 {
        return S::zero();
    }
    let t = params.trig::<S>();
    p_single_bubble_recursive::<S>(r - 1, n - 1, params) + t.s((r - n) as i64) / shift_denominator(&t, r as i64)
}

/// P^r_{m^m} = (2 S_{1/2})^{−m} Π_{i<m} S_{(r−m−i)/2} / C_{(r−i)/2}.
pub fn p_concentric<S: Scalar>(r: usize, m: usize, params: &SpectralParams) -> S {
    let t = params.trig::<S>();
    let (r, m) = (r as i64, m as i64);
    let mut acc = (S::from_f64(2.0) * t.s_half(1)).powi(-(m as i32));
    for i in 0..m {
        acc *= t.s_half(r - m - i) / t.c_half(r - i);
    }
    acc
}

/// P^r_{m^m} = S_{r−m} / (4 C_{r/2} C_{(r−1)/2} S_{1/2}) · P^{r−2}_{(m−1)^{m−1}}.
pub fn p_concentric_recursive<S: Scalar>(r: usize, m: usize, params: &SpectralParams) -> S {
    if m == 0 {
        return S::one();
    }
    let t = params.trig::<S>();
    t.s((r - m) as i64) / shift_denominator(&t, r as i64) * p_concentric_recursive::<S>(r - 2, m - 1, params)
}

/// P^r_{n^m}: m concentric arcs centred on label n.
pub fn p_nested<S: Scalar>(r: usize, n: usize, m: usize, params: &SpectralParams) -> S {
    let t = params.trig::<S>();
    let (r, n, m) = (r as i64, n as i64, m as i64);
    let mut acc = (S::from_f64(2.0) * t.s_half(1)).powi(-(m as i32));
    for i in 0..m {
        acc *= t.s_half(r - n - i) * t.s_half(n - i) / (t.c_half(r - i) * t.s_half(i + 1));
    }
    acc
}

/// The state {n^m} on r points: m concentric arcs around label n, defects elsewhere.
pub fn nested_state(r: usize, n: usize, m: usize) -> Result<LinkState> {
    if m > n || n + m > r {
        return invalid(format!("{m} arcs around label {n} do not fit on {r} points"));
    }
    let arcs: Vec<(usize, usize)> = (0..m).map(|i| (n - 1 - i, n + i)).collect();
    LinkState::from_arcs(r, &arcs)
}

/// Left-shift recursion P^r_w = P^{r−1}_{←w} + Σ_j S_{r−n_j} P^{r−2}_{w∖j} / (4 S_{1/2} C_{r/2} C_{(r−1)/2}),
/// memoized over the states met.
pub struct LeftShift<S: Scalar> {
    trig: Trig<S>,
    memo: BTreeMap<LinkState, S>,
}

impl<S: Scalar> LeftShift<S> {
    pub fn new(params: &SpectralParams) -> Self {
        LeftShift { trig: params.trig::<S>(), memo: BTreeMap::new() }
    }

    pub fn coeff(&mut self, w: &LinkState) -> S {
        if w.num_arcs() == 0 {
            return S::one();
        }
        if let Some(x) = self.memo.get(w) {
            return x.clone();
        }
        let r = w.n() as i64;
        let mut acc = match w.shift_left() {
            Some(shifted) => self.coeff(&shifted),
            None => S::zero(),
        };
        let mut sum = S::zero();
        for i in w.one_bubbles() {
            let label = i as i64 + 1;
            sum += self.trig.s(r - label) * self.coeff(&w.remove_bubble(i));
        }
        acc += sum / shift_denominator(&self.trig, r);
        self.memo.insert(w.clone(), acc.clone());
        acc
    }
}

/// A run of arcs uninterrupted by defects: its first point and the half-widths k_i of its
/// arcs, ordered by left endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcCluster {
    pub start: usize,
    pub widths: Vec<usize>,
}

/// The clusters of w, left to right.
pub fn arc_clusters(w: &LinkState) -> Vec<ArcCluster> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < w.n() {
        if w.is_defect(i) {
            i += 1;
            continue;
        }
        let start = i;
        let mut widths = Vec::new();
        while i < w.n() && !w.is_defect(i) {
            // Every point of the run either opens or closes an arc.
            i += 1;
        }
        for p in start..i {
            if let Some(q) = w.partner(p) {
                if q > p {
                    widths.push((q - p + 1) / 2);
                }
            }
        }
        out.push(ArcCluster { start, widths });
    }
    out
}

/// Replaces every cluster by the same number of concentric arcs (`concentric`) or of
/// adjacent 1-bubbles (otherwise).
pub fn replace_clusters(w: &LinkState, concentric: bool) -> LinkState {
    let mut arcs = Vec::new();
    for cl in arc_clusters(w) {
        let m = cl.widths.len();
        for i in 0..m {
            if concentric {
                arcs.push((cl.start + i, cl.start + 2 * m - 1 - i));
            } else {
                arcs.push((cl.start + 2 * i, cl.start + 2 * i + 1));
            }
        }
    }
    LinkState::from_arcs(w.n(), &arcs).expect("clusters keep their span")
}

/// Cluster replacement: P^r_w = Π_j Π_i (S_i / S_{k_{i,j}}) · P^r_u with u concentric per cluster.
/// Returns u and the prefactor.
pub fn cluster_replacement<S: Scalar>(w: &LinkState, params: &SpectralParams) -> (LinkState, S) {
    let t = params.trig::<S>();
    let mut factor = S::one();
    for cl in arc_clusters(w) {
        for (i, &k) in cl.widths.iter().enumerate() {
            factor *= t.s(i as i64 + 1) / t.s(k as i64);
        }
    }
    (replace_clusters(w, true), factor)
}

/// Coefficients α_i with P^r_w = Σ_i α_i P^r_{i^i}, from cluster replacement followed by
/// moving 1-bubbles to the leftmost available positions.
pub fn alpha_expansion<S: Scalar>(w: &LinkState, params: &SpectralParams) -> BTreeMap<usize, S> {
    let t = params.trig::<S>();
    // P_w = Π S_1/S_k · P_{w'} with w' made of 1-bubbles only.
    let mut factor = S::one();
    for cl in arc_clusters(w) {
        for &k in &cl.widths {
            factor *= t.s(1) / t.s(k as i64);
        }
    }
    let ones = replace_clusters(w, false);
    let labels: Vec<usize> = ones.arcs().iter().map(|&(i, _)| i + 1).collect();
    let mut out = expand_bubbles::<S>(&labels, &t);
    for x in out.values_mut() {
        *x *= factor.clone();
    }
    out
}

fn expand_bubbles<S: Scalar>(labels: &[usize], t: &Trig<S>) -> BTreeMap<usize, S> {
    let mut labels = labels.to_vec();
    labels.sort_unstable();
    let k = labels.len();
    match (0..k).find(|&i| labels[i] != 2 * i + 1) {
        None => {
            // P_{1,3,…,2k−1} = Π_{j≤k} (S_j/S_1) P_{k^k}
            let mut x = S::one();
            for j in 1..=k {
                x *= t.s(j as i64) / t.s(1);
            }
            BTreeMap::from([(k, x)])
        }
        Some(i) => {
            let b = i as i64 + 1;
            let n = labels[i] as i64;
            let mut moved = labels.clone();
            moved[i] = 2 * i + 1;
            let mut removed = labels.clone();
            removed.remove(i);
            let c1 = t.s(n - b + 1) / t.s(b);
            let c2 = t.s_half(n - 2 * b + 2) * t.s_half(n - 2 * b + 1) / (t.s_half(1) * t.s(1));
            let mut out = expand_bubbles(&moved, t);
            for x in out.values_mut() {
                *x *= c1.clone();
            }
            for (key, x) in expand_bubbles(&removed, t) {
                *out.entry(key).or_insert_with(S::zero) -= c2.clone() * x;
            }
            out
        }
    }
}

/// P^r_w from the α-expansion over the concentric closed forms.
pub fn p_via_alpha<S: Scalar>(w: &LinkState, params: &SpectralParams) -> S {
    let r = w.n();
    let mut acc = S::zero();
    for (i, a) in alpha_expansion::<S>(w, params) {
        acc += a * p_concentric::<S>(r, i, params);
    }
    acc
}

/// P^r_w from the closed forms and recursions, never building WJ_r.
/// Poles (vanishing C_{(r−i)/2}, i < number of arcs) are reported as singular when λ is rational.
pub fn pr_coeff_formula<S: Scalar>(w: &LinkState, params: &SpectralParams) -> Result<S> {
    let r = w.n();
    let k = w.num_arcs();
    if params.ab().is_some() && params.shift == 0.0 {
        if let Some(i) = (0..k).find(|&i| params.half_cosine_vanishes((r - i) as i64)) {
            return Err(Error::SingularParameter(format!(
                "C_{{({}-{i})/2}} = cos(({r}-{i})Λ/2) vanishes: P^{r}_w has a pole at λ = {}",
                r, params.lambda
            )));
        }
    }
    if k == 0 {
        return Ok(S::one());
    }
    let arcs = w.arcs();
    // m concentric arcs around one label, defects elsewhere.
    let (i0, j0) = arcs[0];
    let centred = arcs.iter().enumerate().all(|(i, &(a, b))| i0 >= i && a == i0 - i && b == j0 + i);
    if j0 == i0 + 1 && centred {
        let n = i0 + 1;
        return Ok(match (k, n) {
            (1, 1) => p_first_bubble(r, params),
            (1, _) => p_single_bubble(r, n, params),
            (_, n) if n == k => p_concentric(r, k, params),
            _ => p_nested(r, n, k, params),
        });
    }
    Ok(LeftShift::new(params).coeff(w))
}

// ---------------------------------------------------------------------------------------
// Singularity predicate and Laurent split at critical λ.

/// Jordan links between sectors d > d' of ρ(F_N) at Λ = aπ/b: a odd, d − d' < 2b and
/// (d + d')/2 ≡ b − 1 (mod 2b).
pub fn jordan_condition(d: usize, d_prime: usize, a: i64, b: i64) -> Result<bool> {
    if b == 0 || gcd(a, b) != 1 {
        return invalid(format!("a/b = {a}/{b} is not a reduced fraction"));
    }
    let b = b.abs();
    if a.rem_euclid(2) == 0 || d <= d_prime || (d - d_prime) % 2 != 0 {
        return Ok(false);
    }
    let (d, dp) = (d as i64, d_prime as i64);
    Ok(d - dp < 2 * b && ((d + dp) / 2).rem_euclid(2 * b) == b - 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub d: usize,
    pub d_prime: Option<usize>,
    pub a: i64,
    pub b: i64,
    pub singular: bool,
}

/// Whether P^d is singular at Λ = aπ/b, with its Jordan partner d' (the largest one below d).
pub fn singularity_report(d: usize, n: usize, a: i64, b: i64) -> Result<SingularityReport> {
    if d > n || (n - d) % 2 != 0 {
        return invalid(format!("sector d = {d} does not occur for N = {n}"));
    }
    let mut d_prime = None;
    for dp in (0..d).rev() {
        if (d - dp) % 2 == 0 && jordan_condition(d, dp, a, b)? {
            d_prime = Some(dp);
            break;
        }
    }
    Ok(SingularityReport { d, d_prime, a, b, singular: d_prime.is_some() })
}

/// All predicted (d, d') links for sizes up to N.
pub fn predicted_links(n: usize, a: i64, b: i64) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for d in (n % 2..=n).step_by(2) {
        for dp in (n % 2..d).step_by(2) {
            if jordan_condition(d, dp, a, b)? {
                out.push((d, dp));
            }
        }
    }
    Ok(out)
}

/// P^d(q) v = r(q) + s/(q − q_c) near a critical q_c, split into the regular part at q_c
/// and the residue.
#[derive(Clone, Debug)]
pub struct LaurentSplit {
    pub source: LinkState,
    pub d: usize,
    pub d_prime: usize,
    pub regular: Vec<Complex64>,
    pub residue: Vec<Complex64>,
    pub residue_norm: f64,
    pub extended_precision: bool,
    pub warnings: Vec<String>,
}

fn split_at<S: Scalar>(v: &LinkState, basis: &LinkBasis, params: &SpectralParams, eps: f64) -> Result<(Vec<S>, Vec<S>, f64)> {
    let qc = params.q::<S>();
    let eval = |shift: f64| -> Result<(Vec<S>, S)> {
        let p = params.with_shift(shift);
        Ok((apply_pd::<S>(v, &p)?.to_dense(basis), p.q::<S>() - qc.clone()))
    };
    let (fp, dp) = eval(eps)?;
    let (fm, dm) = eval(-eps)?;
    let denom = S::one() / dp.clone() - S::one() / dm.clone();
    let s: Vec<S> = fp.iter().zip(&fm).map(|(a, b)| (a.clone() - b.clone()) / denom.clone()).collect();
    let r: Vec<S> = (0..fp.len())
        .map(|i| {
            let a = fp[i].clone() - s[i].clone() / dp.clone();
            let b = fm[i].clone() - s[i].clone() / dm.clone();
            (a + b) / S::from_f64(2.0)
        })
        .collect();
    let cond = fp.iter().map(|x| x.norm()).fold(0.0, f64::max) / eps;
    Ok((r, s, cond))
}

fn richardson<S: Scalar>(coarse: &[S], fine: &[S]) -> Vec<Complex64> {
    coarse
        .iter()
        .zip(fine)
        .map(|(c, f)| ((f.clone() * S::from_f64(4.0) - c.clone()) / S::from_f64(3.0)).to_c64())
        .collect()
}

/// Laurent split of P^d v at a critical λ given as a rational multiple of π.
pub fn laurent_split(v: &LinkState, basis: &LinkBasis, params: &SpectralParams, eps: f64) -> Result<LaurentSplit> {
    let (a, b) = params.ab().ok_or_else(|| Error::InvalidArgument("Laurent split needs λ as a rational multiple of π".into()))?;
    let d = v.defects();
    let report = singularity_report(d, v.n(), a, b)?;
    let d_prime = match report.d_prime {
        Some(dp) => dp,
        None => return invalid(format!("P^{d} is not singular at Λ = {a}π/{b}")),
    };
    let (r1, s1, cond) = split_at::<Complex64>(v, basis, params, eps)?;
    let (regular, residue, extended) = if cond > 1e8 {
        let (r1, s1, _) = split_at::<XComplex>(v, basis, params, eps)?;
        let (r2, s2, _) = split_at::<XComplex>(v, basis, params, eps / 2.0)?;
        (richardson(&r1, &r2), richardson(&s1, &s2), true)
    } else {
        let (r2, s2, _) = split_at::<Complex64>(v, basis, params, eps / 2.0)?;
        (richardson(&r1, &r2), richardson(&s1, &s2), false)
    };
    let scale = regular.iter().map(|x| x.norm()).fold(1.0, f64::max);
    let residue_norm = residue.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut warnings = Vec::new();
    if residue_norm < 1e-8 * scale {
        warnings.push(format!("residue {residue_norm:.3e} is below 1e-8 of the regular part: numerically degenerate"));
    }
    Ok(LaurentSplit { source: v.clone(), d, d_prime, regular, residue, residue_norm, extended_precision: extended, warnings })
}

/// Checks (F − μ_d) r̂ = α ŝ and (F − μ_d) ŝ = 0 on the sector window [d', d].
/// Returns α and the largest residual relative to the size of (F − μ_d) r̂.
pub fn jordan_relation(split: &LaurentSplit, f: &SectorMatrix<Complex64>, mu: Complex64) -> (Complex64, f64) {
    let range = f.sector_span(split.d_prime, split.d);
    let window = f.sector_window(split.d_prime, split.d);
    let r: Vec<Complex64> = split.regular[range.clone()].to_vec();
    let s: Vec<Complex64> = split.residue[range].to_vec();
    let shifted = |x: &[Complex64]| -> Vec<Complex64> {
        let fx = window.mul_vec(x);
        fx.iter().zip(x).map(|(a, b)| a - mu * b).collect()
    };
    let fr = shifted(&r);
    let fs = shifted(&s);
    let ss: f64 = s.iter().map(|x| x.norm_sqr()).sum();
    let alpha = if ss > 0.0 { s.iter().zip(&fr).map(|(a, b)| a.conj() * b).sum::<Complex64>() / ss } else { Complex64::new(0.0, 0.0) };
    let scale = fr.iter().map(|x| x.norm()).fold(1e-300, f64::max);
    let res1 = fr.iter().zip(&s).map(|(a, b)| (a - alpha * b).norm()).fold(0.0, f64::max);
    let res2 = fs.iter().map(|x| x.norm()).fold(0.0, f64::max) / s.iter().map(|x| x.norm()).fold(1e-300, f64::max);
    (alpha, (res1 / scale).max(res2))
}
