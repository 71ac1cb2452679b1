//! Sector-resolved spectra, Jordan structure from rank sequences, and simultaneous
//! generalized eigenspaces of commuting families.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::link_rep::SectorMatrix;
use crate::matrix::Mat;
use crate::scalar::{Precision, Scalar};

/// Eigenvalues of each diagonal block, keyed by defect number.
pub fn sector_spectrum<S: Scalar>(m: &SectorMatrix<S>) -> BTreeMap<usize, Vec<Complex64>> {
    m.sectors()
        .iter()
        .map(|&d| {
            let mut ev = m.diagonal_block(d).to_c64().eigenvalues();
            sort_complex(&mut ev);
            (d, ev)
        })
        .collect()
}

fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
}

/// Jordan structure of one eigenvalue cluster.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JordanReport {
    pub eigenvalue: Complex64,
    pub algebraic_multiplicity: usize,
    /// Block size → number of blocks.
    pub block_size_histogram: BTreeMap<usize, usize>,
    /// Sectors whose diagonal block has this eigenvalue, with multiplicities.
    pub sectors: BTreeMap<usize, usize>,
    /// (d, d') pairs, d > d', joined by a generalized-eigenvector chain.
    pub sector_links: Vec<(usize, usize)>,
    pub rank_tolerance: f64,
    pub warnings: Vec<String>,
}

impl JordanReport {
    pub fn max_block(&self) -> usize {
        self.block_size_histogram.keys().copied().max().unwrap_or(0)
    }
}

/// Refines an approximate eigenvalue of `b` by shifted inverse iteration with Rayleigh quotients.
fn refine_eigenvalue<S: Scalar>(b: &Mat<S>, mu0: Complex64) -> S {
    let n = b.rows();
    let mut mu = S::from_c64(mu0);
    let mut x: Vec<S> = (0..n).map(|i| S::from_f64(1.0 + 0.1 * i as f64)).collect();
    for _ in 0..6 {
        let mut shifted = b.clone();
        for i in 0..n {
            shifted[(i, i)] -= mu.clone();
        }
        let Some(y) = shifted.solve(&x) else { break };
        let norm = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        let inv = S::from_f64(1.0 / norm);
        x = y.into_iter().map(|v| v * inv.clone()).collect();
        let bx = b.mul_vec(&x);
        let mut num = S::zero();
        let mut den = S::zero();
        for (xi, bxi) in x.iter().zip(&bx) {
            num += xi.conj() * bxi.clone();
            den += xi.conj() * xi.clone();
        }
        mu = num / den;
    }
    mu
}

/// Numerical rank of `m` with singular values (double) or complete-pivoting pivots
/// (extended) above `threshold` counted.
fn rank_below<S: Scalar>(m: &Mat<S>, threshold: f64) -> usize {
    match S::PRECISION {
        Precision::Double => m.to_c64().rank_svd_below(threshold),
        Precision::Extended => m.rank_gauss_below(threshold),
    }
}

fn spectral_norm<S: Scalar>(m: &Mat<S>) -> f64 {
    match S::PRECISION {
        Precision::Double => m.to_c64().singular_values().first().copied().unwrap_or(0.0),
        Precision::Extended => m.frobenius(),
    }
}

fn shifted<S: Scalar>(m: &Mat<S>, mu: &S) -> Mat<S> {
    let mut out = m.clone();
    for i in 0..m.rows() {
        out[(i, i)] -= mu.clone();
    }
    out
}

/// Jordan analysis with eigenvalues read off the diagonal blocks numerically.
pub fn jordan_analyze<S: Scalar>(m: &SectorMatrix<S>, tol: f64) -> Result<Vec<JordanReport>> {
    let mut eigs = Vec::new();
    for &d in m.sectors() {
        let block = m.diagonal_block(d);
        for mu in block.to_c64().eigenvalues() {
            let refined = match S::PRECISION {
                Precision::Double => S::from_c64(mu),
                Precision::Extended => refine_eigenvalue(&block, mu),
            };
            eigs.push((d, refined));
        }
    }
    analyze(m, tol, eigs)
}

/// Jordan analysis when every diagonal block d is known to be `values[d]` times the identity.
pub fn jordan_analyze_scalar_blocks<S: Scalar>(m: &SectorMatrix<S>, tol: f64, values: &BTreeMap<usize, S>) -> Result<Vec<JordanReport>> {
    let mut eigs = Vec::new();
    for &d in m.sectors() {
        let mu = values.get(&d).cloned().ok_or_else(|| crate::Error::InvalidArgument(format!("no value for sector {d}")))?;
        for _ in m.sector_range(d) {
            eigs.push((d, mu.clone()));
        }
    }
    analyze(m, tol, eigs)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn analyze<S: Scalar>(m: &SectorMatrix<S>, tol: f64, eigs: Vec<(usize, S)>) -> Result<Vec<JordanReport>> {
    if tol <= 0.0 || !tol.is_finite() {
        return invalid(format!("rank tolerance must be positive, got {tol}"));
    }
    let n = m.dim();
    let approx: Vec<Complex64> = eigs.iter().map(|(_, x)| x.to_c64()).collect();
    let scale = approx.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let radius = tol * scale;
    let mut parent: Vec<usize> = (0..eigs.len()).collect();
    for i in 0..eigs.len() {
        for j in i + 1..eigs.len() {
            if (eigs[i].1.clone() - eigs[j].1.clone()).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..eigs.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut clusters: Vec<(S, Vec<usize>)> = groups
        .into_values()
        .map(|members| {
            let mut sum = S::zero();
            for &i in &members {
                sum += eigs[i].1.clone();
            }
            (sum / S::from_i64(members.len() as i64), members)
        })
        .collect();
    clusters.sort_by(|a, b| {
        let (x, y) = (a.0.to_c64(), b.0.to_c64());
        x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap())
    });
    let means: Vec<Complex64> = clusters.iter().map(|c| c.0.to_c64()).collect();

    let mut reports = Vec::with_capacity(clusters.len());
    for (ci, (mu, members)) in clusters.iter().enumerate() {
        let mult = members.len();
        let mut sectors: BTreeMap<usize, usize> = BTreeMap::new();
        for &i in members {
            *sectors.entry(eigs[i].0).or_default() += 1;
        }
        let mut warnings = Vec::new();
        for (cj, other) in means.iter().enumerate() {
            if cj != ci && (other - means[ci]).norm() <= 10.0 * radius {
                warnings.push(format!("eigenvalue {other} lies within 10·tol of this cluster; clustering is ambiguous"));
            }
        }
        let mut histogram = BTreeMap::new();
        let mut links = Vec::new();
        if mult == 1 {
            histogram.insert(1, 1);
        } else {
            let b = shifted(m.mat(), mu);
            let sigma = spectral_norm(&b).max(f64::MIN_POSITIVE);
            let mut ranks = vec![n];
            let mut power = b.clone();
            let mut k = 1;
            loop {
                let r = rank_below(&power, tol * sigma.powi(k as i32));
                ranks.push(r);
                if r == ranks[k - 1] || k > mult || n - r >= mult {
                    if n - r >= mult && r != ranks[k - 1] && k <= mult {
                        // One more power confirms stabilization.
                        power = &power * &b;
                        let r2 = rank_below(&power, tol * sigma.powi(k as i32 + 1));
                        ranks.push(r2);
                    }
                    break;
                }
                power = &power * &b;
                k += 1;
            }
            let nullity = n - *ranks.last().unwrap();
            if nullity != mult {
                warnings.push(format!("generalized eigenspace has dimension {nullity} but {mult} eigenvalues were clustered"));
            }
            let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0].saturating_sub(w[1])).collect();
            for (k, &g) in at_least.iter().enumerate() {
                let next = at_least.get(k + 1).copied().unwrap_or(0);
                if g > next {
                    histogram.insert(k + 1, g - next);
                }
            }
            if sectors.len() > 1 && histogram.keys().any(|&s| s > 1) {
                links = sector_links(m, mu, tol * sigma, tol * sigma * sigma, &sectors);
            }
        }
        let total: usize = histogram.iter().map(|(s, c)| s * c).sum();
        if total != mult {
            warnings.push(format!("block sizes account for {total} of {mult} eigenvalues"));
        }
        reports.push(JordanReport {
            eigenvalue: mu.to_c64(),
            algebraic_multiplicity: mult,
            block_size_histogram: histogram,
            sectors,
            sector_links: links,
            rank_tolerance: tol,
            warnings,
        });
    }
    Ok(reports)
}

/// Number of size ≥ 2 Jordan chains of the eigenvalue inside each sector window, combined by
/// inclusion-exclusion into chains with head in sector d and tail in sector d'.
fn sector_links<S: Scalar>(m: &SectorMatrix<S>, mu: &S, thr1: f64, thr2: f64, sectors: &BTreeMap<usize, usize>) -> Vec<(usize, usize)> {
    let all = m.sectors().to_vec();
    let pos: HashMap<usize, usize> = all.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let mut memo: HashMap<(usize, usize), i64> = HashMap::new();
    let mut chains = |lo: usize, hi: usize| -> i64 {
        if lo > hi {
            return 0;
        }
        *memo.entry((lo, hi)).or_insert_with(|| {
            let w = shifted(&m.sector_window(all[lo], all[hi]), mu);
            let r1 = rank_below(&w, thr1) as i64;
            let r2 = rank_below(&(&w * &w), thr2) as i64;
            r1 - r2
        })
    };
    let keys: Vec<usize> = sectors.keys().copied().collect();
    let mut out = Vec::new();
    for (i, &dp) in keys.iter().enumerate() {
        for &d in &keys[i + 1..] {
            let (lo, hi) = (pos[&dp], pos[&d]);
            let count = chains(lo, hi) - chains(lo + 1, hi) - if hi == 0 { 0 } else { chains(lo, hi - 1) }
                + if hi == 0 { 0 } else { chains(lo + 1, hi - 1) };
            if count > 0 {
                out.push((d, dp));
            }
        }
    }
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// All sector links found in a set of reports, sorted.
pub fn detected_links(reports: &[JordanReport]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = reports.iter().flat_map(|r| r.sector_links.iter().copied()).collect();
    out.sort();
    out.dedup();
    out
}

/// A common generalized eigenspace of a commuting family.
#[derive(Clone, Debug)]
pub struct InvariantSubspace {
    /// Eigenvalue of each family member on this subspace.
    pub eigenvalues: Vec<Complex64>,
    /// Orthonormal basis as columns.
    pub basis: Mat<Complex64>,
    /// Jordan block sizes of each member restricted to the subspace.
    pub block_sizes: Vec<BTreeMap<usize, usize>>,
    /// Sectors in which the subspace has weight.
    pub sector_support: Vec<usize>,
}

impl InvariantSubspace {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

fn restrict(a: &Mat<Complex64>, v: &Mat<Complex64>) -> Mat<Complex64> {
    &(&v.adjoint() * a) * v
}

/// Largest entry of A V − V (V^† A V).
pub fn invariance_residual(a: &Mat<Complex64>, v: &Mat<Complex64>) -> f64 {
    let av = a * v;
    (&av - &(v * &restrict(a, v))).max_abs()
}

fn cluster_eigenvalues(ev: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let mut parent: Vec<usize> = (0..ev.len()).collect();
    for i in 0..ev.len() {
        for j in i + 1..ev.len() {
            if (ev[i] - ev[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
    for i in 0..ev.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(ev[i]);
    }
    let mut out: Vec<(Complex64, usize)> =
        groups.into_values().map(|g| (g.iter().sum::<Complex64>() / g.len() as f64, g.len())).collect();
    out.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap().then(a.0.im.partial_cmp(&b.0.im).unwrap()));
    out
}

fn block_histogram(r: &Mat<Complex64>, mu: Complex64, tol: f64) -> BTreeMap<usize, usize> {
    let k = r.rows();
    let b = shifted(r, &mu);
    let sigma = b.singular_values().first().copied().unwrap_or(0.0).max(1e-300);
    let mut ranks = vec![k];
    let mut power = b.clone();
    for p in 1..=k {
        ranks.push(power.rank_svd_below(tol * sigma.powi(p as i32).max(1e-300)));
        if ranks[p] == 0 || ranks[p] == ranks[p - 1] {
            break;
        }
        power = &power * &b;
    }
    let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0].saturating_sub(w[1])).collect();
    let mut hist = BTreeMap::new();
    for (i, &g) in at_least.iter().enumerate() {
        let next = at_least.get(i + 1).copied().unwrap_or(0);
        if g > next {
            hist.insert(i + 1, g - next);
        }
    }
    hist
}

/// Splits the space into intersections of generalized eigenspaces of a commuting family.
pub fn commuting_family_refine(ms: &[SectorMatrix<Complex64>], tol: f64) -> Result<Vec<InvariantSubspace>> {
    let Some(first) = ms.first() else { return invalid("empty family") };
    let n = first.dim();
    for (i, a) in ms.iter().enumerate() {
        if a.dim() != n {
            return invalid("family members have different sizes");
        }
        for b in &ms[i + 1..] {
            let c = a.mat().commutator(b.mat()).max_abs();
            let scale = a.mat().max_abs().max(1.0) * b.mat().max_abs().max(1.0);
            if c > tol * scale {
                return invalid(format!("family does not commute: commutator {c:.3e} exceeds {:.3e}", tol * scale));
            }
        }
    }
    let mut spaces: Vec<(Vec<Complex64>, Mat<Complex64>)> = vec![(vec![], Mat::identity(n))];
    for a in ms {
        let scale = a.mat().max_abs().max(1.0);
        let mut next = Vec::new();
        for (eigs, v) in spaces {
            let r = restrict(a.mat(), &v);
            for (mu, mult) in cluster_eigenvalues(&r.eigenvalues(), tol.sqrt() * scale) {
                let shifted_r = shifted(&r, &mu).pow(mult as u32);
                let null = shifted_r.smallest_right_singular_vectors(mult);
                let mut e = eigs.clone();
                e.push(mu);
                next.push((e, &v * &null));
            }
        }
        spaces = next;
    }
    let basis_sectors = first.sectors().to_vec();
    Ok(spaces
        .into_iter()
        .map(|(eigenvalues, basis)| {
            let block_sizes = ms.iter().zip(&eigenvalues).map(|(a, &mu)| block_histogram(&restrict(a.mat(), &basis), mu, tol)).collect();
            let sector_support = basis_sectors
                .iter()
                .copied()
                .filter(|&d| {
                    let range = first.sector_range(d);
                    let w: f64 = range.flat_map(|i| (0..basis.cols()).map(move |j| (i, j))).map(|(i, j)| basis[(i, j)].norm_sqr()).sum();
                    w.sqrt() > tol.sqrt()
                })
                .collect();
            InvariantSubspace { eigenvalues, basis, block_sizes, sector_support }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkspace::LinkBasis;
    use crate::params::SpectralParams;
    use crate::transfer::{build_rho_dn_sweep, build_rho_fn_sweep, fn_diagonal_value};

    #[test]
    fn identity_is_semisimple() {
        let b = LinkBasis::new(4).unwrap();
        let m = SectorMatrix::new(&b, Mat::<Complex64>::identity(6));
        let reps = jordan_analyze(&m, 1e-9).unwrap();
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].block_size_histogram, BTreeMap::from([(1, 6)]));
        let spec = sector_spectrum(&m);
        assert!(spec.values().flatten().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-14));
    }

    #[test]
    fn braid_at_half_pi_n4() {
        let p = SpectralParams::rational(1, 2, 0.0);
        let b = LinkBasis::new(4).unwrap();
        let f = build_rho_fn_sweep::<Complex64>(&b, &p).unwrap();
        let reps = jordan_analyze(&f, 1e-9).unwrap();
        assert_eq!(detected_links(&reps), vec![(2, 0)]);
        let values = b.sectors().iter().map(|&d| (d, fn_diagonal_value::<Complex64>(d, &p))).collect();
        let reps2 = jordan_analyze_scalar_blocks(&f, 1e-9, &values).unwrap();
        assert_eq!(detected_links(&reps2), vec![(2, 0)]);
        assert!(reps.iter().all(|r| r.max_block() <= 2));
    }

    #[test]
    fn family_isolates_link() {
        let p = SpectralParams::rational(1, 2, 0.37);
        let b = LinkBasis::new(4).unwrap();
        let f = build_rho_fn_sweep::<Complex64>(&b, &p).unwrap();
        let d = build_rho_dn_sweep::<Complex64>(&b, &p).unwrap();
        let spaces = commuting_family_refine(&[f.clone(), d.clone()], 1e-9).unwrap();
        assert_eq!(spaces.iter().map(|s| s.dim()).sum::<usize>(), 6);
        for s in &spaces {
            assert!(invariance_residual(f.mat(), &s.basis) < 1e-8);
            assert!(invariance_residual(d.mat(), &s.basis) < 1e-8);
        }
        assert!(spaces.iter().any(|s| s.block_sizes[0].contains_key(&2) && s.sector_support.contains(&0) && s.sector_support.contains(&2)));
    }
}
