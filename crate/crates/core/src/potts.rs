//! Brute-force Q-state Potts spin and Fortuin-Kasteleyn computations on the 45°-rotated
//! N × 2M strip, and their reconciliation with the loop transfer matrix.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::link_rep::{gram_matrix, sector_weight, weight_matrix};
use crate::linkspace::{LinkBasis, LinkState};
use crate::matrix::Mat;
use crate::params::SpectralParams;
use crate::transfer::build_rho_dn_sweep;

/// Largest spin-transfer dimension Q^{N/2}.
pub const SPIN_TRANSFER_MAX_DIM: usize = 10_000;
/// Largest number of bonds for graph enumeration.
pub const FK_MAX_BONDS: usize = 24;
/// Largest number of spin configurations for exhaustive spin sums.
pub const SPIN_SUM_MAX_CONFIGS: f64 = 2e7;

/// Couplings of the critical Potts model attached to a loop parameter set.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PottsParams {
    pub spectral: SpectralParams,
    pub q: f64,
    pub v_j: f64,
    pub v_k: f64,
}

impl PottsParams {
    /// Q = (2cosλ)², v_J = √Q sin(λ−u)/sin u, v_K = √Q sin u/sin(λ−u).
    pub fn new(spectral: SpectralParams) -> Result<Self> {
        let lambda = spectral.lambda_f64();
        let u = spectral.u;
        if !(lambda > 0.0 && lambda < std::f64::consts::FRAC_PI_2) {
            return invalid(format!("the Potts correspondence needs 0 < λ < π/2, got λ = {lambda}"));
        }
        if !(u > 0.0 && u < lambda) {
            return invalid(format!("the Potts correspondence needs 0 < u < λ, got u = {u}"));
        }
        let sqrt_q = 2.0 * lambda.cos();
        let ratio = (lambda - u).sin() / u.sin();
        Ok(PottsParams { spectral, q: sqrt_q * sqrt_q, v_j: sqrt_q * ratio, v_k: sqrt_q / ratio })
    }

    /// Q as a number of spin states.
    pub fn spin_states(&self) -> Result<usize> {
        let rounded = self.q.round();
        if (self.q - rounded).abs() > 1e-9 || rounded < 2.0 {
            return invalid(format!("spin models need an integer Q ≥ 2, got Q = {}", self.q));
        }
        Ok(rounded as usize)
    }

    /// κ = Q^{(N+1)/2}/(sin u sin(λ−u))^N.
    pub fn kappa(&self, n: usize) -> f64 {
        let (lambda, u) = (self.spectral.lambda_f64(), self.spectral.u);
        self.q.powf((n as f64 + 1.0) / 2.0) / (u.sin() * (lambda - u).sin()).powi(n as i32)
    }

    fn coupling(&self, kind: BondKind) -> f64 {
        match kind {
            BondKind::J => self.v_j,
            BondKind::K => self.v_k,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BondKind {
    J,
    K,
}

/// Spins at the lattice points (x, y) with x + y odd of an N × 2M grid of boxes; each box
/// carries the bond along its diagonal joining its two spins. Boxes in even columns carry
/// K bonds and boxes in odd columns carry J bonds.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub n: usize,
    pub m: usize,
    /// Rows y = 2M are identified with y = 0.
    pub periodic: bool,
    spin_index: Vec<Option<usize>>,
    pub num_spins: usize,
    /// (spin, spin, kind) per box, in box order x + N·y.
    pub bonds: Vec<(usize, usize, BondKind)>,
}

impl Lattice {
    pub fn new(n: usize, m: usize, periodic: bool) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return invalid(format!("the Potts strip needs an even N ≥ 2, got {n}"));
        }
        if m == 0 {
            return invalid("M must be at least 1");
        }
        let rows = if periodic { 2 * m } else { 2 * m + 1 };
        let mut spin_index = vec![None; (n + 1) * rows];
        let mut count = 0;
        for y in 0..rows {
            for x in 0..=n {
                if (x + y) % 2 == 1 {
                    spin_index[y * (n + 1) + x] = Some(count);
                    count += 1;
                }
            }
        }
        let mut lat = Lattice { n, m, periodic, spin_index, num_spins: count, bonds: Vec::with_capacity(2 * n * m) };
        for y in 0..2 * m {
            for x in 0..n {
                let (a, b) = if (x + y) % 2 == 1 { ((x, y), (x + 1, y + 1)) } else { ((x + 1, y), (x, y + 1)) };
                let kind = if x % 2 == 0 { BondKind::K } else { BondKind::J };
                let bond = (lat.spin(a.0, a.1), lat.spin(b.0, b.1), kind);
                lat.bonds.push(bond);
            }
        }
        Ok(lat)
    }

    /// Index of the spin at (x, y).
    pub fn spin(&self, x: usize, y: usize) -> usize {
        let rows = self.spin_index.len() / (self.n + 1);
        self.spin_index[(y % rows) * (self.n + 1) + x].expect("spins sit at x + y odd")
    }

    /// Spins on row y.
    pub fn row(&self, y: usize) -> Vec<usize> {
        (0..=self.n).filter(|x| (x + y) % 2 == 1).map(|x| self.spin(x, y)).collect()
    }

    /// Number of closed loops of the quarter-circle tiling of a periodic lattice, traced
    /// directly from the box states with half-circles around the side boundary spins.
    pub fn loop_count(&self, mask: u64) -> usize {
        assert!(self.periodic, "loop tracing is defined on the cylinder");
        let (n, rows) = (self.n, 2 * self.m);
        let horizontal = |x: usize, y: usize| (y % rows) * n + x;
        let vertical = |x: usize, y: usize| n * rows + y * (n + 1) + x;
        let mut uf = UnionFind::new(n * rows + (n + 1) * rows);
        for y in 0..rows {
            for x in 0..n {
                let (bottom, top, left, right) = (horizontal(x, y), horizontal(x, y + 1), vertical(x, y), vertical(x + 1, y));
                let bonded = mask >> (y * n + x) & 1 == 1;
                // Arcs avoid the bond when present and cross its diagonal when absent.
                let spins_on_rising_diagonal = (x + y) % 2 == 1;
                if bonded == spins_on_rising_diagonal {
                    uf.union(bottom, right);
                    uf.union(left, top);
                } else {
                    uf.union(bottom, left);
                    uf.union(top, right);
                }
            }
        }
        for y in (1..rows).step_by(2) {
            uf.union(vertical(0, y - 1), vertical(0, y));
            uf.union(vertical(n, y - 1), vertical(n, y));
        }
        uf.components()
    }

    /// Connected components of the graph with the bonds in `mask`.
    pub fn clusters(&self, mask: u64) -> usize {
        let mut uf = UnionFind::new(self.num_spins);
        for (k, &(a, b, _)) in self.bonds.iter().enumerate() {
            if mask >> k & 1 == 1 {
                uf.union(a, b);
            }
        }
        uf.components()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}

/// Data of one FK graph on the cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FkGraph {
    pub bond_mask: u64,
    pub n_bj: usize,
    pub n_bk: usize,
    pub n_c: usize,
    pub loops: usize,
}

impl FkGraph {
    pub fn new(lat: &Lattice, mask: u64) -> Self {
        let (mut n_bj, mut n_bk) = (0, 0);
        for (k, &(_, _, kind)) in lat.bonds.iter().enumerate() {
            if mask >> k & 1 == 1 {
                match kind {
                    BondKind::J => n_bj += 1,
                    BondKind::K => n_bk += 1,
                }
            }
        }
        FkGraph { bond_mask: mask, n_bj, n_bk, n_c: lat.clusters(mask), loops: lat.loop_count(mask) }
    }

    pub fn n_b(&self) -> usize {
        self.n_bj + self.n_bk
    }

    /// 2N_c = #(G) + N_s − N_b.
    pub fn satisfies_euler(&self, num_spins: usize) -> bool {
        2 * self.n_c + self.n_b() == self.loops + num_spins
    }
}

/// Result of the exhaustive graph sum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FkSum {
    pub z: f64,
    pub graphs: u64,
    /// Masks violating the Euler relation (at most a handful are kept).
    pub euler_failures: Vec<u64>,
    pub euler_failure_count: u64,
}

/// Z = Σ_G v_J^{N_bJ} v_K^{N_bK} Q^{N_c} over all bond subsets of the periodic strip, with
/// the Euler relation checked on every graph.
pub fn fk_bruteforce_z(n: usize, m: usize, pp: &PottsParams) -> Result<FkSum> {
    let lat = Lattice::new(n, m, true)?;
    let bonds = lat.bonds.len();
    if bonds > FK_MAX_BONDS {
        return Err(Error::Capacity(format!("2NM = {bonds} bonds exceeds the enumeration limit {FK_MAX_BONDS} (N = {n}, M = {m})")));
    }
    let prefix_bits = bonds.min(8);
    let chunks = 1u64 << prefix_bits;
    let per_chunk = 1u64 << (bonds - prefix_bits);
    let partials: Vec<(f64, u64, Vec<u64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut z = 0.0;
            let mut fails = 0;
            let mut kept = Vec::new();
            for low in 0..per_chunk {
                let mask = c << (bonds - prefix_bits) | low;
                let g = FkGraph::new(&lat, mask);
                if !g.satisfies_euler(lat.num_spins) {
                    fails += 1;
                    if kept.len() < 4 {
                        kept.push(mask);
                    }
                }
                z += pp.v_j.powi(g.n_bj as i32) * pp.v_k.powi(g.n_bk as i32) * pp.q.powi(g.n_c as i32);
            }
            (z, fails, kept)
        })
        .collect();
    let mut out = FkSum { z: 0.0, graphs: 1u64 << bonds, euler_failures: vec![], euler_failure_count: 0 };
    for (z, fails, kept) in partials {
        out.z += z;
        out.euler_failure_count += fails;
        out.euler_failures.extend(kept.into_iter().take(4 - out.euler_failures.len().min(4)));
    }
    Ok(out)
}

/// Iterates over all assignments of `q` states to `count` spins.
fn for_each_configuration(count: usize, q: usize, mut f: impl FnMut(&[usize])) {
    let mut s = vec![0usize; count];
    loop {
        f(&s);
        let mut i = 0;
        loop {
            if i == count {
                return;
            }
            s[i] += 1;
            if s[i] < q {
                break;
            }
            s[i] = 0;
            i += 1;
        }
    }
}

fn check_configs(count: usize, q: usize) -> Result<()> {
    let configs = (q as f64).powi(count as i32);
    if configs > SPIN_SUM_MAX_CONFIGS {
        return Err(Error::Capacity(format!("Q^N_s = {q}^{count} spin configurations exceeds {SPIN_SUM_MAX_CONFIGS:e}")));
    }
    Ok(())
}

fn boltzmann(lat: &Lattice, pp: &PottsParams, s: &[usize]) -> f64 {
    lat.bonds.iter().map(|&(a, b, kind)| if s[a] == s[b] { 1.0 + pp.coupling(kind) } else { 1.0 }).product()
}

/// Σ_σ Π_bonds (1 + v δ) over all spin configurations on the periodic strip.
pub fn spin_bruteforce_z(n: usize, m: usize, pp: &PottsParams) -> Result<f64> {
    let q = pp.spin_states()?;
    let lat = Lattice::new(n, m, true)?;
    check_configs(lat.num_spins, q)?;
    let mut z = 0.0;
    for_each_configuration(lat.num_spins, q, |s| z += boltzmann(&lat, pp, s));
    Ok(z)
}

fn row_configurations(len: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_configuration(len, q, |s| out.push(s.to_vec()));
    out
}

/// The unnormalized spin transfer matrix Λ̃ between rows of N/2 spins, summing over the
/// intermediate row of N/2 + 1 spins.
pub fn spin_transfer_tilde(n: usize, pp: &PottsParams) -> Result<Mat<Complex64>> {
    let q = pp.spin_states()?;
    let lat = Lattice::new(n, 1, true)?;
    let dim = (q as f64).powi((n / 2) as i32);
    if dim > SPIN_TRANSFER_MAX_DIM as f64 {
        return Err(Error::Capacity(format!("Q^(N/2) = {dim} exceeds the spin-transfer limit {SPIN_TRANSFER_MAX_DIM} (N = {n}, Q = {q})")));
    }
    let (row0, row1) = (lat.row(0), lat.row(1));
    let outer = row_configurations(row0.len(), q);
    let inner = row_configurations(row1.len(), q);
    let position = |spin: usize| -> (usize, usize) {
        if let Some(i) = row0.iter().position(|&s| s == spin) {
            (0, i)
        } else {
            (1, row1.iter().position(|&s| s == spin).expect("spin on row 0 or 1"))
        }
    };
    // Bonds of boxes on row 0 join row 0 to row 1; those on row 1 join row 1 to row 2 ≡ row 0.
    let lower: Vec<(usize, usize, f64)> = lat.bonds[..n]
        .iter()
        .map(|&(a, b, kind)| {
            let (pa, pb) = (position(a), position(b));
            let (o, i) = if pa.0 == 0 { (pa.1, pb.1) } else { (pb.1, pa.1) };
            (o, i, pp.coupling(kind))
        })
        .collect();
    let upper: Vec<(usize, usize, f64)> = lat.bonds[n..]
        .iter()
        .map(|&(a, b, kind)| {
            let (pa, pb) = (position(a), position(b));
            let (o, i) = if pa.0 == 0 { (pa.1, pb.1) } else { (pb.1, pa.1) };
            (o, i, pp.coupling(kind))
        })
        .collect();
    let half = |bonds: &[(usize, usize, f64)], mu: &[usize], rho: &[usize]| -> f64 {
        bonds.iter().map(|&(o, i, v)| if mu[o] == rho[i] { 1.0 + v } else { 1.0 }).product()
    };
    let d = outer.len();
    let rows: Vec<Vec<Complex64>> = outer
        .par_iter()
        .map(|mu| {
            (0..d)
                .map(|j| {
                    let nu = &outer[j];
                    let s: f64 = inner.iter().map(|rho| half(&lower, mu, rho) * half(&upper, nu, rho)).sum();
                    Complex64::new(s, 0.0)
                })
                .collect()
        })
        .collect();
    Ok(Mat::from_rows(rows))
}

/// Λ = Λ̃/κ.
pub fn spin_transfer(n: usize, pp: &PottsParams) -> Result<Mat<Complex64>> {
    let t = spin_transfer_tilde(n, pp)?;
    Ok(t.scale(&Complex64::new(1.0 / pp.kappa(n), 0.0)))
}

/// κ^M tr(ρ(D_N)^M W).
pub fn loop_z(n: usize, m: usize, pp: &PottsParams) -> Result<f64> {
    let basis = LinkBasis::new(n)?;
    let d = build_rho_dn_sweep::<Complex64>(&basis, &pp.spectral)?;
    let w = weight_matrix::<Complex64>(&basis, &pp.spectral)?;
    let power = d.mat().pow(m as u32);
    Ok((&power * w.mat()).trace().re * pp.kappa(n).powi(m as i32))
}

/// One line of the three-way comparison table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PottsRow {
    pub n: usize,
    pub m: usize,
    pub q: f64,
    pub u: f64,
    pub z_spin: f64,
    pub z_fk: f64,
    pub z_loop: f64,
    pub max_rel_dev: f64,
    pub euler_failures: u64,
}

impl PottsRow {
    pub const CSV_HEADER: &'static str = "N,M,Q,u,Z_spin,Z_fk,Z_loop,max_rel_dev";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{:.12e},{:.12e},{:.12e},{:.3e}",
            self.n, self.m, self.q, self.u, self.z_spin, self.z_fk, self.z_loop, self.max_rel_dev
        )
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Spin (trace of Λ̃^M), FK and loop partition functions side by side.
pub fn three_way(n: usize, m: usize, pp: &PottsParams) -> Result<PottsRow> {
    let t = spin_transfer_tilde(n, pp)?;
    let z_spin = t.pow(m as u32).trace().re;
    let fk = fk_bruteforce_z(n, m, pp)?;
    let z_loop = loop_z(n, m, pp)?;
    let max_rel_dev = rel(z_spin, fk.z).max(rel(z_spin, z_loop)).max(rel(fk.z, z_loop));
    Ok(PottsRow {
        n,
        m,
        q: pp.q,
        u: pp.spectral.u,
        z_spin,
        z_fk: fk.z,
        z_loop,
        max_rel_dev,
        euler_failures: fk.euler_failure_count,
    })
}

/// One eigenvalue shared by (or missing from) the spin and loop spectra.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub eigenvalue: Complex64,
    pub spin_multiplicity: usize,
    /// Sum of the sector weights of the loop eigenvalues in this cluster.
    pub loop_weight: f64,
}

/// Comparison of the spectrum of Λ with that of ρ(D_N) weighted by W.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumComparison {
    pub entries: Vec<SpectrumEntry>,
    /// Spin eigenvalues not found among the loop eigenvalues.
    pub uncontained: usize,
    /// Largest |mult − w(δ)|, including w(δ) for loop-only eigenvalues.
    pub max_weight_mismatch: f64,
}

impl SpectrumComparison {
    pub fn holds(&self, tol: f64) -> bool {
        self.uncontained == 0 && self.max_weight_mismatch <= tol
    }
}

/// Every eigenvalue of Λ is an eigenvalue of ρ(D_N) with multiplicity equal to its total
/// weight, and loop eigenvalues absent from Λ carry total weight zero.
pub fn compare_spectra(n: usize, pp: &PottsParams, tol: f64) -> Result<SpectrumComparison> {
    let lam = spin_transfer(n, pp)?.eigenvalues();
    let basis = LinkBasis::new(n)?;
    let d = build_rho_dn_sweep::<Complex64>(&basis, &pp.spectral)?;
    let mut loop_eigs = Vec::new();
    for &sector in d.sectors() {
        let w = sector_weight::<Complex64>(sector, &pp.spectral).re;
        for e in d.diagonal_block(sector).eigenvalues() {
            loop_eigs.push((e, w));
        }
    }
    let scale = lam.iter().chain(loop_eigs.iter().map(|(e, _)| e)).map(|z| z.norm()).fold(1e-300, f64::max);
    let radius = tol * scale;
    let mut entries: Vec<(Vec<Complex64>, usize, f64)> = Vec::new();
    let place = |z: Complex64, spin: bool, w: f64, entries: &mut Vec<(Vec<Complex64>, usize, f64)>| {
        if let Some(e) = entries.iter_mut().find(|e| e.0.iter().any(|x| (x - z).norm() <= radius)) {
            e.0.push(z);
            if spin {
                e.1 += 1;
            } else {
                e.2 += w;
            }
        } else {
            entries.push((vec![z], usize::from(spin), if spin { 0.0 } else { w }));
        }
    };
    for &(e, w) in &loop_eigs {
        place(e, false, w, &mut entries);
    }
    let loop_clusters = entries.len();
    for &z in &lam {
        place(z, true, 0.0, &mut entries);
    }
    let uncontained = entries[loop_clusters..].iter().map(|e| e.1).sum();
    let mut out: Vec<SpectrumEntry> = entries
        .iter()
        .map(|(zs, mult, w)| SpectrumEntry { eigenvalue: zs.iter().sum::<Complex64>() / zs.len() as f64, spin_multiplicity: *mult, loop_weight: *w })
        .collect();
    out.sort_by(|a, b| b.eigenvalue.norm().partial_cmp(&a.eigenvalue.norm()).unwrap());
    let max_weight_mismatch = out.iter().map(|e| (e.spin_multiplicity as f64 - e.loop_weight).abs()).fold(0.0, f64::max);
    Ok(SpectrumComparison { entries: out, uncontained, max_weight_mismatch })
}

/// Top and bottom boundary conditions of the open strip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryKind {
    /// Top and bottom rows fixed to distinct states.
    FixedDistinct,
    /// Top and bottom rows fixed to the same state.
    FixedSame,
    /// Both rows free.
    Free,
    /// Top row free, bottom row fixed.
    Mixed,
}

impl std::str::FromStr for BoundaryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(BoundaryKind::FixedDistinct),
            "b" => Ok(BoundaryKind::FixedSame),
            "c" => Ok(BoundaryKind::Free),
            "d" => Ok(BoundaryKind::Mixed),
            _ => Err(Error::Parse(format!("boundary kind must be one of a, b, c, d; got {s:?}"))),
        }
    }
}

/// Outer arc (0, N−1) around the 1-arcs (1,2), (3,4), ...: the boundary of a fixed row.
pub fn fixed_state(n: usize) -> Result<LinkState> {
    let mut arcs = vec![(0, n - 1)];
    arcs.extend((1..n - 1).step_by(2).map(|i| (i, i + 1)));
    LinkState::from_arcs(n, &arcs)
}

/// The fixed-row state with its outer arc opened into two defects.
pub fn crossing_state(n: usize) -> Result<LinkState> {
    let arcs: Vec<(usize, usize)> = (1..n - 1).step_by(2).map(|i| (i, i + 1)).collect();
    LinkState::from_arcs(n, &arcs)
}

/// The 1-arcs (0,1), (2,3), ...: the boundary of a free row.
pub fn free_state(n: usize) -> Result<LinkState> {
    let arcs: Vec<(usize, usize)> = (0..n).step_by(2).map(|i| (i, i + 1)).collect();
    LinkState::from_arcs(n, &arcs)
}

/// Prefactor and Gram-sandwich terms of one boundary partition function.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryTerms {
    /// K(β,u) times the power of β specific to the boundary kind.
    pub prefactor: f64,
    /// (coefficient, top state, bottom state).
    pub terms: Vec<(f64, LinkState, LinkState)>,
}

/// The Gram sandwiches and prefactors for each boundary kind.
pub fn boundary_terms(kind: BoundaryKind, n: usize, m: usize, params: &SpectralParams) -> Result<BoundaryTerms> {
    if n == 0 || n % 2 != 0 {
        return invalid(format!("boundary partition functions need an even N ≥ 2, got {n}"));
    }
    let lambda = params.lambda_f64();
    let u = params.u;
    let beta = 2.0 * lambda.cos();
    let n_s = (n + 1) * m + n / 2;
    let k = beta.powi(n_s as i32) / (u.sin() * (lambda - u).sin()).powi((n * m) as i32);
    let (a, b, f) = (fixed_state(n)?, crossing_state(n)?, free_state(n)?);
    let edge = beta.powi(-(n as i32) - 2);
    Ok(match kind {
        BoundaryKind::FixedDistinct => BoundaryTerms { prefactor: k * edge, terms: vec![(1.0, a.clone(), a), (-beta, b.clone(), b)] },
        BoundaryKind::FixedSame => {
            BoundaryTerms { prefactor: k * edge, terms: vec![(1.0, a.clone(), a), (beta * (beta * beta - 1.0), b.clone(), b)] }
        }
        BoundaryKind::Free => BoundaryTerms { prefactor: k, terms: vec![(1.0, f.clone(), f)] },
        BoundaryKind::Mixed => BoundaryTerms { prefactor: k * beta.powi(-(n as i32) / 2 - 1), terms: vec![(1.0, f, a)] },
    })
}

/// Boundary partition function from ⟨top|ρ(D_N)^M bottom⟩_G sandwiches.
pub fn boundary_z(kind: BoundaryKind, n: usize, m: usize, params: &SpectralParams) -> Result<f64> {
    let terms = boundary_terms(kind, n, m, params)?;
    let basis = LinkBasis::new(n)?;
    let d = build_rho_dn_sweep::<Complex64>(&basis, params)?;
    let sandwich = &gram_matrix::<Complex64>(&basis, params) * &d.mat().pow(m as u32);
    let mut total = 0.0;
    for (c, top, bottom) in &terms.terms {
        let (i, j) = (basis.index_of(top).expect("basis state"), basis.index_of(bottom).expect("basis state"));
        total += c * sandwich[(i, j)].re;
    }
    Ok(terms.prefactor * total)
}

/// Exhaustive spin sum on the open strip with the top and bottom rows constrained.
pub fn boundary_spin_sum(kind: BoundaryKind, n: usize, m: usize, pp: &PottsParams) -> Result<f64> {
    let q = pp.spin_states()?;
    let lat = Lattice::new(n, m, false)?;
    check_configs(lat.num_spins, q)?;
    let (bottom, top) = (lat.row(0), lat.row(2 * m));
    let (fix_bottom, fix_top): (Option<usize>, Option<usize>) = match kind {
        BoundaryKind::FixedDistinct => (Some(0), Some(1)),
        BoundaryKind::FixedSame => (Some(0), Some(0)),
        BoundaryKind::Free => (None, None),
        BoundaryKind::Mixed => (Some(0), None),
    };
    let mut z = 0.0;
    for_each_configuration(lat.num_spins, q, |s| {
        let ok = fix_bottom.is_none_or(|v| bottom.iter().all(|&i| s[i] == v)) && fix_top.is_none_or(|v| top.iter().all(|&i| s[i] == v));
        if ok {
            z += boltzmann(&lat, pp, s);
        }
    });
    Ok(z)
}
