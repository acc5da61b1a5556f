//! Matter-gauge construction on an open chain: a penalty Hamiltonian that
//! enforces `N0` excitations per link, an SU(2)-invariant hopping `V`, and the
//! effective Hamiltonian it generates at second order in `J0 / Omega`.
//!
//! Every matter site carries `b_up, b_down`; the link `(i, i+1)` carries
//! `c_L` modes attached to site `i` and `c_R` modes attached to site `i+1`.
//! Modes are fermionic (Jordan-Wigner ordered as listed by [`FockBasis`]) and
//! hard-core by construction.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{operator_norm, CMatrix, Spectrum};
use crate::pauli::Letter;

/// Largest number of modes a Fock basis may enumerate.
pub const MODE_LIMIT: usize = 14;

/// Largest Fock dimension realized as a dense matrix.
pub const DENSE_FOCK_LIMIT: usize = 1 << 12;

/// Threshold for the energy-denominator guard, relative to the larger of
/// `Omega` and `|J0|`.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainConfig {
    pub n_sites: usize,
    /// Bare mode frequency `omega`.
    pub omega: f64,
    /// Penalty scale `Omega`.
    pub big_omega: f64,
    /// Target excitations per link.
    pub n0: usize,
    /// Hopping amplitude.
    pub j0: f64,
    /// Total excitation number of the compared sector.
    pub sector: usize,
    /// Global energy added to `H0`.
    pub offset: f64,
}

impl ChainConfig {
    /// Two matter sites joined by one link, `N0 = 1`, compared in the
    /// two-excitation sector.
    pub fn minimal(j0: f64, big_omega: f64) -> Self {
        ChainConfig { n_sites: 2, omega: 1.0, big_omega, n0: 1, j0, sector: 2, offset: 0.0 }
    }

    pub fn n_links(&self) -> usize {
        self.n_sites.saturating_sub(1)
    }

    pub fn ratio(&self) -> f64 {
        self.j0 / self.big_omega
    }

    fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidParameter("a chain needs at least two matter sites".into()));
        }
        if !(self.big_omega > 0.0) {
            return Err(Error::InvalidParameter(format!("penalty scale must be positive, got {}", self.big_omega)));
        }
        for (name, v) in [("omega", self.omega), ("J0", self.j0), ("offset", self.offset)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ModeKind {
    /// Matter mode on a site.
    Site(usize),
    /// Left-end link mode of link `(i, i+1)`, stored by `i`.
    Left(usize),
    /// Right-end link mode of link `(i, i+1)`, stored by `i`.
    Right(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Mode {
    pub kind: ModeKind,
    /// 0 = up, 1 = down.
    pub spin: usize,
}

/// Occupation-number basis over all modes; basis index bit `k` is the
/// occupation of mode `k`.
#[derive(Debug, Clone)]
pub struct FockBasis {
    modes: Vec<Mode>,
}

impl FockBasis {
    pub fn new(cfg: &ChainConfig) -> Result<Self> {
        cfg.validate()?;
        let mut modes = Vec::new();
        for i in 0..cfg.n_sites {
            for spin in 0..2 {
                modes.push(Mode { kind: ModeKind::Site(i), spin });
            }
        }
        for l in 0..cfg.n_links() {
            for kind in [ModeKind::Left(l), ModeKind::Right(l)] {
                for spin in 0..2 {
                    modes.push(Mode { kind, spin });
                }
            }
        }
        if modes.len() > MODE_LIMIT {
            return Err(Error::DimensionGuard { requested: modes.len(), limit: MODE_LIMIT });
        }
        Ok(FockBasis { modes })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn dim(&self) -> usize {
        1 << self.modes.len()
    }

    pub fn position(&self, mode: Mode) -> usize {
        self.modes.iter().position(|&m| m == mode).expect("mode belongs to the basis")
    }

    fn dense_guard(&self) -> Result<()> {
        if self.dim() > DENSE_FOCK_LIMIT {
            return Err(Error::DimensionGuard {
                requested: self.modes.len(),
                limit: DENSE_FOCK_LIMIT.trailing_zeros() as usize,
            });
        }
        Ok(())
    }

    /// Occupation of `mode` in basis state `state`.
    pub fn occupation(&self, state: usize, mode: Mode) -> usize {
        (state >> self.position(mode)) & 1
    }

    /// Fermionic annihilation operator with Jordan-Wigner sign.
    pub fn annihilator(&self, mode: Mode) -> Result<CMatrix> {
        self.dense_guard()?;
        let k = self.position(mode);
        let dim = self.dim();
        let mut a = CMatrix::zeros(dim, dim);
        for s in 0..dim {
            if s >> k & 1 == 1 {
                let sign = if (s & ((1 << k) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                a[(s ^ (1 << k), s)] = Complex64::new(sign, 0.0);
            }
        }
        Ok(a)
    }

    pub fn number(&self, mode: Mode) -> Result<CMatrix> {
        self.dense_guard()?;
        let k = self.position(mode);
        Ok(CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim(),
            (0..self.dim()).map(|s| Complex64::new((s >> k & 1) as f64, 0.0)),
        )))
    }
}

/// Linear combination of products of ladder operators; each word lists
/// `(creation, mode index)` factors left to right.
#[derive(Debug, Clone, Default)]
struct Fop {
    terms: Vec<(Complex64, Vec<(bool, usize)>)>,
}

impl Fop {
    fn word(c: Complex64, w: Vec<(bool, usize)>) -> Self {
        Fop { terms: vec![(c, w)] }
    }

    fn identity() -> Self {
        Fop::word(Complex64::new(1.0, 0.0), Vec::new())
    }

    fn add(mut self, other: &Fop) -> Self {
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    fn scale(mut self, c: Complex64) -> Self {
        for t in &mut self.terms {
            t.0 *= c;
        }
        self
    }

    fn product(&self, other: &Fop) -> Fop {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, wa) in &self.terms {
            for (b, wb) in &other.terms {
                terms.push((a * b, wa.iter().chain(wb).copied().collect()));
            }
        }
        Fop { terms }
    }

    fn adjoint(&self) -> Fop {
        Fop {
            terms: self
                .terms
                .iter()
                .map(|(c, w)| (c.conj(), w.iter().rev().map(|&(d, k)| (!d, k)).collect()))
                .collect(),
        }
    }

    /// Image of basis state `s` under one word, with its Jordan-Wigner sign.
    fn act(word: &[(bool, usize)], mut s: usize) -> Option<(f64, usize)> {
        let mut sign = 1.0;
        for &(dagger, k) in word.iter().rev() {
            let occupied = s >> k & 1 == 1;
            if occupied == dagger {
                return None;
            }
            if (s & ((1 << k) - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            s ^= 1 << k;
        }
        Some((sign, s))
    }

    fn dense(&self, dim: usize) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        for (c, w) in &self.terms {
            for s in 0..dim {
                if let Some((sign, t)) = Fop::act(w, s) {
                    m[(t, s)] += c * sign;
                }
            }
        }
        m
    }
}

/// Mode operators of a chain.
struct Ops {
    basis: FockBasis,
}

impl Ops {
    fn new(cfg: &ChainConfig) -> Result<Self> {
        let basis = FockBasis::new(cfg)?;
        basis.dense_guard()?;
        Ok(Ops { basis })
    }

    fn ladder(&self, dagger: bool, kind: ModeKind, spin: usize) -> Fop {
        Fop::word(Complex64::new(1.0, 0.0), vec![(dagger, self.basis.position(Mode { kind, spin }))])
    }

    fn a(&self, kind: ModeKind, spin: usize) -> Fop {
        self.ladder(false, kind, spin)
    }

    fn ad(&self, kind: ModeKind, spin: usize) -> Fop {
        self.ladder(true, kind, spin)
    }

    fn n(&self, kind: ModeKind) -> Fop {
        (0..2).fold(Fop::default(), |acc, s| acc.add(&self.ad(kind, s).product(&self.a(kind, s))))
    }

    /// `(1/2) sum c^dagger_alpha sigma^a_{alpha beta} c_beta`.
    fn spin(&self, kind: ModeKind, letter: Letter) -> Fop {
        let s = letter.matrix();
        let mut acc = Fop::default();
        for x in 0..2 {
            for y in 0..2 {
                if s[x][y] != Complex64::new(0.0, 0.0) {
                    acc = acc.add(&self.ad(kind, x).product(&self.a(kind, y)).scale(s[x][y] * 0.5));
                }
            }
        }
        acc
    }

    fn link_occupation(&self, l: usize) -> Fop {
        self.n(ModeKind::Left(l)).add(&self.n(ModeKind::Right(l)))
    }

    fn dense(&self, op: &Fop) -> CMatrix {
        op.dense(self.basis.dim())
    }
}

fn sigma_y() -> [[Complex64; 2]; 2] {
    Letter::Y.matrix()
}

fn penalty_diagonal(cfg: &ChainConfig, basis: &FockBasis) -> Vec<f64> {
    (0..basis.dim())
        .map(|s| {
            (0..cfg.n_links())
                .map(|l| {
                    let g: usize = (0..2)
                        .map(|spin| {
                            basis.occupation(s, Mode { kind: ModeKind::Left(l), spin })
                                + basis.occupation(s, Mode { kind: ModeKind::Right(l), spin })
                        })
                        .sum();
                    let d = g as f64 - cfg.n0 as f64;
                    cfg.big_omega * d * d
                })
                .sum()
        })
        .collect()
}

/// `H0 = omega sum (b^dagger b + sum_p c^dagger c) + Omega sum_links (G - N0)^2`
/// plus the configured global offset; diagonal in the Fock basis.
pub fn build_h0(cfg: &ChainConfig) -> Result<CMatrix> {
    let basis = FockBasis::new(cfg)?;
    basis.dense_guard()?;
    let pen = penalty_diagonal(cfg, &basis);
    Ok(CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        basis.dim(),
        (0..basis.dim()).map(|s| Complex64::new(cfg.omega * s.count_ones() as f64 + pen[s] + cfg.offset, 0.0)),
    )))
}

fn hopping(ops: &Ops, cfg: &ChainConfig) -> CMatrix {
    let sy = sigma_y();
    let mut a = Fop::default();
    for l in 0..cfg.n_links() {
        let (left, right) = (ModeKind::Site(l), ModeKind::Site(l + 1));
        let (cl, cr) = (ModeKind::Left(l), ModeKind::Right(l));
        for al in 0..2 {
            a = a.add(&ops.ad(left, al).product(&ops.a(cl, al)));
            a = a.add(&ops.ad(cr, al).product(&ops.a(right, al)));
            for mu in 0..2 {
                a = a.add(&ops.ad(left, al).product(&ops.ad(cl, mu)).scale(sy[al][mu]));
                a = a.add(&ops.a(cr, mu).product(&ops.a(right, al)).scale(sy[mu][al]));
            }
        }
    }
    let v = a.adjoint().add(&a);
    ops.dense(&v.scale(Complex64::new(cfg.j0, 0.0)))
}

/// `V = J0 sum { b^dagger c_L + c_R^dagger b + sum_mu [b^dagger sigma^y c_L^dagger + c_R sigma^y b] } + h.c.`
pub fn build_v(cfg: &ChainConfig) -> Result<CMatrix> {
    let ops = Ops::new(cfg)?;
    Ok(hopping(&ops, cfg))
}

/// Site gauge generators `G^a(i) = R^a(i-1,i) + (1/2) b^dagger sigma^a b + L^a(i,i+1)`
/// for every site, `a = x, y, z`.
pub fn site_generators(cfg: &ChainConfig) -> Result<Vec<[CMatrix; 3]>> {
    let ops = Ops::new(cfg)?;
    Ok((0..cfg.n_sites)
        .map(|i| {
            Letter::ALL.map(|a| {
                let mut g = ops.spin(ModeKind::Site(i), a);
                if i > 0 {
                    g = g.add(&ops.spin(ModeKind::Right(i - 1), a));
                }
                if i < cfg.n_links() {
                    g = g.add(&ops.spin(ModeKind::Left(i), a));
                }
                ops.dense(&g)
            })
        })
        .collect())
}

/// Link `U(1)` generators `G(i,i+1) = n_L(i) + n_R(i+1)`.
pub fn link_generators(cfg: &ChainConfig) -> Result<Vec<CMatrix>> {
    let ops = Ops::new(cfg)?;
    Ok((0..cfg.n_links()).map(|l| ops.dense(&ops.link_occupation(l))).collect())
}

/// An operator on the penalty-free subspace, indexed by `states`.
#[derive(Debug, Clone)]
pub struct SubspaceOperator {
    pub states: Vec<usize>,
    pub matrix: CMatrix,
}

impl SubspaceOperator {
    /// Restriction of a full Fock-space operator.
    pub fn restrict(op: &CMatrix, states: &[usize]) -> Self {
        let n = states.len();
        let matrix = CMatrix::from_fn(n, n, |r, c| op[(states[r], states[c])]);
        SubspaceOperator { states: states.to_vec(), matrix }
    }

    /// Sub-block on the listed positions of `states`.
    pub fn block(&self, positions: &[usize]) -> CMatrix {
        let n = positions.len();
        CMatrix::from_fn(n, n, |r, c| self.matrix[(positions[r], positions[c])])
    }
}

/// Basis states with exactly `N0` excitations on every link.
pub fn penalty_free_states(cfg: &ChainConfig) -> Result<Vec<usize>> {
    let basis = FockBasis::new(cfg)?;
    let pen = penalty_diagonal(cfg, &basis);
    Ok((0..basis.dim()).filter(|&s| pen[s] == 0.0).collect())
}

/// Second-order effective operator
/// `P V Q (E0 - H0)^{-1} Q V P`, symmetrized over the two energies of the
/// external states. Energies are those of the penalty term plus the offset;
/// the mode frequency only labels excitation-number sectors and is left out.
pub fn effective_hamiltonian(cfg: &ChainConfig) -> Result<SubspaceOperator> {
    let ops = Ops::new(cfg)?;
    let v = hopping(&ops, cfg);
    let energy: Vec<f64> = penalty_diagonal(cfg, &ops.basis).into_iter().map(|e| e + cfg.offset).collect();
    let p = penalty_free_states(cfg)?;
    let threshold = DEGENERACY_THRESHOLD * cfg.big_omega.max(cfg.j0.abs());
    let in_p: Vec<bool> = {
        let mut m = vec![false; ops.basis.dim()];
        for &s in &p {
            m[s] = true;
        }
        m
    };
    let q: Vec<usize> = (0..ops.basis.dim()).filter(|&s| !in_p[s]).collect();
    for &a in &p {
        for &b in &q {
            let gap = (energy[a] - energy[b]).abs();
            if v[(b, a)].norm() > 0.0 && gap < threshold {
                return Err(Error::DegenerateDenominator { gap, threshold });
            }
        }
    }
    let n = p.len();
    let mut h = CMatrix::zeros(n, n);
    for (r, &a) in p.iter().enumerate() {
        for (c, &b) in p.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &k in &q {
                let w = v[(a, k)] * v[(k, b)];
                if w != Complex64::new(0.0, 0.0) {
                    acc += w * 0.5 * (1.0 / (energy[a] - energy[k]) + 1.0 / (energy[b] - energy[k]));
                }
            }
            h[(r, c)] = acc;
        }
    }
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(SubspaceOperator { states: p, matrix: h })
}

/// Exact effective Hamiltonian of `H0 + V` on the penalty-free subspace:
/// the low-energy eigenvectors are mapped onto the subspace by the unitary
/// polar factor of their projection, and their energies carried along.
pub fn exact_effective_hamiltonian(cfg: &ChainConfig) -> Result<SubspaceOperator> {
    let ops = Ops::new(cfg)?;
    let v = hopping(&ops, cfg);
    let diag: Vec<Complex64> =
        penalty_diagonal(cfg, &ops.basis).into_iter().map(|e| Complex64::new(e + cfg.offset, 0.0)).collect();
    let h = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)) + v;
    let spectrum = Spectrum::of(&h)?;
    let p = penalty_free_states(cfg)?;
    let n = p.len();
    if n < spectrum.dim() {
        let gap = spectrum.values[n] - spectrum.values[n - 1];
        let threshold = DEGENERACY_THRESHOLD * cfg.big_omega.max(cfg.j0.abs());
        if gap < threshold {
            return Err(Error::DegenerateDenominator { gap, threshold });
        }
    }
    let a = CMatrix::from_fn(n, n, |r, c| spectrum.vectors[(p[r], c)]);
    let gram = Spectrum::of(&(a.adjoint() * &a))?;
    if gram.values[0] < DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateDenominator { gap: gram.values[0], threshold: DEGENERACY_THRESHOLD });
    }
    let polar = &a * gram.map(|x| Complex64::new(1.0 / x.sqrt(), 0.0));
    let lambda = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        spectrum.values[..n].iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    let heff = &polar * lambda * polar.adjoint();
    let heff = (&heff + heff.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(SubspaceOperator { states: p, matrix: heff })
}

/// The closed form `-(2 J0^2 / Omega) [H_int + h.c. + sum_i n_b(i) (n_R(i) + n_L(i))]` with
/// `H_int = sum b^dagger [c_L c_R^dagger + sigma^y c_L^dagger c_R sigma^y] b`,
/// restricted to the penalty-free subspace.
pub fn closed_form(cfg: &ChainConfig) -> Result<SubspaceOperator> {
    let ops = Ops::new(cfg)?;
    let (hint, density) = closed_form_parts(&ops, cfg);
    let pref = Complex64::new(-2.0 * cfg.j0 * cfg.j0 / cfg.big_omega, 0.0);
    let full = (&hint + hint.adjoint() + density) * pref;
    Ok(SubspaceOperator::restrict(&full, &penalty_free_states(cfg)?))
}

/// `(H_int without h.c., density-density operator)`.
fn closed_form_parts(ops: &Ops, cfg: &ChainConfig) -> (CMatrix, CMatrix) {
    let sy = sigma_y();
    let mut hint = Fop::default();
    let mut density = Fop::default();
    for l in 0..cfg.n_links() {
        let (left, right) = (ModeKind::Site(l), ModeKind::Site(l + 1));
        let (cl, cr) = (ModeKind::Left(l), ModeKind::Right(l));
        for al in 0..2 {
            for be in 0..2 {
                let outer = |mid: Fop| ops.ad(left, al).product(&mid).product(&ops.a(right, be));
                hint = hint.add(&outer(ops.a(cl, al).product(&ops.ad(cr, be))));
                for mu in 0..2 {
                    for nu in 0..2 {
                        let w = sy[al][mu] * sy[nu][be];
                        if w != Complex64::new(0.0, 0.0) {
                            hint = hint.add(&outer(ops.ad(cl, mu).product(&ops.a(cr, nu))).scale(w));
                        }
                    }
                }
            }
        }
        density = density.add(&ops.n(left).product(&ops.n(cl))).add(&ops.n(right).product(&ops.n(cr)));
    }
    (ops.dense(&hint), ops.dense(&density))
}

/// Local operators a frequency renormalization or an on-site interaction can
/// absorb: identity, mode numbers, double occupancies, and the density and
/// spin-exchange couplings of each site with its adjacent link ends.
fn local_operators(ops: &Ops, cfg: &ChainConfig) -> Vec<CMatrix> {
    let mut out = vec![Fop::identity()];
    for i in 0..cfg.n_sites {
        let site = ModeKind::Site(i);
        out.push(ops.n(site));
        out.push(ops.ad(site, 0).product(&ops.a(site, 0)).product(&ops.ad(site, 1)).product(&ops.a(site, 1)));
        let mut ends = Vec::new();
        if i > 0 {
            ends.push(ModeKind::Right(i - 1));
        }
        if i < cfg.n_links() {
            ends.push(ModeKind::Left(i));
        }
        for end in ends {
            out.push(ops.n(end));
            out.push(ops.n(site).product(&ops.n(end)));
            out.push(
                Letter::ALL
                    .iter()
                    .fold(Fop::default(), |acc, &a| acc.add(&ops.spin(site, a).product(&ops.spin(end, a)))),
            );
        }
    }
    out.iter().map(|f| ops.dense(f)).collect()
}

fn frobenius(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Splits `r` into its orthogonal projection onto the span of `basis` and
/// the remainder. The first basis element is treated as the identity and
/// its component is left out of the returned projection.
fn project(r: &CMatrix, basis: &[CMatrix]) -> (CMatrix, CMatrix) {
    let mut ortho: Vec<CMatrix> = Vec::new();
    for b in basis {
        let mut v = b.clone();
        for e in &ortho {
            v -= e * frobenius(e, &v);
        }
        let norm = frobenius(&v, &v).re.sqrt();
        if norm > 1e-9 {
            ortho.push(v / Complex64::new(norm, 0.0));
        }
    }
    let mut local = CMatrix::zeros(r.nrows(), r.ncols());
    let mut rest = r.clone();
    for (k, e) in ortho.iter().enumerate() {
        let part = e * frobenius(e, r);
        rest -= &part;
        if k > 0 {
            local += part;
        }
    }
    (local, rest)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    /// `J0 / Omega`.
    pub ratio: f64,
    /// `||H_exact - H_closed - local||_op / ||H_closed||_op` in the sector.
    pub deviation: f64,
    /// `||local||_op / ||H_closed||_op`: the on-site density and spin terms,
    /// constant removed, by which the effective operator differs from the
    /// closed form.
    pub density_norm: f64,
    /// Same comparison with the second-order operator in place of the exact one.
    pub second_order_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub const CSV_HEADER: &'static str = "ratio,deviation,density_norm";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.ratio, r.deviation, r.density_norm));
        }
        out
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].deviation < w[0].deviation)
    }
}

/// Positions within the penalty-free subspace holding `sector` excitations.
fn sector_positions(states: &[usize], sector: usize) -> Vec<usize> {
    states.iter().enumerate().filter(|(_, s)| s.count_ones() as usize == sector).map(|(k, _)| k).collect()
}

fn compare_one(cfg: &ChainConfig) -> Result<CompareRow> {
    let ops = Ops::new(cfg)?;
    let closed = closed_form(cfg)?;
    let sel = sector_positions(&closed.states, cfg.sector);
    if sel.is_empty() {
        return Err(Error::InvalidParameter(format!("no penalty-free states with {} excitations", cfg.sector)));
    }
    let hc = closed.block(&sel);
    let local: Vec<CMatrix> =
        local_operators(&ops, cfg).iter().map(|o| SubspaceOperator::restrict(o, &closed.states).block(&sel)).collect();
    let scale = operator_norm(&hc);
    let measure = |h: &SubspaceOperator| {
        let (loc, rest) = project(&(h.block(&sel) - &hc), &local);
        if scale == 0.0 {
            (0.0, 0.0)
        } else {
            (operator_norm(&rest) / scale, operator_norm(&loc) / scale)
        }
    };
    let (deviation, density_norm) = measure(&exact_effective_hamiltonian(cfg)?);
    let (second_order_deviation, _) = measure(&effective_hamiltonian(cfg)?);
    Ok(CompareRow { ratio: cfg.ratio(), deviation, density_norm, second_order_deviation })
}

/// Compares the effective operators with the closed form at `J0 = ratio * Omega`
/// for each ratio. Points run in parallel; rows keep the input order.
pub fn compare_effective(cfg: &ChainConfig, ratios: &[f64]) -> Result<CompareReport> {
    let rows = ratios
        .par_iter()
        .map(|&r| compare_one(&ChainConfig { j0: r * cfg.big_omega, ..cfg.clone() }))
        .collect::<Result<Vec<_>>>()?;
    Ok(CompareReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::commutator;

    #[test]
    fn basis_layout() {
        let b = FockBasis::new(&ChainConfig::minimal(0.1, 1.0)).unwrap();
        assert_eq!(b.modes().len(), 8);
        assert_eq!(b.dim(), 256);
        let cfg = ChainConfig { n_sites: 4, ..ChainConfig::minimal(0.1, 1.0) };
        assert!(matches!(FockBasis::new(&cfg), Err(Error::DimensionGuard { .. })));
    }

    #[test]
    fn fermionic_anticommutation() {
        let b = FockBasis::new(&ChainConfig::minimal(0.1, 1.0)).unwrap();
        let m0 = b.modes()[0];
        let m5 = b.modes()[5];
        let a0 = b.annihilator(m0).unwrap();
        let a5 = b.annihilator(m5).unwrap();
        assert!((&a0 * &a5 + &a5 * &a0).camax() < 1e-15);
        let id = CMatrix::identity(256, 256);
        assert!((&a5 * a5.adjoint() + a5.adjoint() * &a5 - id).camax() < 1e-15);
    }

    #[test]
    fn symbolic_products_match_dense() {
        let cfg = ChainConfig::minimal(0.1, 1.0);
        let ops = Ops::new(&cfg).unwrap();
        let (x, y) = (ModeKind::Site(1), ModeKind::Left(0));
        let word = ops.dense(&ops.ad(x, 1).product(&ops.a(y, 0)));
        let ax = ops.basis.annihilator(Mode { kind: x, spin: 1 }).unwrap();
        let ay = ops.basis.annihilator(Mode { kind: y, spin: 0 }).unwrap();
        assert!((word - ax.adjoint() * ay).camax() < 1e-15);
    }

    #[test]
    fn h0_vacuum_and_filled_links() {
        let cfg = ChainConfig { omega: 0.0, ..ChainConfig::minimal(0.1, 3.0) };
        let h0 = build_h0(&cfg).unwrap();
        assert_eq!(h0[(0, 0)].re, 3.0);
        for s in penalty_free_states(&cfg).unwrap() {
            assert_eq!(h0[(s, s)].re, 0.0);
        }
        assert!(h0.diagonal().iter().all(|x| x.re >= 0.0));
    }

    #[test]
    fn hopping_is_hermitian_and_changes_link_occupation() {
        let cfg = ChainConfig::minimal(0.3, 1.0);
        let v = build_v(&cfg).unwrap();
        assert!(crate::linalg::hermiticity_defect(&v) < 1e-12);
        let g = &link_generators(&cfg).unwrap()[0];
        for r in 0..256 {
            for c in 0..256 {
                if v[(r, c)].norm() > 0.0 {
                    assert_eq!((g[(r, r)].re - g[(c, c)].re).abs(), 1.0);
                }
            }
        }
    }

    #[test]
    fn hopping_is_su2_invariant() {
        let cfg = ChainConfig::minimal(0.3, 1.0);
        let h = build_v(&cfg).unwrap() + build_h0(&cfg).unwrap();
        for gens in site_generators(&cfg).unwrap() {
            for g in &gens {
                assert!(commutator(&h, g).camax() < 1e-10);
            }
        }
    }

    #[test]
    fn effective_scaling_and_zero_hopping() {
        let base = ChainConfig::minimal(0.05, 1.0);
        let n = |c: &ChainConfig| operator_norm(&effective_hamiltonian(c).unwrap().matrix);
        let h1 = n(&base);
        let h2 = n(&ChainConfig { j0: 0.1, ..base.clone() });
        let h3 = n(&ChainConfig { big_omega: 2.0, ..base.clone() });
        assert!((h2 / h1 - 4.0).abs() < 1e-10);
        assert!((h3 / h1 - 0.5).abs() < 1e-10);
        let zero = effective_hamiltonian(&ChainConfig { j0: 0.0, ..base }).unwrap();
        assert_eq!(zero.matrix.camax(), 0.0);
    }

    #[test]
    fn hopping_part_of_closed_form_is_exact() {
        // the second-order operator differs from the closed form only by local terms
        let cfg = ChainConfig::minimal(0.01, 1.0);
        let row = compare_one(&cfg).unwrap();
        assert!(row.second_order_deviation < 1e-10);
        assert!(row.density_norm > 0.1);
    }

    #[test]
    fn effective_operators_are_gauge_invariant() {
        let cfg = ChainConfig::minimal(0.05, 1.0);
        let gens = site_generators(&cfg).unwrap();
        let links = link_generators(&cfg).unwrap();
        for h in [effective_hamiltonian(&cfg).unwrap(), exact_effective_hamiltonian(&cfg).unwrap()] {
            for g in gens.iter().flatten().chain(links.iter()) {
                let gp = SubspaceOperator::restrict(g, &h.states).matrix;
                assert!(commutator(&h.matrix, &gp).camax() < 1e-9);
            }
        }
    }

    #[test]
    fn deviations_ignore_energy_offset() {
        let base = ChainConfig::minimal(0.05, 1.0);
        let a = compare_one(&base).unwrap();
        let b = compare_one(&ChainConfig { offset: 3.5, ..base }).unwrap();
        assert!((a.deviation - b.deviation).abs() < 1e-9);
        assert!((a.density_norm - b.density_norm).abs() < 1e-9);
    }

    #[test]
    fn deviation_shrinks_with_ratio() {
        let r = compare_effective(&ChainConfig::minimal(0.1, 1.0), &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(r.strictly_decreasing());
        assert!(r.rows.iter().all(|row| row.deviation < 3.0 * row.ratio));
        assert!(r.to_csv().starts_with("ratio,deviation,density_norm\n0.1,"));
    }

    #[test]
    fn density_term_is_diagonal() {
        let ops = Ops::new(&ChainConfig::minimal(0.1, 1.0)).unwrap();
        let (_, d) = closed_form_parts(&ops, &ChainConfig::minimal(0.1, 1.0));
        let off = &d - CMatrix::from_diagonal(&d.diagonal());
        assert_eq!(off.camax(), 0.0);
    }

    #[test]
    fn degenerate_denominator_guard() {
        let cfg = ChainConfig { big_omega: 1e-300, ..ChainConfig::minimal(0.1, 1.0) };
        assert!(matches!(effective_hamiltonian(&cfg), Err(Error::DegenerateDenominator { .. })));
        let bad = ChainConfig { big_omega: 0.0, ..ChainConfig::minimal(0.1, 1.0) };
        assert!(effective_hamiltonian(&bad).is_err());
    }
}
