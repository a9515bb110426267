//! The generalized wreath product of commutative schemes over a poset.
//!
//! Points are tensored in increasing label order, so point 0 is the slowest
//! varying coordinate of `X_P`. Every matrix is materialized on demand from the
//! per-point factors; nothing of size `|X_P|^2` is cached except the primary
//! idempotents of sub-products.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{multi_kron_capped, scaled_tol, CMatrix, DEFAULT_MAX_DIM, DEFAULT_TOL};
use crate::poset::{
    enumerate_d, enumerate_e, AntiChain, DIndex, EIndex, PointSet, Poset, PosetJson,
};
use crate::scheme::{
    complete_graph_scheme, cyclic_group_scheme, dual_idempotents, scheme_from_matrices, Scheme,
    SchemeJson, DEFAULT_SEED,
};
use crate::terwilliger::{
    central_decomposition_seeded, primary_idempotent_formula, terwilliger_algebra,
    CentralDecomposition, DEFAULT_CLOSURE_MAX,
};

/// Largest `|X_P|` for which the product is re-derived from its adjacency
/// matrices as a cross-check.
pub const DEFAULT_ORACLE_MAX: usize = 256;

/// Matching tolerance between closed forms and eigenprojections.
pub const MATCH_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuildOptions {
    pub tol: f64,
    pub seed: u64,
    /// Cap on `|X_P|` for any materialized matrix.
    pub max_dim: usize,
    /// Cap on `|X_P|` for the eigenprojection cross-check; 0 disables it.
    pub oracle_max: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
            max_dim: DEFAULT_MAX_DIM,
            oracle_max: DEFAULT_ORACLE_MAX,
        }
    }
}

/// A component scheme at one point, with everything the closed forms need.
#[derive(Debug)]
pub struct Component {
    scheme: Scheme,
    base_point: usize,
    duals: Vec<CMatrix>,
    decomposition: CentralDecomposition,
    identity: CMatrix,
    ones: CMatrix,
}

impl Component {
    pub fn new(scheme: Scheme, base_point: usize, tol: f64, seed: u64) -> Result<Self> {
        let duals = dual_idempotents(&scheme, base_point)?;
        let td = terwilliger_algebra(&scheme, base_point, tol)?;
        let mut decomposition = central_decomposition_seeded(&td, tol, seed)?;
        // the closed form is exact where the split is only accurate to tol
        decomposition.idempotents[0] = primary_idempotent_formula(&scheme, base_point, tol)?;
        let n = scheme.size();
        Ok(Component {
            scheme,
            base_point,
            duals,
            decomposition,
            identity: CMatrix::identity(n),
            ones: CMatrix::ones(n),
        })
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn base_point(&self) -> usize {
        self.base_point
    }

    pub fn size(&self) -> usize {
        self.scheme.size()
    }

    pub fn d(&self) -> usize {
        self.scheme.d()
    }

    /// Number of non-primary central idempotent types.
    pub fn e(&self) -> usize {
        self.decomposition.e
    }

    pub fn decomposition(&self) -> &CentralDecomposition {
        &self.decomposition
    }

    fn a(&self, i: usize) -> &CMatrix {
        &self.scheme.adjacency()[i]
    }

    fn e_(&self, j: usize) -> &CMatrix {
        &self.scheme.idempotents()[j]
    }

    fn es(&self, i: usize) -> &CMatrix {
        &self.duals[i]
    }

    fn et(&self, l: usize) -> &CMatrix {
        &self.decomposition.idempotents[l]
    }
}

/// Component reference in the product JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SchemeRef {
    Builder { builder: BuilderKind, n: usize },
    Inline { inline: SchemeJson },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuilderKind {
    Complete,
    Cyclic,
}

impl SchemeRef {
    pub fn resolve(&self, tol: f64, seed: u64) -> Result<Scheme> {
        match self {
            SchemeRef::Builder {
                builder: BuilderKind::Complete,
                n,
            } => complete_graph_scheme(*n, tol, seed),
            SchemeRef::Builder {
                builder: BuilderKind::Cyclic,
                n,
            } => cyclic_group_scheme(*n, tol, seed),
            SchemeRef::Inline { inline } => Scheme::from_json(inline, tol, seed),
        }
    }
}

/// `{ "poset": {...}, "components": [schemeRef...], "base_points": [int...] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpecJson {
    pub poset: PosetJson,
    pub components: Vec<SchemeRef>,
    /// Defaults to point 0 of every component when omitted.
    #[serde(default)]
    pub base_points: Vec<usize>,
}

/// A poset with one component scheme and base point per point.
#[derive(Clone, Debug)]
pub struct ProductSpec {
    poset: Poset,
    components: Vec<Arc<Component>>,
}

impl ProductSpec {
    pub fn new(
        poset: Poset,
        schemes: Vec<Scheme>,
        base_points: Vec<usize>,
        tol: f64,
        seed: u64,
    ) -> Result<Self> {
        if schemes.len() != poset.len() {
            return Err(Error::Contract(format!(
                "{} components for a poset on {} points",
                schemes.len(),
                poset.len()
            )));
        }
        let base_points = if base_points.is_empty() {
            vec![0; schemes.len()]
        } else {
            base_points
        };
        if base_points.len() != schemes.len() {
            return Err(Error::Contract(format!(
                "{} base points for {} components",
                base_points.len(),
                schemes.len()
            )));
        }
        let components = schemes
            .into_iter()
            .zip(base_points)
            .map(|(s, x)| Component::new(s, x, tol, seed).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductSpec { poset, components })
    }

    pub fn from_json(json: &ProductSpecJson, tol: f64, seed: u64) -> Result<Self> {
        let poset = Poset::from_json(&json.poset)?;
        let schemes = json
            .components
            .iter()
            .map(|c| c.resolve(tol, seed))
            .collect::<Result<Vec<_>>>()?;
        ProductSpec::new(poset, schemes, json.base_points.clone(), tol, seed)
    }

    pub fn from_json_str(json: &str, tol: f64, seed: u64) -> Result<Self> {
        ProductSpec::from_json(&serde_json::from_str(json)?, tol, seed)
    }

    /// Inline form of every component.
    pub fn to_json(&self) -> ProductSpecJson {
        ProductSpecJson {
            poset: self.poset.to_json(),
            components: self
                .components
                .iter()
                .map(|c| SchemeRef::Inline {
                    inline: c.scheme.to_json(),
                })
                .collect(),
            base_points: self.components.iter().map(|c| c.base_point).collect(),
        }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn components(&self) -> &[Arc<Component>] {
        &self.components
    }

    pub fn component(&self, p: usize) -> &Component {
        &self.components[p]
    }

    /// `|X_P|`, or `None` on overflow.
    pub fn size(&self) -> Option<usize> {
        self.components
            .iter()
            .try_fold(1usize, |acc, c| acc.checked_mul(c.size()))
    }

    /// The same components on the sub-poset induced on `s`.
    pub fn induced(&self, s: PointSet) -> Result<ProductSpec> {
        let (poset, labels) = self.poset.induced(s)?;
        Ok(ProductSpec {
            poset,
            components: labels.iter().map(|&p| self.components[p].clone()).collect(),
        })
    }
}

/// A triple `(i, j, l)`; `i` and `j` index [`ProductScheme::d_indices`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub i: usize,
    pub j: usize,
    pub ell: EIndex,
}

/// Result of enumerating the index set of the central primitive idempotents.
#[derive(Clone, Debug)]
pub struct PhiReport {
    pub triples: Vec<Triple>,
    pub idempotents: Vec<CMatrix>,
    /// Candidates dropped because their idempotent vanished.
    pub rejected_zero: usize,
    /// `true` when the candidates were pairwise orthogonal idempotents summing to `I`.
    pub validated: bool,
    /// Diagnostic when validation failed and the oracle was consulted.
    pub fallback: Option<String>,
}

/// The product scheme with its index sets and closed-form valencies and
/// multiplicities.
#[derive(Debug)]
pub struct ProductScheme {
    spec: ProductSpec,
    opts: BuildOptions,
    size: usize,
    d: Vec<DIndex>,
    lookup: HashMap<DIndex, usize>,
    valencies: Vec<u64>,
    multiplicities: Vec<u64>,
    psi: Vec<(usize, usize)>,
    e_all: Vec<EIndex>,
    e_ge1: Vec<EIndex>,
    oracle_checked: bool,
    sub_primary: Mutex<HashMap<u64, Arc<CMatrix>>>,
}

/// Builds the product and, when `|X_P| <= opts.oracle_max`, checks the closed
/// forms against the scheme re-derived from the adjacency matrices.
pub fn build_product(spec: &ProductSpec, opts: BuildOptions) -> Result<ProductScheme> {
    let mut ps = ProductScheme::closed_forms(spec.clone(), opts)?;
    if ps.size <= opts.oracle_max {
        ps.oracle_check()?;
        ps.oracle_checked = true;
    }
    Ok(ps)
}

impl ProductScheme {
    /// Index sets and integer data only; no cross-check.
    pub fn closed_forms(spec: ProductSpec, opts: BuildOptions) -> Result<Self> {
        let size = spec.size().ok_or(Error::Size {
            dim: usize::MAX,
            cap: opts.max_dim,
        })?;
        if size > opts.max_dim {
            return Err(Error::Size {
                dim: size,
                cap: opts.max_dim,
            });
        }
        let poset = &spec.poset;
        let degrees: Vec<usize> = spec.components.iter().map(|c| c.d()).collect();
        let types: Vec<usize> = spec.components.iter().map(|c| c.e()).collect();
        let d = enumerate_d(poset, &degrees);
        let lookup = d.iter().cloned().enumerate().map(|(k, i)| (i, k)).collect();

        let size_of =
            |s: PointSet| -> u64 { s.iter().map(|p| spec.components[p].size() as u64).product() };
        let valencies = d
            .iter()
            .map(|i| {
                let q = i.support_set();
                i.entries()
                    .map(|(p, l)| spec.components[p].scheme.valencies()[l])
                    .product::<u64>()
                    * size_of(poset.down_set(q))
            })
            .collect();
        let multiplicities = d
            .iter()
            .map(|j| {
                let r = j.support_set();
                size_of(poset.up_set(r))
                    * j.entries()
                        .map(|(p, l)| spec.components[p].scheme.multiplicities()[l])
                        .product::<u64>()
            })
            .collect();

        let mut psi = Vec::new();
        for (a, i) in d.iter().enumerate() {
            for (b, j) in d.iter().enumerate() {
                let (q, r) = (i.support_set(), j.support_set());
                if q.is_subset(poset.up_set(r)) && r.is_subset(poset.down_set(q)) {
                    psi.push((a, b));
                }
            }
        }

        Ok(ProductScheme {
            e_all: enumerate_e(poset, &types, false),
            e_ge1: enumerate_e(poset, &types, true),
            spec,
            opts,
            size,
            d,
            lookup,
            valencies,
            multiplicities,
            psi,
            oracle_checked: false,
            sub_primary: Mutex::new(HashMap::new()),
        })
    }

    fn oracle_check(&self) -> Result<()> {
        let adjacency = self.adjacency_all()?;
        let oracle = scheme_from_matrices(&adjacency, self.opts.tol, self.opts.seed)?;
        let mut used = vec![false; self.d.len()];
        for (k, j) in self.d.iter().enumerate() {
            let e = self.idempotent(k)?;
            let hit = oracle
                .idempotents()
                .iter()
                .enumerate()
                .find(|(t, f)| !used[*t] && f.dist(&e) < MATCH_TOL)
                .map(|(t, _)| t)
                .ok_or_else(|| {
                    Error::Verification(format!(
                        "closed-form idempotent E_{j} is not an eigenprojection of the classes"
                    ))
                })?;
            used[hit] = true;
            if oracle.multiplicities()[hit] != self.multiplicities[k] {
                return Err(Error::Verification(format!(
                    "multiplicity of E_{j}: closed form {} against trace {}",
                    self.multiplicities[k],
                    oracle.multiplicities()[hit]
                )));
            }
        }
        if oracle.valencies() != self.valencies.as_slice() {
            return Err(Error::Verification(format!(
                "valencies: closed form {:?} against row sums {:?}",
                self.valencies,
                oracle.valencies()
            )));
        }
        let duals = dual_idempotents(&oracle, self.base_point())?;
        for (k, i) in self.d.iter().enumerate() {
            if self.dual(k)?.dist(&duals[k]) > 0.0 {
                return Err(Error::Verification(format!(
                    "closed-form dual idempotent E*_{i} differs from the base-point row"
                )));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &ProductSpec {
        &self.spec
    }

    pub fn poset(&self) -> &Poset {
        &self.spec.poset
    }

    pub fn options(&self) -> BuildOptions {
        self.opts
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of nontrivial classes.
    pub fn d(&self) -> usize {
        self.d.len() - 1
    }

    /// The class index set, `0` first.
    pub fn d_indices(&self) -> &[DIndex] {
        &self.d
    }

    pub fn position(&self, i: &DIndex) -> Option<usize> {
        self.lookup.get(i).copied()
    }

    pub fn valencies(&self) -> &[u64] {
        &self.valencies
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    /// Pairs of positions in [`Self::d_indices`].
    pub fn psi(&self) -> &[(usize, usize)] {
        &self.psi
    }

    pub fn e_indices(&self) -> &[EIndex] {
        &self.e_all
    }

    pub fn e_ge1(&self) -> &[EIndex] {
        &self.e_ge1
    }

    /// `true` when the closed forms were checked against the eigenprojections.
    pub fn oracle_checked(&self) -> bool {
        self.oracle_checked
    }

    /// Global index of the tuple of component base points.
    pub fn base_point(&self) -> usize {
        self.spec
            .components
            .iter()
            .fold(0, |acc, c| acc * c.size() + c.base_point)
    }

    fn comp(&self, p: usize) -> &Component {
        &self.spec.components[p]
    }

    fn up(&self, s: PointSet) -> PointSet {
        self.poset().up_set(s)
    }

    fn down(&self, s: PointSet) -> PointSet {
        self.poset().down_set(s)
    }

    fn tensor(&self, mut factor: impl FnMut(usize) -> CMatrix) -> Result<CMatrix> {
        let factors: Vec<CMatrix> = (0..self.poset().len()).map(&mut factor).collect();
        multi_kron_capped(&factors, self.opts.max_dim)
    }

    /// `block_matrix` on the points of `block` (in increasing order) tensored
    /// with `factor(p)` on every other point.
    fn tensor_with_block(
        &self,
        block: PointSet,
        block_matrix: &CMatrix,
        mut factor: impl FnMut(usize) -> CMatrix,
    ) -> Result<CMatrix> {
        let n = self.poset().len();
        let rest_points: Vec<usize> = (0..n).filter(|&p| !block.contains(p)).collect();
        let rest_factors: Vec<CMatrix> = rest_points.iter().map(|&p| factor(p)).collect();
        let rest = if rest_factors.is_empty() {
            CMatrix::identity(1)
        } else {
            multi_kron_capped(&rest_factors, self.opts.max_dim)?
        };
        let expected: usize = block.iter().map(|p| self.comp(p).size()).product();
        if block_matrix.dim() != expected {
            return Err(Error::Dimension(format!(
                "block matrix of dimension {} on points of total size {expected}",
                block_matrix.dim()
            )));
        }
        // split each global index into its block and complement coordinates
        let mut split = vec![(0usize, 0usize); self.size];
        for (x, slot) in split.iter_mut().enumerate() {
            let mut rem = x;
            let mut coords = vec![0; n];
            for p in (0..n).rev() {
                let size = self.comp(p).size();
                coords[p] = rem % size;
                rem /= size;
            }
            let (mut a, mut b) = (0, 0);
            for (p, &c) in coords.iter().enumerate() {
                if block.contains(p) {
                    a = a * self.comp(p).size() + c;
                } else {
                    b = b * self.comp(p).size() + c;
                }
            }
            *slot = (a, b);
        }
        let bm = block_matrix.as_dmatrix();
        let rm = rest.as_dmatrix();
        Ok(CMatrix::from_fn(self.size, |x, y| {
            let (ax, bx) = split[x];
            let (ay, by) = split[y];
            bm[(ax, ay)] * rm[(bx, by)]
        }))
    }

    /// `A_i`: the class on `Q`, `J` below `Q`, `I` elsewhere.
    pub fn adjacency(&self, k: usize) -> Result<CMatrix> {
        let i = &self.d[k];
        let down = self.down(i.support_set());
        self.tensor(|p| match i.label(p) {
            Some(l) => self.comp(p).a(l).clone(),
            None if down.contains(p) => self.comp(p).ones.clone(),
            None => self.comp(p).identity.clone(),
        })
    }

    /// `E_j`: `I` above `R`, the idempotent on `R`, `E_0` elsewhere.
    pub fn idempotent(&self, k: usize) -> Result<CMatrix> {
        let j = &self.d[k];
        let up = self.up(j.support_set());
        self.tensor(|p| match j.label(p) {
            Some(l) => self.comp(p).e_(l).clone(),
            None if up.contains(p) => self.comp(p).identity.clone(),
            None => self.comp(p).e_(0).clone(),
        })
    }

    /// `E_i*`: the dual idempotent on `Q`, `I` below `Q`, `E_0*` elsewhere.
    pub fn dual(&self, k: usize) -> Result<CMatrix> {
        let i = &self.d[k];
        let down = self.down(i.support_set());
        self.tensor(|p| match i.label(p) {
            Some(l) => self.comp(p).es(l).clone(),
            None if down.contains(p) => self.comp(p).identity.clone(),
            None => self.comp(p).es(0).clone(),
        })
    }

    pub fn adjacency_all(&self) -> Result<Vec<CMatrix>> {
        (0..self.d.len()).map(|k| self.adjacency(k)).collect()
    }

    pub fn idempotents_all(&self) -> Result<Vec<CMatrix>> {
        (0..self.d.len()).map(|k| self.idempotent(k)).collect()
    }

    pub fn duals_all(&self) -> Result<Vec<CMatrix>> {
        (0..self.d.len()).map(|k| self.dual(k)).collect()
    }

    /// The product as a [`Scheme`] built from its closed forms.
    pub fn as_scheme(&self) -> Result<Scheme> {
        Ok(Scheme::from_parts(
            self.adjacency_all()?,
            self.valencies.clone(),
            self.idempotents_all()?,
            self.multiplicities.clone(),
        ))
    }

    /// Primary idempotent as a sum over classes of the dual side.
    pub fn primary_from_duals(&self) -> Result<CMatrix> {
        let mut sum = CMatrix::zeros(self.size);
        for i in &self.d {
            let down = self.down(i.support_set());
            sum += &self.tensor(|p| {
                let c = self.comp(p);
                match i.label(p) {
                    Some(l) => {
                        let w = c.size() as f64 / c.scheme.valencies()[l] as f64;
                        (&(c.es(l) * c.e_(0)) * c.es(l)).scale_real(w)
                    }
                    None if down.contains(p) => c.e_(0).clone(),
                    None => c.es(0).clone(),
                }
            })?;
        }
        Ok(sum)
    }

    /// Primary idempotent as a sum over primitive idempotents.
    pub fn primary_from_idempotents(&self) -> Result<CMatrix> {
        let mut sum = CMatrix::zeros(self.size);
        for j in &self.d {
            let up = self.up(j.support_set());
            sum += &self.tensor(|p| {
                let c = self.comp(p);
                match j.label(p) {
                    Some(l) => {
                        let w = c.size() as f64 / c.scheme.multiplicities()[l] as f64;
                        (&(c.e_(l) * c.es(0)) * c.e_(l)).scale_real(w)
                    }
                    None if up.contains(p) => c.es(0).clone(),
                    None => c.e_(0).clone(),
                }
            })?;
        }
        Ok(sum)
    }

    /// `(E_j)'`: the idempotent on `R`, `E_0` below `R`, `I` elsewhere.
    pub fn e_prime(&self, k: usize) -> Result<CMatrix> {
        let j = &self.d[k];
        let down = self.down(j.support_set());
        self.tensor(|p| match j.label(p) {
            Some(l) => self.comp(p).e_(l).clone(),
            None if down.contains(p) => self.comp(p).e_(0).clone(),
            None => self.comp(p).identity.clone(),
        })
    }

    /// `(E_i*)'`: `E_0*` above `Q`, the dual idempotent on `Q`, `I` elsewhere.
    pub fn estar_prime(&self, k: usize) -> Result<CMatrix> {
        let i = &self.d[k];
        let up = self.up(i.support_set());
        self.tensor(|p| match i.label(p) {
            Some(l) => self.comp(p).es(l).clone(),
            None if up.contains(p) => self.comp(p).es(0).clone(),
            None => self.comp(p).identity.clone(),
        })
    }

    fn f_down_factor(&self, q: PointSet, j: &DIndex, p: usize) -> CMatrix {
        let r = j.support_set();
        let dq = self.down(q);
        match j.label(p) {
            Some(l) => self.comp(p).e_(l).clone(),
            None if dq.contains(p) && !self.up(r).contains(p) => self.comp(p).e_(0).clone(),
            None => self.comp(p).identity.clone(),
        }
    }

    fn f_up_star_factor(&self, r: PointSet, i: &DIndex, p: usize) -> CMatrix {
        let q = i.support_set();
        let outside = self.up(r).difference(q.union(self.down(q)));
        match i.label(p) {
            Some(l) => self.comp(p).es(l).clone(),
            None if outside.contains(p) => self.comp(p).es(0).clone(),
            None => self.comp(p).identity.clone(),
        }
    }

    /// `F_{Down(Q), j}` for `Supp(j) ⊆ Down(Q)`.
    pub fn f_down(&self, q: AntiChain, k: usize) -> Result<CMatrix> {
        let j = &self.d[k];
        if !j.support_set().is_subset(self.down(q.points())) {
            return Err(Error::Contract(format!(
                "support of {j} is not below {}",
                q.points()
            )));
        }
        self.tensor(|p| self.f_down_factor(q.points(), j, p))
    }

    /// `F*_{Up(R), i}` for `Supp(i) ⊆ Up(R)`.
    pub fn f_up_star(&self, r: AntiChain, k: usize) -> Result<CMatrix> {
        let i = &self.d[k];
        if !i.support_set().is_subset(self.up(r.points())) {
            return Err(Error::Contract(format!(
                "support of {i} is not above {}",
                r.points()
            )));
        }
        self.tensor(|p| self.f_up_star_factor(r.points(), i, p))
    }

    pub fn in_psi(&self, i: usize, j: usize) -> bool {
        let (q, r) = (self.d[i].support_set(), self.d[j].support_set());
        q.is_subset(self.up(r)) && r.is_subset(self.down(q))
    }

    /// `F*_{Up(Supp j), i} F_{Down(Supp i), j}` for `(i, j)` in Psi, multiplied
    /// point by point.
    pub fn f_star(&self, i: usize, j: usize) -> Result<CMatrix> {
        if !self.in_psi(i, j) {
            return Err(Error::Contract(format!(
                "({}, {}) is not in Psi",
                self.d[i], self.d[j]
            )));
        }
        let (ii, jj) = (&self.d[i], &self.d[j]);
        let (q, r) = (ii.support_set(), jj.support_set());
        self.tensor(|p| &self.f_up_star_factor(r, ii, p) * &self.f_down_factor(q, jj, p))
    }

    fn check_e_index(&self, ell: &EIndex) -> Result<()> {
        for (p, l) in ell.entries() {
            if p >= self.poset().len() || l > self.comp(p).e() {
                return Err(Error::Contract(format!("{ell} is not a valid type index")));
            }
        }
        if !self.poset().is_antichain(ell.support_set()) {
            return Err(Error::Contract(format!(
                "{ell} is not supported on an anti-chain"
            )));
        }
        Ok(())
    }

    /// `E_0*` above `S`, the central idempotents on `S`, `E_0` below `S`.
    pub fn hat_f(&self, ell: &EIndex) -> Result<CMatrix> {
        self.check_e_index(ell)?;
        let s = ell.support_set();
        let (up, down) = (self.up(s), self.down(s));
        self.tensor(|p| {
            let c = self.comp(p);
            match ell.label(p) {
                Some(l) => c.et(l).clone(),
                None if up.contains(p) => c.es(0).clone(),
                None if down.contains(p) => c.e_(0).clone(),
                None => c.identity.clone(),
            }
        })
    }

    /// `P \ (Up(R ∪ S) ∪ S ∪ Down(Q ∪ S))`.
    pub fn p_prime(&self, q: PointSet, r: PointSet, s: PointSet) -> PointSet {
        let removed = self.up(r.union(s)).union(s).union(self.down(q.union(s)));
        self.poset().points().difference(removed)
    }

    /// The candidate predicate: `(i, j)` in Psi, `l` with labels `>= 1`,
    /// `S` disjoint from `Q ∪ R`, no point of `Q` above `S` and no point of
    /// `R` below `S`.
    pub fn is_phi_candidate(&self, t: &Triple) -> bool {
        if !self.in_psi(t.i, t.j) || t.ell.entries().any(|(_, l)| l == 0) {
            return false;
        }
        let (q, r, s) = self.supports(t);
        s.is_disjoint(q.union(r)) && self.up(s).is_disjoint(q) && self.down(s).is_disjoint(r)
    }

    fn supports(&self, t: &Triple) -> (PointSet, PointSet, PointSet) {
        (
            self.d[t.i].support_set(),
            self.d[t.j].support_set(),
            t.ell.support_set(),
        )
    }

    fn require_candidate(&self, t: &Triple) -> Result<()> {
        self.check_e_index(&t.ell)?;
        if !self.is_phi_candidate(t) {
            return Err(Error::Contract(format!(
                "({}, {}, {}) fails the index predicate",
                self.d[t.i], self.d[t.j], t.ell
            )));
        }
        Ok(())
    }

    /// Primary idempotent of the sub-product on `s`, in the coordinates of `s`.
    pub fn sub_primary(&self, s: PointSet) -> Result<Arc<CMatrix>> {
        if s.is_empty() {
            return Ok(Arc::new(CMatrix::identity(1)));
        }
        if let Some(m) = self.sub_primary.lock().expect("cache lock").get(&s.bits()) {
            return Ok(m.clone());
        }
        let m = if s == self.poset().points() {
            self.primary_from_duals()?
        } else {
            let sub = ProductScheme::closed_forms(
                self.spec.induced(s)?,
                BuildOptions {
                    oracle_max: 0,
                    ..self.opts
                },
            )?;
            sub.primary_from_duals()?
        };
        let m = Arc::new(m);
        self.sub_primary
            .lock()
            .expect("cache lock")
            .insert(s.bits(), m.clone());
        Ok(m)
    }

    /// Number of classes of the sub-product on `s`, counting the trivial one.
    pub fn d_count(&self, s: PointSet) -> usize {
        if s.is_empty() {
            return 1;
        }
        let (poset, labels) = self.poset().induced(s).expect("subset of the poset");
        let degrees: Vec<usize> = labels.iter().map(|&p| self.comp(p).d()).collect();
        enumerate_d(&poset, &degrees).len()
    }

    /// The primary idempotent of the sub-product on `P'`, `E_0*` above `P'`,
    /// `E_0` below `P'`, `I` elsewhere.
    pub fn tilde_f(&self, t: &Triple) -> Result<CMatrix> {
        self.require_candidate(t)?;
        let (q, r, s) = self.supports(t);
        let block = self.p_prime(q, r, s);
        let up = self.up(block).difference(block);
        let down = self.down(block).difference(block);
        let sub = self.sub_primary(block)?;
        self.tensor_with_block(block, &sub, |p| {
            let c = self.comp(p);
            if up.contains(p) {
                c.es(0).clone()
            } else if down.contains(p) {
                c.e_(0).clone()
            } else {
                c.identity.clone()
            }
        })
    }

    /// Closed form of the central primitive idempotent of a triple.
    ///
    /// Outside `P'` the factor is the dual idempotent on `Q`, the primitive
    /// idempotent on `R`, the central idempotent on `S`, `I` on
    /// `Down(Q) ∩ Up(R)`, `E_0*` on the rest of `Up(R) ∪ Up(S)` and `E_0` on
    /// the rest of `Down(Q) ∪ Down(S)`.
    pub fn tilde_e(&self, t: &Triple) -> Result<CMatrix> {
        self.require_candidate(t)?;
        let (ii, jj) = (&self.d[t.i], &self.d[t.j]);
        let (q, r, s) = self.supports(t);
        let block = self.p_prime(q, r, s);
        let between = self.down(q).intersection(self.up(r));
        let upper = self.up(r).union(self.up(s));
        let lower = self.down(q).union(self.down(s));
        let mut uncovered = None;
        let sub = self.sub_primary(block)?;
        let m = self.tensor_with_block(block, &sub, |p| {
            let c = self.comp(p);
            if let Some(l) = ii.label(p) {
                c.es(l).clone()
            } else if let Some(l) = jj.label(p) {
                c.e_(l).clone()
            } else if let Some(l) = t.ell.label(p) {
                c.et(l).clone()
            } else if between.contains(p) {
                c.identity.clone()
            } else if upper.contains(p) {
                c.es(0).clone()
            } else if lower.contains(p) {
                c.e_(0).clone()
            } else {
                uncovered = Some(p);
                c.identity.clone()
            }
        })?;
        if let Some(p) = uncovered {
            return Err(Error::Contract(format!("point {p} is outside every group")));
        }
        Ok(m)
    }

    /// `|D(P')| * prod_{p in S} n_{p, l_p}`.
    pub fn predicted_module_dim(&self, t: &Triple) -> usize {
        let (q, r, s) = self.supports(t);
        self.d_count(self.p_prime(q, r, s))
            * t.ell
                .entries()
                .map(|(p, l)| self.comp(p).decomposition.dims[l])
                .product::<usize>()
    }

    /// All triples satisfying the candidate predicate, in Psi order then type order.
    pub fn phi_candidates(&self) -> Vec<Triple> {
        let mut out = Vec::new();
        for &(i, j) in &self.psi {
            for ell in &self.e_ge1 {
                let t = Triple {
                    i,
                    j,
                    ell: ell.clone(),
                };
                if self.is_phi_candidate(&t) {
                    out.push(t);
                }
            }
        }
        out
    }

    /// Candidates with a nonzero idempotent, validated as a complete family of
    /// orthogonal idempotents. On failure the brute-force center decides.
    pub fn enumerate_phi(&self) -> Result<PhiReport> {
        let mut triples = Vec::new();
        let mut idempotents = Vec::new();
        let mut rejected_zero = 0;
        for t in self.phi_candidates() {
            let e = self.tilde_e(&t)?;
            if e.is_zero(self.opts.tol) {
                rejected_zero += 1;
            } else {
                triples.push(t);
                idempotents.push(e);
            }
        }
        match family_defect(&idempotents, 1e-8) {
            None => Ok(PhiReport {
                triples,
                idempotents,
                rejected_zero,
                validated: true,
                fallback: None,
            }),
            Some(why) => self.phi_fallback(triples, idempotents, rejected_zero, why),
        }
    }

    fn phi_fallback(
        &self,
        triples: Vec<Triple>,
        idempotents: Vec<CMatrix>,
        rejected_zero: usize,
        why: String,
    ) -> Result<PhiReport> {
        if self.size > DEFAULT_CLOSURE_MAX {
            return Err(Error::Verification(format!(
                "candidate family invalid ({why}) and too large for the oracle"
            )));
        }
        let td = terwilliger_algebra(&self.as_scheme()?, self.base_point(), self.opts.tol)?;
        let cd = central_decomposition_seeded(&td, self.opts.tol, self.opts.seed)?;
        let mut kept_t = Vec::new();
        let mut kept_e = Vec::new();
        let mut dropped = Vec::new();
        for (t, e) in triples.into_iter().zip(idempotents) {
            if cd.position_of(&e, MATCH_TOL).is_some() {
                kept_t.push(t);
                kept_e.push(e);
            } else {
                let (q, r, s) = self.supports(&t);
                dropped.push(format!(
                    "({}, {}, {}) [Q={q} R={r} S={s}]",
                    self.d[t.i], self.d[t.j], t.ell
                ));
            }
        }
        let note = format!(
            "{why}; dropped candidates not matching the center: {}",
            dropped.join(", ")
        );
        if kept_e.len() != cd.len() || family_defect(&kept_e, 1e-8).is_some() {
            return Err(Error::Verification(format!(
                "{note}; {} of {} central idempotents matched",
                kept_e.len(),
                cd.len()
            )));
        }
        Ok(PhiReport {
            triples: kept_t,
            idempotents: kept_e,
            rejected_zero,
            validated: false,
            fallback: Some(note),
        })
    }
}

/// `None` when the matrices are pairwise orthogonal Hermitian idempotents
/// summing to `I` within `tol`, otherwise the first defect found.
pub fn family_defect(family: &[CMatrix], tol: f64) -> Option<String> {
    let n = family.first()?.dim();
    let mut sum = CMatrix::zeros(n);
    for (a, e) in family.iter().enumerate() {
        sum += e;
        let scale = e.norm().max(1.0);
        if !e.is_hermitian(scaled_tol(tol, scale)) {
            return Some(format!("member {a} is not Hermitian"));
        }
        for (b, f) in family.iter().enumerate().skip(a) {
            let prod = e * f;
            let defect = if a == b { prod.dist(e) } else { prod.norm() };
            if defect > scaled_tol(tol, scale) {
                return Some(format!(
                    "members {a} and {b} violate orthogonality by {defect:e}"
                ));
            }
        }
    }
    let defect = sum.dist(&CMatrix::identity(n));
    if defect > scaled_tol(tol, (n as f64).sqrt()) {
        return Some(format!("members sum to I only within {defect:e}"));
    }
    None
}
