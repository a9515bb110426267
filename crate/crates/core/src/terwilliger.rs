//! The Terwilliger algebra of a scheme by brute-force closure, its center,
//! and the Wedderburn data of its central primitive idempotents.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    algebra_closure, center_commuting_with, idempotent_split_commutative, scaled_tol, CMatrix,
    MatrixSpace,
};
use crate::scheme::{dual_idempotents, Scheme, DEFAULT_SEED};

/// Largest `|X|` for which the algebra is generated by closure.
pub const DEFAULT_CLOSURE_MAX: usize = 256;

/// Gate for accepting `sqrt(dim ETE)` as an integer.
pub const WEDDERBURN_GATE: f64 = 1e-4;

/// The algebra generated by the adjacency matrices and the dual idempotents
/// with respect to one base point.
#[derive(Clone, Debug)]
pub struct TerwilligerData {
    base_point: usize,
    generators: Vec<CMatrix>,
    primary: CMatrix,
    algebra: MatrixSpace,
    center: MatrixSpace,
}

#[derive(Clone, Debug)]
pub struct CentralDecomposition {
    /// `idempotents[0]` is the primary one.
    pub idempotents: Vec<CMatrix>,
    /// Dimension of the irreducible module of each type.
    pub dims: Vec<usize>,
    /// Multiplicity of each type in the standard module.
    pub mults: Vec<usize>,
    pub ranks: Vec<usize>,
    /// Number of non-primary types.
    pub e: usize,
}

/// Wedderburn bookkeeping of a decomposition against its algebra.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WedderburnSummary {
    pub algebra_dim: usize,
    pub sum_of_squares: usize,
    pub sum_of_ranks: usize,
    pub ambient_dim: usize,
    pub types: Vec<TypeSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeSummary {
    pub n: usize,
    pub mult: usize,
    pub rank: usize,
}

impl WedderburnSummary {
    pub fn is_consistent(&self) -> bool {
        self.algebra_dim == self.sum_of_squares
            && self.sum_of_ranks == self.ambient_dim
            && self.types.iter().all(|t| t.rank == t.n * t.mult)
    }
}

impl TerwilligerData {
    pub fn base_point(&self) -> usize {
        self.base_point
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.algebra.ambient_dim()
    }

    pub fn algebra(&self) -> &MatrixSpace {
        &self.algebra
    }

    pub fn center(&self) -> &MatrixSpace {
        &self.center
    }

    /// Adjacency matrices followed by dual idempotents.
    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    /// Largest commutator norm of `m` with a generator, relative to `|m|`.
    pub fn centrality_defect(&self, m: &CMatrix) -> f64 {
        let scale = m.norm().max(1.0);
        self.generators
            .iter()
            .map(|g| m.commutator(g).norm() / (scale * g.norm().max(1.0)))
            .fold(0.0, f64::max)
    }

    /// Relative distance of `m` from the algebra.
    pub fn membership_defect(&self, m: &CMatrix) -> f64 {
        self.algebra.residual(m)
    }
}

/// Builds the algebra by closure and extracts its center. The center is the
/// commutant of the generators inside the algebra.
pub fn terwilliger_algebra(s: &Scheme, x: usize, tol: f64) -> Result<TerwilligerData> {
    terwilliger_algebra_capped(s, x, tol, DEFAULT_CLOSURE_MAX)
}

pub fn terwilliger_algebra_capped(
    s: &Scheme,
    x: usize,
    tol: f64,
    max_dim: usize,
) -> Result<TerwilligerData> {
    if s.size() > max_dim {
        return Err(Error::Resource(format!(
            "algebra closure on {} points exceeds the cap of {max_dim}",
            s.size()
        )));
    }
    let duals = dual_idempotents(s, x)?;
    let mut generators: Vec<CMatrix> = s.adjacency().to_vec();
    generators.extend(duals);
    let algebra = algebra_closure(&generators, tol)?;
    let center = center_commuting_with(&algebra, &generators, tol)?;
    Ok(TerwilligerData {
        base_point: x,
        generators,
        primary: s.idempotents()[0].clone(),
        algebra,
        center,
    })
}

/// Central primitive idempotents with their Wedderburn dimensions and
/// multiplicities, using the default seed.
pub fn central_decomposition(td: &TerwilligerData, tol: f64) -> Result<CentralDecomposition> {
    central_decomposition_seeded(td, tol, DEFAULT_SEED)
}

/// The primary idempotent comes first; the rest are ordered by rank, then
/// module dimension, then their traces against the generators.
pub fn central_decomposition_seeded(
    td: &TerwilligerData,
    tol: f64,
    seed: u64,
) -> Result<CentralDecomposition> {
    let idempotents = idempotent_split_commutative(&td.center, tol, seed)?;
    let primary = idempotents
        .iter()
        .position(|e| !(e * &td.primary).is_zero(1e-6))
        .ok_or_else(|| Error::Numerical("no central idempotent meets J".into()))?;

    let mut items = Vec::with_capacity(idempotents.len());
    for (k, e) in idempotents.into_iter().enumerate() {
        let rank = e.rank(1e-8);
        let n = module_dimension(&e, &td.algebra, tol)?;
        if n == 0 || rank % n != 0 {
            return Err(Error::Numerical(format!(
                "rank {rank} is not a multiple of the module dimension {n}"
            )));
        }
        let signature: Vec<i64> = td
            .generators
            .iter()
            .map(|g| ((&e * g).trace().re * 1e6).round() as i64)
            .collect();
        items.push((k != primary, rank, n, signature, e));
    }
    items.sort_by(|a, b| (a.0, a.1, a.2, &a.3).cmp(&(b.0, b.1, b.2, &b.3)));

    let mut out = CentralDecomposition {
        idempotents: Vec::new(),
        dims: Vec::new(),
        mults: Vec::new(),
        ranks: Vec::new(),
        e: items.len() - 1,
    };
    for (_, rank, n, _, e) in items {
        out.idempotents.push(e);
        out.dims.push(n);
        out.mults.push(rank / n);
        out.ranks.push(rank);
    }
    Ok(out)
}

/// `sqrt(dim E T E)`, rejected unless within the gate of an integer.
fn module_dimension(e: &CMatrix, algebra: &MatrixSpace, tol: f64) -> Result<usize> {
    let mut corner = MatrixSpace::empty(algebra.ambient_dim(), tol);
    for b in algebra.basis() {
        corner.insert(&(&(e * b) * e))?;
    }
    let root = (corner.dim() as f64).sqrt();
    if (root - root.round()).abs() >= WEDDERBURN_GATE {
        return Err(Error::Numerical(format!(
            "corner algebra of dimension {} is not a full matrix algebra",
            corner.dim()
        )));
    }
    Ok(root.round() as usize)
}

impl CentralDecomposition {
    pub fn len(&self) -> usize {
        self.idempotents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idempotents.is_empty()
    }

    pub fn summary(&self, td: &TerwilligerData) -> WedderburnSummary {
        WedderburnSummary {
            algebra_dim: td.dim(),
            sum_of_squares: self.dims.iter().map(|n| n * n).sum(),
            sum_of_ranks: self.ranks.iter().sum(),
            ambient_dim: td.ambient_dim(),
            types: (0..self.len())
                .map(|k| TypeSummary {
                    n: self.dims[k],
                    mult: self.mults[k],
                    rank: self.ranks[k],
                })
                .collect(),
        }
    }

    /// Index of the idempotent within `tol` of `m`, if any.
    pub fn position_of(&self, m: &CMatrix, tol: f64) -> Option<usize> {
        self.idempotents.iter().position(|e| e.dist(m) < tol)
    }
}

/// The primary central idempotent by its two closed forms, through the
/// valencies and through the multiplicities. Both must agree.
pub fn primary_idempotent_formula(s: &Scheme, x: usize, tol: f64) -> Result<CMatrix> {
    let (by_valency, by_multiplicity) = primary_idempotent_pair(s, x)?;
    let gap = by_valency.dist(&by_multiplicity);
    if gap > scaled_tol(tol, by_valency.norm()) {
        return Err(Error::Numerical(format!(
            "the two primary idempotent expressions differ by {gap:e}"
        )));
    }
    Ok(by_valency)
}

/// `(sum |X|/k_i E_i* E_0 E_i*, sum |X|/m_j E_j E_0* E_j)`.
pub fn primary_idempotent_pair(s: &Scheme, x: usize) -> Result<(CMatrix, CMatrix)> {
    let n = s.size() as f64;
    let duals = dual_idempotents(s, x)?;
    let e0 = &s.idempotents()[0];
    let mut by_valency = CMatrix::zeros(s.size());
    for (d, &k) in duals.iter().zip(s.valencies()) {
        by_valency += &(&(d * e0) * d).scale_real(n / k as f64);
    }
    let mut by_multiplicity = CMatrix::zeros(s.size());
    for (e, &m) in s.idempotents().iter().zip(s.multiplicities()) {
        by_multiplicity += &(&(e * &duals[0]) * e).scale_real(n / m as f64);
    }
    Ok((by_valency, by_multiplicity))
}
