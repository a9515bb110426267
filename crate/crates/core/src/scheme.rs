//! Commutative association schemes: axiom checking, Bose-Mesner data
//! (valencies, primitive idempotents, multiplicities) and dual idempotents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{joint_spectrum, orthonormalize, CMatrix, C64};

/// Seed used for generic combinations when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x7e57_5eed;

/// Gate for treating a computed valency or multiplicity as an integer.
pub const INTEGRALITY_TOL: f64 = 1e-7;

/// A commutative association scheme with its cached spectral data.
#[derive(Clone, Debug)]
pub struct Scheme {
    size: usize,
    adjacency: Vec<CMatrix>,
    valencies: Vec<u64>,
    idempotents: Vec<CMatrix>,
    multiplicities: Vec<u64>,
    base_point: Option<usize>,
    dual_idempotents: Vec<CMatrix>,
}

/// JSON form: `{ "n": 3, "classes": [[0,1,2],[2,0,1],[1,2,0]] }`, the class
/// label of each ordered pair of points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeJson {
    pub n: usize,
    pub classes: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomCheck {
    /// 0 is well-formedness (0/1 entries, size, nonzero classes); 1-5 are the scheme axioms.
    pub axiom: u8,
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchemeReport {
    pub size: usize,
    pub d: usize,
    pub axioms: Vec<AxiomCheck>,
    pub valencies: Vec<u64>,
    pub multiplicities: Vec<u64>,
}

impl SchemeReport {
    pub fn is_valid(&self) -> bool {
        self.axioms.iter().all(|a| a.passed) && !self.multiplicities.is_empty()
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.axioms.iter().find(|a| !a.passed)
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("scheme on {} points, d = {}\n", self.size, self.d);
        out.push_str("axiom  check                      status  residual\n");
        for a in &self.axioms {
            out.push_str(&format!(
                "{:<6} {:<26} {:<7} {:.6e}\n",
                a.axiom,
                a.name,
                if a.passed { "pass" } else { "FAIL" },
                a.residual
            ));
        }
        if !self.valencies.is_empty() {
            out.push_str(&format!("valencies      {:?}\n", self.valencies));
        }
        if !self.multiplicities.is_empty() {
            out.push_str(&format!("multiplicities {:?}\n", self.multiplicities));
        }
        out
    }
}

const AXIOM_NAMES: [&str; 6] = [
    "well-formed 0/1 classes",
    "A_0 is the identity",
    "classes sum to J",
    "closed under transpose",
    "products lie in the span",
    "classes commute",
];

/// Checks the five axioms of a commutative association scheme without
/// computing spectral data.
pub fn check_axioms(mats: &[CMatrix], tol: f64) -> SchemeReport {
    let size = mats.first().map_or(0, CMatrix::dim);
    let mut axioms = Vec::with_capacity(6);
    let mut push = |axiom: u8, residual: f64, ok: bool| {
        axioms.push(AxiomCheck {
            axiom,
            name: AXIOM_NAMES[axiom as usize],
            passed: ok,
            residual,
        })
    };

    let same_dim = mats.iter().all(|m| m.dim() == size);
    let zero_one = mats.iter().all(|m| m.is_zero_one(tol));
    let nonzero = mats.iter().all(|m| m.norm() > 0.5);
    let well_formed = size >= 2 && same_dim && zero_one && nonzero && !mats.is_empty();
    push(0, if well_formed { 0.0 } else { 1.0 }, well_formed);
    if !well_formed {
        return SchemeReport {
            size,
            d: mats.len().saturating_sub(1),
            axioms,
            valencies: Vec::new(),
            multiplicities: Vec::new(),
        };
    }

    let id = CMatrix::identity(size);
    let r1 = mats[0].dist(&id);
    push(1, r1, r1 <= tol);

    let mut sum = CMatrix::zeros(size);
    for m in mats {
        sum += m;
    }
    let r2 = sum.dist(&CMatrix::ones(size));
    push(2, r2, r2 <= tol);

    let r3 = mats
        .iter()
        .map(|m| {
            let t = m.transpose();
            mats.iter().map(|o| t.dist(o)).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    push(3, r3, r3 <= tol);

    let span = orthonormalize(mats, tol).expect("dimensions checked");
    let mut r4 = 0.0_f64;
    let mut r5 = 0.0_f64;
    for a in mats {
        for b in mats {
            let ab = a * b;
            r4 = r4.max(span.residual(&ab));
            r5 = r5.max(ab.dist(&(b * a)));
        }
    }
    push(4, r4, r4 <= tol);
    push(5, r5, r5 <= tol);

    SchemeReport {
        size,
        d: mats.len() - 1,
        axioms,
        valencies: Vec::new(),
        multiplicities: Vec::new(),
    }
}

/// Axiom table completed with valencies and multiplicities when the axioms hold.
pub fn scheme_report(mats: &[CMatrix], tol: f64, seed: u64) -> Result<SchemeReport> {
    let mut report = check_axioms(mats, tol);
    if report.first_failure().is_none() {
        let s = scheme_from_matrices(mats, tol, seed)?;
        report.valencies = s.valencies;
        report.multiplicities = s.multiplicities;
    }
    Ok(report)
}

fn round_checked(x: f64, what: &str) -> Result<u64> {
    let r = x.round();
    if (x - r).abs() >= INTEGRALITY_TOL || r < 1.0 {
        return Err(Error::Numerical(format!(
            "{what} {x} is not a positive integer"
        )));
    }
    Ok(r as u64)
}

/// Verifies the axioms and computes valencies, primitive idempotents and
/// multiplicities. Idempotents are ordered with `E_0 = J/|X|` first and the
/// rest by their eigenvalue tuple on the adjacency basis.
pub fn scheme_from_matrices(mats: &[CMatrix], tol: f64, seed: u64) -> Result<Scheme> {
    let report = check_axioms(mats, tol);
    if let Some(f) = report.first_failure() {
        return Err(Error::NotAScheme {
            axiom: f.axiom,
            name: f.name,
            residual: f.residual,
        });
    }
    let size = report.size;

    let mut valencies = Vec::with_capacity(mats.len());
    for (i, a) in mats.iter().enumerate() {
        let rows: Vec<f64> = (0..size)
            .map(|x| (0..size).map(|y| a[(x, y)].re).sum())
            .collect();
        if rows.iter().any(|r| (r - rows[0]).abs() > tol * size as f64) {
            return Err(Error::Numerical(format!(
                "class {i} has non-constant row sums"
            )));
        }
        valencies.push(round_checked(rows[0], "valency")?);
    }

    let spectrum = joint_spectrum(mats, tol, seed)?;
    let mut idempotents = spectrum.projections;
    if idempotents.len() != mats.len() {
        return Err(Error::Numerical(format!(
            "found {} primitive idempotents for {} classes",
            idempotents.len(),
            mats.len()
        )));
    }
    let e0 = CMatrix::ones(size).scale_real(1.0 / size as f64);
    let pos = idempotents
        .iter()
        .position(|e| e.dist(&e0) < 1e-7)
        .ok_or_else(|| Error::Numerical("J/|X| is not among the idempotents".into()))?;
    let first = idempotents.remove(pos);
    idempotents.insert(0, first);

    let multiplicities = idempotents
        .iter()
        .map(|e| round_checked(e.trace().re, "multiplicity"))
        .collect::<Result<Vec<_>>>()?;

    Ok(Scheme {
        size,
        adjacency: mats.to_vec(),
        valencies,
        idempotents,
        multiplicities,
        base_point: None,
        dual_idempotents: Vec::new(),
    })
}

/// Dual idempotents with respect to `x`: `(E_i*)_{yy} = (A_i)_{xy}`.
pub fn dual_idempotents(s: &Scheme, x: usize) -> Result<Vec<CMatrix>> {
    if x >= s.size {
        return Err(Error::Contract(format!(
            "base point {x} is out of range for a scheme on {} points",
            s.size
        )));
    }
    Ok(s.adjacency
        .iter()
        .map(|a| CMatrix::diagonal(&(0..s.size).map(|y| a[(x, y)]).collect::<Vec<C64>>()))
        .collect())
}

/// `{I, J - I}` on `n` points.
pub fn complete_graph_scheme(n: usize, tol: f64, seed: u64) -> Result<Scheme> {
    if n < 2 {
        return Err(Error::Contract("a scheme needs at least two points".into()));
    }
    let id = CMatrix::identity(n);
    scheme_from_matrices(&[id.clone(), &CMatrix::ones(n) - &id], tol, seed)
}

/// The thin scheme of `Z_n`: class `g` is the permutation matrix of `y -> y + g`.
pub fn cyclic_group_scheme(n: usize, tol: f64, seed: u64) -> Result<Scheme> {
    if n < 2 {
        return Err(Error::Contract("a scheme needs at least two points".into()));
    }
    let json = SchemeJson {
        n,
        classes: (0..n)
            .map(|x| (0..n).map(|y| (y + n - x) % n).collect())
            .collect(),
    };
    Scheme::from_json(&json, tol, seed)
}

/// Reads the class-matrix JSON format.
pub fn direct_import(json: &str, tol: f64, seed: u64) -> Result<Scheme> {
    let parsed: SchemeJson = serde_json::from_str(json)?;
    Scheme::from_json(&parsed, tol, seed)
}

/// Adjacency matrices described by a class-label matrix, in label order.
pub fn adjacency_from_json(json: &SchemeJson) -> Result<Vec<CMatrix>> {
    let n = json.n;
    if json.classes.len() != n || json.classes.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("class matrix must be {n}x{n}")));
    }
    if n == 0 {
        return Err(Error::Parse("empty class matrix".into()));
    }
    let d = json.classes.iter().flatten().copied().max().unwrap_or(0);
    Ok((0..=d)
        .map(|i| {
            CMatrix::from_fn(n, |x, y| {
                C64::new(if json.classes[x][y] == i { 1.0 } else { 0.0 }, 0.0)
            })
        })
        .collect())
}

impl Scheme {
    pub fn from_matrices(mats: &[CMatrix], tol: f64, seed: u64) -> Result<Self> {
        scheme_from_matrices(mats, tol, seed)
    }

    pub fn from_json(json: &SchemeJson, tol: f64, seed: u64) -> Result<Self> {
        scheme_from_matrices(&adjacency_from_json(json)?, tol, seed)
    }

    /// Assembles a scheme from data already known to be correct.
    pub(crate) fn from_parts(
        adjacency: Vec<CMatrix>,
        valencies: Vec<u64>,
        idempotents: Vec<CMatrix>,
        multiplicities: Vec<u64>,
    ) -> Self {
        Scheme {
            size: adjacency[0].dim(),
            adjacency,
            valencies,
            idempotents,
            multiplicities,
            base_point: None,
            dual_idempotents: Vec::new(),
        }
    }

    /// A copy with the base point fixed and the dual idempotents cached.
    pub fn with_base_point(&self, x: usize) -> Result<Self> {
        let duals = dual_idempotents(self, x)?;
        Ok(Scheme {
            base_point: Some(x),
            dual_idempotents: duals,
            ..self.clone()
        })
    }

    /// Class-label matrix; the inverse of [`Scheme::from_json`].
    pub fn to_json(&self) -> SchemeJson {
        let n = self.size;
        let mut classes = vec![vec![0usize; n]; n];
        for (i, a) in self.adjacency.iter().enumerate() {
            for (x, row) in classes.iter_mut().enumerate() {
                for (y, c) in row.iter_mut().enumerate() {
                    if a[(x, y)].re > 0.5 {
                        *c = i;
                    }
                }
            }
        }
        SchemeJson { n, classes }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of nontrivial classes.
    pub fn d(&self) -> usize {
        self.adjacency.len() - 1
    }

    pub fn adjacency(&self) -> &[CMatrix] {
        &self.adjacency
    }

    pub fn valencies(&self) -> &[u64] {
        &self.valencies
    }

    pub fn idempotents(&self) -> &[CMatrix] {
        &self.idempotents
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    pub fn base_point(&self) -> Option<usize> {
        self.base_point
    }

    /// Present iff a base point is set.
    pub fn dual_idempotents(&self) -> Option<&[CMatrix]> {
        self.base_point.map(|_| self.dual_idempotents.as_slice())
    }

    /// `p_i(j) = tr(E_j A_i) / m_j`, the eigenvalue of `A_i` on `E_j V`.
    pub fn eigenvalue(&self, i: usize, j: usize) -> C64 {
        (&self.idempotents[j] * &self.adjacency[i]).trace() / self.multiplicities[j] as f64
    }

    /// Index of the class equal to the transpose of class `i`.
    pub fn transpose_class(&self, i: usize) -> Option<usize> {
        let t = self.adjacency[i].transpose();
        self.adjacency.iter().position(|a| a.dist(&t) < 0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_TOL;

    fn k(n: usize) -> Scheme {
        complete_graph_scheme(n, DEFAULT_TOL, DEFAULT_SEED).unwrap()
    }

    #[test]
    fn two_point_scheme() {
        let s = k(2);
        assert_eq!(s.d(), 1);
        assert_eq!(s.valencies(), &[1, 1]);
        assert_eq!(s.multiplicities(), &[1, 1]);
        let e1 = &CMatrix::identity(2) - &CMatrix::ones(2).scale_real(0.5);
        assert!(s.idempotents()[1].dist(&e1) < 1e-10);
    }

    #[test]
    fn complete_graph_on_four_points() {
        let s = k(4);
        assert_eq!(s.valencies(), &[1, 3]);
        assert_eq!(s.multiplicities(), &[1, 3]);
    }

    #[test]
    fn cyclic_three_is_thin_and_non_symmetric() {
        let s = cyclic_group_scheme(3, DEFAULT_TOL, DEFAULT_SEED).unwrap();
        assert_eq!(s.d(), 2);
        assert_eq!(s.valencies(), &[1, 1, 1]);
        assert_eq!(s.multiplicities(), &[1, 1, 1]);
        assert_eq!(s.adjacency()[1].transpose(), s.adjacency()[2]);
        assert_eq!(s.transpose_class(1), Some(2));
        assert_eq!(cyclic_group_scheme(4, DEFAULT_TOL, 1).unwrap().d(), 3);
    }

    #[test]
    fn cyclic_idempotents_match_the_discrete_fourier_transform() {
        // DFT oracle: E_k[x][y] = w^{k(x-y)} / 3
        let s = cyclic_group_scheme(3, DEFAULT_TOL, DEFAULT_SEED).unwrap();
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let dft: Vec<CMatrix> = (0..3)
            .map(|k| {
                CMatrix::from_fn(3, |x, y| {
                    w.powi((k * (x as i32 - y as i32)).rem_euclid(3)) / 3.0
                })
            })
            .collect();
        for e in s.idempotents() {
            assert!(dft.iter().any(|f| f.dist(e) < 1e-9));
        }
        assert!(s.idempotents()[0].dist(&dft[0]) < 1e-9);
    }

    #[test]
    fn small_builders_are_rejected() {
        assert!(complete_graph_scheme(1, DEFAULT_TOL, 0).is_err());
        assert!(cyclic_group_scheme(0, DEFAULT_TOL, 0).is_err());
    }

    #[test]
    fn complete_graph_two_equals_the_two_point_scheme() {
        let swap = CMatrix::from_real_rows(2, &[0., 1., 1., 0.]).unwrap();
        let s = scheme_from_matrices(&[CMatrix::identity(2), swap], DEFAULT_TOL, 9).unwrap();
        assert_eq!(s.adjacency(), k(2).adjacency());
    }

    #[test]
    fn dual_idempotents_examples() {
        let s = k(2);
        let d = dual_idempotents(&s, 0).unwrap();
        assert_eq!(d[0], CMatrix::diagonal_real(&[1., 0.]));
        assert_eq!(d[1], CMatrix::diagonal_real(&[0., 1.]));
        let d4 = dual_idempotents(&k(4), 0).unwrap();
        assert_eq!(d4[1], CMatrix::diagonal_real(&[0., 1., 1., 1.]));
        assert!(dual_idempotents(&s, 2).is_err());
        let z = cyclic_group_scheme(5, DEFAULT_TOL, 0).unwrap();
        for x in 0..5 {
            let duals = dual_idempotents(&z, x).unwrap();
            let mut sum = CMatrix::zeros(5);
            for (i, e) in duals.iter().enumerate() {
                sum += e;
                assert!(e.is_zero_one(0.0));
                for (j, f) in duals.iter().enumerate() {
                    let prod = e * f;
                    let expected = if i == j { e.clone() } else { CMatrix::zeros(5) };
                    assert_eq!(prod, expected);
                }
            }
            assert_eq!(sum, CMatrix::identity(5));
        }
    }

    #[test]
    fn idempotents_reconstruct_adjacency() {
        for s in [
            k(5),
            cyclic_group_scheme(6, DEFAULT_TOL, 3).unwrap(),
            cyclic_group_scheme(4, DEFAULT_TOL, 3).unwrap(),
        ] {
            for (i, a) in s.adjacency().iter().enumerate() {
                let mut rebuilt = CMatrix::zeros(s.size());
                for (j, e) in s.idempotents().iter().enumerate() {
                    rebuilt += &e.scale(s.eigenvalue(i, j));
                }
                assert!(rebuilt.dist(a) < 1e-8);
            }
            let total: u64 = s.multiplicities().iter().sum();
            assert_eq!(total as usize, s.size());
            let total: u64 = s.valencies().iter().sum();
            assert_eq!(total as usize, s.size());
        }
    }

    #[test]
    fn rebuilding_from_adjacency_reproduces_data() {
        let s = cyclic_group_scheme(5, DEFAULT_TOL, 11).unwrap();
        let t = scheme_from_matrices(s.adjacency(), DEFAULT_TOL, 99).unwrap();
        assert_eq!(s.valencies(), t.valencies());
        assert_eq!(s.multiplicities(), t.multiplicities());
        for (a, b) in s.idempotents().iter().zip(t.idempotents()) {
            assert!(a.dist(b) < 1e-8);
        }
    }

    #[test]
    fn axiom_violations_are_named() {
        // class 1 = {(0,1)} has no transpose partner
        let json = SchemeJson {
            n: 3,
            classes: vec![vec![0, 1, 2], vec![2, 0, 2], vec![2, 2, 0]],
        };
        let err = Scheme::from_json(&json, DEFAULT_TOL, 0).unwrap_err();
        assert!(matches!(err, Error::NotAScheme { axiom: 3, .. }), "{err}");

        let not_identity = SchemeJson {
            n: 2,
            classes: vec![vec![1, 0], vec![0, 1]],
        };
        let err = Scheme::from_json(&not_identity, DEFAULT_TOL, 0).unwrap_err();
        assert!(matches!(err, Error::NotAScheme { axiom: 1, .. }));

        let one_point = SchemeJson {
            n: 1,
            classes: vec![vec![0]],
        };
        assert!(matches!(
            Scheme::from_json(&one_point, DEFAULT_TOL, 0),
            Err(Error::NotAScheme { axiom: 0, .. })
        ));
    }

    #[test]
    fn non_commutative_classes_fail_axiom_five() {
        // the thin scheme of S_3 acting on itself is not commutative
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let compose = |a: &[usize; 3], b: &[usize; 3]| [a[b[0]], a[b[1]], a[b[2]]];
        let inverse = |a: &[usize; 3]| {
            let mut r = [0; 3];
            for (i, &v) in a.iter().enumerate() {
                r[v] = i;
            }
            r
        };
        let idx = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap();
        let classes: Vec<Vec<usize>> = perms
            .iter()
            .map(|g| {
                perms
                    .iter()
                    .map(|h| idx(&compose(&inverse(g), h)))
                    .collect()
            })
            .collect();
        let json = SchemeJson { n: 6, classes };
        let report = check_axioms(&adjacency_from_json(&json).unwrap(), DEFAULT_TOL);
        assert_eq!(report.first_failure().unwrap().axiom, 5);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let s = cyclic_group_scheme(4, DEFAULT_TOL, 0).unwrap();
        let json = serde_json::to_string(&s.to_json()).unwrap();
        let back = direct_import(&json, DEFAULT_TOL, 0).unwrap();
        assert_eq!(back.to_json(), s.to_json());
        assert_eq!(back.adjacency(), s.adjacency());
    }

    #[test]
    fn base_point_caches_duals() {
        let s = k(3);
        assert!(s.dual_idempotents().is_none());
        let b = s.with_base_point(1).unwrap();
        assert_eq!(b.base_point(), Some(1));
        assert_eq!(
            b.dual_idempotents().unwrap()[0],
            CMatrix::unit_diagonal(3, 1)
        );
    }
}
