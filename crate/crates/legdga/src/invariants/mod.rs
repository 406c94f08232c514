//! Augmentations, monodromy orbits, linearized homology over GF(2), and
//! the single-generator degree-0 homology presentation.

mod linalg;
mod upoly;

pub use linalg::BitMatrix;
pub use upoly::{q_poly, upoly_gcd, UPoly2};

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::cone::{ConeDga, ConeFlavor};
use crate::dga::{Dga, DgaMorphism};
use crate::error::{Error, Result, ValidationReport, ViolationKind};
use crate::freealg::{require_same_genset, GenId, GenMap, GenSet, Poly};

/// Augmentation searches scan all 2^n assignments to the degree-0
/// generators; n is capped here.
pub const MAX_AUGMENTATION_VARIABLES: usize = 30;

/// An algebra map to Z2: 1 on the unit, the stored value on degree-0
/// generators, 0 on every generator of nonzero degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Augmentation {
    gens: Arc<GenSet>,
    ones: Vec<GenId>,
}

impl Augmentation {
    /// Builds an assignment from the generators sent to 1; they must all
    /// have degree 0.
    pub fn new(gens: &Arc<GenSet>, mut ones: Vec<GenId>) -> Result<Augmentation> {
        ones.sort();
        ones.dedup();
        for &id in &ones {
            if gens.degree(id) != 0 {
                return Err(Error::DomainMismatch(format!(
                    "augmentation sends `{}` (degree {}) to 1; only degree-0 generators may be augmented",
                    gens.name(id),
                    gens.degree(id)
                )));
            }
        }
        Ok(Augmentation {
            gens: Arc::clone(gens),
            ones,
        })
    }

    pub fn genset(&self) -> &Arc<GenSet> {
        &self.gens
    }

    /// Generators sent to 1, in height order.
    pub fn ones(&self) -> &[GenId] {
        &self.ones
    }

    pub fn value(&self, id: GenId) -> bool {
        self.ones.binary_search(&id).is_ok()
    }

    /// Evaluates the algebra-map extension on a polynomial.
    pub fn eval(&self, p: &Poly) -> Result<bool> {
        require_same_genset(p.genset(), &self.gens, "augmentation evaluation")?;
        let mut acc = false;
        for m in p.terms() {
            let term = m.factors().iter().all(|&g| self.value(g));
            acc ^= term;
        }
        Ok(acc)
    }

    /// Checks `eps(dc) = 0` for every generator of `d`.
    pub fn validate_for(&self, d: &Dga) -> Result<ValidationReport> {
        require_same_genset(d.genset(), &self.gens, "augmentation validation")?;
        let mut report = ValidationReport::new();
        for id in d.genset().ids() {
            if self.eval(d.diff_of(id))? {
                report.push(
                    ViolationKind::Augmentation,
                    d.genset().name(id),
                    format!("eps(d {}) = 1", d.genset().name(id)),
                );
            }
        }
        Ok(report)
    }

    /// The stable text form: the sorted list of generators sent to 1.
    pub fn render(&self) -> String {
        let names: Vec<&str> = self.ones.iter().map(|&id| self.gens.name(id)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// The degree-0 generators of a DGA in height order, with each
/// differential compiled to per-monomial bitmasks for fast evaluation: a
/// monomial evaluates to 1 exactly when its mask is contained in the
/// assignment, and monomials with a factor of nonzero degree never
/// contribute.
struct CompiledEval {
    vars: Vec<GenId>,
    polys: Vec<Vec<u32>>,
}

impl CompiledEval {
    fn new(gens: &Arc<GenSet>, polys_in: &[&Poly]) -> Result<CompiledEval> {
        let vars: Vec<GenId> = gens.ids().filter(|&g| gens.degree(g) == 0).collect();
        if vars.len() > MAX_AUGMENTATION_VARIABLES {
            return Err(Error::ResourceBound(format!(
                "{} degree-0 generators; the brute-force augmentation search is capped at {}",
                vars.len(),
                MAX_AUGMENTATION_VARIABLES
            )));
        }
        let mut bit_of = vec![None; gens.len()];
        for (i, &v) in vars.iter().enumerate() {
            bit_of[v.index()] = Some(i as u32);
        }
        let polys = polys_in
            .iter()
            .map(|p| {
                p.terms()
                    .iter()
                    .filter_map(|m| {
                        let mut mask = 0u32;
                        for &g in m.factors() {
                            match bit_of[g.index()] {
                                Some(b) => mask |= 1 << b,
                                None => return None, // nonzero degree: evaluates to 0
                            }
                        }
                        Some(mask)
                    })
                    .collect()
            })
            .collect();
        Ok(CompiledEval { vars, polys })
    }

    fn all_vanish(&self, assign: u32) -> bool {
        self.polys.iter().all(|masks| {
            let residual = masks
                .iter()
                .fold(false, |acc, &m| acc ^ (m & assign == m));
            !residual
        })
    }
}

/// Exhaustively searches all 2^n assignments of Z2 values to the degree-0
/// generators and returns those annihilating every differential, in
/// binary-counting order on the height-ordered generators.
pub fn find_augmentations(d: &Dga) -> Result<Vec<Augmentation>> {
    find_augmentations_jobs(d, 1)
}

/// Like [`find_augmentations`], scanning disjoint assignment ranges on
/// `jobs` threads. The output does not depend on `jobs`.
pub fn find_augmentations_jobs(d: &Dga, jobs: usize) -> Result<Vec<Augmentation>> {
    let gens = d.genset();
    let diffs: Vec<&Poly> = gens.ids().map(|id| d.diff_of(id)).collect();
    let compiled = CompiledEval::new(gens, &diffs)?;
    let n = compiled.vars.len();
    let total: u64 = 1 << n;
    let jobs = jobs.max(1).min(total as usize).max(1);

    let hits: Vec<u32> = if jobs == 1 {
        (0..total)
            .map(|a| a as u32)
            .filter(|&a| compiled.all_vanish(a))
            .collect()
    } else {
        let chunk = total.div_ceil(jobs as u64);
        let compiled = &compiled;
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..jobs as u64)
                .map(|j| {
                    s.spawn(move || {
                        let lo = j * chunk;
                        let hi = ((j + 1) * chunk).min(total);
                        (lo..hi)
                            .map(|a| a as u32)
                            .filter(|&a| compiled.all_vanish(a))
                            .collect::<Vec<u32>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("augmentation worker panicked"))
                .collect()
        })
    };

    hits.into_iter()
        .map(|mask| {
            let ones = compiled
                .vars
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &g)| g)
                .collect();
            Augmentation::new(gens, ones)
        })
        .collect()
}

/// The partition of the augmentations of `d` into orbits of the pullback
/// action `eps -> eps . mu`.
#[derive(Debug, Clone)]
pub struct OrbitDecomposition {
    orbits: Vec<Vec<Augmentation>>,
}

impl OrbitDecomposition {
    pub fn orbits(&self) -> &[Vec<Augmentation>] {
        &self.orbits
    }

    pub fn total(&self) -> usize {
        self.orbits.iter().map(|o| o.len()).sum()
    }

    pub fn fixed_points(&self) -> usize {
        self.orbits.iter().filter(|o| o.len() == 1).count()
    }

    /// Cycle lengths with multiplicities, longest first.
    pub fn cycle_multiset(&self) -> Vec<(usize, usize)> {
        let mut by_len: BTreeMap<usize, usize> = BTreeMap::new();
        for o in &self.orbits {
            *by_len.entry(o.len()).or_default() += 1;
        }
        by_len.into_iter().rev().map(|(l, c)| (c, l)).collect()
    }
}

/// Partitions the augmentations of `d` under `eps -> eps . mu`. Fails if
/// `mu` is not a chain endomorphism of `d`, if some pullback is not an
/// augmentation, or if the action is not a permutation.
pub fn monodromy_orbits(d: &Dga, mu: &DgaMorphism) -> Result<OrbitDecomposition> {
    if mu.source() != d || mu.target() != d {
        return Err(Error::DomainMismatch(
            "monodromy must be an endomorphism of the given DGA".into(),
        ));
    }
    mu.validate().into_result()?;

    let augs = find_augmentations(d)?;
    let gens = d.genset();
    // pulling back along mu only needs the images of the degree-0 generators
    let images: Vec<&Poly> = gens.ids().map(|id| mu.map().image(id)).collect();
    let compiled = CompiledEval::new(gens, &images)?;
    let mask_of = |a: &Augmentation| -> u32 {
        let mut m = 0;
        for (i, &v) in compiled.vars.iter().enumerate() {
            if a.value(v) {
                m |= 1 << i;
            }
        }
        m
    };
    let index: HashMap<u32, usize> = augs
        .iter()
        .enumerate()
        .map(|(i, a)| (mask_of(a), i))
        .collect();

    let mut next = Vec::with_capacity(augs.len());
    let mut seen = vec![false; augs.len()];
    for a in &augs {
        let assign = mask_of(a);
        let mut pulled = 0u32;
        for (i, &v) in compiled.vars.iter().enumerate() {
            let val = compiled.polys[v.index()]
                .iter()
                .fold(false, |acc, &m| acc ^ (m & assign == m));
            if val {
                pulled |= 1 << i;
            }
        }
        let Some(&j) = index.get(&pulled) else {
            let mut r = ValidationReport::new();
            r.push(
                ViolationKind::Augmentation,
                a.render(),
                "pullback along the monodromy is not an augmentation".to_string(),
            );
            return Err(Error::Invalid(r));
        };
        if seen[j] {
            let mut r = ValidationReport::new();
            r.push(
                ViolationKind::Augmentation,
                a.render(),
                "the pullback action is not a permutation".to_string(),
            );
            return Err(Error::Invalid(r));
        }
        seen[j] = true;
        next.push(j);
    }

    let mut visited = vec![false; augs.len()];
    let mut orbits = Vec::new();
    for start in 0..augs.len() {
        if visited[start] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut cur = start;
        loop {
            visited[cur] = true;
            orbit.push(augs[cur].clone());
            cur = next[cur];
            if cur == start {
                break;
            }
        }
        orbits.push(orbit);
    }
    Ok(OrbitDecomposition { orbits })
}

/// The GF(2) chain complex spanned by the generators, with the
/// `eps`-conjugated differential truncated to its length-1 part.
#[derive(Debug, Clone)]
pub struct LinearizedComplex {
    gens: Arc<GenSet>,
    basis: BTreeMap<i64, Vec<GenId>>,
    /// `mats[k]` is the matrix of `d_k: C_k -> C_{k-1}`; rows are indexed
    /// by the degree k-1 basis, columns by the degree k basis.
    mats: BTreeMap<i64, BitMatrix>,
}

impl LinearizedComplex {
    pub fn basis(&self, degree: i64) -> &[GenId] {
        self.basis.get(&degree).map_or(&[], |v| v)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.basis.keys().copied()
    }

    pub fn matrix(&self, degree: i64) -> Option<&BitMatrix> {
        self.mats.get(&degree)
    }

    pub fn rank(&self, degree: i64) -> usize {
        self.mats.get(&degree).map_or(0, |m| m.rank())
    }

    /// The differential of one basis generator, as basis ids of the next
    /// degree down.
    pub fn column(&self, id: GenId) -> Vec<GenId> {
        let k = self.gens.degree(id);
        let Some(col) = self
            .basis
            .get(&k)
            .and_then(|b| b.iter().position(|&g| g == id))
        else {
            return Vec::new();
        };
        let below = self.basis(k - 1);
        match self.mats.get(&k) {
            Some(m) => (0..below.len())
                .filter(|&r| m.get(r, col))
                .map(|r| below[r])
                .collect(),
            None => Vec::new(),
        }
    }
}

/// Conjugates the differential by `g -> g + eps(g)`, keeps the length-1
/// words, and packages the result as per-degree GF(2) matrices. The
/// constant term of every conjugated differential must vanish (that is
/// exactly `eps` being an augmentation) and `d^2 = 0` is verified on the
/// matrices.
///
/// The conjugated polynomial is never expanded: a word contributes `g_j`
/// exactly when every other factor evaluates to 1 under `eps`, so one scan
/// per word suffices.
pub fn linearize(d: &Dga, eps: &Augmentation) -> Result<LinearizedComplex> {
    let gens = d.genset();
    require_same_genset(eps.genset(), gens, "linearization")?;
    eps.validate_for(d)?.into_result()?;

    let mut basis: BTreeMap<i64, Vec<GenId>> = BTreeMap::new();
    for id in gens.ids() {
        basis.entry(gens.degree(id)).or_default().push(id);
    }
    let pos: HashMap<GenId, usize> = basis
        .values()
        .flat_map(|v| v.iter().enumerate().map(|(i, &g)| (g, i)))
        .collect();

    let mut mats: BTreeMap<i64, BitMatrix> = basis
        .iter()
        .map(|(&k, cols)| {
            let rows = basis.get(&(k - 1)).map_or(0, |b| b.len());
            Ok((k, BitMatrix::zero(rows, cols.len())?))
        })
        .collect::<Result<_>>()?;

    for id in gens.ids() {
        let k = gens.degree(id);
        let col = pos[&id];
        let mut constant = false;
        for m in d.diff_of(id).terms() {
            let fs = m.factors();
            let zeros: Vec<usize> = (0..fs.len()).filter(|&i| !eps.value(fs[i])).collect();
            match zeros.as_slice() {
                [] => {
                    // every factor evaluates to 1: the word contributes its
                    // constant part and one linear term per position
                    constant ^= true;
                    for &g in fs {
                        let mat = mats.get_mut(&k).expect("degree present");
                        mat.flip(pos[&g], col);
                    }
                }
                [j] => {
                    let mat = mats.get_mut(&k).expect("degree present");
                    mat.flip(pos[&fs[*j]], col);
                }
                _ => {}
            }
        }
        if constant {
            let mut r = ValidationReport::new();
            r.push(
                ViolationKind::Augmentation,
                gens.name(id),
                "conjugated differential has a nonzero constant term".to_string(),
            );
            return Err(Error::Invalid(r));
        }
    }

    // d_k . d_{k+1} = 0 as matrices
    for (&k, upper) in &mats {
        if let Some(lower) = mats.get(&(k - 1)) {
            if !lower.mul(upper).is_zero() {
                let mut r = ValidationReport::new();
                r.push(
                    ViolationKind::DifferentialSquare,
                    format!("degree {k}"),
                    "linearized d^2 is nonzero".to_string(),
                );
                return Err(Error::Invalid(r));
            }
        }
    }

    Ok(LinearizedComplex {
        gens: Arc::clone(gens),
        basis,
        mats,
    })
}

/// Homology ranks `H_k = dim ker d_k - rank d_{k+1}` by GF(2) Gaussian
/// elimination, for every degree that has generators.
pub fn homology_ranks(c: &LinearizedComplex) -> BTreeMap<i64, usize> {
    c.basis
        .iter()
        .map(|(&k, b)| {
            let rank_k = c.rank(k);
            let rank_up = c.rank(k + 1);
            (k, b.len() - rank_k - rank_up)
        })
        .collect()
}

/// Substitutes one variable `x` for every generator of a polynomial whose
/// factors all have degree 0: a word of length `l` becomes `x^l`.
pub fn collapse_to_univariate(p: &Poly) -> Result<UPoly2> {
    let gens = p.genset();
    let mut out = UPoly2::zero();
    for m in p.terms() {
        for &g in m.factors() {
            if gens.degree(g) != 0 {
                return Err(Error::DomainMismatch(format!(
                    "cannot collapse `{}` (degree {}) to the single degree-0 variable",
                    gens.name(g),
                    gens.degree(g)
                )));
            }
        }
        out = out.add(&UPoly2::monomial(m.len()));
    }
    Ok(out)
}

/// The degree-0 homology presentation computed by
/// [`reduce_ch0_single_generator`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ch0Presentation {
    /// All degree-0 generators were identified to a single variable `x`;
    /// the algebra is `Z2[x]/(gcd)`. `relations` are the collapsed nonzero
    /// relations before taking the gcd, deduplicated and sorted.
    SingleGenerator {
        relations: Vec<UPoly2>,
        gcd: UPoly2,
    },
    /// No degree-0 generators at all: the unit algebra Z2.
    Unit,
    /// The pairwise identifications do not merge all degree-0 generators
    /// into one class (or a relation escapes degree-0 words).
    NotReducible {
        classes: Vec<Vec<String>>,
        reason: String,
    },
}

impl Ch0Presentation {
    /// Whether the presented algebra is nonzero; `None` when the reduction
    /// did not apply.
    pub fn is_nonzero(&self) -> Option<bool> {
        match self {
            Ch0Presentation::SingleGenerator { gcd, .. } => Some(!gcd.is_one()),
            Ch0Presentation::Unit => Some(true),
            Ch0Presentation::NotReducible { .. } => None,
        }
    }
}

/// Reduces the degree-0 part of a DGA to a single-generator presentation.
///
/// The differentials of the degree-1 generators generate the degree-0
/// relation ideal. Relations of the shape `b_i + b_j` identify generators;
/// when those identifications merge every degree-0 generator into one
/// class, each remaining relation collapses to a univariate polynomial
/// (word order no longer matters) and the result is `Z2[x]/(g)` with `g`
/// the gcd of the collapsed relations. All degree-0 generators must be
/// closed.
pub fn reduce_ch0_dga(d: &Dga) -> Result<Ch0Presentation> {
    let gens = d.genset();
    let deg0: Vec<GenId> = gens.ids().filter(|&g| gens.degree(g) == 0).collect();
    for &g in &deg0 {
        if !d.diff_of(g).is_zero() {
            let mut r = ValidationReport::new();
            r.push(
                ViolationKind::Structure,
                gens.name(g),
                format!("degree-0 generator is not closed: d {} = {}", gens.name(g), d.diff_of(g)),
            );
            return Err(Error::Invalid(r));
        }
    }
    if deg0.is_empty() {
        return Ok(Ch0Presentation::Unit);
    }

    let relations: Vec<&Poly> = gens
        .ids()
        .filter(|&g| gens.degree(g) == 1)
        .map(|g| d.diff_of(g))
        .collect();

    // union-find over the degree-0 generators, driven by binomials b_i + b_j
    let mut parent: Vec<usize> = (0..deg0.len()).collect();
    let slot: HashMap<GenId, usize> = deg0.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    fn root(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut remaining: Vec<&Poly> = Vec::new();
    for rel in relations {
        let as_pair = match rel.terms() {
            [m0, m1] => match (m0.factors(), m1.factors()) {
                ([g0], [g1]) => slot.get(g0).copied().zip(slot.get(g1).copied()),
                _ => None,
            },
            _ => None,
        };
        match as_pair {
            Some((i, j)) => {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                parent[ri] = rj;
            }
            None => {
                if !rel.is_zero() {
                    remaining.push(rel);
                }
            }
        }
    }

    let root0 = root(&mut parent, 0);
    let merged = (0..deg0.len()).all(|i| root(&mut parent, i) == root0);
    if !merged {
        let mut classes: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for (i, &g) in deg0.iter().enumerate() {
            classes
                .entry(root(&mut parent, i))
                .or_default()
                .push(gens.name(g).to_string());
        }
        return Ok(Ch0Presentation::NotReducible {
            classes: classes.into_values().collect(),
            reason: "pairwise identifications leave more than one class of degree-0 generators"
                .to_string(),
        });
    }

    let mut collapsed = Vec::new();
    for rel in remaining {
        match collapse_to_univariate(rel) {
            Ok(u) => {
                if !u.is_zero() {
                    collapsed.push(u);
                }
            }
            Err(_) => {
                return Ok(Ch0Presentation::NotReducible {
                    classes: vec![deg0.iter().map(|&g| gens.name(g).to_string()).collect()],
                    reason: format!("relation `{rel}` involves generators of nonzero degree"),
                })
            }
        }
    }
    collapsed.sort();
    collapsed.dedup();
    let gcd = collapsed
        .iter()
        .fold(UPoly2::zero(), |acc, f| upoly_gcd(&acc, f));
    Ok(Ch0Presentation::SingleGenerator {
        relations: collapsed,
        gcd,
    })
}

/// [`reduce_ch0_dga`] restricted to torus-flavor cones, the shape the
/// reduction is designed for.
pub fn reduce_ch0_single_generator(cone: &ConeDga) -> Result<Ch0Presentation> {
    if cone.flavor() != ConeFlavor::Torus {
        return Err(Error::DomainMismatch(
            "the degree-0 reduction expects a torus-flavor cone".into(),
        ));
    }
    reduce_ch0_dga(cone.base())
}
