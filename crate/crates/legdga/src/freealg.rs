//! Z2-polynomials in free non-commutative graded variables.
//!
//! A [`Poly`] is a finite set of words ([`Monomial`]s) in the generators of
//! a [`GenSet`]; presence of a word means coefficient 1. Addition is
//! symmetric difference of term sets, multiplication concatenates words and
//! cancels duplicate results mod 2. Terms are kept in a canonical order
//! (degree, then word length, then lexicographic on generator indices) so
//! equality is structural and output is deterministic.
//!
//! The module also provides algebra-map application ([`GenMap::apply`]) and
//! the twisted derivations [`gamma_twisted`] and [`gamma_k`] together with
//! the splitting sum [`omega_combinator`]. These three place their output
//! in a caller-chosen algebra: the caller supplies embeddings saying where
//! a plain prefix factor, a hat factor, and a mapped suffix land. Copy
//! tagging for mapping cones is therefore owned by the caller.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Index of a generator within its [`GenSet`]. The index doubles as the
/// height of the generator: larger index means higher in the filtration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenId(pub u32);

impl GenId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A graded generator symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i64) -> Self {
        Generator {
            name: name.into(),
            degree,
        }
    }
}

/// An ordered set of generators. List position is the height filtration:
/// later generators are higher. Shared immutably via `Arc`.
#[derive(Debug)]
pub struct GenSet {
    gens: Vec<Generator>,
    index: HashMap<String, GenId>,
}

impl PartialEq for GenSet {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens
    }
}
impl Eq for GenSet {}

/// Checks a generator name against the accepted grammar: an identifier
/// `[A-Za-z][A-Za-z0-9_'^]*`, optionally carrying a copy tag `[-]`, `[+]`
/// or `[0]` and a trailing `^` (the forms produced for mapping cones).
pub fn valid_name(name: &str) -> bool {
    let rest = match name.as_bytes() {
        [first, ..] if first.is_ascii_alphabetic() => &name[1..],
        _ => return false,
    };
    let core_len = rest
        .bytes()
        .take_while(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'\'' | b'^'))
        .count();
    let tail = &rest[core_len..];
    matches!(tail, "" | "[-]" | "[+]" | "[0]" | "[-]^" | "[+]^" | "[0]^")
}

impl GenSet {
    /// Builds a generator set, rejecting duplicate or ill-formed names.
    pub fn new(gens: Vec<Generator>) -> Result<Arc<GenSet>> {
        let mut index = HashMap::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if !valid_name(&g.name) {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("invalid generator name `{}`", g.name),
                });
            }
            if index.insert(g.name.clone(), GenId(i as u32)).is_some() {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("duplicate generator name `{}`", g.name),
                });
            }
        }
        Ok(Arc::new(GenSet { gens, index }))
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = GenId> {
        (0..self.gens.len() as u32).map(GenId)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn lookup(&self, name: &str) -> Option<GenId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: GenId) -> &str {
        &self.gens[id.index()].name
    }

    pub fn degree(&self, id: GenId) -> i64 {
        self.gens[id.index()].degree
    }
}

/// Two generator sets are interoperable when their contents agree;
/// pointer identity is only a fast path.
pub(crate) fn same_genset(a: &Arc<GenSet>, b: &Arc<GenSet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

pub(crate) fn require_same_genset(a: &Arc<GenSet>, b: &Arc<GenSet>, what: &str) -> Result<()> {
    if same_genset(a, b) {
        Ok(())
    } else {
        Err(Error::DomainMismatch(what.to_string()))
    }
}

/// A word in the generators; the empty word is the unit 1. Equality is
/// exact sequence equality: the algebra is non-commutative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: Vec<GenId>,
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial::default()
    }

    pub fn from_factors(factors: Vec<GenId>) -> Self {
        Monomial { factors }
    }

    pub fn generator(id: GenId) -> Self {
        Monomial { factors: vec![id] }
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[GenId] {
        &self.factors
    }

    pub fn degree(&self, gens: &GenSet) -> i64 {
        self.factors.iter().map(|&g| gens.degree(g)).sum()
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        factors.extend_from_slice(&self.factors);
        factors.extend_from_slice(&other.factors);
        Monomial { factors }
    }

    pub fn mentions(&self, id: GenId) -> bool {
        self.factors.contains(&id)
    }

    /// Canonical comparison key: degree, then length, then the id sequence.
    fn key(&self, gens: &GenSet) -> (i64, usize, &[GenId]) {
        (self.degree(gens), self.factors.len(), &self.factors)
    }
}

/// A Z2-polynomial: a canonically ordered, duplicate-free set of monomials
/// over a fixed generator set.
#[derive(Debug, Clone)]
pub struct Poly {
    gens: Arc<GenSet>,
    terms: Vec<Monomial>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        same_genset(&self.gens, &other.gens) && self.terms == other.terms
    }
}
impl Eq for Poly {}

impl Poly {
    pub fn zero(gens: &Arc<GenSet>) -> Poly {
        Poly {
            gens: Arc::clone(gens),
            terms: Vec::new(),
        }
    }

    pub fn one(gens: &Arc<GenSet>) -> Poly {
        Poly::from_monomials(gens, vec![Monomial::unit()])
    }

    pub fn generator(gens: &Arc<GenSet>, id: GenId) -> Poly {
        Poly::from_monomials(gens, vec![Monomial::generator(id)])
    }

    pub fn monomial(gens: &Arc<GenSet>, m: Monomial) -> Poly {
        Poly::from_monomials(gens, vec![m])
    }

    /// Canonicalizes: sorts and cancels duplicate monomials mod 2.
    pub fn from_monomials(gens: &Arc<GenSet>, mut terms: Vec<Monomial>) -> Poly {
        terms.sort_by(|a, b| a.key(gens).cmp(&b.key(gens)));
        let mut out: Vec<Monomial> = Vec::with_capacity(terms.len());
        for m in terms {
            if out.last() == Some(&m) {
                out.pop();
            } else {
                out.push(m);
            }
        }
        Poly {
            gens: Arc::clone(gens),
            terms: out,
        }
    }

    pub fn genset(&self) -> &Arc<GenSet> {
        &self.gens
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].is_unit()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Symmetric difference of term sets.
    pub fn add(&self, other: &Poly) -> Result<Poly> {
        require_same_genset(&self.gens, &other.gens, "polynomial addition")?;
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        terms.extend_from_slice(&self.terms);
        terms.extend_from_slice(&other.terms);
        Ok(Poly::from_monomials(&self.gens, terms))
    }

    /// Free product: concatenation of words, distributed over terms.
    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        require_same_genset(&self.gens, &other.gens, "polynomial multiplication")?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.concat(b));
            }
        }
        Ok(Poly::from_monomials(&self.gens, terms))
    }

    pub fn mentions(&self, id: GenId) -> bool {
        self.terms.iter().any(|m| m.mentions(id))
    }

    /// Every term shares one degree (vacuously true for 0).
    pub fn is_homogeneous(&self) -> bool {
        match self.terms.split_first() {
            None => true,
            Some((first, rest)) => {
                let d = first.degree(&self.gens);
                rest.iter().all(|m| m.degree(&self.gens) == d)
            }
        }
    }

    /// True when the polynomial is zero or homogeneous of degree `d`.
    pub fn is_homogeneous_of(&self, d: i64) -> bool {
        self.terms.iter().all(|m| m.degree(&self.gens) == d)
    }

    /// The common degree of the terms, `None` for 0 or inhomogeneous input.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let d = self.terms.first()?.degree(&self.gens);
        self.is_homogeneous_of(d).then_some(d)
    }

    /// Rebuilds the polynomial against a content-equal generator set.
    pub(crate) fn with_genset(&self, gens: &Arc<GenSet>) -> Result<Poly> {
        require_same_genset(&self.gens, gens, "polynomial rebase")?;
        Ok(Poly {
            gens: Arc::clone(gens),
            terms: self.terms.clone(),
        })
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, m) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if m.is_unit() {
                f.write_str("1")?;
            } else {
                for (j, g) in m.factors().iter().enumerate() {
                    if j > 0 {
                        f.write_str(".")?;
                    }
                    f.write_str(self.gens.name(*g))?;
                }
            }
        }
        Ok(())
    }
}

/// A total map from the generators of one set to polynomials over another,
/// extended to the whole algebra as a unital homomorphism by [`GenMap::apply`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenMap {
    domain: Arc<GenSet>,
    codomain: Arc<GenSet>,
    images: Vec<Poly>,
}

impl GenMap {
    pub fn new(domain: Arc<GenSet>, codomain: Arc<GenSet>, images: Vec<Poly>) -> Result<GenMap> {
        if images.len() != domain.len() {
            return Err(Error::MissingImage(format!(
                "expected {} images, got {}",
                domain.len(),
                images.len()
            )));
        }
        for img in &images {
            require_same_genset(&img.gens, &codomain, "generator image")?;
        }
        Ok(GenMap {
            domain,
            codomain,
            images,
        })
    }

    pub fn identity(gens: &Arc<GenSet>) -> GenMap {
        let images = gens.ids().map(|id| Poly::generator(gens, id)).collect();
        GenMap {
            domain: Arc::clone(gens),
            codomain: Arc::clone(gens),
            images,
        }
    }

    /// A map sending each generator to a single generator of the codomain.
    pub fn embedding(
        domain: &Arc<GenSet>,
        codomain: &Arc<GenSet>,
        target: &[GenId],
    ) -> Result<GenMap> {
        let images = target
            .iter()
            .map(|&id| Poly::generator(codomain, id))
            .collect();
        GenMap::new(Arc::clone(domain), Arc::clone(codomain), images)
    }

    pub fn domain(&self) -> &Arc<GenSet> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<GenSet> {
        &self.codomain
    }

    pub fn image(&self, id: GenId) -> &Poly {
        &self.images[id.index()]
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    pub fn apply_monomial(&self, m: &Monomial) -> Result<Poly> {
        let mut acc = Poly::one(&self.codomain);
        for &g in m.factors() {
            acc = acc.mul(&self.images[g.index()])?;
        }
        Ok(acc)
    }

    /// The unique unital algebra-map extension: multiplicative on words,
    /// additive on terms.
    pub fn apply(&self, p: &Poly) -> Result<Poly> {
        require_same_genset(&p.gens, &self.domain, "morphism application")?;
        let mut acc = Poly::zero(&self.codomain);
        for m in &p.terms {
            acc = acc.add(&self.apply_monomial(m)?)?;
        }
        Ok(acc)
    }

    /// `outer` after `inner`.
    pub fn compose(outer: &GenMap, inner: &GenMap) -> Result<GenMap> {
        require_same_genset(&inner.codomain, &outer.domain, "morphism composition")?;
        let images = inner
            .images
            .iter()
            .map(|p| outer.apply(&p.with_genset(&outer.domain)?))
            .collect::<Result<Vec<_>>>()?;
        GenMap::new(
            Arc::clone(&inner.domain),
            Arc::clone(&outer.codomain),
            images,
        )
    }
}

/// `apply_morphism(f, p)`: free-standing alias for [`GenMap::apply`].
pub fn apply_morphism(f: &GenMap, p: &Poly) -> Result<Poly> {
    f.apply(p)
}

/// The twisted derivation sending a word `g_1...g_r` to
/// `sum_j src(g_1..g_{j-1}) * hat(g_j) * phi(g_{j+1}..g_r)`, extended
/// linearly over terms. On a single generator it returns the hat; on the
/// unit it returns 0; homogeneous input of degree d maps to degree d+1.
///
/// `src` embeds plain prefix factors and `hat` assigns each generator its
/// degree +1 hat, both into `phi`'s codomain; the mapped suffix goes
/// through `phi`. Passing identity embeddings gives the one-copy (torus)
/// form `Gamma(uv) = Gamma(u) phi(v) + u Gamma(v)`.
pub fn gamma_twisted(src: &GenMap, hat: &[GenId], phi: &GenMap, p: &Poly) -> Result<Poly> {
    require_same_genset(&p.gens, phi.domain(), "gamma_twisted input")?;
    require_same_genset(src.domain(), phi.domain(), "gamma_twisted src embedding")?;
    require_same_genset(src.codomain(), phi.codomain(), "gamma_twisted src embedding")?;
    if hat.len() != phi.domain().len() {
        return Err(Error::MissingImage("hat assignment is not total".into()));
    }
    let out_gens = phi.codomain();
    let mut acc = Poly::zero(out_gens);
    for word in &p.terms {
        let fs = word.factors();
        for j in 0..fs.len() {
            let prefix = src.apply_monomial(&Monomial::from_factors(fs[..j].to_vec()))?;
            let hat_g = Poly::generator(out_gens, hat[fs[j].index()]);
            let suffix = phi.apply_monomial(&Monomial::from_factors(fs[j + 1..].to_vec()))?;
            acc = acc.add(&prefix.mul(&hat_g)?.mul(&suffix)?)?;
        }
    }
    Ok(acc)
}

/// Evaluates a chain homotopy on monomials of the source algebra, yielding
/// polynomials over a chosen output algebra.
pub trait HomotopyEvaluator {
    fn eval_monomial(&self, m: &Monomial) -> Result<Poly>;
}

impl<F> HomotopyEvaluator for F
where
    F: Fn(&Monomial) -> Result<Poly>,
{
    fn eval_monomial(&self, m: &Monomial) -> Result<Poly> {
        self(m)
    }
}

/// The hat-and-homotopy sum: zero on the unit and on single generators,
/// and on a word `g_1...g_r` (r >= 2)
/// `sum_{j=1}^{r-1} src(g_1..g_{j-1}) * hat(g_j) * K(g_{j+1}..g_r)`,
/// extended linearly over terms. `K` always receives a non-empty tail.
pub fn gamma_k(
    src: &GenMap,
    hat: &[GenId],
    k: &dyn HomotopyEvaluator,
    p: &Poly,
) -> Result<Poly> {
    require_same_genset(&p.gens, src.domain(), "gamma_k input")?;
    if hat.len() != src.domain().len() {
        return Err(Error::MissingImage("hat assignment is not total".into()));
    }
    let out_gens = src.codomain();
    let mut acc = Poly::zero(out_gens);
    for word in &p.terms {
        let fs = word.factors();
        if fs.len() < 2 {
            continue;
        }
        for j in 0..fs.len() - 1 {
            let prefix = src.apply_monomial(&Monomial::from_factors(fs[..j].to_vec()))?;
            let hat_g = Poly::generator(out_gens, hat[fs[j].index()]);
            let tail = k.eval_monomial(&Monomial::from_factors(fs[j + 1..].to_vec()))?;
            acc = acc.add(&prefix.mul(&hat_g)?.mul(&tail.with_genset(out_gens)?)?)?;
        }
    }
    Ok(acc)
}

/// The splitting sum `Omega_theta^H`: on a word `g_1...g_r` it returns
/// `sum_{j=1}^{r} src(g_1..g_{j-1}) * H(g_j) * theta(g_{j+1}..g_r)`,
/// extended linearly over terms. Used as a test oracle for the cone
/// isomorphism identities.
pub fn omega_combinator(
    src: &GenMap,
    h: &dyn HomotopyEvaluator,
    theta: &GenMap,
    p: &Poly,
) -> Result<Poly> {
    require_same_genset(&p.gens, src.domain(), "omega input")?;
    require_same_genset(theta.domain(), src.domain(), "omega theta")?;
    require_same_genset(theta.codomain(), src.codomain(), "omega theta")?;
    let out_gens = src.codomain();
    let mut acc = Poly::zero(out_gens);
    for word in &p.terms {
        let fs = word.factors();
        for j in 0..fs.len() {
            let prefix = src.apply_monomial(&Monomial::from_factors(fs[..j].to_vec()))?;
            let mid = h.eval_monomial(&Monomial::generator(fs[j]))?;
            let suffix = theta.apply_monomial(&Monomial::from_factors(fs[j + 1..].to_vec()))?;
            acc = acc.add(&prefix.mul(&mid.with_genset(out_gens)?)?.mul(&suffix)?)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_poly;

    fn trefoil_gens() -> Arc<GenSet> {
        GenSet::new(vec![
            Generator::new("b1", 0),
            Generator::new("b2", 0),
            Generator::new("b3", 0),
            Generator::new("a1", 1),
            Generator::new("a2", 1),
        ])
        .unwrap()
    }

    fn p(gens: &Arc<GenSet>, s: &str) -> Poly {
        parse_poly(gens, s).unwrap()
    }

    #[test]
    fn add_cancels_mod_2() {
        let g = trefoil_gens();
        let b1 = p(&g, "b1");
        assert!(b1.add(&b1).unwrap().is_zero());
        let lhs = p(&g, "1 + b1").add(&p(&g, "b1 + b3")).unwrap();
        assert_eq!(lhs, p(&g, "1 + b3"));
        // hand cancellation inside the trefoil differential
        let da1 = p(&g, "1 + b1 + b3 + b1.b2.b3");
        assert_eq!(da1.add(&p(&g, "1 + b1")).unwrap(), p(&g, "b3 + b1.b2.b3"));
    }

    #[test]
    fn mul_is_concatenation() {
        let g = trefoil_gens();
        // direct expansion of B_21 * B_12 for p = 3
        let lhs = p(&g, "1 + b1.b2").mul(&p(&g, "1 + b2.b3")).unwrap();
        assert_eq!(lhs, p(&g, "1 + b2.b3 + b1.b2 + b1.b2.b2.b3"));
        let q = p(&g, "b1 + b2.b3 + 1");
        assert_eq!(p(&g, "1").mul(&q).unwrap(), q);
        assert_eq!(q.mul(&p(&g, "1")).unwrap(), q);
        // non-commutativity witness
        let b1 = p(&g, "b1");
        let b2 = p(&g, "b2");
        assert_eq!(b1.mul(&b2).unwrap(), p(&g, "b1.b2"));
        assert_ne!(b1.mul(&b2).unwrap(), b2.mul(&b1).unwrap());
    }

    #[test]
    fn add_rejects_mixed_gensets() {
        let g = trefoil_gens();
        let other = GenSet::new(vec![Generator::new("c", 1)]).unwrap();
        let e = p(&g, "b1").add(&p(&other, "c"));
        assert!(matches!(e, Err(Error::DomainMismatch(_))));
    }

    fn trefoil_monodromy_map(g: &Arc<GenSet>) -> GenMap {
        // the loop monodromy on the b generators; identity on a1, a2
        GenMap::new(
            Arc::clone(g),
            Arc::clone(g),
            vec![
                p(g, "1 + b2.b3"),
                p(g, "b1"),
                p(g, "b2"),
                p(g, "a1"),
                p(g, "a2"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn apply_morphism_examples() {
        let g = trefoil_gens();
        let mu = trefoil_monodromy_map(&g);
        assert_eq!(mu.apply(&p(&g, "b2.b3")).unwrap(), p(&g, "b1.b2"));
        assert_eq!(mu.apply(&p(&g, "b1")).unwrap(), p(&g, "1 + b2.b3"));
        let id = GenMap::identity(&g);
        let q = p(&g, "1 + b1 + b3 + b1.b2.b3");
        assert_eq!(id.apply(&q).unwrap(), q);
        assert_eq!(mu.apply(&Poly::one(&g)).unwrap(), Poly::one(&g));
    }

    /// Generator set extended with a hat for every generator, plus the
    /// embeddings gamma needs, for testing the derivations in isolation.
    fn with_hats(g: &Arc<GenSet>) -> (Arc<GenSet>, GenMap, Vec<GenId>) {
        let mut gens: Vec<Generator> = g.generators().to_vec();
        for og in g.generators() {
            gens.push(Generator::new(format!("{}^", og.name), og.degree + 1));
        }
        let big = GenSet::new(gens).unwrap();
        let plain: Vec<GenId> = (0..g.len() as u32).map(GenId).collect();
        let hats: Vec<GenId> = (g.len() as u32..2 * g.len() as u32).map(GenId).collect();
        let src = GenMap::embedding(g, &big, &plain).unwrap();
        (big, src, hats)
    }

    #[test]
    fn gamma_twisted_examples() {
        let g = trefoil_gens();
        let (big, src, hats) = with_hats(&g);
        let mu = trefoil_monodromy_map(&g);
        let mu_into = GenMap::compose(&src, &mu).unwrap();

        // single generator goes to its hat
        let out = gamma_twisted(&src, &hats, &mu_into, &p(&g, "b1")).unwrap();
        assert_eq!(out, p(&big, "b1^"));
        // the unit is annihilated
        assert!(gamma_twisted(&src, &hats, &mu_into, &Poly::one(&g))
            .unwrap()
            .is_zero());
        // unrolled three-factor case using mu(b2)=b1, mu(b3)=b2
        let out = gamma_twisted(&src, &hats, &mu_into, &p(&g, "b1.b2.b3")).unwrap();
        assert_eq!(out, p(&big, "b1^.b1.b2 + b1.b2^.b2 + b1.b2.b3^"));
    }

    #[test]
    fn gamma_twisted_raises_degree_by_one() {
        let g = trefoil_gens();
        let (_big, src, hats) = with_hats(&g);
        let mu = trefoil_monodromy_map(&g);
        let mu_into = GenMap::compose(&src, &mu).unwrap();
        for s in ["b1.b2.b3", "a1.b2 + b3.a2", "b1 + b2.b3"] {
            let q = p(&g, s);
            let d = q.homogeneous_degree().unwrap();
            let out = gamma_twisted(&src, &hats, &mu_into, &q).unwrap();
            assert!(out.is_homogeneous_of(d + 1), "Gamma({s}) not degree {}", d + 1);
        }
    }

    /// Defining recursion Gamma(uv) = Gamma(u) phi(v) + u Gamma(v), checked
    /// by splitting words at every position.
    #[test]
    fn gamma_twisted_recursion_on_splits() {
        let g = trefoil_gens();
        let (_big, src, hats) = with_hats(&g);
        let mu = trefoil_monodromy_map(&g);
        let mu_into = GenMap::compose(&src, &mu).unwrap();
        let word = p(&g, "b2.b1.b3.b2");
        let fs = word.terms()[0].factors().to_vec();
        let whole = gamma_twisted(&src, &hats, &mu_into, &word).unwrap();
        for cut in 1..fs.len() {
            let u = Poly::monomial(&g, Monomial::from_factors(fs[..cut].to_vec()));
            let v = Poly::monomial(&g, Monomial::from_factors(fs[cut..].to_vec()));
            let gu = gamma_twisted(&src, &hats, &mu_into, &u).unwrap();
            let gv = gamma_twisted(&src, &hats, &mu_into, &v).unwrap();
            let rhs = gu
                .mul(&mu_into.apply(&v).unwrap())
                .unwrap()
                .add(&src.apply(&u).unwrap().mul(&gv).unwrap())
                .unwrap();
            assert_eq!(whole, rhs, "split at {cut}");
        }
    }

    #[test]
    fn gamma_k_examples() {
        let g = trefoil_gens();
        let (big, src, hats) = with_hats(&g);
        let u = p(&big, "a1");
        // K(b) = u on every generator, extended as a derivation over
        // phi = psi = id (both orientations agree there).
        let id_into = src.clone();
        let k_vals: Vec<Poly> = g.ids().map(|_| u.clone()).collect();
        let k = move |m: &Monomial| -> Result<Poly> {
            // K(g1..gr) = sum_j id(prefix) K(g_j) id(suffix)
            let mut acc = Poly::zero(&big);
            for j in 0..m.len() {
                let pre = id_into.apply_monomial(&Monomial::from_factors(m.factors()[..j].to_vec()))?;
                let post =
                    id_into.apply_monomial(&Monomial::from_factors(m.factors()[j + 1..].to_vec()))?;
                acc = acc.add(&pre.mul(&k_vals[m.factors()[j].index()])?.mul(&post)?)?;
            }
            Ok(acc)
        };

        assert!(gamma_k(&src, &hats, &k, &p(&g, "b1")).unwrap().is_zero());
        assert!(gamma_k(&src, &hats, &k, &Poly::one(&g)).unwrap().is_zero());

        let out = gamma_k(&src, &hats, &k, &p(&g, "b1.b2")).unwrap();
        let expected = k(&Monomial::from_factors(vec![GenId(1)])).unwrap();
        let expected = gamma_hat_times(&src, &hats, GenId(0), &[], &expected);
        assert_eq!(out, expected);

        // length-3 case: b1^ K(b2.b3) + b1.b2^ K(b3)
        let out = gamma_k(&src, &hats, &k, &p(&g, "b1.b2.b3")).unwrap();
        let t1 = gamma_hat_times(&src, &hats, GenId(0), &[], &k(&Monomial::from_factors(vec![GenId(1), GenId(2)])).unwrap());
        let t2 = gamma_hat_times(&src, &hats, GenId(1), &[GenId(0)], &k(&Monomial::generator(GenId(2))).unwrap());
        assert_eq!(out, t1.add(&t2).unwrap());
    }

    fn gamma_hat_times(src: &GenMap, hats: &[GenId], hat_of: GenId, prefix: &[GenId], tail: &Poly) -> Poly {
        let pre = src
            .apply_monomial(&Monomial::from_factors(prefix.to_vec()))
            .unwrap();
        pre.mul(&Poly::generator(src.codomain(), hats[hat_of.index()]))
            .unwrap()
            .mul(tail)
            .unwrap()
    }

    #[test]
    fn omega_examples() {
        let g = trefoil_gens();
        let (big, src, _hats) = with_hats(&g);
        let mu = trefoil_monodromy_map(&g);
        let mu_into = GenMap::compose(&src, &mu).unwrap();
        let kb = p(&big, "a1");
        let kb2 = kb.clone();
        let h = move |m: &Monomial| -> Result<Poly> {
            assert_eq!(m.len(), 1);
            Ok(kb2.clone())
        };

        // r = 1: plain H value
        let out = omega_combinator(&src, &h, &mu_into, &p(&g, "b2")).unwrap();
        assert_eq!(out, kb);

        // r = 2: K(b1) phi(b2) + b1 K(b2)
        let out = omega_combinator(&src, &h, &mu_into, &p(&g, "b1.b2")).unwrap();
        let expected = kb
            .mul(&mu_into.apply(&p(&g, "b2")).unwrap())
            .unwrap()
            .add(&p(&big, "b1").mul(&kb).unwrap())
            .unwrap();
        assert_eq!(out, expected);

        // zero H kills everything
        let big2 = Arc::clone(&big);
        let z = move |_: &Monomial| -> Result<Poly> { Ok(Poly::zero(&big2)) };
        for s in ["1", "b1", "b1.b2.b3 + a1.b2"] {
            assert!(omega_combinator(&src, &z, &mu_into, &p(&g, s)).unwrap().is_zero());
        }
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let g = trefoil_gens();
        let q = p(&g, "b3.b1 + 1 + b1.b2.b3 + b2");
        let again = Poly::from_monomials(&g, q.terms().to_vec());
        assert_eq!(q, again);
    }

    #[test]
    fn name_grammar() {
        for ok in ["b1", "x'", "c^", "b1^", "A_3", "c[-]", "c[+]", "b2[0]", "b2[0]^"] {
            assert!(valid_name(ok), "{ok} should be accepted");
        }
        for bad in ["", "1b", "_x", "c[-", "c[]", "c[-]x", "c+", "b 1"] {
            assert!(!valid_name(bad), "{bad} should be rejected");
        }
    }
}
