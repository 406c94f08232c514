//! DGA structure, validation, chain maps, chain homotopies, tame
//! isomorphisms and single-pair (de)stabilization.
//!
//! A [`Dga`] is a free non-commutative Z2-algebra on an ordered generator
//! list together with a degree -1 differential given on generators. The
//! generator order is the height filtration: every differential may only
//! mention generators strictly earlier in the list. Validators return a
//! [`ValidationReport`] listing all violations instead of failing fast.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result, ValidationReport, ViolationKind};
use crate::freealg::{require_same_genset, GenId, GenMap, GenSet, Generator, Monomial, Poly};

/// A free DGA over Z2 with height-ordered generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dga {
    gens: Arc<GenSet>,
    diff: GenMap,
}

impl Dga {
    /// Structural construction; the DGA axioms are checked by [`Dga::validate`].
    pub fn new(gens: Arc<GenSet>, diffs: Vec<Poly>) -> Result<Dga> {
        let diff = GenMap::new(Arc::clone(&gens), Arc::clone(&gens), diffs)?;
        Ok(Dga { gens, diff })
    }

    pub fn genset(&self) -> &Arc<GenSet> {
        &self.gens
    }

    pub fn diff_of(&self, id: GenId) -> &Poly {
        self.diff.image(id)
    }

    pub fn diff_map(&self) -> &GenMap {
        &self.diff
    }

    /// Leibniz extension of the differential: linear over terms, and on a
    /// word `g_1...g_r` equal to `sum_j g_1..g_{j-1} (d g_j) g_{j+1}..g_r`
    /// (no signs in characteristic 2). `d(1) = 0`.
    pub fn differential(&self, p: &Poly) -> Result<Poly> {
        require_same_genset(p.genset(), &self.gens, "differential application")?;
        let mut out = Vec::new();
        for word in p.terms() {
            let fs = word.factors();
            for j in 0..fs.len() {
                let dj = self.diff.image(fs[j]);
                if dj.is_zero() {
                    continue;
                }
                for mid in dj.terms() {
                    let mut factors = Vec::with_capacity(fs.len() - 1 + mid.len());
                    factors.extend_from_slice(&fs[..j]);
                    factors.extend_from_slice(mid.factors());
                    factors.extend_from_slice(&fs[j + 1..]);
                    out.push(Monomial::from_factors(factors));
                }
            }
        }
        Ok(Poly::from_monomials(&self.gens, out))
    }

    /// Checks grading, triangularity and `d^2 = 0`, reporting every
    /// violation with the offending generator and residual.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        for id in self.gens.ids() {
            let name = self.gens.name(id);
            let dc = self.diff.image(id);
            if !dc.is_homogeneous_of(self.gens.degree(id) - 1) {
                report.push(
                    ViolationKind::Grading,
                    name,
                    format!(
                        "d {name} = {dc} is not homogeneous of degree {}",
                        self.gens.degree(id) - 1
                    ),
                );
            }
            let offenders: Vec<&str> = self
                .gens
                .ids()
                .filter(|&g| g >= id && dc.mentions(g))
                .map(|g| self.gens.name(g))
                .collect();
            if !offenders.is_empty() {
                report.push(
                    ViolationKind::Triangularity,
                    name,
                    format!(
                        "d {name} mentions generators not strictly below it: {}",
                        offenders.join(", ")
                    ),
                );
            }
            match self.differential(dc) {
                Ok(sq) if sq.is_zero() => {}
                Ok(sq) => report.push(
                    ViolationKind::DifferentialSquare,
                    name,
                    format!("d(d {name}) = {sq}"),
                ),
                Err(e) => report.push(ViolationKind::Structure, name, e.to_string()),
            }
        }
        report
    }
}

/// `validate_dga(d)`: free-standing alias for [`Dga::validate`].
pub fn validate_dga(d: &Dga) -> ValidationReport {
    d.validate()
}

/// `differential_apply(d, p)`: free-standing alias for [`Dga::differential`].
pub fn differential_apply(d: &Dga, p: &Poly) -> Result<Poly> {
    d.differential(p)
}

/// A grading-preserving algebra map between DGAs, given by generator images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DgaMorphism {
    source: Dga,
    target: Dga,
    map: GenMap,
}

impl DgaMorphism {
    pub fn new(source: Dga, target: Dga, map: GenMap) -> Result<DgaMorphism> {
        require_same_genset(map.domain(), source.genset(), "morphism domain")?;
        require_same_genset(map.codomain(), target.genset(), "morphism codomain")?;
        Ok(DgaMorphism {
            source,
            target,
            map,
        })
    }

    pub fn identity(d: &Dga) -> DgaMorphism {
        DgaMorphism {
            source: d.clone(),
            target: d.clone(),
            map: GenMap::identity(d.genset()),
        }
    }

    pub fn source(&self) -> &Dga {
        &self.source
    }

    pub fn target(&self) -> &Dga {
        &self.target
    }

    pub fn map(&self) -> &GenMap {
        &self.map
    }

    pub fn apply(&self, p: &Poly) -> Result<Poly> {
        self.map.apply(p)
    }

    /// Per-generator residuals `f(dc) + d(f(c))` plus the grading check;
    /// an empty report means a valid chain map.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let sg = self.source.genset();
        for id in sg.ids() {
            let name = sg.name(id);
            let img = self.map.image(id);
            if !img.is_homogeneous_of(sg.degree(id)) {
                report.push(
                    ViolationKind::Grading,
                    name,
                    format!("image {img} is not homogeneous of degree {}", sg.degree(id)),
                );
            }
            let lhs = match self.map.apply(self.source.diff_of(id)) {
                Ok(p) => p,
                Err(e) => {
                    report.push(ViolationKind::Structure, name, e.to_string());
                    continue;
                }
            };
            let rhs = match self.target.differential(img) {
                Ok(p) => p,
                Err(e) => {
                    report.push(ViolationKind::Structure, name, e.to_string());
                    continue;
                }
            };
            match lhs.add(&rhs) {
                Ok(res) if res.is_zero() => {}
                Ok(res) => report.push(
                    ViolationKind::ChainMap,
                    name,
                    format!("f(d {name}) + d(f {name}) = {res}"),
                ),
                Err(e) => report.push(ViolationKind::Structure, name, e.to_string()),
            }
        }
        report
    }

    /// `outer` after `self`; sources and targets must line up.
    pub fn then(&self, outer: &DgaMorphism) -> Result<DgaMorphism> {
        if self.target != outer.source {
            return Err(Error::DomainMismatch(
                "morphism composition: middle DGAs differ".into(),
            ));
        }
        DgaMorphism::new(
            self.source.clone(),
            outer.target.clone(),
            GenMap::compose(outer.map(), self.map())?,
        )
    }
}

/// `validate_chain_map(f)`: free-standing alias for [`DgaMorphism::validate`].
pub fn validate_chain_map(f: &DgaMorphism) -> ValidationReport {
    f.validate()
}

/// How a chain homotopy, given by its values on generators, is extended to
/// products. Both rules satisfy the homotopy equation on products whenever
/// it holds on generators; they differ in which chain map multiplies K
/// values from the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExtensionRule {
    /// `K(uv) = K(u) phi(v) + psi(u) K(v)`, i.e. on words
    /// `K(g_1..g_r) = sum_j psi(g_1..g_{j-1}) K(g_j) phi(g_{j+1}..g_r)`.
    /// This is the orientation under which the cone isomorphism
    /// `F(c^) = c^ + K(c) + Gamma_K(d c)` intertwines the two cone
    /// differentials, so it is the default.
    #[default]
    PsiLeft,
    /// The mirror: `K(uv) = K(u) psi(v) + phi(u) K(v)`, i.e.
    /// `K(g_1..g_r) = sum_j phi(g_1..g_{j-1}) K(g_j) psi(g_{j+1}..g_r)`.
    PhiLeft,
}

impl fmt::Display for ExtensionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtensionRule::PsiLeft => "psi-left",
            ExtensionRule::PhiLeft => "phi-left",
        })
    }
}

/// A chain homotopy `K` between chain maps `phi` and `psi` with a shared
/// source and target: on every generator,
/// `phi(c) + psi(c) = K(dc) + d(K(c))`, where `K` is extended to products
/// by the tagged [`ExtensionRule`].
#[derive(Debug, Clone)]
pub struct ChainHomotopy {
    pub phi: DgaMorphism,
    pub psi: DgaMorphism,
    values: GenMap,
    rule: ExtensionRule,
}

impl ChainHomotopy {
    pub fn new(
        phi: DgaMorphism,
        psi: DgaMorphism,
        values: GenMap,
        rule: ExtensionRule,
    ) -> Result<ChainHomotopy> {
        if phi.source() != psi.source() || phi.target() != psi.target() {
            return Err(Error::DomainMismatch(
                "chain homotopy: phi and psi must share source and target".into(),
            ));
        }
        require_same_genset(values.domain(), phi.source().genset(), "homotopy values")?;
        require_same_genset(values.codomain(), phi.target().genset(), "homotopy values")?;
        Ok(ChainHomotopy {
            phi,
            psi,
            values,
            rule,
        })
    }

    pub fn values(&self) -> &GenMap {
        &self.values
    }

    pub fn rule(&self) -> ExtensionRule {
        self.rule
    }

    pub fn source(&self) -> &Dga {
        self.phi.source()
    }

    pub fn target(&self) -> &Dga {
        self.phi.target()
    }

    /// `K` on a word, per the extension rule; `K(1) = 0`.
    pub fn eval_monomial(&self, m: &Monomial) -> Result<Poly> {
        let (left, right) = match self.rule {
            ExtensionRule::PsiLeft => (self.psi.map(), self.phi.map()),
            ExtensionRule::PhiLeft => (self.phi.map(), self.psi.map()),
        };
        let out = self.values.codomain();
        let mut acc = Poly::zero(out);
        let fs = m.factors();
        for j in 0..fs.len() {
            let pre = left.apply_monomial(&Monomial::from_factors(fs[..j].to_vec()))?;
            let post = right.apply_monomial(&Monomial::from_factors(fs[j + 1..].to_vec()))?;
            acc = acc.add(&pre.mul(self.values.image(fs[j]))?.mul(&post)?)?;
        }
        Ok(acc)
    }

    pub fn eval(&self, p: &Poly) -> Result<Poly> {
        require_same_genset(p.genset(), self.values.domain(), "homotopy evaluation")?;
        let mut acc = Poly::zero(self.values.codomain());
        for m in p.terms() {
            acc = acc.add(&self.eval_monomial(m)?)?;
        }
        Ok(acc)
    }

    /// Checks that `phi` and `psi` are chain maps, that `K` raises degree
    /// by one, and the per-generator residual
    /// `phi(c) + psi(c) + K(dc) + d(K(c))`.
    pub fn validate(&self) -> ValidationReport {
        let mut report = self.phi.validate();
        report.merge(self.psi.validate());
        let sg = self.source().genset();
        for id in sg.ids() {
            let name = sg.name(id);
            let kc = self.values.image(id);
            if !kc.is_homogeneous_of(sg.degree(id) + 1) {
                report.push(
                    ViolationKind::Homotopy,
                    name,
                    format!("K({name}) = {kc} is not homogeneous of degree {}", sg.degree(id) + 1),
                );
            }
            let residual = (|| -> Result<Poly> {
                self.phi
                    .map()
                    .image(id)
                    .add(self.psi.map().image(id))?
                    .add(&self.eval(self.source().diff_of(id))?)?
                    .add(&self.target().differential(kc)?)
            })();
            match residual {
                Ok(r) if r.is_zero() => {}
                Ok(r) => report.push(
                    ViolationKind::Homotopy,
                    name,
                    format!("phi({name}) + psi({name}) + K(d {name}) + d(K {name}) = {r}"),
                ),
                Err(e) => report.push(ViolationKind::Structure, name, e.to_string()),
            }
        }
        report
    }
}

/// `validate_homotopy(k)`: free-standing alias for [`ChainHomotopy::validate`].
pub fn validate_homotopy(k: &ChainHomotopy) -> ValidationReport {
    k.validate()
}

/// One elementary tame step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TameStep {
    /// `gen -> gen + addend`, with `addend` free of `gen`; a char-2
    /// involution.
    Substitute { gen: GenId, addend: Poly },
    /// Renames one generator.
    Relabel { from: String, to: String },
}

/// A finite sequence of elementary steps, applied first-to-last. Each step
/// is invertible, so the composite is a tame algebra isomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TameIso {
    gens: Arc<GenSet>,
    steps: Vec<TameStep>,
}

impl TameIso {
    pub fn identity(gens: &Arc<GenSet>) -> TameIso {
        TameIso {
            gens: Arc::clone(gens),
            steps: Vec::new(),
        }
    }

    pub fn new(gens: &Arc<GenSet>, steps: Vec<TameStep>) -> Result<TameIso> {
        for s in &steps {
            if let TameStep::Substitute { gen, addend } = s {
                require_same_genset(addend.genset(), gens, "tame substitution")?;
                if addend.mentions(*gen) {
                    return Err(Error::Invalid({
                        let mut r = ValidationReport::new();
                        r.push(
                            ViolationKind::Structure,
                            gens.name(*gen),
                            format!("self-referential substitution: {} -> {} + {addend}",
                                gens.name(*gen), gens.name(*gen)),
                        );
                        r
                    }));
                }
            }
        }
        Ok(TameIso {
            gens: Arc::clone(gens),
            steps,
        })
    }

    pub fn genset(&self) -> &Arc<GenSet> {
        &self.gens
    }

    pub fn steps(&self) -> &[TameStep] {
        &self.steps
    }

    pub fn is_identity(&self) -> bool {
        self.steps.is_empty()
    }

    /// The same steps in reverse order; each elementary step inverts itself.
    pub fn inverse(&self) -> TameIso {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| match s {
                TameStep::Substitute { gen, addend } => TameStep::Substitute {
                    gen: *gen,
                    addend: addend.clone(),
                },
                TameStep::Relabel { from, to } => TameStep::Relabel {
                    from: to.clone(),
                    to: from.clone(),
                },
            })
            .collect();
        TameIso {
            gens: Arc::clone(&self.gens),
            steps,
        }
    }

    /// Applies the substitution steps to a polynomial (relabels do not
    /// change generator identities, only names).
    pub fn apply_poly(&self, p: &Poly) -> Result<Poly> {
        require_same_genset(p.genset(), &self.gens, "tame iso application")?;
        let mut acc = p.with_genset(&self.gens)?;
        for s in &self.steps {
            if let TameStep::Substitute { gen, addend } = s {
                let image = Poly::generator(&self.gens, *gen).add(addend)?;
                let images = self
                    .gens
                    .ids()
                    .map(|id| {
                        if id == *gen {
                            image.clone()
                        } else {
                            Poly::generator(&self.gens, id)
                        }
                    })
                    .collect();
                let step_map = GenMap::new(Arc::clone(&self.gens), Arc::clone(&self.gens), images)?;
                acc = step_map.apply(&acc)?;
            }
        }
        Ok(acc)
    }

    /// The renamed generator list after applying every relabel step.
    fn renamed_generators(&self) -> Result<Vec<Generator>> {
        let mut gens: Vec<Generator> = self.gens.generators().to_vec();
        for s in &self.steps {
            if let TameStep::Relabel { from, to } = s {
                let idx = gens
                    .iter()
                    .position(|g| &g.name == from)
                    .ok_or_else(|| Error::UnknownGenerator(from.clone()))?;
                if gens.iter().any(|g| &g.name == to) {
                    return Err(Error::DomainMismatch(format!(
                        "relabel target `{to}` already in use"
                    )));
                }
                gens[idx].name = to.clone();
            }
        }
        Ok(gens)
    }
}

/// Pushes the differential through a tame isomorphism: the result has
/// `d' = t . d . t^{-1}` on generators (and the relabelled names). The
/// output is validated and an invalid result is an error.
pub fn apply_tame_iso(t: &TameIso, d: &Dga) -> Result<Dga> {
    require_same_genset(d.genset(), t.genset(), "tame iso application")?;
    let inv = t.inverse();
    let new_gens = GenSet::new(t.renamed_generators()?)?;
    let mut diffs = Vec::with_capacity(new_gens.len());
    for id in d.genset().ids() {
        let pulled = inv.apply_poly(&Poly::generator(d.genset(), id))?;
        let pushed = t.apply_poly(&d.differential(&pulled)?)?;
        // generator ids carry over unchanged; only names may differ
        diffs.push(Poly::from_monomials(&new_gens, pushed.terms().to_vec()));
    }
    let out = Dga::new(new_gens, diffs)?;
    out.validate().into_result()?;
    Ok(out)
}

/// Appends a stabilization pair at the top of the height order:
/// `d a = b`, `d b = 0`, with `|a| = deg_a` and `|b| = deg_a - 1`.
pub fn stabilize(d: &Dga, a_name: &str, b_name: &str, deg_a: i64) -> Result<Dga> {
    let mut gens = d.genset().generators().to_vec();
    gens.push(Generator::new(b_name, deg_a - 1));
    gens.push(Generator::new(a_name, deg_a));
    let new_gens = GenSet::new(gens)?;
    let b_id = new_gens.lookup(b_name).unwrap();
    // the original generators keep their ids in the extended set
    let mut diffs: Vec<Poly> = d
        .genset()
        .ids()
        .map(|id| Poly::from_monomials(&new_gens, d.diff_of(id).terms().to_vec()))
        .collect();
    diffs.push(Poly::zero(&new_gens));
    diffs.push(Poly::generator(&new_gens, b_id));
    Dga::new(new_gens, diffs)
}

/// Cancels a generator pair `(a, b)` with `d a = b + v`, where `v` mentions
/// neither `a` nor `b`. Returns the DGA on the remaining generators with
/// `d' = tau . d` together with the projection `tau` (`a -> 0`, `b -> v`,
/// identity elsewhere). `tau` is verified to be a chain map rather than
/// assumed, and the output must pass validation.
pub fn destabilize(d: &Dga, a: GenId, b: GenId) -> Result<(Dga, DgaMorphism)> {
    let gens = d.genset();
    let da = d.diff_of(a);
    let b_term = Monomial::generator(b);
    if !da.terms().contains(&b_term) {
        return Err(Error::NotDestabilizable(format!(
            "d {} = {da} has no bare `{}` term",
            gens.name(a),
            gens.name(b)
        )));
    }
    let v = da.add(&Poly::generator(gens, b))?;
    if v.mentions(a) || v.mentions(b) {
        return Err(Error::NotDestabilizable(format!(
            "v = {v} mentions the cancelled pair ({}, {})",
            gens.name(a),
            gens.name(b)
        )));
    }

    let kept: Vec<GenId> = gens.ids().filter(|&g| g != a && g != b).collect();
    let new_gens = GenSet::new(
        kept.iter()
            .map(|&g| Generator::new(gens.name(g), gens.degree(g)))
            .collect(),
    )?;
    // tau: identity on the kept generators, a -> 0, b -> v
    let mut old_to_new = vec![None; gens.len()];
    for (i, &g) in kept.iter().enumerate() {
        old_to_new[g.index()] = Some(GenId(i as u32));
    }
    let transport = |p: &Poly| -> Result<Poly> {
        let mut terms = Vec::with_capacity(p.term_count());
        for m in p.terms() {
            let factors = m
                .factors()
                .iter()
                .map(|&g| {
                    old_to_new[g.index()]
                        .ok_or_else(|| Error::UnknownGenerator(gens.name(g).to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            terms.push(Monomial::from_factors(factors));
        }
        Ok(Poly::from_monomials(&new_gens, terms))
    };
    let v_new = transport(&v)?;
    let tau_images = gens
        .ids()
        .map(|g| {
            if g == a {
                Ok(Poly::zero(&new_gens))
            } else if g == b {
                Ok(v_new.clone())
            } else {
                Ok(Poly::generator(&new_gens, old_to_new[g.index()].unwrap()))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let tau_map = GenMap::new(Arc::clone(gens), Arc::clone(&new_gens), tau_images)?;

    let diffs = kept
        .iter()
        .map(|&g| tau_map.apply(d.diff_of(g)))
        .collect::<Result<Vec<_>>>()?;
    let out = Dga::new(Arc::clone(&new_gens), diffs)?;

    let tau = DgaMorphism::new(d.clone(), out.clone(), tau_map)?;
    let tau_report = tau.validate();
    if !tau_report.is_valid() {
        return Err(Error::Invalid(tau_report));
    }
    out.validate().into_result()?;
    Ok((out, tau))
}
