//! Mapping-cone DGAs of DGA morphisms.
//!
//! The cone of a chain map `phi: S -> T` is the DGA on a copy of `S`, a
//! copy of `T`, and a degree-shifted hat generator for every generator of
//! `S`, with
//!
//! ```text
//! D c[-] = (d_S c)[-]
//! D c[+] = (d_T c)[+]
//! D c^   = c[-] + phi(c)[+] + Gamma_phi(d_S c)
//! ```
//!
//! where the twisted derivation `Gamma_phi` places plain prefixes in the
//! source copy and mapped suffixes in the target copy. The torus flavor,
//! for an endomorphism, identifies the two copies: `D c^ = c + phi(c) +
//! Gamma_phi(d c)`. (The mirrored convention, with prefixes in the target
//! copy, is the same construction read against the reversed word order; we
//! fix this one throughout.)
//!
//! Gluing two cones along a common middle algebra and cancelling the
//! middle generator pairs in decreasing height concatenates cones:
//! [`concat_cones`] produces, generator for generator, the cone of the
//! composite morphism. A chain homotopy between two maps induces a tame
//! isomorphism between their cones ([`homotopy_iso`]).
//!
//! Cone differentials are verified (`D^2 = 0` and the embedding
//! invariants) eagerly at construction; failures are internal errors.

use std::fmt;
use std::sync::Arc;

use crate::dga::{
    destabilize, ChainHomotopy, Dga, DgaMorphism, TameIso, TameStep,
};
use crate::error::{Error, Result, ValidationReport, ViolationKind};
use crate::freealg::{gamma_k, gamma_twisted, GenId, GenMap, GenSet, Generator, Poly};

/// Which mapping-cone construction produced a [`ConeDga`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeFlavor {
    /// Cone of a morphism between two (possibly different) DGAs, with
    /// disjoint source and target copies.
    Interval,
    /// Cone of an endomorphism with one shared copy of the generators.
    Torus,
}

impl fmt::Display for ConeFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConeFlavor::Interval => "interval",
            ConeFlavor::Torus => "torus",
        })
    }
}

/// The role a cone generator plays, tagged with the name of the generator
/// of the input algebra it comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Role {
    /// Torus flavor: the single copy of an input generator.
    Plain,
    SourceCopy(String),
    TargetCopy(String),
    Hat(String),
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Plain => f.write_str("plain"),
            Role::SourceCopy(b) => write!(f, "source-copy of {b}"),
            Role::TargetCopy(b) => write!(f, "target-copy of {b}"),
            Role::Hat(b) => write!(f, "hat of {b}"),
        }
    }
}

/// A mapping-cone DGA together with its role tags and its origin (the
/// input DGAs and the morphism the cone was built from).
#[derive(Debug, Clone)]
pub struct ConeDga {
    base: Dga,
    flavor: ConeFlavor,
    roles: Vec<Role>,
    source: Dga,
    target: Dga,
    morphism: GenMap,
    src_embed: Vec<GenId>,
    tgt_embed: Vec<GenId>,
    hat_embed: Vec<GenId>,
}

impl PartialEq for ConeDga {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.flavor == other.flavor && self.roles == other.roles
    }
}
impl Eq for ConeDga {}

impl ConeDga {
    pub fn base(&self) -> &Dga {
        &self.base
    }

    pub fn flavor(&self) -> ConeFlavor {
        self.flavor
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn source(&self) -> &Dga {
        &self.source
    }

    pub fn target(&self) -> &Dga {
        &self.target
    }

    /// Generator images of the morphism the cone was built from.
    pub fn morphism(&self) -> &GenMap {
        &self.morphism
    }

    /// Cone id of the source copy of a source generator.
    pub fn source_copy(&self, id: GenId) -> GenId {
        self.src_embed[id.index()]
    }

    /// Cone id of the target copy of a target generator.
    pub fn target_copy(&self, id: GenId) -> GenId {
        self.tgt_embed[id.index()]
    }

    /// Cone id of the hat of a source generator.
    pub fn hat(&self, id: GenId) -> GenId {
        self.hat_embed[id.index()]
    }

    /// Checks the cone invariants: hats raise degree by one, the copy
    /// embeddings are DGA morphisms, and `D^2 = 0` (through the base
    /// validation, which also covers grading and triangularity).
    pub fn validate(&self) -> ValidationReport {
        let mut report = self.base.validate();
        let cg = self.base.genset();
        let sg = self.source.genset();
        let tg = self.target.genset();
        for id in sg.ids() {
            let hat = self.hat_embed[id.index()];
            if cg.degree(hat) != sg.degree(id) + 1 {
                report.push(
                    ViolationKind::Cone,
                    cg.name(hat),
                    format!("hat degree {} is not |{}|+1", cg.degree(hat), sg.name(id)),
                );
            }
        }
        // the copies embed the input differentials
        let src_map = match GenMap::embedding(sg, cg, &self.src_embed) {
            Ok(m) => m,
            Err(e) => {
                report.push(ViolationKind::Structure, "source embedding", e.to_string());
                return report;
            }
        };
        let tgt_map = match GenMap::embedding(tg, cg, &self.tgt_embed) {
            Ok(m) => m,
            Err(e) => {
                report.push(ViolationKind::Structure, "target embedding", e.to_string());
                return report;
            }
        };
        for id in sg.ids() {
            let want = src_map.apply(self.source.diff_of(id)).unwrap();
            let got = self.base.diff_of(self.src_embed[id.index()]);
            if got != &want {
                report.push(
                    ViolationKind::Cone,
                    sg.name(id),
                    format!("source copy differential {got} differs from embedded {want}"),
                );
            }
        }
        for id in tg.ids() {
            let want = tgt_map.apply(self.target.diff_of(id)).unwrap();
            let got = self.base.diff_of(self.tgt_embed[id.index()]);
            if got != &want {
                report.push(
                    ViolationKind::Cone,
                    tg.name(id),
                    format!("target copy differential {got} differs from embedded {want}"),
                );
            }
        }
        report
    }
}

fn tagged(name: &str, tag: &str) -> String {
    format!("{name}{tag}")
}

/// Transports a polynomial into `target` by appending `tag` to every
/// factor name.
fn remap_tagged(p: &Poly, target: &Arc<GenSet>, tag: &str) -> Result<Poly> {
    let src = p.genset();
    let mut terms = Vec::with_capacity(p.term_count());
    for m in p.terms() {
        let factors = m
            .factors()
            .iter()
            .map(|&g| {
                let name = tagged(src.name(g), tag);
                target
                    .lookup(&name)
                    .ok_or(Error::UnknownGenerator(name))
            })
            .collect::<Result<Vec<_>>>()?;
        terms.push(crate::freealg::Monomial::from_factors(factors));
    }
    Ok(Poly::from_monomials(target, terms))
}

/// Builds the mapping cone of a validated chain map with disjoint source
/// and target copies. Generator order: target copies, then source copies,
/// then hats, each in the input height order.
pub fn build_cone_interval(phi: &DgaMorphism) -> Result<ConeDga> {
    phi.validate().into_result()?;
    let sg = phi.source().genset();
    let tg = phi.target().genset();

    let mut gens = Vec::with_capacity(tg.len() + 2 * sg.len());
    for id in tg.ids() {
        gens.push(Generator::new(tagged(tg.name(id), "[+]"), tg.degree(id)));
    }
    for id in sg.ids() {
        gens.push(Generator::new(tagged(sg.name(id), "[-]"), sg.degree(id)));
    }
    for id in sg.ids() {
        gens.push(Generator::new(tagged(sg.name(id), "^"), sg.degree(id) + 1));
    }
    let cg = GenSet::new(gens)?;

    let tgt_embed: Vec<GenId> = (0..tg.len() as u32).map(GenId).collect();
    let src_embed: Vec<GenId> = (tg.len() as u32..(tg.len() + sg.len()) as u32)
        .map(GenId)
        .collect();
    let hat_embed: Vec<GenId> = ((tg.len() + sg.len()) as u32..cg.len() as u32)
        .map(GenId)
        .collect();

    let src_map = GenMap::embedding(sg, &cg, &src_embed)?;
    let tgt_map = GenMap::embedding(tg, &cg, &tgt_embed)?;
    let phi_into = GenMap::compose(&tgt_map, phi.map())?;

    let mut diffs = Vec::with_capacity(cg.len());
    for id in tg.ids() {
        diffs.push(tgt_map.apply(phi.target().diff_of(id))?);
    }
    for id in sg.ids() {
        diffs.push(src_map.apply(phi.source().diff_of(id))?);
    }
    for id in sg.ids() {
        let copy = Poly::generator(&cg, src_embed[id.index()]);
        let image = tgt_map.apply(phi.map().image(id))?;
        let gamma = gamma_twisted(&src_map, &hat_embed, &phi_into, phi.source().diff_of(id))?;
        diffs.push(copy.add(&image)?.add(&gamma)?);
    }

    let mut roles = Vec::with_capacity(cg.len());
    for id in tg.ids() {
        roles.push(Role::TargetCopy(tg.name(id).to_string()));
    }
    for id in sg.ids() {
        roles.push(Role::SourceCopy(sg.name(id).to_string()));
    }
    for id in sg.ids() {
        roles.push(Role::Hat(sg.name(id).to_string()));
    }

    let cone = ConeDga {
        base: Dga::new(cg, diffs)?,
        flavor: ConeFlavor::Interval,
        roles,
        source: phi.source().clone(),
        target: phi.target().clone(),
        morphism: phi.map().clone(),
        src_embed,
        tgt_embed,
        hat_embed,
    };
    let report = cone.validate();
    if !report.is_valid() {
        return Err(Error::Internal(format!(
            "interval cone failed its invariants:\n{report}"
        )));
    }
    Ok(cone)
}

/// Builds the one-copy mapping cone of a validated chain endomorphism:
/// `D c = d c`, `D c^ = c + phi(c) + Gamma_phi(d c)`.
pub fn build_cone_torus(phi: &DgaMorphism) -> Result<ConeDga> {
    if phi.source() != phi.target() {
        return Err(Error::DomainMismatch(
            "torus cone requires a chain endomorphism (source = target)".into(),
        ));
    }
    phi.validate().into_result()?;
    let sg = phi.source().genset();

    let mut gens = Vec::with_capacity(2 * sg.len());
    for g in sg.generators() {
        gens.push(g.clone());
    }
    for id in sg.ids() {
        gens.push(Generator::new(tagged(sg.name(id), "^"), sg.degree(id) + 1));
    }
    let cg = GenSet::new(gens)?;

    let plain: Vec<GenId> = (0..sg.len() as u32).map(GenId).collect();
    let hat_embed: Vec<GenId> = (sg.len() as u32..cg.len() as u32).map(GenId).collect();
    let plain_map = GenMap::embedding(sg, &cg, &plain)?;
    let phi_into = GenMap::compose(&plain_map, phi.map())?;

    let mut diffs = Vec::with_capacity(cg.len());
    for id in sg.ids() {
        diffs.push(plain_map.apply(phi.source().diff_of(id))?);
    }
    for id in sg.ids() {
        let copy = Poly::generator(&cg, plain[id.index()]);
        let image = plain_map.apply(phi.map().image(id))?;
        let gamma = gamma_twisted(&plain_map, &hat_embed, &phi_into, phi.source().diff_of(id))?;
        diffs.push(copy.add(&image)?.add(&gamma)?);
    }

    let mut roles = vec![Role::Plain; sg.len()];
    for id in sg.ids() {
        roles.push(Role::Hat(sg.name(id).to_string()));
    }

    let cone = ConeDga {
        base: Dga::new(cg, diffs)?,
        flavor: ConeFlavor::Torus,
        roles,
        source: phi.source().clone(),
        target: phi.target().clone(),
        morphism: phi.map().clone(),
        src_embed: plain.clone(),
        tgt_embed: plain,
        hat_embed,
    };
    let report = cone.validate();
    if !report.is_valid() {
        return Err(Error::Internal(format!(
            "torus cone failed its invariants:\n{report}"
        )));
    }
    Ok(cone)
}

struct Glued {
    dga: Dga,
    /// (copy id, hat id) for each middle generator, in middle height order.
    middle_pairs: Vec<(GenId, GenId)>,
}

/// Builds the glued algebra. Height order: target copies `g[+]`, middle
/// copies `g[0]`, source copies `g[-]`, middle hats `g[0]^`, source hats
/// `g^`; the hats sit above every copy so the middle pairs can be
/// cancelled top-down.
fn glue_internal(ca: &ConeDga, cb: &ConeDga) -> Result<Glued> {
    if ca.flavor != ConeFlavor::Interval || cb.flavor != ConeFlavor::Interval {
        return Err(Error::GlueMismatch(
            "only interval cones can be glued".into(),
        ));
    }
    // the middle algebra must agree generator-for-generator
    if ca.target() != cb.source() {
        let mut lines = Vec::new();
        let a = ca.target().genset();
        let b = cb.source().genset();
        let n = a.len().max(b.len());
        for i in 0..n {
            let left = a
                .generators()
                .get(i)
                .map(|g| format!("{} deg {}", g.name, g.degree))
                .unwrap_or_else(|| "<missing>".into());
            let right = b
                .generators()
                .get(i)
                .map(|g| format!("{} deg {}", g.name, g.degree))
                .unwrap_or_else(|| "<missing>".into());
            if left != right {
                lines.push(format!("generator {i}: `{left}` vs `{right}`"));
            }
        }
        if lines.is_empty() {
            for id in a.ids() {
                let da = ca.target().diff_of(id);
                let db = cb.source().diff_of(id);
                if da != db {
                    lines.push(format!("d {}: `{da}` vs `{db}`", a.name(id)));
                }
            }
        }
        return Err(Error::GlueMismatch(lines.join("\n")));
    }

    let a1 = ca.source();
    let a2 = ca.target();
    let a3 = cb.target();
    let g1 = a1.genset();
    let g2 = a2.genset();
    let g3 = a3.genset();

    let mut gens = Vec::new();
    for id in g3.ids() {
        gens.push(Generator::new(tagged(g3.name(id), "[+]"), g3.degree(id)));
    }
    for id in g2.ids() {
        gens.push(Generator::new(tagged(g2.name(id), "[0]"), g2.degree(id)));
    }
    for id in g1.ids() {
        gens.push(Generator::new(tagged(g1.name(id), "[-]"), g1.degree(id)));
    }
    for id in g2.ids() {
        gens.push(Generator::new(tagged(g2.name(id), "[0]^"), g2.degree(id) + 1));
    }
    for id in g1.ids() {
        gens.push(Generator::new(tagged(g1.name(id), "^"), g1.degree(id) + 1));
    }
    let gg = GenSet::new(gens)?;

    let base3 = 0u32;
    let base2 = base3 + g3.len() as u32;
    let base1 = base2 + g2.len() as u32;
    let base2h = base1 + g1.len() as u32;
    let base1h = base2h + g2.len() as u32;
    let e3: Vec<GenId> = (0..g3.len() as u32).map(|i| GenId(base3 + i)).collect();
    let e2: Vec<GenId> = (0..g2.len() as u32).map(|i| GenId(base2 + i)).collect();
    let e1: Vec<GenId> = (0..g1.len() as u32).map(|i| GenId(base1 + i)).collect();
    let h2: Vec<GenId> = (0..g2.len() as u32).map(|i| GenId(base2h + i)).collect();
    let h1: Vec<GenId> = (0..g1.len() as u32).map(|i| GenId(base1h + i)).collect();

    let m3 = GenMap::embedding(g3, &gg, &e3)?;
    let m2 = GenMap::embedding(g2, &gg, &e2)?;
    let m1 = GenMap::embedding(g1, &gg, &e1)?;
    let alpha_into = GenMap::compose(&m2, ca.morphism())?;
    let beta_into = GenMap::compose(&m3, cb.morphism())?;

    let mut diffs = Vec::with_capacity(gg.len());
    for id in g3.ids() {
        diffs.push(m3.apply(a3.diff_of(id))?);
    }
    for id in g2.ids() {
        diffs.push(m2.apply(a2.diff_of(id))?);
    }
    for id in g1.ids() {
        diffs.push(m1.apply(a1.diff_of(id))?);
    }
    for id in g2.ids() {
        let copy = Poly::generator(&gg, e2[id.index()]);
        let image = m3.apply(cb.morphism().image(id))?;
        let gamma = gamma_twisted(&m2, &h2, &beta_into, a2.diff_of(id))?;
        diffs.push(copy.add(&image)?.add(&gamma)?);
    }
    for id in g1.ids() {
        let copy = Poly::generator(&gg, e1[id.index()]);
        let image = m2.apply(ca.morphism().image(id))?;
        let gamma = gamma_twisted(&m1, &h1, &alpha_into, a1.diff_of(id))?;
        diffs.push(copy.add(&image)?.add(&gamma)?);
    }

    let dga = Dga::new(gg, diffs)?;
    dga.validate().into_result().map_err(|e| match e {
        Error::Invalid(r) => Error::Internal(format!("glued cone failed validation:\n{r}")),
        other => other,
    })?;
    let middle_pairs = g2
        .ids()
        .map(|id| (e2[id.index()], h2[id.index()]))
        .collect();
    Ok(Glued { dga, middle_pairs })
}

/// Glues two composable cones along their common middle algebra,
/// identifying the target copies of the first with the source copies of
/// the second. The inclusions of all three input algebras are DGA
/// morphisms into the result.
pub fn glue_cones(ca: &ConeDga, cb: &ConeDga) -> Result<Dga> {
    Ok(glue_internal(ca, cb)?.dga)
}

/// Concatenates two composable cones: glues them, then cancels every
/// middle pair `(b, b^)` in decreasing height via [`destabilize`]. The
/// result is the cone of the composite morphism, generator for generator,
/// and the composite projection sends each middle generator `b` to
/// `psi(b)` (verified here).
pub fn concat_cones(ca: &ConeDga, cb: &ConeDga) -> Result<ConeDga> {
    let glued = glue_internal(ca, cb)?;
    let glued_gens = Arc::clone(glued.dga.genset());

    let mut cur = glued.dga;
    let mut composite = GenMap::identity(&glued_gens);
    for &(copy, hat) in glued.middle_pairs.iter().rev() {
        // ids shift as generators are removed; resolve by name instead
        let copy_id = cur
            .genset()
            .lookup(glued_gens.name(copy))
            .ok_or_else(|| Error::Internal("middle copy vanished early".into()))?;
        let hat_id = cur
            .genset()
            .lookup(glued_gens.name(hat))
            .ok_or_else(|| Error::Internal("middle hat vanished early".into()))?;
        let (next, tau) = destabilize(&cur, hat_id, copy_id)?;
        composite = GenMap::compose(tau.map(), &composite)?;
        cur = next;
    }

    // the composite projection restricted to the middle algebra is psi
    let g2 = cb.source().genset();
    let final_gens = Arc::clone(cur.genset());
    for id in g2.ids() {
        let mid_name = tagged(g2.name(id), "[0]");
        let mid_id = glued_gens.lookup(&mid_name).unwrap();
        let got = composite.image(mid_id);
        let want = remap_tagged(cb.morphism().image(id), &final_gens, "[+]")?;
        if got != &want {
            return Err(Error::Internal(format!(
                "composite projection of {mid_name} is {got}, expected {want}"
            )));
        }
    }

    // package the survivors as the cone of the composite morphism
    let chi = GenMap::compose(cb.morphism(), ca.morphism())?;
    let g1 = ca.source().genset();
    let g3 = cb.target().genset();
    let lookup = |name: String| -> Result<GenId> {
        final_gens
            .lookup(&name)
            .ok_or_else(|| Error::Internal(format!("missing generator `{name}` after concat")))
    };
    let tgt_embed = g3
        .ids()
        .map(|id| lookup(tagged(g3.name(id), "[+]")))
        .collect::<Result<Vec<_>>>()?;
    let src_embed = g1
        .ids()
        .map(|id| lookup(tagged(g1.name(id), "[-]")))
        .collect::<Result<Vec<_>>>()?;
    let hat_embed = g1
        .ids()
        .map(|id| lookup(tagged(g1.name(id), "^")))
        .collect::<Result<Vec<_>>>()?;
    let mut roles = vec![Role::Plain; final_gens.len()];
    for id in g3.ids() {
        roles[tgt_embed[id.index()].index()] = Role::TargetCopy(g3.name(id).to_string());
    }
    for id in g1.ids() {
        roles[src_embed[id.index()].index()] = Role::SourceCopy(g1.name(id).to_string());
        roles[hat_embed[id.index()].index()] = Role::Hat(g1.name(id).to_string());
    }

    let cone = ConeDga {
        base: cur,
        flavor: ConeFlavor::Interval,
        roles,
        source: ca.source().clone(),
        target: cb.target().clone(),
        morphism: chi,
        src_embed,
        tgt_embed,
        hat_embed,
    };
    let report = cone.validate();
    if !report.is_valid() {
        return Err(Error::Internal(format!(
            "concatenated cone failed its invariants:\n{report}"
        )));
    }
    Ok(cone)
}

/// Turns a validated chain homotopy `K` between `phi` and `psi` into the
/// tame isomorphism `F` from the cone of `phi` to the cone of `psi`:
/// `F(c^) = c^ + K(c) + Gamma_K(d c)` and the identity on all copies.
/// `F . D_phi = D_psi . F` is machine-verified before returning; a nonzero
/// residual is an internal error. The inverse is the same substitution
/// sequence in reverse order.
pub fn homotopy_iso(k: &ChainHomotopy) -> Result<TameIso> {
    k.validate().into_result()?;
    let cone_phi = build_cone_interval(&k.phi)?;
    let cone_psi = build_cone_interval(&k.psi)?;
    let cg = cone_phi.base().genset();
    let sg = k.source().genset();
    let tg = k.target().genset();

    let src_map = GenMap::embedding(sg, cg, &cone_phi.src_embed)?;
    let tgt_map = GenMap::embedding(tg, cg, &cone_phi.tgt_embed)?;
    let k_into = |m: &crate::freealg::Monomial| -> Result<Poly> {
        tgt_map.apply(&k.eval_monomial(m)?)
    };

    let mut steps = Vec::new();
    for id in sg.ids() {
        let kc = tgt_map.apply(k.values().image(id))?;
        let gk = gamma_k(&src_map, &cone_phi.hat_embed, &k_into, k.source().diff_of(id))?;
        let addend = kc.add(&gk)?;
        if !addend.is_zero() {
            steps.push(TameStep::Substitute {
                gen: cone_phi.hat_embed[id.index()],
                addend,
            });
        }
    }
    let iso = TameIso::new(cg, steps)?;

    // verify F . D_phi = D_psi . F on every generator
    for id in cg.ids() {
        let lhs = iso.apply_poly(cone_phi.base().diff_of(id))?;
        let fg = iso.apply_poly(&Poly::generator(cg, id))?;
        let rhs = cone_psi.base().differential(&fg)?;
        let residual = lhs.add(&rhs)?;
        if !residual.is_zero() {
            return Err(Error::Internal(format!(
                "homotopy isomorphism residual on {}: {residual}",
                cg.name(id)
            )));
        }
    }
    Ok(iso)
}
