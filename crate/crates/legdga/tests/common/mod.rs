//! Shared test support: seeded random DGA/chain-map/homotopy generators
//! and the monomial-splitting oracles used by the cone identity tests.

use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use legdga::cone::ConeDga;
use legdga::dga::{
    destabilize, stabilize, ChainHomotopy, Dga, DgaMorphism, ExtensionRule, TameIso, TameStep,
};
use legdga::freealg::{gamma_k, gamma_twisted, GenId, GenMap, GenSet, Generator, Monomial, Poly};
use legdga::Result;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Caps from the random-instance test brief: at most 8 generators, degrees
/// in [-2, 4], at most 4 terms per differential, and words of length at
/// most 4.
pub const MAX_GENS: usize = 8;
pub const DEG_RANGE: std::ops::RangeInclusive<i64> = -2..=4;
pub const MAX_TERMS: usize = 4;
pub const MAX_WORD: usize = 4;

/// A random homogeneous monomial of exact degree `d` over `allowed`, with
/// bounded length; `None` when sampling fails to hit the degree.
fn random_monomial(
    rng: &mut StdRng,
    gens: &Arc<GenSet>,
    allowed: &[GenId],
    d: i64,
    max_len: usize,
) -> Option<Monomial> {
    for _ in 0..60 {
        let len = rng.gen_range(0..=max_len);
        let m: Vec<GenId> = (0..len)
            .map(|_| allowed[rng.gen_range(0..allowed.len())])
            .collect();
        let deg: i64 = m.iter().map(|&g| gens.degree(g)).sum();
        if deg == d && (!m.is_empty() || d == 0) {
            return Some(Monomial::from_factors(m));
        }
    }
    None
}

/// A random homogeneous polynomial of exact degree `d` (possibly zero).
fn random_homogeneous(
    rng: &mut StdRng,
    gens: &Arc<GenSet>,
    allowed: &[GenId],
    d: i64,
    max_terms: usize,
    max_len: usize,
) -> Poly {
    if allowed.is_empty() && d != 0 {
        return Poly::zero(gens);
    }
    let want = rng.gen_range(0..=max_terms);
    let mut terms = Vec::new();
    for _ in 0..want {
        if let Some(m) = random_monomial(rng, gens, allowed, d, max_len) {
            terms.push(m);
        }
    }
    Poly::from_monomials(gens, terms)
}

/// A random triangular DGA within the caps, built from closed base
/// generators, stabilization pairs, and tame substitutions; valid by
/// construction (and asserted).
pub fn random_dga(rng: &mut StdRng) -> Dga {
    let n_base = rng.gen_range(1..=3);
    let gens: Vec<Generator> = (0..n_base)
        .map(|i| Generator::new(format!("g{i}"), rng.gen_range(DEG_RANGE)))
        .collect();
    let genset = GenSet::new(gens).unwrap();
    let diffs = genset.ids().map(|_| Poly::zero(&genset)).collect();
    let mut dga = Dga::new(genset, diffs).unwrap();

    let n_pairs = rng.gen_range(0..=2).min((MAX_GENS - n_base) / 2);
    for k in 0..n_pairs {
        let deg = rng.gen_range(DEG_RANGE);
        dga = stabilize(&dga, &format!("s{k}"), &format!("t{k}"), deg).unwrap();
    }

    // shuffle the differentials around with tame substitutions, keeping
    // every differential inside the size caps
    for _ in 0..rng.gen_range(0..=6) {
        let g = dga.genset();
        let n = g.len();
        if n < 2 {
            break;
        }
        let target = GenId(rng.gen_range(1..n) as u32);
        let below: Vec<GenId> = (0..target.0).map(GenId).collect();
        let addend = random_homogeneous(rng, g, &below, g.degree(target), 2, 3);
        if addend.is_zero() || addend.mentions(target) {
            continue;
        }
        let step = TameIso::new(
            g,
            vec![TameStep::Substitute {
                gen: target,
                addend,
            }],
        )
        .unwrap();
        let Ok(moved) = legdga::dga::apply_tame_iso(&step, &dga) else {
            continue;
        };
        let within_caps = moved.genset().ids().all(|id| {
            let dp = moved.diff_of(id);
            dp.term_count() <= MAX_TERMS && dp.terms().iter().all(|m| m.len() <= MAX_WORD)
        });
        if within_caps {
            dga = moved;
        }
    }

    assert!(dga.validate().is_valid(), "generator produced an invalid DGA");
    dga
}

/// Builds `psi := phi + K d + d K` from random degree +1 values on the
/// generators, extending `K` by the given rule. The construction walks up
/// the height order because evaluating `K` on `d c` needs `psi` on the
/// lower generators. Returns the homotopy, whose `psi` is a validated
/// chain map.
pub fn homotopic_perturbation(
    rng: &mut StdRng,
    phi: &DgaMorphism,
    rule: ExtensionRule,
) -> ChainHomotopy {
    let sg = phi.source().genset();
    let tg = phi.target().genset();
    let t_all: Vec<GenId> = tg.ids().collect();
    let k_values: Vec<Poly> = sg
        .ids()
        .map(|id| {
            if rng.gen_bool(0.6) {
                random_homogeneous(rng, tg, &t_all, sg.degree(id) + 1, 2, 3)
            } else {
                Poly::zero(tg)
            }
        })
        .collect();
    homotopy_from_values(phi, k_values, rule).expect("oracle construction is total")
}

/// The deterministic part of the oracle: given `K` values, produce the
/// homotopy with `psi` defined generator by generator.
pub fn homotopy_from_values(
    phi: &DgaMorphism,
    k_values: Vec<Poly>,
    rule: ExtensionRule,
) -> Result<ChainHomotopy> {
    let sg = phi.source().genset();
    let tg = phi.target().genset();
    let mut psi_images: Vec<Poly> = Vec::with_capacity(sg.len());

    // K on a word, using psi only on generators below the current one
    let eval_k = |psi_images: &[Poly], m: &Monomial| -> Result<Poly> {
        let mut acc = Poly::zero(tg);
        let fs = m.factors();
        for j in 0..fs.len() {
            let mut left = Poly::one(tg);
            for &g in &fs[..j] {
                let img = match rule {
                    ExtensionRule::PsiLeft => &psi_images[g.index()],
                    ExtensionRule::PhiLeft => phi.map().image(g),
                };
                left = left.mul(img)?;
            }
            let mut right = Poly::one(tg);
            for &g in &fs[j + 1..] {
                let img = match rule {
                    ExtensionRule::PsiLeft => phi.map().image(g),
                    ExtensionRule::PhiLeft => &psi_images[g.index()],
                };
                right = right.mul(img)?;
            }
            acc = acc.add(&left.mul(&k_values[fs[j].index()])?.mul(&right)?)?;
        }
        Ok(acc)
    };

    for id in sg.ids() {
        let mut k_of_dc = Poly::zero(tg);
        for m in phi.source().diff_of(id).terms() {
            k_of_dc = k_of_dc.add(&eval_k(&psi_images, m)?)?;
        }
        let image = phi
            .map()
            .image(id)
            .add(&k_of_dc)?
            .add(&phi.target().differential(&k_values[id.index()])?)?;
        psi_images.push(image);
    }

    let psi = DgaMorphism::new(
        phi.source().clone(),
        phi.target().clone(),
        GenMap::new(Arc::clone(sg), Arc::clone(tg), psi_images)?,
    )?;
    let values = GenMap::new(Arc::clone(sg), Arc::clone(tg), k_values)?;
    ChainHomotopy::new(phi.clone(), psi, values, rule)
}

/// A random chain endomorphism: the identity perturbed through the
/// homotopy oracle, sometimes squared.
pub fn random_endomorphism(rng: &mut StdRng, d: &Dga) -> DgaMorphism {
    let mut phi = DgaMorphism::identity(d);
    for _ in 0..rng.gen_range(1..=2) {
        let k = homotopic_perturbation(rng, &phi, ExtensionRule::default());
        phi = k.psi.clone();
    }
    phi
}

/// A composable random pair `phi: A1 -> A2`, `psi: A2 -> A3` where `A2`
/// stabilizes `A1` and `A3 = A1` again (via the cancelling projection), so
/// the middle genuinely differs from the ends.
pub fn random_composable_pair(rng: &mut StdRng) -> (DgaMorphism, DgaMorphism) {
    let a1 = random_dga(rng);
    let deg = rng.gen_range(DEG_RANGE);
    let a2 = stabilize(&a1, "sx", "tx", deg).unwrap();
    let incl = {
        let images = a1
            .genset()
            .ids()
            .map(|id| Poly::generator(a2.genset(), id))
            .collect();
        DgaMorphism::new(
            a1.clone(),
            a2.clone(),
            GenMap::new(Arc::clone(a1.genset()), Arc::clone(a2.genset()), images).unwrap(),
        )
        .unwrap()
    };
    let (_, tau) = destabilize(
        &a2,
        a2.genset().lookup("sx").unwrap(),
        a2.genset().lookup("tx").unwrap(),
    )
    .unwrap();

    let e1 = random_endomorphism(rng, &a1);
    let e2 = random_endomorphism(rng, &a2);
    let e3 = random_endomorphism(rng, &a1);

    // phi = e2 . incl . e1 : A1 -> A2, psi = e3 . tau : A2 -> A1
    let phi = e1.then(&incl).unwrap().then(&e2).unwrap();
    let psi = tau.then(&e3).unwrap();
    (phi, psi)
}

/// Splitting-sum oracles from the cone-isomorphism proof, evaluated inside
/// the cone of `psi`. All five are linear over the terms of their input.
pub struct ConeOracles<'a> {
    pub k: &'a ChainHomotopy,
    pub cone_psi: &'a ConeDga,
    pub src: GenMap,
    pub tgt: GenMap,
    pub phi_into: GenMap,
    pub psi_into: GenMap,
}

impl<'a> ConeOracles<'a> {
    pub fn new(k: &'a ChainHomotopy, cone_psi: &'a ConeDga) -> ConeOracles<'a> {
        let sg = k.source().genset();
        let tg = k.target().genset();
        let cg = cone_psi.base().genset();
        let src_ids: Vec<GenId> = sg.ids().map(|id| cone_psi.source_copy(id)).collect();
        let tgt_ids: Vec<GenId> = tg.ids().map(|id| cone_psi.target_copy(id)).collect();
        let src = GenMap::embedding(sg, cg, &src_ids).unwrap();
        let tgt = GenMap::embedding(tg, cg, &tgt_ids).unwrap();
        let phi_into = GenMap::compose(&tgt, k.phi.map()).unwrap();
        let psi_into = GenMap::compose(&tgt, k.psi.map()).unwrap();
        ConeOracles {
            k,
            cone_psi,
            src,
            tgt,
            phi_into,
            psi_into,
        }
    }

    fn hats(&self) -> Vec<GenId> {
        self.k
            .source()
            .genset()
            .ids()
            .map(|id| self.cone_psi.hat(id))
            .collect()
    }

    pub fn k_into(&self, m: &Monomial) -> Poly {
        self.tgt.apply(&self.k.eval_monomial(m).unwrap()).unwrap()
    }

    fn k_into_poly(&self, p: &Poly) -> Poly {
        self.tgt.apply(&self.k.eval(p).unwrap()).unwrap()
    }

    pub fn gamma_k(&self, p: &Poly) -> Poly {
        let hats = self.hats();
        let eval = |m: &Monomial| -> Result<Poly> { Ok(self.k_into(m)) };
        gamma_k(&self.src, &hats, &eval, p).unwrap()
    }

    fn gamma_psi(&self, p: &Poly) -> Poly {
        gamma_twisted(&self.src, &self.hats(), &self.psi_into, p).unwrap()
    }

    /// `Omega_phi^{Gamma_K . d}`: hat and K both inside a differential of
    /// one factor.
    pub fn omega_gamma_k_d(&self, p: &Poly) -> Poly {
        let cg = self.cone_psi.base().genset();
        let mut acc = Poly::zero(cg);
        for word in p.terms() {
            let fs = word.factors();
            for j in 0..fs.len() {
                let prefix = self
                    .src
                    .apply_monomial(&Monomial::from_factors(fs[..j].to_vec()))
                    .unwrap();
                let mid = self.gamma_k(self.k.source().diff_of(fs[j]));
                let suffix = self
                    .phi_into
                    .apply_monomial(&Monomial::from_factors(fs[j + 1..].to_vec()))
                    .unwrap();
                acc = acc.add(&prefix.mul(&mid).unwrap().mul(&suffix).unwrap()).unwrap();
            }
        }
        acc
    }

    /// Hat inside a differential, K outside:
    /// `sum_j b_1..b_{j-1} Gamma_psi(d b_j) K(b_{j+1}..b_s)`.
    pub fn a_sum(&self, p: &Poly) -> Poly {
        let cg = self.cone_psi.base().genset();
        let mut acc = Poly::zero(cg);
        for word in p.terms() {
            let fs = word.factors();
            if fs.len() < 2 {
                continue;
            }
            for j in 0..fs.len() - 1 {
                let prefix = self
                    .src
                    .apply_monomial(&Monomial::from_factors(fs[..j].to_vec()))
                    .unwrap();
                let mid = self.gamma_psi(self.k.source().diff_of(fs[j]));
                let tail = self.k_into(&Monomial::from_factors(fs[j + 1..].to_vec()));
                acc = acc.add(&prefix.mul(&mid).unwrap().mul(&tail).unwrap()).unwrap();
            }
        }
        acc
    }

    /// Hat outside, K applied to the differential of the whole tail:
    /// `sum_j b_1..b_{j-1} b_j^ K(d(b_{j+1}..b_s))`.
    pub fn b_sum(&self, p: &Poly) -> Poly {
        let cg = self.cone_psi.base().genset();
        let hats = self.hats();
        let mut acc = Poly::zero(cg);
        for word in p.terms() {
            let fs = word.factors();
            if fs.len() < 2 {
                continue;
            }
            for j in 0..fs.len() - 1 {
                let prefix = self
                    .src
                    .apply_monomial(&Monomial::from_factors(fs[..j].to_vec()))
                    .unwrap();
                let hat = Poly::generator(cg, hats[fs[j].index()]);
                let d_tail = self
                    .k
                    .source()
                    .differential(&Poly::monomial(
                        self.k.source().genset(),
                        Monomial::from_factors(fs[j + 1..].to_vec()),
                    ))
                    .unwrap();
                let tail = self.k_into_poly(&d_tail);
                acc = acc.add(&prefix.mul(&hat).unwrap().mul(&tail).unwrap()).unwrap();
            }
        }
        acc
    }

    /// Differential acting left of the hat:
    /// `sum_j d(b_1..b_{j-1}) b_j^ K(b_{j+1}..b_s)`.
    pub fn c_sum(&self, p: &Poly) -> Poly {
        let cg = self.cone_psi.base().genset();
        let hats = self.hats();
        let mut acc = Poly::zero(cg);
        for word in p.terms() {
            let fs = word.factors();
            if fs.len() < 2 {
                continue;
            }
            for j in 1..fs.len() - 1 {
                let d_prefix = self
                    .k
                    .source()
                    .differential(&Poly::monomial(
                        self.k.source().genset(),
                        Monomial::from_factors(fs[..j].to_vec()),
                    ))
                    .unwrap();
                let prefix = self.src.apply(&d_prefix).unwrap();
                let hat = Poly::generator(cg, hats[fs[j].index()]);
                let tail = self.k_into(&Monomial::from_factors(fs[j + 1..].to_vec()));
                acc = acc.add(&prefix.mul(&hat).unwrap().mul(&tail).unwrap()).unwrap();
            }
        }
        acc
    }

    /// Differential acting inside the K image:
    /// `sum_j b_1..b_{j-1} b_j^ d(K(b_{j+1}..b_s))`.
    pub fn d_sum(&self, p: &Poly) -> Poly {
        let cg = self.cone_psi.base().genset();
        let hats = self.hats();
        let mut acc = Poly::zero(cg);
        for word in p.terms() {
            let fs = word.factors();
            if fs.len() < 2 {
                continue;
            }
            for j in 0..fs.len() - 1 {
                let prefix = self
                    .src
                    .apply_monomial(&Monomial::from_factors(fs[..j].to_vec()))
                    .unwrap();
                let hat = Poly::generator(cg, hats[fs[j].index()]);
                let k_tail = self.k_into(&Monomial::from_factors(fs[j + 1..].to_vec()));
                let d_k_tail = self.cone_psi.base().differential(&k_tail).unwrap();
                acc = acc.add(&prefix.mul(&hat).unwrap().mul(&d_k_tail).unwrap()).unwrap();
            }
        }
        acc
    }

    /// `Omega_phi^K`: K replacing one factor.
    pub fn omega_k(&self, p: &Poly) -> Poly {
        let cg = self.cone_psi.base().genset();
        let mut acc = Poly::zero(cg);
        for word in p.terms() {
            let fs = word.factors();
            for j in 0..fs.len() {
                let prefix = self
                    .src
                    .apply_monomial(&Monomial::from_factors(fs[..j].to_vec()))
                    .unwrap();
                let mid = self.k_into(&Monomial::generator(fs[j]));
                let suffix = self
                    .phi_into
                    .apply_monomial(&Monomial::from_factors(fs[j + 1..].to_vec()))
                    .unwrap();
                acc = acc.add(&prefix.mul(&mid).unwrap().mul(&suffix).unwrap()).unwrap();
            }
        }
        acc
    }

    /// Splits a cone element into its hat-degree parts: words with no hat
    /// factor and words with exactly one.
    pub fn hat_parts(&self, p: &Poly) -> (Poly, Poly) {
        let cg = self.cone_psi.base().genset();
        let hats = self.hats();
        let is_hat = |g: GenId| hats.contains(&g);
        let mut zero = Vec::new();
        let mut one = Vec::new();
        for m in p.terms() {
            match m.factors().iter().filter(|&&g| is_hat(g)).count() {
                0 => zero.push(m.clone()),
                1 => one.push(m.clone()),
                _ => {}
            }
        }
        (
            Poly::from_monomials(cg, zero),
            Poly::from_monomials(cg, one),
        )
    }
}
