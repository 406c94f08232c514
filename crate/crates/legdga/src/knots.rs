//! Built-in example DGAs and loop monodromies: the unknot, the trefoil
//! loop, and the (p,2) torus-knot loops, plus the elementary Lagrangian
//! move morphisms.
//!
//! The (p,2) DGA has degree-0 generators `b1..bp` (all closed) and two
//! degree-1 generators with
//!
//! ```text
//! d a1 = 1 + B11        d a2 = 1 + B22 + B12.B21
//! ```
//!
//! where the `B` polynomials are the entries of the transfer-matrix
//! product `M(b1) M(b2) ... M(bp)` with `M(g) = [[g, 1], [1, 0]]`:
//! `B11` at (1,1), `B21` at (1,2), `B12` at (2,1) and `B22` at (2,2).
//! Note the product order in `d a2`: `B12.B21` (not `B21.B12`) is the
//! form compatible with the loop monodromy being a chain map; the two
//! variants differ by one cyclically reordered word and are
//! indistinguishable to augmentations and to the single-variable collapse.
//!
//! The monodromy relabels `b_i -> b_{i-1}` for `i >= 2`, sends `b1` to the
//! (1,1) entry of `M(b2)...M(bp)` (which equals `B12`), `a1` to `a2`, and
//! `a2` to `a1 + B21.(B12.a1 + a2.bp)` — again the ordering that passes
//! the chain-map check; `B12` and `B21` have the same abelianization, so
//! the swapped variant is indistinguishable on every collapsed quantity
//! but fails to be a chain map. Every constructor validates its output
//! before returning it.

use std::sync::Arc;

use crate::dga::{destabilize, Dga, DgaMorphism};
use crate::error::{Error, Result};
use crate::freealg::{GenId, GenMap, GenSet, Generator, Poly};

/// One unknot chord: a single generator of degree 1 with zero differential.
pub fn unknot_dga() -> Dga {
    let gens = GenSet::new(vec![Generator::new("c", 1)]).expect("static generator list");
    let d = Dga::new(Arc::clone(&gens), vec![Poly::zero(&gens)]).expect("static differential");
    debug_assert!(d.validate().is_valid());
    d
}

/// 2x2 matrix over the free algebra, for the transfer-matrix products.
struct Mat2 {
    e: [[Poly; 2]; 2],
}

impl Mat2 {
    fn identity(gens: &Arc<GenSet>) -> Mat2 {
        Mat2 {
            e: [
                [Poly::one(gens), Poly::zero(gens)],
                [Poly::zero(gens), Poly::one(gens)],
            ],
        }
    }

    fn chord(gens: &Arc<GenSet>, g: GenId) -> Mat2 {
        Mat2 {
            e: [
                [Poly::generator(gens, g), Poly::one(gens)],
                [Poly::one(gens), Poly::zero(gens)],
            ],
        }
    }

    fn mul(&self, other: &Mat2) -> Result<Mat2> {
        let mut e = [
            [
                Poly::zero(self.e[0][0].genset()),
                Poly::zero(self.e[0][0].genset()),
            ],
            [
                Poly::zero(self.e[0][0].genset()),
                Poly::zero(self.e[0][0].genset()),
            ],
        ];
        for (i, row) in e.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                for k in 0..2 {
                    *entry = entry.add(&self.e[i][k].mul(&other.e[k][j])?)?;
                }
            }
        }
        Ok(Mat2 { e })
    }
}

fn transfer_product(gens: &Arc<GenSet>, chords: &[GenId]) -> Result<Mat2> {
    let mut acc = Mat2::identity(gens);
    for &g in chords {
        acc = acc.mul(&Mat2::chord(gens, g))?;
    }
    Ok(acc)
}

/// Transfer-matrix entries of the full braid word `b1..bp`, in the order
/// `(B11, B21, B12, B22)`.
pub fn b_matrix(gens: &Arc<GenSet>, bs: &[GenId]) -> Result<(Poly, Poly, Poly, Poly)> {
    let m = transfer_product(gens, bs)?;
    let [[b11, b21], [b12, b22]] = m.e;
    Ok((b11, b21, b12, b22))
}

fn check_p(p: u32) -> Result<()> {
    if p % 2 == 0 || p < 3 {
        return Err(Error::DomainMismatch(format!(
            "(p,2) torus knots need odd p >= 3, got {p}"
        )));
    }
    if p > 15 {
        return Err(Error::ResourceBound(format!(
            "(p,2) torus knots are built for p <= 15, got {p}"
        )));
    }
    Ok(())
}

/// The DGA of the (p,2) torus knot: `b1..bp` of degree 0 and `a1, a2` of
/// degree 1 with the transfer-matrix differentials.
pub fn torus_2p_dga(p: u32) -> Result<Dga> {
    check_p(p)?;
    let mut gens: Vec<Generator> = (1..=p).map(|i| Generator::new(format!("b{i}"), 0)).collect();
    gens.push(Generator::new("a1", 1));
    gens.push(Generator::new("a2", 1));
    let gens = GenSet::new(gens)?;
    let bs: Vec<GenId> = (0..p).map(GenId).collect();
    let (b11, b21, b12, b22) = b_matrix(&gens, &bs)?;

    let da1 = Poly::one(&gens).add(&b11)?;
    let da2 = Poly::one(&gens).add(&b22)?.add(&b12.mul(&b21)?)?;
    let mut diffs: Vec<Poly> = (0..p).map(|_| Poly::zero(&gens)).collect();
    diffs.push(da1);
    diffs.push(da2);

    let d = Dga::new(gens, diffs)?;
    d.validate().into_result()?;
    Ok(d)
}

/// The monodromy of the (p,2) loop, validated as a chain map before it is
/// returned.
///
/// The validation expands `mu(d a2)` and `d(mu(a2))` exactly; their term
/// counts grow like the square of a Fibonacci number, so the builder stops
/// at p = 11 (about four million words) where the plain DGA builder goes
/// to 15.
pub fn torus_2p_monodromy(p: u32) -> Result<DgaMorphism> {
    if p > 11 {
        return Err(Error::ResourceBound(format!(
            "validating the (p,2) monodromy needs ~Fib(p)^2 Fib(p+1) words; capped at p <= 11, got {p}"
        )));
    }
    let d = torus_2p_dga(p)?;
    let gens = d.genset();
    let bs: Vec<GenId> = (0..p).map(GenId).collect();
    let (_, b21, b12, _) = b_matrix(gens, &bs)?;

    // b1 maps to the (1,1) entry of the truncated product over b2..bp
    let truncated = transfer_product(gens, &bs[1..])?;
    let mu_b1 = truncated.e[0][0].clone();

    let a1 = Poly::generator(gens, GenId(p));
    let a2 = Poly::generator(gens, GenId(p + 1));
    let bp = Poly::generator(gens, bs[(p - 1) as usize]);
    let mu_a2 = a1.add(&b21.mul(&b12.mul(&a1)?.add(&a2.mul(&bp)?)?)?)?;

    let mut images = vec![mu_b1];
    for i in 1..p {
        images.push(Poly::generator(gens, bs[(i - 1) as usize]));
    }
    images.push(a2);
    images.push(mu_a2);

    let map = GenMap::new(Arc::clone(gens), Arc::clone(gens), images)?;
    let mu = DgaMorphism::new(d.clone(), d, map)?;
    mu.validate().into_result()?;
    Ok(mu)
}

/// The trefoil knot DGA (the p = 3 torus knot).
pub fn trefoil_dga() -> Dga {
    torus_2p_dga(3).expect("p = 3 is always in range")
}

/// The trefoil loop monodromy.
pub fn trefoil_monodromy() -> DgaMorphism {
    torus_2p_monodromy(3).expect("the trefoil monodromy is a chain map")
}

/// The triple-point move morphism: `a -> a + b.c`, identity on all other
/// generators. Requires `|a| = |b| + |c|`; validated as a chain map.
pub fn build_l1_morphism(d: &Dga, a: GenId, b: GenId, c: GenId) -> Result<DgaMorphism> {
    let gens = d.genset();
    if gens.degree(a) != gens.degree(b) + gens.degree(c) {
        return Err(Error::DomainMismatch(format!(
            "|{}| = {} but |{}| + |{}| = {}",
            gens.name(a),
            gens.degree(a),
            gens.name(b),
            gens.name(c),
            gens.degree(b) + gens.degree(c)
        )));
    }
    let images = gens
        .ids()
        .map(|id| {
            let g = Poly::generator(gens, id);
            if id == a {
                g.add(&Poly::generator(gens, b).mul(&Poly::generator(gens, c))?)
            } else {
                Ok(g)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let phi = DgaMorphism::new(
        d.clone(),
        d.clone(),
        GenMap::new(Arc::clone(gens), Arc::clone(gens), images)?,
    )?;
    phi.validate().into_result()?;
    Ok(phi)
}

/// The chord-death move morphism: `a -> 0`, `b -> d a + b`, identity on
/// the surviving generators. The target is the sub-DGA without `a` and
/// `b`, with the differential pushed through the projection; this is the
/// destabilization projection of the pair.
pub fn build_l2_morphism(d: &Dga, a: GenId, b: GenId) -> Result<DgaMorphism> {
    let gens = d.genset();
    if gens.degree(a) != gens.degree(b) + 1 {
        return Err(Error::DomainMismatch(format!(
            "|{}| = {} but |{}| + 1 = {}",
            gens.name(a),
            gens.degree(a),
            gens.name(b),
            gens.degree(b) + 1
        )));
    }
    let (_, tau) = destabilize(d, a, b)?;
    Ok(tau)
}
