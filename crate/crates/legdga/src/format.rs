//! Line-oriented text formats.
//!
//! Polynomial grammar, shared by every file format:
//!
//! ```text
//! poly := "0" | term ("+" term)*
//! term := "1" | IDENT ("." IDENT)*
//! ```
//!
//! Whitespace is insignificant around `+`, `.` and `=`. Identifiers start
//! with a letter and continue with letters, digits, `_`, `'` or `^`; hat
//! generators carry a trailing `^` (e.g. `b1^`) and cone copies a tag
//! `[-]`, `[+]` or `[0]`.
//!
//! DGA files (`#` starts a comment anywhere on a line):
//!
//! ```text
//! gen b1 deg 0          # declaration order = height order, ascending
//! gen a1 deg 1
//! d a1 = 1 + b1 + b3 + b1.b2.b3
//! ```
//!
//! A generator with no `d` line has zero differential. Morphism files hold
//! optional `source FILE` / `target FILE` headers followed by
//! `map IDENT = poly` lines; generators omitted from a morphism map
//! identically when source and target agree. Homotopy files use the same
//! `map` lines (omitted generators map to 0) plus an optional
//! `rule psi-left | phi-left` line selecting the product extension.
//!
//! Cone files are DGA files carrying `# flavor:` and per-generator
//! `# role:` comments; [`parse_cone`] reconstructs the underlying morphism
//! from them and re-verifies the cone against a rebuild.

use std::sync::Arc;

use crate::cone::{build_cone_interval, build_cone_torus, ConeDga, ConeFlavor, Role};
use crate::dga::{Dga, DgaMorphism, ExtensionRule};
use crate::error::{Error, Result};
use crate::freealg::{GenMap, GenSet, Generator, Monomial, Poly};

/// Parses a polynomial over a known generator set.
pub fn parse_poly(gens: &Arc<GenSet>, input: &str) -> Result<Poly> {
    parse_poly_at(gens, input, 0)
}

/// Splits on `sep`, ignoring occurrences inside the `[...]` copy tags.
fn split_outside_brackets(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn parse_poly_at(gens: &Arc<GenSet>, input: &str, line: usize) -> Result<Poly> {
    let s = input.trim();
    if s.is_empty() {
        return Err(Error::parse(line, "empty polynomial"));
    }
    if s == "0" {
        return Ok(Poly::zero(gens));
    }
    let mut terms = Vec::new();
    for term in split_outside_brackets(s, '+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(Error::parse(line, "empty term between `+` signs"));
        }
        if term == "1" {
            terms.push(Monomial::unit());
            continue;
        }
        let mut factors = Vec::new();
        for name in split_outside_brackets(term, '.') {
            let name = name.trim();
            match gens.lookup(name) {
                Some(id) => factors.push(id),
                None => {
                    return Err(Error::parse(
                        line,
                        format!("unknown generator `{name}` in polynomial"),
                    ))
                }
            }
        }
        terms.push(Monomial::from_factors(factors));
    }
    Ok(Poly::from_monomials(gens, terms))
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses a DGA file. Structure only; run [`Dga::validate`] for the axioms.
pub fn parse_dga(text: &str) -> Result<Dga> {
    let mut gens: Vec<Generator> = Vec::new();
    // first pass: generator declarations
    for (ln, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("gen") => {
                let name = words
                    .next()
                    .ok_or_else(|| Error::parse(ln + 1, "gen: missing name"))?;
                if words.next() != Some("deg") {
                    return Err(Error::parse(ln + 1, "gen: expected `deg`"));
                }
                let deg: i64 = words
                    .next()
                    .ok_or_else(|| Error::parse(ln + 1, "gen: missing degree"))?
                    .parse()
                    .map_err(|_| Error::parse(ln + 1, "gen: degree is not an integer"))?;
                if words.next().is_some() {
                    return Err(Error::parse(ln + 1, "gen: trailing tokens"));
                }
                gens.push(Generator::new(name, deg));
            }
            Some("d") | Some("source") | Some("target") | Some("map") | Some("rule") => {}
            Some(other) => {
                return Err(Error::parse(ln + 1, format!("unknown directive `{other}`")))
            }
            None => {}
        }
    }
    let genset = GenSet::new(gens).map_err(|e| match e {
        Error::Parse { msg, .. } => Error::Parse { line: 0, msg },
        other => other,
    })?;
    // second pass: differentials
    let mut diffs: Vec<Option<Poly>> = vec![None; genset.len()];
    for (ln, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if !line.starts_with("d ") && line != "d" {
            continue;
        }
        let rest = &line[1..];
        let (name, poly) = rest
            .split_once('=')
            .ok_or_else(|| Error::parse(ln + 1, "d: expected `d NAME = poly`"))?;
        let name = name.trim();
        let id = genset
            .lookup(name)
            .ok_or_else(|| Error::parse(ln + 1, format!("d: unknown generator `{name}`")))?;
        if diffs[id.index()].is_some() {
            return Err(Error::parse(
                ln + 1,
                format!("d: duplicate differential for `{name}`"),
            ));
        }
        diffs[id.index()] = Some(parse_poly_at(&genset, poly, ln + 1)?);
    }
    let diffs = diffs
        .into_iter()
        .map(|d| d.unwrap_or_else(|| Poly::zero(&genset)))
        .collect();
    Dga::new(genset, diffs)
}

/// Serializes a DGA in the file format; output is canonical byte-for-byte.
pub fn serialize_dga(d: &Dga) -> String {
    let mut out = String::new();
    write_gens(&mut out, d, None);
    write_diffs(&mut out, d);
    out
}

fn write_gens(out: &mut String, d: &Dga, roles: Option<&[Role]>) {
    let gens = d.genset();
    for id in gens.ids() {
        out.push_str(&format!("gen {} deg {}", gens.name(id), gens.degree(id)));
        if let Some(roles) = roles {
            out.push_str(&format!("  # role: {}", roles[id.index()]));
        }
        out.push('\n');
    }
}

fn write_diffs(out: &mut String, d: &Dga) {
    let gens = d.genset();
    for id in gens.ids() {
        let dp = d.diff_of(id);
        if !dp.is_zero() {
            out.push_str(&format!("d {} = {dp}\n", gens.name(id)));
        }
    }
}

/// Serializes a cone with its flavor and per-generator role comments.
/// The output round-trips through [`parse_cone`].
pub fn serialize_cone(c: &ConeDga) -> String {
    let mut out = String::new();
    out.push_str(&format!("# flavor: {}\n", c.flavor()));
    write_gens(&mut out, c.base(), Some(c.roles()));
    write_diffs(&mut out, c.base());
    out
}

/// Re-reads a cone file: parses the DGA, recovers the morphism from the
/// role annotations, rebuilds the cone and checks the rebuild agrees with
/// the file.
pub fn parse_cone(text: &str) -> Result<ConeDga> {
    let base = parse_dga(text)?;
    let gens = Arc::clone(base.genset());

    let mut flavor: Option<ConeFlavor> = None;
    let mut roles: Vec<Option<Role>> = vec![None; gens.len()];
    let mut gen_cursor = 0usize;
    for (ln, raw) in text.lines().enumerate() {
        let code = strip_comment(raw).trim();
        let comment = raw.find('#').map(|i| raw[i + 1..].trim());
        if code.is_empty() {
            if let Some(c) = comment {
                if let Some(f) = c.strip_prefix("flavor:") {
                    flavor = Some(match f.trim() {
                        "interval" => ConeFlavor::Interval,
                        "torus" => ConeFlavor::Torus,
                        other => {
                            return Err(Error::parse(ln + 1, format!("unknown flavor `{other}`")))
                        }
                    });
                }
            }
            continue;
        }
        if code.starts_with("gen ") {
            let idx = gen_cursor;
            gen_cursor += 1;
            if let Some(c) = comment {
                if let Some(r) = c.strip_prefix("role:") {
                    roles[idx] = Some(parse_role(r.trim(), ln + 1)?);
                }
            }
        }
    }
    let flavor = flavor.ok_or_else(|| Error::parse(0, "cone file missing `# flavor:` header"))?;
    let roles: Vec<Role> = roles
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.ok_or_else(|| {
                Error::parse(
                    0,
                    format!("generator `{}` has no role annotation", gens.name(crate::freealg::GenId(i as u32))),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;

    reconstruct_cone(&base, flavor, &roles)
}

fn parse_role(s: &str, line: usize) -> Result<Role> {
    if s == "plain" {
        return Ok(Role::Plain);
    }
    if let Some(b) = s.strip_prefix("source-copy of ") {
        return Ok(Role::SourceCopy(b.trim().to_string()));
    }
    if let Some(b) = s.strip_prefix("target-copy of ") {
        return Ok(Role::TargetCopy(b.trim().to_string()));
    }
    if let Some(b) = s.strip_prefix("hat of ") {
        return Ok(Role::Hat(b.trim().to_string()));
    }
    Err(Error::parse(line, format!("unknown role `{s}`")))
}

/// Rebuilds the cone a file describes from its roles, verifying that the
/// described differential is exactly the cone of the recovered morphism.
fn reconstruct_cone(base: &Dga, flavor: ConeFlavor, roles: &[Role]) -> Result<ConeDga> {
    let gens = base.genset();
    let bad = |msg: String| Error::parse(0, msg);

    match flavor {
        ConeFlavor::Torus => {
            // plain generators form the base algebra; hats carry the monodromy
            let mut plain_ids = Vec::new();
            let mut hat_of: Vec<(usize, String)> = Vec::new();
            for id in gens.ids() {
                match &roles[id.index()] {
                    Role::Plain => plain_ids.push(id),
                    Role::Hat(b) => hat_of.push((id.index(), b.clone())),
                    r => return Err(bad(format!("role `{r}` is not a torus-cone role"))),
                }
            }
            let knot_gens = GenSet::new(
                plain_ids
                    .iter()
                    .map(|&id| Generator::new(gens.name(id), gens.degree(id)))
                    .collect(),
            )?;
            let strip = |p: &Poly| -> Result<Poly> {
                remap_by_name(p, &knot_gens, |n| n.to_string())
            };
            let knot_diffs = plain_ids
                .iter()
                .map(|&id| strip(base.diff_of(id)))
                .collect::<Result<Vec<_>>>()?;
            let knot = Dga::new(Arc::clone(&knot_gens), knot_diffs)?;
            // mu(c) is the hat-free part of (Delta c^ + c)
            let mut images = vec![Poly::zero(&knot_gens); knot_gens.len()];
            for (hat_idx, base_name) in &hat_of {
                let kid = knot_gens
                    .lookup(base_name)
                    .ok_or_else(|| bad(format!("hat of unknown generator `{base_name}`")))?;
                let delta = base.diff_of(crate::freealg::GenId(*hat_idx as u32));
                let hat_free = Poly::from_monomials(
                    gens,
                    delta
                        .terms()
                        .iter()
                        .filter(|m| {
                            !m.factors()
                                .iter()
                                .any(|&g| matches!(roles[g.index()], Role::Hat(_)))
                        })
                        .cloned()
                        .collect(),
                );
                let img = hat_free.add(&Poly::generator(gens, crate::freealg::GenId(
                    gens.lookup(base_name)
                        .ok_or_else(|| bad(format!("missing plain copy of `{base_name}`")))?
                        .0,
                )))?;
                images[kid.index()] = strip(&img)?;
            }
            let mu = DgaMorphism::new(
                knot.clone(),
                knot.clone(),
                GenMap::new(Arc::clone(&knot_gens), Arc::clone(&knot_gens), images)?,
            )?;
            let rebuilt = build_cone_torus(&mu)?;
            if rebuilt.base() != base {
                return Err(bad(
                    "cone file does not match the cone of its recovered monodromy".into(),
                ));
            }
            Ok(rebuilt)
        }
        ConeFlavor::Interval => {
            let mut src = Vec::new();
            let mut tgt = Vec::new();
            for id in gens.ids() {
                match &roles[id.index()] {
                    Role::SourceCopy(b) => src.push((id, b.clone())),
                    Role::TargetCopy(b) => tgt.push((id, b.clone())),
                    Role::Hat(_) => {}
                    r => return Err(bad(format!("role `{r}` is not an interval-cone role"))),
                }
            }
            let source_gens = GenSet::new(
                src.iter()
                    .map(|(id, b)| Generator::new(b.clone(), gens.degree(*id)))
                    .collect(),
            )?;
            let target_gens = GenSet::new(
                tgt.iter()
                    .map(|(id, b)| Generator::new(b.clone(), gens.degree(*id)))
                    .collect(),
            )?;
            let strip_suffix = |n: &str| -> String {
                n.strip_suffix("[-]")
                    .or_else(|| n.strip_suffix("[+]"))
                    .unwrap_or(n)
                    .to_string()
            };
            let source_diffs = src
                .iter()
                .map(|(id, _)| remap_by_name(base.diff_of(*id), &source_gens, |n| strip_suffix(n)))
                .collect::<Result<Vec<_>>>()?;
            let target_diffs = tgt
                .iter()
                .map(|(id, _)| remap_by_name(base.diff_of(*id), &target_gens, |n| strip_suffix(n)))
                .collect::<Result<Vec<_>>>()?;
            let source = Dga::new(Arc::clone(&source_gens), source_diffs)?;
            let target = Dga::new(Arc::clone(&target_gens), target_diffs)?;

            // phi(c)[+] is what remains of Delta c^ after dropping the c[-]
            // term and every monomial containing a hat factor.
            let mut images = vec![Poly::zero(&target_gens); source_gens.len()];
            for id in gens.ids() {
                let Role::Hat(b) = &roles[id.index()] else {
                    continue;
                };
                let sid = source_gens
                    .lookup(b)
                    .ok_or_else(|| bad(format!("hat of unknown source generator `{b}`")))?;
                let copy_name = format!("{b}[-]");
                let copy_id = gens
                    .lookup(&copy_name)
                    .ok_or_else(|| bad(format!("missing source copy `{copy_name}`")))?;
                let delta = base.diff_of(id);
                let mut kept = Vec::new();
                let mut saw_copy = false;
                for m in delta.terms() {
                    if m.factors()
                        .iter()
                        .any(|&g| matches!(roles[g.index()], Role::Hat(_)))
                    {
                        continue;
                    }
                    if m.factors() == [copy_id] {
                        saw_copy = true;
                        continue;
                    }
                    kept.push(m.clone());
                }
                if !saw_copy {
                    return Err(bad(format!(
                        "differential of `{}` lacks the `{copy_name}` term",
                        gens.name(id)
                    )));
                }
                let img = Poly::from_monomials(gens, kept);
                images[sid.index()] = remap_by_name(&img, &target_gens, |n| strip_suffix(n))?;
            }
            let phi = DgaMorphism::new(
                source,
                target,
                GenMap::new(Arc::clone(&source_gens), Arc::clone(&target_gens), images)?,
            )?;
            let rebuilt = build_cone_interval(&phi)?;
            if rebuilt.base() != base {
                return Err(bad(
                    "cone file does not match the cone of its recovered morphism".into(),
                ));
            }
            Ok(rebuilt)
        }
    }
}

/// Transports a polynomial into another generator set by renaming each
/// factor. Fails if a renamed factor is unknown there.
fn remap_by_name(
    p: &Poly,
    target: &Arc<GenSet>,
    rename: impl Fn(&str) -> String,
) -> Result<Poly> {
    let src = p.genset();
    let mut terms = Vec::with_capacity(p.term_count());
    for m in p.terms() {
        let factors = m
            .factors()
            .iter()
            .map(|&g| {
                let name = rename(src.name(g));
                target
                    .lookup(&name)
                    .ok_or_else(|| Error::UnknownGenerator(name))
            })
            .collect::<Result<Vec<_>>>()?;
        terms.push(Monomial::from_factors(factors));
    }
    Ok(Poly::from_monomials(target, terms))
}

/// Headers found in a morphism or homotopy file.
#[derive(Debug, Default)]
pub struct MapFileHeaders {
    pub source: Option<String>,
    pub target: Option<String>,
    pub rule: Option<ExtensionRule>,
}

/// One `map NAME = poly` entry, still unresolved against a generator set.
#[derive(Debug)]
pub struct MapEntry {
    pub line: usize,
    pub name: String,
    pub poly: String,
}

/// Splits a morphism/homotopy file into headers and raw map entries.
pub fn parse_map_file(text: &str) -> Result<(MapFileHeaders, Vec<MapEntry>)> {
    let mut headers = MapFileHeaders::default();
    let mut entries = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("source ") {
            headers.source = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("target ") {
            headers.target = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("rule ") {
            headers.rule = Some(match rest.trim() {
                "psi-left" => ExtensionRule::PsiLeft,
                "phi-left" => ExtensionRule::PhiLeft,
                other => return Err(Error::parse(ln + 1, format!("unknown rule `{other}`"))),
            });
        } else if let Some(rest) = line.strip_prefix("map ") {
            let (name, poly) = rest
                .split_once('=')
                .ok_or_else(|| Error::parse(ln + 1, "map: expected `map NAME = poly`"))?;
            entries.push(MapEntry {
                line: ln + 1,
                name: name.trim().to_string(),
                poly: poly.trim().to_string(),
            });
        } else {
            return Err(Error::parse(ln + 1, format!("unknown directive `{line}`")));
        }
    }
    Ok((headers, entries))
}

/// Resolves map entries into a morphism between the given DGAs. Omitted
/// generators map identically when source and target agree structurally,
/// and are an error otherwise.
pub fn resolve_morphism(source: &Dga, target: &Dga, entries: &[MapEntry]) -> Result<DgaMorphism> {
    let sg = source.genset();
    let tg = target.genset();
    let mut images: Vec<Option<Poly>> = vec![None; sg.len()];
    for e in entries {
        let id = sg
            .lookup(&e.name)
            .ok_or_else(|| Error::parse(e.line, format!("map: unknown generator `{}`", e.name)))?;
        if images[id.index()].is_some() {
            return Err(Error::parse(
                e.line,
                format!("map: duplicate entry for `{}`", e.name),
            ));
        }
        images[id.index()] = Some(parse_poly_at(tg, &e.poly, e.line)?);
    }
    let same = source == target;
    let images = sg
        .ids()
        .map(|id| match images[id.index()].take() {
            Some(p) => Ok(p),
            None if same => Ok(Poly::generator(tg, id)),
            None => Err(Error::MissingImage(sg.name(id).to_string())),
        })
        .collect::<Result<Vec<_>>>()?;
    DgaMorphism::new(
        source.clone(),
        target.clone(),
        GenMap::new(Arc::clone(sg), Arc::clone(tg), images)?,
    )
}

/// Resolves map entries into homotopy values; omitted generators get 0.
pub fn resolve_homotopy_values(source: &Dga, target: &Dga, entries: &[MapEntry]) -> Result<GenMap> {
    let sg = source.genset();
    let tg = target.genset();
    let mut images: Vec<Poly> = sg.ids().map(|_| Poly::zero(tg)).collect();
    for e in entries {
        let id = sg
            .lookup(&e.name)
            .ok_or_else(|| Error::parse(e.line, format!("map: unknown generator `{}`", e.name)))?;
        images[id.index()] = parse_poly_at(tg, &e.poly, e.line)?;
    }
    GenMap::new(Arc::clone(sg), Arc::clone(tg), images)
}

/// Serializes a morphism; `source`/`target` become header lines when given.
pub fn serialize_morphism(
    m: &DgaMorphism,
    source_label: Option<&str>,
    target_label: Option<&str>,
) -> String {
    let mut out = String::new();
    if let Some(s) = source_label {
        out.push_str(&format!("source {s}\n"));
    }
    if let Some(t) = target_label {
        out.push_str(&format!("target {t}\n"));
    }
    let sg = m.source().genset();
    for id in sg.ids() {
        out.push_str(&format!("map {} = {}\n", sg.name(id), m.map().image(id)));
    }
    out
}
