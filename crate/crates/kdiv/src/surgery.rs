//! Cut-and-paste operations on descriptors.
//!
//! Every operation returns a new descriptor whose recipe records the
//! operation and its inputs. Surfaces are referred to by name.

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::{coefficient_gcd, ClassVector, IntersectionLattice};
use crate::manifold::{
    canonical_is_even, elliptic_surface, sphere, ManifoldDescriptor, Minimality, Sign, Surface,
    Triple, Witness,
};
use crate::recipe::Recipe;

/// Checks that a named surface is an indivisible square-zero class of the
/// given genus and returns it.
fn gluing_surface<'a>(m: &'a ManifoldDescriptor, name: &str) -> Result<(&'a Surface, u64)> {
    let s = m.surface(name)?;
    let genus = s.genus.ok_or_else(|| Error::GenusMismatch {
        name: name.to_string(),
        expected: 1,
        found: None,
    })?;
    let sq = m.self_intersection(s)?;
    if sq != 0 {
        return Err(Error::NonzeroSelfIntersection { name: name.to_string(), value: sq });
    }
    if coefficient_gcd(&s.class) != 1 {
        return Err(Error::DivisibleClass(name.to_string()));
    }
    Ok((s, genus))
}

fn minimal_after(parts: &[Minimality], k: &ClassVector) -> Minimality {
    // A canonical class divisible by two or more forces minimality.
    if coefficient_gcd(k) >= 2 || parts.iter().all(|&p| p == Minimality::Yes) {
        Minimality::Yes
    } else {
        Minimality::Unknown
    }
}

/// Splitting `L = P ⊕ ⟨Σ, B⟩` of a tracked lattice, where `Σ·Σ = 0` and
/// `Σ·B = 1`. The basis of `P` is the untouched blocks followed by the
/// projections `π(e_i)` of the remaining members of the touched blocks.
struct Decomposition {
    keep_blocks: Vec<usize>,
    layout: Vec<usize>,
    kept: Vec<usize>,
    sigma: ClassVector,
    b: ClassVector,
    ps: Vec<i64>,
    pb: Vec<i64>,
    b_sq: i64,
    s: usize,
    t: usize,
    det: i64,
    block_names: Vec<String>,
    block_gram: Vec<Vec<i64>>,
}

impl Decomposition {
    fn new(lat: &IntersectionLattice, sigma: &ClassVector, b: &ClassVector) -> Result<Self> {
        let ps = lat.pairing_vector(sigma)?;
        let pb = lat.pairing_vector(b)?;
        let b_sq = b.dot(&pb)?;
        let touched = lat.support_blocks(&[sigma, b]);
        let members = lat.block_members(&touched);
        let keep_blocks: Vec<usize> = (0..lat.block_count()).filter(|k| !touched.contains(k)).collect();

        let mut pivot = None;
        'search: for (x, &i) in members.iter().enumerate() {
            for &j in &members[x + 1..] {
                let det = arith::sub(
                    arith::mul(sigma.get(i), b.get(j))?,
                    arith::mul(b.get(i), sigma.get(j))?,
                )?;
                if det == 1 || det == -1 {
                    pivot = Some((i, j, det));
                    break 'search;
                }
            }
        }
        let (s, t, det) = pivot.ok_or_else(|| Error::Precondition {
            op: "fibre_sum",
            reason: "the surface and its dual do not extend to a basis of the tracked lattice".into(),
        })?;
        let kept: Vec<usize> = members.iter().copied().filter(|&i| i != s && i != t).collect();

        let alpha = |i: usize| -> Result<i64> { arith::sub(pb[i], arith::mul(b_sq, ps[i])?) };
        let mut block_names = Vec::with_capacity(kept.len());
        let mut block_gram = vec![vec![0; kept.len()]; kept.len()];
        for (x, &i) in kept.iter().enumerate() {
            let (ai, bi) = (alpha(i)?, ps[i]);
            let name = &lat.names()[i];
            block_names.push(if ai == 0 && bi == 0 { name.clone() } else { format!("p({name})") });
            for (y, &j) in kept.iter().enumerate() {
                let (aj, bj) = (alpha(j)?, ps[j]);
                let corr = arith::add(
                    arith::add(arith::mul(ai, bj)?, arith::mul(aj, bi)?)?,
                    arith::product(&[bi, bj, b_sq])?,
                )?;
                block_gram[x][y] = arith::sub(lat.entry(i, j), corr)?;
            }
        }
        let mut layout: Vec<usize> = keep_blocks.iter().flat_map(|&k| lat.block_range(k)).collect();
        layout.extend(&kept);
        Ok(Self {
            keep_blocks,
            layout,
            kept,
            sigma: sigma.clone(),
            b: b.clone(),
            ps,
            pb,
            b_sq,
            s,
            t,
            det,
            block_names,
            block_gram,
        })
    }

    fn p_rank(&self) -> usize {
        self.layout.len()
    }

    /// `(coordinates of π(v) over P, α, β)` with `v = π(v) + αΣ + βB`.
    fn coords(&self, v: &ClassVector) -> Result<(Vec<i64>, i64, i64)> {
        let beta = v.dot(&self.ps)?;
        let alpha = arith::sub(v.dot(&self.pb)?, arith::mul(self.b_sq, beta)?)?;
        let (sg, bb) = (&self.sigma, &self.b);
        let (vs, vt) = (v.get(self.s), v.get(self.t));
        // Solve v_s = x σ_s + y b_s, v_t = x σ_t + y b_t (determinant ±1).
        let x = arith::mul(
            self.det,
            arith::sub(arith::mul(bb.get(self.t), vs)?, arith::mul(bb.get(self.s), vt)?)?,
        )?;
        let y = arith::mul(
            self.det,
            arith::sub(arith::mul(sg.get(self.s), vt)?, arith::mul(sg.get(self.t), vs)?)?,
        )?;
        let mut p = Vec::with_capacity(self.layout.len());
        let split = self.layout.len() - self.kept.len();
        for (pos, &i) in self.layout.iter().enumerate() {
            if pos < split {
                p.push(v.get(i));
            } else {
                let u = arith::sub(
                    v.get(i),
                    arith::add(arith::mul(x, sg.get(i))?, arith::mul(y, bb.get(i))?)?,
                )?;
                p.push(u);
            }
        }
        Ok((p, alpha, beta))
    }

    /// `(pairings of w with the P basis, α, β)` for a class given by pairings.
    fn witness(&self, w: &[i64]) -> Result<(Vec<i64>, i64, i64)> {
        let beta = self.sigma.dot(w)?;
        let w_b = self.b.dot(w)?;
        let alpha = arith::sub(w_b, arith::mul(self.b_sq, beta)?)?;
        let mut p = Vec::with_capacity(self.layout.len());
        for &i in &self.layout {
            let ai = arith::sub(self.pb[i], arith::mul(self.b_sq, self.ps[i])?)?;
            let bi = self.ps[i];
            let v = arith::sub(w[i], arith::add(arith::mul(ai, beta)?, arith::mul(bi, w_b)?)?)?;
            p.push(v);
        }
        Ok((p, alpha, beta))
    }
}

fn rename_with<'a>(prefix: &'a str) -> impl Fn(&str) -> String + 'a {
    move |n: &str| format!("{prefix}{n}")
}

/// Generalized fibre sum `X = M #_{Σ_M = Σ_N} N` along square-zero surfaces
/// of equal genus. `Σ_X` and `B_X` keep the names of `Σ_M` and its dual;
/// everything coming from `N` is renamed with `prefix`.
///
/// `no_rim_tori` is the caller's assertion that the sum creates no rim
/// tori; it is recorded in the recipe. When it is false the rim tori exist
/// but are not tracked.
pub fn fibre_sum(
    m: &ManifoldDescriptor,
    surface_m: &str,
    n: &ManifoldDescriptor,
    surface_n: &str,
    no_rim_tori: bool,
    prefix: &str,
) -> Result<ManifoldDescriptor> {
    let (sm, gm) = gluing_surface(m, surface_m)?;
    let (sn, gn) = gluing_surface(n, surface_n)?;
    if gm != gn {
        return Err(Error::GenusMismatch { name: surface_n.to_string(), expected: gm, found: Some(gn) });
    }
    let g = gm as i64;
    let dual_of = |d: &ManifoldDescriptor, s: &Surface| -> Result<Surface> {
        let name = s.dual.as_ref().ok_or_else(|| Error::NoDual(s.name.clone()))?;
        let dual = d.surface(name).map_err(|_| Error::NoDual(s.name.clone()))?;
        if d.lattice.pairing(&s.class, &dual.class)? != 1 {
            return Err(Error::NoDual(s.name.clone()));
        }
        Ok(dual.clone())
    };
    let bm = dual_of(m, sm)?;
    let bn = dual_of(n, sn)?;

    let dm = Decomposition::new(&m.lattice, &sm.class, &bm.class)?;
    let dn = Decomposition::new(&n.lattice, &sn.class, &bn.class)?;
    let b_x = arith::add(dm.b_sq, dn.b_sq)?;

    let identity = |s: &str| s.to_string();
    let part_m = m.lattice.rebuild(
        &dm.keep_blocks,
        &identity,
        vec![(dm.block_names.clone(), dm.block_gram.clone())],
        true,
    )?;
    let prefixed = rename_with(prefix);
    let part_n = n.lattice.rebuild(
        &dn.keep_blocks,
        &prefixed,
        vec![(dn.block_names.iter().map(|s| prefixed(s)).collect(), dn.block_gram.clone())],
        true,
    )?;
    let mut lat = part_m.direct_sum(&part_n, "")?;
    lat.push_block(vec![sm.name.clone(), bm.name.clone()], vec![vec![0, 1], vec![1, b_x]])?;
    let lat = lat.with_primitive_summand(m.lattice.is_primitive_summand() && n.lattice.is_primitive_summand());
    let (mp, np) = (dm.p_rank(), dn.p_rank());
    let rank = lat.rank();

    let embed = |coords: (Vec<i64>, i64, i64), from_m: bool| -> ClassVector {
        let (p, alpha, beta) = coords;
        let mut c = Vec::with_capacity(rank);
        if from_m {
            c.extend(p);
            c.extend(std::iter::repeat_n(0, np));
        } else {
            c.extend(std::iter::repeat_n(0, mp));
            c.extend(p);
        }
        c.push(alpha);
        c.push(beta);
        ClassVector::new(c)
    };
    let embed_pairings = |w: (Vec<i64>, i64, i64), from_m: bool| -> Result<Vec<i64>> {
        let (p, alpha, beta) = w;
        let mut c = Vec::with_capacity(rank);
        if from_m {
            c.extend(p);
            c.extend(std::iter::repeat_n(0, np));
        } else {
            c.extend(std::iter::repeat_n(0, mp));
            c.extend(p);
        }
        c.push(beta);
        c.push(arith::add(alpha, arith::mul(beta, b_x)?)?);
        Ok(c)
    };

    let sigma_x = ClassVector::unit(rank, rank - 2);
    let b_xv = ClassVector::unit(rank, rank - 1);
    let k_m = embed(dm.coords(&m.canonical)?, true);
    let k_n = embed(dn.coords(&n.canonical)?, false);
    let canonical = k_m
        .checked_add(&k_n)?
        .add_multiple(-arith::sub(arith::mul(2, g)?, 2)?, &b_xv)?
        .add_multiple(2, &sigma_x)?;

    let mut surfaces = Vec::new();
    for (src, d, from_m) in [(m, &dm, true), (n, &dn, false)] {
        let (skip_a, skip_b) = if from_m { (&sm.name, &bm.name) } else { (&sn.name, &bn.name) };
        for s in &src.surfaces {
            if &s.name == skip_a || &s.name == skip_b {
                continue;
            }
            let coords = d.coords(&s.class)?;
            let keeps_genus = coords.2 == 0;
            let name = if from_m { s.name.clone() } else { prefixed(&s.name) };
            let dual = s.dual.as_ref().map(|x| {
                if (from_m && x == skip_a) || (!from_m && x == &sn.name) {
                    sm.name.clone()
                } else if (from_m && x == skip_b) || (!from_m && x == &bn.name) {
                    bm.name.clone()
                } else if from_m {
                    x.clone()
                } else {
                    prefixed(x)
                }
            });
            surfaces.push(Surface {
                name,
                class: embed(coords, from_m),
                genus: if keeps_genus { s.genus } else { None },
                symplectic_sign: s.symplectic_sign,
                complement_simply_connected: s.complement_simply_connected,
                dual,
            });
        }
    }
    surfaces.push(Surface {
        name: sm.name.clone(),
        class: sigma_x,
        genus: Some(gm),
        symplectic_sign: sm.symplectic_sign,
        complement_simply_connected: sm.complement_simply_connected && sn.complement_simply_connected,
        dual: Some(bm.name.clone()),
    });
    surfaces.push(Surface {
        name: bm.name.clone(),
        class: b_xv,
        genus: bm.genus.zip(bn.genus).map(|(a, b)| a + b),
        symplectic_sign: bm.symplectic_sign,
        complement_simply_connected: false,
        dual: Some(sm.name.clone()),
    });

    let mut witnesses = Vec::new();
    for (src, d, from_m, other_b) in [(m, &dm, true, dn.b_sq), (n, &dn, false, dm.b_sq)] {
        for w in &src.witnesses {
            let parts = d.witness(&w.pairings)?;
            let beta = parts.2;
            let self_intersection = match w.self_intersection {
                Some(x) => Some(arith::add(x, arith::product(&[beta, beta, other_b])?)?),
                None => None,
            };
            witnesses.push(Witness {
                name: if from_m { w.name.clone() } else { prefixed(&w.name) },
                pairings: embed_pairings(parts, from_m)?,
                genus: if beta == 0 { w.genus } else { None },
                self_intersection,
            });
        }
    }

    let mut triples: Vec<Triple> = m.triples.clone();
    let offset = m.triples.iter().map(|t| t.index).max().unwrap_or(0);
    for t in &n.triples {
        triples.push(Triple {
            index: t.index + offset,
            t1: prefixed(&t.t1),
            s1: prefixed(&t.s1),
            r: prefixed(&t.r),
            s: prefixed(&t.s),
            used: t.used,
        });
    }
    for t in &mut triples {
        if t.r == sm.name || t.r == bm.name {
            t.used = true;
        }
    }

    let simply_connected = (m.simply_connected && sn.complement_simply_connected)
        || (n.simply_connected && sm.complement_simply_connected);
    let mut recipe = Recipe::new("fibre_sum")
        .name("surface_m", surface_m)
        .name("surface_n", surface_n)
        .flag("no_rim_tori", no_rim_tori)
        .name("prefix", prefix)
        .input(m.recipe.clone())
        .input(n.recipe.clone());
    recipe = if no_rim_tori {
        recipe.note("no rim tori: asserted by the caller")
    } else {
        recipe.note("rim tori exist and are not tracked")
    };
    let e = arith::add(arith::add(m.e, n.e)?, arith::sub(arith::mul(4, g)?, 4)?)?;
    Ok(ManifoldDescriptor {
        e,
        sigma: arith::add(m.sigma, n.sigma)?,
        spin: canonical_is_even(&canonical),
        simply_connected,
        symplectic: m.symplectic && n.symplectic,
        minimal: minimal_after(&[m.minimal, n.minimal], &canonical),
        general_type: false,
        lattice: lat,
        canonical,
        canonical_full: m.canonical_full && n.canonical_full,
        surfaces,
        witnesses,
        triples,
        recipe,
    })
}

/// New genus of a surface meeting the surgered surface `p` times, after the
/// canonical class moved by `2h` times that surface.
fn shifted_genus(genus: Option<u64>, pairing: i64, h: i64, sign: Sign) -> Option<u64> {
    if pairing == 0 {
        genus
    } else if sign == Sign::Plus && pairing > 0 {
        genus.map(|g| g + (h * pairing) as u64)
    } else {
        None
    }
}

/// Knot surgery along a torus with a fibred knot of genus `h`. The sign
/// selects `K + 2hT` or `K − 2hT`.
pub fn knot_surgery(x: &ManifoldDescriptor, torus: &str, h: i64, sign: Sign) -> Result<ManifoldDescriptor> {
    let t = x.surface(torus)?;
    if t.genus != Some(1) {
        return Err(Error::NotATorus { name: torus.to_string(), genus: t.genus });
    }
    let (t, _) = gluing_surface(x, torus)?;
    if h < 0 {
        return Err(Error::Precondition { op: "knot_surgery", reason: "h must be non-negative".into() });
    }
    let shift = arith::product(&[2, h, sign.factor()])?;
    let canonical = x.canonical.add_multiple(shift, &t.class)?;
    let t_pairings = x.lattice.pairing_vector(&t.class)?;

    let mut surfaces = Vec::with_capacity(x.surfaces.len());
    for s in &x.surfaces {
        let mut s2 = s.clone();
        if s.name != t.name {
            let p = s.class.dot(&t_pairings)?;
            s2.genus = shifted_genus(s.genus, p, h, sign);
        }
        if h > 0 {
            if let Some(d) = &s.dual {
                let dual = x.surface(d)?;
                if dual.class.dot(&t_pairings)? != 0 {
                    s2.complement_simply_connected = false;
                }
            }
        }
        surfaces.push(s2);
    }
    let mut witnesses = Vec::with_capacity(x.witnesses.len());
    for w in &x.witnesses {
        let p = t.class.dot(&w.pairings)?;
        witnesses.push(Witness { genus: shifted_genus(w.genus, p, h, sign), ..w.clone() });
    }
    let mut triples = x.triples.clone();
    for tr in &mut triples {
        if tr.t1 == t.name || tr.r == t.name {
            tr.used = true;
        }
    }
    let minimal = if h == 0 { x.minimal } else { minimal_after(&[x.minimal], &canonical) };
    Ok(ManifoldDescriptor {
        spin: x.spin,
        simply_connected: x.simply_connected && t.complement_simply_connected,
        minimal,
        canonical,
        surfaces,
        witnesses,
        triples,
        recipe: Recipe::new("knot_surgery")
            .name("surface", torus)
            .int("h", h)
            .name("sign", &sign.to_string())
            .input(x.recipe.clone())
            .note(format!("fibred knot of genus {h}")),
        ..x.clone()
    })
}

/// Fibre sum with `Y_{g,h}` along a genus `g > 1` surface: adds
/// `2h(g−1)` blocks `[[2,1],[1,0]]` and moves `K` by `2hΣ`.
pub fn generalized_knot_surgery(m: &ManifoldDescriptor, surface: &str, h: i64) -> Result<ManifoldDescriptor> {
    let s = m.surface(surface)?;
    match s.genus {
        Some(g) if g > 1 => {}
        Some(g) => return Err(Error::UseKnotSurgery(g)),
        None => {
            return Err(Error::GenusMismatch { name: surface.to_string(), expected: 2, found: None })
        }
    }
    let (s, g) = gluing_surface(m, surface)?;
    if h < 1 {
        return Err(Error::Precondition { op: "generalized_knot_surgery", reason: "h must be positive".into() });
    }
    if !m.simply_connected || !s.complement_simply_connected {
        return Err(Error::Precondition {
            op: "generalized_knot_surgery",
            reason: format!("needs a simply-connected manifold and simply-connected complement of `{surface}`"),
        });
    }
    let g = g as i64;
    let blocks = arith::product(&[2, h, g - 1])?;
    let extra = 2 * blocks as usize;
    let mut lat = m.lattice.clone();
    lat.push_repeated_2x2(blocks as usize, [[2, 1], [1, 0]], |j, k| {
        if k == 0 { format!("{surface}.split{j}") } else { format!("{surface}.rim{j}") }
    })?;
    let sigma_ext = s.class.extended(extra);
    let canonical = m.canonical.extended(extra).add_multiple(arith::mul(2, h)?, &sigma_ext)?;
    let s_pairings = m.lattice.pairing_vector(&s.class)?;

    let mut surfaces = Vec::with_capacity(m.surfaces.len());
    for x in &m.surfaces {
        let p = x.class.dot(&s_pairings)?;
        surfaces.push(Surface {
            class: x.class.extended(extra),
            genus: if x.name == s.name { x.genus } else { shifted_genus(x.genus, p, h, Sign::Plus) },
            ..x.clone()
        });
    }
    let mut witnesses = Vec::with_capacity(m.witnesses.len());
    for w in &m.witnesses {
        let p = s.class.dot(&w.pairings)?;
        let mut pairings = w.pairings.clone();
        pairings.resize(pairings.len() + extra, 0);
        witnesses.push(Witness { pairings, genus: shifted_genus(w.genus, p, h, Sign::Plus), ..w.clone() });
    }
    let e = arith::add(m.e, arith::product(&[4, h, g - 1])?)?;
    Ok(ManifoldDescriptor {
        e,
        minimal: minimal_after(&[m.minimal], &canonical),
        lattice: lat,
        canonical,
        surfaces,
        witnesses,
        recipe: Recipe::new("generalized_knot_surgery")
            .name("surface", surface)
            .int("h", h)
            .input(m.recipe.clone())
            .note(format!("fibre sum with Y_{{{g},{h}}} along a section")),
        ..m.clone()
    })
}

/// Resolves the single transverse intersection of two surfaces meeting
/// once, producing a surface of genus `g_a + g_b` in the class `a + b`.
pub fn smooth_union(
    m: &ManifoldDescriptor,
    a: &str,
    b: &str,
    name: &str,
    complement_simply_connected: bool,
) -> Result<ManifoldDescriptor> {
    let (sa, sb) = (m.surface(a)?, m.surface(b)?);
    if m.lattice.pairing(&sa.class, &sb.class)? != 1 {
        return Err(Error::Precondition {
            op: "smooth_union",
            reason: format!("`{a}` and `{b}` must meet exactly once"),
        });
    }
    if m.surface(name).is_ok() {
        return Err(Error::NameCollision(name.to_string()));
    }
    let mut out = m.clone();
    out.surfaces.push(Surface {
        name: name.to_string(),
        class: sa.class.checked_add(&sb.class)?,
        genus: sa.genus.zip(sb.genus).map(|(x, y)| x + y),
        symplectic_sign: Sign::Plus,
        complement_simply_connected,
        dual: None,
    });
    out.recipe = Recipe::new("smooth_union")
        .name("a", a)
        .name("b", b)
        .name("name", name)
        .flag("complement_simply_connected", complement_simply_connected)
        .input(m.recipe.clone());
    if complement_simply_connected {
        out.recipe = out.recipe.note(format!("complement of `{name}` simply connected: asserted"));
    }
    Ok(out)
}

/// Logarithmic transform of multiplicity `p` on an unsurgered `E(n)`.
pub fn log_transform(x: &ManifoldDescriptor, p: i64) -> Result<ManifoldDescriptor> {
    let r = &x.recipe;
    let plain = r.op == "elliptic_surface" && r.get_int("p") == Ok(1) && r.get_int("q") == Ok(1);
    if !plain {
        return Err(Error::NotElliptic);
    }
    let n = r.get_int("n")?;
    let out = elliptic_surface(n, p, 1)?;
    let recipe = Recipe::new("log_transform").int("p", p).input(x.recipe.clone());
    let recipe = out.recipe.notes.iter().fold(recipe, |acc, note| acc.note(note.clone()));
    Ok(out.with_recipe(recipe))
}

/// Connected sum with a reversed `CP²`, adding the exceptional sphere `E<j>`.
pub fn blow_up(m: &ManifoldDescriptor) -> Result<ManifoldDescriptor> {
    let mut j = 1;
    while m.lattice.index_of(&format!("E{j}")).is_some() || m.surface(&format!("E{j}")).is_ok() {
        j += 1;
    }
    let name = format!("E{j}");
    let mut lat = m.lattice.clone();
    lat.push_block(vec![name.clone()], vec![vec![-1]])?;
    let rank = lat.rank();
    let ex = ClassVector::unit(rank, rank - 1);
    let canonical = m.canonical.extended(1).checked_add(&ex)?;
    let mut surfaces: Vec<Surface> =
        m.surfaces.iter().map(|s| Surface { class: s.class.extended(1), ..s.clone() }).collect();
    surfaces.push(sphere(&name, ex, None));
    let witnesses = m
        .witnesses
        .iter()
        .map(|w| {
            let mut pairings = w.pairings.clone();
            pairings.push(0);
            Witness { pairings, ..w.clone() }
        })
        .collect();
    Ok(ManifoldDescriptor {
        e: arith::add(m.e, 1)?,
        sigma: arith::sub(m.sigma, 1)?,
        spin: false,
        minimal: Minimality::No,
        lattice: lat,
        canonical,
        surfaces,
        witnesses,
        recipe: Recipe::new("blow_up").input(m.recipe.clone()),
        ..m.clone()
    })
}

/// Formal inverse of [`blow_up`]: removes an exceptional sphere that spans
/// its own `⟨−1⟩` block and pairs `−1` with `K`.
pub fn blow_down(m: &ManifoldDescriptor, exceptional: &str) -> Result<ManifoldDescriptor> {
    let bad = |reason: String| Error::Precondition { op: "blow_down", reason };
    let idx = m
        .lattice
        .index_of(exceptional)
        .ok_or_else(|| Error::UnknownSurface(exceptional.to_string()))?;
    let ex = ClassVector::unit(m.lattice.rank(), idx);
    let row = m.lattice.pairing_vector(&ex)?;
    if row[idx] != -1 || row.iter().enumerate().any(|(i, &v)| i != idx && v != 0) {
        return Err(bad(format!("`{exceptional}` is not an orthogonal (-1)-class")));
    }
    if m.canonical.get(idx) != 1 {
        return Err(bad(format!("K does not contain `{exceptional}` with coefficient 1")));
    }
    let drop = |v: &[i64]| -> Vec<i64> {
        v.iter().enumerate().filter(|(i, _)| *i != idx).map(|(_, &x)| x).collect()
    };
    let keep: Vec<usize> =
        (0..m.lattice.block_count()).filter(|&k| m.lattice.block_range(k) != (idx..idx + 1)).collect();
    let lat = m
        .lattice
        .rebuild(&keep, &|s: &str| s.to_string(), Vec::new(), m.lattice.is_primitive_summand())?;
    let mut surfaces = Vec::new();
    for s in &m.surfaces {
        if s.name == exceptional {
            continue;
        }
        if s.class.get(idx) != 0 {
            return Err(bad(format!("surface `{}` meets `{exceptional}`", s.name)));
        }
        surfaces.push(Surface { class: ClassVector::new(drop(s.class.coeffs())), ..s.clone() });
    }
    let witnesses = m
        .witnesses
        .iter()
        .map(|w| Witness { pairings: drop(&w.pairings), ..w.clone() })
        .collect();
    let canonical = ClassVector::new(drop(m.canonical.coeffs()));
    Ok(ManifoldDescriptor {
        e: arith::sub(m.e, 1)?,
        sigma: arith::add(m.sigma, 1)?,
        spin: m.simply_connected && canonical_is_even(&canonical),
        minimal: Minimality::Unknown,
        lattice: lat,
        canonical,
        surfaces,
        witnesses,
        recipe: Recipe::new("blow_down").name("surface", exceptional).input(m.recipe.clone()),
        ..m.clone()
    })
}

/// `E(em)` reduced to its nucleus lattice `⟨f, s⟩`.
fn elliptic_nucleus(em: i64) -> Result<ManifoldDescriptor> {
    let full = elliptic_surface(em, 1, 1)?;
    let lat = IntersectionLattice::new(vec!["f", "s"], vec![vec![0, 1], vec![1, -em]], true)?;
    let pick = |name: &str| -> Result<Surface> {
        let s = full.surface(name)?;
        Ok(Surface { class: ClassVector::new(s.class.coeffs()[..2].to_vec()), ..s.clone() })
    };
    Ok(ManifoldDescriptor {
        canonical: ClassVector::new(full.canonical.coeffs()[..2].to_vec()),
        lattice: lat,
        surfaces: vec![pick("f")?, pick("s")?],
        triples: Vec::new(),
        ..full
    })
}

/// Surgery on a Lagrangian triple: fibre sum with `E(em)` along `R`, then
/// knot surgery of genus `h1` (with `sign`) on `T1` and of genus `h2` on
/// `T2 = R − a·T1`. Installs `T2.i`, `C1.i = S1.i + a·S.i` and `C2.i`
/// (the sphere `S.i` sewn to a section and a Seifert surface).
#[allow(clippy::too_many_arguments)]
pub fn lagrangian_triple_surgery(
    m: &ManifoldDescriptor,
    triple: u32,
    a: i64,
    em: i64,
    h1: i64,
    h2: i64,
    sign: Sign,
) -> Result<ManifoldDescriptor> {
    let tr = m.triple(triple)?.clone();
    if tr.used {
        return Err(Error::UndeclaredTriple(triple));
    }
    if a < 1 || em < 1 || h1 < 0 || h2 < 0 {
        return Err(Error::Precondition {
            op: "lagrangian_triple_surgery",
            reason: "need a >= 1, em >= 1, h1 >= 0, h2 >= 0".into(),
        });
    }
    if !m.simply_connected {
        return Err(Error::Precondition {
            op: "lagrangian_triple_surgery",
            reason: "the manifold must be simply connected".into(),
        });
    }
    let nucleus = elliptic_nucleus(em)?;
    let mut x = fibre_sum(m, &tr.r, &nucleus, "f", true, &format!("E{triple}."))?;

    let r0 = x.surface(&tr.r)?.class.clone();
    let t1 = x.surface(&tr.t1)?.class.clone();
    let t2_name = format!("T2.{triple}");
    x.surfaces.push(Surface {
        name: t2_name.clone(),
        class: r0.add_multiple(-a, &t1)?,
        genus: Some(1),
        symplectic_sign: Sign::Plus,
        complement_simply_connected: true,
        dual: Some(tr.s.clone()),
    });
    let x = knot_surgery(&x, &tr.t1, h1, sign)?;
    let mut x = knot_surgery(&x, &t2_name, h2, Sign::Plus)?;

    let s1 = x.surface(&tr.s1)?.class.clone();
    let s2 = x.surface(&tr.s)?.clone();
    x.surfaces.push(Surface {
        name: format!("C1.{triple}"),
        class: s1.add_multiple(a, &s2.class)?,
        genus: None,
        symplectic_sign: Sign::Plus,
        complement_simply_connected: false,
        dual: None,
    });
    x.surfaces.push(Surface { name: format!("C2.{triple}"), dual: None, ..s2 });
    for t in &mut x.triples {
        if t.index == triple {
            t.used = true;
        }
    }
    x.recipe = Recipe::new("lagrangian_triple_surgery")
        .int("triple", triple as i64)
        .int("a", a)
        .int("em", em)
        .int("h1", h1)
        .int("h2", h2)
        .name("sign", &sign.to_string())
        .input(m.recipe.clone())
        .note(format!("fibre sum with E({em}) along R.{triple}: rim tori do not contribute"))
        .note("assumed-disjoint: C1 and C2 pair 0 with classes outside the triple");
    Ok(x)
}

/// Canonical class of the opposite symplectic structure.
pub fn negate_structure(k: &ClassVector) -> Result<ClassVector> {
    k.checked_scale(-1)
}

/// The same manifold with the symplectic structure `−ω`. Surfaces keep
/// their classes but lose declared genera, since they are no longer
/// symplectic for the new structure.
pub fn negate_descriptor(m: &ManifoldDescriptor) -> Result<ManifoldDescriptor> {
    let flip = |s: Sign| if s == Sign::Plus { Sign::Minus } else { Sign::Plus };
    Ok(ManifoldDescriptor {
        canonical: negate_structure(&m.canonical)?,
        surfaces: m
            .surfaces
            .iter()
            .map(|s| Surface { genus: None, symplectic_sign: flip(s.symplectic_sign), ..s.clone() })
            .collect(),
        witnesses: m.witnesses.iter().map(|w| Witness { genus: None, ..w.clone() }).collect(),
        recipe: Recipe::new("negate_structure").input(m.recipe.clone()),
        ..m.clone()
    })
}
