//! Cyclic branched coverings and the transport of geography under
//! pluricanonical covers.

use num_rational::Ratio;

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::{ClassVector, IntersectionLattice};
use crate::manifold::{canonical_is_even, catalog, ManifoldDescriptor, Minimality, Witness};
use crate::recipe::Recipe;

/// Degree `m` and divisibility `d` of a pluricanonical cover, with
/// `a = (d−1)/(m−1)`, `n = m·a` and `Δ = (d−1)(d+a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverParams {
    pub m: i64,
    pub d: i64,
    pub a: i64,
    pub n: i64,
    pub delta: i64,
}

impl CoverParams {
    pub fn new(m: i64, d: i64) -> Result<Self> {
        if m < 2 || d < 2 {
            return Err(Error::CoverDivisibility { m, d });
        }
        let a = arith::exact_div(d - 1, m - 1).ok_or(Error::CoverDivisibility { m, d })?;
        let n = arith::mul(m, a)?;
        let delta = arith::mul(d - 1, arith::add(d, a)?)?;
        Ok(Self { m, d, a, n, delta })
    }

    fn m_d2(&self) -> Result<i64> {
        arith::product(&[self.m, self.d, self.d])
    }
}

/// Cyclic cover of degree `deg` branched along a smooth curve `D` with
/// `D = deg·B`. `branch` gives `B` over the lattice of `m`; without it only
/// the numerical invariants are produced.
pub fn branched_cover(
    m: &ManifoldDescriptor,
    d_square: i64,
    k_dot_d: i64,
    deg: i64,
    branch: Option<&ClassVector>,
) -> Result<ManifoldDescriptor> {
    if deg < 1 {
        return Err(Error::InconsistentBranchData(format!("degree must be positive, got {deg}")));
    }
    if let Some(b) = branch {
        let b_sq = m.lattice.square(b)?;
        let k_b = m.lattice.pairing(&m.canonical, b)?;
        if arith::product(&[deg, deg, b_sq])? != d_square || arith::mul(deg, k_b)? != k_dot_d {
            return Err(Error::InconsistentBranchData(format!(
                "B gives D^2 = {}, K.D = {}",
                deg * deg * b_sq,
                deg * k_b
            )));
        }
    }
    let e_d = -arith::add(k_dot_d, d_square)?;
    let e = arith::sub(arith::mul(deg, m.e)?, arith::mul(deg - 1, e_d)?)?;
    // σ(N) = deg·σ − (deg² − 1)·D² / (3·deg), required to be an integer.
    let num = arith::mul(arith::sub(arith::mul(deg, deg)?, 1)?, d_square)?;
    let corr = arith::exact_div(num, arith::mul(3, deg)?).ok_or_else(|| {
        Error::InconsistentBranchData(format!("signature correction {num}/{} is not integral", 3 * deg))
    })?;
    let sigma = arith::sub(arith::mul(deg, m.sigma)?, corr)?;

    let mut recipe = Recipe::new("branched_cover")
        .int("deg", deg)
        .int("d_square", d_square)
        .int("k_dot_d", k_dot_d);
    if let Some(b) = branch {
        recipe = recipe.ints("branch", b.coeffs());
    }
    let recipe = recipe.input(m.recipe.clone());
    let simply_connected = m.simply_connected && d_square > 0;
    let recipe = if m.simply_connected && d_square <= 0 {
        recipe.note("D^2 <= 0: simple connectivity of the cover is not decided")
    } else {
        recipe
    };

    let (lattice, canonical, witnesses, canonical_full) = match branch {
        Some(b) => {
            let lat = m.lattice.scaled(deg)?;
            let k = m.canonical.add_multiple(deg - 1, b)?;
            // Pullbacks of tracked surfaces are integral classes with
            // pairings scaled by the degree.
            let lifted_surfaces = m.surfaces.iter().map(|s| {
                let pairings = m.lattice.pairing_vector(&s.class)?;
                let pairings = pairings.into_iter().map(|p| arith::mul(p, deg)).collect::<Result<_>>()?;
                Ok(Witness { name: format!("lift({})", s.name), pairings, genus: None, self_intersection: None })
            });
            let ws = lifted_surfaces
                .chain(m.witnesses.iter().map(|w| {
                    let pairings = w.pairings.iter().map(|&p| arith::mul(p, deg)).collect::<Result<_>>()?;
                    let self_intersection = w.self_intersection.map(|s| arith::mul(s, deg)).transpose()?;
                    Ok(Witness { name: format!("lift({})", w.name), pairings, genus: None, self_intersection })
                }))
                .collect::<Result<Vec<_>>>()?;
            (lat, k, ws, m.canonical_full)
        }
        None => (IntersectionLattice::empty(), ClassVector::zeros(0), Vec::new(), false),
    };
    let spin = simply_connected && canonical_full && canonical_is_even(&canonical);
    Ok(ManifoldDescriptor {
        e,
        sigma,
        spin,
        simply_connected,
        symplectic: m.symplectic,
        minimal: Minimality::Unknown,
        general_type: m.general_type,
        lattice,
        canonical,
        canonical_full,
        surfaces: Vec::new(),
        witnesses,
        triples: Vec::new(),
        recipe,
    })
}

/// Whether `|nK|` is known to define a holomorphic map on a minimal
/// surface of general type. Unknown cases answer `false`.
pub fn pluri_system_defines_map(m: &ManifoldDescriptor, n: i64) -> Result<bool> {
    let k2 = m.c1_sq()?;
    let p_g = m.p_g()?;
    let godeaux = m.simply_connected && k2 == 1 && p_g == 0;
    let k4 = m.simply_connected && k2 == 4 && p_g == 0;
    Ok(n >= 4
        || (n == 3 && (k2 >= 2 || godeaux))
        || (n == 2 && (k2 >= 5 || p_g >= 1 || k4)))
}

/// The `m`-fold cover branched over a smooth member of `|nK|`; its canonical
/// class is `d` times the pullback of `K_M`.
pub fn pluricanonical_cover(base: &ManifoldDescriptor, m: i64, d: i64) -> Result<ManifoldDescriptor> {
    let p = CoverParams::new(m, d)?;
    if !(base.minimal == Minimality::Yes && base.general_type && base.simply_connected) {
        return Err(Error::Precondition {
            op: "pluricanonical_cover",
            reason: "needs a minimal, simply-connected surface of general type".into(),
        });
    }
    if !pluri_system_defines_map(base, p.n)? {
        return Err(Error::PluriNotKnown { n: p.n });
    }
    let c = base.c1_sq()?;
    let (e, c1_sq) = phi_map(&p, base.e, c)?;
    let twice_e = arith::mul(2, e)?;
    let sigma = arith::exact_div(arith::sub(c1_sq, twice_e)?, 3)
        .ok_or_else(|| Error::InconsistentBranchData("c1^2 - 2e is not divisible by 3".into()))?;
    let lat = IntersectionLattice::new(vec!["phi*K_M"], vec![vec![arith::mul(m, c)?]], true)?;
    Ok(ManifoldDescriptor {
        e,
        sigma,
        spin: d % 2 == 0,
        simply_connected: true,
        symplectic: true,
        minimal: Minimality::Yes,
        general_type: true,
        lattice: lat,
        canonical: ClassVector::new(vec![d]),
        canonical_full: true,
        surfaces: Vec::new(),
        witnesses: vec![Witness {
            name: "(phi*K_M)*".into(),
            pairings: vec![1],
            genus: None,
            self_intersection: None,
        }],
        triples: Vec::new(),
        recipe: Recipe::new("pluricanonical_cover")
            .int("m", m)
            .int("d", d)
            .input(base.recipe.clone())
            .note(format!("branched over a smooth curve in |{}K|", p.n))
            .note("axiomatic-dual: (phi*K_M)* pairs 1 with phi*K_M"),
    })
}

/// `(e, c) ↦ (m(e + Δc), m·d²·c)`.
pub fn phi_map(p: &CoverParams, e: i64, c: i64) -> Result<(i64, i64)> {
    let x = arith::mul(p.m, arith::add(e, arith::mul(p.delta, c)?)?)?;
    Ok((x, arith::mul(p.m_d2()?, c)?))
}

/// Rational inverse of [`phi_map`].
pub fn phi_inverse(p: &CoverParams, e_bar: i64, c_bar: i64) -> Result<(Ratio<i64>, Ratio<i64>)> {
    let md2 = p.m_d2()?;
    let d2 = arith::mul(p.d, p.d)?;
    let num = arith::sub(arith::mul(d2, e_bar)?, arith::mul(p.delta, c_bar)?)?;
    Ok((Ratio::new(num, md2), Ratio::new(c_bar, md2)))
}

/// Whether `(ē, c̄)` is the image of an integral point with integral `χ_h`.
pub fn phi_admissible_image(p: &CoverParams, e_bar: i64, c_bar: i64) -> Result<bool> {
    let md2 = p.m_d2()?;
    if e_bar % p.m != 0 || c_bar % md2 != 0 {
        return Ok(false);
    }
    let s = arith::add(e_bar / p.m, arith::mul(1 - p.delta, c_bar / md2)?)?;
    Ok(s % 12 == 0)
}

/// Persson's region in `(e, c1²)` coordinates: `(e−36)/5 ≤ c ≤ (e−24)/2`,
/// `c ≥ 1`, `χ_h ≥ 3` integral.
pub fn persson_sector(e: i64, c: i64) -> bool {
    let s = e + c;
    c >= 1 && s % 12 == 0 && s >= 36 && 5 * c >= e - 36 && 2 * c <= e - 24
}

/// The transported sector in reduced coordinates `x = ē/m`, `y = c̄/(md²)`.
pub fn persson_image_sector(p: &CoverParams, x: i64, y: i64) -> bool {
    let i = |v: i64| v as i128;
    let (x, y, delta) = (i(x), i(y), i(p.delta));
    x > 0
        && y > 0
        && y * (1 - delta) >= 36 - x
        && (x + (1 - delta) * y).rem_euclid(12) == 0
        && x - 36 <= (5 + delta) * y
        && (2 + delta) * y <= x - 24
}

/// A pluricanonical cover of the Persson surface with invariants
/// `(χ_h, c1²)`. The image point `(129, 27)` for `m = d = 3` is excluded.
pub fn persson_cover(m: i64, d: i64, chi: i64, c1_sq: i64) -> Result<ManifoldDescriptor> {
    let base = catalog("persson", &[chi, c1_sq])?;
    let p = CoverParams::new(m, d)?;
    if (m, d) == (3, 3) && phi_map(&p, base.e, c1_sq)? == (129, 27) {
        return Err(Error::ExceptionalPoint);
    }
    let x = pluricanonical_cover(&base, m, d)?;
    let derivation = x.recipe.clone();
    let recipe = Recipe::new("persson_cover")
        .int("m", m)
        .int("d", d)
        .int("chi", chi)
        .int("c1_sq", c1_sq)
        .input(derivation);
    Ok(x.with_recipe(recipe))
}

/// Resolved double cover of the quadric branched over `2n + 2m` rulings.
pub fn singular_double_cover(n: i64, m: i64) -> Result<ManifoldDescriptor> {
    if n < 1 || m < 1 {
        return Err(Error::Precondition { op: "singular_double_cover", reason: "n and m must be positive".into() });
    }
    let lat = IntersectionLattice::new(vec!["F1", "F2"], vec![vec![0, 2], vec![2, 0]], true)?;
    let canonical = ClassVector::new(vec![n - 2, m - 2]);
    let e = arith::add(6, arith::product(&[2, 2 * m - 1, 2 * n - 1])?)?;
    let w = |name: &str, pairings: Vec<i64>| Witness { name: name.into(), pairings, genus: None, self_intersection: None };
    Ok(ManifoldDescriptor {
        e,
        sigma: arith::product(&[-4, m, n])?,
        spin: n % 2 == 0 && m % 2 == 0,
        simply_connected: true,
        symplectic: true,
        minimal: Minimality::Unknown,
        general_type: false,
        lattice: lat,
        canonical,
        canonical_full: true,
        surfaces: Vec::new(),
        witnesses: vec![w("w1", vec![0, 1]), w("w2", vec![1, 0])],
        triples: Vec::new(),
        recipe: Recipe::new("singular_double_cover")
            .int("n", n)
            .int("m", m)
            .note("w1, w2: lifts of branch components meeting F2 and F1 once"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRow {
    pub d: i64,
    pub m: i64,
    pub ma: i64,
    pub delta: i64,
    pub e: i64,
    pub c1_sq: i64,
    pub chi_h: i64,
    pub b2_plus: i64,
    pub sigma: i64,
}

/// Invariants of the pluricanonical covers of `base` for `3 ≤ d ≤ 6` and
/// every degree `m ≥ 2` with `(m−1) | (d−1)`, ordered by `d` then `m`.
pub fn cover_table(base: &ManifoldDescriptor) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for d in 3..=6 {
        for m in 2..=d {
            let Ok(p) = CoverParams::new(m, d) else { continue };
            let x = pluricanonical_cover(base, m, d)?;
            let inv = x.derived()?;
            rows.push(TableRow {
                d,
                m,
                ma: p.n,
                delta: p.delta,
                e: x.e,
                c1_sq: inv.c1_sq,
                chi_h: inv.chi_h,
                b2_plus: inv.b2_plus.ok_or(Error::NotAlmostComplex(x.e + x.sigma))?,
                sigma: x.sigma,
            });
        }
    }
    Ok(rows)
}
