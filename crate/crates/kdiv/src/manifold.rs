//! Manifold descriptors and the atomic building blocks.
//!
//! A [`ManifoldDescriptor`] stores `e` and `σ`; `c1² = 2e + 3σ` and
//! `χ_h = (e + σ)/4` are always derived. The tracked lattice is a fragment of
//! H² that contains the canonical class and the surfaces the constructions
//! need. Surfaces are lattice classes; witnesses are classes known only
//! through their pairings with the basis.

use std::fmt;

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::{coefficient_gcd, ClassVector, IntersectionLattice};
use crate::recipe::Recipe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            _ => Err(Error::Recipe(format!("sign must be `+` or `-`, got `{s}`"))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Minimality {
    Yes,
    No,
    Unknown,
}

/// An embedded surface whose class lies in the tracked lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surface {
    pub name: String,
    pub class: ClassVector,
    /// Declared genus. `None` when the construction does not pin it down;
    /// a declared genus is checked against the adjunction formula.
    pub genus: Option<u64>,
    pub symplectic_sign: Sign,
    pub complement_simply_connected: bool,
    /// Name of a surface meeting this one once, used as `B` in fibre sums.
    pub dual: Option<String>,
}

/// A class known only through its pairings with the lattice basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub name: String,
    pub pairings: Vec<i64>,
    pub genus: Option<u64>,
    pub self_intersection: Option<i64>,
}

/// A Lagrangian triple `(T1, T2, R)` with dual spheres `S1` (to `T1`) and
/// `S` (to `R` and `T2`). `T2` is not stored: it is `R − a·T1` for whatever
/// `a` the surgery chooses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub index: u32,
    pub t1: String,
    pub s1: String,
    pub r: String,
    pub s: String,
    pub used: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifoldDescriptor {
    pub e: i64,
    pub sigma: i64,
    pub spin: bool,
    pub simply_connected: bool,
    pub symplectic: bool,
    pub minimal: Minimality,
    /// Complex surface of general type (catalog entries and their covers).
    pub general_type: bool,
    pub lattice: IntersectionLattice,
    pub canonical: ClassVector,
    /// The lattice carries the whole canonical class, so `K² = c1²` must hold.
    pub canonical_full: bool,
    pub surfaces: Vec<Surface>,
    pub witnesses: Vec<Witness>,
    pub triples: Vec<Triple>,
    pub recipe: Recipe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivedInvariants {
    pub c1_sq: i64,
    pub chi_h: i64,
    pub b2: Option<i64>,
    pub b2_plus: Option<i64>,
    pub b2_minus: Option<i64>,
}

impl ManifoldDescriptor {
    pub fn c1_sq(&self) -> Result<i64> {
        arith::add(arith::mul(2, self.e)?, arith::mul(3, self.sigma)?)
    }

    /// `χ_h`, failing when `e + σ` is not divisible by 4.
    pub fn chi_h(&self) -> Result<i64> {
        let s = arith::add(self.e, self.sigma)?;
        arith::exact_div(s, 4).ok_or(Error::NotAlmostComplex(s))
    }

    /// Geometric genus `χ_h − 1`, meaningful for simply-connected surfaces.
    pub fn p_g(&self) -> Result<i64> {
        arith::sub(self.chi_h()?, 1)
    }

    pub fn derived(&self) -> Result<DerivedInvariants> {
        derived_invariants(self)
    }

    pub fn surface(&self, name: &str) -> Result<&Surface> {
        self.surfaces
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownSurface(name.to_string()))
    }

    pub fn surface_index(&self, name: &str) -> Result<usize> {
        self.surfaces
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::UnknownSurface(name.to_string()))
    }

    /// Coefficient vector of a basis element, by name.
    pub fn basis_class(&self, name: &str) -> Result<ClassVector> {
        let i = self.lattice.index_of(name).ok_or_else(|| Error::UnknownSurface(name.to_string()))?;
        Ok(ClassVector::unit(self.lattice.rank(), i))
    }

    pub fn self_intersection(&self, s: &Surface) -> Result<i64> {
        self.lattice.square(&s.class)
    }

    pub fn triple(&self, index: u32) -> Result<&Triple> {
        self.triples.iter().find(|t| t.index == index).ok_or(Error::UndeclaredTriple(index))
    }

    /// Pairing vectors of every surface and witness, in declaration order.
    pub fn witness_pairings(&self) -> Result<Vec<(String, Vec<i64>)>> {
        let mut out = Vec::with_capacity(self.surfaces.len() + self.witnesses.len());
        for s in &self.surfaces {
            out.push((s.name.clone(), self.lattice.pairing_vector(&s.class)?));
        }
        for w in &self.witnesses {
            out.push((w.name.clone(), w.pairings.clone()));
        }
        Ok(out)
    }

    /// Same descriptor with its recipe replaced.
    pub fn with_recipe(mut self, recipe: Recipe) -> Self {
        self.recipe = recipe;
        self
    }
}

/// Whether the canonical class is divisible by two in the tracked lattice.
pub fn canonical_is_even(k: &ClassVector) -> bool {
    coefficient_gcd(k).is_multiple_of(2)
}

pub fn derived_invariants(m: &ManifoldDescriptor) -> Result<DerivedInvariants> {
    let c1_sq = m.c1_sq()?;
    let chi_h = m.chi_h()?;
    let (b2, b2_plus, b2_minus) = if m.simply_connected {
        let b2 = arith::sub(m.e, 2)?;
        let twice_plus = arith::add(b2, m.sigma)?;
        let plus = arith::exact_div(twice_plus, 2).ok_or(Error::NotAlmostComplex(twice_plus))?;
        (Some(b2), Some(plus), Some(arith::sub(b2, plus)?))
    } else {
        (None, None, None)
    };
    Ok(DerivedInvariants { c1_sq, chi_h, b2, b2_plus, b2_minus })
}

pub(crate) fn sphere(name: &str, class: ClassVector, dual: Option<&str>) -> Surface {
    Surface {
        name: name.to_string(),
        class,
        genus: Some(0),
        symplectic_sign: Sign::Plus,
        complement_simply_connected: false,
        dual: dual.map(str::to_string),
    }
}

pub(crate) fn torus(name: &str, class: ClassVector, dual: &str, complement_sc: bool) -> Surface {
    Surface {
        name: name.to_string(),
        class,
        genus: Some(1),
        symplectic_sign: Sign::Plus,
        complement_simply_connected: complement_sc,
        dual: Some(dual.to_string()),
    }
}

/// `E(n)_{p,q}`. The tracked lattice is the fibre class `f` (with the
/// section `s` when there are no multiple fibres) plus, for each of the
/// `n − 1` Lagrangian triples, the blocks `(T1.i, S1.i)` and `(R.i, S.i)`
/// with Gram `[[0,1],[1,−2]]`. When `pq > 1` the section is gone and an
/// axiomatic dual `w_f` certifies that `f` is primitive.
pub fn elliptic_surface(n: i64, p: i64, q: i64) -> Result<ManifoldDescriptor> {
    if n < 1 || p < 1 || q < 1 {
        return Err(Error::Precondition { op: "elliptic_surface", reason: "n, p, q must be positive".into() });
    }
    if arith::gcd(p, q) != 1 {
        return Err(Error::MultipleFibresNotCoprime { p, q });
    }
    let pq = arith::mul(p, q)?;
    let k_coeff = arith::sub(arith::sub(arith::mul(n, pq)?, p)?, q)?;
    let triples = u32::try_from(n - 1).map_err(|_| Error::Overflow)?;

    let mut lat = IntersectionLattice::empty();
    if pq == 1 {
        lat.push_block(vec!["f".into(), "s".into()], vec![vec![0, 1], vec![1, -n]])?;
    } else {
        lat.push_block(vec!["f".into()], vec![vec![0]])?;
    }
    let nucleus = vec![vec![0, 1], vec![1, -2]];
    for i in 1..=triples {
        lat.push_block(vec![format!("T1.{i}"), format!("S1.{i}")], nucleus.clone())?;
        lat.push_block(vec![format!("R.{i}"), format!("S.{i}")], nucleus.clone())?;
    }
    let rank = lat.rank();
    let unit = |name: &str| ClassVector::unit(rank, lat.index_of(name).expect("basis name"));

    let mut surfaces = Vec::new();
    let mut witnesses = Vec::new();
    let mut recipe = Recipe::new("elliptic_surface").int("n", n).int("p", p).int("q", q);
    if pq == 1 {
        surfaces.push(torus("f", unit("f"), "s", true));
        surfaces.push(sphere("s", unit("s"), None));
    } else {
        surfaces.push(Surface { dual: None, ..torus("f", unit("f"), "", true) });
        let mut pairings = vec![0; rank];
        pairings[0] = 1;
        witnesses.push(Witness { name: "w_f".into(), pairings, genus: None, self_intersection: None });
        recipe = recipe.note("axiomatic-dual: w_f pairs 1 with f");
    }
    let mut triple_list = Vec::new();
    for i in 1..=triples {
        let (t1, s1, r, s) = (format!("T1.{i}"), format!("S1.{i}"), format!("R.{i}"), format!("S.{i}"));
        surfaces.push(torus(&t1, unit(&t1), &s1, true));
        surfaces.push(sphere(&s1, unit(&s1), None));
        surfaces.push(torus(&r, unit(&r), &s, true));
        surfaces.push(sphere(&s, unit(&s), None));
        triple_list.push(Triple { index: i, t1, s1, r, s, used: false });
    }
    if triples > 0 {
        recipe = recipe.note("assumed-disjoint: triple nuclei pair 0 with f, s and with each other");
    }
    let minimal = if n >= 2 || (p >= 2 && q >= 2) { Minimality::Yes } else { Minimality::No };

    Ok(ManifoldDescriptor {
        e: arith::mul(12, n)?,
        sigma: arith::mul(-8, n)?,
        spin: n % 2 == 0 && p % 2 == 1 && q % 2 == 1,
        simply_connected: true,
        symplectic: true,
        minimal,
        general_type: false,
        canonical: unit("f").checked_scale(k_coeff)?,
        lattice: lat,
        canonical_full: true,
        surfaces,
        witnesses,
        triples: triple_list,
        recipe,
    })
}

/// `M_K × S¹` for a fibred knot of genus `h` (`h = 0` is the unknot).
pub fn knot_product(h: i64) -> Result<ManifoldDescriptor> {
    if h < 0 {
        return Err(Error::Precondition { op: "knot_product", reason: "h must be non-negative".into() });
    }
    let lat = IntersectionLattice::new(vec!["T_K", "B_K"], vec![vec![0, 1], vec![1, 0]], true)?;
    let t = ClassVector::unit(2, 0);
    let b = ClassVector::unit(2, 1);
    let canonical = t.checked_scale(arith::sub(arith::mul(2, h)?, 2)?)?;
    let mut fibre = torus("B_K", b, "T_K", false);
    fibre.genus = Some(h.unsigned_abs());
    Ok(ManifoldDescriptor {
        e: 0,
        sigma: 0,
        spin: true,
        simply_connected: false,
        symplectic: h >= 1,
        minimal: Minimality::Unknown,
        general_type: false,
        lattice: lat,
        canonical,
        canonical_full: true,
        surfaces: vec![torus("T_K", t, "B_K", false), fibre],
        witnesses: Vec::new(),
        triples: Vec::new(),
        recipe: Recipe::new("knot_product").int("h", h).note(format!("fibre genus {h}")).note("b1 = 2"),
    })
}

/// The `Σ_h`-bundle `Y_{g,h}` over `Σ_g`.
pub fn surface_bundle_y(g: i64, h: i64) -> Result<ManifoldDescriptor> {
    if g < 1 || h < 1 {
        return Err(Error::Precondition { op: "surface_bundle_y", reason: "g and h must be positive".into() });
    }
    let blocks = arith::product(&[2, h, g - 1])?;
    let mut lat = IntersectionLattice::empty();
    lat.push_repeated_2x2(blocks as usize, [[2, 1], [1, 0]], |j, s| {
        if s == 0 { format!("Y.split{j}") } else { format!("Y.rim{j}") }
    })?;
    lat.push_block(vec!["Sigma_S".into(), "Sigma_F".into()], vec![vec![0, 1], vec![1, 0]])?;
    let rank = lat.rank();
    let ss = ClassVector::unit(rank, rank - 2);
    let sf = ClassVector::unit(rank, rank - 1);
    let canonical = ss
        .checked_scale(arith::sub(arith::mul(2, h)?, 2)?)?
        .add_multiple(arith::sub(arith::mul(2, g)?, 2)?, &sf)?;
    let base = Surface {
        name: "Sigma_S".into(),
        class: ss,
        genus: Some(g as u64),
        symplectic_sign: Sign::Plus,
        complement_simply_connected: false,
        dual: Some("Sigma_F".into()),
    };
    let fibre = Surface {
        name: "Sigma_F".into(),
        class: sf,
        genus: Some(h as u64),
        symplectic_sign: Sign::Plus,
        complement_simply_connected: false,
        dual: Some("Sigma_S".into()),
    };
    Ok(ManifoldDescriptor {
        e: arith::product(&[4, g - 1, h - 1])?,
        sigma: 0,
        spin: true,
        simply_connected: false,
        symplectic: true,
        minimal: Minimality::Unknown,
        general_type: false,
        lattice: lat,
        canonical,
        canonical_full: true,
        surfaces: vec![base, fibre],
        witnesses: Vec::new(),
        triples: Vec::new(),
        recipe: Recipe::new("surface_bundle_y").int("g", g).int("h", h).note(format!("b1 = {}", 2 * g)),
    })
}

/// Names accepted by [`catalog`], with the number of integer arguments.
pub const CATALOG_ENTRIES: &[(&str, usize)] = &[
    ("barlow", 0),
    ("lee_park", 0),
    ("enriques_k1_pg1", 0),
    ("enriques_k2_pg1", 0),
    ("godeaux_like", 2),
    ("horikawa_spin", 1),
    ("horikawa_nonspin", 1),
    ("persson", 2),
    ("quadric", 0),
];

struct CatalogData {
    chi: i64,
    c1_sq: i64,
    divisibility: i64,
    spin: bool,
    general_type: bool,
    note: Option<&'static str>,
}

fn catalog_data(name: &str, args: &[i64]) -> Result<CatalogData> {
    let arity = CATALOG_ENTRIES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, a)| *a)
        .ok_or_else(|| Error::UnknownCatalogEntry(name.to_string()))?;
    if args.len() != arity {
        return Err(Error::CatalogParameters(format!("{name} takes {arity} integer argument(s)")));
    }
    let gt = |chi, c1_sq| CatalogData { chi, c1_sq, divisibility: 1, spin: false, general_type: true, note: None };
    Ok(match name {
        "barlow" => gt(1, 1),
        "lee_park" => gt(1, 2),
        "enriques_k1_pg1" => gt(2, 1),
        "enriques_k2_pg1" => gt(2, 2),
        "godeaux_like" => {
            let (k2, pg) = (args[0], args[1]);
            if k2 < 1 || pg < 0 {
                return Err(Error::CatalogParameters("godeaux_like needs K^2 >= 1 and p_g >= 0".into()));
            }
            if k2 < 2 * pg - 4 {
                return Err(Error::CatalogParameters(format!("K^2 = {k2} violates K^2 >= 2p_g - 4")));
            }
            let chi = arith::add(pg, 1)?;
            if k2 > arith::mul(9, chi)? {
                return Err(Error::CatalogParameters(format!("K^2 = {k2} exceeds 9 chi_h")));
            }
            gt(chi, k2)
        }
        "horikawa_spin" => {
            let r = args[0];
            if r < 1 || r % 2 == 0 {
                return Err(Error::CatalogParameters(format!("horikawa_spin needs odd r >= 1, got {r}")));
            }
            CatalogData {
                chi: arith::add(arith::mul(4, r)?, 3)?,
                c1_sq: arith::mul(8, r)?,
                divisibility: 2,
                spin: true,
                general_type: true,
                note: Some("Noether line"),
            }
        }
        "horikawa_nonspin" => {
            let s = args[0];
            if s < 1 {
                return Err(Error::CatalogParameters(format!("horikawa_nonspin needs s >= 1, got {s}")));
            }
            CatalogData {
                chi: arith::add(arith::mul(4, s)?, 3)?,
                c1_sq: arith::mul(8, s)?,
                divisibility: 1,
                spin: false,
                general_type: true,
                note: Some("Noether line"),
            }
        }
        "persson" => {
            let (x, y) = (args[0], args[1]);
            let inside = x >= 3 && y >= 1 && y >= 2 * x - 6 && y <= 4 * x - 8;
            if !inside {
                return Err(Error::OutsidePerssonSector { x, y });
            }
            CatalogData {
                chi: x,
                c1_sq: y,
                divisibility: 1,
                spin: false,
                general_type: true,
                note: Some("genus-2 fibration: divisibility of K is 1 or 2; the non-spin member is recorded"),
            }
        }
        "quadric" => unreachable!("handled by quadric()"),
        _ => return Err(Error::UnknownCatalogEntry(name.to_string())),
    })
}

/// Catalog surfaces. General-type entries carry a rank-1 lattice spanned by
/// `A` with `K = d·A`, and an axiomatic dual witness `A*`.
pub fn catalog(name: &str, args: &[i64]) -> Result<ManifoldDescriptor> {
    if name == "quadric" {
        if !args.is_empty() {
            return Err(Error::CatalogParameters("quadric takes no arguments".into()));
        }
        return quadric();
    }
    let data = catalog_data(name, args)?;
    let d = data.divisibility;
    let a_sq = arith::exact_div(data.c1_sq, d * d).ok_or_else(|| {
        Error::CatalogParameters(format!("c1^2 = {} is not divisible by {}", data.c1_sq, d * d))
    })?;
    let lat = IntersectionLattice::new(vec!["K_M"], vec![vec![a_sq]], true)?;
    let twelve_chi = arith::mul(12, data.chi)?;
    let mut recipe = Recipe::new("catalog")
        .name("name", name)
        .ints("args", args)
        .note("axiomatic-dual: K_M* pairs 1 with K_M");
    if let Some(n) = data.note {
        recipe = recipe.note(n);
    }
    Ok(ManifoldDescriptor {
        e: arith::sub(twelve_chi, data.c1_sq)?,
        sigma: arith::sub(data.c1_sq, arith::mul(8, data.chi)?)?,
        spin: data.spin,
        simply_connected: true,
        symplectic: true,
        minimal: Minimality::Yes,
        general_type: data.general_type,
        lattice: lat,
        canonical: ClassVector::new(vec![d]),
        canonical_full: true,
        surfaces: Vec::new(),
        witnesses: vec![Witness { name: "K_M*".into(), pairings: vec![1], genus: None, self_intersection: None }],
        triples: Vec::new(),
        recipe,
    })
}

/// `CP¹ × CP¹` with the two rulings `S1`, `S2`.
pub fn quadric() -> Result<ManifoldDescriptor> {
    let lat = IntersectionLattice::new(vec!["S1", "S2"], vec![vec![0, 1], vec![1, 0]], true)?;
    let s1 = ClassVector::unit(2, 0);
    let s2 = ClassVector::unit(2, 1);
    let mut a = sphere("S1", s1, Some("S2"));
    let mut b = sphere("S2", s2, Some("S1"));
    a.complement_simply_connected = true;
    b.complement_simply_connected = true;
    Ok(ManifoldDescriptor {
        e: 4,
        sigma: 0,
        spin: true,
        simply_connected: true,
        symplectic: true,
        minimal: Minimality::Yes,
        general_type: false,
        lattice: lat,
        canonical: ClassVector::new(vec![-2, -2]),
        canonical_full: true,
        surfaces: vec![a, b],
        witnesses: Vec::new(),
        triples: Vec::new(),
        recipe: Recipe::new("catalog").name("name", "quadric").ints("args", &[]),
    })
}
