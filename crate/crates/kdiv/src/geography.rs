//! Validators, divisibility certificates and the geography constructors.

use std::collections::BTreeSet;

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::{coefficient_gcd, q_set, q_set_generators, ClassVector};
use crate::manifold::{elliptic_surface, ManifoldDescriptor, Minimality, Sign};
use crate::recipe::Recipe;
use crate::surgery::{
    blow_up, generalized_knot_surgery, knot_surgery, lagrangian_triple_surgery, log_transform,
    smooth_union,
};

/// Extra information used to tighten the upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityNote {
    /// No parity argument was applied.
    None,
    /// Simply connected and not spin, so `K` is not divisible by two and
    /// only the odd part of the witness gcd counts.
    OddPartTaken,
}

/// Two-sided bound on the divisibility of `K`.
///
/// `lower` divides the divisibility because `K = lower·A` with `A` in the
/// lattice; `upper` is a multiple of it because `K·w` is divisible by it for
/// every integral `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisibilityCertificate {
    pub lower: u64,
    pub upper: u64,
    pub certified: bool,
    pub parity_note: ParityNote,
}

impl DivisibilityCertificate {
    /// The divisibility, when the bounds agree.
    pub fn value(&self) -> Option<u64> {
        self.certified.then_some(self.lower)
    }
}

pub fn divisibility(m: &ManifoldDescriptor) -> Result<DivisibilityCertificate> {
    let lower = coefficient_gcd(&m.canonical);
    let mut upper = 0u64;
    let mut any = false;
    for (_, pairings) in m.witness_pairings()? {
        any = true;
        upper = num_integer::gcd(upper, m.canonical.dot(&pairings)?.unsigned_abs());
    }
    let mut parity_note = ParityNote::None;
    if m.simply_connected && !m.spin {
        upper = arith::odd_part(upper);
        parity_note = ParityNote::OddPartTaken;
    }
    Ok(DivisibilityCertificate { lower, upper, certified: any && lower == upper, parity_note })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name, passed, detail: detail.into() });
    }
}

fn skip(report: &mut ValidationReport, name: &'static str, why: &str) {
    report.push(name, true, format!("not applicable: {why}"));
}

/// Runs every numerical constraint on a descriptor. The check order is
/// fixed; a check that cannot be evaluated (overflow, missing data) fails.
pub fn validate(m: &ManifoldDescriptor) -> ValidationReport {
    let mut r = ValidationReport { checks: Vec::new() };
    let c1_sq = match m.c1_sq() {
        Ok(c) => c,
        Err(e) => {
            r.push("c1_sq", false, e.to_string());
            return r;
        }
    };
    let (e, sigma) = (m.e, m.sigma);

    r.push("c1_sq_mod_8", (c1_sq - sigma).rem_euclid(8) == 0, format!("c1^2 = {c1_sq}, sigma = {sigma}"));

    let chi = m.chi_h();
    r.push(
        "chi_h_integral",
        chi.is_ok(),
        match &chi {
            Ok(c) => format!("chi_h = {c}"),
            Err(_) => format!("e + sigma = {} is not divisible by 4", e + sigma),
        },
    );

    if m.symplectic && m.simply_connected {
        let twice = e - 2 + sigma;
        let ok = twice % 2 == 0 && (twice / 2).rem_euclid(2) == 1;
        r.push("b2_plus_odd", ok, format!("b2+ = {}/2", twice));
    } else {
        skip(&mut r, "b2_plus_odd", "needs symplectic and simply connected");
    }

    if m.spin {
        r.push("rochlin", sigma.rem_euclid(16) == 0, format!("sigma = {sigma}"));
    } else {
        skip(&mut r, "rochlin", "not spin");
    }

    let cert = match divisibility(m) {
        Ok(c) => c,
        Err(err) => {
            r.push("certificate", false, err.to_string());
            return r;
        }
    };

    // The lower bound divides the divisibility, so d^2 | c1^2 (2d^2 for even d) holds for it too.
    let lo = cert.lower as i128;
    if lo == 0 {
        skip(&mut r, "square_divisibility", "K = 0");
    } else {
        let factor = if lo % 2 == 0 { 2 * lo * lo } else { lo * lo };
        r.push(
            "square_divisibility",
            (c1_sq as i128) % factor == 0,
            format!("{factor} must divide c1^2 = {c1_sq}"),
        );
    }

    match cert.value() {
        Some(d) if d % 2 == 1 && m.simply_connected && sigma % 8 == 0 => {
            let factor = 8 * (d as i128) * (d as i128);
            r.push(
                "divisibility_8",
                (c1_sq as i128) % factor == 0,
                format!("{factor} must divide c1^2 = {c1_sq}"),
            );
        }
        _ => skip(&mut r, "divisibility_8", "needs certified odd d, simply connected, 8 | sigma"),
    }

    let mut bad = Vec::new();
    let mut checked = 0;
    let mut genus_bad = Vec::new();
    for s in &m.surfaces {
        let Some(g) = s.genus else { continue };
        let (Ok(k), Ok(sq)) = (m.lattice.pairing(&m.canonical, &s.class), m.lattice.square(&s.class)) else {
            bad.push(s.name.clone());
            continue;
        };
        checked += 1;
        if 2 * g as i64 - 2 != k + sq {
            bad.push(format!("{} (2g-2 = {}, K.C + C^2 = {})", s.name, 2 * g as i64 - 2, k + sq));
        }
        if sq == 0 && cert.lower > 0 && (2 * g as i64 - 2).rem_euclid(cert.lower as i64) != 0 {
            genus_bad.push(s.name.clone());
        }
    }
    for w in &m.witnesses {
        let (Some(g), Some(sq)) = (w.genus, w.self_intersection) else { continue };
        let Ok(k) = m.canonical.dot(&w.pairings) else {
            bad.push(w.name.clone());
            continue;
        };
        checked += 1;
        if 2 * g as i64 - 2 != k + sq {
            bad.push(w.name.clone());
        }
    }
    r.push(
        "adjunction",
        bad.is_empty(),
        if bad.is_empty() { format!("{checked} surface(s) checked") } else { bad.join(", ") },
    );

    let minimal_ok = !(cert.lower >= 2 && m.minimal == Minimality::No);
    r.push(
        "genus_divisibility",
        genus_bad.is_empty() && minimal_ok,
        if !minimal_ok {
            "divisibility >= 2 but marked non-minimal".to_string()
        } else if genus_bad.is_empty() {
            "d divides 2g - 2 on square-zero surfaces".to_string()
        } else {
            genus_bad.join(", ")
        },
    );

    if m.canonical_full {
        match m.lattice.square(&m.canonical) {
            Ok(k2) => r.push("canonical_square", k2 == c1_sq, format!("K.K = {k2}, 2e + 3 sigma = {c1_sq}")),
            Err(err) => r.push("canonical_square", false, err.to_string()),
        }
    } else {
        skip(&mut r, "canonical_square", "the lattice does not carry all of K");
    }

    match cert.value() {
        Some(d) if d != 0 && m.simply_connected => {
            let ok = (d % 2 == 0) == m.spin;
            r.push("spin_parity", ok, format!("d = {d}, spin = {}", m.spin));
        }
        _ => skip(&mut r, "spin_parity", "needs a certified nonzero divisibility and simply connected"),
    }

    r.push("noether", (c1_sq + e).rem_euclid(12) == 0, format!("c1^2 + e = {}", c1_sq + e));
    r
}

fn wrap(x: ManifoldDescriptor, recipe: Recipe) -> ManifoldDescriptor {
    let derivation = x.recipe.clone();
    x.with_recipe(recipe.input(derivation))
}

/// The knot-surgery realization of a homotopy elliptic surface with
/// divisibility `d`, following the parity branches. The last Lagrangian
/// triple's `R` carries the second surgery.
pub(crate) fn knot_route(n: i64, d: i64) -> Result<ManifoldDescriptor> {
    if n < 1 || d < 1 {
        return Err(Error::Precondition { op: "homotopy_elliptic", reason: "n and d must be positive".into() });
    }
    if n % 2 == 1 && d % 2 == 0 {
        return Err(Error::SpinParityObstruction { n, d });
    }
    if n == 1 {
        let k = (d - 1) / 2;
        return knot_surgery(&elliptic_surface(1, 1, 1)?, "f", k + 1, Sign::Plus);
    }
    let r_last = format!("R.{}", n - 1);
    let (x, g1, g2) = match (n % 2, d % 2) {
        (0, 0) => {
            let (m, k) = (n / 2, d / 2);
            (elliptic_surface(n, 1, 1)?, arith::add(arith::mul(m, k - 1)?, 1)?, k)
        }
        (1, 1) => {
            let (m, k) = ((n - 1) / 2, (d - 1) / 2);
            let g1 = arith::add(arith::add(arith::product(&[2, k, m])?, k)?, 1)?;
            (elliptic_surface(n, 1, 1)?, g1, 2 * k + 1)
        }
        _ => {
            let (m, k) = (n / 2, (d - 1) / 2);
            let g1 = arith::add(arith::add(arith::product(&[4, k, m])?, k)?, 2)?;
            (log_transform(&elliptic_surface(n, 1, 1)?, 2)?, g1, 2 * k + 1)
        }
    };
    let x = knot_surgery(&x, "f", g1, Sign::Plus)?;
    knot_surgery(&x, &r_last, g2, Sign::Plus)
}

/// A homotopy elliptic surface with `χ_h = n` and divisibility exactly `d`.
/// For `n ≤ 2` the elliptic surfaces `E(1)_{d+2,2}` and `E(2)_{d+1}` are
/// used; the recipe notes the knot-surgery alternative.
pub fn homotopy_elliptic(n: i64, d: i64) -> Result<ManifoldDescriptor> {
    if n < 1 || d < 1 {
        return Err(Error::Precondition { op: "homotopy_elliptic", reason: "n and d must be positive".into() });
    }
    if n % 2 == 1 && d % 2 == 0 {
        return Err(Error::SpinParityObstruction { n, d });
    }
    let mut recipe = Recipe::new("homotopy_elliptic").int("n", n).int("d", d);
    let x = match n {
        1 => {
            recipe = recipe.note(format!("alternative: knot surgery of genus {} on a fibre of E(1)", (d + 1) / 2));
            elliptic_surface(1, arith::add(d, 2)?, 2)?
        }
        2 => {
            recipe = recipe.note("alternative: knot surgeries on a fibre and a rim torus of E(2)");
            elliptic_surface(2, arith::add(d, 1)?, 1)?
        }
        _ => knot_route(n, d)?,
    };
    Ok(wrap(x, recipe))
}

/// Simply-connected spin surface with `c1² = 2td²`, `e = td² + 24m`.
pub fn spin_surface(d: i64, m: i64, t: i64) -> Result<ManifoldDescriptor> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::Precondition { op: "spin_surface", reason: format!("d must be even and >= 2, got {d}") });
    }
    if m < 1 || t < 1 {
        return Err(Error::Precondition { op: "spin_surface", reason: "m and t must be positive".into() });
    }
    let k = d / 2;
    let n = arith::mul(2, m)?;
    let last = n - 1;
    let x = knot_route(n, d)?;
    let x = smooth_union(&x, &format!("S.{last}"), &format!("R.{last}"), "Sigma", true)?;
    let x = generalized_knot_surgery(&x, "Sigma", arith::mul(t, k)?)?;
    Ok(wrap(x, Recipe::new("spin_surface").int("d", d).int("m", m).int("t", t)))
}

/// Simply-connected non-spin surface with `c1² = 8td²`, `e = 4td² + 12n`.
pub fn nonspin_surface(d: i64, n: i64, t: i64) -> Result<ManifoldDescriptor> {
    if d < 1 || d % 2 == 0 {
        return Err(Error::Precondition { op: "nonspin_surface", reason: format!("d must be odd and positive, got {d}") });
    }
    if n < 2 || t < 1 {
        return Err(Error::Precondition { op: "nonspin_surface", reason: "need n >= 2 and t >= 1".into() });
    }
    let last = n - 1;
    let x = knot_route(n, d)?;
    let x = smooth_union(&x, &format!("S.{last}"), &format!("R.{last}"), "Sigma", true)?;
    let x = generalized_knot_surgery(&x, "Sigma", arith::mul(t, d)?)?;
    Ok(wrap(x, Recipe::new("nonspin_surface").int("d", d).int("n", n).int("t", t)))
}

/// `E(n)` blown up `r` times: `(χ_h, c1²) = (n, −r)` with indivisible `K`.
pub fn negative_c1(n: i64, r: i64) -> Result<ManifoldDescriptor> {
    if n < 1 || r < 1 {
        return Err(Error::Precondition { op: "negative_c1", reason: "n and r must be positive".into() });
    }
    let mut x = elliptic_surface(n, 1, 1)?;
    for _ in 0..r {
        x = blow_up(&x)?;
    }
    Ok(wrap(x, Recipe::new("negative_c1").int("n", n).int("r", r)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    C1sqZero { n: i64 },
    SpinPositive { m: i64, t: i64 },
    NonspinPositive { m: i64, t: i64 },
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::C1sqZero { .. } => "c1sq_zero",
            Regime::SpinPositive { .. } => "spin_positive",
            Regime::NonspinPositive { .. } => "nonspin_positive",
        }
    }

    /// Builds a regime from its name and the integers `n` (or `m`) and `t`.
    pub fn from_parts(name: &str, n_or_m: i64, t: Option<i64>) -> Result<Self> {
        let need_t = || t.ok_or_else(|| Error::Recipe(format!("regime `{name}` needs t")));
        match name {
            "c1sq_zero" => Ok(Regime::C1sqZero { n: n_or_m }),
            "spin_positive" => Ok(Regime::SpinPositive { m: n_or_m, t: need_t()? }),
            "nonspin_positive" => Ok(Regime::NonspinPositive { m: n_or_m, t: need_t()? }),
            other => Err(Error::Recipe(format!("unknown regime `{other}`"))),
        }
    }

    fn annotate(&self, r: Recipe) -> Recipe {
        let r = r.name("regime", self.name());
        match *self {
            Regime::C1sqZero { n } => r.int("n", n),
            Regime::SpinPositive { m, t } | Regime::NonspinPositive { m, t } => r.int("m", m).int("t", t),
        }
    }
}

/// Largest number of triples handled by [`inequivalent_family`]; every
/// sign pattern is built explicitly.
pub const MAX_FAMILY_TRIPLES: usize = 12;

struct TripleParams {
    a: i64,
    h1: i64,
}

struct FamilyPlan {
    em: i64,
    h2: i64,
    triples: Vec<TripleParams>,
}

fn family_plan(d: i64, divisors: &[i64]) -> Result<FamilyPlan> {
    let du: Vec<u64> = divisors
        .iter()
        .map(|&x| u64::try_from(x).map_err(|_| Error::InvalidDivisorList(format!("{x} is negative"))))
        .collect::<Result<_>>()?;
    let d_u = u64::try_from(d).map_err(|_| Error::InvalidDivisorList("d must be positive".into()))?;
    q_set_generators(d_u, &du)?;
    let big_n = divisors.len() - 1;
    if big_n == 0 {
        return Err(Error::Precondition { op: "inequivalent_family", reason: "need N >= 1 extra divisors".into() });
    }
    if big_n > MAX_FAMILY_TRIPLES {
        return Err(Error::Precondition {
            op: "inequivalent_family",
            reason: format!("at most {MAX_FAMILY_TRIPLES} extra divisors are supported"),
        });
    }
    let rest = &divisors[1..];
    if d % 2 == 1 {
        let triples = rest.iter().map(|&di| TripleParams { a: d + di, h1: (d - di) / 2 }).collect();
        return Ok(FamilyPlan { em: 1, h2: (d - 1) / 2, triples });
    }
    let k = d / 2;
    let triples = rest
        .iter()
        .map(|&di| {
            let ki = di / 2;
            if d % 4 == 2 || di % 4 == 0 {
                TripleParams { a: (k + ki) / 2, h1: (k - ki) / 2 }
            } else {
                TripleParams { a: (k + di) / 2, h1: (k - di) / 2 }
            }
        })
        .collect();
    Ok(FamilyPlan { em: 2, h2: k - 1, triples })
}

/// One member of a family: the sign pattern is a bit mask over the
/// triples `1..=N`; a set bit selects the `−` knot surgery.
pub fn inequivalent_family(
    d: i64,
    divisors: &[i64],
    regime: Regime,
    pattern: u32,
) -> Result<ManifoldDescriptor> {
    let plan = family_plan(d, divisors)?;
    let big_n = plan.triples.len() as i64;
    if pattern >> plan.triples.len() != 0 {
        return Err(Error::Precondition {
            op: "inequivalent_family",
            reason: format!("pattern {pattern} has bits beyond the {big_n} triples"),
        });
    }
    let fail = |bound: String| Err(Error::Precondition { op: "inequivalent_family", reason: bound });
    let (base, final_knot) = match regime {
        Regime::C1sqZero { n } => {
            let l = if d % 2 == 1 {
                if n < 2 * big_n + 1 {
                    return fail(format!("d odd needs n >= 2N + 1 = {}", 2 * big_n + 1));
                }
                n - big_n
            } else {
                if n % 2 != 0 || n < 3 * big_n + 1 {
                    return fail(format!("d even needs n even and n >= 3N + 1 = {}", 3 * big_n + 1));
                }
                n - 2 * big_n
            };
            let g = arith::add(arith::mul(l, d - 1)?, 2)? / 2;
            (elliptic_surface(l, 1, 1)?, Some(g))
        }
        Regime::SpinPositive { m, t } => {
            if d % 2 != 0 {
                return fail("spin_positive needs d even".into());
            }
            if 2 * m < 3 * big_n + 2 {
                return fail(format!("spin_positive needs 2m >= 3N + 2 = {}", 3 * big_n + 2));
            }
            (spin_surface(d, m - big_n, t)?, None)
        }
        Regime::NonspinPositive { m, t } => {
            if d % 2 == 0 || d < 3 {
                return fail("nonspin_positive needs d odd and >= 3".into());
            }
            if m < 2 * big_n + 2 {
                return fail(format!("nonspin_positive needs m >= 2N + 2 = {}", 2 * big_n + 2));
            }
            (nonspin_surface(d, m - big_n, t)?, None)
        }
    };
    let mut x = base;
    for (i, tp) in plan.triples.iter().enumerate() {
        let sign = if pattern >> i & 1 == 1 { Sign::Minus } else { Sign::Plus };
        x = lagrangian_triple_surgery(&x, i as u32 + 1, tp.a, plan.em, tp.h1, plan.h2, sign)?;
    }
    if let Some(g) = final_knot {
        x = knot_surgery(&x, "f", g, Sign::Plus)?;
    }
    let recipe = Recipe::new("inequivalent_family").int("d", d).ints("divisors", divisors);
    let recipe = regime.annotate(recipe).int("pattern", pattern as i64);
    Ok(wrap(x, recipe))
}

#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub pattern: u32,
    pub canonical: ClassVector,
    pub certificate: DivisibilityCertificate,
}

#[derive(Debug, Clone)]
pub struct Family {
    /// The all-plus member.
    pub w: ManifoldDescriptor,
    pub members: Vec<FamilyMember>,
    pub q: BTreeSet<u64>,
}

impl Family {
    /// Deduplicated certified divisibilities; `None` if some member is not
    /// certified.
    pub fn divisibilities(&self) -> Option<BTreeSet<u64>> {
        self.members.iter().map(|m| m.certificate.value()).collect()
    }
}

/// Builds every sign pattern of a family. All members share `W`'s lattice.
pub fn family(d: i64, divisors: &[i64], regime: Regime) -> Result<Family> {
    let w = inequivalent_family(d, divisors, regime, 0)?;
    let n = divisors.len() - 1;
    let mut members = Vec::with_capacity(1 << n);
    for pattern in 0..(1u32 << n) {
        let x = if pattern == 0 { w.clone() } else { inequivalent_family(d, divisors, regime, pattern)? };
        if x.lattice != w.lattice {
            return Err(Error::Precondition {
                op: "inequivalent_family",
                reason: "sign patterns produced different lattices".into(),
            });
        }
        members.push(FamilyMember { pattern, certificate: divisibility(&x)?, canonical: x.canonical });
    }
    let du: Vec<u64> = divisors.iter().map(|&x| x as u64).collect();
    Ok(Family { w, members, q: q_set(d as u64, &du)? })
}

/// Outcome of [`realizable`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Realizability {
    /// A constructor call that realizes the point, e.g. `spin_surface d=2;m=1;t=1`.
    Realized { constructor: &'static str, params: Vec<(&'static str, i64)> },
    Obstructed(String),
    Unknown,
}

/// Looks for a constructor realizing `(χ_h, c1²)` with divisibility `d`,
/// after ruling out points excluded by the divisibility constraints on c1^2. Points the
/// constructors do not reach are reported as unknown.
pub fn realizable(chi: i64, c1_sq: i64, d: i64) -> Result<Realizability> {
    use Realizability::*;
    if chi < 1 || d < 1 {
        return Err(Error::Precondition { op: "realizable", reason: "chi_h and d must be positive".into() });
    }
    let sigma = arith::sub(c1_sq, arith::mul(8, chi)?)?;
    if d % 2 == 0 && sigma % 16 != 0 {
        return Ok(Obstructed(format!("d even forces spin, but sigma = {sigma} is not divisible by 16")));
    }
    let dd = arith::mul(d, d)?;
    let need = if d % 2 == 0 { 2 * dd } else { dd };
    if c1_sq % need != 0 {
        return Ok(Obstructed(format!("{need} must divide c1^2 = {c1_sq}")));
    }
    if d % 2 == 1 && sigma % 8 == 0 && c1_sq % (8 * dd) != 0 {
        return Ok(Obstructed(format!("8 | sigma forces {} | c1^2", 8 * dd)));
    }
    if c1_sq == 0 {
        return Ok(Realized { constructor: "homotopy_elliptic", params: vec![("n", chi), ("d", d)] });
    }
    if c1_sq < 0 {
        if d == 1 {
            return Ok(Realized { constructor: "negative_c1", params: vec![("n", chi), ("r", -c1_sq)] });
        }
        return Ok(Unknown);
    }
    if d % 2 == 0 {
        let t = c1_sq / (2 * dd);
        let rest = 4 * chi - t * dd;
        if rest > 0 && rest % 8 == 0 {
            return Ok(Realized { constructor: "spin_surface", params: vec![("d", d), ("m", rest / 8), ("t", t)] });
        }
    } else if c1_sq % (8 * dd) == 0 {
        let t = c1_sq / (8 * dd);
        let n = chi - t * dd;
        if n >= 2 {
            return Ok(Realized { constructor: "nonspin_surface", params: vec![("d", d), ("n", n), ("t", t)] });
        }
    }
    Ok(Unknown)
}
