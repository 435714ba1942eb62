//! Oracles and corpora shared by the integration tests. Everything here is
//! computed from first principles (raw Gram entries, subset enumeration,
//! closed-form invariants) rather than through the library's own helpers.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use kdiv::{
    catalog, divisibility, elliptic_surface, execute, homotopy_elliptic, negative_c1, nonspin_surface,
    persson_cover, pluricanonical_cover, singular_double_cover, spin_surface, surface_bundle_y, ClassVector,
    ManifoldDescriptor, Recipe,
};
use rand::rngs::StdRng;
use rand::Rng;

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Subset-gcd enumeration over all `2^(N+1) − 1` non-empty subsets, after
/// doubling the entries not divisible by 4 when `4 | d`.
pub fn brute_q_set(d: u64, divisors: &[u64]) -> BTreeSet<u64> {
    let list: Vec<u64> = if d.is_multiple_of(4) {
        divisors.iter().map(|&x| if x % 4 == 0 { x } else { 2 * x }).collect()
    } else {
        divisors.to_vec()
    };
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << list.len()) {
        let g = (0..list.len()).filter(|i| mask >> i & 1 == 1).fold(0, |g, i| gcd(g, list[i]));
        out.insert(g);
    }
    out
}

pub fn divisors_of(d: u64) -> Vec<u64> {
    (1..=d).filter(|x| d.is_multiple_of(*x)).collect()
}

/// Divisors allowed in a list for `d`: all of them, or the even ones when
/// `d` is even.
pub fn admissible_divisors(d: u64) -> Vec<u64> {
    divisors_of(d).into_iter().filter(|x| d % 2 == 1 || x % 2 == 0).collect()
}

/// `v·w` from raw Gram entries, touching only nonzero coefficients.
pub fn raw_pairing(x: &ManifoldDescriptor, v: &ClassVector, w: &ClassVector) -> i64 {
    let nz = |c: &ClassVector| -> Vec<(usize, i64)> {
        c.coeffs().iter().copied().enumerate().filter(|&(_, a)| a != 0).collect()
    };
    let (a, b) = (nz(v), nz(w));
    let mut s = 0i64;
    for &(i, vi) in &a {
        for &(j, wj) in &b {
            s += vi * wj * x.lattice.entry(i, j);
        }
    }
    s
}

/// Canonical class as a map from basis names to nonzero coefficients.
pub fn named_canonical(x: &ManifoldDescriptor) -> BTreeMap<String, i64> {
    x.lattice
        .names()
        .iter()
        .zip(x.canonical.coeffs())
        .filter(|(_, &c)| c != 0)
        .map(|(n, &c)| (n.clone(), c))
        .collect()
}

/// Adjunction `2g − 2 = K·S + S²` on every surface and witness with a
/// declared genus. Returns the names that fail.
pub fn adjunction_failures(x: &ManifoldDescriptor) -> Vec<String> {
    let mut bad = Vec::new();
    for s in &x.surfaces {
        if let Some(g) = s.genus {
            let lhs = 2 * g as i64 - 2;
            if lhs != raw_pairing(x, &x.canonical, &s.class) + raw_pairing(x, &s.class, &s.class) {
                bad.push(s.name.clone());
            }
        }
    }
    for w in &x.witnesses {
        if let (Some(g), Some(sq)) = (w.genus, w.self_intersection) {
            let k_w: i64 = x.canonical.coeffs().iter().zip(&w.pairings).map(|(a, b)| a * b).sum();
            if 2 * g as i64 - 2 != k_w + sq {
                bad.push(w.name.clone());
            }
        }
    }
    bad
}

/// Noether integrality, `c1² = 2e + 3σ` against `K·K` when the lattice
/// carries all of `K`, and Rochlin for spin manifolds.
pub fn numerical_failures(x: &ManifoldDescriptor) -> Vec<String> {
    let mut bad = Vec::new();
    let c1_sq = 2 * x.e + 3 * x.sigma;
    if x.c1_sq().ok() != Some(c1_sq) {
        bad.push("c1_sq".into());
    }
    if (c1_sq + x.e).rem_euclid(12) != 0 || x.chi_h().ok().map(|c| 12 * c) != Some(c1_sq + x.e) {
        bad.push("noether".into());
    }
    if x.canonical_full && raw_pairing(x, &x.canonical, &x.canonical) != c1_sq {
        bad.push("K.K".into());
    }
    if x.spin && x.simply_connected && x.sigma.rem_euclid(16) != 0 {
        bad.push("rochlin".into());
    }
    bad
}

/// Spin exactly when the certified divisibility is even (for `K ≠ 0`).
/// `None` when the certificate does not apply.
pub fn spin_parity(x: &ManifoldDescriptor) -> Option<bool> {
    let d = divisibility(x).ok()?.value()?;
    if d == 0 || !x.simply_connected || !x.canonical_full {
        return None;
    }
    Some((d % 2 == 0) == x.spin)
}

/// A broad set of constructed descriptors.
pub fn corpus() -> Vec<ManifoldDescriptor> {
    let mut out = Vec::new();
    for n in 1..=6 {
        for d in 1..=8 {
            if let Ok(x) = homotopy_elliptic(n, d) {
                out.push(x);
            }
        }
        for p in 1..=4 {
            for q in 1..=3 {
                if let Ok(x) = elliptic_surface(n, p, q) {
                    out.push(x);
                }
            }
        }
        for r in 1..=3 {
            out.push(negative_c1(n, r).unwrap());
        }
    }
    for d in [2, 4, 6] {
        for m in 1..=3 {
            for t in 1..=2 {
                out.push(spin_surface(d, m, t).unwrap());
            }
        }
    }
    for d in [1, 3, 5] {
        for n in 2..=4 {
            for t in 1..=2 {
                out.push(nonspin_surface(d, n, t).unwrap());
            }
        }
    }
    for g in 1..=3 {
        for h in 1..=3 {
            out.push(surface_bundle_y(g, h).unwrap());
        }
    }
    for (name, args) in catalog_samples() {
        let base = catalog(name, &args).unwrap();
        for (m, d) in [(2, 3), (3, 3), (2, 5), (4, 4)] {
            if let Ok(x) = pluricanonical_cover(&base, m, d) {
                out.push(x);
            }
        }
        out.push(base);
    }
    for (chi, c) in [(3, 1), (4, 2), (5, 12)] {
        if let Ok(x) = persson_cover(2, 3, chi, c) {
            out.push(x);
        }
    }
    for n in 1..=4 {
        for m in 1..=4 {
            out.push(singular_double_cover(n, m).unwrap());
        }
    }
    out
}

pub fn catalog_samples() -> Vec<(&'static str, Vec<i64>)> {
    vec![
        ("barlow", vec![]),
        ("lee_park", vec![]),
        ("enriques_k1_pg1", vec![]),
        ("enriques_k2_pg1", vec![]),
        ("godeaux_like", vec![3, 1]),
        ("horikawa_spin", vec![1]),
        ("horikawa_nonspin", vec![2]),
        ("persson", vec![4, 4]),
        ("quadric", vec![]),
    ]
}

fn leaf(rng: &mut StdRng) -> Recipe {
    match rng.gen_range(0..7) {
        0 | 1 => Recipe::new("elliptic_surface")
            .int("n", rng.gen_range(1..=4))
            .int("p", rng.gen_range(1..=3))
            .int("q", rng.gen_range(1..=3)),
        2 => {
            let (name, args) = catalog_samples().swap_remove(rng.gen_range(0..9));
            Recipe::new("catalog").name("name", name).ints("args", &args)
        }
        3 => Recipe::new("surface_bundle_y").int("g", rng.gen_range(1..=3)).int("h", rng.gen_range(1..=3)),
        4 => Recipe::new("homotopy_elliptic").int("n", rng.gen_range(1..=5)).int("d", rng.gen_range(1..=6)),
        5 => Recipe::new("singular_double_cover").int("n", rng.gen_range(1..=5)).int("m", rng.gen_range(1..=5)),
        _ => Recipe::new("negative_c1").int("n", rng.gen_range(1..=3)).int("r", rng.gen_range(1..=2)),
    }
}

fn grow(rng: &mut StdRng, base: Recipe) -> Recipe {
    match rng.gen_range(0..6) {
        0 => Recipe::new("knot_surgery")
            .name("surface", "f")
            .int("h", rng.gen_range(0..=4))
            .name("sign", if rng.gen_bool(0.5) { "+" } else { "-" })
            .input(base),
        1 => Recipe::new("blow_up").input(base),
        2 => Recipe::new("log_transform").int("p", rng.gen_range(2..=4)).input(base),
        3 => Recipe::new("negate_structure").input(base),
        4 => Recipe::new("pluricanonical_cover")
            .int("m", rng.gen_range(2..=3))
            .int("d", [3, 5, 7][rng.gen_range(0..3)])
            .input(base),
        _ => Recipe::new("fibre_sum")
            .name("surface_m", "f")
            .name("surface_n", "f")
            .flag("no_rim_tori", false)
            .name("prefix", "n.")
            .input(base)
            .input(Recipe::new("elliptic_surface").int("n", rng.gen_range(1..=3)).int("p", 1).int("q", 1)),
    }
}

/// A random recipe that executes successfully, with its descriptor.
pub fn random_recipe(rng: &mut StdRng) -> (Recipe, ManifoldDescriptor) {
    loop {
        let mut r = leaf(rng);
        for _ in 0..rng.gen_range(0..=3) {
            r = grow(rng, r);
        }
        if let Ok(x) = execute(&r) {
            return (r, x);
        }
    }
}
