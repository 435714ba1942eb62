//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the summary always
//! prints.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use kdiv::{
    branched_cover, catalog, cover_table, divisibility, elliptic_surface, execute, family, fibre_sum,
    homotopy_elliptic, knot_product, nonspin_surface, parse_recipe, persson_image_sector, persson_sector,
    phi_admissible_image, phi_inverse, phi_map, q_set, quadric, serialize_recipe, singular_double_cover,
    spin_surface, surface_bundle_y, validate, ClassVector, CoverParams, Error, Regime,
};
use num_rational::Ratio;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const BARLOW: [[i64; 9]; 9] = [
    [3, 2, 4, 10, 42, 18, 5, 9, -22],
    [3, 3, 3, 8, 57, 27, 7, 13, -29],
    [4, 2, 6, 21, 64, 32, 8, 15, -32],
    [4, 4, 4, 15, 104, 64, 14, 27, -48],
    [5, 2, 8, 36, 94, 50, 12, 23, -46],
    [5, 3, 6, 28, 117, 75, 16, 31, -53],
    [5, 5, 5, 24, 175, 125, 25, 49, -75],
    [6, 2, 10, 55, 132, 72, 17, 33, -64],
    [6, 6, 6, 35, 276, 216, 41, 81, -112],
];

const LEE_PARK: [[i64; 9]; 9] = [
    [3, 2, 4, 10, 60, 36, 8, 15, -28],
    [3, 3, 3, 8, 78, 54, 11, 21, -34],
    [4, 2, 6, 21, 104, 64, 14, 27, -48],
    [4, 4, 4, 15, 160, 128, 24, 47, -64],
    [5, 2, 8, 36, 164, 100, 22, 43, -76],
    [5, 3, 6, 28, 198, 150, 29, 57, -82],
    [5, 5, 5, 24, 290, 250, 45, 89, -110],
    [6, 2, 10, 55, 240, 144, 32, 63, -112],
    [6, 6, 6, 35, 480, 432, 76, 151, -176],
];

fn tables() -> Outcome {
    for (name, golden) in [("barlow", &BARLOW), ("lee_park", &LEE_PARK)] {
        let rows = cover_table(&catalog(name, &[]).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(rows.len() == 9, || format!("{name}: {} rows", rows.len()))?;
        for (r, g) in rows.iter().zip(golden.iter()) {
            let got = [r.d, r.m, r.ma, r.delta, r.e, r.c1_sq, r.chi_h, r.b2_plus, r.sigma];
            ensure(got == *g, || format!("{name}: row {got:?} != {g:?}"))?;
        }
    }
    Ok("18 rows exact".into())
}

fn homotopy_elliptic_grid() -> Outcome {
    let mut count = 0;
    for n in 1..=40 {
        for d in 1..=40 {
            let built = homotopy_elliptic(n, d);
            if n % 2 == 1 && d % 2 == 0 {
                ensure(matches!(built, Err(Error::SpinParityObstruction { .. })), || {
                    format!("({n},{d}) not rejected")
                })?;
                continue;
            }
            let x = built.map_err(|e| format!("({n},{d}): {e}"))?;
            let inv = x.derived().map_err(|e| e.to_string())?;
            ensure(inv.chi_h == n && inv.c1_sq == 0 && x.sigma == -8 * n, || format!("({n},{d}): {inv:?}"))?;
            let cert = divisibility(&x).map_err(|e| e.to_string())?;
            ensure(cert.value() == Some(d as u64), || format!("({n},{d}): {cert:?}"))?;
            let report = validate(&x);
            ensure(report.all_passed(), || format!("({n},{d}): {:?}", report.failures().collect::<Vec<_>>()))?;
            count += 1;
        }
    }
    Ok(format!("{count} points certified, odd n with even d rejected"))
}

fn positive_grid() -> Outcome {
    let mut count = 0;
    let check = |label: String, x: kdiv::ManifoldDescriptor, c1: i64, e: i64, sigma: i64, d: i64| {
        let inv = x.derived().map_err(|err| err.to_string())?;
        ensure((inv.c1_sq, x.e, x.sigma) == (c1, e, sigma), || {
            format!("{label}: (c1^2, e, sigma) = ({}, {}, {})", inv.c1_sq, x.e, x.sigma)
        })?;
        let report = validate(&x);
        for name in ["rochlin", "square_divisibility", "canonical_square"] {
            let c = report.get(name).ok_or_else(|| format!("{label}: no {name} check"))?;
            // Rochlin only speaks about spin manifolds.
            let applies = name == "rochlin" || !c.detail.starts_with("not applicable");
            ensure(c.passed && applies, || format!("{label}: {name}: {}", c.detail))?;
        }
        ensure(report.all_passed(), || format!("{label}: {:?}", report.failures().collect::<Vec<_>>()))?;
        let cert = divisibility(&x).map_err(|err| err.to_string())?;
        ensure(cert.value() == Some(d as u64), || format!("{label}: {cert:?}"))
    };
    for d in (2..=12).step_by(2) {
        for m in 1..=6 {
            for t in 1..=6 {
                let x = spin_surface(d, m, t).map_err(|e| format!("spin({d},{m},{t}): {e}"))?;
                check(format!("spin({d},{m},{t})"), x, 2 * t * d * d, t * d * d + 24 * m, -16 * m, d)?;
                count += 1;
            }
        }
    }
    for d in (1..=11).step_by(2) {
        for n in 2..=6 {
            for t in 1..=6 {
                let x = nonspin_surface(d, n, t).map_err(|e| format!("nonspin({d},{n},{t}): {e}"))?;
                check(format!("nonspin({d},{n},{t})"), x, 8 * t * d * d, 4 * t * d * d + 12 * n, -8 * n, d)?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} spin/non-spin surfaces match and certify d"))
}

fn random_family_input(rng: &mut StdRng) -> (i64, Vec<i64>, Regime) {
    loop {
        let d: u64 = rng.gen_range(1..=36);
        let pool = common::admissible_divisors(d);
        let big_n = rng.gen_range(1..=4usize);
        let mut list = vec![d];
        for _ in 0..big_n {
            list.push(*pool.choose(rng).unwrap());
        }
        let big_n = big_n as i64;
        let regime = match rng.gen_range(0..3) {
            0 => {
                let n = if d % 2 == 1 { 2 * big_n + 1 } else { 3 * big_n + 1 + (3 * big_n + 1) % 2 };
                Regime::C1sqZero { n: n + 2 * rng.gen_range(0..=1) }
            }
            1 if d.is_multiple_of(2) && d <= 12 => Regime::SpinPositive { m: (3 * big_n + 3) / 2, t: 1 },
            2 if d % 2 == 1 && (3..=11).contains(&d) => Regime::NonspinPositive { m: 2 * big_n + 2, t: 1 },
            _ => continue,
        };
        return (d as i64, list.into_iter().map(|x| x as i64).collect(), regime);
    }
}

fn q_sets_and_families() -> Outcome {
    let mut lists = 0usize;
    for d in 1..=96u64 {
        let pool = common::admissible_divisors(d);
        let others: Vec<u64> = pool.iter().copied().filter(|&x| x != d).collect();
        // every set of distinct extra divisors with N <= 10
        for mask in 0u32..(1 << others.len()) {
            if mask.count_ones() > 10 {
                continue;
            }
            let mut list = vec![d];
            list.extend((0..others.len()).filter(|i| mask >> i & 1 == 1).map(|i| others[i]));
            let q = q_set(d, &list).map_err(|e| format!("{list:?}: {e}"))?;
            ensure(q == common::brute_q_set(d, &list), || format!("q_set({d}, {list:?}) = {q:?}"))?;
            lists += 1;
        }
    }
    let mut rng = StdRng::seed_from_u64(4);
    for _ in 0..2000 {
        let d: u64 = rng.gen_range(1..=720);
        let pool = common::admissible_divisors(d);
        let mut list = vec![d];
        for _ in 0..rng.gen_range(0..=10) {
            list.push(*pool.choose(&mut rng).unwrap());
        }
        let q = q_set(d, &list).map_err(|e| e.to_string())?;
        ensure(q == common::brute_q_set(d, &list), || format!("q_set({d}, {list:?}) = {q:?}"))?;
        lists += 1;
    }

    let known = family(45, &[45, 15, 9, 5], Regime::C1sqZero { n: 7 }).map_err(|e| e.to_string())?;
    let expected: BTreeSet<u64> = [45, 15, 9, 5, 3, 1].into();
    ensure(known.w.chi_h() == Ok(7), || format!("chi_h = {:?}", known.w.chi_h()))?;
    ensure(known.divisibilities() == Some(expected.clone()), || format!("{:?}", known.divisibilities()))?;
    ensure(known.q == expected, || format!("{:?}", known.q))?;

    let mut rng = StdRng::seed_from_u64(45);
    for i in 0..49 {
        let (d, list, regime) = random_family_input(&mut rng);
        let f = family(d, &list, regime).map_err(|e| format!("family {i} ({d}, {list:?}, {regime:?}): {e}"))?;
        let oracle = common::brute_q_set(d as u64, &list.iter().map(|&x| x as u64).collect::<Vec<_>>());
        ensure(f.divisibilities() == Some(oracle.clone()), || {
            format!("({d}, {list:?}, {regime:?}): {:?} vs {oracle:?}", f.divisibilities())
        })?;
    }
    Ok(format!("{lists} divisor lists, 50 families"))
}

fn table_params() -> Vec<CoverParams> {
    let mut out = Vec::new();
    for d in 2..=12 {
        for m in 2..=d {
            if let Ok(p) = CoverParams::new(m, d) {
                out.push(p);
            }
        }
    }
    out
}

fn phi_transport() -> Outcome {
    let p = |m, d| CoverParams::new(m, d).map_err(|e| e.to_string());
    ensure(phi_map(&p(2, 3)?, 11, 1) == Ok((42, 18)), || "Barlow".into())?;
    ensure(phi_map(&p(2, 4)?, 10, 2) == Ok((104, 64)), || "Lee-Park".into())?;

    let params = table_params();
    let mut rng = StdRng::seed_from_u64(1000);
    for _ in 0..1000 {
        let q = params[rng.gen_range(0..params.len())];
        let (eb, cb) = (rng.gen_range(-100_000..100_000i64), rng.gen_range(-100_000..100_000i64));
        let (e, c) = phi_inverse(&q, eb, cb).map_err(|e| e.to_string())?;
        let m = Ratio::from_integer(q.m);
        let back = (m * (e + Ratio::from_integer(q.delta) * c), m * Ratio::from_integer(q.d * q.d) * c);
        ensure(back == (Ratio::from_integer(eb), Ratio::from_integer(cb)), || format!("{q:?} at ({eb}, {cb})"))?;
    }

    let mut points = 0usize;
    for q in table_params().into_iter().filter(|q| q.d <= 6) {
        let md2 = q.m * q.d * q.d;
        // Transport of the sector.
        let mut image = BTreeSet::new();
        for e in 0..=2000 {
            for c in -50..=2000 {
                if persson_sector(e, c) {
                    image.insert(phi_map(&q, e, c).map_err(|e| e.to_string())?);
                }
            }
        }
        // Characterizations over every reduced point whose preimage has 0 <= e <= 2000.
        let mut characterized = BTreeSet::new();
        for y in 1..=2000 {
            for x in q.delta * y..=q.delta * y + 2000 {
                if persson_image_sector(&q, x, y) {
                    characterized.insert((q.m * x, md2 * y));
                }
            }
        }
        ensure(image == characterized, || {
            format!("{q:?}: {} transported vs {} characterized", image.len(), characterized.len())
        })?;
        // Admissibility: integral preimage with integral chi_h.
        for eb in 0..=600 {
            for cb in -600..=600 {
                let num = q.d * q.d * eb - q.delta * cb;
                let brute = num % md2 == 0 && cb % md2 == 0 && (num / md2 + cb / md2).rem_euclid(12) == 0;
                ensure(phi_admissible_image(&q, eb, cb) == Ok(brute), || format!("{q:?} at ({eb}, {cb})"))?;
            }
        }
        points += image.len();
    }
    Ok(format!("1000 inverse round trips, {points} sector images"))
}

fn cross_constructions() -> Outcome {
    for g in 1..=6 {
        for h in 1..=6 {
            let piece = knot_product(h).map_err(|e| e.to_string())?;
            let mut x = piece.clone();
            for _ in 1..g {
                x = fibre_sum(&x, "B_K", &piece, "B_K", false, "n.").map_err(|e| format!("Y({g},{h}): {e}"))?;
            }
            let y = surface_bundle_y(g, h).map_err(|e| e.to_string())?;
            let k2 = |m: &kdiv::ManifoldDescriptor| common::raw_pairing(m, &m.canonical, &m.canonical);
            ensure((x.e, x.sigma, k2(&x)) == (y.e, y.sigma, k2(&y)), || {
                format!("Y({g},{h}): (e, sigma, K^2) = ({}, {}, {}) vs ({}, {}, {})", x.e, x.sigma, k2(&x), y.e, y.sigma, k2(&y))
            })?;
            let gx = kdiv::coefficient_gcd(&x.canonical);
            let gy = kdiv::coefficient_gcd(&y.canonical);
            ensure(gx == gy, || format!("Y({g},{h}): gcd(K) {gx} vs {gy}"))?;
        }
    }
    let q = quadric().map_err(|e| e.to_string())?;
    for n in 1..=12 {
        for m in 1..=12 {
            let b = ClassVector::new(vec![n, m]);
            let x = branched_cover(&q, 8 * n * m, -4 * (n + m), 2, Some(&b)).map_err(|e| e.to_string())?;
            let y = singular_double_cover(n, m).map_err(|e| e.to_string())?;
            ensure(
                (x.e, x.sigma, x.spin, &x.canonical, x.lattice.gram()) == (y.e, y.sigma, y.spin, &y.canonical, y.lattice.gram()),
                || format!("quadric cover ({n},{m})"),
            )?;
            let (cx, cy) = (divisibility(&x).map_err(|e| e.to_string())?, divisibility(&y).map_err(|e| e.to_string())?);
            // The smooth cover only knows pullback classes, so it may certify less.
            let agree = cx.lower == cy.lower && (!cx.certified || cx.value() == cy.value());
            ensure(agree, || format!("quadric cover ({n},{m}): {cx:?} vs {cy:?}"))?;
        }
    }
    let e1 = elliptic_surface(1, 1, 1).map_err(|e| e.to_string())?;
    for n in 2..=12 {
        let prev = elliptic_surface(n - 1, 1, 1).map_err(|e| e.to_string())?;
        let x = fibre_sum(&prev, "f", &e1, "f", false, "n.").map_err(|e| e.to_string())?;
        let y = elliptic_surface(n, 1, 1).map_err(|e| e.to_string())?;
        ensure((x.e, x.sigma, x.spin) == (y.e, y.sigma, y.spin), || format!("E({n}) invariants"))?;
        let (kx, ky) = (common::named_canonical(&x), common::named_canonical(&y));
        ensure(kx == ky, || format!("E({n}): K = {kx:?} vs {ky:?}"))?;
        let (cx, cy) = (divisibility(&x).map_err(|e| e.to_string())?, divisibility(&y).map_err(|e| e.to_string())?);
        ensure(cx.value() == cy.value(), || format!("E({n}): {cx:?} vs {cy:?}"))?;
    }
    Ok("36 bundles, 144 quadric covers, 11 elliptic sums".into())
}

fn property_suites() -> Outcome {
    let mut descriptors = common::corpus();
    let mut rng = StdRng::seed_from_u64(200);
    let mut recipes = 0;
    for _ in 0..200 {
        let (_, x) = common::random_recipe(&mut rng);
        let text = serialize_recipe(&x.recipe);
        let parsed = parse_recipe(&text).map_err(|e| format!("{e}: {text}"))?;
        ensure(serialize_recipe(&parsed) == text, || format!("serialization not stable: {text}"))?;
        let again = execute(&parsed).map_err(|e| format!("{e}: {text}"))?;
        ensure(again == x, || format!("re-execution differs: {text}"))?;
        recipes += 1;
        descriptors.push(x);
    }
    let mut parity_checked = 0;
    for x in &descriptors {
        let bad = common::adjunction_failures(x);
        ensure(bad.is_empty(), || format!("adjunction fails for {bad:?} in {}", serialize_recipe(&x.recipe)))?;
        let bad = common::numerical_failures(x);
        ensure(bad.is_empty(), || format!("{bad:?} in {}", serialize_recipe(&x.recipe)))?;
        if let Some(ok) = common::spin_parity(x) {
            ensure(ok, || format!("spin/parity mismatch in {}", serialize_recipe(&x.recipe)))?;
            parity_checked += 1;
        }
    }
    Ok(format!("{} descriptors, {parity_checked} parity checks, {recipes} recipe round trips", descriptors.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 table reproduction", tables),
        ("2 homotopy elliptic geography", homotopy_elliptic_grid),
        ("3 positive c1^2 constructions", positive_grid),
        ("4 q-set and families", q_sets_and_families),
        ("5 phi transport", phi_transport),
        ("6 cross-construction oracles", cross_constructions),
        ("7 property suites", property_suites),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.2}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.2}s): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
