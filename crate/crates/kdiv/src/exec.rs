//! Recipe interpreter. Every node is re-run through the library function
//! that produced it, so executing a descriptor's recipe gives back the
//! same descriptor.

use crate::coverings::{branched_cover, persson_cover, pluricanonical_cover, singular_double_cover};
use crate::error::{Error, Result};
use crate::geography::{homotopy_elliptic, inequivalent_family, negative_c1, nonspin_surface, spin_surface, Regime};
use crate::lattice::ClassVector;
use crate::manifold::{catalog, elliptic_surface, knot_product, surface_bundle_y, ManifoldDescriptor, Sign};
use crate::recipe::Recipe;
use crate::surgery::{
    blow_down, blow_up, fibre_sum, generalized_knot_surgery, knot_surgery, lagrangian_triple_surgery,
    log_transform, negate_descriptor, smooth_union,
};

/// Primitive operations, in the order they are documented.
pub const PRIMITIVE_OPS: &[&str] = &[
    "elliptic_surface",
    "knot_product",
    "surface_bundle_y",
    "catalog",
    "fibre_sum",
    "knot_surgery",
    "generalized_knot_surgery",
    "smooth_union",
    "log_transform",
    "blow_up",
    "blow_down",
    "lagrangian_triple_surgery",
    "negate_structure",
    "branched_cover",
    "pluricanonical_cover",
    "singular_double_cover",
];

/// Constructors that wrap a whole derivation. Their single optional input
/// is the derivation, which must match what the constructor builds.
pub const CONSTRUCTORS: &[&str] = &[
    "homotopy_elliptic",
    "spin_surface",
    "nonspin_surface",
    "negative_c1",
    "inequivalent_family",
    "persson_cover",
];

pub fn is_registered(op: &str) -> bool {
    PRIMITIVE_OPS.contains(&op) || CONSTRUCTORS.contains(&op)
}

fn sign_param(r: &Recipe) -> Result<Sign> {
    Sign::parse(r.get_name("sign")?)
}

fn u32_param(r: &Recipe, key: &str) -> Result<u32> {
    u32::try_from(r.get_int(key)?).map_err(|_| Error::Recipe(format!("{}: `{key}` out of range", r.op)))
}

fn one_input(r: &Recipe) -> Result<ManifoldDescriptor> {
    execute(&r.inputs[0])
}

/// Runs a wrapper constructor and checks a supplied derivation against it.
fn constructor(r: &Recipe, allowed: &[&str], build: impl FnOnce() -> Result<ManifoldDescriptor>) -> Result<ManifoldDescriptor> {
    for k in r.params.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::Recipe(format!("{}: unknown parameter `{k}`", r.op)));
        }
    }
    if r.inputs.len() > 1 {
        return Err(Error::Recipe(format!("{}: at most one derivation input", r.op)));
    }
    let x = build()?;
    if let Some(given) = r.inputs.first() {
        if Some(given) != x.recipe.inputs.first() {
            return Err(Error::Recipe(format!("{}: derivation does not match the constructor", r.op)));
        }
    }
    Ok(x)
}

/// Executes a recipe tree bottom-up.
pub fn execute(r: &Recipe) -> Result<ManifoldDescriptor> {
    match r.op.as_str() {
        "elliptic_surface" => {
            r.expect_shape(&["n", "p", "q"], 0)?;
            elliptic_surface(r.get_int("n")?, r.get_int("p")?, r.get_int("q")?)
        }
        "knot_product" => {
            r.expect_shape(&["h"], 0)?;
            knot_product(r.get_int("h")?)
        }
        "surface_bundle_y" => {
            r.expect_shape(&["g", "h"], 0)?;
            surface_bundle_y(r.get_int("g")?, r.get_int("h")?)
        }
        "catalog" => {
            r.expect_shape(&["name", "args"], 0)?;
            catalog(r.get_name("name")?, r.get_ints("args")?)
        }
        "fibre_sum" => {
            r.expect_shape(&["surface_m", "surface_n", "no_rim_tori", "prefix"], 2)?;
            let m = execute(&r.inputs[0])?;
            let n = execute(&r.inputs[1])?;
            fibre_sum(&m, r.get_name("surface_m")?, &n, r.get_name("surface_n")?, r.get_bool("no_rim_tori")?, r.get_name("prefix")?)
        }
        "knot_surgery" => {
            r.expect_shape(&["surface", "h", "sign"], 1)?;
            knot_surgery(&one_input(r)?, r.get_name("surface")?, r.get_int("h")?, sign_param(r)?)
        }
        "generalized_knot_surgery" => {
            r.expect_shape(&["surface", "h"], 1)?;
            generalized_knot_surgery(&one_input(r)?, r.get_name("surface")?, r.get_int("h")?)
        }
        "smooth_union" => {
            r.expect_shape(&["a", "b", "name", "complement_simply_connected"], 1)?;
            smooth_union(
                &one_input(r)?,
                r.get_name("a")?,
                r.get_name("b")?,
                r.get_name("name")?,
                r.get_bool("complement_simply_connected")?,
            )
        }
        "log_transform" => {
            r.expect_shape(&["p"], 1)?;
            log_transform(&one_input(r)?, r.get_int("p")?)
        }
        "blow_up" => {
            r.expect_shape(&[], 1)?;
            blow_up(&one_input(r)?)
        }
        "blow_down" => {
            r.expect_shape(&["surface"], 1)?;
            blow_down(&one_input(r)?, r.get_name("surface")?)
        }
        "lagrangian_triple_surgery" => {
            r.expect_shape(&["triple", "a", "em", "h1", "h2", "sign"], 1)?;
            lagrangian_triple_surgery(
                &one_input(r)?,
                u32_param(r, "triple")?,
                r.get_int("a")?,
                r.get_int("em")?,
                r.get_int("h1")?,
                r.get_int("h2")?,
                sign_param(r)?,
            )
        }
        "negate_structure" => {
            r.expect_shape(&[], 1)?;
            negate_descriptor(&one_input(r)?)
        }
        "branched_cover" => {
            r.expect_shape(&["deg", "d_square", "k_dot_d", "branch"], 1)?;
            let branch = match r.params.get("branch") {
                Some(_) => Some(ClassVector::new(r.get_ints("branch")?.to_vec())),
                None => None,
            };
            branched_cover(&one_input(r)?, r.get_int("d_square")?, r.get_int("k_dot_d")?, r.get_int("deg")?, branch.as_ref())
        }
        "pluricanonical_cover" => {
            r.expect_shape(&["m", "d"], 1)?;
            pluricanonical_cover(&one_input(r)?, r.get_int("m")?, r.get_int("d")?)
        }
        "singular_double_cover" => {
            r.expect_shape(&["n", "m"], 0)?;
            singular_double_cover(r.get_int("n")?, r.get_int("m")?)
        }
        "homotopy_elliptic" => {
            constructor(r, &["n", "d"], || homotopy_elliptic(r.get_int("n")?, r.get_int("d")?))
        }
        "spin_surface" => constructor(r, &["d", "m", "t"], || {
            spin_surface(r.get_int("d")?, r.get_int("m")?, r.get_int("t")?)
        }),
        "nonspin_surface" => constructor(r, &["d", "n", "t"], || {
            nonspin_surface(r.get_int("d")?, r.get_int("n")?, r.get_int("t")?)
        }),
        "negative_c1" => constructor(r, &["n", "r"], || negative_c1(r.get_int("n")?, r.get_int("r")?)),
        "inequivalent_family" => constructor(r, &["d", "divisors", "regime", "n", "m", "t", "pattern"], || {
            let name = r.get_name("regime")?;
            let count = if name == "c1sq_zero" { r.get_int("n")? } else { r.get_int("m")? };
            let t = if r.params.contains_key("t") { Some(r.get_int("t")?) } else { None };
            let regime = Regime::from_parts(name, count, t)?;
            inequivalent_family(r.get_int("d")?, r.get_ints("divisors")?, regime, u32_param(r, "pattern")?)
        }),
        "persson_cover" => constructor(r, &["m", "d", "chi", "c1_sq"], || {
            persson_cover(r.get_int("m")?, r.get_int("d")?, r.get_int("chi")?, r.get_int("c1_sq")?)
        }),
        other => Err(Error::UnknownOperation(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recipe::{parse_recipe, serialize_recipe};

    #[test]
    fn every_registered_op_is_dispatched() {
        for op in PRIMITIVE_OPS.iter().chain(CONSTRUCTORS) {
            let err = execute(&Recipe::new(op)).err();
            assert!(!matches!(err, Some(Error::UnknownOperation(_))), "{op}");
        }
    }

    #[test]
    fn wrapper_round_trip() {
        let x = homotopy_elliptic(3, 3).unwrap();
        let text = serialize_recipe(&x.recipe);
        assert_eq!(execute(&parse_recipe(&text).unwrap()).unwrap(), x);
    }

    #[test]
    fn tampered_derivation_is_rejected() {
        let mut r = homotopy_elliptic(4, 2).unwrap().recipe;
        r.inputs[0].params.insert("h".into(), crate::recipe::Param::Int(5));
        assert!(matches!(execute(&r), Err(Error::Recipe(_))));
    }

    #[test]
    fn bare_wrapper_is_accepted() {
        let r = Recipe::new("negative_c1").int("n", 2).int("r", 1);
        assert_eq!(execute(&r).unwrap(), negative_c1(2, 1).unwrap());
    }
}
