//! Exact bookkeeping for cut-and-paste constructions of simply-connected
//! 4-manifolds: Euler characteristic, signature, a tracked piece of the
//! intersection lattice, the canonical class, and a certificate for the
//! divisibility of that class.
//!
//! ```
//! use kdiv::{divisibility, homotopy_elliptic};
//!
//! let x = homotopy_elliptic(3, 3).unwrap();
//! assert_eq!(x.chi_h().unwrap(), 3);
//! assert_eq!(divisibility(&x).unwrap().value(), Some(3));
//! ```

pub mod arith;
pub mod coverings;
pub mod error;
pub mod exec;
pub mod geography;
pub mod lattice;
pub mod manifold;
pub mod recipe;
pub mod surgery;

pub use coverings::{
    branched_cover, cover_table, persson_cover, persson_image_sector, persson_sector, phi_admissible_image,
    phi_inverse, phi_map, pluri_system_defines_map, pluricanonical_cover, singular_double_cover, CoverParams,
    TableRow,
};
pub use error::{Error, Result};
pub use exec::execute;
pub use geography::{
    divisibility, family, homotopy_elliptic, inequivalent_family, negative_c1, nonspin_surface, realizable,
    spin_surface, validate, DivisibilityCertificate, Family, Realizability, Regime, ValidationReport,
};
pub use lattice::{coefficient_gcd, q_set, ClassVector, IntersectionLattice};
pub use manifold::{
    catalog, derived_invariants, elliptic_surface, knot_product, quadric, surface_bundle_y, ManifoldDescriptor,
    Minimality, Sign, Surface, Witness,
};
pub use recipe::{parse_recipe, serialize_recipe, Recipe};
pub use surgery::{
    blow_down, blow_up, fibre_sum, generalized_knot_surgery, knot_surgery, lagrangian_triple_surgery,
    log_transform, negate_descriptor, negate_structure, smooth_union,
};
