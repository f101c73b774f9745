//! Paths, media, seminorm estimates and deterministic generators.

pub mod descriptor;
pub mod field;
pub mod func;
pub mod holder;
pub mod io;
pub mod path;
pub mod regularity;
pub mod weierstrass;

pub use descriptor::{parse_field, parse_function, parse_path};
pub use field::{
    check_field_covers, make_product_field, ClosureField, Field, GridField, GridFieldFile, ProductField, ProductTerm,
    SharedField, SumField,
};
pub use func::{ClosureFn, uniform_node, uniform_samples, Composed, Elementary, Func1, ProductFn, Scaled, SharedFn};
pub use holder::{
    holder_seminorm_field, holder_seminorm_fn, holder_seminorm_path, holder_seminorm_samples, sup_norm, FieldHolderReport,
    FieldProbe, HolderReport,
};
pub use path::{Interpolation, SampledPath};
pub use regularity::Regularity;
pub use weierstrass::Weierstrass;

/// `weierstrass:H=..,scales=..` generator with base 2.
pub fn make_weierstrass(h: f64, scales: usize, base: f64, phases: &[f64]) -> crate::Result<Weierstrass> {
    Weierstrass::new(h, scales, base, phases)
}
