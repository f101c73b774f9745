use crate::grid_fields::{Field, Func1};

/// The two-point germ `μ(s, t) = W(t, φ_s) - W(s, φ_s)`.
#[derive(Clone, Copy)]
pub struct Germ<'a> {
    pub field: &'a dyn Field,
    pub path: &'a dyn Func1,
}

impl<'a> Germ<'a> {
    pub fn new(field: &'a dyn Field, path: &'a dyn Func1) -> Self {
        Germ { field, path }
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        if s == t {
            return 0.0;
        }
        self.field.increment_t(s, t, self.path.value(s))
    }

    /// `μ(a, b) - μ(a, c) - μ(c, b)`, a rectangular increment of `W`.
    pub fn defect(&self, a: f64, c: f64, b: f64) -> f64 {
        let (pa, pc) = (self.path.value(a), self.path.value(c));
        self.field.increment_rect(b, c, pa, pc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_fields::{make_product_field, Elementary};

    #[test]
    fn defect_is_a_rectangular_increment() {
        let w = make_product_field(Elementary::Sin.shared(), Elementary::Cos.shared());
        let phi = Elementary::Poly(vec![0.0, 0.0, 1.0]);
        let g = Germ::new(&w, &phi);
        assert_eq!(g.eval(0.3, 0.3), 0.0);
        let (a, c, b) = (0.1, 0.35, 0.8);
        let direct = g.eval(a, b) - g.eval(a, c) - g.eval(c, b);
        assert!((direct - g.defect(a, c, b)).abs() < 1e-15);
    }
}
