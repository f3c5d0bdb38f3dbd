//! Free Lie algebras in the Lyndon basis, truncated at a fixed degree.

mod algebra;
mod assoc;
mod expr;
mod words;

pub use algebra::{default_alphabet, FreeLieAlgebra, FreeLieElement};
pub(crate) use assoc::render_terms as render_named;
pub use assoc::AssocPoly;
pub use expr::{evaluate_expression, BracketAlgebra, BracketExpr, Substitution};
pub use words::{
    is_lyndon, lyndon_words, standard_bracketing, standard_factorization, witt_dimension, Alphabet, BracketTree, Word,
};

use crate::error::Result;
use crate::scalar::Scalar;

impl<S: Scalar> BracketAlgebra for FreeLieAlgebra<S> {
    type Scalar = S;
    type Element = FreeLieElement<S>;

    fn scalar_field(&self) -> &S::Field {
        self.field()
    }

    fn named_generator(&self, name: &str) -> Result<FreeLieElement<S>> {
        self.generator_named(name)
    }

    fn zero_element(&self) -> FreeLieElement<S> {
        self.zero()
    }

    fn add_elements(&self, a: &FreeLieElement<S>, b: &FreeLieElement<S>) -> FreeLieElement<S> {
        a.add(b)
    }

    fn scale_element(&self, a: &FreeLieElement<S>, c: &S) -> FreeLieElement<S> {
        a.scale(c)
    }

    fn bracket_elements(&self, a: &FreeLieElement<S>, b: &FreeLieElement<S>) -> Result<FreeLieElement<S>> {
        self.bracket(a, b)
    }
}
