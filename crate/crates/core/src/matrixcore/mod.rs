//! Dense matrices, seeded Gaussian sampling, support-set combinatorics and
//! the Gram log-determinant machinery shared by every bound.

mod dense;
mod factor;
mod stream;
mod support;

pub(crate) use dense::gaussian_matrix_with;
pub use dense::{sample_gaussian_matrix, submatrix_columns, Matrix, MAX_MATRIX_ENTRIES};
pub(crate) use factor::dot;
pub use factor::{gram_logdet, is_fli_sufficient, max_column_norm_sq, ColumnSpan, SINGULAR_RELATIVE_THRESHOLD};
pub use stream::{SeededStream, StreamRng};
pub(crate) use support::check_enumerable;
pub use support::{
    binomial, enumerate_supports, random_support, support_rank, support_unrank, Support, SupportIter, SupportSearch,
    ENUMERATION_LIMIT,
};
