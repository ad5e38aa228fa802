//! Finite wavelet systems `{phi(lambda_k x - beta_k)}`: Gram matrices,
//! numeric dependence verdicts and the hypothesis-matching certificate engine.

mod certify;
mod generator;
mod gram;
mod system;
mod verdict;

pub use certify::{all_checklists, certify, checklist, Certificate, ChecklistItem, RuleId};
pub use generator::{
    close_tags, poly_eval, real_root_count, CatalogId, Domain, GeneratorKind, GeneratorSpec, Tag,
    TagSet, DEFAULT_ITERATIONS, DEFAULT_RESOLUTION,
};
pub use gram::{
    gaussian_gram_closed_form, gaussian_inner_closed_form, gram, hat_gram_closed_form,
    hat_inner_closed_form, inner_product, normalize_phase, GramReport, InnerProduct,
    NULL_VECTOR_GAP,
};
pub use system::{WaveletPoint, WaveletSystem};
pub use verdict::{
    analyze, numeric_verdict, Outcome, Verdict, DEPENDENCE_THRESHOLD, INDEPENDENCE_FACTOR,
};
