//! Exact arithmetic for characteristic-`p` fields with a finite p-basis,
//! their differential forms, the `H_p` cohomology groups in top degree,
//! traces along finite extensions, and Weierstrass division over
//! truncated power series.

pub mod error;
pub mod forms;
pub mod gf;
pub mod hp;
pub mod mpoly;
pub mod random;
pub mod series;
pub mod suites;
pub mod tower;
pub mod trace;
pub mod weierstrass;

pub use error::{Error, Result};
pub use forms::{DifferentialForm, QuotientFormTop};
pub use gf::{Fq, GaloisField};
pub use hp::{hp1_class, hp_class, wedge_dlog_t, wp_map, Decision, HpDegree, HpRepresentative, Reduction, ReductionRule, ReductionStep};
pub use mpoly::{MPoly, RatFn};
pub use tower::{field_trace_finite, BaseDescriptor, BaseField, FieldElement, FieldTower, PComponentDecomposition};
pub use trace::{EtaleElement, EtaleExtension, EtaleForm, ExtensionDescriptor, RadicialExtension, UpperForm};
pub use series::{SeriesRing, TruncatedSeries};
pub use weierstrass::{
    artin_schreier_solve, hensel_lift, regularity_order, regularize, unit_group_congruence_check, weierstrass_divide,
    weierstrass_divide_with, weierstrass_prepare, CongruenceReport, CongruenceSample, DivisionSchedule,
    PreparedFactorization, Regularization,
};
