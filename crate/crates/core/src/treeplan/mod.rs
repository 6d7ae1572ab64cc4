//! The regular rooted tree, its interval map, safe-subtree predicates,
//! selector extraction, and the growth audit.

mod growth;
mod oracle;
mod safeset;
mod vertex;

pub use growth::{growth_audit, GrowthAudit};
pub use oracle::{
    count_regular_subtrees, enumerate_regular_subtrees, every_subtree_meets, for_each_leafset,
    for_each_regular_subtree, OracleError,
    RegularChoice,
};
pub use safeset::{
    extract_selector, hit, in_safe, DangerTree, HitOutcome, MaskTree, SafeSet, SafeSetError,
    SubtreeSelector,
};
pub use vertex::{FrameError, TreeFrame, Vertex};
