use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::registry::{ParamKind, Registry};

/// Every function block in the catalog starts with this prefix.
pub const CATALOG_FUNCTION_PREFIX: &str = "function ";

/// Human-readable description of every registry function, in registry
/// order. The output is a pure function of the registry.
pub fn describe_functions(registry: &Registry) -> String {
    let mut out = String::new();
    out.push_str("Available functions. Every function returns a scenario set: for each object, the timestamps at which the condition holds.\n");
    out.push_str("Parameters marked track_candidates are the subject objects; results are always a subset of them. Parameters marked related_candidates are the reference objects the relation is measured against.\n");
    for f in registry.functions() {
        out.push('\n');
        let sig: Vec<String> = f
            .params
            .iter()
            .map(|p| match p.default {
                Some(d) => alloc::format!("{}={d}", p.name),
                None => String::from(p.name),
            })
            .collect();
        let _ = writeln!(out, "{CATALOG_FUNCTION_PREFIX}{}({})", f.name, sig.join(", "));
        let _ = writeln!(out, "  {}", f.summary);
        for p in f.params {
            let role = match p.kind {
                ParamKind::TrackCandidates => " [track candidates]",
                ParamKind::RelatedCandidates => " [related candidates]",
                _ => "",
            };
            let _ = writeln!(out, "  - {} ({}){role}: {}", p.name, p.kind.describe(), p.doc);
        }
    }
    out.push('\n');
    let cats: Vec<&str> = registry.categories().names().collect();
    let _ = writeln!(out, "Object categories: {}", cats.join(", "));
    out
}
