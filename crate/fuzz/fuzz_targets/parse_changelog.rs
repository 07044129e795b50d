#![no_main]

use std::sync::OnceLock;

use dlevo_core::parser::parse_changelog;
use dlevo_core::{parse_kb, KnowledgeBase};
use libfuzzer_sys::fuzz_target;

fn kb() -> &'static KnowledgeBase {
    static KB: OnceLock<KnowledgeBase> = OnceLock::new();
    KB.get_or_init(|| parse_kb(include_str!("../../crates/core/tests/data/running_example.kb")).unwrap())
}

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_changelog(text, kb().signature());
    }
});
