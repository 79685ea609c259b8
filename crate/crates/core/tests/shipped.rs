// The .swp files under protocols/ are the canonical text of the built-in
// sequences. This pins them: regenerate with
// `swp demo <name> --write-swp protocols/<name>.swp` after editing a builder.

use swp_core::dsl::{parse, serialize};
use swp_core::protocol::{builtin, BUILTIN_NAMES};

fn shipped_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../protocols")
        .join(format!("{name}.swp"))
}

#[test]
fn shipped_files_are_the_canonical_builtins() {
    for name in BUILTIN_NAMES {
        let path = shipped_path(name);
        let text = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let expect = serialize(&builtin(name).unwrap());
        assert_eq!(text, expect, "{name}.swp drifted from its builder");
        let parsed = parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parsed, builtin(name).unwrap());
    }
}
