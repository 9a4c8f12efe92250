//! Helpers for the acceptance run in `tests/acceptance.rs`.

use std::path::PathBuf;

/// The `swipt` binary in the target directory the running test was built
/// into. `cargo test --workspace` builds it alongside the CLI tests; a lone
/// `cargo test -p swipt-suite` needs `cargo build -p swipt-cli` first.
pub fn swipt_binary() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    // target/<profile>/deps/acceptance-<hash>
    let dir = exe.parent()?.parent()?;
    let bin = dir.join(format!("swipt{}", std::env::consts::EXE_SUFFIX));
    bin.is_file().then_some(bin)
}
