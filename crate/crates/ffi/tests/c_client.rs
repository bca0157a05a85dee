//! Compiles a C client against the generated header and links it with the
//! static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const CLIENT: &str = r#"
#include <stdio.h>
#include "heapable.h"

int main(void) {
    int64_t yes[] = {1, 3, 5, 2, 4};
    int64_t no[] = {1, 5, 3, 2, 4};
    size_t at = 0;
    if (hp_decide(yes, 5, NULL) != HP_STATUS_OK) return 10;
    if (hp_decide(no, 5, &at) != HP_STATUS_FALSE || at != 3) return 11;

    HpTree *tree = NULL;
    if (hp_tree_greedy(yes, 5, &tree) != HP_STATUS_OK || tree == NULL) return 12;
    if (hp_tree_len(tree) != 5) return 13;
    size_t idx[5];
    intptr_t parent[5];
    if (hp_tree_parent_links(tree, idx, parent, 5) != HP_STATUS_OK) return 14;
    if (hp_tree_verify(tree, yes, 5, false) != HP_STATUS_OK) return 15;
    hp_tree_free(tree);

    uint64_t num = 0, den = 0;
    if (hp_exact_heapable_prob(2, &num, &den) != HP_STATUS_OK || num != 1 || den != 2) return 16;
    printf("%s %s\n", hp_version(), hp_status_message(HP_STATUS_FALSE));
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| manifest.join("../../target"))
}

#[test]
fn c_client_links_and_runs() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    // Test binaries live in <target>/<profile>/deps.
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).map(Path::to_path_buf);
    let lib = profile_dir
        .into_iter()
        .chain([target_dir().join("debug"), target_dir().join("release")])
        .map(|d| d.join("libheapable_ffi.a"))
        .find(|p| p.exists())
        .expect("static library built alongside the tests");

    let work = tempfile::tempdir().unwrap();
    let src = work.path().join("client.c");
    let bin = work.path().join("client");
    std::fs::write(&src, CLIENT).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "C client failed to build");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "client exited with {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim(), format!("{} false", env!("CARGO_PKG_VERSION")));
}
