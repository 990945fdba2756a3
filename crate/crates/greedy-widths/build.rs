use std::process::Command;

fn git(args: &[&str]) -> Option<String> {
    let out = Command::new("git").args(args).output().ok()?;
    if !out.status.success() {
        return None;
    }
    let s = String::from_utf8(out.stdout).ok()?.trim().to_string();
    (!s.is_empty()).then_some(s)
}

fn main() {
    let version = std::env::var("CARGO_PKG_VERSION").unwrap_or_default();
    let id = std::env::var("GREEDY_WIDTHS_BUILD_ID")
        .ok()
        .filter(|s| !s.is_empty())
        .or_else(|| {
            let described = git(&["describe", "--tags", "--always", "--dirty"])?;
            Some(if git(&["describe", "--tags"]).is_some() {
                described
            } else {
                format!("v{version}-g{described}")
            })
        })
        .unwrap_or_else(|| format!("v{version}-unknown"));
    println!("cargo:rustc-env=GREEDY_WIDTHS_BUILD_ID={id}");
    println!("cargo:rerun-if-env-changed=GREEDY_WIDTHS_BUILD_ID");
    if let Some(dir) = git(&["rev-parse", "--git-dir"]) {
        println!("cargo:rerun-if-changed={dir}/HEAD");
        println!("cargo:rerun-if-changed={dir}/refs");
    }
}
