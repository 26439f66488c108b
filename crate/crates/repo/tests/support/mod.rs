#![allow(dead_code)]

use std::fs;
use std::path::Path;
use std::process::Command;

/// Runs git in `dir` with a fixed identity and the given committer date.
pub fn git(dir: &Path, args: &[&str], date: Option<i64>) {
    let mut cmd = Command::new("git");
    cmd.arg("-C")
        .arg(dir)
        .args(["-c", "user.name=T", "-c", "user.email=t@example.invalid", "-c", "commit.gpgsign=false"])
        .args(args);
    if let Some(t) = date {
        let stamp = format!("@{t} +0000");
        cmd.env("GIT_COMMITTER_DATE", &stamp).env("GIT_AUTHOR_DATE", &stamp);
    }
    let out = cmd.output().expect("git runs");
    assert!(out.status.success(), "git {args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

/// A fresh repository in `dir`, one commit per entry of `commits`, each
/// tagged. Every commit replaces the work tree with the listed files.
pub fn repo_with(dir: &Path, commits: &[(&str, i64, &[(&str, &[u8])])]) {
    fs::create_dir_all(dir).unwrap();
    git(dir, &["init", "-q", "-b", "main"], None);
    for (tag, time, files) in commits {
        for entry in fs::read_dir(dir).unwrap() {
            let entry = entry.unwrap();
            if entry.file_name() != ".git" {
                let p = entry.path();
                if p.is_dir() {
                    fs::remove_dir_all(p).unwrap();
                } else {
                    fs::remove_file(p).unwrap();
                }
            }
        }
        for (path, bytes) in *files {
            let full = dir.join(path);
            fs::create_dir_all(full.parent().unwrap()).unwrap();
            fs::write(full, bytes).unwrap();
        }
        git(dir, &["add", "-A"], None);
        git(dir, &["commit", "-q", "--allow-empty", "-m", tag], Some(*time));
        git(dir, &["tag", tag], None);
    }
}
