//! Read access to Git repositories through the `git` command line tool.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use crate::error::RepoError;

/// A tag resolved to the commit it names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedTag {
    pub tag: String,
    pub commit: String,
    /// Committer timestamp of the commit.
    pub commit_time: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeEntry {
    pub path: String,
    pub blob: String,
}

#[derive(Clone, Debug)]
pub struct GitRepo {
    path: PathBuf,
}

impl GitRepo {
    /// Fails unless `path` is a Git repository, bare or not.
    pub fn open(path: &Path) -> Result<Self, RepoError> {
        let repo = GitRepo { path: path.to_owned() };
        repo.run(&["rev-parse", "--git-dir"])?;
        Ok(repo)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn command(&self) -> Command {
        let mut cmd = Command::new("git");
        cmd.arg("-C")
            .arg(&self.path)
            .args(["-c", "safe.directory=*"])
            .env("GIT_TERMINAL_PROMPT", "0");
        cmd
    }

    fn error(&self, command: &str, message: impl Into<String>) -> RepoError {
        RepoError::Git {
            repo: self.path.clone(),
            command: command.to_owned(),
            message: message.into(),
        }
    }

    fn run(&self, args: &[&str]) -> Result<Vec<u8>, RepoError> {
        let out = self
            .command()
            .args(args)
            .stdin(Stdio::null())
            .output()
            .map_err(|e| self.error(args[0], e.to_string()))?;
        if !out.status.success() {
            return Err(self.error(args[0], String::from_utf8_lossy(&out.stderr).trim().to_owned()));
        }
        Ok(out.stdout)
    }

    /// Names of all tags, sorted.
    pub fn tag_names(&self) -> Result<Vec<String>, RepoError> {
        let out = self.run(&["for-each-ref", "--format=%(refname:strip=2)", "refs/tags"])?;
        let mut names: Vec<String> = String::from_utf8_lossy(&out)
            .lines()
            .filter(|l| !l.is_empty())
            .map(str::to_owned)
            .collect();
        names.sort();
        Ok(names)
    }

    /// Resolves every tag to its commit, following annotated tags. Tags that
    /// do not lead to a commit come back in the second list.
    pub fn resolve_tags(&self) -> Result<(Vec<ResolvedTag>, Vec<String>), RepoError> {
        let mut batch = self.cat_file()?;
        let mut resolved = Vec::new();
        let mut unresolved = Vec::new();
        for tag in self.tag_names()? {
            match batch.get(&format!("refs/tags/{tag}^{{commit}}"))? {
                Some(obj) if obj.kind == "commit" => {
                    let commit_time = committer_time(&obj.data)
                        .ok_or_else(|| self.error("cat-file", format!("commit {} has no committer line", obj.oid)))?;
                    resolved.push(ResolvedTag {
                        tag,
                        commit: obj.oid,
                        commit_time,
                    });
                }
                _ => unresolved.push(tag),
            }
        }
        Ok((resolved, unresolved))
    }

    /// Blobs reachable from `commit`, recursively, with repository-relative
    /// paths. Symbolic links and submodules are left out.
    pub fn tree(&self, commit: &str) -> Result<Vec<TreeEntry>, RepoError> {
        let out = self.run(&["ls-tree", "-r", "-z", "--full-tree", commit])?;
        let mut entries = Vec::new();
        for record in out.split(|&b| b == 0).filter(|r| !r.is_empty()) {
            let text = String::from_utf8_lossy(record);
            let (meta, path) = text
                .split_once('\t')
                .ok_or_else(|| self.error("ls-tree", format!("malformed entry {text:?}")))?;
            let mut parts = meta.split(' ');
            let (Some(mode), Some(kind), Some(oid)) = (parts.next(), parts.next(), parts.next()) else {
                return Err(self.error("ls-tree", format!("malformed entry {text:?}")));
            };
            if kind == "blob" && mode != "120000" {
                entries.push(TreeEntry {
                    path: path.to_owned(),
                    blob: oid.to_owned(),
                });
            }
        }
        Ok(entries)
    }

    pub fn cat_file(&self) -> Result<CatFile, RepoError> {
        let mut child = self
            .command()
            .args(["cat-file", "--batch"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| self.error("cat-file", e.to_string()))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(CatFile {
            repo: self.path.clone(),
            child,
            stdin: Some(stdin),
            stdout,
        })
    }
}

pub struct Object {
    pub oid: String,
    pub kind: String,
    pub data: Vec<u8>,
}

/// A long-running `git cat-file --batch` process.
pub struct CatFile {
    repo: PathBuf,
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
}

impl CatFile {
    fn error(&self, message: impl Into<String>) -> RepoError {
        RepoError::Git {
            repo: self.repo.clone(),
            command: "cat-file".into(),
            message: message.into(),
        }
    }

    /// Looks up an object by any revision expression; `None` when it does
    /// not exist.
    pub fn get(&mut self, spec: &str) -> Result<Option<Object>, RepoError> {
        if spec.contains('\n') {
            return Ok(None);
        }
        let stdin = self.stdin.as_mut().expect("open until drop");
        writeln!(stdin, "{spec}").and_then(|_| stdin.flush()).map_err(|e| self.error(e.to_string()))?;
        let mut header = String::new();
        self.stdout.read_line(&mut header).map_err(|e| self.error(e.to_string()))?;
        let header = header.trim_end();
        if header.is_empty() {
            return Err(self.error("unexpected end of output"));
        }
        let fields: Vec<&str> = header.rsplitn(3, ' ').collect();
        if fields.len() == 2 && matches!(fields[0], "missing" | "ambiguous") {
            return Ok(None);
        }
        let [size, kind, oid] = fields[..] else {
            return Err(self.error(format!("unexpected header {header:?}")));
        };
        let size: usize = size.parse().map_err(|_| self.error(format!("bad size in {header:?}")))?;
        let mut data = vec![0; size + 1];
        self.stdout.read_exact(&mut data).map_err(|e| self.error(e.to_string()))?;
        data.pop();
        Ok(Some(Object {
            oid: oid.to_owned(),
            kind: kind.to_owned(),
            data,
        }))
    }
}

impl Drop for CatFile {
    fn drop(&mut self) {
        drop(self.stdin.take());
        let _ = self.child.wait();
    }
}

/// Seconds field of the `committer` header of a raw commit object.
pub fn committer_time(commit: &[u8]) -> Option<i64> {
    let text = String::from_utf8_lossy(commit);
    let line = text
        .lines()
        .take_while(|l| !l.is_empty())
        .find(|l| l.starts_with("committer "))?;
    let mut fields = line.rsplit(' ');
    let _tz = fields.next()?;
    fields.next()?.parse().ok()
}
