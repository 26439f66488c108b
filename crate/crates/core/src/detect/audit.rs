//! Record of every candidate, file or link dropped during detection, with the
//! criterion that removed it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::ProjectId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// Lost the per-producer ranking (size, identical count, age).
    #[serde(rename = "C2/C3/C4")]
    C2C3C4,
    /// Destination file already claimed by a better-ranked producer.
    #[serde(rename = "C5")]
    C5,
    /// Identical file present in the consumer before the origin existed.
    #[serde(rename = "C6/4-I")]
    PreexistingIdentical,
    /// Similar pair whose origin file already sat in the consumer.
    #[serde(rename = "C6/4-II")]
    PreexistingOrigin,
    /// Similar pair whose origin file descends from a consumer file.
    #[serde(rename = "C6/4-III")]
    TransferredBack,
    /// Destination file unchanged from an earlier consumer snapshot.
    #[serde(rename = "C6/update")]
    OwnUpdate,
    /// Reverse of an older link between the same projects.
    #[serde(rename = "5-1")]
    ReturningReuse,
    /// Fewer files than the minimum file set size.
    #[serde(rename = "5-2")]
    SmallFileSet,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("rule serializes");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub step: String,
    pub rule: Rule,
    pub producer: ProjectId,
    pub origin_tag: String,
    pub consumer: ProjectId,
    pub dest_tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dest_path: Option<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl AuditEntry {
    pub fn new(step: &str, rule: Rule, origin: (&ProjectId, &str), dest: (&ProjectId, &str)) -> Self {
        AuditEntry {
            step: step.to_owned(),
            rule,
            producer: origin.0.clone(),
            origin_tag: origin.1.to_owned(),
            consumer: dest.0.clone(),
            dest_tag: dest.1.to_owned(),
            dest_path: None,
            detail: String::new(),
        }
    }

    pub fn path(mut self, path: &str) -> Self {
        self.dest_path = Some(path.to_owned());
        self
    }

    pub fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

impl fmt::Display for AuditEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step {} [{}] {}@{} -> {}@{}",
            self.step, self.rule, self.producer, self.origin_tag, self.consumer, self.dest_tag
        )?;
        if let Some(p) = &self.dest_path {
            write!(f, " file {p}")?;
        }
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}
