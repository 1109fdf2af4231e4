//! The nine-concept taxonomy and the tagger model groups.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed set of concept types a span can be tagged with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TagType {
    #[serde(rename = "PERM")]
    Perm,
    #[serde(rename = "DEF")]
    Def,
    #[serde(rename = "RISK")]
    Risk,
    #[serde(rename = "MIT")]
    Mit,
    #[serde(rename = "ENT")]
    Ent,
    #[serde(rename = "ACT")]
    Act,
    #[serde(rename = "FS")]
    Fs,
    #[serde(rename = "PROD")]
    Prod,
    #[serde(rename = "TECH")]
    Tech,
}

impl TagType {
    pub const ALL: [TagType; 9] = [
        TagType::Perm,
        TagType::Def,
        TagType::Risk,
        TagType::Mit,
        TagType::Ent,
        TagType::Act,
        TagType::Fs,
        TagType::Prod,
        TagType::Tech,
    ];

    pub fn code(self) -> &'static str {
        match self {
            TagType::Perm => "PERM",
            TagType::Def => "DEF",
            TagType::Risk => "RISK",
            TagType::Mit => "MIT",
            TagType::Ent => "ENT",
            TagType::Act => "ACT",
            TagType::Fs => "FS",
            TagType::Prod => "PROD",
            TagType::Tech => "TECH",
        }
    }

    pub fn codes() -> String {
        TagType::ALL.iter().map(|t| t.code()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for TagType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for TagType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TagType::ALL.iter().copied().find(|t| t.code() == s).ok_or_else(|| {
            Error::Domain(format!("unknown tag type {s:?}; expected one of {}", TagType::codes()))
        })
    }
}

/// Model groups: each group is tagged by one model run covering one or
/// more concept types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupId {
    #[serde(rename = "PERM")]
    Perm,
    #[serde(rename = "RISK_MIT")]
    RiskMit,
    #[serde(rename = "ENT")]
    Ent,
    #[serde(rename = "ACT_FS_PROD")]
    ActFsProd,
    #[serde(rename = "DEF")]
    Def,
    #[serde(rename = "TECH")]
    Tech,
}

impl GroupId {
    pub const ALL: [GroupId; 6] = [
        GroupId::Perm,
        GroupId::RiskMit,
        GroupId::Ent,
        GroupId::ActFsProd,
        GroupId::Def,
        GroupId::Tech,
    ];

    pub fn code(self) -> &'static str {
        match self {
            GroupId::Perm => "PERM",
            GroupId::RiskMit => "RISK_MIT",
            GroupId::Ent => "ENT",
            GroupId::ActFsProd => "ACT_FS_PROD",
            GroupId::Def => "DEF",
            GroupId::Tech => "TECH",
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for GroupId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupId::ALL
            .iter()
            .copied()
            .find(|g| g.code() == s)
            .ok_or_else(|| Error::Domain(format!("unknown tagger group {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggerGroup {
    pub group_id: GroupId,
    pub covers: Vec<TagType>,
}

/// The standard grouping: PERM, ENT, DEF, TECH run alone; RISK with MIT;
/// ACT with FS and PROD.
pub fn standard_groups() -> Vec<TaggerGroup> {
    vec![
        TaggerGroup { group_id: GroupId::Perm, covers: vec![TagType::Perm] },
        TaggerGroup { group_id: GroupId::RiskMit, covers: vec![TagType::Risk, TagType::Mit] },
        TaggerGroup { group_id: GroupId::Ent, covers: vec![TagType::Ent] },
        TaggerGroup {
            group_id: GroupId::ActFsProd,
            covers: vec![TagType::Act, TagType::Fs, TagType::Prod],
        },
        TaggerGroup { group_id: GroupId::Def, covers: vec![TagType::Def] },
        TaggerGroup { group_id: GroupId::Tech, covers: vec![TagType::Tech] },
    ]
}

/// The group whose covers set contains `ttype` under the standard grouping.
pub fn group_of(ttype: TagType) -> GroupId {
    match ttype {
        TagType::Perm => GroupId::Perm,
        TagType::Risk | TagType::Mit => GroupId::RiskMit,
        TagType::Ent => GroupId::Ent,
        TagType::Act | TagType::Fs | TagType::Prod => GroupId::ActFsProd,
        TagType::Def => GroupId::Def,
        TagType::Tech => GroupId::Tech,
    }
}

/// Every TagType must be covered by exactly one group.
pub fn verify_partition(groups: &[TaggerGroup]) -> Result<()> {
    let mut seen: Vec<TagType> = Vec::new();
    for group in groups {
        for &ttype in &group.covers {
            if seen.contains(&ttype) {
                return Err(Error::Invalid(format!(
                    "tag type {ttype} covered by more than one tagger group"
                )));
            }
            seen.push(ttype);
        }
    }
    for ttype in TagType::ALL {
        if !seen.contains(&ttype) {
            return Err(Error::Invalid(format!(
                "tag type {ttype} not covered by any tagger group"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_round_trip() {
        for ttype in TagType::ALL {
            assert_eq!(ttype.code().parse::<TagType>().unwrap(), ttype);
        }
        assert!("RISKY".parse::<TagType>().is_err());
        let msg = "X".parse::<TagType>().unwrap_err().to_string();
        assert!(msg.contains("PERM") && msg.contains("TECH"), "{msg}");
    }

    #[test]
    fn serde_uses_uppercase_codes() {
        assert_eq!(serde_json::to_string(&TagType::Prod).unwrap(), "\"PROD\"");
        let t: TagType = serde_json::from_str("\"RISK\"").unwrap();
        assert_eq!(t, TagType::Risk);
    }

    #[test]
    fn standard_groups_partition_the_type_set() {
        let groups = standard_groups();
        verify_partition(&groups).unwrap();
        for ttype in TagType::ALL {
            let gid = group_of(ttype);
            let group = groups.iter().find(|g| g.group_id == gid).unwrap();
            assert!(group.covers.contains(&ttype));
        }
    }

    #[test]
    fn partition_violations_are_rejected() {
        let mut groups = standard_groups();
        groups[0].covers.push(TagType::Risk);
        assert!(verify_partition(&groups).is_err());
        let mut groups = standard_groups();
        groups.retain(|g| g.group_id != GroupId::Tech);
        assert!(verify_partition(&groups).is_err());
    }
}
