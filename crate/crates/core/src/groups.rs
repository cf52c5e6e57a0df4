use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Race and ethnicity groups, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RaceGroup {
    R1,
    R2,
    R3,
    R4,
}

impl RaceGroup {
    pub const ALL: [RaceGroup; 4] = [RaceGroup::R1, RaceGroup::R2, RaceGroup::R3, RaceGroup::R4];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RaceGroup::R1 => "R1",
            RaceGroup::R2 => "R2",
            RaceGroup::R3 => "R3",
            RaceGroup::R4 => "R4",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RaceGroup::R1 => "White",
            RaceGroup::R2 => "Black or African American",
            RaceGroup::R3 => "Asian",
            RaceGroup::R4 => "Hispanic or Latino",
        }
    }
}

/// `G1` is women; `G2` is everyone else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GenderGroup {
    G1,
    G2,
}

impl GenderGroup {
    pub const ALL: [GenderGroup; 2] = [GenderGroup::G1, GenderGroup::G2];

    pub fn as_str(self) -> &'static str {
        match self {
            GenderGroup::G1 => "G1",
            GenderGroup::G2 => "G2",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GenderGroup::G1 => "Women",
            GenderGroup::G2 => "Non-women",
        }
    }
}

/// Any demographic group carrying a disparity value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    Race(RaceGroup),
    Gender(GenderGroup),
}

impl Group {
    pub const ALL: [Group; 6] = [
        Group::Race(RaceGroup::R1),
        Group::Race(RaceGroup::R2),
        Group::Race(RaceGroup::R3),
        Group::Race(RaceGroup::R4),
        Group::Gender(GenderGroup::G1),
        Group::Gender(GenderGroup::G2),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Race(r) => r.as_str(),
            Group::Gender(g) => g.as_str(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown group {0:?}")]
pub struct UnknownGroup(pub String);

impl FromStr for RaceGroup {
    type Err = UnknownGroup;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RaceGroup::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| UnknownGroup(s.to_string()))
    }
}

impl FromStr for GenderGroup {
    type Err = UnknownGroup;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GenderGroup::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| UnknownGroup(s.to_string()))
    }
}

impl FromStr for Group {
    type Err = UnknownGroup;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Group::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| UnknownGroup(s.to_string()))
    }
}

impl fmt::Display for RaceGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for GenderGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
