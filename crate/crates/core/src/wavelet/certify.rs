use std::fmt;

use serde::{Deserialize, Serialize};

use super::generator::Tag;
use super::system::WaveletSystem;

/// Independence results the engine can match, in priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleId {
    #[serde(rename = "ExpDecay_L31a")]
    ExpDecayL31a,
    #[serde(rename = "PolyDecayMaxDilation_L31b")]
    PolyDecayMaxDilationL31b,
    #[serde(rename = "SmoothMinDilation_L31c")]
    SmoothMinDilationL31c,
    #[serde(rename = "ThreePointSchwartz_C32")]
    ThreePointSchwartzC32,
    #[serde(rename = "FTVanishNearZero_L33i")]
    FtVanishNearZeroL33i,
    #[serde(rename = "FTCompact_L33ii")]
    FtCompactL33ii,
    #[serde(rename = "UltimatelyDecreasingFT_T34")]
    UltimatelyDecreasingFtT34,
    #[serde(rename = "LECombination_T42")]
    LeCombinationT42,
}

impl RuleId {
    pub const PRIORITY: [RuleId; 8] = [
        RuleId::ExpDecayL31a,
        RuleId::PolyDecayMaxDilationL31b,
        RuleId::SmoothMinDilationL31c,
        RuleId::ThreePointSchwartzC32,
        RuleId::FtVanishNearZeroL33i,
        RuleId::FtCompactL33ii,
        RuleId::UltimatelyDecreasingFtT34,
        RuleId::LeCombinationT42,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::ExpDecayL31a => "ExpDecay_L31a",
            RuleId::PolyDecayMaxDilationL31b => "PolyDecayMaxDilation_L31b",
            RuleId::SmoothMinDilationL31c => "SmoothMinDilation_L31c",
            RuleId::ThreePointSchwartzC32 => "ThreePointSchwartz_C32",
            RuleId::FtVanishNearZeroL33i => "FTVanishNearZero_L33i",
            RuleId::FtCompactL33ii => "FTCompact_L33ii",
            RuleId::UltimatelyDecreasingFtT34 => "UltimatelyDecreasingFT_T34",
            RuleId::LeCombinationT42 => "LECombination_T42",
        }
    }

    /// Statement of the matched independence result.
    pub fn citation(self) -> &'static str {
        match self {
            RuleId::ExpDecayL31a => {
                "A finite wavelet system is linearly independent when its generator decays faster than any exponential and is not compactly supported."
            }
            RuleId::PolyDecayMaxDilationL31b => {
                "A finite wavelet system is linearly independent when its generator decays faster than any polynomial, is not compactly supported, and a single point carries a dilation strictly larger than all others."
            }
            RuleId::SmoothMinDilationL31c => {
                "A finite wavelet system is linearly independent when its generator is infinitely differentiable with every derivative integrable and a single point carries a dilation strictly smaller than all others."
            }
            RuleId::ThreePointSchwartzC32 => {
                "Any three-point finite wavelet system generated by a nonzero Schwartz function is linearly independent."
            }
            RuleId::FtVanishNearZeroL33i => {
                "A finite wavelet system is linearly independent when the Fourier transform of its generator vanishes on a neighbourhood of the origin."
            }
            RuleId::FtCompactL33ii => {
                "A finite wavelet system is linearly independent when the Fourier transform of its generator has compact support."
            }
            RuleId::UltimatelyDecreasingFtT34 => {
                "A finite wavelet system generated by a Schwartz function is linearly independent when the modulus of its Fourier transform is eventually decreasing towards both plus and minus infinity."
            }
            RuleId::LeCombinationT42 => {
                "A finite wavelet system is linearly independent when the Fourier transform of its generator is a complex linear combination of square-integrable functions whose germs at infinity are logarithmico-exponential."
            }
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChecklistItem {
    pub condition: String,
    pub satisfied: bool,
}

/// A matched rule; every checklist entry is satisfied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub rule_id: RuleId,
    pub hypothesis_checklist: Vec<ChecklistItem>,
    pub citation: String,
}

fn tag_item(system: &WaveletSystem, tag: Tag) -> ChecklistItem {
    ChecklistItem {
        condition: format!("tag {tag}"),
        satisfied: system.generator().has(tag),
    }
}

/// Hypotheses of `rule` evaluated on `system`.
pub fn checklist(rule: RuleId, system: &WaveletSystem) -> Vec<ChecklistItem> {
    let tags = |ts: &[Tag]| ts.iter().map(|&t| tag_item(system, t)).collect::<Vec<_>>();
    match rule {
        RuleId::ExpDecayL31a => tags(&[Tag::FasterThanExponentialDecay, Tag::NoncompactSupport]),
        RuleId::PolyDecayMaxDilationL31b => {
            let mut items = tags(&[Tag::FasterThanPolynomialDecay, Tag::NoncompactSupport]);
            items.push(ChecklistItem {
                condition: "unique strictly largest dilation (ties at the maximum are not accepted)"
                    .into(),
                satisfied: system.unique_max_dilation().is_some(),
            });
            items
        }
        RuleId::SmoothMinDilationL31c => {
            let mut items = tags(&[Tag::SmoothAllDerivsL1]);
            items.push(ChecklistItem {
                condition: "unique strictly smallest dilation (ties at the minimum are not accepted)"
                    .into(),
                satisfied: system.unique_min_dilation().is_some(),
            });
            items
        }
        RuleId::ThreePointSchwartzC32 => {
            let mut items = tags(&[Tag::Schwartz]);
            items.push(ChecklistItem {
                condition: "exactly three points (a single point is trivially independent)".into(),
                satisfied: matches!(system.len(), 1 | 3),
            });
            items
        }
        RuleId::FtVanishNearZeroL33i => tags(&[Tag::FtVanishesNearZero]),
        RuleId::FtCompactL33ii => tags(&[Tag::FtCompactSupport]),
        RuleId::UltimatelyDecreasingFtT34 => {
            tags(&[Tag::Schwartz, Tag::FtAbsUltimatelyDecreasingBothSides])
        }
        RuleId::LeCombinationT42 => tags(&[Tag::FtLeCombination]),
    }
}

/// Checklists of every rule, in priority order.
pub fn all_checklists(system: &WaveletSystem) -> Vec<(RuleId, Vec<ChecklistItem>)> {
    RuleId::PRIORITY
        .iter()
        .map(|&r| (r, checklist(r, system)))
        .collect()
}

/// First rule, in priority order, whose hypotheses all hold.
pub fn certify(system: &WaveletSystem) -> Option<Certificate> {
    RuleId::PRIORITY.iter().find_map(|&rule| {
        let items = checklist(rule, system);
        items.iter().all(|i| i.satisfied).then(|| Certificate {
            rule_id: rule,
            hypothesis_checklist: items,
            citation: rule.citation().to_string(),
        })
    })
}
