use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::NetworkConfig;
use crate::error::{Error, Result};

pub const POOL_PARAMS: usize = 2;
pub const IL2_PARAMS: usize = 12;
pub const PARAMS_PER_ANCILLA: usize = 3;

/// Named groups of trainable slots. Every gate instance inside one group
/// reads from the same slot range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SlotGroup {
    Conv1,
    Pool,
    Conv2,
    #[serde(rename = "IL2")]
    Il2,
    Classifier,
}

impl fmt::Display for SlotGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SlotGroup::Conv1 => "Conv1",
            SlotGroup::Pool => "Pool",
            SlotGroup::Conv2 => "Conv2",
            SlotGroup::Il2 => "IL2",
            SlotGroup::Classifier => "Classifier",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamLayout {
    groups: Vec<(SlotGroup, Range<usize>)>,
}

impl ParamLayout {
    pub fn for_config(config: &NetworkConfig) -> Result<Self> {
        config.validate()?;
        let conv = config.ansatz.num_params();
        let mut sizes = vec![(SlotGroup::Conv1, conv)];
        if !config.iris_variant {
            sizes.push((SlotGroup::Pool, POOL_PARAMS));
            sizes.push((SlotGroup::Conv2, conv));
        }
        if config.interaction_layers_enabled {
            sizes.push((SlotGroup::Il2, IL2_PARAMS));
        }
        sizes.push((
            SlotGroup::Classifier,
            PARAMS_PER_ANCILLA * config.num_classes,
        ));
        let mut start = 0;
        let groups = sizes
            .into_iter()
            .map(|(g, n)| {
                let r = start..start + n;
                start += n;
                (g, r)
            })
            .collect();
        Ok(ParamLayout { groups })
    }

    pub fn len(&self) -> usize {
        self.groups.last().map_or(0, |(_, r)| r.end)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn groups(&self) -> &[(SlotGroup, Range<usize>)] {
        &self.groups
    }

    pub fn range(&self, group: SlotGroup) -> Option<Range<usize>> {
        self.groups
            .iter()
            .find(|(g, _)| *g == group)
            .map(|(_, r)| r.clone())
    }

    pub fn group_of(&self, slot: usize) -> Option<SlotGroup> {
        self.groups
            .iter()
            .find(|(_, r)| r.contains(&slot))
            .map(|(g, _)| *g)
    }

    /// Stable fingerprint of the layout, used to refuse loading parameters
    /// into a network with a different shape.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (g, r) in &self.groups {
            h.update(format!("{g}:{}..{};", r.start, r.end).as_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Flat trainable angles plus the layout that names them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    pub values: Vec<f64>,
    pub layout: ParamLayout,
}

impl ParameterVector {
    pub fn new(layout: ParamLayout, values: Vec<f64>) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::Usage(format!(
                "layout has {} slots but {} values were given",
                layout.len(),
                values.len()
            )));
        }
        Ok(ParameterVector { values, layout })
    }

    pub fn zeros(layout: ParamLayout) -> Self {
        let values = vec![0.0; layout.len()];
        ParameterVector { values, layout }
    }

    pub fn group(&self, group: SlotGroup) -> Option<&[f64]> {
        self.layout.range(group).map(|r| &self.values[r])
    }
}

/// Number of trainable angles for a configuration.
pub fn param_count(config: &NetworkConfig) -> Result<usize> {
    Ok(ParamLayout::for_config(config)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Ansatz, Encoding};

    #[test]
    fn published_totals() {
        let a1 = NetworkConfig::binary(Encoding::Amplitude, Ansatz::A1);
        let a2 = NetworkConfig::binary(Encoding::Angle, Ansatz::A2);
        let m3 = NetworkConfig::multiclass(Encoding::Angle, Ansatz::A1, 3);
        assert_eq!(param_count(&a1).unwrap(), 50);
        assert_eq!(param_count(&a2).unwrap(), 40);
        assert_eq!(param_count(&m3).unwrap(), 53);
        assert_eq!(param_count(&NetworkConfig::iris()).unwrap(), 31);
        let mut iris_a1 = NetworkConfig::iris();
        iris_a1.ansatz = Ansatz::A1;
        assert_eq!(param_count(&iris_a1).unwrap(), 36);
    }

    #[test]
    fn group_sizes() {
        let l = ParamLayout::for_config(&NetworkConfig::binary(Encoding::Angle, Ansatz::A1)).unwrap();
        assert_eq!(l.range(SlotGroup::Conv1).unwrap().len(), 15);
        assert_eq!(l.range(SlotGroup::Pool).unwrap().len(), 2);
        assert_eq!(l.range(SlotGroup::Conv2).unwrap().len(), 15);
        assert_eq!(l.range(SlotGroup::Il2).unwrap().len(), 12);
        assert_eq!(l.range(SlotGroup::Classifier).unwrap().len(), 6);
        assert_eq!(l.group_of(16), Some(SlotGroup::Pool));
        assert_eq!(l.group_of(50), None);
    }

    #[test]
    fn ablation_removes_twelve_slots() {
        let on = NetworkConfig::binary(Encoding::Angle, Ansatz::A1);
        let off = on.clone().with_interaction_layers(false);
        assert_eq!(param_count(&on).unwrap() - param_count(&off).unwrap(), 12);
    }

    #[test]
    fn hash_distinguishes_layouts() {
        let a = ParamLayout::for_config(&NetworkConfig::binary(Encoding::Angle, Ansatz::A1)).unwrap();
        let b = ParamLayout::for_config(&NetworkConfig::binary(Encoding::Angle, Ansatz::A2)).unwrap();
        assert_eq!(a.hash(), a.clone().hash());
        assert_ne!(a.hash(), b.hash());
        assert!(ParameterVector::new(a, vec![0.0; 3]).is_err());
    }
}
