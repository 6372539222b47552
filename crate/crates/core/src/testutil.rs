use proptest::prelude::*;

use crate::profile::{Value, WeightProfile};

pub(crate) fn arb_profile(max_n: usize) -> impl Strategy<Value = WeightProfile> {
    (1..=max_n)
        .prop_flat_map(|n| proptest::collection::vec(0u8..3, n + 1))
        .prop_filter_map("needs a defined weight", |raw| {
            let values = raw
                .into_iter()
                .map(|v| match v {
                    0 => Value::Zero,
                    1 => Value::One,
                    _ => Value::Undefined,
                })
                .collect();
            WeightProfile::new(values).ok()
        })
}
