use std::collections::BTreeSet;

use proptest::prelude::*;

use glas_core::baseline::{
    perturb, postprocess, segment_region_growing, synth_glands, Perturbation, SegmenterConfig,
    SynthSpec,
};
use glas_core::metrics::evaluate_image;
use glas_core::{EvalConfig, LabelMap};

fn small_config() -> SegmenterConfig {
    SegmenterConfig {
        min_object_area: 20,
        ..SegmenterConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn postprocess_is_idempotent(
        (w, h, labels) in (4usize..24, 4usize..24).prop_flat_map(|(w, h)| {
            (Just(w), Just(h), proptest::collection::vec(0u32..4, w * h))
        }),
        min_area in 0u64..12,
        fill in any::<bool>(),
    ) {
        let cfg = SegmenterConfig { min_object_area: min_area, fill_holes: fill, ..SegmenterConfig::default() };
        let m = LabelMap::from_raw(w, h, labels).unwrap();
        let once = postprocess(&m, &cfg);
        prop_assert_eq!(postprocess(&once, &cfg), once);
    }

    #[test]
    fn segmentation_is_sequential_and_connected(seed in 0u64..1000, noise in 0.0f64..25.0) {
        let spec = SynthSpec { width: 160, height: 160, glands: 3, radius_min: 14.0, radius_max: 20.0, noise, seed, ..SynthSpec::default() };
        let s = synth_glands(&spec).unwrap();
        let cfg = small_config();
        let seg = segment_region_growing(&s.image, &cfg).unwrap();
        prop_assert!(seg.is_sequential());
        prop_assert_eq!(seg.split_components(cfg.connectivity).num_objects(), seg.num_objects());
    }

    #[test]
    fn drop_object_follows_set_arithmetic(seed in 0u64..500, k in 0usize..4) {
        let truth = synth_glands(&SynthSpec { width: 200, height: 200, glands: 4, radius_min: 14.0, radius_max: 20.0, seed, ..SynthSpec::default() })
            .unwrap()
            .truth;
        let out = perturb(&truth, Perturbation::DropObject { count: k }, seed).unwrap();
        let dropped: BTreeSet<u32> = out.affected.iter().copied().collect();
        prop_assert_eq!(&out.extinct, &out.affected);
        let c = evaluate_image(&truth, &out.map, &EvalConfig::default()).unwrap().counts;
        prop_assert_eq!(c.tp as usize, truth.num_objects() - dropped.len());
        prop_assert_eq!(c.fn_ as usize, dropped.len());
        prop_assert_eq!(c.fp, 0);
    }
}

#[test]
fn noiseless_corpus_is_segmented_exactly() {
    for seed in 0..5 {
        let s = synth_glands(&SynthSpec {
            glands: 6,
            seed,
            ..SynthSpec::default()
        })
        .unwrap();
        let seg = segment_region_growing(&s.image, &SegmenterConfig::default()).unwrap();
        let scores = evaluate_image(&s.truth, &seg, &EvalConfig::default())
            .unwrap()
            .scores();
        assert_eq!(scores.f1, 1.0, "seed {seed}");
        assert!(scores.dice_obj >= 0.95, "seed {seed}: {}", scores.dice_obj);
    }
}
