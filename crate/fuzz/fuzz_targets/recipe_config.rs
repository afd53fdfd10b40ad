#![no_main]

use libfuzzer_sys::fuzz_target;
use somkit::datamix::MixRecipe;
use somkit::pipeline::PipelineConfig;

fuzz_target!(|data: &[u8]| {
    let _ = MixRecipe::parse(data);
    if let Ok(cfg) = serde_json::from_slice::<PipelineConfig>(data) {
        let _ = cfg.validate();
    }
});
