//! CNN inference for the feature-guided enhancement path.

mod attention;
mod heads;
mod layers;
mod tensor;
mod weights;

pub use attention::{attention_map, feature_guided_enhance, fuse_attention, FuseMode};
pub use heads::{
    build_resnet_head, build_vgg_head, extract_features, BoundLayer, Extractor, ExtractorSpec, HeadKind, InputAffine,
    LayerSpec, ParamSlot,
};
pub use layers::{conv2d_forward, residual_forward, Activation, ConvLayer, ResidualBlock};
pub use tensor::{max_pool2, relu, Tensor};
pub use weights::{
    decode_weights, encode_weights, init_weights, load_weights, save_weights, TensorEntry, WeightManifest,
    BLOB_FILE, DTYPE_F32LE, MANIFEST_FILE,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::ImageF32;

    fn checksum(t: &Tensor) -> (f64, f64) {
        let s = t.data().iter().map(|&v| v as f64).sum();
        let w = t.data().iter().enumerate().map(|(i, &v)| v as f64 * ((i % 97) as f64 + 1.0)).sum();
        (s, w)
    }

    #[test]
    fn extraction_is_deterministic() {
        let img = probe_image();
        let ex = init_weights(&build_resnet_head(), 7);
        assert_eq!(extract_features(&img, &ex).unwrap(), extract_features(&img, &ex).unwrap());
    }

    fn probe_image() -> ImageF32 {
        ImageF32::from_fn(8, 8, 3, |c, x, y| ((x * 5 + y * 3 + c * 7) % 11) as f32 / 10.0).unwrap()
    }

    #[test]
    fn frozen_feature_checksums() {
        let img = probe_image();
        let vgg = extract_features(&img, &init_weights(&build_vgg_head(4).unwrap(), 7)).unwrap();
        let res = extract_features(&img, &init_weights(&build_resnet_head(), 7)).unwrap();
        assert_eq!(vgg.shape(), (128, 4, 4));
        assert_eq!(res.shape(), (64, 2, 2));
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
        let (s, w) = checksum(&vgg);
        assert!(close(s, 513.8656011268031) && close(w, 24662.389258168638), "{s} {w}");
        let (s, w) = checksum(&res);
        assert!(close(s, 173.11314657703042) && close(w, 7261.126917485148), "{s} {w}");
    }
}
