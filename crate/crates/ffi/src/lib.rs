//! C ABI over the aquaclear library.
//!
//! Images cross the boundary as opaque `AqImage` handles owned by the
//! caller once returned; release them with `aq_image_free`. Every fallible
//! call returns an `AqStatus` and writes its result through an out
//! pointer. On failure the message is kept per thread and can be read with
//! `aq_last_error_message` until the next failing call on that thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;
use std::sync::OnceLock;

use aquaclear::classify::{classify, Category8, ClassifierThresholds};
use aquaclear::enhance::PlanParams;
use aquaclear::image::{load_ppm, save_ppm};
use aquaclear::metrics::{psnr, uciqe, uiqm, Psnr};
use aquaclear::pipeline::{Enhancer, Method};
use aquaclear::{Error, ImageF32};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidImage = 3,
    Io = 4,
    Decode = 5,
    Weights = 6,
    Failed = 7,
    Panic = 8,
}

/// Enhancement method selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AqMethod {
    Classic = 0,
    Vgg = 1,
    Resnet = 2,
    Unite = 3,
}

/// Detector output under the default thresholds. `category` is the rank
/// (1 to 8) used in category reports; `aq_category_name` names it.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AqClassification {
    pub color_cast: bool,
    pub low_light: bool,
    pub blurred: bool,
    pub category: u32,
    pub max_rel_dev: f64,
    pub mean_v: f64,
    pub laplacian_variance: f64,
}

/// Opaque image handle.
pub struct AqImage {
    inner: ImageF32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> AqStatus {
    match err {
        Error::Io { .. } => AqStatus::Io,
        Error::MalformedHeader(_) | Error::TruncatedPayload { .. } | Error::UnsupportedMaxval(_) | Error::Csv { .. } => {
            AqStatus::Decode
        }
        Error::InvalidImage(_)
        | Error::GrayscaleUnsupported
        | Error::ChannelMismatch { .. }
        | Error::DimMismatch(_)
        | Error::ImageTooSmall { .. }
        | Error::IndivisibleDims { .. } => AqStatus::InvalidImage,
        Error::MissingWeights(_) | Error::Manifest(_) | Error::ShapeMismatchInManifest(_) | Error::CorruptBlob(_) => {
            AqStatus::Weights
        }
        e if e.exit_code() == 4 => AqStatus::InvalidArgument,
        _ => AqStatus::Failed,
    }
}

struct Fail(AqStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, turning errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> AqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AqStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            AqStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(AqStatus::NullPointer, format!("{what} is null"))
}

unsafe fn image_ref<'a>(img: *const AqImage, what: &str) -> Result<&'a ImageF32, Fail> {
    img.as_ref().map(|h| &h.inner).ok_or_else(|| null(what))
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, Fail> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(path)
        .to_str()
        .map_err(|_| Fail(AqStatus::InvalidArgument, "path is not valid UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

fn boxed(inner: ImageF32) -> *mut AqImage {
    Box::into_raw(Box::new(AqImage { inner }))
}

/// Message of the last failing call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn aq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn aq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies `width * height * channels` planar samples (channel-major, then
/// row-major) into a new image. Samples must lie in [0, 1].
///
/// # Safety
/// `samples` must point to that many readable floats; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aq_image_new(
    width: usize,
    height: usize,
    channels: usize,
    samples: *const f32,
    out: *mut *mut AqImage,
) -> AqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if samples.is_null() {
            return Err(null("samples"));
        }
        let n = width
            .checked_mul(height)
            .and_then(|p| p.checked_mul(channels))
            .ok_or_else(|| Fail(AqStatus::InvalidArgument, "image dimensions overflow".into()))?;
        let data = std::slice::from_raw_parts(samples, n).to_vec();
        *out = boxed(ImageF32::new(width, height, channels, data)?);
        Ok(())
    })
}

/// Reads a binary PPM (P6, maxval 255).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aq_image_load(path: *const c_char, out: *mut *mut AqImage) -> AqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = path_arg(path)?;
        *out = boxed(load_ppm(path)?);
        Ok(())
    })
}

/// Writes a three-channel image as a binary PPM.
///
/// # Safety
/// `img` must be a live handle or null; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn aq_image_save(img: *const AqImage, path: *const c_char) -> AqStatus {
    guard(|| {
        let img = image_ref(img, "image")?;
        save_ppm(img, path_arg(path)?)?;
        Ok(())
    })
}

/// Releases an image. Null is ignored.
///
/// # Safety
/// `img` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn aq_image_free(img: *mut AqImage) {
    if !img.is_null() {
        drop(Box::from_raw(img));
    }
}

/// # Safety
/// `img` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn aq_image_width(img: *const AqImage) -> usize {
    img.as_ref().map_or(0, |h| h.inner.width())
}

/// # Safety
/// `img` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn aq_image_height(img: *const AqImage) -> usize {
    img.as_ref().map_or(0, |h| h.inner.height())
}

/// # Safety
/// `img` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn aq_image_channels(img: *const AqImage) -> usize {
    img.as_ref().map_or(0, |h| h.inner.channels())
}

/// Planar samples, `width * height * channels` of them, valid while the
/// handle lives.
///
/// # Safety
/// `img` must be a live handle or null (which yields null).
#[no_mangle]
pub unsafe extern "C" fn aq_image_data(img: *const AqImage) -> *const f32 {
    img.as_ref().map_or(ptr::null(), |h| h.inner.samples().as_ptr())
}

/// Classifies under the default thresholds.
///
/// # Safety
/// `img` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aq_classify(img: *const AqImage, out: *mut AqClassification) -> AqStatus {
    guard(|| {
        let img = image_ref(img, "image")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let c = classify(img, &ClassifierThresholds::default())?;
        *out = AqClassification {
            color_cast: c.flags.color_cast,
            low_light: c.flags.low_light,
            blurred: c.flags.blurred,
            category: c.category.rank() as u32,
            max_rel_dev: c.cast.max_rel_dev,
            mean_v: c.mean_v,
            laplacian_variance: c.laplacian_variance,
        };
        Ok(())
    })
}

/// Identifier of a category rank such as `"ColorBiasLowLightBlur"`, or null
/// for ranks outside 1 to 8. The string is static.
#[no_mangle]
pub extern "C" fn aq_category_name(rank: u32) -> *const c_char {
    static NAMES: OnceLock<Vec<CString>> = OnceLock::new();
    let names = NAMES.get_or_init(|| Category8::ALL.iter().map(|c| CString::new(c.id()).unwrap()).collect());
    (rank as usize)
        .checked_sub(1)
        .and_then(|i| names.get(i))
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// Enhances with seeded extractor weights. Neural methods center-crop the
/// input to the side multiple their extractors need.
///
/// # Safety
/// `img` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aq_enhance(
    img: *const AqImage,
    method: AqMethod,
    seed: u64,
    gain: f64,
    out: *mut *mut AqImage,
) -> AqStatus {
    guard(|| {
        let img = image_ref(img, "image")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let method = match method {
            AqMethod::Classic => Method::Classic,
            AqMethod::Vgg => Method::Vgg,
            AqMethod::Resnet => Method::Resnet,
            AqMethod::Unite => Method::Unite,
        };
        let e = Enhancer::seeded(method, ClassifierThresholds::default(), PlanParams::default(), gain, seed)?;
        *out = boxed(e.enhance(img)?.image);
        Ok(())
    })
}

/// PSNR in dB. Identical images set `*infinite` to true and `*db` to 0.
///
/// # Safety
/// Both handles must be live; `db` and `infinite` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aq_psnr(
    reference: *const AqImage,
    test: *const AqImage,
    db: *mut f64,
    infinite: *mut bool,
) -> AqStatus {
    guard(|| {
        let r = image_ref(reference, "reference")?;
        let t = image_ref(test, "test")?;
        let db = db.as_mut().ok_or_else(|| null("db"))?;
        let infinite = infinite.as_mut().ok_or_else(|| null("infinite"))?;
        match psnr(r, t)? {
            Psnr::Finite(v) => (*db, *infinite) = (v, false),
            Psnr::Infinite => (*db, *infinite) = (0.0, true),
        }
        Ok(())
    })
}

/// # Safety
/// `img` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aq_uciqe(img: *const AqImage, out: *mut f64) -> AqStatus {
    guard(|| {
        let img = image_ref(img, "image")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = uciqe(img)?.0;
        Ok(())
    })
}

/// # Safety
/// `img` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aq_uiqm(img: *const AqImage, out: *mut f64) -> AqStatus {
    guard(|| {
        let img = image_ref(img, "image")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = uiqm(img)?.0;
        Ok(())
    })
}
