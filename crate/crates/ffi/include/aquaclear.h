#ifndef AQUACLEAR_H
#define AQUACLEAR_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Enhancement method selector.
 */
typedef enum AqMethod {
  AQ_METHOD_CLASSIC = 0,
  AQ_METHOD_VGG = 1,
  AQ_METHOD_RESNET = 2,
  AQ_METHOD_UNITE = 3,
} AqMethod;

/**
 * Result of every fallible call.
 */
typedef enum AqStatus {
  AQ_STATUS_OK = 0,
  AQ_STATUS_NULL_POINTER = 1,
  AQ_STATUS_INVALID_ARGUMENT = 2,
  AQ_STATUS_INVALID_IMAGE = 3,
  AQ_STATUS_IO = 4,
  AQ_STATUS_DECODE = 5,
  AQ_STATUS_WEIGHTS = 6,
  AQ_STATUS_FAILED = 7,
  AQ_STATUS_PANIC = 8,
} AqStatus;

/**
 * Opaque image handle.
 */
typedef struct AqImage AqImage;

/**
 * Detector output under the default thresholds. `category` is the rank
 * (1 to 8) used in category reports; `aq_category_name` names it.
 */
typedef struct AqClassification {
  bool color_cast;
  bool low_light;
  bool blurred;
  uint32_t category;
  double max_rel_dev;
  double mean_v;
  double laplacian_variance;
} AqClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *aq_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *aq_version(void);

/**
 * Copies `width * height * channels` planar samples (channel-major, then
 * row-major) into a new image. Samples must lie in [0, 1].
 *
 * # Safety
 * `samples` must point to that many readable floats; `out` must be writable.
 */
enum AqStatus aq_image_new(size_t width,
                           size_t height,
                           size_t channels,
                           const float *samples,
                           struct AqImage **out);

/**
 * Reads a binary PPM (P6, maxval 255).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum AqStatus aq_image_load(const char *path, struct AqImage **out);

/**
 * Writes a three-channel image as a binary PPM.
 *
 * # Safety
 * `img` must be a live handle or null; `path` a NUL-terminated string.
 */
enum AqStatus aq_image_save(const struct AqImage *img, const char *path);

/**
 * Releases an image. Null is ignored.
 *
 * # Safety
 * `img` must come from this library and not be freed twice.
 */
void aq_image_free(struct AqImage *img);

/**
 * # Safety
 * `img` must be a live handle or null (which yields 0).
 */
size_t aq_image_width(const struct AqImage *img);

/**
 * # Safety
 * `img` must be a live handle or null (which yields 0).
 */
size_t aq_image_height(const struct AqImage *img);

/**
 * # Safety
 * `img` must be a live handle or null (which yields 0).
 */
size_t aq_image_channels(const struct AqImage *img);

/**
 * Planar samples, `width * height * channels` of them, valid while the
 * handle lives.
 *
 * # Safety
 * `img` must be a live handle or null (which yields null).
 */
const float *aq_image_data(const struct AqImage *img);

/**
 * Classifies under the default thresholds.
 *
 * # Safety
 * `img` must be a live handle; `out` must be writable.
 */
enum AqStatus aq_classify(const struct AqImage *img, struct AqClassification *out);

/**
 * Identifier of a category rank such as `"ColorBiasLowLightBlur"`, or null
 * for ranks outside 1 to 8. The string is static.
 */
const char *aq_category_name(uint32_t rank);

/**
 * Enhances with seeded extractor weights. Neural methods center-crop the
 * input to the side multiple their extractors need.
 *
 * # Safety
 * `img` must be a live handle; `out` must be writable.
 */
enum AqStatus aq_enhance(const struct AqImage *img,
                         enum AqMethod method,
                         uint64_t seed,
                         double gain,
                         struct AqImage **out);

/**
 * PSNR in dB. Identical images set `*infinite` to true and `*db` to 0.
 *
 * # Safety
 * Both handles must be live; `db` and `infinite` must be writable.
 */
enum AqStatus aq_psnr(const struct AqImage *reference,
                      const struct AqImage *test,
                      double *db,
                      bool *infinite);

/**
 * # Safety
 * `img` must be a live handle; `out` must be writable.
 */
enum AqStatus aq_uciqe(const struct AqImage *img, double *out);

/**
 * # Safety
 * `img` must be a live handle; `out` must be writable.
 */
enum AqStatus aq_uiqm(const struct AqImage *img, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AQUACLEAR_H */
