#ifndef FEWBODY_H
#define FEWBODY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes; 2 to 4 coincide with the command-line exit codes.
typedef enum FbStatus {
  FB_STATUS_OK = 0,
  // Null pointer, invalid UTF-8 or an argument outside its domain.
  FB_STATUS_INVALID_ARGUMENT = 1,
  FB_STATUS_CONFIG_ERROR = 2,
  FB_STATUS_NUMERIC_ERROR = 3,
  FB_STATUS_INCONCLUSIVE = 4,
  // A Rust panic was caught at the boundary.
  FB_STATUS_PANIC = 5,
} FbStatus;

// Opaque model handle.
typedef struct FbModel FbModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses configuration text into a new handle stored in `*out`.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum FbStatus fb_model_from_config(const char *text, struct FbModel **out);

// Releases a handle; null is ignored.
//
// # Safety
// `model` must come from [`fb_model_from_config`] and not be freed twice.
void fb_model_free(struct FbModel *model);

// Writes the 64 hex digits of the configuration hash and a NUL into `buf`,
// which must hold at least 65 bytes.
//
// # Safety
// `model` must be a live handle and `buf` writable for `len` bytes.
enum FbStatus fb_config_hash(const struct FbModel *model, char *buf, uintptr_t len);

// Threshold coupling of one pair (12, 13 or 23) in its Jacobi variable.
//
// # Safety
// `model` must be a live handle and `out` valid for writes.
enum FbStatus fb_two_body_threshold(const struct FbModel *model, int32_t pair, double *out);

// Zero-energy spectral radius of the Faddeev operator at parameter `s` of
// the configured coupling path, extrapolated from two small `z`.
//
// # Safety
// `model` must be a live handle and `out` valid for writes.
enum FbStatus fb_bs_radius(const struct FbModel *model, double s, double *out);

// Variational ground energy and continuum threshold at the configured
// couplings. Either out-pointer may be null.
//
// # Safety
// `model` must be a live handle; non-null outputs must be valid for writes.
enum FbStatus fb_ground_energy(const struct FbModel *model, double *energy, double *threshold);

// Probability that the ground state has hyperradius below `r`.
//
// # Safety
// `model` must be a live handle and `out` valid for writes.
enum FbStatus fb_probability_inside(const struct FbModel *model, double r, double *out);

// Message of the last failure on this thread, empty after a success. The
// pointer stays valid until the next call on the same thread.
const char *fb_last_error_message(void);

// Library version, static storage.
const char *fb_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FEWBODY_H */
