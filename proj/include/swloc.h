/*
 * swloc — shallow-water passive acoustic source localization toolkit.
 *
 * C API over the C++ core: opaque handles, integer status codes, and a
 * thread-local error message. All functions returning swloc_status return
 * SWLOC_OK (0) on success; on failure swloc_last_error() describes the
 * problem until the next failing call on the same thread.
 */

#ifndef SWLOC_H
#define SWLOC_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SWLOC_API __declspec(dllexport)
#elif defined(__GNUC__) || defined(__clang__)
#define SWLOC_API __attribute__((visibility("default")))
#else
#define SWLOC_API
#endif

typedef enum swloc_status {
    SWLOC_OK = 0,
    SWLOC_ERR_INVALID_ARG = 1,
    SWLOC_ERR_CONFIG = 2,
    SWLOC_ERR_DOMAIN = 3,
    SWLOC_ERR_DEGENERATE_INPUT = 4,
    SWLOC_ERR_SHAPE = 5,
    SWLOC_ERR_STATE = 6,
    SWLOC_ERR_TRAINING = 7,
    SWLOC_ERR_IO = 8,
    SWLOC_ERR_INTERNAL = 9
} swloc_status;

SWLOC_API const char* swloc_version(void);

/* Message for the most recent failing call on this thread ("" if none). */
SWLOC_API const char* swloc_last_error(void);

/* ------------------------------------------------------------------ */
/* Pipeline commands. config_path names a JSON experiment config; pass  */
/* seed_override = NULL to use the seed in the config.                  */
/* ------------------------------------------------------------------ */

SWLOC_API swloc_status swloc_run_simulate(const char* config_path, const char* out_dir,
                                          const uint64_t* seed_override);

SWLOC_API swloc_status swloc_run_features(const char* config_path, const char* dataset_dir,
                                          const char* out_dir, const uint64_t* seed_override);

/* variant: "combined", "gcc_only", "cepstral_only", or NULL/"" for the
 * config default. */
SWLOC_API swloc_status swloc_run_train(const char* config_path, const char* features_dir,
                                       const char* out_dir, const char* variant,
                                       const uint64_t* seed_override);

/* methods: comma-separated subset of baseline,cnn_combined,cnn_gcc,
 * cnn_cepstral; NULL/"" evaluates baseline plus every checkpoint present. */
SWLOC_API swloc_status swloc_run_eval(const char* config_path, const char* features_dir,
                                      const char* dataset_dir, const char* checkpoint_dir,
                                      const char* out_dir, int force, const char* methods,
                                      const uint64_t* seed_override);

SWLOC_API swloc_status swloc_run_track_plot(const char* fixes_csv, const char* out_dir);

/* ------------------------------------------------------------------ */
/* Labeled recordings (.lwr)                                            */
/* ------------------------------------------------------------------ */

typedef struct swloc_recording swloc_recording;

SWLOC_API swloc_status swloc_recording_open(const char* path, swloc_recording** out);
SWLOC_API void swloc_recording_close(swloc_recording* rec);
SWLOC_API int swloc_recording_channels(const swloc_recording* rec);
SWLOC_API int64_t swloc_recording_samples(const swloc_recording* rec);
SWLOC_API double swloc_recording_fs(const swloc_recording* rec);
SWLOC_API int64_t swloc_recording_label_count(const swloc_recording* rec);
SWLOC_API swloc_status swloc_recording_label(const swloc_recording* rec, int64_t index,
                                             double* t_s, double* range_m, double* bearing_rad);
SWLOC_API swloc_status swloc_recording_read(const swloc_recording* rec, int channel,
                                            int64_t start, int64_t count, float* out);

/* ------------------------------------------------------------------ */
/* Trained models (.ckpt)                                               */
/* ------------------------------------------------------------------ */

typedef struct swloc_model swloc_model;

SWLOC_API swloc_status swloc_model_load(const char* path, swloc_model** out);
SWLOC_API void swloc_model_close(swloc_model* m);
SWLOC_API const char* swloc_model_variant(const swloc_model* m);
SWLOC_API swloc_status swloc_model_input_shape(const swloc_model* m, int* cep_len, int* cep_height,
                                               int* gcc_len, int* gcc_height);

/* cepstral: cep_len*cep_height floats, row-major [bin][channel];
 * gcc: gcc_len*gcc_height floats, row-major [lag][pair]. Outputs are meters
 * and radians (bearing folded into [0, pi]). */
SWLOC_API swloc_status swloc_model_predict(swloc_model* m, const float* cepstral,
                                           int64_t cepstral_len, const float* gcc,
                                           int64_t gcc_len, double* range_m,
                                           double* bearing_rad);

/* ------------------------------------------------------------------ */
/* Direct classical localization                                        */
/* ------------------------------------------------------------------ */

/* Wavefront-curvature inversion for a collinear 3-sensor array. tau12 and
 * tau23 follow c*tau12 = r1 - r2, c*tau23 = r2 - r3. On far-field or
 * non-physical inputs *valid is 0 and *range_m is NaN while *bearing_rad
 * still carries the plane-wave bearing estimate. */
SWLOC_API swloc_status swloc_wavefront_fix(double tau12_s, double tau23_s, double spacing_m,
                                           double sound_speed_mps, double max_range_m,
                                           double* range_m, double* bearing_rad, int* valid);

#ifdef __cplusplus
}
#endif

#endif /* SWLOC_H */
