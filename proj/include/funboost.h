/* funboost — boosted distributional regression for functional responses.
 *
 * C API: every function returns fb_status (0 on success); on failure the
 * message is available via fb_last_error() until the next call on the same
 * thread. Handles are opaque and must be released with the matching free
 * function.
 */
#ifndef FUNBOOST_H
#define FUNBOOST_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fb_status {
  FB_OK = 0,
  FB_E_CONFIG = 2, /* bad configuration or arguments */
  FB_E_DATA = 3,   /* unreadable, malformed or unusable data */
  FB_E_NUMERIC = 4 /* numerical failure during computation */
} fb_status;

/* Message from the most recent failing call on this thread ("" if none). */
const char* fb_last_error(void);

/* ---- datasets ---- */
typedef struct fb_dataset fb_dataset;

/* Read a wide CSV ("y@<t>" response columns, "<name>@<s>" functional
 * covariate columns, plain columns for scalars). `categorical` is a
 * comma-separated list of column names to treat as categorical (may be NULL).
 */
fb_status fb_dataset_read_csv(const char* path, const char* response_name,
                              const char* categorical, fb_dataset** out);
void fb_dataset_free(fb_dataset* data);
int fb_dataset_n_curves(const fb_dataset* data);
int fb_dataset_grid_size(const fb_dataset* data);

/* ---- fitted models ---- */
typedef struct fb_model fb_model;

fb_status fb_model_load(const char* path, fb_model** out);
fb_status fb_model_save(const fb_model* model, const char* path);
void fb_model_free(fb_model* model);
int fb_model_mstop(const fb_model* model);

/* ---- commands ----
 * Each command reads a JSON config and writes its outputs under `out_dir`.
 * Optional overrides: pass seed/mstop < 0 or jobs < 1 or method == NULL to
 * keep the config's values.
 */
fb_status fb_cmd_fit(const char* config_path, const char* data_path,
                     const char* out_dir, int64_t seed, int jobs, int mstop,
                     const char* method);
fb_status fb_cmd_predict(const char* config_path, const char* data_path,
                         const char* out_dir, int64_t seed, int jobs,
                         int mstop, const char* method);
fb_status fb_cmd_cv(const char* config_path, const char* data_path,
                    const char* out_dir, int64_t seed, int jobs, int mstop,
                    const char* method);
fb_status fb_cmd_simulate(const char* config_path, const char* out_dir,
                          int64_t seed, int jobs, int mstop,
                          const char* method);
fb_status fb_cmd_evaluate(const char* config_path, const char* data_path,
                          const char* out_dir, int64_t seed, int jobs,
                          int mstop, const char* method);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FUNBOOST_H */
