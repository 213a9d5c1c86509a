/*
 * piedpiper C API: a deterministic synthetic brain-computer-interface
 * simulator behind a flat shared-library surface. Handles are opaque,
 * every call returns a status code, and pp_last_error() describes the
 * most recent failure on the calling thread.
 */
#ifndef PIEDPIPER_H
#define PIEDPIPER_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(PP_BUILDING)
#define PP_API __declspec(dllexport)
#else
#define PP_API __declspec(dllimport)
#endif
#else
#define PP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pp_status {
  PP_OK = 0,
  PP_ERROR_INVALID_ARGUMENT = 1,
  PP_ERROR_CONFIG = 2,
  PP_ERROR_PARSE = 3,
  PP_ERROR_IO = 4,
  PP_ERROR_DIGEST_MISMATCH = 5,
  PP_ERROR_INTERNAL = 6,
} pp_status;

typedef struct pp_config pp_config;
typedef struct pp_epochs pp_epochs;

PP_API const char* pp_version(void);
PP_API const char* pp_status_name(pp_status status);

/* Message describing the last failure on this thread; empty on success. */
PP_API const char* pp_last_error(void);

/* Configuration ----------------------------------------------------- */

/* Creates a configuration holding the built-in defaults. */
PP_API pp_status pp_config_create(pp_config** out);
PP_API void pp_config_destroy(pp_config* config);

/* Strictly parses a flat `key = value` file on top of current values. */
PP_API pp_status pp_config_load(pp_config* config, const char* path);

/* Sets one key; unknown keys and malformed values are rejected. */
PP_API pp_status pp_config_set(pp_config* config, const char* key, const char* value);

/* Copies the current value of `key` into buf (NUL-terminated). */
PP_API pp_status pp_config_get(const pp_config* config, const char* key, char* buf,
                               size_t buf_len);

/* Experiments -------------------------------------------------------- */

/*
 * Runs the configured scenario and writes its artifact files into out_dir
 * (pass NULL to use the config's output_dir). Deterministic in
 * (config, seed).
 */
PP_API pp_status pp_run_experiment(const pp_config* config, const char* out_dir);

/*
 * Re-runs the manifest's configuration into a scratch directory and
 * verifies every recorded digest. PP_ERROR_DIGEST_MISMATCH on differences.
 */
PP_API pp_status pp_replay(const char* manifest_path);

/* Epoch files --------------------------------------------------------- */

PP_API pp_status pp_epochs_load(const char* path, pp_epochs** out);
PP_API pp_status pp_epochs_save(const pp_epochs* epochs, const char* path);
PP_API size_t pp_epochs_count(const pp_epochs* epochs);
PP_API void pp_epochs_destroy(pp_epochs* epochs);

#ifdef __cplusplus
}
#endif

#endif /* PIEDPIPER_H */
