#include "piedpiper/piedpiper.h"

#include <cstring>
#include <string>

#include "piedpiper/errors.hpp"
#include "piedpiper/harness.hpp"

struct pp_config {
  pp::harness::ExperimentConfig cfg;
};

struct pp_epochs {
  pp::EpochSet set;
};

namespace {

thread_local std::string g_last_error;

pp_status fail(pp_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

/// Runs `fn`, translating library exceptions into status codes.
template <typename Fn>
pp_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PP_OK;
  } catch (const pp::ConfigError& e) {
    return fail(PP_ERROR_CONFIG, e.what());
  } catch (const pp::ParseError& e) {
    return fail(PP_ERROR_PARSE, e.what());
  } catch (const pp::DigestMismatch& e) {
    return fail(PP_ERROR_DIGEST_MISMATCH, e.what());
  } catch (const pp::IoError& e) {
    return fail(PP_ERROR_IO, e.what());
  } catch (const pp::Error& e) {
    return fail(PP_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(PP_ERROR_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* pp_version(void) { return "0.1.0"; }

const char* pp_status_name(pp_status status) {
  switch (status) {
    case PP_OK: return "ok";
    case PP_ERROR_INVALID_ARGUMENT: return "invalid argument";
    case PP_ERROR_CONFIG: return "config error";
    case PP_ERROR_PARSE: return "parse error";
    case PP_ERROR_IO: return "io error";
    case PP_ERROR_DIGEST_MISMATCH: return "digest mismatch";
    case PP_ERROR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* pp_last_error(void) { return g_last_error.c_str(); }

pp_status pp_config_create(pp_config** out) {
  if (out == nullptr) return fail(PP_ERROR_INVALID_ARGUMENT, "null output handle");
  return guarded([&] { *out = new pp_config(); });
}

void pp_config_destroy(pp_config* config) { delete config; }

pp_status pp_config_load(pp_config* config, const char* path) {
  if (config == nullptr || path == nullptr) {
    return fail(PP_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] { config->cfg.load_file(path); });
}

pp_status pp_config_set(pp_config* config, const char* key, const char* value) {
  if (config == nullptr || key == nullptr || value == nullptr) {
    return fail(PP_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] { config->cfg.set(key, value); });
}

pp_status pp_config_get(const pp_config* config, const char* key, char* buf, size_t buf_len) {
  if (config == nullptr || key == nullptr || buf == nullptr || buf_len == 0) {
    return fail(PP_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    const std::string& value = config->cfg.get(key);
    if (value.size() + 1 > buf_len) {
      throw pp::InvalidArgument("buffer too small for value of '" + std::string(key) + "'");
    }
    std::memcpy(buf, value.c_str(), value.size() + 1);
  });
}

pp_status pp_run_experiment(const pp_config* config, const char* out_dir) {
  if (config == nullptr) return fail(PP_ERROR_INVALID_ARGUMENT, "null config");
  return guarded([&] {
    const std::string dir = out_dir != nullptr ? out_dir : config->cfg.output_dir();
    pp::harness::run_experiment(config->cfg, dir);
  });
}

pp_status pp_replay(const char* manifest_path) {
  if (manifest_path == nullptr) return fail(PP_ERROR_INVALID_ARGUMENT, "null manifest path");
  return guarded([&] { pp::harness::replay(manifest_path); });
}

pp_status pp_epochs_load(const char* path, pp_epochs** out) {
  if (path == nullptr || out == nullptr) {
    return fail(PP_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    auto handle = new pp_epochs();
    try {
      handle->set = pp::harness::load_epochs(path);
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

pp_status pp_epochs_save(const pp_epochs* epochs, const char* path) {
  if (epochs == nullptr || path == nullptr) {
    return fail(PP_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] { pp::harness::save_epochs(epochs->set, path); });
}

size_t pp_epochs_count(const pp_epochs* epochs) {
  return epochs == nullptr ? 0 : epochs->set.size();
}

void pp_epochs_destroy(pp_epochs* epochs) { delete epochs; }

}  // extern "C"
