#include "funboost.h"

#include <exception>
#include <sstream>
#include <string>

#include "commands/commands.hpp"
#include "core/csv.hpp"
#include "core/errors.hpp"
#include "engine/booster.hpp"
#include "engine/serialize.hpp"

namespace {

thread_local std::string g_last_error;

fb_status status_from_category(fb::ErrorCategory cat) {
  switch (cat) {
    case fb::ErrorCategory::Config:
      return FB_E_CONFIG;
    case fb::ErrorCategory::Data:
      return FB_E_DATA;
    case fb::ErrorCategory::Numeric:
      return FB_E_NUMERIC;
  }
  return FB_E_NUMERIC;
}

template <typename Fn>
fb_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FB_OK;
  } catch (const fb::Error& e) {
    g_last_error = e.what();
    return status_from_category(e.category());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FB_E_NUMERIC;
  } catch (...) {
    g_last_error = "unknown error";
    return FB_E_NUMERIC;
  }
}

fb_status check_arg(const void* p, const char* name) {
  if (p != nullptr) return FB_OK;
  g_last_error = std::string("argument '") + name + "' must not be NULL";
  return FB_E_CONFIG;
}

fb::Overrides make_overrides(int64_t seed, int jobs, int mstop,
                             const char* method) {
  fb::Overrides ov;
  if (seed >= 0) ov.seed = static_cast<std::uint64_t>(seed);
  if (jobs >= 1) ov.jobs = jobs;
  if (mstop >= 0) ov.mstop = mstop;
  if (method != nullptr && *method != '\0') ov.method = method;
  return ov;
}

}  // namespace

struct fb_dataset {
  fb::FunctionalDataset data;
};

struct fb_model {
  fb::FittedModel model;
};

extern "C" {

const char* fb_last_error(void) { return g_last_error.c_str(); }

fb_status fb_dataset_read_csv(const char* path, const char* response_name,
                              const char* categorical, fb_dataset** out) {
  if (fb_status s = check_arg(path, "path"); s != FB_OK) return s;
  if (fb_status s = check_arg(out, "out"); s != FB_OK) return s;
  *out = nullptr;
  return guarded([&] {
    fb::CsvSchema schema;
    if (response_name != nullptr && *response_name != '\0') {
      schema.response_name = response_name;
    }
    if (categorical != nullptr) {
      std::stringstream ss(categorical);
      std::string name;
      while (std::getline(ss, name, ',')) {
        if (!name.empty()) schema.categorical.insert(name);
      }
    }
    *out = new fb_dataset{fb::ingest_csv_file(path, schema)};
  });
}

void fb_dataset_free(fb_dataset* data) { delete data; }

int fb_dataset_n_curves(const fb_dataset* data) {
  return data == nullptr ? 0 : static_cast<int>(data->data.n_curves());
}

int fb_dataset_grid_size(const fb_dataset* data) {
  return data == nullptr ? 0 : static_cast<int>(data->data.grid_size());
}

fb_status fb_model_load(const char* path, fb_model** out) {
  if (fb_status s = check_arg(path, "path"); s != FB_OK) return s;
  if (fb_status s = check_arg(out, "out"); s != FB_OK) return s;
  *out = nullptr;
  return guarded([&] { *out = new fb_model{fb::load_model(path)}; });
}

fb_status fb_model_save(const fb_model* model, const char* path) {
  if (fb_status s = check_arg(model, "model"); s != FB_OK) return s;
  if (fb_status s = check_arg(path, "path"); s != FB_OK) return s;
  return guarded([&] { fb::save_model(model->model, path); });
}

void fb_model_free(fb_model* model) { delete model; }

int fb_model_mstop(const fb_model* model) {
  return model == nullptr ? -1 : model->model.m_stop;
}

fb_status fb_cmd_fit(const char* config_path, const char* data_path,
                     const char* out_dir, int64_t seed, int jobs, int mstop,
                     const char* method) {
  if (fb_status s = check_arg(config_path, "config_path"); s != FB_OK) return s;
  if (fb_status s = check_arg(data_path, "data_path"); s != FB_OK) return s;
  if (fb_status s = check_arg(out_dir, "out_dir"); s != FB_OK) return s;
  return guarded([&] {
    fb::cmd_fit(config_path, data_path, out_dir,
                make_overrides(seed, jobs, mstop, method));
  });
}

fb_status fb_cmd_predict(const char* config_path, const char* data_path,
                         const char* out_dir, int64_t seed, int jobs,
                         int mstop, const char* method) {
  if (fb_status s = check_arg(config_path, "config_path"); s != FB_OK) return s;
  if (fb_status s = check_arg(data_path, "data_path"); s != FB_OK) return s;
  if (fb_status s = check_arg(out_dir, "out_dir"); s != FB_OK) return s;
  return guarded([&] {
    fb::cmd_predict(config_path, data_path, out_dir,
                    make_overrides(seed, jobs, mstop, method));
  });
}

fb_status fb_cmd_cv(const char* config_path, const char* data_path,
                    const char* out_dir, int64_t seed, int jobs, int mstop,
                    const char* method) {
  if (fb_status s = check_arg(config_path, "config_path"); s != FB_OK) return s;
  if (fb_status s = check_arg(data_path, "data_path"); s != FB_OK) return s;
  if (fb_status s = check_arg(out_dir, "out_dir"); s != FB_OK) return s;
  return guarded([&] {
    fb::cmd_cv(config_path, data_path, out_dir,
               make_overrides(seed, jobs, mstop, method));
  });
}

fb_status fb_cmd_simulate(const char* config_path, const char* out_dir,
                          int64_t seed, int jobs, int mstop,
                          const char* method) {
  if (fb_status s = check_arg(config_path, "config_path"); s != FB_OK) return s;
  if (fb_status s = check_arg(out_dir, "out_dir"); s != FB_OK) return s;
  return guarded([&] {
    fb::cmd_simulate(config_path, out_dir,
                     make_overrides(seed, jobs, mstop, method));
  });
}

fb_status fb_cmd_evaluate(const char* config_path, const char* data_path,
                          const char* out_dir, int64_t seed, int jobs,
                          int mstop, const char* method) {
  if (fb_status s = check_arg(config_path, "config_path"); s != FB_OK) return s;
  if (fb_status s = check_arg(data_path, "data_path"); s != FB_OK) return s;
  if (fb_status s = check_arg(out_dir, "out_dir"); s != FB_OK) return s;
  return guarded([&] {
    fb::cmd_evaluate(config_path, data_path, out_dir,
                     make_overrides(seed, jobs, mstop, method));
  });
}

}  // extern "C"
