// Copyright 2026 The BiSyn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * C interface to the BiSyn aspect sentiment classifier.
 *
 * Every object is an opaque handle released with its *_free function.
 * Functions return a bisyn_status; on failure a description of the last
 * error on the calling thread is available from bisyn_last_error(). Strings
 * returned through char** out-parameters are owned by the caller and must be
 * released with bisyn_string_free().
 */
#ifndef BISYN_BISYN_H_
#define BISYN_BISYN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(BISYN_BUILDING_LIBRARY)
#define BISYN_API __declspec(dllexport)
#else
#define BISYN_API __declspec(dllimport)
#endif
#else
#define BISYN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bisyn_status {
  BISYN_OK = 0,
  BISYN_ERR_VALIDATION = 1, /* malformed input, config or files */
  BISYN_ERR_RUNTIME = 2,    /* failure while running */
  BISYN_ERR_NUMERIC = 3,    /* non-finite loss or gradient */
  BISYN_ERR_ARGUMENT = 4    /* null handle or out-pointer */
} bisyn_status;

typedef struct bisyn_config bisyn_config;
typedef struct bisyn_dataset bisyn_dataset;
typedef struct bisyn_model bisyn_model;

typedef struct bisyn_epoch_stats {
  size_t epoch;
  double train_loss;
  double train_accuracy;
  double valid_loss;
  double valid_accuracy;
  double valid_macro_f1;
} bisyn_epoch_stats;

typedef void (*bisyn_epoch_callback)(const bisyn_epoch_stats *stats, void *user_data);

BISYN_API const char *bisyn_version(void);
BISYN_API const char *bisyn_last_error(void);
BISYN_API void bisyn_string_free(char *s);

/* Configuration: flat "key = value" text, '#' starts a comment. */
BISYN_API bisyn_status bisyn_config_from_text(const char *text, bisyn_config **out);
BISYN_API bisyn_status bisyn_config_from_file(const char *path, bisyn_config **out);
BISYN_API bisyn_status bisyn_config_set(bisyn_config *config, const char *key,
                                        const char *value);
/* Applies BISYN_SEED from the environment when it is set. */
BISYN_API bisyn_status bisyn_config_apply_env(bisyn_config *config);
BISYN_API bisyn_status bisyn_config_to_text(const bisyn_config *config, char **out);
BISYN_API void bisyn_config_free(bisyn_config *config);

/* Datasets: one JSON record per line. Multi-word aspects are merged into
 * single tokens on load. */
BISYN_API bisyn_status bisyn_dataset_load(const char *path, bisyn_dataset **out);
BISYN_API bisyn_status bisyn_dataset_size(const bisyn_dataset *data, size_t *out);
BISYN_API void bisyn_dataset_free(bisyn_dataset *data);

/* Syntax graphs of every aspect of sentence `id` as one JSON object.
 * `fusion` is one of dot, add, cond_add, con_only, dep_only. */
BISYN_API bisyn_status bisyn_dataset_graph_json(const bisyn_dataset *data, const char *id,
                                                const char *fusion, int max_layers,
                                                char **out);
/* Segmentation terms of every neighbor aspect pair of sentence `id`, one
 * JSON object per line. */
BISYN_API bisyn_status bisyn_dataset_ps_json(const bisyn_dataset *data, const char *id,
                                             char **out);

/* Writes `n` generated records to `path`. */
BISYN_API bisyn_status bisyn_synth_write(size_t n, uint64_t seed, double noise,
                                         const char *path);

/* Trains a model. `valid` may be null; `callback` may be null. */
BISYN_API bisyn_status bisyn_train(const bisyn_config *config, const bisyn_dataset *train,
                                   const bisyn_dataset *valid, bisyn_epoch_callback callback,
                                   void *user_data, bisyn_model **out);
/* JSON summary of the training run: best epoch, early stop, history. */
BISYN_API bisyn_status bisyn_model_train_summary(const bisyn_model *model, char **out);
BISYN_API bisyn_status bisyn_model_save(const bisyn_model *model, const char *dir);
/* `archive_dir` may be null to use the path stored in the checkpoint. */
BISYN_API bisyn_status bisyn_model_load(const char *dir, const char *archive_dir,
                                        bisyn_model **out);
BISYN_API bisyn_status bisyn_model_num_params(const bisyn_model *model, size_t *out);
/* Metrics report as a JSON object. */
BISYN_API bisyn_status bisyn_model_evaluate(bisyn_model *model, const bisyn_dataset *data,
                                            char **out);
/* One JSON object per aspect and line: id, aspect_index, term, label, probs. */
BISYN_API bisyn_status bisyn_model_predict(bisyn_model *model, const bisyn_dataset *data,
                                           char **out);
BISYN_API void bisyn_model_free(bisyn_model *model);

#ifdef __cplusplus
}
#endif

#endif /* BISYN_BISYN_H_ */
