#ifndef REGION2VEC_H
#define REGION2VEC_H

/*
 * C interface to the region2vec library.
 *
 * Every function that can fail returns an int status code (R2V_OK on
 * success). On failure, r2v_last_error() returns a thread-local description
 * of the most recent error, prefixed with its qualified name
 * (e.g. "embedding.NoPositivePairs: ..."). Objects returned through
 * out-parameters are owned by the caller and released with the matching
 * *_free function; every *_free accepts NULL.
 */

#ifdef __cplusplus
extern "C" {
#endif

enum {
  R2V_OK = 0,
  R2V_ERR_INVALID_ARGUMENT = 1,
  R2V_ERR_IO = 2,
  R2V_ERR_PARSE = 3,
  R2V_ERR_EMPTY_GRAPH = 4,
  R2V_ERR_SHAPE_MISMATCH = 5,
  R2V_ERR_NO_POSITIVE_PAIRS = 6,
  R2V_ERR_NO_DENOMINATOR = 7,
  R2V_ERR_NON_FINITE_LOSS = 8,
  R2V_ERR_INVALID_K = 9,
  R2V_ERR_EMPTY_FLOWS = 10,
  R2V_ERR_NO_INTER_FLOW = 11,
  R2V_ERR_DEGENERATE_MEAN = 12,
  R2V_ERR_NO_PAIRS = 13,
  R2V_ERR_LENGTH_MISMATCH = 14,
  R2V_ERR_UNKNOWN_NODE_ID = 15,
  R2V_ERR_DUPLICATE_EDGE = 16,
  R2V_ERR_NON_NUMERIC_ATTRIBUTE = 17,
  R2V_ERR_MISSING_POVERTY_COLUMN = 18,
  R2V_ERR_INVALID_CONFIG = 19,
  R2V_ERR_CONFIG = 20,
  R2V_ERR_UNKNOWN = 99
};

/* Thread-local message for the most recent failure in this thread. Never
 * NULL; empty string when no error has occurred. */
const char* r2v_last_error(void);

/* Opaque handles. */
typedef struct r2v_dataset r2v_dataset;
typedef struct r2v_matrix r2v_matrix;   /* dense row-major doubles */
typedef struct r2v_labels r2v_labels;   /* community labels, 1-based */

/* ---------- datasets ---------- */

typedef struct r2v_synth_config {
  int grid_rows;
  int grid_cols;
  int k_true;
  double intra_flow_mean;
  double inter_flow_mean;
  int attribute_dims;
  double attribute_separation;
  unsigned long long seed;
} r2v_synth_config;

void r2v_synth_config_default(r2v_synth_config* config);

/* Loads the CSV triple (plus optional ground truth; pass NULL or "" to skip). */
int r2v_dataset_load(const char* nodes_csv, const char* adjacency_csv, const char* flows_csv,
                     const char* ground_truth_csv, r2v_dataset** out);

int r2v_dataset_generate(const r2v_synth_config* config, r2v_dataset** out);

/* Writes nodes/adjacency/flows (+ ground_truth when present) into dir. */
int r2v_dataset_write(const r2v_dataset* dataset, const char* dir);

int r2v_dataset_node_count(const r2v_dataset* dataset, int* out);

/* Standardized attribute matrix (column 0 is the poverty share). */
int r2v_dataset_attributes(const r2v_dataset* dataset, r2v_matrix** out);

/* Planted ground truth; *out is set to NULL when the dataset has none. */
int r2v_dataset_ground_truth(const r2v_dataset* dataset, r2v_labels** out);

void r2v_dataset_free(r2v_dataset* dataset);

/* ---------- embedding ---------- */

typedef struct r2v_training_config {
  int hidden_width;
  int output_width;
  int layers;
  int hop_threshold;
  int iterations;
  double learning_rate;
  double adam_beta1;
  double adam_beta2;
  double adam_epsilon;
  unsigned long long seed;
  double distance_floor;
  int pair_sample; /* 0 = use all pairs every iteration */
} r2v_training_config;

void r2v_training_config_default(r2v_training_config* config);

/* Trains the embedding. When trace_csv is non-NULL, writes the per-iteration
 * loss trace (iteration,total,numerator,negative_term,hop_term) to that path. */
int r2v_train(const r2v_dataset* dataset, const r2v_training_config* config,
              const char* trace_csv, r2v_matrix** out);

/* ---------- clustering and baselines ---------- */

/* Ward agglomeration over the rows of points, constrained by the dataset's
 * spatial adjacency. violations_out (optional) receives the number of merges
 * that had to ignore the constraint (0 on a connected graph). */
int r2v_ward_cluster(const r2v_dataset* dataset, const r2v_matrix* points, int k,
                     int* violations_out, r2v_labels** out);

int r2v_kmeans(const r2v_matrix* points, int k, unsigned long long seed, r2v_labels** out);

/* Louvain on the flow network. modularity_out and levels_out are optional. */
int r2v_louvain(const r2v_dataset* dataset, unsigned long long seed, double* modularity_out,
                int* levels_out, r2v_labels** out);

/* ---------- metrics ---------- */

typedef struct r2v_metrics {
  double flow_ratio;
  double inequality_median;
  double cosine_mean;
  double homogeneity;
  double adjusted_rand;  /* valid only when has_adjusted_rand != 0 */
  int has_adjusted_rand;
} r2v_metrics;

/* Evaluates a labeling. reference may be NULL; when given, the adjusted Rand
 * index against it is included. */
int r2v_evaluate(const r2v_dataset* dataset, const r2v_labels* labels, int bins,
                 const r2v_labels* reference, r2v_metrics* out);

/* Same evaluation, serialized as a JSON object. Free with r2v_string_free. */
int r2v_evaluate_json(const r2v_dataset* dataset, const r2v_labels* labels, int bins,
                      const r2v_labels* reference, char** json_out);

void r2v_string_free(char* text);

/* ---------- artifact files ---------- */

int r2v_write_embeddings(const r2v_dataset* dataset, const r2v_matrix* z, const char* path);
int r2v_read_embeddings(const r2v_dataset* dataset, const char* path, r2v_matrix** out);
int r2v_write_labels(const r2v_dataset* dataset, const r2v_labels* labels, const char* path);
int r2v_read_labels(const r2v_dataset* dataset, const char* path, r2v_labels** out);

/* ---------- accessors ---------- */

int r2v_matrix_rows(const r2v_matrix* m);
int r2v_matrix_cols(const r2v_matrix* m);
/* Row-major contiguous buffer of rows*cols doubles, valid until *_free. */
const double* r2v_matrix_data(const r2v_matrix* m);
void r2v_matrix_free(r2v_matrix* m);

int r2v_labels_size(const r2v_labels* labels);
int r2v_labels_k(const r2v_labels* labels);
/* Per-node labels in {1..k}, valid until *_free. */
const int* r2v_labels_data(const r2v_labels* labels);
void r2v_labels_free(r2v_labels* labels);

#ifdef __cplusplus
}
#endif

#endif /* REGION2VEC_H */
