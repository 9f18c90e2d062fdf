#ifndef AETHER_LAB_H
#define AETHER_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AlStatus {
  AL_STATUS_OK = 0,
  AL_STATUS_NULL_POINTER = 1,
  AL_STATUS_INVALID_ARGUMENT = 2,
  AL_STATUS_NOT_CONVERGED = 3,
  AL_STATUS_INDEFINITE = 4,
  AL_STATUS_UNSTABLE = 5,
  AL_STATUS_SINGULAR = 6,
  AL_STATUS_IO = 7,
  AL_STATUS_PANIC = 8,
} AlStatus;

// Opaque unit cell.
typedef struct AlCell AlCell;

// Opaque fourth-order tensor.
typedef struct AlTensor AlTensor;

// Isotropic phase constants.
typedef struct AlPhase {
  double lambda;
  double mu;
  double rho;
} AlPhase;

typedef struct AlDispersion {
  double omega[2];
  // Eigenvectors, mode-major.
  double eta[4];
  int zero_mode;
  int negative_mode;
} AlDispersion;

typedef struct AlBenchmark {
  double dt;
  uintptr_t steps;
  double max_rel_error;
  double energy_drift;
  double u1_ratio;
} AlBenchmark;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. Owned by the library.
const char *al_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *al_version(void);

// # Safety
// `p` and `out` must be valid pointers.
enum AlStatus al_iso_tensor(const struct AlPhase *p, struct AlTensor **out);

// # Safety
// All pointers must be valid.
enum AlStatus al_gutierrez_tensor(const struct AlPhase *p1,
                                  const struct AlPhase *p2,
                                  struct AlTensor **out);

// Closed-form laminate tensor; `normal` is 1 or 2.
//
// # Safety
// All pointers must be valid.
enum AlStatus al_laminate_tensor(const struct AlPhase *p1,
                                 const struct AlPhase *p2,
                                 double theta,
                                 int normal,
                                 struct AlTensor **out);

// Tensor from 16 entries in `(2i+j, 2k+h)` row-major order.
//
// # Safety
// `entries` must point to 16 doubles.
enum AlStatus al_tensor_from_array(const double *entries, struct AlTensor **out);

// Writes the 16 entries in `(2i+j, 2k+h)` row-major order.
//
// # Safety
// `t` must be a live handle and `out` must hold 16 doubles.
enum AlStatus al_tensor_to_array(const struct AlTensor *t, double *out);

// `L_ijkh` with one-based indices (`1, 1, 2, 2` is `L1122`).
//
// # Safety
// `t` must be a live handle and `out` valid.
enum AlStatus al_tensor_entry(const struct AlTensor *t,
                              uintptr_t i,
                              uintptr_t j,
                              uintptr_t k,
                              uintptr_t h,
                              double *out);

// Strong-ellipticity constant `min L(a⊗b)·(a⊗b)` over unit `a`, `b`.
//
// # Safety
// `t` must be a live handle and `out` valid.
enum AlStatus al_se_constant(const struct AlTensor *t, double *out);

// Very-strong-ellipticity constant on symmetric matrices.
//
// # Safety
// `t` must be a live handle and `out` valid.
enum AlStatus al_vse_constant(const struct AlTensor *t, double *out);

// Plane-wave modes of a Gutiérrez-form tensor at wave vector `(k1, k2)`.
//
// # Safety
// `t` must be a live handle and `out` valid.
enum AlStatus al_dispersion(const struct AlTensor *t,
                            double rho_bar,
                            double k1,
                            double k2,
                            struct AlDispersion *out);

// # Safety
// `t` must come from this library or be NULL.
void al_tensor_free(struct AlTensor *t);

// Layered cell; `theta` is the phase-1 fraction, `normal` is 1 or 2.
//
// # Safety
// All pointers must be valid.
enum AlStatus al_cell_layers(const struct AlPhase *p1,
                             const struct AlPhase *p2,
                             double theta,
                             int normal,
                             struct AlCell **out);

// Cell with a phase-1 disk inclusion.
//
// # Safety
// All pointers must be valid.
enum AlStatus al_cell_disk(const struct AlPhase *p1,
                           const struct AlPhase *p2,
                           double cx,
                           double cy,
                           double radius,
                           struct AlCell **out);

// Homogenized tensor from the periodic cell problem on an `n × n` grid.
//
// # Safety
// `cell` must be a live handle and `out` valid.
enum AlStatus al_homogenize(const struct AlCell *cell, uintptr_t n, struct AlTensor **out);

// # Safety
// `c` must come from this library or be NULL.
void al_cell_free(struct AlCell *c);

// Transverse plane-wave benchmark on `(0, π)²` with an `m × m` grid.
//
// # Safety
// `l0` must be a live handle and `out` valid.
enum AlStatus al_wave_benchmark(const struct AlTensor *l0,
                                double rho_bar,
                                uintptr_t m,
                                struct AlBenchmark *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AETHER_LAB_H */
