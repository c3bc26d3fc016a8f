#pragma once

// Classic scalar matrix factorization and its block generalisation.
//
// A MatMat model holds one t x d block U_u per user and one d x t block V_i
// per item, and fits each observed target block R_ui by the product U_u V_i
// under the squared Frobenius loss. With t = 1 this reduces exactly to the
// classic model p_u . q_i fitting the normalized rating.
//
// Training is plain SGD with a simultaneous update of both blocks from the
// same residual. Both trainers draw from a single seeded std::mt19937_64:
// first the Gaussian initialization (all user factors in index order, then
// all item factors), then one Fisher-Yates shuffle of the training order per
// epoch.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "matmat/blocktarget.hpp"
#include "matmat/dataset.hpp"
#include "matmat/dense.hpp"

namespace matmat {

struct ClampRange {
  double lo = 0.5;
  double hi = 5.0;

  double apply(double v) const noexcept { return v < lo ? lo : (v > hi ? hi : v); }
  bool operator==(const ClampRange&) const = default;
};

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 30;
  std::size_t d = 2;
  std::uint64_t seed = 0;
  double init_std = 0.1;
  double l2 = 0.0;
  ClampRange clamp{};
};

// Throws ConfigError on the first violated constraint.
void validate(const TrainConfig& config);

struct MatMatModel {
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::size_t t = 0;
  std::size_t d = 0;
  double max_rating = 1.0;
  ClampRange clamp{};
  BlockBank U;  // n_users blocks of t x d
  BlockBank V;  // n_items blocks of d x t

  bool operator==(const MatMatModel&) const = default;
};

struct ClassicModel {
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::size_t d = 0;
  double max_rating = 1.0;
  ClampRange clamp{};
  BlockBank P;  // n_users rows of length d
  BlockBank Q;  // n_items rows of length d

  bool operator==(const ClassicModel&) const = default;
};

// Sum of squared residuals over the training samples after each epoch.
struct LossTrace {
  std::vector<double> epoch_loss;
};

template <typename Model>
struct TrainResult {
  Model model;
  LossTrace trace;
};

struct BlockSample {
  UserIndex user = 0;
  ItemIndex item = 0;
  Matrix target;  // t x t
};

struct ScalarSample {
  UserIndex user = 0;
  ItemIndex item = 0;
  double target = 0.0;  // normalized rating
};

MatMatModel init_matmat(const TrainConfig& config, std::size_t n_users, std::size_t n_items, std::size_t t,
                        double max_rating = 1.0);
ClassicModel init_classic(const TrainConfig& config, std::size_t n_users, std::size_t n_items,
                          double max_rating = 1.0);

// ---- block kernels -------------------------------------------------------

// E = U V - R.
void block_residual(ConstMatrixView U, ConstMatrixView V, ConstMatrixView R, MatrixView E);

// ||U V - R||^2 + l2 (||U||^2 + ||V||^2)
double block_loss(ConstMatrixView U, ConstMatrixView V, ConstMatrixView R, double l2 = 0.0);

// Gradients of block_loss:
//   dU = 2 E V^T + 2 l2 U,   dV = 2 U^T E + 2 l2 V.
void block_gradient(ConstMatrixView U, ConstMatrixView V, ConstMatrixView E, double l2, MatrixView dU,
                    MatrixView dV);

Matrix matmat_residual(const MatMatModel& model, UserIndex u, ItemIndex i, const BlockTarget& target);

// One SGD update of U_u and V_i; both gradients use the residual of the
// pre-update factors. Returns the pre-update squared residual. Throws
// TrainingError (without epoch) if any updated entry is non-finite.
double sgd_step(MatMatModel& model, UserIndex u, ItemIndex i, ConstMatrixView target, double learning_rate,
                double l2);
double sgd_step(ClassicModel& model, UserIndex u, ItemIndex i, double target, double learning_rate, double l2);

// Sum of squared block residuals (no penalty) over `samples`.
double objective(const MatMatModel& model, std::span<const BlockSample> samples);
double objective(const ClassicModel& model, std::span<const ScalarSample> samples);

// ---- training ------------------------------------------------------------

TrainResult<MatMatModel> train_blocks(std::span<const BlockSample> samples, std::size_t n_users,
                                      std::size_t n_items, std::size_t t, double max_rating,
                                      const TrainConfig& config);
TrainResult<ClassicModel> train_scalars(std::span<const ScalarSample> samples, std::size_t n_users,
                                        std::size_t n_items, double max_rating, const TrainConfig& config);

// Target blocks for the training triples of `split`, normalized by the full table.
std::vector<BlockSample> training_blocks(const InteractionTable& table, const PopularityTable& pop,
                                         const BlockSpec& spec, const Split& split);
std::vector<ScalarSample> training_scalars(const InteractionTable& table, const Split& split);

TrainResult<MatMatModel> train_matmat(const InteractionTable& table, const PopularityTable& pop,
                                      const BlockSpec& spec, const Split& split, const TrainConfig& config);
TrainResult<ClassicModel> train_classic(const InteractionTable& table, const Split& split,
                                        const TrainConfig& config);

// ---- prediction ----------------------------------------------------------

// max_rating * mean(diag(U_u V_i)), clamped.
double predict_matmat(const MatMatModel& model, UserIndex u, ItemIndex i);
// max_rating * (p_u . q_i), clamped.
double predict_classic(const ClassicModel& model, UserIndex u, ItemIndex i);

inline double predict(const MatMatModel& model, UserIndex u, ItemIndex i) { return predict_matmat(model, u, i); }
inline double predict(const ClassicModel& model, UserIndex u, ItemIndex i) { return predict_classic(model, u, i); }

}  // namespace matmat
